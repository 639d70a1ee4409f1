//! Turning a 3-CNF into a guessing game over 2-CNF restrictions.
//!
//! Each clause `l1 ∨ l2 ∨ l3` is read as `¬l1 ⇒ l2 ∨ l3`; one guessed bit per
//! clause keeps either `l2` or `l3`. The formula is satisfiable exactly when
//! some guess string leaves a satisfiable 2-CNF.

use hybridspace::dimacs;
use hybridspace::sat;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cnf = dimacs::parse("p cnf 4 5\n1 -2 3 0\n-1 2 4 0\n2 -3 -4 0\n-1 -2 -4 0\n1 3 4 0\n")?;
    let game = sat::reduce_3sat_to_game(&cnf)?;
    println!("{} positions, {} guess strings", game.len(), game.guess_space());

    match game.search()? {
        Some((guess, decoding)) => {
            println!("guess {guess:?}");
            println!("restricted 2-CNF:\n{}", dimacs::write(&decoding.restricted));
            let witness = decoding.result.witness().expect("consistent guesses carry a witness");
            println!("witness {:?}, satisfies original: {}", witness.values(), sat::check_assignment(&cnf, witness)?);
        }
        None => println!("no guess works"),
    }

    for (k, n) in [(2, 40), (3, 5), (3, 60), (4, 10)] {
        println!("({k},{n}) possibilities: {}", sat::possibility_count(k, n)?);
    }
    println!("width-3 convexity: {}", sat::clause_convexity(3, false)?);
    Ok(())
}
