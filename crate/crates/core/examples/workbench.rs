//! Driving the command-line workbench in-process.

use hybridspace::cli;

fn main() {
    let runs: &[&[&str]] = &[
        &["hybridspace", "hybrid", "--pairs", "0,3,9,12"],
        &["hybridspace", "gen", "--mask", "111xxx", "--seed", "42", "--n", "18"],
        &["hybridspace", "locate", "--target", "sqrt:2", "--budget", "4"],
        &["hybridspace", "sat", "count", "--k", "3", "--n", "5"],
        &["hybridspace", "hybrid", "--pairs", "0,5,3,8"],
    ];
    let mut stdout = std::io::stdout();
    let mut stderr = std::io::stderr();
    for args in runs {
        println!("$ {}", args.join(" "));
        let code = cli::run(args.iter().copied(), &mut stdout, &mut stderr);
        println!("(exit {code})\n");
    }
}
