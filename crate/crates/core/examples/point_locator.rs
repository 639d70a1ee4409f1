//! Locating rationals exactly and bracketing square roots.
//!
//! A rational target is reached after finitely many Stern–Brocot mediants.
//! An irrational one only ever gets a narrower bracket.

use hybridspace::locator::{self, Strategy};
use hybridspace::streams::{DigitStream, Radix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trace = locator::locate(&locator::rational_cut(3, 7)?, 100, Strategy::SternBrocot)?;
    let path: Vec<String> = trace.iterates().map(ToString::to_string).collect();
    println!("3/7 via mediants: {}", path.join(" -> "));

    for strategy in [Strategy::SternBrocot, Strategy::Bisection] {
        let trace = locator::locate(&locator::dedekind_cut_sqrt(2)?, 30, strategy)?;
        let (lo, hi) = trace.bracket().expect("irrational targets keep a bracket");
        println!("sqrt(2) {strategy:?} after 30 rounds: [{lo}, {hi}]");
    }

    // Truncations of 3.14159... as exact rationals.
    let pi = DigitStream::literal(&[1, 4, 1, 5, 9], Radix::Decimal)?;
    let approx = locator::cauchy_approximants(&pi, 3, 6)?;
    println!("pi truncations: {}", approx.iter().map(ToString::to_string).collect::<Vec<_>>().join(", "));
    Ok(())
}
