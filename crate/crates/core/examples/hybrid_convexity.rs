//! Distances between ordered pairs and the convexity of a hybrid interval.

use hybridspace::hybrid::{self, OrderedPair};
use hybridspace::streams::PatternMask;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let pairs = [((0, 3), (9, 12)), ((0, 3), (3, 12)), ((-4, 0), (1, 8))];
    for ((i, j), (k, l)) in pairs {
        let a = OrderedPair::new(i, j)?;
        let b = OrderedPair::new(k, l)?;
        let c = hybrid::convexity(&a, &b)?;
        println!(
            "({i},{j}) ({k},{l}): virtual {} actual {} convexity {c} predictable {}",
            hybrid::virtual_distance(&a, &b)?,
            hybrid::actual_distance(&a, &b)?,
            hybrid::predictable_fraction(&c)?,
        );
    }

    for text in ["111xxx", "111111xxx", "11x", "1111"] {
        let mask: PatternMask = text.parse()?;
        let c = hybrid::pattern_convexity(&mask)?;
        println!("{text:>10}: convexity {c}, predictable {}", hybrid::predictable_fraction(&c)?);
    }

    println!("peano 17 + 25 = {}", hybrid::peano_add(17, 25));
    Ok(())
}
