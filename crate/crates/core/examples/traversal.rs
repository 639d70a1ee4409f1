//! Walking consecutive intervals that all cover the same actual distance.

use hybridspace::hybrid::{self, parse_rational, Convexity};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x1 = parse_rational("6")?;
    let convexities: Vec<Convexity> = ["2", "3", "inf", "5/4"].iter().map(|s| s.parse()).collect::<Result<_, _>>()?;
    let t = hybrid::traversal_sum(&x1, &convexities)?;

    for (c, x) in convexities.iter().zip(&t.lengths) {
        println!("C = {c:>4}  x = {x}");
    }
    println!("x2 + ... + xn = {}", t.bracket_sum);
    println!("x1 + ... + xn = {}", t.total_virtual_all);
    println!("{}", serde_json::to_string_pretty(&t)?);
    Ok(())
}
