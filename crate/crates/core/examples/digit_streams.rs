//! Rational, mask-patterned and truncated digit streams.
//!
//! ```bash
//! cargo run --example digit_streams
//! ```

use hybridspace::streams::{DigitStream, PatternMask, Radix};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let seventh = DigitStream::rational(22, 7, Radix::Decimal)?;
    println!("22/7      {}", seventh.to_ascii(24, true)?);

    let half = DigitStream::rational(1, 2, Radix::Binary)?;
    println!("1/2 (b2)  {}", half.to_ascii(8, true)?);

    // Fixed cells repeat with the mask; free cells come from the seed.
    let mask: PatternMask = "111xxx".parse()?;
    for seed in [1, 2] {
        let s = DigitStream::patterned(mask.clone(), seed, Radix::Decimal)?;
        println!("111xxx/{seed}  {}", s.to_ascii(24, true)?);
    }

    let cut = DigitStream::truncated(DigitStream::rational(1, 3, Radix::Decimal)?, 5);
    println!("1/3 cut at 5: {} digits, {:?}", cut.len().unwrap(), cut.prefix(5)?);
    println!("reading past the end: {}", cut.digit_at(5).unwrap_err());
    Ok(())
}
