//! Lazily indexed digit sequences.
//!
//! Three kinds of stream are supported:
//!
//! * **rational** – the fractional expansion of `p/q`, produced by long
//!   division and therefore eventually periodic;
//! * **patterned** – a repeating [`PatternMask`] whose `Fixed` cells are
//!   forced and whose `Free` cells are filled from a seeded entropy source
//!   (a "pseudo-irrational" sequence such as `111xxx` repeating);
//! * **truncated** – any other stream cut off after a fixed number of digits
//!   (a "quasi-irrational" sequence). Reading past the cut is an error.
//!
//! Every stream is an immutable value. `digit_at` never mutates anything, so
//! streams can be shared freely between threads.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StreamError {
    #[error("invalid rational: denominator must be non-zero")]
    InvalidRational,
    #[error("invalid mask: {0}")]
    InvalidMask(String),
    #[error("index {index} is past the truncation length {length}")]
    TruncationExceeded { index: u64, length: u64 },
    #[error("unsupported radix {0} (expected 2 or 10)")]
    UnsupportedRadix(u32),
}

/// Digit radix. Only binary and decimal are supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Radix {
    Binary,
    Decimal,
}

impl Radix {
    pub fn value(self) -> u8 {
        match self {
            Radix::Binary => 2,
            Radix::Decimal => 10,
        }
    }
}

impl TryFrom<u32> for Radix {
    type Error = StreamError;

    fn try_from(value: u32) -> Result<Self, Self::Error> {
        match value {
            2 => Ok(Radix::Binary),
            10 => Ok(Radix::Decimal),
            other => Err(StreamError::UnsupportedRadix(other)),
        }
    }
}

impl fmt::Display for Radix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.value())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Cell {
    Fixed(u8),
    Free,
}

/// A non-empty repeating template of fixed digits and free slots.
///
/// ASCII syntax: `0`-`9` for fixed cells, `x` for free cells, e.g. `111xxx`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PatternMask {
    cells: Vec<Cell>,
}

impl PatternMask {
    pub fn new(cells: Vec<Cell>) -> Result<Self, StreamError> {
        if cells.is_empty() {
            return Err(StreamError::InvalidMask("mask must have at least one cell".into()));
        }
        if let Some(d) = cells.iter().find_map(|c| match c {
            Cell::Fixed(d) if *d > 9 => Some(*d),
            _ => None,
        }) {
            return Err(StreamError::InvalidMask(format!("fixed digit {d} is not a single digit")));
        }
        Ok(Self { cells })
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn period(&self) -> usize {
        self.cells.len()
    }

    pub fn free_count(&self) -> usize {
        self.cells.iter().filter(|c| matches!(c, Cell::Free)).count()
    }

    pub fn fixed_count(&self) -> usize {
        self.period() - self.free_count()
    }

    pub fn cell_at(&self, index: u64) -> Cell {
        self.cells[(index % self.cells.len() as u64) as usize]
    }

    fn check_radix(&self, radix: Radix) -> Result<(), StreamError> {
        for cell in &self.cells {
            if let Cell::Fixed(d) = cell {
                if *d >= radix.value() {
                    return Err(StreamError::InvalidMask(format!(
                        "fixed digit {d} is not valid in base {radix}"
                    )));
                }
            }
        }
        Ok(())
    }
}

impl FromStr for PatternMask {
    type Err = StreamError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let cells = s
            .chars()
            .map(|ch| match ch {
                'x' => Ok(Cell::Free),
                '0'..='9' => Ok(Cell::Fixed(ch as u8 - b'0')),
                other => Err(StreamError::InvalidMask(format!("unexpected character {other:?}"))),
            })
            .collect::<Result<Vec<_>, _>>()?;
        PatternMask::new(cells)
    }
}

impl fmt::Display for PatternMask {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cell in &self.cells {
            match cell {
                Cell::Fixed(d) => write!(f, "{d}")?,
                Cell::Free => f.write_str("x")?,
            }
        }
        Ok(())
    }
}

/// Source of digits for the free cells of a patterned stream.
///
/// Implementations must be pure: the same `(index, radix)` always yields the
/// same digit, and the digit must be below the radix.
pub trait Entropy: fmt::Debug + Send + Sync {
    fn digit(&self, index: u64, radix: Radix) -> u8;
}

/// Stateless seeded entropy: each digit is a SplitMix64 hash of
/// `(seed, index)`, so no generator state is ever shared or advanced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SeededEntropy {
    seed: u64,
}

impl SeededEntropy {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

impl Entropy for SeededEntropy {
    fn digit(&self, index: u64, radix: Radix) -> u8 {
        let h = splitmix64(self.seed ^ splitmix64(index));
        // Widening multiply maps the hash onto [0, radix) without modulo bias
        // beyond 2^-60.
        ((h as u128 * radix.value() as u128) >> 64) as u8
    }
}

#[derive(Debug, Clone)]
pub enum StreamKind {
    Rational { numerator: i64, denominator: u64 },
    Patterned { mask: PatternMask, entropy: Arc<dyn Entropy> },
    Truncated { source: Box<DigitStream>, length: u64 },
}

/// A position-indexed digit sequence in a fixed radix.
///
/// Only the fractional digits are streamed. Callers carry the sign and the
/// integer part; a rational stream of `-7/3` yields the digits of `1/3`.
#[derive(Debug, Clone)]
pub struct DigitStream {
    kind: StreamKind,
    radix: Radix,
}

impl DigitStream {
    /// Fractional digits of `numerator / denominator` by long division.
    pub fn rational(numerator: i64, denominator: u64, radix: Radix) -> Result<Self, StreamError> {
        if denominator == 0 {
            return Err(StreamError::InvalidRational);
        }
        Ok(Self { kind: StreamKind::Rational { numerator, denominator }, radix })
    }

    /// Mask-driven stream with free cells drawn from [`SeededEntropy`].
    pub fn patterned(mask: PatternMask, seed: u64, radix: Radix) -> Result<Self, StreamError> {
        Self::patterned_with(mask, Arc::new(SeededEntropy::new(seed)), radix)
    }

    /// Mask-driven stream with an injected entropy source.
    pub fn patterned_with(
        mask: PatternMask,
        entropy: Arc<dyn Entropy>,
        radix: Radix,
    ) -> Result<Self, StreamError> {
        mask.check_radix(radix)?;
        Ok(Self { kind: StreamKind::Patterned { mask, entropy }, radix })
    }

    /// Cut `source` off after `length` digits.
    pub fn truncated(source: DigitStream, length: u64) -> Self {
        let radix = source.radix;
        Self { kind: StreamKind::Truncated { source: Box::new(source), length }, radix }
    }

    /// A finite literal digit string, e.g. the first few digits of pi.
    ///
    /// Represented as a fully fixed mask truncated to its own period.
    pub fn literal(digits: &[u8], radix: Radix) -> Result<Self, StreamError> {
        if digits.is_empty() {
            let zero = DigitStream::rational(0, 1, radix)?;
            return Ok(DigitStream::truncated(zero, 0));
        }
        let mask = PatternMask::new(digits.iter().map(|&d| Cell::Fixed(d)).collect())?;
        let source = DigitStream::patterned(mask, 0, radix)?;
        Ok(DigitStream::truncated(source, digits.len() as u64))
    }

    pub fn kind(&self) -> &StreamKind {
        &self.kind
    }

    pub fn radix(&self) -> Radix {
        self.radix
    }

    /// Number of available digits, `None` for unbounded streams.
    pub fn len(&self) -> Option<u64> {
        match &self.kind {
            StreamKind::Truncated { source, length } => Some(match source.len() {
                Some(inner) => inner.min(*length),
                None => *length,
            }),
            _ => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == Some(0)
    }

    pub fn digit_at(&self, index: u64) -> Result<u8, StreamError> {
        match &self.kind {
            StreamKind::Rational { numerator, denominator } => {
                Ok(rational_digit(numerator.unsigned_abs(), *denominator, self.radix, index))
            }
            StreamKind::Patterned { mask, entropy } => Ok(match mask.cell_at(index) {
                Cell::Fixed(d) => d,
                Cell::Free => entropy.digit(index, self.radix),
            }),
            StreamKind::Truncated { source, length } => {
                if index >= *length {
                    return Err(StreamError::TruncationExceeded { index, length: *length });
                }
                source.digit_at(index)
            }
        }
    }

    pub fn prefix(&self, n: u64) -> Result<Vec<u8>, StreamError> {
        (0..n).map(|k| self.digit_at(k)).collect()
    }

    /// Iterate digits from position 0, stopping at the truncation point.
    pub fn digits(&self) -> Digits<'_> {
        Digits { stream: self, next: 0 }
    }

    /// ASCII rendering of the first `n` digits, optionally with a `0.` prefix.
    pub fn to_ascii(&self, n: u64, leading_zero: bool) -> Result<String, StreamError> {
        let mut out = String::with_capacity(n as usize + 2);
        if leading_zero {
            out.push_str("0.");
        }
        for d in self.prefix(n)? {
            out.push(char::from(b'0' + d));
        }
        Ok(out)
    }
}

pub struct Digits<'a> {
    stream: &'a DigitStream,
    next: u64,
}

impl Iterator for Digits<'_> {
    type Item = u8;

    fn next(&mut self) -> Option<u8> {
        let d = self.stream.digit_at(self.next).ok()?;
        self.next += 1;
        Some(d)
    }
}

/// Digit `index` of the fractional part of `numerator / denominator`.
///
/// The remainder before digit k is `numerator * radix^k mod denominator`, so
/// any position is reachable in O(log k) without walking the expansion.
fn rational_digit(numerator: u64, denominator: u64, radix: Radix, index: u64) -> u8 {
    let q = denominator as u128;
    let b = radix.value() as u128;
    let r = (numerator as u128 % q) * pow_mod(b, index, q) % q;
    ((r * b) / q) as u8
}

fn pow_mod(mut base: u128, mut exp: u64, modulus: u128) -> u128 {
    let mut acc = 1 % modulus;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(s: &str) -> PatternMask {
        s.parse().unwrap()
    }

    #[test]
    fn one_third_repeats() {
        let s = DigitStream::rational(1, 3, Radix::Decimal).unwrap();
        assert_eq!(s.prefix(6).unwrap(), vec![3; 6]);
        assert_eq!(s.digit_at(5).unwrap(), 3);
    }

    #[test]
    fn one_half_binary() {
        let s = DigitStream::rational(1, 2, Radix::Binary).unwrap();
        assert_eq!(s.prefix(3).unwrap(), vec![1, 0, 0]);
    }

    #[test]
    fn twenty_two_sevenths() {
        let s = DigitStream::rational(22, 7, Radix::Decimal).unwrap();
        assert_eq!(s.prefix(12).unwrap(), vec![1, 4, 2, 8, 5, 7, 1, 4, 2, 8, 5, 7]);
    }

    #[test]
    fn negative_numerator_streams_magnitude() {
        let s = DigitStream::rational(-7, 3, Radix::Decimal).unwrap();
        assert_eq!(s.prefix(3).unwrap(), vec![3, 3, 3]);
    }

    #[test]
    fn zero_denominator_rejected() {
        assert_eq!(
            DigitStream::rational(1, 0, Radix::Decimal).unwrap_err(),
            StreamError::InvalidRational
        );
    }

    #[test]
    fn huge_denominator_does_not_overflow() {
        let s = DigitStream::rational(1, u64::MAX, Radix::Decimal).unwrap();
        // 1 / (2^64 - 1) = 5.42...e-20
        assert_eq!(s.prefix(20).unwrap()[19], 5);
        assert!(s.prefix(19).unwrap().iter().all(|&d| d == 0));
    }

    #[test]
    fn mask_parse_and_display() {
        let m = mask("111xxx");
        assert_eq!(m.period(), 6);
        assert_eq!(m.free_count(), 3);
        assert_eq!(m.to_string(), "111xxx");
        assert!("".parse::<PatternMask>().is_err());
        assert!("11y".parse::<PatternMask>().is_err());
    }

    #[test]
    fn mask_fixed_cells_forced() {
        let s = DigitStream::patterned(mask("111xxx"), 99, Radix::Decimal).unwrap();
        for k in 0..600u64 {
            if k % 6 < 3 {
                assert_eq!(s.digit_at(k).unwrap(), 1);
            }
        }
        assert_eq!(s.prefix(3).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn fully_fixed_mask_is_periodic() {
        let s = DigitStream::patterned(mask("10"), 12345, Radix::Binary).unwrap();
        assert_eq!(s.prefix(6).unwrap(), vec![1, 0, 1, 0, 1, 0]);
    }

    #[test]
    fn fixed_digit_must_fit_radix() {
        let err = DigitStream::patterned(mask("12x"), 0, Radix::Binary).unwrap_err();
        assert!(matches!(err, StreamError::InvalidMask(_)));
    }

    #[test]
    fn free_cells_respect_radix() {
        let bin = DigitStream::patterned(mask("x"), 3, Radix::Binary).unwrap();
        assert!(bin.digits().take(1000).all(|d| d < 2));
        let dec = DigitStream::patterned(mask("x"), 3, Radix::Decimal).unwrap();
        let seen: std::collections::BTreeSet<u8> = dec.digits().take(1000).collect();
        assert_eq!(seen.len(), 10);
    }

    #[test]
    fn truncation_boundary() {
        let s = DigitStream::truncated(DigitStream::rational(1, 3, Radix::Decimal).unwrap(), 4);
        assert_eq!(s.digit_at(3).unwrap(), 3);
        assert_eq!(
            s.digit_at(4).unwrap_err(),
            StreamError::TruncationExceeded { index: 4, length: 4 }
        );
        assert!(s.prefix(5).is_err());
        assert_eq!(s.digits().count(), 4);
        assert_eq!(s.len(), Some(4));
    }

    #[test]
    fn literal_stream() {
        let pi = DigitStream::literal(&[1, 4, 1, 5, 9], Radix::Decimal).unwrap();
        assert_eq!(pi.to_ascii(5, true).unwrap(), "0.14159");
        assert!(pi.digit_at(5).is_err());
        assert!(DigitStream::literal(&[], Radix::Binary).unwrap().is_empty());
    }

    #[test]
    fn custom_entropy_is_used() {
        #[derive(Debug)]
        struct Sevens;
        impl Entropy for Sevens {
            fn digit(&self, _: u64, _: Radix) -> u8 {
                7
            }
        }
        let s = DigitStream::patterned_with(mask("1x"), Arc::new(Sevens), Radix::Decimal).unwrap();
        assert_eq!(s.to_ascii(4, false).unwrap(), "1717");
    }
}
