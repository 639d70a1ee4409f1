//! Hybrid-space arithmetic over ordered pairs of discrete endpoints.
//!
//! Two pairs `(i, j)` and `(k, l)` with `j <= k` describe adjacent
//! determinate segments separated by an indeterminate gap `k - j`.
//!
//! * virtual distance: `l - i`
//! * actual distance: `(j - i) + (l - k)`
//! * convexity: `(l - i) / (k - j)`, or [`Convexity::Infinite`] when `k == j`
//!
//! and `actual = virtual * (1 - 1/convexity)` holds exactly. All arithmetic
//! is exact big-rational arithmetic.

use std::fmt;
use std::str::FromStr;

use num::{BigInt, BigRational, One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::streams::PatternMask;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HybridError {
    #[error("pairs are overlapping or out of order: ({0}, {1}) then ({2}, {3})")]
    NonAdjacentPairs(i64, i64, i64, i64),
    #[error("ordered pair needs i < j, got ({0}, {1})")]
    EmptyPair(i64, i64),
    #[error("convexity must be infinite or a rational greater than 1, got {0}")]
    InvalidConvexity(String),
    #[error("mask {0} has no fixed cells, so its convexity would be 1")]
    FullyIndeterminate(String),
    #[error("distance must be non-negative, got {0}")]
    NegativeDistance(String),
    #[error("traversal needs at least one interval")]
    EmptyTraversal,
    #[error("interval needs lower < upper, got [{0}, {1}]")]
    EmptyInterval(String, String),
    #[error("assignment for element {0} does not follow the previous assignment")]
    UnorderedAssignment(u64),
    #[error("cannot parse rational {0:?}")]
    ParseRational(String),
}

/// A determinate segment `(i, j)` with `i < j`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct OrderedPair {
    i: i64,
    j: i64,
}

impl OrderedPair {
    pub fn new(i: i64, j: i64) -> Result<Self, HybridError> {
        if i < j {
            Ok(Self { i, j })
        } else {
            Err(HybridError::EmptyPair(i, j))
        }
    }

    pub fn lower(&self) -> i64 {
        self.i
    }

    pub fn upper(&self) -> i64 {
        self.j
    }

    pub fn extent(&self) -> i128 {
        self.j as i128 - self.i as i128
    }
}

/// Convexity of a hybrid interval: a rational strictly above 1, or infinite
/// for a perfectly determinate mapping.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Convexity {
    Finite(BigRational),
    Infinite,
}

impl Convexity {
    pub fn finite(value: BigRational) -> Result<Self, HybridError> {
        let c = Convexity::Finite(value);
        c.validate()?;
        Ok(c)
    }

    pub fn from_integer(value: i64) -> Result<Self, HybridError> {
        Self::finite(BigRational::from_integer(value.into()))
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, Convexity::Infinite)
    }

    pub fn validate(&self) -> Result<(), HybridError> {
        match self {
            Convexity::Infinite => Ok(()),
            Convexity::Finite(c) if *c > BigRational::one() => Ok(()),
            Convexity::Finite(c) => Err(HybridError::InvalidConvexity(c.to_string())),
        }
    }

    /// `1 - 1/c`, which is 1 for infinite convexity.
    fn determinate_share(&self) -> Result<BigRational, HybridError> {
        self.validate()?;
        Ok(match self {
            Convexity::Infinite => BigRational::one(),
            Convexity::Finite(c) => BigRational::one() - c.recip(),
        })
    }
}

impl fmt::Display for Convexity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Convexity::Finite(c) => write!(f, "{c}"),
            Convexity::Infinite => f.write_str("inf"),
        }
    }
}

impl FromStr for Convexity {
    type Err = HybridError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.trim() {
            "inf" | "infinite" | "∞" => Ok(Convexity::Infinite),
            other => Convexity::finite(parse_rational(other)?),
        }
    }
}

impl Serialize for Convexity {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Convexity {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Parse `p/q` or a bare integer `p` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational, HybridError> {
    let err = || HybridError::ParseRational(s.to_string());
    let (num, den) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s.trim(), "1"),
    };
    let num: BigInt = num.parse().map_err(|_| err())?;
    let den: BigInt = den.parse().map_err(|_| err())?;
    if den.is_zero() {
        return Err(err());
    }
    Ok(BigRational::new(num, den))
}

/// Serde adapter writing rationals as `p/q` strings.
pub mod rational_str {
    use super::*;

    pub fn serialize<S: Serializer>(value: &BigRational, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(value)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(deserializer: D) -> Result<BigRational, D::Error> {
        let s = String::deserialize(deserializer)?;
        parse_rational(&s).map_err(serde::de::Error::custom)
    }
}

/// `x ↦ [lower, upper, convexity]`: a region together with how much of it is
/// determinate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawInterval")]
pub struct HybridInterval {
    #[serde(with = "rational_str")]
    lower: BigRational,
    #[serde(with = "rational_str")]
    upper: BigRational,
    convexity: Convexity,
}

#[derive(Deserialize)]
struct RawInterval {
    #[serde(with = "rational_str")]
    lower: BigRational,
    #[serde(with = "rational_str")]
    upper: BigRational,
    convexity: Convexity,
}

impl TryFrom<RawInterval> for HybridInterval {
    type Error = HybridError;

    fn try_from(raw: RawInterval) -> Result<Self, Self::Error> {
        HybridInterval::new(raw.lower, raw.upper, raw.convexity)
    }
}

impl HybridInterval {
    pub fn new(
        lower: BigRational,
        upper: BigRational,
        convexity: Convexity,
    ) -> Result<Self, HybridError> {
        if lower >= upper {
            return Err(HybridError::EmptyInterval(lower.to_string(), upper.to_string()));
        }
        convexity.validate()?;
        Ok(Self { lower, upper, convexity })
    }

    pub fn lower(&self) -> &BigRational {
        &self.lower
    }

    pub fn upper(&self) -> &BigRational {
        &self.upper
    }

    pub fn convexity(&self) -> &Convexity {
        &self.convexity
    }

    pub fn width(&self) -> BigRational {
        &self.upper - &self.lower
    }

    /// Share of the interval that is determinate, `width * (1 - 1/c)`.
    pub fn determinate_width(&self) -> BigRational {
        actual_from_virtual_rational(&self.width(), &self.convexity)
            .expect("interval invariants hold")
    }
}

/// A mapping from discrete elements `u` to ordered, disjoint continuous
/// intervals `[v_j, v_k]`.
///
/// The increment operator `++` moves an element to the next assigned
/// element and its interval to the next interval.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HybridMapping {
    domain_label: String,
    codomain_label: String,
    assignments: Vec<(u64, BigRational, BigRational)>,
}

impl HybridMapping {
    pub fn new(domain_label: impl Into<String>, codomain_label: impl Into<String>) -> Self {
        Self {
            domain_label: domain_label.into(),
            codomain_label: codomain_label.into(),
            assignments: Vec::new(),
        }
    }

    pub fn domain_label(&self) -> &str {
        &self.domain_label
    }

    pub fn codomain_label(&self) -> &str {
        &self.codomain_label
    }

    /// Append `element -> [lower, upper]`. Elements and intervals must both
    /// be strictly increasing.
    pub fn assign(
        &mut self,
        element: u64,
        lower: BigRational,
        upper: BigRational,
    ) -> Result<&mut Self, HybridError> {
        if lower >= upper {
            return Err(HybridError::EmptyInterval(lower.to_string(), upper.to_string()));
        }
        if let Some((prev, _, prev_upper)) = self.assignments.last() {
            if element <= *prev || lower <= *prev_upper {
                return Err(HybridError::UnorderedAssignment(element));
            }
        }
        self.assignments.push((element, lower, upper));
        Ok(self)
    }

    pub fn assignments(&self) -> &[(u64, BigRational, BigRational)] {
        &self.assignments
    }

    pub fn image(&self, element: u64) -> Option<(&BigRational, &BigRational)> {
        self.position(element).map(|p| {
            let (_, lo, hi) = &self.assignments[p];
            (lo, hi)
        })
    }

    /// The `++` operator: the next element after `element`.
    pub fn increment(&self, element: u64) -> Option<u64> {
        let p = self.position(element)?;
        self.assignments.get(p + 1).map(|(u, _, _)| *u)
    }

    /// `u_t - u_i`
    pub fn virtual_distance(&self, from: u64, to: u64) -> Option<i128> {
        self.position(from)?;
        self.position(to)?;
        Some(to as i128 - from as i128)
    }

    /// `v_m - v_k` where `f(from) = [v_j, v_k]` and `f(to) = [v_l, v_m]`.
    pub fn actual_distance(&self, from: u64, to: u64) -> Option<BigRational> {
        let (_, from_upper) = self.image(from)?;
        let (_, to_upper) = self.image(to)?;
        Some(to_upper - from_upper)
    }

    fn position(&self, element: u64) -> Option<usize> {
        self.assignments.binary_search_by_key(&element, |(u, _, _)| *u).ok()
    }
}

fn check_adjacent(a: &OrderedPair, b: &OrderedPair) -> Result<(), HybridError> {
    if b.i < a.j {
        Err(HybridError::NonAdjacentPairs(a.i, a.j, b.i, b.j))
    } else {
        Ok(())
    }
}

/// `l - i`
pub fn virtual_distance(a: &OrderedPair, b: &OrderedPair) -> Result<i128, HybridError> {
    check_adjacent(a, b)?;
    Ok(b.j as i128 - a.i as i128)
}

/// `(j - i) + (l - k)`
pub fn actual_distance(a: &OrderedPair, b: &OrderedPair) -> Result<i128, HybridError> {
    check_adjacent(a, b)?;
    Ok(a.extent() + b.extent())
}

/// `x_ij + x_kl`: `l - i` for contiguous pairs, the actual distance otherwise.
pub fn add_intervals(a: &OrderedPair, b: &OrderedPair) -> Result<i128, HybridError> {
    check_adjacent(a, b)?;
    if b.i == a.j {
        Ok(b.j as i128 - a.i as i128)
    } else {
        actual_distance(a, b)
    }
}

/// `(l - i) / (k - j)`, infinite when `k == j`.
pub fn convexity(a: &OrderedPair, b: &OrderedPair) -> Result<Convexity, HybridError> {
    check_adjacent(a, b)?;
    if b.i == a.j {
        return Ok(Convexity::Infinite);
    }
    let span = BigInt::from(b.j as i128 - a.i as i128);
    let gap = BigInt::from(b.i as i128 - a.j as i128);
    Ok(Convexity::Finite(BigRational::new(span, gap)))
}

/// `virtual * (1 - 1/c)`, or `virtual` itself when `c` is infinite.
pub fn actual_from_virtual(virtual_distance: i128, c: &Convexity) -> Result<BigRational, HybridError> {
    actual_from_virtual_rational(&BigRational::from_integer(virtual_distance.into()), c)
}

pub fn actual_from_virtual_rational(
    virtual_distance: &BigRational,
    c: &Convexity,
) -> Result<BigRational, HybridError> {
    if virtual_distance.is_negative() {
        return Err(HybridError::NegativeDistance(virtual_distance.to_string()));
    }
    Ok(virtual_distance * c.determinate_share()?)
}

/// `period / free_count` of a mask, infinite when nothing is free.
///
/// A mask made only of free cells has no determinate part; its ratio would
/// be exactly 1, which is not a valid convexity.
pub fn pattern_convexity(mask: &PatternMask) -> Result<Convexity, HybridError> {
    let free = mask.free_count();
    if free == 0 {
        return Ok(Convexity::Infinite);
    }
    if free == mask.period() {
        return Err(HybridError::FullyIndeterminate(mask.to_string()));
    }
    Ok(Convexity::Finite(BigRational::new(
        BigInt::from(mask.period()),
        BigInt::from(free),
    )))
}

/// Fraction of a space that can be predicted exactly: `1 - 1/c`.
pub fn predictable_fraction(c: &Convexity) -> Result<BigRational, HybridError> {
    c.determinate_share()
}

/// Result of walking consecutive intervals that each cover the same actual
/// distance.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Traversal {
    /// `x1 * (C1 - 1)/C1 * sum_{i=2..n} C_i/(C_i - 1)`, which equals
    /// `x2 + ... + xn`.
    #[serde(with = "rational_str")]
    pub bracket_sum: BigRational,
    /// `x1 + x2 + ... + xn`.
    #[serde(with = "rational_str")]
    pub total_virtual_all: BigRational,
    /// Virtual interval lengths `x1, ..., xn` satisfying
    /// `x_i (1 - 1/C_i) = x1 (1 - 1/C1)`.
    #[serde(serialize_with = "serialize_rationals")]
    pub lengths: Vec<BigRational>,
}

fn serialize_rationals<S: Serializer>(values: &[BigRational], serializer: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = serializer.serialize_seq(Some(values.len()))?;
    for v in values {
        seq.serialize_element(&v.to_string())?;
    }
    seq.end()
}

/// Ratio `C/(C - 1)`, with infinite convexity contributing 1.
fn inverse_share(c: &Convexity) -> Result<BigRational, HybridError> {
    c.validate()?;
    Ok(match c {
        Convexity::Infinite => BigRational::one(),
        Convexity::Finite(c) => c / (c - BigRational::one()),
    })
}

pub fn traversal_sum(first: &BigRational, convexities: &[Convexity]) -> Result<Traversal, HybridError> {
    let (head, tail) = convexities.split_first().ok_or(HybridError::EmptyTraversal)?;
    for c in convexities {
        c.validate()?;
    }
    let head_share = head.determinate_share()?;
    let mut sum = BigRational::zero();
    for c in tail {
        sum += inverse_share(c)?;
    }
    let bracket_sum = first * &head_share * sum;
    let total_virtual_all = &bracket_sum + first;

    let actual = first * &head_share;
    let mut lengths = Vec::with_capacity(convexities.len());
    lengths.push(first.clone());
    for c in tail {
        lengths.push(&actual * inverse_share(c)?);
    }
    Ok(Traversal { bracket_sum, total_virtual_all, lengths })
}

fn succ(n: u64) -> u64 {
    n.checked_add(1).expect("natural number overflow")
}

fn pred(n: u64) -> Option<u64> {
    n.checked_sub(1)
}

/// Addition by the recursion `a + 0 = a`, `a + S(b) = S(a + b)`.
///
/// The recursion is unrolled: `b` is peeled down to zero, the base rule
/// yields `a`, then one successor is applied per peeled step.
pub fn peano_add(a: u64, b: u64) -> u64 {
    let mut pending = 0u64;
    let mut rest = b;
    while let Some(p) = pred(rest) {
        rest = p;
        pending += 1;
    }
    let mut acc = a;
    for _ in 0..pending {
        acc = succ(acc);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pair(i: i64, j: i64) -> OrderedPair {
        OrderedPair::new(i, j).unwrap()
    }

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn finite(n: i64, d: i64) -> Convexity {
        Convexity::finite(q(n, d)).unwrap()
    }

    #[test]
    fn distances_for_figure_marks() {
        let (a, b) = (pair(0, 3), pair(9, 12));
        assert_eq!(virtual_distance(&a, &b).unwrap(), 12);
        assert_eq!(actual_distance(&a, &b).unwrap(), 6);
        assert_eq!(add_intervals(&a, &b).unwrap(), 6);
        assert_eq!(convexity(&a, &b).unwrap(), finite(2, 1));
    }

    #[test]
    fn unit_segments() {
        let (a, b) = (pair(0, 1), pair(1, 2));
        assert_eq!(virtual_distance(&a, &b).unwrap(), 2);
        assert_eq!(actual_distance(&a, &b).unwrap(), 2);
        assert_eq!(convexity(&a, &b).unwrap(), Convexity::Infinite);
    }

    #[test]
    fn plain_arithmetic() {
        let (a, b) = (pair(2, 5), pair(7, 11));
        assert_eq!(virtual_distance(&a, &b).unwrap(), 9);
        assert_eq!(actual_distance(&a, &b).unwrap(), 7);
        assert_eq!(convexity(&pair(0, 2), &pair(4, 6)).unwrap(), finite(3, 1));
    }

    #[test]
    fn contiguous_addition() {
        assert_eq!(add_intervals(&pair(0, 3), &pair(3, 7)).unwrap(), 7);
        assert_eq!(add_intervals(&pair(0, 5), &pair(5, 10)).unwrap(), 10);
        assert_eq!(convexity(&pair(0, 3), &pair(3, 7)).unwrap(), Convexity::Infinite);
    }

    #[test]
    fn overlapping_pairs_rejected() {
        let err = virtual_distance(&pair(0, 5), &pair(3, 8)).unwrap_err();
        assert!(matches!(err, HybridError::NonAdjacentPairs(..)));
        assert!(convexity(&pair(4, 6), &pair(0, 2)).is_err());
        assert!(OrderedPair::new(3, 3).is_err());
    }

    #[test]
    fn actual_from_virtual_examples() {
        assert_eq!(actual_from_virtual(12, &finite(2, 1)).unwrap(), q(6, 1));
        assert_eq!(actual_from_virtual(9, &Convexity::Infinite).unwrap(), q(9, 1));
        assert_eq!(actual_from_virtual(9, &finite(3, 1)).unwrap(), q(6, 1));
        assert!(matches!(
            actual_from_virtual(9, &Convexity::Finite(q(1, 1))),
            Err(HybridError::InvalidConvexity(_))
        ));
        assert!(actual_from_virtual(-1, &Convexity::Infinite).is_err());
    }

    #[test]
    fn convexity_constructor_rejects_small_values() {
        assert!(Convexity::finite(q(1, 1)).is_err());
        assert!(Convexity::finite(q(1, 2)).is_err());
        assert!(Convexity::finite(q(101, 100)).is_ok());
    }

    #[test]
    fn mask_convexities() {
        let c = |s: &str| pattern_convexity(&s.parse().unwrap()).unwrap();
        assert_eq!(c("111xxx"), finite(2, 1));
        assert_eq!(c("111111xxx"), finite(3, 1));
        assert_eq!(c("11x"), finite(3, 1));
        assert_eq!(c("1111"), Convexity::Infinite);
        assert!(pattern_convexity(&"xx".parse().unwrap()).is_err());
    }

    #[test]
    fn predictable_fractions() {
        assert_eq!(predictable_fraction(&finite(2, 1)).unwrap(), q(1, 2));
        assert_eq!(predictable_fraction(&Convexity::Infinite).unwrap(), q(1, 1));
        assert_eq!(predictable_fraction(&finite(3, 1)).unwrap(), q(2, 3));
    }

    #[test]
    fn traversal_examples() {
        let t = traversal_sum(&q(6, 1), &[finite(2, 1), finite(3, 1)]).unwrap();
        assert_eq!(t.bracket_sum, q(9, 2));
        assert_eq!(t.lengths, vec![q(6, 1), q(9, 2)]);
        assert_eq!(t.total_virtual_all, q(21, 2));

        let single = traversal_sum(&q(17, 3), &[finite(5, 1)]).unwrap();
        assert_eq!(single.bracket_sum, q(0, 1));

        let t = traversal_sum(&q(10, 1), &[finite(4, 1), finite(4, 1), finite(4, 1)]).unwrap();
        assert_eq!(t.bracket_sum, q(20, 1));
        assert_eq!(t.lengths[1..], [q(10, 1), q(10, 1)]);
    }

    #[test]
    fn traversal_with_infinite_entries() {
        let t = traversal_sum(&q(6, 1), &[Convexity::Infinite, finite(2, 1)]).unwrap();
        // actual distance per interval is 6, so x2 = 6 / (1/2) = 12
        assert_eq!(t.lengths, vec![q(6, 1), q(12, 1)]);
        assert_eq!(t.bracket_sum, q(12, 1));
    }

    #[test]
    fn traversal_errors() {
        assert_eq!(traversal_sum(&q(1, 1), &[]).unwrap_err(), HybridError::EmptyTraversal);
        let bad = Convexity::Finite(q(1, 2));
        assert!(matches!(
            traversal_sum(&q(1, 1), &[finite(2, 1), bad]),
            Err(HybridError::InvalidConvexity(_))
        ));
    }

    #[test]
    fn peano() {
        assert_eq!(peano_add(7, 0), 7);
        assert_eq!(peano_add(2, 3), 5);
        assert_eq!(peano_add(0, 0), 0);
    }

    #[test]
    fn interval_json_shape() {
        let iv = HybridInterval::new(q(11, 100), q(12, 100), finite(2, 1)).unwrap();
        let json = serde_json::to_string(&iv).unwrap();
        assert_eq!(json, r#"{"lower":"11/100","upper":"3/25","convexity":"2"}"#);
        let back: HybridInterval = serde_json::from_str(&json).unwrap();
        assert_eq!(back, iv);
        assert_eq!(iv.determinate_width(), q(1, 200));

        let inf: HybridInterval =
            serde_json::from_str(r#"{"lower":"0","upper":"1","convexity":"inf"}"#).unwrap();
        assert!(inf.convexity().is_infinite());
        assert!(serde_json::from_str::<HybridInterval>(
            r#"{"lower":"1","upper":"0","convexity":"inf"}"#
        )
        .is_err());
        assert!(serde_json::from_str::<HybridInterval>(
            r#"{"lower":"0","upper":"1","convexity":"1/2"}"#
        )
        .is_err());
    }

    #[test]
    fn mapping_increment_and_distances() {
        let mut f = HybridMapping::new("U", "V");
        f.assign(0, q(0, 1), q(1, 1)).unwrap();
        f.assign(1, q(2, 1), q(3, 1)).unwrap();
        f.assign(2, q(4, 1), q(9, 2)).unwrap();
        assert_eq!(f.increment(0), Some(1));
        assert_eq!(f.increment(2), None);
        assert_eq!(f.virtual_distance(0, 2), Some(2));
        assert_eq!(f.actual_distance(0, 1), Some(q(2, 1)));
        assert_eq!(f.actual_distance(0, 2), Some(q(7, 2)));
        assert!(f.clone().assign(3, q(4, 1), q(5, 1)).is_err());
        assert!(f.clone().assign(2, q(5, 1), q(6, 1)).is_err());
    }
}
