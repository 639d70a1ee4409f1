//! The point locator: repeated rational refinement toward a target that is
//! known only through a three-way comparison oracle.
//!
//! A run has two phases. The *seed* phase probes integers (0, then
//! galloping outward, then halving) until it either hits the target or pins
//! it between consecutive integers `m < x < m + 1`. The *refine* phase then
//! picks a rational strictly inside the current bracket each round, either
//! the Stern–Brocot mediant or the midpoint, and keeps the half that still
//! contains the target. Every iterate lies strictly inside the bracket, so
//! iterates below the target increase and iterates above it decrease.
//!
//! Rational targets are hit exactly. Irrational targets never are: the run
//! ends with the budget exhausted and an exact rational bracket.

use std::fmt;
use std::sync::Arc;

use num::integer::Roots;
use num::{BigInt, BigRational, One, Signed, Zero};
use serde::Serialize;
use thiserror::Error;

use crate::streams::{DigitStream, StreamError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LocatorError {
    #[error("{0} is a perfect square, its root is rational")]
    NotIrrational(u64),
    #[error("cut gave contradictory answers: {0}")]
    InconsistentCut(String),
    #[error("budget must be at least 1")]
    ZeroBudget,
    #[error("denominator must be non-zero")]
    ZeroDenominator,
    #[error("no integer bracket found; the cut does not describe a finite number")]
    Unbounded,
    #[error(transparent)]
    Stream(#[from] StreamError),
}

/// Where the target lies relative to a probe `q`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparison {
    /// target > q
    #[serde(rename = "greater")]
    TargetGreater,
    /// target == q
    #[serde(rename = "equal")]
    TargetEqual,
    /// target < q
    #[serde(rename = "less")]
    TargetLess,
}

impl Comparison {
    pub fn as_str(self) -> &'static str {
        match self {
            Comparison::TargetGreater => "greater",
            Comparison::TargetEqual => "equal",
            Comparison::TargetLess => "less",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exactness {
    RationalTarget,
    IrrationalTarget,
}

type Oracle = dyn Fn(&BigRational) -> Comparison + Send + Sync;

/// A comparison oracle for some real target, with its declared kind.
///
/// The oracle must be pure and monotone: once the target is below `q` it is
/// below every larger rational too.
#[derive(Clone)]
pub struct CutPredicate {
    description: String,
    exactness: Exactness,
    oracle: Arc<Oracle>,
}

impl fmt::Debug for CutPredicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CutPredicate")
            .field("description", &self.description)
            .field("exactness", &self.exactness)
            .finish_non_exhaustive()
    }
}

impl CutPredicate {
    pub fn new<F>(description: impl Into<String>, exactness: Exactness, oracle: F) -> Self
    where
        F: Fn(&BigRational) -> Comparison + Send + Sync + 'static,
    {
        Self { description: description.into(), exactness, oracle: Arc::new(oracle) }
    }

    pub fn compare(&self, q: &BigRational) -> Comparison {
        (self.oracle)(q)
    }

    pub fn exactness(&self) -> Exactness {
        self.exactness
    }

    pub fn description(&self) -> &str {
        &self.description
    }
}

/// Cut for `sqrt(n)`: the lower set is `{q : q < 0 or q^2 < n}`.
pub fn dedekind_cut_sqrt(n: u64) -> Result<CutPredicate, LocatorError> {
    let root = n.sqrt();
    if root * root == n {
        return Err(LocatorError::NotIrrational(n));
    }
    let target = BigInt::from(n);
    Ok(CutPredicate::new(format!("sqrt({n})"), Exactness::IrrationalTarget, move |q| {
        if q.is_negative() {
            return Comparison::TargetGreater;
        }
        // q = p/d, compare p^2 with n d^2
        let lhs = q.numer() * q.numer();
        let rhs = &target * q.denom() * q.denom();
        match lhs.cmp(&rhs) {
            std::cmp::Ordering::Less => Comparison::TargetGreater,
            std::cmp::Ordering::Greater => Comparison::TargetLess,
            std::cmp::Ordering::Equal => Comparison::TargetEqual,
        }
    }))
}

/// Exact three-way comparison against `p/q`.
pub fn rational_cut(p: impl Into<BigInt>, q: impl Into<BigInt>) -> Result<CutPredicate, LocatorError> {
    let q = q.into();
    if q.is_zero() {
        return Err(LocatorError::ZeroDenominator);
    }
    let target = BigRational::new(p.into(), q);
    Ok(CutPredicate::new(target.to_string(), Exactness::RationalTarget, move |probe| {
        match target.cmp(probe) {
            std::cmp::Ordering::Greater => Comparison::TargetGreater,
            std::cmp::Ordering::Equal => Comparison::TargetEqual,
            std::cmp::Ordering::Less => Comparison::TargetLess,
        }
    }))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    SternBrocot,
    Bisection,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Phase {
    Seed,
    Refine,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub alpha: BigRational,
    pub cmp: Comparison,
    pub phase: Phase,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Outcome {
    Exact(BigRational),
    /// Stopped because the bracket reached the requested width.
    Bracket(BigRational, BigRational),
    BudgetExhausted(BigRational, BigRational),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocatorTrace {
    steps: Vec<Step>,
    bracket: Option<(BigRational, BigRational)>,
    outcome: Outcome,
}

impl LocatorTrace {
    pub fn steps(&self) -> &[Step] {
        &self.steps
    }

    /// The chosen rationals `α1, α2, ...` in order.
    pub fn iterates(&self) -> impl Iterator<Item = &BigRational> {
        self.steps.iter().map(|s| &s.alpha)
    }

    /// Final `(lo, hi)` bracket, absent when the seed phase already hit the
    /// target.
    pub fn bracket(&self) -> Option<&(BigRational, BigRational)> {
        self.bracket.as_ref()
    }

    pub fn outcome(&self) -> &Outcome {
        &self.outcome
    }

    pub fn is_exact(&self) -> bool {
        matches!(self.outcome, Outcome::Exact(_))
    }

    /// Number of refinement rounds (iterates chosen after the seed phase).
    pub fn rounds(&self) -> usize {
        self.steps.iter().filter(|s| s.phase == Phase::Refine).count()
    }

    /// Number of choices made after the initial `α1`.
    pub fn steps_after_first(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }

    /// Bracket width after each refinement round, replayed from the steps.
    pub fn bracket_widths(&self) -> Vec<BigRational> {
        let mut lo: Option<BigRational> = None;
        let mut hi: Option<BigRational> = None;
        let mut widths = Vec::new();
        for step in &self.steps {
            match step.cmp {
                Comparison::TargetGreater => lo = Some(step.alpha.clone()),
                Comparison::TargetLess => hi = Some(step.alpha.clone()),
                Comparison::TargetEqual => break,
            }
            if step.phase == Phase::Refine {
                if let (Some(l), Some(h)) = (&lo, &hi) {
                    widths.push(difference(h, l));
                }
            }
        }
        widths
    }

    /// Iterates below the target strictly increase and iterates above it
    /// strictly decrease, checked from the steps alone.
    pub fn approaches_monotonically(&self) -> bool {
        let mut below: Option<&BigRational> = None;
        let mut above: Option<&BigRational> = None;
        for step in &self.steps {
            match step.cmp {
                Comparison::TargetGreater => {
                    if below.is_some_and(|b| cmp_exact(&step.alpha, b).is_le())
                        || above.is_some_and(|a| cmp_exact(&step.alpha, a).is_ge())
                    {
                        return false;
                    }
                    below = Some(&step.alpha);
                }
                Comparison::TargetLess => {
                    if above.is_some_and(|a| cmp_exact(&step.alpha, a).is_ge())
                        || below.is_some_and(|b| cmp_exact(&step.alpha, b).is_le())
                    {
                        return false;
                    }
                    above = Some(&step.alpha);
                }
                Comparison::TargetEqual => {}
            }
        }
        true
    }
}

/// Order by cross-multiplication. `Ratio`'s own `Ord` walks a continued
/// fraction expansion, which is far slower once iterates carry thousands of
/// digits.
pub(crate) fn cmp_exact(x: &BigRational, y: &BigRational) -> std::cmp::Ordering {
    (x.numer() * y.denom()).cmp(&(y.numer() * x.denom()))
}

/// `h - l`, skipping the gcd when the numerator is already 1 (always the
/// case for Stern–Brocot neighbours).
fn difference(h: &BigRational, l: &BigRational) -> BigRational {
    let numer = h.numer() * l.denom() - l.numer() * h.denom();
    let denom = h.denom() * l.denom();
    if numer.is_one() {
        BigRational::new_raw(numer, denom)
    } else {
        BigRational::new(numer, denom)
    }
}

/// Midpoint of two dyadic rationals, reduced by shifting out common factors
/// of two instead of a general gcd.
fn dyadic_midpoint(lo: &BigRational, hi: &BigRational) -> BigRational {
    let numer = lo.numer() * hi.denom() + hi.numer() * lo.denom();
    let denom = (lo.denom() * hi.denom()) << 1u32;
    match (numer.trailing_zeros(), denom.trailing_zeros()) {
        (None, _) => BigRational::zero(),
        (Some(a), Some(b)) => {
            let shift = a.min(b);
            BigRational::new_raw(numer >> shift, denom >> shift)
        }
        (Some(_), None) => unreachable!("denominator is positive"),
    }
}

/// How far the seed phase may gallop before giving up.
const MAX_GALLOP_DOUBLINGS: usize = 4096;

struct Run<'a> {
    cut: &'a CutPredicate,
    steps: Vec<Step>,
}

enum Probe {
    Hit(BigRational),
    Answer(Comparison),
}

impl Run<'_> {
    fn probe(&mut self, alpha: BigRational, phase: Phase) -> Result<Probe, LocatorError> {
        let cmp = self.cut.compare(&alpha);
        if cmp == Comparison::TargetEqual && self.cut.exactness() == Exactness::IrrationalTarget {
            return Err(LocatorError::InconsistentCut(format!(
                "irrational target {} reported equal to {alpha}",
                self.cut.description()
            )));
        }
        self.steps.push(Step { alpha: alpha.clone(), cmp, phase });
        Ok(match cmp {
            Comparison::TargetEqual => Probe::Hit(alpha),
            other => Probe::Answer(other),
        })
    }

    /// Find `m` with `m < x < m + 1`, or the integer `x` itself.
    fn seed(&mut self) -> Result<Result<BigInt, BigRational>, LocatorError> {
        let int = |v: &BigInt| BigRational::from_integer(v.clone());
        let zero = BigInt::zero();
        let direction = match self.probe(int(&zero), Phase::Seed)? {
            Probe::Hit(q) => return Ok(Err(q)),
            Probe::Answer(cmp) => cmp,
        };
        let sign = if direction == Comparison::TargetGreater { BigInt::one() } else { -BigInt::one() };

        // Gallop away from zero until the answer flips. `near` stays on the
        // zero side of the target, `far` ends on the other side.
        let mut near = zero;
        let mut step = BigInt::one();
        let mut far = None;
        for _ in 0..MAX_GALLOP_DOUBLINGS {
            let candidate = &sign * &step;
            match self.probe(int(&candidate), Phase::Seed)? {
                Probe::Hit(q) => return Ok(Err(q)),
                Probe::Answer(cmp) if cmp == direction => near = candidate,
                Probe::Answer(_) => {
                    far = Some(candidate);
                    break;
                }
            }
            step *= 2;
        }
        let mut far = far.ok_or(LocatorError::Unbounded)?;

        // Halve the integer gap down to 1.
        while (&far - &near).abs() > BigInt::one() {
            let mid: BigInt = (&near + &far) / 2;
            match self.probe(int(&mid), Phase::Seed)? {
                Probe::Hit(q) => return Ok(Err(q)),
                Probe::Answer(cmp) if cmp == direction => near = mid,
                Probe::Answer(_) => far = mid,
            }
        }
        Ok(Ok(near.min(far)))
    }
}

/// Run the point locator with a round budget.
pub fn locate(cut: &CutPredicate, budget: usize, strategy: Strategy) -> Result<LocatorTrace, LocatorError> {
    locate_until(cut, budget, strategy, None)
}

/// Like [`locate`], but also stop as soon as the bracket is at most
/// `max_width` wide, reporting [`Outcome::Bracket`].
pub fn locate_until(
    cut: &CutPredicate,
    budget: usize,
    strategy: Strategy,
    max_width: Option<&BigRational>,
) -> Result<LocatorTrace, LocatorError> {
    if budget == 0 {
        return Err(LocatorError::ZeroBudget);
    }
    let mut run = Run { cut, steps: Vec::new() };
    let floor = match run.seed()? {
        Ok(m) => m,
        Err(exact) => {
            return Ok(LocatorTrace { steps: run.steps, bracket: None, outcome: Outcome::Exact(exact) });
        }
    };

    // Bracket as two fractions lo = a/b, hi = c/d. Consecutive integers are
    // Stern–Brocot neighbours (bc - ad = 1) and mediants preserve that, so
    // mediants need no reduction.
    let (mut a, mut b) = (floor.clone(), BigInt::one());
    let (mut c, mut d) = (floor + BigInt::one(), BigInt::one());
    let mut lo = BigRational::new_raw(a.clone(), b.clone());
    let mut hi = BigRational::new_raw(c.clone(), d.clone());

    let mut outcome = None;
    if max_width.is_some_and(|w| cmp_exact(&difference(&hi, &lo), w).is_le()) {
        outcome = Some(Outcome::Bracket(lo.clone(), hi.clone()));
    }
    let mut rounds = 0;
    while outcome.is_none() && rounds < budget {
        rounds += 1;
        let (alpha, mediant) = match strategy {
            Strategy::SternBrocot => {
                let (p, q) = (&a + &c, &b + &d);
                (BigRational::new_raw(p.clone(), q.clone()), Some((p, q)))
            }
            Strategy::Bisection => (dyadic_midpoint(&lo, &hi), None),
        };
        match run.probe(alpha.clone(), Phase::Refine)? {
            Probe::Hit(q) => outcome = Some(Outcome::Exact(q)),
            Probe::Answer(Comparison::TargetGreater) => {
                if let Some((p, q)) = mediant {
                    (a, b) = (p, q);
                }
                lo = alpha;
            }
            Probe::Answer(_) => {
                if let Some((p, q)) = mediant {
                    (c, d) = (p, q);
                }
                hi = alpha;
            }
        }
        if outcome.is_none() && max_width.is_some_and(|w| cmp_exact(&difference(&hi, &lo), w).is_le()) {
            outcome = Some(Outcome::Bracket(lo.clone(), hi.clone()));
        }
    }
    let outcome = outcome.unwrap_or_else(|| Outcome::BudgetExhausted(lo.clone(), hi.clone()));

    if !matches!(outcome, Outcome::Exact(_)) {
        // A pure monotone cut must still agree with both ends.
        if cut.compare(&lo) != Comparison::TargetGreater || cut.compare(&hi) != Comparison::TargetLess {
            return Err(LocatorError::InconsistentCut(format!(
                "bracket [{lo}, {hi}] no longer contains {}",
                cut.description()
            )));
        }
    }
    Ok(LocatorTrace { steps: run.steps, bracket: Some((lo, hi)), outcome })
}

/// Successive truncations `int, int.d1, int.d1d2, ...` as exact rationals.
///
/// Returns `count` approximants, the first being the integer part alone;
/// `count = 0` is treated as 1. For a negative integer part the fractional
/// digits are subtracted, so the stream always carries the magnitude.
pub fn cauchy_approximants(
    stream: &DigitStream,
    integer_part: impl Into<BigInt>,
    count: usize,
) -> Result<Vec<BigRational>, LocatorError> {
    let integer_part = integer_part.into();
    let count = count.max(1);
    let digits = stream.prefix(count as u64 - 1)?;
    let base = BigInt::from(stream.radix().value());
    let sign = if integer_part.is_negative() { -BigInt::one() } else { BigInt::one() };

    let mut out = Vec::with_capacity(count);
    let mut numer = BigInt::zero();
    let mut scale = BigInt::one();
    out.push(BigRational::from_integer(integer_part.clone()));
    for d in digits {
        numer = numer * &base + BigInt::from(d);
        scale *= &base;
        let frac = BigRational::new(&sign * &numer, scale.clone());
        out.push(BigRational::from_integer(integer_part.clone()) + frac);
    }
    Ok(out)
}
