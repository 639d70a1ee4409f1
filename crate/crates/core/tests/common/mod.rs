//! Oracles shared by the integration suites. Nothing here calls into the
//! solver or stream code it is used to check.

#![allow(dead_code)]

use std::collections::HashMap;

use hybridspace::sat::{Cnf, Literal};
use num::{BigInt, BigRational};
use rand::Rng;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

/// Clauses as signed 1-based DIMACS integers.
pub fn signed_clauses(cnf: &Cnf) -> Vec<Vec<i64>> {
    cnf.clauses().iter().map(|c| c.iter().map(|l| l.to_dimacs()).collect()).collect()
}

/// Plain recursive DPLL with unit propagation.
pub fn dpll(num_vars: usize, clauses: &[Vec<i64>]) -> Option<Vec<bool>> {
    fn go(clauses: Vec<Vec<i64>>, assigned: &mut Vec<Option<bool>>) -> bool {
        let mut clauses = clauses;
        loop {
            if clauses.iter().any(|c| c.is_empty()) {
                return false;
            }
            let Some(unit) = clauses.iter().find(|c| c.len() == 1).map(|c| c[0]) else { break };
            assigned[(unit.unsigned_abs() - 1) as usize] = Some(unit > 0);
            clauses = simplify(&clauses, unit);
        }
        let Some(lit) = clauses.first().map(|c| c[0]) else { return true };
        for choice in [lit, -lit] {
            let saved = assigned.clone();
            assigned[(choice.unsigned_abs() - 1) as usize] = Some(choice > 0);
            if go(simplify(&clauses, choice), assigned) {
                return true;
            }
            *assigned = saved;
        }
        false
    }

    fn simplify(clauses: &[Vec<i64>], lit: i64) -> Vec<Vec<i64>> {
        clauses
            .iter()
            .filter(|c| !c.contains(&lit))
            .map(|c| c.iter().copied().filter(|&l| l != -lit).collect())
            .collect()
    }

    let mut assigned = vec![None; num_vars];
    go(clauses.to_vec(), &mut assigned).then(|| assigned.into_iter().map(|v| v.unwrap_or(false)).collect())
}

pub fn satisfies(clauses: &[Vec<i64>], values: &[bool]) -> bool {
    clauses
        .iter()
        .all(|c| c.iter().any(|&l| values[(l.unsigned_abs() - 1) as usize] == (l > 0)))
}

pub fn random_cnf(rng: &mut impl Rng, num_vars: usize, num_clauses: usize, width: usize) -> Cnf {
    let clauses = (0..num_clauses)
        .map(|_| (0..width).map(|_| Literal::new(rng.gen_range(0..num_vars), rng.gen_bool(0.5))).collect())
        .collect();
    Cnf::new(num_vars, clauses).unwrap()
}

/// Fractional digits of |p|/q by schoolbook long division.
pub fn long_division(p: i64, q: u64, base: u64, n: usize) -> Vec<u8> {
    let mut r = (p.unsigned_abs() % q) as u128;
    (0..n)
        .map(|_| {
            r *= base as u128;
            let d = r / q as u128;
            r %= q as u128;
            d as u8
        })
        .collect()
}

/// (preperiod, period) of the remainder sequence of |p|/q in `base`.
pub fn remainder_cycle(p: i64, q: u64, base: u64) -> (usize, usize) {
    let mut seen = HashMap::new();
    let mut r = p.unsigned_abs() % q;
    for k in 0.. {
        if let Some(start) = seen.insert(r, k) {
            return (start, k - start);
        }
        r = ((r as u128 * base as u128) % q as u128) as u64;
    }
    unreachable!()
}

/// The 36 two-literal clause shapes over four variables, as unordered
/// literal pairs (a literal paired with itself included).
pub fn two_clause_shapes() -> Vec<[Literal; 2]> {
    let lits: Vec<Literal> = (0..4).flat_map(|v| [Literal::pos(v), Literal::neg(v)]).collect();
    let mut out = Vec::new();
    for a in 0..lits.len() {
        for b in a..lits.len() {
            out.push([lits[a], lits[b]]);
        }
    }
    out
}

/// Calls `f` on every subset of `0..n` with at most `max` elements.
pub fn for_each_subset(n: usize, max: usize, mut f: impl FnMut(&[usize])) {
    fn rec(start: usize, n: usize, max: usize, cur: &mut Vec<usize>, f: &mut dyn FnMut(&[usize])) {
        f(cur);
        if cur.len() == max {
            return;
        }
        for i in start..n {
            cur.push(i);
            rec(i + 1, n, max, cur, f);
            cur.pop();
        }
    }
    rec(0, n, max, &mut Vec::new(), &mut f);
}

/// A rational strictly inside (1, 100].
pub fn random_convexity(rng: &mut impl Rng) -> BigRational {
    let d: i64 = rng.gen_range(1..=50);
    let n: i64 = rng.gen_range(d + 1..=100 * d);
    q(n, d)
}

/// `x < y` by cross-multiplication.
pub fn less(x: &BigRational, y: &BigRational) -> bool {
    x.numer() * y.denom() < y.numer() * x.denom()
}
