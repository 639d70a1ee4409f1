//! Clause databases, a polynomial 2-SAT solver, exhaustive k-SAT search and
//! the clause-choice game.
//!
//! The clause game turns a 3-CNF into a sequence of binary positions. Each
//! clause `l1 ∨ l2 ∨ l3` is read as `¬l1 ⇒ l2 ∨ l3`; the digit at its
//! position picks `l2` or `l3` as the designated satisfier. A guess string
//! therefore selects one 2-clause `l1 ∨ chosen` per clause, and the 3-CNF is
//! satisfiable iff some guess string yields a satisfiable 2-CNF.

use std::fmt;
use std::sync::atomic::{AtomicU64, Ordering};

use num::{BigUint, One};
use serde::ser::SerializeMap;
use serde::{Serialize, Serializer};
use thiserror::Error;

use crate::hybrid::{pattern_convexity, Convexity};
use crate::streams::{Cell, PatternMask};

/// Desk-scale limit for exhaustive search.
pub const MAX_BRUTEFORCE_VARS: usize = 24;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("clause of width {width} exceeds the maximum width {max}")]
    WrongWidth { width: usize, max: usize },
    #[error("{0} variables exceed the exhaustive search limit of {MAX_BRUTEFORCE_VARS}")]
    TooLarge(usize),
    #[error("clause width must be at least 2, got {0}")]
    InvalidWidth(u32),
    #[error("convexity for width {0} is only available with extrapolation enabled")]
    ExtrapolationRequired(u32),
    #[error("assignment covers {have} variables, formula has {need}")]
    PartialAssignment { have: usize, need: usize },
    #[error("variable {var} out of range for {num_vars} variables")]
    VariableOutOfRange { var: usize, num_vars: usize },
    #[error("guess string has {have} digits, game has {need} positions")]
    GuessLength { have: usize, need: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Literal {
    var: usize,
    positive: bool,
}

impl Literal {
    pub fn new(var: usize, positive: bool) -> Self {
        Self { var, positive }
    }

    pub fn pos(var: usize) -> Self {
        Self::new(var, true)
    }

    pub fn neg(var: usize) -> Self {
        Self::new(var, false)
    }

    pub fn var(self) -> usize {
        self.var
    }

    pub fn is_positive(self) -> bool {
        self.positive
    }

    pub fn negate(self) -> Self {
        Self { var: self.var, positive: !self.positive }
    }

    pub fn eval(self, values: &[bool]) -> bool {
        values[self.var] == self.positive
    }

    /// DIMACS encoding: 1-based variable, negative for negated literals.
    pub fn to_dimacs(self) -> i64 {
        let v = self.var as i64 + 1;
        if self.positive {
            v
        } else {
            -v
        }
    }

    fn node(self) -> usize {
        2 * self.var + usize::from(!self.positive)
    }
}

impl fmt::Display for Literal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if !self.positive {
            f.write_str("¬")?;
        }
        write!(f, "x{}", self.var)
    }
}

pub type Clause = Vec<Literal>;

/// A conjunction of disjunctive clauses. An empty clause makes the formula
/// unsatisfiable; an empty clause list is trivially satisfiable.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Cnf {
    num_vars: usize,
    clauses: Vec<Clause>,
}

impl Cnf {
    pub fn new(num_vars: usize, clauses: Vec<Clause>) -> Result<Self, SatError> {
        for lit in clauses.iter().flatten() {
            if lit.var >= num_vars {
                return Err(SatError::VariableOutOfRange { var: lit.var, num_vars });
            }
        }
        Ok(Self { num_vars, clauses })
    }

    pub fn num_vars(&self) -> usize {
        self.num_vars
    }

    pub fn clauses(&self) -> &[Clause] {
        &self.clauses
    }

    /// Widest clause (`k`), 0 for an empty clause list.
    pub fn width(&self) -> usize {
        self.clauses.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn require_width(&self, max: usize) -> Result<(), SatError> {
        match self.width() {
            width if width > max => Err(SatError::WrongWidth { width, max }),
            _ => Ok(()),
        }
    }
}

impl fmt::Display for Cnf {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.clauses.is_empty() {
            return f.write_str("⊤");
        }
        for (i, clause) in self.clauses.iter().enumerate() {
            if i > 0 {
                f.write_str(" ∧ ")?;
            }
            f.write_str("(")?;
            for (j, lit) in clause.iter().enumerate() {
                if j > 0 {
                    f.write_str(" ∨ ")?;
                }
                write!(f, "{lit}")?;
            }
            f.write_str(")")?;
        }
        Ok(())
    }
}

/// A total valuation, indexed by variable.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize)]
#[serde(transparent)]
pub struct Assignment(pub Vec<bool>);

impl Assignment {
    pub fn values(&self) -> &[bool] {
        &self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum SatResult {
    Satisfiable(Assignment),
    Unsatisfiable,
}

impl SatResult {
    pub fn is_sat(&self) -> bool {
        matches!(self, SatResult::Satisfiable(_))
    }

    pub fn witness(&self) -> Option<&Assignment> {
        match self {
            SatResult::Satisfiable(a) => Some(a),
            SatResult::Unsatisfiable => None,
        }
    }
}

/// `{"verdict":"sat","witness":[...]}` or `{"verdict":"unsat"}`.
impl Serialize for SatResult {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        match self {
            SatResult::Satisfiable(a) => {
                let mut map = serializer.serialize_map(Some(2))?;
                map.serialize_entry("verdict", "sat")?;
                map.serialize_entry("witness", a)?;
                map.end()
            }
            SatResult::Unsatisfiable => {
                let mut map = serializer.serialize_map(Some(1))?;
                map.serialize_entry("verdict", "unsat")?;
                map.end()
            }
        }
    }
}

pub fn check_assignment(cnf: &Cnf, assignment: &Assignment) -> Result<bool, SatError> {
    if assignment.0.len() != cnf.num_vars {
        return Err(SatError::PartialAssignment { have: assignment.0.len(), need: cnf.num_vars });
    }
    Ok(cnf.clauses.iter().all(|c| c.iter().any(|l| l.eval(&assignment.0))))
}

/// Edges `¬a ⇒ b` and `¬b ⇒ a` for every clause `a ∨ b`; a unit clause
/// `a` contributes `¬a ⇒ a`. Node `2v` is `x_v`, node `2v + 1` is `¬x_v`.
pub fn implication_graph(cnf: &Cnf) -> Result<Vec<Vec<usize>>, SatError> {
    cnf.require_width(2)?;
    let mut graph = vec![Vec::new(); 2 * cnf.num_vars];
    for clause in &cnf.clauses {
        match clause.as_slice() {
            [] => {}
            [a] => graph[a.negate().node()].push(a.node()),
            [a, b] => {
                graph[a.negate().node()].push(b.node());
                graph[b.negate().node()].push(a.node());
            }
            _ => unreachable!("width checked"),
        }
    }
    Ok(graph)
}

/// Tarjan's algorithm without recursion. Components are numbered in reverse
/// topological order: a component only reaches components with smaller ids.
fn strongly_connected_components(graph: &[Vec<usize>]) -> Vec<usize> {
    const UNSEEN: usize = usize::MAX;
    let n = graph.len();
    let mut index = vec![UNSEEN; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut comp = vec![UNSEEN; n];
    let mut stack = Vec::new();
    let mut next_index = 0;
    let mut next_comp = 0;
    let mut call: Vec<(usize, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNSEEN {
            continue;
        }
        call.push((root, 0));
        while let Some(&mut (v, ref mut edge)) = call.last_mut() {
            if *edge == 0 && index[v] == UNSEEN {
                index[v] = next_index;
                low[v] = next_index;
                next_index += 1;
                stack.push(v);
                on_stack[v] = true;
            }
            if let Some(&w) = graph[v].get(*edge) {
                *edge += 1;
                if index[w] == UNSEEN {
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                while let Some(w) = stack.pop() {
                    on_stack[w] = false;
                    comp[w] = next_comp;
                    if w == v {
                        break;
                    }
                }
                next_comp += 1;
            }
        }
    }
    comp
}

/// Polynomial 2-SAT through the implication graph.
///
/// Unsatisfiable iff some `x` and `¬x` share a strongly connected component.
/// Otherwise `x` is set true when its component comes later in topological
/// order than that of `¬x`.
pub fn solve_2sat(cnf: &Cnf) -> Result<SatResult, SatError> {
    cnf.require_width(2)?;
    if cnf.clauses.iter().any(Vec::is_empty) {
        return Ok(SatResult::Unsatisfiable);
    }
    let graph = implication_graph(cnf)?;
    let comp = strongly_connected_components(&graph);
    let mut values = Vec::with_capacity(cnf.num_vars);
    for v in 0..cnf.num_vars {
        let (t, f) = (comp[2 * v], comp[2 * v + 1]);
        if t == f {
            return Ok(SatResult::Unsatisfiable);
        }
        values.push(t < f);
    }
    Ok(SatResult::Satisfiable(Assignment(values)))
}

/// Clauses as bit masks over the search index, where variable `i` is bit
/// `num_vars - 1 - i` so that increasing indices enumerate assignments in
/// lexicographic order (false < true, variable 0 most significant).
struct MaskedCnf {
    num_vars: usize,
    clauses: Vec<(u32, u32)>,
}

impl MaskedCnf {
    fn new(cnf: &Cnf) -> Result<Self, SatError> {
        if cnf.num_vars > MAX_BRUTEFORCE_VARS {
            return Err(SatError::TooLarge(cnf.num_vars));
        }
        let bit = |v: usize| 1u32 << (cnf.num_vars - 1 - v);
        let clauses = cnf
            .clauses
            .iter()
            .map(|c| {
                c.iter().fold((0, 0), |(pos, neg), l| {
                    if l.positive {
                        (pos | bit(l.var), neg)
                    } else {
                        (pos, neg | bit(l.var))
                    }
                })
            })
            .collect();
        Ok(Self { num_vars: cnf.num_vars, clauses })
    }

    fn satisfied_by(&self, m: u32) -> bool {
        self.clauses.iter().all(|&(pos, neg)| m & pos != 0 || !m & neg != 0)
    }

    fn space(&self) -> u64 {
        1u64 << self.num_vars
    }

    fn assignment(&self, m: u32) -> Assignment {
        Assignment((0..self.num_vars).map(|v| m >> (self.num_vars - 1 - v) & 1 == 1).collect())
    }
}

/// Exhaustive search; the witness is the lexicographically first satisfying
/// assignment.
pub fn solve_bruteforce(cnf: &Cnf) -> Result<SatResult, SatError> {
    solve_bruteforce_parallel(cnf, 1)
}

/// [`solve_bruteforce`] with the assignment space split into `jobs`
/// contiguous ranges. The lowest witness wins regardless of scheduling, so
/// the result is identical for every `jobs`.
pub fn solve_bruteforce_parallel(cnf: &Cnf, jobs: usize) -> Result<SatResult, SatError> {
    let masked = MaskedCnf::new(cnf)?;
    let space = masked.space();
    let jobs = (jobs.max(1) as u64).min(space);
    let best = AtomicU64::new(u64::MAX);

    let scan = |start: u64, end: u64| {
        for m in start..end {
            if m >= best.load(Ordering::Relaxed) {
                return;
            }
            if masked.satisfied_by(m as u32) {
                best.fetch_min(m, Ordering::Relaxed);
                return;
            }
        }
    };

    if jobs <= 1 {
        scan(0, space);
    } else {
        let chunk = space.div_ceil(jobs);
        std::thread::scope(|s| {
            for j in 0..jobs {
                let (start, end) = (j * chunk, ((j + 1) * chunk).min(space));
                let scan = &scan;
                s.spawn(move || scan(start, end));
            }
        });
    }

    Ok(match best.into_inner() {
        u64::MAX => SatResult::Unsatisfiable,
        m => SatResult::Satisfiable(masked.assignment(m as u32)),
    })
}

/// `(k - 1)^n`: the branching count of a width-k formula with n clauses.
pub fn possibility_count(k: u32, n: u32) -> Result<BigUint, SatError> {
    if k < 2 {
        return Err(SatError::InvalidWidth(k));
    }
    Ok(num::pow(BigUint::from(k - 1), n as usize))
}

/// Convexity of a width-k solution space: infinite for k = 2, and the
/// convexity of the mask with `k - 1` fixed cells and one free cell for
/// k = 3. Widths above 3 require `extrapolate`.
pub fn clause_convexity(k: u32, extrapolate: bool) -> Result<Convexity, SatError> {
    match k {
        0 | 1 => Err(SatError::InvalidWidth(k)),
        2 => Ok(Convexity::Infinite),
        3 => Ok(clause_mask_convexity(3)),
        _ if extrapolate => Ok(clause_mask_convexity(k)),
        _ => Err(SatError::ExtrapolationRequired(k)),
    }
}

fn clause_mask_convexity(k: u32) -> Convexity {
    let mut cells = vec![Cell::Fixed(1); k as usize - 1];
    cells.push(Cell::Free);
    let mask = PatternMask::new(cells).expect("non-empty mask");
    pattern_convexity(&mask).expect("mask has fixed cells")
}

/// One game position: the clause read as `antecedent ⇒ first ∨ second`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct GamePosition {
    clause: Clause,
    /// `l1`, the literal whose negation is the antecedent. `None` for the
    /// empty clause.
    pub head: Option<Literal>,
    /// `[l2, l3]`; digit 0 designates `l2`, digit 1 designates `l3`.
    pub choices: Option<[Literal; 2]>,
}

impl GamePosition {
    fn new(clause: &[Literal]) -> Self {
        let mut lits: Vec<Literal> = Vec::with_capacity(3);
        for &l in clause {
            if !lits.contains(&l) {
                lits.push(l);
            }
        }
        let (head, choices) = match lits.as_slice() {
            [] => (None, None),
            [a] => (Some(*a), Some([*a, *a])),
            [a, b] => (Some(*a), Some([*b, *b])),
            [a, b, c] => (Some(*a), Some([*b, *c])),
            _ => unreachable!("width checked"),
        };
        Self { clause: clause.to_vec(), head, choices }
    }

    pub fn clause(&self) -> &[Literal] {
        &self.clause
    }

    /// `¬l1`, the antecedent `a` of `a ⇒ b ∨ c`.
    pub fn antecedent(&self) -> Option<Literal> {
        self.head.map(Literal::negate)
    }

    /// The 2-clause `l1 ∨ designated` selected by `digit`.
    fn restrict(&self, digit: u8) -> Clause {
        match (self.head, self.choices) {
            (Some(head), Some(choices)) => {
                let chosen = choices[usize::from(digit != 0)];
                if chosen == head {
                    vec![head]
                } else {
                    vec![head, chosen]
                }
            }
            _ => Vec::new(),
        }
    }
}

/// A 3-CNF viewed as a binary guessing game with one position per clause.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ClauseGame {
    num_vars: usize,
    positions: Vec<GamePosition>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decoding {
    /// The 2-CNF of designated clauses `l1 ∨ chosen`.
    pub restricted: Cnf,
    /// Its 2-SAT verdict; any witness satisfies the original formula.
    pub result: SatResult,
}

impl Decoding {
    pub fn is_consistent(&self) -> bool {
        self.result.is_sat()
    }
}

pub fn reduce_3sat_to_game(cnf: &Cnf) -> Result<ClauseGame, SatError> {
    cnf.require_width(3)?;
    Ok(ClauseGame {
        num_vars: cnf.num_vars,
        positions: cnf.clauses.iter().map(|c| GamePosition::new(c)).collect(),
    })
}

impl ClauseGame {
    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn positions(&self) -> &[GamePosition] {
        &self.positions
    }

    /// `2^n` guess strings for `n` positions.
    pub fn guess_space(&self) -> BigUint {
        BigUint::one() << self.positions.len()
    }

    pub fn decode(&self, guess: &[u8]) -> Result<Decoding, SatError> {
        if guess.len() != self.positions.len() {
            return Err(SatError::GuessLength { have: guess.len(), need: self.positions.len() });
        }
        let clauses = self.positions.iter().zip(guess).map(|(p, &d)| p.restrict(d)).collect();
        let restricted = Cnf::new(self.num_vars, clauses)?;
        let result = solve_2sat(&restricted)?;
        Ok(Decoding { restricted, result })
    }

    pub fn check(&self, guess: &[u8]) -> Result<bool, SatError> {
        Ok(self.decode(guess)?.is_consistent())
    }

    /// First consistent guess string in lexicographic order, with its
    /// decoding. Exponential in the number of positions.
    pub fn search(&self) -> Result<Option<(Vec<u8>, Decoding)>, SatError> {
        let n = self.positions.len();
        if n > 63 {
            return Err(SatError::TooLarge(n));
        }
        for g in 0..1u64 << n {
            let guess: Vec<u8> = (0..n).map(|i| (g >> (n - 1 - i) & 1) as u8).collect();
            let decoding = self.decode(&guess)?;
            if decoding.is_consistent() {
                return Ok(Some((guess, decoding)));
            }
        }
        Ok(None)
    }
}
