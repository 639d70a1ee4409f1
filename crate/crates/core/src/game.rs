//! The sequence-guessing game and its diagonal adversary.
//!
//! Alice reveals binary digits one at a time; Bob, a [`PredictorProgram`],
//! must guess each digit from the digits revealed so far and loses at the
//! first wrong guess. Each program's *self-consistent run* (its own guesses
//! fed back as history) gives one row of an [`OutputMatrix`]. Flipping the
//! matrix diagonal yields a sequence that beats program `k` no later than
//! position `k`.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::streams::{DigitStream, Radix};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("sequences have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("certificate has {have} digits, {need} requested")]
    CertificateTooShort { have: usize, need: usize },
    #[error("diagonal needs at least {cols} rows, matrix has {rows}")]
    NotSquare { rows: usize, cols: usize },
    #[error("invalid program {id}: {reason}")]
    InvalidProgram { id: usize, reason: String },
    #[error("malformed program list: {0}")]
    ProgramList(String),
}

type GuessFn = dyn Fn(&[u8]) -> u8 + Send + Sync;

/// How a program turns revealed history into its next binary guess.
#[derive(Clone)]
pub enum ProgramKind {
    /// Replays `digits` cyclically, ignoring history.
    Fixed(Vec<u8>),
    Constant(u8),
    /// Repeats the last revealed digit; `first` when nothing is revealed yet.
    CopyLast { first: u8 },
    /// Negates the last revealed digit; `first` when nothing is revealed yet.
    FlipLast { first: u8 },
    /// Looks up the last `width` digits (zero-padded on the left, most
    /// recent digit least significant) in a `2^width` entry table.
    Window { width: u32, table: Vec<u8> },
    Custom(Arc<GuessFn>),
}

impl fmt::Debug for ProgramKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProgramKind::Fixed(d) => f.debug_tuple("Fixed").field(d).finish(),
            ProgramKind::Constant(d) => f.debug_tuple("Constant").field(d).finish(),
            ProgramKind::CopyLast { first } => f.debug_struct("CopyLast").field("first", first).finish(),
            ProgramKind::FlipLast { first } => f.debug_struct("FlipLast").field("first", first).finish(),
            ProgramKind::Window { width, table } => {
                f.debug_struct("Window").field("width", width).field("table", table).finish()
            }
            ProgramKind::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct PredictorProgram {
    id: usize,
    kind: ProgramKind,
}

fn check_bits(id: usize, digits: &[u8]) -> Result<(), GameError> {
    if let Some(d) = digits.iter().find(|&&d| d > 1) {
        return Err(GameError::InvalidProgram { id, reason: format!("digit {d} is not binary") });
    }
    Ok(())
}

impl PredictorProgram {
    pub fn new(id: usize, kind: ProgramKind) -> Result<Self, GameError> {
        match &kind {
            ProgramKind::Fixed(digits) => {
                if digits.is_empty() {
                    return Err(GameError::InvalidProgram { id, reason: "no digits".into() });
                }
                check_bits(id, digits)?;
            }
            ProgramKind::Constant(d) | ProgramKind::CopyLast { first: d } | ProgramKind::FlipLast { first: d } => {
                check_bits(id, &[*d])?
            }
            ProgramKind::Window { width, table } => {
                if *width > 16 || table.len() != 1usize << width {
                    return Err(GameError::InvalidProgram {
                        id,
                        reason: format!("window of width {width} needs {} table entries", 1u64 << width.min(&63)),
                    });
                }
                check_bits(id, table)?;
            }
            ProgramKind::Custom(_) => {}
        }
        Ok(Self { id, kind })
    }

    pub fn fixed(id: usize, digits: &[u8]) -> Result<Self, GameError> {
        Self::new(id, ProgramKind::Fixed(digits.to_vec()))
    }

    /// A program backed by an arbitrary pure function. Outputs other than 0
    /// are read as 1.
    pub fn custom<F>(id: usize, guess: F) -> Self
    where
        F: Fn(&[u8]) -> u8 + Send + Sync + 'static,
    {
        Self { id, kind: ProgramKind::Custom(Arc::new(guess)) }
    }

    pub fn id(&self) -> usize {
        self.id
    }

    pub fn kind(&self) -> &ProgramKind {
        &self.kind
    }

    pub fn next_guess(&self, history: &[u8]) -> u8 {
        match &self.kind {
            ProgramKind::Fixed(digits) => digits[history.len() % digits.len()],
            ProgramKind::Constant(d) => *d,
            ProgramKind::CopyLast { first } => history.last().copied().unwrap_or(*first),
            ProgramKind::FlipLast { first } => history.last().map_or(*first, |d| 1 - d),
            ProgramKind::Window { width, table } => {
                let index = history
                    .iter()
                    .rev()
                    .take(*width as usize)
                    .enumerate()
                    .fold(0usize, |acc, (shift, &d)| acc | ((d as usize & 1) << shift));
                table[index]
            }
            ProgramKind::Custom(f) => (f(history) != 0) as u8,
        }
    }

    /// The program's output when every guess is confirmed before the next.
    pub fn self_consistent_run(&self, n: usize) -> Vec<u8> {
        let mut row = Vec::with_capacity(n);
        for _ in 0..n {
            let guess = self.next_guess(&row);
            row.push(guess);
        }
        row
    }
}

/// JSON form of a program list entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
enum ProgramSpec {
    Fixed { id: usize, digits: String },
    Constant { id: usize, digit: u8 },
    CopyLast { id: usize, first: u8 },
    FlipLast { id: usize, first: u8 },
    Window { id: usize, width: u32, table: String },
}

fn parse_bits(id: usize, s: &str) -> Result<Vec<u8>, GameError> {
    s.chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(GameError::InvalidProgram { id, reason: format!("unexpected character {other:?}") }),
        })
        .collect()
}

fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&d| char::from(b'0' + d)).collect()
}

/// Load a program list such as
/// `[{"id":0,"kind":"fixed","digits":"0100"},{"id":1,"kind":"copy_last","first":1}]`.
///
/// Programs are returned in file order; ids must be unique.
pub fn programs_from_json(json: &str) -> Result<Vec<PredictorProgram>, GameError> {
    let specs: Vec<ProgramSpec> =
        serde_json::from_str(json).map_err(|e| GameError::ProgramList(e.to_string()))?;
    let mut seen = std::collections::BTreeSet::new();
    specs
        .into_iter()
        .map(|spec| {
            let program = match spec {
                ProgramSpec::Fixed { id, digits } => PredictorProgram::new(id, ProgramKind::Fixed(parse_bits(id, &digits)?)),
                ProgramSpec::Constant { id, digit } => PredictorProgram::new(id, ProgramKind::Constant(digit)),
                ProgramSpec::CopyLast { id, first } => PredictorProgram::new(id, ProgramKind::CopyLast { first }),
                ProgramSpec::FlipLast { id, first } => PredictorProgram::new(id, ProgramKind::FlipLast { first }),
                ProgramSpec::Window { id, width, table } => {
                    PredictorProgram::new(id, ProgramKind::Window { width, table: parse_bits(id, &table)? })
                }
            }?;
            if !seen.insert(program.id) {
                return Err(GameError::ProgramList(format!("duplicate id {}", program.id)));
            }
            Ok(program)
        })
        .collect()
}

/// Serialize programs back to the JSON list format. Custom programs have no
/// JSON form and are rejected.
pub fn programs_to_json(programs: &[PredictorProgram]) -> Result<String, GameError> {
    let specs = programs
        .iter()
        .map(|p| {
            let id = p.id;
            Ok(match &p.kind {
                ProgramKind::Fixed(d) => ProgramSpec::Fixed { id, digits: bits_to_string(d) },
                ProgramKind::Constant(d) => ProgramSpec::Constant { id, digit: *d },
                ProgramKind::CopyLast { first } => ProgramSpec::CopyLast { id, first: *first },
                ProgramKind::FlipLast { first } => ProgramSpec::FlipLast { id, first: *first },
                ProgramKind::Window { width, table } => {
                    ProgramSpec::Window { id, width: *width, table: bits_to_string(table) }
                }
                ProgramKind::Custom(_) => {
                    return Err(GameError::InvalidProgram { id, reason: "custom programs cannot be serialized".into() })
                }
            })
        })
        .collect::<Result<Vec<_>, GameError>>()?;
    serde_json::to_string(&specs).map_err(|e| GameError::ProgramList(e.to_string()))
}

/// Rows are the self-consistent runs of each program, truncated to `n`
/// columns.
#[derive(Debug, Clone)]
pub struct OutputMatrix {
    entries: Vec<Vec<u8>>,
    programs: Vec<PredictorProgram>,
    n: usize,
}

impl OutputMatrix {
    pub fn entries(&self) -> &[Vec<u8>] {
        &self.entries
    }

    pub fn programs(&self) -> &[PredictorProgram] {
        &self.programs
    }

    /// Number of columns.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rows(&self) -> usize {
        self.entries.len()
    }
}

pub fn output_matrix(programs: &[PredictorProgram], n: usize) -> OutputMatrix {
    OutputMatrix {
        entries: programs.iter().map(|p| p.self_consistent_run(n)).collect(),
        programs: programs.to_vec(),
        n,
    }
}

/// Cantor's construction: digit `k` is `1 - entries[k][k]`.
pub fn diagonal_flip(matrix: &OutputMatrix) -> Result<DigitStream, GameError> {
    let digits = diagonal_digits(matrix)?;
    Ok(DigitStream::literal(&digits, Radix::Binary).expect("binary digits form a valid literal"))
}

pub fn diagonal_digits(matrix: &OutputMatrix) -> Result<Vec<u8>, GameError> {
    if matrix.rows() < matrix.n {
        return Err(GameError::NotSquare { rows: matrix.rows(), cols: matrix.n });
    }
    Ok((0..matrix.n).map(|k| 1 - matrix.entries[k][k]).collect())
}

/// Something Alice can reveal digits from.
pub trait DigitSource {
    /// Digit at `position`, or `None` when the source has run out.
    fn reveal(&self, position: usize) -> Option<u8>;
}

impl DigitSource for DigitStream {
    fn reveal(&self, position: usize) -> Option<u8> {
        self.digit_at(position as u64).ok()
    }
}

impl DigitSource for [u8] {
    fn reveal(&self, position: usize) -> Option<u8> {
        self.get(position).copied()
    }
}

impl DigitSource for Vec<u8> {
    fn reveal(&self, position: usize) -> Option<u8> {
        self.get(position).copied()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum GameOutcome {
    BobLoses { failure_position: usize },
    Undefeated { length_played: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Exchange {
    pub alice: u8,
    pub bob: u8,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GameResult {
    pub outcome: GameOutcome,
    pub transcript: Vec<Exchange>,
}

impl GameResult {
    /// Entries before the failure match and the failing entry does not.
    pub fn is_sound(&self) -> bool {
        match self.outcome {
            GameOutcome::BobLoses { failure_position } => {
                self.transcript.len() == failure_position + 1
                    && self.transcript[..failure_position].iter().all(|e| e.alice == e.bob)
                    && self.transcript[failure_position].alice != self.transcript[failure_position].bob
            }
            GameOutcome::Undefeated { length_played } => {
                self.transcript.len() == length_played && self.transcript.iter().all(|e| e.alice == e.bob)
            }
        }
    }
}

/// Play until Bob's first wrong guess, `max_len` digits, or the end of
/// Alice's source, whichever comes first.
pub fn play_game<A: DigitSource + ?Sized>(alice: &A, bob: &PredictorProgram, max_len: usize) -> GameResult {
    let mut revealed = Vec::with_capacity(max_len);
    let mut transcript = Vec::with_capacity(max_len);
    for position in 0..max_len {
        let guess = bob.next_guess(&revealed);
        let Some(digit) = alice.reveal(position) else { break };
        transcript.push(Exchange { alice: digit, bob: guess });
        if digit != guess {
            return GameResult { outcome: GameOutcome::BobLoses { failure_position: position }, transcript };
        }
        revealed.push(digit);
    }
    GameResult { outcome: GameOutcome::Undefeated { length_played: transcript.len() }, transcript }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(tag = "verdict", rename_all = "snake_case")]
pub enum Verification {
    Match,
    FirstMismatch { index: usize },
}

/// Single left-to-right comparison of two equal-length prefixes.
pub fn verify_guess(alice: &[u8], bob: &[u8]) -> Result<Verification, GameError> {
    if alice.len() != bob.len() {
        return Err(GameError::LengthMismatch(alice.len(), bob.len()));
    }
    Ok(verify_guess_with(alice.len(), |i| (alice[i], bob[i])))
}

/// [`verify_guess`] over an indexed accessor; `at` is called at most once per
/// index.
pub fn verify_guess_with(len: usize, mut at: impl FnMut(usize) -> (u8, u8)) -> Verification {
    for i in 0..len {
        let (a, b) = at(i);
        if a != b {
            return Verification::FirstMismatch { index: i };
        }
    }
    Verification::Match
}

/// Read the first `n` digits off a guessed certificate.
pub fn certificate_replay(certificate: &[u8], n: usize) -> Result<Vec<u8>, GameError> {
    if certificate.len() < n {
        return Err(GameError::CertificateTooShort { have: certificate.len(), need: n });
    }
    let mut out = Vec::with_capacity(n);
    for &digit in &certificate[..n] {
        out.push(digit);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    const TABLE: [[u8; 4]; 4] = [[0, 1, 0, 0], [1, 1, 0, 1], [0, 0, 1, 1], [1, 0, 1, 0]];

    fn table_programs() -> Vec<PredictorProgram> {
        TABLE.iter().enumerate().map(|(i, row)| PredictorProgram::fixed(i, row).unwrap()).collect()
    }

    #[test]
    fn table_matrix_and_diagonal() {
        let m = output_matrix(&table_programs(), 4);
        assert_eq!(m.entries(), TABLE.map(|r| r.to_vec()).as_slice());
        assert_eq!(diagonal_digits(&m).unwrap(), vec![1, 0, 0, 1]);
        let flip = diagonal_flip(&m).unwrap();
        assert_eq!(flip.prefix(4).unwrap(), vec![1, 0, 0, 1]);
    }

    #[test]
    fn single_constant_row() {
        let zero = PredictorProgram::new(0, ProgramKind::Constant(0)).unwrap();
        let m = output_matrix(&[zero], 3);
        assert_eq!(m.entries(), &[vec![0, 0, 0]]);
        assert!(matches!(diagonal_flip(&m), Err(GameError::NotSquare { rows: 1, cols: 3 })));
    }

    #[test]
    fn copy_last_self_run() {
        let p = PredictorProgram::new(0, ProgramKind::CopyLast { first: 1 }).unwrap();
        assert_eq!(p.self_consistent_run(3), vec![1, 1, 1]);
        let flip = PredictorProgram::new(1, ProgramKind::FlipLast { first: 0 }).unwrap();
        assert_eq!(flip.self_consistent_run(4), vec![0, 1, 0, 1]);
    }

    #[test]
    fn window_lookup() {
        // width 2: index = prev * 2 + last
        let p = PredictorProgram::new(0, ProgramKind::Window { width: 2, table: vec![1, 0, 0, 1] }).unwrap();
        assert_eq!(p.next_guess(&[]), 1);
        assert_eq!(p.next_guess(&[1]), 0);
        assert_eq!(p.next_guess(&[1, 0]), 0);
        assert_eq!(p.next_guess(&[0, 1, 1]), 1);
        assert!(PredictorProgram::new(0, ProgramKind::Window { width: 2, table: vec![1, 0] }).is_err());
    }

    #[test]
    fn all_zero_diagonal() {
        let programs: Vec<_> = (0..3).map(|i| PredictorProgram::new(i, ProgramKind::Constant(0)).unwrap()).collect();
        let m = output_matrix(&programs, 3);
        assert_eq!(diagonal_digits(&m).unwrap(), vec![1, 1, 1]);
    }

    #[test]
    fn constant_mismatch_loses_immediately() {
        let bob = PredictorProgram::new(0, ProgramKind::Constant(0)).unwrap();
        let result = play_game(&vec![1u8; 10], &bob, 10);
        assert_eq!(result.outcome, GameOutcome::BobLoses { failure_position: 0 });
        assert!(result.is_sound());
    }

    #[test]
    fn self_play_is_undefeated() {
        let bob = PredictorProgram::new(0, ProgramKind::FlipLast { first: 1 }).unwrap();
        let alice = bob.self_consistent_run(100);
        let result = play_game(&alice, &bob, 100);
        assert_eq!(result.outcome, GameOutcome::Undefeated { length_played: 100 });
        assert!(result.is_sound());
    }

    #[test]
    fn short_source_ends_the_game() {
        let bob = PredictorProgram::new(0, ProgramKind::Constant(1)).unwrap();
        let result = play_game(&vec![1u8, 1], &bob, 10);
        assert_eq!(result.outcome, GameOutcome::Undefeated { length_played: 2 });
    }

    #[test]
    fn diagonal_beats_table_rows() {
        let programs = table_programs();
        let alice = diagonal_flip(&output_matrix(&programs, 4)).unwrap();
        for (k, bob) in programs.iter().enumerate() {
            match play_game(&alice, bob, 4).outcome {
                GameOutcome::BobLoses { failure_position } => assert!(failure_position <= k),
                other => panic!("program {k} survived: {other:?}"),
            }
        }
    }

    #[test]
    fn verify_examples() {
        assert_eq!(verify_guess(&[1, 0, 1], &[1, 0, 1]).unwrap(), Verification::Match);
        assert_eq!(verify_guess(&[1, 0, 1], &[1, 1, 1]).unwrap(), Verification::FirstMismatch { index: 1 });
        assert_eq!(
            verify_guess(&[1, 1, 0, 1], &[1, 0, 0, 1]).unwrap(),
            Verification::FirstMismatch { index: 1 }
        );
        assert_eq!(verify_guess(&[1], &[1, 0]).unwrap_err(), GameError::LengthMismatch(1, 2));
    }

    #[test]
    fn verifier_touches_each_index_once() {
        let alice = [0u8; 50];
        let mut touched = 0;
        let v = verify_guess_with(alice.len(), |i| {
            touched += 1;
            (alice[i], alice[i])
        });
        assert_eq!(v, Verification::Match);
        assert_eq!(touched, 50);
    }

    #[test]
    fn certificate_examples() {
        assert_eq!(certificate_replay(&[0, 1, 1, 0], 4).unwrap(), vec![0, 1, 1, 0]);
        assert_eq!(certificate_replay(&[0, 1], 0).unwrap(), Vec::<u8>::new());
        assert_eq!(
            certificate_replay(&[0, 1], 3).unwrap_err(),
            GameError::CertificateTooShort { have: 2, need: 3 }
        );
        let alice = [0, 1, 1, 0];
        let replayed = certificate_replay(&alice, 4).unwrap();
        assert_eq!(verify_guess(&alice, &replayed).unwrap(), Verification::Match);
    }

    #[test]
    fn program_json_round_trip() {
        let json = r#"[{"id":0,"kind":"fixed","digits":"0100"},{"id":1,"kind":"copy_last","first":1},
            {"id":2,"kind":"window","width":1,"table":"10"},{"id":3,"kind":"constant","digit":0},
            {"id":4,"kind":"flip_last","first":0}]"#;
        let programs = programs_from_json(json).unwrap();
        assert_eq!(programs.len(), 5);
        assert_eq!(programs[0].self_consistent_run(4), vec![0, 1, 0, 0]);
        assert_eq!(programs[2].self_consistent_run(4), vec![1, 0, 1, 0]);
        let again = programs_from_json(&programs_to_json(&programs).unwrap()).unwrap();
        assert_eq!(output_matrix(&again, 6).entries(), output_matrix(&programs, 6).entries());
    }

    #[test]
    fn program_json_errors() {
        assert!(matches!(programs_from_json("[{"), Err(GameError::ProgramList(_))));
        assert!(matches!(
            programs_from_json(r#"[{"id":0,"kind":"fixed","digits":"012"}]"#),
            Err(GameError::InvalidProgram { id: 0, .. })
        ));
        assert!(programs_from_json(r#"[{"id":0,"kind":"oracle"}]"#).is_err());
        assert!(programs_from_json(r#"[{"id":0,"kind":"constant","digit":1},{"id":0,"kind":"constant","digit":0}]"#).is_err());
    }
}
