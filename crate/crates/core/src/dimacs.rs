//! DIMACS CNF reader and writer.
//!
//! ```text
//! c comment
//! p cnf 3 2
//! 1 -2 0
//! 2 3 -1 0
//! ```
//!
//! Clauses may span lines and several may share a line; each ends at `0`.
//! A lone `%` line (as found in some benchmark archives) ends the input.

use std::fmt::Write as _;

use thiserror::Error;

use crate::sat::{Cnf, Literal};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DimacsError {
    #[error("line {line}: missing `p cnf <vars> <clauses>` header before clauses")]
    MissingHeader { line: usize },
    #[error("line {line}: malformed header {text:?}")]
    BadHeader { line: usize, text: String },
    #[error("line {line}: duplicate header")]
    DuplicateHeader { line: usize },
    #[error("line {line}: bad literal {text:?}")]
    BadLiteral { line: usize, text: String },
    #[error("line {line}: literal {literal} exceeds declared variable count {num_vars}")]
    VariableOutOfRange { line: usize, literal: i64, num_vars: usize },
    #[error("header declares {declared} clauses, found {found}")]
    ClauseCount { declared: usize, found: usize },
    #[error("last clause is not terminated by 0")]
    Unterminated,
    #[error("empty input")]
    Empty,
}

pub fn parse(input: &str) -> Result<Cnf, DimacsError> {
    let mut header: Option<(usize, usize)> = None;
    let mut clauses = Vec::new();
    let mut current = Vec::new();

    for (idx, raw) in input.lines().enumerate() {
        let line = idx + 1;
        let text = raw.trim();
        if text.is_empty() || text.starts_with('c') {
            continue;
        }
        if text.starts_with('%') {
            break;
        }
        if text.starts_with('p') {
            if header.is_some() {
                return Err(DimacsError::DuplicateHeader { line });
            }
            let bad = || DimacsError::BadHeader { line, text: text.to_string() };
            let fields: Vec<&str> = text.split_whitespace().collect();
            match fields.as_slice() {
                ["p", "cnf", vars, count] => {
                    header = Some((vars.parse().map_err(|_| bad())?, count.parse().map_err(|_| bad())?));
                }
                _ => return Err(bad()),
            }
            continue;
        }
        let (num_vars, _) = header.ok_or(DimacsError::MissingHeader { line })?;
        for token in text.split_whitespace() {
            let lit: i64 = token
                .parse()
                .map_err(|_| DimacsError::BadLiteral { line, text: token.to_string() })?;
            if lit == 0 {
                clauses.push(std::mem::take(&mut current));
                continue;
            }
            if lit.unsigned_abs() as usize > num_vars {
                return Err(DimacsError::VariableOutOfRange { line, literal: lit, num_vars });
            }
            current.push(Literal::new(lit.unsigned_abs() as usize - 1, lit > 0));
        }
    }

    let (num_vars, declared) = header.ok_or(DimacsError::Empty)?;
    if !current.is_empty() {
        return Err(DimacsError::Unterminated);
    }
    if clauses.len() != declared {
        return Err(DimacsError::ClauseCount { declared, found: clauses.len() });
    }
    Ok(Cnf::new(num_vars, clauses).expect("literals range-checked while parsing"))
}

pub fn write(cnf: &Cnf) -> String {
    let mut out = format!("p cnf {} {}\n", cnf.num_vars(), cnf.clauses().len());
    for clause in cnf.clauses() {
        for lit in clause {
            let _ = write!(out, "{} ", lit.to_dimacs());
        }
        out.push_str("0\n");
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_basic_file() {
        let cnf = parse("c example\np cnf 3 2\n1 -2 0\n2 3\n-1 0\n").unwrap();
        assert_eq!(cnf.num_vars(), 3);
        assert_eq!(
            cnf.clauses(),
            &[
                vec![Literal::pos(0), Literal::neg(1)],
                vec![Literal::pos(1), Literal::pos(2), Literal::neg(0)]
            ]
        );
    }

    #[test]
    fn several_clauses_per_line_and_percent_trailer() {
        let cnf = parse("p cnf 2 3\n1 0 -1 2 0 0\n%\n0\n").unwrap();
        assert_eq!(cnf.clauses().len(), 3);
        assert!(cnf.clauses()[2].is_empty());
    }

    #[test]
    fn errors() {
        assert_eq!(parse("1 2 0\n").unwrap_err(), DimacsError::MissingHeader { line: 1 });
        assert!(matches!(parse("p cnf x 1\n"), Err(DimacsError::BadHeader { .. })));
        assert!(matches!(parse("p dnf 1 1\n"), Err(DimacsError::BadHeader { .. })));
        assert!(matches!(parse("p cnf 1 1\n1 a 0\n"), Err(DimacsError::BadLiteral { .. })));
        assert!(matches!(parse("p cnf 1 1\n2 0\n"), Err(DimacsError::VariableOutOfRange { .. })));
        assert_eq!(parse("p cnf 1 2\n1 0\n").unwrap_err(), DimacsError::ClauseCount { declared: 2, found: 1 });
        assert_eq!(parse("p cnf 1 1\n1\n").unwrap_err(), DimacsError::Unterminated);
        assert_eq!(parse("c nothing\n").unwrap_err(), DimacsError::Empty);
        assert!(matches!(parse("p cnf 1 0\np cnf 1 0\n"), Err(DimacsError::DuplicateHeader { .. })));
    }

    #[test]
    fn write_then_parse() {
        let cnf = parse("p cnf 4 3\n1 -4 0\n-2 3 4 0\n0\n").unwrap();
        assert_eq!(parse(&write(&cnf)).unwrap(), cnf);
    }
}
