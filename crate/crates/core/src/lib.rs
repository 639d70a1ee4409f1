//! Exact, deterministic tooling for diagonalization and hybrid-space number
//! representations.
//!
//! | module | what it provides |
//! |---|---|
//! | [`streams`] | rational, mask-patterned and truncated digit streams |
//! | [`hybrid`] | ordered-pair distances, convexity, traversal sums, Peano addition |
//! | [`locator`] | point location against Dedekind cuts, Cauchy truncations |
//! | [`game`] | predictor programs, output matrices, the diagonal adversary |
//! | [`sat`] | 2-SAT, brute-force k-SAT, possibility counts, the clause game |
//! | [`dimacs`] | DIMACS CNF reading and writing |
//! | [`cli`] | the `hybridspace` command-line workbench |
//!
//! All arithmetic on distances, convexities and locator iterates is exact
//! big-rational arithmetic. All randomness is seeded.
//!
//! ```
//! use hybridspace::hybrid::{convexity, actual_from_virtual, OrderedPair};
//!
//! let a = OrderedPair::new(0, 3).unwrap();
//! let b = OrderedPair::new(9, 12).unwrap();
//! let c = convexity(&a, &b).unwrap();
//! assert_eq!(c.to_string(), "2");
//! assert_eq!(actual_from_virtual(12, &c).unwrap().to_string(), "6");
//! ```

pub mod cli;
pub mod dimacs;
pub mod game;
pub mod hybrid;
pub mod locator;
pub mod sat;
pub mod streams;

pub use num::{BigInt, BigRational, BigUint};
