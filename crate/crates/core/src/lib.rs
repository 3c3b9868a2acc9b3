//! Enumerate the distinct permutations of a string that satisfy per-position
//! allow/forbid constraints.
//!
//! ```
//! use permgen::{alphabet_of, generate, parse};
//!
//! let s = "abacb";
//! let constraints = parse("pos 1 in {a, b}\npos 3 not in {c}", 5).unwrap();
//! let matrix = constraints.normalize(&alphabet_of(s)).unwrap();
//! let perms: Vec<String> = generate(s, &matrix, true).unwrap().collect();
//! assert_eq!(perms.len(), 18);
//! assert_eq!(perms[0], "aabbc");
//! ```

pub mod constraint;
pub mod generator;
pub mod oracle;
pub mod parser;

pub use constraint::{
    alphabet_of, Alphabet, ConstraintKind, ConstraintSet, EmptySetError, PermittedMatrix,
    PositionConstraint, Symbol, ValidationIssue, ValidationReport,
};
pub use generator::{
    count, generate, GenStats, GenerateError, MultisetCounter, PermutationStream, StatsSnapshot,
};
pub use oracle::{distinct_permutations, filter, FilterLengthError, OracleResult};
pub use parser::{parse, render, ParseError};
