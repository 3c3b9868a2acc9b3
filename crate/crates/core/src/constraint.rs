//! Per-position allow/forbid constraints and their normalization into a
//! [`PermittedMatrix`].
//!
//! Users describe what may (or may not) appear at a 1-indexed position of the
//! input string. Before generation every position is reduced to a single set of
//! permitted symbols:
//!
//! * a position with `Allowed` constraints permits the union of those sets,
//!   restricted to the alphabet;
//! * a position with `Forbidden` constraints permits the alphabet minus the
//!   union of those sets;
//! * an unconstrained position permits the whole alphabet.
//!
//! A position carrying both kinds is a conflict and is rejected by
//! [`ConstraintSet::validate`].

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

/// A single character of the input string.
///
/// Ordered and compared by Unicode code point.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Symbol(pub char);

impl Symbol {
    pub fn as_char(self) -> char {
        self.0
    }
}

impl From<char> for Symbol {
    fn from(c: char) -> Self {
        Symbol(c)
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// The distinct symbols of a string, strictly ascending.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Alphabet {
    symbols: Vec<Symbol>,
}

impl Alphabet {
    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn contains(&self, symbol: Symbol) -> bool {
        self.symbols.binary_search(&symbol).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Symbol> + '_ {
        self.symbols.iter().copied()
    }
}

/// Returns the sorted distinct symbols of `s`.
pub fn alphabet_of(s: &str) -> Alphabet {
    let set: BTreeSet<Symbol> = s.chars().map(Symbol).collect();
    Alphabet {
        symbols: set.into_iter().collect(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConstraintKind {
    Allowed,
    Forbidden,
}

impl fmt::Display for ConstraintKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConstraintKind::Allowed => f.write_str("allowed"),
            ConstraintKind::Forbidden => f.write_str("forbidden"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("constraint on position {position} has an empty symbol set")]
pub struct EmptySetError {
    pub position: usize,
}

/// One clause: at `position` (1-indexed) the symbol must, or must not, be one
/// of `symbols`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PositionConstraint {
    position: usize,
    kind: ConstraintKind,
    symbols: BTreeSet<Symbol>,
}

impl PositionConstraint {
    /// Fails only if `symbols` is empty. Position bounds are checked by
    /// [`ConstraintSet::validate`], since they depend on the input length.
    pub fn new<I>(position: usize, kind: ConstraintKind, symbols: I) -> Result<Self, EmptySetError>
    where
        I: IntoIterator,
        I::Item: Into<Symbol>,
    {
        let symbols: BTreeSet<Symbol> = symbols.into_iter().map(Into::into).collect();
        if symbols.is_empty() {
            return Err(EmptySetError { position });
        }
        Ok(PositionConstraint {
            position,
            kind,
            symbols,
        })
    }

    pub fn allowed<I>(position: usize, symbols: I) -> Result<Self, EmptySetError>
    where
        I: IntoIterator,
        I::Item: Into<Symbol>,
    {
        Self::new(position, ConstraintKind::Allowed, symbols)
    }

    pub fn forbidden<I>(position: usize, symbols: I) -> Result<Self, EmptySetError>
    where
        I: IntoIterator,
        I::Item: Into<Symbol>,
    {
        Self::new(position, ConstraintKind::Forbidden, symbols)
    }

    pub fn position(&self) -> usize {
        self.position
    }

    pub fn kind(&self) -> ConstraintKind {
        self.kind
    }

    pub fn symbols(&self) -> &BTreeSet<Symbol> {
        &self.symbols
    }
}

/// A problem found by [`ConstraintSet::validate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ValidationIssue {
    /// The position is outside `1..=n`.
    OutOfBounds { position: usize, len: usize },
    /// The position has both an allowed set and a forbidden set.
    Conflict { position: usize },
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValidationIssue::OutOfBounds { position, len } => write!(
                f,
                "position {position} is out of bounds (string has {len} position{})",
                if *len == 1 { "" } else { "s" }
            ),
            ValidationIssue::Conflict { position } => write!(
                f,
                "conflict at position {position}: a position may carry permitted symbols or \
                 forbidden symbols, not both"
            ),
        }
    }
}

/// Every problem in a constraint set, ordered by position (bounds errors first).
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ValidationReport {
    pub issues: Vec<ValidationIssue>,
}

impl ValidationReport {
    pub fn conflicts(&self) -> Vec<usize> {
        self.issues
            .iter()
            .filter_map(|i| match i {
                ValidationIssue::Conflict { position } => Some(*position),
                _ => None,
            })
            .collect()
    }

    pub fn out_of_bounds(&self) -> Vec<usize> {
        self.issues
            .iter()
            .filter_map(|i| match i {
                ValidationIssue::OutOfBounds { position, .. } => Some(*position),
                _ => None,
            })
            .collect()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, issue) in self.issues.iter().enumerate() {
            if i > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{issue}")?;
        }
        Ok(())
    }
}

/// The constraints attached to a string of length `len`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ConstraintSet {
    constraints: Vec<PositionConstraint>,
    len: usize,
}

impl ConstraintSet {
    pub fn new(len: usize) -> Self {
        ConstraintSet {
            constraints: Vec::new(),
            len,
        }
    }

    pub fn from_constraints(len: usize, constraints: Vec<PositionConstraint>) -> Self {
        ConstraintSet { constraints, len }
    }

    pub fn push(&mut self, constraint: PositionConstraint) {
        self.constraints.push(constraint);
    }

    /// Appends the clauses of `other`. Lengths must agree.
    pub fn extend(&mut self, other: ConstraintSet) {
        debug_assert_eq!(self.len, other.len);
        self.constraints.extend(other.constraints);
    }

    pub fn constraints(&self) -> &[PositionConstraint] {
        &self.constraints
    }

    /// Length of the string the constraints apply to.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.constraints.is_empty()
    }

    /// Checks bounds and allow/forbid conflicts, reporting every offending
    /// position once.
    pub fn validate(&self) -> Result<(), ValidationReport> {
        let mut out_of_bounds = BTreeSet::new();
        let mut allowed = BTreeSet::new();
        let mut forbidden = BTreeSet::new();
        for c in &self.constraints {
            if c.position == 0 || c.position > self.len {
                out_of_bounds.insert(c.position);
                continue;
            }
            match c.kind {
                ConstraintKind::Allowed => allowed.insert(c.position),
                ConstraintKind::Forbidden => forbidden.insert(c.position),
            };
        }
        let mut issues: Vec<ValidationIssue> = out_of_bounds
            .into_iter()
            .map(|position| ValidationIssue::OutOfBounds {
                position,
                len: self.len,
            })
            .collect();
        issues.extend(
            allowed
                .intersection(&forbidden)
                .map(|&position| ValidationIssue::Conflict { position }),
        );
        if issues.is_empty() {
            Ok(())
        } else {
            Err(ValidationReport { issues })
        }
    }

    /// Reduces the constraints to one permitted set per position.
    ///
    /// Allowed symbols missing from `alphabet` are dropped, which may leave a
    /// row empty. An empty row is legal and makes the instance unsatisfiable.
    pub fn normalize(&self, alphabet: &Alphabet) -> Result<PermittedMatrix, ValidationReport> {
        self.validate()?;
        let mut allowed: Vec<Option<BTreeSet<Symbol>>> = vec![None; self.len];
        let mut forbidden: Vec<Option<BTreeSet<Symbol>>> = vec![None; self.len];
        for c in &self.constraints {
            let slot = match c.kind {
                ConstraintKind::Allowed => &mut allowed[c.position - 1],
                ConstraintKind::Forbidden => &mut forbidden[c.position - 1],
            };
            slot.get_or_insert_with(BTreeSet::new)
                .extend(c.symbols.iter().copied());
        }
        let rows = allowed
            .into_iter()
            .zip(forbidden)
            .map(|(allow, forbid)| match (allow, forbid) {
                (Some(allow), _) => alphabet.iter().filter(|s| allow.contains(s)).collect(),
                (None, Some(forbid)) => alphabet.iter().filter(|s| !forbid.contains(s)).collect(),
                (None, None) => alphabet.iter().collect(),
            })
            .collect();
        Ok(PermittedMatrix { rows })
    }

    /// Allowed symbols that do not occur in `alphabet`, as `(position, symbol)`
    /// pairs in clause order.
    pub fn allowed_outside(&self, alphabet: &Alphabet) -> Vec<(usize, Symbol)> {
        self.constraints
            .iter()
            .filter(|c| c.kind == ConstraintKind::Allowed)
            .flat_map(|c| {
                c.symbols
                    .iter()
                    .filter(|s| !alphabet.contains(**s))
                    .map(move |s| (c.position, *s))
            })
            .collect()
    }
}

/// Permitted symbols per position; row `i` (0-based) describes position `i + 1`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PermittedMatrix {
    rows: Vec<BTreeSet<Symbol>>,
}

impl PermittedMatrix {
    pub fn from_rows(rows: Vec<BTreeSet<Symbol>>) -> Self {
        PermittedMatrix { rows }
    }

    /// Every position permits the whole alphabet of `s`.
    pub fn unconstrained(s: &str) -> Self {
        let alphabet = alphabet_of(s);
        let row: BTreeSet<Symbol> = alphabet.iter().collect();
        PermittedMatrix {
            rows: vec![row; s.chars().count()],
        }
    }

    pub fn rows(&self) -> &[BTreeSet<Symbol>] {
        &self.rows
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `true` when `symbol` is permitted at 1-indexed `position`.
    pub fn permits(&self, position: usize, symbol: Symbol) -> bool {
        position >= 1
            && self
                .rows
                .get(position - 1)
                .is_some_and(|row| row.contains(&symbol))
    }

    /// `true` when every character of `t` is permitted at its position and the
    /// lengths agree.
    pub fn accepts(&self, t: &str) -> bool {
        let mut n = 0;
        for (row, c) in self.rows.iter().zip(t.chars()) {
            if !row.contains(&Symbol(c)) {
                return false;
            }
            n += 1;
        }
        n == self.rows.len() && t.chars().count() == n
    }

    /// Re-expresses the matrix as one allowed clause per nonempty row. Empty
    /// rows cannot be written as a clause and are left out.
    pub fn to_constraints(&self) -> ConstraintSet {
        let constraints = self
            .rows
            .iter()
            .enumerate()
            .filter(|(_, row)| !row.is_empty())
            .map(|(i, row)| PositionConstraint {
                position: i + 1,
                kind: ConstraintKind::Allowed,
                symbols: row.clone(),
            })
            .collect();
        ConstraintSet {
            constraints,
            len: self.rows.len(),
        }
    }
}
