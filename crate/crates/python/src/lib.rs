//! Python bindings for `permgen`.
//!
//! ```python
//! import permgen_py as pg
//!
//! cs = pg.ConstraintSet.parse("pos 1 in {a,b}\npos 3 not in {c}", 5)
//! m = cs.normalize("abacb")
//! stream = pg.generate("abacb", m)
//! first = next(stream)        # "aabbc"
//! rest = list(stream)
//! stream.stats().calls
//! ```

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use permgen::{oracle, Symbol};

create_exception!(
    permgen_py,
    ConstraintParseError,
    PyValueError,
    "Constraint text is malformed"
);
create_exception!(
    permgen_py,
    ConstraintConflictError,
    PyValueError,
    "Constraints are out of bounds or conflict"
);

fn parse_error(e: permgen::ParseError) -> PyErr {
    ConstraintParseError::new_err((e.to_string(), e.line, e.column))
}

fn conflict_error(e: permgen::ValidationReport) -> PyErr {
    ConstraintConflictError::new_err(e.to_string())
}

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn single_char(s: &str) -> PyResult<Symbol> {
    let mut chars = s.chars();
    match (chars.next(), chars.next()) {
        (Some(c), None) => Ok(Symbol(c)),
        _ => Err(PyValueError::new_err(format!(
            "expected a single character, got {s:?}"
        ))),
    }
}

/// Sorted distinct characters of `s`.
#[pyfunction]
fn alphabet_of(s: &str) -> Vec<String> {
    permgen::alphabet_of(s)
        .iter()
        .map(|c| c.to_string())
        .collect()
}

#[pyclass(module = "permgen_py", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct ConstraintSet {
    inner: permgen::ConstraintSet,
}

#[pymethods]
impl ConstraintSet {
    #[new]
    fn new(length: usize) -> Self {
        ConstraintSet {
            inner: permgen::ConstraintSet::new(length),
        }
    }

    /// Parses constraint text for a string of the given length.
    #[staticmethod]
    fn parse(text: &str, length: usize) -> PyResult<Self> {
        permgen::parse(text, length)
            .map(|inner| ConstraintSet { inner })
            .map_err(parse_error)
    }

    /// Returns a copy with one more clause. `kind` is "in" or "not in".
    fn with_clause(&self, position: usize, kind: &str, symbols: Vec<String>) -> PyResult<Self> {
        let kind = match kind {
            "in" => permgen::ConstraintKind::Allowed,
            "not in" => permgen::ConstraintKind::Forbidden,
            other => {
                return Err(PyValueError::new_err(format!(
                    "kind must be \"in\" or \"not in\", got {other:?}"
                )))
            }
        };
        let symbols = symbols
            .iter()
            .map(|s| single_char(s))
            .collect::<PyResult<Vec<_>>>()?;
        let clause =
            permgen::PositionConstraint::new(position, kind, symbols).map_err(value_error)?;
        let mut inner = self.inner.clone();
        inner.push(clause);
        Ok(ConstraintSet { inner })
    }

    fn render(&self) -> String {
        permgen::render(&self.inner)
    }

    /// Raises `ConstraintConflictError` on bounds errors or allow/forbid conflicts.
    fn validate(&self) -> PyResult<()> {
        self.inner.validate().map_err(conflict_error)
    }

    /// Permitted matrix for the alphabet of `s`.
    fn normalize(&self, s: &str) -> PyResult<PermittedMatrix> {
        if s.chars().count() != self.inner.len() {
            return Err(PyValueError::new_err(format!(
                "constraints are for length {}, string has length {}",
                self.inner.len(),
                s.chars().count()
            )));
        }
        self.inner
            .normalize(&permgen::alphabet_of(s))
            .map(|inner| PermittedMatrix { inner })
            .map_err(conflict_error)
    }

    #[getter]
    fn length(&self) -> usize {
        self.inner.len()
    }

    fn __len__(&self) -> usize {
        self.inner.constraints().len()
    }

    fn __repr__(&self) -> String {
        format!(
            "ConstraintSet.parse({:?}, {})",
            self.render(),
            self.inner.len()
        )
    }
}

#[pyclass(module = "permgen_py", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PermittedMatrix {
    inner: permgen::PermittedMatrix,
}

#[pymethods]
impl PermittedMatrix {
    /// Each row is a string of permitted characters.
    #[new]
    fn new(rows: Vec<String>) -> Self {
        let rows = rows
            .iter()
            .map(|r| r.chars().map(Symbol).collect())
            .collect();
        PermittedMatrix {
            inner: permgen::PermittedMatrix::from_rows(rows),
        }
    }

    #[staticmethod]
    fn unconstrained(s: &str) -> Self {
        PermittedMatrix {
            inner: permgen::PermittedMatrix::unconstrained(s),
        }
    }

    /// Rows as sorted strings.
    #[getter]
    fn rows(&self) -> Vec<String> {
        self.inner
            .rows()
            .iter()
            .map(|r| r.iter().map(|s| s.0).collect())
            .collect()
    }

    fn accepts(&self, t: &str) -> bool {
        self.inner.accepts(t)
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!("PermittedMatrix({:?})", self.rows())
    }
}

#[pyclass(module = "permgen_py", frozen, get_all, skip_from_py_object)]
#[derive(Clone)]
struct GenStats {
    calls: u64,
    emitted: u64,
    dead_ends: u64,
    complete: bool,
}

#[pymethods]
impl GenStats {
    fn __repr__(&self) -> String {
        format!(
            "GenStats(calls={}, emitted={}, dead_ends={}, complete={})",
            self.calls,
            self.emitted,
            self.dead_ends,
            if self.complete { "True" } else { "False" },
        )
    }
}

#[pyclass(module = "permgen_py")]
struct PermutationStream {
    inner: permgen::PermutationStream,
}

#[pymethods]
impl PermutationStream {
    fn __iter__(slf: PyRef<'_, Self>) -> PyRef<'_, Self> {
        slf
    }

    fn __next__(&mut self) -> Option<String> {
        self.inner.next()
    }

    /// Counters so far; `complete` is false until the stream is exhausted.
    fn stats(&self) -> GenStats {
        let snap = self.inner.stats();
        GenStats {
            calls: snap.stats.calls,
            emitted: snap.stats.emitted,
            dead_ends: snap.stats.dead_ends,
            complete: snap.complete,
        }
    }

    /// Exhausts the stream without building strings.
    fn count_remaining(&mut self) -> u64 {
        self.inner.count_remaining()
    }
}

fn matrix_or_unconstrained(s: &str, matrix: Option<&PermittedMatrix>) -> permgen::PermittedMatrix {
    match matrix {
        Some(m) => m.inner.clone(),
        None => permgen::PermittedMatrix::unconstrained(s),
    }
}

/// Lazily enumerates the permutations of `s` allowed by `matrix`
/// (every permutation when `matrix` is None).
#[pyfunction]
#[pyo3(signature = (s, matrix=None, sort=true))]
fn generate(s: &str, matrix: Option<&PermittedMatrix>, sort: bool) -> PyResult<PermutationStream> {
    let pm = matrix_or_unconstrained(s, matrix);
    permgen::generate(s, &pm, sort)
        .map(|inner| PermutationStream { inner })
        .map_err(value_error)
}

/// Parses `constraints`, normalizes them and returns the stream.
#[pyfunction]
#[pyo3(signature = (s, constraints="", sort=true))]
fn permutations(s: &str, constraints: &str, sort: bool) -> PyResult<PermutationStream> {
    let cs = permgen::parse(constraints, s.chars().count()).map_err(parse_error)?;
    let pm = cs
        .normalize(&permgen::alphabet_of(s))
        .map_err(conflict_error)?;
    permgen::generate(s, &pm, sort)
        .map(|inner| PermutationStream { inner })
        .map_err(value_error)
}

#[pyfunction]
#[pyo3(signature = (s, matrix=None))]
fn count(s: &str, matrix: Option<&PermittedMatrix>) -> PyResult<u64> {
    permgen::count(s, &matrix_or_unconstrained(s, matrix)).map_err(value_error)
}

/// Every distinct rearrangement of `s`, ascending (brute force).
#[pyfunction]
fn distinct_permutations(s: &str) -> Vec<String> {
    oracle::distinct_permutations(s)
}

/// Brute-force reference: `(outputs, total_distinct)`.
#[pyfunction]
#[pyo3(signature = (s, matrix=None))]
fn oracle_solve(s: &str, matrix: Option<&PermittedMatrix>) -> PyResult<(Vec<String>, usize)> {
    let r = oracle::solve(s, &matrix_or_unconstrained(s, matrix)).map_err(value_error)?;
    Ok((r.outputs, r.total_distinct))
}

#[pymodule]
fn permgen_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    let py = m.py();
    m.add_class::<ConstraintSet>()?;
    m.add_class::<PermittedMatrix>()?;
    m.add_class::<PermutationStream>()?;
    m.add_class::<GenStats>()?;
    m.add(
        "ConstraintParseError",
        py.get_type::<ConstraintParseError>(),
    )?;
    m.add(
        "ConstraintConflictError",
        py.get_type::<ConstraintConflictError>(),
    )?;
    m.add_function(wrap_pyfunction!(alphabet_of, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(permutations, m)?)?;
    m.add_function(wrap_pyfunction!(count, m)?)?;
    m.add_function(wrap_pyfunction!(distinct_permutations, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_solve, m)?)?;
    Ok(())
}
