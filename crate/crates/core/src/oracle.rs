//! Brute-force reference: list every distinct permutation, then filter.
//!
//! Deliberately shares no code with [`crate::generator`]. Permutations come
//! from repeatedly stepping the sorted string to its next lexicographic
//! rearrangement, which visits each distinct arrangement exactly once.

use thiserror::Error;

use crate::constraint::PermittedMatrix;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("permutation {index} has {found} symbols but the matrix has {expected} rows")]
pub struct FilterLengthError {
    pub index: usize,
    pub found: usize,
    pub expected: usize,
}

/// Filtered permutations together with the size of the unfiltered pool.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OracleResult {
    pub outputs: Vec<String>,
    pub total_distinct: usize,
}

/// Rearranges `v` into the next greater permutation. Returns `false` (leaving
/// `v` untouched) when `v` is already the greatest.
fn next_permutation<T: Ord>(v: &mut [T]) -> bool {
    if v.len() < 2 {
        return false;
    }
    let mut i = v.len() - 1;
    while i > 0 && v[i - 1] >= v[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = v.len() - 1;
    while v[j] <= v[i - 1] {
        j -= 1;
    }
    v.swap(i - 1, j);
    v[i..].reverse();
    true
}

/// Every distinct rearrangement of `s`, ascending.
pub fn distinct_permutations(s: &str) -> Vec<String> {
    let mut chars: Vec<char> = s.chars().collect();
    chars.sort_unstable();
    let mut out = vec![chars.iter().collect::<String>()];
    while next_permutation(&mut chars) {
        out.push(chars.iter().collect());
    }
    out
}

/// Keeps the strings whose every character is permitted at its position.
pub fn filter(perms: &[String], pm: &PermittedMatrix) -> Result<OracleResult, FilterLengthError> {
    let mut outputs = Vec::new();
    for (index, t) in perms.iter().enumerate() {
        let found = t.chars().count();
        if found != pm.len() {
            return Err(FilterLengthError {
                index,
                found,
                expected: pm.len(),
            });
        }
        if t.chars()
            .zip(pm.rows())
            .all(|(c, row)| row.iter().any(|s| s.0 == c))
        {
            outputs.push(t.clone());
        }
    }
    Ok(OracleResult {
        outputs,
        total_distinct: perms.len(),
    })
}

/// Enumerates and filters in one step.
pub fn solve(s: &str, pm: &PermittedMatrix) -> Result<OracleResult, FilterLengthError> {
    filter(&distinct_permutations(s), pm)
}
