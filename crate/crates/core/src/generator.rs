//! Lazy, constraint-pruned enumeration of the distinct permutations of a string.
//!
//! The search walks a tree whose level `L` node holds a prefix of length
//! `L - 1` and the multiset of symbols not yet placed. A node branches once per
//! *distinct* remaining symbol that is permitted at position `L`, so repeated
//! symbols never produce repeated outputs and a prefix that breaks a constraint
//! is never extended. At level `n + 1` the prefix is complete and is emitted.
//!
//! The walk uses an explicit stack, so depth is bounded only by memory.

use std::fmt;

use thiserror::Error;

use crate::constraint::{PermittedMatrix, Symbol};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenerateError {
    #[error("permitted matrix has {rows} rows but the string has {len} symbols")]
    LengthMismatch { rows: usize, len: usize },
}

/// Remaining symbols with their multiplicities, in candidate order.
///
/// Candidate order is ascending by code point when the input is sorted, and
/// first-occurrence order otherwise. Entries whose count drops to zero keep
/// their slot so indices stay stable while the search backtracks.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultisetCounter {
    entries: Vec<(Symbol, usize)>,
    total: usize,
}

impl MultisetCounter {
    /// Counts the symbols of `s`. With `sorted`, entries are ascending.
    pub fn new(s: &str, sorted: bool) -> Self {
        let mut entries: Vec<(Symbol, usize)> = Vec::new();
        for c in s.chars() {
            match entries.iter_mut().find(|(sym, _)| sym.0 == c) {
                Some((_, n)) => *n += 1,
                None => entries.push((Symbol(c), 1)),
            }
        }
        if sorted {
            entries.sort_unstable_by_key(|&(sym, _)| sym);
        }
        let total = entries.iter().map(|&(_, n)| n).sum();
        MultisetCounter { entries, total }
    }

    /// Total number of symbols left to place.
    pub fn total(&self) -> usize {
        self.total
    }

    /// Symbols still available, with positive counts, in candidate order.
    pub fn iter(&self) -> impl Iterator<Item = (Symbol, usize)> + '_ {
        self.entries.iter().copied().filter(|&(_, n)| n > 0)
    }

    /// Number of distinct symbols still available.
    pub fn distinct(&self) -> usize {
        self.iter().count()
    }

    fn slots(&self) -> usize {
        self.entries.len()
    }

    fn symbol(&self, slot: usize) -> Symbol {
        self.entries[slot].0
    }

    fn available(&self, slot: usize) -> bool {
        self.entries[slot].1 > 0
    }

    fn take(&mut self, slot: usize) {
        self.entries[slot].1 -= 1;
        self.total -= 1;
    }

    fn put_back(&mut self, slot: usize) {
        self.entries[slot].1 += 1;
        self.total += 1;
    }
}

/// Counters collected while walking the search tree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct GenStats {
    /// Nodes visited, including the root and every completed permutation.
    pub calls: u64,
    /// Permutations produced.
    pub emitted: u64,
    /// Visited nodes below level `n + 1` with no eligible symbol.
    pub dead_ends: u64,
}

impl fmt::Display for GenStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "calls={} emitted={} dead_ends={}",
            self.calls, self.emitted, self.dead_ends
        )
    }
}

/// Counters plus whether the stream had been exhausted when they were read.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct StatsSnapshot {
    pub stats: GenStats,
    pub complete: bool,
}

impl StatsSnapshot {
    pub fn is_partial(&self) -> bool {
        !self.complete
    }
}

struct Frame {
    /// Next slot of the counter to try.
    cursor: usize,
    children: usize,
}

enum State {
    Fresh,
    Running,
    Done,
}

/// Iterator over the permutations satisfying a [`PermittedMatrix`].
///
/// Nothing is computed until the first call to `next`.
pub struct PermutationStream {
    remaining: MultisetCounter,
    /// `eligible[p][slot]`: counter slot `slot` is permitted at 0-based position `p`.
    eligible: Vec<Vec<bool>>,
    prefix: Vec<usize>,
    frames: Vec<Frame>,
    stats: GenStats,
    state: State,
}

impl fmt::Debug for PermutationStream {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PermutationStream")
            .field("len", &self.len())
            .field("stats", &self.stats)
            .finish_non_exhaustive()
    }
}

/// Starts a lazy enumeration of the permutations of `s` permitted by `pm`.
///
/// With `sort_input` the output is in ascending lexicographic order. Without
/// it, candidates at each level are tried in first-occurrence order of `s`.
pub fn generate(
    s: &str,
    pm: &PermittedMatrix,
    sort_input: bool,
) -> Result<PermutationStream, GenerateError> {
    let len = s.chars().count();
    if pm.len() != len {
        return Err(GenerateError::LengthMismatch {
            rows: pm.len(),
            len,
        });
    }
    let remaining = MultisetCounter::new(s, sort_input);
    let eligible = pm
        .rows()
        .iter()
        .map(|row| {
            (0..remaining.slots())
                .map(|slot| row.contains(&remaining.symbol(slot)))
                .collect()
        })
        .collect();
    Ok(PermutationStream {
        remaining,
        eligible,
        prefix: Vec::with_capacity(len),
        frames: Vec::with_capacity(len),
        stats: GenStats::default(),
        state: State::Fresh,
    })
}

/// Number of permutations [`generate`] would yield, without building them.
pub fn count(s: &str, pm: &PermittedMatrix) -> Result<u64, GenerateError> {
    Ok(generate(s, pm, true)?.count_remaining())
}

impl PermutationStream {
    /// Length of every permutation produced.
    pub fn len(&self) -> usize {
        self.eligible.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eligible.is_empty()
    }

    /// Current 1-indexed level: one more than the number of symbols placed.
    pub fn level(&self) -> usize {
        self.len() + 1 - self.remaining.total()
    }

    /// Counters so far, flagged partial until the stream is exhausted.
    pub fn stats(&self) -> StatsSnapshot {
        StatsSnapshot {
            stats: self.stats,
            complete: matches!(self.state, State::Done),
        }
    }

    /// Exhausts the stream without building strings and returns how many
    /// permutations were left.
    pub fn count_remaining(&mut self) -> u64 {
        let mut n = 0;
        while self.advance() {
            n += 1;
        }
        n
    }

    fn current(&self) -> String {
        self.prefix
            .iter()
            .map(|&slot| self.remaining.symbol(slot).0)
            .collect()
    }

    /// Enters the node for the current prefix. Returns `true` if it is a leaf.
    fn visit(&mut self) -> bool {
        self.stats.calls += 1;
        if self.prefix.len() == self.len() {
            self.stats.emitted += 1;
            true
        } else {
            self.frames.push(Frame {
                cursor: 0,
                children: 0,
            });
            false
        }
    }

    /// Moves to the next permutation, leaving it in `self.prefix`. Returns
    /// `false` once the tree is exhausted.
    fn advance(&mut self) -> bool {
        match self.state {
            State::Done => return false,
            State::Fresh => {
                self.state = State::Running;
                if self.visit() {
                    return true;
                }
            }
            State::Running => {
                // The previous call stopped on a leaf: undo its last placement.
                if let Some(slot) = self.prefix.pop() {
                    self.remaining.put_back(slot);
                }
            }
        }

        while let Some(frame) = self.frames.last_mut() {
            let position = self.prefix.len();
            let row = &self.eligible[position];
            let remaining = &self.remaining;
            let next = (frame.cursor..remaining.slots())
                .find(|&slot| row[slot] && remaining.available(slot));
            match next {
                Some(slot) => {
                    frame.cursor = slot + 1;
                    frame.children += 1;
                    self.remaining.take(slot);
                    self.prefix.push(slot);
                    if self.visit() {
                        return true;
                    }
                }
                None => {
                    if frame.children == 0 {
                        self.stats.dead_ends += 1;
                    }
                    self.frames.pop();
                    if let Some(slot) = self.prefix.pop() {
                        self.remaining.put_back(slot);
                    }
                }
            }
        }
        self.state = State::Done;
        false
    }
}

impl Iterator for PermutationStream {
    type Item = String;

    fn next(&mut self) -> Option<String> {
        if self.advance() {
            Some(self.current())
        } else {
            None
        }
    }
}

impl std::iter::FusedIterator for PermutationStream {}
