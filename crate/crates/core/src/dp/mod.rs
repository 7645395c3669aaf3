//! The dynamic program over local configurations inside components and
//! subtree configurations at component roots and critical vertices.
//!
//! Tables are keyed by canonical lists: local lists are sorted `(y, kind)`
//! pairs, subtree lists are sorted `(y, count)` pairs with positive counts.

mod local;
mod solve;
mod subtree;

use std::collections::BTreeMap;

use crate::instance::VertexId;
use crate::rational::Rational;
use crate::structure::StructureError;

pub use local::{local_min, local_table, local_value_direct, span_cost};
pub use solve::{solve, solve_with, SolveOutput, SolveStats};
pub use subtree::{candidate_sets, combine_root, merge_lists, round_list, round_up, scan_critical};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Kind {
    Ending,
    Passing,
}

pub type LocalKey = Vec<(Rational, Kind)>;
pub type SubtreeKey = Vec<(Rational, u32)>;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum DpError {
    #[error(transparent)]
    Structure(#[from] StructureError),
    #[error("cap exceeded: {what} > {limit}")]
    Cap { what: &'static str, limit: usize },
    #[error("internal inconsistency: {0}")]
    Internal(String),
}

/// Hard limits; exceeding any of them is an error, never a truncation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Caps {
    /// Size of the value set `Y`.
    pub y: usize,
    /// Length of any configuration list.
    pub cfg: usize,
    /// Entries of any single table.
    pub entries: usize,
    /// Candidate value sets `X` per critical vertex.
    pub x_budget: usize,
    /// Parts of `Q_c` per component.
    pub parts: usize,
    /// Draw the candidates `X` from all of `Y` instead of the realizable child values.
    pub exhaustive_x: bool,
}

impl Default for Caps {
    fn default() -> Self {
        Caps {
            y: crate::structure::DEFAULT_Y_CAP,
            cfg: 12,
            entries: 2_000_000,
            x_budget: 64,
            parts: 16,
            exhaustive_x: false,
        }
    }
}

/// Drops zero counts and returns the sorted list.
pub fn canon(counts: BTreeMap<Rational, u32>) -> SubtreeKey {
    counts.into_iter().filter(|(_, n)| *n > 0).collect()
}

/// Number of subtours in a subtree list.
pub fn list_count(key: &SubtreeKey) -> u32 {
    key.iter().map(|(_, n)| n).sum()
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LocalEntry {
    pub cost: Rational,
    /// Part mask of each list entry, aligned with the key.
    pub masks: Vec<usize>,
}

#[derive(Debug, Clone)]
pub struct LocalTable {
    pub component: usize,
    pub entries: BTreeMap<LocalKey, LocalEntry>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RootTrace {
    Lift(LocalKey),
    /// `assoc` pairs the index of a passing entry of `local` with the value
    /// of the exit subtour it absorbs.
    Combine {
        local: LocalKey,
        exit: SubtreeKey,
        assoc: Vec<(usize, Rational)>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubtreeEntry {
    pub cost: Rational,
    pub trace: RootTrace,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepEntry {
    pub cost: Rational,
    pub prev: SubtreeKey,
    /// Unrounded list taken at the child.
    pub child: SubtreeKey,
    /// `(accumulated value, rounded child value, count)` merges.
    pub assoc: Vec<(Rational, Rational, u32)>,
}

/// Tables at one critical vertex, one scan per candidate value set.
#[derive(Debug, Clone)]
pub struct CriticalTable {
    pub vertex: VertexId,
    pub children: Vec<usize>,
    pub xs: Vec<Vec<Rational>>,
    pub scans: Vec<Vec<BTreeMap<SubtreeKey, StepEntry>>>,
    /// `g(z, A)` with the index of the value set that achieves it.
    pub best: BTreeMap<SubtreeKey, (Rational, usize)>,
}

impl CriticalTable {
    pub fn costs(&self) -> BTreeMap<SubtreeKey, Rational> {
        self.best
            .iter()
            .map(|(k, (c, _))| (k.clone(), c.clone()))
            .collect()
    }
}
