//! Simplification of the subtours of one component so that every cell is
//! served by a single subtour, at a bounded increase in cost.

mod simplify;

use std::collections::{BTreeMap, BTreeSet};

use crate::decompose::{Hierarchy, Region};
use crate::instance::{Instance, Solution, VertexId};
use crate::rational::Rational;

pub use simplify::{local_simplify, nice_edges, reconnect_removed, threshold_cell};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LocalError {
    #[error("{count} subtours exceed the limit {limit}")]
    TooManySubtours { count: usize, limit: Rational },
    #[error("terminal {0} is not served by any subtour")]
    Uncovered(VertexId),
    #[error("terminal {0} is served by several subtours")]
    DoublyServed(VertexId),
    #[error("subtour {index}: {reason}")]
    Malformed { index: usize, reason: String },
    #[error("internal component needs at least one passing subtour")]
    NoPassingSubtour,
    #[error("piece at vertex {0} cannot reach the component root through nice edges")]
    Unreachable(VertexId),
    #[error("subtour has no vertex in cluster {0}")]
    NotInCluster(usize),
}

/// A closed walk from the component root, stored as the set of edges it
/// traverses (each twice) and the terminals it serves.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Subtour {
    pub edges: BTreeSet<VertexId>,
    pub terminals: BTreeSet<VertexId>,
}

impl Subtour {
    /// Union of the root paths of `terminals` inside the component.
    pub fn spanning(
        inst: &Instance,
        root: VertexId,
        terminals: impl IntoIterator<Item = VertexId>,
    ) -> Self {
        let terminals: BTreeSet<VertexId> = terminals.into_iter().collect();
        let mut edges = BTreeSet::new();
        for &t in &terminals {
            edges.extend(inst.path_edges(root, t));
        }
        Subtour { edges, terminals }
    }

    pub fn cost(&self, inst: &Instance) -> Rational {
        Rational::from_integer(2)
            * self
                .edges
                .iter()
                .map(|&e| inst.weight(e).clone())
                .sum::<Rational>()
    }

    pub fn demand(&self, inst: &Instance) -> Rational {
        self.terminals.iter().map(|&t| inst.demand_or_zero(t)).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty() && self.terminals.is_empty()
    }

    pub fn visits(&self, c: &Region, v: VertexId) -> bool {
        v == c.root || self.edges.contains(&v)
    }

    pub fn is_passing(&self, c: &Region) -> bool {
        c.exit.is_some_and(|e| self.visits(c, e))
    }
}

pub fn total_cost(inst: &Instance, subtours: &[Subtour]) -> Rational {
    subtours.iter().map(|t| t.cost(inst)).sum()
}

/// Everything the construction exposes for checking its guarantees.
#[derive(Debug, Clone, Default)]
pub struct LocalDiagnostics {
    /// Threshold cell chosen in each passing cluster that had an ending part.
    pub threshold_cells: BTreeMap<usize, usize>,
    /// Parts removed while correcting capacities.
    pub pieces: Vec<Subtour>,
    pub nice_edges: BTreeSet<VertexId>,
    /// Cost added when extending ending parts along threshold spines.
    pub w2: Rational,
    /// Cost of the extra subtour beyond the pieces it carries.
    pub w5: Rational,
    /// Sum of threshold-cell spine costs.
    pub threshold_spine_cost: Rational,
    /// Subtour sets after each step: input, combined ending parts, extended,
    /// combined passing parts, capacity-corrected.
    pub stages: Vec<Vec<Subtour>>,
}

#[derive(Debug, Clone)]
pub struct LocalResult {
    pub s_star: Vec<Subtour>,
    pub bar_t: Subtour,
    pub diag: LocalDiagnostics,
}

/// Lookup tables for the clusters and cells of one component.
pub(crate) struct ComponentView<'a> {
    pub inst: &'a Instance,
    pub h: &'a Hierarchy,
    pub comp: &'a Region,
    pub clusters: Vec<usize>,
    pub cluster_of_edge: BTreeMap<VertexId, usize>,
    pub cell_of_vertex: BTreeMap<(usize, VertexId), usize>,
}

impl<'a> ComponentView<'a> {
    pub fn new(inst: &'a Instance, h: &'a Hierarchy, c: usize) -> Self {
        let clusters = h.clusters_of_component(c);
        let mut cluster_of_edge = BTreeMap::new();
        let mut cell_of_vertex = BTreeMap::new();
        for &x in &clusters {
            for &e in &h.clusters[x].edges {
                cluster_of_edge.insert(e, x);
            }
            for &z in &h.cells_of[x] {
                for v in h.cells[z].vertices() {
                    cell_of_vertex.insert((x, v), z);
                }
            }
        }
        ComponentView {
            inst,
            h,
            comp: &h.components[c],
            clusters,
            cluster_of_edge,
            cell_of_vertex,
        }
    }

    pub fn terminals(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.comp
            .edges
            .iter()
            .copied()
            .filter(|&v| self.inst.is_terminal(v))
    }

    /// Cell holding terminal `t`, taken inside the cluster owning the edge above `t`.
    pub fn cell_of_terminal(&self, t: VertexId) -> usize {
        let x = self.cluster_of_edge[&t];
        self.cell_of_vertex[&(x, t)]
    }
}

/// Subtours induced in component `c` by the tours of a solution on the same tree.
pub fn restrict_solution(inst: &Instance, h: &Hierarchy, c: usize, sol: &Solution) -> Vec<Subtour> {
    let comp = &h.components[c];
    let mut out = Vec::new();
    for tour in &sol.tours {
        let mut edges = BTreeSet::new();
        for &t in &tour.terminals {
            let mut v = t;
            while v != inst.root() {
                if comp.edges.contains(&v) {
                    edges.insert(v);
                }
                v = inst.parent(v).unwrap();
            }
        }
        if edges.is_empty() {
            continue;
        }
        let terminals = tour
            .terminals
            .iter()
            .copied()
            .filter(|t| comp.edges.contains(t))
            .collect();
        out.push(Subtour { edges, terminals });
    }
    out
}

/// Human-readable summary of a run, one fact per line.
pub fn describe(inst: &Instance, s_c: &[Subtour], r: &LocalResult) -> String {
    use std::fmt::Write;
    let mut out = String::new();
    let before = total_cost(inst, s_c);
    let after = total_cost(inst, &r.s_star) + r.bar_t.cost(inst);
    writeln!(out, "subtours {} cost {} -> {}", s_c.len(), before, after).unwrap();
    for (x, z) in &r.diag.threshold_cells {
        writeln!(out, "threshold cluster {x} cell {z}").unwrap();
    }
    writeln!(out, "threshold spine cost {}", r.diag.threshold_spine_cost).unwrap();
    writeln!(out, "w2 {} w5 {}", r.diag.w2, r.diag.w5).unwrap();
    writeln!(out, "nice edges {:?}", r.diag.nice_edges).unwrap();
    for (i, piece) in r.diag.pieces.iter().enumerate() {
        writeln!(
            out,
            "piece {i} demand {} terminals {:?}",
            piece.demand(inst),
            piece.terminals
        )
        .unwrap();
    }
    writeln!(
        out,
        "extra subtour demand {} cost {}",
        r.bar_t.demand(inst),
        r.bar_t.cost(inst)
    )
    .unwrap();
    out
}
