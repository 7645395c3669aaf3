//! Rooted, edge-weighted trees with terminal demands.
//!
//! Vertices are dense ids `0..n`. Each non-root vertex stores the weight of
//! the edge to its parent, so an edge is identified by its child endpoint.

mod generate;
mod io;
mod preprocess;
mod solution;

use std::collections::BTreeMap;

pub use generate::{
    gen_binpacking_path, gen_binpacking_star, gen_caterpillar, gen_random, random_demands,
    DemandDistribution, RandomSpec,
};
pub use io::{parse_instance, write_instance};
pub use preprocess::{preprocess, Preprocessed};
pub use solution::{
    check_bounded_distance, check_feasible, parse_solution, tour_cost, write_solution,
    FeasibilityReport, Solution, Tour, Violation,
};

use crate::rational::Rational;

pub type VertexId = usize;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum InstanceError {
    #[error("line {line}: {msg}")]
    Syntax { line: usize, msg: String },
    #[error("vertex {vertex}: demand {value} outside (0,1]")]
    DemandOutOfRange { vertex: VertexId, value: Rational },
    #[error("vertex {vertex}: negative weight {value}")]
    NegativeWeight { vertex: VertexId, value: Rational },
    #[error("invalid tree structure: {0}")]
    Structure(String),
    #[error("unknown vertex id {0}")]
    UnknownVertex(VertexId),
    #[error("{0}")]
    Invalid(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Instance {
    parent: Vec<Option<VertexId>>,
    weight: Vec<Rational>,
    demand: Vec<Option<Rational>>,
    root: VertexId,
    children: Vec<Vec<VertexId>>,
    dist: Vec<Rational>,
    depth: Vec<usize>,
    preorder: Vec<VertexId>,
    tin: Vec<usize>,
    tout: Vec<usize>,
}

impl Instance {
    /// Builds and validates an instance. `weight[v]` is the weight of the edge
    /// from `v` to its parent and must be zero for the root.
    pub fn new(
        parent: Vec<Option<VertexId>>,
        weight: Vec<Rational>,
        demands: BTreeMap<VertexId, Rational>,
    ) -> Result<Self, InstanceError> {
        let n = parent.len();
        if n == 0 {
            return Err(InstanceError::Structure("instance has no vertices".into()));
        }
        if weight.len() != n {
            return Err(InstanceError::Structure(
                "weight table length differs from vertex count".into(),
            ));
        }
        let roots: Vec<VertexId> = (0..n).filter(|&v| parent[v].is_none()).collect();
        if roots.len() != 1 {
            return Err(InstanceError::Structure(format!(
                "expected exactly one root, found {}",
                roots.len()
            )));
        }
        let root = roots[0];
        for (v, w) in weight.iter().enumerate() {
            if w.is_negative() {
                return Err(InstanceError::NegativeWeight {
                    vertex: v,
                    value: w.clone(),
                });
            }
        }
        if !weight[root].is_zero() {
            return Err(InstanceError::Structure("root must have weight 0".into()));
        }
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = *p {
                if p >= n {
                    return Err(InstanceError::UnknownVertex(p));
                }
                if p == v {
                    return Err(InstanceError::Structure(format!(
                        "vertex {v} is its own parent"
                    )));
                }
                children[p].push(v);
            }
        }
        let mut demand = vec![None; n];
        for (v, d) in demands {
            if v >= n {
                return Err(InstanceError::UnknownVertex(v));
            }
            if !d.is_positive() || d > Rational::one() {
                return Err(InstanceError::DemandOutOfRange {
                    vertex: v,
                    value: d,
                });
            }
            demand[v] = Some(d);
        }

        let mut dist = vec![Rational::zero(); n];
        let mut depth = vec![0usize; n];
        let mut preorder = Vec::with_capacity(n);
        let mut tin = vec![0usize; n];
        let mut tout = vec![0usize; n];
        let mut seen = vec![false; n];
        // iterative dfs; children visited in increasing id order
        let mut stack: Vec<(VertexId, usize)> = vec![(root, 0)];
        seen[root] = true;
        tin[root] = 0;
        preorder.push(root);
        while let Some(top) = stack.last_mut() {
            let (v, next) = *top;
            if next < children[v].len() {
                top.1 += 1;
                let c = children[v][next];
                if seen[c] {
                    return Err(InstanceError::Structure(format!(
                        "vertex {c} reached twice"
                    )));
                }
                seen[c] = true;
                dist[c] = &dist[v] + &weight[c];
                depth[c] = depth[v] + 1;
                tin[c] = preorder.len();
                preorder.push(c);
                stack.push((c, 0));
            } else {
                tout[v] = preorder.len();
                stack.pop();
            }
        }
        if preorder.len() != n {
            let missing = (0..n).find(|&v| !seen[v]).unwrap_or(0);
            return Err(InstanceError::Structure(format!(
                "vertex {missing} is not connected to the root (cycle or detached subtree)"
            )));
        }
        Ok(Instance {
            parent,
            weight,
            demand,
            root,
            children,
            dist,
            depth,
            preorder,
            tin,
            tout,
        })
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> VertexId {
        self.root
    }

    pub fn parent(&self, v: VertexId) -> Option<VertexId> {
        self.parent[v]
    }

    pub fn parents(&self) -> &[Option<VertexId>] {
        &self.parent
    }

    /// Weight of the edge between `v` and its parent.
    pub fn weight(&self, v: VertexId) -> &Rational {
        &self.weight[v]
    }

    pub fn weights(&self) -> &[Rational] {
        &self.weight
    }

    pub fn children(&self, v: VertexId) -> &[VertexId] {
        &self.children[v]
    }

    pub fn is_leaf(&self, v: VertexId) -> bool {
        self.children[v].is_empty()
    }

    /// Distance from the depot.
    pub fn dist(&self, v: VertexId) -> &Rational {
        &self.dist[v]
    }

    pub fn depth(&self, v: VertexId) -> usize {
        self.depth[v]
    }

    pub fn demand(&self, v: VertexId) -> Option<&Rational> {
        self.demand[v].as_ref()
    }

    pub fn demand_or_zero(&self, v: VertexId) -> Rational {
        self.demand[v].clone().unwrap_or_else(Rational::zero)
    }

    pub fn is_terminal(&self, v: VertexId) -> bool {
        self.demand[v].is_some()
    }

    pub fn terminals(&self) -> impl Iterator<Item = VertexId> + '_ {
        (0..self.len()).filter(move |&v| self.demand[v].is_some())
    }

    pub fn demands(&self) -> BTreeMap<VertexId, Rational> {
        self.terminals()
            .map(|v| (v, self.demand[v].clone().unwrap()))
            .collect()
    }

    pub fn num_terminals(&self) -> usize {
        self.terminals().count()
    }

    pub fn total_demand(&self) -> Rational {
        self.demand.iter().flatten().sum()
    }

    /// Vertices in depth-first preorder, children by increasing id.
    pub fn preorder(&self) -> &[VertexId] {
        &self.preorder
    }

    /// True when `a` is an ancestor of `b` (a vertex is its own ancestor).
    pub fn is_ancestor(&self, a: VertexId, b: VertexId) -> bool {
        self.tin[a] <= self.tin[b] && self.tout[b] <= self.tout[a]
    }

    /// Vertices from `v` up to and including the root.
    pub fn path_to_root(&self, v: VertexId) -> Vec<VertexId> {
        let mut path = vec![v];
        let mut cur = v;
        while let Some(p) = self.parent[cur] {
            path.push(p);
            cur = p;
        }
        path
    }

    /// Child endpoints of the edges on the path from `ancestor` down to `v`,
    /// ordered top-down. `ancestor` must be an ancestor of `v`.
    pub fn path_edges(&self, ancestor: VertexId, v: VertexId) -> Vec<VertexId> {
        debug_assert!(self.is_ancestor(ancestor, v));
        let mut edges = Vec::new();
        let mut cur = v;
        while cur != ancestor {
            edges.push(cur);
            cur = self.parent[cur].expect("ancestor not found on root path");
        }
        edges.reverse();
        edges
    }

    pub fn lca(&self, mut a: VertexId, mut b: VertexId) -> VertexId {
        while self.depth[a] > self.depth[b] {
            a = self.parent[a].unwrap();
        }
        while self.depth[b] > self.depth[a] {
            b = self.parent[b].unwrap();
        }
        while a != b {
            a = self.parent[a].unwrap();
            b = self.parent[b].unwrap();
        }
        a
    }

    pub fn tree_distance(&self, a: VertexId, b: VertexId) -> Rational {
        let l = self.lca(a, b);
        &self.dist[a] + &self.dist[b] - &self.dist[l] - &self.dist[l]
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<(), InstanceError> {
        if v < self.len() {
            Ok(())
        } else {
            Err(InstanceError::UnknownVertex(v))
        }
    }

    /// Every non-root internal vertex has two children and the terminals are
    /// exactly the non-root leaves.
    pub fn is_normalized(&self) -> bool {
        (0..self.len()).all(|v| {
            if v == self.root {
                return !self.is_terminal(v) && self.children[v].len() <= 2;
            }
            match self.children[v].len() {
                0 => self.is_terminal(v),
                2 => !self.is_terminal(v),
                _ => false,
            }
        })
    }

    /// Depot distances of the nearest and farthest terminals.
    pub fn terminal_distance_range(&self) -> Option<(Rational, Rational)> {
        let mut it = self.terminals().map(|v| self.dist[v].clone());
        let first = it.next()?;
        Some(it.fold((first.clone(), first), |(lo, hi), d| {
            (lo.min(d.clone()), hi.max(d))
        }))
    }
}
