//! Four-level edge partition of a normalized tree: components, blocks,
//! clusters and cells.

mod check;
mod partition;

use std::collections::BTreeSet;
use std::fmt::Write;

use crate::instance::{Instance, VertexId};
use crate::params::Params;
use crate::rational::Rational;

pub use check::{check_hierarchy, count_check, CountReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RegionKind {
    Component,
    Block,
    Cluster,
    Cell,
}

/// A connected piece of the tree with a root, at most one exit and the
/// edges it owns (each edge named by its child endpoint).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Region {
    pub kind: RegionKind,
    pub root: VertexId,
    pub exit: Option<VertexId>,
    pub edges: BTreeSet<VertexId>,
    /// Vertices from `root` to `exit`; empty for ending regions.
    pub spine: Vec<VertexId>,
    /// Total demand of the terminals strictly inside (not root, not exit).
    pub demand: Rational,
    /// Index of the enclosing region one level up.
    pub parent: Option<usize>,
}

impl Region {
    fn build(
        inst: &Instance,
        kind: RegionKind,
        root: VertexId,
        exit: Option<VertexId>,
        edges: BTreeSet<VertexId>,
        parent: Option<usize>,
    ) -> Self {
        let spine = match exit {
            Some(e) => {
                let mut path = vec![root];
                path.extend(inst.path_edges(root, e));
                path
            }
            None => Vec::new(),
        };
        let demand = edges
            .iter()
            .chain(std::iter::once(&root))
            .filter(|&&v| v != root && Some(v) != exit)
            .map(|&v| inst.demand_or_zero(v))
            .sum();
        Region {
            kind,
            root,
            exit,
            edges,
            spine,
            demand,
            parent,
        }
    }

    pub fn is_passing(&self) -> bool {
        self.exit.is_some()
    }

    pub fn vertices(&self) -> BTreeSet<VertexId> {
        let mut vs = self.edges.clone();
        vs.insert(self.root);
        vs.extend(self.exit);
        vs
    }

    pub fn contains_vertex(&self, v: VertexId) -> bool {
        v == self.root || self.exit == Some(v) || self.edges.contains(&v)
    }

    pub fn is_strictly_inside(&self, v: VertexId) -> bool {
        v != self.root && self.exit != Some(v) && self.edges.contains(&v)
    }

    /// Terminals strictly inside the region.
    pub fn inner_terminals<'a>(
        &'a self,
        inst: &'a Instance,
    ) -> impl Iterator<Item = VertexId> + 'a {
        self.edges
            .iter()
            .copied()
            .filter(move |&v| inst.is_terminal(v) && self.is_strictly_inside(v))
    }

    /// Spine edges (child endpoints) from root to exit.
    pub fn spine_edges(&self) -> &[VertexId] {
        if self.spine.is_empty() {
            &[]
        } else {
            &self.spine[1..]
        }
    }

    pub fn spine_cost(&self, inst: &Instance) -> Rational {
        self.spine_edges()
            .iter()
            .map(|&v| inst.weight(v).clone())
            .sum()
    }
}

/// The complete decomposition with parent/child indices between levels.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub components: Vec<Region>,
    pub blocks: Vec<Region>,
    pub clusters: Vec<Region>,
    pub cells: Vec<Region>,
    pub blocks_of: Vec<Vec<usize>>,
    pub clusters_of: Vec<Vec<usize>>,
    pub cells_of: Vec<Vec<usize>>,
    pub big_terminals_of: Vec<BTreeSet<VertexId>>,
    /// Component owning each edge; `None` for the root.
    pub component_of_edge: Vec<Option<usize>>,
}

impl Hierarchy {
    /// Cells of component `c`, in block/cluster order.
    pub fn cells_of_component(&self, c: usize) -> Vec<usize> {
        self.blocks_of[c]
            .iter()
            .flat_map(|&b| self.clusters_of[b].iter())
            .flat_map(|&x| self.cells_of[x].iter().copied())
            .collect()
    }

    pub fn clusters_of_component(&self, c: usize) -> Vec<usize> {
        self.blocks_of[c]
            .iter()
            .flat_map(|&b| self.clusters_of[b].iter().copied())
            .collect()
    }

    /// Indented text listing of every region, used for fixture diffs.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        let line = |out: &mut String, depth: usize, name: &str, i: usize, r: &Region| {
            let exit = r.exit.map(|e| e.to_string()).unwrap_or_else(|| "-".into());
            writeln!(
                out,
                "{}{} {} root={} exit={} edges={} demand={}",
                "  ".repeat(depth),
                name,
                i,
                r.root,
                exit,
                r.edges.len(),
                r.demand
            )
            .unwrap();
        };
        for (c, comp) in self.components.iter().enumerate() {
            line(&mut out, 0, "component", c, comp);
            for &b in &self.blocks_of[c] {
                line(&mut out, 1, "block", b, &self.blocks[b]);
                for &x in &self.clusters_of[b] {
                    line(&mut out, 2, "cluster", x, &self.clusters[x]);
                    for &z in &self.cells_of[x] {
                        line(&mut out, 3, "cell", z, &self.cells[z]);
                    }
                }
            }
        }
        out
    }
}

/// Components of the whole tree, each of demand at most `2 gamma`.
pub fn split_components(inst: &Instance, p: &Params) -> Vec<Region> {
    let all: BTreeSet<VertexId> = (0..inst.len()).filter(|&v| v != inst.root()).collect();
    partition::partition(inst, inst.root(), &all, None, &p.gamma)
        .into_iter()
        .map(|pc| {
            Region::build(
                inst,
                RegionKind::Component,
                pc.root,
                pc.exit,
                pc.edges,
                None,
            )
        })
        .collect()
}

/// Big terminals of a region: terminals in it with demand above `gamma_prime`.
pub fn big_terminals(inst: &Instance, c: &Region, p: &Params) -> BTreeSet<VertexId> {
    c.inner_terminals(inst)
        .filter(|&v| inst.demand(v).is_some_and(|d| d > &p.gamma_prime))
        .collect()
}

/// Splits a component at its key vertices.
pub fn split_blocks(inst: &Instance, c: &Region, p: &Params) -> Vec<Region> {
    let kids = |v: VertexId| {
        inst.children(v)
            .iter()
            .copied()
            .filter(|x| c.edges.contains(x))
    };
    let mut u = big_terminals(inst, c, p);
    u.insert(c.root);
    u.extend(c.exit);
    let mut steiner = BTreeSet::new();
    for &t in &u {
        let mut v = t;
        while steiner.insert(v) && v != c.root {
            v = inst.parent(v).expect("component vertex below root");
        }
    }
    let mut keys = u;
    for &v in &steiner {
        if kids(v).filter(|x| steiner.contains(x)).count() >= 2 {
            keys.insert(v);
        }
    }
    let mut blocks = Vec::new();
    for &k in &keys {
        for first in kids(k) {
            let mut edges = BTreeSet::new();
            let mut exit = None;
            let mut stack = vec![first];
            while let Some(v) = stack.pop() {
                edges.insert(v);
                if keys.contains(&v) {
                    debug_assert!(exit.is_none(), "block reaches two key vertices");
                    exit = Some(v);
                } else {
                    stack.extend(kids(v));
                }
            }
            blocks.push(Region::build(inst, RegionKind::Block, k, exit, edges, None));
        }
    }
    blocks
}

/// Clusters of a block, each of demand at most `2 gamma_prime`.
pub fn split_clusters(inst: &Instance, b: &Region, p: &Params) -> Vec<Region> {
    partition::partition(inst, b.root, &b.edges, b.exit, &p.gamma_prime)
        .into_iter()
        .map(|pc| Region::build(inst, RegionKind::Cluster, pc.root, pc.exit, pc.edges, None))
        .collect()
}

/// Spine edges removed when cutting a passing cluster into cells.
pub fn cell_cut_edges(inst: &Instance, x: &Region, p: &Params) -> Vec<VertexId> {
    let ell = x.spine_cost(inst);
    if !x.is_passing() || ell.is_zero() {
        return Vec::new();
    }
    let base = inst.dist(x.root);
    let mut cuts: Vec<VertexId> = Vec::new();
    for i in 1..p.inv_eps() {
        let mark = Rational::from_integer(i as i64) * &p.eps * &ell;
        let edge = x
            .spine_edges()
            .iter()
            .copied()
            .find(|&v| {
                let lo = inst.dist(inst.parent(v).unwrap()) - base;
                let hi = inst.dist(v) - base;
                lo <= mark && mark < hi
            })
            .expect("spine edge straddling every interior mark");
        if cuts.last() != Some(&edge) {
            cuts.push(edge);
        }
    }
    cuts
}

/// Cells of a cluster: the whole cluster when ending or of zero spine cost,
/// otherwise the vertex components left after removing the cut edges.
pub fn split_cells(inst: &Instance, x: &Region, p: &Params) -> Vec<Region> {
    let cuts = cell_cut_edges(inst, x, p);
    if cuts.is_empty() {
        return vec![Region::build(
            inst,
            RegionKind::Cell,
            x.root,
            x.exit,
            x.edges.clone(),
            None,
        )];
    }
    let mut tops = vec![x.root];
    tops.extend(cuts.iter().copied());
    let mut cells = Vec::new();
    for (i, &top) in tops.iter().enumerate() {
        let exit = match cuts.get(i) {
            Some(&cut) => inst.parent(cut).unwrap(),
            None => x.exit.unwrap(),
        };
        let mut edges = BTreeSet::new();
        let mut stack: Vec<VertexId> = inst.children(top).to_vec();
        while let Some(v) = stack.pop() {
            if x.edges.contains(&v) && !cuts.contains(&v) {
                edges.insert(v);
                stack.extend(inst.children(v).iter().copied());
            }
        }
        cells.push(Region::build(
            inst,
            RegionKind::Cell,
            top,
            Some(exit),
            edges,
            None,
        ));
    }
    cells
}

pub fn decompose(inst: &Instance, p: &Params) -> Hierarchy {
    let mut h = Hierarchy {
        components: split_components(inst, p),
        blocks: Vec::new(),
        clusters: Vec::new(),
        cells: Vec::new(),
        blocks_of: Vec::new(),
        clusters_of: Vec::new(),
        cells_of: Vec::new(),
        big_terminals_of: Vec::new(),
        component_of_edge: vec![None; inst.len()],
    };
    for (ci, comp) in h.components.iter().enumerate() {
        for &e in &comp.edges {
            h.component_of_edge[e] = Some(ci);
        }
        h.big_terminals_of.push(big_terminals(inst, comp, p));
        let mut block_ids = Vec::new();
        for mut b in split_blocks(inst, comp, p) {
            let bi = h.blocks.len();
            let mut cluster_ids = Vec::new();
            for mut x in split_clusters(inst, &b, p) {
                let xi = h.clusters.len();
                let mut cell_ids = Vec::new();
                for mut z in split_cells(inst, &x, p) {
                    z.parent = Some(xi);
                    cell_ids.push(h.cells.len());
                    h.cells.push(z);
                }
                h.cells_of.push(cell_ids);
                x.parent = Some(bi);
                cluster_ids.push(xi);
                h.clusters.push(x);
            }
            h.clusters_of.push(cluster_ids);
            b.parent = Some(ci);
            block_ids.push(bi);
            h.blocks.push(b);
        }
        h.blocks_of.push(block_ids);
    }
    h
}
