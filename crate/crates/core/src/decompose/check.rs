//! Runtime checks of the structural guarantees of a [`Hierarchy`].

use std::collections::BTreeMap;

use super::{Hierarchy, Region};
use crate::instance::{Instance, VertexId};
use crate::params::Params;
use crate::rational::Rational;

/// Per-component counts against their constant bounds.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CountReport {
    pub big_terminals: usize,
    pub blocks: usize,
    pub cells: usize,
    pub big_bound: Rational,
    pub block_bound: Rational,
    pub cell_bound: Rational,
    pub violations: Vec<String>,
}

pub fn count_check(h: &Hierarchy, c: usize, p: &Params) -> CountReport {
    let ratio = &p.gamma / &p.gamma_prime;
    let two = Rational::from_integer(2);
    let four = Rational::from_integer(4);
    let big_bound = &two * &ratio;
    let block_bound = &four + &four * &ratio;
    let cell_bound = &block_bound
        * (Rational::from_integer(3) * (&big_bound + Rational::one()))
        * Rational::from_integer(p.inv_eps() as i64);
    let big_terminals = h.big_terminals_of[c].len();
    let blocks = h.blocks_of[c].len();
    let cells = h.cells_of_component(c).len();
    let mut violations = Vec::new();
    for (name, count, bound) in [
        ("big terminals", big_terminals, &big_bound),
        ("blocks", blocks, &block_bound),
        ("cells", cells, &cell_bound),
    ] {
        if &Rational::from_integer(count as i64) > bound {
            violations.push(format!(
                "component {c}: {count} {name} exceed the bound {bound}"
            ));
        }
    }
    CountReport {
        big_terminals,
        blocks,
        cells,
        big_bound,
        block_bound,
        cell_bound,
        violations,
    }
}

fn check_partition(
    inst: &Instance,
    what: &str,
    parent: &Region,
    parts: &[&Region],
    out: &mut Vec<String>,
    share_limit: bool,
) {
    let mut owner: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (i, r) in parts.iter().enumerate() {
        for &e in &r.edges {
            if let Some(prev) = owner.insert(e, i) {
                out.push(format!("{what}: edge {e} owned by parts {prev} and {i}"));
            }
            if !parent.edges.contains(&e) {
                out.push(format!(
                    "{what}: edge {e} lies outside the enclosing region"
                ));
            }
        }
        check_region_shape(inst, what, r, out);
    }
    if share_limit && owner.len() != parent.edges.len() {
        out.push(format!(
            "{what}: {} of {} edges covered",
            owner.len(),
            parent.edges.len()
        ));
    }
}

fn check_region_shape(inst: &Instance, what: &str, r: &Region, out: &mut Vec<String>) {
    for &e in &r.edges {
        let p = inst.parent(e).expect("edge has a parent");
        if p != r.root && !r.edges.contains(&p) {
            out.push(format!(
                "{what} rooted at {}: edge {e} is not connected to the root",
                r.root
            ));
        }
    }
    if let Some(x) = r.exit {
        if !r.contains_vertex(x) {
            out.push(format!(
                "{what} rooted at {}: exit {x} outside the region",
                r.root
            ));
        }
    }
}

/// Every violated structural property, as readable messages. Empty when the
/// hierarchy satisfies all partition, demand, count and spine bounds.
pub fn check_hierarchy(inst: &Instance, h: &Hierarchy, p: &Params) -> Vec<String> {
    let mut out = Vec::new();
    let whole = Region {
        kind: super::RegionKind::Component,
        root: inst.root(),
        exit: None,
        edges: (0..inst.len()).filter(|&v| v != inst.root()).collect(),
        spine: Vec::new(),
        demand: inst.total_demand(),
        parent: None,
    };
    let comps: Vec<&Region> = h.components.iter().collect();
    check_partition(inst, "components", &whole, &comps, &mut out, true);

    let two = Rational::from_integer(2);
    let three = Rational::from_integer(3);
    let comp_bound = Rational::one().max(&three * inst.total_demand() / &p.gamma);
    if Rational::from_integer(comps.len() as i64) > comp_bound {
        out.push(format!(
            "{} components exceed the bound {comp_bound}",
            comps.len()
        ));
    }
    // Vertices shared between components are roots or exits.
    let mut seen: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (ci, c) in h.components.iter().enumerate() {
        if c.demand > &two * &p.gamma {
            out.push(format!(
                "component {ci}: demand {} exceeds 2*gamma",
                c.demand
            ));
        }
        for v in c.vertices() {
            if let Some(&other) = seen.get(&v) {
                let ok = |r: &Region| r.root == v || r.exit == Some(v);
                if !ok(c) || !ok(&h.components[other]) {
                    out.push(format!(
                        "components {other} and {ci} share vertex {v} away from roots and exits"
                    ));
                }
            }
            seen.insert(v, ci);
        }
    }

    for (ci, c) in h.components.iter().enumerate() {
        let blocks: Vec<&Region> = h.blocks_of[ci].iter().map(|&b| &h.blocks[b]).collect();
        check_partition(
            inst,
            &format!("blocks of component {ci}"),
            c,
            &blocks,
            &mut out,
            true,
        );
        out.extend(count_check(h, ci, p).violations);
        for &bi in &h.blocks_of[ci] {
            let b = &h.blocks[bi];
            for v in b.inner_terminals(inst) {
                if inst.demand(v).unwrap() > &p.gamma_prime {
                    out.push(format!("block {bi}: big terminal {v} strictly inside"));
                }
            }
            let clusters: Vec<&Region> =
                h.clusters_of[bi].iter().map(|&x| &h.clusters[x]).collect();
            check_partition(
                inst,
                &format!("clusters of block {bi}"),
                b,
                &clusters,
                &mut out,
                true,
            );
            let bound = &three * (&b.demand / &p.gamma_prime + Rational::one());
            if Rational::from_integer(clusters.len() as i64) > bound {
                out.push(format!(
                    "block {bi}: {} clusters exceed the bound {bound}",
                    clusters.len()
                ));
            }
            if let Some(e) = b.exit {
                if !clusters.iter().any(|x| x.exit == Some(e)) {
                    out.push(format!(
                        "block {bi}: no cluster exits at the block exit {e}"
                    ));
                }
            }
            let good = clusters
                .iter()
                .filter(|x| {
                    x.exit.is_none() || x.demand >= p.gamma_prime || is_leaf_piece(inst, x, b)
                })
                .count();
            if clusters.len() > 3 * good {
                out.push(format!(
                    "block {bi}: {} clusters but only {good} good ones",
                    clusters.len()
                ));
            }
            for &xi in &h.clusters_of[bi] {
                check_cluster(inst, h, p, xi, &mut out);
            }
        }
    }
    out
}

/// A leaf piece owns every block edge below its root.
fn is_leaf_piece(inst: &Instance, x: &Region, b: &Region) -> bool {
    b.edges
        .iter()
        .all(|&e| x.edges.contains(&e) || e == x.root || !inst.is_ancestor(x.root, e))
}

fn check_cluster(inst: &Instance, h: &Hierarchy, p: &Params, xi: usize, out: &mut Vec<String>) {
    let x = &h.clusters[xi];
    if x.demand > Rational::from_integer(2) * &p.gamma_prime {
        out.push(format!(
            "cluster {xi}: demand {} exceeds 2*gamma_prime",
            x.demand
        ));
    }
    let cells: Vec<&Region> = h.cells_of[xi].iter().map(|&z| &h.cells[z]).collect();
    if cells.len() > p.inv_eps() as usize {
        out.push(format!("cluster {xi}: {} cells exceed 1/eps", cells.len()));
    }
    let mut owner: BTreeMap<VertexId, usize> = BTreeMap::new();
    for (i, z) in cells.iter().enumerate() {
        check_region_shape(inst, &format!("cell of cluster {xi}"), z, out);
        for v in z.vertices() {
            if let Some(prev) = owner.insert(v, i) {
                if prev != i {
                    out.push(format!("cluster {xi}: vertex {v} in cells {prev} and {i}"));
                }
            }
        }
        if z.is_passing() != x.is_passing() {
            out.push(format!(
                "cluster {xi}: cell {i} passing status differs from the cluster"
            ));
        }
        if z.is_passing() && z.spine_cost(inst) > &p.eps * x.spine_cost(inst) && cells.len() > 1 {
            out.push(format!(
                "cluster {xi}: cell {i} spine exceeds eps times the cluster spine"
            ));
        }
    }
    if owner.len() != x.vertices().len() {
        out.push(format!(
            "cluster {xi}: cells cover {} of {} vertices",
            owner.len(),
            x.vertices().len()
        ));
    }
}
