use std::collections::{BTreeMap, BTreeSet};

use crate::decompose::Hierarchy;
use crate::instance::{check_feasible, Instance, Solution, Tour, VertexId};
use crate::params::Params;
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum StructureError {
    #[error("a terminal lies at distance 0 from the depot, so D_min is 0 and bands are undefined")]
    TerminalAtDepot,
    #[error("band width must be positive, got {0}")]
    BadBandWidth(Rational),
    #[error("value set Y exceeds the cap of {cap} values")]
    ValueCap { cap: usize },
    #[error("1/beta is not a positive integer: beta = {0}")]
    BadBeta(Rational),
    #[error("solution on the reduced tree is infeasible: {0}")]
    Infeasible(String),
}

/// The tree `T̂`: every component keeps its edges, and a component whose root
/// differs from its band's critical vertex hangs from that vertex through a
/// fresh copy of its root.
#[derive(Debug, Clone)]
pub struct ReducedTree {
    pub tree: Instance,
    /// Vertex of `T` that each vertex of `T̂` stands for.
    pub origin: Vec<VertexId>,
    pub critical_vertices: BTreeSet<VertexId>,
    /// Band index of each component, starting at 1.
    pub band_of: Vec<u64>,
    pub critical_of: Vec<VertexId>,
    /// Root of each component inside `T̂` (a copy or the original vertex).
    pub root_of: Vec<VertexId>,
    /// Weight of the edge from `root_of[c]` to `critical_of[c]`, zero if they coincide.
    pub attach_weight: Vec<Rational>,
    pub d_tilde: Rational,
    pub bands_within_h: bool,
}

impl ReducedTree {
    pub fn is_identity(&self) -> bool {
        self.tree.len() == self.origin.len() && self.origin.iter().enumerate().all(|(i, &o)| i == o)
    }

    /// Components attached to critical vertex `z`, in component order.
    pub fn children_of_critical(&self, z: VertexId) -> Vec<usize> {
        (0..self.critical_of.len())
            .filter(|&c| self.critical_of[c] == z)
            .collect()
    }
}

/// Height reduction with band width `alpha * eps * D_min`.
pub fn height_reduce(
    inst: &Instance,
    h: &Hierarchy,
    p: &Params,
) -> Result<ReducedTree, StructureError> {
    let (d_min, _) = match inst.terminal_distance_range() {
        Some(r) => r,
        None => return height_reduce_with(inst, h, p, Rational::one()),
    };
    if d_min.is_zero() {
        return Err(StructureError::TerminalAtDepot);
    }
    height_reduce_with(inst, h, p, &p.alpha * &p.eps * d_min)
}

/// Height reduction with an explicit band width.
pub fn height_reduce_with(
    inst: &Instance,
    h: &Hierarchy,
    p: &Params,
    d_tilde: Rational,
) -> Result<ReducedTree, StructureError> {
    if !d_tilde.is_positive() {
        return Err(StructureError::BadBandWidth(d_tilde));
    }
    let comps = &h.components;
    let k = comps.len();
    let band_of: Vec<u64> = comps
        .iter()
        .map(|c| {
            let b = (inst.dist(c.root) / &d_tilde).floor() + 1u32;
            u64::try_from(b).unwrap_or(u64::MAX)
        })
        .collect();
    let h_eps = p.h_eps.to_u64().unwrap_or(u64::MAX);
    let bands_within_h = band_of.iter().all(|&b| b <= h_eps);

    // Components sharing a vertex and a band are connected.
    let mut uf: Vec<usize> = (0..k).collect();
    fn find(uf: &mut [usize], mut a: usize) -> usize {
        while uf[a] != a {
            uf[a] = uf[uf[a]];
            a = uf[a];
        }
        a
    }
    let mut at_vertex: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
    for (ci, c) in comps.iter().enumerate() {
        at_vertex.entry(c.root).or_default().push(ci);
        for &e in &c.edges {
            at_vertex.entry(e).or_default().push(ci);
        }
    }
    for list in at_vertex.values() {
        for i in 0..list.len() {
            for j in i + 1..list.len() {
                let (a, b) = (list[i], list[j]);
                if a != b && band_of[a] == band_of[b] {
                    let (ra, rb) = (find(&mut uf, a), find(&mut uf, b));
                    uf[ra] = rb;
                }
            }
        }
    }
    let mut sets: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for ci in 0..k {
        let r = find(&mut uf, ci);
        sets.entry(r).or_default().push(ci);
    }

    let mut critical_of = vec![0; k];
    for members in sets.values() {
        let z = members
            .iter()
            .map(|&ci| comps[ci].root)
            .min_by(|&a, &b| {
                inst.dist(a)
                    .cmp(inst.dist(b))
                    .then(inst.depth(a).cmp(&inst.depth(b)))
                    .then(a.cmp(&b))
            })
            .expect("nonempty set");
        for &ci in members {
            critical_of[ci] = z;
        }
    }

    let n = inst.len();
    let mut parent: Vec<Option<VertexId>> = inst.parents().to_vec();
    let mut weight: Vec<Rational> = inst.weights().to_vec();
    let mut origin: Vec<VertexId> = (0..n).collect();
    let mut root_of = vec![0; k];
    let mut attach_weight = vec![Rational::zero(); k];
    for (ci, c) in comps.iter().enumerate() {
        let z = critical_of[ci];
        if c.root == z {
            root_of[ci] = z;
            continue;
        }
        let delta = inst.dist(c.root) - inst.dist(z);
        let copy = parent.len();
        parent.push(Some(z));
        weight.push(delta.clone());
        origin.push(c.root);
        for &e in &c.edges {
            if inst.parent(e) == Some(c.root) {
                parent[e] = Some(copy);
            }
        }
        root_of[ci] = copy;
        attach_weight[ci] = delta;
    }
    let tree =
        Instance::new(parent, weight, inst.demands()).expect("re-attachment keeps a valid tree");
    Ok(ReducedTree {
        tree,
        origin,
        critical_vertices: critical_of.iter().copied().collect(),
        band_of,
        critical_of,
        root_of,
        attach_weight,
        d_tilde,
        bands_within_h,
    })
}

/// Carries a solution on `T̂` back to `T`. Terminals keep their ids, so only
/// feasibility is re-checked; the cost on `T` never exceeds the cost on `T̂`.
pub fn map_back(rt: &ReducedTree, sol: &Solution) -> Result<Solution, StructureError> {
    let report = check_feasible(&rt.tree, sol);
    if let Some(v) = report.violations.first() {
        return Err(StructureError::Infeasible(v.to_string()));
    }
    let tours = sol
        .tours
        .iter()
        .map(|t| Tour::with_dummy(t.terminals.iter().map(|&v| rt.origin[v]), t.dummy.clone()))
        .collect();
    Ok(Solution::new(tours))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::decompose::decompose;
    use crate::instance::parse_instance;
    use crate::rational::q;

    fn params() -> Params {
        Params::relaxed(&q(1, 2)).unwrap()
    }

    #[test]
    fn single_component_is_identity() {
        let inst =
            parse_instance("ucvrp 1\nv 0 -1 0\nv 1 0 3\nv 2 1 1\nv 3 1 2\nt 2 0.5\nt 3 0.25\n")
                .unwrap();
        let p = params();
        let h = decompose(&inst, &p);
        assert_eq!(h.components.len(), 1);
        let rt = height_reduce(&inst, &h, &p).unwrap();
        assert!(rt.is_identity());
        assert_eq!(rt.critical_vertices, BTreeSet::from([0]));
        assert_eq!(rt.tree, inst);
    }

    /// Path r -1- a -1- b -1- c, with a heavy terminal below a and several
    /// light ones lower down, so that with gamma = 1 the tree splits at b.
    fn two_component_fixture() -> (Instance, Params) {
        let text = "ucvrp 1\n\
            v 0 -1 0\nv 1 0 1\nv 2 1 1\nv 3 2 1\nv 4 3 1\nv 5 3 1\nv 6 2 1\n\
            t 4 0.75\nt 5 0.75\nt 6 0.5\n";
        let inst = parse_instance(text).unwrap();
        let mut p = params();
        p.set("gamma", q(1, 1)).unwrap();
        (inst, p)
    }

    #[test]
    fn reattaches_component_at_tree_distance() {
        let (inst, p) = two_component_fixture();
        let h = decompose(&inst, &p);
        assert!(h.components.len() >= 2, "{}", h.dump());
        // Every component lands in band 1 when the band width exceeds the depth.
        let rt = height_reduce_with(&inst, &h, &p, q(100, 1)).unwrap();
        assert_eq!(rt.critical_vertices, BTreeSet::from([0]));
        for (ci, c) in h.components.iter().enumerate() {
            assert_eq!(rt.band_of[ci], 1);
            assert_eq!(rt.attach_weight[ci], inst.tree_distance(0, c.root));
            let r = rt.root_of[ci];
            assert_eq!(rt.tree.dist(r), inst.dist(c.root));
            for &e in &c.edges {
                assert_eq!(rt.tree.weight(e), inst.weight(e));
                let pe = rt.tree.parent(e).unwrap();
                assert_eq!(rt.origin[pe], inst.parent(e).unwrap());
            }
        }
        assert!(!rt.is_identity());
    }

    #[test]
    fn map_back_keeps_terminals_and_cost_bound() {
        let (inst, p) = two_component_fixture();
        let h = decompose(&inst, &p);
        let rt = height_reduce_with(&inst, &h, &p, q(100, 1)).unwrap();
        let sol = Solution::new(vec![
            Tour::new([4]),
            Tour::new([5]),
            Tour::with_dummy([6], q(1, 8)),
        ]);
        let back = map_back(&rt, &sol).unwrap();
        assert_eq!(back, sol);
        assert!(check_feasible(&inst, &back).is_feasible());
        assert_eq!(back.cost(&inst), q(22, 1));
        assert!(back.cost(&inst) <= sol.cost(&rt.tree));
    }

    #[test]
    fn distinct_bands_make_exits_critical() {
        let (inst, p) = two_component_fixture();
        let h = decompose(&inst, &p);
        let rt = height_reduce_with(&inst, &h, &p, q(1, 2)).unwrap();
        for (ci, c) in h.components.iter().enumerate() {
            assert_eq!(rt.critical_of[ci], c.root);
            assert!(rt.attach_weight[ci].is_zero());
        }
        assert!(rt.is_identity());
    }

    #[test]
    fn terminal_at_depot_is_rejected() {
        let inst = parse_instance("ucvrp 1\nv 0 -1 0\nv 1 0 0\nt 1 0.5\n").unwrap();
        let p = params();
        let h = decompose(&inst, &p);
        assert_eq!(
            height_reduce(&inst, &h, &p).unwrap_err(),
            StructureError::TerminalAtDepot
        );
    }

    #[test]
    fn map_back_rejects_infeasible() {
        let (inst, p) = two_component_fixture();
        let h = decompose(&inst, &p);
        let rt = height_reduce(&inst, &h, &p).unwrap();
        let sol = Solution::new(vec![Tour::new([4, 5])]);
        assert!(matches!(
            map_back(&rt, &sol),
            Err(StructureError::Infeasible(_))
        ));
    }
}
