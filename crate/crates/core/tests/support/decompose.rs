use std::collections::{BTreeMap, BTreeSet};

use ucvrp_core::decompose::{check_hierarchy, count_check, decompose, Region};
use ucvrp_core::instance::{
    gen_caterpillar, gen_random, preprocess, DemandDistribution, RandomSpec,
};
use ucvrp_core::{Instance, Params, Rational};

use super::q;

pub fn instances() -> Vec<Instance> {
    (0..100u64)
        .map(|seed| {
            let n = 5 + (seed as usize * 7) % 56;
            let dist = if seed % 2 == 0 {
                DemandDistribution::Dyadic
            } else {
                DemandDistribution::Uniform
            };
            let spec = RandomSpec::new(n, dist, seed);
            let raw = if seed % 5 == 0 {
                gen_caterpillar(&spec)
            } else {
                gen_random(&spec)
            }
            .unwrap();
            preprocess(&raw).instance
        })
        .collect()
}

pub fn params(seed: usize) -> Params {
    let eps = [q(1, 2), q(1, 3), q(1, 4)][seed % 3].clone();
    let mut p = Params::relaxed(&eps).unwrap();
    if seed % 4 == 1 {
        p.set("gamma_prime", q(1, 4)).unwrap();
    }
    p
}

/// Demand of terminals in the region other than its root and exit, recomputed by walking up from every terminal.
fn strict_demand(inst: &Instance, r: &Region) -> Rational {
    inst.terminals()
        .filter(|&t| t != r.root && Some(t) != r.exit && r.edges.contains(&t))
        .map(|t| inst.demand(t).unwrap().clone())
        .sum()
}

fn connected(inst: &Instance, r: &Region) -> bool {
    r.edges.iter().all(|&e| {
        let p = inst.parent(e).unwrap();
        p == r.root || r.edges.contains(&p)
    })
}

fn assert_edge_partition(parent_edges: &BTreeSet<usize>, parts: &[&Region]) {
    let mut union = BTreeSet::new();
    for r in parts {
        for &e in &r.edges {
            assert!(union.insert(e), "edge {e} in two parts");
        }
    }
    assert_eq!(&union, parent_edges);
}

/// Partition, demand and count bounds of the hierarchy on 100 random instances.
pub fn hierarchy_suite() {
    for (i, inst) in instances().iter().enumerate() {
        let p = params(i);
        let h = decompose(inst, &p);
        let all: BTreeSet<usize> = (0..inst.len()).filter(|&v| v != inst.root()).collect();
        let comps: Vec<&Region> = h.components.iter().collect();
        assert_edge_partition(&all, &comps);
        let bound = Rational::one().max(q(3, 1) * inst.total_demand() / &p.gamma);
        assert!(
            q(comps.len() as i64, 1) <= bound,
            "instance {i}: {} components",
            comps.len()
        );

        let mut touches: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (ci, c) in h.components.iter().enumerate() {
            assert!(connected(inst, c));
            assert_eq!(c.demand, strict_demand(inst, c));
            assert!(c.demand <= q(2, 1) * &p.gamma);
            for v in c.vertices() {
                touches.entry(v).or_default().push(ci);
            }
        }
        for (v, cs) in touches.iter().filter(|(_, cs)| cs.len() > 1) {
            for &ci in cs {
                let c = &h.components[ci];
                assert!(
                    c.root == *v || c.exit == Some(*v),
                    "vertex {v} shared inside component {ci}"
                );
            }
        }

        for (ci, c) in h.components.iter().enumerate() {
            let blocks: Vec<&Region> = h.blocks_of[ci].iter().map(|&b| &h.blocks[b]).collect();
            assert_edge_partition(&c.edges, &blocks);
            let report = count_check(&h, ci, &p);
            assert!(report.violations.is_empty(), "{:?}", report.violations);
            for &bi in &h.blocks_of[ci] {
                let b = &h.blocks[bi];
                assert!(connected(inst, b));
                for t in inst
                    .terminals()
                    .filter(|&t| b.edges.contains(&t) && Some(t) != b.exit)
                {
                    assert!(
                        inst.demand(t).unwrap() <= &p.gamma_prime,
                        "big terminal {t} strictly inside block {bi}"
                    );
                }
                let clusters: Vec<&Region> =
                    h.clusters_of[bi].iter().map(|&x| &h.clusters[x]).collect();
                assert_edge_partition(&b.edges, &clusters);
                let cbound = q(3, 1) * (strict_demand(inst, b) / &p.gamma_prime + q(1, 1));
                assert!(q(clusters.len() as i64, 1) <= cbound);
                if let Some(e) = b.exit {
                    assert!(clusters.iter().any(|x| x.exit == Some(e)));
                }
                for &xi in &h.clusters_of[bi] {
                    let x = &h.clusters[xi];
                    assert!(connected(inst, x));
                    assert_eq!(x.demand, strict_demand(inst, x));
                    assert!(x.demand <= q(2, 1) * &p.gamma_prime);
                    check_cells(
                        inst,
                        &p,
                        x,
                        h.cells_of[xi].iter().map(|&z| &h.cells[z]).collect(),
                    );
                }
            }
        }
        assert_eq!(
            check_hierarchy(inst, &h, &p),
            Vec::<String>::new(),
            "instance {i}"
        );
    }
}

fn check_cells(inst: &Instance, p: &Params, x: &Region, cells: Vec<&Region>) {
    assert!(cells.len() <= p.inv_eps() as usize);
    let mut seen = BTreeSet::new();
    for z in &cells {
        assert!(connected(inst, z));
        for v in z.vertices() {
            assert!(seen.insert(v), "vertex {v} in two cells");
        }
        assert_eq!(z.is_passing(), x.is_passing());
    }
    assert_eq!(seen, x.vertices());
    if x.is_passing() && cells.len() > 1 {
        let ell: Rational = x.spine[1..].iter().map(|&v| inst.weight(v).clone()).sum();
        for z in &cells {
            let spine: Rational = z.spine[1..].iter().map(|&v| inst.weight(v).clone()).sum();
            assert!(spine <= &p.eps * &ell);
        }
    }
}
