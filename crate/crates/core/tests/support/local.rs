use std::collections::{BTreeMap, BTreeSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ucvrp_core::decompose::{decompose, Hierarchy};
use ucvrp_core::instance::{gen_random, DemandDistribution, RandomSpec};
use ucvrp_core::local::{local_simplify, LocalResult, Subtour};
use ucvrp_core::{Instance, Params, Rational};

use super::q;

fn params(eps: Rational) -> Params {
    let mut p = Params::relaxed(&eps).unwrap();
    p.set("gamma_prime", q(1, 40)).unwrap();
    p
}

/// Random tree shape with mostly small demands `k/512` and a few big ones.
fn instance(seed: u64) -> Instance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
    let n = rng.gen_range(8..=48);
    let shape = gen_random(&RandomSpec::new(n, DemandDistribution::Dyadic, seed)).unwrap();
    let demands: BTreeMap<usize, Rational> = shape
        .terminals()
        .map(|t| {
            let d = if rng.gen_bool(0.15) {
                q(rng.gen_range(13..=512), 512)
            } else {
                q(rng.gen_range(1..=12), 512)
            };
            (t, d)
        })
        .collect();
    let weights = shape
        .weights()
        .iter()
        .map(|w| {
            if rng.gen_bool(0.1) {
                Rational::zero()
            } else {
                w.clone()
            }
        })
        .collect();
    Instance::new(shape.parents().to_vec(), weights, demands).unwrap()
}

fn path(inst: &Instance, root: usize, v: usize) -> Vec<usize> {
    let mut out = Vec::new();
    let mut x = v;
    while x != root {
        out.push(x);
        x = inst.parent(x).unwrap();
    }
    out
}

/// Random subtours: terminals spread over up to six walks, plus detours, with a passing walk when needed.
fn random_subtours(inst: &Instance, h: &Hierarchy, c: usize, rng: &mut ChaCha8Rng) -> Vec<Subtour> {
    let comp = &h.components[c];
    let k = rng.gen_range(1..=6);
    let mut out = vec![Subtour::default(); k];
    for &t in comp.edges.iter().filter(|&&v| inst.is_terminal(v)) {
        let i = rng.gen_range(0..k);
        out[i].terminals.insert(t);
        out[i].edges.extend(path(inst, comp.root, t));
    }
    let vertices: Vec<usize> = comp.edges.iter().copied().collect();
    for t in out.iter_mut() {
        if rng.gen_bool(0.3) && !vertices.is_empty() {
            let v = vertices[rng.gen_range(0..vertices.len())];
            t.edges.extend(path(inst, comp.root, v));
        }
    }
    if let Some(e) = comp.exit {
        let passing = rng.gen_range(1..=k);
        for t in out.iter_mut().take(passing) {
            t.edges.extend(path(inst, comp.root, e));
        }
    }
    out
}

fn cost(inst: &Instance, t: &Subtour) -> Rational {
    q(2, 1)
        * t.edges
            .iter()
            .map(|&e| inst.weight(e).clone())
            .sum::<Rational>()
}

fn demand(inst: &Instance, t: &Subtour) -> Rational {
    t.terminals
        .iter()
        .map(|&v| inst.demand(v).unwrap().clone())
        .sum()
}

fn connected(inst: &Instance, root: usize, t: &Subtour) -> bool {
    t.edges.iter().all(|&e| {
        let p = inst.parent(e).unwrap();
        p == root || t.edges.contains(&p)
    }) && t.terminals.iter().all(|v| t.edges.contains(v))
}

fn big(inst: &Instance, p: &Params, t: &Subtour) -> BTreeSet<usize> {
    t.terminals
        .iter()
        .copied()
        .filter(|&v| inst.demand(v).unwrap() > &p.gamma_prime)
        .collect()
}

pub struct LocalRun {
    pub inst: Instance,
    pub h: Hierarchy,
    pub c: usize,
    pub p: Params,
    pub s_c: Vec<Subtour>,
    pub result: LocalResult,
}

/// The construction applied to 100 random components with random feasible subtours.
pub fn local_runs() -> Vec<LocalRun> {
    let mut runs = Vec::new();
    let mut seed = 0u64;
    while runs.len() < 100 {
        seed += 1;
        let inst = instance(seed);
        let p = params(if seed.is_multiple_of(2) {
            q(1, 3)
        } else {
            q(1, 4)
        });
        let h = decompose(&inst, &p);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for c in 0..h.components.len() {
            if h.components[c].edges.is_empty() || runs.len() >= 100 {
                continue;
            }
            let s_c = random_subtours(&inst, &h, c, &mut rng);
            let result = local_simplify(&inst, &h, c, &s_c, &p)
                .unwrap_or_else(|e| panic!("seed {seed} component {c}: {e}"));
            runs.push(LocalRun {
                inst: inst.clone(),
                h: h.clone(),
                c,
                p: p.clone(),
                s_c,
                result,
            });
        }
    }
    runs
}

/// Coverage, cell ownership, correspondence and the overall cost bound.
pub fn check_theorem(
    inst: &Instance,
    h: &Hierarchy,
    c: usize,
    p: &Params,
    s_c: &[Subtour],
    r: &LocalResult,
) {
    let comp = &h.components[c];
    let base: Rational = s_c.iter().map(|t| cost(inst, t)).sum();
    let all: Vec<&Subtour> = r.s_star.iter().chain(std::iter::once(&r.bar_t)).collect();

    // Coverage and connectivity.
    let mut served = BTreeMap::new();
    for (i, t) in all.iter().enumerate() {
        assert!(connected(inst, comp.root, t));
        assert!(t.edges.iter().all(|e| comp.edges.contains(e)));
        for &v in &t.terminals {
            assert!(served.insert(v, i).is_none(), "terminal {v} served twice");
        }
    }
    let terminals: Vec<usize> = comp
        .edges
        .iter()
        .copied()
        .filter(|&v| inst.is_terminal(v))
        .collect();
    assert_eq!(served.len(), terminals.len());

    // One subtour per cell for small terminals.
    let cells: Vec<usize> = h.blocks_of[c]
        .iter()
        .flat_map(|&b| h.clusters_of[b].iter())
        .flat_map(|&x| h.cells_of[x].iter().copied())
        .collect();
    for &z in &cells {
        let owners: BTreeSet<usize> = terminals
            .iter()
            .filter(|&&v| {
                inst.demand(v).unwrap() <= &p.gamma_prime && h.cells[z].vertices().contains(&v)
            })
            .map(|v| served[v])
            .collect();
        assert!(
            owners.len() <= 1,
            "cell {z} split across subtours {owners:?}"
        );
    }

    // Correspondence, demand and passing.
    assert_eq!(r.s_star.len(), s_c.len());
    assert!(demand(inst, &r.bar_t) <= q(1, 1));
    for (t, t_star) in s_c.iter().zip(&r.s_star) {
        assert!(demand(inst, t_star) <= demand(inst, t));
        if let Some(e) = comp.exit {
            if t.edges.contains(&e) {
                assert!(t_star.edges.contains(&e), "passing subtour lost the exit");
            }
        }
        assert_eq!(big(inst, p, t), big(inst, p, t_star));
    }

    let after: Rational = all.iter().map(|t| cost(inst, t)).sum();
    assert!(after <= (q(3, 2) + q(2, 1) * &p.eps) * &base);
}

/// Threshold spines, extension and extra-subtour costs, removed demand and per-step slack.
pub fn check_lemmas(
    inst: &Instance,
    h: &Hierarchy,
    c: usize,
    p: &Params,
    s_c: &[Subtour],
    r: &LocalResult,
) {
    let comp = &h.components[c];
    let base: Rational = s_c.iter().map(|t| cost(inst, t)).sum();
    let after: Rational = r
        .s_star
        .iter()
        .chain(std::iter::once(&r.bar_t))
        .map(|t| cost(inst, t))
        .sum();
    let clusters = h.clusters_of_component(c);
    assert!(r.diag.threshold_cells.keys().all(|x| clusters.contains(x)));
    for (&x, &z) in &r.diag.threshold_cells {
        assert!(
            h.cells_of[x].contains(&z),
            "threshold cell {z} outside cluster {x}"
        );
    }
    assert!(r.diag.w2 <= &p.eps * &base);
    let spine: Rational = r
        .diag
        .threshold_cells
        .values()
        .map(|&z| {
            h.cells[z].spine[1..]
                .iter()
                .map(|&v| inst.weight(v).clone())
                .sum::<Rational>()
        })
        .sum();
    assert_eq!(spine, r.diag.threshold_spine_cost);
    assert!(spine <= &p.eps / q(2, 1) * &base);
    let piece_edges: BTreeSet<usize> = r
        .diag
        .pieces
        .iter()
        .flat_map(|x| x.edges.iter().copied())
        .collect();
    let w5 = cost(inst, &r.bar_t)
        - q(2, 1)
            * piece_edges
                .iter()
                .map(|&e| inst.weight(e).clone())
                .sum::<Rational>();
    assert_eq!(w5, r.diag.w5);
    assert!(w5 <= (q(1, 2) + p.eps.clone()) * &base);
    assert!(after <= &base + &r.diag.w2 + &r.diag.w5);

    // Removed demand and per-step slack.
    let removed: Rational = r.diag.pieces.iter().map(|x| demand(inst, x)).sum();
    assert!(removed <= q(6, 1) * &p.gamma_prime * q(s_c.len() as i64, 1));
    let st = &r.diag.stages;
    assert_eq!(st.len(), 5);
    let slack = q(2, 1) * &p.gamma_prime;
    for i in 0..s_c.len() {
        let d: Vec<Rational> = st.iter().map(|a| demand(inst, &a[i])).collect();
        assert!(&d[1] - &d[0] <= slack);
        assert_eq!(d[2], d[1]);
        assert!(&d[3] - &d[2] <= slack);
        assert!(d[4] <= d[0]);
    }

    // Nice edges recomputed from the extended stage.
    let mut count: BTreeMap<usize, usize> = BTreeMap::new();
    for t in &st[2] {
        for &e in &t.edges {
            *count.entry(e).or_default() += 1;
        }
    }
    let nice: BTreeSet<usize> = count
        .into_iter()
        .filter(|&(_, n)| n >= 2)
        .map(|(e, _)| e)
        .collect();
    assert_eq!(nice, r.diag.nice_edges);

    // Root paths of clusters survive in every stage.
    for &b in &h.blocks_of[c] {
        for &x in &h.clusters_of[b] {
            let cl = &h.clusters[x];
            for target in std::iter::once(cl.root).chain(cl.exit) {
                let route = path(inst, comp.root, target);
                for i in 0..s_c.len() {
                    if route.iter().all(|e| s_c[i].edges.contains(e)) {
                        for stage in st {
                            assert!(route.iter().all(|e| stage[i].edges.contains(e)));
                        }
                    }
                }
            }
        }
    }
}
