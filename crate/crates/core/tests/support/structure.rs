use std::collections::{BTreeMap, BTreeSet};

use proptest::test_runner::{Config, RngAlgorithm, TestRng, TestRunner};
use ucvrp_core::baselines::{exact_opt, itp_heuristic, ItpMode, DEFAULT_EXACT_LIMIT};
use ucvrp_core::decompose::{decompose, Hierarchy};
use ucvrp_core::instance::{check_feasible, gen_random, DemandDistribution, RandomSpec};
use ucvrp_core::structure::{
    adaptive_round, build_value_sets, height_reduce, map_back, subset_sums, ReducedTree,
    DEFAULT_Y_CAP,
};
use ucvrp_core::{Instance, Params, Rational};

use super::q;

/// Small components and wide bands so that re-attachment happens often.
fn wide_params() -> Params {
    let mut p = Params::relaxed(&q(1, 2)).unwrap();
    p.set("gamma", q(1, 1)).unwrap();
    p.set("alpha", q(1, 1)).unwrap();
    p.set("gamma_prime", q(1, 8)).unwrap();
    p
}

/// Checks that `rt` keeps every component of `h` unchanged and that the only
/// other edges are root copies hung at the critical vertex.
fn check_same_components(inst: &Instance, h: &Hierarchy, rt: &ReducedTree) -> Vec<String> {
    let mut errs = Vec::new();
    let hat = &rt.tree;
    let mut owned = BTreeSet::new();
    for (ci, c) in h.components.iter().enumerate() {
        let r = rt.root_of[ci];
        if rt.origin[r] != c.root {
            errs.push(format!("component {ci}: root maps to {}", rt.origin[r]));
        }
        if hat.dist(r) != inst.dist(c.root) {
            errs.push(format!("component {ci}: root distance changed"));
        }
        // Edges reachable from the new root through component edges.
        let mut seen = BTreeSet::new();
        let mut stack = vec![r];
        while let Some(v) = stack.pop() {
            for &ch in hat.children(v) {
                if c.edges.contains(&ch) && seen.insert(ch) {
                    stack.push(ch);
                }
            }
        }
        if seen != c.edges {
            errs.push(format!("component {ci}: edge set differs"));
        }
        for &e in &c.edges {
            if hat.weight(e) != inst.weight(e) {
                errs.push(format!("component {ci}: weight of edge {e} changed"));
            }
            owned.insert(e);
        }
        let z = rt.critical_of[ci];
        if r != z {
            if hat.parent(r) != Some(z) || *hat.weight(r) != inst.tree_distance(z, c.root) {
                errs.push(format!("component {ci}: copy edge wrong"));
            }
            owned.insert(r);
        }
    }
    for v in 0..hat.len() {
        if v != hat.root() && !owned.contains(&v) {
            errs.push(format!("edge {v} belongs to nothing"));
        }
    }
    errs
}

fn multi_component(seed: u64, p: &Params) -> Option<(Instance, Hierarchy)> {
    let n = 5 + (seed as usize % 8);
    let inst = gen_random(&RandomSpec::new(n, DemandDistribution::Dyadic, seed)).unwrap();
    let h = decompose(&inst, p);
    (h.components.len() >= 2).then_some((inst, h))
}

/// Height reduction on 50 random multi-component instances.
pub fn height_suite() {
    let p = wide_params();
    let mut done = 0;
    let mut reattached = 0;
    let mut seed = 0;
    while done < 50 {
        seed += 1;
        let Some((inst, h)) = multi_component(seed, &p) else {
            continue;
        };
        let rt = height_reduce(&inst, &h, &p).unwrap();
        let errs = check_same_components(&inst, &h, &rt);
        assert!(errs.is_empty(), "seed {seed}: {errs:?}");
        if !rt.is_identity() {
            reattached += 1;
        }
        for sol in [
            exact_opt(&rt.tree, DEFAULT_EXACT_LIMIT).unwrap().solution,
            itp_heuristic(&rt.tree, &p, ItpMode::NextFit).unwrap(),
        ] {
            let back = map_back(&rt, &sol).unwrap();
            assert!(check_feasible(&inst, &back).is_feasible(), "seed {seed}");
            assert!(back.cost(&inst) <= sol.cost(&rt.tree), "seed {seed}");
        }
        done += 1;
    }
    assert!(
        reattached >= 10,
        "only {reattached} instances were re-attached"
    );
}

pub fn value_set_suite() {
    let p = Params::relaxed(&q(1, 2)).unwrap();
    for seed in 0..50u64 {
        let inst = gen_random(&RandomSpec::new(10, DemandDistribution::Dyadic, seed)).unwrap();
        let h = decompose(&inst, &p);
        let vs = build_value_sets(&inst, &h, &p, DEFAULT_Y_CAP).unwrap();
        let one = Rational::one();
        for (c, parts) in vs.q_c.iter().enumerate() {
            // Q_c partitions the component's terminals.
            let mut covered: Vec<usize> = parts.iter().flat_map(|x| x.terminals.clone()).collect();
            covered.sort();
            let expected: Vec<usize> = h.components[c]
                .edges
                .iter()
                .copied()
                .filter(|&v| inst.is_terminal(v))
                .collect();
            assert_eq!(covered, expected);
            let bigs = h.big_terminals_of[c].len();
            assert!(parts.len() <= h.cells_of_component(c).len() + bigs);
            let sums = subset_sums(parts.iter().map(|x| &x.demand));
            let mut yc: BTreeSet<Rational> = sums.into_iter().filter(|s| *s > p.alpha).collect();
            yc.insert(p.alpha.clone());
            assert_eq!(vs.y_c[c], yc);
            assert!(vs.y_c[c].is_subset(&vs.y));
        }
        for a in &vs.y {
            assert!(*a >= p.alpha && *a <= one);
            for b in &vs.y {
                if a + b <= one {
                    assert!(vs.contains(&(a + b)), "seed {seed}: {a} + {b}");
                }
            }
        }
    }
}

pub fn check_rounding(demands: &[Rational], m: usize) {
    let beta = q(1, m as i64);
    let r = adaptive_round(demands, &beta).unwrap();
    let total: Rational = demands.iter().cloned().sum();
    let discarded: Rational = r.discarded.iter().cloned().sum();
    assert!(discarded <= total);
    if demands.len() <= m {
        let mut got = r.rounded();
        let mut want = demands.to_vec();
        got.sort();
        want.sort();
        assert_eq!(got, want);
        return;
    }
    assert_eq!(r.groups.len(), m);
    let size = r.groups[0].len();
    assert!(r.groups.iter().all(|g| g.len() == size));
    assert_eq!(size * m, demands.len() + r.padding);
    // The padded groups, flattened, are the sorted input with zeros in front.
    let mut flat: Vec<Rational> = r.groups.iter().flatten().cloned().collect();
    let mut want = vec![Rational::zero(); r.padding];
    let mut sorted = demands.to_vec();
    sorted.sort();
    want.extend(sorted);
    assert_eq!(flat, want);
    flat.clear();
    let distinct: BTreeSet<&Rational> = r.slots.iter().map(|(v, _)| v).collect();
    assert!(distinct.len() <= m);
    let mut at = 0;
    for i in 1..m {
        let max = r.groups[i - 1].iter().max().unwrap();
        assert!(r.groups[i - 1].iter().all(|d| d <= max));
        for orig in &r.groups[i] {
            let (new, slot) = &r.slots[at];
            assert_eq!(new, max);
            assert_eq!(slot, orig);
            assert!(new <= slot);
            at += 1;
        }
    }
    assert_eq!(at, r.slots.len());
    let mut counts: BTreeMap<&Rational, i32> = BTreeMap::new();
    for d in &r.discarded {
        *counts.entry(d).or_default() += 1;
    }
    for d in &r.groups[m - 1] {
        *counts.entry(d).or_default() -= 1;
    }
    assert!(counts.values().all(|&c| c == 0));
}

/// Random multisets of demands `k/64` rounded with `1/beta` in `1..8`.
pub fn rounding_suite(cases: u32) {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner =
        TestRunner::new_with_rng(config, TestRng::deterministic_rng(RngAlgorithm::ChaCha));
    let strategy = (proptest::collection::vec(1i64..=64, 1..40), 1usize..8);
    let result = runner.run(&strategy, |(raw, m)| {
        let demands: Vec<Rational> = raw.iter().map(|&k| q(k, 64)).collect();
        check_rounding(&demands, m);
        Ok(())
    });
    if let Err(e) = result {
        panic!("{e}");
    }
}
