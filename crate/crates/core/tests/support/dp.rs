use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use ucvrp_core::baselines::{
    binpacking_opt, dfs_terminals, exact_opt, itp_heuristic, ItpMode, DEFAULT_EXACT_LIMIT,
};
use ucvrp_core::dp::solve;
use ucvrp_core::instance::{
    check_feasible, gen_binpacking_path, gen_binpacking_star, gen_random, random_demands,
    DemandDistribution, RandomSpec,
};
use ucvrp_core::{Instance, Params, Rational};

use super::q;

pub fn params() -> Params {
    Params::relaxed(&q(1, 2)).unwrap()
}

/// The 200-instance suite: seed `s` has `1 + s mod 12` terminals with dyadic demands.
pub fn suite_instance(seed: u64) -> Instance {
    let n = 1 + (seed as usize % 12);
    gen_random(&RandomSpec::new(n, DemandDistribution::Dyadic, seed)).unwrap()
}

/// Feasibility and oracle dominance; returns the mean cost ratios of the
/// dynamic program and of next-fit ITP against the optimum.
pub fn oracle_suite() -> (f64, f64) {
    let p = params();
    let (mut sum_dp, mut sum_itp) = (0.0, 0.0);
    for seed in 0..200u64 {
        let inst = suite_instance(seed);
        let out = solve(&inst, &p).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        let report = check_feasible(&inst, &out.solution);
        assert!(report.is_feasible(), "seed {seed}: {:?}", report.violations);
        assert_eq!(out.solution.cost(&inst), out.cost);
        assert!(out.cost <= out.table_cost);
        assert_eq!(out.stats.values_outside_y, 0);
        let opt = exact_opt(&inst, DEFAULT_EXACT_LIMIT).unwrap();
        assert!(out.cost >= opt.cost, "seed {seed}");
        let itp = itp_heuristic(&inst, &p, ItpMode::NextFit)
            .unwrap()
            .cost(&inst);
        sum_dp += (out.cost.clone() / opt.cost.clone()).to_f64();
        sum_itp += (itp / opt.cost.clone()).to_f64();
    }
    (sum_dp / 200.0, sum_itp / 200.0)
}

/// Wide bands and small components: components get re-attached and the
/// critical-vertex scan merges subtours from different children.
pub fn reattached_suite() -> usize {
    let mut p = params();
    p.set("gamma", q(1, 1)).unwrap();
    p.set("alpha", q(1, 2)).unwrap();
    p.set("gamma_prime", q(1, 8)).unwrap();
    let mut reattached = 0;
    for seed in 0..60u64 {
        let n = 4 + (seed as usize % 9);
        let inst =
            gen_random(&RandomSpec::new(n, DemandDistribution::Dyadic, 1000 + seed)).unwrap();
        let out = solve(&inst, &p).unwrap_or_else(|e| panic!("seed {seed}: {e}"));
        assert!(
            check_feasible(&inst, &out.solution).is_feasible(),
            "seed {seed}"
        );
        assert!(out.cost <= out.table_cost);
        assert_eq!(out.stats.values_outside_y, 0);
        if !out.stats.reduced_identity {
            reattached += 1;
        }
    }
    reattached
}

/// Path and star reductions from bin packing on 50 random size lists.
pub fn binpacking_suite() {
    for seed in 0..50u64 {
        let len = 1 + (seed as usize % 8);
        let dist = if seed % 2 == 0 {
            DemandDistribution::Dyadic
        } else {
            DemandDistribution::Uniform
        };
        let sizes = random_demands(len, dist, seed);
        let bins = binpacking_opt(&sizes).unwrap();
        let want = Rational::from_integer(2 * bins as i64);
        for inst in [
            gen_binpacking_path(&sizes).unwrap(),
            gen_binpacking_star(&sizes).unwrap(),
        ] {
            let opt = exact_opt(&inst, DEFAULT_EXACT_LIMIT).unwrap();
            assert_eq!(opt.cost, want, "seed {seed} sizes {sizes:?}");
        }
    }
}

/// Next-fit segments closed at `1 - alpha` on random trees whose demands are at most alpha.
pub fn small_demand_suite() {
    for seed in 0..100u64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut p = params();
        let alpha = [q(1, 16), q(1, 8), q(1, 4)][seed as usize % 3].clone();
        p.set("alpha", alpha.clone()).unwrap();
        let n = rng.gen_range(1..=60);
        let shape = gen_random(&RandomSpec::new(n, DemandDistribution::Dyadic, seed)).unwrap();
        let top = (&alpha * q(256, 1)).to_u64().unwrap() as i64;
        let demands: BTreeMap<usize, Rational> = shape
            .terminals()
            .map(|t| (t, q(rng.gen_range(1..=top), 256)))
            .collect();
        let inst =
            Instance::new(shape.parents().to_vec(), shape.weights().to_vec(), demands).unwrap();
        let sol = itp_heuristic(&inst, &p, ItpMode::SmallDemand).unwrap();
        assert!(check_feasible(&inst, &sol).is_feasible(), "seed {seed}");
        let order = dfs_terminals(&inst);
        let mut at = 0;
        let low = Rational::one() - &alpha;
        for (i, tour) in sol.tours.iter().enumerate() {
            let seg = &order[at..at + tour.terminals.len()];
            assert!(
                seg.iter().all(|v| tour.terminals.contains(v)),
                "seed {seed}"
            );
            at += seg.len();
            let d = tour.demand(&inst);
            assert!(d <= Rational::one());
            if i + 1 < sol.tours.len() {
                assert!(d >= low, "seed {seed}: segment {i} has demand {d}");
            }
        }
        assert_eq!(at, order.len());
    }
}

/// `[0.6, 0.6, 0.4, 0.4]` on a path costs exactly 4.
pub fn anchor() {
    let inst = gen_binpacking_path(&[q(3, 5), q(3, 5), q(2, 5), q(2, 5)]).unwrap();
    let out = solve(&inst, &params()).unwrap();
    assert_eq!(out.cost, q(4, 1));
    assert_eq!(exact_opt(&inst, DEFAULT_EXACT_LIMIT).unwrap().cost, q(4, 1));
    assert!(check_feasible(&inst, &out.solution).is_feasible());
}
