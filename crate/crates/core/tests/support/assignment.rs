use proptest::prelude::*;
use proptest::test_runner::{Config, TestRunner};
use ucvrp_core::assignment::{assign, BipartiteWeights};
use ucvrp_core::Rational;

/// Random bipartite graphs where every b has a neighbour and w(b) is a fraction of its incident weight.
pub fn graphs() -> impl Strategy<Value = BipartiteWeights> {
    (1usize..=8, 1usize..=8).prop_flat_map(|(na, nb)| {
        let edges =
            prop::collection::vec(prop::collection::vec((any::<bool>(), 0i64..=16), na), nb);
        let shares = prop::collection::vec(0i64..=8, nb);
        (Just(na), edges, shares).prop_map(move |(na, edges, shares)| {
            let mut g = BipartiteWeights::new(na, Vec::new());
            for (b, row) in edges.iter().enumerate() {
                let mut incident = Rational::zero();
                let mut any = false;
                for (a, &(present, w)) in row.iter().enumerate() {
                    if present || (!any && a == row.len() - 1) {
                        let w = Rational::new(w, 16);
                        incident += &w;
                        g.add_edge(a, b, w);
                        any = true;
                    }
                }
                g.b_weight.push(incident * Rational::new(shares[b], 8));
            }
            g
        })
    })
}

pub fn check(g: &BipartiteWeights) -> Result<(), TestCaseError> {
    let f = assign(g).map_err(|e| TestCaseError::fail(e.to_string()))?;
    prop_assert_eq!(f.len(), g.b_weight.len());
    let max_b = g
        .b_weight
        .iter()
        .cloned()
        .fold(Rational::zero(), Rational::max);
    for a in 0..g.a_count {
        let received: Rational = f
            .iter()
            .enumerate()
            .filter(|(_, &fa)| fa == a)
            .map(|(b, _)| g.b_weight[b].clone())
            .sum();
        let incident: Rational = g
            .edges
            .iter()
            .filter(|((aa, _), _)| *aa == a)
            .map(|(_, w)| w.clone())
            .sum();
        prop_assert!(received - incident <= max_b.clone());
    }
    for (b, &a) in f.iter().enumerate() {
        prop_assert!(g.edges.contains_key(&(a, b)));
    }
    prop_assert_eq!(assign(g).unwrap(), f);
    Ok(())
}

/// Runs `cases` random instances with a fixed seed.
pub fn assignment_suite(cases: u32) {
    let config = Config {
        cases,
        failure_persistence: None,
        ..Config::default()
    };
    let mut runner = TestRunner::new_with_rng(
        config,
        proptest::test_runner::TestRng::deterministic_rng(
            proptest::test_runner::RngAlgorithm::ChaCha,
        ),
    );
    if let Err(e) = runner.run(&graphs(), |g| check(&g)) {
        panic!("{e}");
    }
}
