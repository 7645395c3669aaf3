use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Instance, InstanceError, VertexId};
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DemandDistribution {
    /// `k / 2^j` with `j` in `1..=6`.
    Dyadic,
    /// Two-digit decimals in `(0, 1]`.
    Uniform,
}

#[derive(Debug, Clone)]
pub struct RandomSpec {
    pub terminals: usize,
    pub distribution: DemandDistribution,
    /// Edge weights are integers drawn from `1..=max_weight`.
    pub max_weight: u32,
    pub seed: u64,
}

impl RandomSpec {
    pub fn new(terminals: usize, distribution: DemandDistribution, seed: u64) -> Self {
        RandomSpec {
            terminals,
            distribution,
            max_weight: 10,
            seed,
        }
    }
}

fn draw_demand(rng: &mut ChaCha8Rng, dist: DemandDistribution) -> Rational {
    match dist {
        DemandDistribution::Dyadic => {
            let j = rng.gen_range(1..=6u32);
            let den = 1i64 << j;
            Rational::new(rng.gen_range(1..=den), den)
        }
        DemandDistribution::Uniform => Rational::new(rng.gen_range(1..=100), 100),
    }
}

/// `count` demands drawn from `dist`, seeded.
pub fn random_demands(count: usize, dist: DemandDistribution, seed: u64) -> Vec<Rational> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| draw_demand(&mut rng, dist)).collect()
}

fn check_spec(spec: &RandomSpec) -> Result<(), InstanceError> {
    if spec.terminals == 0 {
        return Err(InstanceError::Invalid(
            "at least one terminal is required".into(),
        ));
    }
    if spec.max_weight == 0 {
        return Err(InstanceError::Invalid("max_weight must be positive".into()));
    }
    Ok(())
}

/// Random full binary tree hanging below a root of degree one, terminals at the leaves.
pub fn gen_random(spec: &RandomSpec) -> Result<Instance, InstanceError> {
    check_spec(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut parent: Vec<Option<VertexId>> = vec![None, Some(0)];
    let mut leaves = vec![1];
    while leaves.len() < spec.terminals {
        let v = leaves.swap_remove(rng.gen_range(0..leaves.len()));
        for _ in 0..2 {
            leaves.push(parent.len());
            parent.push(Some(v));
        }
    }
    let weight = (0..parent.len())
        .map(|v| {
            if v == 0 {
                Rational::zero()
            } else {
                Rational::from_integer(rng.gen_range(1..=spec.max_weight) as i64)
            }
        })
        .collect();
    leaves.sort_unstable();
    let demands = leaves
        .into_iter()
        .map(|v| (v, draw_demand(&mut rng, spec.distribution)))
        .collect();
    Instance::new(parent, weight, demands)
}

/// A path of `terminals` spine vertices below the root, each with a pendant terminal leaf.
pub fn gen_caterpillar(spec: &RandomSpec) -> Result<Instance, InstanceError> {
    check_spec(spec)?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut parent = vec![None];
    let mut weight = vec![Rational::zero()];
    let mut demands = BTreeMap::new();
    let mut spine = 0;
    for _ in 0..spec.terminals {
        let s = parent.len();
        parent.push(Some(spine));
        weight.push(Rational::from_integer(
            rng.gen_range(1..=spec.max_weight) as i64
        ));
        let leaf = parent.len();
        parent.push(Some(s));
        weight.push(Rational::from_integer(
            rng.gen_range(1..=spec.max_weight) as i64
        ));
        demands.insert(leaf, draw_demand(&mut rng, spec.distribution));
        spine = s;
    }
    Instance::new(parent, weight, demands)
}

fn check_sizes(sizes: &[Rational]) -> Result<(), InstanceError> {
    if sizes.is_empty() {
        return Err(InstanceError::Invalid(
            "bin packing reduction needs at least one item".into(),
        ));
    }
    for (i, s) in sizes.iter().enumerate() {
        if !s.is_positive() || s > &Rational::one() {
            return Err(InstanceError::DemandOutOfRange {
                vertex: i + 1,
                value: s.clone(),
            });
        }
    }
    Ok(())
}

/// Path `r, v1, .., vn` with `w(r, v1) = 1`, all other edges free, `demand(v_i) = sizes[i-1]`.
pub fn gen_binpacking_path(sizes: &[Rational]) -> Result<Instance, InstanceError> {
    check_sizes(sizes)?;
    let n = sizes.len();
    let parent = (0..=n)
        .map(|v| if v == 0 { None } else { Some(v - 1) })
        .collect();
    let weight = (0..=n)
        .map(|v| {
            if v == 1 {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    let demands = sizes
        .iter()
        .enumerate()
        .map(|(i, s)| (i + 1, s.clone()))
        .collect();
    Instance::new(parent, weight, demands)
}

/// Star at `v0` with `w(r, v0) = 1` and free leaf edges carrying the item sizes.
pub fn gen_binpacking_star(sizes: &[Rational]) -> Result<Instance, InstanceError> {
    check_sizes(sizes)?;
    let n = sizes.len();
    let parent = (0..=n + 1)
        .map(|v| {
            if v == 0 {
                None
            } else if v == 1 {
                Some(0)
            } else {
                Some(1)
            }
        })
        .collect();
    let weight = (0..=n + 1)
        .map(|v| {
            if v == 1 {
                Rational::one()
            } else {
                Rational::zero()
            }
        })
        .collect();
    let demands = sizes
        .iter()
        .enumerate()
        .map(|(i, s)| (i + 2, s.clone()))
        .collect();
    Instance::new(parent, weight, demands)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::q;

    #[test]
    fn random_is_seeded_and_normalized() {
        for seed in 0..20 {
            let spec = RandomSpec::new(7, DemandDistribution::Dyadic, seed);
            let a = gen_random(&spec).unwrap();
            let b = gen_random(&spec).unwrap();
            assert_eq!(
                crate::instance::write_instance(&a),
                crate::instance::write_instance(&b)
            );
            assert_eq!(a.num_terminals(), 7);
            assert!(a.is_normalized());
            for t in a.terminals() {
                let d = a.demand(t).unwrap();
                assert!(d.is_positive() && d <= &Rational::one());
                assert!((d * Rational::from_integer(64)).is_integer());
            }
        }
    }

    #[test]
    fn uniform_demands_are_hundredths() {
        let inst = gen_random(&RandomSpec::new(5, DemandDistribution::Uniform, 3)).unwrap();
        for t in inst.terminals() {
            assert!((inst.demand(t).unwrap() * Rational::from_integer(100)).is_integer());
        }
    }

    #[test]
    fn caterpillar_shape() {
        let inst = gen_caterpillar(&RandomSpec::new(4, DemandDistribution::Dyadic, 1)).unwrap();
        assert_eq!(inst.len(), 9);
        assert_eq!(inst.num_terminals(), 4);
    }

    #[test]
    fn binpacking_shapes() {
        let sizes = [q(3, 5), q(3, 5), q(2, 5), q(2, 5)];
        let path = gen_binpacking_path(&sizes).unwrap();
        assert_eq!(path.len(), 5);
        assert_eq!(path.dist(4), &Rational::one());
        let star = gen_binpacking_star(&sizes).unwrap();
        assert_eq!(star.len(), 6);
        assert_eq!(star.children(1).len(), 4);
        assert!(gen_binpacking_path(&[]).is_err());
        assert!(gen_binpacking_star(&[q(3, 2)]).is_err());
    }
}
