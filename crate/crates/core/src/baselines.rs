//! Exact oracles and tour-partitioning heuristics used for comparison.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::instance::{tour_cost, Instance, Solution, Tour, VertexId};
use crate::params::Params;
use crate::rational::Rational;

pub const DEFAULT_EXACT_LIMIT: usize = 14;
pub const BINPACKING_LIMIT: usize = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BaselineError {
    #[error("{count} items exceed the exhaustive-search limit of {limit}")]
    LimitExceeded { count: usize, limit: usize },
    #[error("size {0} outside (0,1]")]
    SizeOutOfRange(Rational),
    #[error("terminal {vertex} has demand {demand} above alpha = {alpha}")]
    DemandAboveAlpha {
        vertex: VertexId,
        demand: Rational,
        alpha: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleResult {
    pub cost: Rational,
    pub solution: Solution,
    /// Number of (set, subset) pairs examined by the partition search.
    pub explored: u64,
}

/// Minimum-cost partition of `n` items where `single[mask]` is the cost of
/// one group (`None` if infeasible). Returns the cost, the groups and the
/// number of pairs examined.
fn partition_min<T: Clone + Ord + std::ops::Add<Output = T>>(
    n: usize,
    single: &[Option<T>],
    zero: T,
) -> (T, Vec<usize>, u64) {
    let full = (1usize << n) - 1;
    let mut best: Vec<Option<(T, usize)>> = vec![None; full + 1];
    best[0] = Some((zero, 0));
    let mut explored = 0u64;
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub_rest = rest;
        let mut cur: Option<(T, usize)> = None;
        loop {
            let sub = sub_rest | low;
            explored += 1;
            if let (Some(c), Some((prev, _))) = (&single[sub], &best[mask ^ sub]) {
                let cost = prev.clone() + c.clone();
                if cur.as_ref().is_none_or(|(b, _)| cost < *b) {
                    cur = Some((cost, sub));
                }
            }
            if sub_rest == 0 {
                break;
            }
            sub_rest = (sub_rest - 1) & rest;
        }
        best[mask] = cur;
    }
    let (cost, _) = best[full].clone().expect("singletons are feasible");
    let mut groups = Vec::new();
    let mut m = full;
    while m != 0 {
        let sub = best[m].as_ref().expect("reachable").1;
        groups.push(sub);
        m ^= sub;
    }
    (cost, groups, explored)
}

/// Exact optimum by subset dynamic programming over the terminals.
pub fn exact_opt(inst: &Instance, limit: usize) -> Result<OracleResult, BaselineError> {
    let terms: Vec<VertexId> = inst.terminals().collect();
    let n = terms.len();
    if n > limit {
        return Err(BaselineError::LimitExceeded { count: n, limit });
    }
    if n == 0 {
        return Ok(OracleResult {
            cost: Rational::zero(),
            solution: Solution::default(),
            explored: 0,
        });
    }
    let one = Rational::one();
    let full = (1usize << n) - 1;
    let mut demand = vec![Rational::zero(); full + 1];
    let mut single: Vec<Option<Rational>> = vec![None; full + 1];
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        demand[mask] = &demand[mask & (mask - 1)] + inst.demand(terms[low]).expect("terminal");
        if demand[mask] <= one {
            let vs: Vec<VertexId> = (0..n)
                .filter(|i| mask >> i & 1 == 1)
                .map(|i| terms[i])
                .collect();
            single[mask] = Some(tour_cost(inst, &vs));
        }
    }
    // Costs share a denominator; run the search on scaled integers when they fit.
    let lcm = single
        .iter()
        .flatten()
        .fold(BigInt::one(), |l, c| l.lcm(c.denom()));
    let scaled: Option<Vec<Option<i128>>> = single
        .iter()
        .map(|c| match c {
            None => Some(None),
            Some(c) => (c.numer() * (&lcm / c.denom()))
                .to_i128()
                .filter(|v| *v < i128::MAX >> 8)
                .map(Some),
        })
        .collect();
    let (cost, groups, explored) = match scaled {
        Some(s) => {
            let (c, g, e) = partition_min(n, &s, 0i128);
            (
                Rational::from_bigint(BigInt::from(c)) / Rational::from_bigint(lcm),
                g,
                e,
            )
        }
        None => partition_min(n, &single, Rational::zero()),
    };
    let tours = groups
        .into_iter()
        .map(|g| Tour::new((0..n).filter(|i| g >> i & 1 == 1).map(|i| terms[i])))
        .collect();
    Ok(OracleResult {
        cost,
        solution: Solution::new(tours),
        explored,
    })
}

/// Minimum number of unit bins, by exhaustive subset search.
pub fn binpacking_opt(sizes: &[Rational]) -> Result<usize, BaselineError> {
    if sizes.len() > BINPACKING_LIMIT {
        return Err(BaselineError::LimitExceeded {
            count: sizes.len(),
            limit: BINPACKING_LIMIT,
        });
    }
    let one = Rational::one();
    for s in sizes {
        if !s.is_positive() || *s > one {
            return Err(BaselineError::SizeOutOfRange(s.clone()));
        }
    }
    if sizes.is_empty() {
        return Ok(0);
    }
    let n = sizes.len();
    let full = (1usize << n) - 1;
    let mut total = vec![Rational::zero(); full + 1];
    let mut single: Vec<Option<u32>> = vec![None; full + 1];
    for mask in 1..=full {
        let low = mask.trailing_zeros() as usize;
        total[mask] = &total[mask & (mask - 1)] + &sizes[low];
        if total[mask] <= one {
            single[mask] = Some(1);
        }
    }
    let (bins, _, _) = partition_min(n, &single, 0u32);
    Ok(bins as usize)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ItpMode {
    NextFit,
    SmallDemand,
}

/// Terminals in depth-first order, children by increasing id.
pub fn dfs_terminals(inst: &Instance) -> Vec<VertexId> {
    let mut out = Vec::new();
    let mut stack = vec![inst.root()];
    while let Some(v) = stack.pop() {
        if inst.is_terminal(v) {
            out.push(v);
        }
        let mut kids = inst.children(v).to_vec();
        kids.sort_unstable_by(|a, b| b.cmp(a));
        stack.extend(kids);
    }
    out
}

/// Splits the depth-first terminal sequence into consecutive segments, one tour each.
pub fn itp_heuristic(
    inst: &Instance,
    p: &Params,
    mode: ItpMode,
) -> Result<Solution, BaselineError> {
    let order = dfs_terminals(inst);
    let one = Rational::one();
    if mode == ItpMode::SmallDemand {
        for &v in &order {
            let d = inst.demand(v).expect("terminal");
            if *d > p.alpha {
                return Err(BaselineError::DemandAboveAlpha {
                    vertex: v,
                    demand: d.clone(),
                    alpha: p.alpha.clone(),
                });
            }
        }
    }
    let close_at = &one - &p.alpha;
    let mut tours = Vec::new();
    let mut seg: Vec<VertexId> = Vec::new();
    let mut load = Rational::zero();
    for v in order {
        let d = inst.demand(v).expect("terminal");
        if mode == ItpMode::NextFit && !seg.is_empty() && &load + d > one {
            tours.push(Tour::new(std::mem::take(&mut seg)));
            load = Rational::zero();
        }
        seg.push(v);
        load += d;
        if mode == ItpMode::SmallDemand && load >= close_at {
            tours.push(Tour::new(std::mem::take(&mut seg)));
            load = Rational::zero();
        }
    }
    if !seg.is_empty() {
        tours.push(Tour::new(seg));
    }
    Ok(Solution::new(tours))
}
