//! Subtree configuration values at component roots and critical vertices.

use std::collections::BTreeMap;

use crate::rational::Rational;

use super::{
    canon, Caps, DpError, Kind, LocalTable, RootTrace, StepEntry, SubtreeEntry, SubtreeKey,
};

fn check_len(key: &SubtreeKey, caps: &Caps) -> Result<(), DpError> {
    if key.len() > caps.cfg {
        return Err(DpError::Cap {
            what: "subtree list length",
            limit: caps.cfg,
        });
    }
    Ok(())
}

/// `g(r_c, ·)` from `f(c, ·)` and the exit table `g(e_c, ·)`; `exit` is `None`
/// for a component without exit. `spine_subtour` is twice the spine weight.
pub fn combine_root(
    local: &LocalTable,
    spine_subtour: &Rational,
    exit: Option<&BTreeMap<SubtreeKey, Rational>>,
    caps: &Caps,
) -> Result<BTreeMap<SubtreeKey, SubtreeEntry>, DpError> {
    let mut out: BTreeMap<SubtreeKey, SubtreeEntry> = BTreeMap::new();
    let one = Rational::one();
    for (lk, le) in &local.entries {
        let Some(exit) = exit else {
            let mut counts = BTreeMap::new();
            for (y, _) in lk {
                *counts.entry(y.clone()).or_insert(0u32) += 1;
            }
            let key = canon(counts);
            check_len(&key, caps)?;
            if out.get(&key).is_none_or(|e| le.cost < e.cost) {
                out.insert(
                    key,
                    SubtreeEntry {
                        cost: le.cost.clone(),
                        trace: RootTrace::Lift(lk.clone()),
                    },
                );
            }
            continue;
        };
        let passing: Vec<usize> = (0..lk.len())
            .filter(|&i| lk[i].1 == Kind::Passing)
            .collect();
        for (ek, ecost) in exit {
            let total: u32 = ek.iter().map(|(_, n)| n).sum();
            if (passing.len() as u32) > total {
                continue;
            }
            let base = &le.cost
                + ecost
                + spine_subtour * Rational::from_integer((total - passing.len() as u32) as i64);
            let mut rem: Vec<u32> = ek.iter().map(|(_, n)| *n).collect();
            let mut choice: Vec<usize> = Vec::with_capacity(passing.len());
            let mut emit = |choice: &[usize]| -> Result<(), DpError> {
                let mut counts: BTreeMap<Rational, u32> = BTreeMap::new();
                let mut used = vec![0u32; ek.len()];
                let mut assoc = Vec::new();
                for (pi, &j) in choice.iter().enumerate() {
                    let i = passing[pi];
                    used[j] += 1;
                    *counts.entry(&lk[i].0 + &ek[j].0).or_insert(0) += 1;
                    assoc.push((i, ek[j].0.clone()));
                }
                for (j, (y, n)) in ek.iter().enumerate() {
                    *counts.entry(y.clone()).or_insert(0) += n - used[j];
                }
                for (y, kind) in lk {
                    if *kind == Kind::Ending {
                        *counts.entry(y.clone()).or_insert(0) += 1;
                    }
                }
                let key = canon(counts);
                check_len(&key, caps)?;
                if out.get(&key).is_none_or(|e| base < e.cost) {
                    let trace = RootTrace::Combine {
                        local: lk.clone(),
                        exit: ek.clone(),
                        assoc,
                    };
                    out.insert(
                        key,
                        SubtreeEntry {
                            cost: base.clone(),
                            trace,
                        },
                    );
                }
                Ok(())
            };
            assign(&passing, lk, ek, &one, 0, &mut rem, &mut choice, &mut emit)?;
            if out.len() > caps.entries {
                return Err(DpError::Cap {
                    what: "subtree table entries",
                    limit: caps.entries,
                });
            }
        }
    }
    Ok(out)
}

/// Enumerates maps from passing entries to exit classes, non-decreasing over
/// runs of equal passing values.
#[allow(clippy::too_many_arguments)]
fn assign(
    passing: &[usize],
    lk: &[(Rational, Kind)],
    ek: &SubtreeKey,
    one: &Rational,
    at: usize,
    rem: &mut Vec<u32>,
    choice: &mut Vec<usize>,
    emit: &mut dyn FnMut(&[usize]) -> Result<(), DpError>,
) -> Result<(), DpError> {
    if at == passing.len() {
        return emit(choice);
    }
    let y = &lk[passing[at]].0;
    let start = if at > 0 && lk[passing[at - 1]].0 == *y {
        choice[at - 1]
    } else {
        0
    };
    for j in start..ek.len() {
        if rem[j] == 0 || &(y + &ek[j].0) > one {
            continue;
        }
        rem[j] -= 1;
        choice.push(j);
        assign(passing, lk, ek, one, at + 1, rem, choice, emit)?;
        choice.pop();
        rem[j] += 1;
    }
    Ok(())
}

/// Smallest value of `x` that is at least `y`.
pub fn round_up(x: &[Rational], y: &Rational) -> Option<Rational> {
    let i = x.partition_point(|v| v < y);
    x.get(i).cloned()
}

/// Rounds every value of a list up into `x`; `None` if some value exceeds `max x`.
pub fn round_list(x: &[Rational], key: &SubtreeKey) -> Option<SubtreeKey> {
    let mut counts = BTreeMap::new();
    for (y, n) in key {
        *counts.entry(round_up(x, y)?).or_insert(0u32) += n;
    }
    Some(canon(counts))
}

/// Every way to merge pairs of subtours of `acc` and `child` whose values sum
/// to at most 1: `(merged list, associations (ŷ, ȳ, count))`.
pub fn merge_lists(
    acc: &SubtreeKey,
    child: &SubtreeKey,
) -> Vec<(SubtreeKey, Vec<(Rational, Rational, u32)>)> {
    let one = Rational::one();
    let cells: Vec<(usize, usize)> = (0..acc.len())
        .flat_map(|p| (0..child.len()).map(move |j| (p, j)))
        .filter(|&(p, j)| &acc[p].0 + &child[j].0 <= one)
        .collect();
    let mut out = Vec::new();
    let mut row: Vec<u32> = acc.iter().map(|(_, n)| *n).collect();
    let mut col: Vec<u32> = child.iter().map(|(_, n)| *n).collect();
    let mut picks = vec![0u32; cells.len()];
    fn rec(
        at: usize,
        cells: &[(usize, usize)],
        acc: &SubtreeKey,
        child: &SubtreeKey,
        row: &mut Vec<u32>,
        col: &mut Vec<u32>,
        picks: &mut Vec<u32>,
        out: &mut Vec<(SubtreeKey, Vec<(Rational, Rational, u32)>)>,
    ) {
        if at == cells.len() {
            let mut counts: BTreeMap<Rational, u32> = BTreeMap::new();
            let mut assoc = Vec::new();
            for (c, &(p, j)) in cells.iter().enumerate() {
                if picks[c] > 0 {
                    *counts.entry(&acc[p].0 + &child[j].0).or_insert(0) += picks[c];
                    assoc.push((acc[p].0.clone(), child[j].0.clone(), picks[c]));
                }
            }
            for (p, (y, _)) in acc.iter().enumerate() {
                *counts.entry(y.clone()).or_insert(0) += row[p];
            }
            for (j, (y, _)) in child.iter().enumerate() {
                *counts.entry(y.clone()).or_insert(0) += col[j];
            }
            out.push((canon(counts), assoc));
            return;
        }
        let (p, j) = cells[at];
        let most = row[p].min(col[j]);
        for k in 0..=most {
            row[p] -= k;
            col[j] -= k;
            picks[at] = k;
            rec(at + 1, cells, acc, child, row, col, picks, out);
            row[p] += k;
            col[j] += k;
        }
        picks[at] = 0;
    }
    rec(
        0, &cells, acc, child, &mut row, &mut col, &mut picks, &mut out,
    );
    out
}

/// Left-to-right scan over the children of a critical vertex for one value
/// set `x`. `children[i]` is the table at the i-th child root and the weight
/// of its edge to the critical vertex. Returns `DP_1 .. DP_m`.
pub fn scan_critical(
    children: &[(&BTreeMap<SubtreeKey, Rational>, Rational)],
    x: &[Rational],
    caps: &Caps,
) -> Result<Vec<BTreeMap<SubtreeKey, StepEntry>>, DpError> {
    let mut steps: Vec<BTreeMap<SubtreeKey, StepEntry>> = Vec::new();
    let start: BTreeMap<SubtreeKey, StepEntry> = BTreeMap::from([(
        Vec::new(),
        StepEntry {
            cost: Rational::zero(),
            prev: Vec::new(),
            child: Vec::new(),
            assoc: Vec::new(),
        },
    )]);
    for (table, w) in children {
        let prev = steps.last().unwrap_or(&start);
        let mut next: BTreeMap<SubtreeKey, StepEntry> = BTreeMap::new();
        for (ck, ccost) in table.iter() {
            let Some(rounded) = round_list(x, ck) else {
                continue;
            };
            let count: u32 = ck.iter().map(|(_, n)| n).sum();
            let edge = Rational::from_integer(2 * count as i64) * w;
            for (pk, pe) in prev {
                let base = &pe.cost + ccost + &edge;
                for (key, assoc) in merge_lists(pk, &rounded) {
                    check_len(&key, caps)?;
                    if next.get(&key).is_none_or(|e| base < e.cost) {
                        next.insert(
                            key,
                            StepEntry {
                                cost: base.clone(),
                                prev: pk.clone(),
                                child: ck.clone(),
                                assoc,
                            },
                        );
                    }
                }
            }
            if next.len() > caps.entries {
                return Err(DpError::Cap {
                    what: "critical scan entries",
                    limit: caps.entries,
                });
            }
        }
        steps.push(next);
    }
    Ok(steps)
}

/// Candidate value sets `X` at a critical vertex. `pool` is the set the
/// candidates are drawn from, `top` must be covered by every candidate.
pub fn candidate_sets(
    pool: &[Rational],
    m: usize,
    budget: usize,
) -> Result<Vec<Vec<Rational>>, DpError> {
    if pool.len() <= m {
        return Ok(vec![pool.to_vec()]);
    }
    // Subsets of size m that contain the largest value.
    let rest = &pool[..pool.len() - 1];
    let top = pool.last().expect("nonempty").clone();
    let mut out = Vec::new();
    let mut idx: Vec<usize> = (0..m - 1).collect();
    loop {
        let mut x: Vec<Rational> = idx.iter().map(|&i| rest[i].clone()).collect();
        x.push(top.clone());
        out.push(x);
        // Next combination in lexicographic order.
        let mut i = m - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            i -= 1;
            if idx[i] < rest.len() - (m - 1 - i) {
                idx[i] += 1;
                for t in i + 1..m - 1 {
                    idx[t] = idx[t - 1] + 1;
                }
                if out.len() >= budget {
                    return Err(DpError::Cap {
                        what: "value-set candidates",
                        limit: budget,
                    });
                }
                break;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dp::LocalEntry;
    use crate::rational::q;

    fn local(entries: Vec<(LocalKey, i64)>) -> LocalTable {
        LocalTable {
            component: 0,
            entries: entries
                .into_iter()
                .map(|(k, c)| {
                    let masks = vec![0; k.len()];
                    (
                        k,
                        LocalEntry {
                            cost: q(c, 1),
                            masks,
                        },
                    )
                })
                .collect(),
        }
    }

    use crate::dp::LocalKey;

    #[test]
    fn leaf_component_lifts_counts() {
        let f = local(vec![
            (vec![(q(1, 4), Kind::Ending), (q(1, 4), Kind::Ending)], 6),
            (vec![(q(1, 2), Kind::Ending)], 4),
        ]);
        let g = combine_root(&f, &Rational::zero(), None, &Caps::default()).unwrap();
        assert_eq!(g.len(), 2);
        assert_eq!(g[&vec![(q(1, 4), 2)]].cost, q(6, 1));
        assert_eq!(g[&vec![(q(1, 2), 1)]].cost, q(4, 1));
    }

    #[test]
    fn passing_subtour_absorbs_exit_subtour() {
        let f = local(vec![(vec![(q(3, 10), Kind::Passing)], 5)]);
        let exit = BTreeMap::from([(vec![(q(1, 2), 1)], q(7, 1))]);
        let g = combine_root(&f, &q(6, 1), Some(&exit), &Caps::default()).unwrap();
        assert_eq!(g.len(), 1);
        assert_eq!(g[&vec![(q(4, 5), 1)]].cost, q(12, 1));
    }

    #[test]
    fn unassociated_exit_subtour_pays_spine() {
        let f = local(vec![(vec![], 0)]);
        let exit = BTreeMap::from([(vec![(q(1, 2), 1)], q(7, 1))]);
        let g = combine_root(&f, &q(6, 1), Some(&exit), &Caps::default()).unwrap();
        assert_eq!(g[&vec![(q(1, 2), 1)]].cost, q(13, 1));
    }

    #[test]
    fn passing_needs_capacity_and_partner() {
        let f = local(vec![(vec![(q(3, 5), Kind::Passing)], 5)]);
        let exit = BTreeMap::from([(vec![(q(1, 2), 1)], q(7, 1)), (vec![], q(0, 1))]);
        let g = combine_root(&f, &q(6, 1), Some(&exit), &Caps::default()).unwrap();
        assert!(g.is_empty());
    }

    #[test]
    fn one_child_adds_edge_cost() {
        let child = BTreeMap::from([
            (vec![(q(1, 2), 2)], q(10, 1)),
            (vec![(q(1, 1), 1)], q(9, 1)),
        ]);
        let x = vec![q(1, 2), q(1, 1)];
        let steps = scan_critical(&[(&child, q(3, 1))], &x, &Caps::default()).unwrap();
        assert_eq!(steps.len(), 1);
        assert_eq!(steps[0][&vec![(q(1, 2), 2)]].cost, q(22, 1));
        assert_eq!(steps[0][&vec![(q(1, 1), 1)]].cost, q(15, 1));
    }

    #[test]
    fn two_children_merge_or_stay_apart() {
        let child = BTreeMap::from([(vec![(q(1, 2), 1)], q(4, 1))]);
        let x = vec![q(1, 2)];
        let steps = scan_critical(
            &[(&child, Rational::zero()), (&child, Rational::zero())],
            &x,
            &Caps::default(),
        )
        .unwrap();
        let last = &steps[1];
        assert_eq!(last.len(), 2);
        assert_eq!(last[&vec![(q(1, 1), 1)]].cost, q(8, 1));
        assert_eq!(last[&vec![(q(1, 2), 2)]].cost, q(8, 1));
        assert_eq!(last[&vec![(q(1, 1), 1)]].assoc, vec![(q(1, 2), q(1, 2), 1)]);
    }

    #[test]
    fn no_children_gives_no_steps() {
        assert!(scan_critical(&[], &[q(1, 2)], &Caps::default())
            .unwrap()
            .is_empty());
    }

    #[test]
    fn rounding_into_value_set() {
        let x = vec![q(1, 4), q(3, 4)];
        assert_eq!(round_up(&x, &q(1, 8)), Some(q(1, 4)));
        assert_eq!(round_up(&x, &q(3, 4)), Some(q(3, 4)));
        assert_eq!(round_up(&x, &q(7, 8)), None);
        assert_eq!(
            round_list(&x, &vec![(q(1, 8), 1), (q(1, 4), 2), (q(1, 2), 1)]),
            Some(vec![(q(1, 4), 3), (q(3, 4), 1)])
        );
    }

    #[test]
    fn candidates_keep_the_top_value() {
        let pool: Vec<Rational> = (1..=5).map(|i| q(i, 5)).collect();
        let xs = candidate_sets(&pool, 3, 100).unwrap();
        assert_eq!(xs.len(), 6);
        assert!(xs.iter().all(|x| x.len() == 3 && x[2] == q(1, 1)));
        assert_eq!(candidate_sets(&pool, 5, 1).unwrap(), vec![pool.clone()]);
        assert!(candidate_sets(&pool, 3, 5).is_err());
        assert_eq!(candidate_sets(&pool, 3, 6).unwrap().len(), 6);
    }
}
