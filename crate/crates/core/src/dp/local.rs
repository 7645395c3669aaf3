//! Local configuration values inside one component.

use std::collections::{BTreeMap, BTreeSet};

use crate::decompose::Region;
use crate::instance::{Instance, VertexId};
use crate::rational::Rational;
use crate::structure::Part;

use super::{Caps, DpError, Kind, LocalEntry, LocalKey, LocalTable};

/// Twice the weight of the edges needed to reach `vertices` from `root`.
pub fn span_cost(
    inst: &Instance,
    root: VertexId,
    vertices: impl IntoIterator<Item = VertexId>,
) -> Rational {
    let mut edges = BTreeSet::new();
    for v in vertices {
        edges.extend(inst.path_edges(root, v));
    }
    edges
        .iter()
        .map(|&e| inst.weight(e).clone())
        .sum::<Rational>()
        * Rational::from_integer(2)
}

/// Per-mask demand and subtour costs for the parts of one component.
pub(crate) struct MaskData {
    pub demand: Vec<Rational>,
    pub ending: Vec<Option<Rational>>,
    pub passing: Vec<Option<Rational>>,
}

pub(crate) fn mask_data(
    inst: &Instance,
    comp: &Region,
    parts: &[Part],
    caps: &Caps,
) -> Result<MaskData, DpError> {
    let k = parts.len();
    if k > caps.parts {
        return Err(DpError::Cap {
            what: "parts per component",
            limit: caps.parts,
        });
    }
    let one = Rational::one();
    let n = 1usize << k;
    let mut demand = vec![Rational::zero(); n];
    let mut ending = vec![None; n];
    let mut passing = vec![None; n];
    for mask in 1..n {
        let low = mask.trailing_zeros() as usize;
        demand[mask] = &demand[mask & (mask - 1)] + &parts[low].demand;
        if demand[mask] > one {
            continue;
        }
        let terminals: Vec<VertexId> = (0..k)
            .filter(|i| mask >> i & 1 == 1)
            .flat_map(|i| parts[i].terminals.iter().copied())
            .collect();
        ending[mask] = Some(span_cost(inst, comp.root, terminals.iter().copied()));
        if let Some(e) = comp.exit {
            passing[mask] = Some(span_cost(inst, comp.root, terminals.into_iter().chain([e])));
        }
    }
    Ok(MaskData {
        demand,
        ending,
        passing,
    })
}

fn tight(demand: &Rational, alpha: &Rational) -> Rational {
    if demand < alpha {
        alpha.clone()
    } else {
        demand.clone()
    }
}

/// `f(c, ·)` over tight lists: every list whose values are `max(alpha, demand)`
/// of the parts of some partition of `Q_c`, with the cheapest such partition.
pub fn local_table(
    inst: &Instance,
    c: usize,
    comp: &Region,
    parts: &[Part],
    alpha: &Rational,
    caps: &Caps,
) -> Result<LocalTable, DpError> {
    let md = mask_data(inst, comp, parts, caps)?;
    let k = parts.len();
    let full = (1usize << k) - 1;
    let kinds: &[Kind] = if comp.exit.is_some() {
        &[Kind::Ending, Kind::Passing]
    } else {
        &[Kind::Ending]
    };
    // Partial tables keyed by the set of parts already covered; each part
    // set is split off with its lowest part, so every partition appears once.
    let mut tables: Vec<Option<BTreeMap<LocalKey, LocalEntry>>> = vec![None; full + 1];
    tables[0] = Some(BTreeMap::from([(
        Vec::new(),
        LocalEntry {
            cost: Rational::zero(),
            masks: Vec::new(),
        },
    )]));
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut out: BTreeMap<LocalKey, LocalEntry> = BTreeMap::new();
        let mut sub_rest = rest;
        loop {
            let sub = sub_rest | low;
            if md.ending[sub].is_some() {
                let y = tight(&md.demand[sub], alpha);
                let prev = tables[mask ^ sub].as_ref().expect("smaller mask done");
                for kind in kinds {
                    let cost_here = match kind {
                        Kind::Ending => md.ending[sub].as_ref(),
                        Kind::Passing => md.passing[sub].as_ref(),
                    }
                    .expect("feasible part");
                    for (key, entry) in prev {
                        let mut slots: Vec<(Rational, Kind, usize)> = key
                            .iter()
                            .zip(&entry.masks)
                            .map(|((y, k), &m)| (y.clone(), *k, m))
                            .collect();
                        slots.push((y.clone(), *kind, sub));
                        slots.sort();
                        if slots.len() > caps.cfg {
                            return Err(DpError::Cap {
                                what: "local list length",
                                limit: caps.cfg,
                            });
                        }
                        let cost = &entry.cost + cost_here;
                        let new_key: LocalKey =
                            slots.iter().map(|(y, k, _)| (y.clone(), *k)).collect();
                        let better = out.get(&new_key).is_none_or(|e| cost < e.cost);
                        if better {
                            let masks = slots.iter().map(|s| s.2).collect();
                            out.insert(new_key, LocalEntry { cost, masks });
                        }
                    }
                }
            }
            if sub_rest == 0 {
                break;
            }
            sub_rest = (sub_rest - 1) & rest;
        }
        if out.len() > caps.entries {
            return Err(DpError::Cap {
                what: "local table entries",
                limit: caps.entries,
            });
        }
        tables[mask] = Some(out);
    }
    let entries = tables[full].take().expect("full mask done");
    Ok(LocalTable {
        component: c,
        entries,
    })
}

/// Cheapest partition of `Q_c` into ending subtours when every subtour also
/// pays `extra`. Returns the cost and the part masks.
pub fn local_min(
    inst: &Instance,
    comp: &Region,
    parts: &[Part],
    extra: &Rational,
    caps: &Caps,
) -> Result<(Rational, Vec<usize>), DpError> {
    let md = mask_data(inst, comp, parts, caps)?;
    let full = (1usize << parts.len()) - 1;
    let mut best: Vec<Option<(Rational, usize)>> = vec![None; full + 1];
    best[0] = Some((Rational::zero(), 0));
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let mut sub_rest = rest;
        let mut cur: Option<(Rational, usize)> = None;
        loop {
            let sub = sub_rest | low;
            if let (Some(c), Some((prev, _))) = (&md.ending[sub], &best[mask ^ sub]) {
                let cost = prev + c + extra;
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
    let (cost, _) = best[full]
        .clone()
        .expect("singleton parts are always feasible");
    let mut masks = Vec::new();
    let mut m = full;
    while m != 0 {
        let (_, sub) = best[m].clone().expect("reachable");
        masks.push(sub);
        m ^= sub;
    }
    Ok((cost, masks))
}

/// Direct evaluation of one list by trying every assignment of parts to its
/// entries; each entry must receive at least one part and demand at most its
/// value. `None` when no assignment fits.
pub fn local_value_direct(
    inst: &Instance,
    comp: &Region,
    parts: &[Part],
    list: &[(Rational, Kind)],
) -> Option<Rational> {
    let k = parts.len();
    let l = list.len();
    if l == 0 {
        return if k == 0 { Some(Rational::zero()) } else { None };
    }
    if k < l || (list.iter().any(|(_, kind)| *kind == Kind::Passing) && comp.exit.is_none()) {
        return None;
    }
    let mut best: Option<Rational> = None;
    let mut slot = vec![0usize; k];
    loop {
        let mut groups: Vec<Vec<usize>> = vec![Vec::new(); l];
        for (i, &s) in slot.iter().enumerate() {
            groups[s].push(i);
        }
        let mut total = Rational::zero();
        let mut ok = true;
        for (g, (y, kind)) in groups.iter().zip(list) {
            let demand: Rational = g.iter().map(|&i| parts[i].demand.clone()).sum();
            if g.is_empty() || demand > *y {
                ok = false;
                break;
            }
            let mut vs: Vec<VertexId> = g
                .iter()
                .flat_map(|&i| parts[i].terminals.iter().copied())
                .collect();
            if *kind == Kind::Passing {
                vs.push(comp.exit.expect("checked"));
            }
            total += span_cost(inst, comp.root, vs);
        }
        if ok && best.as_ref().is_none_or(|b| total < *b) {
            best = Some(total);
        }
        let mut i = 0;
        while i < k {
            slot[i] += 1;
            if slot[i] < l {
                break;
            }
            slot[i] = 0;
            i += 1;
        }
        if i == k {
            break;
        }
    }
    best
}
