//! Bottom-up table construction on the reduced tree and extraction of tours.

use std::collections::{BTreeMap, BTreeSet};

use crate::decompose::{decompose, Hierarchy};
use crate::instance::{preprocess, Instance, Solution, Tour, VertexId};
use crate::params::Params;
use crate::rational::Rational;
use crate::structure::{
    build_value_sets, height_reduce, height_reduce_with, map_back, ReducedTree, StructureError,
    ValueSets,
};

use super::{
    candidate_sets, combine_root, list_count, local_min, local_table, round_up, scan_critical,
    Caps, CriticalTable, DpError, Kind, LocalTable, RootTrace, SubtreeEntry, SubtreeKey,
};

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SolveStats {
    pub terminals: usize,
    pub components: usize,
    pub critical_vertices: usize,
    pub y_size: usize,
    pub local_entries: usize,
    pub subtree_entries: usize,
    pub x_sets: usize,
    pub reduced_identity: bool,
    pub bands_within_h: bool,
    /// Set when the nearest terminal sits at the depot and the band width fell back.
    pub zero_d_min: bool,
    /// Stored list values that are not members of `Y`; always 0.
    pub values_outside_y: usize,
}

#[derive(Debug, Clone)]
pub struct SolveOutput {
    /// Tours on the original instance.
    pub solution: Solution,
    /// Cost on the original instance.
    pub cost: Rational,
    /// Optimal table value, equal to the cost of the extracted tours on `T̂`.
    pub table_cost: Rational,
    pub stats: SolveStats,
}

/// A subtour under construction: served terminals and its value (real plus dummy demand).
#[derive(Debug, Clone, PartialEq, Eq)]
struct Piece {
    terminals: BTreeSet<VertexId>,
    value: Rational,
}

impl Piece {
    fn join(mut self, other: Piece) -> Piece {
        self.terminals.extend(other.terminals);
        Piece {
            terminals: self.terminals,
            value: self.value + other.value,
        }
    }
}

struct Dp<'a> {
    inst: &'a Instance,
    h: &'a Hierarchy,
    rt: &'a ReducedTree,
    vs: &'a ValueSets,
    p: &'a Params,
    caps: &'a Caps,
    local: Vec<Option<LocalTable>>,
    comp: Vec<Option<BTreeMap<SubtreeKey, SubtreeEntry>>>,
    crit: BTreeMap<VertexId, CriticalTable>,
}

impl<'a> Dp<'a> {
    fn local(&mut self, c: usize) -> Result<(), DpError> {
        if self.local[c].is_none() {
            let t = local_table(
                self.inst,
                c,
                &self.h.components[c],
                &self.vs.q_c[c],
                &self.p.alpha,
                self.caps,
            )?;
            self.local[c] = Some(t);
        }
        Ok(())
    }

    /// `g(v, ·)` as plain costs; a vertex that is not critical has nothing below it in `T̂`.
    fn vertex_costs(&mut self, v: VertexId) -> Result<BTreeMap<SubtreeKey, Rational>, DpError> {
        if !self.rt.critical_vertices.contains(&v) {
            return Ok(BTreeMap::from([(Vec::new(), Rational::zero())]));
        }
        self.critical(v)?;
        Ok(self.crit[&v].costs())
    }

    fn component(&mut self, c: usize) -> Result<(), DpError> {
        if self.comp[c].is_some() {
            return Ok(());
        }
        self.local(c)?;
        let h = self.h;
        let region = &h.components[c];
        let exit = match region.exit {
            Some(e) => Some(self.vertex_costs(e)?),
            None => None,
        };
        let spine = region.spine_cost(self.inst) * Rational::from_integer(2);
        let table = combine_root(
            self.local[c].as_ref().expect("built"),
            &spine,
            exit.as_ref(),
            self.caps,
        )?;
        self.comp[c] = Some(table);
        Ok(())
    }

    fn critical(&mut self, z: VertexId) -> Result<(), DpError> {
        if self.crit.contains_key(&z) {
            return Ok(());
        }
        let children = self.rt.children_of_critical(z);
        for &c in &children {
            self.component(c)?;
        }
        let costs: Vec<BTreeMap<SubtreeKey, Rational>> = children
            .iter()
            .map(|&c| {
                self.comp[c]
                    .as_ref()
                    .expect("built")
                    .iter()
                    .map(|(k, e)| (k.clone(), e.cost.clone()))
                    .collect()
            })
            .collect();
        let pool: Vec<Rational> = if self.caps.exhaustive_x {
            self.vs.y.iter().cloned().collect()
        } else {
            let set: BTreeSet<Rational> = costs
                .iter()
                .flat_map(|t| t.keys().flatten().map(|(y, _)| y.clone()))
                .collect();
            set.into_iter().collect()
        };
        let xs = candidate_sets(&pool, self.p.inv_beta(), self.caps.x_budget)?;
        let inputs: Vec<(&BTreeMap<SubtreeKey, Rational>, Rational)> = children
            .iter()
            .zip(&costs)
            .map(|(&c, t)| (t, self.rt.attach_weight[c].clone()))
            .collect();
        let mut scans = Vec::new();
        let mut best: BTreeMap<SubtreeKey, (Rational, usize)> = BTreeMap::new();
        for (xi, x) in xs.iter().enumerate() {
            let steps = scan_critical(&inputs, x, self.caps)?;
            if let Some(last) = steps.last() {
                for (k, e) in last {
                    if best.get(k).is_none_or(|(b, _)| e.cost < *b) {
                        best.insert(k.clone(), (e.cost.clone(), xi));
                    }
                }
            } else {
                best.entry(Vec::new()).or_insert((Rational::zero(), xi));
            }
            scans.push(steps);
        }
        self.crit.insert(
            z,
            CriticalTable {
                vertex: z,
                children,
                xs,
                scans,
                best,
            },
        );
        Ok(())
    }

    fn trace_local(
        &self,
        c: usize,
        key: &[(Rational, Kind)],
    ) -> Result<Vec<(Piece, Kind)>, DpError> {
        let entry = self.local[c]
            .as_ref()
            .and_then(|t| t.entries.get(key))
            .ok_or_else(|| DpError::Internal(format!("missing local entry for component {c}")))?;
        let parts = &self.vs.q_c[c];
        Ok(key
            .iter()
            .zip(&entry.masks)
            .map(|((y, kind), &mask)| {
                let terminals = (0..parts.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .flat_map(|i| parts[i].terminals.iter().copied())
                    .collect();
                (
                    Piece {
                        terminals,
                        value: y.clone(),
                    },
                    *kind,
                )
            })
            .collect())
    }

    fn trace_component(&self, c: usize, key: &SubtreeKey) -> Result<Vec<Piece>, DpError> {
        let entry = self.comp[c]
            .as_ref()
            .and_then(|t| t.get(key))
            .ok_or_else(|| DpError::Internal(format!("missing subtree entry for component {c}")))?;
        match &entry.trace {
            RootTrace::Lift(lk) => Ok(self
                .trace_local(c, lk)?
                .into_iter()
                .map(|(p, _)| p)
                .collect()),
            RootTrace::Combine { local, exit, assoc } => {
                let mut locals: Vec<Option<(Piece, Kind)>> =
                    self.trace_local(c, local)?.into_iter().map(Some).collect();
                let e = self.h.components[c].exit.expect("combine needs an exit");
                let mut exits: Vec<Option<Piece>> =
                    self.trace_vertex(e, exit)?.into_iter().map(Some).collect();
                let mut out = Vec::new();
                for (i, val) in assoc {
                    let j = exits
                        .iter()
                        .position(|x| x.as_ref().is_some_and(|x| x.value == *val))
                        .ok_or_else(|| DpError::Internal("exit subtour value not found".into()))?;
                    let (piece, _) = locals[*i]
                        .take()
                        .expect("each passing entry is associated once");
                    out.push(piece.join(exits[j].take().expect("present")));
                }
                for slot in locals.into_iter().flatten() {
                    match slot {
                        (piece, Kind::Ending) => out.push(piece),
                        (_, Kind::Passing) => {
                            return Err(DpError::Internal("unassociated passing subtour".into()))
                        }
                    }
                }
                out.extend(exits.into_iter().flatten());
                Ok(out)
            }
        }
    }

    fn trace_vertex(&self, v: VertexId, key: &SubtreeKey) -> Result<Vec<Piece>, DpError> {
        let Some(table) = self.crit.get(&v) else {
            return if key.is_empty() {
                Ok(Vec::new())
            } else {
                Err(DpError::Internal(format!("vertex {v} has no table")))
            };
        };
        let (_, xi) = table
            .best
            .get(key)
            .ok_or_else(|| DpError::Internal(format!("missing entry at {v}")))?;
        let x = &table.xs[*xi];
        let scan = &table.scans[*xi];
        let mut steps = Vec::with_capacity(scan.len());
        let mut cur = key.clone();
        for step in scan.iter().rev() {
            let e = step
                .get(&cur)
                .ok_or_else(|| DpError::Internal(format!("broken scan at {v}")))?;
            steps.push(e);
            cur = e.prev.clone();
        }
        steps.reverse();
        let mut acc: Vec<Piece> = Vec::new();
        for (i, e) in steps.iter().enumerate() {
            let mut child: Vec<Option<Piece>> = self
                .trace_component(table.children[i], &e.child)?
                .into_iter()
                .map(|mut p| {
                    p.value = round_up(x, &p.value).expect("rounded list exists");
                    Some(p)
                })
                .collect();
            let mut old: Vec<Option<Piece>> = acc.into_iter().map(Some).collect();
            let mut next = Vec::new();
            for (a, b, n) in &e.assoc {
                for _ in 0..*n {
                    let pa = old
                        .iter()
                        .position(|p| p.as_ref().is_some_and(|p| p.value == *a));
                    let pb = child
                        .iter()
                        .position(|p| p.as_ref().is_some_and(|p| p.value == *b));
                    let (Some(pa), Some(pb)) = (pa, pb) else {
                        return Err(DpError::Internal(format!(
                            "association not realizable at {v}"
                        )));
                    };
                    next.push(
                        old[pa]
                            .take()
                            .expect("present")
                            .join(child[pb].take().expect("present")),
                    );
                }
            }
            next.extend(old.into_iter().flatten());
            next.extend(child.into_iter().flatten());
            acc = next;
        }
        Ok(acc)
    }
}

/// Solves with default caps.
pub fn solve(inst: &Instance, p: &Params) -> Result<SolveOutput, DpError> {
    solve_with(inst, p, &Caps::default())
}

pub fn solve_with(inst: &Instance, p: &Params, caps: &Caps) -> Result<SolveOutput, DpError> {
    let pre = preprocess(inst);
    let t = &pre.instance;
    let h = decompose(t, p);
    let mut stats = SolveStats {
        terminals: inst.num_terminals(),
        components: h.components.len(),
        ..Default::default()
    };
    let rt = match height_reduce(t, &h, p) {
        Ok(rt) => rt,
        Err(StructureError::TerminalAtDepot) => {
            stats.zero_d_min = true;
            let positive = t
                .terminals()
                .map(|v| t.dist(v).clone())
                .filter(|d| d.is_positive())
                .min();
            let width = positive
                .map(|d| &p.alpha * &p.eps * d)
                .unwrap_or_else(Rational::one);
            height_reduce_with(t, &h, p, width)?
        }
        Err(e) => return Err(e.into()),
    };
    stats.critical_vertices = rt.critical_vertices.len();
    stats.reduced_identity = rt.is_identity();
    stats.bands_within_h = rt.bands_within_h;
    let vs = build_value_sets(t, &h, p, caps.y)?;
    stats.y_size = vs.y.len();

    let k = h.components.len();
    let mut dp = Dp {
        inst: t,
        h: &h,
        rt: &rt,
        vs: &vs,
        p,
        caps,
        local: vec![None; k],
        comp: vec![None; k],
        crit: BTreeMap::new(),
    };

    // At the depot subtours are tours, so merging them saves nothing: each
    // child of the depot is minimized on its own.
    let mut table_cost = Rational::zero();
    let mut pieces: Vec<Piece> = Vec::new();
    let root = t.root();
    for c in rt.children_of_critical(root) {
        let region = &h.components[c];
        let extra = &rt.attach_weight[c] * Rational::from_integer(2);
        if region.exit.is_none() {
            let (cost, masks) = local_min(t, region, &vs.q_c[c], &extra, caps)?;
            table_cost += cost;
            let parts = &vs.q_c[c];
            for mask in masks {
                let terminals: BTreeSet<VertexId> = (0..parts.len())
                    .filter(|i| mask >> i & 1 == 1)
                    .flat_map(|i| parts[i].terminals.iter().copied())
                    .collect();
                let demand: Rational = terminals.iter().map(|&v| t.demand_or_zero(v)).sum();
                let value = if demand < p.alpha {
                    p.alpha.clone()
                } else {
                    demand
                };
                pieces.push(Piece { terminals, value });
            }
            continue;
        }
        dp.component(c)?;
        let table = dp.comp[c].as_ref().expect("built");
        let (key, cost) = table
            .iter()
            .map(|(key, e)| {
                (
                    key,
                    &e.cost + &extra * Rational::from_integer(list_count(key) as i64),
                )
            })
            .fold(
                None::<(&SubtreeKey, Rational)>,
                |best, (key, cost)| match best {
                    Some((_, ref b)) if *b <= cost => best,
                    _ => Some((key, cost)),
                },
            )
            .ok_or_else(|| DpError::Internal(format!("component {c} has an empty table")))?;
        table_cost += cost;
        let key = key.clone();
        pieces.extend(dp.trace_component(c, &key)?);
    }
    stats.local_entries = dp.local.iter().flatten().map(|t| t.entries.len()).sum();
    stats.subtree_entries = dp.comp.iter().flatten().map(|t| t.len()).sum::<usize>()
        + dp.crit.values().map(|t| t.best.len()).sum::<usize>();
    stats.x_sets = dp.crit.values().map(|t| t.xs.len()).sum();
    let outside = |y: &Rational| usize::from(!vs.contains(y));
    stats.values_outside_y = dp
        .local
        .iter()
        .flatten()
        .flat_map(|t| t.entries.keys().flatten())
        .map(|(y, _)| outside(y))
        .sum::<usize>()
        + dp.comp
            .iter()
            .flatten()
            .flat_map(|t| t.keys().flatten())
            .map(|(y, _)| outside(y))
            .sum::<usize>()
        + dp.crit
            .values()
            .flat_map(|t| t.best.keys().flatten())
            .map(|(y, _)| outside(y))
            .sum::<usize>()
        + pieces
            .iter()
            .map(|piece| outside(&piece.value))
            .sum::<usize>();

    let mut tours = Vec::with_capacity(pieces.len());
    for piece in pieces {
        let demand: Rational = piece.terminals.iter().map(|&v| t.demand_or_zero(v)).sum();
        let dummy = &piece.value - &demand;
        if dummy.is_negative() {
            return Err(DpError::Internal(
                "subtour value below its real demand".into(),
            ));
        }
        tours.push(Tour::with_dummy(piece.terminals, dummy));
    }
    let on_hat = Solution::new(tours);
    let hat_cost = on_hat.cost(&rt.tree);
    if hat_cost != table_cost {
        return Err(DpError::Internal(format!(
            "extracted tours cost {hat_cost} on the reduced tree, table says {table_cost}"
        )));
    }
    let on_t = map_back(&rt, &on_hat)?;
    let solution = Solution::new(
        on_t.tours
            .iter()
            .map(|tour| {
                Tour::with_dummy(
                    tour.terminals.iter().map(|&v| pre.original_terminal(v)),
                    tour.dummy.clone(),
                )
            })
            .collect(),
    );
    let cost = solution.cost(inst);
    Ok(SolveOutput {
        solution,
        cost,
        table_cost,
        stats,
    })
}
