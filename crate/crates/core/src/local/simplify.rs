use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet};

use super::{ComponentView, LocalDiagnostics, LocalError, LocalResult, Subtour};
use crate::assignment::{assign, BipartiteWeights};
use crate::decompose::{Hierarchy, Region};
use crate::instance::{Instance, VertexId};
use crate::params::Params;
use crate::rational::Rational;

fn validate(view: &ComponentView, s_c: &[Subtour], p: &Params) -> Result<(), LocalError> {
    let limit = Rational::from_integer(2) * &p.gamma / &p.alpha + Rational::one();
    if Rational::from_integer(s_c.len() as i64) > limit {
        return Err(LocalError::TooManySubtours {
            count: s_c.len(),
            limit,
        });
    }
    let comp = view.comp;
    let mut served = BTreeSet::new();
    for (index, t) in s_c.iter().enumerate() {
        let bad = |reason: String| Err(LocalError::Malformed { index, reason });
        for &e in &t.edges {
            if !comp.edges.contains(&e) {
                return bad(format!("edge {e} lies outside the component"));
            }
            let up = view.inst.parent(e).unwrap();
            if up != comp.root && !t.edges.contains(&up) {
                return bad(format!("edge {e} is not connected to the component root"));
            }
        }
        for &v in &t.terminals {
            if !view.inst.is_terminal(v) || !comp.edges.contains(&v) {
                return bad(format!("vertex {v} is not a terminal of the component"));
            }
            if !t.edges.contains(&v) {
                return bad(format!("terminal {v} is served but not visited"));
            }
            if !served.insert(v) {
                return Err(LocalError::DoublyServed(v));
            }
        }
    }
    if let Some(t) = view.terminals().find(|t| !served.contains(t)) {
        return Err(LocalError::Uncovered(t));
    }
    if comp.exit.is_some() && !s_c.iter().any(|t| t.is_passing(comp)) {
        return Err(LocalError::NoPassingSubtour);
    }
    Ok(())
}

/// Edges lying in at least two of the given subtours.
pub fn nice_edges(a2: &[Subtour]) -> BTreeSet<VertexId> {
    let mut count: BTreeMap<VertexId, usize> = BTreeMap::new();
    for t in a2 {
        for &e in &t.edges {
            *count.entry(e).or_default() += 1;
        }
    }
    count
        .into_iter()
        .filter(|&(_, k)| k >= 2)
        .map(|(e, _)| e)
        .collect()
}

/// Deepest cell (in root-to-exit order) of cluster `x` touched by the ending part `t_e`.
///
/// The part is given by its edges; an empty part stands for the cluster root alone.
pub fn threshold_cell(h: &Hierarchy, x: usize, t_e: &Subtour) -> Result<usize, LocalError> {
    let cluster = &h.clusters[x];
    let inside: Vec<VertexId> = t_e
        .edges
        .iter()
        .copied()
        .filter(|e| cluster.edges.contains(e))
        .collect();
    if inside.is_empty() && !t_e.edges.is_empty() {
        return Err(LocalError::NotInCluster(x));
    }
    h.cells_of[x]
        .iter()
        .enumerate()
        .filter(|(_, &z)| {
            let cell = &h.cells[z];
            cell.root == cluster.root || inside.iter().any(|v| cell.contains_vertex(*v))
        })
        .map(|(_, &z)| z)
        .next_back()
        .ok_or(LocalError::NotInCluster(x))
}

/// Joins the removed pieces into one subtour from the component root,
/// climbing from each piece through nice edges.
pub fn reconnect_removed(
    inst: &Instance,
    comp: &Region,
    pieces: &[Subtour],
    nice: &BTreeSet<VertexId>,
) -> Result<Subtour, LocalError> {
    let mut bar = Subtour::default();
    for piece in pieces {
        bar.edges.extend(piece.edges.iter().copied());
        bar.terminals.extend(piece.terminals.iter().copied());
    }
    let piece_edges = bar.edges.clone();
    for &e in &piece_edges {
        let top = inst.parent(e).unwrap();
        if top == comp.root || piece_edges.contains(&top) {
            continue;
        }
        for step in inst.path_edges(comp.root, top) {
            if !piece_edges.contains(&step) && !nice.contains(&step) {
                return Err(LocalError::Unreachable(top));
            }
            bar.edges.insert(step);
        }
    }
    Ok(bar)
}

/// Edges and served terminals of `t` that lie in a cell, optionally keeping its spine.
fn cell_part(view: &ComponentView, t: &Subtour, z: usize, keep_spine: bool) -> Subtour {
    let cell = &view.h.cells[z];
    let spine: BTreeSet<VertexId> = if keep_spine {
        cell.spine_edges().iter().copied().collect()
    } else {
        BTreeSet::new()
    };
    let edges = t
        .edges
        .iter()
        .copied()
        .filter(|e| cell.edges.contains(e) && !spine.contains(e))
        .collect();
    let terminals = t
        .terminals
        .iter()
        .copied()
        .filter(|&v| view.cell_of_terminal(v) == z && !(keep_spine && cell.spine.contains(&v)))
        .collect();
    Subtour { edges, terminals }
}

fn take(from: &mut Subtour, part: &Subtour) {
    for e in &part.edges {
        from.edges.remove(e);
    }
    for v in &part.terminals {
        from.terminals.remove(v);
    }
}

fn give(to: &mut Subtour, part: &Subtour) {
    to.edges.extend(part.edges.iter().copied());
    to.terminals.extend(part.terminals.iter().copied());
}

/// Moves every listed part to the subtour chosen for its region by the assignment lemma.
fn combine(
    a: &mut [Subtour],
    regions: &[usize],
    parts: &BTreeMap<(usize, usize), Subtour>,
    inst: &Instance,
) {
    if parts.is_empty() {
        return;
    }
    let index: BTreeMap<usize, usize> = regions.iter().enumerate().map(|(i, &r)| (r, i)).collect();
    let mut g = BipartiteWeights::new(a.len(), vec![Rational::zero(); regions.len()]);
    for (&(i, r), part) in parts {
        let w = part.demand(inst);
        g.b_weight[index[&r]] += &w;
        g.add_edge(i, index[&r], w);
    }
    let f = assign(&g).expect("region weights equal their incident weights");
    for (&(i, _), part) in parts {
        take(&mut a[i], part);
    }
    for (&(_, r), part) in parts {
        give(&mut a[f[index[&r]]], part);
    }
}

/// Runs the five-step construction on the subtours `s_c` of component `c`.
pub fn local_simplify(
    inst: &Instance,
    h: &Hierarchy,
    c: usize,
    s_c: &[Subtour],
    p: &Params,
) -> Result<LocalResult, LocalError> {
    let view = ComponentView::new(inst, h, c);
    validate(&view, s_c, p)?;
    let mut diag = LocalDiagnostics::default();
    let mut a: Vec<Subtour> = s_c.to_vec();
    diag.stages.push(a.clone());

    // Step 1: one owner per cluster for all ending parts.
    let mut parts = BTreeMap::new();
    let mut regions = Vec::new();
    for &x in &view.clusters {
        let cluster = &h.clusters[x];
        let mut any = false;
        for (i, t) in a.iter().enumerate() {
            let edges: BTreeSet<VertexId> = t
                .edges
                .iter()
                .copied()
                .filter(|e| cluster.edges.contains(e))
                .collect();
            let passing = cluster.exit.is_some_and(|e| t.visits(view.comp, e));
            if edges.is_empty() || passing {
                continue;
            }
            let terminals = t
                .terminals
                .iter()
                .copied()
                .filter(|v| cluster.edges.contains(v))
                .collect();
            parts.insert((i, x), Subtour { edges, terminals });
            any = true;
        }
        if any {
            regions.push(x);
        }
    }
    combine(&mut a, &regions, &parts, inst);
    diag.stages.push(a.clone());

    // Step 2: extend the surviving ending part along the threshold cell spine.
    for &x in &regions {
        let cluster = &h.clusters[x];
        if !cluster.is_passing() {
            continue;
        }
        let owner = a
            .iter()
            .position(|t| {
                t.edges.iter().any(|e| cluster.edges.contains(e))
                    && !t.visits(view.comp, cluster.exit.unwrap())
            })
            .expect("one ending part survives per cluster");
        let t_e = Subtour {
            edges: a[owner]
                .edges
                .iter()
                .copied()
                .filter(|e| cluster.edges.contains(e))
                .collect(),
            terminals: BTreeSet::new(),
        };
        let z = threshold_cell(h, x, &t_e)?;
        let cell = &h.cells[z];
        diag.threshold_cells.insert(x, z);
        diag.threshold_spine_cost += cell.spine_cost(inst);
        for &e in cell.spine_edges() {
            if a[owner].edges.insert(e) {
                diag.w2 += Rational::from_integer(2) * inst.weight(e);
            }
        }
    }
    diag.stages.push(a.clone());
    diag.nice_edges = nice_edges(&a);

    // Step 3: one owner per passing cell for all non-spine passing parts.
    let mut parts = BTreeMap::new();
    let mut regions = Vec::new();
    for &x in view
        .clusters
        .iter()
        .filter(|&&x| h.clusters[x].is_passing())
    {
        for &z in &h.cells_of[x] {
            let mut any = false;
            for (i, t) in a.iter().enumerate() {
                let part = cell_part(&view, t, z, true);
                if part.edges.is_empty() {
                    continue;
                }
                debug_assert!(
                    t.visits(view.comp, h.cells[z].exit.unwrap()),
                    "ending part left in a passing cell"
                );
                parts.insert((i, z), part);
                any = true;
            }
            if any {
                regions.push(z);
            }
        }
    }
    combine(&mut a, &regions, &parts, inst);
    diag.stages.push(a.clone());

    // Step 4: cut parts from subtours that grew beyond their original demand.
    for (i, t0) in s_c.iter().enumerate() {
        let target = t0.demand(inst);
        while a[i].demand(inst) > target {
            let v = a[i]
                .terminals
                .iter()
                .copied()
                .filter(|v| !t0.terminals.contains(v))
                .min_by_key(|&v| {
                    (
                        Reverse(inst.depth(h.cells[view.cell_of_terminal(v)].root)),
                        v,
                    )
                })
                .expect("a grown subtour serves a new terminal");
            let z = view.cell_of_terminal(v);
            let piece = cell_part(&view, &a[i], z, h.cells[z].is_passing());
            take(&mut a[i], &piece);
            diag.pieces.push(piece);
        }
    }
    diag.stages.push(a.clone());

    // Step 5: one extra subtour carrying every removed piece.
    let bar_t = reconnect_removed(inst, view.comp, &diag.pieces, &diag.nice_edges)?;
    let piece_cost: Rational = Subtour {
        edges: diag
            .pieces
            .iter()
            .flat_map(|q| q.edges.iter().copied())
            .collect(),
        terminals: BTreeSet::new(),
    }
    .cost(inst);
    diag.w5 = bar_t.cost(inst) - piece_cost;
    Ok(LocalResult {
        s_star: a,
        bar_t,
        diag,
    })
}
