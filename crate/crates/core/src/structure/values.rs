use std::collections::BTreeSet;

use crate::decompose::Hierarchy;
use crate::instance::{Instance, VertexId};
use crate::local::ComponentView;
use crate::params::Params;
use crate::rational::Rational;

use super::StructureError;

pub const DEFAULT_Y_CAP: usize = 200_000;

/// One part of `Q_c`: all small terminals of a cell, or one big terminal.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Part {
    pub terminals: Vec<VertexId>,
    pub demand: Rational,
    /// Cell of the small terminals; `None` for a big terminal.
    pub cell: Option<usize>,
}

#[derive(Debug, Clone)]
pub struct ValueSets {
    pub q_c: Vec<Vec<Part>>,
    pub y_c: Vec<BTreeSet<Rational>>,
    pub y: BTreeSet<Rational>,
}

impl ValueSets {
    pub fn contains(&self, v: &Rational) -> bool {
        self.y.contains(v)
    }
}

/// All subset sums of `values` that are at most 1 (including 0).
pub fn subset_sums<'a>(values: impl IntoIterator<Item = &'a Rational>) -> BTreeSet<Rational> {
    let one = Rational::one();
    let mut sums = BTreeSet::from([Rational::zero()]);
    for d in values {
        let next: Vec<Rational> = sums.iter().map(|s| s + d).filter(|s| *s <= one).collect();
        sums.extend(next);
    }
    sums
}

fn partition_of(inst: &Instance, h: &Hierarchy, c: usize, p: &Params) -> Vec<Part> {
    let view = ComponentView::new(inst, h, c);
    let mut by_cell: std::collections::BTreeMap<usize, Vec<VertexId>> = Default::default();
    let mut parts = Vec::new();
    for t in view.terminals() {
        let d = inst.demand(t).expect("terminal");
        if *d > p.gamma_prime {
            parts.push(Part {
                terminals: vec![t],
                demand: d.clone(),
                cell: None,
            });
        } else {
            by_cell.entry(view.cell_of_terminal(t)).or_default().push(t);
        }
    }
    let mut out: Vec<Part> = by_cell
        .into_iter()
        .map(|(cell, terminals)| {
            let demand = terminals.iter().map(|&t| inst.demand_or_zero(t)).sum();
            Part {
                terminals,
                demand,
                cell: Some(cell),
            }
        })
        .collect();
    out.extend(parts);
    out
}

/// Builds `Q_c` and `Y_c` for every component and the closure `Y`.
pub fn build_value_sets(
    inst: &Instance,
    h: &Hierarchy,
    p: &Params,
    cap: usize,
) -> Result<ValueSets, StructureError> {
    let one = Rational::one();
    let mut q_c = Vec::new();
    let mut y_c = Vec::new();
    for c in 0..h.components.len() {
        let parts = partition_of(inst, h, c, p);
        let mut yc: BTreeSet<Rational> = subset_sums(parts.iter().map(|q| &q.demand))
            .into_iter()
            .filter(|s| *s > p.alpha)
            .collect();
        yc.insert(p.alpha.clone());
        q_c.push(parts);
        y_c.push(yc);
    }
    let base: BTreeSet<Rational> = y_c.iter().flatten().cloned().collect();
    let mut y = base.clone();
    if y.len() > cap {
        return Err(StructureError::ValueCap { cap });
    }
    let mut frontier: Vec<Rational> = base.iter().cloned().collect();
    while !frontier.is_empty() {
        let mut next = Vec::new();
        for v in &frontier {
            for b in &base {
                let s = v + b;
                if s > one {
                    break;
                }
                if !y.contains(&s) {
                    y.insert(s.clone());
                    next.push(s);
                    if y.len() > cap {
                        return Err(StructureError::ValueCap { cap });
                    }
                }
            }
        }
        frontier = next;
    }
    Ok(ValueSets { q_c, y_c, y })
}
