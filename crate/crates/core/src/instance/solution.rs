use std::collections::{BTreeMap, BTreeSet};
use std::fmt::{self, Write};

use super::{Instance, InstanceError, VertexId};
use crate::rational::Rational;

/// One closed walk from the depot, described by the terminals it serves.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Tour {
    pub terminals: BTreeSet<VertexId>,
    /// Demand of dummy terminals padded onto this tour.
    pub dummy: Rational,
}

impl Tour {
    pub fn new(terminals: impl IntoIterator<Item = VertexId>) -> Self {
        Tour {
            terminals: terminals.into_iter().collect(),
            dummy: Rational::zero(),
        }
    }

    pub fn with_dummy(terminals: impl IntoIterator<Item = VertexId>, dummy: Rational) -> Self {
        Tour {
            terminals: terminals.into_iter().collect(),
            dummy,
        }
    }

    /// Real demand served, without the dummy part.
    pub fn demand(&self, inst: &Instance) -> Rational {
        self.terminals.iter().map(|&v| inst.demand_or_zero(v)).sum()
    }

    pub fn load(&self, inst: &Instance) -> Rational {
        self.demand(inst) + &self.dummy
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Solution {
    pub tours: Vec<Tour>,
}

impl Solution {
    pub fn new(tours: Vec<Tour>) -> Self {
        Solution { tours }
    }

    pub fn cost(&self, inst: &Instance) -> Rational {
        self.tours
            .iter()
            .map(|t| tour_cost(inst, &t.terminals))
            .sum()
    }
}

/// Twice the weight of the minimal subtree connecting the root and `vertices`.
///
/// Panics on ids outside the instance; use [`Instance::check_vertex`] first
/// for untrusted input.
pub fn tour_cost<'a>(
    inst: &Instance,
    vertices: impl IntoIterator<Item = &'a VertexId>,
) -> Rational {
    let mut seen = vec![false; inst.len()];
    let mut total = Rational::zero();
    for &v in vertices {
        let mut u = v;
        while let Some(p) = inst.parent(u) {
            if seen[u] {
                break;
            }
            seen[u] = true;
            total += inst.weight(u);
            u = p;
        }
    }
    total * Rational::from_integer(2)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    Uncovered(VertexId),
    DoublyCovered { vertex: VertexId, tours: Vec<usize> },
    CapacityExcess { tour: usize, excess: Rational },
    NotATerminal { tour: usize, vertex: VertexId },
    NegativeDummy { tour: usize },
    EmptyTour { tour: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Uncovered(v) => write!(f, "terminal {v} is not covered by any tour"),
            Violation::DoublyCovered { vertex, tours } => {
                write!(f, "terminal {vertex} is covered by several tours {tours:?}")
            }
            Violation::CapacityExcess { tour, excess } => {
                write!(f, "tour {tour} exceeds the capacity of 1 by {excess}")
            }
            Violation::NotATerminal { tour, vertex } => write!(
                f,
                "tour {tour} lists vertex {vertex}, which is not a terminal"
            ),
            Violation::NegativeDummy { tour } => write!(f, "tour {tour} has negative dummy demand"),
            Violation::EmptyTour { tour } => write!(f, "tour {tour} serves nothing"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct FeasibilityReport {
    pub violations: Vec<Violation>,
}

impl FeasibilityReport {
    pub fn is_feasible(&self) -> bool {
        self.violations.is_empty()
    }
}

pub fn check_feasible(inst: &Instance, sol: &Solution) -> FeasibilityReport {
    let mut violations = Vec::new();
    let mut covering: BTreeMap<VertexId, Vec<usize>> = BTreeMap::new();
    for (i, tour) in sol.tours.iter().enumerate() {
        if tour.dummy.is_negative() {
            violations.push(Violation::NegativeDummy { tour: i });
        }
        if tour.terminals.is_empty() && !tour.dummy.is_positive() {
            violations.push(Violation::EmptyTour { tour: i });
        }
        for &v in &tour.terminals {
            if v >= inst.len() || !inst.is_terminal(v) {
                violations.push(Violation::NotATerminal { tour: i, vertex: v });
            } else {
                covering.entry(v).or_default().push(i);
            }
        }
        let excess = tour.load(inst) - Rational::one();
        if excess.is_positive() {
            violations.push(Violation::CapacityExcess { tour: i, excess });
        }
    }
    for v in inst.terminals() {
        match covering.get(&v) {
            None => violations.push(Violation::Uncovered(v)),
            Some(ts) if ts.len() > 1 => violations.push(Violation::DoublyCovered {
                vertex: v,
                tours: ts.clone(),
            }),
            _ => {}
        }
    }
    FeasibilityReport { violations }
}

/// Whether `D_max < (1/eps)^(1/eps - 1) * D_min` over depot-terminal distances.
pub fn check_bounded_distance(inst: &Instance, eps: &Rational) -> Result<bool, InstanceError> {
    let (dmin, dmax) = inst
        .terminal_distance_range()
        .ok_or_else(|| InstanceError::Invalid("instance has no terminals".into()))?;
    let inv = eps.recip();
    if !eps.is_positive() || eps >= &Rational::one() || !inv.is_integer() {
        return Err(InstanceError::Invalid(format!(
            "epsilon {eps} is not 1/k for an integer k >= 2"
        )));
    }
    let k = inv.to_u64().expect("1/eps fits in u64") as u32;
    let factor = inv.pow(k - 1);
    Ok(dmax < factor * dmin)
}

fn syntax(line: usize, msg: impl Into<String>) -> InstanceError {
    InstanceError::Syntax {
        line,
        msg: msg.into(),
    }
}

/// Parses the `ucvrp-sol 1` format: `tour <id> dummy=<value> : <ids>`.
pub fn parse_solution(text: &str) -> Result<Solution, InstanceError> {
    let mut header_seen = false;
    let mut tours = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        if !header_seen {
            if line.split_whitespace().collect::<Vec<_>>() != ["ucvrp-sol", "1"] {
                return Err(syntax(lineno, "expected header `ucvrp-sol 1`"));
            }
            header_seen = true;
            continue;
        }
        let (head, ids) = line
            .split_once(':')
            .ok_or_else(|| syntax(lineno, "missing `:` in tour line"))?;
        let head: Vec<&str> = head.split_whitespace().collect();
        if head.len() < 2 || head[0] != "tour" || head[1].parse::<usize>().is_err() {
            return Err(syntax(
                lineno,
                "tour line needs `tour <id> [dummy=<value>] :`",
            ));
        }
        let dummy = match head.get(2) {
            None => Rational::zero(),
            Some(field) => {
                let value = field
                    .strip_prefix("dummy=")
                    .ok_or_else(|| syntax(lineno, format!("unexpected field `{field}`")))?;
                Rational::parse_exact(value).map_err(|e| syntax(lineno, e.to_string()))?
            }
        };
        if head.len() > 3 {
            return Err(syntax(lineno, "trailing fields before `:`"));
        }
        let mut terminals = BTreeSet::new();
        for tok in ids.split_whitespace() {
            let v: VertexId = tok
                .parse()
                .map_err(|_| syntax(lineno, format!("bad vertex id `{tok}`")))?;
            terminals.insert(v);
        }
        tours.push(Tour { terminals, dummy });
    }
    if !header_seen {
        return Err(syntax(1, "missing header `ucvrp-sol 1`"));
    }
    Ok(Solution { tours })
}

pub fn write_solution(sol: &Solution) -> String {
    let mut out = String::from("ucvrp-sol 1\n");
    for (i, tour) in sol.tours.iter().enumerate() {
        write!(out, "tour {} dummy={} :", i, tour.dummy.to_exact_string()).unwrap();
        for v in &tour.terminals {
            write!(out, " {v}").unwrap();
        }
        out.push('\n');
    }
    out
}
