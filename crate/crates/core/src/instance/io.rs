use std::collections::BTreeMap;
use std::fmt::Write;

use super::{Instance, InstanceError, VertexId};
use crate::rational::Rational;

fn syntax(line: usize, msg: impl Into<String>) -> InstanceError {
    InstanceError::Syntax {
        line,
        msg: msg.into(),
    }
}

fn strip_comment(line: &str) -> &str {
    match line.find('#') {
        Some(i) => &line[..i],
        None => line,
    }
}

/// Parses the line-oriented `ucvrp 1` text format.
///
/// ```text
/// ucvrp 1
/// v <id> <parent|-1> <weight>
/// t <id> <demand>
/// ```
pub fn parse_instance(text: &str) -> Result<Instance, InstanceError> {
    let mut header_seen = false;
    let mut vertices: BTreeMap<VertexId, (Option<VertexId>, Rational, usize)> = BTreeMap::new();
    let mut demands: BTreeMap<VertexId, (Rational, usize)> = BTreeMap::new();

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let fields: Vec<&str> = strip_comment(raw).split_whitespace().collect();
        if fields.is_empty() {
            continue;
        }
        if !header_seen {
            if fields != ["ucvrp", "1"] {
                return Err(syntax(lineno, "expected header `ucvrp 1`"));
            }
            header_seen = true;
            continue;
        }
        match fields[0] {
            "v" => {
                if fields.len() != 4 {
                    return Err(syntax(
                        lineno,
                        "vertex record needs `v <id> <parent> <weight>`",
                    ));
                }
                let id: VertexId = fields[1]
                    .parse()
                    .map_err(|_| syntax(lineno, format!("bad vertex id `{}`", fields[1])))?;
                let parent: i64 = fields[2]
                    .parse()
                    .map_err(|_| syntax(lineno, format!("bad parent id `{}`", fields[2])))?;
                let parent = match parent {
                    -1 => None,
                    p if p >= 0 => Some(p as VertexId),
                    _ => return Err(syntax(lineno, format!("bad parent id `{}`", fields[2]))),
                };
                let weight =
                    Rational::parse_exact(fields[3]).map_err(|e| syntax(lineno, e.to_string()))?;
                if weight.is_negative() {
                    return Err(InstanceError::NegativeWeight {
                        vertex: id,
                        value: weight,
                    });
                }
                if vertices.insert(id, (parent, weight, lineno)).is_some() {
                    return Err(syntax(lineno, format!("duplicate vertex {id}")));
                }
            }
            "t" => {
                if fields.len() != 3 {
                    return Err(syntax(lineno, "terminal record needs `t <id> <demand>`"));
                }
                let id: VertexId = fields[1]
                    .parse()
                    .map_err(|_| syntax(lineno, format!("bad vertex id `{}`", fields[1])))?;
                let demand =
                    Rational::parse_exact(fields[2]).map_err(|e| syntax(lineno, e.to_string()))?;
                if !demand.is_positive() || demand > Rational::one() {
                    return Err(InstanceError::DemandOutOfRange {
                        vertex: id,
                        value: demand,
                    });
                }
                if demands.insert(id, (demand, lineno)).is_some() {
                    return Err(syntax(lineno, format!("duplicate terminal {id}")));
                }
            }
            other => return Err(syntax(lineno, format!("unknown record type `{other}`"))),
        }
    }
    if !header_seen {
        return Err(syntax(1, "missing header `ucvrp 1`"));
    }
    let n = vertices.len();
    if let Some((&id, _)) = vertices.iter().find(|(&id, _)| id >= n) {
        return Err(InstanceError::Structure(format!(
            "vertex ids must be dense 0..{n}, found {id}"
        )));
    }
    for (&id, &(ref _d, lineno)) in &demands {
        if id >= n {
            return Err(syntax(
                lineno,
                format!("terminal {id} is not a declared vertex"),
            ));
        }
    }
    let mut parent = Vec::with_capacity(n);
    let mut weight = Vec::with_capacity(n);
    for (_, (p, w, lineno)) in vertices {
        if let Some(p) = p {
            if p >= n {
                return Err(syntax(
                    lineno,
                    format!("parent {p} is not a declared vertex"),
                ));
            }
        }
        parent.push(p);
        weight.push(w);
    }
    Instance::new(
        parent,
        weight,
        demands.into_iter().map(|(v, (d, _))| (v, d)).collect(),
    )
}

fn decimal(r: &Rational) -> String {
    r.to_exact_string()
}

pub fn write_instance(inst: &Instance) -> String {
    let mut out = String::from("ucvrp 1\n");
    for v in 0..inst.len() {
        let parent = inst.parent(v).map(|p| p as i64).unwrap_or(-1);
        writeln!(out, "v {} {} {}", v, parent, decimal(inst.weight(v))).unwrap();
    }
    for v in inst.terminals() {
        writeln!(out, "t {} {}", v, decimal(inst.demand(v).unwrap())).unwrap();
    }
    out
}
