use std::collections::BTreeMap;
use std::io::Write;

use ucvrp_core::decompose::{check_hierarchy, decompose};
use ucvrp_core::instance::{check_feasible, parse_solution, preprocess, Solution, Tour};
use ucvrp_core::local::{describe, local_simplify, restrict_solution, total_cost};
use ucvrp_core::Rational;

use crate::opts::{read_instance, VerifyArgs};
use crate::{io_error, usage, violation, CliResult};

pub fn run(a: &VerifyArgs, out: &mut dyn Write) -> CliResult {
    let inst = read_instance(&a.instance)?;
    let text = std::fs::read_to_string(&a.solution)
        .map_err(|e| usage(format!("cannot read {}: {e}", a.solution.display())))?;
    let sol = parse_solution(&text).map_err(|e| usage(format!("{}: {e}", a.solution.display())))?;
    let p = a.params.params()?;
    let mut problems = Vec::new();

    let report = check_feasible(&inst, &sol);
    for v in &report.violations {
        writeln!(out, "violation: {v}").map_err(io_error)?;
        problems.push(v.to_string());
    }
    writeln!(out, "tours {} cost {}", sol.tours.len(), sol.cost(&inst)).map_err(io_error)?;

    let pre = preprocess(&inst);
    let t = &pre.instance;
    let h = decompose(t, &p);
    for msg in check_hierarchy(t, &h, &p) {
        writeln!(out, "decomposition violation: {msg}").map_err(io_error)?;
        problems.push(msg);
    }
    writeln!(out, "decomposition").map_err(io_error)?;
    for line in h.dump().lines() {
        writeln!(out, "  {line}").map_err(io_error)?;
    }

    if a.local && report.is_feasible() {
        let to_new: BTreeMap<_, _> = t
            .terminals()
            .map(|v| (pre.original_terminal(v), v))
            .collect();
        let mapped = Solution::new(
            sol.tours
                .iter()
                .map(|tour| {
                    Tour::with_dummy(tour.terminals.iter().map(|v| to_new[v]), tour.dummy.clone())
                })
                .collect(),
        );
        let bound = Rational::new(3, 2) + Rational::from_integer(2) * &p.eps;
        for c in 0..h.components.len() {
            let s_c = restrict_solution(t, &h, c, &mapped);
            match local_simplify(t, &h, c, &s_c, &p) {
                Ok(r) => {
                    writeln!(out, "local component {c}").map_err(io_error)?;
                    for line in describe(t, &s_c, &r).lines() {
                        writeln!(out, "  {line}").map_err(io_error)?;
                    }
                    let before = total_cost(t, &s_c);
                    let after = total_cost(t, &r.s_star) + r.bar_t.cost(t);
                    if after > &bound * &before {
                        let msg = format!(
                            "component {c}: local cost {after} exceeds {bound} times {before}"
                        );
                        writeln!(out, "local violation: {msg}").map_err(io_error)?;
                        problems.push(msg);
                    }
                }
                Err(e) => writeln!(out, "local component {c} skipped: {e}").map_err(io_error)?,
            }
        }
    }

    if problems.is_empty() {
        writeln!(out, "ok").map_err(io_error)?;
        Ok(())
    } else {
        Err(violation(problems.join("; ")))
    }
}
