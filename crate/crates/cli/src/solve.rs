use std::io::Write;
use std::time::Instant;

use ucvrp_core::baselines::exact_opt;
use ucvrp_core::dp::solve_with;
use ucvrp_core::instance::{check_feasible, write_solution};

use crate::opts::{parse_caps, read_instance, SolveArgs};
use crate::{io_error, violation, CliResult};

pub const STATS_VERSION: &str = "# ucvrp-stats 1";
pub const STATS_COLUMNS: [&str; 12] = [
    "instance",
    "n",
    "cost",
    "oracle_cost",
    "ratio",
    "components",
    "critical_vertices",
    "y_size",
    "local_entries",
    "subtree_entries",
    "x_sets",
    "wall_ms",
];

pub fn run(a: &SolveArgs, echo: &str, out: &mut dyn Write) -> CliResult {
    let inst = read_instance(&a.instance)?;
    let p = a.params.params()?;
    let caps = parse_caps(a.caps.as_deref())?;
    let start = Instant::now();
    let res = solve_with(&inst, &p, &caps).map_err(|e| violation(format!("solver failed: {e}")))?;
    let wall_ms = if a.no_timing {
        0
    } else {
        start.elapsed().as_millis()
    };
    let report = check_feasible(&inst, &res.solution);
    if let Some(v) = report.violations.first() {
        return Err(violation(format!(
            "solver produced an infeasible solution: {v}"
        )));
    }

    let body = write_solution(&res.solution);
    let (header, tours) = body.split_once('\n').expect("header line");
    let text = format!(
        "{header}\n# ucvrp {echo}\n# cost {}\n{tours}",
        res.cost.to_exact_string()
    );
    match &a.out {
        Some(path) => std::fs::write(path, text).map_err(io_error)?,
        None => out.write_all(text.as_bytes()).map_err(io_error)?,
    }

    if let Some(path) = &a.stats {
        let n = inst.num_terminals();
        let oracle = if n <= a.oracle_limit {
            Some(exact_opt(&inst, a.oracle_limit).map_err(violation)?.cost)
        } else {
            None
        };
        let ratio = oracle
            .as_ref()
            .filter(|o| o.is_positive())
            .map(|o| format!("{:.6}", (res.cost.clone() / o.clone()).to_f64()))
            .unwrap_or_default();
        let s = &res.stats;
        let mut buf = format!("{STATS_VERSION}\n# args: {echo}\n").into_bytes();
        {
            let mut w = csv::Writer::from_writer(&mut buf);
            w.write_record(STATS_COLUMNS).map_err(violation)?;
            w.write_record([
                a.instance.display().to_string(),
                n.to_string(),
                res.cost.to_exact_string(),
                oracle.map(|o| o.to_exact_string()).unwrap_or_default(),
                ratio,
                s.components.to_string(),
                s.critical_vertices.to_string(),
                s.y_size.to_string(),
                s.local_entries.to_string(),
                s.subtree_entries.to_string(),
                s.x_sets.to_string(),
                wall_ms.to_string(),
            ])
            .map_err(violation)?;
            w.flush().map_err(io_error)?;
        }
        std::fs::write(path, buf).map_err(io_error)?;
    }
    Ok(())
}
