use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use rayon::prelude::*;
use ucvrp_core::baselines::{exact_opt, itp_heuristic, ItpMode};
use ucvrp_core::dp::{solve_with, Caps};
use ucvrp_core::{Params, Rational};

use crate::opts::{parse_caps, read_instance, BenchArgs};
use crate::{io_error, usage, violation, CliError, CliResult};

pub const BENCH_VERSION: &str = "# ucvrp-bench 1";
pub const BENCH_COLUMNS: [&str; 6] = [
    "instance",
    "n",
    "solver",
    "cost",
    "ratio_vs_exact",
    "wall_ms",
];
pub const SOLVERS: [&str; 3] = ["solve", "itp", "exact"];

struct Row {
    solver: &'static str,
    cost: Result<Rational, String>,
    wall_ms: u128,
}

struct Outcome {
    name: String,
    n: usize,
    rows: Vec<Row>,
}

fn timed<T>(no_timing: bool, f: impl FnOnce() -> T) -> (T, u128) {
    let start = Instant::now();
    let v = f();
    (
        v,
        if no_timing {
            0
        } else {
            start.elapsed().as_millis()
        },
    )
}

fn bench_one(path: &Path, a: &BenchArgs, p: &Params, caps: &Caps) -> Result<Outcome, CliError> {
    let inst = read_instance(path)?;
    let n = inst.num_terminals();
    let mut rows = Vec::new();
    let (cost, wall_ms) = timed(a.no_timing, || {
        solve_with(&inst, p, caps)
            .map(|o| o.cost)
            .map_err(|e| e.to_string())
    });
    rows.push(Row {
        solver: "solve",
        cost,
        wall_ms,
    });
    let (cost, wall_ms) = timed(a.no_timing, || {
        itp_heuristic(&inst, p, ItpMode::NextFit)
            .map(|s| s.cost(&inst))
            .map_err(|e| e.to_string())
    });
    rows.push(Row {
        solver: "itp",
        cost,
        wall_ms,
    });
    if n <= a.exact_limit {
        let (cost, wall_ms) = timed(a.no_timing, || {
            exact_opt(&inst, a.exact_limit)
                .map(|o| o.cost)
                .map_err(|e| e.to_string())
        });
        rows.push(Row {
            solver: "exact",
            cost,
            wall_ms,
        });
    }
    let name = path
        .file_name()
        .map(|f| f.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(Outcome { name, n, rows })
}

pub fn run(a: &BenchArgs, echo: &str, out: &mut dyn Write) -> CliResult {
    let p = a.params.params()?;
    let caps = parse_caps(a.caps.as_deref())?;
    let mut paths: Vec<PathBuf> = std::fs::read_dir(&a.dir)
        .map_err(|e| usage(format!("cannot read {}: {e}", a.dir.display())))?
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.extension().is_some_and(|x| x == "ucvrp"))
        .collect();
    paths.sort();
    if paths.is_empty() {
        return Err(usage(format!("no .ucvrp files in {}", a.dir.display())));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(a.threads)
        .build()
        .map_err(violation)?;
    let outcomes: Vec<Outcome> = pool.install(|| {
        paths
            .par_iter()
            .map(|path| bench_one(path, a, &p, &caps))
            .collect::<Result<_, _>>()
    })?;

    let mut buf = format!("{BENCH_VERSION}\n# args: {echo}\n").into_bytes();
    let mut failures = Vec::new();
    let mut sums = [0.0f64; 3];
    let mut counts = [0usize; 3];
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        w.write_record(BENCH_COLUMNS).map_err(violation)?;
        for o in &outcomes {
            let exact = o
                .rows
                .iter()
                .find(|r| r.solver == "exact")
                .and_then(|r| r.cost.as_ref().ok())
                .filter(|c| c.is_positive())
                .cloned();
            for r in &o.rows {
                let (cost, ratio) = match (&r.cost, &exact) {
                    (Ok(c), Some(e)) => {
                        let ratio = (c.clone() / e.clone()).to_f64();
                        let i = SOLVERS.iter().position(|s| *s == r.solver).unwrap();
                        sums[i] += ratio;
                        counts[i] += 1;
                        (c.to_exact_string(), format!("{ratio:.6}"))
                    }
                    (Ok(c), None) => (c.to_exact_string(), String::new()),
                    (Err(e), _) => {
                        failures.push(format!("{} {}: {e}", o.name, r.solver));
                        (String::from("error"), String::new())
                    }
                };
                w.write_record([
                    o.name.clone(),
                    o.n.to_string(),
                    r.solver.to_string(),
                    cost,
                    ratio,
                    r.wall_ms.to_string(),
                ])
                .map_err(violation)?;
            }
        }
        w.flush().map_err(io_error)?;
    }
    std::fs::write(&a.out, buf).map_err(io_error)?;

    writeln!(out, "instances {}", outcomes.len()).map_err(io_error)?;
    for (i, s) in SOLVERS.iter().enumerate() {
        if counts[i] > 0 {
            writeln!(
                out,
                "{s} mean ratio {:.6} over {}",
                sums[i] / counts[i] as f64,
                counts[i]
            )
            .map_err(io_error)?;
        }
    }
    if failures.is_empty() {
        Ok(())
    } else {
        Err(violation(format!(
            "{} solver runs failed: {}",
            failures.len(),
            failures.join("; ")
        )))
    }
}
