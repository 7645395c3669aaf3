use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use ucvrp_core::baselines::DEFAULT_EXACT_LIMIT;
use ucvrp_core::dp::Caps;
use ucvrp_core::instance::{parse_instance, DemandDistribution};
use ucvrp_core::{Instance, Params, Rational};

use crate::{usage, CliError};

#[derive(Debug, Parser)]
#[command(
    name = "ucvrp",
    version,
    about = "Unsplittable capacitated vehicle routing on trees"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Write generated instances.
    Gen(GenArgs),
    /// Run the dynamic program on one instance.
    Solve(SolveArgs),
    /// Compare solvers over a directory of instances.
    Bench(BenchArgs),
    /// Check a solution and the decomposition of its instance.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Random,
    Caterpillar,
    BinpackingPath,
    BinpackingStar,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dist {
    Dyadic,
    Uniform,
}

impl From<Dist> for DemandDistribution {
    fn from(d: Dist) -> Self {
        match d {
            Dist::Dyadic => DemandDistribution::Dyadic,
            Dist::Uniform => DemandDistribution::Uniform,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Relaxed,
    Theoretical,
}

/// Parameter selection shared by every subcommand that needs it.
#[derive(Debug, Clone, Args)]
pub struct ParamArgs {
    /// Accuracy as a fraction `1/k`.
    #[arg(long, default_value = "1/2")]
    pub epsilon: String,
    #[arg(long, value_enum, default_value = "relaxed")]
    pub preset: Preset,
    /// Comma-separated `name=value` pairs for gamma, alpha, gamma_prime, beta, h_eps.
    #[arg(long = "override")]
    pub overrides: Option<String>,
}

impl ParamArgs {
    pub fn params(&self) -> Result<Params, CliError> {
        if self.epsilon.contains('.') {
            return Err(usage(format!(
                "epsilon must be a fraction such as 1/2, got `{}`",
                self.epsilon
            )));
        }
        let eps = parse_rational("epsilon", &self.epsilon)?;
        let mut p = match self.preset {
            Preset::Relaxed => Params::relaxed(&eps),
            Preset::Theoretical => Params::theoretical(&eps),
        }
        .map_err(usage)?;
        for (name, value) in pairs(self.overrides.as_deref())? {
            let value = parse_rational(name, value)?;
            p.set(name, value).map_err(usage)?;
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, Args)]
pub struct GenArgs {
    #[arg(long, value_enum, default_value = "random")]
    pub family: Family,
    /// Number of terminals (or items for the bin packing families).
    #[arg(long, default_value_t = 8)]
    pub terminals: usize,
    /// With `--count`, instance `i` gets `1 + (seed_i mod m)` terminals instead.
    #[arg(long)]
    pub max_terminals: Option<usize>,
    #[arg(long, value_enum, default_value = "dyadic")]
    pub dist: Dist,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Explicit item sizes for the bin packing families, comma-separated.
    #[arg(long)]
    pub sizes: Option<String>,
    #[arg(long, default_value_t = 10)]
    pub max_weight: u32,
    /// Write this many instances with seeds `seed..seed+count` into the `--out` directory.
    #[arg(long)]
    pub count: Option<usize>,
    /// Output file (directory with `--count`); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Emit the height-reduced tree and an `.origin` sidecar instead.
    #[arg(long)]
    pub reduce: bool,
    #[command(flatten)]
    pub params: ParamArgs,
}

#[derive(Debug, Clone, Args)]
pub struct SolveArgs {
    pub instance: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Comma-separated `name=value` limits: y, cfg, entries, x_budget, parts.
    #[arg(long)]
    pub caps: Option<String>,
    /// Solution file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Stats CSV file.
    #[arg(long)]
    pub stats: Option<PathBuf>,
    /// Also run the exact oracle when the instance has at most this many terminals.
    #[arg(long, default_value_t = 0)]
    pub oracle_limit: usize,
    /// Write 0 for wall times so that outputs are byte-identical across runs.
    #[arg(long)]
    pub no_timing: bool,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    /// Directory of `.ucvrp` files.
    #[arg(long)]
    pub dir: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
    #[arg(long)]
    pub caps: Option<String>,
    /// Skip the exact oracle above this many terminals.
    #[arg(long, default_value_t = DEFAULT_EXACT_LIMIT)]
    pub exact_limit: usize,
    #[arg(long)]
    pub no_timing: bool,
    /// Worker threads; 0 lets the pool decide.
    #[arg(long, default_value_t = 0)]
    pub threads: usize,
}

#[derive(Debug, Clone, Args)]
pub struct VerifyArgs {
    pub instance: PathBuf,
    pub solution: PathBuf,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Run the local construction on every component and print its diagnostics.
    #[arg(long)]
    pub local: bool,
}

pub fn parse_rational(name: &str, s: &str) -> Result<Rational, CliError> {
    Rational::parse_exact(s).map_err(|e| usage(format!("{name}: {e}")))
}

fn pairs(spec: Option<&str>) -> Result<Vec<(&str, &str)>, CliError> {
    let Some(spec) = spec else {
        return Ok(Vec::new());
    };
    spec.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim(), v.trim()))
                .ok_or_else(|| usage(format!("expected name=value, got `{kv}`")))
        })
        .collect()
}

pub fn parse_caps(spec: Option<&str>) -> Result<Caps, CliError> {
    let mut caps = Caps::default();
    for (name, value) in pairs(spec)? {
        let n: usize = value
            .parse()
            .map_err(|_| usage(format!("cap {name}: `{value}` is not a count")))?;
        match name {
            "y" => caps.y = n,
            "cfg" => caps.cfg = n,
            "entries" => caps.entries = n,
            "x_budget" => caps.x_budget = n,
            "parts" => caps.parts = n,
            other => {
                return Err(usage(format!(
                    "unknown cap `{other}` (expected y, cfg, entries, x_budget or parts)"
                )))
            }
        }
    }
    Ok(caps)
}

pub fn read_instance(path: &std::path::Path) -> Result<Instance, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| usage(format!("cannot read {}: {e}", path.display())))?;
    parse_instance(&text).map_err(|e| usage(format!("{}: {e}", path.display())))
}
