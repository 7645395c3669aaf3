use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use ucvrp_core::decompose::decompose;
use ucvrp_core::instance::{
    gen_binpacking_path, gen_binpacking_star, gen_caterpillar, gen_random, preprocess,
    random_demands, write_instance, RandomSpec,
};
use ucvrp_core::structure::height_reduce;
use ucvrp_core::{Instance, Params};

use crate::opts::{parse_rational, Family, GenArgs};
use crate::{io_error, usage, violation, CliError, CliResult};

fn family_name(f: Family) -> &'static str {
    match f {
        Family::Random => "random",
        Family::Caterpillar => "caterpillar",
        Family::BinpackingPath => "binpacking-path",
        Family::BinpackingStar => "binpacking-star",
    }
}

fn generate(a: &GenArgs, seed: u64) -> Result<Instance, CliError> {
    let n = match a.max_terminals {
        Some(0) => return Err(usage("--max-terminals must be positive")),
        Some(m) if a.count.is_some() => 1 + (seed % m as u64) as usize,
        _ => a.terminals,
    };
    let spec = RandomSpec {
        max_weight: a.max_weight,
        ..RandomSpec::new(n, a.dist.into(), seed)
    };
    let sizes = || match &a.sizes {
        Some(list) => list
            .split(',')
            .map(|s| parse_rational("size", s))
            .collect::<Result<Vec<_>, _>>(),
        None => Ok(random_demands(n, a.dist.into(), seed)),
    };
    let inst = match a.family {
        Family::Random => gen_random(&spec),
        Family::Caterpillar => gen_caterpillar(&spec),
        Family::BinpackingPath => gen_binpacking_path(&sizes()?),
        Family::BinpackingStar => gen_binpacking_star(&sizes()?),
    };
    inst.map_err(usage)
}

/// The height-reduced tree and, per vertex, the vertex of the input it stands for.
fn reduce(inst: &Instance, p: &Params) -> Result<(Instance, String), CliError> {
    let pre = preprocess(inst);
    let h = decompose(&pre.instance, p);
    let rt = height_reduce(&pre.instance, &h, p).map_err(violation)?;
    let mut origin = String::from("ucvrp-origin 1\n");
    for (v, &o) in rt.origin.iter().enumerate() {
        match pre.origin[o] {
            Some(orig) => writeln!(origin, "{v} {orig}").unwrap(),
            None => writeln!(origin, "{v} -").unwrap(),
        }
    }
    Ok((rt.tree, origin))
}

fn sidecar(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".origin");
    PathBuf::from(s)
}

fn emit(a: &GenArgs, seed: u64, path: Option<&Path>, out: &mut dyn Write) -> CliResult {
    let inst = generate(a, seed)?;
    let (inst, origin) = if a.reduce {
        let (t, o) = reduce(&inst, &a.params.params()?)?;
        (t, Some(o))
    } else {
        (inst, None)
    };
    let text = write_instance(&inst);
    match path {
        Some(path) => {
            std::fs::write(path, text).map_err(io_error)?;
            if let Some(origin) = origin {
                std::fs::write(sidecar(path), origin).map_err(io_error)?;
            }
        }
        None => out.write_all(text.as_bytes()).map_err(io_error)?,
    }
    Ok(())
}

pub fn run(a: &GenArgs, out: &mut dyn Write) -> CliResult {
    if a.reduce && a.out.is_none() {
        return Err(usage("--reduce needs --out for the origin sidecar"));
    }
    match a.count {
        None => emit(a, a.seed, a.out.as_deref(), out),
        Some(count) => {
            let dir = a
                .out
                .as_ref()
                .ok_or_else(|| usage("--count needs --out <directory>"))?;
            std::fs::create_dir_all(dir).map_err(io_error)?;
            for seed in a.seed..a.seed + count as u64 {
                let name = format!("{}-{seed:05}.ucvrp", family_name(a.family));
                emit(a, seed, Some(&dir.join(name)), out)?;
            }
            Ok(())
        }
    }
}
