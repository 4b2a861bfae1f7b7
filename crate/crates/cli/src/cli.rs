//! Argument parsing and dispatch.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::Path;
use std::time::Instant;

use clap::parser::ValueSource;
use clap::{Arg, ArgMatches, Command};

use crate::commands;
use crate::error::{CliError, Result};
use crate::manifest::RunManifest;
use crate::output::manifest_path;
use crate::params::{read_config, Params};

const GLOBAL: [&str; 3] = ["seed", "threads", "tolerance"];

fn opt(name: &'static str, help: &'static str) -> Arg {
    Arg::new(name).long(name).value_name(name).allow_negative_numbers(true).help(help)
}

fn family_args() -> [Arg; 4] {
    [
        opt("family", "eigen system: classical, smallpert or gausslag [default: classical]"),
        opt("beta", "classical Laguerre parameter β [default: 1]"),
        opt("b", "small-perturbation or Gauss-Laguerre parameter b [default: 2 / 1]"),
        opt("alpha", "Gauss-Laguerre parameter α [default: 0.6]"),
    ]
}

fn regime_args() -> [Arg; 2] {
    [
        opt("regime", "clock: markov, bochner or inverse [default: markov]"),
        opt("sub", "subordinator, e.g. stable:0.5, poisson:2, drift:1, cpexp:RATE,DECAY[,DRIFT]"),
    ]
}

pub fn command() -> Command {
    Command::new("spcorr")
        .version(env!("CARGO_PKG_VERSION"))
        .about("Spectral projections correlation functions: evaluation, simulation, estimation and validation")
        .subcommand_required(true)
        .arg(opt("config", "plain-text `key = value` file; flags take precedence").global(true))
        .arg(opt("seed", "master RNG seed [default: 0]").global(true))
        .arg(opt("threads", "worker threads (results do not depend on it)").global(true))
        .arg(opt("tolerance", "quadrature tolerance (corr, estimate) or pass/fail threshold (validate)").global(true))
        .subcommand(
            Command::new("corr")
                .about("Closed-form correlations on a grid of (t, s)")
                .args(family_args())
                .args(regime_args())
                .arg(opt("pairing", "PP (eigen/eigen) or PV (eigen/co-eigen) [default: PP]"))
                .arg(opt("m", "index of the function observed at t"))
                .arg(opt("n", "index of the function observed at s"))
                .arg(opt("t", "comma-separated times t"))
                .arg(opt("s", "comma-separated times s"))
                .arg(opt("output", "CSV file, `-` for stdout [default: -]")),
        )
        .subcommand(
            Command::new("simulate")
                .about("Stationary CIR ensembles under the chosen clock")
                .args(regime_args())
                .arg(opt("beta", "CIR parameter β > 0 [default: 1]"))
                .arg(opt("sigma2", "CIR diffusion coefficient σ² [default: 1]"))
                .arg(opt("paths", "number of paths [default: 10000]"))
                .arg(opt("grid", "comma-separated sorted times [default: 0,1]"))
                .arg(opt("output", "paths CSV (path_id,t,value)"))
                .arg(opt("summary", "optional CSV of empirical lag correlations"))
                .arg(opt("m", "eigenfunction index for the summary [default: 1]")),
        )
        .subcommand(
            Command::new("estimate")
                .about("Empirical condition numbers, symmetry test and classifiers")
                .arg(opt("input", "sample CSV (path_id,t,value)"))
                .arg(opt("candidates", "candidate families [default: classical:1,smallpert:2]"))
                .arg(opt("m", "indices for the κ̂ table; the first is used by the tests [default: 1,2,3,4,5,6]"))
                .arg(opt("j", "base time index of g_λ [default: 0]"))
                .arg(opt("eps", "symmetry tolerance [default: 3 SE of κ̂]"))
                .arg(opt("g-input", "CSV (k,g) to classify instead of the sample's g_λ"))
                .arg(opt("output", "JSON file, `-` for stdout [default: -]")),
        )
        .subcommand(
            Command::new("validate")
                .about("Run the identity suite; exits nonzero if any check fails")
                .args(family_args())
                .arg(opt("sub", "restrict subordinator checks to this spec"))
                .arg(opt("output", "optional JSON report")),
        )
        .subcommand(
            Command::new("rerun")
                .about("Replay a run manifest")
                .arg(Arg::new("manifest").required(true).value_name("MANIFEST"))
                .arg(opt("output", "write the primary output here instead")),
        )
}

fn explicit(m: &ArgMatches) -> BTreeMap<String, String> {
    m.ids()
        .filter(|id| m.value_source(id.as_str()) == Some(ValueSource::CommandLine))
        .filter_map(|id| m.get_one::<String>(id.as_str()).map(|v| (id.to_string(), v.clone())))
        .collect()
}

/// Parameters for `sub`: command-line flags over config-file entries.
fn gather(root: &Command, name: &str, matches: &ArgMatches) -> Result<BTreeMap<String, String>> {
    let mut params = BTreeMap::new();
    if let Some(path) = matches.get_one::<String>("config") {
        let known: Vec<String> = root
            .find_subcommand(name)
            .map(|c| c.get_arguments().map(|a| a.get_id().to_string()).collect())
            .unwrap_or_default();
        for (k, v) in read_config(Path::new(path))? {
            if !known.contains(&k) && !GLOBAL.contains(&k.as_str()) {
                return Err(CliError::Usage(format!("config file {path}: `{k}` is not an option of `{name}`")));
            }
            params.insert(k, v);
        }
    }
    params.extend(explicit(matches));
    params.remove("config");
    Ok(params)
}

fn configure_threads(p: &Params) -> Result<()> {
    if let Some(n) = p.opt::<usize>("threads")? {
        // a second initialization in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

/// Runs `command` with `params`; returns whether every check passed and the
/// manifest of the run.
pub fn execute(command: &str, params: Params) -> Result<(bool, RunManifest)> {
    let start = Instant::now();
    configure_threads(&params)?;
    let ok = match command {
        "corr" => commands::corr::run(&params)?,
        "simulate" => commands::simulate::run(&params)?,
        "estimate" => commands::estimate::run(&params)?,
        "validate" => commands::validate::run(&params)?,
        other => return Err(CliError::Usage(format!("unknown command `{other}`"))),
    };
    let parameters = params.resolved();
    let manifest = RunManifest {
        command: command.to_string(),
        seed: parameters.get("seed").and_then(|s| s.parse().ok()),
        parameters,
        tool_version: env!("CARGO_PKG_VERSION").to_string(),
        wall_time_seconds: start.elapsed().as_secs_f64(),
    };
    if let Some(path) = manifest.parameters.get("output").and_then(|o| manifest_path(o)) {
        manifest.write(&path)?;
    }
    Ok((ok, manifest))
}

/// Parses `args` and runs the selected command.
pub fn run<I, T>(args: I) -> Result<bool>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let root = command();
    let matches = root.clone().try_get_matches_from(args).map_err(|e| match e.kind() {
        clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion => {
            print!("{e}");
            CliError::Usage(String::new())
        }
        _ => CliError::Usage(e.to_string().trim_start_matches("error: ").trim_end().to_string()),
    })?;
    let (name, sub) = matches.subcommand().expect("a subcommand is required");
    if name == "rerun" {
        let path = sub.get_one::<String>("manifest").expect("required");
        let manifest = RunManifest::read(Path::new(path))?;
        let mut params = Params::new(manifest.parameters.clone());
        if let Some(out) = sub.get_one::<String>("output") {
            params.set("output", out.clone());
        }
        return Ok(execute(&manifest.command, params)?.0);
    }
    let params = gather(&root, name, sub)?;
    Ok(execute(name, Params::new(params))?.0)
}
