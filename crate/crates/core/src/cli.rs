//! Command-line front end. Every subcommand prints JSON lines on stdout and
//! diagnostics on stderr.
//!
//! Exit codes: 0 on success, 1 when a computation fails or a reported
//! check does not hold, 2 for usage, input and parse errors.

use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::dist::MixtureDistribution;
use crate::error::{Error, Result};
use crate::linearize::{solve_linearized, verify_structure, DEFAULT_BUDGET};
use crate::lowerbound::{opt_lower_bound_binary, opt_lower_bound_multi, QuadConfig};
use crate::offset::theta;
use crate::policy::Policy;
use crate::regret::{
    binary_regret, binary_worstcase, mc_regret, offset_worstcase_atoms, regret_exact, worstcase_search_n, Evaluator,
    Instance, RegretEstimate, SearchConfig,
};
use crate::reproduce::{reproduce, Example, ReproduceParams, DEFAULT_SLABS};
use crate::selftest::selftest;

pub const THREADS_ENV: &str = "REGRETLAB_THREADS";

#[derive(Debug, Parser)]
#[command(name = "regretlab", version, about = "Offset policies for noisy selection: regret, bounds and reproductions")]
pub struct Cli {
    /// Indent the JSON output.
    #[arg(long, global = true)]
    pub pretty: bool,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Offset θ and side maximizers of one noise distribution.
    Theta {
        #[arg(long)]
        dist: PathBuf,
        /// Slab count for `{"equal_revenue": {"c": ..}}` inputs.
        #[arg(long, default_value_t = DEFAULT_SLABS)]
        slabs: usize,
    },
    /// Regret of a policy at the instance's values.
    Regret {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        policy: PathBuf,
        #[command(flatten)]
        mode: RegretMode,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Search for the values that hurt a policy most.
    Worstcase {
        #[arg(long)]
        noises: PathBuf,
        #[arg(long)]
        policy: PathBuf,
        #[arg(long, default_value_t = 4)]
        restarts: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Score candidates by Monte Carlo with this many samples.
        #[arg(long)]
        mc: Option<u64>,
        #[arg(long, default_value_t = DEFAULT_SLABS)]
        slabs: usize,
    },
    /// Certified lower bound on the optimal worst-case regret.
    Bound {
        #[arg(long)]
        noises: PathBuf,
        /// Treat the noises as one multi-item instance.
        #[arg(long)]
        multi: bool,
        /// Relative quadrature tolerance.
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SLABS)]
        slabs: usize,
    },
    /// Solve the linearized program. The first noise is the noiseless
    /// reference and must be a point mass.
    Linearize {
        #[arg(long)]
        noises: PathBuf,
        #[arg(long, default_value_t = DEFAULT_BUDGET)]
        budget: f64,
        #[arg(long, default_value_t = DEFAULT_SLABS)]
        slabs: usize,
    },
    /// Recompute a named result and compare it with its closed form.
    Reproduce(ReproduceArgs),
    /// Run the invariant suite of every module.
    Selftest {
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
pub struct RegretMode {
    #[arg(long)]
    exact: bool,
    /// Monte Carlo sample count.
    #[arg(long)]
    mc: Option<u64>,
}

#[derive(Debug, Args)]
pub struct ReproduceArgs {
    #[arg(long)]
    example: Example,
    #[arg(long)]
    c: Option<f64>,
    #[arg(long)]
    slabs: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    count: Option<usize>,
    #[arg(long)]
    samples: Option<u64>,
    #[arg(long)]
    noises: Option<PathBuf>,
    /// Comma-separated values, for `shrink`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    values: Option<Vec<f64>>,
}

/// Accepted forms of a single distribution in input files.
#[derive(Deserialize)]
#[serde(untagged)]
enum DistSpec {
    EqualRevenue { equal_revenue: EqualRevenueSpec },
    Mixture(MixtureDistribution),
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct EqualRevenueSpec {
    c: f64,
    #[serde(default)]
    slabs: Option<usize>,
}

#[derive(Deserialize)]
#[serde(untagged)]
enum NoisesSpec {
    List(Vec<DistSpec>),
    Wrapped { noises: Vec<DistSpec> },
    Single(DistSpec),
}

impl DistSpec {
    fn build(self, slabs: usize) -> Result<MixtureDistribution> {
        match self {
            DistSpec::Mixture(d) => Ok(d),
            DistSpec::EqualRevenue { equal_revenue: e } => {
                MixtureDistribution::equal_revenue(e.c, e.slabs.unwrap_or(slabs))
            }
        }
    }
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path)
        .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))
}

fn parse<T: for<'de> Deserialize<'de>>(path: &Path) -> Result<T> {
    serde_json::from_str(&read(path)?).map_err(|e| Error::InvalidParameter(format!("{}: {e}", path.display())))
}

pub fn load_dist(path: &Path, slabs: usize) -> Result<MixtureDistribution> {
    parse::<DistSpec>(path)?.build(slabs)
}

pub fn load_noises(path: &Path, slabs: usize) -> Result<Vec<MixtureDistribution>> {
    let specs = match parse::<NoisesSpec>(path)? {
        NoisesSpec::List(v) | NoisesSpec::Wrapped { noises: v } => v,
        NoisesSpec::Single(d) => vec![d],
    };
    if specs.is_empty() {
        return Err(Error::EmptyInstance);
    }
    specs.into_iter().map(|s| s.build(slabs)).collect()
}

/// Result of one subcommand: JSON lines plus whether its checks held.
struct Output {
    lines: Vec<Value>,
    ok: bool,
}

impl Output {
    fn one<T: Serialize>(v: &T, ok: bool) -> Result<Self> {
        Ok(Output { lines: vec![serde_json::to_value(v)?], ok })
    }
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::DegenerateProfile(_)
        | Error::QuadratureFailed { .. }
        | Error::TooManyOutcomes { .. }
        | Error::EmptyIndexSet => 1,
        _ => 2,
    }
}

fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::InvalidParameter(format!("{THREADS_ENV} must be a positive integer, got {raw:?}")))?;
    // Fails only if a pool was already installed, which is harmless.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(cmd: Command) -> Result<Output> {
    match cmd {
        Command::Theta { dist, slabs } => {
            let d = load_dist(&dist, slabs)?;
            let p = theta(&d);
            let mut v = serde_json::to_value(p)?;
            v["regret"] = json!(p.regret());
            Ok(Output { lines: vec![v], ok: true })
        }
        Command::Regret { instance, policy, mode, seed } => {
            let inst: Instance = parse(&instance)?;
            inst.validate()?;
            let values = inst.values.clone().ok_or_else(|| Error::InvalidParameter("instance needs values".into()))?;
            let est = match parse::<Policy>(&policy)? {
                Policy::Offset(pol) => match mode.mc {
                    Some(samples) => mc_regret(&inst, &pol, samples, seed)?,
                    None => RegretEstimate::exact(regret_exact(&inst.noises, &values, &pol)?),
                },
                Policy::Binary(pol) => {
                    if inst.len() != 1 {
                        return Err(Error::InvalidParameter("a binary policy takes exactly one noise".into()));
                    }
                    if mode.mc.is_some() {
                        return Err(Error::InvalidParameter("binary policies are evaluated exactly".into()));
                    }
                    RegretEstimate::exact(binary_regret(&inst.noises[0], &pol, values[0]))
                }
            };
            Output::one(&est, true)
        }
        Command::Worstcase { noises, policy, restarts, seed, mc, slabs } => {
            let noises = load_noises(&noises, slabs)?;
            match parse::<Policy>(&policy)? {
                Policy::Binary(pol) => {
                    if noises.len() != 1 {
                        return Err(Error::InvalidParameter("a binary policy takes exactly one noise".into()));
                    }
                    let w = binary_worstcase(&noises[0], &pol);
                    Output::one(&json!({"regret": RegretEstimate::exact(w.regret), "worst_v": w.worst_v}), true)
                }
                Policy::Offset(pol) => {
                    let evaluator = match mc {
                        Some(samples) => Evaluator::MonteCarlo { samples, seed },
                        None => Evaluator::Exact,
                    };
                    let cfg = SearchConfig { restarts, seed, evaluator, ..Default::default() };
                    let found = worstcase_search_n(&noises, &pol, &cfg)?;
                    let mut v = serde_json::to_value(&found)?;
                    if noises.len() <= 3 && noises.iter().all(|a| a.is_atomic()) {
                        let (w, at) = offset_worstcase_atoms(&noises, &pol)?;
                        v["exact_worstcase"] = json!({"regret": w, "values": at});
                    }
                    Ok(Output { lines: vec![v], ok: true })
                }
            }
        }
        Command::Bound { noises, multi, tol, slabs } => {
            let noises = load_noises(&noises, slabs)?;
            let mut quad = QuadConfig::default();
            if let Some(t) = tol {
                if !(t > 0.0) {
                    return Err(Error::InvalidParameter(format!("--tol must be positive, got {t}")));
                }
                quad.rel_tol = t;
            }
            if multi {
                let r = opt_lower_bound_multi(&noises, &quad, &SearchConfig::default())?;
                return Output::one(&r, true);
            }
            let mut out = Output { lines: vec![], ok: true };
            for a in &noises {
                let r = opt_lower_bound_binary(a, &quad)?;
                out.ok &= r.ratio_ok;
                out.lines.push(serde_json::to_value(&r)?);
            }
            Ok(out)
        }
        Command::Linearize { noises, budget, slabs } => {
            let noises = load_noises(&noises, slabs)?;
            if noises[0].components().len() != 1 || !noises[0].is_atomic() {
                return Err(Error::InvalidParameter(
                    "the first noise is the reference and must be a point mass".into(),
                ));
            }
            let thetas: Vec<f64> =
                noises.iter().enumerate().map(|(i, a)| if i == 0 { 0.0 } else { theta(a).theta }).collect();
            let sol = solve_linearized(&noises, &thetas, budget)?;
            let structure = verify_structure(&noises, &sol)?;
            let ok = structure.index_set_ok && structure.tails_ok;
            Output::one(&json!({"solution": sol, "structure": structure}), ok)
        }
        Command::Reproduce(a) => {
            let mut p = ReproduceParams::default();
            p.c = a.c.unwrap_or(p.c);
            p.slabs = a.slabs.unwrap_or(p.slabs);
            p.alpha = a.alpha.unwrap_or(p.alpha);
            p.seed = a.seed.unwrap_or(p.seed);
            p.count = a.count.unwrap_or(p.count);
            p.samples = a.samples.unwrap_or(p.samples);
            p.values = a.values;
            if let Some(path) = &a.noises {
                p.noises = Some(load_noises(path, p.slabs)?);
            }
            let r = reproduce(a.example, &p)?;
            let ok = r.pass;
            Output::one(&r, ok)
        }
        Command::Selftest { seed } => {
            let r = selftest(seed)?;
            let ok = r.pass;
            Output::one(&r, ok)
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the
/// process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = e.exit_code();
            let rendered = e.render().to_string();
            let _ = if code == 0 { out.write_all(rendered.as_bytes()) } else { err.write_all(rendered.as_bytes()) };
            return code;
        }
    };
    let result = configure_threads().and_then(|()| execute(cli.command));
    match result {
        Ok(o) => {
            for line in &o.lines {
                let text = if cli.pretty { serde_json::to_string_pretty(line) } else { serde_json::to_string(line) };
                match text {
                    Ok(t) => {
                        if writeln!(out, "{t}").is_err() {
                            return 1;
                        }
                    }
                    Err(e) => {
                        let _ = writeln!(err, "error: {e}");
                        return 1;
                    }
                }
            }
            if o.ok {
                0
            } else {
                let _ = writeln!(err, "check failed");
                1
            }
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn call(args: &[&str]) -> (i32, String, String) {
        let (mut o, mut e) = (vec![], vec![]);
        let code = run_with(std::iter::once("regretlab").chain(args.iter().copied()), &mut o, &mut e);
        (code, String::from_utf8(o).unwrap(), String::from_utf8(e).unwrap())
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(call(&[]).0, 2);
        assert_eq!(call(&["theta"]).0, 2);
        assert_eq!(call(&["reproduce", "--example", "nope"]).0, 2);
        assert_eq!(call(&["regret", "--instance", "x", "--policy", "y"]).0, 2);
        assert_eq!(call(&["regret", "--instance", "x", "--policy", "y", "--exact", "--mc", "5"]).0, 2);
        assert_eq!(call(&["theta", "--dist", "/nonexistent/file.json"]).0, 2);
    }

    #[test]
    fn reproduce_expectation() {
        let (code, out, _) = call(&["reproduce", "--example", "expectation", "--c", "403.4288", "--slabs", "4000"]);
        assert_eq!(code, 0);
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        assert_eq!(v["pass"], true);
        assert_eq!(v["example"], "expectation");
    }

    #[test]
    fn reproduce_rejects_bad_c() {
        assert_eq!(call(&["reproduce", "--example", "expectation", "--c", "0.5"]).0, 2);
    }

    #[test]
    fn pretty_output_spans_lines() {
        let (code, out, _) = call(&["--pretty", "reproduce", "--example", "deterministic"]);
        assert_eq!(code, 0);
        assert!(out.lines().count() > 3);
        let v: Value = serde_json::from_str(&out).unwrap();
        assert_eq!(v["pass"], true);
    }

    #[test]
    fn shrink_values_flag_accepts_negatives() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("n.json");
        std::fs::write(
            &path,
            r#"[{"components":[{"atom":{"at":0,"w":1}}]},{"components":[{"uniform":{"lo":-1,"hi":1,"w":1}}]}]"#,
        )
        .unwrap();
        let (code, out, err) =
            call(&["reproduce", "--example", "shrink", "--noises", path.to_str().unwrap(), "--values", "0,-0.05"]);
        assert_eq!(code, 0, "{err}");
        let v: Value = serde_json::from_str(out.trim()).unwrap();
        assert!(v["computed"]["multiplier"].as_f64().unwrap() >= 1.0);
    }
}
