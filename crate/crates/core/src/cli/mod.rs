//! Command-line verbs. Exit codes: 0 success, 1 invariant failure or
//! numeric error, 2 usage error.

mod manifest;

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::bellman::{
    eval_bellman, eval_closed_p3_minus, grid_csv, p3_plus_gamma_scan, scan_grid,
    solve_pogorelov_minus, solve_pogorelov_plus, upper_obstacle, BellmanPoint, Branch,
    GRID_CSV_HEADER,
};
use crate::constants::{conjecture_csv, conjecture_json, conjecture_table};
use crate::error::{Error, Result};
use crate::format::g10;
use crate::grid::GridSpec;
use crate::lift::{certify_csv, certify_scan, check_tau_condition};
use crate::martingale::{
    experiment_csv, inequality_experiment, ito_chain_check, lemma_check, Construction,
    MartingaleSpec, DEFAULT_BATTERY,
};
use crate::pair::ConjugatePair;

pub use manifest::{sha256_hex, OutputDigest, RunManifest};

pub const SEED_ENV: &str = "BELLMART_SEED";
const DEFAULT_SEED: u64 = 20_240_601;

#[derive(Debug, Parser)]
#[command(
    name = "bellmart",
    version,
    about = "Bellman-function numerics for orthogonal martingales"
)]
pub struct Cli {
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Manifest path; defaults to `<out>.manifest.json` when --out is given.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
    #[command(subcommand)]
    pub verb: Verb,
}

#[derive(Debug, Subcommand)]
pub enum Verb {
    /// Laguerre roots and the conjectured constant table.
    Constants(ConstantsArgs),
    /// Evaluate or scan a Bellman function, or solve the boundary system.
    Bellman(BellmanArgs),
    /// Hessian certificate, τ-condition and key inequality scans.
    Certify(CertifyArgs),
    /// Monte Carlo experiments on simulated martingales.
    Simulate(SimulateArgs),
    /// Rerun a manifest and compare output digests.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct ConstantsArgs {
    #[arg(long, default_value_t = 2.0)]
    pub p_min: f64,
    #[arg(long, default_value_t = 10.0)]
    pub p_max: f64,
    #[arg(long, default_value_t = 0.5)]
    pub step: f64,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    pub format: TableFormat,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct BellmanArgs {
    #[arg(long)]
    pub p: f64,
    #[arg(long, requires = "v", conflicts_with = "grid")]
    pub u: Option<f64>,
    #[arg(long, requires = "u")]
    pub v: Option<f64>,
    /// `lo:hi:n`, log-spaced on both axes.
    #[arg(long)]
    pub grid: Option<GridSpec>,
    #[arg(long, default_value = "plus")]
    pub branch: Branch,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct CertifyArgs {
    #[arg(long, default_value_t = 3.0)]
    pub p: f64,
    #[arg(long, default_value = "0.01:100:20")]
    pub grid: GridSpec,
    /// Constrained direction pairs per grid point.
    #[arg(long, default_value_t = 32)]
    pub samples: usize,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Ratio,
    Ito,
    Lemmas,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Args)]
pub struct SimulateArgs {
    #[arg(long, default_value_t = 1.5)]
    pub q: f64,
    #[arg(long, default_value_t = 10_000)]
    pub paths: usize,
    #[arg(long, default_value_t = 1_000)]
    pub steps: usize,
    /// Step size; defaults to 1/steps so the horizon is 1.
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long, env = SEED_ENV, default_value_t = DEFAULT_SEED)]
    pub seed: u64,
    /// A construction name or `all` for the default battery.
    #[arg(long, default_value = "all")]
    pub construction: String,
    #[arg(long, value_enum, default_value_t = Mode::Ratio)]
    pub mode: Mode,
    /// Number of random difference pairs for `--mode lemmas`.
    #[arg(long, default_value_t = 1_000_000)]
    pub draws: usize,
}

#[derive(Debug, Clone, PartialEq, Args)]
pub struct ReplayArgs {
    /// Manifest written by an earlier run.
    pub manifest_file: PathBuf,
}

/// A replayable verb invocation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "verb", content = "args", rename_all = "lowercase")]
pub enum Command {
    Constants(ConstantsArgs),
    Bellman(BellmanArgs),
    Certify(CertifyArgs),
    Simulate(SimulateArgs),
}

/// Output of a verb plus whether its invariants held.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub output: String,
    pub ok: bool,
    /// Human-readable lines for stderr; not part of the digest.
    pub diagnostics: Vec<String>,
}

pub fn exit_code(err: &Error) -> u8 {
    match err {
        Error::Usage(_) | Error::Config(_) => 2,
        _ => 1,
    }
}

fn pair_from_p(p: f64) -> Result<ConjugatePair> {
    ConjugatePair::from_p(p).map_err(|e| match e {
        Error::Domain(msg) => Error::Usage(format!("{msg}; pass q via its conjugate p = q/(q-1)")),
        other => other,
    })
}

fn json_line<T: Serialize>(label: &str, value: &T) -> String {
    format!(
        "{label}: {}",
        serde_json::to_string(value).expect("serializable")
    )
}

impl Command {
    pub fn verb(&self) -> &'static str {
        match self {
            Command::Constants(_) => "constants",
            Command::Bellman(_) => "bellman",
            Command::Certify(_) => "certify",
            Command::Simulate(_) => "simulate",
        }
    }

    pub fn seed(&self) -> Option<u64> {
        match self {
            Command::Certify(a) => Some(a.seed),
            Command::Simulate(a) => Some(a.seed),
            _ => None,
        }
    }

    pub fn execute(&self) -> Result<Outcome> {
        match self {
            Command::Constants(a) => run_constants(a),
            Command::Bellman(a) => run_bellman(a),
            Command::Certify(a) => run_certify(a),
            Command::Simulate(a) => run_simulate(a),
        }
    }
}

fn run_constants(a: &ConstantsArgs) -> Result<Outcome> {
    if a.p_min.is_nan()
        || a.p_min < 1.01
        || a.p_max.is_nan()
        || a.p_max < a.p_min
        || !a.p_max.is_finite()
    {
        return Err(Error::Usage(format!(
            "need 1.01 <= p-min <= p-max, got {}..{}",
            a.p_min, a.p_max
        )));
    }
    if !(a.step > 0.0 && a.step.is_finite()) {
        return Err(Error::Usage(format!(
            "step must be positive, got {}",
            a.step
        )));
    }
    let count = ((a.p_max - a.p_min) / a.step + 1e-9).floor() as usize + 1;
    let ps: Vec<f64> = (0..count).map(|k| a.p_min + k as f64 * a.step).collect();
    let rows = conjecture_table(&ps);
    let output = match a.format {
        TableFormat::Csv => conjecture_csv(&rows),
        TableFormat::Json => {
            let mut s = serde_json::to_string_pretty(&conjecture_json(&rows))?;
            s.push('\n');
            s
        }
    };
    let diagnostics: Vec<String> = rows
        .iter()
        .filter_map(|r| {
            r.outcome
                .as_ref()
                .err()
                .map(|e| format!("row p = {} failed: {e}", r.p))
        })
        .collect();
    Ok(Outcome {
        output,
        ok: diagnostics.is_empty(),
        diagnostics,
    })
}

const DET_TOL: f64 = 1e-8;
const IDENTITY_TOL: f64 = 1e-10;
const BOUND_TOL: f64 = 1e-12;

fn point_checks(pair: ConjugatePair, pt: &BellmanPoint) -> (bool, f64, Option<f64>) {
    let phi = upper_obstacle(pair, pt.u, pt.v);
    let slack = pt.value.min(phi - pt.value) / phi;
    let det = pt.degeneracy_residual().abs();
    let identity = pt.identity_residual(pair.p(), pair.q());
    let ok = det <= DET_TOL && slack >= -BOUND_TOL && identity.is_none_or(|r| r <= IDENTITY_TOL);
    (ok, slack, identity)
}

fn run_bellman(a: &BellmanArgs) -> Result<Outcome> {
    let pair = pair_from_p(a.p)?;
    if let Some(grid) = &a.grid {
        let (rows, summary) = scan_grid(pair, a.branch, grid)?;
        return Ok(Outcome {
            output: grid_csv(&rows),
            ok: summary.passes(DET_TOL, IDENTITY_TOL),
            diagnostics: vec![json_line("summary", &summary)],
        });
    }
    if let (Some(u), Some(v)) = (a.u, a.v) {
        let pt = match a.branch {
            Branch::Plus => eval_bellman(pair, u, v)?,
            Branch::Minus => {
                if !pair.is_p3() {
                    return Err(Error::Usage(
                        "the minus-branch surface is only available at p = 3".into(),
                    ));
                }
                eval_closed_p3_minus(u, v, &solve_pogorelov_minus(pair)?)?
            }
        };
        let (ok, slack, identity) = point_checks(pair, &pt);
        let cells = [
            pt.u,
            pt.v,
            pt.t,
            pt.value,
            pt.b_u,
            pt.b_v,
            pt.tau,
            pt.degeneracy_residual().abs(),
            slack,
        ];
        let line: Vec<String> = cells.iter().map(|&x| g10(x)).collect();
        let mut diagnostics = vec![json_line("point", &pt)];
        if let Some(r) = identity {
            diagnostics.push(format!("identity_residual: {r:e}"));
        }
        return Ok(Outcome {
            output: format!("{GRID_CSV_HEADER}\n{}\n", line.join(",")),
            ok,
            diagnostics,
        });
    }
    // No point and no grid: solve the boundary system only.
    let (sol, mut ok, mut extra) = match a.branch {
        Branch::Plus => {
            let sol = solve_pogorelov_plus(pair);
            let mut extra = serde_json::Map::new();
            let mut ok = true;
            if pair.is_p3() {
                let scan = p3_plus_gamma_scan(1e-3, 20.0);
                ok = scan.unique_at_one();
                extra.insert("gamma_scan".into(), serde_json::to_value(scan)?);
            }
            (sol, ok, extra)
        }
        Branch::Minus => (solve_pogorelov_minus(pair)?, true, serde_json::Map::new()),
    };
    let max_residual = sol.max_residual();
    ok &= max_residual <= 1e-12;
    extra.insert("solution".into(), serde_json::to_value(sol)?);
    extra.insert("max_residual".into(), serde_json::to_value(max_residual)?);
    if let Some(c) = sol.improvement_c {
        extra.insert("c2_over_c1_sq".into(), serde_json::to_value(c - 2.0)?);
        extra.insert(
            "overall_constant".into(),
            serde_json::to_value(sol.overall_constant())?,
        );
    }
    let residuals: serde_json::Map<String, serde_json::Value> = sol
        .residuals()
        .into_iter()
        .map(|(k, v)| (k.to_string(), serde_json::Value::from(v)))
        .collect();
    extra.insert("residuals".into(), residuals.into());
    let mut output = serde_json::to_string_pretty(&extra)?;
    output.push('\n');
    Ok(Outcome {
        output,
        ok,
        diagnostics: Vec::new(),
    })
}

fn run_certify(a: &CertifyArgs) -> Result<Outcome> {
    let pair = pair_from_p(a.p)?;
    let (rows, summary) = certify_scan(pair, &a.grid, a.samples, a.seed)?;
    let mut ok = summary.passes();
    let mut diagnostics = vec![json_line("summary", &summary)];
    if pair.is_p3() {
        let plus = check_tau_condition(&a.grid, Branch::Plus)?;
        ok &= plus.passes(1e-12);
        diagnostics.push(json_line("tau_condition", &plus));
        // Reported only: the minus-branch analogue with c = 2 + C₂/C₁² does
        // not hold on the first quadrant.
        let minus = check_tau_condition(&a.grid, Branch::Minus)?;
        diagnostics.push(json_line("tau_condition_minus (not gating)", &minus));
    }
    Ok(Outcome {
        output: certify_csv(&rows),
        ok,
        diagnostics,
    })
}

fn constructions(name: &str) -> Result<Vec<Construction>> {
    if name == "all" {
        DEFAULT_BATTERY.iter().map(|n| n.parse()).collect()
    } else {
        Ok(vec![name.parse()?])
    }
}

fn run_simulate(a: &SimulateArgs) -> Result<Outcome> {
    let dt = a.dt.unwrap_or(1.0 / a.steps.max(1) as f64);
    let spec = |construction: Construction| MartingaleSpec {
        steps: a.steps,
        dt,
        construction,
        seed: a.seed,
        paths: a.paths,
    };
    match a.mode {
        Mode::Ratio => {
            let mut reports = Vec::new();
            for c in constructions(&a.construction)? {
                reports.push(inequality_experiment(a.q, &spec(c))?);
            }
            let ok = reports.iter().all(|r| r.passes());
            Ok(Outcome {
                output: experiment_csv(&reports),
                ok,
                diagnostics: Vec::new(),
            })
        }
        Mode::Ito => {
            if (a.q - 1.5).abs() > 1e-12 {
                return Err(Error::Usage("--mode ito is only defined at q = 1.5".into()));
            }
            let names = if a.construction == "all" {
                "rotation"
            } else {
                a.construction.as_str()
            };
            let mut output = String::from(
                "q,paths,steps,dt,seed,construction,lhs,rhs,slack,std_error,bellman_mean\n",
            );
            let mut ok = true;
            for c in constructions(names)? {
                let name = c.name();
                let r = ito_chain_check(&spec(c))?;
                ok &= r.passes();
                output.push_str(&format!(
                    "{},{},{},{},{},{},{},{},{},{},{}\n",
                    g10(a.q),
                    a.paths,
                    a.steps,
                    g10(dt),
                    a.seed,
                    name,
                    g10(r.lhs),
                    g10(r.rhs),
                    g10(r.slack),
                    g10(r.std_error),
                    g10(r.bellman_mean)
                ));
            }
            Ok(Outcome {
                output,
                ok,
                diagnostics: Vec::new(),
            })
        }
        Mode::Lemmas => {
            let r = lemma_check(a.draws, a.seed)?;
            Ok(Outcome {
                output: format!(
                    "draws,seed,max_abs_dot,max_bracket_factor,max_u_factor,max_norm_gap\n{},{},{},{},{},{}\n",
                    r.draws,
                    r.seed,
                    g10(r.max_abs_dot),
                    g10(r.max_bracket_factor),
                    g10(r.max_u_factor),
                    g10(r.max_norm_gap)
                ),
                ok: r.passes(),
                diagnostics: Vec::new(),
            })
        }
    }
}

impl Verb {
    fn command(&self) -> Option<Command> {
        match self {
            Verb::Constants(a) => Some(Command::Constants(a.clone())),
            Verb::Bellman(a) => Some(Command::Bellman(a.clone())),
            Verb::Certify(a) => Some(Command::Certify(a.clone())),
            Verb::Simulate(a) => Some(Command::Simulate(a.clone())),
            Verb::Replay(_) => None,
        }
    }
}

fn manifest_path(cli: &Cli) -> Option<PathBuf> {
    cli.manifest.clone().or_else(|| {
        cli.out.as_ref().map(|out| {
            let mut s = out.clone().into_os_string();
            s.push(".manifest.json");
            PathBuf::from(s)
        })
    })
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn replay(args: &ReplayArgs) -> Result<bool> {
    let manifest = RunManifest::read(&args.manifest_file)?;
    let outcome = manifest.command.execute()?;
    let digest = sha256_hex(outcome.output.as_bytes());
    let expected = manifest
        .outputs
        .first()
        .ok_or_else(|| Error::Usage("manifest lists no outputs".into()))?;
    let same = digest == expected.sha256;
    println!(
        "{} {} sha256 {}",
        manifest.verb,
        if same { "reproduced" } else { "DIFFERS" },
        digest
    );
    if !same {
        eprintln!("expected sha256 {}", expected.sha256);
    }
    Ok(same)
}

/// Runs the parsed command line and maps the result to an exit code.
pub fn run(cli: Cli) -> ExitCode {
    let result = match &cli.verb {
        Verb::Replay(args) => replay(args),
        verb => {
            let command = verb.command().expect("non-replay verb");
            command.execute().and_then(|outcome| {
                emit(cli.out.as_deref(), &outcome.output)?;
                for line in &outcome.diagnostics {
                    eprintln!("{line}");
                }
                if let Some(path) = manifest_path(&cli) {
                    RunManifest::new(&command, &outcome.output, cli.out.as_deref()).write(&path)?;
                }
                if !outcome.ok {
                    eprintln!("invariant check failed");
                }
                Ok(outcome.ok)
            })
        }
    };
    match result {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}

pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(cli),
        Err(e) => {
            let _ = e.print();
            ExitCode::from(if e.use_stderr() { 2 } else { 0 })
        }
    }
}
