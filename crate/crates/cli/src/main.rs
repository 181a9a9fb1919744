//! `wqed`: run diagram-engine experiments from JSON configs and emit CSV/JSON.
//!
//! Exit codes: 0 success, 1 failed check or I/O error, 2 usage or config error,
//! 3 diagram cap exceeded.

mod check;
mod config;
mod output;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use wqed_core::diagrams::{DiagramError, DEFAULT_DIAGRAM_CAP};
use wqed_core::fermi::{fermi_config, markovian_e1};
use wqed_core::{Engine, InitialCondition};

use config::{Overrides, RunConfig};
use output::Observable;

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Cap(String),
    Runtime(anyhow::Error),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Cap(m) => f.write_str(m),
            CliError::Runtime(e) => write!(f, "{e:#}"),
        }
    }
}

impl CliError {
    fn code(&self) -> u8 {
        match self {
            CliError::Runtime(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Cap(_) => 3,
        }
    }

    pub fn from_diagram(e: DiagramError) -> Self {
        match e {
            DiagramError::HorizonTooLarge { cap } => CliError::Cap(format!(
                "more than {cap} diagrams below the horizon; lower the horizon or raise {CAP_ENV}"
            )),
            DiagramError::Config(c) => CliError::Usage(c.to_string()),
            DiagramError::Horizon(h) => CliError::Usage(format!("bad horizon {h}")),
            other => CliError::Runtime(other.into()),
        }
    }
}

impl From<anyhow::Error> for CliError {
    fn from(e: anyhow::Error) -> Self {
        CliError::Runtime(e)
    }
}

const CAP_ENV: &str = "WQED_DIAGRAM_CAP";

#[derive(Debug, Parser)]
#[command(name = "wqed", version, about = "Single-photon dynamics of qubit chains in a waveguide, from diagrams")]
struct Cli {
    /// Worker threads for time-grid evaluation (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate observables on the config's time grid and write CSV.
    Simulate(SimulateArgs),
    /// Write the two-qubit feedback data: |e1|² with its Markovian counterpart and
    /// snapshots of the field between the qubits.
    FermiDemo(FermiArgs),
    /// Run a self-check and print a JSON report; exit 0 iff it passes.
    Check(CheckArgs),
}

#[derive(Debug, Args)]
struct OverrideArgs {
    #[arg(long)]
    horizon: Option<f64>,
    #[arg(long)]
    t_points: Option<usize>,
    #[arg(long)]
    x_points: Option<usize>,
    #[arg(long)]
    omega: Option<f64>,
    #[arg(long)]
    j0: Option<f64>,
    #[arg(long)]
    separation: Option<f64>,
}

impl From<&OverrideArgs> for Overrides {
    fn from(a: &OverrideArgs) -> Self {
        Overrides {
            horizon: a.horizon,
            t_points: a.t_points,
            x_points: a.x_points,
            omega: a.omega,
            j0: a.j0,
            separation: a.separation,
        }
    }
}

#[derive(Debug, Args)]
struct SimulateArgs {
    config: PathBuf,
    /// Output CSV; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Comma-separated `e:<qubit>`, `field` (chain midpoint) or `field:<x>`.
    /// Defaults to every qubit.
    #[arg(long)]
    observables: Option<String>,
    /// Also write the field at t = horizon on `grid.x_points` positions.
    #[arg(long)]
    profile_out: Option<PathBuf>,
    #[command(flatten)]
    overrides: OverrideArgs,
}

#[derive(Debug, Args)]
struct FermiArgs {
    /// Qubit separation in units of 1/J0: one of 5, 2, 0.3.
    #[arg(long = "L", allow_hyphen_values = true)]
    l: f64,
    #[arg(long, default_value_t = 200.0)]
    omega: f64,
    #[arg(long)]
    out: PathBuf,
    #[arg(long, default_value_t = 2001)]
    t_points: usize,
    #[arg(long, default_value_t = 401)]
    x_points: usize,
}

#[derive(Debug, Args)]
struct CheckArgs {
    #[arg(long, value_enum)]
    what: check::What,
    config: PathBuf,
    #[command(flatten)]
    overrides: OverrideArgs,
}

fn diagram_cap() -> Result<usize, CliError> {
    match std::env::var(CAP_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&c| c > 0)
            .ok_or_else(|| CliError::Usage(format!("{CAP_ENV} must be a positive integer, got '{v}'"))),
        Err(_) => Ok(DEFAULT_DIAGRAM_CAP),
    }
}

fn load(path: &Path, o: &OverrideArgs) -> Result<RunConfig, CliError> {
    let mut cfg = RunConfig::load(path)?;
    cfg.apply(&o.into())?;
    Ok(cfg)
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

/// Horizon just above `t` so that `t` itself is exact.
fn horizon_after(t: f64) -> f64 {
    t + 1e-9 * (1.0 + t.abs())
}

fn simulate(args: &SimulateArgs) -> Result<(), CliError> {
    let run = load(&args.config, &args.overrides)?;
    let cfg = run.chain()?;
    let init = run.initial_condition()?;
    let obs: Vec<Observable> = match &args.observables {
        Some(list) => output::parse_observables(list).map_err(CliError::Usage)?,
        None => (0..cfg.num_qubits()).map(Observable::Excitation).collect(),
    };
    for o in &obs {
        o.check(&cfg).map_err(CliError::Usage)?;
    }
    let engine = Engine::with_cap(&cfg, &init, horizon_after(run.horizon), diagram_cap()?).map_err(CliError::from_diagram)?;
    log::info!("{} diagrams below t = {}", engine.diagram_count(), run.horizon);
    let csv = output::simulate_csv(&engine, &obs, &run.times());
    match &args.out {
        Some(p) => write(p, &csv)?,
        None => print!("{csv}"),
    }
    if let Some(p) = &args.profile_out {
        let xs = profile_grid(&cfg, run.horizon, run.grid.x_points.unwrap_or(401));
        write(p, &output::profile_csv(&engine, &[run.horizon], &xs))?;
    }
    Ok(())
}

/// Every point light from the chain can have reached by `t`.
fn profile_grid(cfg: &wqed_core::ChainConfig, t: f64, points: usize) -> Vec<f64> {
    let xs = cfg.positions();
    wqed_core::evaluator::segment_grid(xs[0] - t, xs[xs.len() - 1] + t, points)
}

const FERMI_SEPARATIONS: [f64; 3] = [5.0, 2.0, 0.3];

fn fermi_demo(args: &FermiArgs) -> Result<(), CliError> {
    if !FERMI_SEPARATIONS.iter().any(|&l| (l - args.l).abs() < 1e-12) {
        return Err(CliError::Usage(format!("--L must be one of 5, 2, 0.3 (got {})", args.l)));
    }
    if !(args.omega.is_finite() && args.omega > 0.0) {
        return Err(CliError::Usage(format!("--omega must be positive, got {}", args.omega)));
    }
    if args.t_points < 2 || args.x_points < 2 {
        return Err(CliError::Usage("--t-points and --x-points must be at least 2".into()));
    }
    let (j0, l, omega) = (1.0, args.l, args.omega);
    let cfg = fermi_config(j0, omega, l).map_err(|e| CliError::Usage(e.to_string()))?;
    let t_max = (7.0 * l).max(5.0 / j0);
    let engine = Engine::with_cap(&cfg, &InitialCondition::ExcitedQubit(0), horizon_after(t_max), diagram_cap()?)
        .map_err(CliError::from_diagram)?;
    std::fs::create_dir_all(&args.out).with_context(|| format!("creating {}", args.out.display()))?;

    let theta = omega * l;
    let mut e1 = String::from("t,e:1.re,e:1.im,e:1.abs2,markov.abs2\n");
    for k in 0..args.t_points {
        let t = t_max * k as f64 / (args.t_points - 1) as f64;
        let v = engine.excitation(1, t);
        let m = markovian_e1(t, 2.0 * j0, theta, omega);
        e1.push_str(&format!(
            "{},{},{},{},{}\n",
            output::num(t),
            output::num(v.re),
            output::num(v.im),
            output::num(v.norm_sqr()),
            output::num(m.norm_sqr())
        ));
    }
    write(&args.out.join("e1.csv"), &e1)?;

    let xs = wqed_core::evaluator::segment_grid(-l / 2.0, l / 2.0, args.x_points);
    let snapshots: Vec<f64> = [0.5, 1.5, 2.5, 3.5].iter().map(|k| k * l).collect();
    write(&args.out.join("field.csv"), &output::profile_csv(&engine, &snapshots, &xs))?;
    Ok(())
}

fn check_cmd(args: &CheckArgs) -> Result<bool, CliError> {
    let run = load(&args.config, &args.overrides)?;
    let cfg = run.chain()?;
    let init = run.initial_condition()?;
    let report = check::run(args.what, &cfg, &init, run.horizon, diagram_cap()?)?;
    let text = serde_json::to_string_pretty(&report).context("serialising report")?;
    println!("{text}");
    Ok(report.pass)
}

fn run(cli: &Cli) -> Result<bool, CliError> {
    match &cli.command {
        Command::Simulate(a) => simulate(a).map(|_| true),
        Command::FermiDemo(a) => fermi_demo(a).map(|_| true),
        Command::Check(a) => check_cmd(a),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be positive");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    }
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
