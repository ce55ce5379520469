use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hypch::config::{load_config, parse_times, Overrides};
use hypch::hyperbolic::FluxChoice;
use hypch::runner::{run_scenario, RunReport};
use hypch::scenarios::{IcVariant, Preset, ScenarioConfig, ScenarioKind, SolverChoice};
use hypch::Error;

/// Default parent of relative output directories.
const OUTPUT_ROOT_VAR: &str = "HYPCH_OUTPUT_ROOT";

#[derive(Parser)]
#[command(name = "hypch", version, about = "Hyperbolic relaxation and reference Cahn-Hilliard solvers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    flags: Flags,
}

#[derive(Subcommand)]
enum Command {
    /// Run the scenario described by a config file.
    Run { config: PathBuf },
    /// Relaxation error against the penalty alpha (stationary ODEs).
    TableAlpha,
    /// Periodic sn solution.
    ExactSn,
    /// 1D spinodal decomposition.
    Spinodal,
    /// 1D Ostwald ripening.
    Ostwald1d,
    /// Radially symmetric bubble in 2D.
    Radial2d,
    /// 2D Ostwald ripening with eight bubbles.
    Ostwald2d,
}

#[derive(Args)]
struct Flags {
    /// Initial data of another scenario (with `run`).
    #[arg(long, global = true)]
    scenario: Option<ScenarioKind>,
    /// paper or desk.
    #[arg(long, global = true)]
    preset: Option<Preset>,
    /// hyperbolic, reference or both.
    #[arg(long, global = true)]
    solver: Option<SolverChoice>,
    /// rusanov or force.
    #[arg(long, global = true)]
    flux: Option<FluxChoice>,
    #[arg(long, global = true)]
    nx: Option<usize>,
    #[arg(long, global = true)]
    ny: Option<usize>,
    #[arg(long, global = true)]
    cfl: Option<f64>,
    /// Reference-solver time step.
    #[arg(long, global = true)]
    dt: Option<f64>,
    #[arg(long, global = true)]
    t_end: Option<f64>,
    #[arg(long, global = true)]
    alpha: Option<f64>,
    #[arg(long, global = true)]
    beta: Option<f64>,
    #[arg(long, global = true)]
    tau: Option<f64>,
    #[arg(long, global = true)]
    gamma: Option<f64>,
    /// wp, ic1, ic2 or ic3.
    #[arg(long, global = true)]
    ic_variant: Option<IcVariant>,
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Comma-separated snapshot times.
    #[arg(long, global = true)]
    snapshots: Option<String>,
    /// Deterministic sequential execution.
    #[arg(long, global = true)]
    seq: bool,
}

fn build(cli: &Cli) -> Result<ScenarioConfig, Error> {
    let f = &cli.flags;
    let ov = Overrides {
        solver: f.solver,
        flux: f.flux,
        nx: f.nx,
        ny: f.ny,
        cfl: f.cfl,
        dt: f.dt,
        t_end: f.t_end,
        alpha: f.alpha,
        beta: f.beta,
        tau: f.tau,
        gamma: f.gamma,
        ic_variant: f.ic_variant,
        out: f.out.clone(),
        snapshots: f.snapshots.as_deref().map(parse_times).transpose()?,
        sequential: f.seq,
    };
    let preset = f.preset.unwrap_or(Preset::Desk);
    let kind = match &cli.command {
        Command::Run { .. } => None,
        Command::TableAlpha => Some(ScenarioKind::AlphaTable),
        Command::ExactSn => Some(ScenarioKind::ExactSn),
        Command::Spinodal => Some(ScenarioKind::Spinodal1D),
        Command::Ostwald1d => Some(ScenarioKind::Ostwald1D),
        Command::Radial2d => Some(ScenarioKind::RadialBubble2D),
        Command::Ostwald2d => Some(ScenarioKind::Ostwald2D),
    };
    let mut cfg = match (&cli.command, kind) {
        (Command::Run { config }, _) => load_config(config)?,
        (_, Some(k)) => ScenarioConfig::preset(k, preset),
        _ => unreachable!(),
    };
    if let (Command::Run { .. }, Some(k)) = (&cli.command, f.scenario) {
        cfg.base = k;
    }
    ov.apply(&mut cfg);
    if f.out.is_none() && cfg.out_dir.is_relative() {
        let root = std::env::var_os(OUTPUT_ROOT_VAR).map_or_else(|| PathBuf::from("output"), PathBuf::from);
        cfg.out_dir = root.join(&cfg.out_dir);
    }
    Ok(cfg)
}

fn summarize(report: &RunReport) {
    if let Some(t) = &report.table {
        print!("{}", t.to_csv());
    }
    if let Some(r) = &report.radial {
        println!("radial steady state: {} steps, rate {:.3e}, converged {}", r.steps, r.rate, r.converged);
    }
    if report.hyperbolic.is_some() {
        println!("hyperbolic: {} steps", report.hyperbolic_steps);
    }
    if report.reference.is_some() {
        println!("reference: {} steps", report.reference_steps);
    }
    for (t, l2, linf) in &report.comparison {
        println!("t = {t}: relative L2 {l2:.4e}, max {linf:.4e}");
    }
    for f in &report.files {
        println!("wrote {}", f.display());
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = build(&cli).and_then(|cfg| run_scenario(&cfg));
    match result {
        Ok(report) => {
            summarize(&report);
            ExitCode::SUCCESS
        }
        Err(e @ Error::BlowUp { .. }) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
