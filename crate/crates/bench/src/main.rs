use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::Context;
use clap::{Parser, Subcommand, ValueEnum};
use jppc_bench::baselines::{solve_joint, RunOptions};
use jppc_bench::check::run_checks;
use jppc_bench::experiment::{ExperimentSpec, SolverChoice};
use jppc_bench::sweep::{trace_rows, write_csv, write_sidecar};
use jppc_bench::{read_scenario, sweep, timing_table};
use jppc_core::{control_power, is_feasible, link_params, SolverReport, Status, SurrogateKind};
use serde::Serialize;

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Surrogate {
    Proposed,
    Baseline,
}

impl From<Surrogate> for SurrogateKind {
    fn from(s: Surrogate) -> Self {
        match s {
            Surrogate::Proposed => SurrogateKind::Proposed,
            Surrogate::Baseline => SurrogateKind::Baseline,
        }
    }
}

/// Joint UAV positioning and power control for two-way AF relaying.
#[derive(Debug, Parser)]
#[command(name = "jppc", version)]
struct Cli {
    /// Overrides the seed of an experiment spec.
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum)]
    solver: Option<SolverChoice>,
    /// Surrogate used by the SCA solver.
    #[arg(long, global = true, value_enum)]
    surrogate: Option<Surrogate>,
    /// Overrides the trial count of an experiment spec.
    #[arg(long, global = true)]
    trials: Option<usize>,
    /// Output file; `solve` writes to stdout without it.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Solve one scenario file and emit the report as JSON.
    Solve {
        scenario: PathBuf,
        /// Also write the convergence trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run every strategy over an experiment spec and write a CSV.
    Sweep { spec: PathBuf },
    /// Average solver wall times over an experiment spec and write a CSV.
    BenchTime { spec: PathBuf },
    /// Run the quick invariant suite.
    Check,
}

enum Failure {
    /// Unreadable, invalid or infeasible input: exit 2.
    Input(anyhow::Error),
    /// A solver error or a failed check: exit 3.
    Solver(anyhow::Error),
    Other(anyhow::Error),
}

impl From<anyhow::Error> for Failure {
    fn from(e: anyhow::Error) -> Self {
        Failure::Other(e)
    }
}

#[derive(Serialize)]
struct SolveOutput<'a> {
    solver: SolverChoice,
    surrogate: SurrogateKind,
    status: Status,
    sum_rate_bps: f64,
    control_power_w: f64,
    feasible: bool,
    wall_time_s: f64,
    report: &'a SolverReport,
}

fn load_spec(path: &Path, cli: &Cli) -> Result<ExperimentSpec, Failure> {
    let mut spec = ExperimentSpec::read(path).map_err(Failure::Input)?;
    if let Some(seed) = cli.seed {
        spec.seed = seed;
    }
    if let Some(t) = cli.trials {
        spec.trials = t;
    }
    if let Some(s) = cli.solver {
        spec.solver = s;
    }
    if let Some(s) = cli.surrogate {
        spec.surrogate = s.into();
    }
    spec.validate().map_err(Failure::Input)?;
    Ok(spec)
}

fn out_path<'a>(cli: &'a Cli, what: &str) -> Result<&'a Path, Failure> {
    cli.out.as_deref().ok_or_else(|| Failure::Input(anyhow::anyhow!("{what} needs --out PATH")))
}

fn solve(cli: &Cli, scenario: &Path, trace: Option<&Path>) -> Result<(), Failure> {
    let s = read_scenario(scenario).map_err(Failure::Input)?;
    let solver = cli.solver.unwrap_or(SolverChoice::Agp);
    let surrogate: SurrogateKind = cli.surrogate.map_or(SurrogateKind::Proposed, Into::into);
    let opts = RunOptions::new(solver, surrogate);
    let start = Instant::now();
    let mut report = match solve_joint(&s, &opts) {
        Ok(r) => r,
        Err(e @ (jppc_core::Error::Infeasible { .. } | jppc_core::Error::DimensionMismatch { .. })) => {
            return Err(Failure::Input(e.into()))
        }
        Err(e) => return Err(Failure::Solver(e.into())),
    };
    report.wall_time_s = start.elapsed().as_secs_f64();
    let lp = link_params(&s);
    let out = SolveOutput {
        solver,
        surrogate,
        status: report.status,
        sum_rate_bps: report.final_rate(),
        control_power_w: control_power(&report.final_decision.x_r, &s, &lp),
        feasible: is_feasible(&report.final_decision, &s, &lp, 1e-6).feasible,
        wall_time_s: report.wall_time_s,
        report: &report,
    };
    let json = serde_json::to_string_pretty(&out).context("serializing report")?;
    match &cli.out {
        Some(p) => std::fs::write(p, json).with_context(|| format!("writing {}", p.display()))?,
        None => println!("{json}"),
    }
    if let Some(p) = trace {
        write_csv(&trace_rows(&report), p)?;
    }
    if report.status == Status::InfeasibleInput {
        return Err(Failure::Input(anyhow::anyhow!("no feasible UAV position for this scenario")));
    }
    Ok(())
}

fn run(cli: &Cli) -> Result<(), Failure> {
    match &cli.command {
        Command::Solve { scenario, trace } => solve(cli, scenario, trace.as_deref()),
        Command::Sweep { spec } => {
            let spec = load_spec(spec, cli)?;
            let out = out_path(cli, "sweep")?;
            let rows = sweep(&spec).map_err(Failure::Solver)?;
            write_csv(&rows, out)?;
            let side = write_sidecar(&spec, out)?;
            eprintln!("{} rows to {}, spec in {}", rows.len(), out.display(), side.display());
            Ok(())
        }
        Command::BenchTime { spec } => {
            let spec = load_spec(spec, cli)?;
            let out = out_path(cli, "bench-time")?;
            let rows = timing_table(&spec).map_err(Failure::Solver)?;
            write_csv(&rows, out)?;
            write_sidecar(&spec, out)?;
            for r in &rows {
                eprintln!(
                    "K={:>3}: SCA(baseline) {:.4} s, SCA(proposed) {:.4} s, AGP {:.4} s",
                    r.k, r.sca_baseline_s, r.sca_proposed_s, r.agp_s
                );
            }
            Ok(())
        }
        Command::Check => {
            let outcomes = run_checks(cli.seed.unwrap_or(0), cli.trials.unwrap_or(5));
            for o in &outcomes {
                println!("{} {} ({})", if o.passed { "PASS" } else { "FAIL" }, o.name, o.detail);
            }
            if let Some(p) = &cli.out {
                std::fs::write(p, serde_json::to_string_pretty(&outcomes).context("serializing checks")?)
                    .with_context(|| format!("writing {}", p.display()))?;
            }
            match outcomes.iter().filter(|o| !o.passed).count() {
                0 => Ok(()),
                n => Err(Failure::Solver(anyhow::anyhow!("{n} check(s) failed"))),
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Solver(e)) => {
            eprintln!("solver failure: {e:#}");
            ExitCode::from(3)
        }
        Err(Failure::Other(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
