//! Parameter sweeps, convergence traces and their CSV/JSON output.

use std::fs::File;
use std::path::{Path, PathBuf};

use anyhow::Context;
use jppc_core::{control_power, is_feasible, link_params, Scenario, SolverReport, Status};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{run_baseline, BaselineKind, RunOptions};
use crate::experiment::{generate_scenario_k, ExperimentSpec, SolverChoice};

/// One strategy on one scenario. Powers in watts, positions in meters,
/// rates in bits/s.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub seed: u64,
    pub trial: u64,
    pub k: usize,
    /// Swept parameter name, empty without a sweep.
    pub variable: String,
    /// Swept value in dBm or dB.
    pub value: Option<f64>,
    pub strategy: BaselineKind,
    pub solver: SolverChoice,
    pub status: String,
    pub sum_rate_bps: f64,
    pub x_m: f64,
    pub y_m: f64,
    pub z_m: f64,
    pub control_power_w: f64,
    pub uav_power_w: f64,
    pub bs_power_w: f64,
    pub feasible: bool,
    pub outer_iterations: usize,
    pub wall_time_s: f64,
}

pub fn status_name(status: Status) -> &'static str {
    match status {
        Status::Converged => "converged",
        Status::IterationLimit => "iteration-limit",
        Status::InfeasibleInput => "infeasible-input",
    }
}

/// Solver that actually produced a strategy's result.
fn effective_solver(kind: BaselineKind, solver: SolverChoice) -> SolverChoice {
    if kind == BaselineKind::Jppc {
        solver
    } else {
        SolverChoice::Agp
    }
}

/// Summarize one run. Solver failures become rows with a `solver-failure`
/// status and a NaN rate.
pub fn make_row(
    spec: &ExperimentSpec,
    trial: u64,
    value: Option<f64>,
    kind: BaselineKind,
    s: &Scenario,
    result: &jppc_core::Result<SolverReport>,
) -> SweepRow {
    let lp = link_params(s);
    let mut row = SweepRow {
        seed: spec.seed,
        trial,
        k: s.num_ues(),
        variable: spec.sweep.as_ref().map_or(String::new(), |sw| sw.variable.name().to_string()),
        value,
        strategy: kind,
        solver: effective_solver(kind, spec.solver),
        status: String::new(),
        sum_rate_bps: f64::NAN,
        x_m: f64::NAN,
        y_m: f64::NAN,
        z_m: f64::NAN,
        control_power_w: f64::NAN,
        uav_power_w: f64::NAN,
        bs_power_w: f64::NAN,
        feasible: false,
        outer_iterations: 0,
        wall_time_s: 0.0,
    };
    match result {
        Err(e) => row.status = format!("solver-failure: {e}"),
        Ok(rep) => {
            let d = &rep.final_decision;
            row.status = status_name(rep.status).to_string();
            row.sum_rate_bps = if rep.status == Status::InfeasibleInput { 0.0 } else { rep.final_rate() };
            [row.x_m, row.y_m, row.z_m] = d.x_r;
            row.control_power_w = control_power(&d.x_r, s, &lp);
            row.uav_power_w = d.uav_power();
            row.bs_power_w = d.bs_power();
            row.feasible = rep.status != Status::InfeasibleInput && is_feasible(d, s, &lp, 1e-6).feasible;
            row.outer_iterations = rep.outer_iterations();
            row.wall_time_s = rep.wall_time_s;
        }
    }
    row
}

/// Every strategy of `spec` on every trial and sweep value. Trials run in
/// parallel; rows come back ordered by trial, value and strategy.
pub fn sweep(spec: &ExperimentSpec) -> anyhow::Result<Vec<SweepRow>> {
    spec.validate()?;
    let opts = RunOptions::new(spec.solver, spec.surrogate);
    let values: Vec<Option<f64>> = match &spec.sweep {
        Some(sw) => sw.values.iter().map(|v| Some(*v)).collect(),
        None => vec![None],
    };
    let per_trial: Vec<Vec<SweepRow>> = (0..spec.trials as u64)
        .into_par_iter()
        .map(|trial| {
            let base = generate_scenario_k(spec, spec.k, trial);
            let mut rows = Vec::new();
            for &value in &values {
                let mut s = base.clone();
                if let (Some(sw), Some(v)) = (&spec.sweep, value) {
                    sw.variable.apply(&mut s, v);
                }
                for &kind in &spec.baselines {
                    let result = run_baseline(kind, &s, &opts);
                    rows.push(make_row(spec, trial, value, kind, &s, &result));
                }
            }
            rows
        })
        .collect();
    Ok(per_trial.into_iter().flatten().collect())
}

/// Iterate-by-iterate history of one run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub iteration: usize,
    pub sum_rate_bps: f64,
    pub x_m: f64,
    pub y_m: f64,
    pub uav_power_w: f64,
    pub bs_power_w: f64,
}

pub fn trace_rows(report: &SolverReport) -> Vec<TraceRow> {
    report
        .iterates
        .iter()
        .map(|it| TraceRow {
            iteration: it.iteration,
            sum_rate_bps: it.sum_rate,
            x_m: it.decision.x_r[0],
            y_m: it.decision.x_r[1],
            uav_power_w: it.decision.uav_power(),
            bs_power_w: it.decision.bs_power(),
        })
        .collect()
}

pub fn write_csv<T: Serialize>(rows: &[T], path: &Path) -> anyhow::Result<()> {
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut w = csv::Writer::from_writer(file);
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<T: for<'de> Deserialize<'de>>(path: &Path) -> anyhow::Result<Vec<T>> {
    let mut r = csv::Reader::from_path(path).with_context(|| format!("opening {}", path.display()))?;
    r.deserialize().map(|row| row.map_err(anyhow::Error::from)).collect()
}

/// Path of the JSON sidecar that accompanies a CSV: `<csv>.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let mut name = csv.as_os_str().to_owned();
    name.push(".json");
    PathBuf::from(name)
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Sidecar {
    pub generator: String,
    pub spec: ExperimentSpec,
}

/// Write the full spec next to `csv`, with the RNG recipe.
pub fn write_sidecar(spec: &ExperimentSpec, csv: &Path) -> anyhow::Result<PathBuf> {
    let path = sidecar_path(csv);
    let sidecar = Sidecar {
        generator: format!("ChaCha8Rng::seed_from_u64({}), stream = trial index", spec.seed),
        spec: spec.clone(),
    };
    std::fs::write(&path, serde_json::to_string_pretty(&sidecar)?)
        .with_context(|| format!("writing {}", path.display()))?;
    Ok(path)
}
