//! Average computation time of the three solvers.

use std::time::Instant;

use jppc_core::agp::solve_agp;
use jppc_core::sca::solve_sca;
use jppc_core::{geometry_center, link_params, Decision, SurrogateKind};
use serde::{Deserialize, Serialize};

use crate::baselines::RunOptions;
use crate::experiment::{generate_scenario_k, ExperimentSpec, SolverChoice};

/// Mean wall time (seconds) and mean final rate (bits/s) per solver for one
/// UE count.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TimingRow {
    pub seed: u64,
    pub k: usize,
    pub trials: usize,
    pub sca_baseline_s: f64,
    pub sca_proposed_s: f64,
    pub agp_s: f64,
    pub sca_baseline_over_proposed: f64,
    pub sca_proposed_over_agp: f64,
    pub sca_baseline_rate_bps: f64,
    pub sca_proposed_rate_bps: f64,
    pub agp_rate_bps: f64,
}

/// One row per entry of `spec.k_values`, averaged over `spec.trials`.
/// Runs sequentially on the calling thread so the solvers do not compete
/// for cores. Every solver starts from the uniform split at the geometry
/// center.
pub fn timing_table(spec: &ExperimentSpec) -> anyhow::Result<Vec<TimingRow>> {
    spec.validate()?;
    let proposed = RunOptions::new(SolverChoice::Sca, SurrogateKind::Proposed);
    let baseline = RunOptions::new(SolverChoice::Sca, SurrogateKind::Baseline);
    let mut rows = Vec::new();
    for &k in &spec.k_values {
        let mut time = [0.0; 3];
        let mut rate = [0.0; 3];
        for trial in 0..spec.trials as u64 {
            let s = generate_scenario_k(spec, k, trial);
            let init = Decision::uniform(geometry_center(&s), &s, &link_params(&s));
            let runs: [&dyn Fn() -> jppc_core::Result<jppc_core::SolverReport>; 3] = [
                &|| solve_sca(&s, &init, &baseline.sca),
                &|| solve_sca(&s, &init, &proposed.sca),
                &|| solve_agp(&s, &init, &proposed.agp),
            ];
            for (j, run) in runs.iter().enumerate() {
                let t = Instant::now();
                let rep = run()?;
                time[j] += t.elapsed().as_secs_f64();
                rate[j] += rep.final_rate();
            }
        }
        let n = spec.trials as f64;
        let [tb, tp, ta] = time.map(|t| t / n);
        let [rb, rp, ra] = rate.map(|r| r / n);
        rows.push(TimingRow {
            seed: spec.seed,
            k,
            trials: spec.trials,
            sca_baseline_s: tb,
            sca_proposed_s: tp,
            agp_s: ta,
            sca_baseline_over_proposed: tb / tp,
            sca_proposed_over_agp: tp / ta,
            sca_baseline_rate_bps: rb,
            sca_proposed_rate_bps: rp,
            agp_rate_bps: ra,
        });
    }
    Ok(rows)
}
