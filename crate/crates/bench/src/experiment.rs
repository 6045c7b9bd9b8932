//! Experiment specifications and random scenario generation.

use std::fs;
use std::path::Path;

use anyhow::{ensure, Context};
use jppc_core::model::{db_to_linear, dbm_to_w};
use jppc_core::{Scenario, SurrogateKind};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::baselines::BaselineKind;
use crate::scenario_file::defaults;

/// Solver used for the joint problem.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum SolverChoice {
    Sca,
    Agp,
    SingleUe,
}

/// Budget swept by an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepVariable {
    /// BS budget, dBm.
    PBs,
    /// UAV budget, dBm.
    PUav,
    /// Control-link SNR requirement, dB.
    GammaC,
}

impl SweepVariable {
    pub fn name(self) -> &'static str {
        match self {
            SweepVariable::PBs => "p_bs_dbm",
            SweepVariable::PUav => "p_uav_dbm",
            SweepVariable::GammaC => "gamma_c_db",
        }
    }

    pub fn apply(self, s: &mut Scenario, value: f64) {
        match self {
            SweepVariable::PBs => s.p_bs_max_w = dbm_to_w(value),
            SweepVariable::PUav => s.p_uav_max_w = dbm_to_w(value),
            SweepVariable::GammaC => s.gamma_c_linear = db_to_linear(value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Sweep {
    pub variable: SweepVariable,
    pub values: Vec<f64>,
}

fn default_ue_region() -> [f64; 4] {
    [0.0, 1000.0, 0.0, 1000.0]
}
fn default_bs_region() -> [f64; 4] {
    [6000.0, 7000.0, 0.0, 1000.0]
}
fn default_trials() -> usize {
    70
}
fn default_k() -> usize {
    16
}
fn default_k_values() -> Vec<usize> {
    vec![5, 10, 16]
}
fn default_solver() -> SolverChoice {
    SolverChoice::Agp
}
fn default_surrogate() -> SurrogateKind {
    SurrogateKind::Proposed
}
fn default_baselines() -> Vec<BaselineKind> {
    BaselineKind::ALL.to_vec()
}

/// Everything needed to reproduce an experiment. Regions are
/// `[x_min, x_max, y_min, y_max]` in meters; budgets are in dBm and dB.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSpec {
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_k")]
    pub k: usize,
    #[serde(default = "default_ue_region")]
    pub ue_region: [f64; 4],
    #[serde(default = "default_bs_region")]
    pub bs_region: [f64; 4],
    #[serde(default)]
    pub sweep: Option<Sweep>,
    #[serde(default = "default_solver")]
    pub solver: SolverChoice,
    #[serde(default = "default_surrogate")]
    pub surrogate: SurrogateKind,
    #[serde(default = "default_trials")]
    pub trials: usize,
    #[serde(default = "default_baselines")]
    pub baselines: Vec<BaselineKind>,
    /// UE counts of the timing table.
    #[serde(default = "default_k_values")]
    pub k_values: Vec<usize>,
    #[serde(default = "defaults::altitude_m")]
    pub altitude_m: f64,
    #[serde(default = "defaults::p_ue_dbm_scalar")]
    pub p_ue_dbm: f64,
    #[serde(default = "defaults::p_uav_dbm")]
    pub p_uav_dbm: f64,
    #[serde(default = "defaults::p_bs_dbm")]
    pub p_bs_dbm: f64,
    #[serde(default = "defaults::gamma_c_db")]
    pub gamma_c_db: f64,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        serde_json::from_str("{}").expect("all fields have defaults")
    }
}

fn region_ok(r: &[f64; 4]) -> bool {
    r.iter().all(|v| v.is_finite()) && r[0] <= r[1] && r[2] <= r[3]
}

impl ExperimentSpec {
    pub fn validate(&self) -> anyhow::Result<()> {
        ensure!(self.k >= 1, "k must be at least 1");
        ensure!(self.trials >= 1, "trials must be at least 1");
        ensure!(region_ok(&self.ue_region), "ue_region must be [x_min, x_max, y_min, y_max] with min <= max");
        ensure!(region_ok(&self.bs_region), "bs_region must be [x_min, x_max, y_min, y_max] with min <= max");
        ensure!(self.k_values.iter().all(|k| *k >= 1), "k_values entries must be at least 1");
        if let Some(sw) = &self.sweep {
            ensure!(!sw.values.is_empty(), "sweep needs at least one value");
        }
        Ok(())
    }

    pub fn read(path: &Path) -> anyhow::Result<ExperimentSpec> {
        let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let spec: ExperimentSpec =
            serde_json::from_str(&text).with_context(|| format!("malformed experiment spec {}", path.display()))?;
        spec.validate()?;
        Ok(spec)
    }
}

/// Generator for one trial: ChaCha8 seeded with `seed`, on stream `trial`.
/// Trials are independent of each other and of the thread that runs them.
pub fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut r = ChaCha8Rng::seed_from_u64(seed);
    r.set_stream(trial);
    r
}

fn uniform(r: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    if lo == hi {
        lo
    } else {
        r.gen_range(lo..hi)
    }
}

/// Scenario of trial `trial` with `k` UEs. UEs are drawn first, then the BS.
pub fn generate_scenario_k(spec: &ExperimentSpec, k: usize, trial: u64) -> Scenario {
    let mut r = trial_rng(spec.seed, trial);
    let [ux0, ux1, uy0, uy1] = spec.ue_region;
    let ues: Vec<[f64; 2]> = (0..k).map(|_| [uniform(&mut r, ux0, ux1), uniform(&mut r, uy0, uy1)]).collect();
    let [bx0, bx1, by0, by1] = spec.bs_region;
    let bs = [uniform(&mut r, bx0, bx1), uniform(&mut r, by0, by1)];
    let mut s = Scenario::with_defaults(&ues, bs);
    s.altitude_h = spec.altitude_m;
    s.p_ue_max_w = vec![dbm_to_w(spec.p_ue_dbm); k];
    s.p_uav_max_w = dbm_to_w(spec.p_uav_dbm);
    s.p_bs_max_w = dbm_to_w(spec.p_bs_dbm);
    s.gamma_c_linear = db_to_linear(spec.gamma_c_db);
    s
}

/// Scenario of trial 0 with `spec.k` UEs.
pub fn generate_scenario(spec: &ExperimentSpec) -> anyhow::Result<Scenario> {
    spec.validate()?;
    Ok(generate_scenario_k(spec, spec.k, 0))
}
