//! JSON scenario files.
//!
//! Files use engineering units (dB, dBm, meters) and two-dimensional
//! positions; every key except the positions may be omitted.

use std::fs;
use std::path::Path;

use anyhow::Context;
use jppc_core::model::{db_to_linear, dbm_to_w, linear_to_db, w_to_dbm};
use jppc_core::Scenario;
use serde::{Deserialize, Serialize};

/// Either one value for every UE or one value per UE.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum PerUe {
    Scalar(f64),
    PerUe(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioFile {
    pub ue_positions: Vec<[f64; 2]>,
    pub bs_position: [f64; 2],
    #[serde(default = "defaults::altitude_m")]
    pub altitude_m: f64,
    #[serde(default = "defaults::beta_db")]
    pub beta_db: f64,
    #[serde(default = "defaults::noise_psd_dbm_hz")]
    pub noise_psd_dbm_hz: f64,
    #[serde(default = "defaults::bandwidth_hz")]
    pub bandwidth_hz: f64,
    #[serde(default = "defaults::p_ue_dbm")]
    pub p_ue_dbm: PerUe,
    #[serde(default = "defaults::p_uav_dbm")]
    pub p_uav_dbm: f64,
    #[serde(default = "defaults::p_bs_dbm")]
    pub p_bs_dbm: f64,
    #[serde(default = "defaults::gamma_c_db")]
    pub gamma_c_db: f64,
}

pub(crate) mod defaults {
    use super::PerUe;

    pub fn altitude_m() -> f64 {
        100.0
    }
    pub fn beta_db() -> f64 {
        -40.0
    }
    pub fn noise_psd_dbm_hz() -> f64 {
        -169.0
    }
    pub fn bandwidth_hz() -> f64 {
        1.0e6
    }
    pub fn p_ue_dbm_scalar() -> f64 {
        23.0
    }
    pub fn p_ue_dbm() -> PerUe {
        PerUe::Scalar(p_ue_dbm_scalar())
    }
    pub fn p_uav_dbm() -> f64 {
        36.0
    }
    pub fn p_bs_dbm() -> f64 {
        43.0
    }
    pub fn gamma_c_db() -> f64 {
        20.0
    }
}

impl ScenarioFile {
    pub fn to_scenario(&self) -> anyhow::Result<Scenario> {
        let k = self.ue_positions.len();
        let p_ue_dbm = match &self.p_ue_dbm {
            PerUe::Scalar(v) => vec![*v; k],
            PerUe::PerUe(v) if v.len() == k => v.clone(),
            PerUe::PerUe(v) => anyhow::bail!("p_ue_dbm has {} entries for {k} UEs", v.len()),
        };
        let s = Scenario {
            ue_positions: self.ue_positions.iter().map(|u| [u[0], u[1], 0.0]).collect(),
            bs_position: [self.bs_position[0], self.bs_position[1], 0.0],
            altitude_h: self.altitude_m,
            beta_ref_gain: db_to_linear(self.beta_db),
            noise_psd_dbm_hz: self.noise_psd_dbm_hz,
            bandwidth_w_hz: self.bandwidth_hz,
            p_ue_max_w: p_ue_dbm.into_iter().map(dbm_to_w).collect(),
            p_uav_max_w: dbm_to_w(self.p_uav_dbm),
            p_bs_max_w: dbm_to_w(self.p_bs_dbm),
            gamma_c_linear: db_to_linear(self.gamma_c_db),
        };
        s.validate()?;
        Ok(s)
    }

    /// Inverse of [`ScenarioFile::to_scenario`]. UE budgets collapse to a
    /// scalar when they are all equal.
    pub fn from_scenario(s: &Scenario) -> ScenarioFile {
        let p_ue: Vec<f64> = s.p_ue_max_w.iter().map(|p| w_to_dbm(*p)).collect();
        let p_ue_dbm = match p_ue.first() {
            Some(&first) if p_ue.iter().all(|p| *p == first) => PerUe::Scalar(first),
            _ => PerUe::PerUe(p_ue),
        };
        ScenarioFile {
            ue_positions: s.ue_positions.iter().map(|u| [u[0], u[1]]).collect(),
            bs_position: [s.bs_position[0], s.bs_position[1]],
            altitude_m: s.altitude_h,
            beta_db: linear_to_db(s.beta_ref_gain),
            noise_psd_dbm_hz: s.noise_psd_dbm_hz,
            bandwidth_hz: s.bandwidth_w_hz,
            p_ue_dbm,
            p_uav_dbm: w_to_dbm(s.p_uav_max_w),
            p_bs_dbm: w_to_dbm(s.p_bs_max_w),
            gamma_c_db: linear_to_db(s.gamma_c_linear),
        }
    }
}

pub fn parse_scenario(json: &str) -> anyhow::Result<Scenario> {
    let file: ScenarioFile = serde_json::from_str(json).context("malformed scenario JSON")?;
    file.to_scenario()
}

pub fn read_scenario(path: &Path) -> anyhow::Result<Scenario> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_scenario(&text).with_context(|| format!("in {}", path.display()))
}

pub fn write_scenario(s: &Scenario, path: &Path) -> anyhow::Result<()> {
    let text = serde_json::to_string_pretty(&ScenarioFile::from_scenario(s))?;
    fs::write(path, text).with_context(|| format!("writing {}", path.display()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn minimal_file_takes_defaults() {
        let s = parse_scenario(r#"{"ue_positions": [[0, 0], [10, 20]], "bs_position": [6000, 0]}"#).unwrap();
        assert_eq!(s, Scenario::with_defaults(&[[0.0, 0.0], [10.0, 20.0]], [6000.0, 0.0]));
    }

    #[test]
    fn per_ue_budget_length_is_checked() {
        let bad = r#"{"ue_positions": [[0, 0]], "bs_position": [1, 1], "p_ue_dbm": [20, 21]}"#;
        assert!(parse_scenario(bad).is_err());
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(parse_scenario(r#"{"ue_positions": [[0, 0]], "bs_position": [1, 1], "height": 3}"#).is_err());
    }
}
