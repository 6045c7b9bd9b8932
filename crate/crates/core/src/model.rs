//! Scenario data, exact SNR and rate evaluation, and the reduced feasible set.
//!
//! UE transmit powers sit at their budgets and the control power is
//! `(γ_c/ξ)‖x_r − b‖²` at any optimum, so a [`Decision`] only carries the UAV
//! position and the relay/BS powers. All arithmetic is in watts and meters;
//! dB values appear only in the conversion helpers.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;

/// Network geometry, channel constants and power budgets.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Scenario {
    /// UE positions in meters, `z = 0`.
    pub ue_positions: Vec<[f64; 3]>,
    /// BS position in meters, `z = 0`.
    pub bs_position: [f64; 3],
    /// Fixed UAV altitude in meters.
    pub altitude_h: f64,
    /// Linear channel power gain at 1 m.
    pub beta_ref_gain: f64,
    pub noise_psd_dbm_hz: f64,
    /// Bandwidth allocated to each UE, Hz. Also the noise bandwidth.
    pub bandwidth_w_hz: f64,
    pub p_ue_max_w: Vec<f64>,
    pub p_uav_max_w: f64,
    pub p_bs_max_w: f64,
    /// Control-link SNR requirement (linear).
    pub gamma_c_linear: f64,
}

impl Scenario {
    /// Scenario with the default simulation constants: β = −40 dB,
    /// W = 1 MHz, −169 dBm/Hz noise, h = 100 m, P_u = 23 dBm,
    /// P_r = 36 dBm, P_b = 43 dBm and γ_c = 20 dB.
    pub fn with_defaults(ue_xy: &[[f64; 2]], bs_xy: [f64; 2]) -> Scenario {
        Scenario {
            ue_positions: ue_xy.iter().map(|u| [u[0], u[1], 0.0]).collect(),
            bs_position: [bs_xy[0], bs_xy[1], 0.0],
            altitude_h: 100.0,
            beta_ref_gain: db_to_linear(-40.0),
            noise_psd_dbm_hz: -169.0,
            bandwidth_w_hz: 1.0e6,
            p_ue_max_w: vec![dbm_to_w(23.0); ue_xy.len()],
            p_uav_max_w: dbm_to_w(36.0),
            p_bs_max_w: dbm_to_w(43.0),
            gamma_c_linear: db_to_linear(20.0),
        }
    }

    pub fn num_ues(&self) -> usize {
        self.ue_positions.len()
    }

    pub fn validate(&self) -> Result<()> {
        let k = self.num_ues();
        if k == 0 {
            return Err(Error::InvalidScenario("at least one UE is required"));
        }
        if self.p_ue_max_w.len() != k {
            return Err(Error::DimensionMismatch { expected: k, found: self.p_ue_max_w.len() });
        }
        if !(self.altitude_h > 0.0) {
            return Err(Error::InvalidScenario("altitude must be positive"));
        }
        if !(self.beta_ref_gain > 0.0) {
            return Err(Error::InvalidScenario("reference gain must be positive"));
        }
        if !(self.bandwidth_w_hz > 0.0) || !self.noise_psd_dbm_hz.is_finite() {
            return Err(Error::InvalidScenario("bandwidth and noise PSD must be positive and finite"));
        }
        if !(self.p_uav_max_w > 0.0) || !(self.p_bs_max_w > 0.0) {
            return Err(Error::InvalidScenario("power budgets must be positive"));
        }
        if self.p_ue_max_w.iter().any(|p| !(*p > 0.0)) {
            return Err(Error::InvalidScenario("UE power budgets must be positive"));
        }
        if !(self.gamma_c_linear >= 0.0) {
            return Err(Error::InvalidScenario("control SNR requirement must be non-negative"));
        }
        if self.bs_position[2] != 0.0 || self.ue_positions.iter().any(|u| u[2] != 0.0) {
            return Err(Error::InvalidScenario("UEs and BS must lie on the ground plane"));
        }
        Ok(())
    }
}

/// Logarithm used for reported rates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum RateUnit {
    /// log2, rates in bits/s.
    #[default]
    Bits,
    /// Natural log, rates in nats/s.
    Nats,
}

impl RateUnit {
    /// Multiplier converting a natural-log quantity into this unit.
    pub fn per_nat(self) -> f64 {
        match self {
            RateUnit::Bits => core::f64::consts::LOG2_E,
            RateUnit::Nats => 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct LinkParams {
    /// ξ = β/σ².
    pub xi: f64,
    pub sigma2_w: f64,
    pub rate_unit: RateUnit,
}

impl LinkParams {
    /// `W/2` expressed in the configured rate unit per nat.
    pub fn rate_scale(&self, s: &Scenario) -> f64 {
        0.5 * s.bandwidth_w_hz * self.rate_unit.per_nat()
    }

    /// The control-power coefficient γ_c/ξ.
    pub fn control_coeff(&self, s: &Scenario) -> f64 {
        s.gamma_c_linear / self.xi
    }
}

pub fn db_to_linear(db: f64) -> f64 {
    math::powf(10.0, db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * math::log10(x)
}

pub fn dbm_to_w(dbm: f64) -> f64 {
    math::powf(10.0, (dbm - 30.0) / 10.0)
}

pub fn w_to_dbm(w: f64) -> f64 {
    10.0 * math::log10(w) + 30.0
}

pub fn link_params(s: &Scenario) -> LinkParams {
    let sigma2_w = dbm_to_w(s.noise_psd_dbm_hz) * s.bandwidth_w_hz;
    LinkParams { xi: s.beta_ref_gain / sigma2_w, sigma2_w, rate_unit: RateUnit::Bits }
}

/// UAV position plus relay and BS powers: the reduced decision vector.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Decision {
    /// UAV position; the third coordinate is the altitude.
    pub x_r: [f64; 3],
    /// UAV power relaying each UE's uplink signal.
    pub p_r_u: Vec<f64>,
    /// UAV power relaying each UE's downlink signal.
    pub p_r_d: Vec<f64>,
    /// BS power for each UE's downlink signal.
    pub p_b: Vec<f64>,
}

impl Decision {
    pub fn num_ues(&self) -> usize {
        self.p_b.len()
    }

    /// Uniform power split at position `x_r` after deducting control power:
    /// `(P_r − p_c)/(2K)` per UAV stream and `(P_b − p_c)/K` per BS stream.
    pub fn uniform(x_r: [f64; 3], s: &Scenario, lp: &LinkParams) -> Decision {
        let k = s.num_ues();
        let p_c = control_power(&x_r, s, lp);
        let r = (s.p_uav_max_w - p_c) / (2 * k) as f64;
        let b = (s.p_bs_max_w - p_c) / k as f64;
        Decision { x_r, p_r_u: vec![r; k], p_r_d: vec![r; k], p_b: vec![b; k] }
    }

    /// Total UAV data power `1ᵀp_r^U + 1ᵀp_r^D`.
    pub fn uav_power(&self) -> f64 {
        self.p_r_u.iter().sum::<f64>() + self.p_r_d.iter().sum::<f64>()
    }

    pub fn bs_power(&self) -> f64 {
        self.p_b.iter().sum()
    }

    /// Flat layout `[x, y, p_r^U, p_r^D, p_b]` of length `2 + 3K`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 + 3 * self.num_ues());
        v.push(self.x_r[0]);
        v.push(self.x_r[1]);
        v.extend_from_slice(&self.p_r_u);
        v.extend_from_slice(&self.p_r_d);
        v.extend_from_slice(&self.p_b);
        v
    }

    /// Inverse of [`Decision::to_flat`]; `h` fills the altitude.
    pub fn from_flat(v: &[f64], h: f64) -> Decision {
        let k = (v.len() - 2) / 3;
        Decision {
            x_r: [v[0], v[1], h],
            p_r_u: v[2..2 + k].to_vec(),
            p_r_d: v[2 + k..2 + 2 * k].to_vec(),
            p_b: v[2 + 2 * k..2 + 3 * k].to_vec(),
        }
    }

    /// Copy with every power raised to at least `floor`.
    pub fn floored(&self, floor: f64) -> Decision {
        let f = |v: &[f64]| v.iter().map(|p| p.max(floor)).collect::<Vec<_>>();
        Decision { x_r: self.x_r, p_r_u: f(&self.p_r_u), p_r_d: f(&self.p_r_d), p_b: f(&self.p_b) }
    }

    /// Euclidean distance in the flat layout.
    pub fn distance(&self, other: &Decision) -> f64 {
        let a = self.to_flat();
        let b = other.to_flat();
        math::sqrt(a.iter().zip(&b).map(|(x, y)| (x - y) * (x - y)).sum())
    }
}

/// Squared distances `(d_kr², d_rb²)` from the UAV to UE `k` and to the BS.
fn sq_distances(k: usize, x_r: &[f64; 3], s: &Scenario) -> (f64, f64) {
    (
        math::norm2_3(&math::sub3(x_r, &s.ue_positions[k])),
        math::norm2_3(&math::sub3(x_r, &s.bs_position)),
    )
}

/// Two-hop AF SNR `ab/(1 + a + b)` with per-hop SNRs `a` and `b`.
#[inline]
fn af_snr(a: f64, b: f64) -> f64 {
    a * b / (1.0 + a + b)
}

/// Uplink SNR of UE `k` (UE → UAV → BS) with the UE at full power.
pub fn snr_uplink(k: usize, x_r: &[f64; 3], p_r_u_k: f64, s: &Scenario, lp: &LinkParams) -> f64 {
    let (s_kr, s_rb) = sq_distances(k, x_r, s);
    af_snr(lp.xi * s.p_ue_max_w[k] / s_kr, lp.xi * p_r_u_k / s_rb)
}

/// Downlink SNR of UE `k` (BS → UAV → UE).
pub fn snr_downlink(
    k: usize,
    x_r: &[f64; 3],
    p_b_k: f64,
    p_r_d_k: f64,
    s: &Scenario,
    lp: &LinkParams,
) -> f64 {
    let (s_kr, s_rb) = sq_distances(k, x_r, s);
    af_snr(lp.xi * p_b_k / s_rb, lp.xi * p_r_d_k / s_kr)
}

/// Sum of uplink and downlink rates, `Σ_k (W/2)(log(1+SNR^U) + log(1+SNR^D))`.
pub fn sum_rate(d: &Decision, s: &Scenario, lp: &LinkParams) -> f64 {
    let nats: f64 = (0..s.num_ues())
        .map(|k| {
            math::ln_1p(snr_uplink(k, &d.x_r, d.p_r_u[k], s, lp))
                + math::ln_1p(snr_downlink(k, &d.x_r, d.p_b[k], d.p_r_d[k], s, lp))
        })
        .sum();
    lp.rate_scale(s) * nats
}

/// Control power `(γ_c/ξ)‖x_r − b‖²` that meets the control SNR with equality.
pub fn control_power(x_r: &[f64; 3], s: &Scenario, lp: &LinkParams) -> f64 {
    lp.control_coeff(s) * math::norm2_3(&math::sub3(x_r, &s.bs_position))
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Feasibility {
    pub feasible: bool,
    /// `1ᵀp_r^U + 1ᵀp_r^D + p_c − P_r` in watts; positive means violated.
    pub uav_violation_w: f64,
    /// `1ᵀp_b + p_c − P_b` in watts.
    pub bs_violation_w: f64,
    pub min_power_w: f64,
}

/// Membership test for the reduced feasible set. `tol` is relative to the
/// budgets: a constraint passes when its violation is at most `tol · budget`.
pub fn is_feasible(d: &Decision, s: &Scenario, lp: &LinkParams, tol: f64) -> Feasibility {
    let p_c = control_power(&d.x_r, s, lp);
    let uav_violation_w = d.uav_power() + p_c - s.p_uav_max_w;
    let bs_violation_w = d.bs_power() + p_c - s.p_bs_max_w;
    let min_power_w = d
        .p_r_u
        .iter()
        .chain(&d.p_r_d)
        .chain(&d.p_b)
        .fold(f64::INFINITY, |m, p| m.min(*p));
    let scale = s.p_uav_max_w.min(s.p_bs_max_w);
    let feasible = uav_violation_w <= tol * s.p_uav_max_w
        && bs_violation_w <= tol * s.p_bs_max_w
        && min_power_w >= -tol * scale
        && math::abs(d.x_r[2] - s.altitude_h) <= tol * s.altitude_h;
    Feasibility { feasible, uav_violation_w, bs_violation_w, min_power_w }
}

/// Midpoint between the UE centroid and the BS, at the UAV altitude.
pub fn geometry_center(s: &Scenario) -> [f64; 3] {
    let k = s.num_ues() as f64;
    let mut c = [0.0; 3];
    for u in &s.ue_positions {
        c[0] += u[0] / k;
        c[1] += u[1] / k;
    }
    [(c[0] + s.bs_position[0]) / 2.0, (c[1] + s.bs_position[1]) / 2.0, s.altitude_h]
}

/// Largest control power the budgets can carry with some power to spare
/// for data; positions beyond it are pulled back toward the BS.
fn max_control_power(s: &Scenario) -> f64 {
    s.p_uav_max_w.min(s.p_bs_max_w) * (1.0 - 1e-6)
}

/// Pull the horizontal position toward the BS until the control power leaves
/// room for data power in both budgets. Returns `None` when even hovering
/// above the BS is infeasible.
pub fn restore_position(x_r: [f64; 3], s: &Scenario, lp: &LinkParams) -> Option<[f64; 3]> {
    let c = lp.control_coeff(s);
    let h2 = s.altitude_h * s.altitude_h;
    let cap = max_control_power(s);
    if c * h2 >= cap {
        return None;
    }
    let p_c = control_power(&x_r, s, lp);
    if p_c <= cap {
        return Some(x_r);
    }
    let b = s.bs_position;
    let (hx, hy) = (x_r[0] - b[0], x_r[1] - b[1]);
    let horiz2 = hx * hx + hy * hy;
    let allowed2 = cap / c - h2;
    let t = math::sqrt(allowed2 / horiz2);
    Some([b[0] + t * (x_r[0] - b[0]), b[1] + t * (x_r[1] - b[1]), x_r[2]])
}

/// Rescale each power block so both budgets hold with equality at the
/// current position. Every SNR is increasing in every power, so scaling up
/// never lowers the sum rate. Negative entries are clipped to zero first.
pub fn fill_budgets(d: &Decision, s: &Scenario, lp: &LinkParams) -> Decision {
    let x_r = restore_position(d.x_r, s, lp).unwrap_or(d.x_r);
    let p_c = control_power(&x_r, s, lp);
    let uav_budget = (s.p_uav_max_w - p_c).max(0.0);
    let bs_budget = (s.p_bs_max_w - p_c).max(0.0);
    let k = d.num_ues();
    let clip = |v: &[f64]| v.iter().map(|p| p.max(0.0)).collect::<Vec<_>>();
    let (mut p_r_u, mut p_r_d, mut p_b) = (clip(&d.p_r_u), clip(&d.p_r_d), clip(&d.p_b));
    let uav: f64 = p_r_u.iter().sum::<f64>() + p_r_d.iter().sum::<f64>();
    if uav > 0.0 {
        let f = uav_budget / uav;
        p_r_u.iter_mut().chain(p_r_d.iter_mut()).for_each(|p| *p *= f);
    } else {
        let each = uav_budget / (2 * k) as f64;
        p_r_u.iter_mut().chain(p_r_d.iter_mut()).for_each(|p| *p = each);
    }
    let bs: f64 = p_b.iter().sum();
    if bs > 0.0 {
        let f = bs_budget / bs;
        p_b.iter_mut().for_each(|p| *p *= f);
    } else {
        p_b.iter_mut().for_each(|p| *p = bs_budget / k as f64);
    }
    Decision { x_r, p_r_u, p_r_d, p_b }
}

/// Scale power blocks down (never up) until both budgets hold. The position
/// is pulled toward the BS first if the control power alone is too large.
pub fn scale_to_budgets(d: &Decision, s: &Scenario, lp: &LinkParams) -> Decision {
    let x_r = restore_position(d.x_r, s, lp).unwrap_or(d.x_r);
    let p_c = control_power(&x_r, s, lp);
    let clip = |v: &[f64]| v.iter().map(|p| p.max(0.0)).collect::<Vec<_>>();
    let (mut p_r_u, mut p_r_d, mut p_b) = (clip(&d.p_r_u), clip(&d.p_r_d), clip(&d.p_b));
    let uav: f64 = p_r_u.iter().sum::<f64>() + p_r_d.iter().sum::<f64>();
    let uav_budget = (s.p_uav_max_w - p_c).max(0.0);
    if uav > uav_budget {
        let f = uav_budget / uav;
        p_r_u.iter_mut().chain(p_r_d.iter_mut()).for_each(|p| *p *= f);
    }
    let bs: f64 = p_b.iter().sum();
    let bs_budget = (s.p_bs_max_w - p_c).max(0.0);
    if bs > bs_budget {
        let f = bs_budget / bs;
        p_b.iter_mut().for_each(|p| *p *= f);
    }
    Decision { x_r, p_r_u, p_r_d, p_b }
}

/// Termination state of a solver run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "kebab-case"))]
pub enum Status {
    Converged,
    IterationLimit,
    InfeasibleInput,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Iterate {
    pub iteration: usize,
    /// Sum rate in the configured rate unit per second.
    pub sum_rate: f64,
    pub decision: Decision,
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SolverReport {
    pub iterates: Vec<Iterate>,
    #[cfg_attr(feature = "serde", serde(rename = "final"))]
    pub final_decision: Decision,
    /// Filled in by callers that own a clock; the core leaves it at zero.
    pub wall_time_s: f64,
    pub inner_counts: Vec<usize>,
    pub status: Status,
}

impl SolverReport {
    pub fn final_rate(&self) -> f64 {
        self.iterates.last().map_or(f64::NAN, |it| it.sum_rate)
    }

    /// Outer iterations performed (the initial point is iterate 0).
    pub fn outer_iterations(&self) -> usize {
        self.iterates.len().saturating_sub(1)
    }

    pub fn infeasible(init: &Decision) -> SolverReport {
        SolverReport {
            iterates: Vec::new(),
            final_decision: init.clone(),
            wall_time_s: 0.0,
            inner_counts: Vec::new(),
            status: Status::InfeasibleInput,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn one_ue() -> Scenario {
        Scenario::with_defaults(&[[0.0, 0.0]], [6000.0, 0.0])
    }

    #[test]
    fn noise_and_xi_from_defaults() {
        let s = one_ue();
        let lp = link_params(&s);
        assert!((lp.sigma2_w / 1.258_925_411_794_166_5e-14 - 1.0).abs() < 1e-12);
        assert!((lp.xi / 7.943_282_347_242_789e9 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn ten_mhz_noise_gives_xi_near_1e9() {
        let mut s = one_ue();
        s.bandwidth_w_hz = 1.0e7;
        let lp = link_params(&s);
        assert!((w_to_dbm(lp.sigma2_w) + 99.0).abs() < 1e-9);
        assert!(lp.xi > 5e8 && lp.xi < 2e9);
    }

    #[test]
    fn unit_gain_unit_noise() {
        let mut s = one_ue();
        s.beta_ref_gain = 1.0;
        s.bandwidth_w_hz = 1.0;
        s.noise_psd_dbm_hz = 30.0;
        assert!((link_params(&s).xi - 1.0).abs() < 1e-12);
    }

    #[test]
    fn zero_power_gives_zero_snr_and_rate() {
        let s = one_ue();
        let lp = link_params(&s);
        let x = [3000.0, 0.0, 100.0];
        assert_eq!(snr_uplink(0, &x, 0.0, &s, &lp), 0.0);
        assert_eq!(snr_downlink(0, &x, 0.0, 1.0, &s, &lp), 0.0);
        assert_eq!(snr_downlink(0, &x, 1.0, 0.0, &s, &lp), 0.0);
        let d = Decision { x_r: x, p_r_u: vec![0.0], p_r_d: vec![0.0], p_b: vec![0.0] };
        assert_eq!(sum_rate(&d, &s, &lp), 0.0);
    }

    #[test]
    fn uplink_relay_hop_limit() {
        let mut s = one_ue();
        let lp = link_params(&s);
        let x = [3000.0, 0.0, 100.0];
        s.p_ue_max_w[0] = 1e12;
        let snr = snr_uplink(0, &x, 1.0, &s, &lp);
        let s_rb = 3000.0f64.powi(2) + 100.0f64.powi(2);
        let limit = lp.xi / s_rb;
        assert!((snr / limit - 1.0).abs() < 1e-6);
    }

    #[test]
    fn control_power_values() {
        let mut s = one_ue();
        let lp = LinkParams { xi: 7.943e9, sigma2_w: 1.0, rate_unit: RateUnit::Bits };
        s.gamma_c_linear = 100.0;
        let above = [6000.0, 0.0, 100.0];
        assert!((control_power(&above, &s, &lp) - 1.258_969e-4).abs() < 1e-9);
        let far = [6000.0 - (3000.0f64.powi(2) - 1e4).sqrt(), 0.0, 100.0];
        assert!((control_power(&far, &s, &lp) - 0.113_307).abs() < 1e-5);
        s.gamma_c_linear = 0.0;
        assert_eq!(control_power(&far, &s, &lp), 0.0);
    }

    #[test]
    fn feasibility_reports() {
        let s = one_ue();
        let lp = link_params(&s);
        let above = [6000.0, 0.0, 100.0];
        let zero = Decision { x_r: above, p_r_u: vec![0.0], p_r_d: vec![0.0], p_b: vec![0.0] };
        assert!(is_feasible(&zero, &s, &lp, 1e-9).feasible);

        let mut over = zero.clone();
        over.p_r_u[0] = s.p_uav_max_w + 1.0;
        let f = is_feasible(&over, &s, &lp, 1e-9);
        assert!(!f.feasible);
        let p_c = control_power(&above, &s, &lp);
        assert!((f.uav_violation_w - (1.0 + p_c)).abs() < 1e-12);

        let edge = fill_budgets(&Decision::uniform(above, &s, &lp), &s, &lp);
        let f = is_feasible(&edge, &s, &lp, 1e-9);
        assert!(f.feasible);
        assert!(f.uav_violation_w.abs() < 1e-12 && f.bs_violation_w.abs() < 1e-12);
    }

    #[test]
    fn geometry_centers() {
        let s = Scenario::with_defaults(&[[0.0, 0.0], [1000.0, 1000.0]], [6500.0, 500.0]);
        assert_eq!(geometry_center(&s), [3500.0, 500.0, 100.0]);
        let s = Scenario::with_defaults(&[[10.0, 20.0]], [10.0, 20.0]);
        assert_eq!(geometry_center(&s), [10.0, 20.0, 100.0]);
        let s = one_ue();
        assert_eq!(geometry_center(&s), [3000.0, 0.0, 100.0]);
    }

    #[test]
    fn flat_layout_round_trip() {
        let d = Decision {
            x_r: [1.0, 2.0, 100.0],
            p_r_u: vec![0.1, 0.2],
            p_r_d: vec![0.3, 0.4],
            p_b: vec![0.5, 0.6],
        };
        let v = d.to_flat();
        assert_eq!(v, vec![1.0, 2.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6]);
        assert_eq!(Decision::from_flat(&v, 100.0), d);
    }

    #[test]
    fn restore_pulls_toward_bs() {
        let mut s = one_ue();
        let lp = link_params(&s);
        s.gamma_c_linear = db_to_linear(60.0);
        let far = [0.0, 0.0, 100.0];
        let x = restore_position(far, &s, &lp).unwrap();
        assert!(control_power(&x, &s, &lp) <= s.p_uav_max_w);
        assert!(x[0] > 0.0 && x[0] < 6000.0 && x[1] == 0.0);
        s.gamma_c_linear = db_to_linear(120.0);
        assert!(restore_position(far, &s, &lp).is_none());
    }

    #[test]
    fn validation_rejects_bad_input() {
        let mut s = one_ue();
        assert!(s.validate().is_ok());
        s.altitude_h = 0.0;
        assert!(s.validate().is_err());
        let mut s = one_ue();
        s.ue_positions[0][2] = 1.0;
        assert!(s.validate().is_err());
        let mut s = one_ue();
        s.p_ue_max_w.push(1.0);
        assert!(matches!(s.validate(), Err(Error::DimensionMismatch { .. })));
    }
}
