//! Semi-analytical solver for a single UE.
//!
//! The optimal UAV position projects onto the segment between the UE and
//! the BS, so the search reduces to the offset `α ∈ [0, M]` along it. For a
//! fixed `α` the BS power takes whatever the control power leaves, and the
//! relay powers split a fixed budget; the rate is concave along that split.

use alloc::vec;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{control_power, link_params, sum_rate, Decision, Iterate, LinkParams, Scenario, SolverReport, Status};

const INV_PHI: f64 = 0.618_033_988_749_894_8;

/// Position on the UE-to-BS segment: `x_r = u + α ŝ + h e_z`.
#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SegmentParam {
    pub alpha: f64,
    /// Segment length `‖b − u‖` in the x-y plane.
    pub m: f64,
    /// Unit direction from the UE towards the BS.
    pub s_hat: [f64; 2],
}

impl SegmentParam {
    /// Segment of the only UE of `s`. A UE directly below the BS gives a
    /// zero-length segment with an arbitrary direction.
    pub fn new(s: &Scenario, alpha: f64) -> SegmentParam {
        let u = s.ue_positions[0];
        let dx = s.bs_position[0] - u[0];
        let dy = s.bs_position[1] - u[1];
        let m = math::sqrt(dx * dx + dy * dy);
        let s_hat = if m > 0.0 { [dx / m, dy / m] } else { [1.0, 0.0] };
        SegmentParam { alpha: alpha.clamp(0.0, m), m, s_hat }
    }

    pub fn position(&self, s: &Scenario) -> [f64; 3] {
        let u = s.ue_positions[0];
        [u[0] + self.alpha * self.s_hat[0], u[1] + self.alpha * self.s_hat[1], s.altitude_h]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SingleUeOptions {
    /// Uniform `α` grid size for the global scan.
    pub grid_points: usize,
    /// Bracket width, relative to `M`, that ends the golden-section refinement.
    pub alpha_tol: f64,
    /// Bracket width, relative to the budget, that ends the power-split search.
    pub split_tol: f64,
}

impl Default for SingleUeOptions {
    fn default() -> Self {
        SingleUeOptions { grid_points: 200, alpha_tol: 1e-9, split_tol: 1e-12 }
    }
}

/// Maximize a unimodal `f` on `[lo, hi]` by golden-section search.
/// Returns the best point seen, its value and the evaluation count.
fn golden_max(mut lo: f64, mut hi: f64, tol: f64, mut f: impl FnMut(f64) -> f64) -> (f64, f64, usize) {
    let mut a = hi - INV_PHI * (hi - lo);
    let mut b = lo + INV_PHI * (hi - lo);
    let mut fa = f(a);
    let mut fb = f(b);
    let mut evals = 2;
    while hi - lo > tol {
        if fa < fb {
            lo = a;
            a = b;
            fa = fb;
            b = lo + INV_PHI * (hi - lo);
            fb = f(b);
        } else {
            hi = b;
            b = a;
            fb = fa;
            a = hi - INV_PHI * (hi - lo);
            fa = f(a);
        }
        evals += 1;
    }
    let (mut best_x, mut best_f) = if fa >= fb { (a, fa) } else { (b, fb) };
    for x in [lo, hi] {
        let fx = f(x);
        evals += 1;
        if fx > best_f {
            best_x = x;
            best_f = fx;
        }
    }
    (best_x, best_f, evals)
}

/// Relay and BS budgets left after control power at offset `alpha`.
fn budgets(alpha: f64, s: &Scenario, lp: &LinkParams) -> (f64, f64, [f64; 3]) {
    let x_r = SegmentParam::new(s, alpha).position(s);
    let pc = control_power(&x_r, s, lp);
    (s.p_uav_max_w - pc, s.p_bs_max_w - pc, x_r)
}

fn decision_at(x_r: [f64; 3], p_r_u: f64, p_r_d: f64, p_b: f64) -> Decision {
    Decision { x_r, p_r_u: vec![p_r_u], p_r_d: vec![p_r_d], p_b: vec![p_b] }
}

fn split_with_tol(alpha: f64, s: &Scenario, lp: &LinkParams, tol: f64) -> Result<(f64, f64, f64)> {
    let (b_r, b_b, x_r) = budgets(alpha, s, lp);
    if !(b_r > 0.0) || b_b < 0.0 {
        return Err(Error::Infeasible { uav_violation_w: (-b_r).max(0.0), bs_violation_w: (-b_b).max(0.0) });
    }
    let rate = |p_u: f64| sum_rate(&decision_at(x_r, p_u, b_r - p_u, b_b), s, lp);
    let (p_u, r, _) = golden_max(0.0, b_r, tol * b_r, rate);
    Ok((p_u, b_r - p_u, r))
}

/// Best split of the relay budget at offset `alpha` between uplink and
/// downlink relaying. Returns `(p_r^U, p_r^D, rate)`; the BS transmits
/// everything its budget leaves.
pub fn inner_power_split(alpha: f64, s: &Scenario, lp: &LinkParams) -> Result<(f64, f64, f64)> {
    split_with_tol(alpha, s, lp, SingleUeOptions::default().split_tol)
}

/// Grid scan over `α` followed by golden-section refinement around the best
/// grid point. Iterate 0 is the best grid point and iterate 1 the refined
/// solution; `inner_counts` holds the number of `α` evaluations of each stage.
pub fn solve_single_ue(s: &Scenario, opts: &SingleUeOptions) -> Result<SolverReport> {
    s.validate()?;
    if s.num_ues() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, found: s.num_ues() });
    }
    let lp = link_params(s);
    let seg = SegmentParam::new(s, 0.0);
    let m = seg.m;
    let n = opts.grid_points.max(2);
    let r_star = |alpha: f64| split_with_tol(alpha, s, &lp, opts.split_tol).map_or(f64::NEG_INFINITY, |v| v.2);

    let mut best: Option<(usize, f64)> = None;
    for i in 0..n {
        let r = r_star(m * i as f64 / (n - 1) as f64);
        if r.is_finite() && best.is_none_or(|(_, b)| r > b) {
            best = Some((i, r));
        }
    }
    let Some((i_best, _)) = best else {
        let x_r = SegmentParam::new(s, m).position(s);
        let mut report = SolverReport::infeasible(&decision_at(x_r, 0.0, 0.0, 0.0));
        report.inner_counts.push(n);
        return Ok(report);
    };
    let grid_alpha = m * i_best as f64 / (n - 1) as f64;
    let step = m / (n - 1) as f64;
    let lo = (grid_alpha - step).max(0.0);
    let hi = (grid_alpha + step).min(m);
    let (ref_alpha, ref_rate, evals) = golden_max(lo, hi, opts.alpha_tol * m.max(1.0), r_star);
    let alpha = if ref_rate.is_finite() && ref_rate >= r_star(grid_alpha) { ref_alpha } else { grid_alpha };

    let snapshot = |alpha: f64| -> Result<(Decision, f64)> {
        let (p_u, p_d, r) = split_with_tol(alpha, s, &lp, opts.split_tol)?;
        let (_, b_b, x_r) = budgets(alpha, s, &lp);
        Ok((decision_at(x_r, p_u, p_d, b_b), r))
    };
    let (d_grid, r_grid) = snapshot(grid_alpha)?;
    let (d_fin, r_fin) = snapshot(alpha)?;
    Ok(SolverReport {
        iterates: vec![
            Iterate { iteration: 0, sum_rate: r_grid, decision: d_grid },
            Iterate { iteration: 1, sum_rate: r_fin, decision: d_fin.clone() },
        ],
        final_decision: d_fin,
        wall_time_s: 0.0,
        inner_counts: vec![n, evals],
        status: Status::Converged,
    })
}

/// Offset of a decision's position along the segment of `s`.
pub fn alpha_of(x_r: &[f64; 3], s: &Scenario) -> f64 {
    let seg = SegmentParam::new(s, 0.0);
    let u = s.ue_positions[0];
    (x_r[0] - u[0]) * seg.s_hat[0] + (x_r[1] - u[1]) * seg.s_hat[1]
}

#[cfg(test)]
mod tests {
    use super::*;

    fn symmetric() -> Scenario {
        let mut s = Scenario::with_defaults(&[[0.0, 0.0]], [2000.0, 0.0]);
        s.gamma_c_linear = 0.0;
        s.p_bs_max_w = s.p_ue_max_w[0];
        s
    }

    #[test]
    fn golden_finds_parabola_peak() {
        let (x, fx, _) = golden_max(-1.0, 3.0, 1e-12, |x| -(x - 0.7) * (x - 0.7));
        assert!((x - 0.7).abs() < 1e-6);
        assert!(fx <= 0.0);
    }

    #[test]
    fn symmetric_split_is_even_at_midpoint() {
        let s = symmetric();
        let lp = link_params(&s);
        let (pu, pd, _) = inner_power_split(1000.0, &s, &lp).unwrap();
        assert!((pu - pd).abs() < 1e-6 * s.p_uav_max_w);
    }

    #[test]
    fn low_relay_budget_symmetric_instance_lands_at_midpoint() {
        let mut s = symmetric();
        s.p_uav_max_w = s.p_ue_max_w[0];
        let r = solve_single_ue(&s, &SingleUeOptions::default()).unwrap();
        let a = alpha_of(&r.final_decision.x_r, &s);
        assert!((a - 1000.0).abs() < 2000.0 / 199.0, "alpha {a}");
        assert_eq!(r.status, Status::Converged);
    }

    #[test]
    fn symmetric_instance_optimum_has_a_mirror_twin() {
        // With a large relay budget the midpoint is a local minimum and the
        // optimum comes as a mirrored pair.
        let s = symmetric();
        let lp = link_params(&s);
        let r = solve_single_ue(&s, &SingleUeOptions::default()).unwrap();
        let a = alpha_of(&r.final_decision.x_r, &s);
        let (_, _, twin) = inner_power_split(2000.0 - a, &s, &lp).unwrap();
        assert!((twin - r.final_rate()).abs() <= 1e-9 * twin);
        let (_, _, mid) = inner_power_split(1000.0, &s, &lp).unwrap();
        assert!(mid < r.final_rate());
    }

    #[test]
    fn position_is_on_segment() {
        let s = Scenario::with_defaults(&[[100.0, 50.0]], [6000.0, 900.0]);
        let r = solve_single_ue(&s, &SingleUeOptions::default()).unwrap();
        let seg = SegmentParam::new(&s, alpha_of(&r.final_decision.x_r, &s));
        let p = seg.position(&s);
        assert!((p[0] - r.final_decision.x_r[0]).abs() < 1e-9);
        assert!((p[1] - r.final_decision.x_r[1]).abs() < 1e-9);
    }

    #[test]
    fn no_feasible_offset_reports_infeasible() {
        let mut s = Scenario::with_defaults(&[[0.0, 0.0]], [6000.0, 0.0]);
        s.p_uav_max_w = 1e-12;
        let r = solve_single_ue(&s, &SingleUeOptions::default()).unwrap();
        assert_eq!(r.status, Status::InfeasibleInput);
    }

    #[test]
    fn more_than_one_ue_is_rejected() {
        let s = Scenario::with_defaults(&[[0.0, 0.0], [1.0, 1.0]], [6000.0, 0.0]);
        assert!(solve_single_ue(&s, &SingleUeOptions::default()).is_err());
    }
}
