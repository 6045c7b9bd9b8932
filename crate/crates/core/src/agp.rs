//! Double-loop accelerated gradient projection.
//!
//! The outer loop takes one extrapolated projected-gradient step on the
//! proposed surrogate per iteration, with a backtracked step parameter `τ`.
//! The projection onto the feasible set is a convex QCQP whose Lagrange
//! dual has a closed form; the inner loop maximizes that dual with FISTA and
//! recovers the primal point from the dual optimum.
//!
//! The solver works in scaled coordinates: positions are divided by a
//! length `ℓ` so that position and power curvatures are comparable, and
//! rates are in Mbps. With `ℓ = 1` the projection is the plain Euclidean
//! projection in meters and watts.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{
    fill_budgets, is_feasible, link_params, scale_to_budgets, sum_rate, Decision, Iterate,
    LinkParams, Scenario, SolverReport, Status,
};
use crate::sca::MBPS;
use crate::surrogate::{
    curvature_report, eval_proposed_flat, grad_proposed_flat, make_context, SurrogateContext,
    POWER_FLOOR_W,
};

const INIT_TOL: f64 = 1e-6;
/// Multiplier on the curvature-equalizing scale. Larger position steps pay
/// off because the surrogate flattens in position away from its anchor.
const AUTO_SCALE_FACTOR: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct AgpOptions {
    /// Growth factor of `τ` on a failed descent test.
    pub kappa: f64,
    pub tau_init: f64,
    /// Relative dual-value change that ends the inner loop.
    pub eps1: f64,
    /// Sum-rate change (Mbps) that ends the outer loop.
    pub eps2: f64,
    /// Outer iteration cap. Starts far from the optimum can need over a
    /// thousand iterations. With cold-started duals and a loose `eps1` the
    /// extrapolated iterates can also settle into a two-point cycle that
    /// never meets `eps2`; the cap bounds the cost and the report says
    /// [`Status::IterationLimit`].
    pub max_outer: usize,
    pub max_inner: usize,
    /// Abort once `τ` exceeds this value.
    pub tau_cap: f64,
    /// Start each inner loop from the previous duals instead of zero.
    pub warm_start_duals: bool,
    /// Position length scale `ℓ` in meters; `None` uses twice
    /// [`auto_position_scale`] at the initial point.
    pub position_scale: Option<f64>,
    /// Keep the UAV position fixed and optimize powers only.
    pub freeze_position: bool,
}

impl Default for AgpOptions {
    fn default() -> Self {
        AgpOptions {
            kappa: 1.2,
            tau_init: 1.0,
            eps1: 5e-3,
            eps2: 1e-3,
            max_outer: 5000,
            max_inner: 2_000,
            tau_cap: 1e12,
            warm_start_duals: false,
            position_scale: None,
            freeze_position: false,
        }
    }
}

/// Dual variables of the projection: budget multipliers and one multiplier
/// per power nonnegativity constraint.
#[derive(Debug, Clone, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DualPoint {
    pub lambda: f64,
    pub mu: f64,
    pub nu_r_u: Vec<f64>,
    pub nu_r_d: Vec<f64>,
    pub nu_b: Vec<f64>,
}

impl DualPoint {
    pub fn zeros(k: usize) -> DualPoint {
        DualPoint { lambda: 0.0, mu: 0.0, nu_r_u: vec![0.0; k], nu_r_d: vec![0.0; k], nu_b: vec![0.0; k] }
    }

    /// Flat layout `[λ, μ, ν_r^U, ν_r^D, ν_b]`.
    pub fn to_flat(&self) -> Vec<f64> {
        let mut v = Vec::with_capacity(2 + 3 * self.nu_b.len());
        v.push(self.lambda);
        v.push(self.mu);
        v.extend_from_slice(&self.nu_r_u);
        v.extend_from_slice(&self.nu_r_d);
        v.extend_from_slice(&self.nu_b);
        v
    }

    pub fn from_flat(v: &[f64]) -> DualPoint {
        let k = (v.len() - 2) / 3;
        DualPoint {
            lambda: v[0],
            mu: v[1],
            nu_r_u: v[2..2 + k].to_vec(),
            nu_r_d: v[2 + k..2 + 2 * k].to_vec(),
            nu_b: v[2 + 2 * k..].to_vec(),
        }
    }
}

/// Projection of `v` onto the feasible set, in coordinates where positions
/// are divided by `ℓ`: `c̃ = cℓ²` and `b̃ = b/ℓ`. The altitude is pinned, so
/// `c h²` moves into the budgets.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectionProblem {
    k: usize,
    /// Flat point to project, `[x/ℓ, y/ℓ, p_r^U, p_r^D, p_b]`.
    v: Vec<f64>,
    c_tilde: f64,
    b_tilde: [f64; 2],
    /// `‖b̃ − ṽ_x‖²`.
    dist2: f64,
    budget_r: f64,
    budget_b: f64,
    freeze_position: bool,
}

impl ProjectionProblem {
    pub fn new(v: &[f64], position_scale: f64, freeze_position: bool, s: &Scenario, lp: &LinkParams) -> Self {
        let k = (v.len() - 2) / 3;
        let ell = position_scale;
        let c = lp.control_coeff(s);
        let c_tilde = c * ell * ell;
        let b_tilde = [s.bs_position[0] / ell, s.bs_position[1] / ell];
        let dist2 = (b_tilde[0] - v[0]) * (b_tilde[0] - v[0]) + (b_tilde[1] - v[1]) * (b_tilde[1] - v[1]);
        let h2 = s.altitude_h * s.altitude_h;
        // A frozen position pays its full control power up front.
        let fixed = if freeze_position { c_tilde * dist2 + c * h2 } else { c * h2 };
        ProjectionProblem {
            k,
            v: v.to_vec(),
            c_tilde,
            b_tilde,
            dist2,
            budget_r: s.p_uav_max_w - fixed,
            budget_b: s.p_bs_max_w - fixed,
            freeze_position,
        }
    }

    pub fn dim(&self) -> usize {
        2 + 3 * self.k
    }

    /// Multiplier attached to power coordinate `j` (0-based within the
    /// power block): `λ` for UAV powers, `μ` for BS powers.
    #[inline]
    fn budget_mult(&self, sd: &[f64], j: usize) -> f64 {
        if j < 2 * self.k {
            sd[0]
        } else {
            sd[1]
        }
    }

    /// Closed-form dual function at the flat dual point `sd`.
    pub fn dual_value(&self, sd: &[f64]) -> f64 {
        let sigma = sd[0] + sd[1];
        let mut g = if self.freeze_position {
            0.0
        } else {
            sigma * self.c_tilde / (1.0 + sigma * self.c_tilde) * self.dist2
        };
        for j in 0..3 * self.k {
            let w = self.budget_mult(sd, j) - sd[2 + j];
            g += -0.25 * w * w + self.v[2 + j] * w;
        }
        g - sd[0] * self.budget_r - sd[1] * self.budget_b
    }

    /// Gradient of [`ProjectionProblem::dual_value`]: the budget residuals at
    /// the Lagrangian minimizer for `λ, μ`, and minus the recovered powers
    /// for the `ν` entries.
    pub fn dual_gradient(&self, sd: &[f64], out: &mut [f64]) {
        let sigma = sd[0] + sd[1];
        let pos = if self.freeze_position {
            0.0
        } else {
            let den = 1.0 + sigma * self.c_tilde;
            self.c_tilde / (den * den) * self.dist2
        };
        out[0] = pos - self.budget_r;
        out[1] = pos - self.budget_b;
        for j in 0..3 * self.k {
            let w = self.budget_mult(sd, j) - sd[2 + j];
            let p = self.v[2 + j] - 0.5 * w;
            out[2 + j] = -p;
            if j < 2 * self.k {
                out[0] += p;
            } else {
                out[1] += p;
            }
        }
    }

    /// Unique minimizer of the Lagrangian at `sd`, in scaled coordinates.
    pub fn recover_primal(&self, sd: &[f64]) -> Vec<f64> {
        let mut y = self.v.clone();
        if !self.freeze_position {
            let sc = (sd[0] + sd[1]) * self.c_tilde;
            for c in 0..2 {
                y[c] = (self.v[c] + sc * self.b_tilde[c]) / (1.0 + sc);
            }
        }
        for j in 0..3 * self.k {
            let w = self.budget_mult(sd, j) - sd[2 + j];
            y[2 + j] = self.v[2 + j] - 0.5 * w;
        }
        y
    }

    /// Primal objective `‖y − v‖²` in scaled coordinates.
    pub fn primal_objective(&self, y: &[f64]) -> f64 {
        y.iter().zip(&self.v).map(|(a, b)| (a - b) * (a - b)).sum()
    }

    /// FISTA on the dual from `start`, stopping when the relative change of
    /// the dual value is at most `eps1` or the iterate stops moving.
    /// Returns the dual point and the iteration count.
    pub fn solve_dual(&self, start: &[f64], eps1: f64, max_inner: usize) -> (Vec<f64>, usize) {
        let n = self.dim();
        let mut s = start.to_vec();
        project_nonneg(&mut s);
        let mut s_prev = s.clone();
        let mut t = vec![0.0; n];
        let mut grad = vec![0.0; n];
        let mut s_new = vec![0.0; n];
        // Lipschitz estimate of the dual gradient, raised by backtracking.
        let mut eta = 0.5;
        let mut g_cur = self.dual_value(&s);
        for l in 1..=max_inner {
            let beta = (l as f64 - 1.0) / (l as f64 + 2.0);
            for j in 0..n {
                t[j] = s[j] + beta * (s[j] - s_prev[j]);
            }
            let gt = self.dual_value(&t);
            self.dual_gradient(&t, &mut grad);
            let g_new = loop {
                let mut lin = 0.0;
                let mut sq = 0.0;
                for j in 0..n {
                    s_new[j] = (t[j] + grad[j] / eta).max(0.0);
                    let d = s_new[j] - t[j];
                    lin += grad[j] * d;
                    sq += d * d;
                }
                let g_try = self.dual_value(&s_new);
                if g_try >= gt + lin - 0.5 * eta * sq - 1e-12 * (1.0 + math::abs(gt)) {
                    break g_try;
                }
                eta *= 2.0;
            };
            let moved = s_new.iter().zip(&s).any(|(a, b)| a != b);
            core::mem::swap(&mut s_prev, &mut s);
            core::mem::swap(&mut s, &mut s_new);
            let g_old = g_cur;
            g_cur = g_new;
            if !moved || (g_old != 0.0 && math::abs(g_cur - g_old) <= eps1 * math::abs(g_old)) {
                return (s, l);
            }
        }
        (s, max_inner)
    }
}

fn project_nonneg(s: &mut [f64]) {
    s.iter_mut().for_each(|v| *v = v.max(0.0));
}

/// Result of [`project_onto_y`].
#[derive(Debug, Clone, PartialEq)]
pub struct Projection {
    pub decision: Decision,
    pub duals: DualPoint,
    pub inner_iterations: usize,
}

/// Flat scaled vector of a decision: positions divided by `ℓ`.
fn to_scaled(d: &Decision, ell: f64) -> Vec<f64> {
    let mut v = d.to_flat();
    v[0] /= ell;
    v[1] /= ell;
    v
}

fn from_scaled(v: &[f64], ell: f64, h: f64) -> Decision {
    let mut d = Decision::from_flat(v, h);
    d.x_r[0] *= ell;
    d.x_r[1] *= ell;
    d
}

/// Recover, clamp and make feasible. `y` is in scaled coordinates.
fn finish_projection(y: &[f64], ell: f64, s: &Scenario, lp: &LinkParams) -> Decision {
    let mut d = from_scaled(y, ell, s.altitude_h);
    let d_floor = d.floored(POWER_FLOOR_W);
    d = scale_to_budgets(&d_floor, s, lp);
    d
}

fn project_scaled(
    prob: &ProjectionProblem,
    start: &[f64],
    eps1: f64,
    max_inner: usize,
    ell: f64,
    s: &Scenario,
    lp: &LinkParams,
) -> (Decision, Vec<f64>, usize) {
    let (sd, iters) = prob.solve_dual(start, eps1, max_inner);
    let y = prob.recover_primal(&sd);
    (finish_projection(&y, ell, s, lp), sd, iters)
}

/// Euclidean projection of `v` (meters and watts) onto the feasible set,
/// using `opts.eps1`, `opts.max_inner` and `opts.freeze_position`.
///
/// Powers below the floor after recovery are clamped to it, and the power
/// blocks are scaled down if the inexact dual leaves a budget violated.
pub fn project_onto_y(v: &Decision, s: &Scenario, lp: &LinkParams, opts: &AgpOptions) -> Projection {
    let prob = ProjectionProblem::new(&v.to_flat(), 1.0, opts.freeze_position, s, lp);
    let (decision, sd, inner_iterations) =
        project_scaled(&prob, &vec![0.0; prob.dim()], opts.eps1, opts.max_inner, 1.0, s, lp);
    Projection { decision, duals: DualPoint::from_flat(&sd), inner_iterations }
}

/// `v = z + ∇/τ` as a flat vector in meters and watts.
fn step_point(z: &Decision, grad: &[f64], tau: f64) -> Vec<f64> {
    z.to_flat().iter().zip(grad).map(|(a, g)| a + g / tau).collect()
}

/// Closed-form dual of the projection of `v = z + ∇/τ` (meters and watts).
pub fn dual_g(sd: &DualPoint, z: &Decision, grad: &[f64], tau: f64, s: &Scenario, lp: &LinkParams) -> f64 {
    ProjectionProblem::new(&step_point(z, grad, tau), 1.0, false, s, lp).dual_value(&sd.to_flat())
}

/// Gradient of [`dual_g`], laid out like a [`DualPoint`].
pub fn grad_dual_g(
    sd: &DualPoint,
    z: &Decision,
    grad: &[f64],
    tau: f64,
    s: &Scenario,
    lp: &LinkParams,
) -> DualPoint {
    let prob = ProjectionProblem::new(&step_point(z, grad, tau), 1.0, false, s, lp);
    let mut out = vec![0.0; prob.dim()];
    prob.dual_gradient(&sd.to_flat(), &mut out);
    DualPoint::from_flat(&out)
}

/// Surrogate value (Mbps) and scaled gradient at a flat scaled point.
fn surrogate_scaled(
    y: &[f64],
    ell: f64,
    ctx: &SurrogateContext,
    s: &Scenario,
    lp: &LinkParams,
    grad: Option<&mut [f64]>,
) -> f64 {
    let mut m = y.to_vec();
    m[0] *= ell;
    m[1] *= ell;
    let f = eval_proposed_flat(&m, ctx, s, lp) * MBPS;
    if let Some(g) = grad {
        if !f.is_finite() || !grad_proposed_flat(&m, ctx, s, lp, g) {
            return f64::NEG_INFINITY;
        }
        g.iter_mut().for_each(|v| *v *= MBPS);
        g[0] *= ell;
        g[1] *= ell;
    }
    f
}

/// Sufficient-ascent test on the surrogate anchored at `ctx`, in scaled
/// coordinates, given `R̄(z)` and `∇R̄(z)`.
fn descent_scaled(y_next: &[f64], z: &[f64], f_z: f64, g_z: &[f64], tau: f64, f_next: f64) -> bool {
    if !f_next.is_finite() || !f_z.is_finite() {
        return false;
    }
    let mut lin = 0.0;
    let mut sq = 0.0;
    for j in 0..z.len() {
        let d = y_next[j] - z[j];
        lin += g_z[j] * d;
        sq += d * d;
    }
    f_next >= f_z + lin - 0.5 * tau * sq - 1e-12 * (1.0 + math::abs(f_z))
}

/// The step-acceptance test
/// `R̄(y⁺) ≥ R̄(z) + ∇R̄(z)ᵀ(y⁺ − z) − (τ/2)‖y⁺ − z‖²`
/// for the surrogate anchored at `ctx`. Rates are in Mbps and positions are
/// divided by `position_scale`. Points outside the surrogate domain fail.
pub fn descent_condition(
    y_next: &Decision,
    z: &Decision,
    ctx: &SurrogateContext,
    tau: f64,
    position_scale: f64,
    s: &Scenario,
    lp: &LinkParams,
) -> bool {
    let yn = to_scaled(y_next, position_scale);
    let zs = to_scaled(z, position_scale);
    let mut g = vec![0.0; zs.len()];
    let f_z = surrogate_scaled(&zs, position_scale, ctx, s, lp, Some(&mut g));
    let f_next = surrogate_scaled(&yn, position_scale, ctx, s, lp, None);
    descent_scaled(&yn, &zs, f_z, &g, tau, f_next)
}

/// Position scale that equalizes the largest power curvature and the
/// position curvature of the surrogate at the context anchor.
pub fn auto_position_scale(ctx: &SurrogateContext, s: &Scenario, lp: &LinkParams) -> f64 {
    let base = ctx.anchor.to_flat();
    let n = base.len();
    let mut gp = vec![0.0; n];
    let mut gm = vec![0.0; n];
    let mut max_power_curv: f64 = 0.0;
    for j in 2..n {
        let h = 1e-4 * base[j];
        let mut vp = base.clone();
        let mut vm = base.clone();
        vp[j] += h;
        vm[j] -= h;
        if grad_proposed_flat(&vp, ctx, s, lp, &mut gp) && grad_proposed_flat(&vm, ctx, s, lp, &mut gm) {
            max_power_curv = max_power_curv.max(math::abs(gp[j] - gm[j]) / (2.0 * h));
        }
    }
    let rho = curvature_report(ctx, s, lp).map(|(r, _)| r).unwrap_or(0.0);
    if rho > 0.0 && max_power_curv > 0.0 {
        math::sqrt(max_power_curv / rho)
    } else {
        1.0
    }
}

/// Double-loop AGP from a feasible `init`.
///
/// Outer steps that fail the ascent test are rejected: `τ` grows by `κ`
/// and the projection is redone at the same extrapolated point.
pub fn solve_agp(s: &Scenario, init: &Decision, opts: &AgpOptions) -> Result<SolverReport> {
    s.validate()?;
    if init.num_ues() != s.num_ues() {
        return Err(Error::DimensionMismatch { expected: s.num_ues(), found: init.num_ues() });
    }
    let lp = link_params(s);
    let f = is_feasible(init, s, &lp, INIT_TOL);
    if !f.feasible {
        return Err(Error::Infeasible { uav_violation_w: f.uav_violation_w, bs_violation_w: f.bs_violation_w });
    }
    let y0 = init.floored(POWER_FLOOR_W);
    let ell = match opts.position_scale {
        Some(l) => l,
        None => AUTO_SCALE_FACTOR * auto_position_scale(&make_context(&y0, s, &lp)?, s, &lp),
    };
    let n = 2 + 3 * s.num_ues();
    let mut y = to_scaled(&y0, ell);
    let mut y_prev = y.clone();
    let mut rate = sum_rate(&y0, s, &lp) * MBPS;
    let mut report = SolverReport {
        iterates: vec![Iterate { iteration: 0, sum_rate: rate / MBPS, decision: init.clone() }],
        final_decision: init.clone(),
        wall_time_s: 0.0,
        inner_counts: Vec::new(),
        status: Status::IterationLimit,
    };
    let mut tau = opts.tau_init;
    let mut duals = vec![0.0; n];
    let mut g_z = vec![0.0; n];
    for i in 1..=opts.max_outer {
        let y_dec = from_scaled(&y, ell, s.altitude_h);
        let ctx = make_context(&y_dec, s, &lp)?;
        let beta = (i as f64 - 1.0) / (i as f64 + 2.0);
        let mut z: Vec<f64> = y.iter().zip(&y_prev).map(|(a, b)| a + beta * (a - b)).collect();
        let mut f_z = f64::NEG_INFINITY;
        if z[2..].iter().all(|p| *p > 0.0) {
            f_z = surrogate_scaled(&z, ell, &ctx, s, &lp, Some(&mut g_z));
        }
        if !f_z.is_finite() {
            z.copy_from_slice(&y);
            f_z = surrogate_scaled(&z, ell, &ctx, s, &lp, Some(&mut g_z));
        }
        if opts.freeze_position {
            g_z[0] = 0.0;
            g_z[1] = 0.0;
        }
        let mut inner = 0;
        let next = loop {
            let v: Vec<f64> = z.iter().zip(&g_z).map(|(a, g)| a + g / tau).collect();
            let prob = ProjectionProblem::new(&v, ell, opts.freeze_position, s, &lp);
            let start = if opts.warm_start_duals { duals.clone() } else { vec![0.0; n] };
            let (d, sd, it) = project_scaled(&prob, &start, opts.eps1, opts.max_inner, ell, s, &lp);
            inner += it;
            let yn = to_scaled(&d, ell);
            let f_next = surrogate_scaled(&yn, ell, &ctx, s, &lp, None);
            if descent_scaled(&yn, &z, f_z, &g_z, tau, f_next) {
                duals = sd;
                break yn;
            }
            tau *= opts.kappa;
            if tau > opts.tau_cap {
                report.inner_counts.push(inner);
                report.final_decision = fill_budgets(&y_dec, s, &lp);
                return Err(Error::StepSizeCap { tau, iteration: i });
            }
        };
        report.inner_counts.push(inner);
        y_prev = core::mem::replace(&mut y, next);
        let d = from_scaled(&y, ell, s.altitude_h);
        let r_new = sum_rate(&d, s, &lp) * MBPS;
        report.iterates.push(Iterate { iteration: i, sum_rate: r_new / MBPS, decision: d });
        let change = math::abs(r_new - rate);
        rate = r_new;
        if change <= opts.eps2 {
            report.status = Status::Converged;
            break;
        }
    }
    let last = from_scaled(&y, ell, s.altitude_h);
    report.final_decision = fill_budgets(&last, s, &lp);
    // Filling the budgets only raises powers, so the filled point replaces
    // the last iterate.
    if let Some(it) = report.iterates.last_mut().filter(|it| it.iteration > 0) {
        it.sum_rate = sum_rate(&report.final_decision, s, &lp);
        it.decision = report.final_decision.clone();
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::geometry_center;

    fn scenario() -> Scenario {
        Scenario::with_defaults(&[[100.0, 200.0], [800.0, 900.0]], [6400.0, 300.0])
    }

    #[test]
    fn dual_at_zero_is_zero() {
        let s = scenario();
        let lp = link_params(&s);
        let z = Decision::uniform(geometry_center(&s), &s, &lp);
        let grad = vec![0.3; 8];
        assert_eq!(dual_g(&DualPoint::zeros(2), &z, &grad, 2.0, &s, &lp), 0.0);
    }

    #[test]
    fn point_inside_projects_to_itself() {
        let s = scenario();
        let lp = link_params(&s);
        let mut v = Decision::uniform(geometry_center(&s), &s, &lp);
        v.p_b[0] *= 0.5;
        let p = project_onto_y(&v, &s, &lp, &AgpOptions::default());
        assert_eq!(p.decision, v);
        assert_eq!(p.duals, DualPoint::zeros(2));
    }

    #[test]
    fn zero_control_gain_drops_position_term() {
        let mut s = scenario();
        s.gamma_c_linear = 0.0;
        let lp = link_params(&s);
        let z = Decision::uniform(geometry_center(&s), &s, &lp);
        let grad = vec![0.0; 8];
        let mut sd = DualPoint::zeros(2);
        sd.lambda = 0.7;
        let g = grad_dual_g(&sd, &z, &grad, 1.0, &s, &lp);
        let direct: f64 = z.p_r_u.iter().chain(&z.p_r_d).map(|p| p - 0.35).sum::<f64>() - s.p_uav_max_w;
        assert!((g.lambda - direct).abs() < 1e-12);
    }
}
