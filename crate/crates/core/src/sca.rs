//! Successive convex approximation over the reduced problem.
//!
//! Each outer iteration maximizes a surrogate over the feasible set. The
//! subproblem is solved through its Lagrange dual in the two budget
//! multipliers `(λ, μ)`: diminishing-step subgradient ascent outside, and
//! projected gradient on the separable Lagrangian inside, where only the
//! power floors remain as constraints.
//!
//! Objectives and tolerances inside the solver are in Mbps.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::model::{
    fill_budgets, is_feasible, link_params, scale_to_budgets, sum_rate, Decision, Iterate,
    LinkParams, Scenario, SolverReport, Status,
};
use crate::surrogate::{
    eval_baseline_amplitude, eval_proposed_flat, grad_baseline_amplitude, grad_flat,
    grad_proposed_flat, make_context, SurrogateContext, SurrogateKind, POWER_FLOOR_W,
};

/// bits/s to Mbps.
pub(crate) const MBPS: f64 = 1e-6;

/// Relative tolerance for accepting an initial point.
const INIT_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DsaOptions {
    pub max_dual_iters: usize,
    /// Fixed schedule `a/√t` for both multipliers. `None` (the default) uses
    /// per-multiplier secant steps on the budget residuals, with the first
    /// step moving each multiplier by at most 10%.
    pub dual_step_a: Option<f64>,
    /// Stop once each budget residual is within this fraction of its budget
    /// (or the multiplier is zero and the budget is slack).
    pub dual_tol: f64,
    pub gp_max_iters: usize,
    /// Projected-gradient norm (Mbps per scaled unit) that ends the inner loop.
    pub gp_tol: f64,
    pub armijo_c: f64,
    pub armijo_factor: f64,
}

impl Default for DsaOptions {
    fn default() -> Self {
        DsaOptions {
            max_dual_iters: 200,
            dual_step_a: None,
            dual_tol: 1e-6,
            gp_max_iters: 500,
            gp_tol: 1e-7,
            armijo_c: 1e-4,
            armijo_factor: 0.5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ScaOptions {
    pub surrogate_kind: SurrogateKind,
    /// Stop when the sum-rate gain of an outer iteration is at most this (Mbps).
    pub eps0: f64,
    pub max_outer: usize,
    pub dsa: DsaOptions,
}

impl Default for ScaOptions {
    fn default() -> Self {
        ScaOptions {
            surrogate_kind: SurrogateKind::Proposed,
            eps0: 1e-3,
            max_outer: 500,
            dsa: DsaOptions::default(),
        }
    }
}

/// Budget multipliers: `lambda` for the UAV budget, `mu` for the BS budget.
/// Units are Mbps per watt.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DualPair {
    pub lambda: f64,
    pub mu: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DsaOutcome {
    pub decision: Decision,
    pub duals: DualPair,
    /// Surrogate value at `decision`, in the rate unit of the link parameters.
    pub surrogate_value: f64,
    pub dual_iterations: usize,
    pub gp_iterations: usize,
    pub converged: bool,
    /// Largest budget violation relative to its budget (0 when feasible).
    pub feasibility_residual: f64,
    /// `(λ|g_r| + μ|g_b|)` at the returned point, in Mbps, relative to
    /// `max(1, surrogate value in Mbps)`.
    pub slackness_residual: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DualEvaluation {
    /// `max_y L(y; λ, μ)` in Mbps.
    pub value: f64,
    /// `1ᵀp_r + p_c − P_r` at the inner maximizer, watts.
    pub residual_uav_w: f64,
    /// `1ᵀp_b + p_c − P_b` at the inner maximizer, watts.
    pub residual_bs_w: f64,
    pub argmax: Decision,
    pub gp_iterations: usize,
}

/// Lagrangian of the surrogate subproblem in scaled coordinates
/// `z = ((x − x̄)/ℓ, q/q̄)`, where `q` are powers for the proposed surrogate
/// and amplitudes for the baseline (the baseline is concave in amplitudes).
struct Lagrangian<'a> {
    kind: SurrogateKind,
    ctx: &'a SurrogateContext,
    s: &'a Scenario,
    lp: &'a LinkParams,
    k: usize,
    origin: [f64; 2],
    ell: f64,
    q_bar: Vec<f64>,
    lower: Vec<f64>,
    c: f64,
    duals: DualPair,
    u: Vec<f64>,
    gu: Vec<f64>,
}

impl<'a> Lagrangian<'a> {
    fn new(kind: SurrogateKind, ctx: &'a SurrogateContext, s: &'a Scenario, lp: &'a LinkParams) -> Self {
        let k = ctx.num_ues();
        let a = &ctx.anchor;
        let inv: f64 = ctx.s_bar_kr.iter().map(|v| 1.0 / v + 1.0 / ctx.s_bar_rb).sum();
        let native = |p: f64| match kind {
            SurrogateKind::Proposed => p,
            SurrogateKind::Baseline => math::sqrt(p),
        };
        let q_bar: Vec<f64> = a.p_r_u.iter().chain(&a.p_r_d).chain(&a.p_b).map(|p| native(*p)).collect();
        let floor = native(POWER_FLOOR_W);
        let lower = q_bar.iter().map(|q| floor / q).collect();
        Lagrangian {
            kind,
            ctx,
            s,
            lp,
            k,
            origin: [a.x_r[0], a.x_r[1]],
            ell: 1.0 / math::sqrt(inv),
            q_bar,
            lower,
            c: lp.control_coeff(s),
            duals: DualPair::default(),
            u: vec![0.0; 2 + 3 * k],
            gu: vec![0.0; 2 + 3 * k],
        }
    }

    fn dim(&self) -> usize {
        2 + 3 * self.k
    }

    fn to_native(&mut self, z: &[f64]) {
        self.u[0] = self.origin[0] + self.ell * z[0];
        self.u[1] = self.origin[1] + self.ell * z[1];
        for j in 0..3 * self.k {
            self.u[2 + j] = self.q_bar[j] * (1.0 + z[2 + j]);
        }
    }

    fn power(&self, q: f64) -> f64 {
        match self.kind {
            SurrogateKind::Proposed => q,
            SurrogateKind::Baseline => q * q,
        }
    }

    /// Decision at the current native point.
    fn decision(&self) -> Decision {
        let k = self.k;
        let p = |j: usize| self.power(self.u[2 + j]);
        Decision {
            x_r: [self.u[0], self.u[1], self.s.altitude_h],
            p_r_u: (0..k).map(p).collect(),
            p_r_d: (k..2 * k).map(p).collect(),
            p_b: (2 * k..3 * k).map(p).collect(),
        }
    }

    /// Budget residuals `(g_r, g_b)` at the current native point.
    fn residuals(&self) -> (f64, f64) {
        let k = self.k;
        let b = &self.s.bs_position;
        let dx = self.u[0] - b[0];
        let dy = self.u[1] - b[1];
        let h = self.s.altitude_h;
        let p_c = self.c * (dx * dx + dy * dy + h * h);
        let pr: f64 = (0..2 * k).map(|j| self.power(self.u[2 + j])).sum();
        let pb: f64 = (2 * k..3 * k).map(|j| self.power(self.u[2 + j])).sum();
        (pr + p_c - self.s.p_uav_max_w, pb + p_c - self.s.p_bs_max_w)
    }

    fn surrogate(&self) -> f64 {
        match self.kind {
            SurrogateKind::Proposed => eval_proposed_flat(&self.u, self.ctx, self.s, self.lp),
            SurrogateKind::Baseline => eval_baseline_amplitude(&self.u, self.ctx, self.s, self.lp),
        }
    }

    /// Lagrangian value in Mbps; `−∞` outside the surrogate domain.
    fn value(&mut self, z: &[f64]) -> f64 {
        self.to_native(z);
        let f = self.surrogate();
        if !f.is_finite() {
            return f64::NEG_INFINITY;
        }
        let (gr, gb) = self.residuals();
        f * MBPS - self.duals.lambda * gr - self.duals.mu * gb
    }

    fn gradient(&mut self, z: &[f64], out: &mut [f64]) -> bool {
        self.to_native(z);
        let ok = match self.kind {
            SurrogateKind::Proposed => grad_proposed_flat(&self.u, self.ctx, self.s, self.lp, &mut self.gu),
            SurrogateKind::Baseline => grad_baseline_amplitude(&self.u, self.ctx, self.s, self.lp, &mut self.gu),
        };
        if !ok {
            return false;
        }
        let k = self.k;
        let DualPair { lambda, mu } = self.duals;
        let b = &self.s.bs_position;
        for c in 0..2 {
            let dg = 2.0 * self.c * (self.u[c] - b[c]);
            out[c] = self.ell * (self.gu[c] * MBPS - (lambda + mu) * dg);
        }
        for j in 0..3 * k {
            let q = self.u[2 + j];
            let dp = match self.kind {
                SurrogateKind::Proposed => 1.0,
                SurrogateKind::Baseline => 2.0 * q,
            };
            let m = if j < 2 * k { lambda } else { mu };
            out[2 + j] = self.q_bar[j] * (self.gu[2 + j] * MBPS - m * dp);
        }
        true
    }

    fn project(&self, z: &mut [f64]) {
        for (zi, lo) in z[2..].iter_mut().zip(&self.lower) {
            // z is an offset from the anchor: q = q̄(1 + z).
            if *zi < lo - 1.0 {
                *zi = lo - 1.0;
            }
        }
    }
}

/// Projected gradient ascent on the Lagrangian from the warm start `z`,
/// with Barzilai–Borwein trial steps and Armijo backtracking along the
/// projection arc. Returns the iteration count.
fn gradient_projection(lag: &mut Lagrangian<'_>, z: &mut Vec<f64>, opts: &DsaOptions) -> usize {
    let n = lag.dim();
    let mut f = lag.value(z);
    if !f.is_finite() {
        z.iter_mut().for_each(|v| *v = 0.0);
        f = lag.value(z);
    }
    let mut g = vec![0.0; n];
    let mut g_new = vec![0.0; n];
    let mut z_new = vec![0.0; n];
    if !lag.gradient(z, &mut g) {
        return 0;
    }
    let mut alpha = 1.0;
    for it in 1..=opts.gp_max_iters {
        z_new.iter_mut().zip(z.iter().zip(&g)).for_each(|(zn, (zi, gi))| *zn = zi + gi);
        lag.project(&mut z_new);
        let pg = z_new.iter().zip(z.iter()).fold(0.0f64, |m, (a, b)| m.max(math::abs(a - b)));
        if pg <= opts.gp_tol {
            return it - 1;
        }
        let f_new = loop {
            z_new.iter_mut().zip(z.iter().zip(&g)).for_each(|(zn, (zi, gi))| *zn = zi + alpha * gi);
            lag.project(&mut z_new);
            let lin: f64 = g.iter().zip(z_new.iter().zip(z.iter())).map(|(gi, (a, b))| gi * (a - b)).sum();
            let f_try = lag.value(&z_new);
            if f_try >= f + opts.armijo_c * lin {
                break f_try;
            }
            alpha *= opts.armijo_factor;
            if alpha < 1e-20 {
                return it;
            }
        };
        if !lag.gradient(&z_new, &mut g_new) {
            return it;
        }
        let mut ss = 0.0;
        let mut sy = 0.0;
        for j in 0..n {
            let sj = z_new[j] - z[j];
            ss += sj * sj;
            sy += sj * (g_new[j] - g[j]);
        }
        alpha = if sy < 0.0 { (ss / -sy).clamp(1e-12, 1e12) } else { 1e3 };
        core::mem::swap(z, &mut z_new);
        core::mem::swap(&mut g, &mut g_new);
        f = f_new;
    }
    opts.gp_max_iters
}

/// Initial multipliers: the mean marginal rate per watt of the UAV and BS
/// powers at the anchor, in Mbps/W. At an optimum with active budgets every
/// positive power has exactly this marginal value.
pub fn initial_duals(kind: SurrogateKind, ctx: &SurrogateContext, s: &Scenario, lp: &LinkParams) -> DualPair {
    let k = ctx.num_ues();
    let v = ctx.anchor.to_flat();
    let mut g = vec![0.0; v.len()];
    if !grad_flat(kind, &v, ctx, s, lp, &mut g) {
        return DualPair::default();
    }
    let mean = |r: core::ops::Range<usize>| {
        let n = r.len() as f64;
        g[r].iter().map(|x| x.max(0.0)).sum::<f64>() * MBPS / n
    };
    DualPair { lambda: mean(2..2 + 2 * k), mu: mean(2 + 2 * k..2 + 3 * k) }
}

/// Evaluate the dual function `max_y L(y; λ, μ)` by running the inner
/// projected-gradient loop from the anchor.
pub fn dual_function(
    kind: SurrogateKind,
    ctx: &SurrogateContext,
    s: &Scenario,
    lp: &LinkParams,
    opts: &DsaOptions,
    duals: DualPair,
) -> DualEvaluation {
    let mut lag = Lagrangian::new(kind, ctx, s, lp);
    lag.duals = duals;
    let mut z = vec![0.0; lag.dim()];
    let gp_iterations = gradient_projection(&mut lag, &mut z, opts);
    let value = lag.value(&z);
    let (residual_uav_w, residual_bs_w) = lag.residuals();
    DualEvaluation { value, residual_uav_w, residual_bs_w, argmax: lag.decision(), gp_iterations }
}

/// Secant slope `Δg/Δλ` of a budget residual in its multiplier. Rejected
/// when the multiplier barely moved or the slope has the wrong sign (the
/// residual is nonincreasing in its multiplier).
fn secant_slope(d_mult: f64, d_res: f64, mult: f64) -> Option<f64> {
    let kappa = d_res / d_mult;
    (math::abs(d_mult) > 1e-12 * (1.0 + mult) && kappa < 0.0 && kappa.is_finite()).then_some(kappa)
}

/// Newton step on the residual with slope `kappa`, limited to twice the
/// larger of the current multiplier and a tenth of its initial value.
fn newton_step(mult: f64, res: f64, kappa: f64, init: f64) -> f64 {
    let cap = 2.0 * mult.max(0.1 * init);
    mult + (res / -kappa).clamp(-cap, cap)
}

/// Maximize the surrogate over the feasible set by dual subgradient ascent.
///
/// On hitting the dual iteration limit the best primal point seen (after
/// scaling its powers down onto the budgets) is returned.
pub fn solve_subproblem_dsa(
    kind: SurrogateKind,
    ctx: &SurrogateContext,
    s: &Scenario,
    lp: &LinkParams,
    opts: &DsaOptions,
) -> DsaOutcome {
    let mut lag = Lagrangian::new(kind, ctx, s, lp);
    let init = initial_duals(kind, ctx, s, lp);
    let mut duals = init;
    let mut z = vec![0.0; lag.dim()];
    let (mut slope_l, mut slope_m) = (-1.0, -1.0);
    let (pr, pb) = (s.p_uav_max_w, s.p_bs_max_w);
    let mut best: Option<(f64, Decision, DualPair)> = None;
    let mut gp_iterations = 0;
    let mut dual_iterations = 0;
    let mut converged = false;
    let mut prev = (0.0, 0.0, 0.0, 0.0);
    for t in 1..=opts.max_dual_iters {
        dual_iterations = t;
        lag.duals = duals;
        gp_iterations += gradient_projection(&mut lag, &mut z, opts);
        lag.to_native(&z);
        let (gr, gb) = lag.residuals();
        let cand = scale_to_budgets(&lag.decision(), s, lp);
        let f = crate::surrogate::eval_flat(kind, &cand.to_flat(), ctx, s, lp);
        if f.is_finite() && best.as_ref().is_none_or(|(fb, _, _)| f > *fb) {
            best = Some((f, cand, duals));
        }
        let ok_r = math::abs(gr) <= opts.dual_tol * pr || (duals.lambda == 0.0 && gr <= 0.0);
        let ok_b = math::abs(gb) <= opts.dual_tol * pb || (duals.mu == 0.0 && gb <= 0.0);
        if ok_r && ok_b {
            converged = true;
            break;
        }
        let (next_l, next_m) = match opts.dual_step_a {
            Some(a) => {
                let step = a / math::sqrt(t as f64);
                (duals.lambda + step * gr, duals.mu + step * gb)
            }
            None => {
                if t == 1 {
                    // First step moves each multiplier by at most 10%.
                    slope_l = -math::abs(gr).max(1e-3 * pr) / (0.1 * init.lambda.max(f64::MIN_POSITIVE));
                    slope_m = -math::abs(gb).max(1e-3 * pb) / (0.1 * init.mu.max(f64::MIN_POSITIVE));
                } else {
                    let (l0, m0, gr0, gb0) = prev;
                    slope_l = secant_slope(duals.lambda - l0, gr - gr0, duals.lambda).unwrap_or(slope_l);
                    slope_m = secant_slope(duals.mu - m0, gb - gb0, duals.mu).unwrap_or(slope_m);
                }
                (
                    newton_step(duals.lambda, gr, slope_l, init.lambda),
                    newton_step(duals.mu, gb, slope_m, init.mu),
                )
            }
        };
        prev = (duals.lambda, duals.mu, gr, gb);
        duals.lambda = next_l.max(0.0);
        duals.mu = next_m.max(0.0);
    }
    let (value, decision, duals) = match best {
        Some(b) => b,
        None => {
            let a = ctx.anchor.clone();
            (crate::surrogate::eval_flat(kind, &a.to_flat(), ctx, s, lp), a, duals)
        }
    };
    let f = is_feasible(&decision, s, lp, 0.0);
    let p_c = crate::model::control_power(&decision.x_r, s, lp);
    let gr = decision.uav_power() + p_c - pr;
    let gb = decision.bs_power() + p_c - pb;
    DsaOutcome {
        feasibility_residual: (f.uav_violation_w / pr).max(f.bs_violation_w / pb).max(0.0),
        slackness_residual: (duals.lambda * math::abs(gr) + duals.mu * math::abs(gb))
            / (value * MBPS).max(1.0),
        decision,
        duals,
        surrogate_value: value,
        dual_iterations,
        gp_iterations,
        converged,
    }
}

/// Successive convex approximation from a feasible `init`.
///
/// After each subproblem the powers are scaled up onto both budgets; the
/// true rate is increasing in every power, so this never lowers it.
pub fn solve_sca(s: &Scenario, init: &Decision, opts: &ScaOptions) -> Result<SolverReport> {
    s.validate()?;
    if init.num_ues() != s.num_ues() {
        return Err(Error::DimensionMismatch { expected: s.num_ues(), found: init.num_ues() });
    }
    let lp = link_params(s);
    let f = is_feasible(init, s, &lp, INIT_TOL);
    if !f.feasible {
        return Err(Error::Infeasible { uav_violation_w: f.uav_violation_w, bs_violation_w: f.bs_violation_w });
    }
    let mut y = init.clone();
    let mut rate = sum_rate(&y, s, &lp);
    let mut report = SolverReport {
        iterates: vec![Iterate { iteration: 0, sum_rate: rate, decision: y.clone() }],
        final_decision: y.clone(),
        wall_time_s: 0.0,
        inner_counts: Vec::new(),
        status: Status::IterationLimit,
    };
    for i in 1..=opts.max_outer {
        let ctx = make_context(&y, s, &lp)?;
        let out = solve_subproblem_dsa(opts.surrogate_kind, &ctx, s, &lp, &opts.dsa);
        report.inner_counts.push(out.dual_iterations);
        let cand = fill_budgets(&out.decision, s, &lp);
        let r_new = sum_rate(&cand, s, &lp);
        if !(r_new >= rate) {
            report.status = Status::Converged;
            break;
        }
        let gain = r_new - rate;
        y = cand;
        rate = r_new;
        report.iterates.push(Iterate { iteration: i, sum_rate: rate, decision: y.clone() });
        if gain * MBPS <= opts.eps0 {
            report.status = Status::Converged;
            break;
        }
    }
    report.final_decision = fill_budgets(&y, s, &lp);
    Ok(report)
}
