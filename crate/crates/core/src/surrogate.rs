//! Concave, locally tight lower bounds of the sum rate around an anchor.
//!
//! Two constructions are provided. The proposed surrogate `R̄` works on
//! `X = ‖d‖²/p` terms and has position curvature that vanishes as ξ grows;
//! the baseline `R̂` works on amplitudes `a = √p` and linearized squared
//! distances, and its position curvature stays O(1).
//!
//! Values are in the configured rate unit per second (bits/s by default).
//! Gradients use the flat layout of [`Decision::to_flat`]: the free position
//! coordinates `(x, y)` followed by `p_r^U`, `p_r^D` and `p_b`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math::{self, dot3, norm2_3, sub3};
use crate::model::{is_feasible, Decision, LinkParams, Scenario};

/// Anchor powers are raised to this floor before a context is built.
pub const POWER_FLOOR_W: f64 = 1e-9;

/// Linearized log arguments and linearized squared distances must exceed
/// this value for a point to be inside the surrogate domain.
pub const LOG_DOMAIN_GUARD: f64 = 1e-12;

/// Relative budget tolerance for accepting an anchor.
const ANCHOR_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "lowercase"))]
pub enum SurrogateKind {
    /// `R̄`, built on `‖d‖²/p` terms.
    Proposed,
    /// `R̂`, built on amplitudes and linearized squared distances.
    Baseline,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurrogateValue {
    /// Surrogate value, or `f64::NEG_INFINITY` outside the domain.
    pub value: f64,
    pub in_domain: bool,
}

impl SurrogateValue {
    fn from_raw(v: f64) -> SurrogateValue {
        if v.is_finite() {
            SurrogateValue { value: v, in_domain: true }
        } else {
            SurrogateValue { value: f64::NEG_INFINITY, in_domain: false }
        }
    }
}

/// Anchor point plus the constants both surrogates need.
#[derive(Debug, Clone, PartialEq)]
pub struct SurrogateContext {
    /// Anchor with powers floored at [`POWER_FLOOR_W`].
    pub anchor: Decision,
    /// `x̄_r − b`.
    pub d_bar_rb: [f64; 3],
    pub s_bar_rb: f64,
    /// `x̄_r − u_k`.
    pub d_bar_kr: Vec<[f64; 3]>,
    pub s_bar_kr: Vec<f64>,
    pub i_bar_d: Vec<f64>,
    pub i_bar_u: Vec<f64>,
    pub j_bar_d: Vec<f64>,
    pub j_bar_u: Vec<f64>,
    pub a_bar_b: Vec<f64>,
    pub a_bar_rd: Vec<f64>,
    pub a_bar_ru: Vec<f64>,
}

impl SurrogateContext {
    pub fn num_ues(&self) -> usize {
        self.s_bar_kr.len()
    }
}

/// Build the context at `anchor`. Powers are floored first; the floored
/// anchor must satisfy both budgets within a relative tolerance of 1e-6.
pub fn make_context(anchor: &Decision, s: &Scenario, lp: &LinkParams) -> Result<SurrogateContext> {
    let k = s.num_ues();
    if anchor.p_r_u.len() != k || anchor.p_r_d.len() != k || anchor.p_b.len() != k {
        return Err(Error::DimensionMismatch { expected: k, found: anchor.num_ues() });
    }
    let anchor = anchor.floored(POWER_FLOOR_W);
    let f = is_feasible(&anchor, s, lp, ANCHOR_TOL);
    if !f.feasible {
        return Err(Error::Infeasible {
            uav_violation_w: f.uav_violation_w,
            bs_violation_w: f.bs_violation_w,
        });
    }
    let xi = lp.xi;
    let d_bar_rb = sub3(&anchor.x_r, &s.bs_position);
    let s_bar_rb = norm2_3(&d_bar_rb);
    let d_bar_kr: Vec<[f64; 3]> = s.ue_positions.iter().map(|u| sub3(&anchor.x_r, u)).collect();
    let s_bar_kr: Vec<f64> = d_bar_kr.iter().map(norm2_3).collect();
    let mut ctx = SurrogateContext {
        anchor,
        d_bar_rb,
        s_bar_rb,
        d_bar_kr,
        s_bar_kr,
        i_bar_d: vec![0.0; k],
        i_bar_u: vec![0.0; k],
        j_bar_d: vec![0.0; k],
        j_bar_u: vec![0.0; k],
        a_bar_b: vec![0.0; k],
        a_bar_rd: vec![0.0; k],
        a_bar_ru: vec![0.0; k],
    };
    for i in 0..k {
        let a = &ctx.anchor;
        let (skr, p_u) = (ctx.s_bar_kr[i], s.p_ue_max_w[i]);
        ctx.i_bar_d[i] = i_bar(s_bar_rb / a.p_b[i], skr / a.p_r_d[i], xi);
        ctx.i_bar_u[i] = i_bar(skr / p_u, s_bar_rb / a.p_r_u[i], xi);
        ctx.j_bar_d[i] = xi * (a.p_r_d[i] / skr + a.p_b[i] / s_bar_rb);
        ctx.j_bar_u[i] = xi * (a.p_r_u[i] / s_bar_rb + p_u / skr);
        ctx.a_bar_b[i] = math::sqrt(a.p_b[i]);
        ctx.a_bar_rd[i] = math::sqrt(a.p_r_d[i]);
        ctx.a_bar_ru[i] = math::sqrt(a.p_r_u[i]);
    }
    Ok(ctx)
}

/// `Ī = X̄₁/ξ + X̄₂/ξ + X̄₁X̄₂/ξ²` for the hop ratios `X̄ = s̄/p̄`.
fn i_bar(x1: f64, x2: f64, xi: f64) -> f64 {
    x1 / xi + x2 / xi + x1 * x2 / (xi * xi)
}

/// One hop of the proposed surrogate: the UAV offset `d = x_r − q` from the
/// hop's ground node `q`, its power `p`, and the anchor values.
#[derive(Clone, Copy)]
struct PropHop {
    d: [f64; 3],
    p: f64,
    d_bar: [f64; 3],
    s_bar: f64,
    p_bar: f64,
}

struct PropTerms {
    lin1: f64,
    x: f64,
    q: f64,
}

impl PropHop {
    fn terms(&self) -> PropTerms {
        let dd = dot3(&self.d_bar, &self.d);
        let pb2 = self.p_bar * self.p_bar;
        let sb2 = self.s_bar * self.s_bar;
        PropTerms {
            lin1: 2.0 * dd / self.p_bar - self.s_bar * self.p / pb2,
            x: norm2_3(&self.d) / self.p,
            q: 4.0 * self.s_bar * dd / pb2 - 2.0 * sb2 * self.p / (pb2 * self.p_bar) - sb2 / pb2,
        }
    }
}

/// Proposed surrogate of one direction (natural log, before the `W/2`
/// factor). Returns `None` outside the domain.
fn prop_direction(h1: &PropHop, h2: &PropHop, i_bar: f64, xi: f64) -> Option<f64> {
    if !(h1.p > 0.0 && h2.p > 0.0) {
        return None;
    }
    let t1 = h1.terms();
    let t2 = h2.terms();
    let arg1 = 1.0 + t1.lin1 / xi;
    let arg2 = 1.0 + t2.lin1 / xi;
    if !(arg1 > LOG_DOMAIN_GUARD && arg2 > LOG_DOMAIN_GUARD) {
        return None;
    }
    let sum = t1.x + t2.x;
    let xi2 = xi * xi;
    Some(
        math::ln(arg1) + math::ln(arg2) - math::ln(i_bar) + 1.0
            - sum / (i_bar * xi)
            - sum * sum / (2.0 * i_bar * xi2)
            + (t1.q + t2.q) / (2.0 * i_bar * xi2),
    )
}

/// Gradient of [`prop_direction`] with respect to the UAV position (3D)
/// and both hop powers. Assumes the point is inside the domain.
fn prop_direction_grad(h1: &PropHop, h2: &PropHop, i_bar: f64, xi: f64) -> ([f64; 3], f64, f64) {
    let t1 = h1.terms();
    let t2 = h2.terms();
    let sum = t1.x + t2.x;
    let xi2 = xi * xi;
    let dr_dx = -1.0 / (i_bar * xi) - sum / (i_bar * xi2);
    let dr_dq = 1.0 / (2.0 * i_bar * xi2);
    let mut gx = [0.0; 3];
    let mut gp = [0.0; 2];
    for (j, (h, t)) in [(h1, &t1), (h2, &t2)].into_iter().enumerate() {
        let dl = 1.0 / (xi + t.lin1);
        let pb2 = h.p_bar * h.p_bar;
        for c in 0..3 {
            gx[c] += dl * 2.0 * h.d_bar[c] / h.p_bar
                + dr_dx * 2.0 * h.d[c] / h.p
                + dr_dq * 4.0 * h.s_bar * h.d_bar[c] / pb2;
        }
        gp[j] = -dl * h.s_bar / pb2 - dr_dx * norm2_3(&h.d) / (h.p * h.p)
            - dr_dq * 2.0 * h.s_bar * h.s_bar / (pb2 * h.p_bar);
    }
    (gx, gp[0], gp[1])
}

/// Flat-layout view used by the evaluators.
struct Flat<'a> {
    v: &'a [f64],
    k: usize,
}

impl Flat<'_> {
    fn x_r(&self, h: f64) -> [f64; 3] {
        [self.v[0], self.v[1], h]
    }
    fn ru(&self, i: usize) -> f64 {
        self.v[2 + i]
    }
    fn rd(&self, i: usize) -> f64 {
        self.v[2 + self.k + i]
    }
    fn b(&self, i: usize) -> f64 {
        self.v[2 + 2 * self.k + i]
    }
}

fn check_len(v: &[f64], ctx: &SurrogateContext) -> Result<usize> {
    let k = ctx.num_ues();
    if v.len() != 2 + 3 * k {
        return Err(Error::DimensionMismatch { expected: 2 + 3 * k, found: v.len() });
    }
    Ok(k)
}

fn prop_hops(
    i: usize,
    y: &Flat<'_>,
    x: &[f64; 3],
    ctx: &SurrogateContext,
    s: &Scenario,
) -> [PropHop; 4] {
    let a = &ctx.anchor;
    let d_rb = sub3(x, &s.bs_position);
    let d_kr = sub3(x, &s.ue_positions[i]);
    let rb = |p, p_bar| PropHop { d: d_rb, p, d_bar: ctx.d_bar_rb, s_bar: ctx.s_bar_rb, p_bar };
    let kr = |p, p_bar| PropHop { d: d_kr, p, d_bar: ctx.d_bar_kr[i], s_bar: ctx.s_bar_kr[i], p_bar };
    let p_u = s.p_ue_max_w[i];
    [
        // downlink: BS -> UAV, UAV -> UE
        rb(y.b(i), a.p_b[i]),
        kr(y.rd(i), a.p_r_d[i]),
        // uplink: UE -> UAV at fixed power, UAV -> BS
        kr(p_u, p_u),
        rb(y.ru(i), a.p_r_u[i]),
    ]
}

/// Proposed surrogate on a flat vector; `−∞` outside the domain.
pub fn eval_proposed_flat(v: &[f64], ctx: &SurrogateContext, s: &Scenario, lp: &LinkParams) -> f64 {
    let k = ctx.num_ues();
    let y = Flat { v, k };
    let x = y.x_r(s.altitude_h);
    let mut total = 0.0;
    for i in 0..k {
        let [b, rd, u, ru] = prop_hops(i, &y, &x, ctx, s);
        match (
            prop_direction(&b, &rd, ctx.i_bar_d[i], lp.xi),
            prop_direction(&u, &ru, ctx.i_bar_u[i], lp.xi),
        ) {
            (Some(dn), Some(up)) => total += dn + up,
            _ => return f64::NEG_INFINITY,
        }
    }
    lp.rate_scale(s) * total
}

/// Gradient of [`eval_proposed_flat`] written into `out`. Returns `false`
/// (leaving `out` unspecified) when `v` is outside the domain.
pub fn grad_proposed_flat(
    v: &[f64],
    ctx: &SurrogateContext,
    s: &Scenario,
    lp: &LinkParams,
    out: &mut [f64],
) -> bool {
    let k = ctx.num_ues();
    let y = Flat { v, k };
    let x = y.x_r(s.altitude_h);
    let scale = lp.rate_scale(s);
    out.iter_mut().for_each(|g| *g = 0.0);
    for i in 0..k {
        let [b, rd, u, ru] = prop_hops(i, &y, &x, ctx, s);
        if prop_direction(&b, &rd, ctx.i_bar_d[i], lp.xi).is_none()
            || prop_direction(&u, &ru, ctx.i_bar_u[i], lp.xi).is_none()
        {
            return false;
        }
        let (gd, g_b, g_rd) = prop_direction_grad(&b, &rd, ctx.i_bar_d[i], lp.xi);
        let (gu, _, g_ru) = prop_direction_grad(&u, &ru, ctx.i_bar_u[i], lp.xi);
        out[0] += scale * (gd[0] + gu[0]);
        out[1] += scale * (gd[1] + gu[1]);
        out[2 + i] = scale * g_ru;
        out[2 + k + i] = scale * g_rd;
        out[2 + 2 * k + i] = scale * g_b;
    }
    true
}

/// Baseline hop in amplitude form: UAV position `x`, amplitude `a`, hop
/// ground node `q`, and the anchor values.
#[derive(Clone, Copy)]
struct BaseHop {
    d: [f64; 3],
    a: f64,
    a_bar: f64,
    d_bar: [f64; 3],
    s_bar: f64,
    /// `‖q‖² − ‖x̄‖² + 2(x̄ − q)ᵀx`, the linearization of `‖x − q‖²` at `x̄`.
    lin: f64,
}

impl BaseHop {
    fn new(x: &[f64; 3], q: &[f64; 3], a: f64, a_bar: f64, d_bar: [f64; 3], s_bar: f64) -> BaseHop {
        let d = sub3(x, q);
        let dx = [d[0] - d_bar[0], d[1] - d_bar[1], d[2] - d_bar[2]];
        BaseHop { d, a, a_bar, d_bar, s_bar, lin: s_bar + 2.0 * dot3(&d_bar, &dx) }
    }

    fn log_arg(&self, xi: f64) -> f64 {
        let sb = self.s_bar;
        1.0 + xi * (2.0 * self.a_bar * self.a / sb - self.a_bar * self.a_bar * norm2_3(&self.d) / (sb * sb))
    }
}

fn base_direction(h1: &BaseHop, h2: &BaseHop, j_bar: f64, xi: f64) -> Option<f64> {
    let (g1, g2) = (h1.log_arg(xi), h2.log_arg(xi));
    if !(g1 > LOG_DOMAIN_GUARD
        && g2 > LOG_DOMAIN_GUARD
        && h1.lin > LOG_DOMAIN_GUARD
        && h2.lin > LOG_DOMAIN_GUARD)
    {
        return None;
    }
    let t = h1.a * h1.a / h1.lin + h2.a * h2.a / h2.lin;
    Some(
        math::ln(g1) + math::ln(g2) - math::ln_1p(j_bar) + j_bar / (1.0 + j_bar)
            - xi / (1.0 + j_bar) * t,
    )
}

/// Gradient of [`base_direction`] in `(x, a₁, a₂)`.
fn base_direction_grad(h1: &BaseHop, h2: &BaseHop, j_bar: f64, xi: f64) -> ([f64; 3], f64, f64) {
    let coef = xi / (1.0 + j_bar);
    let mut gx = [0.0; 3];
    let mut ga = [0.0; 2];
    for (j, h) in [h1, h2].into_iter().enumerate() {
        let arg = h.log_arg(xi);
        let sb = h.s_bar;
        let dl_dd = -xi * h.a_bar * h.a_bar / (sb * sb) / arg;
        let dt_dx = -h.a * h.a / (h.lin * h.lin);
        for c in 0..3 {
            gx[c] += dl_dd * 2.0 * h.d[c] - coef * dt_dx * 2.0 * h.d_bar[c];
        }
        ga[j] = 2.0 * xi * h.a_bar / sb / arg - coef * 2.0 * h.a / h.lin;
    }
    (gx, ga[0], ga[1])
}

fn base_hops(
    i: usize,
    y: &Flat<'_>,
    x: &[f64; 3],
    ctx: &SurrogateContext,
    s: &Scenario,
) -> [BaseHop; 4] {
    let b = &s.bs_position;
    let u = &s.ue_positions[i];
    let rb = |a, a_bar| BaseHop::new(x, b, a, a_bar, ctx.d_bar_rb, ctx.s_bar_rb);
    let kr = |a, a_bar| BaseHop::new(x, u, a, a_bar, ctx.d_bar_kr[i], ctx.s_bar_kr[i]);
    let a_u = math::sqrt(s.p_ue_max_w[i]);
    [
        kr(y.rd(i), ctx.a_bar_rd[i]),
        rb(y.b(i), ctx.a_bar_b[i]),
        rb(y.ru(i), ctx.a_bar_ru[i]),
        kr(a_u, a_u),
    ]
}

/// Baseline surrogate on a flat vector of amplitudes
/// `[x, y, a_r^U.., a_r^D.., a_b..]`; `−∞` outside the domain.
pub fn eval_baseline_amplitude(
    v: &[f64],
    ctx: &SurrogateContext,
    s: &Scenario,
    lp: &LinkParams,
) -> f64 {
    let k = ctx.num_ues();
    let y = Flat { v, k };
    let x = y.x_r(s.altitude_h);
    let mut total = 0.0;
    for i in 0..k {
        let [rd, b, ru, u] = base_hops(i, &y, &x, ctx, s);
        match (
            base_direction(&rd, &b, ctx.j_bar_d[i], lp.xi),
            base_direction(&ru, &u, ctx.j_bar_u[i], lp.xi),
        ) {
            (Some(dn), Some(up)) => total += dn + up,
            _ => return f64::NEG_INFINITY,
        }
    }
    lp.rate_scale(s) * total
}

/// Gradient of [`eval_baseline_amplitude`] in amplitude coordinates.
pub fn grad_baseline_amplitude(
    v: &[f64],
    ctx: &SurrogateContext,
    s: &Scenario,
    lp: &LinkParams,
    out: &mut [f64],
) -> bool {
    let k = ctx.num_ues();
    let y = Flat { v, k };
    let x = y.x_r(s.altitude_h);
    let scale = lp.rate_scale(s);
    out.iter_mut().for_each(|g| *g = 0.0);
    for i in 0..k {
        let [rd, b, ru, u] = base_hops(i, &y, &x, ctx, s);
        if base_direction(&rd, &b, ctx.j_bar_d[i], lp.xi).is_none()
            || base_direction(&ru, &u, ctx.j_bar_u[i], lp.xi).is_none()
        {
            return false;
        }
        let (gd, g_rd, g_b) = base_direction_grad(&rd, &b, ctx.j_bar_d[i], lp.xi);
        let (gu, g_ru, _) = base_direction_grad(&ru, &u, ctx.j_bar_u[i], lp.xi);
        out[0] += scale * (gd[0] + gu[0]);
        out[1] += scale * (gd[1] + gu[1]);
        out[2 + i] = scale * g_ru;
        out[2 + k + i] = scale * g_rd;
        out[2 + 2 * k + i] = scale * g_b;
    }
    true
}

/// Map a flat power vector to amplitudes; `None` if a power is negative.
pub fn powers_to_amplitudes(v: &[f64]) -> Option<Vec<f64>> {
    let mut a = v.to_vec();
    for p in &mut a[2..] {
        if *p < 0.0 {
            return None;
        }
        *p = math::sqrt(*p);
    }
    Some(a)
}

pub fn amplitudes_to_powers(a: &[f64]) -> Vec<f64> {
    let mut v = a.to_vec();
    v[2..].iter_mut().for_each(|x| *x *= *x);
    v
}

/// Baseline surrogate on a flat power vector.
pub fn eval_baseline_flat(v: &[f64], ctx: &SurrogateContext, s: &Scenario, lp: &LinkParams) -> f64 {
    match powers_to_amplitudes(v) {
        Some(a) => eval_baseline_amplitude(&a, ctx, s, lp),
        None => f64::NEG_INFINITY,
    }
}

/// Baseline gradient in power coordinates. Requires strictly positive powers.
pub fn grad_baseline_flat(
    v: &[f64],
    ctx: &SurrogateContext,
    s: &Scenario,
    lp: &LinkParams,
    out: &mut [f64],
) -> bool {
    if v[2..].iter().any(|p| !(*p > 0.0)) {
        return false;
    }
    let a = powers_to_amplitudes(v).expect("positive powers");
    if !grad_baseline_amplitude(&a, ctx, s, lp, out) {
        return false;
    }
    for j in 2..v.len() {
        out[j] /= 2.0 * a[j];
    }
    true
}

pub fn eval_flat(
    kind: SurrogateKind,
    v: &[f64],
    ctx: &SurrogateContext,
    s: &Scenario,
    lp: &LinkParams,
) -> f64 {
    match kind {
        SurrogateKind::Proposed => eval_proposed_flat(v, ctx, s, lp),
        SurrogateKind::Baseline => eval_baseline_flat(v, ctx, s, lp),
    }
}

pub fn grad_flat(
    kind: SurrogateKind,
    v: &[f64],
    ctx: &SurrogateContext,
    s: &Scenario,
    lp: &LinkParams,
    out: &mut [f64],
) -> bool {
    match kind {
        SurrogateKind::Proposed => grad_proposed_flat(v, ctx, s, lp, out),
        SurrogateKind::Baseline => grad_baseline_flat(v, ctx, s, lp, out),
    }
}

pub fn eval_proposed(y: &Decision, ctx: &SurrogateContext, s: &Scenario, lp: &LinkParams) -> SurrogateValue {
    SurrogateValue::from_raw(eval_proposed_flat(&y.to_flat(), ctx, s, lp))
}

pub fn eval_baseline(y: &Decision, ctx: &SurrogateContext, s: &Scenario, lp: &LinkParams) -> SurrogateValue {
    SurrogateValue::from_raw(eval_baseline_flat(&y.to_flat(), ctx, s, lp))
}

/// Gradient of `R̄` over `(x, y, p_r^U, p_r^D, p_b)`.
pub fn grad_proposed(y: &Decision, ctx: &SurrogateContext, s: &Scenario, lp: &LinkParams) -> Result<Vec<f64>> {
    let v = y.to_flat();
    check_len(&v, ctx)?;
    let mut g = vec![0.0; v.len()];
    if grad_proposed_flat(&v, ctx, s, lp, &mut g) {
        Ok(g)
    } else {
        Err(Error::OutOfDomain)
    }
}

/// Gradient of `R̂` over `(x, y, p_r^U, p_r^D, p_b)`.
pub fn grad_baseline(y: &Decision, ctx: &SurrogateContext, s: &Scenario, lp: &LinkParams) -> Result<Vec<f64>> {
    let v = y.to_flat();
    check_len(&v, ctx)?;
    let mut g = vec![0.0; v.len()];
    if grad_baseline_flat(&v, ctx, s, lp, &mut g) {
        Ok(g)
    } else {
        Err(Error::OutOfDomain)
    }
}

/// Spectral radius of the 2×2 position Hessian at the anchor, powers held
/// at their anchor values, for `(R̄, R̂)`. Hessians come from central
/// differences of the analytic gradients.
pub fn curvature_report(ctx: &SurrogateContext, s: &Scenario, lp: &LinkParams) -> Result<(f64, f64)> {
    let min_dist = ctx.s_bar_kr.iter().fold(ctx.s_bar_rb, |m, v| m.min(*v));
    let step = 1e-3 * math::sqrt(min_dist);
    let base = ctx.anchor.to_flat();
    let radius = |kind: SurrogateKind| -> Result<f64> {
        let mut h = [[0.0; 2]; 2];
        let mut gp = vec![0.0; base.len()];
        let mut gm = vec![0.0; base.len()];
        for c in 0..2 {
            let mut vp = base.clone();
            let mut vm = base.clone();
            vp[c] += step;
            vm[c] -= step;
            if !grad_flat(kind, &vp, ctx, s, lp, &mut gp) || !grad_flat(kind, &vm, ctx, s, lp, &mut gm) {
                return Err(Error::OutOfDomain);
            }
            h[0][c] = (gp[0] - gm[0]) / (2.0 * step);
            h[1][c] = (gp[1] - gm[1]) / (2.0 * step);
        }
        Ok(spectral_radius_sym2(h[0][0], 0.5 * (h[0][1] + h[1][0]), h[1][1]))
    };
    Ok((radius(SurrogateKind::Proposed)?, radius(SurrogateKind::Baseline)?))
}

/// Largest absolute eigenvalue of `[[a, b], [b, c]]`.
fn spectral_radius_sym2(a: f64, b: f64, c: f64) -> f64 {
    let mean = 0.5 * (a + c);
    let r = math::sqrt(0.25 * (a - c) * (a - c) + b * b);
    math::abs(mean + r).max(math::abs(mean - r))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{link_params, sum_rate, Scenario};

    fn scenario() -> Scenario {
        Scenario::with_defaults(&[[100.0, 200.0], [800.0, 900.0], [400.0, 50.0]], [6400.0, 300.0])
    }

    fn anchor(s: &Scenario, lp: &LinkParams) -> Decision {
        let mut d = Decision::uniform([3200.0, 450.0, 100.0], s, lp);
        d.p_r_u[0] *= 0.5;
        d.p_b[2] *= 0.7;
        d
    }

    #[test]
    fn tight_at_anchor() {
        let s = scenario();
        let lp = link_params(&s);
        let a = anchor(&s, &lp);
        let ctx = make_context(&a, &s, &lp).unwrap();
        let r = sum_rate(&a, &s, &lp);
        for v in [eval_proposed(&a, &ctx, &s, &lp), eval_baseline(&a, &ctx, &s, &lp)] {
            assert!(v.in_domain);
            assert!((v.value - r).abs() <= 1e-9 * r, "{} vs {}", v.value, r);
        }
    }

    #[test]
    fn i_bar_matches_direct_formula() {
        let s = scenario();
        let lp = link_params(&s);
        let a = Decision::uniform(crate::model::geometry_center(&s), &s, &lp);
        let ctx = make_context(&a, &s, &lp).unwrap();
        let srb = norm2_3(&sub3(&a.x_r, &s.bs_position));
        let skr = norm2_3(&sub3(&a.x_r, &s.ue_positions[1]));
        let direct = srb / (lp.xi * a.p_b[1])
            + skr / (lp.xi * a.p_r_d[1])
            + srb * skr / (lp.xi * lp.xi * a.p_b[1] * a.p_r_d[1]);
        assert!((ctx.i_bar_d[1] / direct - 1.0).abs() < 1e-14);
    }

    #[test]
    fn floored_anchor_is_valid() {
        let mut s = scenario();
        s.gamma_c_linear = 0.0;
        let lp = link_params(&s);
        let mut a = anchor(&s, &lp);
        a.p_r_u.iter_mut().chain(a.p_r_d.iter_mut()).for_each(|p| *p = 0.0);
        let ctx = make_context(&a, &s, &lp).unwrap();
        assert!(ctx.i_bar_u.iter().chain(&ctx.i_bar_d).all(|v| v.is_finite() && *v > 0.0));
    }

    #[test]
    fn over_budget_anchor_rejected() {
        let s = scenario();
        let lp = link_params(&s);
        let mut a = crate::model::fill_budgets(&anchor(&s, &lp), &s, &lp);
        a.p_r_u.iter_mut().chain(a.p_r_d.iter_mut()).for_each(|p| *p *= 1.1);
        assert!(matches!(make_context(&a, &s, &lp), Err(Error::Infeasible { .. })));
    }

    #[test]
    fn far_point_hits_sentinel() {
        let s = scenario();
        let lp = link_params(&s);
        let a = anchor(&s, &lp);
        let ctx = make_context(&a, &s, &lp).unwrap();
        let mut y = a.clone();
        y.x_r[0] = -1.0e6;
        let v = eval_proposed(&y, &ctx, &s, &lp);
        assert!(!v.in_domain && v.value == f64::NEG_INFINITY);
        assert!(grad_proposed(&y, &ctx, &s, &lp).is_err());
        let v = eval_baseline(&y, &ctx, &s, &lp);
        assert!(!v.in_domain && v.value == f64::NEG_INFINITY);
    }

    #[test]
    fn symmetric_point_has_zero_x_gradient() {
        let mut s = Scenario::with_defaults(&[[0.0, 0.0]], [2000.0, 0.0]);
        s.gamma_c_linear = 0.0;
        s.p_bs_max_w = s.p_ue_max_w[0];
        let lp = link_params(&s);
        let p_half = s.p_uav_max_w / 2.0;
        let a = Decision {
            x_r: [1000.0, 0.0, 100.0],
            p_r_u: vec![p_half],
            p_r_d: vec![p_half],
            p_b: vec![s.p_bs_max_w],
        };
        let ctx = make_context(&a, &s, &lp).unwrap();
        let rate_scale = sum_rate(&a, &s, &lp);
        for g in [grad_proposed(&a, &ctx, &s, &lp).unwrap(), grad_baseline(&a, &ctx, &s, &lp).unwrap()] {
            assert!(g[0].abs() < 1e-12 * rate_scale, "{}", g[0]);
            assert!(g[1].abs() < 1e-12 * rate_scale);
        }
    }

    #[test]
    fn sym2_radius() {
        assert_eq!(spectral_radius_sym2(-3.0, 0.0, 1.0), 3.0);
        assert!((spectral_radius_sym2(2.0, 1.0, 2.0) - 3.0).abs() < 1e-15);
    }
}
