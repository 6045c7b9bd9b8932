#![allow(dead_code)]

use jppc_core::{control_power, link_params, Decision, Scenario};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// UEs uniform in [0, 1000]², BS uniform in [6000, 7000] × [0, 1000].
pub fn scenario(r: &mut ChaCha8Rng, k: usize) -> Scenario {
    let ues: Vec<[f64; 2]> = (0..k).map(|_| [r.gen_range(0.0..1000.0), r.gen_range(0.0..1000.0)]).collect();
    let bs = [r.gen_range(6000.0..7000.0), r.gen_range(0.0..1000.0)];
    Scenario::with_defaults(&ues, bs)
}

fn shares(r: &mut ChaCha8Rng, n: usize, total: f64) -> Vec<f64> {
    let w: Vec<f64> = (0..n).map(|_| r.gen_range(0.05..1.0)).collect();
    let sum: f64 = w.iter().sum();
    w.iter().map(|v| v / sum * total).collect()
}

/// Feasible decision with the position anywhere over the UE-BS bounding box
/// and a random fraction of each remaining budget spent.
pub fn feasible(r: &mut ChaCha8Rng, s: &Scenario) -> Decision {
    let lp = link_params(s);
    let k = s.num_ues();
    let x_r = [r.gen_range(0.0..7000.0), r.gen_range(0.0..1000.0), s.altitude_h];
    let pc = control_power(&x_r, s, &lp);
    let fr: f64 = r.gen_range(0.3..1.0);
    let fb: f64 = r.gen_range(0.3..1.0);
    let pr = shares(r, 2 * k, fr * (s.p_uav_max_w - pc));
    let pb = shares(r, k, fb * (s.p_bs_max_w - pc));
    Decision { x_r, p_r_u: pr[..k].to_vec(), p_r_d: pr[k..].to_vec(), p_b: pb }
}

/// Feasible decision within `radius` meters and a factor of two in power of
/// `around`.
pub fn nearby(r: &mut ChaCha8Rng, s: &Scenario, around: &Decision, radius: f64) -> Decision {
    let lp = link_params(s);
    let mut d = around.clone();
    d.x_r[0] += r.gen_range(-radius..radius);
    d.x_r[1] += r.gen_range(-radius..radius);
    for p in d.p_r_u.iter_mut().chain(d.p_r_d.iter_mut()).chain(d.p_b.iter_mut()) {
        *p *= r.gen_range(0.5..2.0);
    }
    let pc = control_power(&d.x_r, s, &lp);
    let ur = d.uav_power() / (s.p_uav_max_w - pc);
    if ur > 1.0 {
        d.p_r_u.iter_mut().chain(d.p_r_d.iter_mut()).for_each(|p| *p /= ur);
    }
    let ub = d.bs_power() / (s.p_bs_max_w - pc);
    if ub > 1.0 {
        d.p_b.iter_mut().for_each(|p| *p /= ub);
    }
    d
}

/// Uplink SNR straight from the model formula with inverse squared distances.
pub fn snr_up_oracle(s: &Scenario, k: usize, x: &[f64; 3], p_r: f64) -> f64 {
    let lp = link_params(s);
    let dkr = dist2(x, &s.ue_positions[k]);
    let drb = dist2(x, &s.bs_position);
    let pu = s.p_ue_max_w[k];
    p_r * pu / dkr / drb * lp.xi / (p_r / drb + pu / dkr + 1.0 / lp.xi)
}

pub fn snr_down_oracle(s: &Scenario, k: usize, x: &[f64; 3], p_b: f64, p_r: f64) -> f64 {
    let lp = link_params(s);
    let dkr = dist2(x, &s.ue_positions[k]);
    let drb = dist2(x, &s.bs_position);
    p_r * p_b / dkr / drb * lp.xi / (p_r / dkr + p_b / drb + 1.0 / lp.xi)
}

pub fn rate_oracle(s: &Scenario, d: &Decision) -> f64 {
    let w = s.bandwidth_w_hz;
    (0..s.num_ues())
        .map(|k| {
            let up = snr_up_oracle(s, k, &d.x_r, d.p_r_u[k]);
            let dn = snr_down_oracle(s, k, &d.x_r, d.p_b[k], d.p_r_d[k]);
            w / 2.0 * ((1.0 + up).log2() + (1.0 + dn).log2())
        })
        .sum()
}

pub fn dist2(a: &[f64; 3], b: &[f64; 3]) -> f64 {
    (a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2) + (a[2] - b[2]).powi(2)
}

/// Central difference of `f` along coordinate `j` with step `h`.
pub fn central(f: impl Fn(&[f64]) -> f64, v: &[f64], j: usize, h: f64) -> f64 {
    let mut a = v.to_vec();
    let mut b = v.to_vec();
    a[j] += h;
    b[j] -= h;
    (f(&a) - f(&b)) / (2.0 * h)
}

/// Richardson-extrapolated central difference, fourth order in `h`.
pub fn richardson(f: impl Fn(&[f64]) -> f64, v: &[f64], j: usize, h: f64) -> f64 {
    let coarse = central(&f, v, j, h);
    let fine = central(&f, v, j, h / 2.0);
    (4.0 * fine - coarse) / 3.0
}

/// Euclidean projection onto the feasible set by nested bisection on the two
/// budget multipliers. For fixed `(λ, μ)` the minimizer is explicit:
/// `x = (v + σ c b)/(1 + σ c)` with `σ = λ + μ`, and each power is its
/// target clipped at zero after subtracting half its multiplier.
pub fn kkt_projection(v: &Decision, s: &Scenario) -> Decision {
    let lp = link_params(s);
    let c = lp.control_coeff(s);
    let b = s.bs_position;
    let h2 = s.altitude_h * s.altitude_h;
    let at = |lam: f64, mu: f64| -> (Decision, f64, f64) {
        let sc = (lam + mu) * c;
        let x = [(v.x_r[0] + sc * b[0]) / (1.0 + sc), (v.x_r[1] + sc * b[1]) / (1.0 + sc), s.altitude_h];
        let clip = |p: &[f64], m: f64| p.iter().map(|q| (q - 0.5 * m).max(0.0)).collect::<Vec<_>>();
        let d = Decision { x_r: x, p_r_u: clip(&v.p_r_u, lam), p_r_d: clip(&v.p_r_d, lam), p_b: clip(&v.p_b, mu) };
        let pc = c * ((x[0] - b[0]).powi(2) + (x[1] - b[1]).powi(2) + h2);
        (d.clone(), d.uav_power() + pc - s.p_uav_max_w, d.bs_power() + pc - s.p_bs_max_w)
    };
    // Smallest multiplier in [0, ∞) whose residual is nonpositive.
    let root = |f: &dyn Fn(f64) -> f64| -> f64 {
        if f(0.0) <= 0.0 {
            return 0.0;
        }
        let mut hi = 1.0;
        while f(hi) > 0.0 {
            hi *= 2.0;
        }
        let mut lo = 0.0;
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if f(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        hi
    };
    let mu_of = |lam: f64| root(&|mu: f64| at(lam, mu).2);
    let lam = root(&|lam: f64| at(lam, mu_of(lam)).1);
    at(lam, mu_of(lam)).0
}

pub fn flat_dist(a: &Decision, b: &Decision) -> f64 {
    a.to_flat().iter().zip(b.to_flat()).map(|(x, y)| (x - y) * (x - y)).sum::<f64>().sqrt()
}
