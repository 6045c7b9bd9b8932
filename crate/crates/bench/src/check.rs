//! Quick invariant suite run by `jppc check`.
//!
//! Each check draws its own scenarios from the experiment generator, so a
//! failing seed reproduces exactly.

use jppc_core::agp::{project_onto_y, solve_agp, AgpOptions};
use jppc_core::sca::{solve_sca, ScaOptions};
use jppc_core::single_ue::{solve_single_ue, SingleUeOptions};
use jppc_core::surrogate::{eval_baseline, eval_proposed, make_context};
use jppc_core::{geometry_center, is_feasible, link_params, sum_rate, Decision, Scenario, SolverReport, SurrogateKind};
use rand::Rng;
use serde::Serialize;

use crate::experiment::{generate_scenario_k, trial_rng, ExperimentSpec};

#[derive(Debug, Clone, Serialize)]
pub struct CheckOutcome {
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
}

fn outcome(name: &'static str, failures: Vec<String>, cases: usize) -> CheckOutcome {
    CheckOutcome {
        name,
        passed: failures.is_empty(),
        detail: match failures.first() {
            None => format!("{cases} cases"),
            Some(f) => format!("{} of {cases} failed; first: {f}", failures.len()),
        },
    }
}

fn start(s: &Scenario) -> Decision {
    Decision::uniform(geometry_center(s), s, &link_params(s))
}

/// Random feasible decision: any position in the bounding box of the nodes,
/// random shares of a random fraction of each remaining budget.
fn random_feasible(s: &Scenario, seed: u64, stream: u64) -> Decision {
    let mut r = trial_rng(seed ^ 0x5eed, stream);
    let lp = link_params(s);
    let x = geometry_center(s);
    let x_r = [x[0] + r.gen_range(-500.0..500.0), x[1] + r.gen_range(-500.0..500.0), s.altitude_h];
    let k = s.num_ues();
    let pc = jppc_core::control_power(&x_r, s, &lp);
    let mut shares = |n: usize, budget: f64| {
        let w: Vec<f64> = (0..n).map(|_| r.gen_range(0.05..1.0)).collect();
        let total: f64 = w.iter().sum();
        let frac = r.gen_range(0.3..1.0);
        w.into_iter().map(|v| frac * budget * v / total).collect::<Vec<_>>()
    };
    let uav = shares(2 * k, s.p_uav_max_w - pc);
    let p_b = shares(k, s.p_bs_max_w - pc);
    Decision { x_r, p_r_u: uav[..k].to_vec(), p_r_d: uav[k..].to_vec(), p_b }
}

fn budgets_active(rep: &SolverReport, s: &Scenario) -> Option<String> {
    let f = is_feasible(&rep.final_decision, s, &link_params(s), 1e-6);
    let tight = f.uav_violation_w.abs() <= 1e-6 * s.p_uav_max_w && f.bs_violation_w.abs() <= 1e-6 * s.p_bs_max_w;
    (!f.feasible || !tight).then(|| format!("budget residuals {:.3e} W, {:.3e} W", f.uav_violation_w, f.bs_violation_w))
}

/// Run every check on `trials` scenarios per check.
pub fn run_checks(seed: u64, trials: usize) -> Vec<CheckOutcome> {
    let spec = ExperimentSpec { seed, ..ExperimentSpec::default() };
    let ks = [1usize, 3, 5, 16];
    let scen = |t: usize| generate_scenario_k(&spec, ks[t % ks.len()], t as u64);
    let mut out = Vec::new();

    let mut fails = Vec::new();
    for t in 0..trials {
        let s = scen(t);
        let lp = link_params(&s);
        let a = random_feasible(&s, seed, 2 * t as u64);
        let y = random_feasible(&s, seed, 2 * t as u64 + 1);
        let Ok(ctx) = make_context(&a, &s, &lp) else {
            fails.push(format!("trial {t}: anchor rejected"));
            continue;
        };
        let (ra, ry) = (sum_rate(&a, &s, &lp), sum_rate(&y, &s, &lp));
        for (kind, at, away) in [
            (SurrogateKind::Proposed, eval_proposed(&a, &ctx, &s, &lp).value, eval_proposed(&y, &ctx, &s, &lp).value),
            (SurrogateKind::Baseline, eval_baseline(&a, &ctx, &s, &lp).value, eval_baseline(&y, &ctx, &s, &lp).value),
        ] {
            if (at - ra).abs() > 1e-9 * ra || away > ry * (1.0 + 1e-9) {
                fails.push(format!("trial {t} {kind:?}: anchor {at} vs {ra}, point {away} vs {ry}"));
            }
        }
    }
    out.push(outcome("surrogates are tight lower bounds", fails, trials));

    let mut fails = Vec::new();
    let mut agree = Vec::new();
    for t in 0..trials {
        let s = scen(t);
        let lp = link_params(&s);
        let sca = solve_sca(&s, &start(&s), &ScaOptions::default());
        let agp = solve_agp(&s, &start(&s), &AgpOptions::default());
        match (sca, agp) {
            (Ok(sca), Ok(agp)) => {
                if let Some(w) = sca.iterates.windows(2).find(|w| w[1].sum_rate < w[0].sum_rate - 1e-8) {
                    fails.push(format!("trial {t}: SCA rate fell at iteration {}", w[1].iteration));
                }
                for (name, rep) in [("SCA", &sca), ("AGP", &agp)] {
                    if !rep.iterates.iter().all(|it| is_feasible(&it.decision, &s, &lp, 1e-6).feasible) {
                        fails.push(format!("trial {t}: infeasible {name} iterate"));
                    }
                    if let Some(why) = budgets_active(rep, &s) {
                        fails.push(format!("trial {t} {name}: {why}"));
                    }
                }
                let (a, b) = (agp.final_rate(), sca.final_rate());
                if (a - b).abs() > 5e-3 * b {
                    agree.push(format!("trial {t}: AGP {a:.6e} vs SCA {b:.6e}"));
                }
            }
            (a, b) => fails.push(format!("trial {t}: {:?} / {:?}", a.err(), b.err())),
        }
    }
    out.push(outcome("solver iterates feasible, budgets active, SCA ascends", fails, trials));
    out.push(outcome("AGP and SCA agree within 0.5%", agree, trials));

    let mut fails = Vec::new();
    for t in 0..trials {
        let s = scen(t);
        let lp = link_params(&s);
        let mut v = random_feasible(&s, seed, 7 * t as u64);
        v.p_b.iter_mut().for_each(|p| *p *= 3.0);
        v.x_r[0] += 2000.0;
        let opts = AgpOptions { eps1: 1e-14, max_inner: 100_000, ..AgpOptions::default() };
        let p = project_onto_y(&v, &s, &lp, &opts).decision;
        let q = project_onto_y(&p, &s, &lp, &opts).decision;
        if !is_feasible(&p, &s, &lp, 1e-8).feasible || p.distance(&q) > 1e-9 {
            fails.push(format!("trial {t}: idempotence gap {:.3e}", p.distance(&q)));
        }
    }
    out.push(outcome("projection is feasible and idempotent", fails, trials));

    let mut fails = Vec::new();
    for t in 0..trials {
        let s = generate_scenario_k(&spec, 1, 1000 + t as u64);
        let one = solve_single_ue(&s, &SingleUeOptions::default());
        let agp = solve_agp(&s, &start(&s), &AgpOptions::default());
        match (one, agp) {
            (Ok(one), Ok(agp)) => {
                let (a, b) = (one.final_rate(), agp.final_rate());
                if b > a * (1.0 + 1e-6) || (a - b).abs() > 5e-3 * a {
                    fails.push(format!("trial {t}: single-UE {a:.6e} vs AGP {b:.6e}"));
                }
            }
            (a, b) => fails.push(format!("trial {t}: {:?} / {:?}", a.err(), b.err())),
        }
    }
    out.push(outcome("single-UE search agrees with AGP", fails, trials));
    out
}
