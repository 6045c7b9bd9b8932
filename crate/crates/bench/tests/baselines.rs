use jppc_bench::*;
use jppc_core::agp::{solve_agp, AgpOptions};
use jppc_core::sca::solve_sca;
use jppc_core::*;

fn scen(trial: u64, k: usize) -> Scenario {
    generate_scenario_k(&ExperimentSpec { seed: 5, ..ExperimentSpec::default() }, k, trial)
}

fn agp() -> RunOptions {
    RunOptions::new(SolverChoice::Agp, SurrogateKind::Proposed)
}

#[test]
fn above_bs_hovers_over_the_bs() {
    let s = scen(0, 4);
    let lp = link_params(&s);
    for kind in [BaselineKind::AboveBsUniPw, BaselineKind::AboveBsOptPw] {
        let r = run_baseline(kind, &s, &agp()).unwrap();
        let x = r.final_decision.x_r;
        assert_eq!(x, [s.bs_position[0], s.bs_position[1], s.altitude_h]);
        let pc = control_power(&x, &s, &lp);
        assert!((pc - lp.control_coeff(&s) * s.altitude_h * s.altitude_h).abs() <= 1e-15);
        assert!(is_feasible(&r.final_decision, &s, &lp, 1e-6).feasible);
    }
}

#[test]
fn uniform_power_is_the_even_split() {
    let s = scen(1, 3);
    let lp = link_params(&s);
    let r = run_baseline(BaselineKind::GeoCenterUniPw, &s, &agp()).unwrap();
    let d = &r.final_decision;
    assert_eq!(d.x_r, geometry_center(&s));
    let pc = control_power(&d.x_r, &s, &lp);
    assert!(d.p_r_u.iter().chain(&d.p_r_d).all(|p| (p - (s.p_uav_max_w - pc) / 6.0).abs() < 1e-12));
    assert!(d.p_b.iter().all(|p| (p - (s.p_bs_max_w - pc) / 3.0).abs() < 1e-12));
    assert_eq!(r.outer_iterations(), 0);
}

#[test]
fn optimized_power_beats_uniform_and_joint_beats_fixed() {
    for trial in 0..8 {
        let s = scen(10 + trial, 16);
        let rate = |k| run_baseline(k, &s, &agp()).unwrap().final_rate();
        let (jppc, geo_opt, geo_uni) = (rate(BaselineKind::Jppc), rate(BaselineKind::GeoCenterOptPw), rate(BaselineKind::GeoCenterUniPw));
        let (bs_opt, bs_uni) = (rate(BaselineKind::AboveBsOptPw), rate(BaselineKind::AboveBsUniPw));
        assert!(geo_opt >= geo_uni, "{geo_opt} < {geo_uni}");
        assert!(bs_opt >= bs_uni, "{bs_opt} < {bs_uni}");
        assert!(jppc >= geo_opt * (1.0 - 1e-3), "{jppc} < {geo_opt}");
    }
}

#[test]
fn unreachable_pinned_position_is_infeasible() {
    let mut s = scen(2, 2);
    s.gamma_c_linear = 1e10;
    for kind in BaselineKind::ALL {
        let r = run_baseline(kind, &s, &agp()).unwrap();
        assert_eq!(r.status, Status::InfeasibleInput, "{kind}");
    }
}

#[test]
fn joint_solver_choice_is_honored() {
    let s = scen(3, 1);
    let one = run_baseline(BaselineKind::Jppc, &s, &RunOptions::new(SolverChoice::SingleUe, SurrogateKind::Proposed)).unwrap();
    assert_eq!(one.inner_counts.len(), 2);
    let sca = run_baseline(BaselineKind::Jppc, &s, &RunOptions::new(SolverChoice::Sca, SurrogateKind::Baseline)).unwrap();
    assert!(sca.wall_time_s > 0.0);
    assert!((one.final_rate() - sca.final_rate()).abs() <= 5e-3 * one.final_rate());
    assert!(run_baseline(BaselineKind::Jppc, &scen(3, 2), &RunOptions::new(SolverChoice::SingleUe, SurrogateKind::Proposed)).is_err());
}

#[test]
fn cold_started_agp_can_cycle_between_two_points() {
    // With zero-initialized duals and the default inner tolerance the
    // projections are inexact enough for the extrapolated iterates to lock
    // into a two-point cycle here. The cap ends it and both points are
    // close to the SCA solution; warm-started duals converge.
    let mut s = generate_scenario_k(&ExperimentSpec { seed: 7, ..ExperimentSpec::default() }, 16, 16);
    SweepVariable::PBs.apply(&mut s, 36.0);
    let lp = link_params(&s);
    let init = Decision::uniform(geometry_center(&s), &s, &lp);
    let cold = solve_agp(&s, &init, &AgpOptions::default()).unwrap();
    assert_eq!(cold.status, Status::IterationLimit);
    let n = cold.iterates.len();
    let tail: Vec<f64> = cold.iterates[n - 7..n - 1].iter().map(|it| it.sum_rate).collect();
    assert!((tail[0] - tail[2]).abs() < 1e-3 * (tail[0] - tail[1]).abs());
    let sca = solve_sca(&s, &init, &Default::default()).unwrap().final_rate();
    assert!((cold.final_rate() - sca).abs() <= 1e-3 * sca);
    assert!(is_feasible(&cold.final_decision, &s, &lp, 1e-6).feasible);
    let warm = solve_agp(&s, &init, &AgpOptions { warm_start_duals: true, ..AgpOptions::default() }).unwrap();
    assert_eq!(warm.status, Status::Converged);
}
