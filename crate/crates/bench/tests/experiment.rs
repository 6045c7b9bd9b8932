use jppc_bench::experiment::*;

#[test]
fn same_seed_gives_the_same_scenario() {
    let spec = ExperimentSpec { seed: 99, k: 7, ..ExperimentSpec::default() };
    assert_eq!(generate_scenario(&spec).unwrap(), generate_scenario(&spec).unwrap());
    let other = ExperimentSpec { seed: 100, ..spec.clone() };
    assert_ne!(generate_scenario(&spec).unwrap(), generate_scenario(&other).unwrap());
    assert_ne!(generate_scenario_k(&spec, 7, 0), generate_scenario_k(&spec, 7, 1));
}

#[test]
fn default_regions_hold_all_nodes() {
    for trial in 0..20 {
        let s = generate_scenario_k(&ExperimentSpec::default(), 16, trial);
        assert_eq!(s.num_ues(), 16);
        for u in &s.ue_positions {
            assert!((0.0..=1000.0).contains(&u[0]) && (0.0..=1000.0).contains(&u[1]) && u[2] == 0.0);
        }
        let b = s.bs_position;
        assert!((6000.0..=7000.0).contains(&b[0]) && (0.0..=1000.0).contains(&b[1]));
        assert_eq!(s.altitude_h, 100.0);
    }
}

#[test]
fn budgets_follow_the_spec() {
    let spec = ExperimentSpec { p_bs_dbm: 40.0, p_uav_dbm: 30.0, gamma_c_db: 10.0, ..ExperimentSpec::default() };
    let s = generate_scenario(&spec).unwrap();
    assert!((s.p_bs_max_w - 10.0).abs() < 1e-12);
    assert!((s.p_uav_max_w - 1.0).abs() < 1e-12);
    assert!((s.gamma_c_linear - 10.0).abs() < 1e-12);
}

#[test]
fn malformed_specs_are_rejected() {
    let bad = ExperimentSpec { ue_region: [10.0, 0.0, 0.0, 1.0], ..ExperimentSpec::default() };
    assert!(bad.validate().is_err());
    assert!(generate_scenario(&bad).is_err());
    assert!(ExperimentSpec { bs_region: [0.0, 1.0, 5.0, 1.0], ..ExperimentSpec::default() }.validate().is_err());
    assert!(ExperimentSpec { k: 0, ..ExperimentSpec::default() }.validate().is_err());
    assert!(ExperimentSpec { trials: 0, ..ExperimentSpec::default() }.validate().is_err());
    let empty = Sweep { variable: SweepVariable::PBs, values: vec![] };
    assert!(ExperimentSpec { sweep: Some(empty), ..ExperimentSpec::default() }.validate().is_err());
}

#[test]
fn spec_json_defaults_and_names() {
    let spec: ExperimentSpec = serde_json::from_str(
        r#"{"seed": 3, "k": 5, "solver": "sca", "surrogate": "baseline",
            "sweep": {"variable": "p_uav", "values": [30, 36]},
            "baselines": ["jppc", "above-bs-uni-pw"]}"#,
    )
    .unwrap();
    assert_eq!(spec.solver, SolverChoice::Sca);
    assert_eq!(spec.trials, 70);
    assert_eq!(spec.k_values, vec![5, 10, 16]);
    assert_eq!(spec.sweep.unwrap().variable, SweepVariable::PUav);
    assert!(serde_json::from_str::<ExperimentSpec>(r#"{"kk": 3}"#).is_err());
}
