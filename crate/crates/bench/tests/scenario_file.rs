use jppc_bench::scenario_file::{PerUe, ScenarioFile};
use jppc_bench::{parse_scenario, read_scenario, write_scenario};
use jppc_core::model::dbm_to_w;
use jppc_core::Scenario;

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

#[test]
fn file_round_trip_preserves_the_scenario() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.json");
    let mut s = Scenario::with_defaults(&[[10.0, 20.0], [300.5, 999.0], [0.0, 0.0]], [6543.0, 210.0]);
    s.p_ue_max_w[1] = dbm_to_w(20.0);
    s.gamma_c_linear = 10.0;
    write_scenario(&s, &path).unwrap();
    let back = read_scenario(&path).unwrap();
    assert_eq!(back.ue_positions, s.ue_positions);
    assert_eq!(back.bs_position, s.bs_position);
    for (a, b) in back.p_ue_max_w.iter().zip(&s.p_ue_max_w) {
        assert!(rel(*a, *b) < 1e-12);
    }
    for (a, b) in [
        (back.p_uav_max_w, s.p_uav_max_w),
        (back.p_bs_max_w, s.p_bs_max_w),
        (back.gamma_c_linear, s.gamma_c_linear),
        (back.beta_ref_gain, s.beta_ref_gain),
    ] {
        assert!(rel(a, b) < 1e-12);
    }
}

#[test]
fn equal_ue_budgets_are_written_as_a_scalar() {
    let s = Scenario::with_defaults(&[[0.0, 0.0], [1.0, 1.0]], [6000.0, 0.0]);
    assert_eq!(ScenarioFile::from_scenario(&s).p_ue_dbm, PerUe::Scalar(23.0));
}

#[test]
fn all_keys_are_read() {
    let s = parse_scenario(
        r#"{
            "ue_positions": [[1, 2], [3, 4]],
            "bs_position": [6000, 500],
            "altitude_m": 150,
            "beta_db": -30,
            "noise_psd_dbm_hz": -170,
            "bandwidth_hz": 2e6,
            "p_ue_dbm": [20, 30],
            "p_uav_dbm": 30,
            "p_bs_dbm": 40,
            "gamma_c_db": 10
        }"#,
    )
    .unwrap();
    assert_eq!(s.altitude_h, 150.0);
    assert!(rel(s.beta_ref_gain, 1e-3) < 1e-12);
    assert_eq!(s.noise_psd_dbm_hz, -170.0);
    assert_eq!(s.bandwidth_w_hz, 2e6);
    assert!(rel(s.p_ue_max_w[0], 0.1) < 1e-12 && rel(s.p_ue_max_w[1], 1.0) < 1e-12);
    assert!(rel(s.p_uav_max_w, 1.0) < 1e-12);
    assert!(rel(s.p_bs_max_w, 10.0) < 1e-12);
    assert!(rel(s.gamma_c_linear, 10.0) < 1e-12);
}

#[test]
fn invalid_scenarios_are_rejected() {
    assert!(parse_scenario(r#"{"ue_positions": [], "bs_position": [0, 0]}"#).is_err());
    assert!(parse_scenario(r#"{"ue_positions": [[0, 0]], "bs_position": [0, 0], "altitude_m": -1}"#).is_err());
    assert!(parse_scenario(r#"{"ue_positions": [[0, 0]]}"#).is_err());
    assert!(parse_scenario("not json").is_err());
}
