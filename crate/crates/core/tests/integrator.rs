use proptest::prelude::*;
use sublorentz::causal::lorentz_norm2;
use sublorentz::heisenberg::{self, HeisIvp};
use sublorentz::integrator::{
    conservation_report, integrate, integrate_controls, Controls, CovectorState, IntegrationConfig, Method,
};
use sublorentz::quaternion::{solve, QuatIvp};
use sublorentz::{GroupId, GroupPoint};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn heisenberg_matches_closed_form(v in prop::array::uniform2(-1.5..1.5f64), theta in -2.0..2.0f64) {
        let init = CovectorState::from_velocity(GroupId::HeisenbergL, &v, &[theta]).unwrap();
        let path = integrate(&init, &IntegrationConfig::default()).unwrap();
        let exact = heisenberg::sample_path(&HeisIvp::new(v, theta), 1.0, 101).unwrap();
        prop_assert!(path.max_deviation(&exact).unwrap() <= 1e-6);
        let rep = conservation_report(&path);
        prop_assert!(rep.h_relative_drift <= 1e-8);
        prop_assert_eq!(rep.theta_drift, 0.0);
    }

    #[test]
    fn quaternion_matches_closed_form(v in prop::array::uniform4(-1.5..1.5f64), theta in prop::array::uniform3(-1.5..1.5f64)) {
        let ivp = QuatIvp::new(v, theta);
        let path = integrate(&ivp.covector_state(), &IntegrationConfig::default()).unwrap();
        let exact = solve(&ivp).sample_path(1.0, 101).unwrap();
        prop_assert!(path.max_deviation(&exact).unwrap() <= 1e-6);
        let rep = conservation_report(&path);
        prop_assert!(rep.h_relative_drift <= 1e-8);
        prop_assert_eq!(rep.theta_drift, 0.0);
    }

    #[test]
    fn causal_class_is_constant(v in prop::array::uniform4(-1.5..1.5f64), theta in prop::array::uniform3(-1.5..1.5f64)) {
        let q0 = lorentz_norm2(&v);
        prop_assume!(q0.abs() > 1e-3);
        let ivp = QuatIvp::new(v, theta);
        let cfg = IntegrationConfig { method: Method::Rk45, ..Default::default() };
        let path = integrate(&ivp.covector_state(), &cfg).unwrap();
        for s in path.samples() {
            prop_assert!((s.speed2() - q0).abs() <= 1e-8);
            prop_assert_eq!(s.class.kind, path.first().class.kind);
        }
    }
}

#[test]
fn null_heisenberg_controls_stay_flat() {
    let c = Controls::constant(GroupId::HeisenbergL, 0.0, 1.0, &[1.0, 1.0]).unwrap();
    let curve = integrate_controls(&c, &IntegrationConfig::default()).unwrap();
    for p in curve.points() {
        assert_eq!(p.z()[0], 0.0);
        assert_eq!(p.x()[0], p.x()[1]);
    }
}

#[test]
fn x1_control_is_the_vertical_ray() {
    let c = Controls::constant(GroupId::QuaternionH, 0.0, 2.0, &[1.0, 0.0, 0.0, 0.0]).unwrap();
    let curve = integrate_controls(&c, &IntegrationConfig::default()).unwrap();
    assert!(curve.last().max_abs_diff(&GroupPoint::quaternion([2.0, 0.0, 0.0, 0.0], [0.0; 3])) <= 1e-12);
}

#[test]
fn config_round_trips_through_json() {
    let cfg: IntegrationConfig = serde_json::from_str(r#"{"method": "rk45", "tol": 1e-9}"#).unwrap();
    assert_eq!(cfg.method, Method::Rk45);
    assert_eq!(cfg.steps, 1000);
    assert!(serde_json::from_str::<IntegrationConfig>(r#"{"stepz": 3}"#).is_err());
}
