use proptest::prelude::*;
use sublorentz::integrator::{integrate, CovectorState, IntegrationConfig};
use sublorentz::reachable::*;
use sublorentz::{GroupId, GroupPoint};

fn gamma(alpha: f64) -> RegionId {
    RegionId::Gamma(EtaParams::new(alpha).unwrap())
}

fn point() -> impl Strategy<Value = GroupPoint> {
    (prop::array::uniform4(-3.0..3.0f64), prop::array::uniform3(-3.0..3.0f64))
        .prop_map(|(x, z)| GroupPoint::quaternion(x, z))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn a_alpha_lies_in_gamma_0(p in point(), alpha in -ALPHA_MAX..ALPHA_MAX) {
        let a = RegionId::A(EtaParams::new(alpha).unwrap());
        if in_region(&a, &p).unwrap() {
            prop_assert!(in_region(&gamma(0.0), &p).unwrap());
        }
    }

    #[test]
    fn a_zero_is_gamma_zero(p in point()) {
        let a = RegionId::A(EtaParams::new(0.0).unwrap());
        prop_assert_eq!(in_region(&a, &p).unwrap(), in_region(&gamma(0.0), &p).unwrap());
    }

    #[test]
    fn a_max_is_empty(p in point()) {
        prop_assert!(!in_region(&RegionId::A(EtaParams::new(ALPHA_MAX).unwrap()), &p).unwrap());
    }

    #[test]
    fn gamma_shrinks_with_alpha(p in point(), a in 0.0..ALPHA_MAX, b in 0.0..ALPHA_MAX) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        if in_region(&gamma(hi), &p).unwrap() {
            prop_assert!(in_region(&gamma(lo), &p).unwrap());
        }
    }
}

proptest! {
    #[test]
    fn rays_are_in_gamma_0(phi in -3.0..3.0f64, psi in 0.0..6.28f64, vt in 0.0..3.14f64, t in 0.01..10.0f64) {
        let r = RayParams::new(phi, psi, vt).unwrap();
        let p = ray_point(&r, t).unwrap();
        prop_assert!(in_region(&gamma(0.0), &p).unwrap());
        let e = eta(0.0, &p).unwrap();
        prop_assert!((e + t * t).abs() <= 1e-9 * t * t * phi.cosh().powi(2));
    }
}

#[test]
fn geodesics_and_controls_end_in_gamma_0() {
    let g0 = gamma(0.0);
    let r = verify_inclusion(|i| geodesic_sample(1, i, 65), g0, 500).unwrap();
    assert!(r.violations.is_empty(), "{:?}", r.violations);
    assert!(r.max_eta0_increase <= INCLUSION_TOL);
    assert!(r.max_horizontality_defect < 1e-3, "{}", r.max_horizontality_defect);
    for kind in [CurveKind::Timelike, CurveKind::Nonspacelike] {
        let r = verify_inclusion(|i| control_sample(2, i, kind, None, 129), g0, 500).unwrap();
        assert!(r.violations.is_empty(), "{kind:?} {:?}", r.violations);
        assert_eq!(r.tested, 500);
    }
}

#[test]
fn slice_controls_end_in_gamma_4() {
    for slice in Slice::ALL {
        let r = verify_inclusion(|i| control_sample(3, i, CurveKind::Timelike, Some(slice), 129), RegionId::BSlice(slice), 300)
            .unwrap();
        assert!(r.violations.is_empty(), "{slice:?} {:?}", r.violations);
        let r = verify_inclusion(|i| control_sample(3, i, CurveKind::Nonspacelike, Some(slice), 129), RegionId::BSlice(slice), 300)
            .unwrap();
        assert!(r.violations.is_empty(), "{slice:?} {:?}", r.violations);
    }
}

#[test]
fn controls_respect_gamma_alpha_inside_a_alpha() {
    for alpha in [0.5, 1.0, 1.5, 2.0, 2.3] {
        let region = RegionId::A(EtaParams::new(alpha).unwrap());
        let r = verify_inclusion(|i| control_sample(4, i, CurveKind::Timelike, None, 129), region, 500).unwrap();
        assert!(r.tested > 0);
        assert!(r.violations.is_empty(), "{alpha} {:?}", r.violations);
    }
}

/// Timelike geodesics can end inside `A_α` but outside `Γ_α`; every such
/// endpoint found has `z` components of mixed sign.
#[test]
fn geodesics_leave_gamma_alpha_only_with_mixed_z_signs() {
    let region = RegionId::A(EtaParams::new(1.0).unwrap());
    let r = verify_inclusion(|i| geodesic_sample(22, i, 33), region, 2000).unwrap();
    assert!(!r.violations.is_empty());
    for v in &r.violations {
        let z = v.endpoint.z();
        assert!(z.iter().any(|&c| c > 0.0) && z.iter().any(|&c| c < 0.0), "{:?}", v.endpoint);
    }
}

#[test]
fn frozen_gamma_alpha_counterexample() {
    let v0 = [1.2294478569173792, -0.04700822477040751, 0.8295734666771322, 0.6718770081973356];
    let theta = [1.4566176511733229, 0.9885001654570482, 0.15978507881346937];
    let init = CovectorState::from_velocity(GroupId::QuaternionH, &v0, &theta).unwrap();
    let path = integrate(&init, &IntegrationConfig { steps: 4000, ..Default::default() }).unwrap();
    let a1 = RegionId::A(EtaParams::new(1.0).unwrap());
    assert!(path.samples().iter().all(|s| s.class.kind == sublorentz::CausalKind::Timelike));
    assert!(path.samples()[1..].iter().all(|s| in_region(&a1, &s.point).unwrap()));
    let p = path.last().point;
    assert!(in_region(&gamma(0.0), &p).unwrap());
    assert!(!in_region(&gamma(1.0), &p).unwrap());
    assert!((eta(1.0, &p).unwrap() - 0.09938305145571835).abs() < 1e-9);
}
