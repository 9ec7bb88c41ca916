use proptest::prelude::*;
use sublorentz::group::{
    bracket, frame_coefficients, inverse, multiply, Bracket, Frame, FrameVector, StructureConstants,
};
use sublorentz::{GroupId, GroupPoint};

fn quat() -> impl Strategy<Value = GroupPoint> {
    (prop::array::uniform4(-5.0..5.0f64), prop::array::uniform3(-5.0..5.0f64))
        .prop_map(|(x, z)| GroupPoint::quaternion(x, z))
}

fn heis() -> impl Strategy<Value = GroupPoint> {
    prop::array::uniform3(-5.0..5.0f64).prop_map(|[x, y, z]| GroupPoint::heisenberg(x, y, z))
}

fn any_point() -> impl Strategy<Value = GroupPoint> {
    prop_oneof![quat(), heis()]
}

fn triple() -> impl Strategy<Value = (GroupPoint, GroupPoint, GroupPoint)> {
    prop_oneof![(quat(), quat(), quat()), (heis(), heis(), heis())]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    #[test]
    fn associativity((p, q, r) in triple()) {
        let a = multiply(&multiply(&p, &q).unwrap(), &r).unwrap();
        let b = multiply(&p, &multiply(&q, &r).unwrap()).unwrap();
        prop_assert!(a.max_abs_diff(&b) <= 1e-12);
    }
}

proptest! {
    #[test]
    fn inverse_cancels(p in any_point()) {
        let e = GroupPoint::identity(p.group());
        prop_assert!(multiply(&p, &inverse(&p)).unwrap().max_abs_diff(&e) <= 1e-13);
        prop_assert!(multiply(&inverse(&p), &p).unwrap().max_abs_diff(&e) <= 1e-13);
        prop_assert_eq!(multiply(&p, &e).unwrap(), p);
    }

    #[test]
    fn z_part_is_the_skew_correction(p in quat(), q in quat()) {
        let pq = multiply(&p, &q).unwrap();
        let sc = StructureConstants::of(GroupId::QuaternionH);
        for b in 0..3 {
            prop_assert_eq!(pq.z()[b], p.z()[b] + q.z()[b] + 0.5 * sc.skew_form(b, p.x(), q.x()));
        }
        for a in 0..4 {
            prop_assert_eq!(pq.x()[a], p.x()[a] + q.x()[a]);
        }
    }

    /// `[X_i, X_j] f` by differentiating the frame coefficients along each other.
    #[test]
    fn frame_brackets_match_table(p in quat(), i in 1usize..=4, j in 1usize..=4) {
        let h = 1e-4;
        let coeff = |k: usize, base: &GroupPoint| {
            frame_coefficients(&FrameVector { kind: Frame::X(k), base: *base }).unwrap().as_slice().to_vec()
        };
        let shift = |base: &GroupPoint, dir: &[f64], s: f64| {
            let mut c = base.as_slice().to_vec();
            for (a, d) in c.iter_mut().zip(dir) {
                *a += s * d;
            }
            GroupPoint::from_slice(GroupId::QuaternionH, &c).unwrap()
        };
        let xi = coeff(i, &p);
        let xj = coeff(j, &p);
        let dj_along_i: Vec<f64> = coeff(j, &shift(&p, &xi, h)).iter().zip(coeff(j, &shift(&p, &xi, -h)))
            .map(|(a, b)| (a - b) / (2.0 * h)).collect();
        let di_along_j: Vec<f64> = coeff(i, &shift(&p, &xj, h)).iter().zip(coeff(i, &shift(&p, &xj, -h)))
            .map(|(a, b)| (a - b) / (2.0 * h)).collect();
        let fd: Vec<f64> = dj_along_i.iter().zip(&di_along_j).map(|(a, b)| a - b).collect();
        let mut expected = [0.0; 7];
        if let Bracket::Center { index, sign } = bracket(GroupId::QuaternionH, i, j).unwrap() {
            expected[3 + index] = sign as f64;
        }
        for k in 0..7 {
            prop_assert!((fd[k] - expected[k]).abs() <= 1e-6, "{k}: {fd:?}");
        }
    }
}

#[test]
fn reference_products() {
    assert_eq!(
        multiply(&GroupPoint::heisenberg(1.0, 0.0, 0.0), &GroupPoint::heisenberg(0.0, 1.0, 0.0)).unwrap(),
        GroupPoint::heisenberg(1.0, 1.0, -0.5)
    );
    assert_eq!(
        multiply(
            &GroupPoint::quaternion([1.0, 0.0, 0.0, 0.0], [0.0; 3]),
            &GroupPoint::quaternion([0.0, 1.0, 0.0, 0.0], [0.0; 3])
        )
        .unwrap(),
        GroupPoint::quaternion([1.0, 1.0, 0.0, 0.0], [-0.5, 0.0, 0.0])
    );
    assert_eq!(inverse(&GroupPoint::heisenberg(1.0, 2.0, 3.0)), GroupPoint::heisenberg(-1.0, -2.0, -3.0));
}
