use nalgebra::Matrix4;
use serde::{Deserialize, Serialize};

use crate::causal::lorentz_norm2;
use crate::error::{Error, Result};

use super::QuatIvp;

/// Below `θ₁² + θ₂² ≤ DEGENERATE_EPS · a²` the eigenvector normalisation of
/// the closed form breaks down.
pub const DEGENERATE_EPS: f64 = 1e-10;

/// The 4×4 matrix `M(θ)` of the reduced system `ẍ = M ẋ`.
pub fn system_matrix(theta: [f64; 3]) -> Matrix4<f64> {
    let [t1, t2, t3] = theta;
    #[rustfmt::skip]
    let m = Matrix4::new(
        0.0, -t1, t3, t2,
        -t1, 0.0, -t2, t3,
        t3, t2, 0.0, t1,
        t2, -t3, -t1, 0.0,
    );
    m
}

/// Coefficients of `x_i(t) = A_i sinh at + B_i cosh at + C_i sin at + D_i cos at + E_i`.
/// `C₁ = D₁ = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct XCoefficients {
    pub a: [f64; 4],
    pub b: [f64; 4],
    pub c: [f64; 4],
    pub d: [f64; 4],
    pub e: [f64; 4],
}

/// `alpha[n][k]` is `α_n^{k+1}`, `beta[m][k]` is `β_{m+1}^{k+1}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ZCoefficients {
    pub alpha: [[f64; 3]; 9],
    pub beta: [[f64; 3]; 4],
}

/// Constants of a closed-form geodesic of **H** from the origin, computed
/// once per initial condition.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuatClosedForm {
    pub ivp: QuatIvp,
    pub a: f64,
    /// `c₁..c₄`.
    pub c: [f64; 4],
    /// `k = (c₃² + c₄²)(θ₁² + θ₂²)`.
    pub k: f64,
    pub x: XCoefficients,
    pub z: ZCoefficients,
}

/// All constants of the closed-form solution. Fails with
/// [`Error::DegenerateTheta`] when `a = 0` or `θ₁² + θ₂²` is negligible; see
/// [`super::solve`] for those cases.
pub fn closed_form(ivp: &QuatIvp) -> Result<QuatClosedForm> {
    let [t1, t2, t3] = ivp.theta;
    let [v1, v2, v3, v4] = ivp.v0;
    let a2 = t1 * t1 + t2 * t2 + t3 * t3;
    let s = t1 * t1 + t2 * t2;
    if !(a2 > 0.0) || s <= DEGENERATE_EPS * a2 {
        return Err(Error::DegenerateTheta);
    }
    let a = a2.sqrt();

    let c1 = (a * v1 - t1 * v2 + t3 * v3 + t2 * v4) / (2.0 * a2);
    let c2 = (a * v1 + t1 * v2 - t3 * v3 - t2 * v4) / (2.0 * a2);
    let c3 = (t1 * t3 * v2 + s * v3 - t2 * t3 * v4) / (2.0 * a2 * s);
    let c4 = -(t2 * v2 + t1 * v4) / (2.0 * a * s);
    let k = (c3 * c3 + c4 * c4) * s;
    let (p, m) = (c1 + c2, c1 - c2);

    let d2 = 2.0 * (c4 * t1 * t3 + c3 * a * t2) / a;
    let d3 = 2.0 * c4 * s / a;
    let d4 = 2.0 * (c3 * a * t1 - c4 * t2 * t3) / a;
    let x = XCoefficients {
        a: [p, -t1 * m / a, t3 * m / a, t2 * m / a],
        b: [m, -t1 * p / a, t3 * p / a, t2 * p / a],
        c: [
            0.0,
            2.0 * (c3 * t1 * t3 - c4 * a * t2) / a,
            2.0 * c3 * s / a,
            -2.0 * (c4 * a * t1 + c3 * t2 * t3) / a,
        ],
        d: [0.0, d2, d3, d4],
        e: [-m, t1 * p / a - d2, -t3 * p / a - d3, -t2 * p / a - d4],
    };

    let mut alpha = [[0.0; 3]; 9];
    let h = -c1 * c2 + k;
    alpha[0] = [2.0 * t1 / a * h, 2.0 * t2 / a * h, 2.0 * t3 / a * h];
    let u = [c3 * t1 * t3 - a * c4 * t2, c3 * t2 * t3 + a * c4 * t1, -c3 * s];
    let w = [c4 * t1 * t3 + a * c3 * t2, c4 * t2 * t3 - a * c3 * t1, -c4 * s];
    for i in 0..3 {
        alpha[1][i] = 4.0 / a * p * u[i];
        alpha[2][i] = 4.0 / a * m * u[i];
        alpha[3][i] = 4.0 / a * p * w[i];
        alpha[4][i] = 4.0 / a * m * w[i];
    }
    let q5 = c3 * p - c4 * m;
    let r5 = c3 * m + c4 * p;
    alpha[5] = [
        -2.0 * t2 * q5 + 4.0 * c1 * c2 * t1 / a - 2.0 * t1 * t3 / a * r5,
        2.0 * t1 * q5 + 4.0 * c1 * c2 * t2 / a - 2.0 * t2 * t3 / a * r5,
        2.0 / a * s * r5 + 4.0 * c1 * c2 * t3 / a,
    ];
    let q6 = -c3 * m + c4 * p;
    let r6 = c3 * p + c4 * m;
    alpha[6] = [
        2.0 * t2 * q6 - 2.0 * t1 * t3 / a * r6,
        -2.0 * t1 * q6 - 2.0 * t2 * t3 / a * r6,
        2.0 / a * s * r6,
    ];
    let q7 = c3 * p + c4 * m;
    let r7 = -c3 * m + c4 * p;
    alpha[7] = [
        -2.0 * t2 * q7 - 2.0 * t1 * t3 / a * r7 - 4.0 / a * t1 * k,
        2.0 * t1 * q7 - 2.0 * t2 * t3 / a * r7 - 4.0 / a * t2 * k,
        2.0 / a * s * r7 - 4.0 / a * t3 * k,
    ];
    alpha[8] = alpha[6].map(|v| -v);

    let mut beta = [[0.0; 3]; 4];
    for i in 0..3 {
        beta[0][i] = 0.25 * (alpha[1][i] + alpha[4][i]);
        beta[1][i] = 0.25 * (-alpha[1][i] + alpha[4][i]);
        beta[2][i] = 0.25 * (-alpha[2][i] + alpha[3][i]);
        beta[3][i] = 0.25 * (alpha[2][i] + alpha[3][i]);
    }

    Ok(QuatClosedForm {
        ivp: *ivp,
        a,
        c: [c1, c2, c3, c4],
        k,
        x,
        z: ZCoefficients { alpha, beta },
    })
}

impl QuatClosedForm {
    /// `-c₁c₂ + k`, which equals `‖v₀‖² / (4a²)`.
    pub fn h(&self) -> f64 {
        -self.c[0] * self.c[1] + self.k
    }

    pub fn speed2(&self) -> f64 {
        lorentz_norm2(&self.ivp.v0)
    }
}

struct Trig {
    sh: f64,
    ch: f64,
    sn: f64,
    cs: f64,
}

fn trig(a: f64, t: f64) -> Trig {
    let u = a * t;
    Trig {
        sh: u.sinh(),
        ch: u.cosh(),
        sn: u.sin(),
        cs: u.cos(),
    }
}

/// `x(t)` from the coefficient tables.
pub fn shoot_x(cf: &QuatClosedForm, t: f64) -> [f64; 4] {
    let g = trig(cf.a, t);
    let x = &cf.x;
    std::array::from_fn(|i| x.a[i] * g.sh + x.b[i] * g.ch + x.c[i] * g.sn + x.d[i] * g.cs + x.e[i])
}

/// `ẋ(t)`.
pub fn velocity(cf: &QuatClosedForm, t: f64) -> [f64; 4] {
    let g = trig(cf.a, t);
    let x = &cf.x;
    std::array::from_fn(|i| cf.a * (x.a[i] * g.ch + x.b[i] * g.sh + x.c[i] * g.cs - x.d[i] * g.sn))
}

fn z_with_weight(cf: &QuatClosedForm, t: f64, weight: f64) -> [f64; 3] {
    let g = trig(cf.a, t);
    let (al, be) = (&cf.z.alpha, &cf.z.beta);
    std::array::from_fn(|i| {
        cf.a * al[0][i] * t
            + be[0][i] * g.sh * g.sn
            + be[1][i] * g.ch * g.cs
            + be[2][i] * g.sh * g.cs
            + be[3][i] * g.ch * g.sn
            + weight * (al[5][i] * g.sh + al[6][i] * g.ch + al[7][i] * g.sn + al[8][i] * g.cs)
            - be[1][i]
    })
}

/// `z(t)` from horizontality,
///
/// ```text
/// z = a α₀ t + β₁ sh·sn + β₂ ch·cs + β₃ sh·cs + β₄ ch·sn
///     + ½ (α₅ sh + α₆ ch + α₇ sn + α₈ cs) - β₂
/// ```
///
/// with `sh = sinh at` etc. The factor ½ on the single-frequency terms is
/// required for `ż = ½ (J x, ẋ)` to hold.
pub fn shoot_z(cf: &QuatClosedForm, t: f64) -> [f64; 3] {
    z_with_weight(cf, t, 0.5)
}

/// The same expansion with weight 1 on `α₅..α₈`. It does not solve the
/// horizontality equation; kept to quantify the discrepancy.
pub fn shoot_z_doubled(cf: &QuatClosedForm, t: f64) -> [f64; 3] {
    z_with_weight(cf, t, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> QuatClosedForm {
        closed_form(&QuatIvp::new([1.1, -0.3, 0.7, 0.2], [0.9, -0.6, 0.4])).unwrap()
    }

    #[test]
    fn initial_conditions() {
        let cf = sample();
        assert!(shoot_x(&cf, 0.0).iter().all(|v| v.abs() < 1e-15));
        assert!(shoot_z(&cf, 0.0).iter().all(|v| v.abs() < 1e-15));
        for (a, b) in velocity(&cf, 0.0).iter().zip(&cf.ivp.v0) {
            assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn beta_relations_and_alpha8() {
        let cf = sample();
        let (al, be) = (cf.z.alpha, cf.z.beta);
        for i in 0..3 {
            assert_eq!(be[1][i], 0.25 * (-al[1][i] + al[4][i]));
            assert_eq!(be[3][i], 0.25 * (al[2][i] + al[3][i]));
            assert_eq!(al[8][i], -al[6][i]);
        }
    }

    #[test]
    fn h_relation() {
        let cf = sample();
        assert!((cf.h() - cf.speed2() / (4.0 * cf.a * cf.a)).abs() < 1e-14);
    }

    #[test]
    fn degenerate_inputs_are_refused() {
        assert_eq!(closed_form(&QuatIvp::new([1.0, 0.0, 0.0, 0.0], [0.0; 3])), Err(Error::DegenerateTheta));
        assert_eq!(closed_form(&QuatIvp::new([1.0, 0.0, 0.0, 0.0], [0.0, 0.0, 2.0])), Err(Error::DegenerateTheta));
    }

    #[test]
    fn eigenvalues_are_plus_minus_a_and_i_a() {
        let theta = [0.4, -1.3, 0.8];
        let a = (0.16f64 + 1.69 + 0.64).sqrt();
        let mut ev: Vec<_> = system_matrix(theta).complex_eigenvalues().iter().copied().collect();
        ev.sort_by(|p, q| (p.re, p.im).partial_cmp(&(q.re, q.im)).unwrap());
        let expected = [(-a, 0.0), (0.0, -a), (0.0, a), (a, 0.0)];
        for (e, (re, im)) in ev.iter().zip(expected) {
            assert!((e.re - re).abs() < 1e-12 && (e.im - im).abs() < 1e-12, "{e}");
        }
    }
}
