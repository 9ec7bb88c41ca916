//! Geodesics of the quaternion H-type group **H** from the origin.
//!
//! The horizontal velocity solves the linear system `ẍ = M(θ) ẋ` whose
//! matrix has eigenvalues `±a`, `±ia`, `a = |θ|`. For generic `θ` the
//! solution is written with the coefficient tables of [`QuatClosedForm`];
//! when `θ₁² + θ₂²` is negligible against `a²` the eigenvectors degenerate
//! and [`solve`] falls back to a matrix exponential, and `θ = 0` gives
//! straight lines.

mod closed_form;
mod identities;

use nalgebra::{SMatrix, Vector4};
use serde::{Deserialize, Serialize};

pub use closed_form::{
    closed_form, shoot_x, shoot_z, shoot_z_doubled, system_matrix, velocity, QuatClosedForm, XCoefficients,
    ZCoefficients, DEGENERATE_EPS,
};
pub use identities::{
    appendix_suite, norm_identity_x, norm_identity_z, norm_identity_z_corrected, random_ivp, slice_deviation,
    z_discrepancy_sweep,
    IdentityReport, IdentitySample, ZDiscrepancyLog, IDENTITY_TOL, NORM_X_TOL,
};

use crate::error::{Error, Result};
use crate::group::{GroupId, GroupPoint};
use crate::integrator::{CovectorState, GeodesicPath};
use crate::numeric::adaptive_simpson;

/// Initial velocity `v₀ = ẋ(0)` and momenta `θ` of a geodesic from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuatIvp {
    pub v0: [f64; 4],
    pub theta: [f64; 3],
}

impl QuatIvp {
    pub fn new(v0: [f64; 4], theta: [f64; 3]) -> Self {
        QuatIvp { v0, theta }
    }

    /// `a = √(θ₁² + θ₂² + θ₃²)`.
    pub fn a(&self) -> f64 {
        self.theta.iter().map(|t| t * t).sum::<f64>().sqrt()
    }

    /// The matching phase-space state: `ξ = (-v₁, v₂, v₃, v₄)` at the origin.
    pub fn covector_state(&self) -> CovectorState {
        CovectorState::from_velocity(GroupId::QuaternionH, &self.v0, &self.theta)
            .expect("quaternion dimensions")
    }
}

/// The Hamiltonian of **H** written out in coordinates.
pub fn hamiltonian(state: &CovectorState) -> Result<f64> {
    if state.group() != GroupId::QuaternionH {
        return Err(Error::Unsupported(state.group()));
    }
    let [x1, x2, x3, x4]: [f64; 4] = state.point().x().try_into().unwrap();
    let [p1, p2, p3, p4]: [f64; 4] = state.xi().try_into().unwrap();
    let [t1, t2, t3]: [f64; 3] = state.theta().try_into().unwrap();
    Ok(0.5 * (-p1 * p1 + p2 * p2 + p3 * p3 + p4 * p4)
        + 0.5 * (x2 * x4 * t1 * t2 + x2 * x3 * t1 * t3 - x3 * x4 * t2 * t3)
        + t1 * t1 * (x1 * x1 - x2 * x2 + x3 * x3 + x4 * x4) / 8.0
        + t2 * t2 * (x1 * x1 + x2 * x2 + x3 * x3 - x4 * x4) / 8.0
        + t3 * t3 * (x1 * x1 + x2 * x2 - x3 * x3 + x4 * x4) / 8.0
        + 0.5 * t1 * (-x2 * p1 - x1 * p2 + x4 * p3 - x3 * p4)
        + 0.5 * t2 * (x4 * p1 - x3 * p2 + x2 * p3 + x1 * p4)
        + 0.5 * t3 * (x3 * p1 + x4 * p2 + x1 * p3 - x2 * p4))
}

/// `(x(t), ẋ(t))` of `ẍ = M ẋ` from `exp` of the augmented matrix
/// `[[M, I], [0, 0]] t`, whose top blocks are `e^{Mt}` and `∫₀ᵗ e^{Ms} ds`.
pub fn expm_solution(ivp: &QuatIvp, t: f64) -> ([f64; 4], [f64; 4]) {
    let m = system_matrix(ivp.theta);
    let mut big = SMatrix::<f64, 8, 8>::zeros();
    big.fixed_view_mut::<4, 4>(0, 0).copy_from(&(m * t));
    big.fixed_view_mut::<4, 4>(0, 4).fill_with_identity();
    big.fixed_view_mut::<4, 4>(0, 4).scale_mut(t);
    let e = big.exp();
    let v0 = Vector4::from(ivp.v0);
    let x = e.fixed_view::<4, 4>(0, 4) * v0;
    let v = e.fixed_view::<4, 4>(0, 0) * v0;
    (x.into(), v.into())
}

/// Quadrature tolerance for `z` on the matrix-exponential branch.
const Z_QUAD_TOL: f64 = 1e-13;

/// A solved geodesic from the origin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum QuatSolution {
    ClosedForm(QuatClosedForm),
    /// `θ₁² + θ₂² ≈ 0`: matrix exponential for `x`, quadrature for `z`.
    Degenerate(QuatIvp),
    /// `θ = 0`: `x = t v₀`, `z = 0`.
    Straight(QuatIvp),
}

/// Picks the closed form when it is defined, otherwise the fallback.
pub fn solve(ivp: &QuatIvp) -> QuatSolution {
    match closed_form(ivp) {
        Ok(cf) => QuatSolution::ClosedForm(cf),
        Err(_) if ivp.a() == 0.0 => QuatSolution::Straight(*ivp),
        Err(_) => QuatSolution::Degenerate(*ivp),
    }
}

impl QuatSolution {
    pub fn ivp(&self) -> &QuatIvp {
        match self {
            QuatSolution::ClosedForm(cf) => &cf.ivp,
            QuatSolution::Degenerate(ivp) | QuatSolution::Straight(ivp) => ivp,
        }
    }

    pub fn x(&self, t: f64) -> [f64; 4] {
        match self {
            QuatSolution::ClosedForm(cf) => shoot_x(cf, t),
            QuatSolution::Degenerate(ivp) => expm_solution(ivp, t).0,
            QuatSolution::Straight(ivp) => ivp.v0.map(|v| v * t),
        }
    }

    pub fn velocity(&self, t: f64) -> [f64; 4] {
        match self {
            QuatSolution::ClosedForm(cf) => velocity(cf, t),
            QuatSolution::Degenerate(ivp) => expm_solution(ivp, t).1,
            QuatSolution::Straight(ivp) => ivp.v0,
        }
    }

    pub fn z(&self, t: f64) -> [f64; 3] {
        match self {
            QuatSolution::ClosedForm(cf) => shoot_z(cf, t),
            QuatSolution::Degenerate(ivp) => z_by_quadrature(ivp, t),
            QuatSolution::Straight(_) => [0.0; 3],
        }
    }

    pub fn point(&self, t: f64) -> GroupPoint {
        GroupPoint::quaternion(self.x(t), self.z(t))
    }

    /// `n` uniform samples on `[0, t1]`.
    pub fn sample_path(&self, t1: f64, n: usize) -> Result<GeodesicPath> {
        if n < 2 || !(t1 > 0.0) {
            return Err(Error::Curve(format!("cannot sample {n} points on [0, {t1}]")));
        }
        let theta = self.ivp().theta.to_vec();
        GeodesicPath::from_samples(
            GroupId::QuaternionH,
            (0..n).map(|i| {
                let t = if i == n - 1 { t1 } else { t1 * i as f64 / (n - 1) as f64 };
                (t, self.point(t), self.velocity(t).to_vec(), theta.clone())
            }),
        )
    }
}

/// `z(t) = ∫₀ᵗ ½ (J_β x, ẋ) ds` along the matrix-exponential solution.
pub fn z_by_quadrature(ivp: &QuatIvp, t: f64) -> [f64; 3] {
    if t == 0.0 {
        return [0.0; 3];
    }
    let f = |s: f64| {
        let (x, v) = expm_solution(ivp, s);
        crate::causal::horizontal_z_rate(GroupId::QuaternionH, &x, &v)
    };
    adaptive_simpson(&f, 0.0, t, Z_QUAD_TOL)
}
