//! The Lorentzian metric on the horizontal bundle and everything built from
//! it: causal classes, the co-metric, horizontal gradients and length.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::group::{horizontality_defect, multiply, DiscreteCurve, GroupId, GroupPoint, StructureConstants};

/// Default tolerance on the horizontality defect accepted by [`curve_length`].
pub const DEFAULT_HORIZONTAL_TOL: f64 = 1e-6;

/// Default step of the central differences in [`horizontal_gradient_fd`].
pub const DEFAULT_FD_STEP: f64 = 1e-5;

/// A horizontal vector `Σ v_α X_α(base)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HorizontalVector {
    base: GroupPoint,
    coeffs: [f64; 4],
}

impl HorizontalVector {
    pub fn new(base: GroupPoint, coeffs: &[f64]) -> Result<Self> {
        let n = base.group().horizontal_dim();
        if coeffs.len() != n {
            return Err(Error::Dimension {
                group: base.group(),
                expected: n,
                got: coeffs.len(),
            });
        }
        let mut c = [0.0; 4];
        c[..n].copy_from_slice(coeffs);
        Ok(HorizontalVector { base, coeffs: c })
    }

    /// A vector at the identity of `group`.
    pub fn at_identity(group: GroupId, coeffs: &[f64]) -> Result<Self> {
        Self::new(GroupPoint::identity(group), coeffs)
    }

    /// The time orientation `X₁` at `base`.
    pub fn time_orientation(base: GroupPoint) -> Self {
        let mut coeffs = [0.0; 4];
        coeffs[0] = 1.0;
        HorizontalVector { base, coeffs }
    }

    pub fn group(&self) -> GroupId {
        self.base.group()
    }

    pub fn base(&self) -> &GroupPoint {
        &self.base
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs[..self.group().horizontal_dim()]
    }

    pub fn scaled(&self, s: f64) -> Self {
        let mut out = *self;
        out.coeffs.iter_mut().for_each(|c| *c *= s);
        out
    }
}

/// `-u₁² + Σ u_α²` on raw frame coefficients.
pub fn lorentz_norm2(u: &[f64]) -> f64 {
    lorentz_dot(u, u)
}

/// `-u₁v₁ + Σ_{α≥2} u_α v_α` on raw frame coefficients.
pub fn lorentz_dot(u: &[f64], v: &[f64]) -> f64 {
    debug_assert_eq!(u.len(), v.len());
    -u[0] * v[0] + u[1..].iter().zip(&v[1..]).map(|(a, b)| a * b).sum::<f64>()
}

/// `Q(u, v)` for two horizontal vectors at the same base point.
pub fn q_inner(u: &HorizontalVector, v: &HorizontalVector) -> Result<f64> {
    u.group().expect(v.group())?;
    if u.base != v.base {
        return Err(Error::BaseMismatch);
    }
    Ok(lorentz_dot(u.coeffs(), v.coeffs()))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalKind {
    Timelike,
    Spacelike,
    Null,
    ZeroVector,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Orientation {
    FutureDirected,
    PastDirected,
    Unoriented,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CausalClass {
    pub kind: CausalKind,
    pub orientation: Orientation,
}

impl CausalClass {
    pub fn is_nonspacelike(&self) -> bool {
        matches!(self.kind, CausalKind::Timelike | CausalKind::Null)
    }
}

impl std::fmt::Display for CausalClass {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:?} {:?}", self.kind, self.orientation)
    }
}

/// Exact classification by the signs of `Q(v, v)` and `Q(v, X₁)`.
pub fn classify(v: &HorizontalVector) -> CausalClass {
    classify_coeffs(v.coeffs(), 0.0)
}

/// Classification treating `|Q(v,v)| ≤ rel_tol · |v|²_E` as null.
pub fn classify_with_tol(v: &HorizontalVector, rel_tol: f64) -> CausalClass {
    classify_coeffs(v.coeffs(), rel_tol)
}

pub(crate) fn classify_coeffs(u: &[f64], rel_tol: f64) -> CausalClass {
    let euclid: f64 = u.iter().map(|c| c * c).sum();
    if euclid == 0.0 {
        return CausalClass {
            kind: CausalKind::ZeroVector,
            orientation: Orientation::Unoriented,
        };
    }
    let q = lorentz_norm2(u);
    let kind = if q.abs() <= rel_tol * euclid {
        CausalKind::Null
    } else if q < 0.0 {
        CausalKind::Timelike
    } else {
        CausalKind::Spacelike
    };
    // Q(v, X₁) = -v₁
    let orientation = match kind {
        CausalKind::Spacelike | CausalKind::ZeroVector => Orientation::Unoriented,
        _ if u[0] > 0.0 => Orientation::FutureDirected,
        _ if u[0] < 0.0 => Orientation::PastDirected,
        _ => Orientation::Unoriented,
    };
    CausalClass { kind, orientation }
}

/// The co-metric `g_x`, a symmetric matrix on covectors `(ξ, θ)`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoMetric {
    pub group: GroupId,
    pub matrix: DMatrix<f64>,
}

/// Counts of negative, positive and zero eigenvalues.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Signature {
    pub negative: usize,
    pub positive: usize,
    pub zero: usize,
}

impl CoMetric {
    /// `g ξ` as a tangent vector in the Euclidean basis.
    pub fn raise(&self, covector: &[f64]) -> Vec<f64> {
        (&self.matrix * nalgebra::DVector::from_column_slice(covector))
            .iter()
            .copied()
            .collect()
    }

    /// Inertia of the matrix; eigenvalues below `tol` in magnitude count as zero.
    pub fn signature(&self, tol: f64) -> Signature {
        let eig = SymmetricEigen::new(self.matrix.clone());
        let mut s = Signature {
            negative: 0,
            positive: 0,
            zero: 0,
        };
        for &l in eig.eigenvalues.iter() {
            if l.abs() <= tol {
                s.zero += 1;
            } else if l < 0.0 {
                s.negative += 1;
            } else {
                s.positive += 1;
            }
        }
        s
    }
}

/// The co-metric at `p`: the explicit 7×7 table for **H**, and the 3×3
/// analogue `-X Xᵀ + Y Yᵀ` for `H¹_L`.
pub fn co_metric(p: &GroupPoint) -> CoMetric {
    match p.group() {
        GroupId::QuaternionH => {
            let [x1, x2, x3, x4]: [f64; 4] = p.x().try_into().unwrap();
            #[rustfmt::skip]
            let rows = [
                -1.0, 0.0, 0.0, 0.0, -0.5 * x2, 0.5 * x4, 0.5 * x3,
                0.0, 1.0, 0.0, 0.0, -0.5 * x1, -0.5 * x3, 0.5 * x4,
                0.0, 0.0, 1.0, 0.0, 0.5 * x4, 0.5 * x2, 0.5 * x1,
                0.0, 0.0, 0.0, 1.0, -0.5 * x3, 0.5 * x1, -0.5 * x2,
                -0.5 * x2, -0.5 * x1, 0.5 * x4, -0.5 * x3,
                    0.25 * (x1 * x1 - x2 * x2 + x3 * x3 + x4 * x4), 0.5 * x2 * x4, 0.5 * x2 * x3,
                0.5 * x4, -0.5 * x3, 0.5 * x2, 0.5 * x1,
                    0.5 * x2 * x4, 0.25 * (x1 * x1 + x2 * x2 + x3 * x3 - x4 * x4), -0.5 * x3 * x4,
                0.5 * x3, 0.5 * x4, 0.5 * x1, -0.5 * x2,
                    0.5 * x2 * x3, -0.5 * x3 * x4, 0.25 * (x1 * x1 + x2 * x2 - x3 * x3 + x4 * x4),
            ];
            CoMetric {
                group: GroupId::QuaternionH,
                matrix: DMatrix::from_row_slice(7, 7, &rows),
            }
        }
        GroupId::HeisenbergL => {
            let (x, y) = (p.x()[0], p.x()[1]);
            #[rustfmt::skip]
            let rows = [
                -1.0, 0.0, -0.5 * y,
                0.0, 1.0, -0.5 * x,
                -0.5 * y, -0.5 * x, 0.25 * (x * x - y * y),
            ];
            CoMetric {
                group: GroupId::HeisenbergL,
                matrix: DMatrix::from_row_slice(3, 3, &rows),
            }
        }
    }
}

/// `∇_h η_α` on **H** for the orthant `z₁, z₂, z₃ > 0`.
pub fn horizontal_gradient_eta(alpha: f64, p: &GroupPoint) -> Result<HorizontalVector> {
    if p.group() != GroupId::QuaternionH {
        return Err(Error::Unsupported(p.group()));
    }
    let [x1, x2, x3, x4]: [f64; 4] = p.x().try_into().unwrap();
    let h = 0.5 * alpha;
    HorizontalVector::new(
        *p,
        &[
            2.0 * x1 - h * (x2 - x3 - x4),
            2.0 * x2 + h * (-x1 - x3 + x4),
            2.0 * x3 + h * (x1 + x2 + x4),
            2.0 * x4 + h * (x1 - x2 - x3),
        ],
    )
}

/// Horizontal gradient by central differences along the integral curves
/// `p ∘ exp(±h X_j)` of the frame, with the sign flip on `X₁`.
pub fn horizontal_gradient_fd<F>(f: F, p: &GroupPoint, h: f64) -> Result<HorizontalVector>
where
    F: Fn(&GroupPoint) -> f64,
{
    if !(h > 0.0) {
        return Err(Error::OutOfRange(format!("finite-difference step {h}")));
    }
    let g = p.group();
    let n = g.horizontal_dim();
    let zero_z = vec![0.0; g.center_dim()];
    let mut coeffs = vec![0.0; n];
    for (j, c) in coeffs.iter_mut().enumerate() {
        let mut step = vec![0.0; n];
        step[j] = h;
        let fwd = multiply(p, &GroupPoint::new(g, &step, &zero_z)?)?;
        step[j] = -h;
        let bwd = multiply(p, &GroupPoint::new(g, &step, &zero_z)?)?;
        let xj_f = (f(&fwd) - f(&bwd)) / (2.0 * h);
        *c = if j == 0 { -xj_f } else { xj_f };
    }
    HorizontalVector::new(*p, &coeffs)
}

/// Length of a sampled horizontal curve with per-sample causal classes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CurveLength {
    pub length: f64,
    pub classes: Vec<CausalClass>,
    pub horizontality_defect: f64,
}

/// `∫ |Q(ċ, ċ)|^{1/2} dt` by the trapezoidal rule on finite-difference
/// velocities. Fails if the curve's horizontality defect exceeds `tol`.
pub fn curve_length(c: &DiscreteCurve, tol: f64) -> Result<CurveLength> {
    let defect = horizontality_defect(c)?;
    if defect > tol {
        return Err(Error::NotHorizontal { defect, tol });
    }
    let vel = c.velocities()?;
    let speed: Vec<f64> = vel.iter().map(|v| lorentz_norm2(v.dx()).abs().sqrt()).collect();
    let classes = vel.iter().map(|v| classify_coeffs(v.dx(), 1e-12)).collect();
    let t = c.times();
    let length = t
        .windows(2)
        .zip(speed.windows(2))
        .map(|(tw, sw)| 0.5 * (tw[1] - tw[0]) * (sw[0] + sw[1]))
        .sum();
    Ok(CurveLength {
        length,
        classes,
        horizontality_defect: defect,
    })
}

/// Dot product `(J_β x, u)` collected over `β`: the horizontality right-hand
/// side `ż_β = ½ (J_β x, ẋ)`.
pub(crate) fn horizontal_z_rate(group: GroupId, x: &[f64], xdot: &[f64]) -> [f64; 3] {
    let sc = StructureConstants::of(group);
    let mut out = [0.0; 3];
    for (beta, o) in out.iter_mut().enumerate().take(group.center_dim()) {
        *o = 0.5 * sc.skew_form(beta, x, xdot);
    }
    out
}
