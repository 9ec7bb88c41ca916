//! Group laws, left-invariant frames and horizontality of sampled curves.
//!
//! Both groups are 2-step nilpotent with law
//!
//! ```text
//! (x, z) ∘ (x', z') = (x + x', z_β + z'_β + ½ (J_β x, x'))
//! ```
//!
//! where the `J_β` are the skew matrices of [`StructureConstants`]. For **H**
//! these are the quaternion units `𝓘₁, 𝓘₂, 𝓘₃`; for `H¹_L` the single matrix
//! `J = [[0, 1], [-1, 0]]`, so that `z'' = z + z' + ½(y x' - x y')`.
//!
//! With this convention the frame fields are
//! `X_α = ∂/∂x_α + ½ Σ_β (J_β x)_α ∂/∂z_β`, the dual one-forms are
//! `υ_β = dz_β - ½ Σ_α (J_β x)_α dx_α`, and `[X_i, X_j] = -Σ_β (J_β)_{ij} Z_β`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Which of the two groups a value lives on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GroupId {
    /// The Heisenberg group with Lorentzian metric, `(x, y, z) ∈ ℝ³`.
    HeisenbergL,
    /// The quaternion H-type group, `(x, z) ∈ ℝ⁴ × ℝ³`.
    QuaternionH,
}

impl GroupId {
    /// Dimension of the horizontal layer (2 or 4).
    pub const fn horizontal_dim(self) -> usize {
        match self {
            GroupId::HeisenbergL => 2,
            GroupId::QuaternionH => 4,
        }
    }

    /// Dimension of the centre (1 or 3).
    pub const fn center_dim(self) -> usize {
        match self {
            GroupId::HeisenbergL => 1,
            GroupId::QuaternionH => 3,
        }
    }

    pub const fn dim(self) -> usize {
        self.horizontal_dim() + self.center_dim()
    }

    pub(crate) fn expect(self, other: GroupId) -> Result<()> {
        if self == other {
            Ok(())
        } else {
            Err(Error::GroupMismatch {
                expected: self,
                found: other,
            })
        }
    }
}

const I1: [[f64; 4]; 4] = [
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0],
];
const I2: [[f64; 4]; 4] = [
    [0.0, 0.0, 0.0, -1.0],
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 1.0, 0.0, 0.0],
    [1.0, 0.0, 0.0, 0.0],
];
const I3: [[f64; 4]; 4] = [
    [0.0, 0.0, -1.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [1.0, 0.0, 0.0, 0.0],
    [0.0, -1.0, 0.0, 0.0],
];

/// The quaternion units `𝓘₁, 𝓘₂, 𝓘₃` as real 4×4 matrices.
pub const QUATERNION_UNITS: [[[f64; 4]; 4]; 3] = [I1, I2, I3];

/// The skew matrices `J_β` defining the group law of either group.
///
/// For `H¹_L` the single matrix is the upper-left 2×2 block of `𝓘₁`; the
/// unused rows and columns are zero.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct StructureConstants {
    group: GroupId,
}

impl StructureConstants {
    pub const fn of(group: GroupId) -> Self {
        StructureConstants { group }
    }

    pub const fn group(&self) -> GroupId {
        self.group
    }

    /// `J_β` for a zero-based centre index `beta`.
    pub fn matrix(&self, beta: usize) -> [[f64; 4]; 4] {
        match self.group {
            GroupId::QuaternionH => QUATERNION_UNITS[beta],
            GroupId::HeisenbergL => {
                assert_eq!(beta, 0, "H¹_L has a one-dimensional centre");
                let mut m = [[0.0; 4]; 4];
                m[0][1] = 1.0;
                m[1][0] = -1.0;
                m
            }
        }
    }

    /// `J_β x` restricted to the horizontal dimension.
    pub fn apply(&self, beta: usize, x: &[f64]) -> [f64; 4] {
        let m = self.matrix(beta);
        let n = self.group.horizontal_dim();
        let mut out = [0.0; 4];
        for (i, row) in m.iter().enumerate().take(n) {
            out[i] = (0..n).map(|j| row[j] * x[j]).sum();
        }
        out
    }

    /// The bilinear form `(J_β x, x')`.
    pub fn skew_form(&self, beta: usize, x: &[f64], xp: &[f64]) -> f64 {
        let jx = self.apply(beta, x);
        (0..self.group.horizontal_dim()).map(|i| jx[i] * xp[i]).sum()
    }
}

/// A point of either group in normal coordinates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointRepr", into = "PointRepr")]
pub struct GroupPoint {
    group: GroupId,
    coords: [f64; 7],
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PointRepr {
    group: GroupId,
    coords: Vec<f64>,
}

impl From<GroupPoint> for PointRepr {
    fn from(p: GroupPoint) -> Self {
        PointRepr {
            group: p.group,
            coords: p.as_slice().to_vec(),
        }
    }
}

impl TryFrom<PointRepr> for GroupPoint {
    type Error = Error;
    fn try_from(r: PointRepr) -> Result<Self> {
        GroupPoint::from_slice(r.group, &r.coords)
    }
}

impl GroupPoint {
    pub fn identity(group: GroupId) -> Self {
        GroupPoint {
            group,
            coords: [0.0; 7],
        }
    }

    pub fn heisenberg(x: f64, y: f64, z: f64) -> Self {
        GroupPoint {
            group: GroupId::HeisenbergL,
            coords: [x, y, z, 0.0, 0.0, 0.0, 0.0],
        }
    }

    pub fn quaternion(x: [f64; 4], z: [f64; 3]) -> Self {
        GroupPoint {
            group: GroupId::QuaternionH,
            coords: [x[0], x[1], x[2], x[3], z[0], z[1], z[2]],
        }
    }

    /// Builds a point from horizontal and central parts, checking dimensions.
    pub fn new(group: GroupId, x: &[f64], z: &[f64]) -> Result<Self> {
        check_dim(group, group.horizontal_dim(), x.len())?;
        check_dim(group, group.center_dim(), z.len())?;
        let mut coords = [0.0; 7];
        let n = group.horizontal_dim();
        coords[..n].copy_from_slice(x);
        coords[n..n + z.len()].copy_from_slice(z);
        Ok(GroupPoint { group, coords })
    }

    /// Builds a point from the flat coordinate list `(x.., z..)`.
    pub fn from_slice(group: GroupId, c: &[f64]) -> Result<Self> {
        check_dim(group, group.dim(), c.len())?;
        let n = group.horizontal_dim();
        Self::new(group, &c[..n], &c[n..])
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn x(&self) -> &[f64] {
        &self.coords[..self.group.horizontal_dim()]
    }

    pub fn z(&self) -> &[f64] {
        let n = self.group.horizontal_dim();
        &self.coords[n..self.group.dim()]
    }

    /// All coordinates `(x.., z..)`.
    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..self.group.dim()]
    }

    pub fn is_finite(&self) -> bool {
        self.as_slice().iter().all(|v| v.is_finite())
    }

    /// Max-norm distance between coordinates of two points on the same group.
    pub fn max_abs_diff(&self, other: &GroupPoint) -> f64 {
        self.as_slice()
            .iter()
            .zip(other.as_slice())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

fn check_dim(group: GroupId, expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension {
            group,
            expected,
            got,
        })
    }
}

/// Group multiplication `p ∘ q`.
pub fn multiply(p: &GroupPoint, q: &GroupPoint) -> Result<GroupPoint> {
    p.group.expect(q.group)?;
    let g = p.group;
    let sc = StructureConstants::of(g);
    let n = g.horizontal_dim();
    let mut coords = [0.0; 7];
    for i in 0..n {
        coords[i] = p.coords[i] + q.coords[i];
    }
    for beta in 0..g.center_dim() {
        coords[n + beta] =
            p.coords[n + beta] + q.coords[n + beta] + 0.5 * sc.skew_form(beta, p.x(), q.x());
    }
    Ok(GroupPoint { group: g, coords })
}

/// The inverse `(-x, -z)`.
pub fn inverse(p: &GroupPoint) -> GroupPoint {
    let mut coords = p.coords;
    coords.iter_mut().for_each(|c| *c = -*c);
    GroupPoint {
        group: p.group,
        coords,
    }
}

/// A tangent vector in the Euclidean coordinate basis `∂/∂x_α, ∂/∂z_β`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TangentVector {
    group: GroupId,
    coords: [f64; 7],
}

impl TangentVector {
    pub fn new(group: GroupId, dx: &[f64], dz: &[f64]) -> Result<Self> {
        let p = GroupPoint::new(group, dx, dz)?;
        Ok(TangentVector {
            group,
            coords: p.coords,
        })
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn dx(&self) -> &[f64] {
        &self.coords[..self.group.horizontal_dim()]
    }

    pub fn dz(&self) -> &[f64] {
        let n = self.group.horizontal_dim();
        &self.coords[n..self.group.dim()]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.coords[..self.group.dim()]
    }
}

/// A left-invariant frame field label. Indices are one-based, as in `X₁..X₄`
/// and `Z₁..Z₃` (`X₁, X₂` and `Z₁` for `H¹_L`, where `X₁ = X`, `X₂ = Y`).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Frame {
    X(usize),
    Z(usize),
}

/// A frame field evaluated at a base point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FrameVector {
    pub kind: Frame,
    pub base: GroupPoint,
}

fn check_frame_index(group: GroupId, index: usize, bound: usize) -> Result<()> {
    if (1..=bound).contains(&index) {
        Ok(())
    } else {
        Err(Error::FrameIndex { group, index })
    }
}

/// Coordinates of a frame field at its base point in the Euclidean basis.
pub fn frame_coefficients(v: &FrameVector) -> Result<TangentVector> {
    let g = v.base.group;
    let n = g.horizontal_dim();
    let mut coords = [0.0; 7];
    match v.kind {
        Frame::X(alpha) => {
            check_frame_index(g, alpha, n)?;
            let a = alpha - 1;
            coords[a] = 1.0;
            let sc = StructureConstants::of(g);
            for beta in 0..g.center_dim() {
                coords[n + beta] = 0.5 * sc.apply(beta, v.base.x())[a];
            }
        }
        Frame::Z(beta) => {
            check_frame_index(g, beta, g.center_dim())?;
            coords[n + beta - 1] = 1.0;
        }
    }
    Ok(TangentVector { group: g, coords })
}

/// Value of a Lie bracket of two horizontal frame fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bracket {
    Zero,
    /// `sign · Z_index`, index one-based.
    Center { index: usize, sign: i8 },
}

/// `[X_i, X_j]` expressed in the `Z` basis (one-based indices).
pub fn bracket(group: GroupId, i: usize, j: usize) -> Result<Bracket> {
    let n = group.horizontal_dim();
    check_frame_index(group, i, n)?;
    check_frame_index(group, j, n)?;
    let sc = StructureConstants::of(group);
    for beta in 0..group.center_dim() {
        let c = -sc.matrix(beta)[i - 1][j - 1];
        if c != 0.0 {
            return Ok(Bracket::Center {
                index: beta + 1,
                sign: c as i8,
            });
        }
    }
    Ok(Bracket::Zero)
}

/// Evaluates the dual one-form `υ_β` (one-based `beta`) at `base` on `w`.
pub fn dual_form(beta: usize, w: &TangentVector, base: &GroupPoint) -> Result<f64> {
    let g = base.group;
    g.expect(w.group)?;
    check_frame_index(g, beta, g.center_dim())?;
    let jx = StructureConstants::of(g).apply(beta - 1, base.x());
    let corr: f64 = (0..g.horizontal_dim()).map(|a| jx[a] * w.dx()[a]).sum();
    Ok(w.dz()[beta - 1] - 0.5 * corr)
}

/// A curve sampled on a strictly increasing time grid.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscreteCurve {
    group: GroupId,
    times: Vec<f64>,
    points: Vec<GroupPoint>,
}

impl DiscreteCurve {
    pub fn new(times: Vec<f64>, points: Vec<GroupPoint>) -> Result<Self> {
        if times.len() != points.len() {
            return Err(Error::Curve(format!(
                "{} times for {} points",
                times.len(),
                points.len()
            )));
        }
        if points.len() < 2 {
            return Err(Error::Curve("need at least two samples".into()));
        }
        let group = points[0].group;
        for p in &points {
            group.expect(p.group)?;
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Curve("times must be finite and strictly increasing".into()));
        }
        Ok(DiscreteCurve {
            group,
            times,
            points,
        })
    }

    /// Samples `f` on `n` uniformly spaced times in `[t0, t1]`.
    pub fn sample<F>(t0: f64, t1: f64, n: usize, mut f: F) -> Result<Self>
    where
        F: FnMut(f64) -> GroupPoint,
    {
        if n < 2 {
            return Err(Error::Curve("need at least two samples".into()));
        }
        let times: Vec<f64> = (0..n)
            .map(|i| t0 + (t1 - t0) * i as f64 / (n - 1) as f64)
            .collect();
        let points = times.iter().map(|&t| f(t)).collect();
        Self::new(times, points)
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn points(&self) -> &[GroupPoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn last(&self) -> &GroupPoint {
        self.points.last().expect("curve has at least two samples")
    }

    /// Second-order finite-difference velocities: central at interior nodes,
    /// three-point one-sided at the ends. Needs at least three samples.
    pub fn velocities(&self) -> Result<Vec<TangentVector>> {
        let n = self.len();
        if n < 3 {
            return Err(Error::Curve("finite differences need at least three samples".into()));
        }
        let d = self.group.dim();
        let t = &self.times;
        let p = |i: usize| self.points[i].as_slice();
        let combine = |i0: usize, w: [f64; 3]| {
            let mut coords = [0.0; 7];
            for (k, c) in coords.iter_mut().enumerate().take(d) {
                *c = w[0] * p(i0)[k] + w[1] * p(i0 + 1)[k] + w[2] * p(i0 + 2)[k];
            }
            TangentVector {
                group: self.group,
                coords,
            }
        };
        let mut out = Vec::with_capacity(n);
        {
            let (h1, h2) = (t[1] - t[0], t[2] - t[1]);
            out.push(combine(
                0,
                [
                    -(2.0 * h1 + h2) / (h1 * (h1 + h2)),
                    (h1 + h2) / (h1 * h2),
                    -h1 / (h2 * (h1 + h2)),
                ],
            ));
        }
        for i in 1..n - 1 {
            let (h1, h2) = (t[i] - t[i - 1], t[i + 1] - t[i]);
            out.push(combine(
                i - 1,
                [
                    -h2 / (h1 * (h1 + h2)),
                    (h2 - h1) / (h1 * h2),
                    h1 / (h2 * (h1 + h2)),
                ],
            ));
        }
        {
            let (h1, h2) = (t[n - 2] - t[n - 3], t[n - 1] - t[n - 2]);
            out.push(combine(
                n - 3,
                [
                    h2 / (h1 * (h1 + h2)),
                    -(h1 + h2) / (h1 * h2),
                    (h1 + 2.0 * h2) / (h2 * (h1 + h2)),
                ],
            ));
        }
        Ok(out)
    }
}

/// Max over interior samples of `|υ_β(ċ)|` with finite-difference velocities.
pub fn horizontality_defect(c: &DiscreteCurve) -> Result<f64> {
    let n = c.len();
    if n < 3 {
        return Err(Error::Curve("horizontality defect needs at least three samples".into()));
    }
    if c.times.windows(2).any(|w| w[1] - w[0] <= f64::EPSILON * w[0].abs().max(1.0)) {
        return Err(Error::Curve("degenerate grid spacing".into()));
    }
    let vel = c.velocities()?;
    let mut worst = 0.0f64;
    for i in 1..n - 1 {
        for beta in 1..=c.group.center_dim() {
            worst = worst.max(dual_form(beta, &vel[i], &c.points[i])?.abs());
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(i: usize) -> [f64; 4] {
        let mut v = [0.0; 4];
        v[i] = 1.0;
        v
    }

    #[test]
    fn heisenberg_law_matches_hand_evaluation() {
        let p = GroupPoint::heisenberg(1.0, 0.0, 0.0);
        let q = GroupPoint::heisenberg(0.0, 1.0, 0.0);
        let r = multiply(&p, &q).unwrap();
        assert_eq!(r.as_slice(), &[1.0, 1.0, -0.5]);
    }

    #[test]
    fn quaternion_law_matches_hand_evaluation() {
        // (𝓘₁e₁, e₂) = -1, (𝓘₂e₁, e₂) = 0, (𝓘₃e₁, e₂) = 0
        let p = GroupPoint::quaternion(e(0), [0.0; 3]);
        let q = GroupPoint::quaternion(e(1), [0.0; 3]);
        let r = multiply(&p, &q).unwrap();
        assert_eq!(r.x(), &[1.0, 1.0, 0.0, 0.0]);
        assert_eq!(r.z(), &[-0.5, 0.0, 0.0]);
    }

    #[test]
    fn identity_and_inverse() {
        let p = GroupPoint::heisenberg(1.0, 2.0, 3.0);
        let e = GroupPoint::identity(GroupId::HeisenbergL);
        assert_eq!(multiply(&p, &e).unwrap(), p);
        assert_eq!(inverse(&p).as_slice(), &[-1.0, -2.0, -3.0]);
        assert_eq!(inverse(&e), e);
        assert_eq!(multiply(&p, &inverse(&p)).unwrap(), e);
    }

    #[test]
    fn points_serialize_their_own_coordinates() {
        let p = GroupPoint::heisenberg(1.0, 2.0, 3.0);
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"group":"HeisenbergL","coords":[1.0,2.0,3.0]}"#);
        assert_eq!(serde_json::from_str::<GroupPoint>(&s).unwrap(), p);
        assert!(serde_json::from_str::<GroupPoint>(r#"{"group":"QuaternionH","coords":[1.0]}"#).is_err());
    }

    #[test]
    fn mixed_groups_are_rejected() {
        let p = GroupPoint::heisenberg(1.0, 2.0, 3.0);
        let q = GroupPoint::identity(GroupId::QuaternionH);
        assert!(matches!(multiply(&p, &q), Err(Error::GroupMismatch { .. })));
        assert!(matches!(
            GroupPoint::new(GroupId::QuaternionH, &[1.0, 2.0], &[0.0; 3]),
            Err(Error::Dimension { .. })
        ));
    }

    #[test]
    fn quaternion_units_are_skew_and_anticommute() {
        let mul = |a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]| {
            let mut m = [[0.0; 4]; 4];
            for i in 0..4 {
                for j in 0..4 {
                    m[i][j] = (0..4).map(|k| a[i][k] * b[k][j]).sum();
                }
            }
            m
        };
        for (i, a) in QUATERNION_UNITS.iter().enumerate() {
            for r in 0..4 {
                for c in 0..4 {
                    assert_eq!(a[r][c], -a[c][r]);
                    assert!(a[r][c] == 0.0 || a[r][c].abs() == 1.0);
                }
            }
            let sq = mul(a, a);
            for r in 0..4 {
                for c in 0..4 {
                    assert_eq!(sq[r][c], if r == c { -1.0 } else { 0.0 });
                }
            }
            for (j, b) in QUATERNION_UNITS.iter().enumerate() {
                if i != j {
                    let ab = mul(a, b);
                    let ba = mul(b, a);
                    for r in 0..4 {
                        for c in 0..4 {
                            assert_eq!(ab[r][c], -ba[r][c]);
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn frame_fields_match_reference_components() {
        let origin = GroupPoint::identity(GroupId::QuaternionH);
        let x1 = frame_coefficients(&FrameVector {
            kind: Frame::X(1),
            base: origin,
        })
        .unwrap();
        assert_eq!(x1.as_slice(), &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);

        let p = GroupPoint::quaternion(e(1), [0.0; 3]);
        let x1 = frame_coefficients(&FrameVector {
            kind: Frame::X(1),
            base: p,
        })
        .unwrap();
        assert_eq!(x1.as_slice(), &[1.0, 0.0, 0.0, 0.0, 0.5, 0.0, 0.0]);

        let q = GroupPoint::quaternion([0.3, -1.0, 2.0, 0.7], [1.0, 2.0, 3.0]);
        let z2 = frame_coefficients(&FrameVector {
            kind: Frame::Z(2),
            base: q,
        })
        .unwrap();
        assert_eq!(z2.as_slice(), &[0.0, 0.0, 0.0, 0.0, 0.0, 1.0, 0.0]);

        // Full reference table at a generic point.
        let [a, b, c, d] = [0.3, -1.0, 2.0, 0.7];
        let reference = [
            [0.5 * b, -0.5 * d, -0.5 * c],
            [-0.5 * a, -0.5 * c, 0.5 * d],
            [0.5 * d, 0.5 * b, 0.5 * a],
            [-0.5 * c, 0.5 * a, -0.5 * b],
        ];
        for (alpha, row) in reference.iter().enumerate() {
            let v = frame_coefficients(&FrameVector {
                kind: Frame::X(alpha + 1),
                base: q,
            })
            .unwrap();
            assert_eq!(v.dz(), row);
        }
        assert!(frame_coefficients(&FrameVector {
            kind: Frame::X(5),
            base: q
        })
        .is_err());
    }

    #[test]
    fn brackets_match_commutation_table() {
        use Bracket::*;
        let g = GroupId::QuaternionH;
        let table = [
            ((1, 2), Center { index: 1, sign: -1 }),
            ((1, 3), Center { index: 3, sign: 1 }),
            ((1, 4), Center { index: 2, sign: 1 }),
            ((2, 3), Center { index: 2, sign: 1 }),
            ((2, 4), Center { index: 3, sign: -1 }),
            ((3, 4), Center { index: 1, sign: -1 }),
        ];
        for ((i, j), expected) in table {
            assert_eq!(bracket(g, i, j).unwrap(), expected);
        }
        for i in 1..=4 {
            assert_eq!(bracket(g, i, i).unwrap(), Zero);
        }
        assert_eq!(
            bracket(GroupId::HeisenbergL, 1, 2).unwrap(),
            Center { index: 1, sign: -1 }
        );
    }

    #[test]
    fn dual_forms() {
        let base = GroupPoint::quaternion(e(0), [0.0; 3]);
        let w = TangentVector::new(GroupId::QuaternionH, &[0.0, 0.5, 0.0, 0.0], &[1.0, 0.0, 0.0])
            .unwrap();
        assert!((dual_form(1, &w, &base).unwrap() - 1.25).abs() < 1e-15);

        let base = GroupPoint::quaternion([0.4, -1.2, 0.8, 2.0], [1.0, -3.0, 0.5]);
        for alpha in 1..=4 {
            let x = frame_coefficients(&FrameVector {
                kind: Frame::X(alpha),
                base,
            })
            .unwrap();
            for beta in 1..=3 {
                assert!(dual_form(beta, &x, &base).unwrap().abs() < 1e-15);
            }
        }
        for gamma in 1..=3 {
            let zg = frame_coefficients(&FrameVector {
                kind: Frame::Z(gamma),
                base,
            })
            .unwrap();
            for beta in 1..=3 {
                let expected = if beta == gamma { 1.0 } else { 0.0 };
                assert_eq!(dual_form(beta, &zg, &base).unwrap(), expected);
            }
        }
    }

    #[test]
    fn rays_are_horizontal_and_z_axis_is_not() {
        let v = [0.9, -0.3, 0.2, 0.5];
        let ray = |n| {
            DiscreteCurve::sample(0.0, 1.0, n, |t| {
                GroupPoint::quaternion([t * v[0], t * v[1], t * v[2], t * v[3]], [0.0; 3])
            })
            .unwrap()
        };
        assert!(horizontality_defect(&ray(11)).unwrap() < 1e-14);
        assert!(horizontality_defect(&ray(101)).unwrap() < 1e-14);

        let zaxis = DiscreteCurve::sample(0.0, 1.0, 21, |t| {
            GroupPoint::quaternion([0.0; 4], [t, 0.0, 0.0])
        })
        .unwrap();
        assert!((horizontality_defect(&zaxis).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn curve_validation() {
        let p = GroupPoint::identity(GroupId::HeisenbergL);
        assert!(DiscreteCurve::new(vec![0.0], vec![p]).is_err());
        assert!(DiscreteCurve::new(vec![0.0, 0.0], vec![p, p]).is_err());
        let two = DiscreteCurve::new(vec![0.0, 1.0], vec![p, p]).unwrap();
        assert!(horizontality_defect(&two).is_err());
    }

    #[test]
    fn nonuniform_differences_are_exact_on_quadratics() {
        let times = vec![0.0, 0.1, 0.35, 0.4, 0.9, 1.0];
        let points = times
            .iter()
            .map(|&t| GroupPoint::heisenberg(t * t, 3.0 * t, 1.0 - t * t))
            .collect();
        let c = DiscreteCurve::new(times.clone(), points).unwrap();
        for (v, t) in c.velocities().unwrap().iter().zip(&times) {
            assert!((v.dx()[0] - 2.0 * t).abs() < 1e-12);
            assert!((v.dx()[1] - 3.0).abs() < 1e-12);
            assert!((v.dz()[0] + 2.0 * t).abs() < 1e-12);
        }
    }
}
