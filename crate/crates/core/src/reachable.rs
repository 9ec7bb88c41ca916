//! The functions `η_α`, the regions `Γ_α` and `A_α` of **H**, the straight
//! timelike rays from the origin, the Heisenberg slices, and sampling checks
//! that future-directed curves from the origin end where they should.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::causal::lorentz_norm2;
use crate::error::{Error, Result};
use crate::group::{horizontality_defect, DiscreteCurve, GroupId, GroupPoint};
use crate::heisenberg::HeisIvp;
use crate::integrator::{integrate_controls, Controls, IntegrationConfig};
use crate::quaternion::{solve, QuatIvp};

/// `4/√3`, the largest `|α|` for which `η_α` is considered.
pub const ALPHA_MAX: f64 = 2.309_401_076_758_503;

/// A valid `α`, `|α| ≤ 4/√3`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct EtaParams(f64);

impl EtaParams {
    pub fn new(alpha: f64) -> Result<Self> {
        if alpha.is_finite() && alpha.abs() <= ALPHA_MAX {
            Ok(EtaParams(alpha))
        } else {
            Err(Error::OutOfRange(format!("alpha = {alpha} outside [-4/√3, 4/√3]")))
        }
    }

    pub fn alpha(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for EtaParams {
    type Error = Error;
    fn try_from(a: f64) -> Result<Self> {
        Self::new(a)
    }
}

impl From<EtaParams> for f64 {
    fn from(p: EtaParams) -> f64 {
        p.0
    }
}

/// The three coordinate planes on which **H** reduces to `H¹_L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Slice {
    /// `x₃ = x₄ = 0`, reducing to `(x₁, x₂, z₁)`.
    X3X4,
    /// `x₂ = x₃ = 0`, reducing to `(x₁, x₄, -z₂)`.
    X2X3,
    /// `x₂ = x₄ = 0`, reducing to `(x₁, x₃, -z₃)`.
    X2X4,
}

impl Slice {
    pub const ALL: [Slice; 3] = [Slice::X3X4, Slice::X2X3, Slice::X2X4];

    /// Zero-based indices of the vanishing `x` coordinates.
    pub fn zero_x(self) -> [usize; 2] {
        match self {
            Slice::X3X4 => [2, 3],
            Slice::X2X3 => [1, 2],
            Slice::X2X4 => [1, 3],
        }
    }

    /// Zero-based index of the free spatial `x` coordinate.
    pub fn free_x(self) -> usize {
        match self {
            Slice::X3X4 => 1,
            Slice::X2X3 => 3,
            Slice::X2X4 => 2,
        }
    }

    /// Zero-based index of the surviving `z` coordinate.
    pub fn live_z(self) -> usize {
        match self {
            Slice::X3X4 => 0,
            Slice::X2X3 => 1,
            Slice::X2X4 => 2,
        }
    }

    /// `z_H = sign · z_live` and `θ_H = sign · θ_live`.
    pub fn sign(self) -> f64 {
        match self {
            Slice::X3X4 => 1.0,
            Slice::X2X3 | Slice::X2X4 => -1.0,
        }
    }

    /// The quaternion initial condition whose geodesic stays on the slice
    /// and reduces to the Heisenberg geodesic of `ivp`.
    pub fn embed_ivp(self, ivp: &HeisIvp) -> QuatIvp {
        let mut v0 = [0.0; 4];
        v0[0] = ivp.v0[0];
        v0[self.free_x()] = ivp.v0[1];
        let mut theta = [0.0; 3];
        theta[self.live_z()] = self.sign() * ivp.theta;
        QuatIvp::new(v0, theta)
    }

    /// The quaternion point with the given Heisenberg coordinates.
    pub fn embed_point(self, p: &GroupPoint) -> Result<GroupPoint> {
        GroupId::HeisenbergL.expect(p.group())?;
        let mut x = [0.0; 4];
        x[0] = p.x()[0];
        x[self.free_x()] = p.x()[1];
        let mut z = [0.0; 3];
        z[self.live_z()] = self.sign() * p.z()[0];
        Ok(GroupPoint::quaternion(x, z))
    }

    /// Largest off-slice coordinate of `p`.
    pub fn off_slice(self, p: &GroupPoint) -> f64 {
        let zx = self.zero_x().map(|i| p.x()[i].abs());
        let zz = (0..3).filter(|&i| i != self.live_z()).map(|i| p.z()[i].abs());
        zz.fold(zx[0].max(zx[1]), f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum RegionId {
    /// `Γ_α = {η_α < 0, x₁ > 0}`.
    Gamma(EtaParams),
    /// `A_α = {(-1 + 3α²/16)(x₁² - |y|²) + (3α²/8)|y × n|² < 0, x₁ > 0}`.
    A(EtaParams),
    /// `Γ₄ ∩ B` for the slice `B`.
    BSlice(Slice),
}

fn require_quaternion(p: &GroupPoint) -> Result<()> {
    if p.group() == GroupId::QuaternionH {
        Ok(())
    } else {
        Err(Error::Unsupported(p.group()))
    }
}

/// `η_α = -x₁² + x₂² + x₃² + x₄² + α (|z₁| + |z₂| + |z₃|)` for any real `α`.
pub fn eta(alpha: f64, p: &GroupPoint) -> Result<f64> {
    require_quaternion(p)?;
    let x = p.x();
    Ok(lorentz_norm2(x) + alpha * p.z().iter().map(|z| z.abs()).sum::<f64>())
}

fn eta0(p: &GroupPoint) -> f64 {
    lorentz_norm2(p.x())
}

/// The quadratic form defining `A_α`, with `y = (x₂, x₃, x₄)` and
/// `n = (1, -1, -1)/√3`.
pub fn a_form(alpha: f64, p: &GroupPoint) -> Result<f64> {
    require_quaternion(p)?;
    let x = p.x();
    let y = [x[1], x[2], x[3]];
    let n = [1.0, -1.0, -1.0].map(|v: f64| v / 3f64.sqrt());
    let cross = [
        y[1] * n[2] - y[2] * n[1],
        y[2] * n[0] - y[0] * n[2],
        y[0] * n[1] - y[1] * n[0],
    ];
    let y2 = y.iter().map(|v| v * v).sum::<f64>();
    let c2 = cross.iter().map(|v| v * v).sum::<f64>();
    let a2 = alpha * alpha;
    Ok((-1.0 + 3.0 * a2 / 16.0) * (x[0] * x[0] - y2) + 3.0 * a2 / 8.0 * c2)
}

/// Strict membership; boundary points are outside.
pub fn in_region(r: &RegionId, p: &GroupPoint) -> Result<bool> {
    require_quaternion(p)?;
    let x1 = p.x()[0];
    Ok(match r {
        RegionId::Gamma(a) => eta(a.alpha(), p)? < 0.0 && x1 > 0.0,
        RegionId::A(a) => a_form(a.alpha(), p)? < 0.0 && x1 > 0.0,
        RegionId::BSlice(s) => s.zero_x().iter().all(|&i| p.x()[i] == 0.0) && eta(4.0, p)? < 0.0 && x1 > 0.0,
    })
}

/// Membership in the closure, with slack `tol`.
pub fn in_closure(r: &RegionId, p: &GroupPoint, tol: f64) -> Result<bool> {
    require_quaternion(p)?;
    let x1 = p.x()[0];
    Ok(match r {
        RegionId::Gamma(a) => eta(a.alpha(), p)? <= tol && x1 >= -tol,
        RegionId::A(a) => a_form(a.alpha(), p)? <= tol && x1 >= -tol,
        RegionId::BSlice(s) => {
            s.zero_x().iter().all(|&i| p.x()[i].abs() <= tol) && eta(4.0, p)? <= tol && x1 >= -tol
        }
    })
}

/// Hyperbolic angle `φ` and direction angles `ψ ∈ [0, 2π]`, `ϑ ∈ [0, π]`
/// of a straight timelike ray.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RayParams {
    pub phi: f64,
    pub psi: f64,
    pub vartheta: f64,
}

impl RayParams {
    pub fn new(phi: f64, psi: f64, vartheta: f64) -> Result<Self> {
        use std::f64::consts::PI;
        if !phi.is_finite() || !(0.0..=2.0 * PI).contains(&psi) || !(0.0..=PI).contains(&vartheta) {
            return Err(Error::OutOfRange(format!("ray angles φ={phi}, ψ={psi}, ϑ={vartheta}")));
        }
        Ok(RayParams { phi, psi, vartheta })
    }

    /// Unit timelike velocity of the ray.
    pub fn velocity(&self) -> [f64; 4] {
        let s = self.phi.sinh();
        [
            self.phi.cosh(),
            s * self.psi.sin() * self.vartheta.cos(),
            s * self.psi.sin() * self.vartheta.sin(),
            s * self.psi.cos(),
        ]
    }
}

/// The point at time `t > 0` of the ray `x = t·(cosh φ, sinh φ ·ω)`, `z = 0`.
pub fn ray_point(r: &RayParams, t: f64) -> Result<GroupPoint> {
    if !(t > 0.0) {
        return Err(Error::OutOfRange(format!("ray time {t} must be positive")));
    }
    Ok(GroupPoint::quaternion(r.velocity().map(|v| v * t), [0.0; 3]))
}

/// Projects a point of a slice to `H¹_L`; fails if it is more than `tol` off
/// the slice.
pub fn bslice_reduce(slice: Slice, p: &GroupPoint, tol: f64) -> Result<GroupPoint> {
    require_quaternion(p)?;
    let off = slice.off_slice(p);
    if off > tol {
        return Err(Error::OutOfRange(format!("point is {off:e} off the slice {slice:?}")));
    }
    Ok(GroupPoint::heisenberg(
        p.x()[0],
        p.x()[slice.free_x()],
        slice.sign() * p.z()[slice.live_z()],
    ))
}

/// Kind of curves a sampler emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CurveKind {
    /// Timelike future directed.
    Timelike,
    /// Nonspacelike future directed, mixing timelike and null pieces.
    Nonspacelike,
}

/// A sampled curve from the origin with the frame coefficients of its
/// velocity (one entry per control segment or per sample).
#[derive(Debug, Clone, PartialEq)]
pub struct SampledCurve {
    pub curve: DiscreteCurve,
    pub velocities: Vec<Vec<f64>>,
    pub kind: CurveKind,
}

/// Relative slack in `Q(u, u) ≤ 0` accepted for null controls.
const NULL_SLACK: f64 = 1e-12;

fn sample_direction<R: Rng>(rng: &mut R, dims: &[usize]) -> [f64; 4] {
    loop {
        let mut d = [0.0; 4];
        for &i in dims {
            d[i] = rng.random_range(-1.0..1.0);
        }
        let n2: f64 = d.iter().map(|v| v * v).sum();
        if n2 > 1e-4 && n2 <= 1.0 {
            let n = n2.sqrt();
            return d.map(|v| v / n);
        }
    }
}

/// Random piecewise-constant future-directed controls: 8 to 64 segments of
/// random length, spatial part of norm `m ∈ [0, 1.5]` in a random direction,
/// and `u₁ = m + δ` with `δ ∈ [0.05, 1]` (timelike) or `δ = 0` (null). With
/// `slice` set, the spatial part stays in that slice.
pub fn random_controls<R: Rng>(rng: &mut R, kind: CurveKind, slice: Option<Slice>) -> Controls {
    let dims: Vec<usize> = match slice {
        None => vec![1, 2, 3],
        Some(s) => vec![s.free_x()],
    };
    let segments = rng.random_range(8..=64);
    let mut breakpoints = vec![0.0];
    let mut values = Vec::with_capacity(segments);
    for _ in 0..segments {
        let dt = rng.random_range(0.02..0.1);
        breakpoints.push(breakpoints.last().unwrap() + dt);
        let dir = sample_direction(rng, &dims);
        let null = kind == CurveKind::Nonspacelike && rng.random_bool(0.5);
        let m = if null { rng.random_range(0.1..1.5) } else { rng.random_range(0.0..1.5) };
        let delta = if null { 0.0 } else { rng.random_range(0.05..1.0) };
        let mut u: Vec<f64> = dir.iter().map(|d| d * m).collect();
        u[0] = if null { lorentz_norm2(&u).sqrt() } else { m + delta };
        values.push(u);
    }
    Controls::new(GroupId::QuaternionH, breakpoints, values).expect("valid by construction")
}

fn indexed_rng(seed: u64, index: usize) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng
}

/// Curve `index` of the control sampler with the given seed, sampled at
/// `samples` uniform times.
pub fn control_sample(seed: u64, index: usize, kind: CurveKind, slice: Option<Slice>, samples: usize) -> Result<SampledCurve> {
    let mut rng = indexed_rng(seed, index);
    let controls = random_controls(&mut rng, kind, slice);
    let cfg = IntegrationConfig {
        samples,
        steps: samples - 1,
        ..Default::default()
    };
    let curve = integrate_controls(&controls, &cfg)?;
    Ok(SampledCurve {
        curve,
        velocities: controls.values().to_vec(),
        kind,
    })
}

/// Curve `index` of the geodesic sampler: a timelike future-directed
/// initial velocity `v₁ = |v⃗| + δ` and random `θ ∈ [-1.5, 1.5]³`, on `[0, 1]`.
pub fn geodesic_sample(seed: u64, index: usize, samples: usize) -> Result<SampledCurve> {
    let mut rng = indexed_rng(seed, index);
    let dir = sample_direction(&mut rng, &[1, 2, 3]);
    let m = rng.random_range(0.0..1.5);
    let mut v0 = dir.map(|d| d * m);
    v0[0] = m + rng.random_range(0.05..1.0);
    let theta = std::array::from_fn(|_| rng.random_range(-1.5..1.5));
    let path = solve(&QuatIvp::new(v0, theta)).sample_path(1.0, samples)?;
    Ok(SampledCurve {
        curve: path.curve(),
        velocities: path.samples().iter().map(|s| s.velocity.clone()).collect(),
        kind: CurveKind::Timelike,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Violation {
    pub index: usize,
    pub endpoint: GroupPoint,
    pub reason: String,
}

/// Outcome of a sampling check; `violations` must be empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InclusionReport {
    pub region: RegionId,
    pub samples: usize,
    /// Endpoints that were tested against the region. For `A_α` only
    /// endpoints inside `A_α` are tested against `Γ_α`.
    pub tested: usize,
    pub violations: Vec<Violation>,
    /// Largest increase of `η₀` between consecutive samples of timelike curves.
    pub max_eta0_increase: f64,
    /// Largest `|(x₂, x₃, x₄)| - x₁` over all endpoints.
    pub max_cone_excess: f64,
    pub max_horizontality_defect: f64,
}

/// Slack for closure membership and for monotonicity of `η₀`.
pub const INCLUSION_TOL: f64 = 1e-6;

struct CurveCheck {
    tested: bool,
    violation: Option<Violation>,
    eta0_increase: f64,
    cone_excess: f64,
    defect: f64,
}

fn check_curve(region: &RegionId, index: usize, s: &SampledCurve) -> Result<CurveCheck> {
    for u in &s.velocities {
        let q = lorentz_norm2(u);
        let e2: f64 = u.iter().map(|v| v * v).sum();
        let ok = u[0] > 0.0
            && match s.kind {
                CurveKind::Timelike => q < 0.0,
                CurveKind::Nonspacelike => q <= NULL_SLACK * e2,
            };
        if !ok {
            return Err(Error::Sampler {
                index,
                reason: format!("velocity {u:?} is not {:?} future directed", s.kind),
            });
        }
    }
    let p = *s.curve.last();
    let x = p.x();
    let cone_excess = (x[1] * x[1] + x[2] * x[2] + x[3] * x[3]).sqrt() - x[0];
    let mut eta0_increase = f64::NEG_INFINITY;
    for w in s.curve.points().windows(2) {
        eta0_increase = eta0_increase.max(eta0(&w[1]) - eta0(&w[0]));
    }
    let defect = if s.curve.len() >= 3 { horizontality_defect(&s.curve)? } else { 0.0 };

    let mut reasons = Vec::new();
    let timelike = s.kind == CurveKind::Timelike;
    let tested = match region {
        RegionId::A(a) => {
            if in_region(region, &p)? {
                let gamma = RegionId::Gamma(*a);
                if !in_region(&gamma, &p)? {
                    reasons.push(format!("in A_{} but not in Gamma_{}", a.alpha(), a.alpha()));
                }
                true
            } else {
                false
            }
        }
        _ => {
            let inside = if timelike { in_region(region, &p)? } else { in_closure(region, &p, INCLUSION_TOL)? };
            if !inside {
                reasons.push(format!("endpoint outside {}", if timelike { "region" } else { "closure" }));
            }
            true
        }
    };
    if cone_excess > INCLUSION_TOL {
        reasons.push(format!("x1 below |y| by {cone_excess:e}"));
    }
    if timelike && eta0_increase > INCLUSION_TOL {
        reasons.push(format!("eta0 increased by {eta0_increase:e}"));
    }
    Ok(CurveCheck {
        tested,
        violation: (!reasons.is_empty()).then(|| Violation {
            index,
            endpoint: p,
            reason: reasons.join("; "),
        }),
        eta0_increase,
        cone_excess,
        defect,
    })
}

/// Draws `n` curves from `sampler` (in parallel; results are in index order)
/// and checks their endpoints against `region`:
///
/// * `Gamma`/`BSlice`: timelike endpoints strictly inside, nonspacelike ones
///   in the closure;
/// * `A(α)`: endpoints inside `A_α` must lie in `Γ_α`.
///
/// Every curve must also satisfy `x₁ ≥ |(x₂, x₃, x₄)|` at its end, and `η₀`
/// must be non-increasing along timelike curves, both up to
/// [`INCLUSION_TOL`]. Fails if the sampler emits a curve whose velocity is
/// not of the declared kind or not future directed.
pub fn verify_inclusion<F>(sampler: F, region: RegionId, n: usize) -> Result<InclusionReport>
where
    F: Fn(usize) -> Result<SampledCurve> + Sync,
{
    let checks: Vec<CurveCheck> = (0..n)
        .into_par_iter()
        .map(|i| check_curve(&region, i, &sampler(i)?))
        .collect::<Result<_>>()?;
    let mut report = InclusionReport {
        region,
        samples: n,
        tested: 0,
        violations: Vec::new(),
        max_eta0_increase: f64::NEG_INFINITY,
        max_cone_excess: f64::NEG_INFINITY,
        max_horizontality_defect: 0.0,
    };
    for c in checks {
        report.tested += c.tested as usize;
        report.max_eta0_increase = report.max_eta0_increase.max(c.eta0_increase);
        report.max_cone_excess = report.max_cone_excess.max(c.cone_excess);
        report.max_horizontality_defect = report.max_horizontality_defect.max(c.defect);
        report.violations.extend(c.violation);
    }
    Ok(report)
}
