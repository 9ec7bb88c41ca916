//! Runge-Kutta integration of the geodesic Hamiltonian systems and of
//! horizontal control systems.
//!
//! Both groups share one Hamiltonian. With `w_α = ξ_α + ½ Σ_β θ_β (J_β x)_α`
//! (the covector paired with `X_α`) it reads `H = ½ Σ ε_α w_α²`,
//! `ε = (-1, 1, 1, 1)`, and the equations of motion are
//!
//! ```text
//! ẋ_α = ε_α w_α,   ż_β = ½ (J_β x, ẋ),   ξ̇ = ½ Σ_β θ_β J_β ẋ,   θ̇ = 0.
//! ```
//!
//! `θ` never enters the state update, so it is constant to the bit.

use serde::{Deserialize, Serialize};

use crate::causal::{classify_coeffs, lorentz_norm2, CausalClass};
use crate::error::{Error, Result};
use crate::group::{DiscreteCurve, GroupId, GroupPoint, StructureConstants};

/// Relative tolerance under which `Q(ċ, ċ)` is reported as null on paths.
pub const NULL_TOL: f64 = 1e-12;

/// Position plus the momenta `(ξ, θ)` dual to `x` and `z`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CovectorState {
    point: GroupPoint,
    xi: [f64; 4],
    theta: [f64; 3],
}

impl CovectorState {
    pub fn new(point: GroupPoint, xi: &[f64], theta: &[f64]) -> Result<Self> {
        let g = point.group();
        if xi.len() != g.horizontal_dim() {
            return Err(Error::Dimension {
                group: g,
                expected: g.horizontal_dim(),
                got: xi.len(),
            });
        }
        if theta.len() != g.center_dim() {
            return Err(Error::Dimension {
                group: g,
                expected: g.center_dim(),
                got: theta.len(),
            });
        }
        let mut x = [0.0; 4];
        let mut t = [0.0; 3];
        x[..xi.len()].copy_from_slice(xi);
        t[..theta.len()].copy_from_slice(theta);
        Ok(CovectorState {
            point,
            xi: x,
            theta: t,
        })
    }

    /// The state at the identity whose geodesic leaves with horizontal
    /// velocity `v0`: `ξ = (-v₁, v₂, ..)`.
    pub fn from_velocity(group: GroupId, v0: &[f64], theta: &[f64]) -> Result<Self> {
        let mut xi = v0.to_vec();
        if let Some(first) = xi.first_mut() {
            *first = -*first;
        }
        Self::new(GroupPoint::identity(group), &xi, theta)
    }

    pub fn group(&self) -> GroupId {
        self.point.group()
    }

    pub fn point(&self) -> &GroupPoint {
        &self.point
    }

    pub fn xi(&self) -> &[f64] {
        &self.xi[..self.group().horizontal_dim()]
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta[..self.group().center_dim()]
    }

    /// Frame coefficients of `ẋ` given by the Hamiltonian equations.
    pub fn horizontal_velocity(&self) -> Vec<f64> {
        let g = self.group();
        let w = frame_momenta(g, self.point.x(), &self.xi, &self.theta);
        (0..g.horizontal_dim())
            .map(|a| if a == 0 { -w[0] } else { w[a] })
            .collect()
    }
}

fn frame_momenta(g: GroupId, x: &[f64], xi: &[f64; 4], theta: &[f64; 3]) -> [f64; 4] {
    let sc = StructureConstants::of(g);
    let mut w = *xi;
    for (beta, th) in theta.iter().enumerate().take(g.center_dim()) {
        let jx = sc.apply(beta, x);
        for a in 0..g.horizontal_dim() {
            w[a] += 0.5 * th * jx[a];
        }
    }
    w
}

/// `H = ½ Σ ε_α w_α²`.
pub fn hamiltonian(state: &CovectorState) -> f64 {
    let v = state.horizontal_velocity();
    0.5 * lorentz_norm2(&v)
}

// Packed phase-space layout: x in 0..4, z in 4..7, ξ in 7..11, θ in 11..14.
type Phase = [f64; 14];

fn pack(s: &CovectorState) -> Phase {
    let mut y = [0.0; 14];
    let g = s.group();
    y[..g.horizontal_dim()].copy_from_slice(s.point.x());
    y[4..4 + g.center_dim()].copy_from_slice(s.point.z());
    y[7..11].copy_from_slice(&s.xi);
    y[11..14].copy_from_slice(&s.theta);
    y
}

fn unpack(g: GroupId, y: &Phase) -> CovectorState {
    let point = GroupPoint::new(g, &y[..g.horizontal_dim()], &y[4..4 + g.center_dim()])
        .expect("dimensions follow the group");
    CovectorState {
        point,
        xi: y[7..11].try_into().unwrap(),
        theta: y[11..14].try_into().unwrap(),
    }
}

fn hamiltonian_field(g: GroupId, y: &Phase) -> Phase {
    let n = g.horizontal_dim();
    let sc = StructureConstants::of(g);
    let x = &y[..4];
    let xi: [f64; 4] = y[7..11].try_into().unwrap();
    let theta: [f64; 3] = y[11..14].try_into().unwrap();
    let w = frame_momenta(g, &x[..n], &xi, &theta);
    let mut d = [0.0; 14];
    for a in 0..n {
        d[a] = if a == 0 { -w[0] } else { w[a] };
    }
    for beta in 0..g.center_dim() {
        d[4 + beta] = 0.5 * sc.skew_form(beta, &x[..n], &d[..n]);
        let jv = sc.apply(beta, &d[..n]);
        for a in 0..n {
            d[7 + a] += 0.5 * theta[beta] * jv[a];
        }
    }
    d
}

fn axpy<const N: usize>(y: &[f64; N], h: f64, k: &[f64; N]) -> [f64; N] {
    std::array::from_fn(|i| y[i] + h * k[i])
}

fn rk4_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64) -> [f64; N]
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let k1 = f(t, y);
    let k2 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k1));
    let k3 = f(t + 0.5 * h, &axpy(y, 0.5 * h, &k2));
    let k4 = f(t + h, &axpy(y, h, &k3));
    std::array::from_fn(|i| y[i] + h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]))
}

// Dormand-Prince 5(4) tableau.
const DP_C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const DP_A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const DP_B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const DP_B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// One Dormand-Prince step; returns the fifth-order solution and the
/// max-norm error estimate scaled by `atol + rtol·|y|`.
fn dopri_step<const N: usize, F>(f: &F, t: f64, y: &[f64; N], h: f64, tol: f64) -> ([f64; N], f64)
where
    F: Fn(f64, &[f64; N]) -> [f64; N],
{
    let mut k = [[0.0; N]; 7];
    for s in 0..7 {
        let mut ys = *y;
        for (j, kj) in k.iter().enumerate().take(s) {
            let a = DP_A[s][j];
            if a != 0.0 {
                for i in 0..N {
                    ys[i] += h * a * kj[i];
                }
            }
        }
        k[s] = f(t + DP_C[s] * h, &ys);
    }
    let mut y5 = *y;
    let mut err = 0.0f64;
    for i in 0..N {
        let mut d5 = 0.0;
        let mut d4 = 0.0;
        for s in 0..7 {
            d5 += DP_B5[s] * k[s][i];
            d4 += DP_B4[s] * k[s][i];
        }
        y5[i] += h * d5;
        let sc = tol + tol * y[i].abs().max(y5[i].abs());
        err = err.max((h * (d5 - d4)).abs() / sc);
    }
    (y5, err)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Rk4,
    Rk45,
}

/// Integration settings. `steps` is the RK4 step count over the span, rounded
/// up to a multiple of the number of sample intervals; `tol` drives RK45.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct IntegrationConfig {
    pub method: Method,
    pub t0: f64,
    pub t1: f64,
    pub steps: usize,
    pub tol: f64,
    pub samples: usize,
}

impl Default for IntegrationConfig {
    fn default() -> Self {
        IntegrationConfig {
            method: Method::Rk4,
            t0: 0.0,
            t1: 1.0,
            steps: 1000,
            tol: 1e-10,
            samples: 101,
        }
    }
}

impl IntegrationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.t0.is_finite() && self.t1.is_finite() && self.t1 > self.t0) {
            return Err(Error::Config(format!("bad time span [{}, {}]", self.t0, self.t1)));
        }
        if self.samples < 2 {
            return Err(Error::Config("need at least two samples".into()));
        }
        if self.steps == 0 {
            return Err(Error::Config("step count must be positive".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Config(format!("tolerance {} must be positive", self.tol)));
        }
        Ok(())
    }

    pub fn sample_times(&self) -> Vec<f64> {
        let n = self.samples - 1;
        (0..=n)
            .map(|i| {
                if i == n {
                    self.t1
                } else {
                    self.t0 + (self.t1 - self.t0) * i as f64 / n as f64
                }
            })
            .collect()
    }

    fn substeps(&self) -> usize {
        self.steps.div_ceil(self.samples - 1)
    }
}

/// One sample of a geodesic: position, frame coefficients of the velocity,
/// causal class, Hamiltonian value and length accumulated from the start.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathSample {
    pub t: f64,
    pub point: GroupPoint,
    pub velocity: Vec<f64>,
    pub theta: Vec<f64>,
    pub class: CausalClass,
    pub hamiltonian: f64,
    pub length: f64,
}

impl PathSample {
    /// `Q(ċ, ċ)` at this sample.
    pub fn speed2(&self) -> f64 {
        lorentz_norm2(&self.velocity)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicPath {
    group: GroupId,
    samples: Vec<PathSample>,
}

impl GeodesicPath {
    /// Assembles a path from raw samples `(t, point, velocity, θ)`. Classes
    /// come from the velocity, `H = ½ Q(ċ, ċ)`, and the length is the
    /// cumulative trapezoidal integral of `|Q(ċ, ċ)|^{1/2}`.
    pub fn from_samples<I>(group: GroupId, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (f64, GroupPoint, Vec<f64>, Vec<f64>)>,
    {
        let mut samples: Vec<PathSample> = Vec::new();
        for (t, point, velocity, theta) in raw {
            group.expect(point.group())?;
            if velocity.len() != group.horizontal_dim() {
                return Err(Error::Dimension {
                    group,
                    expected: group.horizontal_dim(),
                    got: velocity.len(),
                });
            }
            if let Some(prev) = samples.last() {
                if !(t > prev.t) {
                    return Err(Error::Curve("times must be strictly increasing".into()));
                }
            }
            let q = lorentz_norm2(&velocity);
            let length = match samples.last() {
                Some(prev) => prev.length + 0.5 * (t - prev.t) * (prev.speed2().abs().sqrt() + q.abs().sqrt()),
                None => 0.0,
            };
            samples.push(PathSample {
                t,
                point,
                class: classify_coeffs(&velocity, NULL_TOL),
                hamiltonian: 0.5 * q,
                velocity,
                theta,
                length,
            });
        }
        if samples.len() < 2 {
            return Err(Error::Curve("need at least two samples".into()));
        }
        Ok(GeodesicPath { group, samples })
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn samples(&self) -> &[PathSample] {
        &self.samples
    }

    pub fn first(&self) -> &PathSample {
        &self.samples[0]
    }

    pub fn last(&self) -> &PathSample {
        self.samples.last().expect("paths have at least two samples")
    }

    pub fn length(&self) -> f64 {
        self.last().length
    }

    pub fn curve(&self) -> DiscreteCurve {
        DiscreteCurve::new(
            self.samples.iter().map(|s| s.t).collect(),
            self.samples.iter().map(|s| s.point).collect(),
        )
        .expect("path samples are a valid curve")
    }

    /// Largest coordinate deviation from `other` over matching samples.
    pub fn max_deviation(&self, other: &GeodesicPath) -> Result<f64> {
        self.group.expect(other.group)?;
        if self.samples.len() != other.samples.len() {
            return Err(Error::Curve(format!(
                "{} samples against {}",
                self.samples.len(),
                other.samples.len()
            )));
        }
        Ok(self
            .samples
            .iter()
            .zip(&other.samples)
            .map(|(a, b)| a.point.max_abs_diff(&b.point))
            .fold(0.0, f64::max))
    }
}

/// Integrates the geodesic equations from `init`.
pub fn integrate(init: &CovectorState, cfg: &IntegrationConfig) -> Result<GeodesicPath> {
    cfg.validate()?;
    let g = init.group();
    let f = |_t: f64, y: &Phase| hamiltonian_field(g, y);
    let times = cfg.sample_times();
    let mut y = pack(init);
    let mut states = Vec::with_capacity(times.len());
    states.push(y);
    match cfg.method {
        Method::Rk4 => {
            let m = cfg.substeps();
            for w in times.windows(2) {
                let h = (w[1] - w[0]) / m as f64;
                for j in 0..m {
                    y = rk4_step(&f, w[0] + j as f64 * h, &y, h);
                }
                check_finite(&y, w[1])?;
                states.push(y);
            }
        }
        Method::Rk45 => {
            let mut h = (cfg.t1 - cfg.t0) / cfg.steps as f64;
            let hmin = 1e-14 * (cfg.t1 - cfg.t0);
            let mut t = cfg.t0;
            for &target in &times[1..] {
                while t < target {
                    let clipped = h >= target - t;
                    let step = if clipped { target - t } else { h };
                    let (y5, err) = dopri_step(&f, t, &y, step, cfg.tol);
                    if !err.is_finite() {
                        return Err(Error::NonFinite { t });
                    }
                    let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                    if err <= 1.0 {
                        t = if clipped { target } else { t + step };
                        y = y5;
                        // a step shortened to land on a sample says nothing about h
                        h = if clipped { h.max(step * factor) } else { step * factor };
                    } else {
                        h = step * factor;
                    }
                    if h < hmin {
                        return Err(Error::StepUnderflow { t });
                    }
                }
                check_finite(&y, t)?;
                states.push(y);
            }
        }
    }
    GeodesicPath::from_samples(
        g,
        times.iter().zip(&states).map(|(&t, y)| {
            let s = unpack(g, y);
            (t, s.point, s.horizontal_velocity(), s.theta().to_vec())
        }),
    )
}

fn check_finite(y: &[f64], t: f64) -> Result<()> {
    if y.iter().all(|v| v.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite { t })
    }
}

/// Piecewise-constant frame controls: `values[i]` acts on
/// `[breakpoints[i], breakpoints[i+1])`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Controls {
    group: GroupId,
    breakpoints: Vec<f64>,
    values: Vec<Vec<f64>>,
}

impl Controls {
    pub fn new(group: GroupId, breakpoints: Vec<f64>, values: Vec<Vec<f64>>) -> Result<Self> {
        if breakpoints.len() != values.len() + 1 || values.is_empty() {
            return Err(Error::Config(format!(
                "{} breakpoints for {} control segments",
                breakpoints.len(),
                values.len()
            )));
        }
        if breakpoints.iter().any(|t| !t.is_finite()) || breakpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Config("breakpoints must be strictly increasing".into()));
        }
        for u in &values {
            if u.len() != group.horizontal_dim() {
                return Err(Error::Dimension {
                    group,
                    expected: group.horizontal_dim(),
                    got: u.len(),
                });
            }
            if u.iter().any(|c| !c.is_finite()) {
                return Err(Error::Config("controls must be finite".into()));
            }
        }
        Ok(Controls {
            group,
            breakpoints,
            values,
        })
    }

    /// A single control held on `[t0, t1]`.
    pub fn constant(group: GroupId, t0: f64, t1: f64, u: &[f64]) -> Result<Self> {
        Self::new(group, vec![t0, t1], vec![u.to_vec()])
    }

    pub fn group(&self) -> GroupId {
        self.group
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Vec<f64>] {
        &self.values
    }

    pub fn span(&self) -> (f64, f64) {
        (self.breakpoints[0], *self.breakpoints.last().unwrap())
    }

    fn segment(&self, t: f64) -> usize {
        match self.breakpoints.partition_point(|&b| b <= t) {
            0 => 0,
            k => (k - 1).min(self.values.len() - 1),
        }
    }
}

/// Integrates `ẋ = u(t)`, `ż_β = ½ (J_β x, u)` from the identity and samples
/// the result on `cfg.samples` uniform times over the controls' span. Steps
/// never straddle a breakpoint, so piecewise-constant controls are
/// integrated exactly up to rounding. `cfg.t0`, `cfg.t1` and `cfg.method`
/// are ignored.
pub fn integrate_controls(controls: &Controls, cfg: &IntegrationConfig) -> Result<DiscreteCurve> {
    let (t0, t1) = controls.span();
    let cfg = IntegrationConfig { t0, t1, ..*cfg };
    cfg.validate()?;
    let g = controls.group;
    let n = g.horizontal_dim();
    let sc = StructureConstants::of(g);
    let times = cfg.sample_times();
    let mut events: Vec<f64> = times.iter().chain(controls.breakpoints.iter()).copied().collect();
    events.sort_by(f64::total_cmp);
    events.dedup();
    let hmax = (t1 - t0) / cfg.steps as f64;

    let mut y = [0.0f64; 7];
    let mut points = vec![GroupPoint::identity(g)];
    let mut next_sample = 1;
    for w in events.windows(2) {
        let u = &controls.values[controls.segment(0.5 * (w[0] + w[1]))];
        let f = |_t: f64, y: &[f64; 7]| {
            let mut d = [0.0; 7];
            d[..n].copy_from_slice(u);
            for beta in 0..g.center_dim() {
                d[4 + beta] = 0.5 * sc.skew_form(beta, &y[..n], u);
            }
            d
        };
        let m = ((w[1] - w[0]) / hmax).ceil().max(1.0) as usize;
        let h = (w[1] - w[0]) / m as f64;
        for j in 0..m {
            y = rk4_step(&f, w[0] + j as f64 * h, &y, h);
        }
        check_finite(&y, w[1])?;
        if next_sample < times.len() && w[1] == times[next_sample] {
            points.push(GroupPoint::new(g, &y[..n], &y[4..4 + g.center_dim()])?);
            next_sample += 1;
        }
    }
    DiscreteCurve::new(times, points)
}

/// Drift of the first integrals along a path.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConservationReport {
    pub h_initial: f64,
    /// `max |H(t) - H(0)|` over `max(|H(0)|, ½|ċ(0)|²_E)`.
    pub h_relative_drift: f64,
    /// `max |θ(t) - θ(0)|`.
    pub theta_drift: f64,
}

pub fn conservation_report(path: &GeodesicPath) -> ConservationReport {
    let first = path.first();
    let h0 = first.hamiltonian;
    let euclid: f64 = first.velocity.iter().map(|v| v * v).sum();
    let scale = h0.abs().max(0.5 * euclid).max(f64::MIN_POSITIVE);
    let mut h_drift = 0.0f64;
    let mut theta_drift = 0.0f64;
    for s in path.samples() {
        h_drift = h_drift.max((s.hamiltonian - h0).abs());
        for (a, b) in s.theta.iter().zip(&first.theta) {
            theta_drift = theta_drift.max((a - b).abs());
        }
    }
    ConservationReport {
        h_initial: h0,
        h_relative_drift: h_drift / scale,
        theta_drift,
    }
}
