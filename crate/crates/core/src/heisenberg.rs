//! Closed-form geodesics of the Lorentzian Heisenberg group `H¹_L` and the
//! two-point connection of the origin to timelike and spacelike targets.
//!
//! The momentum `θ` is kept signed. A geodesic from the origin with initial
//! velocity `(ẋ₀, ẏ₀)` is
//!
//! ```text
//! ẋ(t) = ẋ₀ cosh θt - ẏ₀ sinh θt,        ẏ(t) = ẏ₀ cosh θt - ẋ₀ sinh θt,
//! z(t) = ‖v₀‖² (θt - sinh θt) / (2θ²),   ‖v₀‖² = -ẋ₀² + ẏ₀²,
//! ```
//!
//! which is the textbook form with `|θ|` whenever `θ ≥ 0`. Negative `θ` is
//! what reaches targets on the other side of the plane `z = 0`.

use serde::{Deserialize, Serialize};

use crate::causal::{lorentz_norm2, Orientation};
use crate::error::{Error, Result};
use crate::group::{multiply, GroupId, GroupPoint};
use crate::integrator::GeodesicPath;
use crate::numeric::{coshm1c, sinh_minus_id_c3, sinhc, u_coth_u};

/// `μ(τ) = τ / sinh²τ - coth τ`, odd and strictly decreasing from 1 to -1.
pub fn mu(tau: f64) -> f64 {
    if tau.abs() < 1.0 {
        // (2τ - sinh 2τ) / (2 sinh²τ) without the cancellation
        let s = sinhc(tau);
        -4.0 * tau * sinh_minus_id_c3(2.0 * tau) / (s * s)
    } else if tau < 0.0 {
        -mu(-tau)
    } else {
        // 1 + μ with q = e^{-2τ}, so the tail does not cancel
        let q = (-2.0 * tau).exp();
        let d = 4.0 * tau * q / ((1.0 - q) * (1.0 - q)) - 2.0 * q / (1.0 - q);
        d - 1.0
    }
}

/// `μ'(τ) = 2 (sinh τ - τ cosh τ) / sinh³τ`, equal to -2/3 at 0.
pub fn mu_prime(tau: f64) -> f64 {
    if tau.abs() < 1.0 {
        // sinh τ - τ cosh τ = -Σ_{k≥1} 2k τ^{2k+1} / (2k+1)!
        let t2 = tau * tau;
        let mut fact = 6.0;
        let mut pow = 1.0;
        let mut sum = 0.0;
        let mut k = 1.0;
        loop {
            let term = 2.0 * k * pow / fact;
            sum += term;
            if term < 1e-18 * sum {
                break;
            }
            k += 1.0;
            pow *= t2;
            fact *= (2.0 * k) * (2.0 * k + 1.0);
        }
        let s = sinhc(tau);
        -2.0 * sum / (s * s * s)
    } else if tau.abs() > 300.0 {
        0.0
    } else {
        2.0 * (tau.sinh() - tau * tau.cosh()) / tau.sinh().powi(3)
    }
}

/// The unique `τ` with `μ(τ) = r`, for `|r| < 1`.
///
/// Bisection on an expanding bracket down to a width of 1e-13, then a few
/// Newton steps kept inside the bracket.
pub fn solve_mu(r: f64) -> Result<f64> {
    if !(r.abs() < 1.0) {
        return Err(Error::NoSolution(r));
    }
    if r == 0.0 {
        return Ok(0.0);
    }
    // μ is decreasing, so the root has the sign of -r
    let (mut lo, mut hi) = if r < 0.0 { (0.0, 1.0) } else { (-1.0, 0.0) };
    while mu(hi) > r {
        lo = hi;
        hi *= 2.0;
    }
    while mu(lo) < r {
        hi = lo;
        lo *= 2.0;
    }
    while hi - lo > 1e-13 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if mu(mid) > r {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let mut tau = 0.5 * (lo + hi);
    for _ in 0..3 {
        let d = mu_prime(tau);
        if d == 0.0 {
            break;
        }
        let next = tau - (mu(tau) - r) / d;
        if !(next >= lo && next <= hi) || (mu(next) - r).abs() >= (mu(tau) - r).abs() {
            break;
        }
        tau = next;
    }
    Ok(tau)
}

/// Initial data of a geodesic from the origin: horizontal velocity
/// `(ẋ₀, ẏ₀)` and the conserved momentum `θ`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeisIvp {
    pub v0: [f64; 2],
    pub theta: f64,
}

impl HeisIvp {
    pub fn new(v0: [f64; 2], theta: f64) -> Self {
        HeisIvp { v0, theta }
    }

    /// From the initial covector `(ξ₀, η₀)`: `ẋ₀ = -ξ₀`, `ẏ₀ = η₀`.
    pub fn from_covector(xi0: f64, eta0: f64, theta: f64) -> Self {
        HeisIvp {
            v0: [-xi0, eta0],
            theta,
        }
    }

    /// `‖v₀‖² = Q(v₀, v₀)`, conserved along the geodesic.
    pub fn speed2(&self) -> f64 {
        lorentz_norm2(&self.v0)
    }

    /// `H = ½ ‖v₀‖²`.
    pub fn hamiltonian(&self) -> f64 {
        0.5 * self.speed2()
    }

    /// Length of the geodesic over `[0, 1]`.
    pub fn length(&self) -> f64 {
        self.speed2().abs().sqrt()
    }
}

/// Position and frame coefficients of the velocity at one time.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HeisState {
    pub point: GroupPoint,
    pub velocity: [f64; 2],
}

/// The closed-form geodesic at time `t`.
pub fn shoot(ivp: &HeisIvp, t: f64) -> HeisState {
    let [xd, yd] = ivp.v0;
    let u = ivp.theta * t;
    let (ch, sh) = (u.cosh(), u.sinh());
    let s = t * sinhc(u);
    let c = t * coshm1c(u);
    let z = -0.5 * ivp.speed2() * ivp.theta * t * t * t * sinh_minus_id_c3(u);
    HeisState {
        point: GroupPoint::heisenberg(xd * s - yd * c, -xd * c + yd * s, z),
        velocity: [xd * ch - yd * sh, yd * ch - xd * sh],
    }
}

/// `n` uniform samples of the geodesic on `[0, t1]`.
pub fn sample_path(ivp: &HeisIvp, t1: f64, n: usize) -> Result<GeodesicPath> {
    if n < 2 || !(t1 > 0.0) {
        return Err(Error::Curve(format!("cannot sample {n} points on [0, {t1}]")));
    }
    GeodesicPath::from_samples(
        GroupId::HeisenbergL,
        (0..n).map(|i| {
            let t = if i == n - 1 { t1 } else { t1 * i as f64 / (n - 1) as f64 };
            let s = shoot(ivp, t);
            (t, s.point, s.velocity.to_vec(), vec![ivp.theta])
        }),
    )
}

/// Left translation of a path from the origin to one starting at `base`.
pub fn translate(base: &GroupPoint, path: &GeodesicPath) -> Result<GeodesicPath> {
    GeodesicPath::from_samples(
        path.group(),
        path.samples()
            .iter()
            .map(|s| Ok((s.t, multiply(base, &s.point)?, s.velocity.clone(), s.theta.clone())))
            .collect::<Result<Vec<_>>>()?,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TargetClass {
    TimelikeConnectable(Orientation),
    SpacelikeConnectable,
    LightlikeRay,
    Unreachable,
}

/// Which geodesic from the origin, if any, reaches `(x, y, z)`.
pub fn classify_target(target: &GroupPoint) -> Result<TargetClass> {
    GroupId::HeisenbergL.expect(target.group())?;
    let (x, y, z) = (target.x()[0], target.x()[1], target.z()[0]);
    let h2 = -x * x + y * y;
    Ok(if h2 < 0.0 && 4.0 * z.abs() < -h2 {
        TargetClass::TimelikeConnectable(if x > 0.0 {
            Orientation::FutureDirected
        } else {
            Orientation::PastDirected
        })
    } else if h2 > 0.0 && 4.0 * z.abs() < h2 {
        TargetClass::SpacelikeConnectable
    } else if z == 0.0 && x.abs() == y.abs() {
        TargetClass::LightlikeRay
    } else {
        TargetClass::Unreachable
    })
}

/// The geodesic on `[0, 1]` from the origin to a target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Connection {
    pub target: GroupPoint,
    pub class: TargetClass,
    pub ivp: HeisIvp,
    /// How many of the two candidates `±θ` land on the target.
    pub candidates: usize,
}

impl Connection {
    pub fn theta(&self) -> f64 {
        self.ivp.theta
    }

    pub fn at(&self, t: f64) -> HeisState {
        shoot(&self.ivp, t)
    }

    pub fn path(&self, n: usize) -> Result<GeodesicPath> {
        sample_path(&self.ivp, 1.0, n)
    }

    pub fn length(&self) -> f64 {
        self.ivp.length()
    }

    /// Distance from the endpoint at `t = 1` to the target.
    pub fn endpoint_error(&self) -> f64 {
        self.at(1.0).point.max_abs_diff(&self.target)
    }
}

/// Initial velocity reaching `(x, y)` at `t = 1` with momentum `θ`.
fn velocity_for(x: f64, y: f64, theta: f64) -> [f64; 2] {
    let h = 0.5 * theta;
    let c = u_coth_u(h);
    [x * c + y * h, y * c + x * h]
}

/// Connects the origin to `target` by a geodesic parametrised on `[0, 1]`.
///
/// `θ = 2τ` with `μ(τ) = 4z / (-x² + y²)`. Both `±θ` are shot and the one
/// landing on the target is kept; for `z ≠ 0` the other lands on the
/// mirror point `(x, y, -z)`. Lightlike targets get the straight null
/// segment.
pub fn connect(target: &GroupPoint) -> Result<Connection> {
    let class = classify_target(target)?;
    let (x, y, z) = (target.x()[0], target.x()[1], target.z()[0]);
    match class {
        TargetClass::Unreachable => Err(Error::Unreachable { x, y, z }),
        TargetClass::LightlikeRay => Ok(Connection {
            target: *target,
            class,
            ivp: HeisIvp::new([x, y], 0.0),
            candidates: 1,
        }),
        _ => {
            let tau = solve_mu(4.0 * z / (-x * x + y * y))?;
            let tol = 1e-9 * (1.0 + x.abs().max(y.abs()).max(z.abs()));
            let mut best: Option<(f64, HeisIvp)> = None;
            let mut candidates = 0;
            let thetas = if tau == 0.0 { vec![0.0] } else { vec![2.0 * tau, -2.0 * tau] };
            for theta in thetas {
                let ivp = HeisIvp::new(velocity_for(x, y, theta), theta);
                let err = shoot(&ivp, 1.0).point.max_abs_diff(target);
                if err <= tol {
                    candidates += 1;
                }
                if best.is_none_or(|(e, _)| err < e) {
                    best = Some((err, ivp));
                }
            }
            let (_, ivp) = best.expect("at least one candidate");
            Ok(Connection {
                target: *target,
                class,
                ivp,
                candidates,
            })
        }
    }
}

/// The connecting curve in the form that eliminates `v₀`:
/// `x(t)`, `y(t)` from the endpoint and `θ`, and
/// `z(t) = z (θt - sinh θt) / (θ - sinh θ)`.
pub fn endpoint_form(target: &GroupPoint, theta: f64, t: f64) -> GroupPoint {
    let (x, y, z) = (target.x()[0], target.x()[1], target.z()[0]);
    let zt = z * t * t * t * sinh_minus_id_c3(theta * t) / sinh_minus_id_c3(theta);
    if theta.abs() < 1e-8 {
        return GroupPoint::heisenberg(t * x, t * y, zt);
    }
    let h = 0.5 * theta;
    let (s, c) = ((h * t).sinh(), (h * t).cosh());
    let coth = 1.0 / h.tanh();
    GroupPoint::heisenberg(
        x * (s * c * coth - s * s) + y * (s * c - s * s * coth),
        y * (s * c * coth - s * s) + x * (s * c - s * s * coth),
        zt,
    )
}

/// `l = √|‖h(1)‖²| · |θ| / (2 sinh(|θ|/2))` with `‖h(1)‖² = -x² + y²`.
pub fn length_from_endpoint(target: &GroupPoint, theta: f64) -> f64 {
    let (x, y) = (target.x()[0], target.x()[1]);
    (-x * x + y * y).abs().sqrt() / sinhc(0.5 * theta)
}

/// `l² = θ² (|‖h(1)‖²| + 4|z|) / (2 (|θ - sinh θ| + 2 sinh²(θ/2)))`.
pub fn length_squared_closed(target: &GroupPoint, theta: f64) -> f64 {
    let (x, y, z) = (target.x()[0], target.x()[1], target.z()[0]);
    let a = theta.abs();
    // denominator / θ², regular at 0
    let s = sinhc(0.5 * a);
    let den = 2.0 * (a * sinh_minus_id_c3(a) + 0.5 * s * s);
    ((-x * x + y * y).abs() + 4.0 * z.abs()) / den
}
