//! Geodesics, causal structure and reachable sets on two sub-Lorentzian
//! H-type groups: the Lorentzian Heisenberg group `H¹_L` (coordinates
//! `(x, y, z)`) and the quaternion H-type group **H** (coordinates
//! `(x₁..x₄, z₁..z₃)`).
//!
//! Both groups carry the horizontal frame `X_α` with the Lorentzian metric
//! `Q = diag(-1, 1, ..)`, time-oriented by `X₁`. The crate is organised as
//!
//! * [`group`]: group law, left-invariant frames, brackets, dual one-forms,
//!   sampled curves and their horizontality defect;
//! * [`causal`]: the metric `Q`, the co-metric, causal classification,
//!   horizontal gradients and curve length;
//! * [`reachable`]: the `η_α` family, the regions `Γ_α`, `A_α`, the
//!   straight timelike rays and sampling checks of the inclusion results;
//! * [`heisenberg`]: closed-form geodesics of `H¹_L`, the function `μ`, and
//!   the two-point connection of the origin to timelike/spacelike targets;
//! * [`quaternion`]: closed-form geodesics of **H** with all coefficient
//!   tables and the scalar identity suite;
//! * [`integrator`]: Runge-Kutta integration of both Hamiltonian systems and
//!   of horizontal control systems, used as the independent oracle;
//! * [`export`]: CSV and JSON serialisation shared by the CLI.
//!
//! All coordinates are normal (exponential) coordinates.

pub mod causal;
pub mod error;
pub mod export;
pub mod group;
pub mod heisenberg;
pub mod integrator;
pub mod quaternion;
pub mod reachable;

mod numeric;

pub use causal::{CausalClass, CausalKind, HorizontalVector, Orientation};
pub use error::{Error, Result};
pub use group::{DiscreteCurve, GroupId, GroupPoint};
