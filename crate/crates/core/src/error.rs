use crate::group::GroupId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("group mismatch: expected {expected:?}, found {found:?}")]
    GroupMismatch { expected: GroupId, found: GroupId },

    #[error("dimension mismatch for {group:?}: expected {expected} components, got {got}")]
    Dimension {
        group: GroupId,
        expected: usize,
        got: usize,
    },

    #[error("base points differ")]
    BaseMismatch,

    #[error("frame index {index} out of range for {group:?}")]
    FrameIndex { group: GroupId, index: usize },

    #[error("operation not supported for {0:?}")]
    Unsupported(GroupId),

    #[error("invalid curve: {0}")]
    Curve(String),

    #[error("curve is not horizontal: defect {defect:e} exceeds tolerance {tol:e}")]
    NotHorizontal { defect: f64, tol: f64 },

    #[error("equation mu(tau) = {0} has no solution (need |r| < 1)")]
    NoSolution(f64),

    #[error("target ({x}, {y}, {z}) is not connectable to the origin by a timelike or spacelike geodesic")]
    Unreachable { x: f64, y: f64, z: f64 },

    #[error("theta_1^2 + theta_2^2 is degenerate; use the matrix-exponential branch")]
    DegenerateTheta,

    #[error("parameter out of range: {0}")]
    OutOfRange(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("step size underflow at t = {t}")]
    StepUnderflow { t: f64 },

    #[error("non-finite state at t = {t}")]
    NonFinite { t: f64 },

    #[error("sampler emitted an inadmissible curve (sample {index}): {reason}")]
    Sampler { index: usize, reason: String },
}
