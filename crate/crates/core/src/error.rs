//! Crate-wide error type.

use thiserror::Error;

/// Errors surfaced by the geometry, control, and simulation layers.
#[derive(Debug, Error)]
pub enum Error {
    /// `vee` was given a matrix whose symmetric part exceeds tolerance.
    #[error("matrix is not skew-symmetric (residual {residual:e} > tol {tol:e})")]
    NotSkew { residual: f64, tol: f64 },

    /// SO(3) projection of a singular or orientation-reversing matrix.
    #[error("matrix is degenerate for SO(3) projection (det = {det:e})")]
    Degenerate { det: f64 },

    /// Vehicle parameters must all be strictly positive.
    #[error("invalid vehicle parameter {name}: {value}")]
    InvalidParameter { name: &'static str, value: f64 },

    /// Rotation validity check failed (orthonormality or determinant).
    #[error("matrix is not a rotation (orthonormality residual {residual:e}, det {det})")]
    NotRotation { residual: f64, det: f64 },

    /// Task thresholds outside their admissible ranges.
    #[error("invalid task threshold {name}: {value}")]
    InvalidTaskSpec { name: &'static str, value: f64 },

    /// Thrust axis too close to horizontal: |e3ᵀb3| under the task threshold.
    #[error("singular attitude: |e3.b3| = {s3_abs:e} < {eps_s:e}")]
    SingularAttitude { s3_abs: f64, eps_s: f64 },

    /// Vehicle too close to the target point: ρ under the task threshold.
    #[error("target collision: rho = {rho:e} < {eps_rho:e}")]
    TargetCollision { rho: f64, eps_rho: f64 },

    /// On-manifold construction produced a frame outside the feasible set.
    #[error("infeasible geometry: |e3.b3| = {s3_abs:e} < {eps_s:e} at the requested pose")]
    InfeasibleGeometry { s3_abs: f64, eps_s: f64 },

    /// Invariance linear system is numerically singular (transversality loss).
    #[error("singular invariance system: condition estimate {cond:e} exceeds {max_cond:e}")]
    SingularSystem { cond: f64, max_cond: f64 },

    /// Constraint count does not match the selected input count.
    #[error("dimension mismatch: {constraints} constraints vs {inputs} inputs (gains: {gains})")]
    DimensionMismatch {
        constraints: usize,
        inputs: usize,
        gains: usize,
    },

    /// The control policy failed at an integrator stage state.
    #[error("control policy failed at RK4 stage {stage}: {source}")]
    PolicyFailure {
        stage: usize,
        #[source]
        source: Box<Error>,
    },

    /// Simulation hit the regularity thresholds before the horizon.
    #[error("regularity lost during simulation; last valid sample index {last_valid_index}")]
    InfeasibleEncountered { last_valid_index: usize },

    /// Simulation configuration is inconsistent.
    #[error("invalid simulation config {name}: {value}")]
    InvalidSimConfig { name: &'static str, value: f64 },

    /// A state component is NaN or infinite.
    #[error("non-finite state component: {what}")]
    NonFiniteState { what: &'static str },
}

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;
