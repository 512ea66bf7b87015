//! Rigid-body simulation on SE(3) with invariance-enforcing body-axis
//! pointing control for quadrotor-type vehicles.
//!
//! The library covers:
//!
//! - [`linalg`], [`se3`]: small fixed-size linear algebra, the hat/vee
//!   isomorphism, validated rotations, and polar-projection drift repair;
//! - [`dynamics`]: the quadrotor equations of motion and their
//!   affine-in-control decomposition;
//! - [`task`]: the pointing–altitude task geometry, velocity-level
//!   residuals, and regularity monitors;
//! - [`control`]: closed-form invariance-enforcing and residual-stabilized
//!   feedback laws;
//! - [`solver`]: the generic invariance solver for arbitrary velocity-linear
//!   constraint sets with transversality checking;
//! - [`integrator`]: fixed-step RK4 closed-loop simulation with SO(3)
//!   re-orthonormalization and trajectory recording.
//!
//! Everything is generic over the scalar (`f32` or `f64`) through the
//! [`scalar::Real`] trait; the aliases at the crate root fix `f64`, which
//! is what the simulation tolerances are calibrated for.

pub mod control;
pub mod dynamics;
pub mod error;
pub mod integrator;
pub mod linalg;
pub mod scalar;
pub mod se3;
pub mod solver;
pub mod task;

pub use error::{Error, Result};
pub use scalar::Real;

/// `f64` 3-vector.
pub type Vec3 = linalg::Vec3<f64>;
/// `f64` 3×3 matrix.
pub type Mat3 = linalg::Mat3<f64>;
/// `f64` rotation.
pub type Rotation = se3::Rotation<f64>;
/// `f64` vehicle parameters.
pub type VehicleParams = dynamics::VehicleParams<f64>;
/// `f64` rigid-body state.
pub type RigidBodyState = dynamics::RigidBodyState<f64>;
/// `f64` control input.
pub type ControlInput = dynamics::ControlInput<f64>;
/// `f64` task specification.
pub type TaskSpec = task::TaskSpec<f64>;
/// `f64` residual vector.
pub type ResidualVector = task::ResidualVector<f64>;
/// `f64` task errors.
pub type TaskErrors = task::TaskErrors<f64>;
/// `f64` regularity report.
pub type RegularityReport = task::RegularityReport<f64>;
/// `f64` gains.
pub type Gains = control::Gains<f64>;
/// `f64` simulation config.
pub type SimConfig = integrator::SimConfig<f64>;
/// `f64` trajectory sample.
pub type TrajectorySample = integrator::TrajectorySample<f64>;
/// `f64` trajectory.
pub type Trajectory = integrator::Trajectory<f64>;
/// `f64` pointing law policy.
pub type PointingLaw = integrator::PointingLaw<f64>;
