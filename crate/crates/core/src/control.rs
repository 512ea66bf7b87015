//! Invariance-enforcing control laws for the pointing–altitude task.
//!
//! Differentiating the three velocity-level constraints along the dynamics
//! and solving for `(f, τ2, τ3)` (with `τ1 = 0`) gives closed forms. The
//! pure invariance law keeps the residuals constant; the stabilized
//! extension adds `−k·μ` terms per channel so each residual obeys
//! `μ̇ = −k μ` and decays exponentially wherever the feasibility
//! denominators (`e3ᵀb3`, `ρ`) stay away from zero.
//!
//! Channel/input pairing: thrust drives `mu_z`, `τ3` drives `mu_O3`,
//! `τ2` drives `mu_O2`.

use crate::dynamics::{ControlInput, RigidBodyState, VehicleParams};
use crate::error::{Error, Result};
use crate::linalg::Mat3;
use crate::scalar::Real;
use crate::task::{residuals, TaskSpec};

/// Per-channel residual feedback gains (1/s), all non-negative.
///
/// Zero gains recover the pure invariance-enforcing law; strictly positive
/// gains are required for the exponential decay guarantee.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gains<S> {
    /// Gain on `mu_z`, acting through thrust.
    pub k_z: S,
    /// Gain on `mu_O3`, acting through τ3.
    pub k_o3: S,
    /// Gain on `mu_O2`, acting through τ2.
    pub k_o2: S,
}

impl<S: Real> Gains<S> {
    pub fn new(k_z: S, k_o3: S, k_o2: S) -> Self {
        Gains { k_z, k_o3, k_o2 }
    }

    /// All-zero gains: the pure invariance law.
    pub fn zero() -> Self {
        Gains::new(S::zero(), S::zero(), S::zero())
    }
}

/// The 3×3 invariance linear system for the task.
///
/// Rows are the constraints `(mu_z, mu_O3, mu_O2)`, columns the inputs
/// `(f, τ2, τ3)`; entry (a, j) is the rate the j-th input imparts on the
/// a-th residual. Its determinant is `−s3 / (m J2 J3)` identically, so the
/// system degenerates exactly when the thrust axis goes horizontal.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TransversalityMatrix<S> {
    pub matrix: Mat3<S>,
    pub det: S,
}

fn checked_s3<S: Real>(state: &RigidBodyState<S>, spec: &TaskSpec<S>) -> Result<S> {
    let s3 = state.rotation.b3().z;
    if s3.abs() < spec.eps_s {
        return Err(Error::SingularAttitude {
            s3_abs: s3.abs().to_f64().unwrap_or(f64::NAN),
            eps_s: spec.eps_s.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(s3)
}

/// Thrust of the pure invariance law, `f = m g / (e3ᵀ R e3)`.
pub fn thrust_invariance<S: Real>(
    state: &RigidBodyState<S>,
    params: &VehicleParams<S>,
    spec: &TaskSpec<S>,
) -> Result<S> {
    let s3 = checked_s3(state, spec)?;
    Ok(params.mass() * params.gravity() / s3)
}

/// Torques of the pure invariance law.
///
/// Valid on the task distribution (zero residuals), where the on-manifold
/// substitutions used to derive them (`v2 = −ρΩ3`, `v3 = ρΩ2`,
/// `ρ̇ = −v1`) hold:
///
/// ```text
///   τ2 = J2 (Ω1 Ω3 + (f/m − g s3)/ρ + 2 Ω2 v1 / ρ) + (J1 − J3) Ω1 Ω3
///   τ3 = J3 (−Ω1 Ω2 + g s2 / ρ + 2 Ω3 v1 / ρ)      + (J2 − J1) Ω1 Ω2
/// ```
pub fn torques_invariance<S: Real>(
    state: &RigidBodyState<S>,
    params: &VehicleParams<S>,
    spec: &TaskSpec<S>,
) -> Result<(S, S)> {
    let s3 = checked_s3(state, spec)?;
    let rho = spec.checked_rho(state)?;
    let f = params.mass() * params.gravity() / s3;
    let s2 = state.rotation.b2().z;
    let omega = state.angular_velocity;
    let v1 = state.rotation.b1().dot(&state.velocity);
    let j = params.inertia();
    let g = params.gravity();
    let two = S::two();

    let tau2 = j.y
        * (omega.x * omega.z
            + (f / params.mass() - g * s3) / rho
            + two * omega.y * v1 / rho)
        + (j.x - j.z) * omega.x * omega.z;
    let tau3 = j.z
        * (-(omega.x * omega.y) + g * s2 / rho + two * omega.z * v1 / rho)
        + (j.y - j.x) * omega.x * omega.y;
    Ok((tau2, tau3))
}

/// Residual-stabilized law: solves `μ̇ = −k μ` per channel for
/// `(f, τ2, τ3)`, valid on and off the task distribution.
///
/// On states with zero residuals the output coincides with the pure
/// invariance law for any gains; with zero gains it freezes the residuals
/// at their current values.
pub fn control_stabilized<S: Real>(
    state: &RigidBodyState<S>,
    params: &VehicleParams<S>,
    spec: &TaskSpec<S>,
    gains: &Gains<S>,
) -> Result<ControlInput<S>> {
    let s3 = checked_s3(state, spec)?;
    let rho = spec.checked_rho(state)?;
    let mu = residuals(state, spec)?;

    let m = params.mass();
    let g = params.gravity();
    let j = params.inertia();
    let s2 = state.rotation.b2().z;
    let omega = state.angular_velocity;
    let vb = state.body_velocity();
    let (rel, _) = spec.relative_position(state);
    let rho_dot = (rel / rho).dot(&state.velocity);

    let f = m * (g - gains.k_z * mu.mu_z) / s3;

    let tau2 = j.y
        * (-(gains.k_o2 * mu.mu_o2)
            - ((j.z - j.x) / j.y) * omega.z * omega.x
            + (omega.y * vb.x - omega.x * vb.y + f / m - g * s3) / rho
            - vb.z * rho_dot / (rho * rho));
    let tau3 = j.z
        * (-(gains.k_o3 * mu.mu_o3)
            - ((j.x - j.y) / j.z) * omega.x * omega.y
            - (omega.x * vb.z - omega.z * vb.x - g * s2) / rho
            + vb.y * rho_dot / (rho * rho));

    Ok(ControlInput::pitch_yaw(f, tau2, tau3))
}

/// Assemble the invariance linear system of the task at a state.
pub fn transversality_matrix<S: Real>(
    state: &RigidBodyState<S>,
    params: &VehicleParams<S>,
    spec: &TaskSpec<S>,
) -> Result<TransversalityMatrix<S>> {
    let rho = spec.checked_rho(state)?;
    let s3 = state.rotation.b3().z;
    let m = params.mass();
    let j = params.inertia();
    let z = S::zero();

    // Rows: (mu_z, mu_O3, mu_O2) x columns: (f, tau2, tau3).
    let matrix = Mat3::new(
        s3 / m,
        z,
        z,
        z,
        z,
        S::one() / j.z,
        -(S::one() / (rho * m)),
        S::one() / j.y,
        z,
    );
    Ok(TransversalityMatrix {
        matrix,
        det: matrix.det(),
    })
}
