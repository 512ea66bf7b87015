//! The pointing–altitude task geometry.
//!
//! The task locks the first body axis onto the line of sight to a target
//! point, `b1 = −p̂` with `p̂ = (p − target)/ρ`, and fixes the altitude
//! `e3ᵀp = z0`. Velocity-level compatibility with that geometry is measured
//! by three scalar residuals, one per actuated channel:
//!
//! ```text
//!   mu_z  = e3ᵀv              (altitude rate)        ↔ thrust f
//!   mu_O3 = e3ᵀΩ + b2ᵀv / ρ   (yaw-plane pointing)   ↔ torque τ3
//!   mu_O2 = e2ᵀΩ − b3ᵀv / ρ   (pitch-plane pointing) ↔ torque τ2
//! ```
//!
//! The rotational residuals come from differentiating `b1 + p̂ = 0`:
//! `(RΩ) × b1 + (I − p̂p̂ᵀ) v / ρ = 0` splits along `b2, b3` into
//! `Ω3 = −v2/ρ` and `Ω2 = v3/ρ`, which fixes the coupling-term signs.
//!
//! All three vanish exactly on the task distribution. The feasible set
//! requires `|e3ᵀb3| ≥ eps_s` (thrust axis not horizontal) and
//! `ρ ≥ eps_rho` (not on top of the target); both thresholds live in
//! [`TaskSpec`] and are monitored by [`regularity`].

use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::scalar::Real;
use crate::se3::Rotation;
use crate::dynamics::RigidBodyState;

/// Target point, locked altitude, and the regularity thresholds that
/// delimit where the control laws are well-defined.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaskSpec<S> {
    /// Point the body x-axis must face (world frame, m).
    pub target: Vec3<S>,
    /// Locked world altitude `e3ᵀp` (m).
    pub z0: S,
    /// Minimum admissible `|e3ᵀb3|`.
    pub eps_s: S,
    /// Minimum admissible distance to the target (m).
    pub eps_rho: S,
}

impl<S: Real> TaskSpec<S> {
    pub fn new(target: Vec3<S>, z0: S, eps_s: S, eps_rho: S) -> Result<Self> {
        if !eps_s.is_finite() || eps_s <= S::zero() || eps_s >= S::one() {
            return Err(Error::InvalidTaskSpec {
                name: "eps_s",
                value: eps_s.to_f64().unwrap_or(f64::NAN),
            });
        }
        if !eps_rho.is_finite() || eps_rho <= S::zero() {
            return Err(Error::InvalidTaskSpec {
                name: "eps_rho",
                value: eps_rho.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(TaskSpec {
            target,
            z0,
            eps_s,
            eps_rho,
        })
    }

    /// Target at the origin with default thresholds `eps_s = eps_rho = 0.1`.
    pub fn origin(z0: S) -> Self {
        TaskSpec {
            target: Vec3::zero(),
            z0,
            eps_s: S::of(0.1),
            eps_rho: S::of(0.1),
        }
    }

    /// Position relative to the target and its norm ρ.
    pub fn relative_position(&self, state: &RigidBodyState<S>) -> (Vec3<S>, S) {
        let rel = state.position - self.target;
        (rel, rel.norm())
    }

    /// Checked ρ: errors with `TargetCollision` below `eps_rho`.
    pub fn checked_rho(&self, state: &RigidBodyState<S>) -> Result<S> {
        let (_, rho) = self.relative_position(state);
        if rho < self.eps_rho {
            return Err(Error::TargetCollision {
                rho: rho.to_f64().unwrap_or(f64::NAN),
                eps_rho: self.eps_rho.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(rho)
    }
}

/// The three velocity-level constraint residuals.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ResidualVector<S> {
    /// Altitude-rate residual `e3ᵀv` (m/s); driven by thrust.
    pub mu_z: S,
    /// Pointing residual `e3ᵀΩ + b2ᵀv/ρ` (rad/s); driven by τ3.
    pub mu_o3: S,
    /// Pointing residual `e2ᵀΩ − b3ᵀv/ρ` (rad/s); driven by τ2.
    pub mu_o2: S,
}

impl<S: Real> ResidualVector<S> {
    pub fn max_abs(&self) -> S {
        self.mu_z.abs().max(self.mu_o3.abs()).max(self.mu_o2.abs())
    }
}

/// Configuration-level task errors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TaskErrors<S> {
    /// Pointing error `‖b1 + p̂‖`, dimensionless in [0, 2].
    pub e_pt: S,
    /// Altitude error `|e3ᵀp − z0|` (m).
    pub e_z: S,
}

/// Snapshot of the regularity monitors.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RegularityReport<S> {
    /// `e3ᵀb3`: cosine between thrust axis and world vertical.
    pub s3: S,
    /// `e3ᵀb2`: vertical component of the second body axis.
    pub s2: S,
    /// Distance to the target (m).
    pub rho: S,
    /// `|s3| ≥ eps_s` and `rho ≥ eps_rho`.
    pub feasible: bool,
}

/// Velocity-level residuals at a state. Positions are taken relative to
/// the task target.
pub fn residuals<S: Real>(
    state: &RigidBodyState<S>,
    spec: &TaskSpec<S>,
) -> Result<ResidualVector<S>> {
    let rho = spec.checked_rho(state)?;
    let b2 = state.rotation.b2();
    let b3 = state.rotation.b3();
    let v = state.velocity;
    let omega = state.angular_velocity;
    Ok(ResidualVector {
        mu_z: v.z,
        mu_o3: omega.z + b2.dot(&v) / rho,
        mu_o2: omega.y - b3.dot(&v) / rho,
    })
}

/// Configuration-level pointing and altitude errors.
pub fn task_errors<S: Real>(
    state: &RigidBodyState<S>,
    spec: &TaskSpec<S>,
) -> Result<TaskErrors<S>> {
    let rho = spec.checked_rho(state)?;
    let (rel, _) = spec.relative_position(state);
    let p_hat = rel / rho;
    Ok(TaskErrors {
        e_pt: (state.rotation.b1() + p_hat).norm(),
        e_z: (state.position.z - spec.z0).abs(),
    })
}

/// Regularity monitors; never fails, reports the raw values plus the
/// threshold verdict.
pub fn regularity<S: Real>(state: &RigidBodyState<S>, spec: &TaskSpec<S>) -> RegularityReport<S> {
    let (_, rho) = spec.relative_position(state);
    let s3 = state.rotation.b3().z;
    let s2 = state.rotation.b2().z;
    RegularityReport {
        s3,
        s2,
        rho,
        feasible: s3.abs() >= spec.eps_s && rho >= spec.eps_rho,
    }
}

/// Complete a pointing frame from the line of sight alone.
///
/// Given `b1 = −p̂`, chooses the horizontal tangential direction
/// `b2 = (e3 × b1)/‖e3 × b1‖` and `b3 = b1 × b2`, flipping `b2, b3`
/// jointly if needed so the thrust axis satisfies `e3ᵀb3 > 0`.
/// Degenerates only when the line of sight is vertical.
pub fn pointing_frame<S: Real>(p_hat: Vec3<S>, eps_s: S) -> Result<Rotation<S>> {
    let b1 = -p_hat;
    let horizontal = Vec3::e3().cross(&b1);
    let b2 = horizontal.normalized().ok_or(Error::InfeasibleGeometry {
        s3_abs: 0.0,
        eps_s: eps_s.to_f64().unwrap_or(f64::NAN),
    })?;
    let mut b2 = b2;
    let mut b3 = b1.cross(&b2);
    if b3.z < S::zero() {
        b2 = -b2;
        b3 = -b3;
    }
    if b3.z.abs() < eps_s {
        return Err(Error::InfeasibleGeometry {
            s3_abs: b3.z.abs().to_f64().unwrap_or(f64::NAN),
            eps_s: eps_s.to_f64().unwrap_or(f64::NAN),
        });
    }
    Rotation::from_body_axes(b1, b2, b3)
}

/// Construct a state on the task manifold satisfying the velocity-level
/// compatibility conditions exactly.
///
/// The pose sits at horizontal radius `radius` and polar angle `theta`
/// around the target, at altitude `z0`, with `b1 = −p̂`. The velocity is
/// tangential (`v = speed · b2`, horizontal by construction), and the body
/// rates are solved from the residual equations so that
/// `residuals(state) = (0, 0, 0)`. The roll rate `Ω1`, unconstrained by
/// the task, is set to the frame-transport value of the rigid orbital
/// motion, so a circular-orbit initialization carries no spurious wobble.
pub fn on_manifold_init<S: Real>(
    theta: S,
    radius: S,
    spec: &TaskSpec<S>,
    tangential_speed: S,
) -> Result<RigidBodyState<S>> {
    if !radius.is_finite() || radius <= S::zero() {
        return Err(Error::InvalidTaskSpec {
            name: "radius",
            value: radius.to_f64().unwrap_or(f64::NAN),
        });
    }
    let position = Vec3::new(
        spec.target.x + radius * theta.cos(),
        spec.target.y + radius * theta.sin(),
        spec.z0,
    );
    let rel = position - spec.target;
    let rho = rel.norm();
    if rho < spec.eps_rho {
        return Err(Error::TargetCollision {
            rho: rho.to_f64().unwrap_or(f64::NAN),
            eps_rho: spec.eps_rho.to_f64().unwrap_or(f64::NAN),
        });
    }
    let p_hat = rel / rho;
    let rotation = pointing_frame(p_hat, spec.eps_s)?;

    // Tangential velocity, projected so e3ᵀv = 0 holds exactly.
    let b2 = rotation.b2();
    let raw = b2.scale(tangential_speed);
    let velocity = raw - Vec3::e3().scale(raw.z);
    let b3 = rotation.b3();

    // Ω2, Ω3 solve the rotational residual equations; Ω1 is the transport
    // rate of the pointing frame under the rigid orbital motion.
    let omega = Vec3::new(
        tangential_speed * rel.z / (radius * rho),
        b3.dot(&velocity) / rho,
        -b2.dot(&velocity) / rho,
    );
    Ok(RigidBodyState::new(rotation, position, velocity, omega))
}

/// Add a vertical velocity step `delta · e3`.
///
/// `mu_z` shifts by exactly `delta`. The rotational residuals also shift
/// through their `b2ᵀv` and `b3ᵀv` terms (by `+delta·b2_z/ρ` and
/// `−delta·b3_z/ρ`); that coupling is part of the perturbation and is not
/// compensated here.
pub fn perturb_vertical<S: Real>(state: &RigidBodyState<S>, delta: S) -> RigidBodyState<S> {
    let mut out = *state;
    out.velocity += Vec3::e3().scale(delta);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::se3::Rotation;
    use approx::assert_relative_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    type V = Vec3<f64>;

    fn spec_z0(z0: f64) -> TaskSpec<f64> {
        TaskSpec::origin(z0)
    }

    /// Hover fixture on the task manifold: Rz(pi) at p = (1, 0, 0), z0 = 0.
    fn hover_state() -> RigidBodyState<f64> {
        RigidBodyState::at_rest(Rotation::rot_z(PI), V::new(1.0, 0.0, 0.0))
    }

    #[test]
    fn residuals_vanish_at_hover() {
        let r = residuals(&hover_state(), &spec_z0(0.0)).unwrap();
        assert_eq!(r.mu_z, 0.0);
        assert_eq!(r.mu_o3, 0.0);
        assert_eq!(r.mu_o2, 0.0);
    }

    #[test]
    fn residuals_pick_up_vertical_velocity() {
        // b2 = (0,-1,0), b3 = (0,0,1), rho = 1: climbing at 0.1 m/s gives
        // mu_z = 0.1 and mu_O2 = -0.1 while mu_O3 stays zero.
        let mut s = hover_state();
        s.velocity = V::new(0.0, 0.0, 0.1);
        let r = residuals(&s, &spec_z0(0.0)).unwrap();
        assert_relative_eq!(r.mu_z, 0.1, epsilon = 1e-15);
        assert_relative_eq!(r.mu_o3, 0.0, epsilon = 1e-15);
        assert_relative_eq!(r.mu_o2, -0.1, epsilon = 1e-15);
    }

    #[test]
    fn residuals_vanish_on_compatible_velocities() {
        // v = rho (Ω2 b3 − Ω3 b2) with e3ᵀv = 0 solves both rotational
        // constraints; here Ω = (0.3, 0, 0.7) at the hover pose.
        let mut s = hover_state();
        s.angular_velocity = V::new(0.3, 0.0, 0.7);
        let b2 = s.rotation.b2();
        let b3 = s.rotation.b3();
        s.velocity = (b3.scale(0.0) - b2.scale(0.7)).scale(1.0);
        let r = residuals(&s, &spec_z0(0.0)).unwrap();
        assert!(r.max_abs() <= 1e-15);
    }

    #[test]
    fn residual_signs_match_a_rigid_orbit() {
        // Counterclockwise unit-rate orbit in the z = 0 plane: the pointing
        // frame is Rz(pi + t) with body rate Ω = e3 and velocity e2 at
        // t = 0. This motion preserves b1 = -p̂, so its residuals vanish;
        // the opposite coupling signs would report |mu_O3| = 2.
        let spec = spec_z0(0.0);
        let s = RigidBodyState::new(
            Rotation::rot_z(PI),
            V::new(1.0, 0.0, 0.0),
            V::new(0.0, 1.0, 0.0),
            V::new(0.0, 0.0, 1.0),
        );
        let r = residuals(&s, &spec).unwrap();
        assert!(r.max_abs() <= 1e-15, "residuals {r:?}");
    }

    #[test]
    fn residuals_reject_target_collision() {
        let mut s = hover_state();
        s.position = V::new(0.05, 0.0, 0.0);
        assert!(matches!(
            residuals(&s, &spec_z0(0.0)),
            Err(Error::TargetCollision { .. })
        ));
    }

    #[test]
    fn task_errors_at_hover_are_zero() {
        let e = task_errors(&hover_state(), &spec_z0(0.0)).unwrap();
        assert!(e.e_pt <= 1e-15);
        assert_eq!(e.e_z, 0.0);
    }

    #[test]
    fn task_errors_anti_pointing_is_two() {
        // b1 = e1 and p̂ = e1: worst-case pointing error.
        let s = RigidBodyState::at_rest(Rotation::identity(), V::new(1.0, 0.0, 0.0));
        let e = task_errors(&s, &spec_z0(0.0)).unwrap();
        assert_eq!(e.e_pt, 2.0);
        assert_eq!(e.e_z, 0.0);
    }

    #[test]
    fn task_errors_altitude_offset() {
        let s = RigidBodyState::at_rest(Rotation::rot_z(PI), V::new(1.0, 0.0, 0.5));
        let e = task_errors(&s, &spec_z0(0.0)).unwrap();
        assert_eq!(e.e_z, 0.5);
    }

    #[test]
    fn regularity_upright_is_feasible() {
        let s = RigidBodyState::at_rest(Rotation::identity(), V::new(1.0, 0.0, 0.0));
        let rep = regularity(&s, &spec_z0(0.0));
        assert_eq!(rep.s3, 1.0);
        assert!(rep.feasible);
    }

    #[test]
    fn regularity_flags_singular_attitude() {
        // b3 = e1 after a quarter turn about y: s3 = 0.
        let s = RigidBodyState::at_rest(Rotation::rot_y(PI / 2.0), V::new(1.0, 0.0, 0.0));
        let rep = regularity(&s, &spec_z0(0.0));
        assert!(rep.s3.abs() < 1e-15);
        assert!(!rep.feasible);
    }

    #[test]
    fn regularity_on_arc_point() {
        let theta = 20.0f64.to_radians();
        let s = RigidBodyState::at_rest(
            Rotation::rot_z(PI),
            V::new(0.9 * theta.cos(), 0.9 * theta.sin(), 0.58),
        );
        let rep = regularity(&s, &spec_z0(0.58));
        let expected_rho = (0.81f64 + 0.3364).sqrt();
        assert_relative_eq!(rep.rho, expected_rho, epsilon = 1e-12);
    }

    #[test]
    fn on_manifold_static_state_is_exact() {
        let spec = spec_z0(0.58);
        let s = on_manifold_init(0.7, 0.9, &spec, 0.0).unwrap();
        let r = residuals(&s, &spec).unwrap();
        assert!(r.max_abs() <= 1e-15);
        let e = task_errors(&s, &spec).unwrap();
        assert!(e.e_pt <= 1e-12);
        assert_eq!(e.e_z, 0.0);
    }

    #[test]
    fn on_manifold_arc_point_matches_fig_geometry() {
        let spec = spec_z0(0.58);
        let s = on_manifold_init(20.0f64.to_radians(), 0.9, &spec, 0.0).unwrap();
        let e = task_errors(&s, &spec).unwrap();
        assert!(e.e_pt <= 1e-12);
        let rep = regularity(&s, &spec);
        assert_relative_eq!(rep.rho, (0.81f64 + 0.3364).sqrt(), epsilon = 1e-12);
        assert!(rep.feasible);
    }

    #[test]
    fn on_manifold_rejects_steep_geometry() {
        // Horizontal radius far smaller than altitude: |s3| below eps_s.
        let spec = spec_z0(0.58);
        assert!(matches!(
            on_manifold_init(0.0, 0.01, &spec, 0.0),
            Err(Error::InfeasibleGeometry { .. })
        ));
    }

    #[test]
    fn perturb_vertical_shifts_mu_z_exactly() {
        let spec = spec_z0(0.58);
        let s = on_manifold_init(0.3, 0.9, &spec, 1.0).unwrap();
        let p = perturb_vertical(&s, 0.1);
        let r = residuals(&p, &spec).unwrap();
        assert_relative_eq!(r.mu_z, 0.1, epsilon = 1e-15);
        // b2 is horizontal, so the O3 channel is untouched.
        assert!(r.mu_o3.abs() <= 1e-15);
    }

    #[test]
    fn perturb_vertical_zero_is_identity() {
        let spec = spec_z0(0.58);
        let s = on_manifold_init(0.3, 0.9, &spec, 1.0).unwrap();
        assert_eq!(perturb_vertical(&s, 0.0), s);
    }

    #[test]
    fn residual_zero_set_matches_pointing_compatibility() {
        // On poses with b1 = −p̂, zero residuals are equivalent to the
        // vector condition (RΩ) × b1 + (I − p̂ p̂ᵀ) v / ρ = 0.
        let spec = spec_z0(0.58);
        for k in 0..20 {
            let theta = 0.31 * k as f64;
            let speed = -2.0 + 0.2 * k as f64;
            let s = on_manifold_init(theta, 0.9, &spec, speed).unwrap();
            let (rel, rho) = spec.relative_position(&s);
            let p_hat = rel / rho;
            let omega_world = s.rotation.apply(s.angular_velocity);
            let b1 = s.rotation.b1();
            let projected = s.velocity - p_hat.scale(p_hat.dot(&s.velocity));
            let cond = omega_world.cross(&b1) + projected / rho;
            assert!(cond.max_abs() <= 1e-12, "violation {:?}", cond);
        }
    }

    proptest! {
        #[test]
        fn on_manifold_round_trip(
            theta in 0.0f64..(2.0 * PI),
            radius in 0.3f64..2.0,
            speed in -3.0f64..3.0,
            z0 in -1.0f64..1.0,
        ) {
            let spec = spec_z0(z0);
            let s = on_manifold_init(theta, radius, &spec, speed).unwrap();
            let r = residuals(&s, &spec).unwrap();
            prop_assert!(r.max_abs() <= 1e-12);
            let e = task_errors(&s, &spec).unwrap();
            prop_assert!(e.e_pt <= 1e-12);
            prop_assert!(e.e_z <= 1e-12);
        }

        #[test]
        fn pointing_error_invariant_under_scene_yaw(
            theta in 0.0f64..(2.0 * PI),
            radius in 0.3f64..2.0,
            speed in -2.0f64..2.0,
            yaw in 0.0f64..(2.0 * PI),
            tilt in -0.5f64..0.5,
        ) {
            let spec = spec_z0(0.58);
            let mut s = on_manifold_init(theta, radius, &spec, speed).unwrap();
            // Knock the attitude off-manifold so e_pt is nontrivial.
            s.rotation = s.rotation * Rotation::rot_y(tilt);
            let e0 = task_errors(&s, &spec).unwrap();

            let q = Rotation::rot_z(yaw);
            let rotated = RigidBodyState::new(
                q * s.rotation,
                q.apply(s.position),
                q.apply(s.velocity),
                s.angular_velocity,
            );
            let e1 = task_errors(&rotated, &spec).unwrap();
            prop_assert!((e0.e_pt - e1.e_pt).abs() <= 1e-12);
        }

        #[test]
        fn on_manifold_round_trip_with_offset_target(
            theta in 0.0f64..(2.0 * PI),
            tx in -2.0f64..2.0,
            ty in -2.0f64..2.0,
            tz in -0.4f64..0.4,
            speed in -2.0f64..2.0,
        ) {
            let spec = TaskSpec::new(V::new(tx, ty, tz), 0.58, 0.1, 0.1).unwrap();
            let s = on_manifold_init(theta, 0.9, &spec, speed).unwrap();
            let r = residuals(&s, &spec).unwrap();
            prop_assert!(r.max_abs() <= 1e-12);
            let e = task_errors(&s, &spec).unwrap();
            prop_assert!(e.e_pt <= 1e-12);
        }
    }
}
