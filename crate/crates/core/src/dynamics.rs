//! Quadrotor rigid-body dynamics.
//!
//! State evolves by
//!
//! ```text
//!   ṗ = v
//!   m v̇ = f R e3 − m g e3
//!   Ṙ = R hat(Ω)
//!   J Ω̇ + Ω × J Ω = τ
//! ```
//!
//! with position `p` and velocity `v` in the world frame and angular
//! velocity `Ω` in the body frame. The velocity-level form is affine in the
//! inputs `(f, τ)`; [`affine_fields`] exposes that decomposition for the
//! constraint solver.

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;
use crate::se3::{hat, Rotation};

/// Mass, gravity, and the diagonal inertia. All strictly positive.
///
/// Only diagonal inertia is representable: the closed-form torque laws rely
/// on it, so a full inertia matrix is rejected at the type level.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VehicleParams<S> {
    mass: S,
    gravity: S,
    inertia: Vec3<S>,
}

impl<S: Real> VehicleParams<S> {
    pub fn new(mass: S, gravity: S, j1: S, j2: S, j3: S) -> Result<Self> {
        for (name, value) in [
            ("mass", mass),
            ("gravity", gravity),
            ("J1", j1),
            ("J2", j2),
            ("J3", j3),
        ] {
            if !value.is_finite() || value <= S::zero() {
                return Err(Error::InvalidParameter {
                    name,
                    value: value.to_f64().unwrap_or(f64::NAN),
                });
            }
        }
        Ok(VehicleParams {
            mass,
            gravity,
            inertia: Vec3::new(j1, j2, j3),
        })
    }

    #[inline]
    pub fn mass(&self) -> S {
        self.mass
    }

    #[inline]
    pub fn gravity(&self) -> S {
        self.gravity
    }

    /// Principal inertias `(J1, J2, J3)`.
    #[inline]
    pub fn inertia(&self) -> Vec3<S> {
        self.inertia
    }

    /// `J v` for the diagonal inertia.
    #[inline]
    pub fn inertia_apply(&self, v: Vec3<S>) -> Vec3<S> {
        Vec3::new(
            self.inertia.x * v.x,
            self.inertia.y * v.y,
            self.inertia.z * v.z,
        )
    }

    /// `J⁻¹ v` for the diagonal inertia.
    #[inline]
    pub fn inertia_solve(&self, v: Vec3<S>) -> Vec3<S> {
        Vec3::new(
            v.x / self.inertia.x,
            v.y / self.inertia.y,
            v.z / self.inertia.z,
        )
    }
}

/// Pose plus left-trivialized velocities: the simulation's unit of evolution.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RigidBodyState<S> {
    /// Attitude, body → world.
    pub rotation: Rotation<S>,
    /// Position in the world frame (m).
    pub position: Vec3<S>,
    /// Translational velocity in the world frame (m/s).
    pub velocity: Vec3<S>,
    /// Angular velocity in the body frame (rad/s).
    pub angular_velocity: Vec3<S>,
}

impl<S: Real> RigidBodyState<S> {
    pub fn new(
        rotation: Rotation<S>,
        position: Vec3<S>,
        velocity: Vec3<S>,
        angular_velocity: Vec3<S>,
    ) -> Self {
        RigidBodyState {
            rotation,
            position,
            velocity,
            angular_velocity,
        }
    }

    /// State at rest at a pose.
    pub fn at_rest(rotation: Rotation<S>, position: Vec3<S>) -> Self {
        RigidBodyState::new(rotation, position, Vec3::zero(), Vec3::zero())
    }

    pub fn validate(&self) -> Result<()> {
        if !self.position.is_finite() {
            return Err(Error::NonFiniteState { what: "position" });
        }
        if !self.velocity.is_finite() {
            return Err(Error::NonFiniteState { what: "velocity" });
        }
        if !self.angular_velocity.is_finite() {
            return Err(Error::NonFiniteState {
                what: "angular velocity",
            });
        }
        if !self.rotation.matrix().is_finite() {
            return Err(Error::NonFiniteState { what: "rotation" });
        }
        Rotation::try_new(*self.rotation.matrix()).map(|_| ())
    }

    /// Body components of the translational velocity, `v_i = b_iᵀ v`.
    pub fn body_velocity(&self) -> Vec3<S> {
        let r = self.rotation.matrix();
        Vec3::new(
            r.col(0).dot(&self.velocity),
            r.col(1).dot(&self.velocity),
            r.col(2).dot(&self.velocity),
        )
    }
}

/// Thrust along the body z-axis plus body torques.
///
/// The pointing task never actuates `τ1`; its controllers construct inputs
/// with `torque.x = 0`, but the type itself stays general.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ControlInput<S> {
    /// Total thrust (N), along `b3`.
    pub thrust: S,
    /// Body torques (N·m), components about `b1, b2, b3`.
    pub torque: Vec3<S>,
}

impl<S: Real> ControlInput<S> {
    pub fn new(thrust: S, torque: Vec3<S>) -> Self {
        ControlInput { thrust, torque }
    }

    pub fn zero() -> Self {
        ControlInput::new(S::zero(), Vec3::zero())
    }

    /// Input with `τ1 = 0`, as produced by the pointing-task controllers.
    pub fn pitch_yaw(thrust: S, tau2: S, tau3: S) -> Self {
        ControlInput::new(thrust, Vec3::new(S::zero(), tau2, tau3))
    }
}

/// Time derivative of a [`RigidBodyState`] in the ambient space.
///
/// `rotation_rate` is the full 3×3 matrix `R hat(Ω)`; keeping it in matrix
/// form is what lets the integrator do plain ambient-space RK4 arithmetic.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct StateDerivative<S> {
    pub rotation_rate: Mat3<S>,
    pub position_rate: Vec3<S>,
    pub velocity_rate: Vec3<S>,
    pub angular_velocity_rate: Vec3<S>,
}

/// One velocity-space direction, split into angular and linear parts
/// `(Ω̇ component, v̇ component)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AccelPair<S> {
    pub angular: Vec3<S>,
    pub linear: Vec3<S>,
}

impl<S: Real> AccelPair<S> {
    pub fn new(angular: Vec3<S>, linear: Vec3<S>) -> Self {
        AccelPair { angular, linear }
    }

    pub fn zero() -> Self {
        AccelPair::new(Vec3::zero(), Vec3::zero())
    }

    pub fn scale(&self, s: S) -> Self {
        AccelPair::new(self.angular.scale(s), self.linear.scale(s))
    }
}

impl<S: Real> std::ops::Add for AccelPair<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        AccelPair::new(self.angular + rhs.angular, self.linear + rhs.linear)
    }
}

/// Affine-in-control decomposition of the velocity dynamics,
/// `ξ̇ = a0 + f·a_f + Σ τi·a_τi` with `ξ = (Ω, v)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AffineFields<S> {
    /// Drift: `(−J⁻¹(Ω × JΩ), −g e3)`.
    pub drift: AccelPair<S>,
    /// Thrust direction: `(0, R e3 / m)`; depends on the attitude.
    pub thrust: AccelPair<S>,
    /// Torque directions: `(J⁻¹ e_i, 0)`; constant in these coordinates.
    pub torque: [AccelPair<S>; 3],
}

impl<S: Real> AffineFields<S> {
    /// Reassemble `(Ω̇, v̇)` for a concrete input.
    pub fn reconstruct(&self, input: &ControlInput<S>) -> AccelPair<S> {
        self.drift
            + self.thrust.scale(input.thrust)
            + self.torque[0].scale(input.torque.x)
            + self.torque[1].scale(input.torque.y)
            + self.torque[2].scale(input.torque.z)
    }
}

/// Right-hand side of the equations of motion.
pub fn state_derivative<S: Real>(
    state: &RigidBodyState<S>,
    params: &VehicleParams<S>,
    input: &ControlInput<S>,
) -> StateDerivative<S> {
    let r = state.rotation.matrix();
    let omega = state.angular_velocity;
    let thrust_accel = r.col(2).scale(input.thrust / params.mass());
    let gravity_accel = Vec3::e3().scale(-params.gravity());
    let coriolis = omega.cross(&params.inertia_apply(omega));
    StateDerivative {
        rotation_rate: *r * hat(omega),
        position_rate: state.velocity,
        velocity_rate: thrust_accel + gravity_accel,
        angular_velocity_rate: params.inertia_solve(input.torque - coriolis),
    }
}

/// Affine decomposition of the velocity dynamics at the current state.
pub fn affine_fields<S: Real>(
    state: &RigidBodyState<S>,
    params: &VehicleParams<S>,
) -> AffineFields<S> {
    let omega = state.angular_velocity;
    let coriolis = omega.cross(&params.inertia_apply(omega));
    let drift = AccelPair::new(
        -params.inertia_solve(coriolis),
        Vec3::e3().scale(-params.gravity()),
    );
    let thrust = AccelPair::new(
        Vec3::zero(),
        state
            .rotation
            .matrix()
            .col(2)
            .scale(S::one() / params.mass()),
    );
    let torque = [
        AccelPair::new(params.inertia_solve(Vec3::e1()), Vec3::zero()),
        AccelPair::new(params.inertia_solve(Vec3::e2()), Vec3::zero()),
        AccelPair::new(params.inertia_solve(Vec3::e3()), Vec3::zero()),
    ];
    AffineFields {
        drift,
        thrust,
        torque,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    type V = Vec3<f64>;

    fn params() -> VehicleParams<f64> {
        VehicleParams::new(1.0, 9.8, 2.0, 2.0, 6.0).unwrap()
    }

    #[test]
    fn rejects_nonpositive_parameters() {
        assert!(VehicleParams::new(0.0, 9.8, 2.0, 2.0, 6.0).is_err());
        assert!(VehicleParams::new(1.0, -9.8, 2.0, 2.0, 6.0).is_err());
        assert!(VehicleParams::new(1.0, 9.8, 2.0, f64::NAN, 6.0).is_err());
    }

    #[test]
    fn hover_is_an_equilibrium() {
        let p = params();
        let state = RigidBodyState::at_rest(Rotation::identity(), V::zero());
        let input = ControlInput::pitch_yaw(p.mass() * p.gravity(), 0.0, 0.0);
        let d = state_derivative(&state, &p, &input);
        assert_eq!(d.velocity_rate, V::zero());
        assert_eq!(d.angular_velocity_rate, V::zero());
        assert_eq!(d.position_rate, V::zero());
    }

    #[test]
    fn unpowered_state_free_falls() {
        let p = params();
        let state = RigidBodyState::at_rest(Rotation::identity(), V::zero());
        let d = state_derivative(&state, &p, &ControlInput::zero());
        assert_eq!(d.velocity_rate, V::new(0.0, 0.0, -9.8));
    }

    #[test]
    fn principal_axis_spin_has_no_euler_coupling() {
        // e1 is a principal axis, so Ω × JΩ = 0 and Ω̇ = 0 under zero torque.
        let p = params();
        let mut state = RigidBodyState::at_rest(Rotation::identity(), V::zero());
        state.angular_velocity = V::new(1.0, 0.0, 0.0);
        let d = state_derivative(&state, &p, &ControlInput::zero());
        assert_eq!(d.angular_velocity_rate, V::zero());
    }

    #[test]
    fn thrust_field_at_identity() {
        let p = params();
        let state = RigidBodyState::at_rest(Rotation::identity(), V::zero());
        let fields = affine_fields(&state, &p);
        assert_eq!(fields.thrust.angular, V::zero());
        assert_eq!(fields.thrust.linear, V::e3());
    }

    #[test]
    fn pitch_torque_field_uses_j2() {
        let p = params();
        let state = RigidBodyState::at_rest(Rotation::identity(), V::zero());
        let fields = affine_fields(&state, &p);
        assert_eq!(fields.torque[1].angular, V::new(0.0, 0.5, 0.0));
        assert_eq!(fields.torque[1].linear, V::zero());
    }

    fn arb_state() -> impl Strategy<Value = RigidBodyState<f64>> {
        (
            0.0f64..(2.0 * PI),
            -1.5f64..1.5,
            0.0f64..(2.0 * PI),
            proptest::array::uniform3(-5.0f64..5.0),
            proptest::array::uniform3(-5.0f64..5.0),
            proptest::array::uniform3(-5.0f64..5.0),
        )
            .prop_map(|(a, b, c, p, v, w)| {
                let r = Rotation::rot_z(a) * Rotation::rot_y(b) * Rotation::rot_x(c);
                RigidBodyState::new(
                    r,
                    V::new(p[0], p[1], p[2]),
                    V::new(v[0], v[1], v[2]),
                    V::new(w[0], w[1], w[2]),
                )
            })
    }

    fn arb_input() -> impl Strategy<Value = ControlInput<f64>> {
        (-20.0f64..20.0, proptest::array::uniform3(-10.0f64..10.0))
            .prop_map(|(f, t)| ControlInput::new(f, V::new(t[0], t[1], t[2])))
    }

    proptest! {
        #[test]
        fn affine_reconstruction_matches_dynamics(s in arb_state(), u in arb_input()) {
            let p = params();
            let d = state_derivative(&s, &p, &u);
            let rebuilt = affine_fields(&s, &p).reconstruct(&u);
            prop_assert!((rebuilt.angular - d.angular_velocity_rate).max_abs() <= 1e-13);
            prop_assert!((rebuilt.linear - d.velocity_rate).max_abs() <= 1e-13);
        }

        #[test]
        fn rotation_rate_is_tangent_to_so3(s in arb_state()) {
            let p = params();
            let d = state_derivative(&s, &p, &ControlInput::zero());
            let body = s.rotation.matrix().transpose() * d.rotation_rate;
            let sym = (body + body.transpose()).frobenius_norm();
            prop_assert!(sym <= 1e-12);
        }

        #[test]
        fn derivative_is_affine_in_inputs(s in arb_state(), u1 in arb_input(), u2 in arb_input()) {
            // Superposition of the input-dependent part.
            let p = params();
            let d0 = state_derivative(&s, &p, &ControlInput::zero());
            let d1 = state_derivative(&s, &p, &u1);
            let d2 = state_derivative(&s, &p, &u2);
            let sum = ControlInput::new(u1.thrust + u2.thrust, u1.torque + u2.torque);
            let ds = state_derivative(&s, &p, &sum);
            let lhs = ds.velocity_rate + d0.velocity_rate;
            let rhs = d1.velocity_rate + d2.velocity_rate;
            prop_assert!((lhs - rhs).max_abs() <= 1e-12);
            let lhs_w = ds.angular_velocity_rate + d0.angular_velocity_rate;
            let rhs_w = d1.angular_velocity_rate + d2.angular_velocity_rate;
            prop_assert!((lhs_w - rhs_w).max_abs() <= 1e-12);
        }
    }
}
