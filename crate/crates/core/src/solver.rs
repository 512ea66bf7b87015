//! Generic invariance solver.
//!
//! Works for any set of `m ∈ {1..4}` velocity-linear constraints
//! `μᵃ = Aᵃ(g)·Ω + Bᵃ(g)·v` paired with `m` selected inputs drawn from
//! thrust and the three body torques. Differentiating each constraint along
//! the dynamics and imposing `μ̇ᵃ = −kᵃ μᵃ` produces the linear system
//!
//! ```text
//!   Gᵃ + f·Cᵃ·a_f + Σ τᵢ·Cᵃ·a_τᵢ = −kᵃ μᵃ
//! ```
//!
//! where `Gᵃ` collects every input-free term. The system is uniquely
//! solvable exactly when the constraint distribution is transversal to the
//! selected actuation directions; loss of transversality shows up as a
//! blow-up of the matrix condition number and is reported as
//! [`Error::SingularSystem`].
//!
//! The coefficient derivative `dCᵃ·ġ` is taken from an analytic evaluator
//! when the constraint supplies one, and otherwise by central finite
//! differences on the group (step [`FD_STEP`], rotation perturbed by a
//! first-order exponential update re-projected to SO(3)).

use crate::dynamics::{affine_fields, AccelPair, ControlInput, RigidBodyState, VehicleParams};
use crate::error::{Error, Result};
use crate::linalg::Vec3;
use crate::scalar::Real;
use crate::se3::{hat, project_to_so3, Axis};
use crate::task::TaskSpec;

/// Central-difference step for coefficient derivatives on the group.
pub const FD_STEP: f64 = 1e-6;

/// Condition-number ceiling (Frobenius estimate) above which the invariance
/// system is treated as singular.
///
/// For the pointing–altitude task the estimate scales as `~2.5/|s3|` near
/// the singular attitude: comfortably feasible states sit below `~2e3`
/// even at the threshold corners, while `|s3| = 1e-5` already exceeds
/// `1e5`. The ceiling separates those regimes.
pub const MAX_CONDITION: f64 = 1e4;

/// Body-form coefficients of one velocity-linear constraint,
/// `μ = angular·Ω + linear·v`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BodyCoefficients<S> {
    /// Coefficient on the body angular velocity.
    pub angular: Vec3<S>,
    /// Coefficient on the world-frame translational velocity.
    pub linear: Vec3<S>,
}

impl<S: Real> BodyCoefficients<S> {
    pub fn new(angular: Vec3<S>, linear: Vec3<S>) -> Self {
        BodyCoefficients { angular, linear }
    }

    /// Constraint value at a state: `A·Ω + B·v`.
    pub fn eval(&self, state: &RigidBodyState<S>) -> S {
        self.angular.dot(&state.angular_velocity) + self.linear.dot(&state.velocity)
    }

    /// Pairing with a velocity-space direction.
    pub fn pair(&self, accel: &AccelPair<S>) -> S {
        self.angular.dot(&accel.angular) + self.linear.dot(&accel.linear)
    }
}

/// Coefficient evaluator: must depend on the pose `(R, p)` only.
pub type CoefficientFn<S> =
    Box<dyn Fn(&RigidBodyState<S>) -> BodyCoefficients<S> + Send + Sync>;

/// Analytic directional derivative of the coefficients along the state's
/// own configuration motion `ġ = (R hat(Ω)), v)`.
pub type CoefficientRateFn<S> =
    Box<dyn Fn(&RigidBodyState<S>) -> BodyCoefficients<S> + Send + Sync>;

/// One velocity-linear constraint channel.
pub struct ConstraintChannel<S> {
    pub name: &'static str,
    pub coefficients: CoefficientFn<S>,
    /// Analytic `dC·ġ`; when absent the solver falls back to central
    /// finite differences.
    pub coefficient_rate: Option<CoefficientRateFn<S>>,
}

/// Selectable control input.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum InputChannel {
    Thrust,
    Torque(Axis),
}

/// A full invariance problem: `m` constraints paired with `m` inputs.
pub struct GenericConstraintSet<S> {
    channels: Vec<ConstraintChannel<S>>,
    inputs: Vec<InputChannel>,
}

impl<S: Real> GenericConstraintSet<S> {
    pub fn new(channels: Vec<ConstraintChannel<S>>, inputs: Vec<InputChannel>) -> Result<Self> {
        if channels.is_empty() || channels.len() > 4 || channels.len() != inputs.len() {
            return Err(Error::DimensionMismatch {
                constraints: channels.len(),
                inputs: inputs.len(),
                gains: channels.len(),
            });
        }
        Ok(GenericConstraintSet { channels, inputs })
    }

    pub fn len(&self) -> usize {
        self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.channels.is_empty()
    }

    pub fn inputs(&self) -> &[InputChannel] {
        &self.inputs
    }

    /// Drop the analytic derivative evaluators, forcing the
    /// finite-difference path. Used to cross-check the two routes.
    pub fn without_analytic_rates(mut self) -> Self {
        for ch in &mut self.channels {
            ch.coefficient_rate = None;
        }
        self
    }

    /// Current residuals `μᵃ = Cᵃ·ξ` of every channel.
    pub fn residuals(&self, state: &RigidBodyState<S>) -> Vec<S> {
        self.channels
            .iter()
            .map(|ch| (ch.coefficients)(state).eval(state))
            .collect()
    }
}

/// Pose perturbed along its own configuration velocity by parameter `t`:
/// `R ← proj(R (I + t hat(Ω)))`, `p ← p + t v`.
fn flow_pose<S: Real>(state: &RigidBodyState<S>, t: S) -> Result<RigidBodyState<S>> {
    let r = state.rotation.matrix();
    let stepped = *r * (crate::linalg::Mat3::identity() + hat(state.angular_velocity).scale(t));
    let rotation = project_to_so3(&stepped)?;
    let mut out = *state;
    out.rotation = rotation;
    out.position = state.position + state.velocity.scale(t);
    Ok(out)
}

fn coefficient_rate<S: Real>(
    channel: &ConstraintChannel<S>,
    state: &RigidBodyState<S>,
) -> Result<BodyCoefficients<S>> {
    if let Some(rate) = &channel.coefficient_rate {
        return Ok(rate(state));
    }
    let step = S::of(FD_STEP);
    let fwd = (channel.coefficients)(&flow_pose(state, step)?);
    let bwd = (channel.coefficients)(&flow_pose(state, -step)?);
    let inv = S::one() / (S::two() * step);
    Ok(BodyCoefficients::new(
        (fwd.angular - bwd.angular).scale(inv),
        (fwd.linear - bwd.linear).scale(inv),
    ))
}

/// Gaussian elimination with partial pivoting on the active `n×n` block.
/// Returns `None` on a vanishing pivot.
fn solve_small<S: Real>(mut a: [[S; 4]; 4], mut b: [S; 4], n: usize) -> Option<[S; 4]> {
    for col in 0..n {
        let mut pivot = col;
        for row in (col + 1)..n {
            if a[row][col].abs() > a[pivot][col].abs() {
                pivot = row;
            }
        }
        if a[pivot][col].abs() == S::zero() {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        let pivot_row = a[col];
        for row in (col + 1)..n {
            let factor = a[row][col] / a[col][col];
            for (dst, src) in a[row][col..n].iter_mut().zip(&pivot_row[col..n]) {
                *dst = *dst - factor * *src;
            }
            b[row] = b[row] - factor * b[col];
        }
    }
    let mut x = [S::zero(); 4];
    for col in (0..n).rev() {
        let mut acc = b[col];
        for k in (col + 1)..n {
            acc = acc - a[col][k] * x[k];
        }
        x[col] = acc / a[col][col];
    }
    Some(x)
}

fn frobenius<S: Real>(a: &[[S; 4]; 4], n: usize) -> S {
    let mut acc = S::zero();
    for row in a.iter().take(n) {
        for v in row.iter().take(n) {
            acc = acc + *v * *v;
        }
    }
    acc.sqrt()
}

/// Frobenius condition estimate `‖A‖_F ‖A⁻¹‖_F`; `None` if singular.
fn condition_estimate<S: Real>(a: &[[S; 4]; 4], n: usize) -> Option<S> {
    let mut inv = [[S::zero(); 4]; 4];
    for col in 0..n {
        let mut e = [S::zero(); 4];
        e[col] = S::one();
        let x = solve_small(*a, e, n)?;
        for row in 0..n {
            inv[row][col] = x[row];
        }
    }
    Some(frobenius(a, n) * frobenius(&inv, n))
}

/// Solve the invariance system for the selected inputs so that each
/// constraint obeys `μ̇ᵃ = −kᵃ μᵃ` along the closed loop. Zero gains give
/// the pure invariance-enforcing input.
pub fn solve_invariance_generic<S: Real>(
    state: &RigidBodyState<S>,
    params: &VehicleParams<S>,
    set: &GenericConstraintSet<S>,
    gains: &[S],
) -> Result<ControlInput<S>> {
    let n = set.len();
    if gains.len() != n {
        return Err(Error::DimensionMismatch {
            constraints: n,
            inputs: set.inputs.len(),
            gains: gains.len(),
        });
    }

    let fields = affine_fields(state, params);
    let column = |input: &InputChannel| -> AccelPair<S> {
        match input {
            InputChannel::Thrust => fields.thrust,
            InputChannel::Torque(axis) => fields.torque[axis.index()],
        }
    };

    let mut matrix = [[S::zero(); 4]; 4];
    let mut rhs = [S::zero(); 4];
    for (row, channel) in set.channels.iter().enumerate() {
        let coeff = (channel.coefficients)(state);
        let rate = coefficient_rate(channel, state)?;
        let mu = coeff.eval(state);
        // G^a: coefficient drift along ġ plus the pairing with a0.
        let g_term = rate.eval(state) + coeff.pair(&fields.drift);
        rhs[row] = -(gains[row] * mu) - g_term;
        for (col, input) in set.inputs.iter().enumerate() {
            matrix[row][col] = coeff.pair(&column(input));
        }
    }

    let max_cond = S::of(MAX_CONDITION);
    let cond = condition_estimate(&matrix, n).ok_or(Error::SingularSystem {
        cond: f64::INFINITY,
        max_cond: MAX_CONDITION,
    })?;
    if cond > max_cond || !cond.is_finite() {
        return Err(Error::SingularSystem {
            cond: cond.to_f64().unwrap_or(f64::NAN),
            max_cond: MAX_CONDITION,
        });
    }

    let solution = solve_small(matrix, rhs, n).ok_or(Error::SingularSystem {
        cond: f64::INFINITY,
        max_cond: MAX_CONDITION,
    })?;

    let mut input = ControlInput::zero();
    for (value, channel) in solution.iter().zip(set.inputs.iter()) {
        match channel {
            InputChannel::Thrust => input.thrust = *value,
            InputChannel::Torque(Axis::E1) => input.torque.x = *value,
            InputChannel::Torque(Axis::E2) => input.torque.y = *value,
            InputChannel::Torque(Axis::E3) => input.torque.z = *value,
        }
    }
    Ok(input)
}

/// The pointing–altitude constraint set with analytic coefficient rates,
/// paired with inputs `(f, τ2, τ3)` in residual order
/// `(mu_z, mu_O3, mu_O2)`.
pub fn task_constraint_set<S: Real>(spec: &TaskSpec<S>) -> GenericConstraintSet<S> {
    let target = spec.target;

    let altitude = ConstraintChannel {
        name: "mu_z",
        coefficients: Box::new(|_: &RigidBodyState<S>| {
            BodyCoefficients::new(Vec3::zero(), Vec3::e3())
        }),
        // Constant coefficients: zero drift.
        coefficient_rate: Some(Box::new(|_: &RigidBodyState<S>| {
            BodyCoefficients::new(Vec3::zero(), Vec3::zero())
        })),
    };

    let pointing_o3 = ConstraintChannel {
        name: "mu_O3",
        coefficients: Box::new(move |s: &RigidBodyState<S>| {
            let rel = s.position - target;
            let rho = rel.norm();
            BodyCoefficients::new(Vec3::e3(), s.rotation.b2() / rho)
        }),
        coefficient_rate: Some(Box::new(move |s: &RigidBodyState<S>| {
            let rel = s.position - target;
            let rho = rel.norm();
            let rho_dot = (rel / rho).dot(&s.velocity);
            let omega_world = s.rotation.apply(s.angular_velocity);
            let b2 = s.rotation.b2();
            let b2_dot = omega_world.cross(&b2);
            // d/dt(b2/ρ) = ḃ2/ρ − b2 ρ̇/ρ²
            let linear = b2_dot / rho - b2.scale(rho_dot / (rho * rho));
            BodyCoefficients::new(Vec3::zero(), linear)
        })),
    };

    let pointing_o2 = ConstraintChannel {
        name: "mu_O2",
        coefficients: Box::new(move |s: &RigidBodyState<S>| {
            let rel = s.position - target;
            let rho = rel.norm();
            BodyCoefficients::new(Vec3::e2(), -s.rotation.b3() / rho)
        }),
        coefficient_rate: Some(Box::new(move |s: &RigidBodyState<S>| {
            let rel = s.position - target;
            let rho = rel.norm();
            let rho_dot = (rel / rho).dot(&s.velocity);
            let omega_world = s.rotation.apply(s.angular_velocity);
            let b3 = s.rotation.b3();
            let b3_dot = omega_world.cross(&b3);
            // d/dt(−b3/ρ) = −ḃ3/ρ + b3 ρ̇/ρ²
            let linear = -b3_dot / rho + b3.scale(rho_dot / (rho * rho));
            BodyCoefficients::new(Vec3::zero(), linear)
        })),
    };

    GenericConstraintSet::new(
        vec![altitude, pointing_o3, pointing_o2],
        vec![
            InputChannel::Thrust,
            InputChannel::Torque(Axis::E3),
            InputChannel::Torque(Axis::E2),
        ],
    )
    .expect("task set is 3x3")
}
