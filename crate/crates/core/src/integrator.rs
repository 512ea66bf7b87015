//! Fixed-step RK4 integration of the closed loop.
//!
//! The rotation is integrated as a plain 3×3 matrix in the ambient space
//! and re-projected to SO(3) on a configurable schedule (default: every
//! step). The control policy is evaluated at all four stage states, which
//! keeps the closed loop fourth-order; stage rotations are allowed to sit
//! slightly off the group, so policies must tolerate matrices within a few
//! `O(h²)` of orthonormal — every law in this crate does.

use crate::control::{control_stabilized, Gains};
use crate::dynamics::{state_derivative, ControlInput, RigidBodyState, VehicleParams};
use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;
use crate::se3::{project_to_so3, Rotation};
use crate::task::{regularity, residuals, task_errors, RegularityReport, ResidualVector,
    TaskErrors, TaskSpec};

/// Step size, horizon, and drift-repair schedule.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SimConfig<S> {
    /// Step (s).
    pub h: S,
    /// Horizon (s).
    pub t_final: S,
    /// Project the rotation back to SO(3) every this many steps.
    pub reorthonormalize_every: usize,
    /// Stop as soon as the regularity monitors fail.
    pub abort_on_infeasible: bool,
}

impl<S: Real> SimConfig<S> {
    pub fn new(h: S, t_final: S) -> Result<Self> {
        if !h.is_finite() || h <= S::zero() {
            return Err(Error::InvalidSimConfig {
                name: "h",
                value: h.to_f64().unwrap_or(f64::NAN),
            });
        }
        if !t_final.is_finite() || t_final < h {
            return Err(Error::InvalidSimConfig {
                name: "t_final",
                value: t_final.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(SimConfig {
            h,
            t_final,
            reorthonormalize_every: 1,
            abort_on_infeasible: true,
        })
    }

    pub fn with_reorthonormalize_every(mut self, every: usize) -> Self {
        self.reorthonormalize_every = every.max(1);
        self
    }

    pub fn with_abort_on_infeasible(mut self, abort: bool) -> Self {
        self.abort_on_infeasible = abort;
        self
    }

    /// Number of RK4 steps to cover the horizon.
    pub fn steps(&self) -> usize {
        let n = (self.t_final / self.h)
            .round()
            .to_f64()
            .unwrap_or(0.0);
        n as usize
    }
}

/// One recorded instant: state, the policy output at that state, and every
/// monitored quantity, all computed from the same state.
#[derive(Clone, Copy, Debug)]
pub struct TrajectorySample<S> {
    pub t: S,
    pub state: RigidBodyState<S>,
    pub input: ControlInput<S>,
    pub residuals: ResidualVector<S>,
    pub errors: TaskErrors<S>,
    pub regularity: RegularityReport<S>,
}

/// How a simulation ended.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Termination {
    /// Ran to the horizon.
    Completed,
    /// Regularity monitors failed before the policy was evaluated at step
    /// `failed_at_step`; the trajectory holds the feasible prefix only.
    Infeasible { failed_at_step: usize },
}

/// Recorded closed-loop trajectory.
#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub samples: Vec<TrajectorySample<S>>,
    pub termination: Termination,
}

impl<S: Real> Trajectory<S> {
    /// The samples of a run that reached the horizon; an aborted run maps
    /// to [`Error::InfeasibleEncountered`]. A run whose initial state was
    /// already infeasible has no valid sample and reports index 0.
    pub fn ensure_complete(self) -> Result<Vec<TrajectorySample<S>>> {
        match self.termination {
            Termination::Completed => Ok(self.samples),
            Termination::Infeasible { failed_at_step } => Err(Error::InfeasibleEncountered {
                last_valid_index: failed_at_step.saturating_sub(1),
            }),
        }
    }
}

/// State-feedback law driving the simulation.
pub trait ControlPolicy<S: Real> {
    fn control_input(&self, state: &RigidBodyState<S>) -> Result<ControlInput<S>>;
}

impl<S: Real, F> ControlPolicy<S> for F
where
    F: Fn(&RigidBodyState<S>) -> Result<ControlInput<S>>,
{
    fn control_input(&self, state: &RigidBodyState<S>) -> Result<ControlInput<S>> {
        self(state)
    }
}

/// The residual-feedback law of the pointing–altitude task. Zero gains
/// give the pure invariance-enforcing controller.
#[derive(Clone, Copy, Debug)]
pub struct PointingLaw<S> {
    pub params: VehicleParams<S>,
    pub task: TaskSpec<S>,
    pub gains: Gains<S>,
}

impl<S: Real> PointingLaw<S> {
    pub fn new(params: VehicleParams<S>, task: TaskSpec<S>, gains: Gains<S>) -> Self {
        PointingLaw {
            params,
            task,
            gains,
        }
    }

    pub fn invariance(params: VehicleParams<S>, task: TaskSpec<S>) -> Self {
        PointingLaw::new(params, task, Gains::zero())
    }
}

impl<S: Real> ControlPolicy<S> for PointingLaw<S> {
    fn control_input(&self, state: &RigidBodyState<S>) -> Result<ControlInput<S>> {
        control_stabilized(state, &self.params, &self.task, &self.gains)
    }
}

/// Raw ambient-space state used between stages: the rotation matrix is not
/// constrained to the group here.
#[derive(Clone, Copy)]
struct Ambient<S> {
    r: Mat3<S>,
    p: Vec3<S>,
    v: Vec3<S>,
    w: Vec3<S>,
}

impl<S: Real> Ambient<S> {
    fn of(state: &RigidBodyState<S>) -> Self {
        Ambient {
            r: *state.rotation.matrix(),
            p: state.position,
            v: state.velocity,
            w: state.angular_velocity,
        }
    }

    fn as_state(&self) -> RigidBodyState<S> {
        RigidBodyState::new(Rotation::from_matrix_unchecked(self.r), self.p, self.v, self.w)
    }

    fn advanced(&self, d: &Derivs<S>, t: S) -> Self {
        Ambient {
            r: self.r + d.r.scale(t),
            p: self.p + d.p.scale(t),
            v: self.v + d.v.scale(t),
            w: self.w + d.w.scale(t),
        }
    }
}

#[derive(Clone, Copy)]
struct Derivs<S> {
    r: Mat3<S>,
    p: Vec3<S>,
    v: Vec3<S>,
    w: Vec3<S>,
}

fn eval_stage<S: Real, P: ControlPolicy<S>>(
    ambient: &Ambient<S>,
    policy: &P,
    params: &VehicleParams<S>,
    stage: usize,
) -> Result<Derivs<S>> {
    let state = ambient.as_state();
    let input = policy
        .control_input(&state)
        .map_err(|e| Error::PolicyFailure {
            stage,
            source: Box::new(e),
        })?;
    let d = state_derivative(&state, params, &input);
    Ok(Derivs {
        r: d.rotation_rate,
        p: d.position_rate,
        v: d.velocity_rate,
        w: d.angular_velocity_rate,
    })
}

/// One classical RK4 step of the closed loop, without drift repair.
/// The policy is evaluated at all four stage states.
fn rk4_step_raw<S: Real, P: ControlPolicy<S>>(
    state: &RigidBodyState<S>,
    h: S,
    policy: &P,
    params: &VehicleParams<S>,
) -> Result<RigidBodyState<S>> {
    let y0 = Ambient::of(state);
    let half = h * S::half();
    let k1 = eval_stage(&y0, policy, params, 1)?;
    let k2 = eval_stage(&y0.advanced(&k1, half), policy, params, 2)?;
    let k3 = eval_stage(&y0.advanced(&k2, half), policy, params, 3)?;
    let k4 = eval_stage(&y0.advanced(&k3, h), policy, params, 4)?;

    let sixth = h / S::of(6.0);
    let two = S::two();
    let r = y0.r + (k1.r + k2.r.scale(two) + k3.r.scale(two) + k4.r).scale(sixth);
    let p = y0.p + (k1.p + k2.p.scale(two) + k3.p.scale(two) + k4.p).scale(sixth);
    let v = y0.v + (k1.v + k2.v.scale(two) + k3.v.scale(two) + k4.v).scale(sixth);
    let w = y0.w + (k1.w + k2.w.scale(two) + k3.w.scale(two) + k4.w).scale(sixth);
    Ok(RigidBodyState::new(
        Rotation::from_matrix_unchecked(r),
        p,
        v,
        w,
    ))
}

/// One RK4 step with the rotation re-projected to SO(3) afterwards.
pub fn rk4_step<S: Real, P: ControlPolicy<S>>(
    state: &RigidBodyState<S>,
    h: S,
    policy: &P,
    params: &VehicleParams<S>,
) -> Result<RigidBodyState<S>> {
    let mut next = rk4_step_raw(state, h, policy, params)?;
    next.rotation = project_to_so3(next.rotation.matrix())?;
    Ok(next)
}

fn record<S: Real, P: ControlPolicy<S>>(
    t: S,
    state: &RigidBodyState<S>,
    policy: &P,
    spec: &TaskSpec<S>,
) -> Result<TrajectorySample<S>> {
    Ok(TrajectorySample {
        t,
        state: *state,
        input: policy.control_input(state).map_err(|e| Error::PolicyFailure {
            stage: 0,
            source: Box::new(e),
        })?,
        residuals: residuals(state, spec)?,
        errors: task_errors(state, spec)?,
        regularity: regularity(state, spec),
    })
}

/// Integrate the closed loop over the horizon, recording a sample at every
/// step boundary `t = 0, h, 2h, …, T`.
///
/// If the regularity monitors fail and `abort_on_infeasible` is set, the
/// run stops at the offending sample and reports
/// [`Termination::Infeasible`]; with the flag clear the run continues until
/// the policy itself fails.
pub fn simulate<S: Real, P: ControlPolicy<S>>(
    init: &RigidBodyState<S>,
    policy: &P,
    params: &VehicleParams<S>,
    spec: &TaskSpec<S>,
    cfg: &SimConfig<S>,
) -> Result<Trajectory<S>> {
    init.validate()?;
    let steps = cfg.steps();
    let mut samples = Vec::with_capacity(steps + 1);
    let mut state = *init;
    let mut since_projection = 0usize;

    for step in 0..=steps {
        // Gate on the monitors before touching the policy: past the
        // thresholds the control laws are not defined.
        if cfg.abort_on_infeasible && !regularity(&state, spec).feasible {
            return Ok(Trajectory {
                samples,
                termination: Termination::Infeasible {
                    failed_at_step: step,
                },
            });
        }
        let t = cfg.h * S::of(step as f64);
        samples.push(record(t, &state, policy, spec)?);
        if step == steps {
            break;
        }
        state = rk4_step_raw(&state, cfg.h, policy, params)?;
        since_projection += 1;
        if since_projection >= cfg.reorthonormalize_every {
            state.rotation = project_to_so3(state.rotation.matrix())?;
            since_projection = 0;
        }
    }

    Ok(Trajectory {
        samples,
        termination: Termination::Completed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::task::on_manifold_init;
    use std::f64::consts::PI;

    type V = Vec3<f64>;

    fn params() -> VehicleParams<f64> {
        VehicleParams::new(1.0, 9.8, 2.0, 2.0, 6.0).unwrap()
    }

    fn coast() -> impl Fn(&RigidBodyState<f64>) -> Result<ControlInput<f64>> {
        |_: &RigidBodyState<f64>| Ok(ControlInput::zero())
    }

    #[test]
    fn free_fall_step_is_exact() {
        // Constant acceleration: RK4 reproduces v = −g h e3 and
        // p = −g h²/2 e3 up to roundoff.
        let p = params();
        let s0 = RigidBodyState::at_rest(Rotation::identity(), V::zero());
        let h = 0.01;
        let s1 = rk4_step(&s0, h, &coast(), &p).unwrap();
        assert!((s1.velocity - V::new(0.0, 0.0, -9.8 * h)).max_abs() <= 1e-15);
        assert!((s1.position - V::new(0.0, 0.0, -9.8 * h * h / 2.0)).max_abs() <= 1e-17);
    }

    #[test]
    fn principal_axis_spin_is_preserved() {
        let p = params();
        let mut s = RigidBodyState::at_rest(Rotation::identity(), V::zero());
        s.angular_velocity = V::new(0.0, 0.0, 2.0);
        let mut state = s;
        for _ in 0..100 {
            state = rk4_step(&state, 1e-3, &coast(), &p).unwrap();
        }
        assert_eq!(state.angular_velocity, s.angular_velocity);
    }

    #[test]
    fn hover_fixture_is_a_fixed_point() {
        let p = params();
        let spec = TaskSpec::origin(0.0);
        let s0 = RigidBodyState::at_rest(Rotation::rot_z(PI), V::new(1.0, 0.0, 0.0));
        let law = PointingLaw::invariance(p, spec);
        let s1 = rk4_step(&s0, 1e-3, &law, &p).unwrap();
        assert!((s1.position - s0.position).max_abs() <= 1e-12);
        assert!((s1.velocity - s0.velocity).max_abs() <= 1e-12);
        assert!((s1.angular_velocity - s0.angular_velocity).max_abs() <= 1e-12);
        assert!(
            (*s1.rotation.matrix() - *s0.rotation.matrix()).frobenius_norm() <= 1e-12
        );
    }

    #[test]
    fn policy_failure_carries_stage() {
        let p = params();
        let spec = TaskSpec::origin(0.0);
        // Singular attitude: the pointing law fails at the first stage.
        let s = RigidBodyState::at_rest(Rotation::rot_y(PI / 2.0), V::new(1.0, 0.0, 0.0));
        let law = PointingLaw::invariance(p, spec);
        let err = rk4_step(&s, 1e-3, &law, &p).unwrap_err();
        match err {
            Error::PolicyFailure { stage, source } => {
                assert_eq!(stage, 1);
                assert!(matches!(*source, Error::SingularAttitude { .. }));
            }
            other => panic!("unexpected error {other}"),
        }
    }

    #[test]
    fn hover_simulation_stays_put() {
        let p = params();
        let spec = TaskSpec::origin(0.0);
        let s0 = RigidBodyState::at_rest(Rotation::rot_z(PI), V::new(1.0, 0.0, 0.0));
        let law = PointingLaw::invariance(p, spec);
        let cfg = SimConfig::new(1e-3, 10.0).unwrap();
        let traj = simulate(&s0, &law, &p, &spec, &cfg).unwrap();
        assert_eq!(traj.termination, Termination::Completed);
        assert_eq!(traj.samples.len(), 10_001);
        for sample in &traj.samples {
            assert!(sample.errors.e_pt <= 1e-9);
            assert!(sample.errors.e_z <= 1e-9);
        }
    }

    #[test]
    fn recorded_rotations_stay_orthonormal() {
        let p = params();
        let spec = TaskSpec::origin(0.58);
        let speed = (9.8f64 * 0.58).sqrt();
        let s0 = on_manifold_init(0.3, 0.9, &spec, speed).unwrap();
        let law = PointingLaw::invariance(p, spec);
        let cfg = SimConfig::new(1e-3, 2.0).unwrap();
        let traj = simulate(&s0, &law, &p, &spec, &cfg).unwrap();
        for sample in &traj.samples {
            assert!(sample.state.rotation.orthonormality_residual() <= 1e-9);
        }
    }

    #[test]
    fn vertical_residual_decays_exponentially() {
        let p = params();
        let spec = TaskSpec::origin(0.58);
        let speed = (9.8f64 * 0.58).sqrt();
        let s0 = crate::task::perturb_vertical(
            &on_manifold_init(20.0f64.to_radians(), 0.9, &spec, speed).unwrap(),
            0.1,
        );
        let law = PointingLaw::new(p, spec, Gains::new(5.0, 0.0, 0.0));
        let cfg = SimConfig::new(1e-3, 2.0).unwrap();
        let traj = simulate(&s0, &law, &p, &spec, &cfg).unwrap();
        assert_eq!(traj.termination, Termination::Completed);
        for sample in &traj.samples {
            let t: f64 = sample.t;
            let expected = 0.1 * (-5.0 * t).exp();
            let rel = (sample.residuals.mu_z - expected).abs() / expected;
            assert!(rel <= 1e-6, "t = {t}: relative error {rel:e}");
        }
    }

    #[test]
    fn zero_gains_freeze_the_vertical_residual() {
        let p = params();
        let spec = TaskSpec::origin(0.58);
        let speed = (9.8f64 * 0.58).sqrt();
        let s0 = crate::task::perturb_vertical(
            &on_manifold_init(20.0f64.to_radians(), 0.9, &spec, speed).unwrap(),
            0.1,
        );
        let law = PointingLaw::invariance(p, spec);
        let cfg = SimConfig::new(1e-3, 2.0).unwrap();
        let traj = simulate(&s0, &law, &p, &spec, &cfg).unwrap();
        for sample in &traj.samples {
            assert!((sample.residuals.mu_z - 0.1).abs() <= 1e-9);
        }
    }

    #[test]
    fn decay_rate_fits_the_gain() {
        let p = params();
        let spec = TaskSpec::origin(0.58);
        let speed = (9.8f64 * 0.58).sqrt();
        for k in [1.0, 5.0, 10.0] {
            let s0 = crate::task::perturb_vertical(
                &on_manifold_init(0.5, 0.9, &spec, speed).unwrap(),
                0.1,
            );
            let law = PointingLaw::new(p, spec, Gains::new(k, 0.0, 0.0));
            let cfg = SimConfig::new(1e-3, 1.0).unwrap();
            let traj = simulate(&s0, &law, &p, &spec, &cfg).unwrap();
            // Least-squares slope of ln mu_z over [0, 1].
            let pts: Vec<(f64, f64)> = traj
                .samples
                .iter()
                .map(|s| (s.t, s.residuals.mu_z.ln()))
                .collect();
            let n = pts.len() as f64;
            let (st, sy): (f64, f64) = pts.iter().fold((0.0, 0.0), |(a, b), (t, y)| (a + t, b + y));
            let (tm, ym) = (st / n, sy / n);
            let (num, den) = pts.iter().fold((0.0, 0.0), |(nu, de), (t, y)| {
                (nu + (t - tm) * (y - ym), de + (t - tm) * (t - tm))
            });
            let rate = -num / den;
            assert!(
                (rate - k).abs() / k <= 0.01,
                "gain {k}: fitted rate {rate}"
            );
        }
    }

    #[test]
    fn closed_loop_order_is_at_least_fourth() {
        // Eccentric pointing orbit: global error vs half-step reference
        // shrinks ~16x per halving.
        let p = params();
        let spec = TaskSpec::origin(0.58);
        let s0 = on_manifold_init(0.3, 0.9, &spec, 1.8).unwrap();
        let law = PointingLaw::invariance(p, spec);
        let final_state = |h: f64| {
            let cfg = SimConfig::new(h, 1.0).unwrap();
            let traj = simulate(&s0, &law, &p, &spec, &cfg).unwrap();
            traj.samples.last().unwrap().state
        };
        let err = |a: &RigidBodyState<f64>, b: &RigidBodyState<f64>| {
            (a.position - b.position)
                .max_abs()
                .max((a.velocity - b.velocity).max_abs())
                .max((a.angular_velocity - b.angular_velocity).max_abs())
                .max((*a.rotation.matrix() - *b.rotation.matrix()).max_abs())
        };
        let s_h = final_state(4e-3);
        let s_h2 = final_state(2e-3);
        let s_h4 = final_state(1e-3);
        let e1 = err(&s_h, &s_h2);
        let e2 = err(&s_h2, &s_h4);
        let order = (e1 / e2).log2();
        assert!(order >= 3.8, "observed order {order}");
    }

    #[test]
    fn identical_runs_are_bit_identical() {
        let p = params();
        let spec = TaskSpec::origin(0.58);
        let s0 = on_manifold_init(0.3, 0.9, &spec, 1.8).unwrap();
        let law = PointingLaw::new(p, spec, Gains::new(5.0, 0.0, 0.0));
        let cfg = SimConfig::new(1e-3, 1.0).unwrap();
        let a = simulate(&s0, &law, &p, &spec, &cfg).unwrap();
        let b = simulate(&s0, &law, &p, &spec, &cfg).unwrap();
        assert_eq!(a.samples.len(), b.samples.len());
        for (x, y) in a.samples.iter().zip(b.samples.iter()) {
            assert_eq!(x.state, y.state);
            assert_eq!(x.input.thrust, y.input.thrust);
            assert_eq!(x.input.torque, y.input.torque);
        }
    }

    #[test]
    fn infeasible_start_aborts_immediately() {
        let p = params();
        // Thresholds pushed above the achievable s3 of this geometry.
        let spec = TaskSpec::new(V::zero(), 0.58, 0.95, 0.1).unwrap();
        let s0 = on_manifold_init(0.3, 0.9, &TaskSpec::origin(0.58), 1.0).unwrap();
        let law = PointingLaw::invariance(p, spec);
        let cfg = SimConfig::new(1e-3, 1.0).unwrap();
        let traj = simulate(&s0, &law, &p, &spec, &cfg).unwrap();
        assert_eq!(
            traj.termination,
            Termination::Infeasible { failed_at_step: 0 }
        );
        assert!(traj.samples.is_empty());
        assert!(matches!(
            traj.ensure_complete(),
            Err(Error::InfeasibleEncountered { .. })
        ));
    }

    #[test]
    fn tumbling_run_aborts_mid_flight() {
        // Coasting with a pitch rate: s3 = cos(2t) crosses the threshold
        // near t = arccos(0.1)/2 and the run must stop there with the
        // feasible prefix intact.
        let p = params();
        let spec = TaskSpec::origin(0.0);
        let mut s0 = RigidBodyState::at_rest(Rotation::identity(), V::new(1.0, 0.0, 0.0));
        s0.angular_velocity = V::new(0.0, 2.0, 0.0);
        let cfg = SimConfig::new(1e-3, 1.0).unwrap();
        let traj = simulate(&s0, &coast(), &p, &spec, &cfg).unwrap();
        match traj.termination {
            Termination::Infeasible { failed_at_step } => {
                let expected = (0.1f64.acos() / 2.0 / 1e-3).ceil() as usize;
                assert!(
                    failed_at_step.abs_diff(expected) <= 2,
                    "failed at {failed_at_step}, expected near {expected}"
                );
                assert_eq!(traj.samples.len(), failed_at_step);
                assert!(traj.samples.iter().all(|s| s.regularity.feasible));
            }
            other => panic!("expected infeasible termination, got {other:?}"),
        }
    }
}
