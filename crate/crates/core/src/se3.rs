//! SO(3)/SE(3) machinery: the hat/vee isomorphism, validated rotation
//! matrices, body axes, and drift repair by polar projection.
//!
//! Conventions: rotations map body coordinates to world coordinates, so the
//! body axes `b_i = R e_i` are the columns of `R`. The hat map sends a
//! 3-vector to the skew-symmetric matrix representing its cross product,
//! `hat(x) y = x × y`.

use crate::error::{Error, Result};
use crate::linalg::{Mat3, Vec3};
use crate::scalar::Real;

/// Index of a body axis (1-based in the math, enum here).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Axis {
    E1,
    E2,
    E3,
}

impl Axis {
    /// The corresponding standard basis vector.
    pub fn unit<S: Real>(self) -> Vec3<S> {
        match self {
            Axis::E1 => Vec3::e1(),
            Axis::E2 => Vec3::e2(),
            Axis::E3 => Vec3::e3(),
        }
    }

    /// Zero-based column index.
    pub fn index(self) -> usize {
        match self {
            Axis::E1 => 0,
            Axis::E2 => 1,
            Axis::E3 => 2,
        }
    }
}

/// Skew-symmetric matrix of a vector: `hat(v) w = v × w`.
pub fn hat<S: Real>(v: Vec3<S>) -> Mat3<S> {
    let z = S::zero();
    Mat3::new(z, -v.z, v.y, v.z, z, -v.x, -v.y, v.x, z)
}

/// Inverse of [`hat`]. The input must be skew-symmetric within `GEOM_TOL`
/// (Frobenius norm of the symmetric part); extraction averages the two
/// off-diagonal copies, which projects mildly asymmetric input.
pub fn vee<S: Real>(m: &Mat3<S>) -> Result<Vec3<S>> {
    let sym = (*m + m.transpose()).scale(S::half());
    let residual = sym.frobenius_norm();
    if residual > S::GEOM_TOL {
        return Err(Error::NotSkew {
            residual: residual.to_f64().unwrap_or(f64::NAN),
            tol: S::GEOM_TOL.to_f64().unwrap_or(f64::NAN),
        });
    }
    Ok(Vec3::new(
        (m[(2, 1)] - m[(1, 2)]) * S::half(),
        (m[(0, 2)] - m[(2, 0)]) * S::half(),
        (m[(1, 0)] - m[(0, 1)]) * S::half(),
    ))
}

/// A validated rotation matrix in SO(3).
///
/// Construction through [`Rotation::try_new`] enforces orthonormality and
/// `det = +1` within `GEOM_TOL`; [`Rotation::from_matrix_unchecked`] skips
/// the check and exists for integrator internals, where intermediate stage
/// matrices are deliberately allowed to drift off the group.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Rotation<S> {
    m: Mat3<S>,
}

impl<S: Real> Rotation<S> {
    pub fn identity() -> Self {
        Rotation {
            m: Mat3::identity(),
        }
    }

    /// Validated constructor.
    pub fn try_new(m: Mat3<S>) -> Result<Self> {
        let residual = (m.transpose() * m - Mat3::identity()).frobenius_norm();
        let det = m.det();
        if residual > S::GEOM_TOL || (det - S::one()).abs() > S::GEOM_TOL {
            return Err(Error::NotRotation {
                residual: residual.to_f64().unwrap_or(f64::NAN),
                det: det.to_f64().unwrap_or(f64::NAN),
            });
        }
        Ok(Rotation { m })
    }

    /// Wrap a matrix without validation. Caller asserts group membership
    /// (or deliberately works with off-group matrices, as the integrator
    /// stages do).
    pub fn from_matrix_unchecked(m: Mat3<S>) -> Self {
        Rotation { m }
    }

    /// Rotation by `angle` about the world x-axis.
    pub fn rot_x(angle: S) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (S::one(), S::zero());
        Rotation {
            m: Mat3::new(o, z, z, z, c, -s, z, s, c),
        }
    }

    /// Rotation by `angle` about the world y-axis.
    pub fn rot_y(angle: S) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (S::one(), S::zero());
        Rotation {
            m: Mat3::new(c, z, s, z, o, z, -s, z, c),
        }
    }

    /// Rotation by `angle` about the world z-axis.
    pub fn rot_z(angle: S) -> Self {
        let (s, c) = angle.sin_cos();
        let (o, z) = (S::one(), S::zero());
        Rotation {
            m: Mat3::new(c, -s, z, s, c, z, z, z, o),
        }
    }

    /// Build a rotation from its world-frame body axes (columns).
    pub fn from_body_axes(b1: Vec3<S>, b2: Vec3<S>, b3: Vec3<S>) -> Result<Self> {
        Rotation::try_new(Mat3::from_cols(b1, b2, b3))
    }

    #[inline]
    pub fn matrix(&self) -> &Mat3<S> {
        &self.m
    }

    /// Body axis `b_i = R e_i`, the i-th column of the matrix.
    #[inline]
    pub fn body_axis(&self, axis: Axis) -> Vec3<S> {
        self.m.col(axis.index())
    }

    #[inline]
    pub fn b1(&self) -> Vec3<S> {
        self.body_axis(Axis::E1)
    }

    #[inline]
    pub fn b2(&self) -> Vec3<S> {
        self.body_axis(Axis::E2)
    }

    #[inline]
    pub fn b3(&self) -> Vec3<S> {
        self.body_axis(Axis::E3)
    }

    /// Inverse rotation (the transpose).
    pub fn inverse(&self) -> Self {
        Rotation {
            m: self.m.transpose(),
        }
    }

    /// Apply to a vector: world = R · body.
    #[inline]
    pub fn apply(&self, v: Vec3<S>) -> Vec3<S> {
        self.m * v
    }

    /// Frobenius distance from the orthonormality manifold, `‖RᵀR − I‖_F`.
    pub fn orthonormality_residual(&self) -> S {
        (self.m.transpose() * self.m - Mat3::identity()).frobenius_norm()
    }
}

impl<S: Real> std::ops::Mul for Rotation<S> {
    type Output = Rotation<S>;
    fn mul(self, rhs: Self) -> Self {
        Rotation { m: self.m * rhs.m }
    }
}

/// Frobenius-nearest rotation to `m` (the orthogonal polar factor),
/// computed by the Newton iteration `X ← (X + X⁻ᵀ)/2`.
///
/// The iteration converges quadratically for any nonsingular input and is
/// an exact fixed point on rotations, so repeated projection of an already
/// valid rotation is a no-op up to roundoff. Inputs with `det ≤ 0` have no
/// nearby rotation and are rejected.
pub fn project_to_so3<S: Real>(m: &Mat3<S>) -> Result<Rotation<S>> {
    let det = m.det();
    if !det.is_finite() || det <= S::zero() {
        return Err(Error::Degenerate {
            det: det.to_f64().unwrap_or(f64::NAN),
        });
    }
    let mut x = *m;
    let tol = S::epsilon() * S::of(16.0) * x.max_abs().max(S::one());
    for _ in 0..64 {
        let inv_t = match x.inverse() {
            Some(inv) => inv.transpose(),
            None => {
                return Err(Error::Degenerate {
                    det: x.det().to_f64().unwrap_or(f64::NAN),
                })
            }
        };
        let next = (x + inv_t).scale(S::half());
        let step = (next - x).frobenius_norm();
        x = next;
        if step <= tol {
            return Ok(Rotation { m: x });
        }
    }
    // Newton stalled: the input is too ill-conditioned to repair.
    Err(Error::Degenerate {
        det: det.to_f64().unwrap_or(f64::NAN),
    })
}
