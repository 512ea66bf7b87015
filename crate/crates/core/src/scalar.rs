//! Scalar abstraction for the geometry and dynamics layers.
//!
//! Everything in this crate is generic over a floating-point scalar so the
//! same code runs at `f32` or `f64`. Concrete `f64` aliases live at the
//! crate root; simulation-grade tolerances assume `f64`.

use std::fmt::{Debug, Display};

/// Floating-point scalar: `f32` or `f64`.
pub trait Real:
    num_traits::Float + num_traits::FromPrimitive + Debug + Display + Send + Sync + 'static
{
    /// Frobenius-norm tolerance for geometric validity checks
    /// (rotation orthonormality, skew symmetry).
    const GEOM_TOL: Self;

    /// Shorthand for lossy conversion from `f64` literals.
    #[inline]
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("finite f64 literal converts to any Real")
    }

    #[inline]
    fn two() -> Self {
        Self::one() + Self::one()
    }

    #[inline]
    fn half() -> Self {
        Self::one() / Self::two()
    }
}

impl Real for f64 {
    const GEOM_TOL: f64 = 1e-9;
}

impl Real for f32 {
    // ~850 ulps at unit scale; f32 cannot hold the f64-grade 1e-9 bound.
    const GEOM_TOL: f32 = 1e-4;
}
