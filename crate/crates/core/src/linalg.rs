//! Small fixed-size linear algebra: 3-vectors and 3×3 matrices.
//!
//! Hand-rolled on purpose: the whole crate needs nothing beyond 3×3
//! products, determinants and inverses, and owning the types lets the
//! geometry layer attach validity invariants to them.

use std::ops::{Add, AddAssign, Div, Index, IndexMut, Mul, Neg, Sub, SubAssign};

use crate::scalar::Real;

/// A 3-vector over scalar `S`. Units are contextual (m, m/s, rad/s, ...).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vec3<S> {
    pub x: S,
    pub y: S,
    pub z: S,
}

impl<S: Real> Vec3<S> {
    #[inline]
    pub fn new(x: S, y: S, z: S) -> Self {
        Vec3 { x, y, z }
    }

    #[inline]
    pub fn zero() -> Self {
        Vec3::new(S::zero(), S::zero(), S::zero())
    }

    /// Standard basis vector `e1`.
    #[inline]
    pub fn e1() -> Self {
        Vec3::new(S::one(), S::zero(), S::zero())
    }

    /// Standard basis vector `e2`.
    #[inline]
    pub fn e2() -> Self {
        Vec3::new(S::zero(), S::one(), S::zero())
    }

    /// Standard basis vector `e3` (world vertical).
    #[inline]
    pub fn e3() -> Self {
        Vec3::new(S::zero(), S::zero(), S::one())
    }

    #[inline]
    pub fn dot(&self, other: &Self) -> S {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    #[inline]
    pub fn cross(&self, other: &Self) -> Self {
        Vec3::new(
            self.y * other.z - self.z * other.y,
            self.z * other.x - self.x * other.z,
            self.x * other.y - self.y * other.x,
        )
    }

    #[inline]
    pub fn norm_squared(&self) -> S {
        self.dot(self)
    }

    #[inline]
    pub fn norm(&self) -> S {
        self.norm_squared().sqrt()
    }

    /// Unit vector in the same direction; `None` for (near-)zero input.
    pub fn normalized(&self) -> Option<Self> {
        let n = self.norm();
        if n <= S::zero() || !n.is_finite() {
            None
        } else {
            Some(*self / n)
        }
    }

    #[inline]
    pub fn scale(&self, s: S) -> Self {
        Vec3::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn is_finite(&self) -> bool {
        self.x.is_finite() && self.y.is_finite() && self.z.is_finite()
    }

    /// Componentwise max-abs, handy for tolerance checks.
    pub fn max_abs(&self) -> S {
        self.x.abs().max(self.y.abs()).max(self.z.abs())
    }

    /// Outer product `self · otherᵀ`.
    pub fn outer(&self, other: &Self) -> Mat3<S> {
        Mat3::from_rows(
            other.scale(self.x),
            other.scale(self.y),
            other.scale(self.z),
        )
    }
}

impl<S: Real> Add for Vec3<S> {
    type Output = Self;
    #[inline]
    fn add(self, rhs: Self) -> Self {
        Vec3::new(self.x + rhs.x, self.y + rhs.y, self.z + rhs.z)
    }
}

impl<S: Real> AddAssign for Vec3<S> {
    #[inline]
    fn add_assign(&mut self, rhs: Self) {
        *self = *self + rhs;
    }
}

impl<S: Real> Sub for Vec3<S> {
    type Output = Self;
    #[inline]
    fn sub(self, rhs: Self) -> Self {
        Vec3::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

impl<S: Real> SubAssign for Vec3<S> {
    #[inline]
    fn sub_assign(&mut self, rhs: Self) {
        *self = *self - rhs;
    }
}

impl<S: Real> Neg for Vec3<S> {
    type Output = Self;
    #[inline]
    fn neg(self) -> Self {
        Vec3::new(-self.x, -self.y, -self.z)
    }
}

impl<S: Real> Mul<S> for Vec3<S> {
    type Output = Self;
    #[inline]
    fn mul(self, s: S) -> Self {
        self.scale(s)
    }
}

impl<S: Real> Div<S> for Vec3<S> {
    type Output = Self;
    #[inline]
    fn div(self, s: S) -> Self {
        Vec3::new(self.x / s, self.y / s, self.z / s)
    }
}

macro_rules! impl_scalar_lhs_mul {
    ($($t:ty),*) => {$(
        impl Mul<Vec3<$t>> for $t {
            type Output = Vec3<$t>;
            #[inline]
            fn mul(self, v: Vec3<$t>) -> Vec3<$t> {
                v.scale(self)
            }
        }
        impl Mul<Mat3<$t>> for $t {
            type Output = Mat3<$t>;
            #[inline]
            fn mul(self, m: Mat3<$t>) -> Mat3<$t> {
                m.scale(self)
            }
        }
    )*};
}
impl_scalar_lhs_mul!(f32, f64);

/// A 3×3 matrix over scalar `S`, row-major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat3<S> {
    m: [[S; 3]; 3],
}

impl<S: Real> Mat3<S> {
    /// Row-major construction.
    #[allow(clippy::too_many_arguments)]
    pub fn new(m11: S, m12: S, m13: S, m21: S, m22: S, m23: S, m31: S, m32: S, m33: S) -> Self {
        Mat3 {
            m: [[m11, m12, m13], [m21, m22, m23], [m31, m32, m33]],
        }
    }

    pub fn zero() -> Self {
        let z = S::zero();
        Mat3::new(z, z, z, z, z, z, z, z, z)
    }

    pub fn identity() -> Self {
        let (o, z) = (S::one(), S::zero());
        Mat3::new(o, z, z, z, o, z, z, z, o)
    }

    pub fn from_rows(r1: Vec3<S>, r2: Vec3<S>, r3: Vec3<S>) -> Self {
        Mat3::new(r1.x, r1.y, r1.z, r2.x, r2.y, r2.z, r3.x, r3.y, r3.z)
    }

    pub fn from_cols(c1: Vec3<S>, c2: Vec3<S>, c3: Vec3<S>) -> Self {
        Mat3::new(c1.x, c2.x, c3.x, c1.y, c2.y, c3.y, c1.z, c2.z, c3.z)
    }

    #[inline]
    pub fn row(&self, i: usize) -> Vec3<S> {
        Vec3::new(self.m[i][0], self.m[i][1], self.m[i][2])
    }

    #[inline]
    pub fn col(&self, j: usize) -> Vec3<S> {
        Vec3::new(self.m[0][j], self.m[1][j], self.m[2][j])
    }

    pub fn transpose(&self) -> Self {
        Mat3::from_rows(self.col(0), self.col(1), self.col(2))
    }

    pub fn trace(&self) -> S {
        self.m[0][0] + self.m[1][1] + self.m[2][2]
    }

    pub fn det(&self) -> S {
        let m = &self.m;
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    }

    /// Inverse via the adjugate; `None` when the determinant underflows.
    pub fn inverse(&self) -> Option<Self> {
        let d = self.det();
        if d == S::zero() || !d.is_finite() {
            return None;
        }
        let m = &self.m;
        let adj = Mat3::new(
            m[1][1] * m[2][2] - m[1][2] * m[2][1],
            m[0][2] * m[2][1] - m[0][1] * m[2][2],
            m[0][1] * m[1][2] - m[0][2] * m[1][1],
            m[1][2] * m[2][0] - m[1][0] * m[2][2],
            m[0][0] * m[2][2] - m[0][2] * m[2][0],
            m[0][2] * m[1][0] - m[0][0] * m[1][2],
            m[1][0] * m[2][1] - m[1][1] * m[2][0],
            m[0][1] * m[2][0] - m[0][0] * m[2][1],
            m[0][0] * m[1][1] - m[0][1] * m[1][0],
        );
        Some(adj.scale(S::one() / d))
    }

    pub fn scale(&self, s: S) -> Self {
        let mut out = *self;
        for r in &mut out.m {
            for v in r {
                *v = *v * s;
            }
        }
        out
    }

    pub fn frobenius_norm(&self) -> S {
        let mut acc = S::zero();
        for r in &self.m {
            for v in r {
                acc = acc + *v * *v;
            }
        }
        acc.sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.m.iter().flatten().all(|v| v.is_finite())
    }

    pub fn max_abs(&self) -> S {
        self.m
            .iter()
            .flatten()
            .fold(S::zero(), |a, v| a.max(v.abs()))
    }
}

impl<S: Real> Index<(usize, usize)> for Mat3<S> {
    type Output = S;
    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &S {
        &self.m[i][j]
    }
}

impl<S: Real> IndexMut<(usize, usize)> for Mat3<S> {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut S {
        &mut self.m[i][j]
    }
}

impl<S: Real> Add for Mat3<S> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = out.m[i][j] + rhs.m[i][j];
            }
        }
        out
    }
}

impl<S: Real> Sub for Mat3<S> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..3 {
            for j in 0..3 {
                out.m[i][j] = out.m[i][j] - rhs.m[i][j];
            }
        }
        out
    }
}

impl<S: Real> Neg for Mat3<S> {
    type Output = Self;
    fn neg(self) -> Self {
        self.scale(-S::one())
    }
}

impl<S: Real> Mul for Mat3<S> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        let mut out = Mat3::zero();
        for i in 0..3 {
            for j in 0..3 {
                let mut acc = S::zero();
                for (k, rhs_row) in rhs.m.iter().enumerate() {
                    acc = acc + self.m[i][k] * rhs_row[j];
                }
                out.m[i][j] = acc;
            }
        }
        out
    }
}

impl<S: Real> Mul<Vec3<S>> for Mat3<S> {
    type Output = Vec3<S>;
    #[inline]
    fn mul(self, v: Vec3<S>) -> Vec3<S> {
        Vec3::new(
            self.row(0).dot(&v),
            self.row(1).dot(&v),
            self.row(2).dot(&v),
        )
    }
}

impl<S: Real> Mul<S> for Mat3<S> {
    type Output = Self;
    #[inline]
    fn mul(self, s: S) -> Self {
        self.scale(s)
    }
}
