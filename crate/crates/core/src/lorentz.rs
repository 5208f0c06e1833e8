//! Vector algebra of Minkowski 3-space with the index-1 product
//! `<X, Y> = X1 Y1 + X2 Y2 - X3 Y3`.
//!
//! Components are complex-capable: the product is extended bilinearly (no
//! conjugation), which is what complexified charts need.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Coordinate-space scalar. Purely real values carry `im == 0`.
pub type Scalar = Complex64;

/// Relative tolerance below which `<X, X>` counts as zero.
pub const NULL_TOL: f64 = 1e-12;

pub fn real(x: f64) -> Scalar {
    Scalar::new(x, 0.0)
}

/// Anything that can sit in a component of an [`LVec3`].
pub trait Ring: Copy + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Neg<Output = Self> {}

impl<T> Ring for T where T: Copy + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Neg<Output = T> {}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LVec3<T = Scalar> {
    pub x1: T,
    pub x2: T,
    pub x3: T,
}

impl<T> LVec3<T> {
    pub const fn new(x1: T, x2: T, x3: T) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn from_array([x1, x2, x3]: [T; 3]) -> Self {
        Self { x1, x2, x3 }
    }

    pub fn map<U>(self, mut f: impl FnMut(T) -> U) -> LVec3<U> {
        LVec3::new(f(self.x1), f(self.x2), f(self.x3))
    }

    pub fn try_map<U>(self, mut f: impl FnMut(T) -> Result<U>) -> Result<LVec3<U>> {
        Ok(LVec3::new(f(self.x1)?, f(self.x2)?, f(self.x3)?))
    }

    pub fn into_array(self) -> [T; 3] {
        [self.x1, self.x2, self.x3]
    }

    pub fn as_array(&self) -> [&T; 3] {
        [&self.x1, &self.x2, &self.x3]
    }
}

impl<T: Ring> LVec3<T> {
    pub fn dot(&self, other: &Self) -> T {
        lorentz_dot(self, other)
    }

    pub fn cross(&self, other: &Self) -> Self {
        lorentz_cross(self, other)
    }

    pub fn scale(&self, k: T) -> Self {
        LVec3::new(self.x1 * k, self.x2 * k, self.x3 * k)
    }
}

impl<T: Ring> Add for LVec3<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        LVec3::new(self.x1 + rhs.x1, self.x2 + rhs.x2, self.x3 + rhs.x3)
    }
}

impl<T: Ring> Sub for LVec3<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        LVec3::new(self.x1 - rhs.x1, self.x2 - rhs.x2, self.x3 - rhs.x3)
    }
}

impl<T: Ring> Neg for LVec3<T> {
    type Output = Self;
    fn neg(self) -> Self {
        LVec3::new(-self.x1, -self.x2, -self.x3)
    }
}

impl LVec3<Scalar> {
    pub fn real(x1: f64, x2: f64, x3: f64) -> Self {
        LVec3::new(real(x1), real(x2), real(x3))
    }

    pub fn zero() -> Self {
        LVec3::real(0.0, 0.0, 0.0)
    }

    /// Squared Euclidean length, `sum |X_i|^2`.
    pub fn euclid_norm_sq(&self) -> f64 {
        self.x1.norm_sqr() + self.x2.norm_sqr() + self.x3.norm_sqr()
    }

    pub fn max_abs_im(&self) -> f64 {
        self.x1.im.abs().max(self.x2.im.abs()).max(self.x3.im.abs())
    }

    /// Largest componentwise complex modulus.
    pub fn max_abs(&self) -> f64 {
        self.x1.norm().max(self.x2.norm()).max(self.x3.norm())
    }

    pub fn is_zero(&self, tol: f64) -> bool {
        self.euclid_norm_sq().sqrt() <= tol
    }

    pub fn scale_real(&self, k: f64) -> Self {
        LVec3::new(self.x1 * k, self.x2 * k, self.x3 * k)
    }
}

impl fmt::Display for LVec3<Scalar> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}, {})", self.x1, self.x2, self.x3)
    }
}

/// `X1 Y1 + X2 Y2 - X3 Y3`, bilinear in complex components.
pub fn lorentz_dot<T: Ring>(x: &LVec3<T>, y: &LVec3<T>) -> T {
    x.x1 * y.x1 + x.x2 * y.x2 - x.x3 * y.x3
}

/// `(X2 Y3 - X3 Y2, X3 Y1 - X1 Y3, X2 Y1 - X1 Y2)`.
pub fn lorentz_cross<T: Ring>(x: &LVec3<T>, y: &LVec3<T>) -> LVec3<T> {
    LVec3::new(x.x2 * y.x3 - x.x3 * y.x2, x.x3 * y.x1 - x.x1 * y.x3, x.x2 * y.x1 - x.x1 * y.x2)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum CausalCharacter {
    SpaceLike,
    TimeLike,
    LightLike,
}

impl CausalCharacter {
    pub fn is_causal(self) -> bool {
        !matches!(self, CausalCharacter::SpaceLike)
    }
}

impl fmt::Display for CausalCharacter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CausalCharacter::SpaceLike => "space-like",
            CausalCharacter::TimeLike => "time-like",
            CausalCharacter::LightLike => "light-like",
        })
    }
}

/// Classifies a real vector. The zero vector is space-like; a non-zero vector
/// with `|<X,X>| <= tol (1 + |X|^2)` is light-like.
pub fn causal_character(x: &LVec3, tol: f64) -> Result<CausalCharacter> {
    let max_im = x.max_abs_im();
    if max_im > tol {
        return Err(Error::NonRealVector { max_im });
    }
    if x.is_zero(tol) {
        return Ok(CausalCharacter::SpaceLike);
    }
    let q = lorentz_dot(x, x).re;
    if q.abs() <= tol * (1.0 + x.euclid_norm_sq()) {
        Ok(CausalCharacter::LightLike)
    } else if q > 0.0 {
        Ok(CausalCharacter::SpaceLike)
    } else {
        Ok(CausalCharacter::TimeLike)
    }
}

/// How the length in `N = W / |W|` is taken.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum NormMode {
    /// `|W| = sqrt(|<W,W>|)` on real vectors; `<N,N> = sign <W,W>`.
    Absolute,
    /// `|W| = sqrt(<W,W>)` with the principal complex root; `<N,N> = +1`.
    Bilinear,
}

impl fmt::Display for NormMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NormMode::Absolute => "absolute",
            NormMode::Bilinear => "bilinear",
        })
    }
}

/// Principal square root that treats a signed-zero imaginary part as `+0`,
/// so `sqrt(-4 - 0i)` is `2i` rather than `-2i`.
pub fn principal_sqrt(z: Scalar) -> Scalar {
    Scalar::new(z.re, z.im + 0.0).sqrt()
}

/// Returns `(N, epsilon)` with `<N, N> = epsilon`.
pub fn lorentz_normalize(x: &LVec3, mode: NormMode) -> Result<(LVec3, i8)> {
    let q = lorentz_dot(x, x);
    if q.norm() <= NULL_TOL * (1.0 + x.euclid_norm_sq()) {
        return Err(Error::NullVector { norm_sq: q.norm() });
    }
    match mode {
        NormMode::Absolute => {
            let max_im = x.max_abs_im();
            if max_im > NULL_TOL * (1.0 + x.euclid_norm_sq().sqrt()) {
                return Err(Error::NonRealVector { max_im });
            }
            let eps: i8 = if q.re > 0.0 { 1 } else { -1 };
            Ok((x.scale_real(1.0 / q.re.abs().sqrt()), eps))
        }
        NormMode::Bilinear => {
            let len = principal_sqrt(q);
            Ok((x.scale(len.inv()), 1))
        }
    }
}
