//! Central finite differences with one Richardson step, used as the
//! independent check on every jet-computed derivative.
//!
//! The mixed partial `(i, j)` is the tensor product of second-order central
//! stencils in `s` and `t`. Their error expands in even powers of `h`, so
//! `(4 D(h/2) - D(h)) / 3` is fourth-order accurate.

use std::ops::{Add, Mul};

use crate::error::{Error, Result};
use crate::lorentz::{LVec3, Scalar};

/// Default step. Callers differentiating to order 3 or 4 should pass a
/// larger step (around `1e-2`) since rounding grows like `h^-(i+j)`.
pub const DEFAULT_STEP: f64 = 1e-3;

/// Values a stencil can be applied to.
pub trait FdValue: Copy + Add<Output = Self> + Mul<f64, Output = Self> {
    fn zero() -> Self;
}

impl FdValue for Scalar {
    fn zero() -> Self {
        Scalar::new(0.0, 0.0)
    }
}

impl FdValue for f64 {
    fn zero() -> Self {
        0.0
    }
}

impl FdValue for LVec3<Scalar> {
    fn zero() -> Self {
        LVec3::zero()
    }
}

impl Mul<f64> for LVec3<Scalar> {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        self.scale_real(k)
    }
}

impl<const N: usize> FdValue for Vals<N> {
    fn zero() -> Self {
        Vals([Scalar::new(0.0, 0.0); N])
    }
}

/// A fixed bundle of scalars differentiated together.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Vals<const N: usize>(pub [Scalar; N]);

impl<const N: usize> Add for Vals<N> {
    type Output = Self;
    fn add(mut self, rhs: Self) -> Self {
        for (a, b) in self.0.iter_mut().zip(rhs.0) {
            *a += b;
        }
        self
    }
}

impl<const N: usize> Mul<f64> for Vals<N> {
    type Output = Self;
    fn mul(mut self, k: f64) -> Self {
        for a in self.0.iter_mut() {
            *a *= k;
        }
        self
    }
}

/// Offsets (in units of `h`) and weights of the central stencil for the
/// `n`-th derivative, before division by `h^n`.
fn stencil(n: usize) -> &'static [(f64, f64)] {
    match n {
        0 => &[(0.0, 1.0)],
        1 => &[(-1.0, -0.5), (1.0, 0.5)],
        2 => &[(-1.0, 1.0), (0.0, -2.0), (1.0, 1.0)],
        3 => &[(-2.0, -0.5), (-1.0, 1.0), (1.0, -1.0), (2.0, 0.5)],
        4 => &[(-2.0, 1.0), (-1.0, -4.0), (0.0, 6.0), (1.0, -4.0), (2.0, 1.0)],
        _ => unreachable!("derivative order checked by caller"),
    }
}

fn central<V, F>(field: &F, (s, t): (f64, f64), (i, j): (usize, usize), h: f64) -> Result<V>
where
    V: FdValue,
    F: Fn(f64, f64) -> Result<V>,
{
    let mut acc = V::zero();
    for &(ds, ws) in stencil(i) {
        for &(dt, wt) in stencil(j) {
            let (ps, pt) = (s + ds * h, t + dt * h);
            let v = field(ps, pt).map_err(|e| Error::StencilOutsideDomain { s: ps, t: pt, reason: e.to_string() })?;
            acc = acc + v * (ws * wt);
        }
    }
    Ok(acc * h.powi(-((i + j) as i32)))
}

/// `d^(i+j) field / ds^i dt^j` at `point`, from steps `h` and `h/2`
/// combined by one Richardson extrapolation.
pub fn fd_oracle<V, F>(field: F, point: (f64, f64), multi_index: (usize, usize), h: f64) -> Result<V>
where
    V: FdValue,
    F: Fn(f64, f64) -> Result<V>,
{
    let (i, j) = multi_index;
    if i + j > 4 {
        return Err(Error::InvalidInput(format!("finite differences limited to order 4, got ({i}, {j})")));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(Error::InvalidInput(format!("step must be positive, got {h}")));
    }
    if i + j == 0 {
        return central(&field, point, (0, 0), h);
    }
    let coarse = central(&field, point, multi_index, h)?;
    let fine = central(&field, point, multi_index, 0.5 * h)?;
    Ok(fine * (4.0 / 3.0) + coarse * (-1.0 / 3.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::real;

    fn f(g: impl Fn(f64, f64) -> f64) -> impl Fn(f64, f64) -> Result<Scalar> {
        move |s, t| Ok(real(g(s, t)))
    }

    #[test]
    fn polynomial_mixed_partial() {
        let d: Scalar = fd_oracle(f(|s, t| s * s * t), (1.0, 1.0), (2, 1), 1e-2).unwrap();
        assert!((d.re - 2.0).abs() < 1e-6);
    }

    #[test]
    fn sine_slope_at_origin() {
        let d: Scalar = fd_oracle(f(|s, _| s.sin()), (0.0, 0.0), (1, 0), 1e-3).unwrap();
        assert!((d.re - 1.0).abs() < 1e-9);
    }

    #[test]
    fn fourth_order_stencils() {
        // d^4/ds^2dt^2 of exp(s + 2t) = 4 exp(s + 2t)
        let d: Scalar = fd_oracle(f(|s, t| (s + 2.0 * t).exp()), (0.1, 0.2), (2, 2), 1e-2).unwrap();
        let e = 4.0 * (0.5f64).exp();
        assert!((d.re - e).abs() < 1e-5 * e, "{} vs {}", d.re, e);
        let d: Scalar = fd_oracle(f(|s, _| s.sin()), (0.3, 0.0), (3, 0), 1e-2).unwrap();
        assert!((d.re + 0.3f64.cos()).abs() < 1e-7);
    }

    #[test]
    fn richardson_improves_on_plain_central() {
        let g = f(|s, _| s.exp());
        let plain: Scalar = central(&g, (0.0, 0.0), (1, 0), 1e-2).unwrap();
        let rich: Scalar = fd_oracle(&g, (0.0, 0.0), (1, 0), 1e-2).unwrap();
        assert!((rich.re - 1.0).abs() < 0.01 * (plain.re - 1.0).abs());
    }

    #[test]
    fn failing_field_reports_stencil_point() {
        let g = |s: f64, _t: f64| -> Result<Scalar> {
            if s > 0.0 {
                Err(Error::InvalidInput("outside".into()))
            } else {
                Ok(real(s))
            }
        };
        let err = fd_oracle(g, (0.0, 0.0), (1, 0), 1e-3).unwrap_err();
        assert!(matches!(err, Error::StencilOutsideDomain { .. }));
    }

    #[test]
    fn rejects_order_five() {
        assert!(fd_oracle(f(|s, _| s), (0.0, 0.0), (3, 2), 1e-2).map(|v: Scalar| v).is_err());
    }
}
