//! Fixed composite Gauss–Legendre rule for the axial integrals of the
//! revolution charts.
//!
//! The panel layout depends only on the integration limits through fixed
//! unit-width panels anchored at the lower limit, so the quadrature error is
//! a smooth function of the upper limit and can be differenced safely.

use std::sync::OnceLock;

use crate::error::Result;
use crate::lorentz::Scalar;

const NODES: usize = 20;
const PANEL: f64 = 1.0;

fn rule() -> &'static [(f64, f64); NODES] {
    static RULE: OnceLock<[(f64, f64); NODES]> = OnceLock::new();
    RULE.get_or_init(|| {
        let n = NODES;
        let mut out = [(0.0, 0.0); NODES];
        for (k, slot) in out.iter_mut().enumerate() {
            // Newton on P_n starting from the Chebyshev-like guess.
            let mut x = (std::f64::consts::PI * (k as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (mut p0, mut p1) = (1.0, x);
                for m in 2..=n {
                    let p2 = ((2 * m - 1) as f64 * x * p1 - (m - 1) as f64 * p0) / m as f64;
                    p0 = p1;
                    p1 = p2;
                }
                dp = n as f64 * (x * p1 - p0) / (x * x - 1.0);
                let dx = p1 / dp;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            *slot = (x, 2.0 / ((1.0 - x * x) * dp * dp));
        }
        out
    })
}

fn panel(f: &impl Fn(f64) -> Result<Scalar>, a: f64, b: f64) -> Result<Scalar> {
    let (mid, half) = (0.5 * (a + b), 0.5 * (b - a));
    let mut acc = Scalar::new(0.0, 0.0);
    for &(x, w) in rule() {
        acc += f(mid + half * x)? * w;
    }
    Ok(acc * half)
}

/// `int_a^b f`, oriented (negative when `b < a`).
pub fn integrate(f: impl Fn(f64) -> Result<Scalar>, a: f64, b: f64) -> Result<Scalar> {
    if b < a {
        return integrate(f, b, a).map(|v| -v);
    }
    let mut acc = Scalar::new(0.0, 0.0);
    let mut lo = a;
    while b - lo > PANEL {
        acc += panel(&f, lo, lo + PANEL)?;
        lo += PANEL;
    }
    if b > lo {
        acc += panel(&f, lo, b)?;
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::real;

    #[test]
    fn weights_sum_to_two() {
        let s: f64 = rule().iter().map(|(_, w)| w).sum();
        assert!((s - 2.0).abs() < 1e-14);
    }

    #[test]
    fn integrates_acosh_derivative() {
        // int_2^5 1/sqrt(u^2 - 1) du = acosh 5 - acosh 2
        let v = integrate(|u| Ok(real(1.0 / (u * u - 1.0).sqrt())), 2.0, 5.0).unwrap();
        let e = 5f64.acosh() - 2f64.acosh();
        assert!((v.re - e).abs() < 1e-14, "{}", v.re - e);
        let back = integrate(|u| Ok(real(1.0 / (u * u - 1.0).sqrt())), 5.0, 2.0).unwrap();
        assert_eq!(back, -v);
    }
}
