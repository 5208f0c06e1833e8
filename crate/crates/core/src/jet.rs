//! Truncated bivariate Taylor arithmetic in the chart variables `(s, t)`.
//!
//! A [`Jet2`] of order `M` stores the raw mixed partials
//! `d^(i+j) f / ds^i dt^j` for every `i + j <= M` (not the Taylor
//! coefficients, which would carry an extra `1 / (i! j!)`). Products follow
//! the Leibniz rule and elementary functions are applied by univariate Taylor
//! composition, so every retained derivative is exact up to rounding.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use crate::error::{Error, Result};
use crate::lorentz::{principal_sqrt, real, Scalar};

pub const MAX_ORDER: usize = 4;
const LEN: usize = (MAX_ORDER + 1) * (MAX_ORDER + 2) / 2;

const BINOM: [[f64; MAX_ORDER + 1]; MAX_ORDER + 1] = [
    [1.0, 0.0, 0.0, 0.0, 0.0],
    [1.0, 1.0, 0.0, 0.0, 0.0],
    [1.0, 2.0, 1.0, 0.0, 0.0],
    [1.0, 3.0, 3.0, 1.0, 0.0],
    [1.0, 4.0, 6.0, 4.0, 1.0],
];

const FACTORIAL: [f64; MAX_ORDER + 1] = [1.0, 1.0, 2.0, 6.0, 24.0];

#[inline]
const fn idx(i: usize, j: usize) -> usize {
    let n = i + j;
    n * (n + 1) / 2 + j
}

#[derive(Clone, Copy, PartialEq)]
pub struct Jet2 {
    order: u8,
    d: [Scalar; LEN],
}

impl fmt::Debug for Jet2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for n in 0..=self.order() {
            for j in 0..=n {
                m.entry(&(n - j, j), &self.d[idx(n - j, j)]);
            }
        }
        m.finish()
    }
}

impl Jet2 {
    fn zeros(order: usize) -> Self {
        assert!(order <= MAX_ORDER, "jet order {order} exceeds {MAX_ORDER}");
        Jet2 { order: order as u8, d: [Scalar::new(0.0, 0.0); LEN] }
    }

    pub fn constant(value: Scalar, order: usize) -> Self {
        let mut j = Self::zeros(order);
        j.d[0] = value;
        j
    }

    pub fn constant_real(value: f64, order: usize) -> Self {
        Self::constant(real(value), order)
    }

    /// The coordinate `s` seeded at `s0`: value `s0`, `ds = 1`, everything else 0.
    pub fn var_s(s0: f64, order: usize) -> Self {
        let mut j = Self::constant_real(s0, order);
        if order >= 1 {
            j.d[idx(1, 0)] = real(1.0);
        }
        j
    }

    pub fn var_t(t0: f64, order: usize) -> Self {
        let mut j = Self::constant_real(t0, order);
        if order >= 1 {
            j.d[idx(0, 1)] = real(1.0);
        }
        j
    }

    /// Builds a jet from a closure giving `d^(i+j) f / ds^i dt^j`.
    pub fn from_partials(order: usize, mut partial: impl FnMut(usize, usize) -> Scalar) -> Self {
        let mut j = Self::zeros(order);
        for n in 0..=order {
            for b in 0..=n {
                j.d[idx(n - b, b)] = partial(n - b, b);
            }
        }
        j
    }

    pub fn order(&self) -> usize {
        self.order as usize
    }

    pub fn value(&self) -> Scalar {
        self.d[0]
    }

    /// `d^(i+j) f / ds^i dt^j`; zero beyond the retained order.
    pub fn partial(&self, i: usize, j: usize) -> Scalar {
        if i + j > self.order() {
            Scalar::new(0.0, 0.0)
        } else {
            self.d[idx(i, j)]
        }
    }

    /// `df/ds` as a jet of one order less.
    pub fn d_s(&self) -> Jet2 {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        Jet2::from_partials(self.order() - 1, |i, j| self.d[idx(i + 1, j)])
    }

    pub fn d_t(&self) -> Jet2 {
        assert!(self.order >= 1, "cannot differentiate an order-0 jet");
        Jet2::from_partials(self.order() - 1, |i, j| self.d[idx(i, j + 1)])
    }

    pub fn truncate(&self, order: usize) -> Jet2 {
        let order = order.min(self.order());
        Jet2::from_partials(order, |i, j| self.d[idx(i, j)])
    }

    pub fn is_real(&self) -> bool {
        self.d[..idx(0, self.order()) + 1].iter().all(|z| z.im == 0.0)
    }

    fn lift(&self, c: Scalar) -> Jet2 {
        Jet2::constant(c, self.order())
    }

    /// `phi(self)` given `derivs[k] = phi^(k)(value)` for `k = 0..=order`.
    pub fn compose(&self, derivs: &[Scalar]) -> Jet2 {
        let m = self.order();
        debug_assert!(derivs.len() > m);
        let mut delta = *self;
        delta.d[0] = Scalar::new(0.0, 0.0);
        let mut out = self.lift(derivs[0]);
        let mut power = self.lift(real(1.0));
        for (k, dk) in derivs.iter().enumerate().take(m + 1).skip(1) {
            power = power * delta;
            out = out + power * (*dk / FACTORIAL[k]);
        }
        out
    }

    pub fn recip(&self) -> Result<Jet2> {
        let x = self.value();
        if x.norm() == 0.0 {
            return Err(Error::DivisionByZeroValue);
        }
        let r = x.inv();
        let mut derivs = [r; MAX_ORDER + 1];
        for k in 1..=MAX_ORDER {
            derivs[k] = -derivs[k - 1] * r * k as f64;
        }
        Ok(self.compose(&derivs))
    }

    pub fn checked_div(&self, other: &Jet2) -> Result<Jet2> {
        Ok(*self * other.recip()?)
    }

    pub fn sin(&self) -> Jet2 {
        let (s, c) = (self.value().sin(), self.value().cos());
        self.compose(&[s, c, -s, -c, s])
    }

    pub fn cos(&self) -> Jet2 {
        let (s, c) = (self.value().sin(), self.value().cos());
        self.compose(&[c, -s, -c, s, c])
    }

    pub fn sinh(&self) -> Jet2 {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.compose(&[s, c, s, c, s])
    }

    pub fn cosh(&self) -> Jet2 {
        let (s, c) = (self.value().sinh(), self.value().cosh());
        self.compose(&[c, s, c, s, c])
    }

    pub fn exp(&self) -> Jet2 {
        let e = self.value().exp();
        self.compose(&[e; MAX_ORDER + 1])
    }

    /// Principal branch; `sqrt(-4)` is `2i`.
    pub fn sqrt_principal(&self) -> Result<Jet2> {
        let x = self.value();
        let r = principal_sqrt(x);
        if self.order() == 0 {
            return Ok(self.lift(r));
        }
        if x.norm() == 0.0 {
            return Err(Error::DomainError { func: "sqrt", value: x });
        }
        let xi = x.inv();
        let mut derivs = [r; MAX_ORDER + 1];
        // d/dx x^(1/2 - k) = (1/2 - k) x^(-1/2 - k)
        for k in 1..=MAX_ORDER {
            derivs[k] = derivs[k - 1] * xi * (0.5 - (k - 1) as f64);
        }
        Ok(self.compose(&derivs))
    }

    /// `sqrt(|f|)` for a jet with real value, i.e. `sqrt(sign(f0) f)`.
    pub fn sqrt_abs(&self) -> Result<Jet2> {
        let x = self.value();
        if x.im != 0.0 {
            return Err(Error::DomainError { func: "sqrt_abs", value: x });
        }
        if x.re < 0.0 {
            (-*self).sqrt_principal()
        } else {
            self.sqrt_principal()
        }
    }

    pub fn powi(&self, n: i32) -> Result<Jet2> {
        let x = self.value();
        if n < 0 && x.norm() == 0.0 {
            return Err(Error::DivisionByZeroValue);
        }
        let mut derivs = [Scalar::new(0.0, 0.0); MAX_ORDER + 1];
        let mut falling = 1.0;
        for (k, d) in derivs.iter_mut().enumerate() {
            let e = n - k as i32;
            if falling == 0.0 {
                break;
            }
            *d = if e == 0 { real(falling) } else { x.powi(e) * falling };
            falling *= e as f64;
        }
        Ok(self.compose(&derivs))
    }

    /// Real arguments must lie in `[-1, 1]` (open interval once derivatives
    /// are requested); complex arguments use the principal branch.
    pub fn asin(&self) -> Result<Jet2> {
        let x = self.value();
        if x.im == 0.0 {
            let bad = if self.order() == 0 { x.re.abs() > 1.0 } else { x.re.abs() >= 1.0 };
            if bad || x.re.is_nan() {
                return Err(Error::DomainError { func: "asin", value: x });
            }
        }
        let v = if x.im == 0.0 { real(x.re.asin()) } else { x.asin() };
        let q = real(1.0) - x * x;
        if q.norm() == 0.0 && self.order() > 0 {
            return Err(Error::DomainError { func: "asin", value: x });
        }
        let r = if self.order() > 0 { principal_sqrt(q).inv() } else { real(0.0) };
        let r3 = r * r * r;
        let r5 = r3 * r * r;
        let r7 = r5 * r * r;
        let x2 = x * x;
        Ok(self.compose(&[v, r, x * r3, (x2 * 2.0 + 1.0) * r5, (x2 * x * 6.0 + x * 9.0) * r7]))
    }

    /// Real arguments must satisfy `x >= 1` (`x > 1` once derivatives are
    /// requested); complex arguments use the principal branch.
    pub fn acosh(&self) -> Result<Jet2> {
        let x = self.value();
        if x.im == 0.0 {
            let bad = if self.order() == 0 { x.re < 1.0 } else { x.re <= 1.0 };
            if bad || x.re.is_nan() {
                return Err(Error::DomainError { func: "acosh", value: x });
            }
        }
        let v = if x.im == 0.0 { real(x.re.acosh()) } else { x.acosh() };
        let q = x * x - 1.0;
        if q.norm() == 0.0 && self.order() > 0 {
            return Err(Error::DomainError { func: "acosh", value: x });
        }
        let r = if self.order() > 0 { principal_sqrt(q).inv() } else { real(0.0) };
        let r3 = r * r * r;
        let r5 = r3 * r * r;
        let r7 = r5 * r * r;
        let x2 = x * x;
        Ok(self.compose(&[v, r, -x * r3, (x2 * 2.0 + 1.0) * r5, -(x2 * x * 6.0 + x * 9.0) * r7]))
    }
}

fn zip_order(a: &Jet2, b: &Jet2) -> usize {
    a.order().min(b.order())
}

// Mixed-order operands are truncated to the lower order; the result is exact
// at every order both operands retain.
impl Add for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: Jet2) -> Jet2 {
        Jet2::from_partials(zip_order(&self, &rhs), |i, j| self.d[idx(i, j)] + rhs.d[idx(i, j)])
    }
}

impl Sub for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: Jet2) -> Jet2 {
        Jet2::from_partials(zip_order(&self, &rhs), |i, j| self.d[idx(i, j)] - rhs.d[idx(i, j)])
    }
}

impl Neg for Jet2 {
    type Output = Jet2;
    fn neg(mut self) -> Jet2 {
        for z in self.d.iter_mut() {
            *z = -*z;
        }
        self
    }
}

impl Mul for Jet2 {
    type Output = Jet2;
    fn mul(self, rhs: Jet2) -> Jet2 {
        let m = zip_order(&self, &rhs);
        let mut out = Jet2::zeros(m);
        for n in 0..=m {
            for j in 0..=n {
                let i = n - j;
                let mut acc = Scalar::new(0.0, 0.0);
                for p in 0..=i {
                    for q in 0..=j {
                        let a = self.d[idx(p, q)];
                        if a.re == 0.0 && a.im == 0.0 {
                            continue;
                        }
                        acc += a * rhs.d[idx(i - p, j - q)] * (BINOM[i][p] * BINOM[j][q]);
                    }
                }
                out.d[idx(i, j)] = acc;
            }
        }
        out
    }
}

impl Add<Scalar> for Jet2 {
    type Output = Jet2;
    fn add(mut self, rhs: Scalar) -> Jet2 {
        self.d[0] += rhs;
        self
    }
}

impl Add<f64> for Jet2 {
    type Output = Jet2;
    fn add(self, rhs: f64) -> Jet2 {
        self + real(rhs)
    }
}

impl Sub<f64> for Jet2 {
    type Output = Jet2;
    fn sub(self, rhs: f64) -> Jet2 {
        self + real(-rhs)
    }
}

impl Mul<Scalar> for Jet2 {
    type Output = Jet2;
    fn mul(mut self, rhs: Scalar) -> Jet2 {
        for z in self.d.iter_mut() {
            *z *= rhs;
        }
        self
    }
}

impl Mul<f64> for Jet2 {
    type Output = Jet2;
    fn mul(mut self, rhs: f64) -> Jet2 {
        for z in self.d.iter_mut() {
            *z *= rhs;
        }
        self
    }
}

/// Binary operations of [`jet_arith`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetOp {
    Add,
    Sub,
    Mul,
    Div,
    Neg,
}

/// `neg` ignores `g`.
pub fn jet_arith(op: JetOp, f: &Jet2, g: &Jet2) -> Result<Jet2> {
    Ok(match op {
        JetOp::Add => *f + *g,
        JetOp::Sub => *f - *g,
        JetOp::Mul => *f * *g,
        JetOp::Div => f.checked_div(g)?,
        JetOp::Neg => -*f,
    })
}

/// Elementary functions of [`jet_func`].
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum JetFn {
    Sin,
    Cos,
    Sinh,
    Cosh,
    Exp,
    SqrtPrincipal,
    SqrtAbs,
    Powi(i32),
    Recip,
    Asin,
    Acosh,
}

pub fn jet_func(func: JetFn, f: &Jet2) -> Result<Jet2> {
    match func {
        JetFn::Sin => Ok(f.sin()),
        JetFn::Cos => Ok(f.cos()),
        JetFn::Sinh => Ok(f.sinh()),
        JetFn::Cosh => Ok(f.cosh()),
        JetFn::Exp => Ok(f.exp()),
        JetFn::SqrtPrincipal => f.sqrt_principal(),
        JetFn::SqrtAbs => f.sqrt_abs(),
        JetFn::Powi(n) => f.powi(n),
        JetFn::Recip => f.recip(),
        JetFn::Asin => f.asin(),
        JetFn::Acosh => f.acosh(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: Scalar, b: f64, tol: f64) -> bool {
        (a - real(b)).norm() <= tol
    }

    #[test]
    fn product_of_coordinates() {
        let st = jet_arith(JetOp::Mul, &Jet2::var_s(2.0, 2), &Jet2::var_t(3.0, 2)).unwrap();
        assert_eq!(st.value(), real(6.0));
        assert_eq!(st.partial(1, 0), real(3.0));
        assert_eq!(st.partial(0, 1), real(2.0));
        assert_eq!(st.partial(1, 1), real(1.0));
        assert_eq!(st.partial(2, 0), real(0.0));
        assert_eq!(st.partial(0, 2), real(0.0));
    }

    #[test]
    fn add_negation_is_zero() {
        let f = Jet2::var_s(0.4, 4).sin() * Jet2::var_t(1.3, 4).exp();
        let z = jet_arith(JetOp::Add, &f, &jet_arith(JetOp::Neg, &f, &f).unwrap()).unwrap();
        assert!(z.d.iter().all(|c| c.norm() == 0.0));
    }

    #[test]
    fn self_division_is_one() {
        let s = Jet2::var_s(5.0, 4);
        let q = jet_arith(JetOp::Div, &s, &s).unwrap();
        assert!(close(q.value(), 1.0, 1e-15));
        for n in 1..=4 {
            for j in 0..=n {
                assert!(q.partial(n - j, j).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn division_by_zero_value() {
        let s = Jet2::var_s(0.0, 2);
        assert_eq!(jet_arith(JetOp::Div, &s, &s), Err(Error::DivisionByZeroValue));
    }

    #[test]
    fn sin_series_at_zero() {
        let f = jet_func(JetFn::Sin, &Jet2::var_s(0.0, 3)).unwrap();
        assert_eq!(f.value(), real(0.0));
        assert!(close(f.partial(1, 0), 1.0, 1e-15));
        assert!(close(f.partial(2, 0), 0.0, 1e-15));
        assert!(close(f.partial(3, 0), -1.0, 1e-15));
    }

    #[test]
    fn hyperbolic_identity_is_constant() {
        let s = Jet2::var_s(0.7, 4);
        let c = s.cosh();
        let sh = s.sinh();
        let one = c * c - sh * sh;
        assert!(close(one.value(), 1.0, 1e-12));
        for n in 1..=4 {
            for j in 0..=n {
                assert!(one.partial(n - j, j).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn sqrt_principal_of_negative_constant() {
        let f = jet_func(JetFn::SqrtPrincipal, &Jet2::constant_real(-4.0, 2)).unwrap();
        assert_eq!(f.value(), Scalar::new(0.0, 2.0));
    }

    #[test]
    fn sqrt_abs_of_negative_jet() {
        let t = Jet2::var_t(-4.0, 2);
        let f = jet_func(JetFn::SqrtAbs, &t).unwrap();
        // sqrt(-t) at t = -4: 2, d/dt = -1/(2*2), d2/dt2 = -1/(4*8)
        assert!(close(f.value(), 2.0, 1e-15));
        assert!(close(f.partial(0, 1), -0.25, 1e-15));
        assert!(close(f.partial(0, 2), -1.0 / 32.0, 1e-15));
    }

    #[test]
    fn domain_errors_name_the_function() {
        assert!(matches!(Jet2::var_s(1.5, 1).asin(), Err(Error::DomainError { func: "asin", .. })));
        assert!(matches!(Jet2::var_s(0.5, 1).acosh(), Err(Error::DomainError { func: "acosh", .. })));
        assert!(matches!(Jet2::var_s(1.0, 1).acosh(), Err(Error::DomainError { func: "acosh", .. })));
        assert!(Jet2::var_s(1.0, 0).acosh().is_ok());
        assert!(matches!(Jet2::var_s(0.0, 1).sqrt_principal(), Err(Error::DomainError { func: "sqrt", .. })));
        assert_eq!(Jet2::var_s(0.0, 1).powi(-2), Err(Error::DivisionByZeroValue));
    }

    #[test]
    fn powi_matches_repeated_product() {
        let x = Jet2::var_s(1.3, 4) + Jet2::var_t(0.2, 4) * 2.0;
        let p = x.powi(3).unwrap();
        let q = x * x * x;
        for n in 0..=4 {
            for j in 0..=n {
                assert!((p.partial(n - j, j) - q.partial(n - j, j)).norm() < 1e-12);
            }
        }
        let inv2 = x.powi(-2).unwrap();
        let check = inv2 * x * x;
        assert!(close(check.value(), 1.0, 1e-14));
        assert!(check.partial(2, 2).norm() < 1e-12);
    }

    // Closed-form derivatives written out by hand, independent of `compose`.
    #[test]
    fn asin_and_acosh_derivatives() {
        let x0: f64 = 0.3;
        let a = Jet2::var_s(x0, 4).asin().unwrap();
        let q = 1.0 - x0 * x0;
        let expect = [
            x0.asin(),
            q.powf(-0.5),
            x0 * q.powf(-1.5),
            (1.0 + 2.0 * x0 * x0) * q.powf(-2.5),
            (6.0 * x0.powi(3) + 9.0 * x0) * q.powf(-3.5),
        ];
        for (k, e) in expect.iter().enumerate() {
            assert!(close(a.partial(k, 0), *e, 1e-12), "asin order {k}");
        }
        let x0: f64 = 1.7;
        let a = Jet2::var_t(x0, 4).acosh().unwrap();
        let q = x0 * x0 - 1.0;
        let expect = [
            x0.acosh(),
            q.powf(-0.5),
            -x0 * q.powf(-1.5),
            (1.0 + 2.0 * x0 * x0) * q.powf(-2.5),
            -(6.0 * x0.powi(3) + 9.0 * x0) * q.powf(-3.5),
        ];
        for (k, e) in expect.iter().enumerate() {
            assert!(close(a.partial(0, k), *e, 1e-12), "acosh order {k}");
        }
    }

    #[test]
    fn chain_rule_through_composition() {
        // f = sin(s t), d^2 f / ds dt = cos(st) - st sin(st)
        let (s0, t0) = (0.7, -1.1);
        let f = (Jet2::var_s(s0, 3) * Jet2::var_t(t0, 3)).sin();
        let st: f64 = s0 * t0;
        assert!(close(f.partial(1, 1), st.cos() - st * st.sin(), 1e-13));
        // d^3 f / ds^2 dt = -2 t sin(st) - s t^2 cos(st)
        let expect = -2.0 * t0 * st.sin() - s0 * t0 * t0 * st.cos();
        assert!(close(f.partial(2, 1), expect, 1e-13));
    }

    #[test]
    fn derivative_extraction_shifts_indices() {
        let f = (Jet2::var_s(0.3, 4) * Jet2::var_t(0.9, 4)).exp();
        let fs = f.d_s();
        assert_eq!(fs.order(), 3);
        assert_eq!(fs.partial(1, 2), f.partial(2, 2));
        assert_eq!(f.d_t().partial(3, 0), f.partial(3, 1));
    }

    fn jet() -> impl Strategy<Value = Jet2> {
        prop::collection::vec(-2.0..2.0f64, LEN).prop_map(|v| Jet2::from_partials(MAX_ORDER, |i, j| real(v[idx(i, j)])))
    }

    fn max_diff(a: &Jet2, b: &Jet2) -> f64 {
        a.d.iter().zip(b.d.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }

    proptest! {
        #[test]
        fn add_mul_commute_and_associate(a in jet(), b in jet(), c in jet()) {
            prop_assert!(max_diff(&(a + b), &(b + a)) <= 1e-12);
            prop_assert!(max_diff(&(a * b), &(b * a)) <= 1e-12);
            prop_assert!(max_diff(&((a + b) + c), &(a + (b + c))) <= 1e-12);
            prop_assert!(max_diff(&((a * b) * c), &(a * (b * c))) <= 1e-10);
            prop_assert!(max_diff(&(a * (b + c)), &(a * b + a * c)) <= 1e-11);
        }

        #[test]
        fn exp_of_sum_factorises(a in jet(), b in jet()) {
            let lhs = (a + b).exp();
            let rhs = a.exp() * b.exp();
            let scale = lhs.d.iter().map(|z| z.norm()).fold(1.0, f64::max);
            prop_assert!(max_diff(&lhs, &rhs) <= 1e-10 * scale);
        }
    }
}
