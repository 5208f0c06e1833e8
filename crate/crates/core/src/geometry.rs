//! Chart-level geometry of a patch `(s, t) -> x(s, t)` in Minkowski 3-space.
//!
//! Every quantity is read off Taylor jets of the immersion at one point:
//! a single order-4 evaluation carries enough derivatives for the Gauss map,
//! both fundamental forms, the Laplace–Beltrami operator applied to `N`, the
//! intrinsic curvature and the second Gaussian curvature.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog::Params;
use crate::error::{Error, Result};
use crate::jet::Jet2;
use crate::lorentz::{lorentz_dot, real, LVec3, NormMode, Scalar, NULL_TOL};

/// Evaluates the chart on jets of the coordinates. Order-0 jets give plain
/// point evaluation.
pub type ChartFn = dyn Fn(&Jet2, &Jet2) -> Result<LVec3<Jet2>> + Send + Sync;

/// Returns a reason when `(s, t)` lies in the singular set of the chart.
pub type ExclusionFn = dyn Fn(f64, f64) -> Option<String> + Send + Sync;

/// Local length scale of the chart, used to size finite-difference steps.
pub type ScaleFn = dyn Fn(f64, f64) -> f64 + Send + Sync;

/// Relative size below which `EG - F^2` counts as degenerate.
pub const METRIC_TOL: f64 = 1e-9;

/// Relative size below which `|eg| - f^2` counts as degenerate.
pub const SECOND_FORM_TOL: f64 = 1e-12;

/// Order of the jets used by [`SurfacePatch::geometry`].
pub const FULL_ORDER: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Domain {
    pub s: (f64, f64),
    pub t: (f64, f64),
    /// `s` is an angle; grids exclude the upper end.
    pub s_periodic: bool,
}

impl Domain {
    pub fn new(s: (f64, f64), t: (f64, f64), s_periodic: bool) -> Self {
        Domain { s, t, s_periodic }
    }

    pub fn contains(&self, s: f64, t: f64) -> bool {
        let s_ok = if self.s_periodic { s >= self.s.0 && s < self.s.1 } else { s >= self.s.0 && s <= self.s.1 };
        s_ok && t >= self.t.0 && t <= self.t.1
    }

    /// Pulls every non-periodic side in by `frac` of its length.
    pub fn shrunk(&self, frac: f64) -> Domain {
        let pull = |(lo, hi): (f64, f64)| {
            let d = frac * (hi - lo);
            (lo + d, hi - d)
        };
        Domain { s: if self.s_periodic { self.s } else { pull(self.s) }, t: pull(self.t), s_periodic: self.s_periodic }
    }

    pub fn intersect(&self, other: &Domain) -> Option<Domain> {
        let s = (self.s.0.max(other.s.0), self.s.1.min(other.s.1));
        let t = (self.t.0.max(other.t.0), self.t.1.min(other.t.1));
        if s.0 >= s.1 || t.0 >= t.1 {
            return None;
        }
        let periodic = self.s_periodic && other.s_periodic && s == self.s;
        Some(Domain { s, t, s_periodic: periodic })
    }

    /// `ns * nt` points, row-major in `t` then `s`.
    pub fn grid(&self, ns: usize, nt: usize) -> Vec<(f64, f64)> {
        let ss = axis(self.s, ns, !self.s_periodic);
        let ts = axis(self.t, nt, true);
        ts.iter().flat_map(|&t| ss.iter().map(move |&s| (s, t))).collect()
    }
}

/// `n` samples of `[lo, hi]`, or of `[lo, hi)` when `closed` is false.
pub fn axis((lo, hi): (f64, f64), n: usize, closed: bool) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![0.5 * (lo + hi)],
        _ => {
            let div = if closed { (n - 1) as f64 } else { n as f64 };
            (0..n).map(|i| lo + (hi - lo) * i as f64 / div).collect()
        }
    }
}

/// Which determinant sits in the prefactor of the second Gaussian curvature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum SecondFormDetConvention {
    /// `1 / (|eg| - f^2)^2` with the modulus of `eg`.
    #[default]
    AsPrinted,
    /// `1 / (eg - f^2)^2`.
    Signed,
}

#[derive(Clone)]
pub struct SurfacePatch {
    pub label: String,
    pub params: Params,
    pub domain: Domain,
    pub norm_mode: NormMode,
    /// `+1` or `-1`, multiplied into `normalize(x_s x x_t)`.
    pub orientation: f64,
    pub kii_convention: SecondFormDetConvention,
    chart: Arc<ChartFn>,
    exclusion: Option<Arc<ExclusionFn>>,
    scale: Option<Arc<ScaleFn>>,
}

impl fmt::Debug for SurfacePatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SurfacePatch")
            .field("label", &self.label)
            .field("params", &self.params)
            .field("domain", &self.domain)
            .field("norm_mode", &self.norm_mode)
            .field("orientation", &self.orientation)
            .finish_non_exhaustive()
    }
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FundamentalForms {
    pub E: Scalar,
    pub F: Scalar,
    pub G: Scalar,
    pub e: Scalar,
    pub f: Scalar,
    pub g: Scalar,
    pub detg: Scalar,
    pub ginv: [[Scalar; 2]; 2],
    /// Chart point the forms were taken at; NaN for hand-built forms.
    pub point: (f64, f64),
}

#[allow(non_snake_case)]
impl FundamentalForms {
    pub fn new(E: Scalar, F: Scalar, G: Scalar, e: Scalar, f: Scalar, g: Scalar) -> Self {
        Self::at((f64::NAN, f64::NAN), E, F, G, e, f, g)
    }

    #[allow(clippy::too_many_arguments)]
    pub fn at(point: (f64, f64), E: Scalar, F: Scalar, G: Scalar, e: Scalar, f: Scalar, g: Scalar) -> Self {
        let detg = E * G - F * F;
        let ginv = if detg.norm() == 0.0 {
            [[Scalar::new(f64::NAN, 0.0); 2]; 2]
        } else {
            let r = detg.inv();
            [[G * r, -F * r], [-F * r, E * r]]
        };
        FundamentalForms { E, F, G, e, f, g, detg, ginv, point }
    }

    pub fn real(E: f64, F: f64, G: f64, e: f64, f: f64, g: f64) -> Self {
        Self::new(real(E), real(F), real(G), real(e), real(f), real(g))
    }

    fn check_metric(&self) -> Result<()> {
        check_metric(self.E, self.F, self.G, self.detg, self.point)
    }
}

fn check_metric(e: Scalar, f: Scalar, g: Scalar, det: Scalar, (s, t): (f64, f64)) -> Result<()> {
    let scale = 1.0 + e.norm_sqr() + f.norm_sqr() + g.norm_sqr();
    if det.norm() < METRIC_TOL * scale || !det.norm().is_finite() {
        return Err(Error::DegenerateMetric { s, t, det: det.norm() });
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussMapSample {
    pub n: LVec3,
    /// `<N, N>`: `+1` for the de Sitter target, `-1` for the hyperbolic one.
    pub epsilon: i8,
}

/// Everything the verifier needs at one chart point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointGeometry {
    pub s: f64,
    pub t: f64,
    pub position: LVec3,
    pub forms: FundamentalForms,
    pub normal: LVec3,
    pub epsilon: i8,
    pub mean: Scalar,
    pub k_ext: Scalar,
    pub k_int: Scalar,
    /// `None` where `|eg| - f^2` vanishes.
    pub k_ii: Option<Scalar>,
    pub delta_n: LVec3,
    pub k: Scalar,
    pub residual: f64,
}

/// `(Eg - 2Ff + Ge) / (2 |EG - F^2|)`.
pub fn mean_curvature(ff: &FundamentalForms) -> Result<Scalar> {
    ff.check_metric()?;
    Ok((ff.E * ff.g - ff.F * ff.f * 2.0 + ff.G * ff.e) / (2.0 * ff.detg.norm()))
}

/// `(eg - f^2) / (EG - F^2)`.
pub fn gaussian_curvature_ext(ff: &FundamentalForms) -> Result<Scalar> {
    ff.check_metric()?;
    Ok((ff.e * ff.g - ff.f * ff.f) / ff.detg)
}

fn det3(m: [[Scalar; 3]; 3]) -> Scalar {
    m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
}

/// Brioschi's determinant difference for a symmetric form `(a, b, c)` given
/// by its second-order partials `p(q, i, j)` (`q` = 0, 1, 2 for `a`, `b`, `c`).
pub fn brioschi_numerator(p: impl Fn(usize, usize, usize) -> Scalar) -> Scalar {
    let h = 0.5;
    let (a, b, c) = (p(0, 0, 0), p(1, 0, 0), p(2, 0, 0));
    let (a_s, a_t, a_tt) = (p(0, 1, 0), p(0, 0, 1), p(0, 0, 2));
    let (b_s, b_t, b_st) = (p(1, 1, 0), p(1, 0, 1), p(1, 1, 1));
    let (c_s, c_t, c_ss) = (p(2, 1, 0), p(2, 0, 1), p(2, 2, 0));
    let zero = real(0.0);
    let first = det3([[-a_tt * h + b_st - c_ss * h, a_s * h, b_s - a_t * h], [b_t - c_s * h, a, b], [c_t * h, b, c]]);
    let second = det3([[zero, a_t * h, c_s * h], [a_t * h, a, b], [c_s * h, b, c]]);
    first - second
}

fn jets_partial(jets: [&Jet2; 3]) -> impl Fn(usize, usize, usize) -> Scalar + '_ {
    move |q, i, j| jets[q].partial(i, j)
}

/// `-(brioschi of E, F, G) / (EG - F^2)^2`; the sign makes it agree with
/// `(eg - f^2) / (EG - F^2)` on space-like patches.
pub fn intrinsic_from_metric(p: impl Fn(usize, usize, usize) -> Scalar) -> Scalar {
    let det = p(0, 0, 0) * p(2, 0, 0) - p(1, 0, 0) * p(1, 0, 0);
    -brioschi_numerator(p) / (det * det)
}

/// Second Gaussian curvature from the partials of `(e, f, g)`.
pub fn kii_from_second_form(
    p: impl Fn(usize, usize, usize) -> Scalar,
    convention: SecondFormDetConvention,
    (s, t): (f64, f64),
) -> Result<Scalar> {
    let (e, f, g) = (p(0, 0, 0), p(1, 0, 0), p(2, 0, 0));
    let den = match convention {
        SecondFormDetConvention::AsPrinted => real((e * g).norm()) - f * f,
        SecondFormDetConvention::Signed => e * g - f * f,
    };
    let scale = 1.0 + e.norm_sqr() + f.norm_sqr() + g.norm_sqr();
    if den.norm() < SECOND_FORM_TOL * scale {
        return Err(Error::DegenerateSecondForm { s, t, det: den.norm() });
    }
    Ok(brioschi_numerator(p) / (den * den))
}

/// `sqrt|det|` for a real determinant, principal root otherwise.
fn sqrt_volume(det: &Jet2) -> Result<Jet2> {
    let v = det.value();
    if v.im.abs() <= 1e-14 * v.norm() {
        let re = Jet2::from_partials(det.order(), |i, j| real(det.partial(i, j).re));
        re.sqrt_abs()
    } else {
        det.sqrt_principal()
    }
}

#[allow(non_snake_case)]
fn laplacian_jet(E: &Jet2, F: &Jet2, G: &Jet2, phi: &Jet2, point: (f64, f64)) -> Result<Scalar> {
    let det = *E * *G - *F * *F;
    check_metric(E.value(), F.value(), G.value(), det.value(), point)?;
    let root = sqrt_volume(&det)?;
    let inv = det.recip()?;
    let (g11, g12, g22) = (*G * inv, -(*F * inv), *E * inv);
    let (ps, pt) = (phi.d_s(), phi.d_t());
    let flux_s = root * (g11 * ps + g12 * pt);
    let flux_t = root * (g12 * ps + g22 * pt);
    let div = flux_s.d_s().value() + flux_t.d_t().value();
    Ok(-div / root.value())
}

/// Jets of the immersion and everything first/second order derived from it.
#[allow(non_snake_case)]
struct Jets {
    x: LVec3<Jet2>,
    n: LVec3<Jet2>,
    eps: i8,
    E: Jet2,
    F: Jet2,
    G: Jet2,
    e: Jet2,
    f: Jet2,
    g: Jet2,
}

/// `(k, max_c |v_c - k n_c|)` with `k = <v, n> / <n, n>`.
pub fn one_type_fit(v: &LVec3, n: &LVec3) -> (Scalar, f64) {
    let k = lorentz_dot(v, n) / lorentz_dot(n, n);
    let r = *v - n.scale(k);
    (k, r.max_abs())
}

impl SurfacePatch {
    pub fn new(
        label: impl Into<String>,
        params: Params,
        domain: Domain,
        norm_mode: NormMode,
        chart: Arc<ChartFn>,
    ) -> Self {
        SurfacePatch {
            label: label.into(),
            params,
            domain,
            norm_mode,
            orientation: 1.0,
            kii_convention: SecondFormDetConvention::AsPrinted,
            chart,
            exclusion: None,
            scale: None,
        }
    }

    pub fn with_orientation(mut self, sign: f64) -> Self {
        self.orientation = sign.signum();
        self
    }

    pub fn with_exclusion(mut self, f: Arc<ExclusionFn>) -> Self {
        self.exclusion = Some(f);
        self
    }

    pub fn with_length_scale(mut self, f: Arc<ScaleFn>) -> Self {
        self.scale = Some(f);
        self
    }

    /// Distance-like size of the region where the chart is smooth; 1 unless
    /// the chart approaches a singular set.
    pub fn length_scale(&self, s: f64, t: f64) -> f64 {
        self.scale.as_ref().map_or(1.0, |f| f(s, t))
    }

    pub fn with_kii_convention(mut self, c: SecondFormDetConvention) -> Self {
        self.kii_convention = c;
        self
    }

    /// `Some(reason)` if `(s, t)` is in the singular set.
    pub fn excluded(&self, s: f64, t: f64) -> Option<String> {
        self.exclusion.as_ref().and_then(|f| f(s, t))
    }

    fn check_point(&self, s: f64, t: f64) -> Result<()> {
        match self.excluded(s, t) {
            Some(reason) => Err(Error::ExcludedPoint { s, t, reason }),
            None => Ok(()),
        }
    }

    /// Plain chart value. Does not consult the exclusion set, so finite
    /// differences may straddle it.
    pub fn position(&self, s: f64, t: f64) -> Result<LVec3> {
        let x = (self.chart)(&Jet2::var_s(s, 0), &Jet2::var_t(t, 0))?;
        Ok(x.map(|c| c.value()))
    }

    pub fn position_jet(&self, s: f64, t: f64, order: usize) -> Result<LVec3<Jet2>> {
        (self.chart)(&Jet2::var_s(s, order), &Jet2::var_t(t, order))
    }

    /// Evaluates the chart on caller-supplied coordinate jets.
    pub fn chart_on(&self, s: &Jet2, t: &Jet2) -> Result<LVec3<Jet2>> {
        (self.chart)(s, t)
    }

    /// Oriented unit normal as jets, one order below `x`.
    pub fn normal_from_position(&self, x: &LVec3<Jet2>, (s, t): (f64, f64)) -> Result<(LVec3<Jet2>, i8)> {
        let xs = x.map(|c| c.d_s());
        let xt = x.map(|c| c.d_t());
        let w = xs.cross(&xt);
        let w0 = w.map(|c| c.value());
        let q = w.dot(&w);
        if q.value().norm() <= NULL_TOL * (1.0 + w0.euclid_norm_sq()) {
            return Err(Error::NullNormal { s, t });
        }
        let (inv_len, eps) = match self.norm_mode {
            NormMode::Absolute => {
                let max_im = w0.max_abs_im();
                if max_im > NULL_TOL * (1.0 + w0.euclid_norm_sq().sqrt()) {
                    return Err(Error::NonRealVector { max_im });
                }
                let eps: i8 = if q.value().re > 0.0 { 1 } else { -1 };
                ((q * f64::from(eps)).sqrt_principal()?.recip()?, eps)
            }
            NormMode::Bilinear => (q.sqrt_principal()?.recip()?, 1),
        };
        let k = inv_len * self.orientation;
        Ok((w.map(|c| c * k), eps))
    }

    fn jets(&self, s: f64, t: f64, order: usize) -> Result<Jets> {
        let x = self.position_jet(s, t, order)?;
        let (n, eps) = self.normal_from_position(&x, (s, t))?;
        let xs = x.map(|c| c.d_s());
        let xt = x.map(|c| c.d_t());
        let xss = xs.map(|c| c.d_s());
        let xst = xs.map(|c| c.d_t());
        let xtt = xt.map(|c| c.d_t());
        Ok(Jets {
            E: xs.dot(&xs),
            F: xs.dot(&xt),
            G: xt.dot(&xt),
            e: xss.dot(&n),
            f: xst.dot(&n),
            g: xtt.dot(&n),
            x,
            n,
            eps,
        })
    }

    fn forms_of(j: &Jets, point: (f64, f64)) -> FundamentalForms {
        let v = |c: &Jet2| c.value();
        FundamentalForms::at(point, v(&j.E), v(&j.F), v(&j.G), v(&j.e), v(&j.f), v(&j.g))
    }

    pub fn fundamental_forms(&self, s: f64, t: f64) -> Result<FundamentalForms> {
        self.check_point(s, t)?;
        let ff = Self::forms_of(&self.jets(s, t, 2)?, (s, t));
        ff.check_metric()?;
        Ok(ff)
    }

    pub fn gauss_map(&self, s: f64, t: f64) -> Result<GaussMapSample> {
        self.check_point(s, t)?;
        let x = self.position_jet(s, t, 1)?;
        let (n, epsilon) = self.normal_from_position(&x, (s, t))?;
        Ok(GaussMapSample { n: n.map(|c| c.value()), epsilon })
    }

    /// `-(1/sqrt|g|) sum_ij d_i(sqrt|g| g^ij d_j field)`; `field` receives
    /// order-3 coordinate jets and must return at least order 2.
    pub fn laplace_beltrami(&self, field: impl Fn(&Jet2, &Jet2) -> Result<Jet2>, s: f64, t: f64) -> Result<Scalar> {
        self.check_point(s, t)?;
        let j = self.jets(s, t, 3)?;
        let phi = field(&Jet2::var_s(s, 3), &Jet2::var_t(t, 3))?;
        if phi.order() < 2 {
            return Err(Error::InvalidInput(format!("field jet has order {}, need 2", phi.order())));
        }
        laplacian_jet(&j.E, &j.F, &j.G, &phi, (s, t))
    }

    pub fn delta_gauss_map(&self, s: f64, t: f64) -> Result<LVec3> {
        self.check_point(s, t)?;
        let j = self.jets(s, t, 3)?;
        j.n.try_map(|c| laplacian_jet(&j.E, &j.F, &j.G, &c, (s, t)))
    }

    /// `(k, residual)` for `Delta N = k N`.
    pub fn pointwise_k(&self, s: f64, t: f64) -> Result<(Scalar, f64)> {
        let dn = self.delta_gauss_map(s, t)?;
        let n = self.gauss_map(s, t)?.n;
        Ok(one_type_fit(&dn, &n))
    }

    pub fn gaussian_curvature_intrinsic(&self, s: f64, t: f64) -> Result<Scalar> {
        self.check_point(s, t)?;
        let j = self.jets(s, t, 3)?;
        Self::forms_of(&j, (s, t)).check_metric()?;
        Ok(intrinsic_from_metric(jets_partial([&j.E, &j.F, &j.G])))
    }

    pub fn second_gaussian_curvature(&self, s: f64, t: f64) -> Result<Scalar> {
        self.check_point(s, t)?;
        let j = self.jets(s, t, FULL_ORDER)?;
        kii_from_second_form(jets_partial([&j.e, &j.f, &j.g]), self.kii_convention, (s, t))
    }

    /// All pointwise quantities from one order-4 jet evaluation.
    pub fn geometry(&self, s: f64, t: f64) -> Result<PointGeometry> {
        self.check_point(s, t)?;
        let j = self.jets(s, t, FULL_ORDER)?;
        let forms = Self::forms_of(&j, (s, t));
        let mean = mean_curvature(&forms)?;
        let k_ext = gaussian_curvature_ext(&forms)?;
        let k_int = intrinsic_from_metric(jets_partial([&j.E, &j.F, &j.G]));
        let k_ii = kii_from_second_form(jets_partial([&j.e, &j.f, &j.g]), self.kii_convention, (s, t)).ok();
        let delta_n = j.n.try_map(|c| laplacian_jet(&j.E, &j.F, &j.G, &c, (s, t)))?;
        let normal = j.n.map(|c| c.value());
        let (k, residual) = one_type_fit(&delta_n, &normal);
        Ok(PointGeometry {
            s,
            t,
            position: j.x.map(|c| c.value()),
            forms,
            normal,
            epsilon: j.eps,
            mean,
            k_ext,
            k_int,
            k_ii,
            delta_n,
            k,
            residual,
        })
    }
}
