//! Closed-form charts of the surfaces under test.
//!
//! Revolution charts with an axial integral take the integral's value from
//! [`crate::quadrature`] and its derivatives from the integrand's own jet,
//! so the value never leaks into any curvature quantity.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{ChartFn, Domain, SurfacePatch};
use crate::jet::{Jet2, MAX_ORDER};
use crate::lorentz::{LVec3, NormMode, Scalar};
use crate::quadrature;

/// Named real parameters, kept sorted by name.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Params(BTreeMap<String, f64>);

impl Params {
    pub fn new() -> Self {
        Params(BTreeMap::new())
    }

    pub fn with(mut self, name: &str, value: f64) -> Self {
        self.0.insert(name.to_string(), value);
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.0.get(name).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, f64)> {
        self.0.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Parses `a=3,b=-1`. Whitespace around names and values is ignored.
    pub fn parse(text: &str) -> Result<Params> {
        let mut out = Params::new();
        for item in text.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| Error::InvalidInput(format!("expected name=value, got `{item}`")))?;
            let v: f64 =
                v.trim().parse().map_err(|_| Error::InvalidInput(format!("`{}` is not a number", v.trim())))?;
            if !v.is_finite() {
                return Err(Error::InvalidInput(format!("parameter {} must be finite", k.trim())));
            }
            out.0.insert(k.trim().to_string(), v);
        }
        Ok(out)
    }
}

impl fmt::Display for Params {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in &self.0 {
            if !first {
                f.write_str(",")?;
            }
            first = false;
            write!(f, "{k}={v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Family {
    Revolution,
    Helicoid,
    Enneper,
    Control,
}

/// Declared orientation pin: the Gauss map at `point` under default params.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Reference {
    pub point: (f64, f64),
    pub normal: [Scalar; 3],
}

#[derive(Debug, Clone)]
pub struct CatalogEntry {
    pub id: &'static str,
    pub name: &'static str,
    pub family: Family,
    pub defaults: &'static [(&'static str, f64)],
    pub constraint: &'static str,
    pub norm_mode: NormMode,
    pub default_domain: Domain,
    pub reference: Reference,
    /// Minimal/maximal with pointwise 1-type Gauss map is asserted for this
    /// surface (false for the control).
    pub asserted: bool,
}

impl CatalogEntry {
    pub fn default_params(&self) -> Params {
        self.defaults.iter().fold(Params::new(), |p, &(k, v)| p.with(k, v))
    }

    /// Defaults overlaid with `given`; unknown names are rejected.
    pub fn resolve(&self, given: &Params) -> Result<Params> {
        let mut p = self.default_params();
        for (k, v) in given.iter() {
            if !self.defaults.iter().any(|(n, _)| *n == k) {
                let expected = self.defaults.iter().map(|(n, _)| *n).collect::<Vec<_>>().join(", ");
                return Err(Error::UnknownParameter { surface: self.id.into(), name: k.into(), expected });
            }
            p = p.with(k, v);
        }
        Ok(p)
    }
}

const TWO_PI: f64 = std::f64::consts::TAU;

fn c(re: f64, im: f64) -> Scalar {
    Scalar::new(re, im)
}

fn r(x: f64) -> Scalar {
    Scalar::new(x, 0.0)
}

const R8: f64 = 0.353_553_390_593_273_8; // 1/sqrt(8)
const R3: f64 = 0.577_350_269_189_625_8; // 1/sqrt(3)
const R2: f64 = 0.707_106_781_186_547_5; // 1/sqrt(2)

fn entries() -> Vec<CatalogEntry> {
    use Family::*;
    let s_unit = (-1.0, 1.0);
    let d = |s: (f64, f64), t: (f64, f64)| Domain::new(s, t, false);
    vec![
        CatalogEntry {
            id: "rev1",
            name: "surface of revolution of the 1st kind (space-like)",
            family: Revolution,
            defaults: &[("a", 3.0), ("b", 1.0)],
            constraint: "b^2 < (t+a)^2",
            norm_mode: NormMode::Absolute,
            default_domain: Domain::new((0.0, TWO_PI), (0.5, 3.0), true),
            reference: Reference { point: (0.0, 0.0), normal: [r(-R8), r(0.0), r(-3.0 * R8)] },
            asserted: true,
        },
        CatalogEntry {
            id: "rev2s",
            name: "surface of revolution of the 2nd kind (space-like)",
            family: Revolution,
            defaults: &[("a", 0.0), ("b", 2.0)],
            constraint: "(t+a)^2 < b^2, t+a != 0",
            norm_mode: NormMode::Absolute,
            default_domain: d(s_unit, (0.2, 1.8)),
            reference: Reference { point: (0.0, 1.0), normal: [r(0.0), r(R3), r(2.0 * R3)] },
            asserted: true,
        },
        CatalogEntry {
            id: "rev2t",
            name: "surface of revolution of the 2nd kind (time-like)",
            family: Revolution,
            defaults: &[("a", 3.0), ("b", -1.0)],
            constraint: "b < 0, (t+a)^2 > 2b^2",
            norm_mode: NormMode::Absolute,
            default_domain: d(s_unit, (0.5, 3.0)),
            reference: Reference { point: (0.0, 0.0), normal: [r(-R8), r((7.0f64).sqrt() * R8), r(0.0)] },
            asserted: true,
        },
        CatalogEntry {
            id: "rev3",
            name: "surface of revolution of the 3rd kind (Lorentzian, complexified)",
            family: Revolution,
            defaults: &[("a", 0.0), ("b", 1.0), ("real_variant", 0.0)],
            constraint: "b != 0, real_variant in {0, 1}",
            norm_mode: NormMode::Bilinear,
            default_domain: d(s_unit, (0.1, 1.5)),
            reference: Reference { point: (0.0, 1.0), normal: [r(-R2), r(0.0), c(0.0, -R2)] },
            asserted: true,
        },
        CatalogEntry {
            id: "hel1",
            name: "helicoid of the 1st kind (space-like)",
            family: Helicoid,
            defaults: &[("a", 3.0), ("b", 1.0)],
            constraint: "|a|>|b|>0, t outside [min(-a-b,-a+b), max(-a-b,-a+b)]",
            norm_mode: NormMode::Absolute,
            default_domain: d(s_unit, (0.5, 3.0)),
            reference: Reference { point: (0.0, 0.0), normal: [r(0.0), r(-R8), r(3.0 * R8)] },
            asserted: true,
        },
        CatalogEntry {
            id: "hel2s",
            name: "helicoid of the 2nd kind (space-like)",
            family: Helicoid,
            defaults: &[("a", 0.0), ("b", 2.0)],
            constraint: "|b|>|a|, min(-a-b,-a+b) < t < max(-a-b,-a+b)",
            norm_mode: NormMode::Absolute,
            default_domain: d(s_unit, (0.2, 1.8)),
            reference: Reference { point: (0.0, 1.0), normal: [r(0.0), r(R3), r(-2.0 * R3)] },
            asserted: true,
        },
        CatalogEntry {
            id: "hel2t",
            name: "helicoid of the 2nd kind (time-like)",
            family: Helicoid,
            defaults: &[("a", 3.0), ("b", -1.0)],
            constraint: "|a|>|b|>0, t outside [min(-a-b,-a+b), max(-a-b,-a+b)]",
            norm_mode: NormMode::Absolute,
            default_domain: d(s_unit, (0.5, 3.0)),
            reference: Reference { point: (0.0, 0.0), normal: [r(0.0), r(3.0 * R8), r(R8)] },
            asserted: true,
        },
        CatalogEntry {
            id: "hel3",
            name: "helicoid of the 3rd kind (Lorentzian)",
            family: Helicoid,
            defaults: &[("a", 0.0), ("b", 1.0)],
            constraint: "|a|<|b|, min(-a-b,-a+b) < t < max(-a-b,-a+b)",
            norm_mode: NormMode::Absolute,
            default_domain: d(s_unit, (0.1, 0.9)),
            reference: Reference { point: (0.0, 0.5), normal: [r(0.4472135954999579), r(-0.8944271909999159), r(0.0)] },
            asserted: true,
        },
        CatalogEntry {
            id: "enneper_conj2",
            name: "conjugate of Enneper's surface of the 2nd kind",
            family: Enneper,
            defaults: &[("h", 1.0)],
            constraint: "h != 0, t != 0",
            norm_mode: NormMode::Absolute,
            default_domain: d(s_unit, (-1.0, 1.0)),
            reference: Reference { point: (0.0, 0.5), normal: [r(0.0), r(1.5 * R2), r(-0.5 * R2)] },
            asserted: true,
        },
        CatalogEntry {
            id: "enneper_rev2",
            name: "surface of revolution Enneper of the 2nd kind",
            family: Enneper,
            defaults: &[("a", 1.0), ("b", 0.0)],
            constraint: "a > 0, t != 0",
            norm_mode: NormMode::Absolute,
            default_domain: d(s_unit, (-1.0, 1.0)),
            reference: Reference { point: (0.0, 0.5), normal: [r(0.25 * R3), r(0.0), r(-1.75 * R3)] },
            asserted: true,
        },
        CatalogEntry {
            id: "enneper_rev3",
            name: "surface of revolution Enneper of the 3rd kind",
            family: Enneper,
            defaults: &[("a", 1.0), ("b", 0.0)],
            constraint: "a > 0, t != 0",
            norm_mode: NormMode::Absolute,
            default_domain: d(s_unit, (-1.0, 1.0)),
            reference: Reference { point: (0.0, 0.5), normal: [r(1.75 * R3), r(0.0), r(-0.25 * R3)] },
            asserted: true,
        },
        CatalogEntry {
            id: "torus_control",
            name: "round torus (negative control)",
            family: Control,
            defaults: &[("R", 2.0), ("r", 0.5)],
            constraint: "R>r>0",
            norm_mode: NormMode::Absolute,
            default_domain: Domain::new((0.0, TWO_PI), (-0.6, 0.6), true),
            reference: Reference { point: (0.0, 0.0), normal: [r(1.0), r(0.0), r(0.0)] },
            asserted: false,
        },
    ]
}

/// All entries in a fixed order.
pub fn list_entries() -> Vec<CatalogEntry> {
    entries()
}

pub fn entry(id: &str) -> Result<CatalogEntry> {
    entries().into_iter().find(|e| e.id == id).ok_or_else(|| Error::UnknownSurface(id.into()))
}

/// Surfaces of revolution checked for the minimal ⟺ 1-type equivalence.
pub const REVOLUTION_SUITE: [&str; 7] =
    ["rev1", "rev2s", "rev2t", "rev3", "enneper_rev2", "enneper_rev3", "torus_control"];

/// The asserted closed form of `k` in `Delta N = k N`, where one is stated.
pub fn closed_form_k(id: &str, p: &Params, t: f64) -> Option<f64> {
    let a = p.get("a")?;
    let b = p.get("b")?;
    let u = t + a;
    match id {
        "rev1" | "rev2t" => Some(-2.0 * b * b * (u * u - b * b).powi(-2)),
        "rev2s" => Some(-2.0 * b * b * (b * b - u * u).powi(-2)),
        "rev3" if p.get("real_variant") == Some(0.0) => Some(-2.0 * b * b * (u * u + b * b).powi(-2)),
        _ => None,
    }
}

/// `int_{u_ref}^{u} f`, with derivatives taken from the jet of `f`.
fn axial(u: &Jet2, u_ref: f64, f: impl Fn(&Jet2) -> Result<Jet2>) -> Result<Jet2> {
    let u0 = u.value().re;
    let m = u.order();
    let value = quadrature::integrate(|v| Ok(f(&Jet2::constant_real(v, 0))?.value()), u_ref, u0)?;
    let mut derivs = [value; MAX_ORDER + 1];
    if m > 0 {
        let fj = f(&Jet2::var_t(u0, m - 1))?;
        for (k, d) in derivs.iter_mut().enumerate().take(m + 1).skip(1) {
            *d = fj.partial(0, k - 1);
        }
    }
    Ok(u.compose(&derivs[..=m]))
}

fn cst(x: f64, like: &Jet2) -> Jet2 {
    Jet2::constant_real(x, like.order())
}

/// Keeps the default `t` range when every point of it is admissible,
/// otherwise falls back to a range built from the parameters.
fn fit_t(default: (f64, f64), fallback: (f64, f64), ok: impl Fn(f64) -> bool, what: &str) -> Result<(f64, f64)> {
    let all_ok = |(lo, hi): (f64, f64)| (0..=64).all(|i| ok(lo + (hi - lo) * i as f64 / 64.0));
    if all_ok(default) {
        Ok(default)
    } else if all_ok(fallback) {
        Ok(fallback)
    } else {
        Err(Error::InfeasibleDomain(format!("no admissible t range for {what}")))
    }
}

fn violation(cond: bool, text: &str) -> Result<()> {
    if cond {
        Ok(())
    } else {
        Err(Error::ConstraintViolation(format!("\"{text}\" fails")))
    }
}

fn need(p: &Params, k: &str) -> f64 {
    p.get(k).expect("resolved params carry every default")
}

/// Builds the patch for `id` with `params` overlaid on the defaults.
pub fn build(id: &str, params: &Params) -> Result<SurfacePatch> {
    let e = entry(id)?;
    let p = e.resolve(params)?;
    let patch = match id {
        "rev1" => rev1(&e, &p)?,
        "rev2s" => rev2s(&e, &p)?,
        "rev2t" => rev2t(&e, &p)?,
        "rev3" => rev3(&e, &p)?,
        "hel1" | "hel2s" | "hel2t" | "hel3" => helicoid(&e, &p)?,
        "enneper_conj2" => enneper_conj2(&e, &p)?,
        "enneper_rev2" | "enneper_rev3" => enneper_rev(&e, &p)?,
        "torus_control" => torus(&e, &p)?,
        _ => unreachable!("entry lookup succeeded"),
    };
    Ok(patch)
}

fn patch(e: &CatalogEntry, p: &Params, t: (f64, f64), chart: Arc<ChartFn>) -> SurfacePatch {
    let domain = Domain::new(e.default_domain.s, t, e.default_domain.s_periodic);
    SurfacePatch::new(e.id, p.clone(), domain, e.norm_mode, chart)
}

fn rev1(e: &CatalogEntry, p: &Params) -> Result<SurfacePatch> {
    let (a, b) = (need(p, "a"), need(p, "b"));
    let lo = 1.5 * b.abs() + 0.5;
    let t = fit_t(
        e.default_domain.t,
        (lo - a, lo - a + 2.5),
        |t| (t + a).abs() > b.abs() * (1.0 + 1e-9) && t + a > 0.0,
        "b^2 < (t+a)^2",
    )?;
    let u_ref = 2.0 * b.abs().max(0.5);
    let b2 = b * b;
    let chart: Arc<ChartFn> = Arc::new(move |s: &Jet2, t: &Jet2| {
        let u = *t + a;
        let rad = (u * u - b2).sqrt_principal()?;
        let x3 = axial(&u, u_ref, |v| (cst(b2, v) * (*v * *v - b2).recip()?).sqrt_principal())?;
        Ok(LVec3::new(rad * s.cos(), rad * s.sin(), x3))
    });
    Ok(patch(e, p, t, chart).with_orientation(-1.0))
}

fn rev2s(e: &CatalogEntry, p: &Params) -> Result<SurfacePatch> {
    let (a, b) = (need(p, "a"), need(p, "b"));
    violation(b != 0.0, "(t+a)^2 < b^2")?;
    let bb = b.abs();
    let t = fit_t(
        e.default_domain.t,
        (0.1 * bb - a, 0.9 * bb - a),
        |t| {
            let u = t + a;
            u > 0.0 && u < bb * (1.0 - 1e-9)
        },
        "(t+a)^2 < b^2",
    )?;
    let chart: Arc<ChartFn> = Arc::new(move |s: &Jet2, t: &Jet2| {
        let u = *t + a;
        let rad = (-(u * u) + b * b).sqrt_principal()?;
        let x2 = (rad * (-1.0 / b)).asin()? * (-b);
        Ok(LVec3::new(rad * s.sinh(), x2, rad * s.cosh()))
    });
    let scale = move |_s: f64, t: f64| {
        let u = (t + a).abs();
        2.0 * u.min(bb - u) / bb
    };
    Ok(patch(e, p, t, chart).with_length_scale(Arc::new(scale)))
}

fn rev2t(e: &CatalogEntry, p: &Params) -> Result<SurfacePatch> {
    let (a, b) = (need(p, "a"), need(p, "b"));
    if b >= 0.0 {
        return Err(Error::InfeasibleDomain(
            "the inverse cosh argument sqrt((t+a)^2-b^2)/(-b) must be >= 1, which needs b < 0".into(),
        ));
    }
    let lo = 1.6 * b.abs();
    let t = fit_t(
        e.default_domain.t,
        (lo - a, lo - a + 2.5),
        |t| {
            let u = t + a;
            u > 0.0 && u * u > 2.0 * b * b * (1.0 + 1e-9)
        },
        "(t+a)^2 > 2b^2",
    )?;
    let chart: Arc<ChartFn> = Arc::new(move |s: &Jet2, t: &Jet2| {
        let u = *t + a;
        let rad = (u * u - b * b).sqrt_principal()?;
        let x2 = (rad * (-1.0 / b)).acosh()? * (-b);
        Ok(LVec3::new(rad * s.cosh(), x2, rad * s.sinh()))
    });
    Ok(patch(e, p, t, chart))
}

fn rev3(e: &CatalogEntry, p: &Params) -> Result<SurfacePatch> {
    let (a, b) = (need(p, "a"), need(p, "b"));
    violation(b != 0.0, "b != 0")?;
    let variant = need(p, "real_variant");
    violation(variant == 0.0 || variant == 1.0, "real_variant in {0, 1}")?;
    let sign = if variant == 1.0 { 1.0 } else { -1.0 };
    let b2 = b * b;
    let chart: Arc<ChartFn> = Arc::new(move |s: &Jet2, t: &Jet2| {
        let u = *t + a;
        let w = (u * u + b2).sqrt_principal()?;
        let x1 = axial(&u, 0.0, |v| (cst(sign * b2, v) * (*v * *v + b2).recip()?).sqrt_principal())?;
        Ok(LVec3::new(x1, w * s.sinh(), w * s.cosh()))
    });
    let out = patch(e, p, e.default_domain.t, chart);
    Ok(if variant == 1.0 {
        let mut out = out;
        out.norm_mode = NormMode::Absolute;
        out
    } else {
        out.with_orientation(-1.0)
    })
}

fn helicoid(e: &CatalogEntry, p: &Params) -> Result<SurfacePatch> {
    let (a, b) = (need(p, "a"), need(p, "b"));
    let (aa, bb) = (a.abs(), b.abs());
    let outside = matches!(e.id, "hel1" | "hel2t");
    let t = if outside {
        violation(aa > bb && bb > 0.0, "|a|>|b|>0")?;
        fit_t(
            e.default_domain.t,
            (bb + 0.5 - a, bb + 3.0 - a),
            |t| (t + a).abs() > bb * (1.0 + 1e-9) && t + a > 0.0,
            e.constraint,
        )?
    } else if e.id == "hel2s" {
        violation(bb > aa, "|b|>|a|")?;
        fit_t(e.default_domain.t, (0.1 * bb - a, 0.9 * bb - a), |t| (t + a).abs() < bb * (1.0 - 1e-9), e.constraint)?
    } else {
        violation(aa < bb, "|a|<|b|")?;
        fit_t(e.default_domain.t, (0.1 * bb - a, 0.9 * bb - a), |t| (t + a).abs() < bb * (1.0 - 1e-9), e.constraint)?
    };
    let chart: Arc<ChartFn> = match e.id {
        "hel1" => Arc::new(move |s: &Jet2, t: &Jet2| {
            let u = *t + a;
            Ok(LVec3::new(u * s.cos(), u * s.sin(), *s * (-b)))
        }),
        "hel2s" | "hel2t" => Arc::new(move |s: &Jet2, t: &Jet2| {
            let u = *t + a;
            Ok(LVec3::new(u * s.cosh(), *s * (-b), u * s.sinh()))
        }),
        _ => Arc::new(move |s: &Jet2, t: &Jet2| {
            let u = *t + a;
            Ok(LVec3::new(*s * b, u * s.sinh(), u * s.cosh()))
        }),
    };
    let out = patch(e, p, t, chart);
    Ok(if e.id == "hel2s" {
        // E = b^2 - (t+a)^2 vanishes at the ends of the admissible range
        out.with_length_scale(Arc::new(move |_s, t: f64| 2.0 * (bb - (t + a).abs()) / bb))
    } else {
        out
    })
}

const ENNEPER_GAP: f64 = 0.1;

fn enneper_exclusion() -> Arc<crate::geometry::ExclusionFn> {
    Arc::new(|_s, t| {
        (t.abs() < ENNEPER_GAP).then(|| format!("|t| < {ENNEPER_GAP} is too close to the singular line t = 0"))
    })
}

fn enneper_conj2(e: &CatalogEntry, p: &Params) -> Result<SurfacePatch> {
    let h = need(p, "h");
    violation(h != 0.0, "h != 0")?;
    let chart: Arc<ChartFn> = Arc::new(move |s: &Jet2, t: &Jet2| {
        let s2 = *s * *s;
        let s3 = s2 * *s * (1.0 / 3.0);
        let ts = *t * *s;
        Ok(LVec3::new(s2 * h + *t, (s3 - *s) * h + ts, (s3 + *s) * h + ts))
    });
    Ok(patch(e, p, e.default_domain.t, chart)
        .with_exclusion(enneper_exclusion())
        .with_length_scale(Arc::new(|_s, t: f64| t.abs())))
}

fn enneper_rev(e: &CatalogEntry, p: &Params) -> Result<SurfacePatch> {
    let (a, b) = (need(p, "a"), need(p, "b"));
    violation(a > 0.0, "a > 0")?;
    let sign = if e.id == "enneper_rev2" { 1.0 } else { -1.0 };
    let chart: Arc<ChartFn> = Arc::new(move |s: &Jet2, t: &Jet2| {
        let cubic = *t * *t * *t * (sign * a);
        let s2t = *s * *s * *t;
        Ok(LVec3::new(cubic + *t - s2t + b, *s * *t * (-2.0), cubic - *t - s2t + b))
    });
    Ok(patch(e, p, e.default_domain.t, chart)
        .with_exclusion(enneper_exclusion())
        .with_length_scale(Arc::new(|_s, t: f64| t.abs())))
}

fn torus(e: &CatalogEntry, p: &Params) -> Result<SurfacePatch> {
    let (big, small) = (need(p, "R"), need(p, "r"));
    violation(big > small && small > 0.0, "R>r>0")?;
    let chart: Arc<ChartFn> = Arc::new(move |s: &Jet2, t: &Jet2| {
        let rho = t.cos() * small + big;
        Ok(LVec3::new(rho * s.cos(), rho * s.sin(), t.sin() * small))
    });
    // light-like parallels at |t| = pi/4
    let scale = |_s: f64, t: f64| (std::f64::consts::FRAC_PI_4 - t.abs()) / std::f64::consts::FRAC_PI_4;
    Ok(patch(e, p, e.default_domain.t, chart).with_length_scale(Arc::new(scale)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lorentz::{lorentz_dot, real};

    fn dflt(id: &str) -> SurfacePatch {
        build(id, &Params::new()).unwrap()
    }

    fn close(a: Scalar, b: f64, tol: f64) -> bool {
        (a - real(b)).norm() <= tol
    }

    #[test]
    fn twelve_entries_with_self_consistent_defaults() {
        let list = list_entries();
        assert_eq!(list.len(), 12);
        for e in &list {
            build(e.id, &Params::new()).unwrap_or_else(|err| panic!("{}: {err}", e.id));
        }
        assert_eq!(entry("rev3").unwrap().norm_mode, NormMode::Bilinear);
    }

    #[test]
    fn reference_normals_pin_orientation() {
        for e in list_entries() {
            let p = dflt(e.id);
            let (s, t) = e.reference.point;
            let n = p.gauss_map(s, t).unwrap().n;
            for (got, want) in n.into_array().iter().zip(e.reference.normal) {
                assert!((got - want).norm() < 1e-10, "{}: {n} vs {:?}", e.id, e.reference.normal);
            }
        }
    }

    #[test]
    fn first_forms_at_listed_points() {
        let ff = dflt("rev1").fundamental_forms(0.0, 0.0).unwrap();
        assert!(close(ff.E, 8.0, 1e-12) && close(ff.F, 0.0, 1e-12) && close(ff.G, 1.0, 1e-12));
        let ff = dflt("rev2s").fundamental_forms(0.0, 1.0).unwrap();
        assert!(close(ff.E, 3.0, 1e-12) && close(ff.F, 0.0, 1e-12) && close(ff.G, 1.0, 1e-12));
        let ff = dflt("rev3").fundamental_forms(0.0, 1.0).unwrap();
        assert!(close(ff.E, 2.0, 1e-12) && close(ff.F, 0.0, 1e-12) && close(ff.G, -1.0, 1e-12));
    }

    #[test]
    fn epsilon_matches_causal_type() {
        assert_eq!(dflt("rev1").gauss_map(0.0, 0.0).unwrap().epsilon, -1);
        assert_eq!(dflt("rev2s").gauss_map(0.0, 1.0).unwrap().epsilon, -1);
        assert_eq!(dflt("rev3").gauss_map(0.0, 1.0).unwrap().epsilon, 1);
        let n = dflt("rev3").gauss_map(0.3, 0.7).unwrap().n;
        assert!(close(lorentz_dot(&n, &n), 1.0, 1e-12));
    }

    #[test]
    fn constraint_messages_quote_the_inequality() {
        let err = build("hel1", &Params::new().with("a", 1.0).with("b", 1.0)).unwrap_err();
        assert!(matches!(&err, Error::ConstraintViolation(m) if m.contains("|a|>|b|>0")), "{err}");
        assert!(matches!(build("rev2t", &Params::new().with("b", 1.0)), Err(Error::InfeasibleDomain(_))));
        assert!(matches!(build("torus_control", &Params::new().with("r", 3.0)), Err(Error::ConstraintViolation(_))));
        assert!(matches!(build("nope", &Params::new()), Err(Error::UnknownSurface(_))));
        assert!(matches!(build("rev1", &Params::new().with("h", 1.0)), Err(Error::UnknownParameter { .. })));
    }

    #[test]
    fn rev2t_default_domain_is_admissible() {
        let p = dflt("rev2t");
        assert_eq!(p.domain.t, (0.5, 3.0));
        // cosh^-1 argument sqrt((t+a)^2 - 1) >= 1 for t >= sqrt(2) - 3
        assert!(p.position(0.0, 2f64.sqrt() - 3.0 - 1e-3).is_err());
        assert!(p.position(0.0, 2f64.sqrt() - 3.0 + 1e-3).is_ok());
    }

    #[test]
    fn non_default_params_get_a_fitted_domain() {
        let p = build("rev1", &Params::new().with("a", 0.0).with("b", 2.0)).unwrap();
        let (lo, hi) = p.domain.t;
        assert!(lo > 2.0 && hi > lo);
        p.geometry(0.1, lo).unwrap();
    }

    #[test]
    fn enneper_detg_is_minus_four_h_t() {
        let p = build("enneper_conj2", &Params::new().with("h", 1.5)).unwrap();
        for &(s, t) in &[(0.3, 0.5), (-0.7, -0.4), (0.1, 0.9)] {
            let ff = p.fundamental_forms(s, t).unwrap();
            assert!(close(ff.detg, -4.0 * 1.5 * t, 1e-12), "{:?}", ff.detg);
        }
        assert!(matches!(p.fundamental_forms(0.0, 0.05), Err(Error::ExcludedPoint { .. })));
    }

    #[test]
    fn axial_integral_matches_closed_form() {
        // rev1 third component: |b| acosh(u/|b|) up to a constant
        let p = dflt("rev1");
        let (x, y) = (p.position(0.0, 0.5).unwrap().x3.re, p.position(0.0, 2.5).unwrap().x3.re);
        assert!(((y - x) - (5.5f64.acosh() - 3.5f64.acosh())).abs() < 1e-13);
        // rev3 first component: i |b| asinh(u/|b|)
        let q = dflt("rev3");
        let z = q.position(0.0, 1.2).unwrap().x1;
        assert!(z.re.abs() < 1e-15 && (z.im - 1.2f64.asinh()).abs() < 1e-13);
    }

    #[test]
    fn params_parse_and_print() {
        let p = Params::parse("b=-1, a = 3").unwrap();
        assert_eq!(p.to_string(), "a=3,b=-1");
        assert!(Params::parse("a").is_err());
        assert!(Params::parse("a=x").is_err());
        assert!(Params::parse("").unwrap().is_empty());
    }
}
