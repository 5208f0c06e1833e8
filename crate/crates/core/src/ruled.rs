//! Ruled surfaces `x(s, t) = alpha(s) + t beta(s)`: causal-type
//! classification and curvature combinations along the rulings.

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::catalog::{build, Params};
use crate::error::{Error, Result};
use crate::geometry::{gaussian_curvature_ext, mean_curvature, ChartFn, Domain, SurfacePatch};
use crate::jet::Jet2;
use crate::lorentz::{lorentz_dot, CausalCharacter, LVec3, Scalar};

/// A curve `s -> R^3_1` evaluated on jets in `s`.
pub type CurveFn = dyn Fn(&Jet2) -> Result<LVec3<Jet2>> + Send + Sync;

/// Default classification tolerance, relative to the Euclidean size.
pub const CLASSIFY_TOL: f64 = 1e-9;

/// Default spread allowed along one ruling.
pub const RULING_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum RuledType {
    M1plus,
    M2plus,
    M3plus,
    M1minus,
    M2minus,
    NullScroll,
    Unclassified,
}

impl fmt::Display for RuledType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RuledType::M1plus => "M1+",
            RuledType::M2plus => "M2+",
            RuledType::M3plus => "M3+",
            RuledType::M1minus => "M1-",
            RuledType::M2minus => "M2-",
            RuledType::NullScroll => "null scroll",
            RuledType::Unclassified => "unclassified",
        })
    }
}

#[derive(Clone)]
pub struct RuledSurface {
    pub label: String,
    alpha: Arc<CurveFn>,
    beta: Arc<CurveFn>,
    patch: SurfacePatch,
}

impl fmt::Debug for RuledSurface {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RuledSurface")
            .field("label", &self.label)
            .field("domain", &self.patch.domain)
            .finish_non_exhaustive()
    }
}

fn ruled_chart(alpha: Arc<CurveFn>, beta: Arc<CurveFn>) -> Arc<ChartFn> {
    Arc::new(move |s: &Jet2, t: &Jet2| {
        let a = alpha(s)?;
        let b = beta(s)?;
        Ok(a + b.scale(*t))
    })
}

impl RuledSurface {
    /// A ruled surface with a real space-like or time-like Gauss map
    /// (absolute normalization).
    pub fn new(label: impl Into<String>, alpha: Arc<CurveFn>, beta: Arc<CurveFn>, domain: Domain) -> Self {
        let label = label.into();
        let chart = ruled_chart(alpha.clone(), beta.clone());
        let patch = SurfacePatch::new(label.clone(), Params::new(), domain, crate::lorentz::NormMode::Absolute, chart);
        RuledSurface { label, alpha, beta, patch }
    }

    /// Reads `alpha(s) = x(s, 0)` and `beta(s) = x(s, 1) - x(s, 0)` off a
    /// chart, after checking that `x_tt` vanishes across the domain.
    pub fn from_patch(patch: &SurfacePatch) -> Result<Self> {
        for (s, t) in patch.domain.grid(7, 7) {
            let x = patch.position_jet(s, t, 2)?;
            let xt = x.map(|c| c.partial(0, 1));
            let xtt = x.map(|c| c.partial(0, 2));
            if xtt.max_abs() > 1e-9 * (1.0 + xt.max_abs()) {
                return Err(Error::NotRuled(patch.label.clone()));
            }
        }
        let (pa, pb) = (patch.clone(), patch.clone());
        let alpha: Arc<CurveFn> = Arc::new(move |s: &Jet2| pa.chart_on(s, &Jet2::constant_real(0.0, s.order())));
        let beta: Arc<CurveFn> = Arc::new(move |s: &Jet2| {
            let one = pb.chart_on(s, &Jet2::constant_real(1.0, s.order()))?;
            let zero = pb.chart_on(s, &Jet2::constant_real(0.0, s.order()))?;
            Ok(one - zero)
        });
        Ok(RuledSurface { label: patch.label.clone(), alpha, beta, patch: patch.clone() })
    }

    /// Ruled decomposition of a catalog entry; `NotRuled` for charts that
    /// are not affine in `t`.
    pub fn from_catalog(id: &str, params: &Params) -> Result<Self> {
        Self::from_patch(&build(id, params)?)
    }

    /// The same surface over the base curve `alpha + t0 beta`; `t` shifts by `-t0`.
    pub fn with_base_offset(&self, t0: f64) -> Self {
        let (alpha, beta) = (self.alpha.clone(), self.beta.clone());
        let shifted: Arc<CurveFn> =
            Arc::new(move |s: &Jet2| Ok(alpha(s)? + beta(s)?.scale(Jet2::constant_real(t0, s.order()))));
        let old = self.patch.clone();
        let d = &old.domain;
        let domain = Domain::new(d.s, (d.t.0 - t0, d.t.1 - t0), d.s_periodic);
        let chart = ruled_chart(shifted.clone(), self.beta.clone());
        let (ex, sc) = (old.clone(), old.clone());
        let patch = SurfacePatch::new(old.label.clone(), old.params.clone(), domain, old.norm_mode, chart)
            .with_orientation(old.orientation)
            .with_kii_convention(old.kii_convention)
            .with_exclusion(Arc::new(move |s, t| ex.excluded(s, t + t0)))
            .with_length_scale(Arc::new(move |s, t| sc.length_scale(s, t + t0)));
        RuledSurface { label: self.label.clone(), alpha: shifted, beta: self.beta.clone(), patch }
    }

    pub fn patch(&self) -> &SurfacePatch {
        &self.patch
    }

    pub fn domain(&self) -> &Domain {
        &self.patch.domain
    }

    /// `(alpha'(s), beta(s), beta'(s))`.
    pub fn frame(&self, s: f64) -> Result<(LVec3, LVec3, LVec3)> {
        let v = Jet2::var_s(s, 1);
        let a = (self.alpha)(&v)?;
        let b = (self.beta)(&v)?;
        Ok((a.map(|c| c.partial(1, 0)), b.map(|c| c.value()), b.map(|c| c.partial(1, 0))))
    }

    pub fn position(&self, s: f64, t: f64) -> Result<LVec3> {
        self.patch.position(s, t)
    }
}

/// Causal character with light-likeness judged relative to `|X|^2` in the
/// Euclidean norm, so that rescaling `X` does not change the answer.
fn character(x: &LVec3, tol: f64) -> Result<CausalCharacter> {
    let size = x.euclid_norm_sq();
    let max_im = x.max_abs_im();
    if max_im > tol * size.sqrt().max(1.0) {
        return Err(Error::NonRealVector { max_im });
    }
    if size == 0.0 {
        return Ok(CausalCharacter::SpaceLike);
    }
    let q = lorentz_dot(x, x).re;
    Ok(if q.abs() <= tol * size {
        CausalCharacter::LightLike
    } else if q > 0.0 {
        CausalCharacter::SpaceLike
    } else {
        CausalCharacter::TimeLike
    })
}

fn constant_character(what: &'static str, samples: &[(f64, CausalCharacter)]) -> Result<CausalCharacter> {
    let first = samples[0].1;
    let odd: Vec<String> = samples.iter().filter(|(_, c)| *c != first).map(|(s, c)| format!("s={s}: {c}")).collect();
    if odd.is_empty() {
        Ok(first)
    } else {
        Err(Error::InconsistentCharacter {
            what,
            detail: format!("s={}: {first}, but {}", samples[0].0, odd.join(", ")),
        })
    }
}

/// Type of the ruled surface from the causal characters of `alpha'`,
/// `beta` and `beta'`, which must not change across `s_samples`.
pub fn classify_ruled(r: &RuledSurface, s_samples: &[f64], tol: f64) -> Result<RuledType> {
    use CausalCharacter::*;
    if s_samples.is_empty() {
        return Err(Error::InvalidInput("no s samples".into()));
    }
    let mut ca = Vec::new();
    let mut cb = Vec::new();
    let mut cdb = Vec::new();
    for &s in s_samples {
        let (da, b, db) = r.frame(s)?;
        if b.euclid_norm_sq() == 0.0 {
            return Err(Error::InvalidInput(format!("director vanishes at s={s}")));
        }
        ca.push((s, character(&da, tol)?));
        cb.push((s, character(&b, tol)?));
        cdb.push((s, character(&db, tol)?));
    }
    let a = constant_character("alpha'", &ca)?;
    let b = constant_character("beta", &cb)?;
    let db = constant_character("beta'", &cdb)?;
    Ok(match (a, b, db) {
        (LightLike, LightLike, _) => RuledType::NullScroll,
        (SpaceLike, SpaceLike, LightLike) => RuledType::M2plus,
        (SpaceLike, SpaceLike, _) => RuledType::M1plus,
        (SpaceLike, TimeLike, SpaceLike) => RuledType::M3plus,
        (TimeLike, SpaceLike, LightLike) => RuledType::M2minus,
        (TimeLike, SpaceLike, _) => RuledType::M1minus,
        _ => RuledType::Unclassified,
    })
}

/// Coefficients of `c_kii K_II + c_h H + c_k K`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Combo {
    pub c_kii: f64,
    pub c_h: f64,
    pub c_k: f64,
}

impl Combo {
    pub fn new(c_kii: f64, c_h: f64, c_k: f64) -> Self {
        Combo { c_kii, c_h, c_k }
    }

    /// Which of the three admissible forms the coefficients fit, if any:
    /// `aK_II + bH` with `a, b != 0, 2a - b != 0`; `aH + bK` with `a != 0`;
    /// `aK_II + bK` with `a != 0`.
    pub fn admissible_form(&self) -> Option<&'static str> {
        let Combo { c_kii, c_h, c_k } = *self;
        if c_k == 0.0 && c_kii != 0.0 && c_h != 0.0 && 2.0 * c_kii - c_h != 0.0 {
            Some("a K_II + b H")
        } else if c_kii == 0.0 && c_h != 0.0 {
            Some("a H + b K")
        } else if c_h == 0.0 && c_kii != 0.0 {
            Some("a K_II + b K")
        } else {
            None
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Constancy {
    pub holds: bool,
    /// Largest spread `max |v_i - v_j|` over one ruling.
    pub max_deviation: f64,
    /// `s` of the ruling with the largest spread.
    pub worst_s: f64,
    /// `None` when the coefficients fit none of the admissible forms.
    pub form: Option<&'static str>,
}

fn combo_value(p: &SurfacePatch, c: Combo, s: f64, t: f64) -> Result<Scalar> {
    let ff = p.fundamental_forms(s, t)?;
    let mut v = Scalar::new(0.0, 0.0);
    if c.c_h != 0.0 {
        v += mean_curvature(&ff)? * c.c_h;
    }
    if c.c_k != 0.0 {
        v += gaussian_curvature_ext(&ff)? * c.c_k;
    }
    if c.c_kii != 0.0 {
        v += p.second_gaussian_curvature(s, t)? * c.c_kii;
    }
    Ok(v)
}

/// Evaluates the combination along each ruling `s = const` at `t_samples`
/// and reports the worst spread.
pub fn constancy_along_rulings(
    r: &RuledSurface,
    combo: Combo,
    t_samples: &[f64],
    s_samples: &[f64],
    tol: f64,
) -> Result<Constancy> {
    let mut worst = (0.0f64, s_samples.first().copied().unwrap_or(0.0));
    for &s in s_samples {
        let vals = t_samples.iter().map(|&t| combo_value(r.patch(), combo, s, t)).collect::<Result<Vec<_>>>()?;
        let mut spread = 0.0f64;
        for (i, a) in vals.iter().enumerate() {
            for b in &vals[i + 1..] {
                spread = spread.max((a - b).norm());
            }
        }
        if spread > worst.0 {
            worst = (spread, s);
        }
    }
    Ok(Constancy { holds: worst.0 <= tol, max_deviation: worst.0, worst_s: worst.1, form: combo.admissible_form() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::axis;

    #[test]
    fn scale_free_character() {
        let null = LVec3::real(3e5, 4e5, 5e5);
        assert_eq!(character(&null, 1e-9).unwrap(), CausalCharacter::LightLike);
        let tiny = LVec3::real(1e-6, 0.0, 0.0);
        assert_eq!(character(&tiny, 1e-9).unwrap(), CausalCharacter::SpaceLike);
        assert_eq!(character(&LVec3::real(0.0, 1e-7, 2e-7), 1e-9).unwrap(), CausalCharacter::TimeLike);
    }

    #[test]
    fn combo_forms() {
        assert_eq!(Combo::new(1.0, 1.0, 0.0).admissible_form(), Some("a K_II + b H"));
        assert_eq!(Combo::new(1.0, 2.0, 0.0).admissible_form(), None);
        assert_eq!(Combo::new(0.0, 1.0, 0.0).admissible_form(), Some("a H + b K"));
        assert_eq!(Combo::new(2.0, 0.0, -1.0).admissible_form(), Some("a K_II + b K"));
        assert_eq!(Combo::new(0.0, 0.0, 1.0).admissible_form(), None);
    }

    #[test]
    fn base_offset_keeps_the_surface() {
        let r = RuledSurface::from_catalog("hel1", &Params::new()).unwrap();
        let shifted = r.with_base_offset(0.75);
        for s in axis((-1.0, 1.0), 5, true) {
            let a = r.position(s, 1.5).unwrap();
            let b = shifted.position(s, 0.75).unwrap();
            assert!((a - b).max_abs() < 1e-14);
        }
        assert_eq!(shifted.domain().t, (0.5 - 0.75, 3.0 - 0.75));
    }
}
