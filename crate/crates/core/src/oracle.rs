//! The independent engine: every quantity of [`PointGeometry`] rebuilt from
//! plain chart evaluations with nested Richardson central differences.
//!
//! Nothing here touches a jet beyond order 0. Steps are multiplied by the
//! patch's local length scale, and outer differences of already-differenced
//! fields get extra Richardson levels so the steps can stay large enough
//! for rounding to remain below the truncation error.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::fd::{fd_oracle, Vals};
use crate::geometry::{
    gaussian_curvature_ext, intrinsic_from_metric, kii_from_second_form, mean_curvature, one_type_fit, Domain,
    FundamentalForms, PointGeometry, SurfacePatch,
};
use crate::lorentz::{lorentz_dot, lorentz_normalize, LVec3, Scalar};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FdSteps {
    /// Richardson levels stacked on top of [`fd_oracle`] (0 = plain).
    pub levels: usize,
    /// Tangent vectors of the chart.
    pub tangent: f64,
    /// Second derivatives of the chart.
    pub second: f64,
    /// First derivatives of derived fields (N, flux).
    pub field: f64,
    /// Outer differences of the Laplacian flux.
    pub flux: f64,
    /// Outer differences of the fundamental forms (curvatures).
    pub form: f64,
    /// Richardson levels for the outer differences of the forms.
    pub form_levels: usize,
}

impl Default for FdSteps {
    fn default() -> Self {
        FdSteps {
            levels: LEVELS,
            tangent: TANGENT,
            second: SECOND,
            field: FIELD,
            flux: FLUX,
            form: FORM,
            form_levels: FORM_LEVELS,
        }
    }
}

impl FdSteps {
    /// Every step multiplied by `k`, for patches with a short length scale.
    pub fn scaled(&self, k: f64) -> FdSteps {
        FdSteps {
            levels: self.levels,
            tangent: self.tangent * k,
            second: self.second * k,
            field: self.field * k,
            flux: self.flux * k,
            form: self.form * k,
            form_levels: self.form_levels,
        }
    }
}

const LEVELS: usize = 1;
const TANGENT: f64 = 3e-2;
const SECOND: f64 = 1.5e-1;
const FIELD: f64 = 2e-2;
const FLUX: f64 = 5e-2;
const FORM: f64 = 3e-1;
const FORM_LEVELS: usize = 2;

/// `fd_oracle` with `levels` further Richardson steps; order `4 + 2 levels`.
pub fn richardson<V, F>(field: F, point: (f64, f64), idx: (usize, usize), h: f64, levels: usize) -> Result<V>
where
    V: crate::fd::FdValue,
    F: Fn(f64, f64) -> Result<V>,
{
    // table[k] holds the estimate from step h / 2^k at the current level.
    let mut table =
        (0..=levels).map(|k| fd_oracle(&field, point, idx, h * 0.5f64.powi(k as i32))).collect::<Result<Vec<V>>>()?;
    if idx.0 + idx.1 == 0 {
        return Ok(table[0]);
    }
    for level in 1..=levels {
        let p = 4f64.powi(level as i32 + 1);
        for k in 0..table.len() - 1 {
            table[k] = table[k + 1] * (p / (p - 1.0)) + table[k] * (-1.0 / (p - 1.0));
        }
        table.pop();
    }
    Ok(table[0])
}

pub struct FdEngine<'a> {
    patch: &'a SurfacePatch,
    steps: FdSteps,
    scale: f64,
}

fn vec_of(v: Vals<3>) -> LVec3 {
    LVec3::from_array(v.0)
}

fn vals_of(v: LVec3) -> Vals<3> {
    Vals(v.into_array())
}

impl<'a> FdEngine<'a> {
    pub fn new(patch: &'a SurfacePatch, steps: FdSteps) -> Self {
        FdEngine { patch, steps, scale: 1.0 }
    }

    fn pos(&self) -> impl Fn(f64, f64) -> Result<LVec3> + '_ {
        move |s, t| self.patch.position(s, t)
    }

    /// `d^(i+j) x / ds^i dt^j` at `(s, t)`.
    pub fn chart_partial(&self, s: f64, t: f64, (i, j): (usize, usize), h: f64) -> Result<LVec3> {
        richardson(self.pos(), (s, t), (i, j), h * self.scale, self.steps.levels)
    }

    fn tangents(&self, s: f64, t: f64) -> Result<(LVec3, LVec3)> {
        let h = self.steps.tangent;
        Ok((self.chart_partial(s, t, (1, 0), h)?, self.chart_partial(s, t, (0, 1), h)?))
    }

    pub fn normal(&self, s: f64, t: f64) -> Result<(LVec3, i8)> {
        let (xs, xt) = self.tangents(s, t)?;
        let (n, eps) =
            lorentz_normalize(&xs.cross(&xt), self.patch.norm_mode).map_err(|_| Error::NullNormal { s, t })?;
        Ok((n.scale_real(self.patch.orientation), eps))
    }

    /// `(E, F, G)`.
    pub fn metric(&self, s: f64, t: f64) -> Result<Vals<3>> {
        let (xs, xt) = self.tangents(s, t)?;
        Ok(Vals([xs.dot(&xs), xs.dot(&xt), xt.dot(&xt)]))
    }

    /// `(e, f, g)`.
    pub fn second_form(&self, s: f64, t: f64) -> Result<Vals<3>> {
        let h = self.steps.second;
        let n = self.normal(s, t)?.0;
        let xss = self.chart_partial(s, t, (2, 0), h)?;
        let xst = self.chart_partial(s, t, (1, 1), h)?;
        let xtt = self.chart_partial(s, t, (0, 2), h)?;
        Ok(Vals([xss.dot(&n), xst.dot(&n), xtt.dot(&n)]))
    }

    fn partials_of<const N: usize>(
        &self,
        field: impl Fn(f64, f64) -> Result<Vals<N>>,
        s: f64,
        t: f64,
        h: f64,
    ) -> Result<[[Vals<N>; 3]; 3]> {
        let z = Vals([Scalar::new(0.0, 0.0); N]);
        let mut out = [[z; 3]; 3];
        out[0][0] = field(s, t)?;
        for (i, j) in [(1, 0), (0, 1), (2, 0), (1, 1), (0, 2)] {
            out[i][j] = richardson(&field, (s, t), (i, j), h * self.scale, self.steps.form_levels)?;
        }
        Ok(out)
    }

    /// `sqrt|det g|` and `g^ij`, from finite-difference tangents.
    fn volume_and_inverse(&self, s: f64, t: f64) -> Result<(Scalar, [Scalar; 3])> {
        let [e, f, g] = self.metric(s, t)?.0;
        let det = e * g - f * f;
        let root = if det.im.abs() <= 1e-14 * det.norm() { Scalar::new(det.re.abs().sqrt(), 0.0) } else { det.sqrt() };
        Ok((root, [g / det, -f / det, e / det]))
    }

    /// `Delta N` by divergence of the flux `sqrt|g| g^ij d_j N`.
    pub fn delta_normal(&self, s: f64, t: f64) -> Result<LVec3> {
        let hf = self.steps.field * self.scale;
        let normal = |s: f64, t: f64| self.normal(s, t).map(|(n, _)| vals_of(n));
        let flux = |s: f64, t: f64| -> Result<Vals<6>> {
            let (root, [g11, g12, g22]) = self.volume_and_inverse(s, t)?;
            let ns = vec_of(richardson(normal, (s, t), (1, 0), hf, self.steps.levels)?);
            let nt = vec_of(richardson(normal, (s, t), (0, 1), hf, self.steps.levels)?);
            let fs = (ns.scale(g11) + nt.scale(g12)).scale(root);
            let ft = (ns.scale(g12) + nt.scale(g22)).scale(root);
            Ok(Vals([fs.x1, fs.x2, fs.x3, ft.x1, ft.x2, ft.x3]))
        };
        let h = self.steps.flux * self.scale;
        let ds = richardson(flux, (s, t), (1, 0), h, self.steps.levels)?.0;
        let dt = richardson(flux, (s, t), (0, 1), h, self.steps.levels)?.0;
        let root = self.volume_and_inverse(s, t)?.0;
        Ok(LVec3::new(-(ds[0] + dt[3]) / root, -(ds[1] + dt[4]) / root, -(ds[2] + dt[5]) / root))
    }

    pub fn geometry(&self, s: f64, t: f64) -> Result<PointGeometry> {
        if let Some(reason) = self.patch.excluded(s, t) {
            return Err(Error::ExcludedPoint { s, t, reason });
        }
        let local = FdEngine { scale: self.patch.length_scale(s, t).min(1.0), ..*self };
        local.geometry_unscaled(s, t)
    }

    /// Both fundamental forms only, much cheaper than [`Self::geometry`].
    pub fn forms(&self, s: f64, t: f64) -> Result<FundamentalForms> {
        if let Some(reason) = self.patch.excluded(s, t) {
            return Err(Error::ExcludedPoint { s, t, reason });
        }
        let local = FdEngine { scale: self.patch.length_scale(s, t).min(1.0), ..*self };
        let [ee, ff_, gg] = local.metric(s, t)?.0;
        let [e, f, g] = local.second_form(s, t)?.0;
        Ok(FundamentalForms::at((s, t), ee, ff_, gg, e, f, g))
    }

    fn geometry_unscaled(&self, s: f64, t: f64) -> Result<PointGeometry> {
        let h = self.steps.form;
        let m = self.partials_of(|s, t| self.metric(s, t), s, t, h)?;
        let w = self.partials_of(|s, t| self.second_form(s, t), s, t, h)?;
        let [ee, ff_, gg] = m[0][0].0;
        let [e, f, g] = w[0][0].0;
        let forms = FundamentalForms::at((s, t), ee, ff_, gg, e, f, g);
        let (normal, epsilon) = self.normal(s, t)?;
        let delta_n = self.delta_normal(s, t)?;
        let (k, residual) = one_type_fit(&delta_n, &normal);
        Ok(PointGeometry {
            s,
            t,
            position: self.patch.position(s, t)?,
            forms,
            normal,
            epsilon,
            mean: mean_curvature(&forms)?,
            k_ext: gaussian_curvature_ext(&forms)?,
            k_int: intrinsic_from_metric(|q, i, j| m[i][j].0[q]),
            k_ii: kii_from_second_form(|q, i, j| w[i][j].0[q], self.patch.kii_convention, (s, t)).ok(),
            delta_n,
            k,
            residual,
        })
    }
}

/// Finite-difference geometry with default steps.
pub fn fd_geometry(patch: &SurfacePatch, s: f64, t: f64) -> Result<PointGeometry> {
    FdEngine::new(patch, FdSteps::default()).geometry(s, t)
}

/// `|a - b| / max(1, |a|)`.
pub fn scaled_diff(a: Scalar, b: Scalar) -> f64 {
    (a - b).norm() / a.norm().max(1.0)
}

/// Named scalar quantities of a [`PointGeometry`], in a fixed order.
pub fn quantities(g: &PointGeometry) -> Vec<(&'static str, Option<Scalar>)> {
    let f = &g.forms;
    vec![
        ("E", Some(f.E)),
        ("F", Some(f.F)),
        ("G", Some(f.G)),
        ("e", Some(f.e)),
        ("f", Some(f.f)),
        ("g", Some(f.g)),
        ("H", Some(g.mean)),
        ("K", Some(g.k_ext)),
        ("K_int", Some(g.k_int)),
        ("KII", g.k_ii),
        ("N1", Some(g.normal.x1)),
        ("N2", Some(g.normal.x2)),
        ("N3", Some(g.normal.x3)),
        ("dN1", Some(g.delta_n.x1)),
        ("dN2", Some(g.delta_n.x2)),
        ("dN3", Some(g.delta_n.x3)),
        ("k", Some(g.k)),
    ]
}

/// Largest scaled jet/FD difference per quantity name.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Agreement {
    pub points: usize,
    pub per_quantity: Vec<(String, f64)>,
    pub max: f64,
    pub worst: Option<(String, f64, f64)>,
}

/// Compares both engines on the quantities named in `names` (all when empty).
pub fn compare(jet: &PointGeometry, fd: &PointGeometry, names: &[&str]) -> Vec<(&'static str, f64)> {
    quantities(jet)
        .into_iter()
        .zip(quantities(fd))
        .filter(|((n, _), _)| names.is_empty() || names.contains(n))
        .map(|((n, a), (_, b))| {
            let d = match (a, b) {
                (Some(a), Some(b)) => scaled_diff(a, b),
                (None, None) => 0.0,
                _ => f64::INFINITY,
            };
            (n, d)
        })
        .collect()
}

/// `count` seeded uniform points of `domain` that the patch does not exclude.
pub fn random_points(patch: &SurfacePatch, domain: &Domain, count: usize, seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    let mut tries = 0;
    while out.len() < count && tries < 100 * count.max(1) {
        tries += 1;
        let s = rng.gen_range(domain.s.0..domain.s.1);
        let t = rng.gen_range(domain.t.0..domain.t.1);
        if patch.excluded(s, t).is_none() {
            out.push((s, t));
        }
    }
    out
}

/// Dual-engine sweep over `points`.
pub fn agreement_at(patch: &SurfacePatch, points: &[(f64, f64)], names: &[&str]) -> Result<Agreement> {
    let engine = FdEngine::new(patch, FdSteps::default());
    let mut per: Vec<(String, f64)> = Vec::new();
    let mut worst: Option<(String, f64, f64)> = None;
    let mut max = 0.0f64;
    for &(s, t) in points {
        let a = patch.geometry(s, t)?;
        let b = engine.geometry(s, t)?;
        for (name, d) in compare(&a, &b, names) {
            match per.iter_mut().find(|(n, _)| n == name) {
                Some(slot) => slot.1 = slot.1.max(d),
                None => per.push((name.to_string(), d)),
            }
            if d > max || (d.is_nan() && !max.is_nan()) {
                max = d;
                worst = Some((format!("{name} at ({s}, {t})"), s, t));
            }
        }
    }
    Ok(Agreement { points: points.len(), per_quantity: per, max, worst })
}

/// Chart partials up to order 3: jets against finite differences.
pub fn chart_agreement(patch: &SurfacePatch, points: &[(f64, f64)]) -> Result<f64> {
    let engine = FdEngine::new(patch, FdSteps::default());
    let mut worst = 0.0f64;
    for &(s, t) in points {
        let x = patch.position_jet(s, t, 3)?;
        for n in 1..=3 {
            for j in 0..=n {
                let i = n - j;
                let h = if n == 1 { 1e-3 } else { 1e-2 };
                let fd = engine.chart_partial(s, t, (i, j), h)?;
                for (jc, fc) in x.into_array().iter().zip(fd.into_array()) {
                    let a = jc.partial(i, j);
                    let d = (a - fc).norm() / a.norm().max(1.0);
                    worst = worst.max(d);
                }
            }
        }
    }
    Ok(worst)
}

/// `<N, N>` and `<N, x_s>`, `<N, x_t>` sizes at one point, via jets.
pub fn normal_invariants(patch: &SurfacePatch, s: f64, t: f64) -> Result<(f64, f64)> {
    let g = patch.gauss_map(s, t)?;
    let x = patch.position_jet(s, t, 1)?;
    let xs = x.map(|c| c.partial(1, 0));
    let xt = x.map(|c| c.partial(0, 1));
    let unit = (lorentz_dot(&g.n, &g.n) - Scalar::new(f64::from(g.epsilon), 0.0)).norm();
    let ortho = (lorentz_dot(&g.n, &xs).norm() / xs.max_abs().max(1e-300))
        .max(lorentz_dot(&g.n, &xt).norm() / xt.max_abs().max(1e-300));
    Ok((unit, ortho))
}
