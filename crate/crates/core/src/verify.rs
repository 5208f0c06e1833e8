//! Claims as executable checks with PASS / FAIL / FLAGGED verdicts.
//!
//! Every check sweeps a grid with the jet engine and recomputes the quantities
//! it relies on with the finite-difference engine at a seeded subset of the
//! grid. A check that misses its tolerance is FLAGGED when the statement is
//! asserted for that surface and both engines agree, and FAIL otherwise.

use std::collections::BTreeMap;
use std::fmt;

use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{build, closed_form_k, entry, Params, REVOLUTION_SUITE};
use crate::error::{Error, Result};
use crate::fd::fd_oracle;
use crate::geometry::{axis, gaussian_curvature_ext, mean_curvature, Domain, PointGeometry, SurfacePatch};
use crate::lorentz::{lorentz_dot, Scalar};
use crate::oracle::{compare, scaled_diff, FdEngine, FdSteps};
use crate::ruled::{classify_ruled, constancy_along_rulings, Combo, RuledSurface, RuledType, CLASSIFY_TOL};

/// Bound on the jet / finite-difference disagreement.
pub const ORACLE_TOL: f64 = 1e-6;

/// Default claim tolerance.
pub const DEFAULT_TOL: f64 = 1e-8;

/// Default seed for the agreement subsets.
pub const DEFAULT_SEED: u64 = 42;

/// Grid points re-evaluated by the finite-difference engine per surface.
pub const AGREEMENT_POINTS: usize = 12;

/// Fraction of each domain side trimmed before gridding.
pub const SHRINK: f64 = 0.02;

#[allow(clippy::upper_case_acronyms)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Verdict {
    PASS,
    FAIL,
    FLAGGED,
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::PASS => "PASS",
            Verdict::FAIL => "FAIL",
            Verdict::FLAGGED => "FLAGGED",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct Grid {
    pub ns: usize,
    pub nt: usize,
}

impl Grid {
    pub const DEFAULT: Grid = Grid { ns: 64, nt: 64 };

    pub fn new(ns: usize, nt: usize) -> Self {
        Grid { ns, nt }
    }

    /// Parses `NxM`.
    pub fn parse(text: &str) -> Result<Grid> {
        let bad = || Error::InvalidInput(format!("grid must look like 64x64, got `{text}`"));
        let (a, b) = text.split_once(['x', 'X']).ok_or_else(bad)?;
        let ns: usize = a.trim().parse().map_err(|_| bad())?;
        let nt: usize = b.trim().parse().map_err(|_| bad())?;
        if ns < 2 || nt < 2 {
            return Err(Error::InvalidInput(format!("grid needs at least 2x2 points, got {ns}x{nt}")));
        }
        Ok(Grid { ns, nt })
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}x{}", self.ns, self.nt)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SurfaceRef {
    pub id: String,
    pub params: Params,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ClaimResult {
    pub claim_id: String,
    /// Which check produced this record, e.g. `minimality`.
    pub check: String,
    pub surfaces: Vec<SurfaceRef>,
    pub grid: Grid,
    pub tolerance: f64,
    pub max_residual: f64,
    /// Largest scaled `|jet - fd|` over the quantities the check relies on.
    pub engine_agreement: f64,
    pub verdict: Verdict,
    pub notes: String,
    /// Named side measurements (component residuals, counts).
    pub metrics: BTreeMap<String, f64>,
}

/// Settings shared by every check of one run.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: Grid,
    pub tol: f64,
    pub seed: u64,
    /// Overrides applied to every surface of a claim that knows the name.
    pub params: Params,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig { grid: Grid::DEFAULT, tol: DEFAULT_TOL, seed: DEFAULT_SEED, params: Params::new() }
    }
}

fn decide(residual: f64, tol: f64, agreement: f64, asserted: bool) -> Verdict {
    if !(agreement <= ORACLE_TOL) {
        Verdict::FAIL
    } else if residual <= tol {
        Verdict::PASS
    } else if asserted {
        Verdict::FLAGGED
    } else {
        Verdict::FAIL
    }
}

fn verdict_note(v: Verdict, agreement: f64) -> &'static str {
    match v {
        Verdict::PASS => "",
        Verdict::FLAGGED => "asserted statement contradicted by direct computation; both engines agree",
        Verdict::FAIL if !(agreement <= ORACLE_TOL) => "jet and finite-difference engines disagree",
        Verdict::FAIL => "tolerance exceeded",
    }
}

fn join_notes(parts: &[&str]) -> String {
    parts.iter().filter(|p| !p.is_empty()).copied().collect::<Vec<_>>().join("; ")
}

struct Built {
    patch: SurfacePatch,
    sref: SurfaceRef,
}

fn built(id: &str, params: &Params) -> Result<Built> {
    let patch = build(id, params)?;
    let sref = SurfaceRef { id: id.to_string(), params: patch.params.clone() };
    Ok(Built { patch, sref })
}

/// Grid points of `domain` shrunk by [`SHRINK`], without excluded points.
fn grid_points(patch: &SurfacePatch, domain: &Domain, grid: Grid) -> (Vec<(f64, f64)>, usize) {
    let all = domain.shrunk(SHRINK).grid(grid.ns, grid.nt);
    let total = all.len();
    let kept: Vec<_> = all.into_iter().filter(|&(s, t)| patch.excluded(s, t).is_none()).collect();
    let dropped = total - kept.len();
    (kept, dropped)
}

fn subset(points: &[(f64, f64)], seed: u64) -> Vec<(f64, f64)> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = AGREEMENT_POINTS.min(points.len());
    let mut idx = sample(&mut rng, points.len(), n).into_vec();
    idx.sort_unstable();
    idx.into_iter().map(|i| points[i]).collect()
}

/// Quantities that need only the two fundamental forms.
const FORM_QUANTITIES: [&str; 8] = ["E", "F", "G", "e", "f", "g", "H", "K"];

/// Largest disagreement on `names` at `points`.
fn agreement(patch: &SurfacePatch, points: &[(f64, f64)], names: &[&str]) -> Result<f64> {
    let engine = FdEngine::new(patch, FdSteps::default());
    let mut worst = 0.0f64;
    if !names.is_empty() && names.iter().all(|n| FORM_QUANTITIES.contains(n)) {
        for &(s, t) in points {
            let (a, b) = (patch.fundamental_forms(s, t)?, engine.forms(s, t)?);
            let pairs = [
                ("E", a.E, b.E),
                ("F", a.F, b.F),
                ("G", a.G, b.G),
                ("e", a.e, b.e),
                ("f", a.f, b.f),
                ("g", a.g, b.g),
                ("H", mean_curvature(&a)?, mean_curvature(&b)?),
                ("K", gaussian_curvature_ext(&a)?, gaussian_curvature_ext(&b)?),
            ];
            for (n, x, y) in pairs {
                let d = scaled_diff(x, y);
                if names.contains(&n) && !(d <= worst) {
                    worst = d;
                }
            }
        }
        return Ok(worst);
    }
    for &(s, t) in points {
        let a = patch.geometry(s, t)?;
        let b = engine.geometry(s, t)?;
        for (_, d) in compare(&a, &b, names) {
            if !(d <= worst) {
                worst = d;
            }
        }
    }
    Ok(worst)
}

/// Failed sweep: FAIL with the error and its location as the note.
fn failed(claim: &str, check: &str, surfaces: Vec<SurfaceRef>, cfg: &RunConfig, err: &Error) -> ClaimResult {
    ClaimResult {
        claim_id: claim.to_string(),
        check: check.to_string(),
        surfaces,
        grid: cfg.grid,
        tolerance: cfg.tol,
        max_residual: f64::INFINITY,
        engine_agreement: f64::INFINITY,
        verdict: Verdict::FAIL,
        notes: err.to_string(),
        metrics: BTreeMap::new(),
    }
}

fn sweep(patch: &SurfacePatch, points: &[(f64, f64)]) -> Result<Vec<PointGeometry>> {
    points.iter().map(|&(s, t)| patch.geometry(s, t)).collect()
}

/// `Delta N = k N` on the grid; on entries with a stated closed form for
/// `k`, also the relative error of the extracted `k` when `closed_form` is set.
pub fn verify_pointwise_one_type(
    claim: &str,
    id: &str,
    params: &Params,
    cfg: &RunConfig,
    closed_form: bool,
) -> Result<ClaimResult> {
    let b = built(id, params)?;
    let (points, dropped) = grid_points(&b.patch, &b.patch.domain, cfg.grid);
    let run = || -> Result<ClaimResult> {
        let geo = sweep(&b.patch, &points)?;
        let mut m = BTreeMap::new();
        let residual = geo.iter().map(|g| g.residual).fold(0.0, f64::max);
        let unit = geo
            .iter()
            .map(|g| (lorentz_dot(&g.normal, &g.normal) - Scalar::new(f64::from(g.epsilon), 0.0)).norm())
            .fold(0.0, f64::max);
        let k_imag = geo.iter().map(|g| g.k.im.abs()).fold(0.0, f64::max);
        m.insert("one_type_residual".into(), residual);
        m.insert("normal_norm_dev".into(), unit);
        m.insert("k_max_imag".into(), k_imag);
        m.insert("excluded_points".into(), dropped as f64);
        let mut worst = residual;
        let mut note = String::new();
        if closed_form && closed_form_k(id, &b.patch.params, 0.0).is_some() {
            let mut rel = 0.0f64;
            for g in &geo {
                let want = closed_form_k(id, &b.patch.params, g.t).expect("closed form checked above");
                rel = rel.max((g.k - Scalar::new(want, 0.0)).norm() / want.abs().max(f64::MIN_POSITIVE));
            }
            m.insert("k_closed_form_rel_err".into(), rel);
            if rel > cfg.tol {
                let g = &geo[0];
                let want = closed_form_k(id, &b.patch.params, g.t).expect("closed form checked above");
                note = format!(
                    "stated k = {want:.6e} but computed k = {:.6e} at (s, t) = ({:.4}, {:.4})",
                    g.k.re, g.s, g.t
                );
            }
            worst = worst.max(rel);
        }
        let agree = agreement(&b.patch, &subset(&points, cfg.seed), &["N1", "N2", "N3", "dN1", "dN2", "dN3", "k"])?;
        let asserted = entry(id)?.asserted;
        let verdict = decide(worst, cfg.tol, agree, asserted);
        Ok(ClaimResult {
            claim_id: claim.into(),
            check: "pointwise_one_type".into(),
            surfaces: vec![b.sref.clone()],
            grid: cfg.grid,
            tolerance: cfg.tol,
            max_residual: worst,
            engine_agreement: agree,
            verdict,
            notes: join_notes(&[verdict_note(verdict, agree), &note]),
            metrics: m,
        })
    };
    Ok(run().unwrap_or_else(|e| failed(claim, "pointwise_one_type", vec![b.sref.clone()], cfg, &e)))
}

/// `max |H|` on the grid.
pub fn verify_minimality(claim: &str, id: &str, params: &Params, cfg: &RunConfig) -> Result<ClaimResult> {
    let b = built(id, params)?;
    let (points, dropped) = grid_points(&b.patch, &b.patch.domain, cfg.grid);
    let run = || -> Result<ClaimResult> {
        let mut h = 0.0f64;
        for &(s, t) in &points {
            h = h.max(b.patch.fundamental_forms(s, t).and_then(|ff| mean_curvature(&ff))?.norm());
        }
        let agree = agreement(&b.patch, &subset(&points, cfg.seed), &["E", "F", "G", "e", "f", "g", "H"])?;
        let verdict = decide(h, cfg.tol, agree, entry(id)?.asserted);
        let mut m = BTreeMap::new();
        m.insert("max_abs_H".into(), h);
        m.insert("excluded_points".into(), dropped as f64);
        Ok(ClaimResult {
            claim_id: claim.into(),
            check: "minimality".into(),
            surfaces: vec![b.sref.clone()],
            grid: cfg.grid,
            tolerance: cfg.tol,
            max_residual: h,
            engine_agreement: agree,
            verdict,
            notes: verdict_note(verdict, agree).into(),
            metrics: m,
        })
    };
    Ok(run().unwrap_or_else(|e| failed(claim, "minimality", vec![b.sref.clone()], cfg, &e)))
}

fn shared_domain(a: &SurfacePatch, b: &SurfacePatch) -> Result<Domain> {
    a.domain.intersect(&b.domain).ok_or_else(|| {
        Error::InfeasibleDomain(format!("default domains of {} and {} do not overlap", a.label, b.label))
    })
}

/// `E, F, G` of both surfaces at the same `(s, t)`.
pub fn verify_isometry_same_coords(
    claim: &str,
    pair: (&str, &str),
    params: &Params,
    cfg: &RunConfig,
) -> Result<ClaimResult> {
    let a = built(pair.0, params)?;
    let b = built(pair.1, params)?;
    let refs = vec![a.sref.clone(), b.sref.clone()];
    let run = || -> Result<ClaimResult> {
        let dom = shared_domain(&a.patch, &b.patch)?;
        let (points, _) = grid_points(&a.patch, &dom, cfg.grid);
        let points: Vec<_> = points.into_iter().filter(|&(s, t)| b.patch.excluded(s, t).is_none()).collect();
        let mut dev = [0.0f64; 3];
        let mut at = (f64::NAN, f64::NAN, [Scalar::default(); 2]);
        for &(s, t) in &points {
            let fa = a.patch.fundamental_forms(s, t)?;
            let fb = b.patch.fundamental_forms(s, t)?;
            for (k, (x, y)) in [(fa.E, fb.E), (fa.F, fb.F), (fa.G, fb.G)].into_iter().enumerate() {
                let d = (x - y).norm();
                if d > dev[k] {
                    dev[k] = d;
                    if k == 2 {
                        at = (s, t, [x, y]);
                    }
                }
            }
        }
        let residual = dev.iter().copied().fold(0.0, f64::max);
        let pts = subset(&points, cfg.seed);
        let names = ["E", "F", "G"];
        let agree = agreement(&a.patch, &pts, &names)?.max(agreement(&b.patch, &pts, &names)?);
        let verdict = decide(residual, cfg.tol, agree, entry(pair.0)?.asserted && entry(pair.1)?.asserted);
        let mut m = BTreeMap::new();
        m.insert("max_abs_dE".into(), dev[0]);
        m.insert("max_abs_dF".into(), dev[1]);
        m.insert("max_abs_dG".into(), dev[2]);
        let note = if dev[2] > cfg.tol {
            format!("G = {:.6} vs {:.6} at (s, t) = ({:.4}, {:.4})", at.2[0].re, at.2[1].re, at.0, at.1)
        } else {
            String::new()
        };
        Ok(ClaimResult {
            claim_id: claim.into(),
            check: "isometry_same_coords".into(),
            surfaces: refs.clone(),
            grid: cfg.grid,
            tolerance: cfg.tol,
            max_residual: residual,
            engine_agreement: agree,
            verdict,
            notes: join_notes(&[verdict_note(verdict, agree), &note]),
            metrics: m,
        })
    };
    Ok(run().unwrap_or_else(|e| failed(claim, "isometry_same_coords", refs.clone(), cfg, &e)))
}

/// Correspondence `t -> phi(t)` with `E_rev(phi(t)) = E_hel(t)`.
pub struct BourMap {
    rev: SurfacePatch,
    s0: f64,
    range: (f64, f64),
    increasing: bool,
}

fn real_e(p: &SurfacePatch, s: f64, t: f64) -> Result<f64> {
    Ok(p.fundamental_forms(s, t)?.E.re)
}

impl BourMap {
    /// Samples `E_rev` along `s = s0` and refuses a non-monotone profile.
    pub fn new(rev: &SurfacePatch, s0: f64) -> Result<Self> {
        let range = rev.domain.t;
        let ts = axis(range, 257, true);
        let es = ts.iter().map(|&t| real_e(rev, s0, t)).collect::<Result<Vec<_>>>()?;
        let increasing = es[es.len() - 1] > es[0];
        let monotone = es.windows(2).all(|w| if increasing { w[1] > w[0] } else { w[1] < w[0] });
        if !monotone {
            return Err(Error::NonMonotoneE(rev.label.clone()));
        }
        Ok(BourMap { rev: rev.clone(), s0, range, increasing })
    }

    pub fn phi(&self, t: f64, target: f64) -> Result<f64> {
        let (mut lo, mut hi) = self.range;
        let f = |x: f64| real_e(&self.rev, self.s0, x).map(|e| if self.increasing { e - target } else { target - e });
        if f(lo)? > 0.0 || f(hi)? < 0.0 {
            return Err(Error::BisectionFailure { t, target });
        }
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid <= lo || mid >= hi {
                break;
            }
            if f(mid)? <= 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        Ok(0.5 * (lo + hi))
    }
}

/// Bour correspondence between a helicoid and a surface of revolution along
/// `s = s0`: `phi` from `E`, then intrinsic curvature and `G` transported.
pub fn bour_match(claim: &str, pair: (&str, &str), params: &Params, nt: usize, cfg: &RunConfig) -> Result<ClaimResult> {
    let hel = built(pair.0, params)?;
    let rev = built(pair.1, params)?;
    let refs = vec![hel.sref.clone(), rev.sref.clone()];
    let grid = Grid::new(1, nt);
    let run = || -> Result<ClaimResult> {
        let d = hel.patch.domain.shrunk(SHRINK);
        let s0 = 0.5 * (d.s.0 + d.s.1);
        let t_grid = axis(d.t, nt, true);
        // diagonal metrics whose E does not depend on s
        for p in [&hel.patch, &rev.patch] {
            for t in axis(p.domain.shrunk(SHRINK).t, 5, true) {
                for s in axis(p.domain.shrunk(SHRINK).s, 5, true) {
                    let ff = p.fundamental_forms(s, t)?;
                    let e0 = p.fundamental_forms(s0, t)?.E;
                    if ff.F.norm() > 1e-10 || (ff.E - e0).norm() > 1e-10 * e0.norm().max(1.0) {
                        return Err(Error::InvalidInput(format!(
                            "{} is not of Bour form at (s, t) = ({s}, {t}): needs F = 0 and E = E(t)",
                            p.label
                        )));
                    }
                }
            }
        }
        let map = BourMap::new(&rev.patch, s0)?;
        let phi_of = |t: f64| -> Result<f64> { map.phi(t, real_e(&hel.patch, s0, t)?) };
        let (mut id_dev, mut curv, mut gdev) = (0.0f64, 0.0f64, 0.0f64);
        let mut rev_pts = Vec::new();
        for &t in &t_grid {
            let p = phi_of(t)?;
            rev_pts.push((s0, p));
            id_dev = id_dev.max((p - t).abs());
            let kh = hel.patch.gaussian_curvature_intrinsic(s0, t)?;
            let kr = rev.patch.gaussian_curvature_intrinsic(s0, p)?;
            curv = curv.max((kh - kr).norm());
            let dphi: f64 = fd_oracle(|_, x| phi_of(x), (0.0, t), (0, 1), 1e-3)?;
            let gh = hel.patch.fundamental_forms(s0, t)?.G;
            let gr = rev.patch.fundamental_forms(s0, p)?.G;
            gdev = gdev.max((gh - gr * (dphi * dphi)).norm());
        }
        let residual = curv.max(gdev);
        let hel_pts: Vec<_> = t_grid.iter().map(|&t| (s0, t)).collect();
        let names = ["E", "G", "K_int"];
        let agree = agreement(&hel.patch, &subset(&hel_pts, cfg.seed), &names)?.max(agreement(
            &rev.patch,
            &subset(&rev_pts, cfg.seed),
            &names,
        )?);
        let verdict = decide(residual, cfg.tol, agree, entry(pair.0)?.asserted && entry(pair.1)?.asserted);
        let mut m = BTreeMap::new();
        m.insert("phi_identity_dev".into(), id_dev);
        m.insert("curvature_dev".into(), curv);
        m.insert("G_transport_dev".into(), gdev);
        m.insert("s0".into(), s0);
        let note = match (curv > cfg.tol, gdev > cfg.tol) {
            (true, true) => "intrinsic curvature and G both fail to transport",
            (true, false) => "intrinsic curvature fails to transport",
            (false, true) => "G fails to transport under phi",
            _ => "",
        };
        Ok(ClaimResult {
            claim_id: claim.into(),
            check: "bour_match".into(),
            surfaces: refs.clone(),
            grid,
            tolerance: cfg.tol,
            max_residual: residual,
            engine_agreement: agree,
            verdict,
            notes: join_notes(&[verdict_note(verdict, agree), note]),
            metrics: m,
        })
    };
    Ok(run().unwrap_or_else(|e| ClaimResult { grid, ..failed(claim, "bour_match", refs.clone(), cfg, &e) }))
}

/// Gauss maps at identical `(s, t)`, up to one global sign. `asserted`
/// marks pairs claimed to share a Gauss map (FLAGGED rather than FAIL).
pub fn verify_same_gauss_map(
    claim: &str,
    a: (&str, &Params),
    b: (&str, &Params),
    asserted: bool,
    cfg: &RunConfig,
) -> Result<ClaimResult> {
    let sa = built(a.0, a.1)?;
    let sb = built(b.0, b.1)?;
    let refs = vec![sa.sref.clone(), sb.sref.clone()];
    let run = || -> Result<ClaimResult> {
        let dom = shared_domain(&sa.patch, &sb.patch)?;
        let (points, _) = grid_points(&sa.patch, &dom, cfg.grid);
        let points: Vec<_> = points.into_iter().filter(|&(s, t)| sb.patch.excluded(s, t).is_none()).collect();
        let (mut plus, mut minus) = (0.0f64, 0.0f64);
        for &(s, t) in &points {
            let na = sa.patch.gauss_map(s, t)?.n;
            let nb = sb.patch.gauss_map(s, t)?.n;
            plus = plus.max((na - nb).max_abs());
            minus = minus.max((na + nb).max_abs());
        }
        let residual = plus.min(minus);
        let pts = subset(&points, cfg.seed);
        let names = ["N1", "N2", "N3"];
        let agree = agreement(&sa.patch, &pts, &names)?.max(agreement(&sb.patch, &pts, &names)?);
        let verdict = decide(residual, cfg.tol, agree, asserted);
        let mut m = BTreeMap::new();
        m.insert("max_dev_same_sign".into(), plus);
        m.insert("max_dev_opposite_sign".into(), minus);
        let note = if asserted && verdict == Verdict::FLAGGED {
            "identity matching of (s, t) is an assumption; no correspondence is stated"
        } else {
            ""
        };
        Ok(ClaimResult {
            claim_id: claim.into(),
            check: "same_gauss_map".into(),
            surfaces: refs.clone(),
            grid: cfg.grid,
            tolerance: cfg.tol,
            max_residual: residual,
            engine_agreement: agree,
            verdict,
            notes: join_notes(&[verdict_note(verdict, agree), note]),
            metrics: m,
        })
    };
    Ok(run().unwrap_or_else(|e| failed(claim, "same_gauss_map", refs.clone(), cfg, &e)))
}

/// Ruled type of a catalog surface (rebased by `t0`) against the accepted
/// types, plus `H` constant along rulings.
pub fn verify_ruled(
    claim: &str,
    id: &str,
    params: &Params,
    t0: f64,
    accepted: &[RuledType],
    cfg: &RunConfig,
) -> Result<ClaimResult> {
    let b = built(id, params)?;
    let refs = vec![b.sref.clone()];
    let run = || -> Result<ClaimResult> {
        let r = RuledSurface::from_patch(&b.patch)?;
        let r = if t0 != 0.0 { r.with_base_offset(t0) } else { r };
        let d = r.domain().shrunk(SHRINK);
        let s_samples = axis(d.s, cfg.grid.ns.min(16), !d.s_periodic);
        let ty = classify_ruled(&r, &s_samples, CLASSIFY_TOL)?;
        let t_samples: Vec<f64> = axis(d.t, cfg.grid.nt.min(16), true)
            .into_iter()
            .filter(|&t| r.patch().excluded(s_samples[0], t).is_none())
            .collect();
        let c = constancy_along_rulings(&r, Combo::new(0.0, 1.0, 0.0), &t_samples, &s_samples, cfg.tol)?;
        let type_ok = accepted.contains(&ty);
        let residual = if type_ok { c.max_deviation } else { f64::INFINITY };
        let pts: Vec<_> = t_samples.iter().map(|&t| (s_samples[s_samples.len() / 2], t)).collect();
        let agree = agreement(r.patch(), &subset(&pts, cfg.seed), &["H"])?;
        let verdict = decide(residual, cfg.tol, agree, true);
        let mut m = BTreeMap::new();
        m.insert("ruling_spread_H".into(), c.max_deviation);
        m.insert("base_offset".into(), t0);
        let wanted = accepted.iter().map(|t| t.to_string()).collect::<Vec<_>>().join(" or ");
        let note = format!("type {ty}, expected {wanted}");
        Ok(ClaimResult {
            claim_id: claim.into(),
            check: "ruled_type".into(),
            surfaces: refs.clone(),
            grid: Grid::new(s_samples.len(), t_samples.len()),
            tolerance: cfg.tol,
            max_residual: residual,
            engine_agreement: agree,
            verdict,
            notes: join_notes(&[verdict_note(verdict, agree), &note]),
            metrics: m,
        })
    };
    Ok(run().unwrap_or_else(|e| failed(claim, "ruled_type", refs.clone(), cfg, &e)))
}

/// For every surface of revolution: pointwise 1-type (residual only) and
/// minimality, plus a record of whether the two verdicts coincide.
pub fn verify_prop18_suite(claim: &str, cfg: &RunConfig) -> Result<Vec<ClaimResult>> {
    let mut out = Vec::new();
    for id in REVOLUTION_SUITE {
        let p = overrides_for(id, &cfg.params)?;
        let one = verify_pointwise_one_type(claim, id, &p, cfg, false)?;
        let min = verify_minimality(claim, id, &p, cfg)?;
        let holds = (one.verdict == Verdict::PASS) == (min.verdict == Verdict::PASS);
        let agree = one.engine_agreement.max(min.engine_agreement);
        let verdict = if !(agree <= ORACLE_TOL) {
            Verdict::FAIL
        } else if holds {
            Verdict::PASS
        } else {
            Verdict::FAIL
        };
        let mut m = BTreeMap::new();
        m.insert("one_type_residual".into(), one.max_residual);
        m.insert("max_abs_H".into(), min.max_residual);
        let eq = ClaimResult {
            claim_id: claim.into(),
            check: "equivalence".into(),
            surfaces: one.surfaces.clone(),
            grid: cfg.grid,
            tolerance: cfg.tol,
            max_residual: if holds { 0.0 } else { 1.0 },
            engine_agreement: agree,
            verdict,
            notes: format!("1-type {}, minimal {}", one.verdict, min.verdict),
            metrics: m,
        };
        out.extend([one, min, eq]);
    }
    Ok(out)
}

/// Claim ids accepted by [`run_claim`], in report order.
pub const CLAIM_IDS: [&str; 9] = ["prop6", "prop7", "prop8", "prop9", "prop10", "prop11", "prop12", "prop13", "prop18"];

/// Surfaces a claim builds, for parameter routing.
fn claim_surfaces(claim: &str) -> &'static [&'static str] {
    match claim {
        "prop6" => &["rev1", "hel1"],
        "prop7" => &["rev2s", "hel2s"],
        "prop8" => &["rev2t", "hel2t"],
        "prop9" => &["rev3", "hel3"],
        "prop10" => &["enneper_conj2", "enneper_rev2", "enneper_rev3"],
        "prop11" => &["hel1", "hel2s", "hel3"],
        "prop12" => &["hel2t"],
        "prop13" => &["enneper_conj2"],
        "prop18" => &REVOLUTION_SUITE,
        _ => &[],
    }
}

/// The subset of `given` that `id` accepts.
fn overrides_for(id: &str, given: &Params) -> Result<Params> {
    let e = entry(id)?;
    let mut p = Params::new();
    for (k, v) in given.iter() {
        if e.defaults.iter().any(|(n, _)| *n == k) {
            p = p.with(k, v);
        }
    }
    Ok(p)
}

fn check_params(claim: &str, given: &Params) -> Result<()> {
    for (k, _) in given.iter() {
        let known = claim_surfaces(claim)
            .iter()
            .any(|id| entry(id).map(|e| e.defaults.iter().any(|(n, _)| *n == k)).unwrap_or(false));
        if !known {
            let expected = claim_surfaces(claim)
                .iter()
                .filter_map(|id| entry(id).ok())
                .flat_map(|e| e.defaults.iter().map(|(n, _)| *n))
                .collect::<std::collections::BTreeSet<_>>()
                .into_iter()
                .collect::<Vec<_>>()
                .join(", ");
            return Err(Error::UnknownParameter { surface: claim.into(), name: k.into(), expected });
        }
    }
    Ok(())
}

fn revolution_pair(claim: &str, rev: &str, hel: &str, cfg: &RunConfig) -> Result<Vec<ClaimResult>> {
    let p = overrides_for(rev, &cfg.params)?;
    // build both up front so a constraint violation aborts the claim
    build(rev, &p)?;
    build(hel, &p)?;
    Ok(vec![
        verify_pointwise_one_type(claim, rev, &p, cfg, true)?,
        verify_minimality(claim, rev, &p, cfg)?,
        verify_minimality(claim, hel, &p, cfg)?,
        verify_isometry_same_coords(claim, (hel, rev), &p, cfg)?,
        bour_match(claim, (hel, rev), &p, cfg.grid.nt, cfg)?,
    ])
}

/// Runs one claim. Construction errors (constraints, unknown parameters)
/// are returned as `Err`; failures inside a sweep become FAIL records.
pub fn run_claim(claim: &str, cfg: &RunConfig) -> Result<Vec<ClaimResult>> {
    if !CLAIM_IDS.contains(&claim) {
        return Err(Error::InvalidInput(format!(
            "unknown claim `{claim}` (expected one of {}, all)",
            CLAIM_IDS.join(", ")
        )));
    }
    check_params(claim, &cfg.params)?;
    let over = |id: &str| overrides_for(id, &cfg.params);
    match claim {
        "prop6" => revolution_pair(claim, "rev1", "hel1", cfg),
        "prop7" => revolution_pair(claim, "rev2s", "hel2s", cfg),
        "prop8" => revolution_pair(claim, "rev2t", "hel2t", cfg),
        "prop9" => revolution_pair(claim, "rev3", "hel3", cfg),
        "prop10" => {
            let (c, r2, r3) = (over("enneper_conj2")?, over("enneper_rev2")?, over("enneper_rev3")?);
            Ok(vec![
                verify_minimality(claim, "enneper_rev2", &r2, cfg)?,
                verify_minimality(claim, "enneper_rev3", &r3, cfg)?,
                verify_pointwise_one_type(claim, "enneper_conj2", &c, cfg, true)?,
                verify_same_gauss_map(claim, ("enneper_conj2", &c), ("enneper_rev2", &r2), true, cfg)?,
                verify_same_gauss_map(claim, ("enneper_conj2", &c), ("enneper_rev3", &r3), true, cfg)?,
            ])
        }
        "prop11" => {
            let ok = [RuledType::M1plus, RuledType::M3plus];
            ["hel1", "hel2s", "hel3"].iter().map(|id| verify_ruled(claim, id, &over(id)?, 0.0, &ok, cfg)).collect()
        }
        "prop12" => Ok(vec![verify_ruled(claim, "hel2t", &over("hel2t")?, 0.0, &[RuledType::M1minus], cfg)?]),
        "prop13" => {
            // the chart's own base curve t = 0 has a light-like tangent
            let ok = [RuledType::M2plus, RuledType::M2minus];
            Ok(vec![verify_ruled(claim, "enneper_conj2", &over("enneper_conj2")?, -1.0, &ok, cfg)?])
        }
        "prop18" => verify_prop18_suite(claim, cfg),
        _ => unreachable!("claim id checked above"),
    }
}

/// Every claim in [`CLAIM_IDS`] order. Parameter overrides are ignored here
/// since they cannot apply to every surface at once.
pub fn run_all(cfg: &RunConfig) -> Result<Vec<ClaimResult>> {
    let cfg = RunConfig { params: Params::new(), ..cfg.clone() };
    let mut out = Vec::new();
    for id in CLAIM_IDS {
        out.extend(run_claim(id, &cfg)?);
    }
    Ok(out)
}

/// Counts per verdict.
pub fn summarize(results: &[ClaimResult]) -> BTreeMap<Verdict, usize> {
    let mut m = BTreeMap::from([(Verdict::PASS, 0), (Verdict::FAIL, 0), (Verdict::FLAGGED, 0)]);
    for r in results {
        *m.entry(r.verdict).or_default() += 1;
    }
    m
}

/// Records on negative controls, whose FAIL is the expected outcome.
fn on_control(r: &ClaimResult) -> bool {
    !r.surfaces.is_empty() && r.surfaces.iter().all(|s| entry(&s.id).map(|e| !e.asserted).unwrap_or(false))
}

/// 0 all PASS, 1 any FAIL, 2 FLAGGED without FAIL. FAILs on negative
/// controls do not count.
pub fn exit_code(results: &[ClaimResult]) -> i32 {
    if results.iter().any(|r| r.verdict == Verdict::FAIL && !on_control(r)) {
        1
    } else if results.iter().any(|r| r.verdict == Verdict::FLAGGED) {
        2
    } else {
        0
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn verdict_rules() {
        assert_eq!(decide(1e-12, 1e-8, 1e-9, true), Verdict::PASS);
        assert_eq!(decide(1e-3, 1e-8, 1e-9, true), Verdict::FLAGGED);
        assert_eq!(decide(1e-3, 1e-8, 1e-9, false), Verdict::FAIL);
        assert_eq!(decide(1e-12, 1e-8, 1e-3, true), Verdict::FAIL);
        assert_eq!(decide(1e-12, 1e-8, f64::NAN, true), Verdict::FAIL);
    }

    #[test]
    fn grid_parse() {
        assert_eq!(Grid::parse("64x32").unwrap(), Grid::new(64, 32));
        assert!(Grid::parse("64").is_err());
        assert!(Grid::parse("1x9").is_err());
        assert_eq!(Grid::new(8, 9).to_string(), "8x9");
    }

    #[test]
    fn exit_codes() {
        let r = |v| ClaimResult {
            claim_id: "x".into(),
            check: "c".into(),
            surfaces: vec![],
            grid: Grid::DEFAULT,
            tolerance: 0.0,
            max_residual: 0.0,
            engine_agreement: 0.0,
            verdict: v,
            notes: String::new(),
            metrics: BTreeMap::new(),
        };
        assert_eq!(exit_code(&[r(Verdict::PASS)]), 0);
        assert_eq!(exit_code(&[r(Verdict::PASS), r(Verdict::FLAGGED)]), 2);
        assert_eq!(exit_code(&[r(Verdict::FAIL), r(Verdict::FLAGGED)]), 1);
        let on =
            |v, id: &str| ClaimResult { surfaces: vec![SurfaceRef { id: id.into(), params: Params::new() }], ..r(v) };
        assert_eq!(exit_code(&[on(Verdict::FAIL, "torus_control"), r(Verdict::FLAGGED)]), 2);
        assert_eq!(exit_code(&[on(Verdict::FAIL, "rev1")]), 1);
    }

    #[test]
    fn parameter_routing() {
        let p = Params::parse("a=2,h=3").unwrap();
        assert_eq!(overrides_for("rev1", &p).unwrap(), Params::new().with("a", 2.0));
        assert_eq!(overrides_for("enneper_conj2", &p).unwrap(), Params::new().with("h", 3.0));
        assert!(check_params("prop10", &p).is_ok());
        assert!(matches!(check_params("prop6", &p), Err(Error::UnknownParameter { .. })));
    }
}
