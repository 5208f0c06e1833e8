//! Acceptance gate: one line per criterion, then a single assertion over all
//! of them so every line is printed even when something fails.

use std::io::Write;
use std::process::Command;
use std::time::{Duration, Instant};

use surfrev_core::catalog::{build, list_entries, Params};
use surfrev_core::geometry::axis;
use surfrev_core::oracle::{agreement_at, random_points};
use surfrev_core::ruled::{classify_ruled, constancy_along_rulings, Combo, RuledSurface, RuledType, CLASSIFY_TOL};
use surfrev_core::verify::{
    bour_match, run_claim, verify_isometry_same_coords, verify_minimality, verify_pointwise_one_type, ClaimResult,
    RunConfig, DEFAULT_SEED, ORACLE_TOL, SHRINK,
};
use surfrev_core::Verdict;

const CLAIM_TOL: f64 = 1e-8;
const H_TOL: f64 = 1e-10;

type Criterion = (&'static str, fn() -> Outcome);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

fn params(pairs: &[(&str, f64)]) -> Params {
    pairs.iter().fold(Params::new(), |p, (k, v)| p.with(k, *v))
}

fn metric(r: &ClaimResult, name: &str) -> f64 {
    r.metrics.get(name).copied().unwrap_or(f64::NAN)
}

fn cfg() -> RunConfig {
    RunConfig::default()
}

fn agrees(r: &ClaimResult) -> bool {
    r.engine_agreement <= ORACLE_TOL
}

/// 1-type residual and closed-form `k` within tolerance, and `|H|` at most
/// `H_TOL`.
fn exact_one_type(id: &str, p: &Params) -> (bool, String) {
    let one = verify_pointwise_one_type("acceptance", id, p, &cfg(), true).unwrap();
    let min = verify_minimality("acceptance", id, p, &cfg()).unwrap();
    let (res, kerr) = (metric(&one, "one_type_residual"), metric(&one, "k_closed_form_rel_err"));
    let ok = res <= CLAIM_TOL && kerr <= CLAIM_TOL && min.max_residual <= H_TOL && agrees(&one) && agrees(&min);
    (ok, format!("{id}: residual {res:.1e}, k rel err {kerr:.1e}, max|H| {:.1e}", min.max_residual))
}

fn criterion_1() -> Outcome {
    let start = Instant::now();
    let (ok, detail) = exact_one_type("rev1", &params(&[("a", 3.0), ("b", 1.0)]));
    let took = start.elapsed();
    outcome(ok && took < Duration::from_secs(5), format!("{detail}, {:.1} s", took.as_secs_f64()))
}

fn criterion_2() -> Outcome {
    let (ok_s, d_s) = exact_one_type("rev2s", &params(&[("a", 0.0), ("b", 2.0)]));
    let p = params(&[("a", 3.0), ("b", -1.0)]);
    let (ok_t, d_t) = exact_one_type("rev2t", &p);
    if ok_t {
        return outcome(ok_s, format!("{d_s}; {d_t}"));
    }
    // the stated k for rev2t misses: acceptable only as FLAGGED with both engines agreeing
    let one = verify_pointwise_one_type("acceptance", "rev2t", &p, &cfg(), true).unwrap();
    let min = verify_minimality("acceptance", "rev2t", &p, &cfg()).unwrap();
    let ok = ok_s && one.verdict == Verdict::FLAGGED && agrees(&one) && min.max_residual <= H_TOL;
    outcome(ok, format!("{d_s}; {d_t}, verdict {} with agreement {:.1e}", one.verdict, one.engine_agreement))
}

fn criterion_3() -> Outcome {
    let p = params(&[("a", 0.0), ("b", 1.0)]);
    let (ok, detail) = exact_one_type("rev3", &p);
    let one = verify_pointwise_one_type("acceptance", "rev3", &p, &cfg(), true).unwrap();
    let (norm, imag) = (metric(&one, "normal_norm_dev"), metric(&one, "k_max_imag"));
    outcome(ok && norm <= 1e-10 && imag <= CLAIM_TOL, format!("{detail}, |<N,N> - 1| {norm:.1e}, max|Im k| {imag:.1e}"))
}

fn criterion_4() -> Outcome {
    let strict = RunConfig { tol: 1e-10, ..cfg() };
    let mut ok = true;
    let mut parts = Vec::new();
    for (hel, rev) in [("hel1", "rev1"), ("hel2s", "rev2s"), ("hel3", "rev3")] {
        let iso = verify_isometry_same_coords("acceptance", (hel, rev), &Params::new(), &strict).unwrap();
        let bour = bour_match("acceptance", (hel, rev), &Params::new(), strict.grid.nt, &cfg()).unwrap();
        let phi = metric(&bour, "phi_identity_dev");
        ok &= iso.verdict == Verdict::PASS && phi <= 1e-8 && agrees(&bour);
        parts.push(format!("{hel}/{rev} isometry {} ({:.1e}), phi dev {phi:.1e}", iso.verdict, iso.max_residual));
    }
    let iso = verify_isometry_same_coords("acceptance", ("hel2t", "rev2t"), &Params::new(), &cfg()).unwrap();
    let bour = bour_match("acceptance", ("hel2t", "rev2t"), &Params::new(), cfg().grid.nt, &cfg()).unwrap();
    for r in [&iso, &bour] {
        ok &= matches!(r.verdict, Verdict::PASS | Verdict::FLAGGED) && agrees(r);
    }
    parts.push(format!("hel2t/rev2t isometry {}, bour {}", iso.verdict, bour.verdict));
    outcome(ok, parts.join("; "))
}

fn criterion_5() -> Outcome {
    let rev = params(&[("a", 1.0), ("b", 0.0)]);
    let r2 = verify_minimality("acceptance", "enneper_rev2", &rev, &cfg()).unwrap();
    let r3 = verify_minimality("acceptance", "enneper_rev3", &rev, &cfg()).unwrap();
    let c = verify_pointwise_one_type("acceptance", "enneper_conj2", &params(&[("h", 1.0)]), &cfg(), false).unwrap();
    let excluded = metric(&c, "excluded_points");
    let ok = r2.max_residual <= CLAIM_TOL
        && r3.max_residual <= CLAIM_TOL
        && c.verdict == Verdict::PASS
        && c.max_residual <= CLAIM_TOL
        && [&r2, &r3, &c].iter().all(|r| agrees(r));
    outcome(
        ok,
        format!(
            "max|H| rev2 {:.1e}, rev3 {:.1e}; conj2 residual {:.1e} ({excluded} points with |t| < 0.1 excluded)",
            r2.max_residual, r3.max_residual, c.max_residual
        ),
    )
}

fn criterion_6() -> Outcome {
    let results = run_claim("prop18", &cfg()).unwrap();
    let mut ok = true;
    let mut parts = Vec::new();
    for eq in results.iter().filter(|r| r.check == "equivalence") {
        ok &= eq.verdict == Verdict::PASS;
        parts.push(format!("{} {}", eq.surfaces[0].id, eq.notes));
    }
    let torus = |check: &str| results.iter().find(|r| r.check == check && r.surfaces[0].id == "torus_control").unwrap();
    let (one, min) = (torus("pointwise_one_type"), torus("minimality"));
    ok &= one.verdict == Verdict::FAIL
        && min.verdict == Verdict::FAIL
        && min.max_residual > 0.1
        && one.max_residual > 0.01;
    parts.push(format!("torus max|H| {:.2}, residual {:.1}", min.max_residual, one.max_residual));
    outcome(ok, parts.join("; "))
}

fn criterion_7() -> Outcome {
    let start = Instant::now();
    let mut worst = (0.0f64, String::new());
    let mut ok = true;
    for e in list_entries() {
        let p = build(e.id, &Params::new()).unwrap();
        let pts = random_points(&p, &p.domain.shrunk(SHRINK), 100, DEFAULT_SEED);
        match agreement_at(&p, &pts, &[]) {
            Ok(a) => {
                ok &= a.points == 100 && a.max <= ORACLE_TOL;
                if a.max > worst.0 {
                    worst = (a.max, e.id.to_string());
                }
            }
            Err(err) => {
                ok = false;
                worst.1 = format!("{}: {err}", e.id);
            }
        }
    }
    let took = start.elapsed();
    outcome(
        ok && took < Duration::from_secs(60),
        format!("worst {:.1e} on {}, {:.1} s for 12 surfaces x 100 points", worst.0, worst.1, took.as_secs_f64()),
    )
}

fn criterion_8() -> Outcome {
    let mut ok = true;
    let mut parts = Vec::new();
    for (id, want) in [
        ("hel1", RuledType::M1plus),
        ("hel2s", RuledType::M1plus),
        ("hel2t", RuledType::M1minus),
        ("hel3", RuledType::M3plus),
    ] {
        let r = RuledSurface::from_catalog(id, &Params::new()).unwrap();
        let d = r.domain().shrunk(SHRINK);
        let got = classify_ruled(&r, &axis(d.s, 16, !d.s_periodic), CLASSIFY_TOL);
        ok &= got.as_ref().ok() == Some(&want);
        parts.push(format!("{id} {}", got.map(|t| t.to_string()).unwrap_or_else(|e| e.to_string())));
    }
    let r = RuledSurface::from_catalog("hel1", &Params::new()).unwrap();
    let d = r.domain().shrunk(SHRINK);
    let c = constancy_along_rulings(&r, Combo::new(0.0, 1.0, 0.0), &axis(d.t, 16, true), &axis(d.s, 16, false), 1e-10)
        .unwrap();
    ok &= c.holds && c.max_deviation <= 1e-10;
    parts.push(format!("hel1 H spread along rulings {:.1e}", c.max_deviation));
    outcome(ok, parts.join(", "))
}

fn criterion_9() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let run = |name: &str| {
        let path = dir.path().join(name);
        let o = Command::new(env!("CARGO_BIN_EXE_surfrev"))
            .args(["verify", "all", "--seed", "42", "--json"])
            .arg(&path)
            .env_remove("SURFREV_DEFAULT_TOL")
            .output()
            .unwrap();
        (o.status.code(), std::fs::read(&path).unwrap_or_default())
    };
    let (c1, a) = run("a.json");
    let (c2, b) = run("b.json");
    let ok = !a.is_empty() && a == b && c1 == c2 && c1 == Some(2);
    outcome(ok, format!("{} bytes, identical: {}, exit codes {c1:?} {c2:?}", a.len(), a == b))
}

#[test]
fn acceptance() {
    let criteria: [Criterion; 9] = [
        ("revolution 1st kind: 1-type with stated k, minimal", criterion_1),
        ("revolution 2nd kind: space-like and time-like", criterion_2),
        ("revolution 3rd kind (complexified)", criterion_3),
        ("Bour pairs: isometry and identity reparametrization", criterion_4),
        ("Enneper family", criterion_5),
        ("1-type iff minimal over the revolution suite", criterion_6),
        ("jet and finite-difference engines agree", criterion_7),
        ("ruled classification of the helicoids", criterion_8),
        ("byte-identical reports", criterion_9),
    ];
    let mut failed = Vec::new();
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        let line = format!("criterion {} {}: {name}: {}\n", i + 1, if o.ok { "PASS" } else { "FAIL" }, o.detail);
        // straight to the stream so the gate shows up without --nocapture
        let _ = std::io::stderr().write_all(line.as_bytes());
        if !o.ok {
            failed.push(i + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
