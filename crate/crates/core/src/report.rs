//! Machine-readable outputs: the JSON claim report, per-point CSV and OBJ
//! meshes.
//!
//! JSON objects come out key-sorted and every non-integer number is printed
//! with 17 significant digits, so equal inputs give byte-identical files.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::{Number, Value};

use crate::error::{Error, Result};
use crate::geometry::{Domain, PointGeometry, SurfacePatch};
use crate::lorentz::Scalar;
use crate::verify::{summarize, ClaimResult, Grid};

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

pub const CSV_HEADER: &str = "s,t,E,F,G,e,f,g,H,K,KII,k,residual,N1_re,N1_im,N2_re,N2_im,N3_re,N3_im";

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Environment {
    pub tolerances: BTreeMap<String, f64>,
    pub grid: Grid,
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ReportDocument {
    pub version: String,
    pub claims: Vec<ClaimResult>,
    pub environment: Environment,
    pub summary: BTreeMap<String, usize>,
}

impl ReportDocument {
    pub fn new(claims: Vec<ClaimResult>, grid: Grid, tol: f64, seed: u64) -> Self {
        let summary = summarize(&claims).into_iter().map(|(v, n)| (v.to_string(), n)).collect();
        let tolerances =
            BTreeMap::from([("claim".to_string(), tol), ("oracle".to_string(), crate::verify::ORACLE_TOL)]);
        ReportDocument {
            version: REPORT_VERSION.to_string(),
            claims,
            environment: Environment { tolerances, grid, seed },
            summary,
        }
    }

    /// Pretty JSON with sorted keys and fixed number formatting.
    pub fn to_json(&self) -> Result<String> {
        let v = serde_json::to_value(self).map_err(|e| Error::InvalidInput(e.to_string()))?;
        let mut out = serde_json::to_string_pretty(&normalize(v)).map_err(|e| Error::InvalidInput(e.to_string()))?;
        out.push('\n');
        Ok(out)
    }
}

/// `x` with 17 significant digits, e.g. `-3.1250000000000000e-2`.
pub fn fmt17(x: f64) -> String {
    format!("{x:.16e}")
}

fn normalize(v: Value) -> Value {
    match v {
        Value::Number(n) if n.is_f64() => match n.as_f64() {
            Some(x) if x.is_finite() => {
                Value::Number(fmt17(x).parse::<Number>().expect("formatted float is valid JSON"))
            }
            _ => Value::Null,
        },
        Value::Array(a) => Value::Array(a.into_iter().map(normalize).collect()),
        // the default map type is a BTreeMap, which keeps keys sorted
        Value::Object(m) => Value::Object(m.into_iter().map(|(k, v)| (k, normalize(v))).collect()),
        other => other,
    }
}

fn cell(z: Scalar) -> String {
    if z.im == 0.0 {
        fmt17(z.re)
    } else {
        let sign = if z.im.is_sign_negative() { '-' } else { '+' };
        format!("{}{sign}{}j", fmt17(z.re), fmt17(z.im.abs()))
    }
}

/// One CSV row; quantities that failed (excluded or degenerate points)
/// are left empty.
pub fn csv_row(s: f64, t: f64, g: Option<&PointGeometry>) -> String {
    let mut row = format!("{},{}", fmt17(s), fmt17(t));
    match g {
        Some(g) => {
            let f = &g.forms;
            for z in [f.E, f.F, f.G, f.e, f.f, f.g, g.mean, g.k_ext] {
                let _ = write!(row, ",{}", cell(z));
            }
            let _ = write!(row, ",{}", g.k_ii.map(cell).unwrap_or_default());
            let _ = write!(row, ",{},{}", cell(g.k), fmt17(g.residual));
            for c in g.normal.into_array() {
                let _ = write!(row, ",{},{}", fmt17(c.re), fmt17(c.im));
            }
        }
        None => row.push_str(&",".repeat(17)),
    }
    row
}

/// Sampled geometry on `domain` (row-major, `t` outer).
pub fn sample_csv(patch: &SurfacePatch, domain: &Domain, ns: usize, nt: usize) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for (s, t) in domain.grid(ns, nt) {
        let g = patch.geometry(s, t).ok();
        out.push_str(&csv_row(s, t, g.as_ref()));
        out.push('\n');
    }
    out
}

/// Wavefront OBJ of the sample grid with quad faces. Complex charts need
/// `real_part`, and then export the real parts of the components.
pub fn obj_mesh(patch: &SurfacePatch, domain: &Domain, ns: usize, nt: usize, real_part: bool) -> Result<String> {
    let pts = domain.grid(ns, nt);
    let mut verts = Vec::with_capacity(pts.len());
    let mut complex = false;
    for &(s, t) in &pts {
        let x = patch.position(s, t)?;
        complex |= x.max_abs_im() > 0.0;
        verts.push(x);
    }
    if complex && !real_part {
        return Err(Error::InvalidInput(format!(
            "{} has a complex chart; pass --real-part to export real parts",
            patch.label
        )));
    }
    let mut out = format!("# surfrev {} {}\n", patch.label, patch.params);
    if complex {
        out.push_str("# complex chart: vertices are the real parts of the components\n");
    }
    for x in &verts {
        let _ = writeln!(out, "v {} {} {}", fmt17(x.x1.re), fmt17(x.x2.re), fmt17(x.x3.re));
    }
    let wrap = domain.s_periodic;
    let cols = if wrap { ns } else { ns - 1 };
    for j in 0..nt.saturating_sub(1) {
        for i in 0..cols {
            let i1 = (i + 1) % ns;
            let idx = |i: usize, j: usize| j * ns + i + 1;
            let _ = writeln!(out, "f {} {} {} {}", idx(i, j), idx(i1, j), idx(i1, j + 1), idx(i, j + 1));
        }
    }
    Ok(out)
}
