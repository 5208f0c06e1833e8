//! Browser bindings. Every function takes and returns plain strings; the
//! page parses the JSON.

use serde_json::{json, Value};
use surfrev_core::catalog::{build, list_entries, Params};
use surfrev_core::report::ReportDocument;
use surfrev_core::verify::{run_claim, Grid, RunConfig, DEFAULT_SEED, DEFAULT_TOL};
use wasm_bindgen::prelude::*;

fn c(z: surfrev_core::Scalar) -> Value {
    if z.im == 0.0 {
        json!(z.re)
    } else {
        json!([z.re, z.im])
    }
}

fn err(e: impl std::fmt::Display) -> String {
    json!({ "error": e.to_string() }).to_string()
}

/// `[{id, name, params}]`.
#[wasm_bindgen]
pub fn surfaces() -> String {
    let items: Vec<Value> = list_entries()
        .iter()
        .map(|e| json!({ "id": e.id, "name": e.name, "params": e.default_params().to_string() }))
        .collect();
    Value::Array(items).to_string()
}

/// Geometry of `id` at `(s, t)`. Complex values come out as `[re, im]`.
#[wasm_bindgen]
pub fn point(id: &str, params: &str, s: f64, t: f64) -> String {
    let run = || -> surfrev_core::Result<Value> {
        let p = build(id, &Params::parse(params)?)?;
        let g = p.geometry(s, t)?;
        let f = g.forms;
        Ok(json!({
            "id": id,
            "params": p.params.to_string(),
            "s": s,
            "t": t,
            "E": c(f.E), "F": c(f.F), "G": c(f.G),
            "e": c(f.e), "f": c(f.f), "g": c(f.g),
            "H": c(g.mean),
            "K": c(g.k_ext),
            "KII": g.k_ii.map(c),
            "k": c(g.k),
            "residual": g.residual,
            "epsilon": g.epsilon,
            "N": g.normal.into_array().map(c),
        }))
    };
    run().map(|v| v.to_string()).unwrap_or_else(err)
}

/// Report for one claim on an `n x n` grid.
#[wasm_bindgen]
pub fn verify(claim: &str, n: usize) -> String {
    let cfg =
        RunConfig { grid: Grid::new(n.max(2), n.max(2)), tol: DEFAULT_TOL, seed: DEFAULT_SEED, params: Params::new() };
    match run_claim(claim, &cfg) {
        Ok(r) => ReportDocument::new(r, cfg.grid, cfg.tol, cfg.seed).to_json().unwrap_or_else(err),
        Err(e) => err(e),
    }
}
