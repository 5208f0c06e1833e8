use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use surfrev_core::catalog::{build, closed_form_k, entry, list_entries, Params};
use surfrev_core::geometry::Domain;
use surfrev_core::oracle::{agreement_at, random_points};
use surfrev_core::report::{obj_mesh, sample_csv, ReportDocument};
use surfrev_core::verify::{
    exit_code, run_all, run_claim, Grid, RunConfig, DEFAULT_SEED, DEFAULT_TOL, ORACLE_TOL, SHRINK,
};
use surfrev_core::Error;

const USAGE: u8 = 3;
const TOL_ENV: &str = "SURFREV_DEFAULT_TOL";

#[derive(Parser)]
#[command(name = "surfrev", version, about = "Check minimal surfaces of revolution in Minkowski 3-space")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// List catalog surfaces.
    List,
    /// Show one catalog entry.
    Describe { id: String },
    /// Sample geometry on a grid and write CSV.
    Sample {
        id: String,
        #[arg(long, default_value = "")]
        params: String,
        /// lo:hi:n (default: the entry's domain, 32 samples)
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        /// Output file (stdout when absent).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run a claim (or `all`) and report verdicts.
    Verify {
        claim: String,
        #[arg(long, default_value = "")]
        params: String,
        /// NxM grid over each surface's domain.
        #[arg(long, default_value = "64x64")]
        grid: String,
        /// Tolerance (overrides SURFREV_DEFAULT_TOL).
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
        /// Write the JSON report here.
        #[arg(long)]
        json: Option<PathBuf>,
    },
    /// Export the sample grid as an OBJ mesh.
    Export {
        id: String,
        #[arg(long)]
        obj: PathBuf,
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, allow_hyphen_values = true)]
        s: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        t: Option<String>,
        /// Export real parts of a complex chart.
        #[arg(long)]
        real_part: bool,
    },
    /// Jet engine against finite differences at seeded random points.
    Oracle {
        id: String,
        #[arg(long, default_value = "")]
        params: String,
        #[arg(long, default_value_t = 100)]
        points: usize,
        #[arg(long, default_value_t = DEFAULT_SEED)]
        seed: u64,
    },
}

/// Error with the exit code it maps to.
struct Fail(u8, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::ConstraintViolation(_)
            | Error::InvalidInput(_)
            | Error::UnknownParameter { .. }
            | Error::UnknownSurface(_)
            | Error::InfeasibleDomain(_) => USAGE,
            _ => 1,
        };
        Fail(code, e.to_string())
    }
}

fn usage(msg: impl Into<String>) -> Fail {
    Fail(USAGE, msg.into())
}

/// `lo:hi:n`.
fn parse_range(text: &str) -> Result<((f64, f64), usize), Fail> {
    let bad = || usage(format!("range must look like lo:hi:n, got `{text}`"));
    let parts: Vec<&str> = text.split(':').collect();
    let [lo, hi, n] = parts[..] else { return Err(bad()) };
    let lo: f64 = lo.trim().parse().map_err(|_| bad())?;
    let hi: f64 = hi.trim().parse().map_err(|_| bad())?;
    let n: usize = n.trim().parse().map_err(|_| bad())?;
    if lo >= hi || lo.is_nan() || hi.is_nan() || n < 2 {
        return Err(usage(format!("range `{text}` needs lo < hi and n >= 2")));
    }
    Ok(((lo, hi), n))
}

fn sample_domain(dflt: &Domain, s: Option<&str>, t: Option<&str>) -> Result<(Domain, usize, usize), Fail> {
    let (srange, ns) = s.map(parse_range).transpose()?.unwrap_or((dflt.s, 32));
    let (trange, nt) = t.map(parse_range).transpose()?.unwrap_or((dflt.t, 32));
    Ok((Domain::new(srange, trange, dflt.s_periodic), ns, nt))
}

fn default_tol() -> Result<f64, Fail> {
    match std::env::var(TOL_ENV) {
        Ok(v) => v
            .trim()
            .parse::<f64>()
            .ok()
            .filter(|x| *x > 0.0)
            .ok_or_else(|| usage(format!("{TOL_ENV}=`{v}` is not a positive number"))),
        Err(_) => Ok(DEFAULT_TOL),
    }
}

fn write_out(path: Option<&PathBuf>, text: &str) -> Result<(), Fail> {
    match path {
        Some(p) => std::fs::write(p, text).map_err(|e| Fail(1, format!("cannot write {}: {e}", p.display()))),
        None => match std::io::stdout().write_all(text.as_bytes()) {
            // a closed pipe (e.g. `| head`) is a normal way to stop reading
            Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => Err(Fail(1, e.to_string())),
            _ => Ok(()),
        },
    }
}

fn describe(id: &str) -> Result<u8, Fail> {
    let e = entry(id)?;
    let p = build(id, &Params::new())?;
    let defaults = e.default_params();
    println!("{}: {}", e.id, e.name);
    println!("family: {:?}", e.family);
    println!("parameters: {defaults}");
    println!("constraint: {}", e.constraint);
    println!("normalization: {}", e.norm_mode);
    let d = p.domain;
    let close = if d.s_periodic { ")" } else { "]" };
    println!("domain: s in [{}, {}{close}, t in [{}, {}]", d.s.0, d.s.1, d.t.0, d.t.1);
    let (s0, t0) = e.reference.point;
    let n = e.reference.normal;
    println!("reference normal at ({s0}, {t0}): ({}, {}, {})", n[0], n[1], n[2]);
    if let Some(k) = closed_form_k(id, &defaults, t0) {
        println!("stated k at t = {t0}: {k}");
    }
    println!("asserted minimal with pointwise 1-type Gauss map: {}", e.asserted);
    Ok(0)
}

fn run(cli: Cli) -> Result<u8, Fail> {
    match cli.cmd {
        Cmd::List => {
            for e in list_entries() {
                println!("{:14} {}", e.id, e.name);
            }
            Ok(0)
        }
        Cmd::Describe { id } => describe(&id),
        Cmd::Sample { id, params, s, t, out } => {
            let p = build(&id, &Params::parse(&params)?)?;
            let (dom, ns, nt) = sample_domain(&p.domain, s.as_deref(), t.as_deref())?;
            write_out(out.as_ref(), &sample_csv(&p, &dom, ns, nt))?;
            Ok(0)
        }
        Cmd::Export { id, obj, params, s, t, real_part } => {
            let p = build(&id, &Params::parse(&params)?)?;
            let (dom, ns, nt) = sample_domain(&p.domain, s.as_deref(), t.as_deref())?;
            let mesh = obj_mesh(&p, &dom, ns, nt, real_part)?;
            write_out(Some(&obj), &mesh)?;
            Ok(0)
        }
        Cmd::Verify { claim, params, grid, tol, seed, json } => {
            let tol = match tol {
                Some(t) if t > 0.0 && t.is_finite() => t,
                Some(t) => return Err(usage(format!("--tol must be positive, got {t}"))),
                None => default_tol()?,
            };
            let cfg = RunConfig { grid: Grid::parse(&grid)?, tol, seed, params: Params::parse(&params)? };
            let results = if claim == "all" {
                if !cfg.params.is_empty() {
                    return Err(usage("--params cannot be combined with `all`"));
                }
                run_all(&cfg)?
            } else {
                run_claim(&claim, &cfg)?
            };
            for r in &results {
                let ids: Vec<&str> = r.surfaces.iter().map(|s| s.id.as_str()).collect();
                println!(
                    "{:8} {:7} {:20} {:28} residual {:.3e}  agreement {:.3e}  {}",
                    r.verdict.to_string(),
                    r.claim_id,
                    r.check,
                    ids.join(","),
                    r.max_residual,
                    r.engine_agreement,
                    r.notes
                );
            }
            if let Some(path) = json {
                let doc = ReportDocument::new(results.clone(), cfg.grid, cfg.tol, cfg.seed);
                write_out(Some(&path), &doc.to_json()?)?;
            }
            Ok(exit_code(&results) as u8)
        }
        Cmd::Oracle { id, params, points, seed } => {
            let p = build(&id, &Params::parse(&params)?)?;
            let pts = random_points(&p, &p.domain.shrunk(SHRINK), points, seed);
            let a = agreement_at(&p, &pts, &[])?;
            println!("{id}: {} points, seed {seed}", a.points);
            for (name, d) in &a.per_quantity {
                println!("  {name:6} {d:.3e}");
            }
            let ok = a.max <= ORACLE_TOL;
            let worst = a.worst.as_ref().map(|w| w.0.as_str()).unwrap_or("-");
            println!("max {:.3e} ({worst}) {}", a.max, if ok { "within" } else { "exceeds" });
            Ok(if ok { 0 } else { 1 })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { 0 });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(Fail(code, msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(code)
        }
    }
}
