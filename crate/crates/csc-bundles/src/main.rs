//! Command-line front end: reproducible verification runs, family tables,
//! threshold predicates and radial solution counts, all emitted as
//! versioned JSON (plus CSV series files where tabular data is natural).
//!
//! Exit codes: 0 all checks passed, 1 a tolerance check failed, 2 invalid
//! input. A `--config key=value` file overrides command-line flags, so a
//! recorded run can be replayed exactly even on top of a different command
//! line.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use csc_bundles::curvature::{check_boundary, scal_join_total, BaseGeometry};
use csc_bundles::elliptic::Modulus;
use csc_bundles::join::{
    build_profiles, conservation_residuals, family_scan, qe_residual, verify_residual,
    FamilySamples, JoinParams, WarpSolution,
};
use csc_bundles::report::{fmt_f64, Report};
use csc_bundles::yamabe::{
    bundle_thresholds, count_radial_solutions, guaranteed_lower_bound, multiplicity_predicate,
    product_thresholds, uniqueness_predicate, ShootingConfig, ThresholdReport, YamabeProblem,
};

#[derive(Parser)]
#[command(
    name = "csc-bundles",
    version,
    about = "Constant scalar curvature metrics on sphere bundles: \
             construction, verification and solution counting"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Solve one family point and verify it against the curvature functional
    Verify(Box<VerifyArgs>),
    /// Sample every solution family and write per-family CSV tables
    Families(Box<FamiliesArgs>),
    /// Count positive radial solutions of the subcritical equation
    Count(Box<CountArgs>),
    /// Evaluate the eigenvalue threshold predicates
    Thresholds(Box<ThresholdsArgs>),
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Cmd::Verify(a) => cmd_verify(*a),
        Cmd::Families(a) => cmd_families(*a),
        Cmd::Count(a) => cmd_count(*a),
        Cmd::Thresholds(a) => cmd_thresholds(*a),
    };
    match outcome {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

type CliResult = Result<bool, String>;

fn lib_err(e: csc_bundles::Error) -> String {
    e.to_string()
}

// ---------------------------------------------------------------------------
// config files

/// Apply a flat key=value file on top of parsed flags. Later entries win;
/// the file as a whole wins over the command line.
fn load_config(
    path: &Path,
    mut apply: impl FnMut(&str, &str) -> Result<(), String>,
) -> Result<(), String> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| format!("config line {}: expected key=value", lineno + 1))?;
        apply(key.trim(), value.trim()).map_err(|e| format!("config line {}: {e}", lineno + 1))?;
    }
    Ok(())
}

fn parse_into<T: std::str::FromStr>(
    slot: &mut Option<T>,
    key: &str,
    value: &str,
) -> Result<(), String> {
    match value.parse::<T>() {
        Ok(v) => {
            *slot = Some(v);
            Ok(())
        }
        Err(_) => Err(format!("invalid value {value:?} for {key}")),
    }
}

fn write_output(out: Option<&Path>, text: &str) -> Result<(), String> {
    match out {
        Some(path) => {
            std::fs::write(path, text).map_err(|e| format!("cannot write {}: {e}", path.display()))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn check_format(format: &str) -> Result<(), String> {
    match format {
        "json" | "csv" => Ok(()),
        other => Err(format!("unknown format {other:?}; use json or csv")),
    }
}

// ---------------------------------------------------------------------------
// verify

#[derive(Args, Default)]
struct VerifyArgs {
    #[arg(long)]
    k1: Option<u32>,
    #[arg(long)]
    k2: Option<u32>,
    #[arg(long)]
    a1: Option<f64>,
    #[arg(long)]
    a2: Option<f64>,
    /// Scalar curvature of the base (default 0)
    #[arg(long = "base-scal", allow_negative_numbers = true)]
    base_scal: Option<f64>,
    /// Dimension of the base (default 2; enters only validation)
    #[arg(long = "base-dim")]
    base_dim: Option<u32>,
    /// Squared elliptic modulus selecting a point on an elliptic branch
    #[arg(long = "modulus-sq")]
    modulus_sq: Option<f64>,
    /// Profile frequency selecting a point on a flat branch (k = 0)
    #[arg(long)]
    gamma: Option<f64>,
    /// Number of verification grid points (default 500)
    #[arg(long)]
    grid: Option<usize>,
    /// Seed for the randomized sample grid (default 0)
    #[arg(long)]
    seed: Option<u64>,
    /// json (default) or csv; csv additionally writes a (t, scal) series file
    #[arg(long)]
    format: Option<String>,
    /// Report path (stdout when omitted)
    #[arg(long)]
    out: Option<PathBuf>,
    /// key=value file overriding the flags above
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "tol-residual")]
    tol_residual: Option<f64>,
    #[arg(long = "tol-boundary")]
    tol_boundary: Option<f64>,
    #[arg(long = "tol-conservation")]
    tol_conservation: Option<f64>,
    #[arg(long = "tol-qe")]
    tol_qe: Option<f64>,
}

impl VerifyArgs {
    fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "k1" => parse_into(&mut self.k1, key, value),
            "k2" => parse_into(&mut self.k2, key, value),
            "a1" => parse_into(&mut self.a1, key, value),
            "a2" => parse_into(&mut self.a2, key, value),
            "base-scal" => parse_into(&mut self.base_scal, key, value),
            "base-dim" => parse_into(&mut self.base_dim, key, value),
            "modulus-sq" => parse_into(&mut self.modulus_sq, key, value),
            "gamma" => parse_into(&mut self.gamma, key, value),
            "grid" => parse_into(&mut self.grid, key, value),
            "seed" => parse_into(&mut self.seed, key, value),
            "format" => parse_into(&mut self.format, key, value),
            "out" => parse_into(&mut self.out, key, value),
            "tol-residual" => parse_into(&mut self.tol_residual, key, value),
            "tol-boundary" => parse_into(&mut self.tol_boundary, key, value),
            "tol-conservation" => parse_into(&mut self.tol_conservation, key, value),
            "tol-qe" => parse_into(&mut self.tol_qe, key, value),
            other => Err(format!("unknown key {other:?}")),
        }
    }
}

fn cmd_verify(mut a: VerifyArgs) -> CliResult {
    if let Some(path) = a.config.take() {
        load_config(&path, |k, v| a.apply(k, v))?;
    }
    let k1 = a.k1.ok_or("missing --k1")?;
    let k2 = a.k2.ok_or("missing --k2")?;
    let a1 = a.a1.ok_or("missing --a1")?;
    let a2 = a.a2.ok_or("missing --a2")?;
    let base_scal = a.base_scal.unwrap_or(0.0);
    let base_dim = a.base_dim.unwrap_or(2);
    let grid = a.grid.unwrap_or(500);
    let seed = a.seed.unwrap_or(0);
    let format = a.format.unwrap_or_else(|| "json".into());
    check_format(&format)?;
    if grid < 2 {
        return Err("--grid must be at least 2".into());
    }
    let tol_residual = a.tol_residual.unwrap_or(1e-8);
    let tol_boundary = a.tol_boundary.unwrap_or(1e-10);
    let tol_conservation = a.tol_conservation.unwrap_or(1e-11);
    let tol_qe = a.tol_qe.unwrap_or(1e-10);

    let base = BaseGeometry::new(base_dim, base_scal).map_err(lib_err)?;
    let params = JoinParams::new(base, k1, k2, a1, a2).map_err(lib_err)?;
    let sol = match (a.modulus_sq, a.gamma) {
        (Some(m_sq), None) => {
            let k = Modulus::from_sq(m_sq).map_err(lib_err)?;
            WarpSolution::elliptic(&params, k).map_err(lib_err)?
        }
        (None, Some(g)) => WarpSolution::flat(&params, g).map_err(lib_err)?,
        _ => {
            return Err(
                "pass exactly one of --modulus-sq (elliptic branch) or --gamma (flat branch)"
                    .into(),
            )
        }
    };

    let profiles = build_profiles(&sol);
    let consts =
        csc_bundles::curvature::SubmersionConstants::new(k1, k2, a1, a2).map_err(lib_err)?;
    let lo = sol.span / 100.0;
    let hi = sol.span - lo;

    // Deterministic uniform grid plus a seeded random grid of equal size.
    let uniform = verify_residual(&params, &sol, grid).map_err(lib_err)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seeded = 0.0f64;
    for _ in 0..grid {
        let u = (rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        let t = lo + u * (hi - lo);
        let value = scal_join_total(&base, &consts, &profiles, t).map_err(lib_err)?;
        seeded = seeded.max((value - sol.scal_total).abs());
    }
    let max_residual = uniform.max(seeded);

    let boundary = check_boundary(&profiles, 2, tol_boundary).map_err(lib_err)?;
    let (cons_metric, cons_deriv) = conservation_residuals(&sol, grid).map_err(lib_err)?;
    let qe = qe_residual(&params, sol.modulus, sol.gamma);

    let pass = max_residual < tol_residual
        && boundary.pass()
        && cons_metric < tol_conservation
        && cons_deriv < tol_conservation
        && qe < tol_qe;

    let boundary_json: Vec<Value> = boundary
        .checks
        .iter()
        .map(|c| {
            json!({
                "label": c.label,
                "order": c.order,
                "value": c.value,
                "residual": c.residual,
                "pass": c.pass,
            })
        })
        .collect();

    let mut report = Report::new("verify");
    report
        .param("k1", k1)
        .param("k2", k2)
        .param("a1", a1)
        .param("a2", a2)
        .param("base_scal", base_scal)
        .param("base_dim", base_dim)
        .param("grid", grid as u64)
        .param("seed", seed);
    match (a.modulus_sq, a.gamma) {
        (Some(m_sq), _) => report.param("modulus_sq", m_sq),
        (_, Some(g)) => report.param("gamma", g),
        _ => unreachable!(),
    };
    report
        .tolerance("residual", tol_residual)
        .tolerance("boundary", tol_boundary)
        .tolerance("conservation", tol_conservation)
        .tolerance("qe", tol_qe);
    report.results = json!({
        "branch": sol.branch.label(),
        "gamma": sol.gamma,
        "modulus_sq": sol.modulus.sq(),
        "T": sol.span,
        "R": sol.scal_total,
        "max_residual": max_residual,
        "qe_residual": qe,
        "conservation_metric": cons_metric,
        "conservation_derivative": cons_deriv,
        "boundary_max_residual": boundary.max_residual(),
        "boundary_residuals": boundary_json,
    });
    report.pass = pass;

    write_output(a.out.as_deref(), &report.to_json())?;
    if format == "csv" {
        if let Some(out) = &a.out {
            let mut csv = String::from("t,scal\n");
            let step = (hi - lo) / (grid - 1) as f64;
            for i in 0..grid {
                let t = lo + step * i as f64;
                let value = scal_join_total(&base, &consts, &profiles, t).map_err(lib_err)?;
                let _ = writeln!(csv, "{},{}", fmt_f64(t), fmt_f64(value));
            }
            let series = out.with_extension("series.csv");
            std::fs::write(&series, csv)
                .map_err(|e| format!("cannot write {}: {e}", series.display()))?;
        }
    }
    Ok(pass)
}

// ---------------------------------------------------------------------------
// families

#[derive(Args, Default)]
struct FamiliesArgs {
    #[arg(long)]
    k1: Option<u32>,
    #[arg(long)]
    k2: Option<u32>,
    #[arg(long)]
    a1: Option<f64>,
    #[arg(long)]
    a2: Option<f64>,
    #[arg(long = "base-scal", allow_negative_numbers = true)]
    base_scal: Option<f64>,
    #[arg(long = "base-dim")]
    base_dim: Option<u32>,
    /// Samples per family (default 64)
    #[arg(long)]
    points: Option<usize>,
    /// Output directory for the CSV tables and summary.json (default .)
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "tol-residual")]
    tol_residual: Option<f64>,
    #[arg(long = "tol-qe")]
    tol_qe: Option<f64>,
}

impl FamiliesArgs {
    fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "k1" => parse_into(&mut self.k1, key, value),
            "k2" => parse_into(&mut self.k2, key, value),
            "a1" => parse_into(&mut self.a1, key, value),
            "a2" => parse_into(&mut self.a2, key, value),
            "base-scal" => parse_into(&mut self.base_scal, key, value),
            "base-dim" => parse_into(&mut self.base_dim, key, value),
            "points" => parse_into(&mut self.points, key, value),
            "out" => parse_into(&mut self.out, key, value),
            "tol-residual" => parse_into(&mut self.tol_residual, key, value),
            "tol-qe" => parse_into(&mut self.tol_qe, key, value),
            other => Err(format!("unknown key {other:?}")),
        }
    }
}

fn family_file_name(index: usize, fam: &FamilySamples) -> String {
    let suffix = if fam.family.interchanged {
        "-interchanged"
    } else {
        ""
    };
    format!("family-{index}-{}{suffix}.csv", fam.family.branch.label())
}

fn cmd_families(mut a: FamiliesArgs) -> CliResult {
    if let Some(path) = a.config.take() {
        load_config(&path, |k, v| a.apply(k, v))?;
    }
    let k1 = a.k1.ok_or("missing --k1")?;
    let k2 = a.k2.ok_or("missing --k2")?;
    let a1 = a.a1.ok_or("missing --a1")?;
    let a2 = a.a2.ok_or("missing --a2")?;
    let base_scal = a.base_scal.unwrap_or(0.0);
    let base_dim = a.base_dim.unwrap_or(2);
    let points = a.points.unwrap_or(64);
    let out_dir = a.out.unwrap_or_else(|| PathBuf::from("."));
    let tol_residual = a.tol_residual.unwrap_or(1e-8);
    let tol_qe = a.tol_qe.unwrap_or(1e-10);

    let base = BaseGeometry::new(base_dim, base_scal).map_err(lib_err)?;
    let params = JoinParams::new(base, k1, k2, a1, a2).map_err(lib_err)?;
    let scan = family_scan(&params, points).map_err(lib_err)?;

    std::fs::create_dir_all(&out_dir)
        .map_err(|e| format!("cannot create {}: {e}", out_dir.display()))?;

    let mut pass = true;
    let mut families_json = Vec::new();
    for (index, fam) in scan.iter().enumerate() {
        let oriented = if fam.family.interchanged {
            params.interchanged()
        } else {
            params
        };
        let mut csv = String::from("branch,k,gamma,T,R,residual\n");
        let mut max_residual = 0.0f64;
        let mut max_qe = 0.0f64;
        for sol in &fam.solutions {
            let residual = verify_residual(&oriented, sol, 120).map_err(lib_err)?;
            max_residual = max_residual.max(residual);
            max_qe = max_qe.max(qe_residual(&oriented, sol.modulus, sol.gamma));
            let _ = writeln!(
                csv,
                "{},{},{},{},{},{}",
                sol.branch.label(),
                fmt_f64(sol.modulus.get()),
                fmt_f64(sol.gamma),
                fmt_f64(sol.span),
                fmt_f64(sol.scal_total),
                fmt_f64(residual),
            );
        }
        pass = pass && max_residual < tol_residual && max_qe < tol_qe;
        let file = family_file_name(index, fam);
        std::fs::write(out_dir.join(&file), csv)
            .map_err(|e| format!("cannot write {file}: {e}"))?;
        let first = fam.solutions.first().expect("scan samples are non-empty");
        let last = fam.solutions.last().expect("scan samples are non-empty");
        families_json.push(json!({
            "index": index,
            "branch": fam.family.branch.label(),
            "interchanged": fam.family.interchanged,
            "parameterized_by": if fam.family.branch.is_flat() { "gamma" } else { "modulus" },
            "rows": fam.solutions.len(),
            "file": file,
            "max_residual": max_residual,
            "max_qe_residual": max_qe,
            "scal_first": first.scal_total,
            "scal_last": last.scal_total,
        }));
    }

    let mut report = Report::new("families");
    report
        .param("k1", k1)
        .param("k2", k2)
        .param("a1", a1)
        .param("a2", a2)
        .param("base_scal", base_scal)
        .param("base_dim", base_dim)
        .param("points", points as u64);
    report
        .tolerance("residual", tol_residual)
        .tolerance("qe", tol_qe);
    report.results = json!({
        "family_count": scan.len(),
        "families": families_json,
    });
    report.pass = pass;

    let text = report.to_json();
    std::fs::write(out_dir.join("summary.json"), &text)
        .map_err(|e| format!("cannot write summary.json: {e}"))?;
    print!("{text}");
    Ok(pass)
}

// ---------------------------------------------------------------------------
// count

#[derive(Args, Default)]
struct CountArgs {
    /// Total dimension N of the subcritical equation
    #[arg(long)]
    n: Option<u32>,
    /// Target constant scalar curvature
    #[arg(long = "R", allow_negative_numbers = true)]
    scal: Option<f64>,
    /// Dimension of the sphere carrying the conformal factor
    #[arg(long)]
    d: Option<u32>,
    /// Sphere radius
    #[arg(long)]
    r: Option<f64>,
    /// Base dimension of the bundle form (N = m + k, d = k)
    #[arg(long)]
    m: Option<u32>,
    /// Fiber dimension of the bundle form
    #[arg(long)]
    k: Option<u32>,
    /// Connection norm of the bundle form
    #[arg(long)]
    a: Option<f64>,
    /// Eigenvalue index for the reported multiplicity predicate (default 1)
    #[arg(long)]
    l: Option<u32>,
    #[arg(long = "alpha-min")]
    alpha_min: Option<f64>,
    #[arg(long = "alpha-max")]
    alpha_max: Option<f64>,
    #[arg(long = "n-scan")]
    n_scan: Option<usize>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long = "tol-match")]
    tol_match: Option<f64>,
}

impl CountArgs {
    fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "n" => parse_into(&mut self.n, key, value),
            "R" => parse_into(&mut self.scal, key, value),
            "d" => parse_into(&mut self.d, key, value),
            "r" => parse_into(&mut self.r, key, value),
            "m" => parse_into(&mut self.m, key, value),
            "k" => parse_into(&mut self.k, key, value),
            "a" => parse_into(&mut self.a, key, value),
            "l" => parse_into(&mut self.l, key, value),
            "alpha-min" => parse_into(&mut self.alpha_min, key, value),
            "alpha-max" => parse_into(&mut self.alpha_max, key, value),
            "n-scan" => parse_into(&mut self.n_scan, key, value),
            "out" => parse_into(&mut self.out, key, value),
            "tol-match" => parse_into(&mut self.tol_match, key, value),
            other => Err(format!("unknown key {other:?}")),
        }
    }
}

fn cmd_count(mut a: CountArgs) -> CliResult {
    if let Some(path) = a.config.take() {
        load_config(&path, |k, v| a.apply(k, v))?;
    }
    let r = a.r.ok_or("missing --r")?;
    let bundle_form = a.m.is_some() || a.k.is_some() || a.a.is_some();
    let (n, scal, d) = if bundle_form {
        if a.n.is_some() || a.d.is_some() || a.scal.is_some() {
            return Err("pass either --n/--R/--d or the bundle form --m/--k/--a, not both".into());
        }
        let m = a.m.ok_or("missing --m")?;
        let k = a.k.ok_or("missing --k")?;
        let conn = a.a.ok_or("missing --a")?;
        let (mf, kf) = (m as f64, k as f64);
        let scal = mf * (mf - 1.0) + kf * (kf - 1.0) / (r * r) - conn * conn * r * r;
        (m + k, scal, k)
    } else {
        (
            a.n.ok_or("missing --n")?,
            a.scal.ok_or("missing --R")?,
            a.d.ok_or("missing --d")?,
        )
    };
    if scal <= 0.0 {
        return Err(format!(
            "only constant solutions exist when the scalar curvature is non-positive (R = {scal})"
        ));
    }
    let l = a.l.unwrap_or(1);
    let tol_match = a.tol_match.unwrap_or(1e-9);
    let cfg = ShootingConfig {
        alpha_min: a.alpha_min.unwrap_or(0.05),
        alpha_max: a.alpha_max.unwrap_or(5.0),
        n_scan: a.n_scan.unwrap_or(400),
        match_tol: tol_match,
        ..ShootingConfig::default()
    };

    let prob = YamabeProblem::new(n, scal, d, r).map_err(lib_err)?;
    let report_data = count_radial_solutions(&prob, &cfg).map_err(lib_err)?;

    let solutions: Vec<Value> = report_data
        .solutions
        .iter()
        .map(|s| {
            json!({
                "alpha": s.alpha,
                "boundary_residual": s.boundary_residual,
                "end_value": s.end_value,
                "is_constant": s.is_constant,
            })
        })
        .collect();

    let pass = report_data.count >= report_data.guaranteed_lower_bound as usize;

    let mut report = Report::new("count");
    report
        .param("n", n)
        .param("R", scal)
        .param("d", d)
        .param("r", r)
        .param("l", l)
        .param("alpha_min", cfg.alpha_min)
        .param("alpha_max", cfg.alpha_max)
        .param("n_scan", cfg.n_scan as u64);
    if bundle_form {
        report
            .param("m", a.m.unwrap())
            .param("k", a.k.unwrap())
            .param("a", a.a.unwrap());
    }
    report
        .tolerance("match", tol_match)
        .tolerance("residual_cap", cfg.residual_cap);
    report.results = json!({
        "problem": { "n": n, "R": scal, "d": d, "r": r },
        "count": report_data.count,
        "reflection_collapsed_count": report_data.reflection_collapsed_count,
        "guaranteed_lower_bound": report_data.guaranteed_lower_bound,
        "uniqueness_regime": uniqueness_predicate(&prob),
        "multiplicity_l": l,
        "multiplicity_holds": multiplicity_predicate(&prob, l).map_err(lib_err)?,
        "excluded_count": report_data.excluded.len(),
        "solutions": solutions,
    });
    report.pass = pass;

    write_output(a.out.as_deref(), &report.to_json())?;
    Ok(pass)
}

// ---------------------------------------------------------------------------
// thresholds

#[derive(Args, Default)]
struct ThresholdsArgs {
    #[arg(long)]
    m: Option<u32>,
    #[arg(long)]
    k: Option<u32>,
    #[arg(long)]
    r: Option<f64>,
    /// Connection norm; when present the bundle predicates are also emitted
    #[arg(long)]
    a: Option<f64>,
    #[arg(long)]
    l: Option<u32>,
    /// json (default) or csv; csv additionally writes a predicate table
    #[arg(long)]
    format: Option<String>,
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    config: Option<PathBuf>,
}

impl ThresholdsArgs {
    fn apply(&mut self, key: &str, value: &str) -> Result<(), String> {
        match key {
            "m" => parse_into(&mut self.m, key, value),
            "k" => parse_into(&mut self.k, key, value),
            "r" => parse_into(&mut self.r, key, value),
            "a" => parse_into(&mut self.a, key, value),
            "l" => parse_into(&mut self.l, key, value),
            "format" => parse_into(&mut self.format, key, value),
            "out" => parse_into(&mut self.out, key, value),
            other => Err(format!("unknown key {other:?}")),
        }
    }
}

fn checks_json(rep: &ThresholdReport) -> Value {
    let checks: Vec<Value> = rep
        .checks
        .iter()
        .map(|c| {
            json!({
                "id": c.id,
                "holds": c.holds,
                "lhs": c.lhs,
                "rhs": c.rhs,
                "margin": c.margin,
            })
        })
        .collect();
    json!({ "scal": rep.scal, "checks": checks })
}

fn cmd_thresholds(mut a: ThresholdsArgs) -> CliResult {
    if let Some(path) = a.config.take() {
        load_config(&path, |k, v| a.apply(k, v))?;
    }
    let m = a.m.ok_or("missing --m")?;
    let k = a.k.ok_or("missing --k")?;
    let r = a.r.ok_or("missing --r")?;
    let l = a.l.unwrap_or(1);
    let format = a.format.unwrap_or_else(|| "json".into());
    check_format(&format)?;

    let product = product_thresholds(m, k, r, l).map_err(lib_err)?;
    let bundle = match a.a {
        Some(conn) => Some(bundle_thresholds(m, k, conn, r, l).map_err(lib_err)?),
        None => None,
    };

    // Spectral view of the same data: the subcritical problem with the
    // conformal factor radial on the second sphere.
    let spectral = if product.scal > 0.0 {
        let prob = YamabeProblem::new(m + k, product.scal, k, r).map_err(lib_err)?;
        json!({
            "uniqueness_regime": uniqueness_predicate(&prob),
            "multiplicity_holds": multiplicity_predicate(&prob, l).map_err(lib_err)?,
            "guaranteed_lower_bound": guaranteed_lower_bound(&prob),
        })
    } else {
        Value::Null
    };

    let mut report = Report::new("thresholds");
    report
        .param("m", m)
        .param("k", k)
        .param("r", r)
        .param("l", l);
    if let Some(conn) = a.a {
        report.param("a", conn);
    }
    let mut results = json!({
        "product": checks_json(&product),
        "spectral": spectral,
    });
    if let Some(b) = &bundle {
        results["bundle"] = checks_json(b);
    }
    report.results = results;
    report.pass = true;

    write_output(a.out.as_deref(), &report.to_json())?;
    if format == "csv" {
        if let Some(out) = &a.out {
            let mut csv = String::from("id,holds,lhs,rhs,margin\n");
            for c in product
                .checks
                .iter()
                .chain(bundle.iter().flat_map(|b| b.checks.iter()))
            {
                let _ = writeln!(
                    csv,
                    "{},{},{},{},{}",
                    c.id,
                    c.holds,
                    fmt_f64(c.lhs),
                    fmt_f64(c.rhs),
                    fmt_f64(c.margin),
                );
            }
            let table = out.with_extension("predicates.csv");
            std::fs::write(&table, csv)
                .map_err(|e| format!("cannot write {}: {e}", table.display()))?;
        }
    }
    Ok(true)
}
