//! Black-box tests of the command-line interface: exit codes, report
//! shapes, schema conformance, config-file precedence and the CSV side
//! files.

use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_csc-bundles"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}): {}",
            String::from_utf8_lossy(&out.stdout)
        )
    })
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

const WORKED: &[&str] = &[
    "verify",
    "--k1",
    "1",
    "--k2",
    "1",
    "--a1",
    "3.1622776601",
    "--a2",
    "3.1622776601",
    "--modulus-sq",
    "0.5",
    "--base-scal",
    "0",
];

#[test]
fn verify_worked_instance_passes() {
    let out = run(WORKED);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = stdout_json(&out);
    assert_eq!(report["schema"], "csc-bundles/1");
    assert_eq!(report["command"], "verify");
    assert_eq!(report["pass"], true);
    let r = report["results"]["R"].as_f64().unwrap();
    assert!((r - (-4.242640687)).abs() < 1e-6, "R = {r}");
    assert!(report["results"]["max_residual"].as_f64().unwrap() < 1e-8);
}

#[test]
fn verify_flat_branch_recovers_the_round_sphere() {
    let out = run(&[
        "verify", "--k1", "1", "--k2", "1", "--a1", "0", "--a2", "0", "--gamma", "1",
    ]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["results"]["branch"], "flat");
    let r = report["results"]["R"].as_f64().unwrap();
    assert!((r - 6.0).abs() < 1e-12, "R = {r}");
}

#[test]
fn verify_rejects_inadmissible_modulus() {
    // a2 > a1 admits only modulus^2 above 1 - a1^2/a2^2 = 0.75.
    let out = run(&[
        "verify",
        "--k1",
        "1",
        "--k2",
        "2",
        "--a1",
        "1",
        "--a2",
        "2",
        "--modulus-sq",
        "0.5",
    ]);
    assert_eq!(code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("inadmissible modulus"), "stderr: {stderr}");
}

#[test]
fn verify_signals_tolerance_failure_with_exit_one() {
    let mut args: Vec<&str> = WORKED.to_vec();
    args.extend_from_slice(&["--tol-residual", "1e-20"]);
    let out = run(&args);
    assert_eq!(code(&out), 1);
    let report = stdout_json(&out);
    assert_eq!(report["pass"], false);
}

#[test]
fn unknown_flags_exit_two() {
    let out = run(&["verify", "--definitely-not-a-flag", "1"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn config_file_overrides_flags() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.conf");
    std::fs::write(&config, "# pinned run\nmodulus-sq = 0.25\nseed = 11\n").unwrap();
    let mut args: Vec<&str> = WORKED.to_vec();
    let config_str = config.to_str().unwrap();
    args.extend_from_slice(&["--config", config_str]);
    let out = run(&args);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["params"]["modulus_sq"].as_f64().unwrap(), 0.25);
    assert_eq!(report["params"]["seed"].as_u64().unwrap(), 11);

    std::fs::write(&config, "not-a-key = 3\n").unwrap();
    let out = run(&args);
    assert_eq!(code(&out), 2);
    assert!(String::from_utf8_lossy(&out.stderr).contains("unknown key"));
}

#[test]
fn verify_csv_format_writes_a_series_file() {
    let dir = tempfile::tempdir().unwrap();
    let report_path = dir.path().join("report.json");
    let mut args: Vec<&str> = WORKED.to_vec();
    let path_str = report_path.to_str().unwrap();
    args.extend_from_slice(&["--format", "csv", "--out", path_str, "--grid", "40"]);
    let out = run(&args);
    assert_eq!(code(&out), 0);
    assert!(report_path.exists());
    let series = std::fs::read_to_string(dir.path().join("report.series.csv")).unwrap();
    let mut lines = series.lines();
    assert_eq!(lines.next(), Some("t,scal"));
    assert_eq!(lines.count(), 40);
}

fn family_files(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.starts_with("family-"))
        .collect();
    names.sort();
    names
}

#[test]
fn families_emits_one_table_per_family() {
    let dir = tempfile::tempdir().unwrap();
    let dir_str = dir.path().to_str().unwrap().to_string();
    let out = run(&[
        "families", "--k1", "1", "--k2", "2", "--a1", "2", "--a2", "1", "--points", "12", "--out",
        &dir_str,
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let files = family_files(dir.path());
    assert_eq!(files.len(), 2, "{files:?}");
    let summary = stdout_json(&out);
    assert_eq!(summary["results"]["family_count"].as_u64(), Some(2));

    for file in &files {
        let table = std::fs::read_to_string(dir.path().join(file)).unwrap();
        let mut lines = table.lines();
        assert_eq!(lines.next(), Some("branch,k,gamma,T,R,residual"));
        assert_eq!(lines.count(), 12);
    }
    assert!(dir.path().join("summary.json").exists());
}

#[test]
fn families_with_flat_connections_yield_a_single_zero_modulus_table() {
    let dir = tempfile::tempdir().unwrap();
    let dir_str = dir.path().to_str().unwrap().to_string();
    let out = run(&[
        "families", "--k1", "1", "--k2", "2", "--a1", "0", "--a2", "0", "--points", "6", "--out",
        &dir_str,
    ]);
    assert_eq!(code(&out), 0);
    let files = family_files(dir.path());
    assert_eq!(files.len(), 1, "{files:?}");
    let table = std::fs::read_to_string(dir.path().join(&files[0])).unwrap();
    for line in table.lines().skip(1) {
        let k: f64 = line.split(',').nth(1).unwrap().parse().unwrap();
        assert_eq!(k, 0.0, "row: {line}");
    }
}

#[test]
fn families_scal_increases_toward_the_degenerate_modulus() {
    let dir = tempfile::tempdir().unwrap();
    let dir_str = dir.path().to_str().unwrap().to_string();
    let out = run(&[
        "families", "--k1", "1", "--k2", "3", "--a1", "1", "--a2", "1", "--points", "24", "--out",
        &dir_str,
    ]);
    assert_eq!(code(&out), 0);
    let summary = stdout_json(&out);
    let elliptic = summary["results"]["families"]
        .as_array()
        .unwrap()
        .iter()
        .find(|f| f["parameterized_by"] == "modulus")
        .expect("one elliptic family");
    let table =
        std::fs::read_to_string(dir.path().join(elliptic["file"].as_str().unwrap())).unwrap();
    // Rows are sorted by increasing modulus; the tail of the R column must
    // climb monotonically toward the k -> 1 end.
    let scal: Vec<f64> = table
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(4).unwrap().parse().unwrap())
        .collect();
    assert_eq!(scal.len(), 24);
    for pair in scal[scal.len() - 10..].windows(2) {
        assert!(pair[1] > pair[0], "R column not increasing: {pair:?}");
    }
}

#[test]
fn count_bundle_form_reports_multiplicity() {
    let out = run(&[
        "count", "--m", "2", "--k", "3", "--a", "0", "--r", "2", "--l", "1",
    ]);
    assert_eq!(
        code(&out),
        0,
        "stderr: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    let report = stdout_json(&out);
    let results = &report["results"];
    assert_eq!(results["problem"]["n"].as_u64(), Some(5));
    assert_eq!(results["problem"]["d"].as_u64(), Some(3));
    assert!((results["problem"]["R"].as_f64().unwrap() - 3.5).abs() < 1e-12);
    assert!(results["count"].as_u64().unwrap() >= 2);
    assert_eq!(results["guaranteed_lower_bound"].as_u64(), Some(2));
    assert_eq!(results["multiplicity_holds"], true);
    assert_eq!(report["pass"], true);
    for sol in results["solutions"].as_array().unwrap() {
        assert!(sol["boundary_residual"].as_f64().unwrap() < 1e-7);
    }
}

#[test]
fn count_direct_form_in_the_uniqueness_regime() {
    let out = run(&["count", "--d", "1", "--n", "3", "--R", "1.9", "--r", "1"]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    assert_eq!(report["results"]["count"].as_u64(), Some(1));
    assert_eq!(report["results"]["uniqueness_regime"], true);
    assert_eq!(report["results"]["solutions"][0]["is_constant"], true);
}

#[test]
fn count_rejects_non_positive_curvature() {
    let out = run(&["count", "--d", "1", "--n", "3", "--R", "-1", "--r", "1"]);
    assert_eq!(code(&out), 2);
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(
        stderr.contains("only constant solutions"),
        "stderr: {stderr}"
    );
}

#[test]
fn thresholds_reports_margins() {
    let out = run(&["thresholds", "--m", "2", "--k", "3", "--r", "1", "--a", "0"]);
    assert_eq!(code(&out), 0);
    let report = stdout_json(&out);
    let first = &report["results"]["product"]["checks"][0];
    assert_eq!(first["id"], "product-1");
    assert_eq!(first["holds"], true);
    assert!((first["margin"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!(report["results"]["bundle"].is_object());

    let out = run(&["thresholds", "--m", "2", "--k", "3", "--r", "2", "--l", "1"]);
    let report = stdout_json(&out);
    let third = &report["results"]["product"]["checks"][2];
    assert_eq!(third["id"], "product-3");
    assert_eq!(third["holds"], true);
    assert!((third["margin"].as_f64().unwrap() - 2.0).abs() < 1e-12);
    assert!(report["results"]["bundle"].is_null());
    assert_eq!(report["results"]["spectral"]["multiplicity_holds"], true);
}

#[test]
fn thresholds_csv_format_writes_a_predicate_table() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("thr.json");
    let path_str = path.to_str().unwrap();
    let out = run(&[
        "thresholds",
        "--m",
        "2",
        "--k",
        "3",
        "--r",
        "1",
        "--a",
        "0.5",
        "--format",
        "csv",
        "--out",
        path_str,
    ]);
    assert_eq!(code(&out), 0);
    let table = std::fs::read_to_string(dir.path().join("thr.predicates.csv")).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("id,holds,lhs,rhs,margin"));
    assert_eq!(lines.count(), 7, "four product and three bundle predicates");
}

#[test]
fn reports_validate_against_the_committed_schema() {
    let schema_text = std::fs::read_to_string(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/schemas/csc-bundles-v1.schema.json"
    ))
    .unwrap();
    let schema: Value = serde_json::from_str(&schema_text).unwrap();
    let validator = jsonschema::validator_for(&schema).expect("schema compiles");

    let dir = tempfile::tempdir().unwrap();
    let dir_str = dir.path().to_str().unwrap().to_string();
    let outputs = [
        run(WORKED),
        run(&[
            "families", "--k1", "1", "--k2", "1", "--a1", "1", "--a2", "1", "--points", "6",
            "--out", &dir_str,
        ]),
        run(&["count", "--d", "1", "--n", "3", "--R", "1.9", "--r", "1"]),
        run(&["thresholds", "--m", "2", "--k", "3", "--r", "1"]),
    ];
    for out in &outputs {
        assert_eq!(
            code(out),
            0,
            "stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        let report = stdout_json(out);
        let errors: Vec<String> = validator
            .iter_errors(&report)
            .map(|e| e.to_string())
            .collect();
        assert!(errors.is_empty(), "schema violations: {errors:?}");
    }
}

#[test]
fn reports_are_deterministic() {
    let first = run(WORKED);
    let second = run(WORKED);
    assert_eq!(first.stdout, second.stdout);
    assert!(!first.stdout.is_empty());
}
