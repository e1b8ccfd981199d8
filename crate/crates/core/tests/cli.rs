use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use sparse_source::export::read_field_csv;
use sparse_source::harness::read_results_csv;

fn cli(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sparse-source")).args(args).output().expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p.to_string_lossy().into_owned()
}

fn small_experiment(out: &Path, method: &str) -> String {
    format!(
        r#"{{"name": "{method}-small", "fine_n": 24, "coarse_n": 16, "half_width": 1.5, "receivers": 16,
            "phantom": {{"kind": "peaks", "amplitude": 4.0, "dirac_scaling": true, "center": [0.0, 0.0]}},
            "solver": {{"method": "{method}", "alpha": 1e-3, "alpha0": 1e-6}},
            "output_dir": "{}"}}"#,
        out.display()
    )
}

#[test]
fn phantom_writes_csv_and_pgm() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("g/strip");
    let o = cli(&["phantom", "--spec", r#"{"kind": "strip_diag"}"#, "--out", out.to_str().unwrap(), "--n", "32"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let field = read_field_csv(&out.with_extension("csv")).unwrap();
    assert_eq!(field.len(), 32 * 32);
    assert!(field.iter().any(|v| *v > 0.0));
    let pgm = fs::read(out.with_extension("pgm")).unwrap();
    assert!(pgm.starts_with(b"P5\n32 32\n255\n"));
}

#[test]
fn reconstruct_exports_results() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("run");
    let cfg = write_config(dir.path(), "alm.json", &small_experiment(&out, "alm"));
    let o = cli(&["reconstruct", "--config", &cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let json: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(json["method"], "ALM");
    assert!(json["n_error"].as_f64().unwrap().is_finite());
    for f in ["results.csv", "result.json", "diagnostics.jsonl", "mu_rec.csv", "mu_rec.pgm", "mu_exact.csv"] {
        assert!(out.join(f).is_file(), "missing {f}");
    }
    let rows = read_results_csv(&out.join("results.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!(rows[0].method, "ALM");
    assert_eq!(read_field_csv(&out.join("mu_rec.csv")).unwrap().len(), 16 * 16);
}

#[test]
fn assemble_caches_operator() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("op");
    let cfg = write_config(dir.path(), "ssn.json", &small_experiment(&out, "ssn"));
    let first = cli(&["assemble", "--config", &cfg]);
    assert!(first.status.success(), "{}", String::from_utf8_lossy(&first.stderr));
    assert!(String::from_utf8_lossy(&first.stdout).starts_with("assembled 32x512"));
    let second = cli(&["assemble", "--config", &cfg]);
    assert!(String::from_utf8_lossy(&second.stdout).starts_with("reused"));
    let run = cli(&["reconstruct", "--config", &cfg]);
    let json: serde_json::Value = serde_json::from_slice(&run.stdout).unwrap();
    assert_eq!(json["operator_from_cache"], true);
}

#[test]
fn suite_prints_table_and_flags_failures() {
    let dir = tempfile::tempdir().unwrap();
    let table = dir.path().join("table");
    let good = small_experiment(&dir.path().join("a"), "pda");
    let bad = r#"{"name": "bad", "fine_n": 24, "coarse_n": 16, "half_width": 1.5,
                  "phantom": {"kind": "peaks", "positions": [[1.49, 0.0, 0.0]]}}"#;
    let suite = format!(r#"{{"output_dir": "{}", "experiments": [{good}, {bad}]}}"#, table.display());
    let cfg = write_config(dir.path(), "suite.json", &suite);
    let o = cli(&["suite", "--config", &cfg]);
    assert!(!o.status.success());
    let stdout = String::from_utf8_lossy(&o.stdout);
    assert!(stdout.starts_with("Method,Source,Medium,Time(s),N-Error"), "{stdout}");
    let rows = read_results_csv(&table.join("results.csv")).unwrap();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].n_error.is_finite());
    assert!(rows[1].n_error.is_nan());
}

#[test]
fn bad_config_reports_phase() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "bad.json", r#"{"fine_n": 32, "coarse_n": 32}"#);
    let o = cli(&["reconstruct", "--config", &cfg]);
    assert!(!o.status.success());
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.starts_with("error: config"), "{err}");
    let o = cli(&["reconstruct", "--config", &write_config(dir.path(), "typo.json", r#"{"fine": 32}"#)]);
    assert!(!o.status.success());
}
