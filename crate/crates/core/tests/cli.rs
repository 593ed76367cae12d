//! End-to-end tests of the installed binary: exit codes, determinism of
//! emitted files, CSV round-trips, and JSON schema conformance.

use ringstat::output::Table;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ringstat"))
}

#[test]
fn exit_code_bad_input_is_2() {
    let out = bin().args(["edges", "--potential", "sombrero:1"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("cannot parse potential"));
    // inadmissible potential: too weak to confine
    let out = bin().args(["edges", "--potential", "poly:0.0000000001"]).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn exit_code_numerical_failure_is_3() {
    // N=2 is below the slowly-varying scaling's domain
    let out = bin()
        .args(["cdf", "--potential", "gauss", "--N", "2", "--with-asymptotics", "--points", "3"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&out.stderr).contains("too small"));
}

#[test]
fn help_and_version_exit_zero() {
    assert!(bin().arg("--help").status().unwrap().success());
    assert!(bin().arg("--version").status().unwrap().success());
}

#[test]
fn sample_files_are_deterministic_and_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name);
    let run = |out: &str| {
        let st = bin()
            .args([
                "sample", "--potential", "gauss", "--N", "50", "--m", "200", "--seed", "7",
                "--stream", "0", "--out",
            ])
            .arg(path(out))
            .status()
            .unwrap();
        assert!(st.success());
    };
    run("a.csv");
    run("b.csv");
    let a = std::fs::read(path("a.csv")).unwrap();
    let b = std::fs::read(path("b.csv")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b, "same seed and stream must emit byte-identical files");

    // companion ECDF file exists and both files round-trip byte-identically
    for name in ["a.csv", "a.ecdf.csv"] {
        let text = std::fs::read_to_string(path(name)).unwrap();
        let t = Table::from_csv(&text).unwrap();
        assert_eq!(t.to_csv(), text, "{name} must round-trip");
    }
}

#[test]
fn cdf_csv_round_trips_and_has_expected_columns() {
    let out = bin()
        .args([
            "cdf", "--potential", "gauss", "--N", "100", "--points", "9", "--with-asymptotics",
        ])
        .output()
        .unwrap();
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let t = Table::from_csv(&text).unwrap();
    assert_eq!(t.to_csv(), text);
    assert_eq!(t.columns, vec!["Y", "y", "F_exact", "F_gumbel", "F_phi"]);
    assert_eq!(t.rows.len(), 9);
    assert!(t.meta.iter().any(|(k, v)| k == "method" && v == "gaussian-closed-form"));
}

#[test]
fn json_outputs_validate_against_the_shipped_schema() {
    let schema: serde_json::Value = serde_json::from_str(include_str!(concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../schema/output.schema.json"
    )))
    .unwrap();
    let validator = jsonschema::validator_for(&schema).unwrap();

    for args in [
        vec!["edges", "--potential", "halfquadlin:-1"],
        vec!["cdf", "--potential", "gauss", "--N", "20", "--points", "5", "--raw-y", "--ymin", "0.5", "--ymax", "1.5"],
        vec!["compare", "--potential", "gauss", "--N", "50", "--points", "7"],
    ] {
        let out = bin().args(&args).args(["--format", "json"]).output().unwrap();
        assert!(out.status.success(), "{args:?}");
        let text = String::from_utf8(out.stdout).unwrap();
        // compare prints report lines before the document
        let json_start = text.find('{').unwrap();
        let doc: serde_json::Value = serde_json::from_str(&text[json_start..]).unwrap();
        assert!(validator.is_valid(&doc), "{args:?}: {doc}");
    }
}

#[test]
fn metropolis_sample_emits_histogram() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("mc.csv");
    let st = bin()
        .args([
            "sample", "--potential", "quadlin:-1", "--N", "30", "--method", "metropolis",
            "--sweeps", "800", "--burn-in", "200", "--thin", "30", "--eta", "3.0", "--seed", "3",
            "--out",
        ])
        .arg(&out_path)
        .status()
        .unwrap();
    assert!(st.success());
    let hist = std::fs::read_to_string(dir.path().join("mc.hist.csv")).unwrap();
    let t = Table::from_csv(&hist).unwrap();
    assert_eq!(t.kind, "histogram");
    let total: f64 = t.rows.iter().map(|r| r[1]).sum();
    assert!((total - 1.0).abs() < 0.05, "histogram mass {total}");
}
