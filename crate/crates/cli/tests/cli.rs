use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
        .to_string_lossy()
        .into_owned()
}

fn riccati(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_riccati")).args(args).output().unwrap()
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

#[test]
fn check_exit_codes_per_fixture() {
    for (name, want) in [
        ("example33.json", 0),
        ("scalar.json", 0),
        ("pauli.json", 0),
        ("complex.json", 0),
        ("decoupled.json", 2),
        ("noncyclic.json", 2),
        ("nonhermitian.json", 1),
        ("malformed_syntax.json", 1),
        ("malformed_ragged.json", 1),
        ("malformed_shape.json", 1),
    ] {
        let out = riccati(&["check", &fixture(name)]);
        assert_eq!(code(&out), want, "{name}: {}", String::from_utf8_lossy(&out.stderr));
    }
}

#[test]
fn noncyclic_report_carries_krylov_rank() {
    let out = riccati(&["check", &fixture("noncyclic.json")]);
    let r = json(&out);
    assert_eq!(r["hypothesis"]["cyclic_ok"], false);
    assert_eq!(r["hypothesis"]["krylov_rank"], 1);
    assert_eq!(r["exit_code"], 2);
}

#[test]
fn nonhermitian_diagnostic_names_block() {
    let out = riccati(&["check", &fixture("nonhermitian.json")]);
    assert_eq!(code(&out), 1);
    assert!(String::from_utf8_lossy(&out.stderr).contains("a0"));
}

#[test]
fn missing_file_and_bad_flags_are_input_errors() {
    assert_eq!(code(&riccati(&["check", "/nonexistent/problem.json"])), 1);
    assert_eq!(code(&riccati(&["check", &fixture("scalar.json"), "--tol-eig", "-1"])), 1);
    assert_eq!(code(&riccati(&["frobnicate"])), 1);
    assert_eq!(code(&riccati(&["--help"])), 0);
}

#[test]
fn example_classification_marks_case_iii() {
    let out = riccati(&["classify", &fixture("example33.json")]);
    assert_eq!(code(&out), 0);
    let cls = json(&out)["classification"].as_array().unwrap().clone();
    assert_eq!(cls.len(), 4);
    let one: Vec<_> = cls
        .iter()
        .filter(|c| (c["lambda"].as_f64().unwrap() - 1.0).abs() < 1e-8)
        .collect();
    assert_eq!(one.len(), 1);
    assert_eq!(one[0]["note"], "CASE_III: excluded from K_pp");
    assert_eq!(one[0]["witnesses"][0]["case"], "CASE_III");
    assert_eq!(one[0]["witnesses"][0]["in_k_pp"], false);
}

#[test]
fn scalar_solve_gives_smaller_root() {
    let out = riccati(&["solve", &fixture("scalar.json"), "--all-oracle"]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    let solve = &r["solve"];
    assert_eq!(solve["outcome"], "solved");
    let x = solve["solution"]["x"][0][0].as_f64().unwrap();
    assert!((x - (1.0 - 2f64.sqrt())).abs() < 1e-12);
    assert!(solve["solution"]["residual"].as_f64().unwrap() <= 1e-12);
    assert_eq!(solve["oracle"]["solutions"].as_array().unwrap().len(), 2);
}

#[test]
fn noncyclic_solve_restricts_to_krylov_space() {
    let out = riccati(&["solve", &fixture("noncyclic.json")]);
    assert_eq!(code(&out), 0);
    let r = json(&out);
    assert_eq!(r["solve"]["krylov_rank"], 1);
    assert_eq!(r["solve"]["outcome"], "solved");
}

#[test]
fn collision_has_no_certificate() {
    let out = riccati(&["solve", &fixture("no_certificate.json")]);
    assert_eq!(code(&out), 3);
    let r = json(&out);
    assert_eq!(r["solve"]["outcome"], "no_certificate");
    assert!(r["solve"]["reason"].is_string());
}

#[test]
fn pauli_scan_writes_plot_and_finds_atoms() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("scan.json");
    let out = riccati(&["scan", &fixture("pauli.json"), "--out", report.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    let atoms = r["scan"]["flagged_atoms"].as_array().unwrap();
    assert_eq!(atoms.len(), 2);
    for a in atoms {
        assert!((a["lambda"].as_f64().unwrap().abs() - 1.0).abs() < 1e-8);
        assert!((a["mass"].as_f64().unwrap() - 0.5).abs() < 0.025);
    }
    let plot = std::fs::read_to_string(dir.path().join("scan.tsv")).unwrap();
    assert!(plot.starts_with("lambda\teps\ttrace_im_m\n"));
    assert!(plot.lines().count() > 401);
}

#[test]
fn empty_grid_is_rejected() {
    let out = riccati(&["scan", &fixture("pauli.json"), "--grid", "0:1:0"]);
    assert_eq!(code(&out), 1);
}

#[test]
fn verify_round_trip_and_tamper_detection() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("solve.json");
    let input = fixture("example33.json");
    assert_eq!(code(&riccati(&["solve", &input, "--out", report.to_str().unwrap()])), 0);
    let out = riccati(&["verify", &input, report.to_str().unwrap()]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
    assert_eq!(json(&out)["ok"], true);

    let mut r: Value = serde_json::from_str(&std::fs::read_to_string(&report).unwrap()).unwrap();
    r["solve"]["solution"]["residual"] = Value::from(1.0);
    std::fs::write(&report, serde_json::to_string(&r).unwrap()).unwrap();
    assert_eq!(code(&riccati(&["verify", &input, report.to_str().unwrap()])), 1);

    let other = fixture("scalar.json");
    assert_eq!(code(&riccati(&["verify", &other, report.to_str().unwrap()])), 1);
}

#[test]
fn repeated_runs_are_byte_identical() {
    for cmd in ["classify", "scan", "solve"] {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("report.json");
        let mut runs = Vec::new();
        for _ in 0..2 {
            riccati(&[cmd, &fixture("complex.json"), "--out", path.to_str().unwrap()]);
            runs.push(std::fs::read(&path).unwrap());
        }
        assert_eq!(runs[0], runs[1], "{cmd}");
    }
}
