use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn dtho(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dtho")).args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn reports(path: &Path) -> Vec<Value> {
    let text = std::fs::read_to_string(path).unwrap();
    serde_json::from_str::<Value>(&text).unwrap().as_array().unwrap().clone()
}

fn csv_rows(text: &str) -> Vec<Vec<String>> {
    text.lines().skip(1).map(|l| l.split(',').map(str::to_string).collect()).collect()
}

#[test]
fn defect_suite_on_z_cubed_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let run = dtho(&[
        "verify",
        "--theta",
        "z^3",
        "--symbol",
        "[(2,1),(-1,2)]",
        "--suite",
        "defect",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let reports = reports(&out);
    assert_eq!(reports.len(), 4);
    for r in &reports {
        assert_eq!(r["schema_version"], 1);
        assert_eq!(r["pass"], true);
        assert!(r["tag"].as_str().unwrap().starts_with("defect-"));
        for key in ["residual", "interior_cols", "sigma", "tol"] {
            assert!(r.get(key).is_some(), "{key}");
        }
    }
}

#[test]
fn zero_symbol_gives_zero_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let run = dtho(&[
        "verify",
        "--theta",
        "z^3",
        "--symbol",
        "[]",
        "--suite",
        "defect,characterization",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 0);
    let reports = reports(&out);
    assert_eq!(reports.len(), 8);
    assert!(reports.iter().all(|r| r["residual"].as_f64() == Some(0.0)));
}

#[test]
fn self_test_fails_and_still_writes_the_report() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let run = dtho(&[
        "verify",
        "--self-test",
        "--theta",
        "z^2",
        "--symbol",
        "[(2,1),(-1,2)]",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert_eq!(code(&run), 1);
    let reports = reports(&out);
    assert_eq!(reports.len(), 4);
    assert!(reports.iter().all(|r| r["pass"] == false));
}

#[test]
fn default_grid_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("r.json");
    let run = dtho(&["verify", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 0, "{}", String::from_utf8_lossy(&run.stderr));
    let reports = reports(&out);
    let tags: std::collections::BTreeSet<&str> = reports.iter().map(|r| r["tag"].as_str().unwrap()).collect();
    for tag in [
        "defect-sandwich",
        "characterization-intertwine",
        "unitary-defects",
        "shift-power-identities",
        "commutation",
        "star-norm-identity",
    ] {
        assert!(tags.contains(tag), "{tag} missing");
    }
}

#[test]
fn verify_is_byte_stable() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for p in [&a, &b] {
        let run = dtho(&[
            "verify",
            "--theta",
            "z^2",
            "--theta",
            "blaschke:zeros=0.5",
            "--suite",
            "defect,unitary-defects",
            "--out",
            p.to_str().unwrap(),
        ]);
        assert_eq!(code(&run), 0);
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn shift_matrix_has_the_closed_form_pattern() {
    let run = dtho(&["matrix", "--operator", "shift", "--theta", "z^2", "--nneg", "4", "--man", "4"]);
    assert_eq!(code(&run), 0);
    let text = stdout(&run);
    assert!(text.starts_with("row\\col,zbar^1,zbar^2,zbar^3,zbar^4,theta*z^0"));
    let rows = csv_rows(&text);
    assert_eq!(rows.len(), 8);
    for (i, row) in rows.iter().enumerate() {
        assert_eq!(row.len(), 9);
        for (j, cell) in row[1..].iter().enumerate() {
            let one = (j < 4 && j == i + 1) || (j >= 4 && i == j + 1);
            assert_eq!(cell, if one { "1+0i" } else { "0+0i" }, "entry ({i},{j})");
        }
    }
    assert!(rows.iter().all(|r| r[1] == "0+0i"));
}

#[test]
fn norm_table_gap_is_monotone() {
    let run = dtho(&["norm", "--theta", "z^2", "--symbol", "[(0,2),(1,1)]", "--sizes", "4,8,16,32,64"]);
    assert_eq!(code(&run), 0);
    let text = stdout(&run);
    assert!(text.starts_with("N,norm,target,gap\n"));
    let gaps: Vec<f64> = csv_rows(&text).iter().map(|r| r[3].parse().unwrap()).collect();
    assert_eq!(gaps.len(), 5);
    assert!(gaps.windows(2).all(|w| w[1] <= w[0]));
    assert!(gaps.iter().all(|&g| g >= -1e-12));
}

#[test]
fn identity_spectrum_is_ones() {
    let run = dtho(&["spectrum", "--operator", "identity", "--nneg", "3", "--man", "2"]);
    assert_eq!(code(&run), 0);
    let rows = csv_rows(&stdout(&run));
    assert_eq!(rows.len(), 5);
    assert!(rows.iter().all(|r| r[1] == "1" && r[2] == "0"));
}

#[test]
fn config_file_is_merged_with_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    let out = dir.path().join("r.json");
    std::fs::write(&cfg, r#"{"theta": ["z^2", "z^3"], "symbol": "[(1,1)]", "suite": "defect", "nneg": 8, "man": 8}"#)
        .unwrap();
    let run = dtho(&["verify", "--config", cfg.to_str().unwrap(), "--theta", "z^2", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&run), 0);
    let reports = reports(&out);
    assert_eq!(reports.len(), 4);
    assert!(reports[0]["case"].as_str().unwrap().contains("nneg=8"));
}

#[test]
fn bad_configs_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("c.json");
    std::fs::write(&cfg, "{\n  \"theta\": \"z^2\",\n  \"nneg\": -3\n}").unwrap();
    let run = dtho(&["verify", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&run), 2);
    assert!(String::from_utf8_lossy(&run.stderr).contains("line 3"));
    assert_eq!(code(&dtho(&["verify", "--theta", "w^2"])), 2);
    assert_eq!(code(&dtho(&["verify", "--suite", "nonsense"])), 2);
    assert_eq!(code(&dtho(&["matrix", "--operator", "bogus"])), 2);
    assert_eq!(code(&dtho(&["matrix", "--theta", "z^2", "--theta", "z^3"])), 2);
}

#[test]
fn report_summarizes_and_propagates_failures() {
    let dir = tempfile::tempdir().unwrap();
    let good = dir.path().join("good.json");
    let bad = dir.path().join("bad.json");
    dtho(&["verify", "--theta", "z^2", "--symbol", "[(1,1)]", "--suite", "defect", "--out", good.to_str().unwrap()]);
    dtho(&["verify", "--self-test", "--theta", "z^2", "--symbol", "[(3,1)]", "--out", bad.to_str().unwrap()]);
    let run = dtho(&["report", good.to_str().unwrap()]);
    assert_eq!(code(&run), 0);
    assert_eq!(stdout(&run).lines().filter(|l| l.starts_with("PASS")).count(), 4);
    let csv = dir.path().join("s.csv");
    assert_eq!(code(&dtho(&["report", bad.to_str().unwrap(), "--out", csv.to_str().unwrap()])), 1);
    assert!(std::fs::read_to_string(&csv).unwrap().starts_with("tag,case,residual,tol,pass\n"));
    std::fs::write(&bad, "not json").unwrap();
    assert_eq!(code(&dtho(&["report", bad.to_str().unwrap()])), 2);
}
