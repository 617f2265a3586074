use std::path::Path;
use std::process::{Command, Output};

use cssball_core::io::read_field_csv;
use serde_json::Value;

fn cssball(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cssball"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn json(path: &Path) -> Value {
    serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap()
}

#[test]
fn exponent_outside_range_is_a_usage_error() {
    let out = cssball(&["roots", "--p", "4"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(
        stderr(&out).contains("p = 4 outside (1,3)"),
        "{}",
        stderr(&out)
    );
    assert!(out.stdout.is_empty());
}

#[test]
fn roots_on_stdout() {
    let out = cssball(&["roots", "--p", "2", "--omega", "0.05"]);
    assert!(out.status.success());
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["kind"], "pair");
    assert!((v["k1"].as_f64().unwrap() - 0.05120).abs() < 1e-5);
    assert!((v["k2"].as_f64().unwrap() - 0.30477).abs() < 1e-5);
}

#[test]
fn config_file_and_flag_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.cfg");
    std::fs::write(&cfg, "# limit\np = 2\nomega = 0.2\n").unwrap();
    let out = cssball(&[
        "roots",
        "--config",
        cfg.to_str().unwrap(),
        "--omega",
        "0.05",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["omega"], 0.05);
    assert_eq!(v["kind"], "pair");

    std::fs::write(&cfg, "p = 2\nomega = 0.05\nwidth = 3\n").unwrap();
    let out = cssball(&["roots", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("width"));
}

#[test]
fn flag_for_another_command_is_rejected() {
    let out = cssball(&["thresholds", "--radius", "10"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--radius"));
}

#[test]
fn frequency_above_tangency_fails_before_computing() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.csv");
    let out = cssball(&[
        "scan",
        "--p",
        "2",
        "--omega",
        "0.2",
        "--radius",
        "40",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(2));
    assert!(!path.exists());
}

#[test]
fn thresholds_are_byte_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let svg = dir.path().join("t.svg");
    for path in [&a, &b] {
        let out = cssball(&[
            "thresholds",
            "--p-min",
            "1.5",
            "--p-max",
            "2.5",
            "--samples",
            "3",
            "--out",
            path.to_str().unwrap(),
            "--svg",
            svg.to_str().unwrap(),
        ]);
        assert!(out.status.success(), "{}", stderr(&out));
    }
    let text = std::fs::read_to_string(&a).unwrap();
    assert_eq!(text, std::fs::read_to_string(&b).unwrap());
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "p,m,omega0,omega1");
    let mid: Vec<f64> = lines[2].split(',').map(|s| s.parse().unwrap()).collect();
    assert!((mid[2] - 2.0 / (5.0 * 15f64.sqrt())).abs() < 1e-12);
    assert!((mid[3] - 2.0 / (9.0 * 3f64.sqrt())).abs() < 1e-12);
    assert!(!text.contains('\r'));
    assert!(std::fs::read_to_string(&svg).unwrap().contains("<polyline"));
}

#[test]
fn spectrum_flags_the_tangency() {
    let out = cssball(&["spectrum", "--p", "2", "--branch", "k0", "--nodes", "1000"]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["degenerate"], true);
    let out = cssball(&["spectrum", "--p", "2", "--omega", "0.05", "--nodes", "1000"]);
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["degenerate"], false);
    assert!(v["coercivity"].as_f64().unwrap() > 0.0);
    let out = cssball(&["spectrum", "--p", "2", "--omega", "0.05", "--branch", "k0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn scan_writes_csv_summary_and_plot() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("scan.csv");
    let svg = dir.path().join("scan.svg");
    let out = cssball(&[
        "scan",
        "--p",
        "2",
        "--omega",
        "0.05",
        "--radius",
        "40",
        "--samples",
        "16",
        "--out",
        csv.to_str().unwrap(),
        "--svg",
        svg.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("rho,phi,model_phi\n"));
    assert_eq!(text.lines().count(), 17);
    let summary = json(&dir.path().join("scan.json"));
    let rho = summary["rho_star"].as_f64().unwrap();
    let [lo, hi] = [0, 1].map(|i| summary["interval"][i].as_f64().unwrap());
    assert!(lo <= rho && rho <= hi);
    assert!(svg.exists());
}

#[test]
fn solve_writes_report_and_field_that_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("run.json");
    let out = cssball(&[
        "solve",
        "--p",
        "2",
        "--omega",
        "0.05",
        "--radius",
        "30",
        "--nodes",
        "1200",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let v = json(&report);
    assert_eq!(v["converged"], true);
    assert_eq!(v["positive"], true);
    assert!(v["grad_norm"].as_f64().unwrap() < 1e-8);

    let field_path = dir.path().join("run.field.csv");
    let bytes = std::fs::read(&field_path).unwrap();
    let field = read_field_csv(bytes.as_slice()).unwrap();
    assert_eq!(field.grid().n, 1200);
    let mut again = Vec::new();
    cssball_core::io::write_field_csv(&mut again, &field).unwrap();
    assert_eq!(again, bytes);
}

#[test]
fn iteration_cap_exits_with_numerical_failure() {
    let dir = tempfile::tempdir().unwrap();
    let report = dir.path().join("run.json");
    let out = cssball(&[
        "solve",
        "--p",
        "2",
        "--omega",
        "0.05",
        "--radius",
        "30",
        "--max-iter",
        "2",
        "--out",
        report.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(3), "{}", stderr(&out));
    assert_eq!(json(&report)["converged"], false);
}

#[test]
fn unwritable_output_is_an_io_error() {
    let out = cssball(&[
        "roots",
        "--p",
        "2",
        "--omega",
        "0.05",
        "--out",
        "/nonexistent/dir/x.json",
    ]);
    assert_eq!(out.status.code(), Some(4));
    assert!(stderr(&out).contains("/nonexistent/dir/x.json"));
}

#[test]
fn sweep_is_independent_of_thread_count() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_cssball"))
            .args([
                "sweep",
                "--p",
                "2",
                "--omega",
                "0.05,0.08",
                "--radius",
                "25,30",
                "--nodes",
                "800",
            ])
            .env("CSSBALL_THREADS", threads)
            .output()
            .unwrap()
    };
    let one = run("1");
    let four = run("4");
    assert!(one.status.success(), "{}", stderr(&one));
    assert_eq!(one.stdout, four.stdout);
    let text = String::from_utf8(one.stdout).unwrap();
    assert_eq!(text.lines().count(), 5);
    assert!(text.starts_with("p,omega,radius,nodes,ok,"));

    let bad = run("zero");
    assert_eq!(bad.status.code(), Some(2));
}
