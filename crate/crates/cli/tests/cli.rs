//! End-to-end tests of the `robuc` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn robuc() -> Command {
    Command::new(env!("CARGO_BIN_EXE_robuc"))
}

fn write_case(dir: &Path, name: &str, case: &robuc_core::GridCase) -> PathBuf {
    let path = dir.join(name);
    robuc_core::save_case(case, &path).unwrap();
    path
}

fn stdout(output: &Output) -> String {
    String::from_utf8_lossy(&output.stdout).into_owned()
}

#[test]
fn zero_budget_solve_writes_artifacts_and_matches_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let case = robuc_core::fixtures::copperplate_pair();
    let case_path = write_case(dir.path(), "case.json", &case);
    let out = dir.path().join("run");
    let output = robuc()
        .args(["solve", "--case"])
        .arg(&case_path)
        .args(["--gamma-a", "0", "--gamma-d", "0", "--lag", "0", "--out"])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    for artifact in [
        "solution.json",
        "iterations.csv",
        "commitment.csv",
        "capacity_profile.csv",
        "worst_case_scenario.json",
    ] {
        assert!(out.join(artifact).exists(), "missing {artifact}");
    }
    let solution: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out.join("solution.json")).unwrap()).unwrap();
    let objective = solution["objective"].as_f64().unwrap();
    let (_, _, deterministic) = robuc_core::deterministic_uc(
        &case,
        &robuc_core::Scenario::nominal(&case),
        robuc_core::ModelVariant::Network,
        &case.load_shed_prices,
        &robuc_core::SolveConfig::default(),
    )
    .unwrap();
    assert!(
        (objective - deterministic).abs() <= 1e-5 * deterministic.max(1.0),
        "cli {objective} vs deterministic {deterministic}"
    );
}

#[test]
fn sweep_writes_expected_rows() {
    let dir = tempfile::tempdir().unwrap();
    let case = robuc_core::fixtures::copperplate_pair();
    let case_path = write_case(dir.path(), "case.json", &case);
    let out = dir.path().join("sweep");
    let output = robuc()
        .args(["sweep", "--case"])
        .arg(&case_path)
        .args([
            "--gamma-a", "0,1", "--gamma-d", "0,1", "--lag", "1", "--jobs", "2", "--out",
        ])
        .arg(&out)
        .output()
        .unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let csv = std::fs::read_to_string(out.join("results.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "gamma_a,gamma_d,lower_bound,upper_bound,gap,seconds,value_relaxed_binary"
    );
    // Paired budgets from {0,1} x {0,1}: (0,0), (0,1), (1,1).
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 3, "{csv}");
    for row in &rows {
        assert_eq!(row.split(',').count(), 7);
    }
}

#[test]
fn verify_passes_on_stock_fixtures() {
    let output = robuc().arg("verify").output().unwrap();
    assert!(output.status.success(), "{}", String::from_utf8_lossy(&output.stderr));
    let text = stdout(&output);
    assert!(text.contains("optimality-dual-vs-oracle: PASS"), "{text}");
    assert!(text.contains("binary-reduction-grid-witness: PASS"), "{text}");
    assert!(!text.contains("FAIL"), "{text}");
}

#[test]
fn verify_names_broken_invariant() {
    let dir = tempfile::tempdir().unwrap();
    let case = robuc_core::fixtures::copperplate_pair();
    let mut json: serde_json::Value =
        serde_json::from_str(&robuc_core::grid::case_to_json(&case).unwrap()).unwrap();
    // Deliberately non-convex cost curve.
    json["generators"][0]["cost_curve"]["breakpoints"] =
        serde_json::json!([[0.0, 0.0], [40.0, 700.0], [80.0, 800.0]]);
    let path = dir.path().join("broken.json");
    std::fs::write(&path, json.to_string()).unwrap();
    let output = robuc().args(["verify", "--case"]).arg(&path).output().unwrap();
    assert_eq!(output.status.code(), Some(1));
    let text = stdout(&output);
    assert!(text.contains("case-validation: FAIL"), "{text}");
    assert!(text.contains("convex"), "{text}");
}

#[test]
fn export_rederives_artifacts_from_solution() {
    let dir = tempfile::tempdir().unwrap();
    let case = robuc_core::fixtures::copperplate_pair();
    let case_path = write_case(dir.path(), "case.json", &case);
    let run_dir = dir.path().join("run");
    let solve = robuc()
        .args(["solve", "--case"])
        .arg(&case_path)
        .args(["--gamma-a", "1", "--gamma-d", "1", "--lag", "1", "--out"])
        .arg(&run_dir)
        .output()
        .unwrap();
    assert!(solve.status.success());
    let export_dir = dir.path().join("export");
    let export = robuc()
        .args(["export", "--solution"])
        .arg(run_dir.join("solution.json"))
        .arg("--case")
        .arg(&case_path)
        .arg("--out")
        .arg(&export_dir)
        .output()
        .unwrap();
    assert!(export.status.success(), "{}", String::from_utf8_lossy(&export.stderr));
    let original = std::fs::read_to_string(run_dir.join("commitment.csv")).unwrap();
    let exported = std::fs::read_to_string(export_dir.join("commitment.csv")).unwrap();
    assert_eq!(original, exported);
}

/// Reruns with the same seed must agree byte for byte on every value-bearing
/// column; wall-clock columns are excluded before comparing.
#[test]
fn reruns_are_deterministic_up_to_timing() {
    let dir = tempfile::tempdir().unwrap();
    let case = robuc_core::fixtures::copperplate_trio_t3();
    let case_path = write_case(dir.path(), "case.json", &case);
    let run = |out: &Path| {
        let output = robuc()
            .args(["solve", "--case"])
            .arg(&case_path)
            .args([
                "--gamma-a", "1", "--gamma-d", "1", "--lag", "1", "--seed", "7", "--out",
            ])
            .arg(out)
            .output()
            .unwrap();
        assert!(output.status.success());
    };
    let first = dir.path().join("a");
    let second = dir.path().join("b");
    run(&first);
    run(&second);
    for artifact in ["commitment.csv", "capacity_profile.csv"] {
        let a = std::fs::read_to_string(first.join(artifact)).unwrap();
        let b = std::fs::read_to_string(second.join(artifact)).unwrap();
        assert_eq!(a, b, "{artifact} differs between reruns");
    }
    let strip_timing = |text: &str| -> String {
        text.lines()
            .map(|line| {
                let cells: Vec<&str> = line.split(',').collect();
                cells[..cells.len() - 1].join(",")
            })
            .collect::<Vec<String>>()
            .join("\n")
    };
    let a = strip_timing(&std::fs::read_to_string(first.join("iterations.csv")).unwrap());
    let b = strip_timing(&std::fs::read_to_string(second.join("iterations.csv")).unwrap());
    assert_eq!(a, b, "iteration logs differ beyond timing");
}

#[test]
fn unknown_backend_is_rejected() {
    let output = robuc()
        .env("ROBUC_BACKEND", "cplex")
        .arg("verify")
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&output.stderr).contains("unknown solver backend"));
}
