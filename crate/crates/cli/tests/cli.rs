//! End-to-end tests against the built binary: exit codes, output formats,
//! unit handling, and thread-count independence.

use std::path::Path;
use std::process::{Command, Output};

fn rydgate(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rydgate"))
        .args(args)
        .env_remove("RYDGATE_THREADS")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn extract_fidelity(text: &str) -> f64 {
    text.lines()
        .find_map(|l| l.strip_prefix("fidelity: F = "))
        .expect("fidelity line")
        .trim()
        .parse()
        .expect("fidelity value")
}

#[test]
fn fidelity_known_protocol() {
    let out = rydgate(&["fidelity", "--pulse", "A=6.162pi,x=0.3333"]);
    assert!(out.status.success());
    let f = extract_fidelity(&stdout(&out));
    assert!((f - 0.968).abs() < 3e-3, "F = {f}");
}

#[test]
fn fidelity_zero_area_is_identity_quarter() {
    let out = rydgate(&["fidelity", "--pulse", "A=0,x=1"]);
    assert!(out.status.success());
    let f = extract_fidelity(&stdout(&out));
    assert_eq!(f, 0.25);
}

#[test]
fn fidelity_aligned_pulses_match_single() {
    let two = rydgate(&[
        "fidelity",
        "--pulse",
        "A=2pi,x=1",
        "--pulse",
        "A=2pi,x=1",
    ]);
    let one = rydgate(&["fidelity", "--pulse", "A=4pi,x=1"]);
    assert!(two.status.success() && one.status.success());
    let f2 = extract_fidelity(&stdout(&two));
    let f1 = extract_fidelity(&stdout(&one));
    assert!((f2 - f1).abs() < 1e-12);
}

#[test]
fn pi_suffix_and_radians_agree() {
    let in_pi = rydgate(&["fidelity", "--pulse", "A=6.162pi,x=0.3333"]);
    let radians = format!("A={},x=0.3333", 6.162 * std::f64::consts::PI);
    let in_rad = rydgate(&["fidelity", "--pulse", &radians]);
    assert_eq!(stdout(&in_pi), stdout(&in_rad));
}

#[test]
fn fidelity_json_shape() {
    let out = rydgate(&["fidelity", "--pulse", "A=2pi,x=1", "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(v["subsystems"].as_array().unwrap().len(), 3);
    assert!(v["fidelity"].is_f64());
}

#[test]
fn malformed_pulse_is_usage_error() {
    let out = rydgate(&["fidelity", "--pulse", "A=abc,x=1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = rydgate(&["fidelity", "--pulse", "x=1"]);
    assert_eq!(out.status.code(), Some(1));
    let out = rydgate(&["nonsense-command"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn optimize_budgets() {
    let out = rydgate(&["optimize", "--max-area", "2.5pi"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["count"], 1);

    let out = rydgate(&["optimize", "--max-area", "7pi"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let top = &v["candidates"][0];
    assert_eq!(top["l"], 1);
    assert_eq!(top["l_prime"], 1);
    assert_eq!(top["l_dprime"], 0);
    assert!((top["f_refined"].as_f64().unwrap() - 0.968).abs() < 3e-3);

    let out = rydgate(&["optimize", "--max-area", "27pi"]);
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let hit = v["candidates"]
        .as_array()
        .unwrap()
        .iter()
        .find(|c| c["l"] == 6 && c["l_prime"] == 6 && c["l_dprime"] == 0)
        .expect("(6,6,0) present");
    assert!((hit["f_ideal"].as_f64().unwrap() - 0.998).abs() < 1e-3);
}

#[test]
fn optimize_family_output() {
    let out = rydgate(&["optimize", "--max-area", "10pi", "--family", "aligned"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let members = v["candidates"].as_array().unwrap();
    assert!(!members.is_empty());
    let hit = members.iter().any(|m| {
        (m["area1"].as_f64().unwrap() - 7.0 * std::f64::consts::PI).abs() < 1e-9
            && (m["area2"].as_f64().unwrap() - 3.0 * std::f64::consts::PI).abs() < 1e-9
    });
    assert!(hit, "expected the (7pi, 3pi) aligned split");

    let out = rydgate(&["optimize", "--max-area", "10pi", "--family", "bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn beams_decoupling_and_ratio_zero() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("geom.toml");
    std::fs::write(
        &path,
        r#"
overlaps = [[1.0, 0.5], [0.5, 1.0]]
[[target]]
x = 0.0
[[target]]
x = 0.5
"#,
    )
    .unwrap();
    let out = rydgate(&["beams", "--geometry", path.to_str().unwrap(), "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let pulses = v["pulses"].as_array().unwrap();
    assert!((pulses[0]["ratio"].as_f64().unwrap() + 0.5).abs() < 1e-12);
    assert!(pulses[1]["ratio"].as_f64().unwrap().abs() < 1e-12);
}

#[test]
fn beams_three_qubits_and_singular_rejection() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("geom3.toml");
    std::fs::write(
        &path,
        r#"
alpha = 1.1
positions = [0.0, 0.9, 2.1]
[[target]]
e = [0.5, 0.5, 0.70710678118654752]
"#,
    )
    .unwrap();
    let out = rydgate(&["beams", "--geometry", path.to_str().unwrap(), "--json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["n_qubits"], 3);
    assert!(v["pulses"][0]["residual"].as_f64().unwrap() < 1e-10);

    let singular = dir.path().join("geom_bad.toml");
    std::fs::write(
        &singular,
        r#"
overlaps = [[1.0, 0.9999999999999999], [0.9999999999999999, 1.0]]
[[target]]
x = 0.0
"#,
    )
    .unwrap();
    let out = rydgate(&["beams", "--geometry", singular.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
    let err = String::from_utf8_lossy(&out.stderr).into_owned();
    assert!(err.contains("(0, 1)"), "error names the pair: {err}");
}

#[test]
fn map_round_trip_and_degenerate_axis() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("map.csv");
    let out = rydgate(&[
        "map",
        "--axis",
        "A=0:4pi:9",
        "--axis",
        "x=0.1:1:5",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    let grid = rydgate_core::report::parse_grid_csv(&text).unwrap();
    assert_eq!(grid.values.len(), 45);
    assert_eq!(rydgate_core::report::write_grid_csv(&grid), text);

    let out = rydgate(&[
        "map",
        "--axis",
        "A=0:4pi:1",
        "--axis",
        "x=0.1:1:5",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(1));

    let out = rydgate(&[
        "map",
        "--axis",
        "A=0:4pi:4",
        "--axis",
        "x=0.1:1:4",
        "--output",
        "/nonexistent-dir/map.csv",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn map_family_constraint_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("grid.toml");
    std::fs::write(
        &config,
        r#"
family = "aligned"
[[axis]]
param = "A2"
min = 0.0
max = "3pi"
points = 7
[fixed]
A1 = "7pi"
x = 0.2
"#,
    )
    .unwrap();
    let path = dir.path().join("fig6a.csv");
    let out = rydgate(&[
        "map",
        "--config",
        config.to_str().unwrap(),
        "--output",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let grid = rydgate_core::report::parse_grid_csv(&std::fs::read_to_string(&path).unwrap())
        .unwrap();
    // the aligned family reduces to the area sum: A2 = 3pi completes 10pi
    let last = *grid.values.last().unwrap();
    let direct = rydgate_core::fidelity::fidelity_single(10.0 * std::f64::consts::PI, 0.2);
    assert!((last - direct.value()).abs() < 1e-9);
}

#[test]
fn noise_preset_none_is_exact() {
    let out = rydgate(&[
        "noise",
        "--pulse",
        "A=2.414pi,x=1",
        "--preset",
        "none",
        "--samples",
        "50",
    ]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(
        text.contains("std F = 0.00000000000e0"),
        "std not exactly zero: {text}"
    );
}

#[test]
fn noise_series_is_thread_independent() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    let run = |threads: &str, path: &Path| {
        let out = rydgate(&[
            "--threads",
            threads,
            "noise",
            "--series",
            "l0..3",
            "--preset",
            "standard",
            "--samples",
            "400",
            "--output",
            path.to_str().unwrap(),
        ]);
        assert!(out.status.success());
    };
    run("1", &a);
    run("4", &b);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn noise_config_file_route() {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("noise.toml");
    std::fs::write(
        &config,
        r#"
delta_intensity = 0.03
temperature_uk = 25.0
delta_phase = "0.1pi"
samples = 200
seed = 9
"#,
    )
    .unwrap();
    let csv = dir.path().join("series.csv");
    let out = rydgate(&[
        "noise",
        "--series",
        "l0..1",
        "--config",
        config.to_str().unwrap(),
        "--output",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.contains("# seed = 9"));
    assert!(text.contains("# samples = 200"));
    let (rows, _) = rydgate_core::report::parse_noise_csv(&text).unwrap();
    assert_eq!(rows.len(), 2);
}

#[test]
fn threads_env_var_accepted() {
    let out = Command::new(env!("CARGO_BIN_EXE_rydgate"))
        .args(["noise", "--pulse", "A=2pi,x=1", "--preset", "none", "--samples", "10"])
        .env("RYDGATE_THREADS", "2")
        .output()
        .unwrap();
    assert!(out.status.success());
}

#[test]
fn verify_reports_and_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let json_path = dir.path().join("report.json");
    let out = rydgate(&["verify", "--json", json_path.to_str().unwrap()]);
    let text = stdout(&out);
    let report: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&json_path).unwrap()).unwrap();
    assert_eq!(report["criteria"].as_array().unwrap().len(), 10);
    assert!(!report["properties"].as_array().unwrap().is_empty());
    // the exit code mirrors the report verdict
    let passed = report["passed"].as_bool().unwrap();
    assert_eq!(out.status.code(), Some(if passed { 0 } else { 2 }));
    let pass_lines = text.matches("PASS").count();
    let fail_lines = text.matches("FAIL").count();
    assert_eq!(
        pass_lines + fail_lines,
        report["criteria"].as_array().unwrap().len()
            + report["properties"].as_array().unwrap().len()
    );
}

#[test]
fn verify_self_check_fails() {
    let out = rydgate(&["verify", "--inject-tolerance-failure"]);
    assert_eq!(out.status.code(), Some(2));
}
