use std::path::Path;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_thresholds"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, body: &str) -> String {
    let path = dir.join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_string()
}

const K3: &str = r#"{"ground_size":3,"minimal_elements":[[0,1],[1,2],[0,2]]}"#;
const PRINCIPAL3: &str = r#"{"ground_size":5,"minimal_elements":[[0,1,2]]}"#;

#[test]
fn compute_k3() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "k3.json", K3);
    let out = run(&["compute", "--instance", &path]);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    assert!((v["q"].as_f64().unwrap() - 6f64.powf(-0.5)).abs() < 1e-8);
    assert!((v["p_c"].as_f64().unwrap() - 0.5).abs() < 1e-9);
    assert_eq!(v["dim_unrestricted"], 2);
    assert_eq!(v["dim_within_family"], 3);
    assert_eq!(v["variant"]["name"], "bell8_log2_ell0");
}

#[test]
fn compute_rejects_bad_input() {
    let dir = tempfile::tempdir().unwrap();
    let bad = write(dir.path(), "bad.json", "{\"ground_size\": 3, ");
    assert_eq!(run(&["compute", "--instance", &bad]).status.code(), Some(2));
    let nested = write(
        dir.path(),
        "nested.json",
        r#"{"ground_size":3,"minimal_elements":[[0],[0,1]]}"#,
    );
    assert_eq!(
        run(&["compute", "--instance", &nested]).status.code(),
        Some(2)
    );
    let k3 = write(dir.path(), "k3.json", K3);
    assert_eq!(
        run(&["compute", "--instance", &k3, "--method", "mc"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["compute", "--instance", &k3, "--tol", "0"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["compute", "--instance", "/nonexistent/file.json"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["compute", "--instance", &k3, "--log-base", "10"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn compute_cap_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    // 30 pairwise disjoint singletons: past both exact μ caps.
    let sets: Vec<Vec<usize>> = (0..30).map(|i| vec![i]).collect();
    let body = serde_json::json!({"ground_size": 30, "minimal_elements": sets}).to_string();
    let path = write(dir.path(), "wide.json", &body);
    assert_eq!(
        run(&["compute", "--instance", &path]).status.code(),
        Some(3)
    );
}

#[test]
fn compute_with_monte_carlo_check() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "k3.json", K3);
    let args = [
        "compute",
        "--instance",
        &path,
        "--method",
        "mc",
        "--samples",
        "20000",
        "--seed",
        "7",
    ];
    let out = run(&args);
    assert_eq!(out.status.code(), Some(0));
    let v: serde_json::Value = serde_json::from_str(stdout(&out).trim()).unwrap();
    let mc = &v["mc_check"];
    assert_eq!(mc["method"], "monte_carlo");
    assert!((mc["value"].as_f64().unwrap() - 0.5).abs() <= 4.0 * mc["std_error"].as_f64().unwrap());
    assert_eq!(stdout(&run(&args)), stdout(&out));
}

#[test]
fn sweep_connectivity() {
    let out = run(&["sweep", "--family", "connectivity", "--range", "3..5"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 3);
    let counts: Vec<&str> = rows.iter().map(|r| r.split(',').nth(1).unwrap()).collect();
    assert_eq!(counts, ["3", "16", "125"]);
    let summary: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stderr).unwrap().trim()).unwrap();
    assert_eq!(summary["family"], "connectivity");
}

#[test]
fn sweep_principal_q_column() {
    let out = run(&["sweep", "--family", "principal", "--range", "2..5"]);
    assert_eq!(out.status.code(), Some(0));
    for line in stdout(&out).lines().skip(1) {
        let cols: Vec<&str> = line.split(',').collect();
        let n: i32 = cols[0].parse().unwrap();
        let q: f64 = cols[6].parse().unwrap();
        assert!((q - 2f64.powf(-1.0 / n as f64)).abs() < 1e-8, "{line}");
        assert_eq!(cols[10], "false");
    }
    let summary: serde_json::Value =
        serde_json::from_str(String::from_utf8(out.stderr).unwrap().trim()).unwrap();
    assert_eq!(
        summary["classification"]["classification"]["kind"],
        "never_nontrivial"
    );
}

#[test]
fn empty_sweep_is_header_only() {
    let out = run(&["sweep", "--family", "connectivity", "--range", "3..2"]);
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(stdout(&out).lines().count(), 1);
}

#[test]
fn sweep_rejects_bad_family_or_range() {
    assert_eq!(
        run(&["sweep", "--family", "nope", "--range", "3..4"])
            .status
            .code(),
        Some(2)
    );
    assert_eq!(
        run(&["sweep", "--family", "triangle", "--range", "3-4"])
            .status
            .code(),
        Some(2)
    );
}

#[test]
fn verify_battery_passes() {
    let out = run(&["verify", "--battery", "builtin"]);
    assert_eq!(
        out.status.code(),
        Some(0),
        "{}",
        String::from_utf8_lossy(&out.stderr)
    );
    assert!(!stdout(&out).contains("VIOLATED"));
}

#[test]
fn verify_detects_injected_q() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "p3.json", PRINCIPAL3);
    let out = run(&["verify", "--instance", &path, "--inject-q", "0.95"]);
    assert_eq!(out.status.code(), Some(1));
    let err = String::from_utf8(out.stderr).unwrap();
    assert!(err.contains("sandwich_left"), "{err}");
}

#[test]
fn verify_principal_reports_zero_left_slack() {
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "p3.json", PRINCIPAL3);
    let out = run(&["verify", "--instance", &path]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let left = text
        .lines()
        .find(|l| l.contains(",sandwich_left,"))
        .unwrap();
    let slack: f64 = left.rsplit(',').next().unwrap().parse().unwrap();
    assert!(slack.abs() <= 2e-9, "{left}");
}

#[test]
fn family_lines_round_trip() {
    let out = run(&["family", "--family", "connectivity", "--range", "3..4"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 2);
    let dir = tempfile::tempdir().unwrap();
    let path = write(dir.path(), "k4.json", lines[1]);
    let v: serde_json::Value =
        serde_json::from_str(stdout(&run(&["compute", "--instance", &path])).trim()).unwrap();
    assert_eq!(v["min_count"], 16);
}

#[test]
fn output_is_deterministic() {
    let a = run(&[
        "sweep", "--family", "triangle", "--range", "3..5", "--t-max", "3",
    ]);
    let b = run(&[
        "sweep", "--family", "triangle", "--range", "3..5", "--t-max", "3",
    ]);
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(a.stderr, b.stderr);
}
