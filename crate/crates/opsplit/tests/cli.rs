use std::fs;
use std::process::Command;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_opsplit"))
}

#[test]
fn run_writes_a_csv_trace() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("dr.toml");
    let out = dir.path().join("trace.csv");
    fs::write(
        &cfg,
        r#"
method = "dr"
iters = 3

[problem]
form = "composite-l"
f = { kind = "half-squared-norm", dim = 1 }
g = { kind = "half-squared-norm", dim = 1 }

[start]
x0 = [2.0]
"#,
    )
    .unwrap();

    let status = bin()
        .args(["run", "--config"])
        .arg(&cfg)
        .arg("--out")
        .arg(&out)
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(0));

    let csv = fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "iter,x0,y0,residual");
    assert_eq!(lines.len(), 5);
    // x halves each step: 2, 1, 0.5, 0.25
    assert!(lines[4].starts_with("3,2.5000000000000000e-1"));
}

#[test]
fn verify_passes_on_builtin_checks() {
    let output = bin()
        .args(["verify", "--seeds", "3", "--iters", "30"])
        .output()
        .unwrap();
    assert_eq!(output.status.code(), Some(0), "{output:?}");
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("dr-admm[seed=0]"));
    assert!(stdout.contains("counterexample[-2,1]"));
    assert!(!stdout.contains("FAIL"));
}

#[test]
fn verify_with_impossible_tolerance_fails_with_code_1() {
    let status = bin()
        .args(["verify", "dr-admm", "--seeds", "1", "--iters", "10", "--tol", "1e-30"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(1));
}

#[test]
fn counterexample_reports_distinct_limits() {
    let output = bin().arg("counterexample").output().unwrap();
    assert_eq!(output.status.code(), Some(0));
    let stdout = String::from_utf8_lossy(&output.stdout);
    assert!(stdout.contains("separation 0.7071"));
}

#[test]
fn bad_input_exits_with_code_2() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("bad.toml");
    fs::write(&cfg, "method = \"warp-drive\"\n[problem]\nform = \"composite-l\"\nseed = 1\n")
        .unwrap();
    let status = bin().args(["run", "--config"]).arg(&cfg).status().unwrap();
    assert_eq!(status.code(), Some(2));

    let status = bin()
        .args(["run", "--config", "/nonexistent/missing.toml"])
        .status()
        .unwrap();
    assert_eq!(status.code(), Some(2));
}
