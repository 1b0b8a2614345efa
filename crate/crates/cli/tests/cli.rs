use std::path::PathBuf;
use std::process::{Command, Output};

fn sheargeo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sheargeo"))
        .args(args)
        .env("SHEARGEO_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("sheargeo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn passing_run_exits_zero() {
    let out = sheargeo(&["cr-roundtrip"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("cr.j_squared") && text.contains("checks passed"));
}

#[test]
fn failing_check_exits_one() {
    let out = sheargeo(&["cr-roundtrip", "--tol.cr.levi_b", "0"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn bad_configuration_exits_two() {
    let out = sheargeo(&["einstein", "--C", "-1"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("`C`"));
    assert_eq!(sheargeo(&["einstein", "--colour", "red"]).status.code(), Some(2));
    assert_eq!(sheargeo(&["einstein", "--grid", "many"]).status.code(), Some(2));
}

#[test]
fn json_is_byte_identical_across_runs() {
    let args = ["all", "--grid", "3", "--format", "json", "--seed", "11"];
    let a = sheargeo(&args);
    let b = sheargeo(&args);
    assert_eq!(a.status.code(), Some(0), "{}", String::from_utf8_lossy(&a.stdout));
    assert_eq!(a.stdout, b.stdout);
    let text = String::from_utf8(a.stdout).unwrap();
    for key in [
        "\"config\"",
        "\"checks\"",
        "\"summary\"",
        "\"paper_anchor\"",
        "\"seed\": \"11\"",
        "\"version\"",
    ] {
        assert!(text.contains(key), "{key}");
    }
}

#[test]
fn flags_override_file_and_are_echoed() {
    let cfg = scratch("taubnut.cfg");
    std::fs::write(
        &cfg,
        "# Taub-NUT run\ncommand = taubnut\ngrid = 3\nB = 0.5 # overridden below\nformat = json\n",
    )
    .unwrap();
    let out = sheargeo(&["--config", cfg.to_str().unwrap(), "--B", "0"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("\"B\": \"0\""));
    assert!(text.contains("ell = 0.5") && text.contains("m = 0"));
}

#[test]
fn csv_goes_to_output_file() {
    let path = scratch("wave.csv");
    let out = sheargeo(&[
        "wave",
        "--base",
        "torus",
        "--grid",
        "3",
        "--format",
        "csv",
        "--output",
        path.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let csv = std::fs::read_to_string(&path).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("check,index,point,residual"));
    // 3 samples of t, x and y at fixed u, for each gridded record
    assert!(lines.filter(|l| l.starts_with("wave.coclosed,")).count() == 27);
}
