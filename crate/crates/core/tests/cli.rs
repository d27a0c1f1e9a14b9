use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_constellation-lab")).args(args).output().expect("binary runs")
}

fn run_json(args: &[&str]) -> Value {
    let out = lab(args);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn on(command: &str, file: &str) -> Value {
    run_json(&[command, "--input", fixture(file).to_str().unwrap()])
}

#[test]
fn free_orbit_is_stable_everywhere() {
    let v = on("check", "z3_free_orbit.cl");
    assert_eq!(v["result"]["verdict"]["status"], "STABLE");
    assert_eq!(v["result"]["generated_in_dminus"], true);
    let g = on("git-check", "z3_free_orbit.cl");
    assert_eq!(g["result"]["git_verdict"]["status"], "STABLE");
    assert_eq!(g["result"]["git_agrees_with_theta_tilde"], true);
}

#[test]
fn nilpotent_is_unstable_and_not_generated() {
    let v = on("check", "z3_nilpotent.cl");
    assert_eq!(v["result"]["verdict"]["status"], "UNSTABLE");
    assert_eq!(v["result"]["verdict"]["value"], "-2");
    let g = on("git-check", "z3_nilpotent.cl");
    assert_eq!(g["result"]["generated_in_dminus"], false);
    assert!(g["result"]["git_verdict"].is_null());
}

#[test]
fn enumerate_counts() {
    assert_eq!(on("enumerate", "z2_enumerate.cl")["result"]["stable"], 2);
    assert_eq!(on("enumerate", "z3_enumerate.cl")["result"]["stable"], 3);
}

#[test]
fn approx_rows_follow_the_closed_form() {
    let path = fixture("torus_asymmetric.cl");
    let v = run_json(&["approx", "--input", path.to_str().unwrap(), "--window", "3"]);
    let rows = v["result"]["hprimes"][0]["rows"].as_array().unwrap();
    let errors: Vec<&str> = rows.iter().map(|r| r["error"].as_str().unwrap()).collect();
    assert_eq!(errors, ["1/6", "7/72", "23/432"]);
    let sym = run_json(&["approx", "--input", fixture("torus_symmetric.cl").to_str().unwrap(), "--window", "3"]);
    for r in sym["result"]["hprimes"][0]["rows"].as_array().unwrap() {
        assert_eq!(r["error"], "0");
    }
}

#[test]
fn choose_window_certificate() {
    let v = on("choose-window", "torus_asymmetric.cl");
    assert_eq!(v["result"]["radius"], 1);
    assert_eq!(v["result"]["majorant"], "2/3");
    assert_eq!(v["result"]["parameters"]["admissibility"], "0");
}

#[test]
fn hilbert_chow_point() {
    let v = on("hilbert-chow", "z3_hilbert_chow.cl");
    let p = &v["result"]["point"];
    assert_eq!((&p["x^3"], &p["x*y"], &p["y^3"]), (&"8".into(), &"6".into(), &"27".into()));
}

#[test]
fn nonzero_pairing_is_an_input_error() {
    let out = lab(&["derive-params", "--input", fixture("nonzero_pairing.cl").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(out.stdout.is_empty());
    assert!(String::from_utf8_lossy(&out.stderr).contains("is not zero"));
}

#[test]
fn input_errors_exit_with_two() {
    assert_eq!(lab(&["check"]).status.code(), Some(2));
    assert_eq!(lab(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(lab(&["check", "--input", "/nonexistent/file.cl"]).status.code(), Some(2));
    let path = fixture("z3_free_orbit.cl");
    assert_eq!(lab(&["approx", "--input", path.to_str().unwrap(), "--bound", "one"]).status.code(), Some(2));
}

#[test]
fn parse_errors_carry_positions() {
    let dir = std::env::temp_dir().join(format!("constellation-lab-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("bad.cl");
    std::fs::write(&path, "[group]\nkind = finite_abelian\norders = 3\n[theta]\n0 = -1\n1 = oops\n").unwrap();
    let out = lab(&["check", "--input", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains(":6:"), "{}", String::from_utf8_lossy(&out.stderr));
    std::fs::remove_dir_all(&dir).unwrap();
}

#[test]
fn output_is_deterministic() {
    for (cmd, file) in
        [("check", "z3_free_orbit.cl"), ("git-check", "z3_free_orbit.cl"), ("enumerate", "z3_enumerate.cl")]
    {
        let path = fixture(file);
        let a = lab(&[cmd, "--input", path.to_str().unwrap(), "--seed", "7"]);
        let b = lab(&[cmd, "--input", path.to_str().unwrap(), "--seed", "7"]);
        assert_eq!(a.stdout, b.stdout);
    }
}

#[test]
fn task_block_echoes_flags() {
    let path = fixture("torus_symmetric.cl");
    let v =
        run_json(&["approx", "--input", path.to_str().unwrap(), "--window", "2", "--seed", "5", "--bound", "1/100"]);
    assert_eq!(v["task"]["command"], "approx");
    assert_eq!(v["task"]["seed"], 5);
    assert_eq!(v["task"]["window"], 2);
    assert_eq!(v["task"]["bound"], "1/100");
    assert_eq!(v["task"]["group"], "T^1");
    assert!(v.get("timing_ms").is_none());
}

#[test]
fn selftest_passes() {
    let v = run_json(&["selftest", "--seed", "1"]);
    assert_eq!(v["result"]["passed"], true);
}
