use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn expsig(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_expsig"))
        .args(args)
        .env_remove("EXPSIG_PREC")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn csv_header(text: &str) -> Value {
    let first = text.lines().next().unwrap();
    serde_json::from_str(first.strip_prefix("# ").unwrap()).unwrap()
}

#[test]
fn help_for_every_subcommand() {
    let top = expsig(&["--help"]);
    assert!(top.status.success());
    for sub in ["hierarchy", "develop", "bessel", "pole", "compare", "radius", "mc"] {
        assert!(stdout(&top).contains(sub));
        let o = expsig(&[sub, "--help"]);
        assert!(o.status.success(), "{sub} --help");
        assert!(stdout(&o).contains("--out"), "{sub} --help lists --out");
    }
}

#[test]
fn hierarchy_reports_a2_and_passes_checks() {
    let o = expsig(&["hierarchy", "--levels", "6"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "expsig.hierarchy/1");
    assert_eq!(v["checks_passed"], true);
    assert_eq!(v["levels"][2]["a_n"], "1/2");
    assert_eq!(v["levels"][4]["a_n"], "1/16");
}

#[test]
fn tensor_mode_runs_fold_check() {
    let o = expsig(&["hierarchy", "--mode", "tensor", "--levels", "5"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["levels"][5]["checks"]["fold"], "exact-pass");
}

#[test]
fn hierarchy_cap_needs_ball_fallback() {
    let o = expsig(&["hierarchy", "--levels", "12", "--exact-cap", "10"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("--ball-fallback"));
    let o = expsig(&["hierarchy", "--levels", "12", "--exact-cap", "10", "--ball-fallback"]);
    assert!(o.status.success());
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["all_exact"], false);
    assert_eq!(v["levels"][12]["exact"], false);
    assert!(v["levels"][12]["a_n"]["mid"].is_string());
}

#[test]
fn zero_width_is_rejected() {
    let o = expsig(&["pole", "--width", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("width"));
}

#[test]
fn pole_certificate_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("cert.json");
    let p = path.to_str().unwrap();
    assert!(expsig(&["pole", "--width", "1/1000", "--out", p]).status.success());
    assert!(Path::new(&format!("{p}.manifest.json")).exists());
    let cert: Value = serde_json::from_str(&fs::read_to_string(&path).unwrap()).unwrap();
    assert_eq!(cert["schema"], "expsig.pole/1");
    assert!(expsig(&["pole", "--verify", p]).status.success());

    let mut bad = cert.clone();
    bad["lo"] = Value::String("3/1".into());
    bad["hi"] = Value::String("4/1".into());
    let bad_path = dir.path().join("bad.json");
    fs::write(&bad_path, serde_json::to_string(&bad).unwrap()).unwrap();
    let o = expsig(&["pole", "--verify", bad_path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn compare_gap_shrinks() {
    let o = expsig(&["compare", "--lambda", "1", "--levels", "40"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(csv_header(&text)["schema"], "expsig.compare/1");
    let last = text.lines().last().unwrap();
    let gap: f64 = last.rsplit(',').next().unwrap().parse().unwrap();
    assert!(gap <= 1e-8, "gap {gap}");
}

#[test]
fn compare_refuses_past_pole() {
    let o = expsig(&["compare", "--lambda", "3"]);
    assert_eq!(o.status.code(), Some(2));
    let o = expsig(&["compare", "--lambda", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn radius_with_too_few_levels() {
    let o = expsig(&["radius", "--levels", "2"]);
    assert!(o.status.success());
    let text = stdout(&o);
    assert_eq!(text.lines().count(), 2);
    assert!(String::from_utf8_lossy(&o.stderr).contains("insufficient data"));
}

#[test]
fn radius_estimates_listed() {
    let o = expsig(&["radius", "--levels", "20"]);
    let text = stdout(&o);
    let last: f64 = text.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!((last - 2.8239).abs() < 0.02);
}

#[test]
fn develop_at_origin() {
    let o = expsig(&["develop", "--levels", "4", "--lambda", "1/2", "--point", "0,0"]);
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["levels"][2]["value"][2], "1/2");
    assert_eq!(v["partial_sums"][2]["value"][2], "9/8");
}

#[test]
fn bessel_invariants_hold() {
    let o = expsig(&["bessel", "--lambda", "1", "--r", "1/2"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["schema"], "expsig.bessel/1");
    assert!(v["ode_residual"]["max_abs_upper"].is_string());
}

#[test]
fn precision_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_expsig"))
        .args(["bessel", "--lambda", "1"])
        .env("EXPSIG_PREC", "200")
        .output()
        .unwrap();
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["parameters"]["precision"], 200);
}

#[test]
fn mc_reruns_are_bit_identical() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for p in [&a, &b] {
        let o = expsig(&["mc", "--paths", "600", "--h", "1e-3", "--seed", "7", "--out", p.to_str().unwrap()]);
        assert!(o.status.success());
    }
    let ta = fs::read(&a).unwrap();
    assert_eq!(ta, fs::read(&b).unwrap());
    let header = csv_header(std::str::from_utf8(&ta).unwrap());
    assert_eq!(header["schema"], "expsig.mc/1");
    assert_eq!(header["parameters"]["h"], "0.001");
}

#[test]
fn exact_outputs_are_reproducible() {
    let a = expsig(&["hierarchy", "--levels", "8"]);
    let b = expsig(&["hierarchy", "--levels", "8"]);
    assert_eq!(a.stdout, b.stdout);
}
