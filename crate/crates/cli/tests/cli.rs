use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn data(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/data").join(name)
}

fn orlicz(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orlicz")).args(args).env_remove("MO_TOL_OVERRIDE").output().unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut all = args.to_vec();
    all.push("--json");
    let out = orlicz(&all);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn path(name: &str) -> String {
    data(name).to_string_lossy().into_owned()
}

#[test]
fn norm_report_round_trips() {
    let p = path("power2.json");
    let r = json(&["norm", "--instance", &p, "--function", "u1", "--which", "all"]);
    let inst = orlicz_core::parse_instance(data("power2.json")).unwrap();
    let u = inst.function("u1").unwrap();
    let lux = orlicz_core::luxemburg_norm(&inst.phi, &inst.space, u).unwrap();
    let (orl, _) = orlicz_core::orlicz_amemiya_norm(&inst.phi, &inst.space, u).unwrap();
    let res = &r["results"];
    assert_eq!(res["luxemburg"].as_f64().unwrap().to_bits(), lux.to_bits());
    assert_eq!(res["orlicz"].as_f64().unwrap().to_bits(), orl.to_bits());
    assert_eq!(res["amemiya"], res["orlicz"]);
    assert_eq!(res["degenerate"], Value::Bool(false));
    assert!((res["k_star"].as_f64().unwrap() - 2f64.sqrt()).abs() < 1e-8);
    assert_eq!(res["theta"].as_f64().unwrap(), 0.0);
    assert_eq!(r["command"][0], "norm");
    assert_eq!(r["inputs_digest"].as_str().unwrap().len(), 64);
    assert!(r.get("wall_time_s").is_none());
}

#[test]
fn norm_all_functions_and_degenerate_branch() {
    let r = json(&["norm", "--instance", &path("linear.json")]);
    let u1 = &r["results"]["u1"];
    assert_eq!(u1["degenerate"], Value::Bool(true));
    assert!((u1["orlicz"].as_f64().unwrap() - 1.5).abs() < 1e-12);
    assert!(r["results"]["off_support"].is_object());
}

#[test]
fn output_is_deterministic() {
    let p = path("kink.json");
    let a = orlicz(&["support", "--instance", &p, "--function", "u1", "--json"]);
    let b = orlicz(&["support", "--instance", &p, "--function", "u1", "--json"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn every_subcommand_produces_a_report() {
    let pw = path("power2.json");
    let kink = path("kink.json");
    let lin = path("linear.json");
    let ind = path("indicator.json");
    let cases: Vec<Vec<&str>> = vec![
        vec!["conjugate", "--instance", &pw, "--atom", "1", "--v", "0,1,2"],
        vec!["dual", "--instance", &lin, "--density", "v1", "--singular", "0.25"],
        vec!["oracle", "--instance", &pw, "--function", "u2", "--resolution", "100"],
        vec!["support", "--instance", &kink, "--function", "u1", "--rule", "sequential"],
        vec!["smooth-point", "--instance", &kink, "--function", "u1", "--census", "100"],
        vec!["smooth-space", "--instance", &ind],
        vec!["delta2", "--instance", &ind, "--k", "100"],
        vec!["gap", "--instance", &kink, "--delta", "0.5"],
        vec!["gallery", "--ladder", "8,16"],
        vec!["selftest", "--only", "11"],
    ];
    for c in cases {
        let r = json(&c);
        assert!(r["results"].is_object() || r["results"].is_array(), "{c:?}");
    }
}

#[test]
fn geometry_reports() {
    let r = json(&["smooth-space", "--instance", &path("power2.json")]);
    assert_eq!(r["results"]["verdict"], Value::Bool(true));
    let r = json(&["smooth-space", "--instance", &path("linear.json")]);
    assert_eq!(r["results"]["failing"], serde_json::json!(["a", "c"]));
    let r = json(&["smooth-point", "--instance", &path("kink.json"), "--function", "u1"]);
    assert_eq!(r["results"]["verdict"], "not_smooth");
    let w = r["results"]["witness"].as_array().unwrap();
    assert_eq!(w.len(), 2);
    let r = json(&["gap", "--instance", &path("kink.json"), "--delta", "1.5"]);
    assert_eq!(r["results"]["u_delta"], serde_json::json!(["inf", "inf"]));
    let r = json(&["conjugate", "--instance", &path("indicator.json"), "--v", "2"]);
    assert_eq!(r["results"]["table"][0][1].as_f64().unwrap(), 2.0);
    let r = json(&["dual", "--instance", &path("linear.json"), "--density", "v1", "--singular", "0.25"]);
    assert!((r["results"]["norm"].as_f64().unwrap() - 1.0).abs() < 1e-9);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let zero_w = dir.path().join("zero.json");
    std::fs::write(
        &zero_w,
        r#"{"space": {"atoms": [{"t": 0.25, "w": 0.5}, {"t": 0.75, "w": 0.0}]}, "phi": {"family": "power", "p": 2.0}}"#,
    )
    .unwrap();
    let out = orlicz(&["smooth-space", "--instance", zero_w.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("atom 1"));

    let shape = dir.path().join("shape.json");
    std::fs::write(
        &shape,
        r#"{"space": {"atoms": [{"t": 0.25, "w": 0.5}, {"t": 0.75, "w": 0.5}]}, "phi": {"family": "varexp", "p_values": [2, 3, 4]}}"#,
    )
    .unwrap();
    let out = orlicz(&["smooth-space", "--instance", shape.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("p_values"));

    let out = orlicz(&["norm", "--instance", &path("power2.json"), "--function", "nope"]);
    assert_eq!(out.status.code(), Some(2));
    let out = orlicz(&["bogus"]);
    assert_eq!(out.status.code(), Some(2));
    let out = orlicz(&["norm", "--instance", "/nonexistent.json"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn bracket_failure_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("huge.json");
    std::fs::write(
        &f,
        r#"{"space": {"atoms": [{"t": 0.25, "w": 0.5}, {"t": 0.75, "w": 0.5}]}, "phi": {"family": "power", "p": 2.0}, "functions": {"v": [1e300, 0.0]}}"#,
    )
    .unwrap();
    let out = orlicz(&["dual", "--instance", f.to_str().unwrap(), "--density", "v"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn tolerance_override_scales_eps() {
    let p = path("kink.json");
    let out = Command::new(env!("CARGO_BIN_EXE_orlicz"))
        .args(["smooth-point", "--instance", &p, "--function", "u1", "--json"])
        .env("MO_TOL_OVERRIDE", "10")
        .output()
        .unwrap();
    let r: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!((r["tolerances"]["eps_eq"].as_f64().unwrap() - 1e-6).abs() < 1e-18);
    let out = Command::new(env!("CARGO_BIN_EXE_orlicz"))
        .args(["smooth-point", "--instance", &p, "--function", "u1"])
        .env("MO_TOL_OVERRIDE", "abc")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn text_output_and_timing() {
    let out = orlicz(&["norm", "--instance", &path("power2.json"), "--function", "u1", "--timing"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.lines().any(|l| l.starts_with("results.luxemburg ")), "{text}");
    assert!(text.contains("wall_time_s"));
}

#[test]
fn selftest_reports_each_criterion() {
    let out = orlicz(&["selftest", "--only", "3"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("[PRIMARY] criterion  3 PASS"));
    let out = orlicz(&["selftest", "--only", "10"]);
    assert_eq!(out.status.code(), Some(1));
}
