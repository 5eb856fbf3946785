use std::path::PathBuf;
use std::process::{Command, Output};

use invmellin::closedform::{normalize, parse_sexpr, to_sexpr};
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name)
}

fn tmp(name: &str) -> PathBuf {
    std::env::temp_dir().join(format!("invmellin-cli-{}-{name}", std::process::id()))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_invmellin"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_json(args: &[&str], name: &str) -> (Output, String) {
    let out = tmp(name);
    let mut all: Vec<&str> = args.to_vec();
    let path = out.to_str().unwrap().to_string();
    all.extend(["--json-out", &path]);
    let res = run(&all);
    let text = std::fs::read_to_string(&out).unwrap_or_default();
    let _ = std::fs::remove_file(&out);
    (res, text)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(name: &str) -> String {
    fixture(name).to_str().unwrap().to_string()
}

fn assert_round_trips(s: &str) {
    let e = parse_sexpr(s).unwrap_or_else(|err| panic!("{s}: {err}"));
    let n = normalize(&e);
    assert_eq!(normalize(&parse_sexpr(&to_sexpr(&n)).unwrap()), n, "{s}");
}

#[test]
fn trivial_problem_certifies_with_constant_basis() {
    let (out, json) = run_json(&["invmellin", &path("trivial.json")], "trivial.json");
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["status"], "Certified");
    assert_eq!(v["basis"], serde_json::json!(["1"]));
}

#[test]
fn binom_3n_report() {
    let args = ["invmellin", &path("example1.json")];
    let (out, json) = run_json(&args, "ex1a.json");
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let (_, again) = run_json(&args, "ex1b.json");
    assert_eq!(json, again, "report is not byte-stable");

    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["status"], "Certified");
    assert_eq!(
        v["ode"],
        serde_json::json!([["-4", "27"], ["0", "-36", "63"], ["0", "0", "-18", "18"]])
    );
    let exact: Vec<&str> = v["constants"]
        .as_array()
        .unwrap()
        .iter()
        .filter_map(|c| c["exact"].as_str())
        .collect();
    assert!(exact.contains(&"(* 1/4 (sqrtint 3) (pow pi -1))"), "{exact:?}");
    let numeric: f64 = v["constants"][0]["numeric"].as_str().unwrap().parse().unwrap();
    assert!((numeric - 0.137_832_223_855_448).abs() < 1e-15, "{numeric}");

    let mut sexprs: Vec<String> = v["basis"]
        .as_array()
        .unwrap()
        .iter()
        .map(|b| b.as_str().unwrap().to_string())
        .collect();
    sexprs.push(v["expr"].as_str().unwrap().to_string());
    sexprs.extend(exact.iter().map(|s| s.to_string()));
    for s in &sexprs {
        assert_round_trips(s);
    }
}

#[test]
fn airy_type_core_is_reported_unsolved() {
    let (out, json) = run_json(&["invmellin", &path("airy_type.json")], "airy.json");
    assert_eq!(out.status.code(), Some(1));
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["status"], "Unsolved");
    assert!(v["expr"].is_null());
    assert!(v["diagnostics"].to_string().contains("NoLiouvillian core"));
}

#[test]
fn partial_stage_succeeds() {
    let (out, json) = run_json(&["invmellin", &path("example1.json"), "--stage", "ode"], "stage.json");
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["stage"], "ode");
    assert!(v["basis"].as_array().unwrap().is_empty());
}

#[test]
fn input_errors_exit_with_two() {
    let bad = tmp("bad.json");
    std::fs::write(
        &bad,
        r#"{"recurrence": {"order": 1, "coeffs": [[1], []]}, "offset": 0, "initial_values": []}"#,
    )
    .unwrap();
    let unknown = tmp("unknown.json");
    std::fs::write(
        &unknown,
        r#"{"recurrence": {"order": 0, "coeffs": [[1]]}, "offset": 0, "initial_values": [], "extra": 1}"#,
    )
    .unwrap();
    let cases: Vec<Vec<String>> = vec![
        vec!["invmellin".into(), "/nonexistent/problem.json".into()],
        vec!["invmellin".into(), bad.to_str().unwrap().into()],
        vec!["invmellin".into(), unknown.to_str().unwrap().into()],
        vec!["invmellin".into(), path("trivial.json"), "--window".into(), "5:1".into()],
        vec!["invmellin".into(), path("trivial.json"), "--stage".into(), "nope".into()],
        vec!["kovacic".into(), path("trivial.json")],
        vec!["verify".into(), path("example1.json")],
        vec!["frobnicate".into()],
    ];
    for args in cases {
        let argv: Vec<&str> = args.iter().map(String::as_str).collect();
        assert_eq!(run(&argv).status.code(), Some(2), "{args:?}");
    }
    let _ = std::fs::remove_file(bad);
    let _ = std::fs::remove_file(unknown);
}

#[test]
fn kovacic_outputs() {
    let (out, json) = run_json(&["kovacic", &path("kovacic_example.json")], "k1.json");
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["case"], "QuadraticOmega");
    assert_eq!(v["solutions"].as_array().unwrap().len(), 2);
    for s in v["solutions"].as_array().unwrap() {
        assert_round_trips(s.as_str().unwrap());
    }

    let (out, json) = run_json(&["kovacic", &path("d2_minus_1.json")], "k2.json");
    assert_eq!(out.status.code(), Some(0));
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["case"], "RationalOmega");
    assert!(stdout(&out).contains("omega: 1"), "{}", stdout(&out));

    let out = run(&["kovacic", &path("airy.json")]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).contains("no Liouvillian solutions"));
}

#[test]
fn verify_accepts_shipped_identity_and_rejects_perturbation() {
    let out = run(&["verify", &path("id_binom4n2n.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    let (out, json) = run_json(&["verify", &path("id_binom4n2n_perturbed.json")], "pert.json");
    assert_eq!(out.status.code(), Some(1), "{}", stdout(&out));
    let v: Value = serde_json::from_str(&json).unwrap();
    assert_eq!(v["pass"], false);
}

#[test]
fn verify_nested_double_integral_identity() {
    let out = run(&["verify", &path("id_sum_binom3i_over_i2.json")]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
}
