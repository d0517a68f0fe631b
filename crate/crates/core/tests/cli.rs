use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

const SQUARE: &str = r#"{"kind":"polygon","vertices":[["1/1","1/1"],["-1/1","1/1"],["-1/1","-1/1"],["1/1","-1/1"]]}"#;
const PENTAGON: &str = r#"{"kind":"polygon","vertices":[["2/1","0/1"],["1/1","2/1"],["-1/1","1/1"],["-1/1","-1/1"],["1/1","-2/1"]]}"#;
const CLASSICAL3: &str = r#"{"kind":"classical","n":3}"#;
const PSD2: &str = r#"{"kind":"psd","n":2}"#;
const LORENTZ2: &str = r#"{"kind":"lorentz","n":2,"r":"1/1"}"#;

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    fs::write(&path, text).unwrap();
    path
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_conetensor")).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

#[test]
fn certify_square_pair_and_verify() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.json", SQUARE);
    let cert = dir.path().join("cert.json");
    let report = dir.path().join("report.json");
    let out = run(&["certify", "--a", s(&sq), "--b", s(&sq), "--out", s(&cert), "--report", s(&report)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let body: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(body["separation_value"], "-1/1");
    let rep: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["command"], "certify");
    assert_eq!(rep["result"]["certificate"], body);

    let out = run(&["verify", "--cert", s(&cert), "--a", s(&sq), "--b", s(&sq)]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("certificate valid"));
}

#[test]
fn tampered_certificate_is_rejected() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.json", SQUARE);
    let cert = dir.path().join("cert.json");
    assert_eq!(run(&["certify", "--a", s(&sq), "--b", s(&sq), "--out", s(&cert)]).status.code(), Some(0));
    let mut body: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    body["witness"][0][0] = Value::String("7/1".into());
    fs::write(&cert, body.to_string()).unwrap();
    let out = run(&["verify", "--cert", s(&cert), "--a", s(&sq), "--b", s(&sq)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("certificate invalid"));
}

#[test]
fn classical_input_exits_two_with_basis() {
    let dir = TempDir::new().unwrap();
    let cl = write(&dir, "classical3.json", CLASSICAL3);
    let sq = write(&dir, "square.json", SQUARE);
    let report = dir.path().join("report.json");
    let out = run(&["certify", "--a", s(&cl), "--b", s(&sq), "--report", s(&report)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).contains("first cone is classical"));
    let rep: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["result"]["basis"].as_array().unwrap().len(), 3);
}

#[test]
fn certificates_are_deterministic() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.json", SQUARE);
    let pent = write(&dir, "pentagon.json", PENTAGON);
    let (c1, c2) = (dir.path().join("c1.json"), dir.path().join("c2.json"));
    for c in [&c1, &c2] {
        assert_eq!(run(&["certify", "--a", s(&pent), "--b", s(&sq), "--out", s(c)]).status.code(), Some(0));
    }
    assert_eq!(fs::read(&c1).unwrap(), fs::read(&c2).unwrap());
}

#[test]
fn semiquantum_round_trip() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.json", SQUARE);
    let psd = write(&dir, "psd2.json", PSD2);
    let cert = dir.path().join("cert.json");
    let out = run(&["certify", "--a", s(&sq), "--b", s(&psd), "--out", s(&cert), "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let out = run(&["verify", "--cert", s(&cert), "--a", s(&sq), "--b", s(&psd)]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn cone_info_and_dual() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.json", SQUARE);
    let report = dir.path().join("r.json");
    let out = run(&["cone-info", s(&sq), "--report", s(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let rep: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["result"]["extreme_rays"].as_array().unwrap().len(), 4);
    assert_eq!(rep["result"]["classical"], false);

    let out = run(&["dual", s(&sq)]);
    assert_eq!(out.status.code(), Some(0));
    let dual: Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(dual["kind"], "polyhedral");
}

#[test]
fn tensor_analyze_modes() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.json", SQUARE);
    let id = write(&dir, "id.json", r#"[["1/1","0/1","0/1"],["0/1","1/1","0/1"],["0/1","0/1","1/1"]]"#);
    let report = dir.path().join("r.json");
    let cert = dir.path().join("cert.json");
    assert_eq!(run(&["certify", "--a", s(&sq), "--b", s(&sq), "--out", s(&cert)]).status.code(), Some(0));
    let body: Value = serde_json::from_str(&fs::read_to_string(&cert).unwrap()).unwrap();
    let witness = write(&dir, "witness.json", &body["witness"].to_string());
    let out = run(&["tensor-analyze", "--a", s(&sq), "--b", s(&sq), "--tensor", s(&witness), "--mode", "both", "--report", s(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let rep: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["result"]["max"]["member"], true);
    assert_eq!(rep["result"]["min"]["member"], false);
    assert_eq!(rep["result"]["min"]["separation_value"], "-1/1");

    let out = run(&["tensor-analyze", "--a", s(&sq), "--b", s(&sq), "--tensor", s(&witness), "--mode", "max", "--report", s(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let rep: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert!(rep["result"].get("min").is_none());

    // Centered identity on L₂ ⊗ L₂: in the max product, outside the min product.
    let lor = write(&dir, "lorentz.json", LORENTZ2);
    let out = run(&["tensor-analyze", "--a", s(&lor), "--b", s(&lor), "--tensor", s(&id), "--report", s(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let rep: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["result"]["max"]["member"], true);
    assert_eq!(rep["result"]["min"]["member"], false);
}

#[test]
fn norms_report_fields() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.json", r#"{"ball":{"kind":"polytope","vertices":[["1/1","1/1"],["-1/1","1/1"],["-1/1","-1/1"],["1/1","-1/1"]]}}"#);
    let z = write(&dir, "chsh.json", r#"[["1/1","1/1"],["1/1","-1/1"]]"#);
    let report = dir.path().join("r.json");
    let out = run(&["norms", "--space-x", s(&sq), "--space-y", s(&sq), "--tensor", s(&z), "--report", s(&report)]);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let rep: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    let r = &rep["result"];
    assert_eq!(r["epsilon"], "1/1");
    assert_eq!(r["pi"], "2/1");
    assert_eq!(r["lower_bound"], "1/2");
    assert!(r["state"].is_array());
    assert!(r["robustness"].is_string());
}

#[test]
fn robustness_of_separable_state_is_zero() {
    let dir = TempDir::new().unwrap();
    let sq = write(&dir, "square.json", SQUARE);
    let state = write(&dir, "state.json", r#"[["0/1","0/1","0/1"],["0/1","0/1","0/1"],["0/1","0/1","1/1"]]"#);
    let report = dir.path().join("r.json");
    let out = run(&["robustness", "--a", s(&sq), "--b", s(&sq), "--state", s(&state), "--report", s(&report)]);
    assert_eq!(out.status.code(), Some(0));
    let rep: Value = serde_json::from_str(&fs::read_to_string(&report).unwrap()).unwrap();
    assert_eq!(rep["result"]["robustness"]["value"], "0/1");
}

#[test]
fn repro_single_criterion_and_corruption() {
    let out = run(&["repro", "--only", "omega-identity"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert_eq!(text.lines().count(), 1);
    assert!(text.starts_with("[PASS] omega-identity"));

    let out = run(&["repro", "--only", "asphericity", "--corrupt", "asphericity"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stdout(&out).starts_with("[FAIL] asphericity"));
}

#[test]
fn malformed_input_exits_one() {
    let dir = TempDir::new().unwrap();
    let bad = write(&dir, "bad.json", r#"{"kind":"banana"}"#);
    assert_eq!(run(&["cone-info", s(&bad)]).status.code(), Some(1));
    assert_eq!(run(&["cone-info", "/nonexistent/file.json"]).status.code(), Some(1));
    assert_eq!(run(&["repro", "--only", "no-such-criterion"]).status.code(), Some(1));
}
