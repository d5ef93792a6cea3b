use std::path::PathBuf;
use std::process::{Command, Output};

use qwalk_core::cli::{exit_code, EXIT_UNRESOLVED};
use qwalk_core::Error;
use serde_json::Value;

fn fixture(name: &str) -> String {
    let p = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures").join(name);
    p.to_str().unwrap().to_owned()
}

fn qwalk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(args)
        .output()
        .expect("run qwalk")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON output")
}

#[test]
fn analyze_grover4() {
    let v = json(&qwalk(&["analyze", &fixture("grover4.json"), "--grid", "512"]));
    assert_eq!(v["realizability"]["realizable"], false);
    assert_eq!(v["realizability"]["det_winding"], 0);
    assert_eq!(v["schema_version"], 1);
    let bands: i64 = v["bands"].as_array().unwrap().iter().map(|b| b["winding"].as_i64().unwrap()).sum();
    assert_eq!(bands, 0);
}

#[test]
fn analyze_identity_and_cube_root() {
    let v = json(&qwalk(&["analyze", &fixture("identity2.json"), "--grid", "64"]));
    let c = &v["decomposition"]["constants"];
    assert_eq!(c.as_array().unwrap().len(), 1);
    assert_eq!(c[0]["mult"], 2);
    assert_eq!(v["commutant"]["summands"][0]["kind"], "band_algebra");
    let v = json(&qwalk(&["analyze", &fixture("cube_root.json"), "--grid", "256"]));
    let p = &v["decomposition"]["primes"][0];
    assert_eq!((p["rate"]["num"].as_i64(), p["rate"]["den"].as_i64()), (Some(2), Some(3)));
    assert_eq!(p["mult"], 2);
}

#[test]
fn reports_are_deterministic() {
    let args = ["analyze", "builtin:grover3", "--grid", "256"];
    let a = qwalk(&args);
    let b = qwalk(&args);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn golden_outputs() {
    let golden = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/golden");
    let cases = [
        (vec!["decompose", "builtin:cube_root", "--grid", "256"], "cube_root_decompose.json"),
        (vec!["realizable", "builtin:grover3", "--grid", "256"], "grover3_realizable.json"),
        (vec!["realizable", "builtin:det_winding:0.6:0.8", "--grid", "256", "--format", "csv"], "det_winding_realizable.csv"),
    ];
    for (args, file) in cases {
        let out = qwalk(&args);
        assert!(out.status.success());
        let want = std::fs::read_to_string(golden.join(file)).unwrap();
        assert_eq!(String::from_utf8(out.stdout).unwrap(), want, "{file}");
    }
}

#[test]
fn simulate_free_walk_csv() {
    let out = qwalk(&["simulate", &fixture("free.json"), "--steps", "10", "--format", "csv"]);
    assert!(out.status.success());
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "t,x,x_over_t,mass\n10,10,1,1e0\n");
    let table = String::from_utf8(out.stderr).unwrap();
    assert!(table.starts_with("t\tm1"));
}

#[test]
fn simulate_grover3_limit_law() {
    let v = json(&qwalk(&[
        "simulate",
        &fixture("grover3.json"),
        "--state",
        &fixture("states/grover3_e2.json"),
        "--steps",
        "50",
        "--limit-law",
        "--grid",
        "512",
    ]));
    let atom = v["atoms"][0]["mass"].as_f64().unwrap();
    assert!(atom > 0.1);
    assert_eq!(v["atoms"][0]["velocity"], 0.0);
    assert_eq!(v["histogram"]["masses"].as_array().unwrap().len(), 401);
}

#[test]
fn simulate_coined_stays_in_cone() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("dist.csv");
    let out = qwalk(&[
        "simulate",
        "builtin:coined:0.5",
        "--builtin",
        "uniform",
        "--steps",
        "200",
        "--csv",
        csv.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&csv).unwrap();
    let inside: f64 = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect::<Vec<_>>())
        .filter(|f| f[1].parse::<i64>().unwrap().abs() <= 110)
        .map(|f| f[3].parse::<f64>().unwrap())
        .sum();
    assert!(inside >= 0.99, "{inside}");
    let v: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(v["checkpoints"][0]["t"], 200);
}

#[test]
fn intertwine_examples() {
    let v = json(&qwalk(&["intertwine", &fixture("grover4.json"), &fixture("grover4_subwalk.json"), "--grid", "512"]));
    assert_eq!(v["nonzero"], true);
    let kinds: Vec<&str> = v["entries"]
        .as_array()
        .unwrap()
        .iter()
        .flat_map(|r| r.as_array().unwrap().iter().map(|e| e["kind"].as_str().unwrap()))
        .collect();
    assert_eq!(kinds.iter().filter(|k| **k == "model_translation").count(), 2);
    let v = json(&qwalk(&[
        "intertwine",
        &fixture("grover4_subwalk.json"),
        &fixture("grover3_subwalk.json"),
        "--grid",
        "512",
    ]));
    assert_eq!(v["nonzero"], false);
    let v = json(&qwalk(&["intertwine", "builtin:coined:0.5", "builtin:coined:0.5", "--grid", "256"]));
    assert_eq!(v["nonzero"], true);
}

#[test]
fn realizable_writes_witness() {
    let dir = tempfile::tempdir().unwrap();
    let out = qwalk(&[
        "realizable",
        "builtin:grover3",
        "--grid",
        "128",
        "--witness-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.path().join("band_1.csv")).unwrap();
    assert!(csv.starts_with("k,h\n"));
    assert_eq!(csv.lines().count(), 1 + 2 * 128);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, r#"{"n":1,"terms":[{"shift":0,"matrix":[[[0.5,0]]]}]}"#).unwrap();
    assert_eq!(qwalk(&["analyze", bad.to_str().unwrap()]).status.code(), Some(2));
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(qwalk(&["decompose", bad.to_str().unwrap()]).status.code(), Some(2));
    assert_eq!(qwalk(&["analyze", "builtin:nope"]).status.code(), Some(2));
    assert_eq!(qwalk(&["analyze", "/nonexistent/walk.json"]).status.code(), Some(1));
    assert_eq!(qwalk(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(qwalk(&["analyze", "builtin:grover4", "--grid", "100"]).status.code(), Some(2));
    let out = qwalk(&["simulate", "builtin:grover4", "--state", &fixture("states/uniform2.json")]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("dimension mismatch"));
    let capped = Command::new(env!("CARGO_BIN_EXE_qwalk"))
        .args(["simulate", "builtin:grover4", "--steps", "1000"])
        .env("QWALK_MEM_CAP_MB", "0")
        .output()
        .unwrap();
    assert_eq!(capped.status.code(), Some(1));
    assert_eq!(exit_code(&Error::UnresolvedCrossing { k_lo: 0.0, k_hi: 0.1 }), EXIT_UNRESOLVED);
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("dec.csv");
    let r = qwalk(&["decompose", "builtin:grover3", "--grid", "128", "--format", "csv", "--out", out.to_str().unwrap()]);
    assert!(r.status.success() && r.stdout.is_empty());
    let text = std::fs::read_to_string(out).unwrap();
    assert!(text.starts_with("kind,alpha_re"));
    assert!(text.contains("prime,,,1,2,1,0"));
}
