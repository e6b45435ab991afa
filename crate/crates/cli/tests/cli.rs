use std::process::{Command, Output};

use serde_json::{json, Value};

fn nctorus(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_nctorus"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_scenario(dir: &tempfile::TempDir, name: &str, body: &str) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, body).unwrap();
    path.to_str().unwrap().to_owned()
}

#[test]
fn scalar_builtin_reports_i() {
    let out = nctorus(&["--builtin", "paper-scalar"]);
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["v"], json!(1));
    assert_eq!(report["command"], json!("wilson"));
    assert_eq!(report["result"]["value"], json!([0.0, 1.0]));
    assert_eq!(report["meta"]["tool"], json!("nctorus"));
}

#[test]
fn rotation_builtin_block() {
    let report = stdout_json(&nctorus(&["--builtin", "paper-4x4"]));
    // the report rounds to 15 significant digits
    let h: f64 = "0.707106781186548".parse().unwrap();
    assert_eq!(report["result"]["matrix"][0][0], json!([h, 0.0]));
    assert_eq!(report["result"]["matrix"][0][1], json!([-h, 0.0]));
    assert_eq!(report["result"]["matrix"][3][3], json!([1.0, 0.0]));
}

#[test]
fn cover_builtin_classification() {
    let report = stdout_json(&nctorus(&["--builtin", "paper-cover"]));
    let paths = report["result"]["paths"].as_array().unwrap();
    let closed: Vec<_> = paths.iter().map(|p| p["closed"].clone()).collect();
    assert_eq!(
        closed,
        vec![json!(true), json!(true), json!(false), json!(true)]
    );
    assert_eq!(paths[3]["deck"], json!([1, 0]));
}

#[test]
fn infinite_builtin() {
    let report = stdout_json(&nctorus(&["--builtin", "paper-infinite"]));
    assert_eq!(report["result"]["value"], json!([0.0, 1.0]));
}

#[test]
fn output_is_deterministic() {
    for name in ["paper-scalar", "paper-4x4", "paper-cover", "paper-infinite"] {
        let a = nctorus(&["--builtin", name]);
        let b = nctorus(&["--builtin", name]);
        assert_eq!(a.stdout, b.stdout, "{name}");
    }
}

#[test]
fn report_replays_itself() {
    let dir = tempfile::tempdir().unwrap();
    let first = stdout_json(&nctorus(&["--builtin", "paper-4x4"]));
    let path = write_scenario(&dir, "replay.json", &first["scenario"].to_string());
    let second = stdout_json(&nctorus(&["--scenario", &path]));
    assert_eq!(first, second);
}

#[test]
fn command_override() {
    let report = stdout_json(&nctorus(&[
        "--builtin",
        "paper-scalar",
        "--command",
        "flat",
    ]));
    assert_eq!(report["result"], json!({"flat": true}));
    let out = nctorus(&["--builtin", "paper-scalar", "--command", "nonsense"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn out_flag_writes_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("report.json");
    let out = nctorus(&[
        "--builtin",
        "paper-cover",
        "--pretty",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    assert!(text.contains("\n  "));
    let report: Value = serde_json::from_str(&text).unwrap();
    assert_eq!(report["command"], json!("classify"));
}

#[test]
fn malformed_scenario_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(&dir, "bad.json", "{\"v\":1,\"command\":\"flat\"");
    let out = nctorus(&["--scenario", &path]);
    assert_eq!(out.status.code(), Some(2));
    let body: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(body["error"], json!("schema"));
}

#[test]
fn param_validation_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        &dir,
        "theta.json",
        r#"{"v":1,"command":"classify","theta":0.0,"paths":[[1,0]]}"#,
    );
    assert_eq!(nctorus(&["--scenario", &path]).status.code(), Some(2));
    let path = write_scenario(
        &dir,
        "ragged.json",
        r#"{"v":1,"command":"flat","theta":0.3,
            "connection":{"rank":2,"theta_u":[[[0,0]]],"theta_v":[[[0,0]]]}}"#,
    );
    assert_eq!(nctorus(&["--scenario", &path]).status.code(), Some(2));
}

#[test]
fn non_flat_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        &dir,
        "nonflat.json",
        r#"{"v":1,"command":"wilson","theta":0.3,"covering":{"degrees":[2,2]},"params":{"deck":[1,0]},
            "connection":{"rank":2,"theta_u":[[[0,0],[1,0]],[[0,0],[0,0]]],"theta_v":[[[0,0],[0,0]],[[1,0],[0,0]]]}}"#,
    );
    let out = nctorus(&["--scenario", &path]);
    assert_eq!(out.status.code(), Some(3));
    let body: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(body["error"], json!("not_flat"));
}

#[test]
fn zero_weight_exits_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = write_scenario(
        &dir,
        "zero.json",
        r#"{"v":1,"command":"classify","theta":0.3,"paths":[[0,0]]}"#,
    );
    let out = nctorus(&["--scenario", &path]);
    assert_eq!(out.status.code(), Some(3));
    let body: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(body["error"], json!("zero_weight"));
}

#[test]
fn stdin_scenario() {
    use std::io::Write;
    use std::process::Stdio;
    let mut child = Command::new(env!("CARGO_BIN_EXE_nctorus"))
        .args(["--scenario", "-"])
        .stdin(Stdio::piped())
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    child
        .stdin
        .take()
        .unwrap()
        .write_all(br#"{"v":1,"command":"classify","theta":0.5,"covering":{"degrees":[2,3]},"paths":[[1,1]]}"#)
        .unwrap();
    let out = child.wait_with_output().unwrap();
    assert!(out.status.success());
    let report = stdout_json(&out);
    assert_eq!(report["result"]["paths"][0]["deck"], json!([1, 1]));
}
