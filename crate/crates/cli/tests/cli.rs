use serde_json::Value;
use std::path::Path;
use std::process::{Command, Output};

fn tds(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tds"))
        .args(args)
        .env_remove("TDS_BUDGET_MS")
        .output()
        .expect("tds runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| {
        panic!("bad json ({e}): {}", String::from_utf8_lossy(&o.stdout))
    })
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn two_point_machine_matches_expectation() {
    let o = tds(&["check", "--catalog", "two_point_machine", "--expect"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = stdout_json(&o);
    for k in ["profile", "certificates", "curves", "guards"] {
        assert!(r.get(k).is_some(), "missing {k}");
    }
    assert_eq!(r["expectation"]["mismatches"].as_array().unwrap().len(), 0);
    assert_eq!(r["profile"]["verdicts"]["pointwise_ap"]["value"], Value::Bool(false));
    for c in r["certificates"].as_array().unwrap() {
        assert_eq!(c["replayed"], Value::Bool(true), "{c}");
    }
}

#[test]
fn report_keys_are_sorted() {
    let o = tds(&["check", "--catalog", "two_point_machine"]);
    let text = String::from_utf8_lossy(&o.stdout);
    let top: Vec<&str> = text
        .lines()
        .filter(|l| l.starts_with("  \""))
        .map(|l| l.trim_start().split('"').nth(1).unwrap())
        .collect();
    let mut sorted = top.clone();
    sorted.sort();
    assert_eq!(top, sorted);
}

#[test]
fn contraction_is_not_distal() {
    let o = tds(&["check", "--catalog", "contraction", "--properties", "distal"]);
    assert_eq!(code(&o), 1);
    let r = stdout_json(&o);
    let verdicts = r["profile"]["verdicts"].as_object().unwrap();
    assert_eq!(verdicts.len(), 1);
    assert_eq!(verdicts["distal"]["value"], Value::Bool(false));
    let certs = r["certificates"].as_array().unwrap();
    assert_eq!(certs.len(), 1);
    assert_eq!(certs[0]["witness"]["type"], "proximal_pair");
    assert_eq!(certs[0]["replayed"], Value::Bool(true));

    let o = tds(&["check", "--catalog", "contraction", "--properties", "equicontinuous"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn input_errors_exit_2() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(
        &bad,
        r#"{"space": {"kind": "finite", "n": 2, "leq": [[true, false], [false, true]]},
            "structure": {"kind": "semidecomposition", "member": [[true, false], [true, false]]}}"#,
    )
    .unwrap();
    let o = tds(&["check", "--instance", bad.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("axiom"), "{}", stderr(&o));

    let p = dir.path().join("p.json");
    std::fs::write(&p, r#"{"space": {"kind": "finite", "leq": [[true, true, false], [false, true, true], [false, false, true]]}}"#).unwrap();
    let o = tds(&["check", "--instance", p.to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("pre-order"), "{}", stderr(&o));

    for text in ["", "{", "[1, 2]", r#"{"space": 3}"#, r#"{"space": {"kind": "metric", "points": [[0], [1]], "metric": "euclidean", "scales": [1, 2]}}"#] {
        let f = dir.path().join("m.json");
        std::fs::write(&f, text).unwrap();
        let o = tds(&["check", "--instance", f.to_str().unwrap()]);
        assert_eq!(code(&o), 2, "{text}");
        assert!(stderr(&o).starts_with("error:"), "{text}: {}", stderr(&o));
    }
    let o = tds(&["check", "--instance", dir.path().join("missing.json").to_str().unwrap()]);
    assert_eq!(code(&o), 2);
    let o = tds(&["check", "--catalog", "contraction", "--properties", "nosuch"]);
    assert_eq!(code(&o), 2);
    let o = tds(&["check", "--catalog", "contraction", "--param", "C=2"]);
    assert_eq!(code(&o), 2);
    let o = tds(&["check", "--catalog", "contraction", "--param", "C"]);
    assert_eq!(code(&o), 2);
}

#[test]
fn mine_three_points() {
    let o = tds(&["mine", "--max-points", "3"]);
    let r = stdout_json(&o);
    assert_eq!(r["pairs"], 841);
    assert_eq!(r["r_closed_routes"]["disagree"], 0);
    // the violations all come from symmetric R without minimal closures
    let v = r["violations"].as_array().unwrap();
    for x in v {
        assert_eq!(x["certificate"]["witness"]["edge"], "symmetric_r => pointwise_ap");
    }
    assert_eq!(code(&o), if v.is_empty() { 0 } else { 1 });
}

#[test]
fn mine_budget() {
    let o = tds(&["mine", "--max-points", "9"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("budget"));
    let o = tds(&["mine", "--max-points", "5"]);
    assert_eq!(code(&o), 2);
    let o = Command::new(env!("CARGO_BIN_EXE_tds"))
        .args(["check", "--catalog", "toral_flow"])
        .env("TDS_BUDGET_MS", "1")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("budget"));
}

#[test]
fn catalog_commands() {
    let o = tds(&["catalog", "--list"]);
    assert_eq!(code(&o), 0);
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().count(), 8);

    let o = tds(&["catalog", "--name", "nosuch"]);
    assert_eq!(code(&o), 2);
    assert!(stderr(&o).contains("unknown catalog entry"));

    let dir = tempfile::tempdir().unwrap();
    let f = dir.path().join("denjoy.json");
    let o = tds(&["catalog", "--name", "denjoy", "--param", "N=16", "--emit", f.to_str().unwrap(), "--expect"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(&f).unwrap()).unwrap();
    assert_eq!(doc["space"]["points"].as_array().unwrap().len(), 2 * (2 * 16 + 1));
    assert_eq!(doc["expected"]["distal"], Value::Bool(false));
    let o = tds(&["check", "--instance", f.to_str().unwrap(), "--expect"]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
}

fn round_trip(name: &str, params: &[&str], dir: &Path) {
    let f = dir.join(format!("{name}.json"));
    let mut args = vec!["catalog", "--name", name, "--emit", f.to_str().unwrap()];
    for p in params {
        args.extend(["--param", p]);
    }
    let o = tds(&args);
    assert_eq!(code(&o), 0, "{name}: {}", stderr(&o));
    let o = tds(&["profile", "--instance", f.to_str().unwrap(), "--format", "csv"]);
    assert!(code(&o) <= 1, "{name}: {}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.starts_with("property,verdict,scale,witness\n"), "{name}");
    assert!(text.lines().count() > 1, "{name}");
}

#[test]
fn emitted_instances_reparse() {
    let dir = tempfile::tempdir().unwrap();
    round_trip("two_point_machine", &[], dir.path());
    round_trip("contraction", &["m=16"], dir.path());
    round_trip("toral_flow", &["grid=16", "depth=40", "dt=0.05"], dir.path());
    round_trip("time_one_toral_map", &["grid=16", "depth=20"], dir.path());
    round_trip("sphere_flow", &["lat_grid=16", "lon_grid=16", "depth=20"], dir.path());
    round_trip("denjoy", &["N=8"], dir.path());
    round_trip("cubic_metric_shift", &["level=2", "N=2"], dir.path());
    round_trip("punctured_irrational_flow", &["depth=20"], dir.path());
}

#[test]
fn human_and_curves_output() {
    let dir = tempfile::tempdir().unwrap();
    let o = tds(&[
        "check",
        "--catalog",
        "contraction",
        "--format",
        "human",
        "--curves-dir",
        dir.path().to_str().unwrap(),
    ]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let text = String::from_utf8_lossy(&o.stdout);
    assert!(text.contains("distal: false"));
    assert!(text.contains("E curve"));
    let e = std::fs::read_to_string(dir.path().join("E.csv")).unwrap();
    assert!(e.starts_with("delta,value\n"));
    assert_eq!(e.lines().count(), 10);
}

#[test]
fn scale_and_depth_overrides() {
    let o = tds(&["check", "--catalog", "contraction", "--scales", "0.5,0.25", "--depth", "8", "--properties", "r_closed"]);
    assert_eq!(code(&o), 0, "{}", stderr(&o));
    let r = stdout_json(&o);
    assert_eq!(r["profile"]["verdicts"]["r_closed"]["scale"], 0.25);
    let o = tds(&["check", "--catalog", "contraction", "--scales", "0.25,0.5"]);
    assert_eq!(code(&o), 2);
    let o = tds(&["check", "--catalog", "two_point_machine", "--depth", "3"]);
    assert_eq!(code(&o), 2);
}
