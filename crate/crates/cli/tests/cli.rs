use std::path::PathBuf;
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use rlab_core::io;
use serde_json::Value;

fn fixture(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
        .display()
        .to_string()
}

fn rlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rlab"))
        .args(args)
        .env_remove("RLAB_SEED")
        .output()
        .expect("binary runs")
}

fn json(args: &[&str]) -> (i32, Value) {
    let mut all = vec!["--format", "json"];
    all.extend_from_slice(args);
    let out = rlab(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{args:?}: stdout is not JSON ({e}): {}", String::from_utf8_lossy(&out.stdout))
    });
    (out.status.code().expect("exit code"), v)
}

fn schema() -> JSONSchema {
    let s: Value = serde_json::from_str(io::SCHEMA).unwrap();
    JSONSchema::compile(&s).expect("schema compiles")
}

fn assert_valid(v: &Value) {
    let s = schema();
    let msgs: Vec<String> = match s.validate(v) {
        Ok(()) => return,
        Err(errors) => errors.map(|e| format!("{} at {}", e, e.instance_path)).collect(),
    };
    panic!("schema violations: {msgs:?}");
}

fn dims(v: &Value, key: &str) -> Vec<(i64, u64)> {
    v.as_array()
        .unwrap()
        .iter()
        .map(|e| (e[key].as_i64().unwrap(), e["dim"].as_u64().unwrap()))
        .collect()
}

#[test]
fn split_three_lines_is_rejected() {
    let (code, r) = json(&["split", &fixture("three_lines.json")]);
    assert_eq!(code, 1);
    assert_eq!(r["status"], "rejected");
    assert_eq!(r["result"]["d_total"], 3);
    assert_eq!(r["result"]["dim"], 2);
    assert_eq!(r["result"]["splittable"], false);
    assert!(r["message"].as_str().unwrap().contains("3"));
}

#[test]
fn split_two_lines_succeeds() {
    let (code, r) = json(&["split", &fixture("two_lines.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["verified"], true);
    assert_eq!(r["result"]["d_total"], 2);
}

#[test]
fn favb_iwasawa_degree_one() {
    let (code, r) = json(&["favb", "--model", "iwasawa", "--k", "1"]);
    assert_eq!(code, 0);
    let res = &r["result"];
    assert_eq!(res["betti"], 4);
    for f in res["fiber_generic"].as_array().unwrap() {
        assert_eq!(f["dim"], 4);
        assert_eq!(f["matches"], true);
    }
    assert_eq!(dims(&res["fiber_zero"]["graded"], "p"), vec![(0, 2), (1, 2)]);
    assert_eq!(res["verified"], true);
    assert_valid(&r);
}

#[test]
fn verify_all_on_one_model() {
    let (code, r) = json(&["verify-all", "--model", "torus:g=1"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["passed"], true);
}

#[test]
fn rees_fiber_jumps_at_origin() {
    let (code, r) = json(&["rees", &fixture("three_lines.json"), "--fiber", "0,0,0"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["fiber"]["dim"], 3);
    assert_eq!(r["result"]["fiber_generic"], 2);
    assert_eq!(r["result"]["vector_bundle"], false);
}

#[test]
fn coker_of_two_lines_to_point_has_codim_two_torsion() {
    let (code, r) = json(&["coker", &fixture("two_lines_to_point.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["torsion_zero"], false);
    assert_eq!(r["result"]["torsion_support_codim"], 2);
    assert_eq!(r["result"]["n_strict"], false);
    let (_, s) = json(&["strict", &fixture("two_lines_to_point.json"), "--r", "1"]);
    assert_eq!(s["result"]["strict"], true);
}

#[test]
fn connections_flat_and_curved() {
    let (code, r) = json(&["connection", &fixture("flat_connection.json"), "--flatten"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["flat"], true);
    assert!(r["result"]["gauge"].as_array().is_some());
    let (code, r) = json(&["connection", &fixture("curved_connection.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["flat"], false);
    let (code, r) = json(&["connection", &fixture("curved_connection.json"), "--flatten"]);
    assert_eq!(code, 1);
    assert_eq!(r["status"], "rejected");
}

#[test]
fn favb2_without_real_structure_is_rejected() {
    let (code, r) = json(&["favb2", &fixture("synthetic_d2.json"), "--k", "1"]);
    assert_eq!(code, 1);
    assert!(r["message"].as_str().unwrap().contains("real structure"));
    let (code, r) = json(&["favb2", "--model", "torus:g=1", "--k", "1"]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["purity"]["total"], 2);
    assert_eq!(r["result"]["twistor_type"], serde_json::json!([1, 1]));
}

#[test]
fn input_errors_exit_two_with_diagnostics() {
    let cases: &[(&[&str], &[&str])] = &[
        (&["split", "non_descending.json"], &["filtrations[0]", "step 2", "step 1"]),
        (&["split", "float_entry.json"], &["filtrations[0].steps[0].span[0][0]", "line 2"]),
        (&["split", "truncated.json"], &["line 2", "EOF"]),
        (&["split", "future_version.json"], &["schema_version"]),
        (&["split", "two_lines_to_point.json"], &["filtered_map"]),
        (&["split", "missing.json"], &["missing.json"]),
    ];
    for (args, needles) in cases {
        let path = fixture(args[1]);
        let (code, r) = json(&[args[0], &path]);
        assert_eq!(code, 2, "{args:?}");
        assert_eq!(r["status"], "error");
        let msg = r["message"].as_str().unwrap();
        for n in *needles {
            assert!(msg.contains(n), "{args:?}: {msg}");
        }
        assert_valid(&r);
    }
    let (code, _) = json(&["favb", "--model", "iwasawa", "--k", "9"]);
    assert_eq!(code, 2);
    let (code, _) = json(&["favb", "--model", "klein-bottle", "--k", "1"]);
    assert_eq!(code, 2);
    let (code, _) = json(&["rees", &fixture("two_lines.json"), "--window", "0..1"]);
    assert_eq!(code, 2);
    let (code, _) = json(&["p1type", &fixture("three_lines.json")]);
    assert_eq!(code, 2);
}

#[test]
fn minimal_file_parses() {
    let (code, r) = json(&["split", &fixture("minimal.json")]);
    assert_eq!(code, 0);
    assert_eq!(r["result"]["dim"], 1);
}

#[test]
fn reports_are_byte_identical() {
    let args = ["--format", "json", "favb", "--model", "iwasawa", "--k", "2"];
    let a = rlab(&args);
    let b = rlab(&args);
    assert!(!a.stdout.is_empty());
    assert_eq!(a.stdout, b.stdout);
    let t1 = rlab(&["specseq", "--model", "torus:g=2"]);
    let t2 = rlab(&["specseq", "--model", "torus:g=2"]);
    assert_eq!(t1.stdout, t2.stdout);
}

#[test]
fn output_flag_writes_the_same_bytes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("r.json");
    let p = path.display().to_string();
    let direct = rlab(&["--format", "json", "split", &fixture("two_lines.json")]);
    let out = rlab(&["--format", "json", "-o", &p, "split", &fixture("two_lines.json")]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    assert_eq!(std::fs::read(&path).unwrap(), direct.stdout);
}

#[test]
fn exported_models_round_trip_and_match_builtins() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["torus:g=1", "torus:g=2", "iwasawa", "synthetic-d2"] {
        let out = rlab(&["models", "export", name]);
        assert!(out.status.success(), "{name}");
        let text = String::from_utf8(out.stdout).unwrap();
        let v: Value = serde_json::from_str(&text).unwrap();
        assert_valid(&v);
        let doc = io::parse_document(&text).unwrap();
        assert_eq!(io::emit(&doc), text);
        let path = dir.path().join(format!("{}.json", name.replace(':', "_")));
        std::fs::write(&path, &text).unwrap();
        let p = path.display().to_string();
        let (_, from_file) = json(&["specseq", &p]);
        let (_, from_model) = json(&["specseq", "--model", name]);
        assert_eq!(from_file["result"], from_model["result"], "{name}");
    }
}

#[test]
fn every_report_validates() {
    let runs: Vec<Vec<String>> = vec![
        vec!["split".into(), fixture("two_lines.json")],
        vec!["rees".into(), fixture("two_lines.json"), "--window".into(), "-2,-2..0,0".into()],
        vec!["fiber".into(), fixture("two_lines.json"), "--at".into(), "0,1".into()],
        vec!["strict".into(), fixture("two_lines_to_point.json"), "--r".into(), "2".into()],
        vec!["coker".into(), fixture("two_lines_to_point.json")],
        vec!["charts".into(), fixture("three_lines.json")],
        vec!["p1type".into(), fixture("two_lines.json")],
        vec!["connection".into(), fixture("flat_connection.json")],
        vec!["specseq".into(), fixture("synthetic_d2.json"), "--rmax".into(), "4".into()],
        vec!["favb".into(), fixture("synthetic_d2.json"), "--k".into(), "1".into()],
        vec!["favb".into(), "--model".into(), "torus:g=1".into(), "--k".into(), "1".into()],
        vec!["favb2".into(), "--model".into(), "iwasawa".into(), "--k".into(), "1".into()],
        vec!["models".into(), "list".into()],
    ];
    for args in runs {
        let refs: Vec<&str> = args.iter().map(String::as_str).collect();
        let (code, r) = json(&refs);
        assert_eq!(code, 0, "{args:?}: {r}");
        assert_valid(&r);
        assert_eq!(r["schema_version"], 1);
        assert_eq!(r["kind"], "report");
    }
}

#[test]
fn table_output_is_human_readable() {
    let out = rlab(&["split", &fixture("three_lines.json")]);
    assert_eq!(out.status.code(), Some(1));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("split ["));
    assert!(text.contains("rejected"));
    assert!(text.contains("d_total"));
}
