use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::{json, Value};

fn case(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../cases").join(name)
}

fn verdict(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_verdict")).args(args).output().unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("verdict-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join(name);
    std::fs::write(&path, contents).unwrap();
    path
}

fn tiny(p_fact: [f64; 2]) -> String {
    let model = |party: &str, state: &str| {
        json!({
            "party": party,
            "prior": 0.5,
            "verdict_conditioning": { "node": "g", "state": state },
            "network": {
                "variables": [
                    { "id": "g", "states": ["False", "True"] },
                    { "id": "f", "states": ["False", "True"] }
                ],
                "cpts": [
                    { "child": "g", "rows": [[0.5, 0.5]] },
                    { "child": "f", "parents": ["g"], "rows": [[1.0 - p_fact[0], p_fact[0]], [1.0 - p_fact[1], p_fact[1]]] }
                ]
            },
            "roles": { "g": "guilt", "f": "fact" }
        })
    };
    json!({
        "case": "tiny",
        "models": [model("a", "True"), model("b", "False")],
        "stages": [{ "name": "only", "facts": [{ "model": "*", "node": "f", "state": "True" }] }]
    })
    .to_string()
}

#[test]
fn validate_accepts_bundled_cases() {
    for name in ["paper_example.case.json", "paper_example_strict.case.json"] {
        let o = verdict(&["validate", case(name).to_str().unwrap()]);
        assert_eq!(o.status.code(), Some(0), "{name}");
        assert!(stdout(&o).starts_with("ok:"));
    }
}

#[test]
fn validation_failures_exit_2() {
    let mut bad: Value = serde_json::from_str(&tiny([0.2, 0.7])).unwrap();
    bad["models"][0]["network"]["cpts"][1]["rows"][0] = json!([0.5, 0.6]);
    let path = scratch("bad.case.json", &bad.to_string());
    let o = verdict(&["validate", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8(o.stderr).unwrap();
    assert!(err.contains("models[0]"), "{err}");

    let syntax = scratch("syntax.case.json", "{\"case\": ");
    assert_eq!(verdict(&["run", syntax.to_str().unwrap()]).status.code(), Some(2));

    let bundled = case("paper_example.case.json");
    let bundled = bundled.to_str().unwrap();
    assert_eq!(verdict(&["run", bundled, "--stage", "3"]).status.code(), Some(2));
    assert_eq!(verdict(&["query", bundled, "--model", "jury", "--node", "killed"]).status.code(), Some(2));
}

#[test]
fn impossible_facts_exit_3() {
    let path = scratch("zero.case.json", &tiny([0.0, 0.0]));
    let o = verdict(&["run", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    let o = verdict(&["query", path.to_str().unwrap(), "--model", "a", "--node", "g", "--evidence", "f=True"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn run_json_is_stable_and_selects_stages() {
    let bundled = case("paper_example.case.json");
    let bundled = bundled.to_str().unwrap();
    let a = verdict(&["run", bundled, "--format", "json"]);
    let b = verdict(&["run", bundled, "--format", "json"]);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let all: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(all["stages"].as_array().unwrap().len(), 2);

    let one: Value = serde_json::from_slice(&verdict(&["run", bundled, "--stage", "2", "--format", "json"]).stdout).unwrap();
    assert_eq!(one["stages"].as_array().unwrap().len(), 1);
    assert_eq!(one["stages"][0], all["stages"][1]);
    let g = one["stages"][0]["averaged_guilt"].as_f64().unwrap();
    assert!((g - 0.000313).abs() < 1e-5, "{g}");

    let computed: Value =
        serde_json::from_slice(&verdict(&["run", bundled, "--stage", "2", "--format", "json", "--computed"]).stdout).unwrap();
    assert_ne!(computed["stages"][0]["averaged_guilt"], one["stages"][0]["averaged_guilt"]);
}

#[test]
fn text_report_has_tables() {
    let bundled = case("paper_example.case.json");
    let o = verdict(&["run", bundled.to_str().unwrap(), "--stage", "1"]);
    let text = stdout(&o);
    assert!(text.contains("averaged guilt: 0.962"), "{text}");
    assert!(text.contains("prosecution"));
    assert!(text.contains("baseline 0.0156"));
}

#[test]
fn merge_writes_a_network_and_reports_reference_values() {
    let bundled = case("paper_example.case.json");
    let out = std::env::temp_dir().join(format!("verdict-merge-{}.json", std::process::id()));
    let o = verdict(&["merge", bundled.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = stdout(&o);
    assert!(text.contains("P(Models=prosecution)"));
    assert!(text.contains("reference 0.00285"), "{text}");
    let net: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let ids: Vec<&str> = net["variables"].as_array().unwrap().iter().map(|v| v["id"].as_str().unwrap()).collect();
    assert!(ids.contains(&"Models"));
    assert!(ids.iter().any(|i| i.starts_with("switch_")));
}

#[test]
fn query_prints_a_distribution() {
    let bundled = case("paper_example.case.json");
    let o = verdict(&[
        "query",
        bundled.to_str().unwrap(),
        "--model",
        "defence",
        "--node",
        "partner_cred",
        "--evidence",
        "cctv=True",
    ]);
    assert_eq!(o.status.code(), Some(0));
    let text = stdout(&o);
    let p: f64 = text
        .lines()
        .find(|l| l.trim_start().starts_with("True"))
        .and_then(|l| l.split('\t').next_back())
        .unwrap()
        .parse()
        .unwrap();
    assert!((p - 0.99975).abs() < 1e-5, "{p}");
}
