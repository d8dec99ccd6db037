use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn exe() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_exporamsey"));
    c.env_remove("EXPORAMSEY_THREADS");
    c
}

fn run(args: &[&str]) -> Output {
    exe().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("bad JSON ({e}): {}", stdout(o)))
}

fn tmp(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_TARGET_TMPDIR")).join(name)
}

#[test]
fn triples_enum_small() {
    let o = run(&["triples", "enum", "--max", "16"]);
    assert_eq!(o.status.code(), Some(0));
    let v = json(&o);
    let got: Vec<(String, String, String)> = v
        .as_array()
        .unwrap()
        .iter()
        .map(|t| {
            let s = |k: &str| t[k].as_str().unwrap().to_string();
            (s("a"), s("b"), s("c"))
        })
        .collect();
    let want = [("2", "2", "4"), ("2", "3", "8"), ("3", "2", "9"), ("2", "4", "16"), ("4", "2", "16")];
    assert_eq!(got.len(), 5);
    for (g, w) in got.iter().zip(want) {
        assert_eq!((g.0.as_str(), g.1.as_str(), g.2.as_str()), w);
    }
}

#[test]
fn triples_csv_and_empty() {
    let o = run(&["triples", "enum", "--max", "10", "--format", "csv"]);
    assert_eq!(stdout(&o), "a,b,c\n2,2,4\n2,3,8\n3,2,9\n");
    let o = run(&["triples", "enum", "--max", "3"]);
    assert_eq!(json(&o), serde_json::json!([]));
}

#[test]
fn export_cnf_single_edge() {
    let o = run(&["color", "export-cnf", "--seeds", "2", "--depth", "1", "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let body: Vec<String> = stdout(&o)
        .lines()
        .filter(|l| !l.starts_with('c'))
        .map(String::from)
        .collect();
    assert_eq!(body, vec!["p cnf 2 2", "1 2 0", "-1 -2 0"]);
}

#[test]
fn structures_fe1_has_seven_elements() {
    let o = run(&["structures", "fe1", "--seeds", "2,3,4", "--depth", "2"]);
    let v = json(&o);
    let values: Vec<&str> = v["elements"]
        .as_array()
        .unwrap()
        .iter()
        .map(|e| e["value"].as_str().unwrap())
        .collect();
    assert_eq!(values, vec!["2", "3", "4", "8", "16", "81", "4096"]);
    let o = run(&["structures", "fs", "--seeds", "1,2,4"]);
    assert_eq!(json(&o)["elements"].as_array().unwrap().len(), 7);
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["--no-such-flag"]).status.code(), Some(3));
    assert_eq!(run(&["structures", "fe3", "--seeds", "2"]).status.code(), Some(3));
    assert_eq!(run(&["structures", "fe1", "--seeds", "2,3"]).status.code(), Some(3));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
    // domain: log base 1
    let o = run(&["ip", "transform", "--members", "4", "--lo", "1", "--hi", "16", "--op", "log:1"]);
    assert_eq!(o.status.code(), Some(1));
    // syntax error in a rule
    assert_eq!(run(&["color", "rule-count", "--rule", "n %", "--max", "10"]).status.code(), Some(1));
    // capacity: closure deeper than the limit
    assert_eq!(run(&["closure", "--seeds", "2", "--depth", "9"]).status.code(), Some(2));
    // inconclusive search
    let o = run(&[
        "ip", "find-seed", "--set", "even", "--lo", "1", "--hi", "60", "--kind", "additive", "--m", "5",
        "--search-budget", "3",
    ]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["result"], "inconclusive");
}

#[test]
fn config_file_is_overridden_by_flags() {
    let path = tmp("budget.toml");
    std::fs::write(&path, "vertex_budget = 3\nvalue_bit_cap = 512\n").unwrap();
    let p = path.to_str().unwrap();
    let o = run(&["closure", "--seeds", "2", "--depth", "2", "--config", p]);
    let meta = &json(&o)["meta"];
    assert_eq!(meta["vertex_budget"], 3);
    assert_eq!(meta["value_bit_cap"], 512);
    assert_eq!(meta["truncated"], 1);
    let o = run(&["closure", "--seeds", "2", "--depth", "2", "--config", p, "--vertex-budget", "100"]);
    let meta = &json(&o)["meta"];
    assert_eq!(meta["vertex_budget"], 100);
    assert_eq!(meta["truncated"], 0);

    std::fs::write(&path, "no_such_key = 1\n").unwrap();
    assert_eq!(run(&["closure", "--seeds", "2", "--depth", "1", "--config", p]).status.code(), Some(3));
}

#[test]
fn deterministic_output_is_byte_identical() {
    let args = ["closure", "--seeds", "2,3", "--depth", "2", "--deterministic"];
    let a = run(&args);
    let b = run(&args);
    assert_eq!(a.stdout, b.stdout);
    let threaded = exe()
        .args(&args[..5])
        .env("EXPORAMSEY_THREADS", "4")
        .output()
        .unwrap();
    assert_eq!(a.stdout, threaded.stdout);
    let search = [
        "greedy", "fegen1", "--set", "rule:n >= 2", "--y", "1,2,4,8,16", "--steps", "3", "--deterministic",
    ];
    assert_eq!(run(&search).stdout, run(&search).stdout);
}

#[test]
fn solve_then_check() {
    let o = run(&["color", "solve", "--seeds", "2", "--depth", "2", "--k", "2"]);
    assert_eq!(o.status.code(), Some(0));
    let report = json(&o);
    assert_eq!(report["status"], "sat");
    assert_eq!(report["edges"], 5);
    let path = tmp("solve.json");
    std::fs::write(&path, &o.stdout).unwrap();
    let o = run(&["color", "check", "--seeds", "2", "--depth", "2", "--coloring", path.to_str().unwrap()]);
    assert_eq!(json(&o), serde_json::json!({"proper": true, "monochromatic": []}));

    let bad = tmp("mono.json");
    std::fs::write(&bad, r#"{"k":2,"colors":{"2":0,"4":0,"16":1,"256":1}}"#).unwrap();
    let o = run(&["color", "check", "--seeds", "2", "--depth", "2", "--coloring", bad.to_str().unwrap()]);
    let v = json(&o);
    assert_eq!(v["proper"], false);
    assert_eq!(v["monochromatic"], serde_json::json!([["2", "2", "4"]]));
}

#[test]
fn closure_file_round_trip() {
    let o = run(&["closure", "--seeds", "2,3", "--depth", "1"]);
    let path = tmp("closure.json");
    std::fs::write(&path, &o.stdout).unwrap();
    let o = run(&["color", "solve", "--hypergraph", path.to_str().unwrap(), "--method", "exhaustive"]);
    assert_eq!(json(&o)["status"], "sat");
    let o = run(&["color", "solve", "--hypergraph", path.to_str().unwrap(), "--method", "cdcl"]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn rule_count_csv() {
    let o = run(&["color", "rule-count", "--rule", "n % 2", "--max", "30", "--format", "csv"]);
    assert_eq!(stdout(&o), "N,cell,count\n30,0,3\n30,1,1\n30,total,4\n30,rainbow,3\n");
    let o = run(&["color", "rule-count", "--rule", "0", "--max", "10^2"]);
    assert_eq!(json(&o)["counts"][0]["total_mono"], 16);
}

#[test]
fn ip_commands() {
    let o = run(&["ip", "transform", "--members", "4,8,9", "--lo", "1", "--hi", "16", "--op", "log:2"]);
    assert_eq!(json(&o), serde_json::json!({"lo": 0, "hi": 4, "members": [2, 3]}));
    let o = run(&["ip", "find-seed", "--members", "2,3,6", "--lo", "1", "--hi", "10", "--kind", "multiplicative", "--m", "2"]);
    assert_eq!(json(&o), serde_json::json!({"result": "found", "seed": [2, 3]}));
    let o = run(&["ip", "ip-star", "--set", "odd", "--kind", "multiplicative", "--m", "2", "--lo", "1", "--hi", "50"]);
    assert_eq!(json(&o), serde_json::json!({"verdict": "fails", "witness": [2, 4]}));
    let o = run(&["ip", "gp", "--members", "2,4,8,16", "--lo", "1", "--hi", "16", "--k", "3"]);
    assert_eq!(
        json(&o)["progressions"],
        serde_json::json!([{"a": "2", "h": "2"}, {"a": "4", "h": "2"}])
    );
    let o = run(&["ip", "powerprog", "--set", "list:2,3,4,9,27", "--lo", "1", "--hi", "30", "--k", "3"]);
    assert_eq!(json(&o)["h"], serde_json::json!(["3"]));

    let input = tmp("window.json");
    std::fs::write(&input, r#"{"lo":1,"hi":10,"members":[5,7]}"#).unwrap();
    let o = run(&["ip", "transform", "--input", input.to_str().unwrap(), "--op", "shift:3"]);
    assert_eq!(json(&o), serde_json::json!({"lo": 0, "hi": 7, "members": [2, 4]}));
}

#[test]
fn greedy_commands() {
    let o = run(&["greedy", "fe1", "--set", "rule:n >= 2", "--depth", "2", "--hi", "100"]);
    let v = json(&o);
    assert_eq!(v["status"], "success");
    assert_eq!(v["seeds"], serde_json::json!(["2", "3", "4"]));

    let o = run(&["greedy", "fe2", "--set", "rule:n % 2 == 1 and n >= 3", "--depth", "1", "--hi", "100"]);
    let v = json(&o);
    let values: Vec<&str> = v["checked"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| c["element"]["value"].as_str().unwrap())
        .collect();
    assert_eq!(values, vec!["3", "5", "125"]);

    let o = run(&["greedy", "fegen2", "--set", "rule:n >= 2", "--y", "2,3,5", "--steps", "2"]);
    assert_eq!(json(&o)["chosen"], serde_json::json!(["2", "3"]));

    let o = run(&["greedy", "verify", "--set", "odd", "--x", "3,5", "--depth", "1"]);
    let v = json(&o);
    assert_eq!(v["fs"], serde_json::json!({"verdict": "fails", "element": "8"}));
    assert_eq!(v["fe1"]["verdict"], "holds");
    assert_eq!(v["fp"]["verdict"], "skipped");
    assert_eq!(run(&["greedy", "verify", "--set", "odd", "--depth", "1"]).status.code(), Some(3));

    // 4096^5 = 2^60 is out of the rule's reach one step later
    let o = run(&["greedy", "fe1", "--set", "rule:n >= 2", "--depth", "4", "--hi", "100"]);
    assert_eq!(o.status.code(), Some(2));
    assert_eq!(json(&o)["reason"], "oracle range");
}
