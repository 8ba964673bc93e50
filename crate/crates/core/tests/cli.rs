use std::path::Path;
use std::process::{Command, Output};

fn im_oracle(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_im-oracle")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn gen_then_exact() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("tree3.model");
    let out = im_oracle(&["gen", "--family", "tree", "--tau", "3", "--out", p(&model)]);
    assert_eq!(out.status.code(), Some(0));
    let doc = json(&im_oracle(&["exact", "--model", p(&model), "--seeds", "0", "--tau", "3"]));
    assert_eq!(doc["command"], "exact");
    assert_eq!(doc["master_seed"], 0);
    assert!(doc["versions"]["im_oracle"].is_string());
    assert_eq!(doc["result"]["influence"], 4.0);
    assert_eq!(doc["result"]["variance"], 7.0);
}

#[test]
fn maximize_adaptive_reports_simulations() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("r.model");
    im_oracle(&["gen", "--family", "random", "--n", "10", "--m", "14", "--out", p(&model)]);
    let doc = json(&im_oracle(&[
        "maximize", "--model", p(&model), "--s", "2", "--tau", "2", "--eps", "0.5", "--delta", "0.1", "--method",
        "adaptive",
    ]));
    let r = &doc["result"];
    assert_eq!(r["method"], "adaptive");
    assert!(r["simulations_used"].as_u64().unwrap() > 0);
    assert!(r["seeds"].as_array().unwrap().len() <= 2);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(im_oracle(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(im_oracle(&["exact", "--model", "missing.model", "--seeds", "0", "--tau", "1"]).status.code(), Some(2));
    let model = dir.path().join("big.model");
    im_oracle(&["gen", "--family", "random", "--n", "40", "--m", "300", "--p-max", "0.9", "--out", p(&model)]);
    assert_eq!(im_oracle(&["exact", "--model", p(&model), "--seeds", "0", "--tau", "5"]).status.code(), Some(3));
    let star = dir.path().join("star.model");
    im_oracle(&["gen", "--family", "star", "--leaves", "60", "--out", p(&star)]);
    let brute = ["maximize", "--model", p(&star), "--s", "5", "--tau", "1", "--eps", "0.5", "--delta", "0.1", "--method", "brute"];
    assert_eq!(im_oracle(&brute).status.code(), Some(3));
    assert_eq!(im_oracle(&brute[..11]).status.code(), Some(0));
    assert_eq!(im_oracle(&["exact", "--model", p(&star), "--seeds", "99", "--tau", "1"]).status.code(), Some(2));
}

#[test]
fn same_seed_same_bytes_across_thread_counts() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("mix.model");
    im_oracle(&["gen", "--family", "mixture", "--out", p(&model)]);
    let run = |threads: &str, name: &str| {
        let out = dir.path().join(name);
        let args = [
            "estimate", "--model", p(&model), "--seeds", "0,9", "--tau", "4", "--eps", "0.3", "--delta", "0.1",
            "--seed", "5", "--threads", threads, "--out", p(&out),
        ];
        assert!(im_oracle(&args).status.success());
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("1", "a.json"), run("4", "b.json"));
    assert_eq!(run("2", "c.json"), run("2", "d.json"));
}

#[test]
fn sketch_round_trip_and_csv() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("r.model");
    let sketch = dir.path().join("r.sketch");
    im_oracle(&["gen", "--family", "random", "--n", "12", "--m", "20", "--out", p(&model)]);
    let built = im_oracle(&["sketch-build", "--model", p(&model), "--tau", "2", "--k", "4000", "--pool-size", "100", "--out", p(&sketch)]);
    assert!(built.status.success());
    let q = json(&im_oracle(&["sketch-query", "--sketch", p(&sketch), "--seeds", "0,1"]));
    assert_eq!(q["result"]["lossless"], true);
    let est = json(&im_oracle(&["estimate", "--model", p(&model), "--seeds", "0,1", "--tau", "2", "--pool-size", "100"]));
    assert_eq!(q["result"]["estimate"], est["result"]["estimate"]);

    let csv = im_oracle(&["simulate", "--model", p(&model), "--seeds", "0", "--tau", "2", "--count", "3", "--format", "csv"]);
    let text = String::from_utf8(csv.stdout).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(text.starts_with("index,component,live_edges,reach"));
}

#[test]
fn rrs_compare_and_audit() {
    let dir = tempfile::tempdir().unwrap();
    let model = dir.path().join("mix.model");
    im_oracle(&["gen", "--family", "mixture", "--out", p(&model)]);
    let doc = json(&im_oracle(&["rrs-compare", "--model", p(&model), "--tau", "4", "--searches", "20000"]));
    assert_eq!(doc["result"]["exact_argmax"], 0);
    assert_eq!(doc["result"]["marginal_expected_argmax"], 9);
    let audit = json(&im_oracle(&["audit-variance", "--model", p(&model), "--seeds", "0", "--tau", "4"]));
    assert_eq!(audit["result"]["holds"], true);
}

#[test]
fn bench_runs_selected_criteria() {
    let out = im_oracle(&["bench", "--criteria", "2,11", "--format", "csv"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().skip(1).all(|l| l.contains(",true,")));
}
