use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn itmlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_itmlab")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn analyze_fig1() {
    let out = itmlab(&["analyze", path(&fixture("fig1.json"))]);
    let doc = json(&out);
    assert_eq!(doc["stability"]["stable"], true);
    assert_eq!(doc["attractor"]["components"], serde_json::json!([{"left": "1/6", "right": "13/42"}, {"left": "1/2", "right": "17/21"}]));
    assert_eq!(doc["attractor"]["stabilization_step"], 3);
    assert_eq!(doc["return_maps"][1]["return_times"], serde_json::json!([1, 2]));
    assert_eq!(doc["return_maps"][1]["touching_values"], serde_json::json!(["9/14"]));
    assert_eq!(doc["header"]["version"], env!("CARGO_PKG_VERSION"));
    assert_eq!(doc["header"]["input_sha256"].as_str().unwrap().len(), 64);
    assert!(String::from_utf8_lossy(&out.stderr).contains("stable"));
}

fn rationals(v: &Value, found: &mut Vec<String>) {
    match v {
        Value::String(s) if s.contains('/') => found.push(s.clone()),
        Value::Array(a) => a.iter().for_each(|x| rationals(x, found)),
        Value::Object(o) => o.values().for_each(|x| rationals(x, found)),
        _ => {}
    }
}

#[test]
fn reports_are_deterministic_and_rationals_round_trip() {
    let a = itmlab(&["analyze", "--json-only", path(&fixture("fig1.json"))]);
    let b = itmlab(&["analyze", "--json-only", path(&fixture("fig1.json"))]);
    assert_eq!(a.stdout, b.stdout);
    assert!(a.stderr.is_empty());
    let mut found = Vec::new();
    rationals(&json(&a), &mut found);
    assert!(!found.is_empty());
    for s in found {
        let r: itmlab_core::Rational = s.parse().unwrap_or_else(|_| panic!("{s}"));
        let (n, d) = s.split_once('/').unwrap();
        assert_eq!(format!("{}/{}", r.numer(), r.denom()), format!("{n}/{d}"));
    }
}

#[test]
fn analyze_rotation() {
    let doc = json(&itmlab(&["analyze", path(&fixture("rotation.json"))]));
    assert_eq!(doc["stability"]["stable"], true);
    assert_eq!(doc["attractor"]["components"], serde_json::json!([{"left": "0/1", "right": "1/1"}]));
    assert_eq!(doc["attractor"]["stabilization_step"], 0);
}

#[test]
fn bad_order_exits_2() {
    let out = itmlab(&["analyze", path(&fixture("bad.json"))]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("BadOrder"));
    let out = itmlab(&["analyze", path(&fixture("missing.json"))]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn probe_fig1() {
    let doc = json(&itmlab(&[
        "probe", path(&fixture("fig1.json")), "--eps", "1/1000", "--samples", "200", "--seed", "7", "--json-only",
    ]));
    let res = &doc["probe"]["result"];
    assert!(res["aggregate"]["all_preserved"].as_bool().unwrap());
    let max: itmlab_core::Rational = res["aggregate"]["max_hausdorff"].as_str().unwrap().parse().unwrap();
    assert!(max <= itmlab_core::q(20, 1000));
    assert_eq!(doc["header"]["seed"], 7);
    assert_eq!(doc["header"]["lcg_multiplier"], 6364136223846793005u64);
}

#[test]
fn probe_is_reproducible_across_thread_caps() {
    let run = |threads: &str| {
        Command::new(env!("CARGO_BIN_EXE_itmlab"))
            .args(["probe", path(&fixture("fig1.json")), "--samples", "24", "--seed", "3", "--json-only"])
            .env("ITMLAB_THREADS", threads)
            .output()
            .unwrap()
    };
    let a = run("1");
    let b = run("4");
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    assert_eq!(run("zero").status.code(), Some(2));
}

#[test]
fn probe_directed_ghost() {
    let doc = json(&itmlab(&["probe", path(&fixture("ghost.json")), "--directed", "--eps", "1/4096", "--json-only"]));
    assert_eq!(doc["stability"]["stable"], false);
    let d = &doc["probe"]["directed"];
    assert_eq!(d["periodic_interval_verified"], true);
    assert_eq!(d["period"], 2);
    assert!(!d["new_components"].as_array().unwrap().is_empty());
    let out = itmlab(&["probe", path(&fixture("fig1.json")), "--directed"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn probe_zero_samples_is_usage_error() {
    let out = itmlab(&["probe", path(&fixture("fig1.json")), "--samples", "0"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn probe_without_valid_samples_exits_3() {
    // With ε = 1 most draws leave the admissible region; one sample per
    // seed, so some seed has nothing left.
    let code3 = (0..64u64).any(|seed| {
        let s = seed.to_string();
        itmlab(&["probe", path(&fixture("rotation.json")), "--eps", "1", "--samples", "1", "--seed", &s, "--json-only"])
            .status
            .code()
            == Some(3)
    });
    assert!(code3);
}

#[test]
fn render_map_draws_branch_segments() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("map.svg");
    let status = itmlab(&["render", path(&fixture("fig1.json")), "--kind", "map", "--out", out.to_str().unwrap()]);
    assert!(status.status.success());
    let svg = std::fs::read_to_string(&out).unwrap();
    assert_eq!(svg.matches(r#"class="branch""#).count(), 3);
    // Branch 1 runs from (0, 1/3) to (1/3, 2/3): y = 20 + 400 (1 − y).
    assert!(svg.contains(r#"x1="20.000" y1="286.666" x2="153.333" y2="153.333""#), "{svg}");
    let again = dir.path().join("again.svg");
    itmlab(&["render", path(&fixture("fig1.json")), "--out", again.to_str().unwrap()]);
    assert_eq!(svg, std::fs::read_to_string(&again).unwrap());
}

#[test]
fn render_orbit_component_two() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("orbit.svg");
    let o = itmlab(&["render", path(&fixture("fig1.json")), "--kind", "orbit", "--component", "2", "--out", out.to_str().unwrap()]);
    assert!(o.status.success());
    let svg = std::fs::read_to_string(&out).unwrap();
    assert_eq!(svg.matches(r#"class="return" data-piece="1" data-row="1""#).count(), 1);
    assert_eq!(svg.matches(r#"class="return" data-piece="2" data-row="2""#).count(), 1);
    assert_eq!(svg.matches(r#"class="component""#).count(), 3);
    let bad = itmlab(&["render", path(&fixture("fig1.json")), "--kind", "orbit", "--component", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn render_orbit_on_capped_map_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("orbit.svg");
    let o = itmlab(&["render", path(&fixture("fig1.json")), "--kind", "orbit", "--max-iter", "1", "--out", out.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("InfiniteTypeSuspected"));
    let doc = json(&itmlab(&["analyze", "--max-iter", "1", path(&fixture("fig1.json"))]));
    assert_eq!(doc["attractor"]["capped"], true);
    assert_eq!(doc["stability"]["stable"], false);
}

#[test]
fn ghost_tree_and_return_map_dumps() {
    let doc = json(&itmlab(&["ghost-tree", path(&fixture("ghost.json")), "--root", "b1-", "--depth", "4"]));
    assert_eq!(doc["tree"]["root_reappearances"], serde_json::json!([2, 4]));
    let out = itmlab(&["ghost-tree", path(&fixture("ghost.json")), "--root", "b9+"]);
    assert_eq!(out.status.code(), Some(2));
    let doc = json(&itmlab(&["return-map", path(&fixture("fig1.json")), "--component", "1"]));
    assert_eq!(doc["return_maps"][0]["return_times"], serde_json::json!([4, 3]));
    assert_eq!(doc["return_maps"][0]["touching_values"], serde_json::json!(["2/7"]));
    assert_eq!(doc["vectors"][0]["pattern"]["kind"], "pattern_holds");
}

#[test]
fn analyze_writes_out_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.json");
    let o = itmlab(&["analyze", path(&fixture("fig1.json")), "--out", out.to_str().unwrap(), "--json-only"]);
    assert!(o.status.success() && o.stdout.is_empty());
    let doc: Value = serde_json::from_str(&std::fs::read_to_string(out).unwrap()).unwrap();
    assert_eq!(doc["stability"]["stable"], true);
}
