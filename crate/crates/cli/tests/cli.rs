use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_ncgarside"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(args: &[&str]) -> Value {
    let mut a = args.to_vec();
    a.push("--json");
    let o = run(&a);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_str(&stdout(&o)).unwrap()
}

#[test]
fn a3_nc_sizes() {
    let v = json(&["nc", "--type", "A3"]);
    assert_eq!(v["metadata"]["orbit_size"], 16);
    assert_eq!(v["metadata"]["lattice_size"], 14);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}

#[test]
fn affine_a3_mcsul_and_rpe() {
    let m = json(&["mcsul-verify", "--type", "A~3:outer=1,3"]);
    assert_eq!(m["metadata"]["ccf_words"], 96);
    let r = json(&["rpe", "--type", "A~3:outer=1,3"]);
    assert_eq!(r["metadata"]["rpe"]["words"], 96);
}

#[test]
fn malformed_cartan_exits_2() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.txt");
    std::fs::write(&p, "2\n2 -1\n-1\n").unwrap();
    let o = run(&["nc", "--cartan", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["classify"]);
    assert_eq!(o.status.code(), Some(2));
    let o = run(&["nonsense-verb"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn cartan_file_matches_named() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("a3.txt");
    std::fs::write(&p, "3\n2 -1 0\n-1 2 -1\n0 -1 2\n").unwrap();
    let v = json(&["nc", "--cartan", p.to_str().unwrap()]);
    assert_eq!(v["metadata"]["lattice_size"], 14);
}

#[test]
fn extended_types_need_flag() {
    let o = run(&["rpe", "--type", "E~6"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn nc_a2_dot() {
    let o = run(&["export", "--type", "A2", "--object", "nc", "--format", "dot"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    let nodes = s.lines().filter(|l| l.contains("[label") && !l.contains("->")).count();
    let edges = s.lines().filter(|l| l.contains("->")).count();
    assert_eq!((nodes, edges), (5, 6));
}

#[test]
fn poset_json_round_trip() {
    let o = run(&["export", "--type", "A3", "--object", "nc"]);
    let text = stdout(&o);
    let p = ncgarside::labeled_poset::LabeledPoset::from_json(&text).unwrap();
    assert_eq!(p.len(), 14);
    assert_eq!(p.to_json().trim(), text.trim());
}

#[test]
fn chain_json_feeds_garside_check() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("ccf.json");
    let o = run(&["export", "--type", "A~3:outer=1,3", "--object", "ccf", "--out", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let c = ncgarside::chain_system::ChainSystem::from_json(&std::fs::read_to_string(&p).unwrap()).unwrap();
    assert_eq!(c.len(), 96);
    let v = json(&["garside-check", "--chain", p.to_str().unwrap()]);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
}

#[test]
fn thread_count_does_not_change_output() {
    let go = |n: &str| {
        let o = bin()
            .args(["mcsul-verify", "--type", "D~4", "--json"])
            .env("NCG_THREADS", n)
            .output()
            .unwrap();
        assert_eq!(o.status.code(), Some(0));
        stdout(&o)
    };
    assert_eq!(go("1"), go("8"));
}

#[test]
fn config_file_supplies_flags() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("run.cfg");
    std::fs::write(&p, "# defaults\ntype = A3\njson = true\n").unwrap();
    let o = run(&["nc", "--config", p.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(v["metadata"]["orbit_size"], 16);
}

#[test]
fn tubes_and_annulus() {
    let v = json(&["tubes", "--rank", "3"]);
    assert_eq!(v["metadata"]["maximal_words"], 27);
    let v = json(&["annulus", "verify-a", "--n", "4", "--outer", "1,3"]);
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["status"] == "pass"));
    let v = json(&["annulus", "parse", "--n", "4", "(...1 3 5...)(...2 0 -2...)"]);
    assert_eq!(v["metadata"]["window"], serde_json::json!([3, 0, 5, 2]));
}
