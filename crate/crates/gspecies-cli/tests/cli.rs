use serde_json::Value;
use std::process::{Command, Output};

fn gspecies(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gspecies")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    assert!(o.status.success(), "stderr: {}", String::from_utf8_lossy(&o.stderr));
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn json(o: &Output) -> Value {
    serde_json::from_str(&stdout(o)).unwrap()
}

fn golden(name: &str) -> String {
    std::fs::read_to_string(format!("{}/tests/golden/{name}", env!("CARGO_MANIFEST_DIR"))).unwrap()
}

#[test]
fn fg_golden_c3() {
    let out = stdout(&gspecies(&["fg", "--matrix", "c3", "--seq", "2,1,3", "--vertex", "3"]));
    assert_eq!(out, golden("c3_fg_2_1_3_vertex_3.json"));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["F_text"], "1 + z3 + z2*z3 + z1*z2*z3");
    assert_eq!(v["g"], serde_json::json!([0, 0, -1]));
}

#[test]
fn inline_matrix_matches_builtin() {
    let a = stdout(&gspecies(&["fg", "--matrix", "[[0,-1,0],[1,0,-1],[0,2,0]]", "--seq", "2,1,3", "--vertex", "3"]));
    let b = stdout(&gspecies(&["fg", "--matrix", "c3", "--seq", "2,1,3", "--vertex", "3"]));
    assert_eq!(a, b);
}

#[test]
fn species_and_matrix_goldens() {
    assert_eq!(stdout(&gspecies(&["species-from-matrix", "--matrix", "c3"])), golden("c3_species.json"));
    assert_eq!(stdout(&gspecies(&["b-matrix", "--species", "c3"])), golden("c3_b_matrix.json"));
    let sp = golden("c3_species.json");
    assert_eq!(stdout(&gspecies(&["b-matrix", "--species", sp.trim()])), golden("c3_b_matrix.json"));
}

#[test]
fn example_c3_golden() {
    let out = stdout(&gspecies(&["example-c3"]));
    assert_eq!(out, golden("example_c3.json"));
    let v: Value = serde_json::from_str(&out).unwrap();
    assert_eq!(v["representation"]["reduced_dims"], serde_json::json!([1, 1, 1]));
    assert_eq!(v["representation"]["g_reduced"], serde_json::json!([0, 0, -1]));
    assert_eq!(v["representation"]["F_specialized"], v["fg"]["F"]);
}

#[test]
fn mutate_twice_is_byte_identical_on_species() {
    let dir = std::env::temp_dir().join(format!("gspecies-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    for k in ["1", "2", "3"] {
        let once = stdout(&gspecies(&["mutate", "--species", "c3", "--at", k]));
        let path = dir.join(format!("mu{k}.json"));
        std::fs::write(&path, &once).unwrap();
        let twice = stdout(&gspecies(&["mutate", "--species", path.to_str().unwrap(), "--at", k, "--emit", "species"]));
        assert_eq!(twice, golden("c3_species.json"), "vertex {k}");
    }
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn mutation_report_lists_trivial_pairs() {
    let v = json(&gspecies(&["mutate", "--species", "three-cycle", "--at", "2", "--emit", "report"]));
    let r = &v[0];
    assert_eq!(r["k"], "2");
    assert_eq!(r["trivial_pairs"].as_array().unwrap().len(), 1);
    assert_eq!(r["two_acyclic"], serde_json::json!([true, true, true]));
}

#[test]
fn domain_error_exits_1_with_error_json() {
    let o = gspecies(&["fg", "--matrix", "[[0,1],[1,0]]", "--seq", "1", "--vertex", "1"]);
    assert_eq!(o.status.code(), Some(1));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"], "NotSkewSymmetrizable");
    assert!(e["witness"].is_object());

    let o = gspecies(&["mutate", "--species", "c3", "--at", "7"]);
    assert_eq!(o.status.code(), Some(1));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"], "IndexOutOfRange");
}

#[test]
fn undefined_mutation_reports_prefix() {
    let sp = r#"{"vertices":[{"id":"1","group":[]},{"id":"2","group":[]},{"id":"3","group":[]}],"bimodules":[{"from":"1","to":"2","mult":[[1]]},{"from":"2","to":"3","mult":[[1]]},{"from":"3","to":"1","mult":[[1]]}]}"#;
    let o = gspecies(&["mutate", "--species", sp, "--seq", "2,1"]);
    assert_eq!(o.status.code(), Some(1));
    let e: Value = serde_json::from_slice(&o.stderr).unwrap();
    assert_eq!(e["error"], "MutationUndefined");
    assert_eq!(e["witness"]["prefix"], serde_json::json!(["2"]));
}

#[test]
fn usage_error_exits_2() {
    assert_eq!(gspecies(&["fg", "--bogus"]).status.code(), Some(2));
    assert_eq!(gspecies(&["no-such-command"]).status.code(), Some(2));
    assert_eq!(gspecies(&["verify", "--suite", "nope"]).status.code(), Some(2));
}

#[test]
fn pretty_and_json_formats_agree() {
    let a = json(&gspecies(&["fg", "--matrix", "rank2", "--seq", "1,2,1"]));
    let b = json(&gspecies(&["fg", "--matrix", "rank2", "--seq", "1,2,1", "--format", "pretty"]));
    assert_eq!(a, b);
}

#[test]
fn rep_mutate_forward_from_file() {
    let dir = std::env::temp_dir().join(format!("gspecies-rep-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let v = json(&gspecies(&["rep-mutate", "--species", "c3", "--seq", "2,1,3", "--decoration", "3:0"]));
    let gsp = dir.join("gsp.json");
    let rep = dir.join("rep.json");
    std::fs::write(&gsp, v["gsp"].to_string()).unwrap();
    std::fs::write(&rep, v["rep"].to_string()).unwrap();
    // the last mutation applied was at 2; undoing it gives the intermediate (K, 0, ρ)
    let w = json(&gspecies(&["rep-mutate", "--species", gsp.to_str().unwrap(), "--seq", "2", "--rep", rep.to_str().unwrap()]));
    assert_eq!(w["reduced_dims"], serde_json::json!([1, 0, 1]));
    std::fs::remove_dir_all(&dir).ok();
}

#[test]
fn verify_conjectures_short_ball() {
    let v = json(&gspecies(&["verify", "--suite", "conjectures", "--max-len", "3", "--matrix", "c3"]));
    assert_eq!(v["passed"], true);
    assert_eq!(v["suites"].as_array().unwrap().len(), 6);
}

#[test]
fn verify_all_short_ball_with_random_inputs() {
    let v = json(&gspecies(&["verify", "--suite", "all", "--max-len", "2", "--species", "c3", "--random", "3", "--seed", "7"]));
    assert_eq!(v["passed"], true, "{v}");
}

#[test]
fn counterexample_m1() {
    let v = json(&gspecies(&["counterexample", "--m", "1"]));
    assert_eq!(v["confirms"], true);
    assert_eq!(v["instances"][0]["satisfying"], 0);
    assert!(v["scope"].as_str().unwrap().starts_with("instance check"));
}

#[test]
fn probe_is_seed_deterministic() {
    let a = stdout(&gspecies(&["probe", "--species", "three-cycle", "--max-len", "3", "--trials", "2", "--seed", "11"]));
    let b = stdout(&gspecies(&["probe", "--species", "three-cycle", "--max-len", "3", "--trials", "2", "--seed", "11", "--sequential"]));
    assert_eq!(a, b);
    let v: Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["success"], true);
}
