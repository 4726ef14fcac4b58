use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn pbw(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_pbw"))
        .args(args)
        .env_remove("PBW_CATALOG_DIR")
        .output()
        .expect("runs")
}

fn report(args: &[&str]) -> (i32, Value) {
    let mut all = args.to_vec();
    all.extend(["--json", "--omit-timing"]);
    let out = pbw(&all);
    let v = serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!("{e}: {}{}", String::from_utf8_lossy(&out.stdout), String::from_utf8_lossy(&out.stderr))
    });
    (out.status.code().expect("exit code"), v)
}

#[test]
fn catalog_list_and_show() {
    let (code, v) = report(&["catalog", "list"]);
    assert_eq!(code, 0);
    let names: Vec<&str> = v["result"]["entries"].as_array().unwrap().iter().map(|e| e["name"].as_str().unwrap()).collect();
    for n in ["tridend", "rs-rbass", "beta0", "auxquotient"] {
        assert!(names.contains(&n), "{n} missing");
    }
    let out = pbw(&["catalog", "show", "tridend"]);
    assert!(String::from_utf8_lossy(&out.stdout).contains("mode nonsymmetric"));
}

#[test]
fn tridend_dimensions_end_in_1080() {
    let (code, v) = report(&["dims", "tridend", "--arity", "4", "--pipeline", "both"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["totals"], serde_json::json!([1, 6, 66, 1080]));
    assert_eq!(v["result"]["pipelines_agree"], true);
    let (_, ns) = report(&["dims", "tridend", "--arity", "4", "--world", "native"]);
    assert_eq!(ns["result"]["totals"], serde_json::json!([1, 3, 11, 45]));

    let text = String::from_utf8(pbw(&["dims", "tridend", "--arity", "4"]).stdout).unwrap();
    assert!(text.starts_with("dims PASS"));
    assert!(text.lines().any(|l| l.split_whitespace().collect::<Vec<_>>() == ["4", "1080"]));
}

#[test]
fn stored_system_fails_confluence_until_completed() {
    let (code, v) = report(&["confluence", "rs-rbass", "--caps", "4,2"]);
    assert_eq!(code, 2);
    assert_eq!(v["result"]["confluent"], false);
    assert_eq!(v["result"]["certificate_valid"], true);
    assert_eq!(v["result"]["confluence"]["failures"].as_array().unwrap().len(), 1);
    let (code, v) = report(&["confluence", "rs-rbass", "--caps", "4,2", "--complete"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["added_rules"].as_array().unwrap().len(), 4);
}

#[test]
fn weight_zero_dendriform_fails_with_witness() {
    let (code, v) = report(&["pbw", "dend", "rbass0", "beta0", "--caps", "3,1"]);
    assert_eq!(code, 2);
    assert_eq!(v["passed"], false);
    let w = &v["result"]["outcome"]["freeness"]["kernel_witness"];
    let seen = [w["graft"].as_str(), w["normal_form"].as_str(), w["same_as"].as_str()];
    for m in ["(mul (prec 1 2) 3)", "(mul 1 (succ 2 3))"] {
        assert!(seen.contains(&Some(m)), "{w}");
    }
}

#[test]
fn pbw_names_must_match_the_morphism() {
    let out = pbw(&["pbw", "tridend", "rbass", "beta0", "--caps", "3,1"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn morphisms_and_quadratic_bases() {
    let (code, v) = report(&["morphism-check", "beta"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["check"]["passed"], true);
    let (code, v) = report(&["koszul-quadratic", "auxquotient"]);
    assert_eq!(code, 0);
    assert_eq!(v["result"]["quadratic_groebner_basis"], true);
}

#[test]
fn usage_and_lookup_errors_exit_1() {
    assert_eq!(pbw(&["dims"]).status.code(), Some(1));
    assert_eq!(pbw(&["dims", "tridend", "--frobnicate"]).status.code(), Some(1));
    assert_eq!(pbw(&["confluence", "rs-rbass", "--caps", "0,1"]).status.code(), Some(1));
    let out = pbw(&["dims", "no-such-operad"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&out.stderr).contains("no-such-operad"));
    assert_eq!(pbw(&["--help"]).status.code(), Some(0));
}

#[test]
fn reports_are_reproducible() {
    let args = ["confluence", "rs-rblie", "--caps", "3,1", "--seed", "11", "--json", "--omit-timing"];
    let a = pbw(&args).stdout;
    let b = pbw(&args).stdout;
    assert_eq!(a, b);
    let v: Value = serde_json::from_slice(&a).unwrap();
    assert_eq!(v["schema_version"], 1);
    assert_eq!(v["seed"], 11);
    assert_eq!(v["caps"], serde_json::json!({ "arity": 3, "unary": 1 }));
    assert!(v["wall_clock_ms"].is_null());
    let hash = v["catalog"]["tridend.pres"].as_str().unwrap();
    assert_eq!(hash.len(), 64);

    let timed: Value = serde_json::from_slice(&pbw(&["catalog", "list", "--json"]).stdout).unwrap();
    assert!(timed["wall_clock_ms"].is_u64());
}

#[test]
fn report_file_matches_stdout() {
    let path = std::env::temp_dir().join(format!("pbw-report-{}.json", std::process::id()));
    let p = path.to_str().unwrap();
    let out = pbw(&["gb", "dend", "--world", "native", "--json", "--omit-timing", "--report", p]);
    assert_eq!(out.status.code(), Some(0));
    let written = std::fs::read(&path).unwrap();
    std::fs::remove_file(&path).unwrap();
    assert_eq!(written, out.stdout);
}

#[test]
fn catalog_directory_from_environment() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/catalog");
    let out = Command::new(env!("CARGO_BIN_EXE_pbw"))
        .args(["catalog", "list", "--json", "--omit-timing"])
        .env("PBW_CATALOG_DIR", &dir)
        .output()
        .unwrap();
    let from_dir: Value = serde_json::from_slice(&out.stdout).unwrap();
    let (_, embedded) = report(&["catalog", "list"]);
    assert_eq!(from_dir["catalog"], embedded["catalog"]);

    let missing = Command::new(env!("CARGO_BIN_EXE_pbw"))
        .args(["catalog", "list"])
        .env("PBW_CATALOG_DIR", "/nonexistent/pbw-catalog")
        .output()
        .unwrap();
    assert_eq!(missing.status.code(), Some(1));
}

#[test]
fn reproduce_paper_prints_a_table() {
    let (code, v) = report(&["reproduce-paper", "--criteria", "1,2"]);
    assert_eq!(code, 0);
    let table = v["result"]["table"].as_array().unwrap();
    assert_eq!(table.len(), 2);
    assert!(table[0].as_str().unwrap().starts_with("criterion 1: PASS"));
}
