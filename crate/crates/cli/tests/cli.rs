use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use tempfile::TempDir;

const EXAMPLE: &str = "p cnf 3 3\n-1 2 3 0\n1 -2 3 0\n-3 0\n";

fn gapcnf(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gapcnf"))
        .current_dir(dir)
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn setup(files: &[(&str, &str)]) -> TempDir {
    let dir = tempfile::tempdir().unwrap();
    for (name, text) in files {
        fs::write(dir.path().join(name), text).unwrap();
    }
    dir
}

#[test]
fn reduce_writes_artifacts_with_known_counts() {
    let dir = setup(&[("ex.cnf", EXAMPLE)]);
    let o = gapcnf(dir.path(), &["reduce", "ex.cnf", "--out", "r", "--count", "--json"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["psi1_count"], "204452");
    assert_eq!(report["psi2_count"], "204450");
    assert_eq!(report["difference"], "2");
    for f in ["psi1.cnf", "psi2.cnf", "aux.map", "out.td"] {
        assert!(dir.path().join("r").join(f).exists(), "{}", f);
    }
    // the written decomposition is accepted back by the counter
    let o = gapcnf(dir.path(), &["count", "r/psi2.cnf", "--td", "r/out.td"]);
    assert_eq!(stdout(&o).trim(), "204450");
}

#[test]
fn reduce_is_deterministic() {
    let dir = setup(&[("ex.cnf", EXAMPLE)]);
    for out in ["a", "b"] {
        assert!(gapcnf(dir.path(), &["reduce", "ex.cnf", "--variant", "cubic", "--out", out]).status.success());
    }
    for f in ["psi1.cnf", "psi2.cnf", "aux.map", "out.td"] {
        let a = fs::read(dir.path().join("a").join(f)).unwrap();
        let b = fs::read(dir.path().join("b").join(f)).unwrap();
        assert_eq!(a, b, "{}", f);
    }
}

#[test]
fn empty_formula_reduces_to_difference_one() {
    let dir = setup(&[("empty.cnf", "p cnf 0 0\n")]);
    let o = gapcnf(dir.path(), &["reduce", "empty.cnf", "--out", "r", "--count"]);
    assert!(o.status.success());
    assert!(stdout(&o).contains("difference = 1"), "{}", stdout(&o));
}

#[test]
fn count_methods_agree() {
    let dir = setup(&[("ex.cnf", EXAMPLE), ("unsat.cnf", "p cnf 2 3\n1 0\n-1 2 0\n-2 0\n")]);
    for method in ["brute", "dp", "reduction"] {
        let o = gapcnf(dir.path(), &["count", "ex.cnf", "--method", method]);
        assert_eq!(stdout(&o).trim(), "2", "{}", method);
        let o = gapcnf(dir.path(), &["count", "unsat.cnf", "--method", method]);
        assert_eq!(stdout(&o).trim(), "0", "{}", method);
    }
    let o = gapcnf(dir.path(), &["count", "ex.cnf", "--json"]);
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert!(report["operations"].as_u64().unwrap() > 0);
}

#[test]
fn brute_force_limit_is_an_error() {
    let dir = setup(&[("ex.cnf", EXAMPLE)]);
    let o = gapcnf(dir.path(), &["count", "ex.cnf", "--method", "brute", "--limit", "2"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn combine_single_mon_recovers_the_difference() {
    let dir = setup(&[("f1.cnf", "p cnf 3 2\n1 2 0\n2 3 0\n"), ("f2.cnf", "p cnf 2 1\n1 2 0\n")]);
    let o = gapcnf(dir.path(), &["combine", "--mode", "single-mon", "f1.cnf", "f2.cnf", "--out", "c", "--execute"]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    // #f1 = 5, #f2 = 3
    assert_eq!(stdout(&o).trim(), "2");
    let cert: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("c/certificate.json")).unwrap()).unwrap();
    assert_eq!(cert["mode"], "single_mon");
    assert_eq!(cert["m"], 6);
    assert_eq!(cert["formula_files"][0], "call1.cnf");
}

#[test]
fn combine_gapp_impl_on_equal_inputs_is_zero() {
    let dir = setup(&[("f.cnf", EXAMPLE)]);
    let o = gapcnf(dir.path(), &["combine", "--mode", "gapp-impl", "f.cnf", "f.cnf", "--out", "g", "--execute"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "0");
}

#[test]
fn combine_single_impl_rejects_odd_cycles() {
    let dir = setup(&[("tri.cnf", "p cnf 3 3\n-1 2 0\n-2 3 0\n-3 1 0\n"), ("b.cnf", "p cnf 2 1\n-1 2 0\n")]);
    let o = gapcnf(dir.path(), &["combine", "--mode", "single-impl", "tri.cnf", "b.cnf"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("odd cycle"));
}

#[test]
fn combine_dnf_pad_writes_dnf_calls() {
    let dir = setup(&[("a.cnf", "p cnf 2 1\n-1 2 0\n"), ("b.cnf", "p cnf 3 2\n-1 2 0\n-2 3 0\n")]);
    let o = gapcnf(dir.path(), &["combine", "--mode", "dnf-pad", "a.cnf", "b.cnf", "--out", "d", "--execute"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o).trim(), "-1");
    assert!(fs::read_to_string(dir.path().join("d/call1.cnf")).unwrap().starts_with("p dnf 4 "));
}

#[test]
fn verify_passes_on_the_example() {
    let dir = setup(&[("ex.cnf", EXAMPLE), ("one.cnf", "p cnf 1 1\n1 0\n")]);
    let o = gapcnf(dir.path(), &["verify", "ex.cnf", "--out", "v"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&fs::read_to_string(dir.path().join("v/report.json")).unwrap()).unwrap();
    assert_eq!(report["passed"], true);
    let o = gapcnf(dir.path(), &["verify", "one.cnf", "--variant", "cubic", "--json"]);
    assert!(o.status.success(), "{}", stdout(&o));
    let report: serde_json::Value = serde_json::from_str(&stdout(&o)).unwrap();
    assert_eq!(report["structure"][0]["bipartite"], true);
}

#[test]
fn verify_flags_a_tampered_output() {
    let dir = setup(&[("one.cnf", "p cnf 1 1\n1 0\n")]);
    assert!(gapcnf(dir.path(), &["reduce", "one.cnf", "--out", "r"]).status.success());
    let text = fs::read_to_string(dir.path().join("r/psi2.cnf")).unwrap();
    let header = text.lines().find(|l| l.starts_with("p ")).unwrap();
    let n: usize = header.split_whitespace().nth(2).unwrap().parse().unwrap();
    let mut body: Vec<&str> = text.lines().filter(|l| !l.starts_with('p') && !l.starts_with('c') && !l.is_empty()).collect();
    body.pop();
    let tampered = format!("p cnf {} {}\n{}\n", n, body.len(), body.join("\n"));
    fs::write(dir.path().join("bad.cnf"), tampered).unwrap();
    let o = gapcnf(dir.path(), &["verify", "one.cnf", "--psi2", "bad.cnf"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("bijection: FAIL"));
    assert!(stdout(&o).contains("not a model"));
}

#[test]
fn usage_and_parse_errors_exit_two() {
    let dir = setup(&[("junk.cnf", "p cnf x\n")]);
    assert_eq!(gapcnf(dir.path(), &["count", "junk.cnf"]).status.code(), Some(2));
    assert_eq!(gapcnf(dir.path(), &["count", "missing.cnf"]).status.code(), Some(2));
    assert_eq!(gapcnf(dir.path(), &["reduce", "junk.cnf", "--variant", "nope"]).status.code(), Some(2));
}

#[test]
fn gen_depends_only_on_the_seed() {
    let dir = setup(&[]);
    let a = stdout(&gapcnf(dir.path(), &["gen", "--seed", "7"]));
    let b = stdout(&gapcnf(dir.path(), &["gen", "--seed", "7"]));
    let c = stdout(&gapcnf(dir.path(), &["gen", "--seed", "8"]));
    assert_eq!(a, b);
    assert_ne!(a, c);
    assert!(a.starts_with("p cnf 6 8"));
}
