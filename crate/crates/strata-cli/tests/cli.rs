//! End-to-end checks of the command-line surface: flags, exit codes, and
//! determinism of the emitted documents.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_strata"))
        .args(args)
        .output()
        .expect("binary runs")
}

#[test]
fn classify_g2_short_a1_is_normal() {
    let out = run(&["classify", "--type", "G2", "--isogeny", "sc", "--subset", "tildeA1"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["normal_generic"], "yes");
    assert_eq!(doc["normal_bytype"], true);
    assert_eq!(doc["smooth"], "yes");
}

#[test]
fn classify_e7_adjoint_d4a1_is_not_normal() {
    let out = run(&[
        "classify", "--type", "E7", "--isogeny", "adjoint", "--subset", "D4+A1",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let reports = doc.as_array().expect("two matching classes");
    assert_eq!(reports.len(), 2);
    for r in reports {
        assert_eq!(r["normal_generic"], "no");
        assert_eq!(r["normal_bytype"], false);
    }
}

#[test]
fn classify_accepts_explicit_indices() {
    let out = run(&["classify", "--type", "C3", "--isogeny", "PSp", "--subset", "0,2"]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["rep"], serde_json::json!([0, 2]));
}

#[test]
fn tables_match_for_f4() {
    let out = run(&["tables", "--type", "F4", "--isogeny", "sc"]);
    assert!(out.status.success(), "expected exit 0 on exact match");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["disagreements"].as_array().unwrap().len(), 0);
}

#[test]
fn tables_match_for_so_even() {
    let out = run(&["tables", "--type", "D4", "--isogeny", "SO"]);
    assert!(out.status.success());
}

#[test]
fn usage_errors_exit_with_two() {
    let out = run(&["classify", "--type", "Z9", "--isogeny", "sc", "--subset", "empty"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["classify", "--type", "B4", "--isogeny", "HSpin", "--subset", "empty"]);
    assert_eq!(out.status.code(), Some(2));
    let out = run(&["classify", "--type", "A3", "--isogeny", "sc", "--subset", "0,1,2,3"]);
    assert_eq!(out.status.code(), Some(2), "full set is not finite type");
    let out = run(&["enumerate"]);
    assert_eq!(out.status.code(), Some(2), "missing required flag");
}

#[test]
fn oracle_check_agrees_on_a2() {
    let out = run(&[
        "oracle-check", "--type", "A2", "--isogeny", "adjoint", "--max-len", "10",
    ]);
    assert!(out.status.success());
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["agree"], true);
}

#[test]
fn invariants_check_consistent_on_g2() {
    let out = run(&[
        "invariants-check", "--type", "G2", "--isogeny", "sc", "--max-degree", "6",
    ]);
    assert!(out.status.success());
}

#[test]
fn identical_invocations_are_byte_identical() {
    for args in [
        vec!["enumerate", "--type", "E6", "--isogeny", "adjoint"],
        vec!["classify", "--type", "D5", "--isogeny", "PSO", "--subset", "2A1"],
        vec!["tables", "--type", "G2", "--isogeny", "sc"],
    ] {
        let a = run(&args);
        let b = run(&args);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "nondeterministic output for {args:?}");
    }
}
