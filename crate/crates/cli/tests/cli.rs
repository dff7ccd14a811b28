use std::path::{Path, PathBuf};

use modinv_cli::cli_dispatch;
use proptest::prelude::*;

fn fixture(rel: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../core/fixtures")
        .join(rel)
        .to_string_lossy()
        .into_owned()
}

fn run(args: &[&str]) -> (i32, String, String) {
    let mut out = Vec::new();
    let mut err = Vec::new();
    let argv = std::iter::once("modinv").chain(args.iter().copied());
    let code = cli_dispatch(argv, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p.to_string_lossy().into_owned()
}

#[test]
fn enumerate_su2_4_prints_two_matrices() {
    let (code, out, _) = run(&["enumerate", "su2_4", "--physical"]);
    assert_eq!(code, 0);
    assert!(out.starts_with("2 invariant(s) for su2_4"));
}

#[test]
fn enumerate_writes_decodable_files() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path().to_str().unwrap();
    let (code, _, _) = run(&["enumerate", "su2_10", "--out-dir", d]);
    assert_eq!(code, 0);
    let mut names: Vec<_> = std::fs::read_dir(d)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    assert_eq!(names, ["su2_10.z0.json", "su2_10.z1.json", "su2_10.z2.json"]);
    let z = format!("{d}/su2_10.z1.json");
    assert_eq!(run(&["check", "su2_10", &z]).0, 0);
}

#[test]
fn obstruct_e6_pair_passes() {
    let e6 = fixture("zmat/su2_10.e6.json");
    let (code, out, _) = run(&["obstruct", "su2_10", &e6, &e6, "-n", "3"]);
    assert_eq!(code, 0, "{out}");
    assert!(out.contains("Full n=2 tuple=[0, 1] lhs=12 rhs=12 equal"));
}

#[test]
fn corrupted_file_is_an_input_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "corrupted.mfc", "{\"schema_version\": 1, \"kind\": ");
    let (code, out, err) = run(&["validate", &p]);
    assert_eq!(code, 2);
    assert!(out.is_empty());
    assert!(err.contains("parse error"));
}

#[test]
fn axiom_failure_exits_one_with_report() {
    let dir = tempfile::tempdir().unwrap();
    let (_, text, _) = run(&["catalog", "export", "ising"]);
    let broken = text.replacen("\"t_exponents\": [\n      0,\n      1,\n      8", "\"t_exponents\": [\n      0,\n      1,\n      0", 1);
    assert_ne!(broken, text);
    let p = write(dir.path(), "ising_bad.json", &broken);
    let (code, out, _) = run(&["validate", &p]);
    assert_eq!(code, 1);
    assert!(out.contains("FAIL GaussRelation"));
}

#[test]
fn negative_entry_and_conductor_zero_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let z = write(
        dir.path(),
        "neg.json",
        r#"{"schema_version": 1, "kind": "z_matrix", "payload": {"entries": [[1, -1], [0, 1]]}}"#,
    );
    let (code, _, err) = run(&["check", "ising", &z]);
    assert_eq!(code, 2);
    assert!(err.contains("integrity error"));
    let md = write(
        dir.path(),
        "zero.json",
        r#"{"schema_version": 1, "kind": "modular_data", "payload": {"name": "x", "conductor": 0,
            "labels": ["1"], "unit_index": 0, "s_tilde": [[{"conductor": 1, "coeffs": ["1"]}]],
            "t_exponents": [0]}}"#,
    );
    assert_eq!(run(&["validate", &md]).0, 2);
}

#[test]
fn non_invariant_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let z = write(
        dir.path(),
        "e12.json",
        r#"{"schema_version": 1, "kind": "z_matrix", "payload": {"entries": [[1, 1, 0], [0, 1, 0], [0, 0, 1]]}}"#,
    );
    let (code, out, _) = run(&["check", "ising", &z]);
    assert_eq!(code, 1);
    assert!(out.contains("commutes with S and T: FAIL"));
}

#[test]
fn every_catalog_entry_exports_and_validates() {
    let dir = tempfile::tempdir().unwrap();
    let (code, list, _) = run(&["catalog", "list"]);
    assert_eq!(code, 0);
    for id in list.lines() {
        let p = dir.path().join(format!("{id}.json"));
        let p = p.to_str().unwrap();
        assert_eq!(run(&["catalog", "export", id, "-o", p]).0, 0, "{id}");
        assert_eq!(run(&["validate", p]).0, 0, "{id}");
        let (_, a, _) = run(&["catalog", "export", id]);
        assert_eq!(a, std::fs::read_to_string(p).unwrap());
    }
}

#[test]
fn structured_output_is_deterministic_json() {
    let args = ["--format", "structured", "enumerate", "su2_16"];
    let (c1, a, _) = run(&args);
    let (c2, b, _) = run(&args);
    assert_eq!((c1, c2), (0, 0));
    assert_eq!(a, b);
    let v: serde_json::Value = serde_json::from_str(&a).unwrap();
    assert_eq!(v["kind"], "report");
    assert_eq!(v["payload"].as_array().unwrap().len(), 3);
}

#[test]
fn context_commands_on_fixtures() {
    assert_eq!(run(&["exponents", &fixture("contexts/e6.json")]).0, 0);
    assert_eq!(run(&["exponents", &fixture("contexts/d4.json")]).0, 0);
    let ctx = fixture("contexts/trivial_ising.json");
    let (code, out, _) = run(&["ortho", &ctx, &fixture("chi/ising_trace_toy.json"), "--relation", "trace"]);
    assert_eq!(code, 0, "{out}");
    let fib = fixture("contexts/trivial_fibonacci.json");
    let chi = fixture("chi/fibonacci_unit_supported.json");
    assert_eq!(run(&["ortho", &fib, &chi, "--relation", "1"]).0, 0);
    assert_eq!(run(&["ortho", &fib, &chi, "--relation", "2"]).0, 0);
    // a single table cannot feed the trace formula
    assert_eq!(run(&["ortho", &fib, &chi, "--relation", "trace"]).0, 2);
}

#[test]
fn double_z_and_series() {
    let a = fixture("zmat/su2_4.a.json");
    let d4 = fixture("zmat/su2_4.d4.json");
    assert_eq!(run(&["double-z", "su2_4", &a, &d4]).0, 0);
    assert_eq!(run(&["series", "su2_4", &d4, "-n", "3"]).0, 0);
    assert_eq!(run(&["fusion", "fibonacci"]).1, "1 x 1 = 1\n1 x tau = tau\ntau x tau = 1 + tau\n");
}

#[test]
fn usage_errors() {
    assert_eq!(run(&[]).0, 2);
    assert_eq!(run(&["frobnicate"]).0, 2);
    assert_eq!(run(&["validate", "su2_999"]).0, 2);
    assert_eq!(run(&["enumerate", "su2_4", "--physical", "--bound", "2"]).0, 2);
    assert_eq!(run(&["--help"]).0, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn never_panics_on_arbitrary_arguments(
        cmd in prop::sample::select(vec![
            "validate", "catalog", "fusion", "enumerate", "check", "obstruct",
            "series", "exponents", "double-z", "ortho",
        ]),
        rest in prop::collection::vec("[-a-z0-9_./]{0,8}", 0..4),
    ) {
        let mut args = vec![cmd];
        args.extend(rest.iter().map(String::as_str));
        let code = std::panic::catch_unwind(|| run(&args).0);
        prop_assert!(matches!(code, Ok(0..=2)));
    }
}
