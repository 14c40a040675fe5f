use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn coarse(args: &[&str], dir: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_coarse"))
        .args(args)
        .current_dir(dir)
        .output()
        .expect("binary runs")
}

fn report(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap_or_else(|e| {
        panic!(
            "stdout is not JSON ({e}); stderr: {}",
            String::from_utf8_lossy(&out.stderr)
        )
    })
}

fn write(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

#[test]
fn two_point_file_gives_midpoint() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "two.csv", "1,2\n3,6\n");
    let out = coarse(&["centres", "two.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let c = r["result"]["centre"].as_array().unwrap();
    assert!((c[0].as_f64().unwrap() - 2.0).abs() < 1e-9);
    assert!((c[1].as_f64().unwrap() - 4.0).abs() < 1e-9);
    assert!((r["result"]["rho"].as_f64().unwrap() - 5f64.sqrt()).abs() < 1e-9);
    assert_eq!(r["manifest"]["subcommand"], "centres");
    assert_eq!(r["manifest"]["seed"], 0);
}

#[test]
fn nested_check_reports_hilbert_verdict() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.csv", "0,0\n4,0\n2,3\n");
    write(dir.path(), "b.csv", "0,0\n4,0\n");
    let out = coarse(&["centres", "--check", "nested", "a.csv", "b.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["holds"], true);
    assert_eq!(r["result"]["hilbert_bound"]["holds"], true);
    // B is not inside A the other way round.
    let out = coarse(&["centres", "--check", "nested", "b.csv", "a.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn malformed_row_exits_with_input_error() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "bad.csv", "0,0\n1,x\n");
    let out = coarse(&["centres", "bad.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));
    let out = coarse(&["centres", "missing.csv"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn lp_space_centre() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "pts.json", "[[0,0],[2,0],[0,2],[2,2]]");
    let out = coarse(&["centres", "pts.json", "--space", "lp:3"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    let c = r["result"]["centre"].as_array().unwrap();
    assert!((c[0].as_f64().unwrap() - 1.0).abs() < 1e-6);
    let out = coarse(&["centres", "pts.json", "--space", "lp:x"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn spectra_verdicts_and_caps() {
    let dir = tempfile::tempdir().unwrap();
    let out = coarse(&["spectra", "cyclic:10..100:10", "--csv", "s.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["expander"], false);
    assert_eq!(r["manifest"]["tolerances"]["threshold"], 0.05);
    let csv = fs::read_to_string(dir.path().join("s.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("label,eigenvalue"));
    assert_eq!(csv.lines().count(), 1 + (10..=100).step_by(10).sum::<usize>());

    let out = coarse(&["spectra", "sl2:3,5,7"], dir.path());
    assert_eq!(report(&out)["result"]["members"].as_array().unwrap().len(), 3);

    assert_eq!(coarse(&["spectra", ""], dir.path()).status.code(), Some(2));
    assert_eq!(coarse(&["spectra", "cyclic:"], dir.path()).status.code(), Some(2));
    assert_eq!(
        coarse(&["spectra", "cyclic:50", "--cap", "10"], dir.path())
            .status
            .code(),
        Some(3)
    );
}

#[test]
fn spectra_reads_group_files() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "z3.json",
        r#"{"order":3,"mult":[0,1,2,1,2,0,2,0,1],"gens":[1,2]}"#,
    );
    let out = coarse(&["spectra", "z3.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let h = report(&out)["result"]["inf_h_gap"].as_f64().unwrap();
    assert!((h - 0.5).abs() < 1e-12);
    write(dir.path(), "bad.json", r#"{"order":2,"mult":[0,1,1,1],"gens":[1]}"#);
    assert_eq!(coarse(&["spectra", "bad.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn homeo_certificate() {
    let dir = tempfile::tempdir().unwrap();
    let out = coarse(&["homeo"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert_eq!(r["result"]["commutator_ab_at_zero"], "1/2");
    assert_eq!(r["result"]["commutator_inv_at_half"], "1");
    assert_eq!(r["result"]["powers"][99]["value_at_zero"], "100");
}

#[test]
fn homeo_boundedness() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "a.json", r#"{"breakpoints":[[0,1]],"values":[[-1,4]]}"#);
    write(dir.path(), "t.json", r#"{"breakpoints":[[0,1]],"values":[[7,2]]}"#);
    let out = coarse(&["homeo", "a.json", "t.json", "--bound", "3"], dir.path());
    let r = report(&out);
    assert_eq!(r["result"]["max_abs_at_zero"], "7/2");
    assert_eq!(r["result"]["bounded"], false);
    write(
        dir.path(),
        "bad.json",
        r#"{"breakpoints":[[0,1],[1,2]],"values":[[0,1],[0,1]]}"#,
    );
    assert_eq!(coarse(&["homeo", "bad.json"], dir.path()).status.code(), Some(2));
}

#[test]
fn unbounded_cocycle_growth_csv() {
    let dir = tempfile::tempdir().unwrap();
    let out = coarse(
        &["product", "--demo", "unbounded-cocycle", "--csv", "g.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    let csv = fs::read_to_string(dir.path().join("g.csv")).unwrap();
    let norms: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect();
    assert_eq!(norms.len(), 7);
    assert!(norms.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn iteration_and_kazhdan_demos() {
    let dir = tempfile::tempdir().unwrap();
    let out = coarse(&["product", "--demo", "iteration", "--csv", "it.csv"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r["result"]["final_sup_displacement"].as_f64().unwrap() <= 1e-9);
    let csv = fs::read_to_string(dir.path().join("it.csv")).unwrap();
    assert_eq!(csv.lines().next(), Some("k,step,bound,sup_displacement"));
    let out = coarse(&["product", "--demo", "kazhdan", "--seed", "4"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["holds"], true);
    // Z/2 has no two-sided gap.
    let out = coarse(&["product", "--demo", "iteration", "--family", "cyclic:2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

const ROTATION: &str = r#"{"dim": 2,
 "generators": [{"label": "s", "matrix": [[0, -1], [1, 0]], "vector": [2, 0]}],
 "relations": ["s^4"]}"#;
const TRANSLATION: &str = r#"{"dim": 2, "generators": [{"label": "t", "matrix": [[1, 0], [0, 1]], "vector": [1, 0]}]}"#;

#[test]
fn descent_trace_ends_below_tolerance() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "rot.json", ROTATION);
    let out = coarse(
        &["actions", "descend", "rot.json", "--start=-3,5", "--csv", "d.csv"],
        dir.path(),
    );
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["outcome"], "converged");
    let csv = fs::read_to_string(dir.path().join("d.csv")).unwrap();
    let last: f64 = csv.lines().last().unwrap().split(',').nth(1).unwrap().parse().unwrap();
    assert!(last < 1e-9);
}

#[test]
fn translation_gives_witness_and_no_coboundary() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "t.json", TRANSLATION);
    let out = coarse(&["actions", "descend", "t.json"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    assert_eq!(report(&out)["result"]["outcome"], "witness");
    let out = coarse(&["actions", "coboundary", "t.json"], dir.path());
    assert_eq!(report(&out)["result"]["coboundary"], false);
    write(dir.path(), "rot.json", ROTATION);
    let out = coarse(&["actions", "coboundary", "rot.json"], dir.path());
    let r = report(&out);
    assert_eq!(r["result"]["coboundary"], true);
    assert!((r["result"]["fixed_point"][0].as_f64().unwrap() - 1.0).abs() < 1e-12);
    let out = coarse(&["actions", "cocycle", "rot.json"], dir.path());
    assert_eq!(report(&out)["holds"], true);
}

#[test]
fn broken_actions_are_input_errors() {
    let dir = tempfile::tempdir().unwrap();
    write(
        dir.path(),
        "shear.json",
        r#"{"dim": 2, "generators": [{"label": "s", "matrix": [[1, 1], [0, 1]], "vector": [0, 0]}]}"#,
    );
    assert_eq!(
        coarse(&["actions", "descend", "shear.json"], dir.path()).status.code(),
        Some(2)
    );
    write(
        dir.path(),
        "rel.json",
        &TRANSLATION.replace("}]}", "}], \"relations\": [\"t^2\"]}"),
    );
    assert_eq!(
        coarse(&["actions", "descend", "rel.json"], dir.path()).status.code(),
        Some(2)
    );
    write(dir.path(), "rot.json", ROTATION);
    let out = coarse(&["actions", "descend", "rot.json", "--alpha", "2"], dir.path());
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn gaussian_embedding_of_point_file() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "p.csv", "0,0\n1,0\n0,1\n5,5\n");
    let out = coarse(&["actions", "gaussian", "p.csv", "--t", "0.5"], dir.path());
    assert_eq!(out.status.code(), Some(0));
    let r = report(&out);
    assert!(r["result"]["min_eigenvalue"].as_f64().unwrap() > 0.0);
    assert!(r["result"]["residual"].as_f64().unwrap() <= 1e-8);
}

#[test]
fn identical_manifests_give_identical_reports() {
    let dir = tempfile::tempdir().unwrap();
    write(dir.path(), "rot.json", ROTATION);
    for args in [
        vec!["product", "--demo", "kazhdan", "--seed", "9"],
        vec!["actions", "descend", "rot.json", "--seed", "9"],
        vec!["spectra", "dihedral:4..8"],
        vec!["homeo"],
    ] {
        let mut a = args.clone();
        a.extend(["--out", "r1.json"]);
        let mut b = args.clone();
        b.extend(["--out", "r2.json"]);
        assert_eq!(coarse(&a, dir.path()).status.code(), Some(0));
        assert_eq!(coarse(&b, dir.path()).status.code(), Some(0));
        let r1 = fs::read_to_string(dir.path().join("r1.json")).unwrap();
        let r2 = fs::read_to_string(dir.path().join("r2.json")).unwrap();
        // Only the output path differs.
        assert_eq!(r1.replace("r1.json", "r.json"), r2.replace("r2.json", "r.json"));
    }
}
