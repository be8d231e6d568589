//! CLI acceptance: exact reproduction of the distorted-wall certificate
//! through the command line, and byte-identical JSON reports across
//! repeated runs of every command on every fixture.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};
use std::time::Instant;

use graphmf_cli::report::Report;
use serde_json::Value;

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("tests/fixtures")
        .join(name)
}

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_graphmf")
}

fn run(args: &[&str], json_out: Option<&Path>, env: &[(&str, &str)]) -> Output {
    let mut cmd = Command::new(bin());
    cmd.args(args);
    if let Some(path) = json_out {
        cmd.arg("--json").arg(path);
    }
    for (k, v) in env {
        cmd.env(k, v);
    }
    cmd.output().expect("binary runs")
}

fn tmp(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("graphmf-accept-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

#[test]
fn criterion_2_cli_emits_exact_unipotent_certificate() {
    let started = Instant::now();
    let manifest = fixture("notqi.json");
    let manifest_str = manifest.to_str().unwrap();

    let check = run(&["check", manifest_str], None, &[]);
    assert!(check.status.success());
    let stdout = String::from_utf8_lossy(&check.stdout);
    assert!(stdout.contains("irreducible: false"), "stdout: {}", stdout);

    let out = tmp("notqi-cert.json");
    let obstruct = run(
        &["obstruct", manifest_str, "--kind", "monodromy"],
        Some(&out),
        &[],
    );
    assert!(obstruct.status.success());
    let report: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    let cert = &report["result"]["certificate"];
    assert_eq!(cert["verdict"], "obstructed");
    assert_eq!(cert["witness"]["class"], "unipotent");
    let matrix: Vec<Vec<i64>> = serde_json::from_value(cert["witness"]["matrix"].clone()).unwrap();
    assert_eq!(
        matrix,
        vec![vec![1, 0], vec![1, 1]],
        "certificate matrix must be [[1,0],[1,1]]"
    );
    let elapsed = started.elapsed();
    assert!(
        elapsed.as_secs_f64() < 1.0,
        "criterion 2 (cli) exceeded 1 s: {:?}",
        elapsed
    );
    println!(
        "[PASS] criterion 2 (cli): obstruct --kind monodromy emits the exact unipotent certificate ({:.3} s)",
        elapsed.as_secs_f64()
    );
}

#[test]
fn criterion_8_reports_are_byte_identical_across_runs() {
    let started = Instant::now();
    let cases: Vec<(Vec<String>, Vec<(&str, &str)>)> = vec![
        (vec!["validate".into(), p("notqi.json")], vec![]),
        (vec!["validate".into(), p("double_transverse.json")], vec![]),
        (vec!["check".into(), p("notqi.json")], vec![]),
        (vec!["check".into(), p("two_walls.json")], vec![]),
        (vec!["check".into(), p("hyperbolic_piece.json")], vec![]),
        (
            vec!["classify".into(), p("single_trivial_fiber.json")],
            vec![],
        ),
        (
            vec!["classify".into(), p("single_torus_fiber.json")],
            vec![],
        ),
        (vec!["classify".into(), p("double_transverse.json")], vec![]),
        (vec!["classify".into(), p("hyperbolic_piece.json")], vec![]),
        (vec!["classify".into(), p("two_walls.json")], vec![]),
        (vec!["classify".into(), p("notqi.json")], vec![]),
        (vec!["acyl".into(), p("double_transverse.json")], vec![]),
        (vec!["acyl".into(), p("single_trivial_fiber.json")], vec![]),
        (
            vec![
                "acyl".into(),
                p("notqi.json"),
                "--max-len".into(),
                "4".into(),
            ],
            vec![],
        ),
        (
            vec![
                "equiv".into(),
                p("family.json"),
                "--edge".into(),
                "0".into(),
                "--patterns".into(),
                p("patterns_a3_a5.json"),
            ],
            vec![],
        ),
        (
            vec![
                "generate".into(),
                p("family.json"),
                "--edge".into(),
                "0".into(),
                "--count".into(),
                "5".into(),
            ],
            vec![],
        ),
        (
            vec![
                "obstruct".into(),
                p("notqi.json"),
                "--kind".into(),
                "monodromy".into(),
            ],
            vec![],
        ),
        (
            vec![
                "obstruct".into(),
                p("notqi.json"),
                "--kind".into(),
                "monodromy".into(),
            ],
            vec![("GRAPHMF_MAX_CYCLE_LEN", "1")],
        ),
        (
            vec![
                "obstruct".into(),
                p("single_torus_fiber.json"),
                "--kind".into(),
                "euler".into(),
            ],
            vec![],
        ),
        (
            vec![
                "obstruct".into(),
                p("twisted_double_input.json"),
                "--kind".into(),
                "twisted-double".into(),
            ],
            vec![],
        ),
        (
            vec![
                "invariant".into(),
                p("labelled_tree.json"),
                p("swapped_cusps.json"),
            ],
            vec![],
        ),
        (
            vec![
                "invariant".into(),
                p("labelled_tree.json"),
                p("labelled_tree.json"),
            ],
            vec![],
        ),
        (vec!["dehn".into(), p("double_transverse.json")], vec![]),
        (
            vec![
                "dehn".into(),
                p("double_transverse.json"),
                "--bounds".into(),
                p("bounds_linear.json"),
                "--lambda".into(),
                "2".into(),
            ],
            vec![],
        ),
    ];

    for (i, (args, env)) in cases.iter().enumerate() {
        let args: Vec<&str> = args.iter().map(String::as_str).collect();
        let out1 = tmp(&format!("case{}-run1.json", i));
        let out2 = tmp(&format!("case{}-run2.json", i));
        let r1 = run(&args, Some(&out1), env);
        let r2 = run(&args, Some(&out2), env);
        assert!(r1.status.success(), "case {} run 1 failed: {:?}", i, r1);
        assert!(r2.status.success(), "case {} run 2 failed: {:?}", i, r2);
        assert_eq!(r1.stdout, r2.stdout, "case {}: stdout differs", i);
        let b1 = std::fs::read(&out1).unwrap();
        let b2 = std::fs::read(&out2).unwrap();
        assert_eq!(
            b1, b2,
            "case {} ({:?}): reports not byte-identical",
            i, args
        );
        // the report round-trips through its own schema
        let report: Report = serde_json::from_slice(&b1).unwrap();
        assert_eq!(report.tool.name, "graphmf");
        assert!(!report.inputs.is_empty());
    }
    let elapsed = started.elapsed();
    println!(
        "[PASS] criterion 8: {} CLI invocations produce byte-identical reports across runs ({:.2} s)",
        cases.len(),
        elapsed.as_secs_f64()
    );
}

fn p(name: &str) -> String {
    fixture(name).to_str().unwrap().to_string()
}

#[test]
fn exit_codes_follow_the_contract() {
    // 0: verdict computed (even a negative verdict)
    let ok = run(&["check", &p("notqi.json")], None, &[]);
    assert_eq!(ok.status.code(), Some(0));
    // 1: invalid input
    let bad = run(&["validate", &p("invalid_det.json")], None, &[]);
    assert_eq!(bad.status.code(), Some(1));
    let missing = run(&["validate", "/nonexistent/file.json"], None, &[]);
    assert_eq!(missing.status.code(), Some(1));
    // euler without a homology block is an input error
    let nohom = run(
        &["obstruct", &p("notqi.json"), "--kind", "euler"],
        None,
        &[],
    );
    assert_eq!(nohom.status.code(), Some(1));
    // malformed command lines are input errors too
    let badcmd = run(&["frobnicate"], None, &[]);
    assert_eq!(badcmd.status.code(), Some(1));
    let badflag = run(
        &["acyl", &p("notqi.json"), "--max-len", "not-a-number"],
        None,
        &[],
    );
    assert_eq!(badflag.status.code(), Some(1));
}

#[test]
fn classify_summary_reports_the_cstar_exception() {
    // a single piece with torus fiber and no internal walls is the one
    // configuration whose fundamental group is not C*-simple
    let r = run(&["classify", &p("single_torus_fiber.json")], None, &[]);
    assert!(r.status.success());
    let stdout = String::from_utf8_lossy(&r.stdout);
    assert!(stdout.contains("cstar_simple: false"), "stdout: {}", stdout);
}

#[test]
fn cycle_length_env_var_bounds_the_search() {
    let short = run(
        &["obstruct", &p("notqi.json"), "--kind", "monodromy"],
        None,
        &[("GRAPHMF_MAX_CYCLE_LEN", "1")],
    );
    assert!(short.status.success());
    let stdout = String::from_utf8_lossy(&short.stdout);
    assert!(
        stdout.contains("no_obstruction_found"),
        "stdout: {}",
        stdout
    );
}

#[test]
fn generated_patterns_file_is_written() {
    let out = tmp("patterns-out.json");
    let r = run(
        &[
            "generate",
            &p("family.json"),
            "--edge",
            "0",
            "--count",
            "3",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
        &[],
    );
    assert!(r.status.success());
    let patterns: Value = serde_json::from_str(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(patterns.as_array().unwrap().len(), 3);
}

#[test]
fn twisted_double_manifest_roundtrips_through_check() {
    let out = tmp("twisted-manifest.json");
    let r = run(
        &[
            "obstruct",
            &p("twisted_double_input.json"),
            "--kind",
            "twisted-double",
            "--out",
            out.to_str().unwrap(),
        ],
        None,
        &[],
    );
    assert!(r.status.success());
    let check = run(&["check", out.to_str().unwrap()], None, &[]);
    assert!(check.status.success());
    let stdout = String::from_utf8_lossy(&check.stdout);
    assert!(stdout.contains("irreducible: true"), "stdout: {}", stdout);
}
