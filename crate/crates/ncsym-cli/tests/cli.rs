//! End-to-end checks of the command-line driver: exit codes, output
//! formats, and byte-level determinism under a fixed seed.

use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ncsym-cli"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn classify_labels_the_three_instances() {
    let biq = run(&["classify", "--instance", "biquadratic"]);
    assert!(biq.status.success());
    let text = stdout(&biq);
    assert!(text.contains("label: Algebraic"));
    assert!(text.contains("|sigma| = 2"));

    let d4 = run(&["classify", "--instance", "d4-quartic"]);
    assert!(d4.status.success());
    assert!(stdout(&d4).contains("label: Algebraic"));

    let ratfn = run(&["classify", "--instance", "rational-function"]);
    assert!(ratfn.status.success());
    let text = stdout(&ratfn);
    assert!(text.contains("label: NonAlgebraic"));
    assert!(text.contains("twist order: infinite"));
}

#[test]
fn unknown_instances_and_probes_exit_with_a_usage_error() {
    assert_eq!(run(&["classify", "--instance", "nope"]).status.code(), Some(2));
    assert_eq!(run(&["verify", "--instance", "nope"]).status.code(), Some(2));
    assert_eq!(
        run(&["probe", "nonsense", "--instance", "biquadratic"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["probe", "center", "--instance", "rational-function"]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["verify", "--instance", "biquadratic", "--suite", "nope"]).status.code(),
        Some(2)
    );
    // the degree budget floor is part of the config contract
    assert_eq!(
        run(&["hilbert", "--instance", "biquadratic", "--nmax", "3"]).status.code(),
        Some(2)
    );
}

#[test]
fn hilbert_emits_the_expected_rows() {
    let out = run(&["hilbert", "--instance", "biquadratic", "--nmax", "6"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "n,dim_tensor,dim_relations,dim_quotient,dim_b,dim_gr_loc");
    assert_eq!(lines[1], "0,1,0,1,1,1");
    assert_eq!(lines[4], "3,8,4,4,2,2");
    assert_eq!(lines[5], "4,16,11,5,2,");
    assert_eq!(lines[7], "6,64,57,7,2,");

    // byte-identical on a second run
    let again = run(&["hilbert", "--instance", "biquadratic", "--nmax", "6"]);
    assert_eq!(out.stdout, again.stdout);
}

#[test]
fn verify_reports_are_deterministic_json() {
    let args = [
        "verify",
        "--instance",
        "d4-quartic",
        "--suite",
        "field-tower",
        "--seed",
        "7",
    ];
    let first = run(&args);
    assert!(first.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&first)).expect("valid json");
    assert_eq!(report["instance"], "d4-quartic");
    assert_eq!(report["all_passed"], true);
    assert_eq!(report["suites"].as_array().unwrap().len(), 1);
    assert_eq!(report["suites"][0]["suite"], "field-tower");
    assert_eq!(report["suites"][0]["checks_failed"], 0);
    // timing lives on stderr, never in the report
    assert!(!stdout(&first).contains("secs"));

    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn verify_runs_every_suite_in_quick_mode() {
    let out = run(&["verify", "--instance", "biquadratic", "--nmax", "4", "--seed", "3"]);
    assert!(out.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
    assert_eq!(report["all_passed"], true);
    let suites = report["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 4);
    let names: Vec<&str> = suites.iter().map(|s| s["suite"].as_str().unwrap()).collect();
    assert_eq!(names, ["field-tower", "indexed-tensor", "quotient", "localization"]);
}

#[test]
fn saturation_probe_is_deterministic_and_certifies_the_generator() {
    let args = [
        "probe",
        "saturation",
        "--instance",
        "rational-function",
        "--seed",
        "1",
        "--depth",
        "2",
        "--level",
        "2",
    ];
    let first = run(&args);
    assert!(first.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&first)).expect("valid json");
    assert_eq!(report["probe"], "saturation");
    let runs = report["certificate"].as_array().unwrap();
    assert_eq!(runs.len(), 4);
    // the distinguished degree-two generator comes first and certifies
    assert!(runs[0]["outcome"]["ReachedGPower"].is_u64());

    let second = run(&args);
    assert_eq!(first.stdout, second.stdout);
}

#[test]
fn center_probe_reports_the_intersection_at_level_zero() {
    for (key, dim) in [("biquadratic", 1u64), ("d4-quartic", 2)] {
        let out = run(&["probe", "center", "--instance", key]);
        assert!(out.status.success());
        let report: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid json");
        assert_eq!(report["certificate"]["level"], 0);
        assert_eq!(report["certificate"]["dim_over_q"], dim);
        assert_eq!(report["certificate"]["contains_intersection_scalars"], true);
    }
}

#[test]
fn config_files_set_defaults_and_flags_override_them() {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("run.toml");
    std::fs::write(&path, "instance = \"d4-quartic\"\nnmax = 4\nseed = 9\n").unwrap();
    let cfg = path.to_str().unwrap();

    let from_file = run(&["verify", "--config", cfg, "--suite", "field-tower"]);
    assert!(from_file.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&from_file)).unwrap();
    assert_eq!(report["instance"], "d4-quartic");
    assert_eq!(report["nmax"], 4);
    assert_eq!(report["seed"], 9);

    let overridden = run(&[
        "verify",
        "--config",
        cfg,
        "--suite",
        "field-tower",
        "--instance",
        "biquadratic",
    ]);
    assert!(overridden.status.success());
    let report: serde_json::Value = serde_json::from_str(&stdout(&overridden)).unwrap();
    assert_eq!(report["instance"], "biquadratic");
    assert_eq!(report["nmax"], 4);

    // unknown keys in the file are config errors, not silent typos
    std::fs::write(&path, "instnce = \"biquadratic\"\n").unwrap();
    assert_eq!(run(&["verify", "--config", cfg]).status.code(), Some(2));
}

#[test]
fn output_files_match_stdout() {
    let dir = tempfile::tempdir().expect("temp dir");
    let path = dir.path().join("table.csv");
    let to_file = run(&[
        "hilbert",
        "--instance",
        "rational-function",
        "--nmax",
        "4",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(to_file.status.success());
    assert!(stdout(&to_file).is_empty());
    let written = std::fs::read_to_string(&path).unwrap();
    let direct = run(&["hilbert", "--instance", "rational-function", "--nmax", "4"]);
    assert_eq!(written, stdout(&direct));
}
