//! Golden tests over the compiled `testprio` binary: exact output bytes,
//! exit code discipline, and a file-level pass through every subcommand.

use std::fs;
use std::process::{Command, Output};

fn fixture(name: &str) -> String {
    format!("{}/fixtures/{name}", env!("CARGO_MANIFEST_DIR"))
}

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_testprio"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("stdout is utf-8")
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).expect("stderr is utf-8")
}

#[test]
fn opt_puts_the_failing_test_first() {
    let out = run(&[
        "prioritize",
        "--suite",
        &fixture("login.suite.json"),
        "--technique",
        "Opt",
        "--faults",
        &fixture("login_tc1_fails.csv"),
        "--seed",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 7);
    assert_eq!(lines[0], "TC1");
}

#[test]
fn apfd_prints_six_decimal_places() {
    let dir = tempfile::tempdir().unwrap();
    let order = dir.path().join("order.txt");
    fs::write(&order, "TC1\nTC7\nTC4\nTC5\nTC6\nTC2\nTC3\n").unwrap();
    let out = run(&[
        "apfd",
        "--order",
        order.to_str().unwrap(),
        "--faults",
        &fixture("login_tc1_fails.csv"),
        "--n",
        "7",
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), "0.928571\n");
}

#[test]
fn classify_reads_the_failing_test_sizes() {
    let out = run(&[
        "classify",
        "--suite",
        &fixture("login.suite.json"),
        "--faults",
        &fixture("login_tc1_fails.csv"),
    ]);
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert_eq!(stdout(&out), "ShortTC\n");
}

#[test]
fn unknown_technique_is_a_usage_error_listing_the_valid_ids() {
    let out = run(&[
        "prioritize",
        "--suite",
        &fixture("login.suite.json"),
        "--technique",
        "NoSuchTech",
        "--seed",
        "1",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr(&out);
    assert!(err.contains("unknown technique `NoSuchTech`"), "stderr: {err}");
    for id in ["Opt", "ARPSim2", "Stoop", "SDm", "SA"] {
        assert!(err.contains(id), "stderr misses {id}: {err}");
    }
}

#[test]
fn missing_input_file_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let absent = dir.path().join("absent.lts");
    let out = run(&["gen", "--lts", absent.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "stderr: {}", stderr(&out));
}

#[test]
fn repeated_invocations_are_byte_identical() {
    for technique in ["ARPJac", "SDh", "Ran"] {
        let args = [
            "prioritize",
            "--suite",
            &fixture("login.suite.json"),
            "--technique",
            technique,
            "--seed",
            "42",
        ];
        let first = run(&args);
        let second = run(&args);
        assert_eq!(first.status.code(), Some(0));
        assert_eq!(
            first.stdout, second.stdout,
            "{technique} varied across identical invocations"
        );
    }
}

#[test]
fn every_subcommand_round_trips_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let path = |name: &str| dir.path().join(name).to_str().unwrap().to_string();

    // synth: one model to a directory
    let out = run(&[
        "synth", "--branches", "2", "--joins", "1", "--loops", "0", "--max-depth",
        "10", "--seed", "3", "--out", dir.path().to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "synth: {}", stderr(&out));
    let model = path("m0.lts");
    assert!(fs::metadata(&model).is_ok(), "m0.lts missing");

    // gen: suite from the model
    let suite = path("suite.json");
    let out = run(&["gen", "--lts", &model, "--loop-bound", "2", "--out", &suite]);
    assert_eq!(out.status.code(), Some(0), "gen: {}", stderr(&out));

    // prioritize: order the suite, keep the first id as the failing test
    let out = run(&["prioritize", "--suite", &suite, "--technique", "ST", "--seed", "5"]);
    assert_eq!(out.status.code(), Some(0), "prioritize: {}", stderr(&out));
    let order_text = stdout(&out);
    let ids: Vec<&str> = order_text.lines().collect();
    assert!(!ids.is_empty());

    // classify: fault report naming that test
    let faults = path("faults.csv");
    fs::write(&faults, format!("fault_id,test_id\nF1,{}\n", ids[0])).unwrap();
    let out = run(&["classify", "--suite", &suite, "--faults", &faults]);
    assert_eq!(out.status.code(), Some(0), "classify: {}", stderr(&out));
    let class = stdout(&out);
    assert!(
        ["ConstantSizeTC", "LongTC", "ShortTC", "Mixed"]
            .contains(&class.trim()),
        "unexpected class {class}"
    );

    // apfd: score the printed order against the same report
    let order_file = path("order.txt");
    fs::write(&order_file, &order_text).unwrap();
    let out = run(&[
        "apfd", "--order", &order_file, "--faults", &faults, "--n",
        &ids.len().to_string(),
    ]);
    assert_eq!(out.status.code(), Some(0), "apfd: {}", stderr(&out));
    let value: f64 = stdout(&out).trim().parse().unwrap();
    assert!(value > 0.0 && value <= 1.0);

    // experiment: two runs of one config give byte-identical CSVs
    let experiment = |out_dir: &str| {
        run(&[
            "experiment", "--models", "2", "--repetitions", "3", "--profiles",
            "LongTC,ShortTC", "--branches", "2", "--joins", "1", "--loops", "0",
            "--max-depth", "8", "--synth-seed", "60", "--base-seed", "1",
            "--loop-bound", "2", "--out", out_dir,
        ])
    };
    let out = experiment(&path("exp1"));
    assert_eq!(out.status.code(), Some(0), "experiment: {}", stderr(&out));
    let out = experiment(&path("exp2"));
    assert_eq!(out.status.code(), Some(0), "experiment rerun: {}", stderr(&out));
    let first = fs::read(dir.path().join("exp1/results.csv")).unwrap();
    let second = fs::read(dir.path().join("exp2/results.csv")).unwrap();
    assert_eq!(first, second, "experiment reruns differ");

    // analyze: tables and report from the results
    let out = run(&[
        "analyze", "--results", &path("exp1/results.csv"), "--out", &path("analysis"),
    ]);
    assert_eq!(out.status.code(), Some(0), "analyze: {}", stderr(&out));
    for name in [
        "summary.csv",
        "kruskal.csv",
        "a12_matrix.csv",
        "a12_short_long.csv",
        "report.txt",
    ] {
        assert!(
            dir.path().join("analysis").join(name).exists(),
            "analysis file {name} missing"
        );
    }
}
