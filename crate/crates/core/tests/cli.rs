use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use crips_core::analysis::summarize_runs;
use crips_core::experiment::{load_traces, read_summary};

fn crips(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_crips"))
        .args(args)
        .output()
        .unwrap()
}

fn small_run(out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![
        "--algorithm",
        "crips,pso,pso_vmax,pso_ld,rand_uniform,rand_powerlaw",
        "--dims",
        "6",
        "--particles",
        "8",
        "--iterations",
        "300",
        "--runs",
        "3",
        "--seed",
        "41",
        "--snapshot",
        "50,200",
        "--out",
        out.to_str().unwrap(),
    ];
    args.extend_from_slice(extra);
    crips(&args)
}

fn files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut all: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    all.sort();
    all
}

#[test]
fn repeated_invocations_are_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    assert!(small_run(&a, &[]).status.success());
    assert!(small_run(&b, &[]).status.success());
    let (fa, fb) = (files(&a), files(&b));
    assert_eq!(fa.len(), 6 * 3 * 3 + 1);
    assert_eq!(fa, fb);
}

#[test]
fn summary_equals_recomputation_from_traces() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(small_run(tmp.path(), &[]).status.success());
    let stored = read_summary(tmp.path()).unwrap();
    let traces = load_traces(tmp.path()).unwrap();
    assert_eq!(traces.len(), 18);
    assert_eq!(summarize_runs(&traces, &[50, 200]).unwrap(), stored);
}

#[test]
fn trace_files_have_the_documented_columns() {
    let tmp = tempfile::tempdir().unwrap();
    assert!(small_run(tmp.path(), &["--metric", "centroid_distance"])
        .status
        .success());
    let trace = fs::read_to_string(tmp.path().join("pso_run000.csv")).unwrap();
    assert_eq!(
        trace.lines().next(),
        Some("iteration,best_fitness,metric,omega,alpha1,alpha2")
    );
    assert_eq!(trace.lines().count(), 301);
    let events = fs::read_to_string(tmp.path().join("pso_run000_events.csv")).unwrap();
    assert_eq!(events.lines().next(), Some("iteration,best_fitness"));
    assert!(tmp.path().join("pso_run002_histogram.json").is_file());
}

#[test]
fn config_file_and_overrides() {
    let tmp = tempfile::tempdir().unwrap();
    let cfg = tmp.path().join("run.cfg");
    fs::write(
        &cfg,
        "# small griewank batch\nalgorithm = pso\nfunction = griewank\ndims = 3\nparticles = 4\niterations = 20\nruns = 1\n",
    )
    .unwrap();
    let out = tmp.path().join("out");
    let o = crips(&[
        "--config",
        cfg.to_str().unwrap(),
        "--iterations",
        "10",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let trace = fs::read_to_string(out.join("pso_run000.csv")).unwrap();
    assert_eq!(trace.lines().count(), 11);
}

#[test]
fn configuration_errors_exit_with_2() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().to_str().unwrap();
    for (args, key) in [
        (vec!["--algorithm", "crips", "--epsilon", "1.5"], "epsilon"),
        (
            vec!["--algorithm", "crips", "--function", "rastrigin"],
            "function",
        ),
        (vec!["--algorithm", "annealing"], "algorithm"),
        (vec!["--algorithm", "pso", "--set", "colour=red"], "colour"),
        (vec!["--algorithm", "pso", "--particles", "0"], "particles"),
        (vec!["--dims", "3"], "algorithm"),
    ] {
        let mut args = args.clone();
        args.extend_from_slice(&["--out", out]);
        let o = crips(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        let stderr = String::from_utf8_lossy(&o.stderr);
        assert!(stderr.contains(key), "{stderr}");
    }
}

#[test]
fn io_errors_exit_with_3() {
    let tmp = tempfile::tempdir().unwrap();
    let blocker = tmp.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = crips(&[
        "--algorithm",
        "pso",
        "--iterations",
        "5",
        "--runs",
        "1",
        "--out",
        blocker.join("x").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));

    let o = crips(&["--config", tmp.path().join("missing.cfg").to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(3));
}

#[test]
fn analyze_reports_a_histogram() {
    let tmp = tempfile::tempdir().unwrap();
    let o = crips(&[
        "--algorithm",
        "crips",
        "--dims",
        "5",
        "--particles",
        "30",
        "--iterations",
        "400",
        "--runs",
        "1",
        "--metric",
        "centroid_distance",
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let o = crips(&[
        "analyze",
        tmp.path().join("crips_run000.csv").to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["counts"].as_array().unwrap().len(), 40);
    assert!(v["overshoot_count"].is_u64());
}
