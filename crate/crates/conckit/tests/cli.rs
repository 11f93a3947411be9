//! End-to-end checks of the command-line surface.

use std::path::Path;
use std::process::Command;

use conckit::cli::{run, EXIT_INVALID_BOUND, EXIT_OK, EXIT_USAGE, EXIT_VERIFY_FAIL};
use conckit::harness::run_suite;
use conckit::report::{from_json, to_json};
use conckit::suites;

fn call(line: &str) -> (i32, String, String) {
    let args: Vec<String> = std::iter::once("conckit").chain(line.split_whitespace()).map(String::from).collect();
    let (mut out, mut err) = (Vec::new(), Vec::new());
    let code = run(&args, &mut out, &mut err);
    (code, String::from_utf8(out).unwrap(), String::from_utf8(err).unwrap())
}

fn field(out: &str, key: &str) -> String {
    out.lines()
        .find_map(|l| l.strip_prefix(&format!("{key}: ")))
        .unwrap_or_else(|| panic!("no `{key}` in {out}"))
        .to_string()
}

fn json(out: &str) -> serde_json::Value {
    serde_json::from_str(out).unwrap_or_else(|e| panic!("{e}: {out}"))
}

#[test]
fn dist_binomial_moments() {
    let (code, out, _) = call("dist binomial --n 2 --p 0.5");
    assert_eq!(code, EXIT_OK);
    assert_eq!(field(&out, "mean"), "1");
    assert_eq!(field(&out, "variance"), "0.5");
}

#[test]
fn dist_hypergeom_tail() {
    // Both marked items drawn: C(2,2)·C(2,0)/C(4,2).
    let (code, out, _) = call("--format json dist hypergeom --N 4 --n 2 --m 2 --tail-ge 2");
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    let lo = v["tails"][0]["lo"].as_f64().unwrap();
    assert!((lo - 1.0 / 6.0).abs() < 1e-15, "{lo}");
}

#[test]
fn dist_geometric_sum_tail() {
    // Three fair geometric waits exceed nine trials iff nine trials hold at
    // most two successes: (1 + 9 + 36)/2⁹.
    let want = 46.0 / 512.0;
    let (code, out, _) = call("--format json dist geomsum --p 0.5,0.5,0.5 --tail-ge 10");
    assert_eq!(code, EXIT_OK);
    let v = json(&out);
    let (lo, hi) = (v["tails"][0]["lo"].as_f64().unwrap(), v["tails"][0]["hi"].as_f64().unwrap());
    assert!(lo <= want + 1e-15 && want <= hi + 1e-15, "[{lo}, {hi}]");
    assert!(hi - lo < 1e-9);
    let (_, text, _) = call("dist geomsum --p 0.5,0.5,0.5 --tail-ge 10");
    assert!(text.contains("Pr[X >= 10] = 0.08984"), "{text}");
}

#[test]
fn dist_rejects_bad_parameters() {
    assert_eq!(call("dist binomial --n 2 --p 1.5").0, EXIT_USAGE);
    assert_eq!(call("dist hypergeom --N 4 --n 5 --m 2").0, EXIT_USAGE);
}

#[test]
fn bound_examples() {
    let (code, out, _) = call("bound chernoff.mult.upper.lin2 --mu 10 --delta 1");
    assert_eq!(code, EXIT_OK);
    let v: f64 = field(&out, "value").parse().unwrap();
    assert!((v - (-10.0f64 / 3.0).exp()).abs() < 1e-12);

    let (code, out, _) = call("bound coupon.upper --n 10 --eps 0");
    assert_eq!(code, EXIT_OK);
    assert_eq!(field(&out, "value"), "1");

    let (code, out, _) = call("bound superexp.solve --t 4.24044349");
    assert_eq!(code, EXIT_OK);
    let delta: f64 = field(&out, "value").parse().unwrap();
    assert!(delta.is_finite() && delta > 0.0);
    let guarantee: f64 = field(&out, "guarantee").parse().unwrap();
    let target: f64 = field(&out, "target").parse().unwrap();
    assert!(guarantee <= target, "{out}");
}

#[test]
fn bound_exit_codes() {
    let (code, _, err) = call("bound chernoff.mult.upper.lin9 --mu 1 --delta 1");
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("closest"), "{err}");
    assert_eq!(call("bound coupon.upper --n 10 --eps -1").0, EXIT_INVALID_BOUND);
    assert_eq!(call("bound markov --mu 1 --t 2 --nonsense 1").0, EXIT_USAGE);
}

#[test]
fn bound_json_output() {
    let (code, out, _) = call("--format json bound markov --mu 1 --t 4");
    assert_eq!(code, EXIT_OK);
    assert_eq!(json(&out)["value"].as_f64(), Some(0.25));
}

#[test]
fn config_file_values_yield_to_flags() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(&cfg, r#"{"mu": 10, "delta": 1}"#).unwrap();
    let c = cfg.display();
    let (_, a, _) = call(&format!("bound chernoff.mult.upper.lin2 --config {c}"));
    let (_, b, _) = call("bound chernoff.mult.upper.lin2 --mu 10 --delta 1");
    assert_eq!(field(&a, "value"), field(&b, "value"));
    let (_, o, _) = call(&format!("bound chernoff.mult.upper.lin2 --config {c} --delta 2"));
    let (_, p, _) = call("bound chernoff.mult.upper.lin2 --mu 10 --delta 2");
    assert_eq!(field(&o, "value"), field(&p, "value"));
}

fn csv_runtimes(out: &str) -> Vec<u64> {
    out.lines()
        .skip_while(|l| !l.starts_with("run_id,"))
        .skip(1)
        .map(|l| l.split(',').nth(1).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn simulate_single_coupon() {
    let (code, out, _) = call("simulate coupon --n 1 --runs 10 --seed 7");
    assert_eq!(code, EXIT_OK);
    let rt = csv_runtimes(&out);
    assert_eq!(rt.len(), 10);
    assert!(rt.iter().all(|&t| t == 1), "{rt:?}");
}

#[test]
fn simulate_is_deterministic() {
    let (_, a, _) = call("--jobs 1 simulate oea --objective onemax --n 12 --runs 200 --seed 3");
    let (_, b, _) = call("--jobs 4 simulate oea --objective onemax --n 12 --runs 200 --seed 3");
    assert_eq!(csv_runtimes(&a), csv_runtimes(&b));
    assert_eq!(a.replace("--jobs 1 ", ""), b.replace("--jobs 4 ", ""));
    let (_, c, _) = call("simulate oea --objective onemax --n 12 --runs 200 --seed 4");
    assert_ne!(csv_runtimes(&a), csv_runtimes(&c));
}

#[test]
fn simulate_oea_onemax_mean_below_fitness_level_bound() {
    let (code, _, out) = call("simulate oea --objective onemax --n 30 --runs 10000 --seed 1");
    assert_eq!(code, EXIT_OK);
    let mean: f64 = field(&out, "mean").parse().unwrap();
    let se: f64 = field(&out, "std_error").parse().unwrap();
    let h30: f64 = (1..=30).map(|i| 1.0 / i as f64).sum();
    assert!(mean + 3.0 * se <= std::f64::consts::E * 30.0 * h30, "{mean} ± {se}");
}

#[test]
fn simulate_refusals() {
    assert_eq!(call("simulate coupon --n 4 --runs 2").0, EXIT_USAGE);
    let (code, _, err) = call("simulate blind --n 30 --runs 2 --seed 1");
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("--horizon"), "{err}");
}

#[test]
fn verify_empty_and_report_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("empty.json");
    let (code, _, _) = call(&format!("verify empty --out {}", out.display()));
    assert_eq!(code, EXIT_OK);
    let r = from_json(&std::fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(r.summary.records, 0);
    let (code, md, _) = call(&format!("--format markdown report {}", out.display()));
    assert_eq!(code, EXIT_OK);
    assert!(md.contains("# Verification report: empty"), "{md}");
    let (code, csv, _) = call(&format!("--format csv report {}", out.display()));
    assert_eq!(code, EXIT_OK);
    assert_eq!(csv, "cell_id,bound_id,oracle,oracle_lo,oracle_hi,bound,verdict\n");
}

#[test]
fn verify_suite_files() {
    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{\n  \"name\": \"x\",\n  \"grids\": [ oops ]\n}\n").unwrap();
    let (code, _, err) = call(&format!("verify --suite {}", bad.display()));
    assert_eq!(code, EXIT_USAGE);
    assert!(err.contains("line 3"), "{err}");

    // A chain listed in the wrong order must be reported as inversions.
    let inverted = dir.path().join("inverted.json");
    std::fs::write(
        &inverted,
        r#"{"name": "inverted", "orderings": [{"name": "wrong", "family": ["chernoff.mult.upper.lin2", "chernoff.mult.upper.strongest"],
            "cells": [{"mu": 5, "n": 50, "delta": 0.5}]}]}"#,
    )
    .unwrap();
    let (code, out, _) = call(&format!("verify --suite {}", inverted.display()));
    assert_eq!(code, EXIT_VERIFY_FAIL, "{out}");
}

#[test]
fn report_survives_json() {
    let r = run_suite(&suites::ordering_suite(), vec!["conckit".into(), "verify".into(), "ordering".into()]).unwrap();
    let text = to_json(&r).unwrap();
    assert_eq!(from_json(&text).unwrap(), r);
    assert_eq!(to_json(&from_json(&text).unwrap()).unwrap(), text);
}

#[test]
fn verify_reports_are_byte_identical_across_jobs() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.json"), dir.path().join("b.json"));
    for (jobs, p) in [(1, &a), (4, &b)] {
        let (code, _, err) = call(&format!("--seed 9 --jobs {jobs} verify ordering --out {}", p.display()));
        assert_eq!(code, EXIT_OK, "{err}");
    }
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

fn binary(args: &[&str], suite_dir: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_conckit"))
        .args(args)
        .env(suites::SUITE_DIR_ENV, suite_dir)
        .output()
        .unwrap();
    (out.status.code().unwrap(), String::from_utf8(out.stdout).unwrap() + &String::from_utf8(out.stderr).unwrap())
}

#[test]
fn suite_directory_override() {
    let dir = tempfile::tempdir().unwrap();
    std::fs::write(dir.path().join("default.json"), r#"{"name": "overridden"}"#).unwrap();
    let (code, out) = binary(&["verify", "default"], dir.path());
    assert_eq!(code, EXIT_OK, "{out}");
    assert!(out.contains("overridden: 0 cells"), "{out}");
}
