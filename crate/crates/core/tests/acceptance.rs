//! One test per acceptance criterion. Each prints a single
//! `criterion N ... PASS|FAIL` line before asserting.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use powerval::suites::{self, SandwichRuns, SuiteConfig, SuiteResult};

fn config() -> SuiteConfig {
    SuiteConfig::default()
}

fn check(result: &SuiteResult, elapsed: Duration, budget: Duration) {
    let verdict = if result.pass() { "PASS" } else { "FAIL" };
    println!(
        "criterion {} {:<15} {verdict} cases={} passed={} time={:.2}s budget={}s",
        result.criterion,
        result.name,
        result.cases,
        result.passed,
        elapsed.as_secs_f64(),
        budget.as_secs()
    );
    for (k, v) in &result.stats {
        println!("  {k}={v}");
    }
    for f in &result.failures {
        println!("  failure: {f}");
    }
    assert!(result.pass(), "criterion {} failed", result.criterion);
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, Duration) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed())
}

fn sandwich_runs() -> &'static (SandwichRuns, Duration) {
    static RUNS: OnceLock<(SandwichRuns, Duration)> = OnceLock::new();
    RUNS.get_or_init(|| timed(|| suites::sandwich(&config())))
}

#[test]
fn criterion_1_decomposition() {
    let (r, t) = timed(|| suites::decomposition(&config()));
    check(&r, t, Duration::from_secs(30));
}

#[test]
fn criterion_2_minimax() {
    let (r, t) = timed(|| suites::minimax(&config()));
    check(&r, t, Duration::from_secs(10));
}

#[test]
fn criterion_3_sandwich() {
    let (runs, t) = sandwich_runs();
    check(&runs.theorem, *t, Duration::from_secs(300));
}

#[test]
fn criterion_4_lemmas() {
    let (runs, t) = sandwich_runs();
    check(&runs.lemmas, *t, Duration::from_secs(300));
}

#[test]
fn criterion_5_lifting() {
    let (r, t) = timed(|| suites::lifting(&config()));
    check(&r, t, Duration::from_secs(10));
}

#[test]
fn criterion_6_counterexample() {
    let (r, t) = timed(|| suites::counterexample(&config()));
    check(&r, t, Duration::from_secs(5));
}

#[test]
fn criterion_7_oracles() {
    let (r, t) = timed(|| suites::oracles(&config()));
    check(&r, t, Duration::from_secs(30));
}

#[test]
fn criterion_8_structural() {
    let (r, t) = timed(|| suites::structural(&config()));
    check(&r, t, Duration::from_secs(60));
}
