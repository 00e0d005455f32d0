//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use torgreen::bench::{bench_once, BenchMode};
use torgreen::closed_forms::TorusSpec;
use torgreen::verify::{relation_checks, suite_checks, Check, Suite};

type Criterion = (&'static str, Box<dyn FnOnce() -> Outcome>);

struct Outcome {
    passed: bool,
    notes: Vec<String>,
}

fn from_checks(checks: Vec<Check>, elapsed: Duration, limit: Option<Duration>) -> Outcome {
    let mut notes: Vec<String> = checks
        .iter()
        .filter(|c| !c.passed)
        .map(|c| c.to_string())
        .collect();
    let worst = checks.iter().filter_map(|c| c.residual).fold(0.0, f64::max);
    let mut passed = notes.is_empty() && !checks.is_empty();
    if let Some(limit) = limit {
        if elapsed > limit {
            passed = false;
            notes.push(format!(
                "runtime {:.2}s over {:.0}s",
                elapsed.as_secs_f64(),
                limit.as_secs_f64()
            ));
        }
    }
    notes.insert(
        0,
        format!(
            "{} checks, max residual {worst:.2e}, {:.2}s",
            checks.len(),
            elapsed.as_secs_f64()
        ),
    );
    Outcome { passed, notes }
}

fn timed(limit: Option<u64>, f: impl FnOnce() -> Vec<Check>) -> Outcome {
    let start = Instant::now();
    let checks = f();
    from_checks(checks, start.elapsed(), limit.map(Duration::from_secs))
}

fn best_per_entry(dims: &[usize], mode: BenchMode, repeat: usize) -> (f64, f64) {
    let spec = TorusSpec::new(dims.to_vec()).unwrap();
    let mut best = f64::INFINITY;
    let mut total = 0.0;
    for _ in 0..repeat {
        let (rec, _) = bench_once(&spec, mode, 1).unwrap();
        best = best.min(rec.nanos_per_entry);
        total = rec.nanos_total as f64 * 1e-9;
    }
    (best, total)
}

fn complexity() -> Outcome {
    let (per_100, secs_100) = best_per_entry(&[100, 100], BenchMode::Row, 5);
    let (per_200, _) = best_per_entry(&[200, 200], BenchMode::Row, 5);
    let (row_20, _) = best_per_entry(&[20, 20, 20], BenchMode::Row, 5);
    let (oracle_20, _) = best_per_entry(&[20, 20, 20], BenchMode::Oracle, 3);
    let ratio = per_200 / per_100;
    let speedup = oracle_20 / row_20;
    let mut notes = vec![format!(
        "100x100 row {secs_100:.3}s; per-entry 200/100 ratio {ratio:.2}; 20^3 speedup over expansion {speedup:.1}x"
    )];
    let mut passed = true;
    if secs_100 >= 30.0 {
        passed = false;
        notes.push("100x100 row over 30s".into());
    }
    if speedup < 10.0 {
        passed = false;
        notes.push(format!("speedup {speedup:.1}x below 10x"));
    }
    if ratio > 3.0 {
        notes.push(format!(
            "warning: scaling ratio {ratio:.2} above 3.0 (soft bound)"
        ));
    }
    Outcome { passed, notes }
}

fn main() -> ExitCode {
    let criteria: Vec<Criterion> = vec![
        (
            "cycle closed form",
            Box::new(|| timed(Some(5), || suite_checks(Suite::Cycle, 50, 1e-9))),
        ),
        (
            "generalized cycle G_alpha",
            Box::new(|| timed(Some(5), || suite_checks(Suite::Galpha, 20, 1e-9))),
        ),
        (
            "2-torus",
            Box::new(|| timed(Some(30), || suite_checks(Suite::Torus, 10, 1e-8))),
        ),
        (
            "t-torus recursion and 3-torus form",
            Box::new(|| timed(Some(60), || suite_checks(Suite::Ttorus, 50, 1e-8))),
        ),
        (
            "product combinators",
            Box::new(|| timed(None, || suite_checks(Suite::Product, 50, 1e-9))),
        ),
        (
            "cycle and torus identities",
            Box::new(|| timed(None, || suite_checks(Suite::Identities, 12, 1e-10))),
        ),
        (
            "defining relations",
            Box::new(|| timed(None, relation_checks)),
        ),
        (
            "hitting times",
            Box::new(|| timed(Some(120), || suite_checks(Suite::Walk, 50, 1e-7))),
        ),
        ("complexity smoke", Box::new(complexity)),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.into_iter().enumerate() {
        let out = run();
        println!(
            "{} criterion {}: {name} ({})",
            if out.passed { "PASS" } else { "FAIL" },
            i + 1,
            out.notes[0]
        );
        for note in &out.notes[1..] {
            println!("    {note}");
        }
        if !out.passed {
            failed += 1;
        }
    }
    println!("acceptance: {} of 9 criteria passed", 9 - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
