//! Acceptance gate: one PASS/FAIL line per criterion, then a single assertion.
//!
//! Lines go straight to stderr so they show up without `--nocapture`.

use std::io::Write;
use std::time::Instant;

use hardyz_core::harness::suites::*;
use hardyz_core::harness::{Baseline, Check, SweepEntry};
use hardyz_core::PrecisionContext;

const TARGET: i32 = PrecisionContext::DEFAULT_TARGET;

struct Outcome {
    id: u32,
    title: &'static str,
    checks: Vec<Check>,
    note: String,
    seconds: f64,
}

impl Outcome {
    fn passed(&self) -> bool {
        !self.checks.is_empty() && self.checks.iter().all(Check::passed)
    }

    fn print(&self) {
        let ok = self.checks.iter().filter(|c| c.passed()).count();
        let mut err = std::io::stderr().lock();
        let _ = writeln!(
            err,
            "criterion {} {}: {} ({}/{} checks, {:.1}s){}",
            self.id,
            if self.passed() { "PASS" } else { "FAIL" },
            self.title,
            ok,
            self.checks.len(),
            self.seconds,
            if self.note.is_empty() {
                String::new()
            } else {
                format!("; {}", self.note)
            }
        );
        for c in self.checks.iter().filter(|c| !c.passed()).take(10) {
            let _ = writeln!(
                err,
                "    failed: {}  measured {}  bound {}",
                c.name, c.measured, c.bound
            );
        }
    }
}

fn run(id: u32, title: &'static str, f: impl FnOnce() -> (Vec<Check>, String)) -> Outcome {
    let start = Instant::now();
    let (checks, note) = f();
    Outcome {
        id,
        title,
        checks,
        note,
        seconds: start.elapsed().as_secs_f64(),
    }
}

fn or_fail(name: &str, r: hardyz_core::Result<Vec<Check>>) -> Vec<Check> {
    r.unwrap_or_else(|e| vec![Check::failed(name, &e)])
}

fn max_normalized(entries: &[SweepEntry]) -> String {
    let worst = entries
        .iter()
        .filter_map(SweepEntry::record)
        .map(|r| (r.normalized.to_f64(), r.k))
        .fold((0.0, 0), |a, b| if b.0 > a.0 { b } else { a });
    format!("max normalized residual {:.4} at k={}", worst.0, worst.1)
}

#[test]
fn acceptance() {
    let baseline = Baseline::shipped();
    let mut outcomes = Vec::new();

    let start = Instant::now();
    let entries = experiment_records(TARGET).expect("experiment runs");
    let records_seconds = start.elapsed().as_secs_f64();
    let mut first = run(1, "|R_k(1e4)| <= 0.05 theta'(1e4)^k for k = 1..117", || {
        (experiment_claim_checks(&entries), max_normalized(&entries))
    });
    first.seconds += records_seconds;
    outcomes.push(first);

    outcomes.push(run(
        2,
        "exact Stirling row sums and q_p recursion against enumeration",
        || {
            let mut v = or_fail("stirling", stirling_checks());
            v.extend(or_fail("q_p recursion", qp_recursion_checks(TARGET)));
            (v, String::new())
        },
    ));

    let mut fd_leaks = Vec::new();
    outcomes.push(run(
        3,
        "Z^(k) against finite differences of Z, k = 1..4, t in {500, 1000}",
        || match finite_difference_checks(TARGET) {
            Ok(o) => {
                fd_leaks = o.leaks;
                (o.checks, String::new())
            }
            Err(e) => (vec![Check::failed("finite differences", &e)], String::new()),
        },
    ));

    outcomes.push(run(
        4,
        "imaginary leak within 2^-(target-16)(|value| + theta'^k)",
        || {
            let mut v = leak_checks(&entries, TARGET);
            v.extend(fd_leaks);
            (v, String::new())
        },
    ));

    outcomes.push(run(
        5,
        "closed-form theta derivative bound, t in {1e2, 1e3, 1e4}, nu = 2..40",
        || (or_fail("theta bound", theta_derivative_checks(TARGET)), String::new()),
    ));

    outcomes.push(run(6, "Euler-Maclaurin (M, K) vs (2M, K+10) and eta_0 vs zeta", || {
        (
            or_fail("eta consistency", eta_consistency_checks(TARGET)),
            String::new(),
        )
    }));

    outcomes.push(run(7, "ratio regressions against the calibrated baseline", || {
        let mut v = or_fail("conjugate short sums", conjugate_sum_checks(TARGET, &baseline));
        v.extend(or_fail(
            "truncated afe growth",
            truncated_afe_growth_checks(TARGET, &baseline),
        ));
        v.extend(theorem_envelope_checks(&entries, &baseline));
        v.extend(or_fail(
            "normalized residual trend",
            residual_trend_checks(TARGET, &baseline),
        ));
        (v, String::new())
    }));

    outcomes.push(run(8, "incomplete gamma series against quadrature", || {
        (or_fail("incomplete gamma", gamma_series_checks()), String::new())
    }));

    for o in &outcomes {
        o.print();
    }
    let failed: Vec<u32> = outcomes.iter().filter(|o| !o.passed()).map(|o| o.id).collect();
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
