use std::fs;

use hardyz_core::harness::records::{parse, render, CODE_VERSION};
use hardyz_core::harness::*;
use hardyz_core::Error;
use rug::Float;

fn config(ts: &[f64], k_min: u32, k_max: u32) -> SweepConfig {
    SweepConfig::new(ts.iter().map(|&t| Float::with_val(128, t)).collect(), k_min, k_max)
}

fn same_bits(a: &Float, b: &Float) -> bool {
    a.prec() == b.prec() && (a == b || (a.is_nan() && b.is_nan()))
}

#[test]
fn smallest_sweep() {
    let entries = run_sweep(&config(&[50.0], 0, 0)).unwrap();
    assert_eq!(entries.len(), 1);
    assert_eq!(entries[0].record().unwrap().n_terms, 2);
}

#[test]
fn sweep_output_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for format in [OutputFormat::Csv, OutputFormat::Jsonl] {
        let mut texts = Vec::new();
        for run in 0..2 {
            let mut cfg = config(&[1000.0, 2000.0], 0, 6);
            cfg.format = format;
            cfg.jobs = 1 + run;
            let path = dir.path().join(format!("out-{run}"));
            cfg.output_path = Some(path.clone());
            run_sweep(&cfg).unwrap();
            texts.push(fs::read(&path).unwrap());
        }
        assert_eq!(texts[0], texts[1]);
    }
}

#[test]
fn exports_round_trip() {
    let entries = run_sweep(&config(&[1500.0], 0, 8)).unwrap();
    for format in [OutputFormat::Csv, OutputFormat::Jsonl] {
        let text = render(&entries, format).unwrap();
        let back = parse(&text, format).unwrap();
        assert_eq!(back.len(), entries.len());
        for (a, b) in entries.iter().zip(&back) {
            let (a, b) = (a.record().unwrap(), b.record().unwrap());
            assert_eq!(
                (a.k, a.working_bits, a.n_terms, a.extrapolated),
                (b.k, b.working_bits, b.n_terms, b.extrapolated)
            );
            for (x, y) in [
                (&a.t, &b.t),
                (&a.main_sum, &b.main_sum),
                (&a.reference, &b.reference),
                (&a.theta_prime, &b.theta_prime),
                (&a.theta_prime_pow_k, &b.theta_prime_pow_k),
                (&a.normalized, &b.normalized),
                (&a.envelope, &b.envelope),
                (&a.envelope_ratio, &b.envelope_ratio),
                (&a.imag_leak, &b.imag_leak),
            ] {
                assert!(same_bits(x, y), "k = {}: {x} vs {y}", a.k);
            }
            // the residual is kept exactly, so compare it at working precision
            let wp = a.working_bits;
            assert_eq!(Float::with_val(wp, &a.residual), Float::with_val(wp, &b.residual));
        }
    }
}

#[test]
fn csv_layout() {
    let entries = run_sweep(&config(&[1000.0], 2, 3)).unwrap();
    let text = render(&entries, OutputFormat::Csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "t,k,main_sum,reference,residual,theta_prime,normalized,envelope,envelope_ratio,imag_leak,working_bits,error"
    );
    assert_eq!(lines.count(), 2);
}

#[test]
fn orders_beyond_the_limit_are_marked_not_dropped() {
    // 10·θ'(100)² ≈ 19
    let entries = run_sweep(&config(&[100.0], 17, 21)).unwrap();
    assert_eq!(entries.len(), 5);
    assert!(entries[0].record().is_some());
    assert!(entries[4].error().unwrap().contains("exceeds"));
    let text = render(&entries, OutputFormat::Csv).unwrap();
    let back = parse(&text, OutputFormat::Csv).unwrap();
    assert_eq!(back[4].error(), entries[4].error());
    assert_eq!(back[4].k(), 21);
}

#[test]
fn cache_replays_bit_for_bit() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = config(&[3000.0], 0, 5);
    cfg.cache = Some(RecordCache::new(dir.path()));
    let fresh = run_sweep(&cfg).unwrap();
    assert_eq!(fs::read_dir(dir.path()).unwrap().count(), 6);
    let replayed = run_sweep(&cfg).unwrap();
    for (a, b) in fresh.iter().zip(&replayed) {
        let (a, b) = (a.record().unwrap(), b.record().unwrap());
        assert!(same_bits(&a.residual, &b.residual));
        assert!(same_bits(&a.reference, &b.reference));
        assert_eq!(a, b);
    }
}

#[test]
fn stale_cache_entries_are_ignored() {
    let dir = tempfile::tempdir().unwrap();
    let cache = RecordCache::new(dir.path());
    let mut cfg = config(&[3000.0], 1, 1);
    cfg.cache = Some(cache.clone());
    let fresh = run_sweep(&cfg).unwrap();
    let file = fs::read_dir(dir.path()).unwrap().next().unwrap().unwrap().path();
    // tamper with the stored value and the version tag
    let text = fs::read_to_string(&file).unwrap();
    let rec = fresh[0].record().unwrap();
    let main = hardyz_core::numerics::format_real(&rec.main_sum);
    let tampered = text.replace(&main, "1.0e0").replace(CODE_VERSION, "old-version");
    fs::write(&file, tampered).unwrap();
    let again = run_sweep(&cfg).unwrap();
    assert_eq!(again[0], fresh[0]);
}

#[test]
fn plot_data_matches_csv() {
    let dir = tempfile::tempdir().unwrap();
    let entries = run_sweep(&config(&[2500.0], 1, 9)).unwrap();
    let records: Vec<_> = entries.iter().filter_map(|e| e.record().cloned()).collect();
    let (norm, ratio) = export_plot_data(&records, &dir.path().join("plot")).unwrap();
    let csv = render(&entries, OutputFormat::Csv).unwrap();
    let csv_normalized: Vec<f64> = csv
        .lines()
        .skip(1)
        .map(|l| l.split(',').nth(6).unwrap().parse::<f64>().unwrap().log10())
        .collect();
    for path in [&norm, &ratio] {
        let text = fs::read_to_string(path).unwrap();
        let rows: Vec<(u32, f64)> = text
            .lines()
            .filter(|l| !l.starts_with('#') && !l.is_empty())
            .map(|l| {
                let (k, v) = l.split_once(' ').unwrap();
                (k.parse().unwrap(), v.parse().unwrap())
            })
            .collect();
        assert_eq!(rows.len(), 9);
        assert!(rows.windows(2).all(|w| w[0].0 < w[1].0));
        if path == &norm {
            for ((_, v), want) in rows.iter().zip(&csv_normalized) {
                assert!((v - want).abs() < 1e-12);
            }
        }
    }
    assert!(export_plot_data(&[], &dir.path().join("empty")).is_err());
}

#[test]
fn invalid_configs_are_rejected() {
    assert!(run_sweep(&config(&[], 0, 1)).is_err());
    assert!(run_sweep(&config(&[5.0], 0, 1)).is_err());
    assert!(run_sweep(&config(&[100.0], 3, 1)).is_err());
    let mut cfg = config(&[100.0], 0, 1);
    cfg.c = Float::with_val(64, 1);
    assert!(run_sweep(&cfg).is_err());
}

#[test]
fn suites_by_name() {
    assert!(matches!(verify_suite("nope", 64), Err(Error::UnknownSuite(_))));
    let report = verify_suite("stirling", 64).unwrap();
    assert!(!report.has_failure());
    assert!(report.checks.iter().all(|c| c.status == CheckStatus::Pass));
    for s in Suite::ALL {
        assert_eq!(s.name().parse::<Suite>().unwrap(), s);
    }
}

#[test]
fn uncalibrated_regressions_are_recorded() {
    let report = verify_suite_with(Suite::ConjugateIdentity, 64, &Baseline::empty()).unwrap();
    assert_eq!(report.checks.len(), 3);
    assert!(report.checks.iter().all(|c| c.status == CheckStatus::Recorded));
    let calibrated = verify_suite_with(Suite::ConjugateIdentity, 64, &Baseline::shipped()).unwrap();
    assert!(calibrated.checks.iter().all(|c| c.status == CheckStatus::Pass));
    let strict = Baseline::from_toml_str("[thresholds]\nconjugate_sum_discrepancy = 1e-9\n").unwrap();
    assert!(verify_suite_with(Suite::ConjugateIdentity, 64, &strict)
        .unwrap()
        .has_failure());
}
