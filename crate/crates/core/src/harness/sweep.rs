//! Residual sweeps over a grid of `(t, k)`.

use std::collections::BTreeMap;
use std::fs;
use std::path::PathBuf;

use rayon::prelude::*;
use rug::Float;

use super::records::{render, OutputFormat, RecordCache, SweepEntry};
use crate::error::{Error, Result};
use crate::hardy::{default_c, ResidualEngine};
use crate::numerics::{context_for_target, PrecisionContext};
use crate::theta::theta_jet;

#[derive(Debug, Clone)]
pub struct SweepConfig {
    pub t_values: Vec<Float>,
    pub k_min: u32,
    pub k_max: u32,
    pub c: Float,
    pub target_abs_error_exponent: i32,
    pub output_path: Option<PathBuf>,
    pub format: OutputFormat,
    /// Worker threads; `0` uses rayon's default.
    pub jobs: usize,
    pub cache: Option<RecordCache>,
}

impl SweepConfig {
    pub fn new(t_values: Vec<Float>, k_min: u32, k_max: u32) -> Self {
        SweepConfig {
            t_values,
            k_min,
            k_max,
            c: default_c(128),
            target_abs_error_exponent: PrecisionContext::DEFAULT_TARGET,
            output_path: None,
            format: OutputFormat::Csv,
            jobs: 0,
            cache: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.t_values.is_empty() {
            return Err(Error::invalid("sweep needs at least one t"));
        }
        if let Some(t) = self.t_values.iter().find(|t| !(t.is_finite() && **t >= 10)) {
            return Err(Error::invalid(format!("every t must be >= 10, got {t}")));
        }
        if self.k_min > self.k_max {
            return Err(Error::invalid("k_min must not exceed k_max"));
        }
        if !(self.c.is_finite() && self.c > 1) {
            return Err(Error::invalid("c must be > 1"));
        }
        Ok(())
    }
}

/// Records for every `k` in `ks` at one `t`, sharing one engine. Orders whose
/// reference leaks too much imaginary part are redone once at double precision.
pub fn records_at(t: &Float, ks: &[u32], c: &Float, ctx: &PrecisionContext) -> Vec<SweepEntry> {
    let failed = |k: u32, e: &Error| SweepEntry::Failed {
        t: t.clone(),
        k,
        error: e.to_string(),
    };
    let allowed = match max_order(t, ctx) {
        Ok(a) => a,
        Err(e) => return ks.iter().map(|&k| failed(k, &e)).collect(),
    };
    let k_hi = ks.iter().copied().filter(|&k| k <= allowed).max();
    let mut out: BTreeMap<u32, SweepEntry> = BTreeMap::new();
    for &k in ks.iter().filter(|&&k| k > allowed) {
        let e = Error::invalid(format!("k = {k} exceeds 10·θ'(t)^2 at this t"));
        out.insert(k, failed(k, &e));
    }
    let Some(k_hi) = k_hi else {
        return ks.iter().map(|k| out.remove(k).expect("every k handled")).collect();
    };
    let todo: Vec<u32> = ks.iter().copied().filter(|&k| k <= allowed).collect();
    let mut retry = Vec::new();
    match ResidualEngine::new(t, k_hi, c, ctx) {
        Ok(engine) => {
            let results: Vec<_> = todo.par_iter().map(|&k| (k, engine.record(k))).collect();
            for (k, r) in results {
                match r {
                    Ok(rec) => {
                        out.insert(k, SweepEntry::Ok(rec));
                    }
                    Err(Error::ImaginaryLeak { .. }) => retry.push(k),
                    Err(e) => {
                        out.insert(k, failed(k, &e));
                    }
                }
            }
        }
        Err(e) => {
            for &k in &todo {
                out.insert(k, failed(k, &e));
            }
        }
    }
    if let Some(&hi) = retry.iter().max() {
        let doubled = ctx.doubled();
        match ResidualEngine::new(t, hi, c, &doubled) {
            Ok(engine) => {
                let results: Vec<_> = retry.par_iter().map(|&k| (k, engine.record(k))).collect();
                for (k, r) in results {
                    out.insert(k, r.map(SweepEntry::Ok).unwrap_or_else(|e| failed(k, &e)));
                }
            }
            Err(e) => {
                for &k in &retry {
                    out.insert(k, failed(k, &e));
                }
            }
        }
    }
    ks.iter().map(|k| out.remove(k).expect("every k handled")).collect()
}

/// `⌊10·θ'(t)²⌋`
fn max_order(t: &Float, ctx: &PrecisionContext) -> Result<u32> {
    let jet = theta_jet(t, 1, ctx)?;
    let bound = Float::with_val(64, jet.theta_prime().square_ref()) * 10u32;
    Ok(bound.floor().to_f64().min(f64::from(u32::MAX)) as u32)
}

/// One entry per `(t, k)`, `t` in the given order and `k` ascending. Cached
/// records are reused; new ones are written to the cache one at a time, and
/// the output file, if any, is written once at the end.
pub fn run_sweep(config: &SweepConfig) -> Result<Vec<SweepEntry>> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.jobs)
        .build()
        .map_err(|e| Error::invalid(format!("thread pool: {e}")))?;
    let ks: Vec<u32> = (config.k_min..=config.k_max).collect();
    let mut entries = Vec::with_capacity(ks.len() * config.t_values.len());
    for t in &config.t_values {
        let ctx = context_for_target(t, config.k_max, config.target_abs_error_exponent)?;
        let t = Float::with_val(ctx.working_bits(), t);
        let keys: Vec<String> = ks
            .iter()
            .map(|&k| RecordCache::key(&t, k, ctx.working_bits(), &config.c))
            .collect();
        let mut found: Vec<Option<SweepEntry>> = keys
            .iter()
            .map(|key| config.cache.as_ref().and_then(|c| c.get(key)).map(SweepEntry::Ok))
            .collect();
        let missing: Vec<u32> = ks
            .iter()
            .zip(&found)
            .filter(|(_, f)| f.is_none())
            .map(|(&k, _)| k)
            .collect();
        if !missing.is_empty() {
            let fresh = pool.install(|| records_at(&t, &missing, &config.c, &ctx));
            for entry in fresh {
                let i = (entry.k() - config.k_min) as usize;
                if let (Some(cache), Some(rec)) = (&config.cache, entry.record()) {
                    cache.put(&keys[i], rec)?;
                }
                found[i] = Some(entry);
            }
        }
        entries.extend(found.into_iter().map(|e| e.expect("every k computed")));
    }
    if let Some(path) = &config.output_path {
        fs::write(path, render(&entries, config.format)?)?;
    }
    Ok(entries)
}
