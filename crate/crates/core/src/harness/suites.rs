//! Verification suites. Each suite is a list of checks with a measured value, a
//! bound and a status: `pass`/`fail` for certified inequalities and calibrated
//! regressions, `recorded` for regressions without a calibrated threshold.

use std::fmt;
use std::time::Instant;

use rug::ops::Pow;
use rug::{Float, Rational};
use serde::Serialize;

use super::baseline::Baseline;
use super::oracles::{richardson_derivative, tanh_sinh, zeta_euler_maclaurin};
use super::records::SweepEntry;
use super::sweep::records_at;
use crate::combinatorics::{
    lower_incomplete_gamma, pochhammer_rational, qp_coefficients, qp_coefficients_enumerated, qp_weighted_sum,
    StirlingCache,
};
use crate::error::{Error, Result};
use crate::eta::{
    conjugate_short_sum_check, eta_afe, eta_reference, eta_reference_with, partial_sum_phi, phi, phi_antiderivative,
    EtaParams, EtaReferenceConfig,
};
use crate::hardy::{default_c, residual, z_deriv_reference, z_reference, ResidualEngine};
use crate::numerics::{context_for_target, format_real, BigComplex, PrecisionContext};
use crate::theta::{theta_deriv_bound, theta_jet};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    Recorded,
}

impl fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Recorded => "recorded",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub status: CheckStatus,
    pub measured: String,
    pub bound: String,
}

fn short(x: &Float) -> String {
    format_real(&Float::with_val(64, x))
}

impl Check {
    /// Pass/fail on `measured <= bound`.
    pub fn at_most(name: impl Into<String>, measured: &Float, bound: &Float) -> Check {
        Check {
            name: name.into(),
            status: if measured <= bound {
                CheckStatus::Pass
            } else {
                CheckStatus::Fail
            },
            measured: short(measured),
            bound: short(bound),
        }
    }

    /// Pass/fail on an exact condition.
    pub fn exact(name: impl Into<String>, ok: bool, measured: impl Into<String>, bound: impl Into<String>) -> Check {
        Check {
            name: name.into(),
            status: if ok { CheckStatus::Pass } else { CheckStatus::Fail },
            measured: measured.into(),
            bound: bound.into(),
        }
    }

    /// `measured <= threshold` when the baseline has `key`, `recorded` otherwise.
    pub fn regression(name: impl Into<String>, measured: &Float, key: &str, baseline: &Baseline) -> Check {
        let name = name.into();
        match baseline.threshold(key) {
            Some(th) => {
                let bound = Float::with_val(64, th);
                Check::at_most(name, measured, &bound)
            }
            None => Check {
                name,
                status: CheckStatus::Recorded,
                measured: short(measured),
                bound: format!("uncalibrated ({key})"),
            },
        }
    }

    pub fn failed(name: impl Into<String>, error: &Error) -> Check {
        Check {
            name: name.into(),
            status: CheckStatus::Fail,
            measured: format!("error: {error}"),
            bound: String::new(),
        }
    }

    pub fn passed(&self) -> bool {
        self.status != CheckStatus::Fail
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    ThetaBounds,
    Stirling,
    Qp,
    GammaSeries,
    EtaConsistency,
    ConjugateIdentity,
    TailSum,
    AfeError,
    Experiment,
}

impl Suite {
    pub const ALL: [Suite; 9] = [
        Suite::ThetaBounds,
        Suite::Stirling,
        Suite::Qp,
        Suite::GammaSeries,
        Suite::EtaConsistency,
        Suite::ConjugateIdentity,
        Suite::TailSum,
        Suite::AfeError,
        Suite::Experiment,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::ThetaBounds => "theta_bounds",
            Suite::Stirling => "stirling",
            Suite::Qp => "qp",
            Suite::GammaSeries => "gamma_series",
            Suite::EtaConsistency => "eta_consistency",
            Suite::ConjugateIdentity => "lemma3_identity",
            Suite::TailSum => "lemma5_tail",
            Suite::AfeError => "afe_error",
            Suite::Experiment => "paper_experiment",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for Suite {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| Error::UnknownSuite(s.to_string()))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub suite_name: String,
    pub checks: Vec<Check>,
    pub wall_time_seconds: f64,
}

impl SuiteReport {
    pub fn has_failure(&self) -> bool {
        self.checks.iter().any(|c| c.status == CheckStatus::Fail)
    }
}

/// Runs a suite by name against the shipped baseline.
pub fn verify_suite(name: &str, target: i32) -> Result<SuiteReport> {
    verify_suite_with(name.parse()?, target, &Baseline::shipped())
}

pub fn verify_suite_with(suite: Suite, target: i32, baseline: &Baseline) -> Result<SuiteReport> {
    let start = Instant::now();
    let checks = match suite {
        Suite::ThetaBounds => {
            let mut v = theta_derivative_checks(target)?;
            v.extend(theta_sum_checks(target)?);
            v
        }
        Suite::Stirling => stirling_checks()?,
        Suite::Qp => {
            let mut v = qp_recursion_checks(target)?;
            v.extend(qp_sum_checks(target, baseline)?);
            v
        }
        Suite::GammaSeries => gamma_series_checks()?,
        Suite::EtaConsistency => eta_consistency_checks(target)?,
        Suite::ConjugateIdentity => conjugate_sum_checks(target, baseline)?,
        Suite::TailSum => tail_sum_checks(target, baseline)?,
        Suite::AfeError => {
            let mut v = truncated_afe_growth_checks(target, baseline)?;
            v.extend(short_afe_checks(target, baseline)?);
            v.extend(weak_rs_checks(target, baseline)?);
            v.extend(residual_trend_checks(target, baseline)?);
            v
        }
        Suite::Experiment => {
            let entries = experiment_records(target)?;
            let mut v = experiment_claim_checks(&entries);
            v.extend(theorem_envelope_checks(&entries, baseline));
            v.extend(leak_checks(&entries, target));
            let fd = finite_difference_checks(target)?;
            v.extend(fd.checks);
            v.extend(fd.leaks);
            v
        }
    };
    Ok(SuiteReport {
        suite_name: suite.name().to_string(),
        checks,
        wall_time_seconds: start.elapsed().as_secs_f64(),
    })
}

fn ctx_for(t: &Float, k: u32, target: i32) -> Result<PrecisionContext> {
    context_for_target(t, k, target)
}

/// Context for long partial sums, where the target matters less than speed.
fn sum_ctx(target: i32) -> Result<PrecisionContext> {
    PrecisionContext::new(target.max(0) as u32 + 64, 64, target)
}

fn big(v: f64) -> Float {
    Float::with_val(128, v)
}

/// `|θ^(ν)(t)| ≤ (ν−2)!/(2t^{ν−1}) + 2ν!/(√ν·t^ν)` for `t ∈ {10², 10³, 10⁴}`, `ν ∈ 2..=40`.
pub fn theta_derivative_checks(target: i32) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &tv in &[1e2, 1e3, 1e4] {
        let t = big(tv);
        let ctx = ctx_for(&t, 40, target)?;
        let jet = theta_jet(&Float::with_val(ctx.working_bits(), &t), 40, &ctx)?;
        for nu in 2..=40u32 {
            let measured = Float::with_val(ctx.working_bits(), jet.get(nu as usize).abs_ref());
            let bound = theta_deriv_bound(&t, nu)?;
            checks.push(Check::at_most(
                format!("theta derivative bound t={tv:e} nu={nu}"),
                &measured,
                &bound,
            ));
        }
    }
    Ok(checks)
}

/// `Σ_{ν≤k} |θ^(ν)(t)|·t^ν/ν! ≤ t·θ'(t) + t/2` with `k = ⌊√t/2⌋`, `t ∈ {10³, 10⁴}`.
pub fn theta_sum_checks(target: i32) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &tv in &[1e3, 1e4] {
        let k = (f64::sqrt(tv) / 2.0).floor() as usize;
        let t = big(tv);
        let ctx = ctx_for(&t, k as u32, target)?;
        let wp = ctx.working_bits();
        let t = Float::with_val(wp, &t);
        let jet = theta_jet(&t, k, &ctx)?;
        let mut sum = Float::new(wp);
        let mut weight = Float::with_val(wp, 1);
        for nu in 1..=k {
            weight *= &t;
            weight /= nu as u32;
            sum += Float::with_val(wp, jet.get(nu).abs_ref()) * &weight;
        }
        let bound = Float::with_val(wp, &t * jet.theta_prime()) + Float::with_val(wp, &t / 2u32);
        checks.push(Check::at_most(
            format!("theta derivative sum bound t={tv:e} k={k}"),
            &sum,
            &bound,
        ));
    }
    Ok(checks)
}

/// `Σ_l |S_k^l|·y^l = (y)_k` exactly for `k ≤ 30`, `y ∈ {1, 2, 7/2}`, plus the sign pattern.
pub fn stirling_checks() -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for y in [Rational::from(1), Rational::from(2), Rational::from((7, 2))] {
        let mut mismatches = 0;
        for k in 0..=30usize {
            let row = StirlingCache::global().row(k)?;
            let mut lhs = Rational::new();
            let mut pow = Rational::from(1);
            for c in row.iter() {
                lhs += Rational::from(c.clone().abs()) * &pow;
                pow *= &y;
            }
            if lhs != pochhammer_rational(&y, k as u32) {
                mismatches += 1;
            }
        }
        checks.push(Check::exact(
            format!("stirling row sums y={y} k<=30"),
            mismatches == 0,
            format!("{mismatches} mismatches"),
            "0",
        ));
    }
    let mut wrong_signs = 0;
    for k in 1..=60usize {
        let row = StirlingCache::global().row(k)?;
        for (l, c) in row.iter().enumerate().skip(1) {
            let want = if (k - l) % 2 == 0 {
                std::cmp::Ordering::Greater
            } else {
                std::cmp::Ordering::Less
            };
            if c.cmp0() != want {
                wrong_signs += 1;
            }
        }
    }
    checks.push(Check::exact(
        "stirling signs k<=60",
        wrong_signs == 0,
        format!("{wrong_signs} wrong"),
        "0",
    ));
    Ok(checks)
}

/// Bell recursion against partition enumeration, entry-wise to `2^{−(target−8)}` relative.
pub fn qp_recursion_checks(target: i32) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &tv in &[1e2, 1e4] {
        let t = big(tv);
        let ctx = ctx_for(&t, 12, target)?;
        let wp = ctx.working_bits();
        let jet = theta_jet(&Float::with_val(wp, &t), 12, &ctx)?;
        for k in 2..=12usize {
            let fast = qp_coefficients(&jet, k, &ctx)?;
            let slow = qp_coefficients_enumerated(&jet, k, &ctx)?;
            let mut worst = Float::new(wp);
            for (a, b) in fast.coefficients.iter().zip(&slow.coefficients) {
                let scale = b.abs();
                let rel = if scale.is_zero() {
                    a.abs()
                } else {
                    a.sub(b).abs() / scale
                };
                worst.max_mut(&rel);
            }
            let bound = Float::with_val(64, 1) >> (target - 8);
            checks.push(Check::at_most(
                format!("q_p recursion vs enumeration t={tv:e} k={k}"),
                &worst,
                &bound,
            ));
        }
    }
    Ok(checks)
}

/// `Σ_p |q_p|·θ'^p` over `(k/t)·e^{k/(2θ')}·θ'^{k−1}` at `t = 10⁴` for `k` in the theorem regime.
pub fn qp_sum_checks(target: i32, baseline: &Baseline) -> Result<Vec<Check>> {
    let t = big(1e4);
    let ctx = ctx_for(&t, 40, target)?;
    let jet = theta_jet(&Float::with_val(ctx.working_bits(), &t), 40, &ctx)?;
    let tp = jet.theta_prime();
    let lo = Float::with_val(64, tp.ceil_ref()).to_f64() as usize;
    let hi = (Float::with_val(64, tp.square_ref()) * 3u32).floor().to_f64() as usize;
    let mut checks = Vec::new();
    for k in lo.max(2)..=hi.min(40) {
        let w = qp_weighted_sum(&qp_coefficients(&jet, k, &ctx)?, tp);
        checks.push(Check::regression(
            format!("q_p weighted sum ratio t=1e4 k={k}"),
            &w.ratio(),
            "qp_sum_ratio",
            baseline,
        ));
    }
    Ok(checks)
}

/// `γ(m+1, x)` series against tanh-sinh quadrature, `≤ 10⁻¹⁵` relative.
pub fn gamma_series_checks() -> Result<Vec<Check>> {
    let bits = 192;
    let ctx = PrecisionContext::with_working_bits(bits)?;
    let bound = big(1e-15);
    let mut checks = Vec::new();
    for m in 0..=8u32 {
        for &x in &[0.5, 1.0, 3.0, 10.0] {
            let xf = Float::with_val(bits, x);
            let series = lower_incomplete_gamma(m + 1, &xf, &ctx)?;
            let quad = tanh_sinh(
                |u: &Float| Ok(Float::with_val(bits, (-u.clone()).exp()) * Float::with_val(bits, u.pow(m))),
                &Float::new(bits),
                &xf,
                160,
            )?;
            let rel = (Float::with_val(bits, &series - &quad) / &quad).abs();
            checks.push(Check::at_most(format!("incomplete gamma m={m} x={x}"), &rel, &bound));
        }
    }
    Ok(checks)
}

/// Euler–Maclaurin `(M, K)` against `(2M, K+10)` within twice the error estimate,
/// `η_0` against an independent `ζ(1/2+it)` at 256 bits, `d`-independence at `p = 0`
/// and conjugation symmetry.
pub fn eta_consistency_checks(target: i32) -> Result<Vec<Check>> {
    let mut checks = Vec::new();
    for &tv in &[1e3, 1e4] {
        let t = big(tv);
        for p in [0u32, 3, 10, 40] {
            let ctx = ctx_for(&t, p, target)?;
            let params = EtaParams::at_theta_prime(&t, p, &ctx)?;
            let base = eta_reference(&params, &ctx)?;
            let plan = base.plan.ok_or_else(|| Error::invalid("reference without a plan"))?;
            let cfg = EtaReferenceConfig {
                m_override: Some(2 * plan.m),
                min_k: plan.k + 10,
            };
            let other = eta_reference_with(&params, &ctx, &cfg)?;
            let diff = base.value.sub(&other.value).abs();
            let est = Float::with_val(64, base.abs_error_estimate.max_ref(&other.abs_error_estimate));
            let bound = est * 2u32;
            checks.push(Check::at_most(
                format!(
                    "euler-maclaurin (M,K)=({},{}) vs (2M,K+10) t={tv:e} p={p}",
                    plan.m, plan.k
                ),
                &diff,
                &bound,
            ));
        }
        let bits = 256;
        let ctx = PrecisionContext::new(bits, 64, (bits - 64) as i32)?;
        let t = Float::with_val(bits, tv);
        let eta0 = eta_reference(&EtaParams::at_theta_prime(&t, 0, &ctx)?, &ctx)?;
        let zeta = zeta_euler_maclaurin(0.5, &t, bits)?;
        let rel = eta0.value.sub(&zeta).abs() / zeta.abs();
        checks.push(Check::at_most(
            format!("eta_0 vs zeta oracle t={tv:e}"),
            &rel,
            &big(1e-20),
        ));

        let ctx = ctx_for(&t, 0, target)?;
        let a = eta_reference(&EtaParams::new(&t, &big(0.0), 0, &ctx)?, &ctx)?;
        let b = eta_reference(&EtaParams::new(&t, &big(3.7), 0, &ctx)?, &ctx)?;
        let diff = a.value.sub(&b.value).abs();
        checks.push(Check::exact(
            format!("eta_0 independent of d t={tv:e}"),
            diff.is_zero(),
            short(&diff),
            "0",
        ));

        let neg = Float::with_val(t.prec(), -&t);
        let c = eta_reference(&EtaParams::new(&neg, &big(0.0), 0, &ctx)?, &ctx)?;
        let diff = a.value.sub(&c.value.conj()).abs();
        let bound = Float::with_val(64, 1) >> (target - 4);
        checks.push(Check::at_most(
            format!("eta_0 conjugation symmetry t={tv:e}"),
            &diff,
            &bound,
        ));
    }
    Ok(checks)
}

/// Normalized discrepancy of the conjugate short-sum identity at `t = 10⁴`, `p ∈ {4, 8, 16}`.
pub fn conjugate_sum_checks(target: i32, baseline: &Baseline) -> Result<Vec<Check>> {
    let t = big(1e4);
    let c = default_c(128);
    let mut checks = Vec::new();
    for p in [4u32, 8, 16] {
        let ctx = ctx_for(&t, p, target)?;
        let r = conjugate_short_sum_check(&Float::with_val(ctx.working_bits(), &t), p, &c, &ctx)?;
        checks.push(Check::regression(
            format!("conjugate short sums t=1e4 p={p} (N0={}, N1={})", r.n0, r.n1),
            &r.normalized_discrepancy,
            "conjugate_sum_discrepancy",
            baseline,
        ));
    }
    Ok(checks)
}

/// `|Σ_{N₁<n≤N} φ_p(n) − F(N)|` over `t^{−1/2}·c^{p/d}·d^p + N^{−1/2}·log^p N` at `t = 10⁴`,
/// `p ∈ {4, 8}`, `N ∈ {10⁵, 10⁶}`, where `F` is the antiderivative of `φ_p`.
pub fn tail_sum_checks(target: i32, baseline: &Baseline) -> Result<Vec<Check>> {
    let ctx = sum_ctx(target)?;
    let wp = ctx.working_bits();
    let t = Float::with_val(wp, 1e4);
    let c = default_c(wp);
    let jet = theta_jet(&t, 1, &ctx)?;
    let d = Float::with_val(wp, jet.theta_prime());
    let n1 = (Float::with_val(wp, Float::with_val(wp, &d * 2u32).exp()) * &c)
        .floor()
        .to_f64() as u64;
    let mut checks = Vec::new();
    for p in [4u32, 8] {
        let params = EtaParams::new(&t, &d, p, &ctx)?;
        let mut sum = BigComplex::zero(wp);
        let mut from = n1;
        for n in [100_000u64, 1_000_000] {
            sum.add_assign(&partial_sum_phi(from, n, &params, &ctx)?);
            from = n;
            let nf = Float::with_val(wp, n);
            let diff = sum.sub(&phi_antiderivative(&nf, &params, &ctx)?).abs();
            let pf = Float::with_val(wp, p);
            let first = Float::with_val(wp, t.recip_sqrt_ref())
                * Float::with_val(wp, (&c).pow(Float::with_val(wp, &pf / &d)))
                * Float::with_val(wp, (&d).pow(p));
            let second = Float::with_val(wp, nf.recip_sqrt_ref()) * Float::with_val(wp, nf.ln_ref()).pow(p);
            let ratio = diff / (first + second);
            checks.push(Check::regression(
                format!("euler-maclaurin tail t=1e4 p={p} N={n:e} (N1={n1})"),
                &ratio,
                "tail_sum_ratio",
                baseline,
            ));
        }
    }
    Ok(checks)
}

/// Truncated AFE for `η_2` at `t = 10⁴`: the discrepancy-to-envelope ratio at `4N`
/// over the one at `N = 10⁶` stays below the baseline growth factor.
pub fn truncated_afe_growth_checks(target: i32, baseline: &Baseline) -> Result<Vec<Check>> {
    let p = 2u32;
    let t = big(1e4);
    let ref_ctx = ctx_for(&t, p, target)?;
    let reference = eta_reference(&EtaParams::at_theta_prime(&t, p, &ref_ctx)?, &ref_ctx)?;

    let ctx = sum_ctx(target)?;
    let wp = ctx.working_bits();
    let params = EtaParams::at_theta_prime(&Float::with_val(wp, &t), p, &ctx)?;
    let one = Float::with_val(wp, 1);
    let mut sum = phi(&one, &params, &ctx)?;
    let mut from = 1u64;
    let mut ratios = Vec::new();
    for n in [1_000_000u64, 4_000_000] {
        sum.add_assign(&partial_sum_phi(from, n, &params, &ctx)?);
        from = n;
        let nf = Float::with_val(wp, n);
        // (−1)^p·(Σφ − F(N)); p is even
        let value = sum.sub(&phi_antiderivative(&nf, &params, &ctx)?);
        let diff = value.with_prec(ref_ctx.working_bits()).sub(&reference.value).abs();
        let envelope = (Float::with_val(wp, &t) + 1u32)
            * Float::with_val(wp, nf.recip_sqrt_ref())
            * Float::with_val(wp, nf.ln_ref()).pow(p);
        ratios.push(Float::with_val(wp, diff / envelope));
    }
    let growth = Float::with_val(wp, &ratios[1] / &ratios[0]);
    Ok(vec![
        Check {
            name: "truncated afe ratio t=1e4 p=2 N=1e6".into(),
            status: CheckStatus::Recorded,
            measured: short(&ratios[0]),
            bound: String::new(),
        },
        Check {
            name: "truncated afe ratio t=1e4 p=2 N=4e6".into(),
            status: CheckStatus::Recorded,
            measured: short(&ratios[1]),
            bound: String::new(),
        },
        Check::regression(
            "truncated afe ratio growth under N -> 4N",
            &growth,
            "truncated_afe_growth_factor",
            baseline,
        ),
    ])
}

/// Short AFE against the reference: `p = 4` within the baseline factor of its
/// estimate at `t = 10⁴`, and the `p = 30` ratio stable from `t = 4·10³` to `10⁴`.
pub fn short_afe_checks(target: i32, baseline: &Baseline) -> Result<Vec<Check>> {
    let c = default_c(128);
    let ratio_at = |tv: f64, p: u32| -> Result<Float> {
        let t = big(tv);
        let ctx = ctx_for(&t, p, target)?;
        let t = Float::with_val(ctx.working_bits(), &t);
        let afe = eta_afe(&t, p, &c, &ctx)?;
        let reference = eta_reference(&EtaParams::at_theta_prime(&t, p, &ctx)?, &ctx)?;
        Ok(afe.value.sub(&reference.value).abs() / Float::with_val(64, &afe.abs_error_estimate))
    };
    let r4 = ratio_at(1e4, 4)?;
    let lo = ratio_at(4e3, 30)?;
    let hi = ratio_at(1e4, 30)?;
    let drift = Float::with_val(64, &hi / &lo);
    Ok(vec![
        Check::regression(
            "short afe error over estimate t=1e4 p=4",
            &r4,
            "short_afe_factor",
            baseline,
        ),
        Check {
            name: "short afe error over estimate t=4e3 p=30".into(),
            status: CheckStatus::Recorded,
            measured: short(&lo),
            bound: String::new(),
        },
        Check {
            name: "short afe error over estimate t=1e4 p=30".into(),
            status: CheckStatus::Recorded,
            measured: short(&hi),
            bound: String::new(),
        },
        Check::regression(
            "short afe p=30 ratio drift 4e3 -> 1e4",
            &drift,
            "short_afe_p30_drift",
            baseline,
        ),
    ])
}

/// `|z_main_sum − z_reference| / t^{−1/4}` at `t = 10⁴`.
pub fn weak_rs_checks(target: i32, baseline: &Baseline) -> Result<Vec<Check>> {
    let t = big(1e4);
    let ctx = ctx_for(&t, 0, target)?;
    let rec = residual(&t, 0, &ctx)?;
    let scale = Float::with_val(64, Float::with_val(64, t.ln_ref()) * -0.25f64).exp();
    let measured = Float::with_val(64, rec.residual.abs_ref()) / scale;
    Ok(vec![Check::regression(
        "weak riemann-siegel error over t^(-1/4) t=1e4",
        &measured,
        "weak_rs_constant",
        baseline,
    )])
}

/// Normalized residual at `k = 5` for `t ∈ {10³, 4·10³, 10⁴}`: each step may grow
/// by at most the baseline factor.
pub fn residual_trend_checks(target: i32, baseline: &Baseline) -> Result<Vec<Check>> {
    let k = 5;
    let ts = [1e3, 4e3, 1e4];
    let mut normalized = Vec::new();
    let mut checks = Vec::new();
    for &tv in &ts {
        let t = big(tv);
        let ctx = ctx_for(&t, k, target)?;
        let rec = residual(&t, k, &ctx)?;
        checks.push(Check {
            name: format!("normalized residual k={k} t={tv:e}"),
            status: CheckStatus::Recorded,
            measured: short(&rec.normalized),
            bound: String::new(),
        });
        normalized.push(Float::with_val(64, &rec.normalized));
    }
    for i in 1..ts.len() {
        let growth = Float::with_val(64, &normalized[i] / &normalized[i - 1]);
        checks.push(Check::regression(
            format!("normalized residual growth k={k} t={:e} -> {:e}", ts[i - 1], ts[i]),
            &growth,
            "residual_trend_factor",
            baseline,
        ));
    }
    Ok(checks)
}

/// `t` and `k` range of the published experiment.
pub const EXPERIMENT_T: f64 = 1e4;
pub const EXPERIMENT_K_MAX: u32 = 117;
pub const EXPERIMENT_BOUND: f64 = 0.05;

/// Residual records at `t = 10⁴` for `k = 1..=117`.
pub fn experiment_records(target: i32) -> Result<Vec<SweepEntry>> {
    let t = big(EXPERIMENT_T);
    let ctx = ctx_for(&t, EXPERIMENT_K_MAX, target)?;
    let t = Float::with_val(ctx.working_bits(), &t);
    let ks: Vec<u32> = (1..=EXPERIMENT_K_MAX).collect();
    Ok(records_at(&t, &ks, &default_c(ctx.working_bits()), &ctx))
}

/// `|R_k(10⁴)| ≤ 0.05·θ'(10⁴)^k`, one check per record.
pub fn experiment_claim_checks(entries: &[SweepEntry]) -> Vec<Check> {
    let bound = big(EXPERIMENT_BOUND);
    entries
        .iter()
        .map(|e| {
            let name = format!("normalized residual t={} k={}", short(e.t()), e.k());
            match e {
                SweepEntry::Ok(r) => Check::at_most(name, &r.normalized, &bound),
                SweepEntry::Failed { error, .. } => Check::exact(name, false, format!("error: {error}"), short(&bound)),
            }
        })
        .collect()
}

/// Envelope ratio for the records inside `θ' ≤ k ≤ 3θ'²`.
pub fn theorem_envelope_checks(entries: &[SweepEntry], baseline: &Baseline) -> Vec<Check> {
    entries
        .iter()
        .filter_map(SweepEntry::record)
        .filter(|r| !r.extrapolated)
        .map(|r| {
            Check::regression(
                format!("envelope ratio t={} k={}", short(&r.t), r.k),
                &r.envelope_ratio,
                "theorem_envelope_ratio",
                baseline,
            )
        })
        .collect()
}

/// `imag_leak ≤ 2^{−(target−16)}·(|value| + θ'^k)`
pub fn leak_check(
    name: impl Into<String>,
    leak: &Float,
    value: &Float,
    theta_prime_pow_k: &Float,
    target: i32,
) -> Check {
    let scale = Float::with_val(64, value.abs_ref()) + Float::with_val(64, theta_prime_pow_k);
    Check::at_most(name, leak, &(scale >> (target - 16)))
}

pub fn leak_checks(entries: &[SweepEntry], target: i32) -> Vec<Check> {
    entries
        .iter()
        .map(|e| {
            let name = format!("imaginary leak t={} k={}", short(e.t()), e.k());
            match e {
                SweepEntry::Ok(r) => leak_check(name, &r.imag_leak, &r.reference, &r.theta_prime_pow_k, target),
                SweepEntry::Failed { error, .. } => Check::exact(name, false, format!("error: {error}"), ""),
            }
        })
        .collect()
}

pub struct FiniteDifferenceOutcome {
    /// Relative agreement with Richardson-extrapolated differences of `Z`.
    pub checks: Vec<Check>,
    /// Imaginary-leak checks of the references involved.
    pub leaks: Vec<Check>,
}

/// `Z^(k)` from the `η_p` identity against Richardson-extrapolated central
/// differences of `Z` (step `10⁻³`) for `k = 1..=4`, `t ∈ {500, 1000}`, relative `10⁻⁵`.
pub fn finite_difference_checks(target: i32) -> Result<FiniteDifferenceOutcome> {
    let mut out = FiniteDifferenceOutcome {
        checks: Vec::new(),
        leaks: Vec::new(),
    };
    let bound = big(1e-5);
    for &tv in &[500.0, 1000.0] {
        let t = big(tv);
        let base = ctx_for(&t, 0, target)?;
        let fd_bits = base.working_bits() + 64;
        let tf = Float::with_val(fd_bits, tv);
        let h = Float::with_val(fd_bits, 1e-3);
        let ctx = ctx_for(&t, 4, target)?;
        let engine = ResidualEngine::new(&t, 4, &default_c(128), &ctx)?;
        for k in 1..=4u32 {
            let name = format!("finite differences t={tv} k={k}");
            let exact = match engine.reference(k) {
                Ok(v) => v,
                Err(Error::ImaginaryLeak { .. }) => z_deriv_reference(&t, k, &ctx)?,
                Err(e) => {
                    out.checks.push(Check::failed(name, &e));
                    continue;
                }
            };
            let fd = richardson_derivative(|x: &Float| z_reference(x, &base), &tf, k, &h)?;
            let rel = Float::with_val(exact.value.prec(), &fd - &exact.value).abs() / exact.value.clone().abs();
            out.checks.push(Check::at_most(name, &rel, &bound));
            let tp_k = Float::with_val(64, engine.theta_jet().theta_prime().pow(k));
            out.leaks.push(leak_check(
                format!("imaginary leak t={tv} k={k}"),
                &exact.imag_leak,
                &exact.value,
                &tp_k,
                target,
            ));
        }
    }
    Ok(out)
}
