//! Hardy's Z-function, the main sum of the approximate functional equation for
//! `Z^(k)(t)`, the exact reference assembled from `η_p`, and the error term
//! `R_k(t)` between them.
//!
//! The reference uses
//! `Z^(k)(t) = e^{iθ(t)}·(i^k·η_k + Σ_{p≤k−2} q_p(t)·i^p·η_p)` with `d = θ'(t)` and
//! `s = 1/2 + it`.

use rug::ops::Pow;
use rug::{Assign, Float};

use crate::combinatorics::BellSums;
use crate::error::{Error, Result};
use crate::eta::{eta_reference_batch, main_sum_length, EtaReferenceConfig, EtaValue};
use crate::numerics::{format_real, BigComplex, CompensatedSum, PrecisionContext};
use crate::theta::{theta_jet, ThetaJet};

/// `e^{1/2}`, the envelope constant used unless a run overrides it.
pub fn default_c(prec: u32) -> Float {
    Float::with_val(prec, 0.5f64).exp()
}

#[derive(Debug, Clone, PartialEq)]
pub struct MainSumResult {
    pub value: Float,
    pub n_terms: u64,
    pub k: u32,
    pub t: Float,
}

fn check_t(t: &Float) -> Result<()> {
    if !(t.is_finite() && *t >= 10) {
        return Err(Error::invalid("t must be >= 10"));
    }
    Ok(())
}

fn check_k(k: u32, theta_prime: &Float) -> Result<()> {
    let limit = Float::with_val(64, theta_prime.square_ref()) * 10u32;
    if limit < k {
        return Err(Error::invalid(format!(
            "k = {k} exceeds 10·θ'(t)^2 = {:.1}",
            limit.to_f64()
        )));
    }
    Ok(())
}

/// Per-`n` pieces of the main sum: `n^{−1/2}`, `θ' − log n`, `cos` and `sin` of `θ − t·log n`.
#[derive(Debug, Clone)]
struct MainSumTerms {
    t: Float,
    amp: Vec<Float>,
    weight: Vec<Float>,
    cos: Vec<Float>,
    sin: Vec<Float>,
}

impl MainSumTerms {
    fn new(t: &Float, jet: &ThetaJet, wp: u32) -> Self {
        let n_terms = main_sum_length(t, wp);
        let mut terms = MainSumTerms {
            t: t.clone(),
            amp: Vec::with_capacity(n_terms as usize),
            weight: Vec::with_capacity(n_terms as usize),
            cos: Vec::with_capacity(n_terms as usize),
            sin: Vec::with_capacity(n_terms as usize),
        };
        for n in 1..=n_terms {
            let ln_n = Float::with_val(wp, n).ln();
            terms.amp.push(Float::with_val(wp, n).recip_sqrt());
            terms.weight.push(Float::with_val(wp, jet.theta_prime() - &ln_n));
            let arg = Float::with_val(wp, jet.theta() - Float::with_val(wp, t * &ln_n));
            let (s, c) = arg.sin_cos(Float::new(wp));
            terms.cos.push(c);
            terms.sin.push(s);
        }
        terms
    }

    fn n_terms(&self) -> u64 {
        self.amp.len() as u64
    }

    /// `2·Σ n^{−1/2}·(θ' − log n)^k·cos(θ − t·log n + kπ/2)`
    fn evaluate(&self, k: u32, wp: u32) -> MainSumResult {
        let mut sum = CompensatedSum::new(wp);
        let mut term = Float::new(wp);
        for i in 0..self.amp.len() {
            // cos(x + kπ/2) by quarter-turn rotation
            let (trig, negate) = match k % 4 {
                0 => (&self.cos[i], false),
                1 => (&self.sin[i], true),
                2 => (&self.cos[i], true),
                _ => (&self.sin[i], false),
            };
            term.assign((&self.weight[i]).pow(k));
            term *= &self.amp[i];
            term *= trig;
            if negate {
                term = -term;
            }
            sum.add(&term);
        }
        MainSumResult {
            value: sum.value() * 2u32,
            n_terms: self.n_terms(),
            k,
            t: self.t.clone(),
        }
    }
}

/// Main sum of the weak Riemann–Siegel formula, `2·Σ_{n≤√(t/2π)} n^{−1/2}·cos(θ(t) − t·log n)`.
pub fn z_main_sum(t: &Float, ctx: &PrecisionContext) -> Result<MainSumResult> {
    z_deriv_main_sum(t, 0, ctx)
}

/// Main sum of the approximate functional equation for `Z^(k)(t)`.
pub fn z_deriv_main_sum(t: &Float, k: u32, ctx: &PrecisionContext) -> Result<MainSumResult> {
    check_t(t)?;
    let wp = ctx.working_bits();
    let t = Float::with_val(wp, t);
    let jet = theta_jet(&t, 1, ctx)?;
    check_k(k, jet.theta_prime())?;
    Ok(MainSumTerms::new(&t, &jet, wp).evaluate(k, wp))
}

/// `Z^(k)(t)` and the size of the imaginary part discarded to get it.
#[derive(Debug, Clone, PartialEq)]
pub struct ZkReference {
    pub value: Float,
    pub imag_leak: Float,
    pub working_bits: u32,
}

/// Everything the reference needs at one `t`, shared across derivative orders.
#[derive(Debug, Clone)]
struct ReferenceParts {
    jet: ThetaJet,
    bell: BellSums,
    /// `η_p` for `p = 0..=k_max`
    etas: Vec<EtaValue>,
    rotation: BigComplex,
    ctx: PrecisionContext,
}

impl ReferenceParts {
    fn new(t: &Float, k_max: u32, ctx: &PrecisionContext) -> Result<Self> {
        let wp = ctx.working_bits();
        let jet = theta_jet(t, (k_max as usize).max(2), ctx)?;
        check_k(k_max, jet.theta_prime())?;
        let bell = BellSums::new(&jet, k_max as usize, ctx)?;
        let ps: Vec<u32> = (0..=k_max).collect();
        let etas = eta_reference_batch(t, jet.theta_prime(), &ps, ctx, &EtaReferenceConfig::default())?;
        let rotation = BigComplex::cis(&Float::with_val(wp, jet.theta()));
        Ok(ReferenceParts {
            jet,
            bell,
            etas,
            rotation,
            ctx: *ctx,
        })
    }

    fn assemble(&self, k: u32) -> Result<ZkReference> {
        let wp = self.ctx.working_bits();
        let mut inner = self.etas[k as usize].value.mul_i_pow(k);
        if k >= 2 {
            let table = self.bell.qp_table(k as usize)?;
            for (p, q) in table.coefficients.iter().enumerate() {
                inner.add_assign(&q.mul(&self.etas[p].value).mul_i_pow(p as u32));
            }
        }
        let total = self.rotation.mul(&inner);
        let value = total.re;
        let imag_leak = Float::with_val(wp, total.im.abs_ref());
        let theta_prime_pow = Float::with_val(wp, self.jet.theta_prime().pow(k));
        let scale = Float::with_val(wp, value.abs_ref()) + theta_prime_pow;
        let bound = scale >> (self.ctx.target() - 16);
        if imag_leak > bound {
            return Err(Error::ImaginaryLeak {
                leak: format_real(&Float::with_val(64, &imag_leak)),
                bound: format_real(&Float::with_val(64, &bound)),
                working_bits: wp,
            });
        }
        Ok(ZkReference {
            value,
            imag_leak,
            working_bits: wp,
        })
    }
}

fn with_escalation<T>(ctx: &PrecisionContext, f: impl Fn(&PrecisionContext) -> Result<T>) -> Result<T> {
    match f(ctx) {
        Err(Error::ImaginaryLeak { .. }) => f(&ctx.doubled()),
        other => other,
    }
}

/// `Z(t)` from `e^{iθ(t)}·ζ(1/2 + it)`.
pub fn z_reference(t: &Float, ctx: &PrecisionContext) -> Result<Float> {
    Ok(z_deriv_reference(t, 0, ctx)?.value)
}

/// `Z^(k)(t)` from the Faà di Bruno identity, retried once at double precision if
/// the imaginary part exceeds `2^{−target+16}·(|value| + θ'^k)`.
pub fn z_deriv_reference(t: &Float, k: u32, ctx: &PrecisionContext) -> Result<ZkReference> {
    check_t(t)?;
    with_escalation(ctx, |c| {
        let t = Float::with_val(c.working_bits(), t);
        ReferenceParts::new(&t, k, c)?.assemble(k)
    })
}

/// The two-term bound `t^{−1/2}·c^{k/θ'}·θ'^k + t^{−3/4}·e^{k/(2θ')}·k·θ'^{k−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct TheoremEnvelope {
    pub value: Float,
    /// `k` lies outside `θ' ≤ k ≤ 3θ'²`.
    pub extrapolated: bool,
}

pub fn theorem_envelope(t: &Float, k: u32, c: &Float) -> Result<TheoremEnvelope> {
    check_t(t)?;
    if !(c.is_finite() && *c > 1) {
        return Err(Error::invalid("c must be > 1"));
    }
    let prec = t.prec().max(128);
    let ctx = PrecisionContext::with_working_bits(prec)?;
    let jet = theta_jet(&Float::with_val(prec, t), 1, &ctx)?;
    Ok(envelope_at(t, jet.theta_prime(), k, c))
}

fn envelope_at(t: &Float, theta_prime: &Float, k: u32, c: &Float) -> TheoremEnvelope {
    let p = theta_prime.prec();
    let kf = Float::with_val(p, k);
    let ratio = Float::with_val(p, &kf / theta_prime);
    let first = Float::with_val(p, t.recip_sqrt_ref())
        * Float::with_val(p, c.pow(&ratio))
        * Float::with_val(p, theta_prime.pow(k));
    let t_34 = Float::with_val(p, Float::with_val(p, t.ln_ref()) * -0.75f64).exp();
    let second = if k == 0 {
        Float::new(p)
    } else {
        t_34 * Float::with_val(p, &ratio / 2u32).exp() * &kf * Float::with_val(p, theta_prime.pow(k - 1))
    };
    TheoremEnvelope {
        value: first + second,
        extrapolated: outside_theorem_regime(theta_prime, k),
    }
}

/// `k` lies outside `θ' ≤ k ≤ 3θ'²`.
pub(crate) fn outside_theorem_regime(theta_prime: &Float, k: u32) -> bool {
    let upper = Float::with_val(theta_prime.prec(), theta_prime.square_ref()) * 3u32;
    *theta_prime > k || upper < k
}

/// One measured error term.
#[derive(Debug, Clone, PartialEq)]
pub struct ResidualRecord {
    pub t: Float,
    pub k: u32,
    pub main_sum: Float,
    pub reference: Float,
    /// `reference − main_sum`, held exactly.
    pub residual: Float,
    pub theta_prime: Float,
    pub theta_prime_pow_k: Float,
    /// `|R_k| / θ'^k`
    pub normalized: Float,
    pub envelope: Float,
    pub envelope_ratio: Float,
    pub imag_leak: Float,
    pub working_bits: u32,
    pub n_terms: u64,
    pub extrapolated: bool,
}

/// `a − b` with enough precision that no rounding happens.
fn exact_difference(a: &Float, b: &Float) -> Float {
    if a.is_zero() || b.is_zero() {
        let prec = a.prec().max(b.prec());
        return Float::with_val(prec, a - b);
    }
    let ea = a.get_exp().unwrap_or(0);
    let eb = b.get_exp().unwrap_or(0);
    let lsb = (ea - a.prec() as i32).min(eb - b.prec() as i32);
    let prec = (ea.max(eb) + 1 - lsb) as u32;
    Float::with_val(prec, a - b)
}

/// Residual records for every `k ≤ k_max` at one `t`, sharing the theta jet, the
/// Bell sums and a single batch of `η_p` evaluations.
#[derive(Debug, Clone)]
pub struct ResidualEngine {
    t: Float,
    c: Float,
    k_max: u32,
    parts: ReferenceParts,
    main: MainSumTerms,
}

impl ResidualEngine {
    pub fn new(t: &Float, k_max: u32, c: &Float, ctx: &PrecisionContext) -> Result<Self> {
        check_t(t)?;
        if !(c.is_finite() && *c > 1) {
            return Err(Error::invalid("c must be > 1"));
        }
        let wp = ctx.working_bits();
        let t = Float::with_val(wp, t);
        let parts = ReferenceParts::new(&t, k_max, ctx)?;
        let main = MainSumTerms::new(&t, &parts.jet, wp);
        Ok(ResidualEngine {
            t,
            c: Float::with_val(wp, c),
            k_max,
            parts,
            main,
        })
    }

    pub fn context(&self) -> &PrecisionContext {
        &self.parts.ctx
    }

    pub fn k_max(&self) -> u32 {
        self.k_max
    }

    pub fn theta_jet(&self) -> &ThetaJet {
        &self.parts.jet
    }

    pub fn main_sum(&self, k: u32) -> Result<MainSumResult> {
        self.check_order(k)?;
        Ok(self.main.evaluate(k, self.parts.ctx.working_bits()))
    }

    pub fn reference(&self, k: u32) -> Result<ZkReference> {
        self.check_order(k)?;
        self.parts.assemble(k)
    }

    fn check_order(&self, k: u32) -> Result<()> {
        if k > self.k_max {
            return Err(Error::invalid(format!(
                "k = {k} exceeds this engine's k_max = {}",
                self.k_max
            )));
        }
        Ok(())
    }

    pub fn record(&self, k: u32) -> Result<ResidualRecord> {
        let wp = self.parts.ctx.working_bits();
        let main = self.main_sum(k)?;
        let reference = self.reference(k)?;
        let residual = exact_difference(&reference.value, &main.value);
        let theta_prime = Float::with_val(wp, self.parts.jet.theta_prime());
        let theta_prime_pow_k = Float::with_val(wp, (&theta_prime).pow(k));
        let abs_res = Float::with_val(wp, residual.abs_ref());
        let normalized = Float::with_val(wp, &abs_res / &theta_prime_pow_k);
        let env = envelope_at(&self.t, &theta_prime, k, &self.c);
        let envelope_ratio = Float::with_val(wp, &abs_res / &env.value);
        Ok(ResidualRecord {
            t: self.t.clone(),
            k,
            main_sum: main.value,
            reference: reference.value,
            residual,
            theta_prime,
            theta_prime_pow_k,
            normalized,
            envelope: env.value,
            envelope_ratio,
            imag_leak: reference.imag_leak,
            working_bits: wp,
            n_terms: main.n_terms,
            extrapolated: env.extrapolated,
        })
    }
}

/// `R_k(t)` with `c = e^{1/2}`.
pub fn residual(t: &Float, k: u32, ctx: &PrecisionContext) -> Result<ResidualRecord> {
    residual_with_c(t, k, &default_c(ctx.working_bits()), ctx)
}

pub fn residual_with_c(t: &Float, k: u32, c: &Float, ctx: &PrecisionContext) -> Result<ResidualRecord> {
    with_escalation(ctx, |cx| ResidualEngine::new(t, k, c, cx)?.record(k))
}
