//! The Dirichlet-type series `η_p(d, s) = Σ n^{-s}(d − log n)^p` on the critical line.
//!
//! Internally everything is phrased with `φ_p(x) = x^{-s}(log x − d)^p`, whose sums
//! give `η̃_p = (−1)^p·η_p`. Every public value is `η_p`.

use std::fmt;

use rayon::prelude::*;
use rug::float::Constant;
use rug::ops::{NegAssign, Pow};
use rug::{Assign, Float, Integer};

use crate::combinatorics::{pochhammer_complex, StirlingCache};
use crate::error::{Error, Result};
use crate::numerics::{bernoulli_table, log2_abs, BigComplex, CompensatedComplexSum, PrecisionContext};
use crate::theta::{theta, theta_jet};

/// Address of one `η_p(d, 1/2 + it)` evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EtaParams {
    t: Float,
    d: Float,
    p: u32,
    s: BigComplex,
}

impl EtaParams {
    pub const MAX_P: u32 = 200;

    /// `|t| ≥ 10`, `p ≤ 200`, any finite `d`.
    pub fn new(t: &Float, d: &Float, p: u32, ctx: &PrecisionContext) -> Result<Self> {
        if !t.is_finite() || Float::with_val(64, t.abs_ref()) < 10 {
            return Err(Error::invalid("EtaParams requires |t| >= 10"));
        }
        if !d.is_finite() {
            return Err(Error::invalid("EtaParams requires a finite d"));
        }
        if p > Self::MAX_P {
            return Err(Error::invalid(format!("p = {p} exceeds {}", Self::MAX_P)));
        }
        let wp = ctx.working_bits();
        let t = Float::with_val(wp, t);
        let s = BigComplex::new(Float::with_val(wp, 0.5), t.clone());
        Ok(EtaParams {
            t,
            d: Float::with_val(wp, d),
            p,
            s,
        })
    }

    /// The main-path parameters `d = θ'(t)`.
    pub fn at_theta_prime(t: &Float, p: u32, ctx: &PrecisionContext) -> Result<Self> {
        let jet = theta_jet(t, 1, ctx)?;
        EtaParams::new(t, jet.theta_prime(), p, ctx)
    }

    pub fn t(&self) -> &Float {
        &self.t
    }

    pub fn d(&self) -> &Float {
        &self.d
    }

    pub fn p(&self) -> u32 {
        self.p
    }

    pub fn s(&self) -> &BigComplex {
        &self.s
    }

    pub fn with_p(&self, p: u32) -> EtaParams {
        EtaParams { p, ..self.clone() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EtaMethod {
    ReferenceEulerMaclaurin,
    TruncatedAfe,
    ShortAfe,
}

impl fmt::Display for EtaMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EtaMethod::ReferenceEulerMaclaurin => "reference_euler_maclaurin",
            EtaMethod::TruncatedAfe => "truncated_afe",
            EtaMethod::ShortAfe => "short_afe",
        })
    }
}

/// Euler–Maclaurin cut point `M` and number of Bernoulli corrections `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EmPlan {
    pub m: u64,
    pub k: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EtaValue {
    pub value: BigComplex,
    pub abs_error_estimate: Float,
    pub method: EtaMethod,
    /// Set for reference evaluations.
    pub plan: Option<EmPlan>,
}

fn check_x(x: &Float) -> Result<()> {
    if !(x.is_finite() && *x >= 1) {
        return Err(Error::invalid("x must be >= 1"));
    }
    Ok(())
}

fn log_minus_d(x: &Float, d: &Float, wp: u32) -> Float {
    Float::with_val(wp, x.ln_ref()) - d
}

/// `φ_p(x) = x^{-s}(log x − d)^p` for `x ≥ 1`.
pub fn phi(x: &Float, params: &EtaParams, ctx: &PrecisionContext) -> Result<BigComplex> {
    check_x(x)?;
    let wp = ctx.working_bits();
    let x = Float::with_val(wp, x);
    let base = BigComplex::real_pow_neg(&x, &params.s.with_prec(wp));
    if params.p == 0 {
        return Ok(base);
    }
    let l = log_minus_d(&x, &params.d, wp);
    Ok(base.mul_real(&l.pow(params.p)))
}

/// `g_p^(k)(x)` for `g_p(x) = (log x − d)^p`, via signed Stirling numbers:
/// `x^{-k}·Σ_l S_k^l·(p−l+1)_l·(log x − d)^{p−l}`.
pub fn g_deriv(x: &Float, p: u32, d: &Float, k: u32, ctx: &PrecisionContext) -> Result<Float> {
    if !(x.is_finite() && *x > 0) {
        return Err(Error::invalid("g_deriv requires x > 0"));
    }
    let wp = ctx.working_bits() + 16;
    let x = Float::with_val(wp, x);
    let l = log_minus_d(&x, d, wp);
    let row = StirlingCache::global().row(k as usize)?;
    let mut acc = Float::new(wp);
    // (p−l+1)_l = p!/(p−l)!, zero once l > p
    let mut falling = Float::with_val(wp, 1);
    for (li, c) in row.iter().enumerate().take(p.min(k) as usize + 1) {
        if li > 0 {
            falling *= p + 1 - li as u32;
        }
        if *c == 0 {
            continue;
        }
        let power = Float::with_val(wp, (&l).pow(p - li as u32));
        acc += Float::with_val(wp, c * &falling) * power;
    }
    acc /= Float::with_val(wp, (&x).pow(k));
    Ok(Float::with_val(ctx.working_bits(), acc))
}

/// `φ_p^(k)(x)` by the Leibniz rule: `Σ_j C(k,j)·(−1)^j·(s)_j·x^{−s−j}·g_p^{(k−j)}(x)`.
pub fn phi_deriv(x: &Float, params: &EtaParams, k: u32, ctx: &PrecisionContext) -> Result<BigComplex> {
    check_x(x)?;
    let wp = ctx.working_bits() + 16;
    let inner = PrecisionContext::new(wp, ctx.guard_bits(), ctx.target())?;
    let x = Float::with_val(wp, x);
    let s = params.s.with_prec(wp);
    let x_pow = BigComplex::real_pow_neg(&x, &s);
    let mut acc = BigComplex::zero(wp);
    let mut binom = Integer::from(1);
    let mut x_inv_j = Float::with_val(wp, 1);
    for j in 0..=k {
        let g = g_deriv(&x, params.p, &params.d, k - j, &inner)?;
        if !g.is_zero() {
            let mut term = pochhammer_complex(&s, j).mul(&x_pow).mul_real(&x_inv_j);
            term = term.mul_real(&Float::with_val(wp, &g * &binom));
            if j % 2 == 1 {
                term = term.neg();
            }
            acc.add_assign(&term);
        }
        binom *= k - j;
        binom /= j + 1;
        x_inv_j /= &x;
    }
    Ok(acc.with_prec(ctx.working_bits()))
}

/// Closed-form antiderivative of `φ_p` written as a polynomial in `L = log u − d`:
/// `−u^{1−s}·p!·Σ_l L^{p−l} / ((p−l)!·(s−1)^{l+1})`.
fn antiderivative_poly(u: &Float, s: &BigComplex, d: &Float, p: u32, wp: u32) -> BigComplex {
    let one_minus_s = BigComplex::new(Float::with_val(wp, 1) - &s.re, Float::with_val(wp, -&s.im));
    let lead = BigComplex::real_pow_neg(u, &one_minus_s.neg());
    let inv_sm1 = one_minus_s.neg().recip();
    let l = log_minus_d(u, d, wp);
    let mut acc = BigComplex::zero(wp);
    // iterate l from p down: coefficient p!/(p−l)! · L^{p−l} · (s−1)^{−l−1}
    let mut inv_pow = inv_sm1.clone();
    let mut falling = Float::with_val(wp, 1);
    for li in 0..=p {
        let lp = Float::with_val(wp, (&l).pow(p - li));
        acc.add_assign(&inv_pow.mul_real(&Float::with_val(wp, &falling * &lp)));
        falling *= p - li;
        inv_pow = inv_pow.mul(&inv_sm1);
    }
    lead.mul(&acc).neg()
}

/// `F(u)` with `F'(u) = φ_p(u)`, for `u > e^d` (any `u ≥ 1` when `p = 0`).
pub fn phi_antiderivative(u: &Float, params: &EtaParams, ctx: &PrecisionContext) -> Result<BigComplex> {
    check_x(u)?;
    let wp = ctx.working_bits() + 16;
    let u = Float::with_val(wp, u);
    if params.p > 0 && log_minus_d(&u, &params.d, wp) <= 0 {
        return Err(Error::invalid("phi_antiderivative requires u > e^d"));
    }
    Ok(antiderivative_poly(&u, &params.s.with_prec(wp), &params.d, params.p, wp).with_prec(ctx.working_bits()))
}

const CHUNK: u64 = 256;

/// `Σ_{a<n≤b} φ_p(n)` for every `p` in `ps` (sorted, distinct), sharing `n^{-s}` and
/// the powers of `log n − d`. Chunks are summed in parallel and merged in index
/// order, so the result does not depend on scheduling.
fn phi_sums(a: u64, b: u64, t: &Float, d: &Float, ps: &[u32], wp: u32) -> Vec<BigComplex> {
    let p_max = ps.last().copied().unwrap_or(0);
    let mut slot = vec![usize::MAX; p_max as usize + 1];
    for (i, &p) in ps.iter().enumerate() {
        slot[p as usize] = i;
    }
    let n_chunks = (b - a).div_ceil(CHUNK);
    let partials: Vec<Vec<CompensatedComplexSum>> = (0..n_chunks)
        .into_par_iter()
        .map(|c| {
            let lo = a + c * CHUNK + 1;
            let hi = (a + (c + 1) * CHUNK).min(b);
            let mut sums: Vec<CompensatedComplexSum> = ps.iter().map(|_| CompensatedComplexSum::new(wp)).collect();
            let mut ln_n = Float::new(wp);
            let mut l = Float::new(wp);
            let mut modulus = Float::new(wp);
            let mut phase = Float::new(wp);
            let mut cos = Float::new(wp);
            let mut pow = Float::new(wp);
            let mut term = BigComplex::zero(wp);
            for n in lo..=hi {
                ln_n.assign(n);
                ln_n.ln_mut();
                modulus.assign(n);
                modulus.recip_sqrt_mut();
                phase.assign(t * &ln_n);
                phase.neg_assign();
                phase.sin_cos_mut(&mut cos);
                cos *= &modulus;
                phase *= &modulus;
                // phase now holds Im(n^{-s}), cos holds Re(n^{-s})
                l.assign(&ln_n - d);
                pow.assign(1);
                for j in 0..=p_max {
                    if j > 0 {
                        pow *= &l;
                    }
                    let i = slot[j as usize];
                    if i != usize::MAX {
                        term.re.assign(&cos * &pow);
                        term.im.assign(&phase * &pow);
                        sums[i].add(&term);
                    }
                }
            }
            sums
        })
        .collect();
    let mut total: Vec<CompensatedComplexSum> = ps.iter().map(|_| CompensatedComplexSum::new(wp)).collect();
    for chunk in &partials {
        for (acc, part) in total.iter_mut().zip(chunk) {
            acc.merge(part);
        }
    }
    total.iter().map(|s| s.value()).collect()
}

/// `Σ_{a<n≤b} φ_p(n)` with compensated summation, `1 ≤ a ≤ b`.
pub fn partial_sum_phi(a: u64, b: u64, params: &EtaParams, ctx: &PrecisionContext) -> Result<BigComplex> {
    if a < 1 || a > b {
        return Err(Error::invalid("partial_sum_phi requires 1 <= a <= b"));
    }
    let wp = ctx.working_bits();
    Ok(phi_sums(a, b, &params.t, &params.d, &[params.p], wp).remove(0))
}

/// Knobs for [`eta_reference_with`], used by self-consistency checks.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EtaReferenceConfig {
    /// Use exactly this cut point instead of the adaptive choice.
    pub m_override: Option<u64>,
    /// Use at least this many Bernoulli corrections.
    pub min_k: u32,
}

const MAX_K: u32 = 60;
const EM_ATTEMPTS: u32 = 5;

/// Coefficients `c_{j,i}` with `φ_p^(j)(x) = x^{−s−j}·Σ_i c_{j,i}·p!/(p−i)!·L^{p−i}`,
/// generated by `c_{j+1,i} = (−s−j)·c_{j,i} + c_{j,i−1}`. They do not depend on `p`.
struct DerivTable {
    rows: Vec<Vec<BigComplex>>,
    i_max: usize,
}

impl DerivTable {
    fn new(s: &BigComplex, i_max: usize) -> Self {
        let wp = s.prec();
        DerivTable {
            rows: vec![vec![BigComplex::one(wp)]],
            i_max,
        }
    }

    fn extend_to(&mut self, j_max: usize, s: &BigComplex) {
        let wp = s.prec();
        while self.rows.len() <= j_max {
            let j = self.rows.len() - 1;
            let prev = &self.rows[j];
            let factor = s.add_real(&Float::with_val(wp, j)).neg(); // −s−j
            let width = (j + 1).min(self.i_max) + 1;
            let mut next = Vec::with_capacity(width);
            for i in 0..width {
                let mut v = if i < prev.len() {
                    prev[i].mul(&factor)
                } else {
                    BigComplex::zero(wp)
                };
                if i >= 1 && i - 1 < prev.len() {
                    v.add_assign(&prev[i - 1]);
                }
                next.push(v);
            }
            self.rows.push(next);
        }
    }
}

/// Per-`p` data at the cut point `M`.
struct CutPoint {
    /// `p!/(p−i)!·L^{p−i}` for `i = 0..=p`
    weights: Vec<Float>,
    /// `|L(M)|`
    l_abs: Float,
}

fn cut_point_data(l: &Float, p: u32, wp: u32) -> CutPoint {
    let mut powers = Vec::with_capacity(p as usize + 1);
    powers.push(Float::with_val(wp, 1));
    for j in 1..=p as usize {
        let next = Float::with_val(wp, &powers[j - 1] * l);
        powers.push(next);
    }
    let mut weights = Vec::with_capacity(p as usize + 1);
    let mut falling = Float::with_val(wp, 1);
    for i in 0..=p as usize {
        weights.push(Float::with_val(wp, &falling * &powers[p as usize - i]));
        falling *= p - i as u32;
    }
    CutPoint {
        weights,
        l_abs: Float::with_val(wp, l.abs_ref()),
    }
}

/// `∫_M^∞ u^{−a}·L(u)^q du = M^{1−a}/(a−1)·Σ_l q!/(q−l)!·L(M)^{q−l}/(a−1)^l`, `L ≥ 0` on `[M, ∞)`.
fn power_log_tail_integral(m: &Float, l: &Float, a: &Float, q: u32) -> Float {
    let p = 64;
    let am1 = Float::with_val(p, a - 1u32);
    let lead = Float::with_val(p, Float::with_val(p, m.ln_ref()) * Float::with_val(p, 1u32 - a)).exp() / &am1;
    let mut acc = Float::new(p);
    let mut falling = Float::with_val(p, 1);
    let mut inv = Float::with_val(p, 1);
    for li in 0..=q {
        acc += Float::with_val(p, l.pow(q - li)) * &falling * &inv;
        falling *= q - li;
        inv /= &am1;
    }
    lead * acc
}

/// `2ζ(2K)/(2π)^{2K}·∫_M^∞ |φ_p^(2K)|`, bounded term by term from the table.
fn remainder_envelope(table: &DerivTable, k: u32, cut: &CutPoint, m: &Float, p: u32) -> Float {
    let prec = 64;
    let j = 2 * k as usize;
    let two_pi = Float::with_val(prec, Constant::Pi) * 2u32;
    let pre = Float::with_val(prec, Float::zeta_u(2 * k)) * 2u32 / two_pi.pow(2 * k);
    let a = Float::with_val(prec, j) + 0.5f64;
    let l = Float::with_val(prec, &cut.l_abs);
    let mut acc = Float::new(prec);
    let mut falling = Float::with_val(prec, 1);
    for (i, c) in table.rows[j].iter().enumerate().take(p as usize + 1) {
        let q = p - i as u32;
        acc += Float::with_val(prec, c.abs()) * &falling * power_log_tail_integral(m, &l, &a, q);
        falling *= q;
    }
    pre * acc
}

struct EmTail {
    /// `−F(M) − φ(M)/2 − Σ_{l≤K} B_{2l}/(2l)!·φ^{(2l−1)}(M)` per `p`
    corrections: Vec<BigComplex>,
    envelopes: Vec<Float>,
    k: u32,
}

/// Bernoulli corrections at `M` for every `p`, adding terms until the remainder
/// envelope is below `tol` for all of them. `None` if `K = 60` is not enough.
fn em_tail(m: u64, t: &Float, d: &Float, ps: &[u32], tol: &Float, min_k: u32, wp: u32) -> (Option<EmTail>, f64) {
    let p_max = *ps.last().unwrap_or(&0);
    let mf = Float::with_val(wp, m);
    let s = BigComplex::new(Float::with_val(wp, 0.5), Float::with_val(wp, t));
    let l = log_minus_d(&mf, d, wp);
    let cuts: Vec<CutPoint> = ps.iter().map(|&p| cut_point_data(&l, p, wp)).collect();
    let x_pow = BigComplex::real_pow_neg(&mf, &s); // M^{−s}
    let inv_m = Float::with_val(wp, mf.recip_ref());
    let mut table = DerivTable::new(&s, p_max as usize);
    let bern = bernoulli_table(MAX_K, wp);

    let eval = |table: &DerivTable, j: usize, cut: &CutPoint, p: u32, scale: &BigComplex| -> BigComplex {
        let mut acc = BigComplex::zero(wp);
        for (i, c) in table.rows[j].iter().enumerate().take(p as usize + 1) {
            acc.add_assign(&c.mul_real(&cut.weights[i]));
        }
        acc.mul(scale)
    };

    let mut corrections: Vec<BigComplex> = ps
        .iter()
        .zip(&cuts)
        .map(|(&p, cut)| {
            let f_m = x_pow.mul_real(&cut.weights[0]);
            let anti = antiderivative_poly(&mf, &s, d, p, wp);
            anti.add(&f_m.mul_real(&Float::with_val(wp, 0.5))).neg()
        })
        .collect();
    let mut envelopes: Vec<Float> = vec![Float::with_val(64, f64::INFINITY); ps.len()];

    // scale_j = M^{−s−j}
    let mut scale = x_pow.mul_real(&inv_m); // j = 1
    let mut worst = f64::INFINITY;
    let mut fact = Float::with_val(wp, 2); // (2l)!
    for k in 1..=MAX_K {
        let j = 2 * k as usize - 1;
        table.extend_to(j + 1, &s);
        let coef = Float::with_val(wp, &bern[k as usize - 1] / &fact);
        for ((corr, cut), &p) in corrections.iter_mut().zip(&cuts).zip(ps) {
            let deriv = eval(&table, j, cut, p, &scale);
            *corr = corr.sub(&deriv.mul_real(&coef));
        }
        for ((env, cut), &p) in envelopes.iter_mut().zip(&cuts).zip(ps) {
            *env = remainder_envelope(&table, k, cut, &mf, p);
        }
        worst = envelopes.iter().map(log2_abs).fold(f64::NEG_INFINITY, f64::max);
        if k >= min_k && envelopes.iter().all(|e| e <= tol) {
            return (
                Some(EmTail {
                    corrections,
                    envelopes,
                    k,
                }),
                worst,
            );
        }
        scale = scale.mul_real(&inv_m).mul_real(&inv_m);
        fact *= 2 * k + 1;
        fact *= 2 * k + 2;
    }
    (None, worst)
}

/// Starting cut point: at least `2·ceil(|t|/2π)` and, when `p > 0`, past `e^{2d}`;
/// then large enough that about fifty corrections reach the target.
fn initial_cut(t_abs: f64, d: f64, p_max: u32, target: i32) -> u64 {
    let two_pi = 2.0 * std::f64::consts::PI;
    let mut m = 2.0 * (t_abs / two_pi).ceil();
    if p_max > 0 {
        m = m.max((2.0 * d).exp().ceil() + 2.0);
    }
    m = m.max(16.0);
    for _ in 0..3 {
        let l = (m.ln() - d).abs().max(1.0);
        let bits = f64::from(target) + 8.0 + f64::from(p_max) * l.log2() + 0.5 * m.log2();
        let ratio = 2f64.powf(-bits / 100.0);
        m = m.max(((t_abs + 120.0) / two_pi / ratio).ceil());
    }
    m as u64
}

/// Reference `η_p(d, 1/2+it)` for every `p` in `ps` at once.
///
/// `η̃_p = Σ_{n≤M} φ_p(n) − F(M) − φ_p(M)/2 − Σ_{l≤K} B_{2l}/(2l)!·φ_p^{(2l−1)}(M) + R`,
/// and `η_p = (−1)^p·η̃_p`.
pub fn eta_reference_batch(
    t: &Float,
    d: &Float,
    ps: &[u32],
    ctx: &PrecisionContext,
    config: &EtaReferenceConfig,
) -> Result<Vec<EtaValue>> {
    let mut sorted: Vec<u32> = ps.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    if sorted.is_empty() {
        return Ok(Vec::new());
    }
    let first = EtaParams::new(t, d, *sorted.last().unwrap(), ctx)?;
    let wp = ctx.working_bits();
    let p_max = *sorted.last().unwrap();
    let t_abs = Float::with_val(64, first.t.abs_ref()).to_f64();
    let tol = Float::with_val(64, ctx.target_error());

    let mut m = config
        .m_override
        .unwrap_or_else(|| initial_cut(t_abs, first.d.to_f64(), p_max, ctx.target()));
    if p_max > 0 && log_minus_d(&Float::with_val(wp, m), &first.d, wp) <= 0 {
        return Err(Error::invalid("Euler–Maclaurin cut point must exceed e^d"));
    }
    let mut tail = None;
    let mut worst = f64::INFINITY;
    for _ in 0..EM_ATTEMPTS {
        let (found, w) = em_tail(m, &first.t, &first.d, &sorted, &tol, config.min_k, wp);
        worst = w;
        if found.is_some() {
            tail = found;
            break;
        }
        if config.m_override.is_some() {
            break;
        }
        m *= 2;
    }
    let tail = tail.ok_or(Error::PrecisionInfeasible {
        achieved_log2: worst,
        target: ctx.target(),
    })?;

    let sums = phi_sums(0, m, &first.t, &first.d, &sorted, wp);
    let max_l = {
        let lm = log_minus_d(&Float::with_val(wp, m), &first.d, 64);
        Float::with_val(64, first.d.abs_ref()).max(&lm.abs())
    };
    let log_m = (m as f64).ln();
    let round_factor = Float::with_val(64, t_abs * log_m + 8.0) * Float::with_val(64, (m as f64).sqrt() * 2.0)
        / (Float::with_val(64, 1) << wp as i32);

    let by_p: Vec<(u32, EtaValue)> = sorted
        .iter()
        .enumerate()
        .map(|(i, &p)| {
            let mut v = sums[i].add(&tail.corrections[i]);
            if p % 2 == 1 {
                v = v.neg();
            }
            let rounding = Float::with_val(64, (&max_l).pow(p)) * &round_factor;
            (
                p,
                EtaValue {
                    value: v,
                    abs_error_estimate: Float::with_val(64, &tail.envelopes[i] + &rounding),
                    method: EtaMethod::ReferenceEulerMaclaurin,
                    plan: Some(EmPlan { m, k: tail.k }),
                },
            )
        })
        .collect();
    Ok(ps
        .iter()
        .map(|p| {
            by_p.iter()
                .find(|(q, _)| q == p)
                .map(|(_, v)| v.clone())
                .expect("p present")
        })
        .collect())
}

/// Reference `η_p(d, 1/2+it)` by Euler–Maclaurin with adaptive `(M, K)`.
pub fn eta_reference(params: &EtaParams, ctx: &PrecisionContext) -> Result<EtaValue> {
    eta_reference_with(params, ctx, &EtaReferenceConfig::default())
}

pub fn eta_reference_with(params: &EtaParams, ctx: &PrecisionContext, config: &EtaReferenceConfig) -> Result<EtaValue> {
    Ok(eta_reference_batch(&params.t, &params.d, &[params.p], ctx, config)?.remove(0))
}

/// `(−1)^p·[Σ_{n≤N} φ_p(n) − F(N)]` with error estimate `(1+|t|)·N^{−1/2}·(log N)^p`. Requires `N > e^{2d}`.
pub fn eta_truncated_afe(params: &EtaParams, n: u64, ctx: &PrecisionContext) -> Result<EtaValue> {
    let wp = ctx.working_bits();
    let nf = Float::with_val(wp, n);
    let two_d = Float::with_val(wp, &params.d * 2u32);
    if n < 1 || Float::with_val(wp, nf.ln_ref()) <= two_d {
        return Err(Error::invalid("eta_truncated_afe requires N > e^{2d}"));
    }
    let sum = phi_sums(0, n, &params.t, &params.d, &[params.p], wp).remove(0);
    let anti = antiderivative_poly(&nf, &params.s.with_prec(wp), &params.d, params.p, wp);
    let mut value = sum.sub(&anti);
    if params.p % 2 == 1 {
        value = value.neg();
    }
    let log_n = Float::with_val(64, nf.ln_ref());
    let t_abs = Float::with_val(64, params.t.abs_ref());
    let estimate = (t_abs + 1u32) * Float::with_val(64, nf.recip_sqrt_ref()) * log_n.pow(params.p);
    Ok(EtaValue {
        value,
        abs_error_estimate: estimate,
        method: EtaMethod::TruncatedAfe,
        plan: None,
    })
}

/// `⌊√(t/2π)⌋`, exact.
pub fn main_sum_length(t: &Float, wp: u32) -> u64 {
    let x = Float::with_val(wp, t / (Float::with_val(wp, Constant::Pi) * 2u32));
    let mut n = Float::with_val(wp, x.sqrt_ref()).floor().to_f64() as u64;
    while Float::with_val(wp, (n + 1) * (n + 1)) <= x {
        n += 1;
    }
    while n > 0 && Float::with_val(wp, n * n) > x {
        n -= 1;
    }
    n
}

/// `Σ_{n≤N} (θ' − log n)^p · n^{−1/2 + iσt}` with `σ = ±1`.
fn short_sum(n_max: u64, t: &Float, d: &Float, p: u32, conj: bool, wp: u32) -> BigComplex {
    // n^{−1/2+it} is the conjugate of n^{−1/2−it}, and (d − log n)^p = (−1)^p (log n − d)^p
    let v = phi_sums(0, n_max, t, d, &[p], wp).remove(0);
    let v = if conj { v.conj() } else { v };
    if p % 2 == 1 {
        v.neg()
    } else {
        v
    }
}

/// The three sums of the conjugate short-sum identity.
#[derive(Debug, Clone, PartialEq)]
pub struct ConjugateCheck {
    pub lhs: BigComplex,
    pub rhs: BigComplex,
    pub normalized_discrepancy: Float,
    pub n0: u64,
    pub n1: u64,
}

fn check_c(c: &Float) -> Result<()> {
    if !(c.is_finite() && *c > 1) {
        return Err(Error::invalid("c must be > 1"));
    }
    Ok(())
}

/// Compare `Σ_{N₀<n≤N₁} φ_p(n)` with `e^{−2iθ}·Σ_{n≤N₀} (θ' − log n)^p / n^{1/2−it}`,
/// `N₀ = ⌈e^{θ'}⌉`, `N₁ = ⌊c·e^{2θ'}⌋`, normalized by `t^{−1/2}·p²·c^{p/θ'}·θ'^{p−2}`.
pub fn conjugate_short_sum_check(t: &Float, p: u32, c: &Float, ctx: &PrecisionContext) -> Result<ConjugateCheck> {
    check_c(c)?;
    if !(t.is_finite() && *t >= 1000) {
        return Err(Error::invalid("conjugate_short_sum_check requires t >= 1000"));
    }
    let wp = ctx.working_bits();
    let jet = theta_jet(t, 1, ctx)?;
    let d = jet.theta_prime();
    let sqrt_t_ceil = Float::with_val(64, t.sqrt_ref()).ceil();
    if *d > p || sqrt_t_ceil < p {
        return Err(Error::invalid(
            "conjugate_short_sum_check requires θ'(t) <= p <= ceil(√t)",
        ));
    }
    let n0 = Float::with_val(wp, d.exp_ref()).ceil().to_f64() as u64;
    let n1 = (Float::with_val(wp, Float::with_val(wp, d * 2u32).exp()) * c)
        .floor()
        .to_f64() as u64;
    let params = EtaParams::new(t, d, p, ctx)?;
    let lhs = phi_sums(n0, n1, &params.t, &params.d, &[p], wp).remove(0);
    let phase = -Float::with_val(wp, jet.theta() * 2u32);
    let rhs = BigComplex::cis(&phase).mul(&short_sum(n0, &params.t, &params.d, p, true, wp));
    let diff = lhs.sub(&rhs).abs();
    let pf = Float::with_val(wp, p);
    let norm = Float::with_val(wp, t.recip_sqrt_ref())
        * Float::with_val(wp, pf.square_ref())
        * Float::with_val(wp, c.pow(Float::with_val(wp, &pf / d)))
        * Float::with_val(wp, d.pow(p as i32 - 2));
    Ok(ConjugateCheck {
        lhs,
        rhs,
        normalized_discrepancy: diff / norm,
        n0,
        n1,
    })
}

/// Which regime of the short approximate functional equation a `p` falls in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AfeRegime {
    /// `θ' ≤ p ≤ 3θ'²`
    Theorem,
    /// `0 ≤ p < θ'`, outside the proven range
    Legacy,
}

pub fn afe_regime(theta_prime: &Float, p: u32) -> Result<AfeRegime> {
    if *theta_prime > p {
        return Ok(AfeRegime::Legacy);
    }
    let upper = Float::with_val(theta_prime.prec(), theta_prime.square_ref()) * 3u32;
    if upper >= p {
        Ok(AfeRegime::Theorem)
    } else {
        Err(Error::invalid(format!("p = {p} exceeds 3θ'(t)^2")))
    }
}

/// Short approximate functional equation for `η_p(θ'(t), 1/2+it)`:
/// `Σ_{n≤√(t/2π)} (θ'−log n)^p n^{−1/2−it} + e^{−2iθ}·Σ_{n≤√(t/2π)} (log n−θ')^p n^{−1/2+it}`,
/// with error estimate `t^{−1/2}·c^{p/θ'}·θ'^p`.
pub fn eta_afe(t: &Float, p: u32, c: &Float, ctx: &PrecisionContext) -> Result<EtaValue> {
    check_c(c)?;
    if !(t.is_finite() && *t >= 10) {
        return Err(Error::invalid("eta_afe requires t >= 10"));
    }
    let wp = ctx.working_bits();
    let jet = theta_jet(t, 1, ctx)?;
    let d = jet.theta_prime();
    afe_regime(d, p)?;
    let n = main_sum_length(t, wp);
    let tt = Float::with_val(wp, t);
    let first = short_sum(n, &tt, d, p, false, wp);
    // (log n − θ')^p n^{−1/2+it} = (−1)^p·conj of the first sum's terms
    let mut second = first.conj();
    if p % 2 == 1 {
        second = second.neg();
    }
    let phase = -Float::with_val(wp, theta(t, ctx)? * 2u32);
    let value = first.add(&BigComplex::cis(&phase).mul(&second));
    let estimate = Float::with_val(64, t.recip_sqrt_ref())
        * Float::with_val(64, c.pow(Float::with_val(64, Float::with_val(64, p) / d)))
        * Float::with_val(64, d.pow(p));
    Ok(EtaValue {
        value,
        abs_error_estimate: estimate,
        method: EtaMethod::ShortAfe,
        plan: None,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::oracles::{richardson_derivative, zeta_euler_maclaurin};

    fn ctx(bits: u32) -> PrecisionContext {
        PrecisionContext::with_working_bits(bits).unwrap()
    }

    fn params(t: f64, d: f64, p: u32, c: &PrecisionContext) -> EtaParams {
        let w = c.working_bits();
        EtaParams::new(&Float::with_val(w, t), &Float::with_val(w, d), p, c).unwrap()
    }

    fn rel(a: &BigComplex, b: &BigComplex) -> f64 {
        (a.sub(b).abs() / b.abs()).to_f64()
    }

    /// Complex Richardson derivative of `φ`, taken on real and imaginary parts.
    fn fd_complex<F>(f: F, x: &Float, order: u32, h: &Float) -> BigComplex
    where
        F: Fn(&Float) -> BigComplex,
    {
        let re = richardson_derivative(|y: &Float| Ok(f(y).re), x, order, h).unwrap();
        let im = richardson_derivative(|y: &Float| Ok(f(y).im), x, order, h).unwrap();
        BigComplex::new(re, im)
    }

    #[test]
    fn phi_examples() {
        let c = ctx(192);
        let one = Float::with_val(192, 1);
        let v = phi(&one, &params(100.0, 7.0, 0, &c), &c).unwrap();
        assert_eq!(v, BigComplex::one(192));

        let pr = params(100.0, 1.25, 3, &c);
        let at_root = phi(&Float::with_val(192, pr.d().exp_ref()), &pr, &c).unwrap();
        assert!(at_root.abs() < 1e-50);

        // oracle: 2^{−1/2}·e^{−100i·log 2}·(log 2 − 1)³ at doubled precision
        let pr = params(100.0, 1.0, 3, &c);
        let v = phi(&Float::with_val(192, 2), &pr, &c).unwrap();
        let w = 384;
        let ln2 = Float::with_val(w, 2).ln();
        let phase = -Float::with_val(w, &ln2 * 100u32);
        let modulus = Float::with_val(w, 2).sqrt().recip();
        let cube = Float::with_val(w, &ln2 - 1u32).pow(3u32);
        let want = BigComplex::cis(&phase).mul_real(&(modulus * cube));
        assert!(rel(&v.with_prec(w), &want) < 1e-55);
        assert!(phi(&Float::with_val(64, 0.5), &pr, &c).is_err());
    }

    #[test]
    fn g_deriv_examples() {
        let c = ctx(192);
        let x = Float::with_val(192, 20);
        let d = Float::with_val(192, 2);
        for k in 1..5 {
            assert_eq!(g_deriv(&x, 0, &d, k, &c).unwrap(), 0);
        }
        let g = g_deriv(&x, 1, &d, 1, &c).unwrap();
        assert_eq!(g, Float::with_val(192, x.recip_ref()));

        let h = Float::with_val(192, 20e-4);
        let fd = richardson_derivative(
            |y: &Float| Ok(Float::with_val(192, Float::with_val(192, y.ln_ref()) - &d).pow(4u32)),
            &x,
            3,
            &h,
        )
        .unwrap();
        let g = g_deriv(&x, 4, &d, 3, &c).unwrap();
        assert!((Float::with_val(192, &fd - &g) / &g).abs() < 1e-6);
    }

    #[test]
    fn g_deriv_bound() {
        // |g^(k)| ≤ k!·(p/d)^k·x^{−k}·g_p(x) for x ≥ c·e^{2d}
        let c = ctx(192);
        let cc = 0.5f64.exp();
        for &d in &[2.0, 3.686] {
            for p in [4u32, 8, 16] {
                if f64::from(p) < d {
                    continue;
                }
                for &mult in &[1.0, 3.0, 50.0] {
                    let x = Float::with_val(192, cc * (2.0 * d).exp() * mult);
                    let df = Float::with_val(192, d);
                    let gp = Float::with_val(192, Float::with_val(192, x.ln_ref()) - &df).pow(p);
                    for k in 0..=p + 5 {
                        let g = g_deriv(&x, p, &df, k, &c).unwrap().abs();
                        let bound = Float::with_val(192, Float::factorial(k))
                            * Float::with_val(192, Float::with_val(192, p) / &df).pow(k)
                            / Float::with_val(192, (&x).pow(k))
                            * &gp;
                        let bound = Float::with_val(192, &bound + (Float::with_val(192, bound.abs_ref()) >> 120));
                        assert!(g <= bound, "d={d} p={p} x={x} k={k}");
                    }
                }
            }
        }
    }

    #[test]
    fn phi_deriv_examples() {
        let c = ctx(256);
        let x = Float::with_val(256, 7.5);
        let pr = params(100.0, 0.3, 0, &c);
        assert!(rel(&phi_deriv(&x, &pr, 0, &c).unwrap(), &phi(&x, &pr, &c).unwrap()) < 1e-70);
        let d1 = phi_deriv(&x, &pr, 1, &c).unwrap();
        let s1 = pr.s().add_real(&Float::with_val(256, 1));
        let want = BigComplex::real_pow_neg(&x, &s1).mul(pr.s()).neg();
        assert!(rel(&d1, &want) < 1e-60);

        let t = Float::with_val(256, 10_000);
        let pr = EtaParams::at_theta_prime(&t, 3, &c).unwrap();
        let x = Float::with_val(256, 5000);
        let h = Float::with_val(256, 5000e-5);
        let fd = fd_complex(|y| phi(y, &pr, &c).unwrap(), &x, 2, &h);
        let d2 = phi_deriv(&x, &pr, 2, &c).unwrap();
        assert!(rel(&fd, &d2) < 1e-6, "{}", rel(&fd, &d2));
    }

    #[test]
    fn derivative_routes_agree() {
        // recursion table used by the reference evaluator vs the Leibniz/Stirling route
        let c = ctx(320);
        let wp = c.working_bits();
        let t = Float::with_val(wp, 10_000);
        let pr = EtaParams::at_theta_prime(&t, 9, &c).unwrap();
        let x = Float::with_val(wp, 4000);
        let mut table = DerivTable::new(pr.s(), 9);
        table.extend_to(14, pr.s());
        let l = log_minus_d(&x, pr.d(), wp);
        let cut = cut_point_data(&l, 9, wp);
        let mut scale = BigComplex::real_pow_neg(&x, pr.s());
        for j in 0..=14usize {
            let mut via_table = BigComplex::zero(wp);
            for (i, cf) in table.rows[j].iter().enumerate().take(10) {
                via_table.add_assign(&cf.mul_real(&cut.weights[i]));
            }
            via_table = via_table.mul(&scale);
            let leibniz = phi_deriv(&x, &pr, j as u32, &c).unwrap();
            assert!(rel(&via_table, &leibniz) < 1e-80, "j = {j}");
            scale = scale.div_real(&x);
        }
    }

    #[test]
    fn antiderivative() {
        let c = ctx(256);
        let wp = c.working_bits();
        let pr = params(100.0, 0.0, 0, &c);
        let u = Float::with_val(wp, 3);
        let f = phi_antiderivative(&u, &pr, &c).unwrap();
        let sm1 = pr.s().add_real(&Float::with_val(wp, -1));
        let want = BigComplex::real_pow_neg(&u, &sm1).div(&sm1).neg();
        assert!(rel(&f, &want) < 1e-70);

        let t = Float::with_val(wp, 10_000);
        let pr = EtaParams::at_theta_prime(&t, 5, &c).unwrap();
        let u = Float::with_val(wp, 100_000);
        let h = Float::with_val(wp, 1e-3);
        let fd = fd_complex(|y| phi_antiderivative(y, &pr, &c).unwrap(), &u, 1, &h);
        assert!(rel(&fd, &phi(&u, &pr, &c).unwrap()) < 1e-8);

        let below = Float::with_val(wp, pr.d().exp_ref()) - 1u32;
        assert!(phi_antiderivative(&below, &pr, &c).is_err());
    }

    #[test]
    fn partial_sums() {
        let c = ctx(192);
        let pr = params(100.0, 0.0, 0, &c);
        assert_eq!(partial_sum_phi(5, 5, &pr, &c).unwrap(), BigComplex::zero(192));
        let v = partial_sum_phi(1, 2, &pr, &c).unwrap();
        assert!(rel(&v, &phi(&Float::with_val(192, 2), &pr, &c).unwrap()) < 1e-50);
        assert!(partial_sum_phi(0, 2, &pr, &c).is_err());

        let t = Float::with_val(192, 10_000);
        let pr = EtaParams::at_theta_prime(&t, 2, &c).unwrap();
        let forward = partial_sum_phi(1, 1000, &pr, &c).unwrap();
        let mut backward = BigComplex::zero(192);
        for n in (2..=1000u32).rev() {
            backward.add_assign(&phi(&Float::with_val(192, n), &pr, &c).unwrap());
        }
        let tol = Float::with_val(192, 1) >> (c.target() - 8);
        assert!(forward.sub(&backward).abs() <= tol);
    }

    #[test]
    fn eta_zero_is_zeta() {
        let c = ctx(256);
        let t = Float::with_val(256, 100);
        let a = eta_reference(&params(100.0, 0.0, 0, &c), &c).unwrap();
        let b = eta_reference(&params(100.0, 3.7, 0, &c), &c).unwrap();
        assert_eq!(a.value, b.value);
        assert_eq!(a.method, EtaMethod::ReferenceEulerMaclaurin);
        let z = zeta_euler_maclaurin(0.5, &t, 256).unwrap();
        assert!(rel(&a.value, &z) < 1e-20);
        assert!(a.abs_error_estimate < Float::with_val(64, 1) >> (c.target() - 1));
    }

    #[test]
    fn eta_conjugation_symmetry() {
        let c = ctx(192);
        let a = eta_reference(&params(250.0, 0.0, 0, &c), &c).unwrap();
        let b = eta_reference(&params(-250.0, 0.0, 0, &c), &c).unwrap();
        let tol = Float::with_val(64, 1) >> (c.target() - 4);
        assert!(a.value.sub(&b.value.conj()).abs() <= tol);
    }

    #[test]
    fn euler_maclaurin_self_consistency() {
        let c = ctx(256);
        let tol = Float::with_val(64, 1) >> (c.target() - 4);
        let pr = params(100.0, 0.0, 0, &c);
        let base = eta_reference(&pr, &c).unwrap();
        let plan = base.plan.unwrap();
        let cfg = EtaReferenceConfig {
            m_override: Some(2 * plan.m),
            min_k: 0,
        };
        let doubled = eta_reference_with(&pr, &c, &cfg).unwrap();
        assert!(base.value.sub(&doubled.value).abs() <= tol);

        let t = Float::with_val(256, 10_000);
        let pr = EtaParams::at_theta_prime(&t, 3, &c).unwrap();
        let base = eta_reference(&pr, &c).unwrap();
        let plan = base.plan.unwrap();
        let cfg = EtaReferenceConfig {
            m_override: Some(2 * plan.m),
            min_k: plan.k + 10,
        };
        let other = eta_reference_with(&pr, &c, &cfg).unwrap();
        let diff = base.value.sub(&other.value).abs();
        assert!(diff <= tol, "{diff}");
        assert!(diff <= Float::with_val(64, &base.abs_error_estimate + &other.abs_error_estimate) * 2u32);
    }

    #[test]
    fn batch_matches_single() {
        let c = ctx(256);
        let t = Float::with_val(256, 1000);
        let pr = EtaParams::at_theta_prime(&t, 0, &c).unwrap();
        let batch = eta_reference_batch(pr.t(), pr.d(), &[5, 0, 2], &c, &EtaReferenceConfig::default()).unwrap();
        assert_eq!(batch.len(), 3);
        let tol = Float::with_val(64, 1) >> (c.target() - 4);
        for (v, p) in batch.iter().zip([5u32, 0, 2]) {
            let single = eta_reference(&pr.with_p(p), &c).unwrap();
            assert!(v.value.sub(&single.value).abs() <= tol, "p = {p}");
        }
    }

    #[test]
    fn truncated_afe_against_reference() {
        let c = ctx(160);
        let pr = params(100.0, 0.0, 0, &c);
        let reference = eta_reference(&pr, &c).unwrap();
        let afe = eta_truncated_afe(&pr, 100_000, &c).unwrap();
        assert_eq!(afe.method, EtaMethod::TruncatedAfe);
        let diff = afe.value.sub(&reference.value).abs();
        assert!(diff <= Float::with_val(64, &afe.abs_error_estimate * 10u32));
        // with d large enough the precondition N > e^{2d} fails
        let pr = params(100.0, 7.0, 1, &c);
        assert!(eta_truncated_afe(&pr, 1000, &c).is_err());
    }

    #[test]
    fn truncated_afe_sign_convention() {
        // odd p: the public value is η_p, the negation of the φ-sum
        let c = ctx(192);
        let t = Float::with_val(192, 1000);
        let pr = EtaParams::at_theta_prime(&t, 3, &c).unwrap();
        let reference = eta_reference(&pr, &c).unwrap();
        let afe = eta_truncated_afe(&pr, 200_000, &c).unwrap();
        let diff = afe.value.sub(&reference.value).abs();
        assert!(diff <= afe.abs_error_estimate, "{diff}");
    }

    #[test]
    fn short_afe_against_reference() {
        let c = ctx(192);
        let t = Float::with_val(192, 10_000);
        let half = Float::with_val(192, 0.5f64).exp();
        let afe = eta_afe(&t, 4, &half, &c).unwrap();
        assert_eq!(afe.method, EtaMethod::ShortAfe);
        let reference = eta_reference(&EtaParams::at_theta_prime(&t, 4, &c).unwrap(), &c).unwrap();
        let diff = afe.value.sub(&reference.value).abs();
        assert!(diff <= Float::with_val(64, &afe.abs_error_estimate * 10u32), "{diff}");

        // p = 0 is the Riemann–Siegel pair of ζ-sums, off by the classical O(t^{−1/4})
        let afe = eta_afe(&t, 0, &half, &c).unwrap();
        let reference = eta_reference(&EtaParams::at_theta_prime(&t, 0, &c).unwrap(), &c).unwrap();
        let diff = afe.value.sub(&reference.value).abs();
        assert!(diff <= 0.2, "{diff}");
        assert!(eta_afe(&t, 41, &half, &c).is_err());
        let jet = theta_jet(&t, 1, &c).unwrap();
        assert_eq!(afe_regime(jet.theta_prime(), 2).unwrap(), AfeRegime::Legacy);
        assert_eq!(afe_regime(jet.theta_prime(), 40).unwrap(), AfeRegime::Theorem);
    }

    #[test]
    fn conjugate_check_contract() {
        let c = ctx(192);
        let t = Float::with_val(192, 10_000);
        let half = Float::with_val(192, 0.5f64).exp();
        let r = conjugate_short_sum_check(&t, 4, &half, &c).unwrap();
        assert_eq!(r.n0, 40);
        assert_eq!(r.n1, 2624);
        assert!(r.normalized_discrepancy.is_finite());
        assert!(conjugate_short_sum_check(&t, 3, &half, &c).is_err());
        assert!(conjugate_short_sum_check(&t, 101, &half, &c).is_err());
        assert!(conjugate_short_sum_check(&t, 4, &Float::with_val(64, 1), &c).is_err());
    }

    #[test]
    fn main_sum_length_exact() {
        assert_eq!(main_sum_length(&Float::with_val(128, 50), 128), 2);
        assert_eq!(main_sum_length(&Float::with_val(128, 10_000), 128), 39);
        // t = 2π·n² sits exactly on a boundary
        let t = Float::with_val(256, Constant::Pi) * 2u32 * 49u32;
        assert_eq!(main_sum_length(&t, 256), 7);
    }
}
