//! The Riemann–Siegel theta function and its derivatives.
//!
//! `θ(t) = Im log Γ(1/4 + it/2) − (t/2)·log π`. The principal branch of `log Γ`
//! is the continuous one here because `Re(1/4 + it/2) = 1/4 > 0` for every real
//! `t`, so no unwrapping is needed.

use rug::float::Constant;
use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{ln_gamma, log2_abs, polygamma_jet, BigComplex, PrecisionContext};

/// Largest derivative order [`theta_jet`] accepts.
pub const MAX_JET_ORDER: usize = 512;

/// `θ(t)` and its derivatives `θ^(ν)(t)` for `ν = 0..=order` at one point.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaJet {
    t: Float,
    values: Vec<Float>,
}

impl ThetaJet {
    pub fn t(&self) -> &Float {
        &self.t
    }

    pub fn order(&self) -> usize {
        self.values.len() - 1
    }

    pub fn values(&self) -> &[Float] {
        &self.values
    }

    /// `θ^(ν)(t)`
    pub fn get(&self, nu: usize) -> &Float {
        &self.values[nu]
    }

    pub fn theta(&self) -> &Float {
        &self.values[0]
    }

    pub fn theta_prime(&self) -> &Float {
        &self.values[1]
    }

    /// The jet truncated to a lower order.
    pub fn truncated(&self, order: usize) -> ThetaJet {
        ThetaJet {
            t: self.t.clone(),
            values: self.values[..=order.min(self.order())].to_vec(),
        }
    }
}

fn quarter_point(t: &Float, prec: u32) -> BigComplex {
    BigComplex::new(Float::with_val(prec, 0.25), Float::with_val(prec, t / 2u32))
}

/// Extra bits so that a relative error of `2^-prec` on a quantity of size ~`t·log t`
/// still leaves the requested absolute accuracy.
fn magnitude_bits(t: &Float) -> u32 {
    let lt = log2_abs(t).max(1.0);
    (lt + lt.log2().max(0.0)).ceil() as u32 + 8
}

/// `θ(t)` for `t > 0`.
pub fn theta(t: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if !(t.is_finite() && *t > 0) {
        return Err(Error::invalid("theta requires t > 0"));
    }
    let wp = ctx.working_bits() + magnitude_bits(t);
    let lg = ln_gamma(&quarter_point(t, wp), wp)?;
    let ln_pi = Float::with_val(wp, Float::with_val(wp, Constant::Pi).ln_ref());
    let value = lg.im - Float::with_val(wp, t * &ln_pi) / 2u32;
    Ok(Float::with_val(ctx.working_bits(), value))
}

/// The three-term asymptotic form of `θ(t)` and an error envelope.
#[derive(Debug, Clone, PartialEq)]
pub struct ThetaAsymptotic {
    pub value: Float,
    pub error_bound: Float,
}

/// `(t/2)·log(t/2π) − t/2 − π/8` with envelope `1/(8t) + 1/t³`, for `t ≥ 10`.
///
/// Evaluated at the precision of `t` (at least 64 bits). Only used as a test oracle.
pub fn theta_asymptotic(t: &Float) -> Result<ThetaAsymptotic> {
    if !(t.is_finite() && *t >= 10) {
        return Err(Error::invalid("theta_asymptotic requires t >= 10"));
    }
    let p = t.prec().max(64);
    Ok(ThetaAsymptotic {
        value: theta_asymptotic_value(t, p),
        error_bound: Float::with_val(p, Float::with_val(p, t * 8u32).recip())
            + Float::with_val(p, Float::with_val(p, t.pow(3u32)).recip()),
    })
}

pub(crate) fn theta_asymptotic_value(t: &Float, p: u32) -> Float {
    let pi = Float::with_val(p, Constant::Pi);
    let log_term = Float::with_val(p, t / Float::with_val(p, &pi * 2u32)).ln();
    let half_t = Float::with_val(p, t / 2u32);
    Float::with_val(p, &half_t * &log_term) - &half_t - pi / 8u32
}

/// `θ'(t) ≈ log(t/2π)/2` at the precision of `t`.
pub fn theta_prime_asymptotic(t: &Float) -> Float {
    let p = t.prec().max(64);
    let pi = Float::with_val(p, Constant::Pi);
    Float::with_val(p, t / (pi * 2u32)).ln() / 2u32
}

/// `θ^(ν)(t)` for `ν = 0..=order`, `t > 0`.
///
/// For `ν ≥ 1`, `θ^(ν)(t) = Im((i/2)^ν · ψ^(ν−1)(1/4 + it/2))`, minus `(log π)/2` at `ν = 1`.
pub fn theta_jet(t: &Float, order: usize, ctx: &PrecisionContext) -> Result<ThetaJet> {
    if !(t.is_finite() && *t > 0) {
        return Err(Error::invalid("theta_jet requires t > 0"));
    }
    if order > MAX_JET_ORDER {
        return Err(Error::invalid(format!("jet order {order} exceeds {MAX_JET_ORDER}")));
    }
    let bits = ctx.working_bits();
    let mut values = Vec::with_capacity(order + 1);
    values.push(theta(t, ctx)?);
    if order >= 1 {
        let wp = bits + 16;
        let psi = polygamma_jet(&quarter_point(t, wp), order - 1, wp)?;
        for (m, p) in psi.iter().enumerate() {
            let nu = m as u32 + 1;
            // (i/2)^ν ψ: rotate by i^ν, then scale by 2^-ν exactly
            let rotated = p.mul_i_pow(nu);
            let mut v = Float::with_val(bits, &rotated.im >> nu as i32);
            if nu == 1 {
                let ln_pi = Float::with_val(wp, Float::with_val(wp, Constant::Pi).ln_ref());
                v = Float::with_val(bits, Float::with_val(wp, &rotated.im / 2u32) - ln_pi / 2u32);
            }
            values.push(v);
        }
    }
    Ok(ThetaJet { t: t.clone(), values })
}

/// `(ν−2)!/(2t^{ν−1}) + 2·ν!/(√ν·t^ν)` for `ν ≥ 2`, `t > 0`, at the precision of `t`
/// (at least 64 bits).
pub fn theta_deriv_bound(t: &Float, nu: u32) -> Result<Float> {
    if nu < 2 {
        return Err(Error::invalid("theta_deriv_bound requires nu >= 2"));
    }
    if !(t.is_finite() && *t > 0) {
        return Err(Error::invalid("theta_deriv_bound requires t > 0"));
    }
    let p = t.prec().max(64);
    let first = Float::with_val(p, Float::factorial(nu - 2)) / (Float::with_val(p, t.pow(nu - 1)) * 2u32);
    let second = Float::with_val(p, Float::factorial(nu)) * 2u32
        / (Float::with_val(p, Float::sqrt_u(nu)) * Float::with_val(p, t.pow(nu)));
    Ok(first + second)
}
