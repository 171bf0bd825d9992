//! Arbitrary-precision arithmetic shared by every other module.
//!
//! All big-float work goes through MPFR (via `rug`). Nothing here keeps an
//! ambient precision: every operation receives a [`PrecisionContext`] or an
//! explicit bit count.

mod bernoulli;
mod complex;
mod gamma;
mod sum;
mod text;

pub use bernoulli::{bernoulli_even, bernoulli_even_exact, bernoulli_even_via_zeta, bernoulli_table};
pub use complex::BigComplex;
pub use gamma::{ln_gamma, polygamma_jet};
pub use sum::{CompensatedComplexSum, CompensatedSum};
pub use text::{format_complex, format_real, parse_complex, parse_real, serialized_digits};

use rug::float::Constant;
use rug::Float;

use crate::error::{Error, Result};

/// Arbitrary-precision real number.
pub type BigReal = Float;

/// Working-precision policy for one computation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PrecisionContext {
    working_bits: u32,
    guard_bits: u32,
    target_abs_error_exponent: i32,
}

impl PrecisionContext {
    pub const MIN_WORKING_BITS: u32 = 64;
    pub const DEFAULT_GUARD_BITS: u32 = 64;
    pub const DEFAULT_TARGET: i32 = 64;

    pub fn new(working_bits: u32, guard_bits: u32, target_abs_error_exponent: i32) -> Result<Self> {
        if guard_bits == 0 {
            return Err(Error::invalid("guard_bits must be positive"));
        }
        if working_bits < Self::MIN_WORKING_BITS {
            return Err(Error::invalid(format!(
                "working_bits {working_bits} below minimum {}",
                Self::MIN_WORKING_BITS
            )));
        }
        if i64::from(working_bits) < i64::from(target_abs_error_exponent) + i64::from(guard_bits) {
            return Err(Error::invalid(format!(
                "working_bits {working_bits} < target {target_abs_error_exponent} + guard {guard_bits}"
            )));
        }
        Ok(PrecisionContext {
            working_bits,
            guard_bits,
            target_abs_error_exponent,
        })
    }

    /// A context with the default guard and every remaining bit spent on the target.
    pub fn with_working_bits(working_bits: u32) -> Result<Self> {
        let guard = Self::DEFAULT_GUARD_BITS;
        Self::new(working_bits, guard, working_bits as i32 - guard as i32)
    }

    pub fn working_bits(&self) -> u32 {
        self.working_bits
    }

    pub fn guard_bits(&self) -> u32 {
        self.guard_bits
    }

    pub fn target(&self) -> i32 {
        self.target_abs_error_exponent
    }

    /// Same target, twice the working bits. Used for precision escalation.
    pub fn doubled(&self) -> Self {
        PrecisionContext {
            working_bits: self.working_bits * 2,
            ..*self
        }
    }

    /// `2^-target`
    pub fn target_error(&self) -> Float {
        Float::with_val(self.working_bits, 1) >> self.target_abs_error_exponent
    }

    pub fn real<T>(&self, v: T) -> Float
    where
        Float: rug::Assign<T>,
    {
        Float::with_val(self.working_bits, v)
    }

    pub fn zero(&self) -> Float {
        Float::new(self.working_bits)
    }

    pub fn pi(&self) -> Float {
        Float::with_val(self.working_bits, Constant::Pi)
    }
}

/// Leading term of the asymptotic expansion of θ'(t): `log(t/2π)/2`.
pub fn theta_prime_asymptotic_f64(t: f64) -> f64 {
    0.5 * (t / (2.0 * std::f64::consts::PI)).ln()
}

/// Precision plan for evaluating `Z^(k)(t)` with the default absolute target of `2^-64`.
pub fn context_for(t: &Float, k: u32) -> Result<PrecisionContext> {
    context_for_target(t, k, PrecisionContext::DEFAULT_TARGET)
}

/// Precision plan for `Z^(k)(t)`: the target plus enough bits that a quantity of size
/// `k!·θ'(t)^k` (bounded via `(k+2)^k·(1+θ')^k`) keeps the target absolute accuracy.
pub fn context_for_target(t: &Float, k: u32, target: i32) -> Result<PrecisionContext> {
    let tf = t.to_f64();
    if tf.is_nan() || tf < 10.0 {
        return Err(Error::invalid(format!("context_for requires t >= 10, got {tf}")));
    }
    let log_t = tf.ln();
    let k_max = 10.0 * log_t * log_t;
    if f64::from(k) > k_max {
        return Err(Error::invalid(format!(
            "k = {k} exceeds 10·(log t)^2 = {k_max:.1}; split the computation"
        )));
    }
    if target < 0 {
        return Err(Error::invalid("target exponent must be non-negative"));
    }
    let kf = f64::from(k);
    let growth = (kf * (1.0 + theta_prime_asymptotic_f64(tf)).log2()).ceil() as u32;
    let t_bits = tf.log2().ceil() as u32;
    let fact_bits = (kf * (kf + 2.0).log2()).ceil() as u32;
    let guard = PrecisionContext::DEFAULT_GUARD_BITS;
    let bits = target as u32 + growth + t_bits + fact_bits + guard;
    PrecisionContext::new(bits, guard, target)
}

/// `log2 |x|` as an f64, `-inf` for zero. Cheap magnitude estimate for error planning.
pub(crate) fn log2_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log2() + f64::from(e)
}
