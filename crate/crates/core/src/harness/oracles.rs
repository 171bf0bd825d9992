//! Independent numerical oracles used by the verification suites and tests.
//!
//! None of these share code paths with the evaluators they check beyond basic
//! MPFR arithmetic.

use rug::ops::Pow;
use rug::Float;

use crate::error::{Error, Result};
use crate::numerics::{bernoulli_even_exact, BigComplex};

const EXACT_MAX_L: u32 = 60;

/// `ν`-th central difference quotient of `f` at `x` with step `h`.
///
/// Nodes sit at `x + (ν/2 − j)·h` for `j = 0..=ν`, so odd orders use half steps.
pub fn central_difference<F>(f: &F, x: &Float, order: u32, h: &Float) -> Result<Float>
where
    F: Fn(&Float) -> Result<Float>,
{
    let p = x.prec();
    let half_nu = Float::with_val(p, order) / 2u32;
    let mut acc = Float::new(p);
    let mut binom = Float::with_val(p, 1);
    for j in 0..=order {
        let offset = Float::with_val(p, &half_nu - j) * h;
        let node = Float::with_val(p, x + &offset);
        let term = Float::with_val(p, f(&node)? * &binom);
        if j % 2 == 0 {
            acc += term;
        } else {
            acc -= term;
        }
        binom *= order - j;
        binom /= j + 1;
    }
    Ok(acc / Float::with_val(p, h.pow(order)))
}

/// One Richardson step on [`central_difference`]: `(4·D(h/2) − D(h)) / 3`.
pub fn richardson_derivative<F>(f: F, x: &Float, order: u32, h: &Float) -> Result<Float>
where
    F: Fn(&Float) -> Result<Float>,
{
    if order == 0 {
        return f(x);
    }
    let coarse = central_difference(&f, x, order, h)?;
    let half = Float::with_val(h.prec(), h / 2u32);
    let fine = central_difference(&f, x, order, &half)?;
    Ok((fine * 4u32 - coarse) / 3u32)
}

/// Tanh-sinh quadrature of a smooth `f` on `[a, b]` to about `2^-bits` relative.
///
/// The step is halved until two successive levels agree.
pub fn tanh_sinh<F>(f: F, a: &Float, b: &Float, bits: u32) -> Result<Float>
where
    F: Fn(&Float) -> Result<Float>,
{
    let p = bits + 32;
    let width = Float::with_val(p, b - a);
    let half_pi = Float::with_val(p, rug::float::Constant::Pi) / 2u32;
    let weight_floor = Float::with_val(p, &width >> p as i32);

    let level = |h: &Float| -> Result<Float> {
        let mut sum = Float::new(p);
        let mut j = 0i64;
        loop {
            let tau = Float::with_val(p, h * j);
            let y = Float::with_val(p, tau.sinh_ref()) * &half_pi;
            let cosh_y = Float::with_val(p, y.cosh_ref());
            let weight = Float::with_val(p, tau.cosh_ref()) * &half_pi / cosh_y.square() * &width / 2u32;
            // distance from the nearer endpoint, computed without cancellation
            let dist = Float::with_val(p, &width / ((Float::with_val(p, y.abs_ref()) * 2u32).exp() + 1u32));
            let mut step = Float::new(p);
            let nodes: &[Float] = if j == 0 {
                &[Float::with_val(p, a + Float::with_val(p, &width / 2u32))]
            } else {
                &[Float::with_val(p, b - &dist), Float::with_val(p, a + &dist)]
            };
            for x in nodes {
                step += f(x)? * &weight;
            }
            sum += &step;
            let small = Float::with_val(p, step.abs_ref()) <= Float::with_val(p, sum.abs_ref()) >> p as i32;
            if j > 0 && small && weight <= weight_floor {
                break;
            }
            j += 1;
        }
        Ok(sum * h)
    };

    let mut h = Float::with_val(p, 0.5);
    let mut prev = level(&h)?;
    for _ in 0..14 {
        h /= 2u32;
        let cur = level(&h)?;
        let diff = Float::with_val(p, &cur - &prev).abs();
        if diff <= Float::with_val(p, cur.abs_ref()) >> bits as i32 {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::PrecisionInfeasible {
        achieved_log2: f64::NAN,
        target: bits as i32,
    })
}

/// `ζ(σ + it)` by a textbook Euler–Maclaurin evaluation at `bits` precision:
/// `Σ_{n<N} n^{−s} + N^{1−s}/(s−1) + N^{−s}/2 + Σ_k B_{2k}/(2k)!·(s)_{2k−1}·N^{−s−2k+1}`
/// with `N = ⌈|t|⌉ + 50` and exact Bernoulli numbers.
pub fn zeta_euler_maclaurin(sigma: f64, t: &Float, bits: u32) -> Result<BigComplex> {
    let p = bits + 32;
    let s = BigComplex::new(Float::with_val(p, sigma), Float::with_val(p, t));
    let n_cut = Float::with_val(64, t.abs_ref()).ceil().to_f64() as u64 + 50;
    let minus_s = s.neg();
    let mut sum = BigComplex::zero(p);
    for n in 1..n_cut {
        let ln_n = Float::with_val(p, n).ln();
        sum.add_assign(&minus_s.mul_real(&ln_n).exp());
    }
    let nf = Float::with_val(p, n_cut);
    let ln_cut = Float::with_val(p, nf.ln_ref());
    let cut_pow = minus_s.mul_real(&ln_cut).exp(); // N^{−s}
    let s_minus_1 = s.add_real(&Float::with_val(p, -1));
    sum.add_assign(&cut_pow.mul_real(&nf).div(&s_minus_1));
    sum.add_assign(&cut_pow.div_real(&Float::with_val(p, 2)));

    let tol = Float::with_val(p, sum.abs()) >> (bits as i32 + 8);
    let inv_n2 = Float::with_val(p, nf.square_ref()).recip();
    // (s)_{2k−1}·N^{−s−2k+1}, starting at k = 1: s·N^{−s−1}
    let mut rising = s.mul(&cut_pow).div_real(&nf);
    let mut fact = Float::with_val(p, 2);
    for k in 1..=EXACT_MAX_L {
        let b = Float::with_val(p, &bernoulli_even_exact(k)?);
        let term = rising.mul_real(&Float::with_val(p, &b / &fact));
        sum.add_assign(&term);
        if term.abs() < tol {
            return Ok(sum.with_prec(bits));
        }
        let j = 2 * k - 1; // advance (s)_{2k−1} → (s)_{2k+1}
        rising = rising
            .mul(&s.add_real(&Float::with_val(p, j)))
            .mul(&s.add_real(&Float::with_val(p, j + 1)))
            .mul_real(&inv_n2);
        fact *= 2 * k + 1;
        fact *= 2 * k + 2;
    }
    Err(Error::PrecisionInfeasible {
        achieved_log2: f64::NAN,
        target: bits as i32,
    })
}

/// Bisection for a sign change of `f` in `[a, b]` down to width `tol`.
pub fn bisect_root<F>(f: F, a: &Float, b: &Float, tol: f64) -> Result<Float>
where
    F: Fn(&Float) -> Result<Float>,
{
    let p = a.prec();
    let mut lo = a.clone();
    let mut hi = b.clone();
    let mut f_lo = f(&lo)?;
    let f_hi = f(&hi)?;
    if f_lo.is_sign_positive() == f_hi.is_sign_positive() {
        return Err(Error::invalid("bisection interval does not bracket a sign change"));
    }
    while Float::with_val(p, &hi - &lo) > tol {
        let mid = Float::with_val(p, &lo + &hi) / 2u32;
        let f_mid = f(&mid)?;
        if f_mid.is_zero() {
            return Ok(mid);
        }
        if f_mid.is_sign_positive() == f_lo.is_sign_positive() {
            lo = mid;
            f_lo = f_mid;
        } else {
            hi = mid;
        }
    }
    Ok(Float::with_val(p, &lo + &hi) / 2u32)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn differences_of_exp() {
        let p = 256;
        let x = Float::with_val(p, 0.7);
        let h = Float::with_val(p, 1e-4);
        let want = Float::with_val(p, x.exp_ref());
        for order in 1..=6 {
            let d = richardson_derivative(|y: &Float| Ok(Float::with_val(p, y.exp_ref())), &x, order, &h).unwrap();
            let rel = (Float::with_val(p, &d - &want) / &want).abs().to_f64();
            assert!(rel < 1e-12, "order {order}: {rel}");
        }
    }

    #[test]
    fn quadrature_of_polynomial_and_exp() {
        let p = 160;
        let zero = Float::new(p);
        let one = Float::with_val(p, 1);
        let cube = tanh_sinh(|x: &Float| Ok(Float::with_val(p, x.pow(3u32))), &zero, &one, 128).unwrap();
        assert!(Float::with_val(p, cube - 0.25f64).abs() < 1e-35);
        let e = tanh_sinh(|x: &Float| Ok(Float::with_val(p, x.exp_ref())), &zero, &one, 128).unwrap();
        let want = Float::with_val(p, one.exp_ref()) - 1u32;
        assert!(Float::with_val(p, e - want).abs() < 1e-35);
    }

    #[test]
    fn zeta_known_values() {
        // ζ(2) = π²/6 on the real axis
        let z = zeta_euler_maclaurin(2.0, &Float::with_val(128, 0), 128).unwrap();
        let pi = Float::with_val(128, rug::float::Constant::Pi);
        let want = Float::with_val(128, pi.square_ref()) / 6u32;
        assert!(Float::with_val(128, &z.re - &want).abs() < 1e-35);
        assert!(z.im.is_zero());
        // near the first zero on the critical line
        let z = zeta_euler_maclaurin(0.5, &Float::with_val(128, 14.134725141734693), 128).unwrap();
        assert!(z.abs() < 1e-13);
    }

    #[test]
    fn bisection_finds_sqrt_two() {
        let p = 128;
        let r = bisect_root(
            |x: &Float| Ok(Float::with_val(p, x.square_ref()) - 2u32),
            &Float::with_val(p, 1),
            &Float::with_val(p, 2),
            1e-30,
        )
        .unwrap();
        assert!((r.to_f64() - 2f64.sqrt()).abs() < 1e-15);
    }
}
