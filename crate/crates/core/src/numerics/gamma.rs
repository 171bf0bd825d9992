//! Complex log-gamma and polygamma on the right half plane.
//!
//! Both use the Stirling series after shifting the argument to `|w| ≥ R` with the
//! recurrence `Γ(z+1) = zΓ(z)`. With `2π·R ≥ 8·(bits + m + 16)` consecutive
//! series terms shrink by at least a factor 64, so about `bits/6` Bernoulli
//! numbers suffice.

use std::f64::consts::PI;

use rug::float::Constant;
use rug::Float;

use super::{bernoulli_table, log2_abs, BigComplex};
use crate::error::{Error, Result};

const GUARD: u32 = 32;

fn shift_count(z: &BigComplex, bits: u32, m_max: usize) -> u64 {
    let radius = 4.0 * (f64::from(bits) + m_max as f64 + 16.0) / PI;
    let re = z.re.to_f64();
    let im = z.im.to_f64().abs();
    if re.hypot(im) >= radius || im >= radius {
        return 0;
    }
    ((radius * radius - im * im).sqrt() - re).ceil().max(0.0) as u64
}

fn check_half_plane(z: &BigComplex) -> Result<()> {
    if !z.is_finite() || !z.re.is_sign_positive() || z.re.is_zero() {
        return Err(Error::invalid("log-gamma/polygamma require Re(z) > 0"));
    }
    Ok(())
}

fn max_terms(wp: u32) -> u32 {
    wp / 4 + 16
}

/// Principal branch of `log Γ(z)` for `Re z > 0`, relative error about `2^-prec`.
pub fn ln_gamma(z: &BigComplex, prec: u32) -> Result<BigComplex> {
    check_half_plane(z)?;
    let wp = prec + GUARD;
    let z = z.with_prec(wp);
    let n = shift_count(&z, wp, 0);
    let w = z.add_real(&Float::with_val(wp, n));

    let ln_w = w.ln();
    let half = Float::with_val(wp, 0.5);
    let mut result = w.add_real(&Float::with_val(wp, -&half)).mul(&ln_w).sub(&w);
    let ln_two_pi = Float::with_val(wp, Float::with_val(wp, Constant::Pi) * 2u32).ln() / 2u32;
    result = result.add_real(&ln_two_pi);

    let scale = log2_abs(&result.abs()).max(0.0);
    let inv = w.recip();
    let inv2 = inv.mul(&inv);
    let mut pow = inv.clone(); // w^{-(2j-1)}
    let bern = bernoulli_table(max_terms(wp), wp);
    let mut converged = false;
    for j in 1..=max_terms(wp) {
        let two_j = 2 * j;
        let coef = Float::with_val(wp, &bern[j as usize - 1] / (two_j * (two_j - 1)));
        let term = pow.mul_real(&coef);
        result.add_assign(&term);
        if log2_abs(&term.abs()) < scale - f64::from(wp) {
            converged = true;
            break;
        }
        pow = pow.mul(&inv2);
    }
    if !converged {
        return Err(Error::PrecisionInfeasible {
            achieved_log2: f64::NAN,
            target: prec as i32,
        });
    }

    // log Γ(z) = log Γ(z+n) − Σ_{i<n} log(z+i); each z+i lies in the right half
    // plane so the principal logs add up to the principal branch.
    let mut i = 0;
    while i < n {
        let zi = z.add_real(&Float::with_val(wp, i));
        result = result.sub(&zi.ln());
        i += 1;
    }
    Ok(result.with_prec(prec))
}

/// `[ψ(z), ψ'(z), …, ψ^(max_m)(z)]` for `Re z > 0`, each with relative error about `2^-prec`.
pub fn polygamma_jet(z: &BigComplex, max_m: usize, prec: u32) -> Result<Vec<BigComplex>> {
    check_half_plane(z)?;
    let wp = prec + GUARD + (max_m as f64 + 1.0).log2().ceil() as u32;
    let z = z.with_prec(wp);
    let n = shift_count(&z, wp, max_m);
    let w = z.add_real(&Float::with_val(wp, n));
    let inv = w.recip();
    let inv2 = inv.mul(&inv);
    let bern = bernoulli_table(max_terms(wp), wp);
    let half = Float::with_val(wp, 0.5);

    let mut out = Vec::with_capacity(max_m + 1);

    // m = 0: ψ(w) = log w − 1/(2w) − Σ B_{2j} / (2j · w^{2j})
    {
        let mut acc = w.ln().sub(&inv.mul_real(&half));
        let scale = log2_abs(&acc.abs());
        let mut pow = inv2.clone();
        let mut converged = false;
        for j in 1..=max_terms(wp) {
            let coef = Float::with_val(wp, &bern[j as usize - 1] / (2 * j));
            let term = pow.mul_real(&coef);
            acc = acc.sub(&term);
            if log2_abs(&term.abs()) < scale - f64::from(wp) {
                converged = true;
                break;
            }
            pow = pow.mul(&inv2);
        }
        if !converged {
            return Err(Error::PrecisionInfeasible {
                achieved_log2: f64::NAN,
                target: prec as i32,
            });
        }
        out.push(acc);
    }

    // m ≥ 1: ψ^(m)(w) = (−1)^{m+1} [ (m−1)!/w^m + m!/(2w^{m+1})
    //                                + Σ_j B_{2j} (2j+m−1)!/(2j)! / w^{2j+m} ]
    let mut inv_pow_m = inv.clone(); // w^{-m}
    let mut fact_m_minus_1 = Float::with_val(wp, 1); // (m-1)!
    for m in 1..=max_m {
        let mf = m as u32;
        let fact_m = Float::with_val(wp, &fact_m_minus_1 * mf);
        let lead = inv_pow_m.mul_real(&fact_m_minus_1);
        let mut acc = lead.add(&inv_pow_m.mul(&inv).mul_real(&Float::with_val(wp, &fact_m * &half)));
        let scale = log2_abs(&lead.abs());
        // ratio = (2j+m−1)!/(2j)! starting at j = 1: (m+1)!/2
        let mut ratio = Float::with_val(wp, &fact_m * (mf + 1)) / 2u32;
        let mut pow = inv_pow_m.mul(&inv2); // w^{-(2j+m)}
        let mut converged = false;
        for j in 1..=max_terms(wp) {
            let coef = Float::with_val(wp, &bern[j as usize - 1] * &ratio);
            let term = pow.mul_real(&coef);
            acc.add_assign(&term);
            if log2_abs(&term.abs()) < scale - f64::from(wp) {
                converged = true;
                break;
            }
            let a = 2 * j + mf; // next ratio multiplies by (2j+m)(2j+m+1)/((2j+1)(2j+2))
            ratio *= a;
            ratio *= a + 1;
            ratio /= 2 * j + 1;
            ratio /= 2 * j + 2;
            pow = pow.mul(&inv2);
        }
        if !converged {
            return Err(Error::PrecisionInfeasible {
                achieved_log2: f64::NAN,
                target: prec as i32,
            });
        }
        if m % 2 == 0 {
            acc = acc.neg();
        }
        out.push(acc);
        inv_pow_m = inv_pow_m.mul(&inv);
        fact_m_minus_1 = fact_m;
    }

    // ψ^(m)(z) = ψ^(m)(z+n) − (−1)^m m! Σ_{i<n} (z+i)^{−m−1}
    if n > 0 {
        let mut shifts: Vec<BigComplex> = (0..=max_m).map(|_| BigComplex::zero(wp)).collect();
        let mut i = 0u64;
        while i < n {
            let r = z.add_real(&Float::with_val(wp, i)).recip();
            let mut p = r.clone();
            for s in shifts.iter_mut() {
                s.add_assign(&p);
                p = p.mul(&r);
            }
            i += 1;
        }
        let mut fact = Float::with_val(wp, 1);
        for (m, (psi, s)) in out.iter_mut().zip(&shifts).enumerate() {
            if m > 0 {
                fact *= m as u32;
            }
            let corr = s.mul_real(&fact);
            *psi = if m % 2 == 0 { psi.sub(&corr) } else { psi.add(&corr) };
        }
    }

    Ok(out.into_iter().map(|v| v.with_prec(prec)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cx(re: f64, im: f64, p: u32) -> BigComplex {
        BigComplex::new(Float::with_val(p, re), Float::with_val(p, im))
    }

    fn rel_err(a: &BigComplex, b: &BigComplex) -> f64 {
        let d = a.sub(b).abs();
        (d / b.abs()).to_f64()
    }

    #[test]
    fn real_axis_matches_mpfr() {
        let p = 200;
        for &x in &[0.25, 0.5, 1.0, 3.7, 25.0, 1000.5] {
            let got = ln_gamma(&cx(x, 0.0, p), p).unwrap();
            let want = Float::with_val(p, Float::with_val(p, x).ln_gamma());
            let err = Float::with_val(p, &got.re - &want).abs();
            assert!(err < Float::with_val(p, 1) >> (p as i32 - 8), "x = {x}: {err}");
            assert!(got.im.is_zero() || got.im.clone().abs() < Float::with_val(p, 1) >> 190);
        }
    }

    #[test]
    fn critical_line_modulus() {
        // |Γ(1/2 + iy)|² = π / cosh(πy)
        let p = 256;
        for &y in &[0.5, 7.0, 60.0] {
            let g = ln_gamma(&cx(0.5, y, p), p).unwrap();
            let pi = Float::with_val(p, Constant::Pi);
            let cosh = Float::with_val(p, &pi * y).cosh();
            let want = (Float::with_val(p, pi.ln_ref()) - cosh.ln()) / 2u32;
            let err = Float::with_val(p, &g.re - &want).abs().to_f64();
            assert!(err < 1e-70, "y = {y}: {err}");
        }
    }

    #[test]
    fn recurrence_holds_off_axis() {
        let p = 256;
        let z = cx(0.25, 5000.0, p);
        let a = ln_gamma(&z.add_real(&Float::with_val(p, 1)), p).unwrap();
        let b = ln_gamma(&z, p).unwrap().add(&z.ln());
        assert!(rel_err(&a, &b) < 1e-70);
    }

    #[test]
    fn polygamma_at_one() {
        let p = 256;
        let jet = polygamma_jet(&cx(1.0, 0.0, p), 6, p).unwrap();
        let euler = Float::with_val(p, Constant::Euler);
        assert!(Float::with_val(p, &jet[0].re + &euler).abs() < 1e-70);
        for m in 1..=6u32 {
            // ψ^(m)(1) = (−1)^{m+1} m! ζ(m+1)
            let mut want = Float::with_val(p, Float::factorial(m)) * Float::with_val(p, Float::zeta_u(m + 1));
            if m % 2 == 0 {
                want = -want;
            }
            let err = Float::with_val(p, &jet[m as usize].re - &want).abs() / want.abs();
            assert!(err < 1e-70, "m = {m}");
        }
    }

    #[test]
    fn polygamma_is_derivative_of_ln_gamma() {
        // central difference of log Γ along the real direction
        let p = 320;
        let z = cx(0.25, 50.0, p);
        let h = Float::with_val(p, 1) >> 40;
        let plus = ln_gamma(&z.add_real(&h), p).unwrap();
        let minus = ln_gamma(&z.add_real(&Float::with_val(p, -&h)), p).unwrap();
        let fd = plus.sub(&minus).div_real(&Float::with_val(p, &h * 2u32));
        let jet = polygamma_jet(&z, 2, p).unwrap();
        assert!(rel_err(&fd, &jet[0]) < 1e-20);
        // ψ'' via recurrence consistency: ψ^(m)(z+1) = ψ^(m)(z) + (−1)^m m! z^{−m−1}
        let shifted = polygamma_jet(&z.add_real(&Float::with_val(p, 1)), 2, p).unwrap();
        let corr = z.recip().pow_u(3).mul_real(&Float::with_val(p, 2));
        assert!(rel_err(&shifted[2], &jet[2].add(&corr)) < 1e-80);
    }

    #[test]
    fn rejects_left_half_plane() {
        assert!(ln_gamma(&cx(-0.5, 1.0, 64), 64).is_err());
        assert!(polygamma_jet(&cx(0.0, 1.0, 64), 2, 64).is_err());
    }
}
