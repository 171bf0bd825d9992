//! Even-index Bernoulli numbers `B_{2l}`.
//!
//! Small indices come from the exact rational recurrence
//! `Σ_{j=0}^{n} C(n+1, j) B_j = 0`; larger ones from
//! `B_{2l} = (-1)^{l-1} · 2·(2l)! · ζ(2l) / (2π)^{2l}`.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use super::PrecisionContext;
use crate::error::{Error, Result};

/// Largest `l` served from the exact rational table.
pub const EXACT_MAX_L: u32 = 60;
/// Largest `l` accepted by the public [`bernoulli_even`].
pub const PUBLIC_MAX_L: u32 = 200;

fn exact_table() -> &'static [Rational] {
    static TABLE: OnceLock<Vec<Rational>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let n_max = 2 * EXACT_MAX_L as usize;
        let mut b: Vec<Rational> = Vec::with_capacity(n_max + 1);
        b.push(Rational::from(1));
        for n in 1..=n_max {
            let mut acc = Rational::new();
            let mut binom = Integer::from(1); // C(n+1, 0)
            for (j, bj) in b.iter().enumerate() {
                let mut term = bj.clone();
                term *= &binom;
                acc += term;
                binom *= (n + 1 - j) as u32;
                binom /= (j + 1) as u32;
            }
            acc /= Integer::from(n + 1);
            b.push(-acc);
        }
        b
    })
}

/// `B_{2l}` as an exact rational, `1 ≤ l ≤ 60`.
pub fn bernoulli_even_exact(l: u32) -> Result<Rational> {
    if !(1..=EXACT_MAX_L).contains(&l) {
        return Err(Error::invalid(format!(
            "exact Bernoulli index l = {l} outside 1..={EXACT_MAX_L}"
        )));
    }
    Ok(exact_table()[2 * l as usize].clone())
}

/// `B_{2l}` from `ζ(2l)`, any `l ≥ 1`.
pub fn bernoulli_even_via_zeta(l: u32, prec: u32) -> Float {
    let wp = prec + 32 + (l as f64).log2().ceil() as u32;
    let two_l = 2 * l;
    let zeta = Float::with_val(wp, Float::zeta_u(two_l));
    let fact = Float::with_val(wp, Float::factorial(two_l));
    let two_pi = Float::with_val(wp, Constant::Pi) * 2u32;
    let denom = two_pi.pow(two_l);
    let mut v = zeta * fact * 2u32 / denom;
    if l.is_multiple_of(2) {
        v = -v;
    }
    Float::with_val(prec, v)
}

fn bernoulli_float(l: u32, prec: u32) -> Float {
    if l <= EXACT_MAX_L {
        Float::with_val(prec, &exact_table()[2 * l as usize])
    } else {
        bernoulli_even_via_zeta(l, prec)
    }
}

/// `B_{2l}` to working precision, `1 ≤ l ≤ 200`.
pub fn bernoulli_even(l: u32, ctx: &PrecisionContext) -> Result<Float> {
    if !(1..=PUBLIC_MAX_L).contains(&l) {
        return Err(Error::invalid(format!(
            "Bernoulli index l = {l} outside 1..={PUBLIC_MAX_L}"
        )));
    }
    Ok(bernoulli_float(l, ctx.working_bits()))
}

/// Cached `[B_2, B_4, …, B_{2·max_l}]` at `prec` bits (entry `l-1` is `B_{2l}`).
pub fn bernoulli_table(max_l: u32, prec: u32) -> Arc<Vec<Float>> {
    static CACHE: OnceLock<Mutex<HashMap<u32, Arc<Vec<Float>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().expect("bernoulli cache poisoned");
    if let Some(t) = guard.get(&prec) {
        if t.len() >= max_l as usize {
            return Arc::clone(t);
        }
    }
    let existing = guard.get(&prec).map(|t| t.as_slice().to_vec()).unwrap_or_default();
    let mut table = existing;
    // grow geometrically so repeated small extensions stay cheap
    let want = (max_l as usize).max(table.len() * 2).max(16);
    for l in table.len() + 1..=want {
        table.push(bernoulli_float(l as u32, prec));
    }
    let table = Arc::new(table);
    guard.insert(prec, Arc::clone(&table));
    table
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_values() {
        assert_eq!(bernoulli_even_exact(1).unwrap(), Rational::from((1, 6)));
        assert_eq!(bernoulli_even_exact(2).unwrap(), Rational::from((-1, 30)));
        assert_eq!(bernoulli_even_exact(6).unwrap(), Rational::from((-691, 2730)));
        assert_eq!(bernoulli_even_exact(7).unwrap(), Rational::from((7, 6)));
    }

    #[test]
    fn odd_indices_vanish_in_recurrence() {
        let t = exact_table();
        assert_eq!(t[1], Rational::from((-1, 2)));
        for n in (3..t.len()).step_by(2) {
            assert_eq!(t[n], 0, "B_{n}");
        }
    }

    #[test]
    fn zeta_route_agrees_with_exact() {
        let ctx = PrecisionContext::with_working_bits(300).unwrap();
        for l in 1..=30 {
            let exact = Float::with_val(300, &bernoulli_even_exact(l).unwrap());
            let z = bernoulli_even_via_zeta(l, 300);
            let tol = Float::with_val(300, exact.abs_ref()) >> (ctx.working_bits() as i32 - 4);
            assert!(Float::with_val(300, &exact - &z).abs() <= tol, "l = {l}");
        }
    }

    #[test]
    fn alternating_signs() {
        let ctx = PrecisionContext::with_working_bits(128).unwrap();
        for l in 1..=60 {
            let b = bernoulli_even(l, &ctx).unwrap();
            assert_eq!(b.is_sign_positive(), l % 2 == 1, "l = {l}");
        }
        assert!(bernoulli_even(0, &ctx).is_err());
        assert!(bernoulli_even(201, &ctx).is_err());
        assert!(bernoulli_even(200, &ctx).unwrap().is_sign_negative());
    }

    #[test]
    fn table_extends() {
        let a = bernoulli_table(5, 96);
        let b = bernoulli_table(70, 96);
        assert!(b.len() >= 70);
        assert_eq!(a[3], b[3]);
        assert_eq!(b[0], Float::with_val(96, 1) / 6u32);
    }
}
