//! Pochhammer symbols, signed Stirling numbers of the first kind, the lower
//! incomplete gamma series, and the Faà di Bruno coefficients `q_p(t)`.

use std::sync::{Arc, OnceLock, RwLock};

use rug::ops::Pow;
use rug::{Float, Integer, Rational};

use crate::error::{Error, Result};
use crate::numerics::{BigComplex, PrecisionContext};
use crate::theta::ThetaJet;

/// `(x)_n = x(x+1)⋯(x+n−1)`, `(x)_0 = 1`.
pub fn pochhammer(x: &Float, n: u32) -> Float {
    let mut acc = Float::with_val(x.prec(), 1);
    for i in 0..n {
        acc *= Float::with_val(x.prec(), x + i);
    }
    acc
}

/// Complex [`pochhammer`].
pub fn pochhammer_complex(x: &BigComplex, n: u32) -> BigComplex {
    let p = x.prec();
    let mut acc = BigComplex::one(p);
    for i in 0..n {
        acc = acc.mul(&x.add_real(&Float::with_val(p, i)));
    }
    acc
}

/// Exact [`pochhammer`] on rationals.
pub fn pochhammer_rational(x: &Rational, n: u32) -> Rational {
    let mut acc = Rational::from(1);
    for i in 0..n {
        acc *= Rational::from(x + i);
    }
    acc
}

/// Append-only triangular table of signed Stirling numbers `c_{k,l} = S_k^l`.
#[derive(Debug, Default)]
pub struct StirlingCache {
    rows: RwLock<Vec<Arc<[Integer]>>>,
}

impl StirlingCache {
    pub const MAX_ORDER: usize = 400;

    pub fn new() -> Self {
        StirlingCache::default()
    }

    pub fn global() -> &'static StirlingCache {
        static CACHE: OnceLock<StirlingCache> = OnceLock::new();
        CACHE.get_or_init(StirlingCache::new)
    }

    /// Row `[S_k^0, …, S_k^k]`.
    pub fn row(&self, k: usize) -> Result<Arc<[Integer]>> {
        if k > Self::MAX_ORDER {
            return Err(Error::invalid(format!(
                "Stirling order {k} exceeds {}",
                Self::MAX_ORDER
            )));
        }
        if let Some(r) = self.rows.read().expect("stirling cache poisoned").get(k) {
            return Ok(Arc::clone(r));
        }
        let mut rows = self.rows.write().expect("stirling cache poisoned");
        if rows.is_empty() {
            rows.push(Arc::from(vec![Integer::from(1)]));
        }
        while rows.len() <= k {
            let n = rows.len() - 1;
            let prev = &rows[n];
            // c_{n+1,l} = c_{n,l−1} − n·c_{n,l}
            let next: Vec<Integer> = (0..=n + 1)
                .map(|l| {
                    let mut v = Integer::new();
                    if l >= 1 {
                        v += &prev[l - 1];
                    }
                    if l <= n {
                        v -= Integer::from(&prev[l] * n as u32);
                    }
                    v
                })
                .collect();
            rows.push(Arc::from(next));
        }
        Ok(Arc::clone(&rows[k]))
    }

    pub fn get(&self, k: usize, l: usize) -> Result<Integer> {
        if l > k {
            return Ok(Integer::new());
        }
        Ok(self.row(k)?[l].clone())
    }

    /// Number of rows currently stored.
    pub fn len(&self) -> usize {
        self.rows.read().expect("stirling cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Signed Stirling number of the first kind `S_k^l` (zero for `l > k`), `k ≤ 400`.
pub fn stirling_first_signed(k: usize, l: usize) -> Result<Integer> {
    StirlingCache::global().get(k, l)
}

/// `γ(m+1, x) = m!·e^{−x}·Σ_{n>m} x^n/n!` for `x > 0`.
///
/// Summation stops once the term ratio `x/n` is below 1/2 and the geometric tail
/// majorant is below both `2^-target` and the working-precision ulp of the sum.
pub fn lower_incomplete_gamma(m_plus_1: u32, x: &Float, ctx: &PrecisionContext) -> Result<Float> {
    if m_plus_1 == 0 {
        return Err(Error::invalid("lower_incomplete_gamma requires m+1 >= 1"));
    }
    if !(x.is_finite() && *x > 0) {
        return Err(Error::invalid("lower_incomplete_gamma requires x > 0"));
    }
    let m = m_plus_1 - 1;
    let wp = ctx.working_bits() + 16;
    let x = Float::with_val(wp, x);
    let prefactor = Float::with_val(wp, Float::factorial(m)) * Float::with_val(wp, (-x.clone()).exp());

    // first term x^{m+1}/(m+1)!
    let mut n = m + 1;
    let mut term = Float::with_val(wp, 1);
    for i in 1..=n {
        term *= &x;
        term /= i;
    }
    let mut sum = Float::new(wp);
    let abs_tol = Float::with_val(wp, 1) >> ctx.target();
    loop {
        sum += &term;
        n += 1;
        let ratio = Float::with_val(wp, &x / n);
        term *= &ratio;
        if ratio < 0.5 {
            // remaining terms ≤ term·(1 + r + r² + …) ≤ 2·term
            let tail = Float::with_val(wp, &term * 2u32);
            let scaled_tail = Float::with_val(wp, &tail * &prefactor);
            let rel_tol = Float::with_val(wp, &sum >> ctx.working_bits() as i32);
            if scaled_tail <= abs_tol && tail <= rel_tol {
                break;
            }
        }
    }
    Ok(Float::with_val(ctx.working_bits(), sum * prefactor))
}

/// Faà di Bruno coefficients `q_0(t), …, q_{k−2}(t)` of `Z^(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QpTable {
    pub t: Float,
    pub k: usize,
    pub coefficients: Vec<BigComplex>,
}

/// Complete Bell polynomials `Y_n(0, iθ'', iθ''', …)` for `n = 0..=n_max`.
///
/// `q_p = C(k, p)·Y_{k−p}`, and `Y_n` does not depend on `k`, so one table serves
/// every derivative order at a given `t`. Because every argument is `i` times a
/// real number, `B_{n,m} = i^m·b_{n,m}` with real `b_{n,m}`, and the recursion
/// `b_{n,m} = Σ_{j=2}^{n−m+1} C(n−1, j−1)·θ^(j)·b_{n−j,m−1}` runs on reals.
#[derive(Debug, Clone)]
pub struct BellSums {
    t: Float,
    values: Vec<BigComplex>,
}

impl BellSums {
    pub fn new(jet: &ThetaJet, n_max: usize, ctx: &PrecisionContext) -> Result<Self> {
        if jet.order() < n_max {
            return Err(Error::invalid(format!(
                "theta jet of order {} cannot produce Bell sums to {n_max}",
                jet.order()
            )));
        }
        let wp = ctx.working_bits();
        let x: Vec<Float> = jet.values().iter().map(|v| Float::with_val(wp, v)).collect();
        // b[n][m], m ≤ n/2 since every part is at least 2
        let mut b: Vec<Vec<Float>> = Vec::with_capacity(n_max + 1);
        b.push(vec![Float::with_val(wp, 1)]);
        for n in 1..=n_max {
            let mut row = vec![Float::new(wp); n / 2 + 1];
            let mut binom = Float::with_val(wp, n - 1); // C(n−1, 1)
            for j in 2..=n {
                // binom = C(n−1, j−1)
                let coeff = Float::with_val(wp, &binom * &x[j]);
                let prev = &b[n - j];
                for (m1, bv) in prev.iter().enumerate() {
                    if m1 + 1 < row.len() {
                        row[m1 + 1] += Float::with_val(wp, &coeff * bv);
                    }
                }
                binom *= (n - j) as u32;
                binom /= j as u32;
            }
            b.push(row);
        }
        let values = b
            .iter()
            .map(|row| {
                let mut acc = BigComplex::zero(wp);
                for (m, v) in row.iter().enumerate() {
                    acc.add_assign(&BigComplex::from_real(v.clone()).mul_i_pow(m as u32));
                }
                acc
            })
            .collect();
        Ok(BellSums {
            t: jet.t().clone(),
            values,
        })
    }

    pub fn n_max(&self) -> usize {
        self.values.len() - 1
    }

    /// `Y_n`
    pub fn get(&self, n: usize) -> &BigComplex {
        &self.values[n]
    }

    pub fn qp_table(&self, k: usize) -> Result<QpTable> {
        if k < 2 {
            return Err(Error::invalid("q_p coefficients need k >= 2"));
        }
        if k > self.n_max() {
            return Err(Error::invalid(format!("Bell sums only reach {}", self.n_max())));
        }
        let wp = self.values[0].prec();
        let mut coefficients = Vec::with_capacity(k - 1);
        let mut binom = Integer::from(1); // C(k, p)
        for p in 0..=k - 2 {
            coefficients.push(self.values[k - p].mul_real(&Float::with_val(wp, &binom)));
            binom *= (k - p) as u32;
            binom /= (p + 1) as u32;
        }
        Ok(QpTable {
            t: self.t.clone(),
            k,
            coefficients,
        })
    }
}

fn check_qp_args(jet: &ThetaJet, k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::invalid("q_p coefficients need k >= 2"));
    }
    if jet.order() < k {
        return Err(Error::invalid(format!(
            "theta jet of order {} is too short for k = {k}",
            jet.order()
        )));
    }
    if *jet.t() < 10 {
        return Err(Error::invalid("q_p coefficients require t >= 10"));
    }
    Ok(())
}

/// `q_p(t)` for `p = 0..=k−2` via the partial Bell recursion.
pub fn qp_coefficients(jet: &ThetaJet, k: usize, ctx: &PrecisionContext) -> Result<QpTable> {
    check_qp_args(jet, k)?;
    BellSums::new(jet, k, ctx)?.qp_table(k)
}

/// `q_p(t)` by enumerating every partition of `k − p` into parts `≥ 2`.
///
/// Exponential cost; meant as a cross-check for small `k`.
pub fn qp_coefficients_enumerated(jet: &ThetaJet, k: usize, ctx: &PrecisionContext) -> Result<QpTable> {
    check_qp_args(jet, k)?;
    if k > 40 {
        return Err(Error::invalid("partition enumeration is limited to k <= 40"));
    }
    let wp = ctx.working_bits();
    let fact = |n: usize| Float::with_val(wp, Float::factorial(n as u32));
    // iθ^(j)/j!
    let scaled: Vec<BigComplex> = (0..=k)
        .map(|j| {
            let v = Float::with_val(wp, jet.get(j)) / fact(j);
            BigComplex::new(Float::new(wp), v)
        })
        .collect();
    let mut coefficients = Vec::with_capacity(k - 1);
    for p in 0..=k - 2 {
        let mut acc = BigComplex::zero(wp);
        let mut counts = vec![0usize; k + 1];
        enumerate_partitions(k - p, 2, &mut counts, &mut |counts| {
            let mut term = BigComplex::from_real(fact(k) / fact(p));
            for (j, &c) in counts.iter().enumerate().skip(2) {
                if c > 0 {
                    term = term.mul(&scaled[j].pow_u(c as u32)).div_real(&fact(c));
                }
            }
            acc.add_assign(&term);
        });
        coefficients.push(acc);
    }
    Ok(QpTable {
        t: jet.t().clone(),
        k,
        coefficients,
    })
}

fn enumerate_partitions(rest: usize, min_part: usize, counts: &mut [usize], visit: &mut dyn FnMut(&[usize])) {
    if rest == 0 {
        visit(counts);
        return;
    }
    for part in min_part..=rest {
        counts[part] += 1;
        enumerate_partitions(rest - part, part, counts, visit);
        counts[part] -= 1;
    }
}

/// `Σ_p |q_p|·θ'^p` alongside the envelope `(k/t)·e^{k/(2θ')}·θ'^{k−1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct QpWeightedSum {
    pub sum: Float,
    pub envelope: Float,
}

impl QpWeightedSum {
    pub fn ratio(&self) -> Float {
        Float::with_val(self.sum.prec(), &self.sum / &self.envelope)
    }
}

pub fn qp_weighted_sum(table: &QpTable, theta_prime: &Float) -> QpWeightedSum {
    let wp = theta_prime.prec();
    let mut sum = Float::new(wp);
    let mut pow = Float::with_val(wp, 1);
    for q in &table.coefficients {
        sum += Float::with_val(wp, q.abs() * &pow);
        pow *= theta_prime;
    }
    let k = table.k as u32;
    let exponent = Float::with_val(wp, k) / Float::with_val(wp, theta_prime * 2u32);
    let mut envelope = Float::with_val(wp, k) / Float::with_val(wp, &table.t);
    envelope *= exponent.exp();
    envelope *= Float::with_val(wp, theta_prime.pow(k - 1));
    QpWeightedSum { sum, envelope }
}
