use rug::ops::Pow;
use rug::Float;

/// Arbitrary-precision complex number stored as a pair of MPFR floats.
///
/// Results take the precision of the left operand.
#[derive(Debug, Clone, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
}

impl BigComplex {
    pub fn new(re: Float, im: Float) -> Self {
        BigComplex { re, im }
    }

    pub fn zero(prec: u32) -> Self {
        BigComplex::new(Float::new(prec), Float::new(prec))
    }

    pub fn one(prec: u32) -> Self {
        BigComplex::new(Float::with_val(prec, 1), Float::new(prec))
    }

    pub fn from_real(re: Float) -> Self {
        let prec = re.prec();
        BigComplex::new(re, Float::new(prec))
    }

    /// `e^{iφ}`
    pub fn cis(phase: &Float) -> Self {
        let prec = phase.prec();
        let (s, c) = phase.clone().sin_cos(Float::new(prec));
        BigComplex::new(c, s)
    }

    pub fn prec(&self) -> u32 {
        self.re.prec()
    }

    pub fn with_prec(&self, prec: u32) -> Self {
        BigComplex::new(Float::with_val(prec, &self.re), Float::with_val(prec, &self.im))
    }

    pub fn is_finite(&self) -> bool {
        self.re.is_finite() && self.im.is_finite()
    }

    pub fn add(&self, other: &BigComplex) -> BigComplex {
        let p = self.prec();
        BigComplex::new(
            Float::with_val(p, &self.re + &other.re),
            Float::with_val(p, &self.im + &other.im),
        )
    }

    pub fn sub(&self, other: &BigComplex) -> BigComplex {
        let p = self.prec();
        BigComplex::new(
            Float::with_val(p, &self.re - &other.re),
            Float::with_val(p, &self.im - &other.im),
        )
    }

    pub fn add_assign(&mut self, other: &BigComplex) {
        self.re += &other.re;
        self.im += &other.im;
    }

    pub fn add_real(&self, x: &Float) -> BigComplex {
        BigComplex::new(Float::with_val(self.prec(), &self.re + x), self.im.clone())
    }

    pub fn mul(&self, other: &BigComplex) -> BigComplex {
        let p = self.prec();
        let ac = Float::with_val(p, &self.re * &other.re);
        let bd = Float::with_val(p, &self.im * &other.im);
        let ad = Float::with_val(p, &self.re * &other.im);
        let bc = Float::with_val(p, &self.im * &other.re);
        BigComplex::new(ac - bd, ad + bc)
    }

    pub fn mul_real(&self, x: &Float) -> BigComplex {
        let p = self.prec();
        BigComplex::new(Float::with_val(p, &self.re * x), Float::with_val(p, &self.im * x))
    }

    pub fn div_real(&self, x: &Float) -> BigComplex {
        let p = self.prec();
        BigComplex::new(Float::with_val(p, &self.re / x), Float::with_val(p, &self.im / x))
    }

    pub fn neg(&self) -> BigComplex {
        BigComplex::new(
            Float::with_val(self.prec(), -&self.re),
            Float::with_val(self.prec(), -&self.im),
        )
    }

    pub fn conj(&self) -> BigComplex {
        BigComplex::new(self.re.clone(), Float::with_val(self.prec(), -&self.im))
    }

    /// Multiply by `i^k` exactly (a rotation by a quarter turn per step).
    pub fn mul_i_pow(&self, k: u32) -> BigComplex {
        match k % 4 {
            0 => self.clone(),
            1 => BigComplex::new(Float::with_val(self.prec(), -&self.im), self.re.clone()),
            2 => self.neg(),
            _ => BigComplex::new(self.im.clone(), Float::with_val(self.prec(), -&self.re)),
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    /// Principal argument in `(-π, π]`.
    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn recip(&self) -> BigComplex {
        let n = self.norm_sqr();
        let p = self.prec();
        BigComplex::new(Float::with_val(p, &self.re / &n), Float::with_val(p, -&self.im) / &n)
    }

    pub fn div(&self, other: &BigComplex) -> BigComplex {
        self.mul(&other.recip())
    }

    pub fn exp(&self) -> BigComplex {
        let modulus = Float::with_val(self.prec(), self.re.exp_ref());
        BigComplex::cis(&self.im).mul_real(&modulus)
    }

    /// Principal logarithm.
    pub fn ln(&self) -> BigComplex {
        let p = self.prec();
        let r = Float::with_val(p, self.norm_sqr().ln()) / 2u32;
        BigComplex::new(r, self.arg())
    }

    pub fn pow_u(&self, mut n: u32) -> BigComplex {
        let mut base = self.clone();
        let mut acc = BigComplex::one(self.prec());
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// `x^{-s}` for real `x > 0`, i.e. `exp(-s·log x)`.
    pub fn real_pow_neg(x: &Float, s: &BigComplex) -> BigComplex {
        let p = s.prec();
        let lx = Float::with_val(p, x.ln_ref());
        let modulus = (-Float::with_val(p, &s.re * &lx)).exp();
        let phase = -Float::with_val(p, &s.im * &lx);
        BigComplex::cis(&phase).mul_real(&modulus)
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }
}

impl Pow<u32> for &BigComplex {
    type Output = BigComplex;
    fn pow(self, n: u32) -> BigComplex {
        self.pow_u(n)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> BigComplex {
        BigComplex::new(Float::with_val(128, re), Float::with_val(128, im))
    }

    fn close(a: &BigComplex, b: (f64, f64), tol: f64) -> bool {
        let (x, y) = a.to_f64_pair();
        (x - b.0).abs() <= tol && (y - b.1).abs() <= tol
    }

    #[test]
    fn arithmetic() {
        let a = c(1.0, 2.0);
        let b = c(3.0, -1.0);
        assert!(close(&a.mul(&b), (5.0, 5.0), 1e-30));
        assert!(close(&a.div(&b), (0.1, 0.7), 1e-30));
        assert!(close(&a.pow_u(3), (-11.0, -2.0), 1e-30));
        assert!(close(&a.mul_i_pow(1), (-2.0, 1.0), 0.0));
        assert!(close(&a.mul_i_pow(7), (2.0, -1.0), 0.0));
    }

    #[test]
    fn exp_ln_inverse() {
        let z = c(0.25, 3.0);
        let back = z.exp().ln();
        assert!(close(&back, (0.25, 3.0), 1e-35));
        let w = c(-1.0, 0.0).ln();
        assert!(close(&w, (0.0, std::f64::consts::PI), 1e-15));
    }

    #[test]
    fn real_power() {
        let s = c(0.5, 100.0);
        let x = Float::with_val(128, 2);
        let direct = s.neg().mul_real(&Float::with_val(128, x.ln_ref())).exp();
        let v = BigComplex::real_pow_neg(&x, &s);
        assert!(v.sub(&direct).abs() < 1e-35);
    }
}
