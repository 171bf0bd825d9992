use rug::{Assign, Float};

use super::BigComplex;

/// Neumaier (improved Kahan) summation at MPFR precision.
///
/// With round-to-nearest the correction term captures the rounding error of every
/// addition exactly, so the final result carries roughly twice the working precision
/// until the last rounding.
#[derive(Debug, Clone)]
pub struct CompensatedSum {
    sum: Float,
    comp: Float,
    scratch: Float,
    err: Float,
}

impl CompensatedSum {
    pub fn new(prec: u32) -> Self {
        CompensatedSum {
            sum: Float::new(prec),
            comp: Float::new(prec),
            scratch: Float::new(prec),
            err: Float::new(prec),
        }
    }

    pub fn add(&mut self, x: &Float) {
        self.scratch.assign(&self.sum + x);
        if self.sum.cmp_abs(x).is_none_or(|o| o.is_ge()) {
            self.err.assign(&self.sum - &self.scratch);
            self.err += x;
        } else {
            self.err.assign(x - &self.scratch);
            self.err += &self.sum;
        }
        self.comp += &self.err;
        std::mem::swap(&mut self.sum, &mut self.scratch);
    }

    /// Merge another partial sum (its value and its compensation).
    pub fn merge(&mut self, other: &CompensatedSum) {
        self.add(&other.sum);
        self.add(&other.comp);
    }

    pub fn value(&self) -> Float {
        Float::with_val(self.sum.prec(), &self.sum + &self.comp)
    }
}

/// Componentwise [`CompensatedSum`] for complex terms.
#[derive(Debug, Clone)]
pub struct CompensatedComplexSum {
    re: CompensatedSum,
    im: CompensatedSum,
}

impl CompensatedComplexSum {
    pub fn new(prec: u32) -> Self {
        CompensatedComplexSum {
            re: CompensatedSum::new(prec),
            im: CompensatedSum::new(prec),
        }
    }

    pub fn add(&mut self, z: &BigComplex) {
        self.re.add(&z.re);
        self.im.add(&z.im);
    }

    pub fn merge(&mut self, other: &CompensatedComplexSum) {
        self.re.merge(&other.re);
        self.im.merge(&other.im);
    }

    pub fn value(&self) -> BigComplex {
        BigComplex::new(self.re.value(), self.im.value())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn recovers_cancelled_small_terms() {
        // 1 + 2^-100 - 1 at 64 bits: naive summation returns 0.
        let prec = 64;
        let one = Float::with_val(prec, 1);
        let tiny = Float::with_val(prec, 1) >> 100;
        let mut s = CompensatedSum::new(prec);
        s.add(&one);
        s.add(&tiny);
        s.add(&Float::with_val(prec, -1));
        assert_eq!(s.value(), tiny);
    }

    #[test]
    fn merge_matches_sequential() {
        let prec = 80;
        let xs: Vec<Float> = (1..200).map(|n| Float::with_val(prec, n).recip()).collect();
        let mut all = CompensatedSum::new(prec);
        xs.iter().for_each(|x| all.add(x));
        let mut a = CompensatedSum::new(prec);
        let mut b = CompensatedSum::new(prec);
        xs[..90].iter().for_each(|x| a.add(x));
        xs[90..].iter().for_each(|x| b.add(x));
        a.merge(&b);
        let diff = Float::with_val(prec, all.value() - a.value()).abs();
        assert!(diff < Float::with_val(prec, 1) >> 75);
    }
}
