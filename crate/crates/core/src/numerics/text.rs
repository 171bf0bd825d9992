use rug::Float;

use super::BigComplex;
use crate::error::{Error, Result};

/// Significant decimal digits used for a value of `bits` binary precision.
///
/// `ceil(bits·0.302) + 2` exceeds MPFR's round-trip bound `1 + ceil(bits·log10 2)`,
/// so parsing the text back at the same precision restores the exact value.
pub fn serialized_digits(bits: u32) -> usize {
    (f64::from(bits) * 0.302).ceil() as usize + 2
}

/// Decimal scientific notation, e.g. `-3.5342917352885173e0`.
pub fn format_real(x: &Float) -> String {
    if x.is_nan() {
        return "nan".into();
    }
    if x.is_infinite() {
        return if x.is_sign_negative() {
            "-inf".into()
        } else {
            "inf".into()
        };
    }
    let digits = serialized_digits(x.prec());
    if x.is_zero() {
        return format!("0.{}e0", "0".repeat(digits - 1));
    }
    let (neg, mantissa, exp) = x.to_sign_string_exp(10, Some(digits));
    // value = 0.MANTISSA × 10^exp
    let exp = exp.unwrap_or(0) - 1;
    let (lead, rest) = mantissa.split_at(1);
    format!("{}{}.{}e{}", if neg { "-" } else { "" }, lead, rest, exp)
}

pub fn parse_real(s: &str, bits: u32) -> Result<Float> {
    let s = s.trim();
    match s {
        "nan" | "NaN" => return Ok(Float::with_val(bits, rug::float::Special::Nan)),
        "inf" => return Ok(Float::with_val(bits, rug::float::Special::Infinity)),
        "-inf" => return Ok(Float::with_val(bits, rug::float::Special::NegInfinity)),
        _ => {}
    }
    let parsed = Float::parse(s).map_err(|e| Error::Parse(format!("`{s}`: {e}")))?;
    Ok(Float::with_val(bits, parsed))
}

/// `(re, im)`
pub fn format_complex(z: &BigComplex) -> String {
    format!("({}, {})", format_real(&z.re), format_real(&z.im))
}

pub fn parse_complex(s: &str, bits: u32) -> Result<BigComplex> {
    let inner = s
        .trim()
        .strip_prefix('(')
        .and_then(|r| r.strip_suffix(')'))
        .ok_or_else(|| Error::Parse(format!("complex value must be `(re, im)`, got `{s}`")))?;
    let (re, im) = inner
        .split_once(',')
        .ok_or_else(|| Error::Parse(format!("missing `,` in `{s}`")))?;
    Ok(BigComplex::new(parse_real(re, bits)?, parse_real(im, bits)?))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn digits_rule() {
        assert_eq!(serialized_digits(142), 45);
        assert_eq!(serialized_digits(64), 22);
    }

    #[test]
    fn formats() {
        let x = Float::with_val(64, -1.5);
        let s = format_real(&x);
        assert!(s.starts_with("-1.5000"), "{s}");
        assert!(s.ends_with("e0"), "{s}");
        assert_eq!(format_real(&Float::with_val(64, 1000)).split('e').nth(1), Some("3"));
        assert_eq!(format_real(&Float::with_val(64, 0.01)).split('e').nth(1), Some("-2"));
        assert!(format_real(&Float::new(64)).starts_with("0.000"));
    }

    #[test]
    fn complex_text() {
        let z = BigComplex::new(Float::with_val(80, 0.25), Float::with_val(80, -7));
        let back = parse_complex(&format_complex(&z), 80).unwrap();
        assert_eq!(back, z);
        assert!(parse_complex("1, 2", 80).is_err());
    }

    proptest! {
        #[test]
        fn real_round_trip_is_exact(m in any::<f64>().prop_filter("finite", |v| v.is_finite()),
                                    shift in -300i32..300, bits in 64u32..2000) {
            let x = Float::with_val(bits, m) * Float::with_val(bits, Float::u_pow_u(3, shift.unsigned_abs()));
            let x = if shift < 0 { Float::with_val(bits, 1) / x.clone() * Float::with_val(bits, m).square() } else { x };
            prop_assume!(x.is_finite());
            let back = parse_real(&format_real(&x), bits).unwrap();
            prop_assert_eq!(back, x);
        }
    }
}
