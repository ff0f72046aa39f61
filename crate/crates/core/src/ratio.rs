//! Exact rational scalars with decimal-string serialization.
//!
//! Table entries, scales and witnesses are kept as arbitrary-precision
//! rationals so that verification is bit-exact. On disk a value is either a
//! plain integer, a decimal string like `"1.01"`, or a fraction string like
//! `"2/3"` when the denominator is not 10-smooth.

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub fn rat_i64(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn rat_frac(num: i64, den: i64) -> BigRational {
    BigRational::new(BigInt::from(num), BigInt::from(den))
}

/// Parse `"1.01"`, `"-3"`, `".5"`, `"2/3"` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    if s.is_empty() {
        return Err(Error::Malformed("empty numeric string".into()));
    }
    if let Some((num, den)) = s.split_once('/') {
        let n: BigInt = num
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("bad fraction numerator in {s:?}")))?;
        let d: BigInt = den
            .trim()
            .parse()
            .map_err(|_| Error::Malformed(format!("bad fraction denominator in {s:?}")))?;
        if d.is_zero() {
            return Err(Error::Malformed(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(n, d));
    }
    let (sign, body) = match s.strip_prefix('-') {
        Some(rest) => (-1, rest),
        None => (1, s.strip_prefix('+').unwrap_or(s)),
    };
    let (int_part, frac_part) = match body.split_once('.') {
        Some((a, b)) => (a, b),
        None => (body, ""),
    };
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(Error::Malformed(format!("bad numeric string {s:?}")));
    }
    if !int_part.chars().all(|c| c.is_ascii_digit()) || !frac_part.chars().all(|c| c.is_ascii_digit()) {
        return Err(Error::Malformed(format!("bad numeric string {s:?}")));
    }
    let digits = format!("{int_part}{frac_part}");
    let n: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits
            .parse()
            .map_err(|_| Error::Malformed(format!("bad numeric string {s:?}")))?
    };
    let den = BigInt::from(10u32).pow(frac_part.len() as u32);
    Ok(BigRational::new(n * BigInt::from(sign), den))
}

/// Render a rational as a decimal string when the reduced denominator is of
/// the form 2^a 5^b, falling back to `"p/q"` otherwise.
pub fn format_rational(r: &BigRational) -> String {
    let num = r.numer();
    let den = r.denom();
    if den.is_one() {
        return num.to_string();
    }
    // factor denominator as 2^a 5^b * rest
    let mut rest = den.clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let mut a = 0u32;
    let mut b = 0u32;
    while (&rest % &two).is_zero() {
        rest /= &two;
        a += 1;
    }
    while (&rest % &five).is_zero() {
        rest /= &five;
        b += 1;
    }
    if !rest.is_one() {
        return format!("{num}/{den}");
    }
    let k = a.max(b);
    // scale to denominator 10^k
    let scale = two.pow(k - a) * five.pow(k - b);
    let scaled = (num * &scale).abs();
    let base = BigInt::from(10u32).pow(k);
    let (ip, fp) = scaled.div_rem(&base);
    let sign = if r.is_negative() { "-" } else { "" };
    let frac = format!("{:0>width$}", fp.to_string(), width = k as usize);
    format!("{sign}{ip}.{frac}")
}

/// Round a float to 12 significant decimal digits and return the exact
/// rational of that decimal. Used by generators whose closed forms are
/// transcendental (exp, trig) so that the emitted table is still exact.
pub fn decimal12(x: f64) -> BigRational {
    if x == 0.0 {
        return BigRational::zero();
    }
    let s = format!("{x:.11e}");
    // s looks like "2.71828182846e0"
    let (mantissa, exp) = s.split_once('e').expect("exp format");
    let exp: i32 = exp.parse().expect("exp digits");
    let m = parse_rational(mantissa).expect("mantissa digits");
    let ten = BigRational::from_integer(BigInt::from(10));
    let scale = if exp >= 0 {
        num_traits::pow::pow(ten, exp as usize)
    } else {
        num_traits::pow::pow(ten, (-exp) as usize).recip()
    };
    m * scale
}

pub fn to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or_else(|| {
        // fall back through big integer division
        let n = r.numer().to_f64().unwrap_or(f64::NAN);
        let d = r.denom().to_f64().unwrap_or(f64::NAN);
        n / d
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn decimal_round_trip() {
        for s in ["1.01", "-0.5", "3", "0.99", "-12.250"] {
            let r = parse_rational(s).unwrap();
            let back = parse_rational(&format_rational(&r)).unwrap();
            assert_eq!(r, back);
        }
    }

    #[test]
    fn fraction_fallback() {
        let r = parse_rational("2/3").unwrap();
        assert_eq!(format_rational(&r), "2/3");
        assert_eq!(parse_rational(&format_rational(&r)).unwrap(), r);
    }

    #[test]
    fn decimal12_exp() {
        let e = decimal12(std::f64::consts::E);
        let v = to_f64(&e);
        assert!((v - std::f64::consts::E).abs() < 1e-10);
    }

    #[test]
    fn rejects_garbage() {
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1.0.1").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    proptest::proptest! {
        #[test]
        fn format_parse_round_trip(num in -100_000i64..100_000, den in 1i64..10_000) {
            let r = rat_frac(num, den);
            let back = parse_rational(&format_rational(&r)).unwrap();
            proptest::prop_assert_eq!(r, back);
        }

        #[test]
        fn decimal12_close_to_float(x in -1e6f64..1e6) {
            proptest::prop_assume!(x != 0.0);
            let approx = to_f64(&decimal12(x));
            proptest::prop_assert!(((approx - x) / x).abs() < 1e-10);
        }
    }
}
