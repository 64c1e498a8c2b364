//! Exact scalars and their text renderings.
//!
//! Exact values render as `p/q` (integers without a denominator), floats as
//! 12 significant digits rounded half-to-even from the exact rational, so
//! every output is stable across platforms.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Arbitrary-precision rational used by every exact computation.
pub type Exact = BigRational;

pub fn int(v: i64) -> Exact {
    BigRational::from_integer(BigInt::from(v))
}

pub fn ratio(n: i64, d: i64) -> Exact {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

pub fn from_biguint(v: &BigUint) -> Exact {
    BigRational::from_integer(BigInt::from(v.clone()))
}

/// Integer power of a rational, `exp` may be large.
pub fn pow(base: &Exact, exp: u32) -> Exact {
    num_traits::pow::pow(base.clone(), exp as usize)
}

pub fn render(v: &Exact) -> String {
    v.to_string()
}

pub fn to_f64(v: &Exact) -> f64 {
    v.to_f64().unwrap_or(f64::NAN)
}

/// Relative difference `|a - b| / |b|` computed exactly.
pub fn relative_gap(a: &Exact, b: &Exact) -> Exact {
    if b.is_zero() {
        return (a - b).abs();
    }
    ((a - b) / b).abs()
}

/// Renders `v` with `digits` significant digits, round-half-even on the exact
/// value. Plain notation for decimal exponents in `-5..15`, scientific
/// otherwise.
pub fn render_sig(v: &Exact, digits: u32) -> String {
    assert!(digits >= 1);
    if v.is_zero() {
        return "0".to_string();
    }
    let negative = v.is_negative();
    let mag = v.abs();

    // Decimal exponent e with 10^e <= mag < 10^(e+1).
    let mut exp = estimate_exponent(&mag);
    let ten = int(10);
    loop {
        let lo = pow10(exp);
        if mag < lo {
            exp -= 1;
        } else if mag >= &lo * &ten {
            exp += 1;
        } else {
            break;
        }
    }

    // Scale so that the integer part carries `digits` digits.
    let shift = digits as i64 - 1 - exp;
    let scaled = &mag * pow10(shift);
    let (quot, rem) = scaled.numer().div_rem(scaled.denom());
    let twice = &rem * 2u32;
    let mut mantissa = quot;
    match twice.cmp(scaled.denom()) {
        std::cmp::Ordering::Greater => mantissa += 1u32,
        std::cmp::Ordering::Equal if mantissa.is_odd() => mantissa += 1u32,
        _ => {}
    }
    // Rounding can carry into a new digit (9.99.. -> 10.0..).
    let mut digits_str = mantissa.to_string();
    if digits_str.len() > digits as usize {
        exp += 1;
        digits_str.truncate(digits as usize);
    }

    let body = if (-5..15).contains(&exp) {
        plain(&digits_str, exp)
    } else {
        let (head, tail) = digits_str.split_at(1);
        let tail = tail.trim_end_matches('0');
        if tail.is_empty() {
            format!("{head}e{exp}")
        } else {
            format!("{head}.{tail}e{exp}")
        }
    };
    if negative {
        format!("-{body}")
    } else {
        body
    }
}

fn plain(digits: &str, exp: i64) -> String {
    let n = digits.len() as i64;
    let s = if exp < 0 {
        let zeros = "0".repeat((-exp - 1) as usize);
        format!("0.{zeros}{digits}")
    } else if exp + 1 >= n {
        let zeros = "0".repeat((exp + 1 - n) as usize);
        format!("{digits}{zeros}")
    } else {
        let (a, b) = digits.split_at((exp + 1) as usize);
        format!("{a}.{b}")
    };
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

fn pow10(e: i64) -> Exact {
    let p = num_traits::pow::pow(BigInt::from(10), e.unsigned_abs() as usize);
    if e >= 0 {
        BigRational::from_integer(p)
    } else {
        BigRational::new(BigInt::one(), p)
    }
}

fn estimate_exponent(mag: &Exact) -> i64 {
    let n = mag.numer().bits() as f64;
    let d = mag.denom().bits() as f64;
    ((n - d) * std::f64::consts::LOG10_2).floor() as i64
}
