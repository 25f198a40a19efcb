//! Exact scalars: rationals, Gaussian rationals, and `q·√r` values, plus
//! the decimal rendering used everywhere output is printed.

use std::fmt;

use num::bigint::Sign;
use num::complex::Complex;
use num::integer::Integer;
use num::traits::{One, Pow, Signed, ToPrimitive, Zero};
use num::{BigInt, BigRational, BigUint};

use crate::error::{Error, Result};

/// `re + im·i` with both parts exact rationals.
pub type GaussianRational = Complex<BigRational>;

pub fn ratio(numer: i64, denom: i64) -> BigRational {
    BigRational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn real(r: BigRational) -> GaussianRational {
    Complex::new(r, BigRational::zero())
}

pub fn gaussian(re: BigRational, im: BigRational) -> GaussianRational {
    Complex::new(re, im)
}

pub fn is_real(z: &GaussianRational) -> bool {
    z.im.is_zero()
}

pub fn factorial(n: u32) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * k)
}

/// Binomial coefficient, zero outside `0 ≤ k ≤ n`.
pub fn binomial(n: i64, k: i64) -> BigInt {
    if k < 0 || n < 0 || k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

pub fn pow_rational(base: &BigRational, exp: u32) -> BigRational {
    Pow::pow(base, exp)
}

pub fn rational_to_f64(r: &BigRational) -> f64 {
    r.to_f64().unwrap_or(f64::NAN)
}

pub fn gaussian_to_c64(z: &GaussianRational) -> Complex<f64> {
    Complex::new(rational_to_f64(&z.re), rational_to_f64(&z.im))
}

pub fn format_rational(r: &BigRational) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

/// Compact rendering: `3/4`, `-1/2i`, `1/3+2i`.
pub fn format_gaussian(z: &GaussianRational) -> String {
    match (z.re.is_zero(), z.im.is_zero()) {
        (_, true) => format_rational(&z.re),
        (true, false) => format!("{}i", format_rational(&z.im)),
        (false, false) => {
            let sign = if z.im.is_negative() { '-' } else { '+' };
            format!("{}{}{}i", format_rational(&z.re), sign, format_rational(&z.im.abs()))
        }
    }
}

/// Parses `p`, `p/q`, or a finite decimal such as `-0.125` into an exact rational.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse {
        position: 0,
        message: format!("invalid rational literal '{s}'"),
    };
    if let Some((n, d)) = s.split_once('/') {
        let n: BigInt = n.trim().parse().map_err(|_| bad())?;
        let d: BigInt = d.trim().parse().map_err(|_| bad())?;
        if d.is_zero() {
            return Err(Error::Domain(format!("zero denominator in '{s}'")));
        }
        return Ok(BigRational::new(n, d));
    }
    if let Some((whole, frac)) = s.split_once('.') {
        if frac.is_empty() || !frac.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let negative = whole.starts_with('-');
        let whole_digits = whole.trim_start_matches(['-', '+']);
        if !whole_digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(bad());
        }
        let digits: BigInt = format!("{whole_digits}{frac}").parse().map_err(|_| bad())?;
        let scale = BigInt::from(10u32).pow(frac.len() as u32);
        let value = BigRational::new(digits, scale);
        return Ok(if negative { -value } else { value });
    }
    let n: BigInt = s.parse().map_err(|_| bad())?;
    Ok(BigRational::from_integer(n))
}

/// Inverse of [`format_gaussian`].
pub fn parse_gaussian(s: &str) -> Result<GaussianRational> {
    let s = s.trim();
    let Some(body) = s.strip_suffix('i') else {
        return Ok(real(parse_rational(s)?));
    };
    // split at the last sign that is not the leading one
    let split = body
        .char_indices()
        .skip(1)
        .filter(|&(_, c)| c == '+' || c == '-')
        .map(|(i, _)| i)
        .last();
    match split {
        Some(i) => {
            let re = parse_rational(&body[..i])?;
            let im = parse_rational(body[i..].trim_start_matches('+'))?;
            Ok(gaussian(re, im))
        }
        None => Ok(gaussian(BigRational::zero(), parse_rational(body)?)),
    }
}

/// Decimal string with `digits` places after the point, rounded half to even.
pub fn decimal_string(r: &BigRational, digits: usize) -> String {
    let scale = BigInt::from(10u32).pow(digits as u32);
    let scaled = r.numer() * &scale;
    let denom = r.denom();
    let (mut quot, rem) = scaled.div_mod_floor(denom);
    let twice: BigInt = &rem * 2;
    match twice.cmp(denom) {
        std::cmp::Ordering::Greater => quot += 1,
        std::cmp::Ordering::Equal if quot.is_odd() => quot += 1,
        _ => {}
    }
    render_scaled(&quot, digits)
}

fn render_scaled(q: &BigInt, digits: usize) -> String {
    let negative = q.sign() == Sign::Minus;
    let mut s = q.abs().to_string();
    if s.len() <= digits {
        s = format!("{}{}", "0".repeat(digits + 1 - s.len()), s);
    }
    let (int_part, frac_part) = s.split_at(s.len() - digits);
    let mut out = String::new();
    if negative {
        out.push('-');
    }
    out.push_str(int_part);
    if digits > 0 {
        out.push('.');
        out.push_str(frac_part);
    }
    out
}

/// Rational approximation of `√n` with absolute error below `10^-digits`.
pub fn sqrt_approx(n: &BigUint, digits: u32) -> BigRational {
    let scale = BigUint::from(10u32).pow(digits);
    let root = (n * &scale * &scale).sqrt();
    BigRational::new(BigInt::from(root), BigInt::from(scale))
}

/// Exact value `coeff · √radicand`, with the radicand a nonnegative integer
/// stripped of small square factors.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SqrtRational {
    pub coeff: BigRational,
    pub radicand: BigUint,
}

impl SqrtRational {
    /// Builds `coeff · √(p/q)` and moves the denominator out of the root.
    pub fn new(coeff: BigRational, radicand: &BigRational) -> Result<Self> {
        if radicand.is_negative() {
            return Err(Error::Domain("square root of a negative rational".into()));
        }
        let p = radicand.numer().to_biguint().unwrap_or_default();
        let q = radicand.denom().to_biguint().unwrap_or_default();
        let coeff = coeff / BigRational::from_integer(BigInt::from(q.clone()));
        let mut value = SqrtRational {
            coeff,
            radicand: p * q,
        };
        value.canonicalize();
        Ok(value)
    }

    pub fn rational(r: BigRational) -> Self {
        SqrtRational {
            coeff: r,
            radicand: BigUint::one(),
        }
    }

    fn canonicalize(&mut self) {
        if self.radicand.is_zero() || self.coeff.is_zero() {
            self.coeff = BigRational::zero();
            self.radicand = BigUint::one();
            return;
        }
        let mut outside = BigUint::one();
        let mut f = 2u32;
        while f <= 100_000 {
            let sq = BigUint::from(f) * f;
            if sq > self.radicand {
                break;
            }
            while (&self.radicand % &sq).is_zero() {
                self.radicand /= &sq;
                outside *= f;
            }
            f += 1;
        }
        let root = self.radicand.sqrt();
        if &root * &root == self.radicand {
            outside *= root;
            self.radicand = BigUint::one();
        }
        self.coeff = &self.coeff * BigRational::from_integer(BigInt::from(outside));
    }

    pub fn is_rational(&self) -> bool {
        self.radicand.is_one()
    }

    pub fn to_f64(&self) -> f64 {
        rational_to_f64(&self.coeff) * self.radicand.to_f64().unwrap_or(f64::NAN).sqrt()
    }
}

impl fmt::Display for SqrtRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_rational() {
            write!(f, "{}", format_rational(&self.coeff))
        } else if self.coeff.is_one() {
            write!(f, "sqrt({})", self.radicand)
        } else {
            write!(f, "{}*sqrt({})", format_rational(&self.coeff), self.radicand)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn half_even_rounding() {
        assert_eq!(decimal_string(&ratio(1, 8), 2), "0.12");
        assert_eq!(decimal_string(&ratio(3, 8), 2), "0.38");
        assert_eq!(decimal_string(&ratio(-1, 8), 2), "-0.12");
        assert_eq!(decimal_string(&ratio(2, 3), 3), "0.667");
        assert_eq!(decimal_string(&int(120), 3), "120.000");
        assert_eq!(decimal_string(&ratio(-1, 3), 0), "0");
        assert_eq!(decimal_string(&ratio(5, 2), 0), "2");
    }

    #[test]
    fn gaussian_text_roundtrip() {
        for z in [
            real(ratio(3, 4)),
            gaussian(BigRational::zero(), ratio(-1, 2)),
            gaussian(ratio(1, 3), int(2)),
            gaussian(ratio(-7, 3), ratio(-5, 9)),
        ] {
            assert_eq!(parse_gaussian(&format_gaussian(&z)).unwrap(), z);
        }
        assert_eq!(parse_rational("-0.125").unwrap(), ratio(-1, 8));
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn sqrt_canonical_form() {
        let z = SqrtRational::new(ratio(3, 2), &ratio(1, 3)).unwrap();
        assert_eq!(z.coeff, ratio(1, 2));
        assert_eq!(z.radicand, BigUint::from(3u32));
        let w = SqrtRational::new(int(1), &ratio(9, 4)).unwrap();
        assert!(w.is_rational());
        assert_eq!(w.coeff, ratio(3, 2));
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 3), BigInt::from(120));
        assert_eq!(binomial(4, -1), BigInt::zero());
        assert_eq!(factorial(5), BigInt::from(120));
    }
}
