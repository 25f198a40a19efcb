//! Single-mode boson algebra: commuting symbols in `(z*, z)`, normal-ordered
//! operators in `(a†, a)`, Wick reordering of operator words, and the
//! signed Stirling numbers of the first kind.

use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;

use num::traits::{One, Zero};
use num::{BigInt, BigRational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::exact::{binomial, factorial, format_gaussian, parse_gaussian, pow_rational, real, GaussianRational};

type TermMap = BTreeMap<(u32, u32), GaussianRational>;

fn insert_term(map: &mut TermMap, key: (u32, u32), c: GaussianRational) {
    if c.is_zero() {
        return;
    }
    match map.entry(key) {
        Entry::Vacant(slot) => {
            slot.insert(c);
        }
        Entry::Occupied(mut slot) => {
            *slot.get_mut() += c;
            if slot.get().is_zero() {
                slot.remove();
            }
        }
    }
}

fn to_wire(map: &TermMap) -> BTreeMap<String, String> {
    map.iter()
        .map(|((m, n), c)| (format!("{m},{n}"), format_gaussian(c)))
        .collect()
}

fn from_wire(wire: BTreeMap<String, String>) -> Result<TermMap> {
    let mut map = TermMap::new();
    for (key, value) in wire {
        let bad = || Error::Parse {
            position: 0,
            message: format!("term key '{key}' is not of the form \"m,n\""),
        };
        let (m, n) = key.split_once(',').ok_or_else(bad)?;
        let m: u32 = m.trim().parse().map_err(|_| bad())?;
        let n: u32 = n.trim().parse().map_err(|_| bad())?;
        insert_term(&mut map, (m, n), parse_gaussian(&value)?);
    }
    Ok(map)
}

macro_rules! term_map_type {
    ($(#[$doc:meta])* $name:ident) => {
        $(#[$doc])*
        #[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
        #[serde(into = "BTreeMap<String, String>", try_from = "BTreeMap<String, String>")]
        pub struct $name {
            terms: TermMap,
        }

        impl $name {
            pub fn zero() -> Self {
                Self::default()
            }

            pub fn one() -> Self {
                Self::monomial(0, 0, real(BigRational::one()))
            }

            pub fn monomial(m: u32, n: u32, c: GaussianRational) -> Self {
                let mut out = Self::zero();
                out.add_term(m, n, c);
                out
            }

            pub fn add_term(&mut self, m: u32, n: u32, c: GaussianRational) {
                insert_term(&mut self.terms, (m, n), c);
            }

            pub fn terms(&self) -> impl Iterator<Item = (&(u32, u32), &GaussianRational)> {
                self.terms.iter()
            }

            pub fn coefficient(&self, m: u32, n: u32) -> GaussianRational {
                self.terms.get(&(m, n)).cloned().unwrap_or_else(GaussianRational::zero)
            }

            pub fn len(&self) -> usize {
                self.terms.len()
            }

            pub fn is_empty(&self) -> bool {
                self.terms.is_empty()
            }

            pub fn degree(&self) -> u32 {
                self.terms.keys().map(|(m, n)| m + n).max().unwrap_or(0)
            }

            pub fn scale(&self, c: &GaussianRational) -> Self {
                let mut out = Self::zero();
                for (&(m, n), v) in &self.terms {
                    out.add_term(m, n, v * c);
                }
                out
            }

            pub fn add(&self, other: &Self) -> Self {
                let mut out = self.clone();
                for (&(m, n), v) in &other.terms {
                    out.add_term(m, n, v.clone());
                }
                out
            }

            pub fn sub(&self, other: &Self) -> Self {
                self.add(&other.scale(&real(-BigRational::one())))
            }
        }

        impl From<$name> for BTreeMap<String, String> {
            fn from(v: $name) -> Self {
                to_wire(&v.terms)
            }
        }

        impl TryFrom<BTreeMap<String, String>> for $name {
            type Error = Error;
            fn try_from(wire: BTreeMap<String, String>) -> Result<Self> {
                Ok($name { terms: from_wire(wire)? })
            }
        }
    };
}

term_map_type!(
    /// Commuting polynomial `Σ c_{mn} z*^m z^n`.
    BosonSymbol
);

term_map_type!(
    /// Normal-ordered operator `Σ c_{mn} a†^m a^n`.
    NormalForm
);

impl BosonSymbol {
    pub fn z_star() -> Self {
        Self::monomial(1, 0, real(BigRational::one()))
    }

    pub fn z() -> Self {
        Self::monomial(0, 1, real(BigRational::one()))
    }

    /// Commutative product.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(m1, n1), c1) in &self.terms {
            for (&(m2, n2), c2) in &other.terms {
                out.add_term(m1 + m2, n1 + n2, c1 * c2);
            }
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::one(), |acc, _| acc.mul(self))
    }
}

impl NormalForm {
    /// `(Σ c a†^m a^n)† = Σ c̄ a†^n a^m`.
    pub fn adjoint(&self) -> Self {
        let mut out = Self::zero();
        for (&(m, n), c) in &self.terms {
            out.add_term(n, m, c.conj());
        }
        out
    }

    /// Operator product, reordered with `a^p a†^q = Σ_k C(p,k) C(q,k) k! a†^{q−k} a^{p−k}`.
    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (&(m1, n1), c1) in &self.terms {
            for (&(m2, n2), c2) in &other.terms {
                let c = c1 * c2;
                for k in 0..=n1.min(m2) {
                    let w = binomial(n1 as i64, k as i64) * binomial(m2 as i64, k as i64) * factorial(k);
                    out.add_term(m1 + m2 - k, n1 + n2 - k, &c * real(BigRational::from_integer(w)));
                }
            }
        }
        out
    }

    /// `Σ c · ad^m a^n` display form.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(&(m, n), c)| {
                let mut s = format_gaussian(c);
                if c.re.is_zero() == c.im.is_zero() {
                    s = format!("({s})");
                }
                let ops: Vec<String> = [(m, "ad"), (n, "a")]
                    .into_iter()
                    .filter(|(p, _)| *p > 0)
                    .map(|(p, sym)| if p == 1 { sym.to_string() } else { format!("{sym}^{p}") })
                    .collect();
                if ops.is_empty() {
                    s
                } else {
                    format!("{s} {}", ops.join(" "))
                }
            })
            .collect();
        parts.join(" + ")
    }
}

impl fmt::Display for NormalForm {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

/// Normal ordering of a commuting symbol: `z* ↦ a†` placed to the left of
/// `z ↦ a`, coefficients unchanged.
pub fn normal_order_symbol(sym: &BosonSymbol) -> NormalForm {
    NormalForm { terms: sym.terms.clone() }
}

/// Classical symbol of a normal-ordered operator.
pub fn symbol_of(form: &NormalForm) -> BosonSymbol {
    BosonSymbol { terms: form.terms.clone() }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum BosonLetter {
    Create,
    Annihilate,
}

/// Product of `a†` and `a`, left to right.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct OperatorWord(pub Vec<BosonLetter>);

impl OperatorWord {
    pub fn new(letters: impl Into<Vec<BosonLetter>>) -> Self {
        OperatorWord(letters.into())
    }

    /// `a†^m a^n`.
    pub fn normal(m: u32, n: u32) -> Self {
        let mut letters = vec![BosonLetter::Create; m as usize];
        letters.extend(std::iter::repeat_n(BosonLetter::Annihilate, n as usize));
        OperatorWord(letters)
    }

    /// `(a† a)^k`.
    pub fn number_power(k: u32) -> Self {
        OperatorWord(
            (0..k)
                .flat_map(|_| [BosonLetter::Create, BosonLetter::Annihilate])
                .collect(),
        )
    }

    pub fn adjoint(&self) -> Self {
        OperatorWord(
            self.0
                .iter()
                .rev()
                .map(|l| match l {
                    BosonLetter::Create => BosonLetter::Annihilate,
                    BosonLetter::Annihilate => BosonLetter::Create,
                })
                .collect(),
        )
    }
}

/// Rewrites `a a† → a† a + 1` until every word is normal ordered.
pub fn wick_reorder(word: &OperatorWord) -> NormalForm {
    let mut pending: BTreeMap<Vec<BosonLetter>, BigInt> = BTreeMap::new();
    pending.insert(word.0.clone(), BigInt::one());
    let mut out = NormalForm::zero();
    while let Some((letters, c)) = pending.pop_first() {
        let swap_at = letters
            .windows(2)
            .position(|w| w == [BosonLetter::Annihilate, BosonLetter::Create]);
        match swap_at {
            None => {
                let m = letters.iter().filter(|&&l| l == BosonLetter::Create).count() as u32;
                let n = letters.len() as u32 - m;
                out.add_term(m, n, real(BigRational::from_integer(c)));
            }
            Some(i) => {
                let mut swapped = letters.clone();
                swapped.swap(i, i + 1);
                *pending.entry(swapped).or_default() += &c;
                let mut contracted = letters;
                contracted.drain(i..i + 2);
                *pending.entry(contracted).or_default() += c;
            }
        }
    }
    out
}

/// Row `n` of the signed Stirling numbers of the first kind: the coefficients
/// of `u(u−1)…(u−n+1)`, indexed by the power of `u`.
pub fn stirling_first_row(n: u32) -> Vec<BigInt> {
    let mut row = vec![BigInt::one()];
    for k in 0..n {
        // multiply by (u − k)
        let mut next = vec![BigInt::zero(); row.len() + 1];
        for (p, c) in row.iter().enumerate() {
            next[p + 1] += c;
            next[p] -= c * k;
        }
        row = next;
    }
    row
}

pub fn stirling_first_signed(n: u32, l: u32) -> Result<BigInt> {
    if l > n {
        return Err(Error::Domain(format!("Stirling index {l} outside 0..={n}")));
    }
    Ok(stirling_first_row(n).swap_remove(l as usize))
}

/// Integer polynomial in the number variable `u = a†a`, indexed by power.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NumberPolynomial {
    pub coeffs: Vec<BigInt>,
}

impl NumberPolynomial {
    pub fn eval(&self, u: &BigRational) -> BigRational {
        self.coeffs
            .iter()
            .rev()
            .fold(BigRational::zero(), |acc, c| acc * u + BigRational::from_integer(c.clone()))
    }

    pub fn eval_f64(&self, u: f64) -> f64 {
        use num::traits::ToPrimitive;
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * u + c.to_f64().unwrap_or(f64::NAN))
    }

    /// Expands `Σ c_ℓ (a†a)^ℓ` back into normal order.
    pub fn to_normal_form(&self) -> NormalForm {
        let number = NormalForm::monomial(1, 1, real(BigRational::one()));
        let mut power = NormalForm::one();
        let mut out = NormalForm::zero();
        for c in &self.coeffs {
            out = out.add(&power.scale(&real(BigRational::from_integer(c.clone()))));
            power = power.mul(&number);
        }
        out
    }
}

impl fmt::Display for NumberPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (p, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c < &BigInt::zero() { "-" } else { "+" };
            let mag = if c < &BigInt::zero() { -c } else { c.clone() };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match p {
                0 => write!(f, "{mag}")?,
                1 => write!(f, "{mag}u")?,
                _ => write!(f, "{mag}u^{p}")?,
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

/// `𝒩(a†a + a a†)^n = 2^n a†^n a^n = 2^n Σ_ℓ B^n_ℓ (a†a)^ℓ`.
pub fn number_polynomial(n: u32) -> NumberPolynomial {
    let scale = BigInt::one() << n;
    NumberPolynomial {
        coeffs: stirling_first_row(n).into_iter().map(|c| c * &scale).collect(),
    }
}

/// Base `1 + 2c` of `𝒩 e^{c(a†a + a a†)} = (1 + 2c)^{a†a}`.
pub fn normal_ordered_exponential(c: &BigRational) -> Result<BigRational> {
    let base = BigRational::one() + c * BigRational::from_integer(BigInt::from(2));
    if base <= BigRational::zero() {
        return Err(Error::Validity(format!(
            "1 + 2c = {} must be positive for the number-operator power",
            crate::exact::format_rational(&base)
        )));
    }
    Ok(base)
}

/// Truncated series `Σ_{n ≤ terms} c^n/n! · number_polynomial(n)(u)`, used to
/// check the closed form of [`normal_ordered_exponential`].
pub fn exponential_series(c: &BigRational, u: &BigRational, terms: u32) -> BigRational {
    (0..=terms)
        .map(|n| {
            pow_rational(c, n) / BigRational::from_integer(factorial(n)) * number_polynomial(n).eval(u)
        })
        .fold(BigRational::zero(), |a, b| a + b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use BosonLetter::*;

    fn nf(terms: &[((u32, u32), i64)]) -> NormalForm {
        let mut f = NormalForm::zero();
        for &((m, n), c) in terms {
            f.add_term(m, n, real(int(c)));
        }
        f
    }

    #[test]
    fn normal_order_examples() {
        assert_eq!(normal_order_symbol(&BosonSymbol::one()), NormalForm::one());
        let sym = BosonSymbol::z_star().mul(&BosonSymbol::z()).scale(&real(int(2))).pow(5);
        assert_eq!(normal_order_symbol(&sym), nf(&[((5, 5), 32)]));
        let lin = BosonSymbol::z_star().add(&BosonSymbol::z());
        assert_eq!(normal_order_symbol(&lin), nf(&[((1, 0), 1), ((0, 1), 1)]));
    }

    #[test]
    fn wick_examples() {
        assert_eq!(wick_reorder(&OperatorWord::new(vec![Annihilate, Create])), nf(&[((1, 1), 1), ((0, 0), 1)]));
        assert_eq!(
            wick_reorder(&OperatorWord::new(vec![Annihilate, Create, Annihilate])),
            nf(&[((1, 2), 1), ((0, 1), 1)])
        );
        assert_eq!(wick_reorder(&OperatorWord::new(vec![Create, Annihilate])), nf(&[((1, 1), 1)]));
    }

    #[test]
    fn stirling_rows() {
        assert_eq!(stirling_first_signed(1, 1).unwrap(), BigInt::from(1));
        assert_eq!(stirling_first_row(2), vec![0, -1, 1].into_iter().map(BigInt::from).collect::<Vec<_>>());
        assert_eq!(
            stirling_first_row(3),
            vec![0, 2, -3, 1].into_iter().map(BigInt::from).collect::<Vec<_>>()
        );
        assert!(stirling_first_signed(3, 4).is_err());
    }

    #[test]
    fn number_polynomials() {
        assert_eq!(number_polynomial(1).coeffs, vec![BigInt::from(0), BigInt::from(2)]);
        assert_eq!(number_polynomial(2).to_string(), "4u^2 - 4u");
        let p5 = number_polynomial(5);
        let expected: Vec<BigInt> = [0, 24, -50, 35, -10, 1].iter().map(|c| BigInt::from(32 * c)).collect();
        assert_eq!(p5.coeffs, expected);
    }

    #[test]
    fn exponential_bases() {
        assert_eq!(normal_ordered_exponential(&int(0)).unwrap(), int(1));
        assert_eq!(normal_ordered_exponential(&ratio(-1, 4)).unwrap(), ratio(1, 2));
        assert_eq!(normal_ordered_exponential(&ratio(1, 2)).unwrap(), int(2));
        assert!(normal_ordered_exponential(&ratio(-1, 2)).is_err());
    }

    #[test]
    fn product_matches_wick() {
        // (a a†)(a a†) written as normal forms and multiplied
        let aad = wick_reorder(&OperatorWord::new(vec![Annihilate, Create]));
        let product = aad.mul(&aad);
        let direct = wick_reorder(&OperatorWord::new(vec![Annihilate, Create, Annihilate, Create]));
        assert_eq!(product, direct);
    }

    #[test]
    fn json_round_trip() {
        let mut f = NormalForm::zero();
        f.add_term(5, 5, real(int(32)));
        f.add_term(1, 0, crate::exact::gaussian(ratio(1, 2), ratio(-3, 4)));
        let text = serde_json::to_string(&f).unwrap();
        assert_eq!(text, r#"{"1,0":"1/2-3/4i","5,5":"32"}"#);
        let back: NormalForm = serde_json::from_str(&text).unwrap();
        assert_eq!(back, f);
        assert!(serde_json::from_str::<NormalForm>(r#"{"x":"1"}"#).is_err());
    }

    #[test]
    fn render_text() {
        assert_eq!(nf(&[((5, 5), 32)]).render(), "32 ad^5 a^5");
        assert_eq!(nf(&[((0, 0), 1), ((1, 1), -2)]).render(), "1 + -2 ad a");
    }
}
