use std::cmp::Ordering;
use std::collections::btree_map::Entry;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num::traits::{One, Zero};
use num::BigRational;

use crate::exact::{format_gaussian, gaussian, ratio, real, GaussianRational};

/// Generator of the collective spin algebra.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum SpinLetter {
    Plus,
    Minus,
    Z,
}

impl SpinLetter {
    pub fn adjoint(self) -> Self {
        match self {
            SpinLetter::Plus => SpinLetter::Minus,
            SpinLetter::Minus => SpinLetter::Plus,
            SpinLetter::Z => SpinLetter::Z,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            SpinLetter::Plus => "S+",
            SpinLetter::Minus => "S-",
            SpinLetter::Z => "Sz",
        }
    }
}

/// Product of collective spin generators, written left to right as an
/// operator product (the rightmost letter acts first). Empty is the identity.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct SpinWord(pub Vec<SpinLetter>);

impl SpinWord {
    pub fn identity() -> Self {
        SpinWord(Vec::new())
    }

    pub fn new(letters: impl Into<Vec<SpinLetter>>) -> Self {
        SpinWord(letters.into())
    }

    pub fn letters(&self) -> &[SpinLetter] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self, letter: SpinLetter) -> usize {
        self.0.iter().filter(|&&l| l == letter).count()
    }

    /// Net change of 2m produced by the word.
    pub fn twice_shift(&self) -> i64 {
        self.0
            .iter()
            .map(|l| match l {
                SpinLetter::Plus => 2,
                SpinLetter::Minus => -2,
                SpinLetter::Z => 0,
            })
            .sum()
    }

    pub fn adjoint(&self) -> Self {
        SpinWord(self.0.iter().rev().map(|l| l.adjoint()).collect())
    }

    pub fn concat(&self, other: &SpinWord) -> SpinWord {
        let mut letters = self.0.clone();
        letters.extend_from_slice(&other.0);
        SpinWord(letters)
    }
}

// Canonical order: shorter words first, then lexicographic with S+ < S- < Sz.
impl Ord for SpinWord {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| self.0.cmp(&other.0))
    }
}

impl PartialOrd for SpinWord {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for SpinWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "1");
        }
        let parts: Vec<_> = self.0.iter().map(|l| l.symbol()).collect();
        write!(f, "{}", parts.join("*"))
    }
}

/// Gaussian-rational linear combination of spin words.
///
/// Every letter implicitly carries a factor `N^{-1/2}` when the polynomial is
/// traced over `N` sites; the stored coefficients never include it.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SpinPolynomial {
    terms: BTreeMap<SpinWord, GaussianRational>,
}

impl SpinPolynomial {
    pub fn zero() -> Self {
        SpinPolynomial::default()
    }

    pub fn identity() -> Self {
        Self::constant(real(BigRational::one()))
    }

    pub fn constant(c: GaussianRational) -> Self {
        Self::monomial(SpinWord::identity(), c)
    }

    pub fn monomial(word: SpinWord, c: GaussianRational) -> Self {
        let mut p = SpinPolynomial::zero();
        p.add_term(word, c);
        p
    }

    pub fn word(letters: impl Into<Vec<SpinLetter>>) -> Self {
        Self::monomial(SpinWord::new(letters), real(BigRational::one()))
    }

    pub fn letter(l: SpinLetter) -> Self {
        Self::word(vec![l])
    }

    pub fn plus() -> Self {
        Self::letter(SpinLetter::Plus)
    }

    pub fn minus() -> Self {
        Self::letter(SpinLetter::Minus)
    }

    pub fn sz() -> Self {
        Self::letter(SpinLetter::Z)
    }

    /// `Sx = (S+ + S-)/2`.
    pub fn sx() -> Self {
        (Self::plus() + Self::minus()).scale(&real(ratio(1, 2)))
    }

    /// `Sy = (S+ − S-)/(2i)`.
    pub fn sy() -> Self {
        (Self::plus() - Self::minus()).scale(&gaussian(BigRational::zero(), ratio(-1, 2)))
    }

    pub fn add_term(&mut self, word: SpinWord, c: GaussianRational) {
        if c.is_zero() {
            return;
        }
        match self.terms.entry(word) {
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

    pub fn terms(&self) -> impl Iterator<Item = (&SpinWord, &GaussianRational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, word: &SpinWord) -> GaussianRational {
        self.terms.get(word).cloned().unwrap_or_else(GaussianRational::zero)
    }

    pub fn degree(&self) -> usize {
        self.terms.keys().map(SpinWord::len).max().unwrap_or(0)
    }

    pub fn scale(&self, c: &GaussianRational) -> Self {
        let mut out = SpinPolynomial::zero();
        for (w, v) in &self.terms {
            out.add_term(w.clone(), v * c);
        }
        out
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::identity(), |acc, _| &acc * self)
    }

    /// Hermitian adjoint: words reversed with S+ and S- exchanged, coefficients conjugated.
    pub fn adjoint(&self) -> Self {
        let mut out = SpinPolynomial::zero();
        for (w, v) in &self.terms {
            out.add_term(w.adjoint(), v.conj());
        }
        out
    }

    pub fn contains_letter(&self, letter: SpinLetter) -> bool {
        self.terms.keys().any(|w| w.0.contains(&letter))
    }

    /// Canonical text form accepted back by the expression parser.
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let parts: Vec<String> = self
            .terms
            .iter()
            .map(|(w, c)| {
                let coeff = render_coefficient(c);
                if w.is_empty() {
                    coeff
                } else {
                    format!("{coeff}*{w}")
                }
            })
            .collect();
        parts.join(" + ")
    }
}

fn render_coefficient(c: &GaussianRational) -> String {
    let text = format_gaussian(c);
    // `a+bi` is written as `(a+b*i)` so the parser sees an explicit product
    match text.strip_suffix('i') {
        Some(body) => {
            let body = if body.is_empty() || body.ends_with(['+', '-']) {
                format!("{body}1")
            } else {
                body.to_string()
            };
            format!("({body}*i)")
        }
        None => format!("({text})"),
    }
}

impl fmt::Display for SpinPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render())
    }
}

impl Add for SpinPolynomial {
    type Output = SpinPolynomial;
    fn add(mut self, rhs: SpinPolynomial) -> SpinPolynomial {
        for (w, c) in rhs.terms {
            self.add_term(w, c);
        }
        self
    }
}

impl Sub for SpinPolynomial {
    type Output = SpinPolynomial;
    fn sub(self, rhs: SpinPolynomial) -> SpinPolynomial {
        self + (-rhs)
    }
}

impl Neg for SpinPolynomial {
    type Output = SpinPolynomial;
    fn neg(self) -> SpinPolynomial {
        self.scale(&real(-BigRational::one()))
    }
}

impl Mul for &SpinPolynomial {
    type Output = SpinPolynomial;
    fn mul(self, rhs: &SpinPolynomial) -> SpinPolynomial {
        let mut out = SpinPolynomial::zero();
        for (w1, c1) in &self.terms {
            for (w2, c2) in &rhs.terms {
                out.add_term(w1.concat(w2), c1 * c2);
            }
        }
        out
    }
}

impl Mul for SpinPolynomial {
    type Output = SpinPolynomial;
    fn mul(self, rhs: SpinPolynomial) -> SpinPolynomial {
        &self * &rhs
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use SpinLetter::*;

    #[test]
    fn canonical_order_is_length_then_lexicographic() {
        let a = SpinWord::new(vec![Z]);
        let b = SpinWord::new(vec![Plus, Minus]);
        let c = SpinWord::new(vec![Minus, Plus]);
        assert!(a < b && b < c);
    }

    #[test]
    fn cancellation_removes_terms() {
        let p = SpinPolynomial::plus() - SpinPolynomial::plus();
        assert!(p.is_empty());
    }

    #[test]
    fn sx_squared_has_four_words() {
        let p = SpinPolynomial::sx().pow(2);
        assert_eq!(p.len(), 4);
        assert_eq!(p.coefficient(&SpinWord::new(vec![Plus, Minus])), real(ratio(1, 4)));
    }

    #[test]
    fn adjoint_reverses_and_swaps() {
        let w = SpinWord::new(vec![Plus, Plus, Z, Minus]);
        assert_eq!(w.adjoint(), SpinWord::new(vec![Plus, Z, Minus, Minus]));
        let p = SpinPolynomial::sy();
        assert_eq!(p.adjoint(), p);
    }
}
