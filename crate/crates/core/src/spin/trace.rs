//! `2^{-N} tr` of spin polynomials by summing over total-spin sectors.
//!
//! A polynomial is compiled into *jobs*. A job is either a single word,
//! walked letter by letter through the ladder, or a monomial `A^a B^b Z^z`
//! in the commuting diagonal operators `A = S+S-`, `B = S-S+` and `Sz`
//! (the fast path). Every job yields an integer per basis state `|j,m⟩`;
//! sector sums are weighted by the multiplicity and combined exactly.

use std::collections::BTreeMap;

use num::complex::Complex;
use num::traits::{One, Signed, ToPrimitive, Zero};
use num::{BigInt, BigRational, BigUint};
use rayon::prelude::*;

use super::irrep::{sectors, word_diagonal, word_diagonal_big, IrrepSpec};
use super::word::{SpinLetter, SpinPolynomial, SpinWord};
use crate::error::{Error, Result};
use crate::exact::{decimal_string, gaussian_to_c64, rational_to_f64, real, sqrt_approx, GaussianRational};

/// Default cap on `Σ_j (2j+1) × (letters evaluated per basis state)`.
pub const DEFAULT_MAX_WORK: u64 = 20_000_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Arithmetic {
    Exact,
    /// binary64 with compensated summation; results are labeled approximate.
    Float,
}

#[derive(Clone, Debug)]
pub struct TraceOptions {
    pub max_work: u64,
    pub parallel: bool,
    pub fast_path: bool,
    pub arithmetic: Arithmetic,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            max_work: DEFAULT_MAX_WORK,
            parallel: true,
            fast_path: true,
            arithmetic: Arithmetic::Exact,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum TraceValue {
    /// `rational + inv_sqrt_n / √N`. Words of odd length only contribute to
    /// the second part.
    Exact {
        rational: GaussianRational,
        inv_sqrt_n: GaussianRational,
    },
    Float(Complex<f64>),
}

#[derive(Clone, Debug, PartialEq)]
pub struct TraceResult {
    pub n: u32,
    pub value: TraceValue,
}

impl TraceResult {
    pub fn exact_parts(n: u32, rational: GaussianRational, inv_sqrt_n: GaussianRational) -> Self {
        TraceResult {
            n,
            value: TraceValue::Exact { rational, inv_sqrt_n },
        }
    }

    pub fn is_approximate(&self) -> bool {
        matches!(self.value, TraceValue::Float(_))
    }

    /// The exact value when it is a Gaussian rational (no `1/√N` part, or `N` a perfect square).
    pub fn exact(&self) -> Option<GaussianRational> {
        match &self.value {
            TraceValue::Exact { rational, inv_sqrt_n } => {
                if inv_sqrt_n.is_zero() {
                    return Some(rational.clone());
                }
                let root = BigUint::from(self.n).sqrt();
                if &root * &root == BigUint::from(self.n) {
                    let r = real(BigRational::new(BigInt::one(), BigInt::from(root)));
                    Some(rational + inv_sqrt_n * r)
                } else {
                    None
                }
            }
            TraceValue::Float(_) => None,
        }
    }

    /// Rational approximation within `10^-digits` of the exact value.
    pub fn approximate_rational(&self, digits: u32) -> Option<GaussianRational> {
        match &self.value {
            TraceValue::Exact { rational, inv_sqrt_n } => {
                if inv_sqrt_n.is_zero() {
                    return Some(rational.clone());
                }
                // 1/√N = √N / N
                let mag = inv_sqrt_n.re.abs().max(inv_sqrt_n.im.abs());
                let extra = rational_to_f64(&mag).abs().log10().max(0.0).ceil() as u32;
                let root = sqrt_approx(&BigUint::from(self.n), digits + extra + 4);
                let inv = root / BigRational::from_integer(BigInt::from(self.n));
                Some(rational + inv_sqrt_n * real(inv))
            }
            TraceValue::Float(_) => None,
        }
    }

    pub fn to_c64(&self) -> Complex<f64> {
        match &self.value {
            TraceValue::Float(z) => *z,
            TraceValue::Exact { .. } => gaussian_to_c64(&self.approximate_rational(30).unwrap()),
        }
    }

    pub fn to_f64(&self) -> f64 {
        self.to_c64().re
    }

    /// Decimal rendering, round half to even. Float-path values are prefixed with `~`.
    pub fn decimal(&self, digits: usize) -> String {
        match &self.value {
            TraceValue::Float(z) => {
                if z.im == 0.0 {
                    format!("~{:.*}", digits, z.re)
                } else {
                    format!("~{:.*}{:+.*}i", digits, z.re, digits, z.im)
                }
            }
            TraceValue::Exact { .. } => {
                let v = self.approximate_rational(digits as u32 + 6).unwrap();
                let re = decimal_string(&v.re, digits);
                if v.im.is_zero() {
                    re
                } else {
                    let im = decimal_string(&v.im, digits);
                    let sign = if im.starts_with('-') { "" } else { "+" };
                    format!("{re}{sign}{im}i")
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Job {
    Word(Vec<SpinLetter>),
    /// `A^a B^b (2Sz)^z`, with `A = S+S-` and `B = S-S+`.
    Monomial { a: u32, b: u32, z: u32 },
}

impl Job {
    fn cost(&self) -> u64 {
        match self {
            Job::Word(l) => l.len().max(1) as u64,
            Job::Monomial { a, b, z } => (*a + *b + *z).max(1) as u64,
        }
    }

    #[inline]
    pub(crate) fn value_small(&self, tj: i64, tm: i64) -> Option<i128> {
        match self {
            Job::Word(letters) => word_diagonal(letters, tj, tm),
            Job::Monomial { a, b, z } => {
                let (av, bv) = diagonal_pair(tj, tm);
                (av as i128)
                    .checked_pow(*a)?
                    .checked_mul((bv as i128).checked_pow(*b)?)?
                    .checked_mul((tm as i128).checked_pow(*z)?)
            }
        }
    }

    pub(crate) fn value_big(&self, tj: i64, tm: i64) -> BigInt {
        match self {
            Job::Word(letters) => word_diagonal_big(letters, tj, tm),
            Job::Monomial { a, b, z } => {
                let (av, bv) = diagonal_pair(tj, tm);
                num::pow(BigInt::from(av), *a as usize)
                    * num::pow(BigInt::from(bv), *b as usize)
                    * num::pow(BigInt::from(tm), *z as usize)
            }
        }
    }
}

/// Eigenvalues of `S+S-` and `S-S+` on `|j,m⟩`: `(j+m)(j−m+1)` and `(j−m)(j+m+1)`.
#[inline]
pub(crate) fn diagonal_pair(tj: i64, tm: i64) -> (i64, i64) {
    let jp = (tj + tm) / 2;
    let jm = (tj - tm) / 2;
    (jp * (jm + 1), jm * (jp + 1))
}

/// Splits a word into adjacent `S+S-`, `S-S+` and `Sz` blocks, if possible.
fn diagonal_blocks(letters: &[SpinLetter]) -> Option<(u32, u32, u32)> {
    let (mut a, mut b, mut z) = (0, 0, 0);
    let mut i = 0;
    while i < letters.len() {
        match (letters[i], letters.get(i + 1)) {
            (SpinLetter::Z, _) => {
                z += 1;
                i += 1;
            }
            (SpinLetter::Plus, Some(SpinLetter::Minus)) => {
                a += 1;
                i += 2;
            }
            (SpinLetter::Minus, Some(SpinLetter::Plus)) => {
                b += 1;
                i += 2;
            }
            _ => return None,
        }
    }
    Some((a, b, z))
}

/// A polynomial lowered to jobs, ready to be evaluated per basis state.
pub(crate) struct Compiled {
    pub jobs: Vec<Job>,
    /// Per job: coefficient of the raw job total in the rational part and in
    /// the `1/√N` part, before the overall `2^{-N}`.
    pub scalings: Vec<(GaussianRational, GaussianRational)>,
    /// Each input word with a zero-free trace, mapped to its job and its
    /// scaling `1 / (2^{#Z} N^{⌊L/2⌋})` with the parity of `L`.
    pub words: Vec<(SpinWord, usize, BigRational, bool)>,
}

impl Compiled {
    pub fn new(n: u32, poly: &SpinPolynomial, fast_path: bool) -> Self {
        let mut index: BTreeMap<Job, usize> = BTreeMap::new();
        let mut jobs = Vec::new();
        let mut scalings: Vec<(GaussianRational, GaussianRational)> = Vec::new();
        let mut words = Vec::new();
        let big_n = BigInt::from(n);
        for (word, coeff) in poly.terms() {
            // unbalanced words move every |j,m> off the diagonal
            if word.twice_shift() != 0 {
                continue;
            }
            let letters = word.letters();
            let job = match (fast_path, diagonal_blocks(letters)) {
                (true, Some((a, b, z))) => Job::Monomial { a, b, z },
                _ => Job::Word(letters.to_vec()),
            };
            let k = *index.entry(job.clone()).or_insert_with(|| {
                jobs.push(job);
                scalings.push((GaussianRational::zero(), GaussianRational::zero()));
                jobs.len() - 1
            });
            let len = word.len();
            let denom = (BigInt::one() << word.count(SpinLetter::Z)) * num::pow(big_n.clone(), len / 2);
            let scale = BigRational::new(BigInt::one(), denom);
            let contribution = coeff * real(scale.clone());
            if len % 2 == 0 {
                scalings[k].0 += contribution;
            } else {
                scalings[k].1 += contribution;
            }
            words.push((word.clone(), k, scale, len % 2 == 1));
        }
        Compiled { jobs, scalings, words }
    }

    pub fn work(&self, sectors: &[IrrepSpec]) -> u64 {
        let per_state: u64 = self.jobs.iter().map(Job::cost).sum();
        let states: u64 = sectors.iter().map(|s| s.dimension() as u64).sum();
        states.saturating_mul(per_state)
    }

    /// `Σ_m value(j, m)` for every job.
    pub fn sector_sums(&self, twice_j: u32) -> Vec<BigInt> {
        let tj = twice_j as i64;
        self.jobs
            .iter()
            .map(|job| {
                let mut acc: i128 = 0;
                let mut tm = -tj;
                while tm <= tj {
                    match job.value_small(tj, tm).and_then(|v| acc.checked_add(v)) {
                        Some(next) => acc = next,
                        None => return big_sector_sum(job, tj),
                    }
                    tm += 2;
                }
                BigInt::from(acc)
            })
            .collect()
    }

    /// `Σ_m value(j, m)` for every job, in binary64 with Neumaier summation.
    pub fn sector_sums_f64(&self, twice_j: u32) -> Vec<f64> {
        let tj = twice_j as i64;
        self.jobs
            .iter()
            .map(|job| {
                let mut sum = NeumaierSum::default();
                let mut tm = -tj;
                while tm <= tj {
                    let v = match job.value_small(tj, tm) {
                        Some(v) => v as f64,
                        None => job.value_big(tj, tm).to_f64().unwrap_or(f64::NAN),
                    };
                    sum.add(v);
                    tm += 2;
                }
                sum.value()
            })
            .collect()
    }
}

fn big_sector_sum(job: &Job, tj: i64) -> BigInt {
    let mut acc = BigInt::zero();
    let mut tm = -tj;
    while tm <= tj {
        acc += job.value_big(tj, tm);
        tm += 2;
    }
    acc
}

#[derive(Default, Clone, Copy)]
pub(crate) struct NeumaierSum {
    sum: f64,
    compensation: f64,
}

impl NeumaierSum {
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.compensation += (self.sum - t) + x;
        } else {
            self.compensation += (x - t) + self.sum;
        }
        self.sum = t;
    }

    pub fn value(&self) -> f64 {
        self.sum + self.compensation
    }
}

fn check_budget(compiled: &Compiled, secs: &[IrrepSpec], opts: &TraceOptions) -> Result<()> {
    let work = compiled.work(secs);
    if work > opts.max_work {
        return Err(Error::Resource(format!(
            "estimated work {work} exceeds budget {}",
            opts.max_work
        )));
    }
    Ok(())
}

/// Raw job totals `Σ_j d(N,j) Σ_m value(j,m)`.
fn job_totals(compiled: &Compiled, secs: &[IrrepSpec], parallel: bool) -> Vec<BigInt> {
    let per_sector = |s: &IrrepSpec| -> Vec<BigInt> {
        let mult = BigInt::from(s.multiplicity.clone());
        compiled
            .sector_sums(s.twice_j)
            .into_iter()
            .map(|v| v * &mult)
            .collect()
    };
    let zero = || vec![BigInt::zero(); compiled.jobs.len()];
    let add = |mut acc: Vec<BigInt>, v: Vec<BigInt>| {
        for (a, b) in acc.iter_mut().zip(v) {
            *a += b;
        }
        acc
    };
    if parallel {
        secs.par_iter().map(per_sector).reduce(zero, add)
    } else {
        secs.iter().map(per_sector).fold(zero(), add)
    }
}

/// Normalized trace `2^{-N} tr P(S+/√N, S-/√N, Sz/√N)`.
pub fn normalized_trace(n: u32, poly: &SpinPolynomial) -> Result<TraceResult> {
    normalized_trace_with(n, poly, &TraceOptions::default())
}

pub fn normalized_trace_with(n: u32, poly: &SpinPolynomial, opts: &TraceOptions) -> Result<TraceResult> {
    let secs = sectors(n)?;
    let compiled = Compiled::new(n, poly, opts.fast_path);
    check_budget(&compiled, &secs, opts)?;
    match opts.arithmetic {
        Arithmetic::Exact => {
            let totals = job_totals(&compiled, &secs, opts.parallel);
            let dim = BigRational::from_integer(BigInt::one() << n);
            let mut rational = GaussianRational::zero();
            let mut inv_sqrt_n = GaussianRational::zero();
            for (t, (even, odd)) in totals.iter().zip(&compiled.scalings) {
                let t = real(BigRational::from_integer(t.clone()) / &dim);
                rational += &t * even;
                inv_sqrt_n += &t * odd;
            }
            Ok(TraceResult::exact_parts(n, rational, inv_sqrt_n))
        }
        Arithmetic::Float => Ok(float_trace(n, &compiled, &secs, opts.parallel)),
    }
}

fn float_trace(n: u32, compiled: &Compiled, secs: &[IrrepSpec], parallel: bool) -> TraceResult {
    let dim = BigInt::one() << n;
    let per_sector = |s: &IrrepSpec| -> Vec<f64> {
        let weight = rational_to_f64(&BigRational::new(BigInt::from(s.multiplicity.clone()), dim.clone()));
        compiled
            .sector_sums_f64(s.twice_j)
            .into_iter()
            .map(|v| v * weight)
            .collect()
    };
    let rows: Vec<Vec<f64>> = if parallel {
        secs.par_iter().map(per_sector).collect()
    } else {
        secs.iter().map(per_sector).collect()
    };
    let inv_sqrt = 1.0 / (n as f64).sqrt();
    let mut re = NeumaierSum::default();
    let mut im = NeumaierSum::default();
    for (k, (even, odd)) in compiled.scalings.iter().enumerate() {
        let mut total = NeumaierSum::default();
        for row in &rows {
            total.add(row[k]);
        }
        let c = gaussian_to_c64(even) + gaussian_to_c64(odd) * inv_sqrt;
        let v = c * total.value();
        re.add(v.re);
        im.add(v.im);
    }
    TraceResult {
        n,
        value: TraceValue::Float(Complex::new(re.value(), im.value())),
    }
}

/// Exact normalized trace of each word separately (coefficient 1, same
/// scaling convention). Words may repeat.
pub fn word_traces(n: u32, words: &[SpinWord], opts: &TraceOptions) -> Result<Vec<TraceResult>> {
    let secs = sectors(n)?;
    let mut poly = SpinPolynomial::zero();
    for w in words {
        poly.add_term(w.clone(), real(BigRational::one()));
    }
    let compiled = Compiled::new(n, &poly, opts.fast_path);
    check_budget(&compiled, &secs, opts)?;
    let totals = job_totals(&compiled, &secs, opts.parallel);
    let dim = BigRational::from_integer(BigInt::one() << n);
    let lookup: BTreeMap<&SpinWord, (usize, &BigRational, bool)> = compiled
        .words
        .iter()
        .map(|(w, k, s, odd)| (w, (*k, s, *odd)))
        .collect();
    Ok(words
        .iter()
        .map(|w| match lookup.get(w) {
            Some(&(k, scale, odd)) => {
                let v = real(BigRational::from_integer(totals[k].clone()) * scale / &dim);
                if odd {
                    TraceResult::exact_parts(n, GaussianRational::zero(), v)
                } else {
                    TraceResult::exact_parts(n, v, GaussianRational::zero())
                }
            }
            None => TraceResult::exact_parts(n, GaussianRational::zero(), GaussianRational::zero()),
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use SpinLetter::*;

    fn exact(n: u32, p: &SpinPolynomial) -> GaussianRational {
        normalized_trace(n, p).unwrap().exact().unwrap()
    }

    #[test]
    fn identity_and_empty() {
        for n in [1, 2, 7, 40] {
            assert_eq!(exact(n, &SpinPolynomial::identity()), real(int(1)));
            assert_eq!(exact(n, &SpinPolynomial::zero()), real(int(0)));
        }
    }

    #[test]
    fn sx_squared_is_a_quarter() {
        let p = SpinPolynomial::sx().pow(2);
        for n in [1, 3, 8, 33] {
            assert_eq!(exact(n, &p), real(ratio(1, 4)));
        }
    }

    #[test]
    fn odd_powers_vanish() {
        assert_eq!(exact(6, &SpinPolynomial::sx().pow(3)), real(int(0)));
        assert_eq!(exact(6, &SpinPolynomial::sz().pow(5)), real(int(0)));
    }

    #[test]
    fn odd_length_words_carry_inverse_sqrt_n() {
        // N = 1: tr(s+ s- sz)/2 = 1/4
        let p = SpinPolynomial::word(vec![Plus, Minus, Z]);
        assert_eq!(exact(1, &p), real(ratio(1, 4)));
        // N = 2: tr(S+S-Sz) = 2, so 2/4 · 2^{-3/2}: not rational
        let r = normalized_trace(2, &p).unwrap();
        assert!(r.exact().is_none());
        assert!((r.to_f64() - 0.5 / 8f64.sqrt()).abs() < 1e-15);
        // N = 4 is a perfect square
        assert!(normalized_trace(4, &p).unwrap().exact().is_some());
    }

    #[test]
    fn fast_path_agrees_with_word_walk() {
        let a = SpinPolynomial::plus() * SpinPolynomial::minus();
        let b = SpinPolynomial::minus() * SpinPolynomial::plus();
        let p = (a + b + SpinPolynomial::sz()).pow(3);
        let slow = TraceOptions { fast_path: false, ..Default::default() };
        for n in [1, 2, 5, 16, 31] {
            let fast = normalized_trace(n, &p).unwrap();
            let walk = normalized_trace_with(n, &p, &slow).unwrap();
            assert_eq!(fast, walk);
        }
    }

    #[test]
    fn float_path_is_labeled_and_close() {
        let p = SpinPolynomial::sx().pow(4);
        let opts = TraceOptions { arithmetic: Arithmetic::Float, ..Default::default() };
        let f = normalized_trace_with(50, &p, &opts).unwrap();
        assert!(f.is_approximate());
        assert!(f.decimal(6).starts_with('~'));
        let e = normalized_trace(50, &p).unwrap();
        assert!((f.to_f64() - e.to_f64()).abs() < 1e-13);
    }

    #[test]
    fn budget_is_enforced() {
        let p = SpinPolynomial::sx().pow(6);
        let opts = TraceOptions { max_work: 1000, ..Default::default() };
        assert!(matches!(normalized_trace_with(200, &p, &opts), Err(Error::Resource(_))));
    }

    #[test]
    fn serial_and_parallel_agree() {
        let p = SpinPolynomial::sy().pow(4) + SpinPolynomial::sz().pow(2);
        let serial = TraceOptions { parallel: false, ..Default::default() };
        assert_eq!(
            normalized_trace(41, &p).unwrap(),
            normalized_trace_with(41, &p, &serial).unwrap()
        );
    }

    #[test]
    fn decimal_rendering() {
        let r = TraceResult::exact_parts(3, real(ratio(2, 3)), GaussianRational::zero());
        assert_eq!(r.decimal(3), "0.667");
        let c = TraceResult::exact_parts(3, crate::exact::gaussian(ratio(1, 2), ratio(-1, 4)), GaussianRational::zero());
        assert_eq!(c.decimal(2), "0.50-0.25i");
    }

    #[test]
    fn per_word_traces() {
        let words = vec![
            SpinWord::new(vec![Plus, Minus]),
            SpinWord::new(vec![Minus, Plus]),
            SpinWord::new(vec![Plus]),
        ];
        let t = word_traces(10, &words, &TraceOptions::default()).unwrap();
        // tr(S+S-)/(2^N N) = <S^2 - Sz^2 + Sz>/N = 1/2
        assert_eq!(t[0].exact().unwrap(), real(ratio(1, 2)));
        assert_eq!(t[1].exact().unwrap(), real(ratio(1, 2)));
        assert_eq!(t[2].exact().unwrap(), real(int(0)));
    }
}
