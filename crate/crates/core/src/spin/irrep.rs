//! Total-spin sectors of `N` spin-½ sites and the ladder action inside a sector.
//!
//! Basis index `i` of a sector with total spin `j` is the state `|j, m = j − i⟩`,
//! so index 0 is the highest weight. Internally everything is kept in doubled
//! units (`2j`, `2m`) so that half-integers stay integral.

use std::collections::BTreeMap;

use num::traits::{One, Zero};
use num::{BigInt, BigRational, BigUint};

use super::word::{SpinLetter, SpinWord};
use crate::error::{Error, Result};
use crate::exact::SqrtRational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrrepSpec {
    pub twice_j: u32,
    pub multiplicity: BigUint,
}

impl IrrepSpec {
    pub fn dimension(&self) -> u32 {
        self.twice_j + 1
    }
}

fn check_sector(n: u32, twice_j: u32) -> Result<()> {
    if n == 0 {
        return Err(Error::Domain("site count must be at least 1".into()));
    }
    if twice_j > n || !(n - twice_j).is_multiple_of(2) {
        return Err(Error::Domain(format!(
            "2j = {twice_j} is not a total-spin sector of {n} spin-1/2 sites"
        )));
    }
    Ok(())
}

/// Number of copies of the spin-`j` irrep in `(½)^{⊗N}`:
/// `C(N, N/2 − j) − C(N, N/2 − j − 1)`.
pub fn irrep_multiplicity(n: u32, twice_j: u32) -> Result<BigUint> {
    check_sector(n, twice_j)?;
    let k = (n - twice_j) / 2;
    let upper = binomial_u(n, k);
    let lower = if k == 0 { BigUint::zero() } else { binomial_u(n, k - 1) };
    Ok(upper - lower)
}

fn binomial_u(n: u32, k: u32) -> BigUint {
    let k = k.min(n - k);
    let mut acc = BigUint::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

/// All sectors of `N` sites, smallest `j` first.
pub fn sectors(n: u32) -> Result<Vec<IrrepSpec>> {
    if n == 0 {
        return Err(Error::Domain("site count must be at least 1".into()));
    }
    // binomial row C(N, k) for k = 0 ..= N/2
    let half = n / 2;
    let mut row = Vec::with_capacity(half as usize + 1);
    let mut c = BigUint::one();
    row.push(c.clone());
    for k in 0..half {
        c = c * (n - k) / (k + 1);
        row.push(c.clone());
    }
    let mut out = Vec::with_capacity(half as usize + 1);
    for k in (0..=half).rev() {
        let twice_j = n - 2 * k;
        let lower = if k == 0 { BigUint::zero() } else { row[k as usize - 1].clone() };
        out.push(IrrepSpec {
            twice_j,
            multiplicity: &row[k as usize] - lower,
        });
    }
    Ok(out)
}

/// `(j − m)(j + m + 1)`: squared amplitude of the edge between `m` and `m + 1`.
#[inline]
pub(crate) fn edge_weight(twice_j: i64, twice_m: i64) -> i64 {
    ((twice_j - twice_m) / 2) * ((twice_j + twice_m) / 2 + 1)
}

/// Diagonal element `⟨j,m| w |j,m⟩ · 2^{#Z}` as an integer.
///
/// Each edge of a closed ladder path is crossed upward and downward equally
/// often, so the product of square-root amplitudes equals the product of the
/// squared amplitudes taken on the upward steps only. `None` on `i128` overflow.
pub(crate) fn word_diagonal(letters: &[SpinLetter], twice_j: i64, twice_m: i64) -> Option<i128> {
    let mut m = twice_m;
    let mut acc: i128 = 1;
    for &letter in letters.iter().rev() {
        match letter {
            SpinLetter::Plus => {
                if m >= twice_j {
                    return Some(0);
                }
                acc = acc.checked_mul(edge_weight(twice_j, m) as i128)?;
                m += 2;
            }
            SpinLetter::Minus => {
                if m <= -twice_j {
                    return Some(0);
                }
                m -= 2;
            }
            SpinLetter::Z => {
                if m == 0 {
                    return Some(0);
                }
                acc = acc.checked_mul(m as i128)?;
            }
        }
    }
    Some(if m == twice_m { acc } else { 0 })
}

pub(crate) fn word_diagonal_big(letters: &[SpinLetter], twice_j: i64, twice_m: i64) -> BigInt {
    let mut m = twice_m;
    let mut acc = BigInt::one();
    for &letter in letters.iter().rev() {
        match letter {
            SpinLetter::Plus => {
                if m >= twice_j {
                    return BigInt::zero();
                }
                acc *= edge_weight(twice_j, m);
                m += 2;
            }
            SpinLetter::Minus => {
                if m <= -twice_j {
                    return BigInt::zero();
                }
                m -= 2;
            }
            SpinLetter::Z => acc *= m,
        }
    }
    if m == twice_m {
        acc
    } else {
        BigInt::zero()
    }
}

/// Image of a basis vector under a word: at most one basis vector with an
/// exact coefficient of the form `q·√r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IrrepImage {
    pub entries: Vec<(usize, SqrtRational)>,
}

impl IrrepImage {
    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Applies `word` (rightmost letter first) to basis vector `index` of the
/// spin-`j` sector. Radicals are paired per ladder edge.
pub fn apply_word_in_irrep(word: &SpinWord, twice_j: u32, index: usize) -> Result<IrrepImage> {
    let dim = twice_j as usize + 1;
    if index >= dim {
        return Err(Error::Domain(format!(
            "basis index {index} outside sector of dimension {dim}"
        )));
    }
    let tj = twice_j as i64;
    let mut m = tj - 2 * index as i64;
    let mut crossings: BTreeMap<i64, u32> = BTreeMap::new();
    let mut rational = BigRational::one();
    for &letter in word.letters().iter().rev() {
        match letter {
            SpinLetter::Plus => {
                if m >= tj {
                    return Ok(IrrepImage { entries: vec![] });
                }
                *crossings.entry(m).or_default() += 1;
                m += 2;
            }
            SpinLetter::Minus => {
                if m <= -tj {
                    return Ok(IrrepImage { entries: vec![] });
                }
                m -= 2;
                *crossings.entry(m).or_default() += 1;
            }
            SpinLetter::Z => {
                rational *= BigRational::new(BigInt::from(m), BigInt::from(2));
            }
        }
    }
    if rational.is_zero() {
        return Ok(IrrepImage { entries: vec![] });
    }
    let mut radicand = BigInt::one();
    for (&edge, &count) in &crossings {
        let w = BigInt::from(edge_weight(tj, edge));
        rational *= BigRational::from_integer(num::pow(w.clone(), (count / 2) as usize));
        if count % 2 == 1 {
            radicand *= w;
        }
    }
    let coeff = SqrtRational::new(rational, &BigRational::from_integer(radicand))?;
    let target = ((tj - m) / 2) as usize;
    Ok(IrrepImage {
        entries: vec![(target, coeff)],
    })
}
