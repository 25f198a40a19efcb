//! Independent check of the sector engine: traces computed directly in the
//! `2^N`-dimensional product basis of the individual spins.
//!
//! Each collective generator acts on a computational basis state as the sum
//! of its single-site Pauli-½ actions, with integer entries (`S±` has entries 1,
//! `2Sz` is diagonal with entries `±1` per site). The diagonal element
//! `⟨b|w|b⟩` is the overlap of the right half of the word applied to `|b⟩`
//! and the adjoint of the left half applied to `|b⟩`.

use std::collections::HashMap;

use num::traits::{One, Zero};
use num::{BigInt, BigRational};
use rayon::prelude::*;

use super::trace::{TraceResult, TraceValue};
use super::word::{SpinLetter, SpinPolynomial};
use crate::error::{Error, Result};
use crate::exact::{real, GaussianRational};

pub const DEFAULT_ORACLE_CAP: u32 = 14;

type SparseState = HashMap<u32, i128>;

fn apply_letter(letter: SpinLetter, n: u32, state: &SparseState) -> SparseState {
    let mut out = SparseState::with_capacity(state.len() * 2);
    for (&basis, &amp) in state {
        match letter {
            SpinLetter::Plus => {
                for site in 0..n {
                    if basis & (1 << site) == 0 {
                        *out.entry(basis | (1 << site)).or_default() += amp;
                    }
                }
            }
            SpinLetter::Minus => {
                for site in 0..n {
                    if basis & (1 << site) != 0 {
                        *out.entry(basis & !(1 << site)).or_default() += amp;
                    }
                }
            }
            SpinLetter::Z => {
                let twice_sz = 2 * basis.count_ones() as i128 - n as i128;
                if twice_sz != 0 {
                    *out.entry(basis).or_default() += amp * twice_sz;
                }
            }
        }
    }
    out.retain(|_, v| *v != 0);
    out
}

fn apply_letters(letters: &[SpinLetter], n: u32, basis: u32) -> SparseState {
    let mut state = SparseState::from([(basis, 1i128)]);
    for &l in letters.iter().rev() {
        if state.is_empty() {
            break;
        }
        state = apply_letter(l, n, &state);
    }
    state
}

/// `tr(w) · 2^{#Z}` for a single word, by explicit summation over all basis states.
fn raw_word_trace(letters: &[SpinLetter], n: u32) -> BigInt {
    let split = letters.len() / 2;
    let (left, right) = letters.split_at(split);
    let left_adjoint: Vec<SpinLetter> = left.iter().rev().map(|l| l.adjoint()).collect();
    (0..(1u32 << n))
        .into_par_iter()
        .map(|basis| {
            let ket = apply_letters(right, n, basis);
            if ket.is_empty() {
                return BigInt::zero();
            }
            let bra = apply_letters(&left_adjoint, n, basis);
            let overlap: i128 = ket
                .iter()
                .filter_map(|(k, v)| bra.get(k).map(|u| u * v))
                .sum();
            BigInt::from(overlap)
        })
        .sum()
}

/// Normalized trace computed in the product basis. Refuses `N > cap`.
pub fn dense_oracle_trace(n: u32, poly: &SpinPolynomial, cap: u32) -> Result<TraceResult> {
    if n == 0 {
        return Err(Error::Domain("site count must be at least 1".into()));
    }
    if n > cap {
        return Err(Error::Resource(format!(
            "oracle needs 2^{n} basis states; N = {n} exceeds the oracle cap {cap}"
        )));
    }
    if n > 30 {
        return Err(Error::Resource("oracle basis index limited to 30 sites".into()));
    }
    let dim = BigInt::one() << n;
    let big_n = BigInt::from(n);
    let mut rational = GaussianRational::zero();
    let mut inv_sqrt_n = GaussianRational::zero();
    for (word, coeff) in poly.terms() {
        let letters = word.letters();
        let raw = raw_word_trace(letters, n);
        if raw.is_zero() {
            continue;
        }
        let z_count = word.count(SpinLetter::Z);
        let denom = (BigInt::one() << z_count) * &dim * num::pow(big_n.clone(), letters.len() / 2);
        let value = coeff * real(BigRational::new(raw, denom));
        if letters.len() % 2 == 0 {
            rational += value;
        } else {
            inv_sqrt_n += value;
        }
    }
    Ok(TraceResult {
        n,
        value: TraceValue::Exact { rational, inv_sqrt_n },
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use crate::spin::trace::normalized_trace;

    #[test]
    fn sz_squared_two_sites() {
        let r = dense_oracle_trace(2, &SpinPolynomial::sz().pow(2), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.exact().unwrap(), real(ratio(1, 4)));
    }

    #[test]
    fn raising_operator_is_traceless() {
        let r = dense_oracle_trace(1, &SpinPolynomial::plus(), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.exact().unwrap(), real(int(0)));
    }

    #[test]
    fn sx_squared_eight_sites() {
        let r = dense_oracle_trace(8, &SpinPolynomial::sx().pow(2), DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(r.exact().unwrap(), real(ratio(1, 4)));
    }

    #[test]
    fn cap_refusal() {
        let err = dense_oracle_trace(15, &SpinPolynomial::identity(), 14).unwrap_err();
        assert!(matches!(err, Error::Resource(_)));
    }

    #[test]
    fn matches_engine_on_mixed_polynomial() {
        let p = SpinPolynomial::sx().pow(2) * SpinPolynomial::sy().pow(2) + SpinPolynomial::sz().pow(3)
            - SpinPolynomial::word(vec![SpinLetter::Plus, SpinLetter::Z, SpinLetter::Minus]);
        for n in 1..=7 {
            assert_eq!(
                dense_oracle_trace(n, &p, DEFAULT_ORACLE_CAP).unwrap(),
                normalized_trace(n, &p).unwrap()
            );
        }
    }
}
