//! Spin traces against their oscillator images.
//!
//! `S+/√N ↦ z*`, `S-/√N ↦ z` with letters commuting, then `𝒩` places every
//! `a†` left. The finite-`N` trace approaches the thermal expectation at
//! `x = 1/3`; a report records how fast.

use num::traits::{Signed, Zero};
use num::BigRational;
use serde::Serialize;

use crate::boson::{normal_order_symbol, BosonSymbol, NormalForm};
use crate::error::{Error, Result};
use crate::exact::{decimal_string, format_gaussian, gaussian_to_c64, real, GaussianRational};
use crate::moments::polynomial_expectation;
use crate::spin::{normalized_trace_with, word_traces, SpinLetter, SpinPolynomial, SpinWord, TraceOptions, TraceResult};
use crate::thermal::{thermal_expect, ThermalState};

/// Longest word `ordering_sensitivity` will permute.
pub const MAX_PERMUTED_LETTERS: usize = 10;

#[derive(Clone, Debug, Serialize)]
pub struct ConvergenceReport {
    pub n_values: Vec<u32>,
    pub spin_values: Vec<String>,
    pub boson_value: String,
    pub abs_errors: Vec<f64>,
    /// `p` in `error ≈ C N^{−p}`, from a least-squares line through the
    /// nonzero errors on log-log axes.
    pub fitted_rate: Option<f64>,
    #[serde(skip)]
    pub spin_results: Vec<TraceResult>,
    #[serde(skip)]
    pub boson_exact: GaussianRational,
}

impl ConvergenceReport {
    fn assemble(n_values: &[u32], spin: Vec<TraceResult>, boson: GaussianRational, digits: usize) -> Self {
        let abs_errors: Vec<f64> = spin
            .iter()
            .map(|t| match t.approximate_rational(40) {
                Some(v) => gaussian_to_c64(&(v - &boson)).norm(),
                None => (t.to_c64() - gaussian_to_c64(&boson)).norm(),
            })
            .collect();
        let boson_value = if boson.im.is_zero() {
            decimal_string(&boson.re, digits)
        } else {
            format_gaussian(&boson)
        };
        ConvergenceReport {
            n_values: n_values.to_vec(),
            spin_values: spin.iter().map(|t| t.decimal(digits)).collect(),
            boson_value,
            fitted_rate: fit_rate(n_values, &abs_errors),
            abs_errors,
            spin_results: spin,
            boson_exact: boson,
        }
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(self).expect("report serializes")
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(["N", "spin_value", "boson_value", "abs_error"]).unwrap();
        for ((n, s), e) in self.n_values.iter().zip(&self.spin_values).zip(&self.abs_errors) {
            w.write_record([n.to_string(), s.clone(), self.boson_value.clone(), format!("{e:e}")])
                .unwrap();
        }
        String::from_utf8(w.into_inner().unwrap()).unwrap()
    }

    /// Errors strictly decrease along the ladder.
    pub fn is_decreasing(&self) -> bool {
        self.abs_errors.windows(2).all(|w| w[1] < w[0])
    }
}

pub fn fit_rate(n_values: &[u32], errors: &[f64]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = n_values
        .iter()
        .zip(errors)
        .filter(|(_, &e)| e > 0.0 && e.is_finite())
        .map(|(&n, &e)| ((n as f64).ln(), e.ln()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let k = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / k;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}

/// Commuting symbol of a `Plus`/`Minus` polynomial.
pub fn spin_symbol(poly: &SpinPolynomial) -> Result<BosonSymbol> {
    let mut sym = BosonSymbol::zero();
    for (word, c) in poly.terms() {
        if word.count(SpinLetter::Z) > 0 {
            return Err(Error::Domain(format!(
                "term '{word}' contains Sz; use the position sector for Sz polynomials"
            )));
        }
        sym.add_term(
            word.count(SpinLetter::Plus) as u32,
            word.count(SpinLetter::Minus) as u32,
            c.clone(),
        );
    }
    Ok(sym)
}

pub fn boson_image(poly: &SpinPolynomial) -> Result<NormalForm> {
    Ok(normal_order_symbol(&spin_symbol(poly)?))
}

fn check_ladder(n_values: &[u32]) -> Result<()> {
    if n_values.is_empty() {
        return Err(Error::Domain("at least one N is required".into()));
    }
    if n_values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Domain("N values must be strictly ascending".into()));
    }
    Ok(())
}

fn spin_ladder(poly: &SpinPolynomial, n_values: &[u32], opts: &TraceOptions) -> Result<Vec<TraceResult>> {
    n_values.iter().map(|&n| normalized_trace_with(n, poly, opts)).collect()
}

pub fn verify_theorem(
    poly: &SpinPolynomial,
    n_values: &[u32],
    opts: &TraceOptions,
    digits: usize,
) -> Result<ConvergenceReport> {
    check_ladder(n_values)?;
    let boson = thermal_expect(&ThermalState::bosonization(), &boson_image(poly)?);
    let spin = spin_ladder(poly, n_values, opts)?;
    Ok(ConvergenceReport::assemble(n_values, spin, boson, digits))
}

/// `Σ_k c_k (Sz/√N)^k` against `⟨f(x)⟩` in the oscillator ground state.
pub fn position_sector(
    coeffs: &[BigRational],
    n_values: &[u32],
    opts: &TraceOptions,
    digits: usize,
) -> Result<ConvergenceReport> {
    check_ladder(n_values)?;
    let mut poly = SpinPolynomial::zero();
    for (k, c) in coeffs.iter().enumerate() {
        poly.add_term(SpinWord::new(vec![SpinLetter::Z; k]), real(c.clone()));
    }
    let boson = real(polynomial_expectation(coeffs));
    let spin = spin_ladder(&poly, n_values, opts)?;
    Ok(ConvergenceReport::assemble(n_values, spin, boson, digits))
}

/// All distinct rearrangements of a multiset of letters.
fn distinct_orderings(word: &SpinWord) -> Vec<SpinWord> {
    let mut letters = word.letters().to_vec();
    letters.sort();
    let mut out = vec![SpinWord::new(letters.clone())];
    // lexicographic next permutation
    while let Some(i) = (1..letters.len()).rev().find(|&i| letters[i - 1] < letters[i]) {
        let j = (i..letters.len()).rev().find(|&j| letters[j] > letters[i - 1]).unwrap();
        letters.swap(i - 1, j);
        letters[i..].reverse();
        out.push(SpinWord::new(letters.clone()));
    }
    out
}

/// Largest `|c| · |tr w − tr w'|` over terms `c·w` and reorderings `w'` of `w`.
pub fn ordering_sensitivity(poly: &SpinPolynomial, n: u32, opts: &TraceOptions) -> Result<f64> {
    let mut worst = 0.0f64;
    for (word, c) in poly.terms() {
        if word.len() > MAX_PERMUTED_LETTERS {
            return Err(Error::Resource(format!(
                "word of length {} exceeds the {MAX_PERMUTED_LETTERS}-letter reordering cap",
                word.len()
            )));
        }
        let orderings = distinct_orderings(word);
        if orderings.len() < 2 {
            continue;
        }
        let values: Vec<GaussianRational> = word_traces(n, &orderings, opts)?
            .iter()
            .map(|t| t.approximate_rational(40).expect("exact arithmetic"))
            .collect();
        let scale = gaussian_to_c64(c).norm();
        for (i, a) in values.iter().enumerate() {
            for b in &values[i + 1..] {
                let d = a - b;
                let mag = if d.im.is_zero() {
                    crate::exact::rational_to_f64(&d.re.abs())
                } else {
                    gaussian_to_c64(&d).norm()
                };
                worst = worst.max(scale * mag);
            }
        }
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::{int, ratio};
    use crate::spin::SpinLetter::{Minus, Plus};

    fn xy_sum() -> SpinPolynomial {
        SpinPolynomial::word(vec![Plus, Minus]) + SpinPolynomial::word(vec![Minus, Plus])
    }

    #[test]
    fn images() {
        assert_eq!(
            boson_image(&xy_sum().pow(5)).unwrap(),
            NormalForm::monomial(5, 5, real(int(32)))
        );
        assert_eq!(boson_image(&SpinPolynomial::identity()).unwrap(), NormalForm::one());
        assert_eq!(
            boson_image(&SpinPolynomial::word(vec![Minus, Plus])).unwrap(),
            NormalForm::monomial(1, 1, real(int(1)))
        );
        assert!(boson_image(&SpinPolynomial::sz()).is_err());
    }

    #[test]
    fn quadratic_case_matches_for_every_n() {
        let r = verify_theorem(&xy_sum(), &[10, 50, 300], &TraceOptions::default(), 6).unwrap();
        assert_eq!(r.boson_exact, real(int(1)));
        for (t, e) in r.spin_results.iter().zip(&r.abs_errors) {
            // (S+S- + S-S+)/N = 2(Sx² + Sy²)/N has trace exactly 1
            assert_eq!(t.exact().unwrap(), real(int(1)));
            assert_eq!(*e, 0.0);
        }
        assert_eq!(r.fitted_rate, None);
    }

    #[test]
    fn odd_polynomial_vanishes() {
        let p = SpinPolynomial::word(vec![Plus, Plus, Minus]);
        let r = verify_theorem(&p, &[8, 16], &TraceOptions::default(), 6).unwrap();
        assert!(r.abs_errors.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn ladder_validation() {
        assert!(verify_theorem(&xy_sum(), &[20, 10], &TraceOptions::default(), 3).is_err());
        assert!(verify_theorem(&xy_sum(), &[], &TraceOptions::default(), 3).is_err());
    }

    #[test]
    fn position_sector_quadratic_and_quartic() {
        let x2 = vec![int(0), int(0), int(1)];
        let r = position_sector(&x2, &[16, 32, 64], &TraceOptions::default(), 8).unwrap();
        assert!(r.spin_results.iter().all(|t| t.exact().unwrap() == real(ratio(1, 4))));
        let x4 = vec![int(0), int(0), int(0), int(0), int(1)];
        let r = position_sector(&x4, &[16, 32, 64, 128], &TraceOptions::default(), 8).unwrap();
        assert_eq!(r.boson_exact, real(ratio(3, 16)));
        assert!(r.is_decreasing());
        let rate = r.fitted_rate.unwrap();
        assert!((0.9..1.1).contains(&rate), "rate {rate}");
    }

    #[test]
    fn orderings() {
        let w = SpinWord::new(vec![Plus, Plus, Minus, Minus]);
        assert_eq!(distinct_orderings(&w).len(), 6);
        assert_eq!(distinct_orderings(&SpinWord::identity()).len(), 1);
    }

    #[test]
    fn ordering_sensitivity_examples() {
        let opts = TraceOptions::default();
        let pm = SpinPolynomial::word(vec![Plus, Minus]);
        assert_eq!(ordering_sensitivity(&pm, 100, &opts).unwrap(), 0.0);
        assert_eq!(ordering_sensitivity(&SpinPolynomial::identity(), 100, &opts).unwrap(), 0.0);
        let quartic = SpinPolynomial::word(vec![Plus, Plus, Minus, Minus]);
        let s = ordering_sensitivity(&quartic, 12, &opts).unwrap();
        assert!(s > 0.0 && s * 12.0 < 4.0, "{s}");
        let long = SpinPolynomial::word(vec![Plus; 11]);
        assert!(matches!(ordering_sensitivity(&long, 12, &opts), Err(Error::Resource(_))));
    }

    #[test]
    fn report_outputs() {
        let r = verify_theorem(&xy_sum(), &[4, 8], &TraceOptions::default(), 3).unwrap();
        let csv = r.to_csv();
        assert!(csv.starts_with("N,spin_value,boson_value,abs_error\n4,1.000,1.000,"));
        let json = r.to_json();
        assert_eq!(json["n_values"], serde_json::json!([4, 8]));
    }

    #[test]
    fn rate_fit_recovers_power() {
        let ns = [64, 128, 256, 512];
        let errs: Vec<f64> = ns.iter().map(|&n| 3.0 / n as f64).collect();
        assert!((fit_rate(&ns, &errs).unwrap() - 1.0).abs() < 1e-12);
    }
}
