mod common;

use num::complex::Complex64;
use num::traits::{One, Zero};
use num::{BigInt, BigRational};
use proptest::prelude::*;

use common::{random_symbol, rng};
use spinboson::boson::{
    exponential_series, normal_order_symbol, number_polynomial, stirling_first_row, stirling_first_signed,
    wick_reorder, BosonLetter, NormalForm, OperatorWord,
};
use spinboson::exact::{factorial, int, pow_rational, ratio, rational_to_f64, real};
use spinboson::moments::{
    characteristic_function_complex, complex_gaussian_expectation, gaussian_expectation, limit_moment,
    mixed_limit_moment, ComplexIntegrand, RealIntegrand, DEFAULT_TOLERANCE,
};
use spinboson::thermal::{polylog_negative, thermal_expect, ThermalState};

#[test]
fn stirling_expansion_matches_wick_reordering() {
    for n in 0..=8u32 {
        let mut via_number_powers = NormalForm::zero();
        for (l, b) in stirling_first_row(n).into_iter().enumerate() {
            let term = wick_reorder(&OperatorWord::number_power(l as u32));
            via_number_powers = via_number_powers.add(&term.scale(&real(BigRational::from_integer(b))));
        }
        assert_eq!(via_number_powers, wick_reorder(&OperatorWord::normal(n, n)), "n={n}");
        let scaled = number_polynomial(n).to_normal_form();
        assert_eq!(scaled, NormalForm::monomial(n, n, real(BigRational::from_integer(BigInt::one() << n))));
    }
}

#[test]
fn stirling_rows_from_binomial_generating_function() {
    // coefficient of t^k in (1+t)^u is C(u,k) = u(u−1)…(u−k+1)/k!
    for k in 0..=8u32 {
        for u in 0..=12i64 {
            let falling: BigInt = stirling_first_row(k)
                .iter()
                .enumerate()
                .map(|(l, c)| c * BigInt::from(u).pow(l as u32))
                .sum();
            assert_eq!(falling, spinboson::exact::binomial(u, k as i64) * factorial(k), "k={k} u={u}");
        }
        for l in 0..=k {
            assert_eq!(stirling_first_signed(k, l).unwrap(), stirling_first_row(k)[l as usize]);
        }
    }
}

#[test]
fn number_exponential_series_matches_closed_form() {
    for c in [ratio(-2, 5), ratio(-1, 4), ratio(1, 10), ratio(2, 5)] {
        let base = BigRational::one() + &c * int(2);
        for u in 0..=6 {
            let series = rational_to_f64(&exponential_series(&c, &int(u), 12));
            let closed = rational_to_f64(&pow_rational(&base, u as u32));
            assert!((series - closed).abs() < 1e-9, "c={c} u={u}");
        }
    }
}

fn letters() -> impl Strategy<Value = OperatorWord> {
    prop::collection::vec(prop_oneof![Just(BosonLetter::Create), Just(BosonLetter::Annihilate)], 0..9)
        .prop_map(OperatorWord::new)
}

proptest! {
    #[test]
    fn wick_reordering_commutes_with_adjoint(w in letters()) {
        prop_assert_eq!(wick_reorder(&w.adjoint()), wick_reorder(&w).adjoint());
    }

    #[test]
    fn wick_reordering_is_multiplicative(a in letters(), b in letters()) {
        let mut joined = a.0.clone();
        joined.extend(b.0.iter().copied());
        prop_assert_eq!(wick_reorder(&OperatorWord::new(joined)), wick_reorder(&a).mul(&wick_reorder(&b)));
    }
}

#[test]
fn factorial_moment_law() {
    for x in [ratio(1, 5), ratio(1, 3), ratio(1, 2)] {
        let s = ThermalState::new(x.clone()).unwrap();
        let nbar = &x / (BigRational::one() - &x);
        for n in 0..=6 {
            let got = thermal_expect(&s, &NormalForm::monomial(n, n, real(int(1))));
            assert_eq!(got, real(BigRational::from_integer(factorial(n)) * pow_rational(&nbar, n)));
        }
    }
}

#[test]
fn thermal_populations_against_polylogarithms() {
    for x in [ratio(1, 5), ratio(1, 3), ratio(1, 2)] {
        let xf = rational_to_f64(&x);
        for k in 0..=6 {
            // Li_{−k} starts at n = 1; the n = 0 level only contributes 0^0 for k = 0
            let truncated: f64 = (1..400).map(|n| (1.0 - xf) * xf.powi(n) * (n as f64).powi(k)).sum();
            let exact = rational_to_f64(&((BigRational::one() - &x) * polylog_negative(k as u32, &x).unwrap()));
            assert!((truncated - exact).abs() <= 1e-12 * exact.max(1.0), "x={x} k={k}");
        }
    }
}

#[test]
fn thermal_state_agrees_with_complex_gaussian_law() {
    let mut r = rng(21);
    let state = ThermalState::bosonization();
    for _ in 0..20 {
        let sym = random_symbol(&mut r, 10);
        let via_oscillator = thermal_expect(&state, &normal_order_symbol(&sym));
        let via_law = complex_gaussian_expectation(&ComplexIntegrand::Symbol(&sym), DEFAULT_TOLERANCE).unwrap();
        assert_eq!(via_law.exact, Some(via_oscillator));
    }
}

#[test]
fn characteristic_function_generates_the_moments() {
    // Φ^{(2n)}(0) = (2n)!/(2πi) ∮ Φ(z) z^{−2n−1} dz on |z| = r
    let r = 2.0f64;
    let points = 256;
    for n in 0..=6u32 {
        let k = 2 * n as i32;
        let mut acc = Complex64::zero();
        for j in 0..points {
            let theta = 2.0 * std::f64::consts::PI * j as f64 / points as f64;
            let z = Complex64::from_polar(r, theta);
            acc += characteristic_function_complex(z) * Complex64::from_polar(1.0, -(k as f64) * theta);
        }
        let coefficient = acc / points as f64 / r.powi(k);
        let derivative = coefficient.re * rational_to_f64(&BigRational::from_integer(factorial(2 * n)));
        let sign = if n % 2 == 0 { 1.0 } else { -1.0 };
        let expected = sign * rational_to_f64(&limit_moment(n));
        assert!((derivative - expected).abs() < 1e-6, "n={n}: {derivative} vs {expected}");
    }
}

#[test]
fn limit_moments_factorize_and_normalize() {
    for m in 0..=8 {
        for l in 0..=8 {
            assert_eq!(mixed_limit_moment(m, l), limit_moment(m) * limit_moment(l));
        }
    }
    let one = |_: f64| 1.0;
    let e = gaussian_expectation(&RealIntegrand::Function(&one), DEFAULT_TOLERANCE).unwrap();
    assert!((e.value - 1.0).abs() < 1e-12);
    let c1 = |_: Complex64| Complex64::new(1.0, 0.0);
    let e = complex_gaussian_expectation(&ComplexIntegrand::Function(&c1), DEFAULT_TOLERANCE).unwrap();
    assert!((e.value - 1.0).norm() < 1e-12);
    let off = spinboson::boson::BosonSymbol::monomial(4, 2, real(int(3)));
    let e = complex_gaussian_expectation(&ComplexIntegrand::Symbol(&off), DEFAULT_TOLERANCE).unwrap();
    assert_eq!(e.exact, Some(real(int(0))));
}
