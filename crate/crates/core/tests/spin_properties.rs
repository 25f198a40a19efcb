mod common;

use num::traits::Zero;
use rand::Rng;

use common::{random_polynomial, random_word, rng, ALL_LETTERS};
use spinboson::exact::{int, ratio, real};
use spinboson::moments::limit_moment;
use spinboson::spin::{
    dense_oracle_trace, normalized_trace, normalized_trace_with, word_traces, Arithmetic, SpinLetter, SpinPolynomial,
    TraceOptions, TraceValue, DEFAULT_ORACLE_CAP,
};

#[test]
fn odd_powers_of_each_component_vanish() {
    let components = [SpinPolynomial::sx(), SpinPolynomial::sy(), SpinPolynomial::sz()];
    for n in 1..=12 {
        for c in &components {
            for l in 0..=4 {
                let t = normalized_trace(n, &c.pow(2 * l + 1)).unwrap();
                assert_eq!(t.exact().unwrap(), real(int(0)), "N={n} l={l}");
            }
        }
    }
}

#[test]
fn engine_matches_dense_oracle_on_random_polynomials() {
    let mut r = rng(7);
    for _ in 0..40 {
        let p = random_polynomial(&mut r, 6, &ALL_LETTERS, true);
        let n = r.gen_range(2..=10);
        let engine = normalized_trace(n, &p).unwrap();
        let oracle = dense_oracle_trace(n, &p, DEFAULT_ORACLE_CAP).unwrap();
        assert_eq!(engine, oracle, "N={n} p={p}");
    }
}

#[test]
fn word_plus_adjoint_has_real_trace() {
    let mut r = rng(11);
    for _ in 0..60 {
        let len = r.gen_range(0..=8);
        let w = random_word(&mut r, len, &ALL_LETTERS);
        let p = SpinPolynomial::word(w.letters().to_vec()) + SpinPolynomial::word(w.adjoint().letters().to_vec());
        let n = r.gen_range(1..=40);
        match normalized_trace(n, &p).unwrap().value {
            TraceValue::Exact { rational, inv_sqrt_n } => {
                assert!(rational.im.is_zero() && inv_sqrt_n.im.is_zero(), "{w}");
            }
            TraceValue::Float(_) => unreachable!(),
        }
    }
}

#[test]
fn quadratic_moment_is_exact_at_every_n() {
    for n in [1, 2, 7, 64, 333] {
        for c in [SpinPolynomial::sx(), SpinPolynomial::sy(), SpinPolynomial::sz()] {
            assert_eq!(normalized_trace(n, &c.pow(2)).unwrap().exact().unwrap(), real(limit_moment(1)));
        }
    }
}

#[test]
fn y_moments_converge_like_x_moments() {
    let ladder = [32, 64, 128, 256];
    for l in 2..=3 {
        let p = SpinPolynomial::sy().pow(2 * l);
        let x = SpinPolynomial::sx().pow(2 * l);
        let target = spinboson::exact::rational_to_f64(&limit_moment(l));
        let mut last = f64::INFINITY;
        for &n in &ladder {
            let ty = normalized_trace(n, &p).unwrap();
            // rotation about z maps Sx to Sy
            assert_eq!(ty, normalized_trace(n, &x).unwrap());
            let err = (ty.to_f64() - target).abs();
            assert!(err < last);
            last = err;
        }
    }
}

#[test]
fn cross_moments_factorize_exactly() {
    // mixed-site terms of (Sx/√N)^2 (Sz/√N)^2 are traceless, so 1/16 holds at every N
    for n in [1, 5, 64, 128, 256] {
        for q in [SpinPolynomial::sz(), SpinPolynomial::sy()] {
            let p = SpinPolynomial::sx().pow(2) * q.pow(2);
            assert_eq!(normalized_trace(n, &p).unwrap().exact().unwrap(), real(ratio(1, 16)), "N={n}");
        }
    }
    // quartic cross moments do carry 1/N corrections
    let p = SpinPolynomial::sx().pow(4) * SpinPolynomial::sz().pow(2);
    let target = 3.0 / 16.0 * 0.25;
    let errs: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| (normalized_trace(n, &p).unwrap().to_f64() - target).abs())
        .collect();
    assert!(errs[0] > 0.0 && errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
}

#[test]
fn float_path_tracks_exact_path() {
    let mut r = rng(3);
    let opts = TraceOptions {
        arithmetic: Arithmetic::Float,
        ..TraceOptions::default()
    };
    for _ in 0..10 {
        let p = random_polynomial(&mut r, 6, &ALL_LETTERS, false);
        let n = r.gen_range(50..=300);
        let exact = normalized_trace(n, &p).unwrap().to_c64();
        let approx = normalized_trace_with(n, &p, &opts).unwrap();
        assert!(approx.is_approximate());
        assert!((approx.to_c64() - exact).norm() <= 1e-10 * exact.norm().max(1.0), "{p}");
    }
}

#[test]
fn per_word_traces_sum_to_polynomial_trace() {
    let mut r = rng(5);
    let p = random_polynomial(&mut r, 6, &ALL_LETTERS, false);
    let words: Vec<_> = p.terms().map(|(w, _)| w.clone()).collect();
    let n = 17;
    let each = word_traces(n, &words, &TraceOptions::default()).unwrap();
    let mut total = num::complex::Complex64::new(0.0, 0.0);
    for ((_, c), t) in p.terms().zip(&each) {
        total += spinboson::exact::gaussian_to_c64(c) * t.to_c64();
    }
    assert!((total - normalized_trace(n, &p).unwrap().to_c64()).norm() < 1e-12);
}

#[test]
fn ladder_commutator_is_traceless() {
    let p = SpinPolynomial::word(vec![SpinLetter::Plus, SpinLetter::Minus])
        - SpinPolynomial::word(vec![SpinLetter::Minus, SpinLetter::Plus]);
    for n in [3, 10, 101] {
        assert_eq!(normalized_trace(n, &p).unwrap().exact().unwrap(), real(int(0)));
    }
    // [S+, S-] = 2 Sz, so the trace is 2 tr(Sz²)/(2^N N^{3/2}) = 1/(2√N)
    let q = p * SpinPolynomial::sz();
    match normalized_trace(9, &q).unwrap().value {
        TraceValue::Exact { rational, inv_sqrt_n } => {
            assert_eq!(rational, real(int(0)));
            assert_eq!(inv_sqrt_n, real(ratio(1, 2)));
        }
        TraceValue::Float(_) => unreachable!(),
    }
}
