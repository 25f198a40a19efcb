//! Limit laws of the scaled collective spin operators: the real Gaussian with
//! mean 0 and standard deviation ½, and its complex counterpart with density
//! `(2/π) e^{−2|z|²}`.

use std::f64::consts::PI;

use num::complex::Complex64;
use num::traits::{One, Zero};
use num::{BigInt, BigRational};

use crate::boson::BosonSymbol;
use crate::error::{Error, Result};
use crate::exact::{factorial, gaussian_to_c64, rational_to_f64, real, GaussianRational};

pub const DEFAULT_TOLERANCE: f64 = 1e-12;

/// `|η|` cutoff for quadrature: 8 standard deviations of ½.
const REAL_CUTOFF: f64 = 4.0;
/// Radial cutoff for the complex law; `e^{−2R²} < 3·10⁻¹⁸`.
const RADIAL_CUTOFF: f64 = 4.5;

/// `(2ℓ)! / (2^{3ℓ} ℓ!)`.
pub fn limit_moment(l: u32) -> BigRational {
    BigRational::new(factorial(2 * l), (BigInt::one() << (3 * l)) * factorial(l))
}

/// `(2m)!(2ℓ)! / (2^{3ℓ+3m} ℓ! m!)`.
pub fn mixed_limit_moment(m: u32, l: u32) -> BigRational {
    BigRational::new(
        factorial(2 * m) * factorial(2 * l),
        (BigInt::one() << (3 * (l + m))) * factorial(l) * factorial(m),
    )
}

/// `Φ(t) = e^{−t²/8}`.
pub fn characteristic_function(t: f64) -> f64 {
    (-t * t / 8.0).exp()
}

/// `Φ` continued to complex arguments; it is entire.
pub fn characteristic_function_complex(t: Complex64) -> Complex64 {
    (-t * t / 8.0).exp()
}

/// Coefficient of `(it)^{2n}` in the moment series of `Φ`: `1/(2^{3n} n!)`.
pub fn characteristic_series_coefficient(n: u32) -> BigRational {
    BigRational::new(BigInt::one(), (BigInt::one() << (3 * n)) * factorial(n))
}

/// Real Gaussian law of the scaled `S_α/√N` in the large-`N` limit.
#[derive(Clone, Copy, Debug, Default)]
pub struct GaussianLaw;

impl GaussianLaw {
    pub const MEAN: f64 = 0.0;
    pub const STANDARD_DEVIATION: f64 = 0.5;

    pub fn density(&self, eta: f64) -> f64 {
        (2.0 / PI).sqrt() * (-2.0 * eta * eta).exp()
    }
}

/// Complex Gaussian law of `(S+/√N, S-/√N) ↦ (z*, z)`.
#[derive(Clone, Copy, Debug, Default)]
pub struct ComplexGaussianLaw;

impl ComplexGaussianLaw {
    pub fn density(&self, z: Complex64) -> f64 {
        2.0 / PI * (-2.0 * z.norm_sqr()).exp()
    }
}

pub enum RealIntegrand<'a> {
    /// Coefficients of `η^k`, lowest power first.
    Polynomial(Vec<BigRational>),
    Function(&'a dyn Fn(f64) -> f64),
}

pub enum ComplexIntegrand<'a> {
    Symbol(&'a BosonSymbol),
    Function(&'a dyn Fn(Complex64) -> Complex64),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Expectation {
    /// Present when the integrand was handled by the exact moment formulas.
    pub exact: Option<BigRational>,
    pub value: f64,
    pub error_estimate: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ComplexExpectation {
    pub exact: Option<GaussianRational>,
    pub value: Complex64,
    pub error_estimate: f64,
}

/// Exact `E[p(η)]` for a polynomial with rational coefficients.
pub fn polynomial_expectation(coeffs: &[BigRational]) -> BigRational {
    coeffs
        .iter()
        .enumerate()
        .filter(|(k, _)| k % 2 == 0)
        .map(|(k, c)| c * limit_moment(k as u32 / 2))
        .fold(BigRational::zero(), |a, b| a + b)
}

/// `√(2/π) ∫ f(η) e^{−2η²} dη`.
pub fn gaussian_expectation(f: &RealIntegrand<'_>, tolerance: f64) -> Result<Expectation> {
    match f {
        RealIntegrand::Polynomial(coeffs) => {
            let exact = polynomial_expectation(coeffs);
            Ok(Expectation {
                value: rational_to_f64(&exact),
                exact: Some(exact),
                error_estimate: 0.0,
            })
        }
        RealIntegrand::Function(f) => {
            let law = GaussianLaw;
            let out = quadrature::double_exponential::integrate(
                |eta| f(eta) * law.density(eta),
                -REAL_CUTOFF,
                REAL_CUTOFF,
                tolerance,
            );
            // mass beyond the cutoff, scaled by the integrand size at the edges
            let edge = f(REAL_CUTOFF).abs().max(f(-REAL_CUTOFF).abs()).max(1.0);
            let tail = erfc_bound(REAL_CUTOFF * 2f64.sqrt()) * edge;
            let residual = out.error_estimate + tail;
            if !out.integral.is_finite() || residual > tolerance {
                return Err(Error::Quadrature { residual, tolerance });
            }
            Ok(Expectation {
                exact: None,
                value: out.integral,
                error_estimate: residual,
            })
        }
    }
}

/// Upper bound `erfc(x) ≤ e^{−x²}/(x√π)` for `x > 0`.
fn erfc_bound(x: f64) -> f64 {
    (-x * x).exp() / (x * PI.sqrt())
}

/// Exact `(2/π)∬ z*^m z^n e^{−2|z|²}`: `m!/2^m` when `m = n`, else 0.
pub fn symbol_expectation(sym: &BosonSymbol) -> GaussianRational {
    sym.terms()
        .filter(|((m, n), _)| m == n)
        .map(|(&(m, _), c)| c * real(BigRational::new(factorial(m), BigInt::one() << m)))
        .fold(GaussianRational::zero(), |a, b| a + b)
}

/// `(2/π) ∬ g(z*, z) e^{−2|z|²} d²z`.
pub fn complex_gaussian_expectation(g: &ComplexIntegrand<'_>, tolerance: f64) -> Result<ComplexExpectation> {
    match g {
        ComplexIntegrand::Symbol(sym) => {
            let exact = symbol_expectation(sym);
            Ok(ComplexExpectation {
                value: gaussian_to_c64(&exact),
                exact: Some(exact),
                error_estimate: 0.0,
            })
        }
        ComplexIntegrand::Function(g) => {
            let worst = std::cell::Cell::new(0.0f64);
            let radial = |part: fn(Complex64) -> f64| {
                let out = quadrature::double_exponential::integrate(
                    |r| {
                        let inner = quadrature::double_exponential::integrate(
                            |phi| part(g(Complex64::from_polar(r, phi))),
                            0.0,
                            2.0 * PI,
                            tolerance,
                        );
                        worst.set(worst.get().max(inner.error_estimate));
                        inner.integral * r * (-2.0 * r * r).exp() * 2.0 / PI
                    },
                    0.0,
                    RADIAL_CUTOFF,
                    tolerance,
                );
                (out.integral, out.error_estimate)
            };
            let (re, re_err) = radial(|z| z.re);
            let (im, im_err) = radial(|z| z.im);
            let residual = re_err.max(im_err) + worst.get();
            if !re.is_finite() || !im.is_finite() || residual > tolerance {
                return Err(Error::Quadrature { residual, tolerance });
            }
            Ok(ComplexExpectation {
                exact: None,
                value: Complex64::new(re, im),
                error_estimate: residual,
            })
        }
    }
}
