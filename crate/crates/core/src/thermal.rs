//! Single-mode thermal (geometric) states and their exact expectations.
//!
//! A state is fixed by the Boltzmann ratio `x = e^{−ħω/k_BT}` alone; the
//! populations are `p_n = (1−x)xⁿ` and `⟨n|a†^k a^k|n⟩ = n!/(n−k)!`, so every
//! expectation of a normal-ordered polynomial reduces to factorial moments
//! `k! n̄^k` of the geometric law.

use num::traits::{One, Zero};
use num::{BigInt, BigRational};

use crate::boson::NormalForm;
use crate::error::{Error, Result};
use crate::exact::{factorial, format_rational, pow_rational, ratio, real, GaussianRational, SqrtRational};
use crate::moments::{gaussian_expectation, Expectation, RealIntegrand};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ThermalState {
    x: BigRational,
}

impl ThermalState {
    pub fn new(x: BigRational) -> Result<Self> {
        if x <= BigRational::zero() || x >= BigRational::one() {
            return Err(Error::Domain(format!(
                "Boltzmann ratio {} must lie strictly between 0 and 1",
                format_rational(&x)
            )));
        }
        Ok(ThermalState { x })
    }

    /// The state with `ħω/k_BT = ln 3`, i.e. `x = 1/3` and `n̄ = 1/2`.
    pub fn bosonization() -> Self {
        ThermalState { x: ratio(1, 3) }
    }

    pub fn from_mean_occupation(mean: BigRational) -> Result<Self> {
        if mean <= BigRational::zero() {
            return Err(Error::Domain("mean occupation must be positive".into()));
        }
        let x = &mean / (BigRational::one() + &mean);
        Self::new(x)
    }

    pub fn boltzmann_ratio(&self) -> &BigRational {
        &self.x
    }

    /// `ħω/k_BT = −ln x`.
    pub fn energy_ratio(&self) -> f64 {
        -crate::exact::rational_to_f64(&self.x).ln()
    }

    /// `n̄ = x/(1−x)`.
    pub fn mean_occupation(&self) -> BigRational {
        &self.x / (BigRational::one() - &self.x)
    }

    /// `p_n = (1−x)xⁿ`.
    pub fn density_diagonal(&self, n: u32) -> BigRational {
        (BigRational::one() - &self.x) * pow_rational(&self.x, n)
    }

    /// `Σ_n x^{n+½} = √x/(1−x)`, the partition function in the
    /// `e^{−(ħω/k_BT)(a†a+½)}` convention.
    pub fn partition_function(&self) -> SqrtRational {
        SqrtRational::new(BigRational::one() / (BigRational::one() - &self.x), &self.x)
            .expect("x is positive")
    }

    /// Factorial moment `⟨a†^k a^k⟩ = k! n̄^k`.
    pub fn factorial_moment(&self, k: u32) -> BigRational {
        BigRational::from_integer(factorial(k)) * pow_rational(&self.mean_occupation(), k)
    }
}

/// Numerator `P_k` of `Li_{−k}(x) = P_k(x)/(1−x)^{k+1}`, lowest power first.
///
/// `P_0 = x` and `P_{k+1} = x[(1−x)P_k' + (k+1)P_k]`, from `Li_{−k−1} = x d/dx Li_{−k}`.
pub fn polylog_numerator(k: u32) -> Vec<BigInt> {
    let mut p = vec![BigInt::zero(), BigInt::one()];
    for step in 0..k {
        let deriv: Vec<BigInt> = p.iter().enumerate().skip(1).map(|(i, c)| c * i).collect();
        // (1 − x) P' + (k+1) P
        let mut inner = vec![BigInt::zero(); p.len() + 1];
        for (i, c) in deriv.iter().enumerate() {
            inner[i] += c;
            inner[i + 1] -= c;
        }
        for (i, c) in p.iter().enumerate() {
            inner[i] += c * (step + 1);
        }
        // multiply by x
        let mut next = vec![BigInt::zero()];
        next.extend(inner);
        while next.len() > 1 && next.last().is_some_and(Zero::is_zero) {
            next.pop();
        }
        p = next;
    }
    p
}

/// `Li_{−k}(x) = Σ_{n≥1} n^k xⁿ` for rational `0 < x < 1`.
pub fn polylog_negative(k: u32, x: &BigRational) -> Result<BigRational> {
    if x <= &BigRational::zero() || x >= &BigRational::one() {
        return Err(Error::Domain("polylogarithm argument must lie in (0, 1)".into()));
    }
    let numer = polylog_numerator(k)
        .iter()
        .rev()
        .fold(BigRational::zero(), |acc, c| acc * x + BigRational::from_integer(c.clone()));
    Ok(numer / pow_rational(&(BigRational::one() - x), k + 1))
}

/// `tr(ρ F)` for a normal-ordered `F`. Terms with `m ≠ n` do not conserve the
/// number of quanta and contribute nothing.
pub fn thermal_expect(state: &ThermalState, form: &NormalForm) -> GaussianRational {
    form.terms()
        .filter(|((m, n), _)| m == n)
        .map(|(&(n, _), c)| c * real(state.factorial_moment(n)))
        .fold(GaussianRational::zero(), |a, b| a + b)
}

/// Unnormalized `Σ_ν p_ν b^ν ⟨ν|F|ν⟩ = Σ_n c_nn (1−x) n! (bx)ⁿ / (1−bx)^{n+1}`.
pub fn thermal_expect_weighted(state: &ThermalState, base: &BigRational, form: &NormalForm) -> Result<GaussianRational> {
    if base <= &BigRational::zero() {
        return Err(Error::Domain(format!(
            "number-operator weight base {} must be positive",
            format_rational(base)
        )));
    }
    let bx = base * &state.x;
    if bx >= BigRational::one() {
        return Err(Error::Divergence(format!(
            "weighted thermal sum needs base·x < 1, got {}",
            format_rational(&bx)
        )));
    }
    let one_minus_x = BigRational::one() - &state.x;
    let one_minus_bx = BigRational::one() - &bx;
    Ok(form
        .terms()
        .filter(|((m, n), _)| m == n)
        .map(|(&(n, _), c)| {
            let w = &one_minus_x * BigRational::from_integer(factorial(n)) * pow_rational(&bx, n)
                / pow_rational(&one_minus_bx, n + 1);
            c * real(w)
        })
        .fold(GaussianRational::zero(), |a, b| a + b))
}

/// Ground state of the oscillator that mirrors `Sz/√N`: `mω = 2`, `⟨x⟩ = 0`, `Δx = ½`.
#[derive(Clone, Copy, Debug, Default)]
pub struct GroundOscillator;

impl GroundOscillator {
    pub const MASS_TIMES_FREQUENCY: i64 = 2;

    /// `Δx² = 1/(2mω)`.
    pub fn position_variance(&self) -> BigRational {
        ratio(1, 2 * Self::MASS_TIMES_FREQUENCY)
    }

    pub fn position_std(&self) -> f64 {
        crate::exact::rational_to_f64(&self.position_variance()).sqrt()
    }
}

/// `⟨f(x)⟩` in the ground state; the position density is the same Gaussian
/// as the limit law of `S_α/√N`.
pub fn ground_position_expectation(f: &RealIntegrand<'_>, tolerance: f64) -> Result<Expectation> {
    gaussian_expectation(f, tolerance)
}
