//! The collective XY model `H = (γ/N)(S+S- + S-S+)` at temperature `kT`.
//!
//! `H` is diagonal on `|j,m⟩` with eigenvalue `(2γ/N)(j(j+1) − m²)`, so the
//! spin side reuses the trace jobs with a Boltzmann factor per basis state.
//! The factors are evaluated in decimal floating point at a chosen precision.
//!
//! On the oscillator side `𝒩(e^{c z*z} z*^m zⁿ) = b^{a†a} b^{−m} a†^m aⁿ`
//! with `b = 1 + c`, so with `c = −2g` every thermal average becomes a ratio
//! of two number-weighted sums in the `x = 1/3` state.

use std::str::FromStr;

use dashu_float::DBig;
use dashu_int::IBig;
use num::traits::{One, Signed, Zero};
use num::{BigInt, BigRational};
use rayon::prelude::*;
use serde::Serialize;

use crate::boson::{normal_ordered_exponential, NormalForm};
use crate::error::{Error, Result};
use crate::exact::{format_rational, gaussian_to_c64, pow_rational, rational_to_f64, GaussianRational, SqrtRational};
use crate::spin::{sectors, Compiled, SpinPolynomial, TraceOptions};
use crate::thermal::{thermal_expect_weighted, ThermalState};

/// Significant decimal digits used for Boltzmann factors unless overridden.
pub const DEFAULT_PRECISION: usize = 50;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct XYParams {
    pub gamma: BigRational,
    pub kt: BigRational,
}

impl XYParams {
    pub fn new(gamma: BigRational, kt: BigRational) -> Result<Self> {
        if !kt.is_positive() {
            return Err(Error::Domain(format!("kT must be positive, got {}", format_rational(&kt))));
        }
        Ok(XYParams { gamma, kt })
    }

    /// `g = γ/kT`.
    pub fn g(&self) -> BigRational {
        &self.gamma / &self.kt
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Validity {
    /// `1 > 2γ/kT`
    pub coupling_bound: bool,
    /// `1 > −γ/kT`
    pub antiferro_bound: bool,
    /// `kT > |γ|`, reported for ferromagnetic `γ < 0`.
    pub ferro_temperature_bound: Option<bool>,
}

impl Validity {
    pub fn passed(&self) -> bool {
        self.coupling_bound && self.antiferro_bound && self.ferro_temperature_bound.unwrap_or(true)
    }

    pub fn violations(&self) -> Vec<&'static str> {
        let mut out = Vec::new();
        if !self.coupling_bound {
            out.push("1 > 2γ/kT");
        }
        if !self.antiferro_bound {
            out.push("1 > −γ/kT");
        }
        if self.ferro_temperature_bound == Some(false) {
            out.push("kT > |γ|");
        }
        out
    }
}

pub fn validity_check(params: &XYParams) -> Validity {
    let g = params.g();
    let one = BigRational::one();
    Validity {
        coupling_bound: &g * BigRational::from_integer(2.into()) < one,
        antiferro_bound: -&g < one,
        ferro_temperature_bound: params.gamma.is_negative().then(|| params.kt > params.gamma.abs()),
    }
}

fn require_valid(params: &XYParams) -> Result<()> {
    let v = validity_check(params);
    if v.passed() {
        Ok(())
    } else {
        Err(Error::Validity(format!(
            "g = {} violates {}",
            format_rational(&params.g()),
            v.violations().join(" and ")
        )))
    }
}

/// `b = 1 − 2g`, the base of `𝒩 e^{−g(a†a + aa†)} = b^{a†a}`.
pub fn number_weight_base(params: &XYParams) -> Result<BigRational> {
    normal_ordered_exponential(&-params.g())
}

/// `r = 3/(1 − 2g)`: the mapped state is thermal with Boltzmann ratio `1/r`.
pub fn effective_ratio(params: &XYParams) -> Result<BigRational> {
    require_valid(params)?;
    Ok(BigRational::from_integer(3.into()) / number_weight_base(params)?)
}

/// `Z = tr e^{−ln r (a†a + ½)} = √(1/r) · r/(r − 1)`.
pub fn partition_function(params: &XYParams) -> Result<SqrtRational> {
    let r = effective_ratio(params)?;
    if r <= BigRational::one() {
        return Err(Error::Validity(format!("r = {} must exceed 1", format_rational(&r))));
    }
    let coeff = &r / (&r - BigRational::one());
    SqrtRational::new(coeff, &r.recip())
}

/// `k_B T_eff = 2|γ| / ln r`.
pub fn effective_temperature(params: &XYParams) -> Result<f64> {
    if params.gamma.is_zero() {
        return Err(Error::Domain("effective temperature is undefined for γ = 0".into()));
    }
    let r = effective_ratio(params)?;
    Ok(2.0 * rational_to_f64(&params.gamma.abs()) / rational_to_f64(&r).ln())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum WeightConvention {
    /// `b^{a†a}` in front, as obtained from normal ordering the Boltzmann factor.
    #[default]
    Plus,
    /// `b^{−a†a}`, the sign carried by the literal mapping formula. It does
    /// not reproduce the thermal averages and is kept for comparison.
    Minus,
}

/// `base^{a†a} · form`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MappedFunction {
    pub base: BigRational,
    pub form: NormalForm,
}

pub fn mapped_function(params: &XYParams, form: &NormalForm, convention: WeightConvention) -> Result<MappedFunction> {
    require_valid(params)?;
    let b = number_weight_base(params)?;
    let mut out = NormalForm::zero();
    for (&(m, n), c) in form.terms() {
        let w = pow_rational(&b, m).recip();
        out.add_term(m, n, c * crate::exact::real(w));
    }
    let base = match convention {
        WeightConvention::Plus => b,
        WeightConvention::Minus => b.recip(),
    };
    Ok(MappedFunction { base, form: out })
}

/// `⟨base^{a†a} form⟩ / ⟨base^{a†a}⟩` in the `x = 1/3` state.
pub fn mapped_expectation(mapped: &MappedFunction) -> Result<GaussianRational> {
    let state = ThermalState::bosonization();
    let num = thermal_expect_weighted(&state, &mapped.base, &mapped.form)?;
    let den = thermal_expect_weighted(&state, &mapped.base, &NormalForm::one())?;
    Ok(num / den)
}

pub fn boson_thermal_expectation(params: &XYParams, form: &NormalForm) -> Result<GaussianRational> {
    mapped_expectation(&mapped_function(params, form, WeightConvention::Plus)?)
}

/// A high-precision thermal average.
#[derive(Clone, Debug, PartialEq)]
pub struct ThermalAverage {
    pub n: u32,
    pub re: DBig,
    pub im: DBig,
    pub precision: usize,
}

impl ThermalAverage {
    pub fn to_f64(&self) -> f64 {
        self.re.to_f64().value()
    }

    pub fn im_f64(&self) -> f64 {
        self.im.to_f64().value()
    }

    /// Fixed-point rendering with `digits` decimals.
    pub fn decimal(&self, digits: usize) -> String {
        let re = format!("{:.digits$}", self.re);
        if self.im == DBig::ZERO {
            re
        } else {
            let im = format!("{:.digits$}", self.im);
            let sign = if im.starts_with('-') { "" } else { "+" };
            format!("{re}{sign}{im}i")
        }
    }
}

fn to_dbig_int(x: &BigInt, precision: usize) -> DBig {
    let i = IBig::from_str(&x.to_string()).expect("decimal integer");
    DBig::from(i).with_precision(precision).value()
}

fn to_dbig(r: &BigRational, precision: usize) -> DBig {
    to_dbig_int(r.numer(), precision) / to_dbig_int(r.denom(), precision)
}

/// `tr[e^{−H/kT} P] / tr[e^{−H/kT}]` with `P` scaled as in `normalized_trace`.
pub fn spin_thermal_expectation(
    params: &XYParams,
    n: u32,
    poly: &SpinPolynomial,
    precision: usize,
    opts: &TraceOptions,
) -> Result<ThermalAverage> {
    let secs = sectors(n)?;
    let compiled = Compiled::new(n, poly, opts.fast_path);
    let work = compiled.work(&secs);
    if work > opts.max_work {
        return Err(Error::Resource(format!(
            "estimated work {work} exceeds budget {}",
            opts.max_work
        )));
    }
    let p = precision.max(10);
    // exponent −(g/N)·(J(J+2) − M²)/2 in doubled units
    let k = to_dbig(&(params.g() / BigRational::from_integer(BigInt::from(2 * n as i64))), p);
    let beta: Vec<DBig> = (0..=n as i64)
        .map(|m| (k.clone() * to_dbig_int(&BigInt::from(m * m), p)).exp())
        .collect();
    let zero = DBig::ZERO.with_precision(p).value();

    // per sector: (Σ_M β_M, Σ_M value_k β_M for each job), scaled by d·α_J
    let per_sector = |s: &crate::spin::IrrepSpec| -> (DBig, Vec<DBig>) {
        let tj = s.twice_j as i64;
        let alpha = (-(k.clone() * to_dbig_int(&BigInt::from(tj * (tj + 2)), p))).exp();
        let weight = alpha * to_dbig_int(&BigInt::from(s.multiplicity.clone()), p);
        let mut z = zero.clone();
        let mut sums = vec![zero.clone(); compiled.jobs.len()];
        let mut tm = -tj;
        while tm <= tj {
            let b = &beta[tm.unsigned_abs() as usize];
            z += b;
            for (acc, job) in sums.iter_mut().zip(&compiled.jobs) {
                let v = match job.value_small(tj, tm) {
                    Some(v) => DBig::from(IBig::from(v)).with_precision(p).value(),
                    None => to_dbig_int(&job.value_big(tj, tm), p),
                };
                *acc += v * b;
            }
            tm += 2;
        }
        (z * &weight, sums.into_iter().map(|v| v * &weight).collect())
    };
    let rows: Vec<(DBig, Vec<DBig>)> = if opts.parallel {
        secs.par_iter().map(per_sector).collect()
    } else {
        secs.iter().map(per_sector).collect()
    };
    let mut z = zero.clone();
    let mut totals = vec![zero.clone(); compiled.jobs.len()];
    for (zs, sums) in rows {
        z += zs;
        for (t, v) in totals.iter_mut().zip(sums) {
            *t += v;
        }
    }
    let inv_sqrt = to_dbig_int(&BigInt::from(n), p).sqrt().with_precision(p).value();
    let inv_sqrt = DBig::ONE.with_precision(p).value() / inv_sqrt;
    let mut re = zero.clone();
    let mut im = zero.clone();
    for (t, (even, odd)) in totals.iter().zip(&compiled.scalings) {
        let cre = to_dbig(&even.re, p) + to_dbig(&odd.re, p) * &inv_sqrt;
        let cim = to_dbig(&even.im, p) + to_dbig(&odd.im, p) * &inv_sqrt;
        re += cre * t;
        im += cim * t;
    }
    Ok(ThermalAverage {
        n,
        re: re / &z,
        im: im / &z,
        precision: p,
    })
}

/// One line of a parameter sweep.
#[derive(Clone, Debug, Serialize)]
pub struct SweepRow {
    pub gamma: String,
    pub kt: String,
    pub g: String,
    pub valid: bool,
    pub z: Option<f64>,
    pub t_eff: Option<f64>,
    pub spin: Vec<(u32, Option<String>)>,
    pub boson: Option<String>,
}

pub struct SweepPlan<'a> {
    pub gammas: &'a [BigRational],
    pub kts: &'a [BigRational],
    pub n_values: &'a [u32],
    pub poly: &'a SpinPolynomial,
    pub precision: usize,
    pub digits: usize,
}

/// Evaluates every `(γ, kT)` pair. The boson column is left empty when the
/// polynomial contains `Sz` or the parameters are invalid; the spin columns are
/// computed whenever `kT > 0`.
pub fn sweep(plan: &SweepPlan<'_>, opts: &TraceOptions) -> Result<Vec<SweepRow>> {
    let image = crate::bridge::boson_image(plan.poly).ok();
    let mut rows = Vec::new();
    for gamma in plan.gammas {
        for kt in plan.kts {
            let params = XYParams::new(gamma.clone(), kt.clone())?;
            let valid = validity_check(&params).passed();
            let z = partition_function(&params).ok().map(|z| z.to_f64());
            let t_eff = effective_temperature(&params).ok();
            let spin = plan
                .n_values
                .iter()
                .map(|&n| {
                    let v = spin_thermal_expectation(&params, n, plan.poly, plan.precision, opts)?;
                    Ok((n, Some(v.decimal(plan.digits))))
                })
                .collect::<Result<Vec<_>>>()?;
            let boson = match (&image, valid) {
                (Some(form), true) => Some(boson_thermal_expectation(&params, form)?),
                _ => None,
            }
            .map(|v| render_expectation(&v, plan.digits));
            rows.push(SweepRow {
                gamma: format_rational(gamma),
                kt: format_rational(kt),
                g: format_rational(&params.g()),
                valid,
                z,
                t_eff,
                spin,
                boson,
            });
        }
    }
    Ok(rows)
}

fn render_expectation(v: &GaussianRational, digits: usize) -> String {
    if v.im.is_zero() {
        crate::exact::decimal_string(&v.re, digits)
    } else {
        let c = gaussian_to_c64(v);
        format!("{:.digits$}{:+.digits$}i", c.re, c.im)
    }
}

pub fn sweep_csv(rows: &[SweepRow]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["gamma".to_string(), "kT".into(), "g".into(), "valid".into(), "Z".into(), "T_eff".into()];
    if let Some(first) = rows.first() {
        header.extend(first.spin.iter().map(|(n, _)| format!("expectation_spin({n})")));
    }
    header.push("expectation_boson".into());
    w.write_record(&header).unwrap();
    let opt = |v: Option<f64>| v.map(|x| format!("{x:.12}")).unwrap_or_default();
    for r in rows {
        let mut rec = vec![r.gamma.clone(), r.kt.clone(), r.g.clone(), r.valid.to_string(), opt(r.z), opt(r.t_eff)];
        rec.extend(r.spin.iter().map(|(_, v)| v.clone().unwrap_or_default()));
        rec.push(r.boson.clone().unwrap_or_default());
        w.write_record(&rec).unwrap();
    }
    String::from_utf8(w.into_inner().unwrap()).unwrap()
}
