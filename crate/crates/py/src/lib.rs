use std::collections::HashMap;

use num::BigRational;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use engine::boson::BosonSymbol;
use engine::exact::{format_gaussian, parse_rational, real, GaussianRational};
use engine::spin::{Arithmetic, TraceOptions};
use engine::{bridge, cli, moments, spin, thermal, xy, Error};

fn err(e: Error) -> PyErr {
    match e {
        Error::Resource(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// Accepts `int`, `fractions.Fraction` or a string such as `"-3/4"`.
fn rational(obj: &Bound<'_, PyAny>) -> PyResult<BigRational> {
    if let Ok(r) = obj.extract::<BigRational>() {
        return Ok(r);
    }
    let s: String = obj.extract()?;
    parse_rational(&s).map_err(err)
}

/// Real parts come back as `Fraction`; anything with an imaginary part as a string.
fn gaussian_to_py(py: Python<'_>, z: &GaussianRational) -> PyResult<Py<PyAny>> {
    if num::Zero::is_zero(&z.im) {
        Ok(z.re.clone().into_pyobject(py)?.into_any().unbind())
    } else {
        Ok(format_gaussian(z).into_pyobject(py)?.into_any().unbind())
    }
}

/// Polynomial in `S+`, `S-`, `Sz` (also `Sx`, `Sy`, `i`), one `1/√N` per letter.
#[pyclass(name = "SpinPolynomial", from_py_object)]
#[derive(Clone)]
struct PySpinPolynomial(spin::SpinPolynomial);

#[pymethods]
impl PySpinPolynomial {
    #[new]
    fn new(expr: &str) -> PyResult<Self> {
        cli::parse_polynomial(expr).map(Self).map_err(err)
    }

    fn render(&self) -> String {
        self.0.render()
    }

    fn degree(&self) -> usize {
        self.0.degree()
    }

    fn adjoint(&self) -> Self {
        Self(self.0.adjoint())
    }

    fn __pow__(&self, exp: u32, _modulo: Option<u32>) -> Self {
        Self(self.0.pow(exp))
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(self.0.clone() + other.0.clone())
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self(self.0.clone() - other.0.clone())
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self(self.0.clone() * other.0.clone())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("SpinPolynomial({:?})", self.0.render())
    }
}

/// Normalized trace `tr(P)/2^N`.
#[pyclass(name = "TraceResult", skip_from_py_object)]
struct PyTraceResult(spin::TraceResult);

#[pymethods]
impl PyTraceResult {
    #[getter]
    fn value(&self) -> f64 {
        self.0.to_f64()
    }

    #[getter]
    fn imag(&self) -> f64 {
        self.0.to_c64().im
    }

    #[getter]
    fn is_approximate(&self) -> bool {
        self.0.is_approximate()
    }

    /// Exact value as a string; `None` on the float path or with a `1/√N` part.
    fn exact(&self) -> Option<String> {
        self.0.exact().map(|z| format_gaussian(&z))
    }

    fn decimal(&self, digits: usize) -> String {
        self.0.decimal(digits)
    }

    fn __repr__(&self) -> String {
        format!("TraceResult({})", self.0.decimal(12))
    }
}

fn options(float: bool) -> TraceOptions {
    TraceOptions {
        arithmetic: if float { Arithmetic::Float } else { Arithmetic::Exact },
        ..TraceOptions::default()
    }
}

#[pyfunction]
#[pyo3(signature = (n, poly, float = false))]
fn normalized_trace(py: Python<'_>, n: u32, poly: &PySpinPolynomial, float: bool) -> PyResult<PyTraceResult> {
    let opts = options(float);
    py.detach(|| spin::normalized_trace_with(n, &poly.0, &opts))
        .map(PyTraceResult)
        .map_err(err)
}

#[pyfunction]
#[pyo3(signature = (n, poly, cap = spin::DEFAULT_ORACLE_CAP))]
fn oracle_trace(n: u32, poly: &PySpinPolynomial, cap: u32) -> PyResult<PyTraceResult> {
    spin::dense_oracle_trace(n, &poly.0, cap).map(PyTraceResult).map_err(err)
}

/// `(2ℓ−1)!!/4^ℓ`
#[pyfunction]
fn limit_moment(l: u32) -> BigRational {
    moments::limit_moment(l)
}

/// Signed Stirling coefficients of `2^n (a†)^n a^n` in powers of `a†a`.
#[pyfunction]
fn number_polynomial(n: u32) -> Vec<num::BigInt> {
    engine::boson::number_polynomial(n).coeffs
}

fn symbol_from_dict(terms: HashMap<(u32, u32), Bound<'_, PyAny>>) -> PyResult<BosonSymbol> {
    let mut s = BosonSymbol::zero();
    for ((m, n), c) in terms {
        s.add_term(m, n, real(rational(&c)?));
    }
    Ok(s)
}

#[pyclass(name = "ThermalState", skip_from_py_object)]
struct PyThermalState(thermal::ThermalState);

#[pymethods]
impl PyThermalState {
    /// Boltzmann ratio `x`; the default is the bosonization state `x = 1/3`.
    #[new]
    #[pyo3(signature = (x = None))]
    fn new(x: Option<&Bound<'_, PyAny>>) -> PyResult<Self> {
        match x {
            None => Ok(Self(thermal::ThermalState::bosonization())),
            Some(x) => thermal::ThermalState::new(rational(x)?).map(Self).map_err(err),
        }
    }

    fn density_diagonal(&self, n: u32) -> BigRational {
        self.0.density_diagonal(n)
    }

    fn mean_occupation(&self) -> BigRational {
        self.0.mean_occupation()
    }

    fn factorial_moment(&self, k: u32) -> BigRational {
        self.0.factorial_moment(k)
    }

    /// Returns `(text, value)`, e.g. `("1/2*sqrt(3)", 0.866…)`.
    fn partition_function(&self) -> (String, f64) {
        let z = self.0.partition_function();
        (z.to_string(), z.to_f64())
    }

    /// `⟨𝒩 g⟩` for a symbol given as `{(m, n): c}` meaning `Σ c z*^m z^n`.
    fn expect(&self, py: Python<'_>, symbol: HashMap<(u32, u32), Bound<'_, PyAny>>) -> PyResult<Py<PyAny>> {
        let form = engine::boson::normal_order_symbol(&symbol_from_dict(symbol)?);
        gaussian_to_py(py, &thermal::thermal_expect(&self.0, &form))
    }
}

#[pyfunction]
fn polylog_negative(k: u32, x: &Bound<'_, PyAny>) -> PyResult<BigRational> {
    thermal::polylog_negative(k, &rational(x)?).map_err(err)
}

/// Spin traces over `n_values` against the thermal oscillator value.
#[pyfunction]
#[pyo3(signature = (poly, n_values, digits = 12, float = false))]
fn verify_theorem<'py>(
    py: Python<'py>,
    poly: &PySpinPolynomial,
    n_values: Vec<u32>,
    digits: usize,
    float: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let opts = options(float);
    let report = py
        .detach(|| bridge::verify_theorem(&poly.0, &n_values, &opts, digits))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("n", report.n_values)?;
    d.set_item("spin_values", report.spin_values)?;
    d.set_item("boson_value", report.boson_value)?;
    d.set_item("abs_errors", report.abs_errors)?;
    d.set_item("fitted_rate", report.fitted_rate)?;
    Ok(d)
}

#[pyclass(name = "XYParams", skip_from_py_object)]
struct PyXYParams(xy::XYParams);

#[pymethods]
impl PyXYParams {
    #[new]
    fn new(gamma: &Bound<'_, PyAny>, kt: &Bound<'_, PyAny>) -> PyResult<Self> {
        xy::XYParams::new(rational(gamma)?, rational(kt)?).map(Self).map_err(err)
    }

    #[getter]
    fn g(&self) -> BigRational {
        self.0.g()
    }

    /// Names of the violated bounds; empty when the mapping applies.
    fn violations(&self) -> Vec<&'static str> {
        xy::validity_check(&self.0).violations()
    }

    fn partition_function(&self) -> PyResult<(String, f64)> {
        let z = xy::partition_function(&self.0).map_err(err)?;
        Ok((z.to_string(), z.to_f64()))
    }

    fn effective_temperature(&self) -> PyResult<f64> {
        xy::effective_temperature(&self.0).map_err(err)
    }

    #[pyo3(signature = (n, poly, precision = xy::DEFAULT_PRECISION))]
    fn spin_expectation(&self, py: Python<'_>, n: u32, poly: &PySpinPolynomial, precision: usize) -> PyResult<f64> {
        let params = self.0.clone();
        py.detach(|| xy::spin_thermal_expectation(&params, n, &poly.0, precision, &TraceOptions::default()))
            .map(|v| v.to_f64())
            .map_err(err)
    }

    fn boson_expectation(&self, py: Python<'_>, poly: &PySpinPolynomial) -> PyResult<Py<PyAny>> {
        let image = bridge::boson_image(&poly.0).map_err(err)?;
        let v = xy::boson_thermal_expectation(&self.0, &image).map_err(err)?;
        gaussian_to_py(py, &v)
    }
}

#[pymodule]
#[pyo3(name = "spinboson")]
fn spinboson_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpinPolynomial>()?;
    m.add_class::<PyTraceResult>()?;
    m.add_class::<PyThermalState>()?;
    m.add_class::<PyXYParams>()?;
    m.add_function(wrap_pyfunction!(normalized_trace, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_trace, m)?)?;
    m.add_function(wrap_pyfunction!(limit_moment, m)?)?;
    m.add_function(wrap_pyfunction!(number_polynomial, m)?)?;
    m.add_function(wrap_pyfunction!(polylog_negative, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem, m)?)?;
    Ok(())
}
