//! Python bindings. Tuples, chains and group descriptions are passed as JSON
//! strings in the same shapes the command-line tool reads.

use std::str::FromStr;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::One;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use padreg::arith::{extend_log, RingElem};
use padreg::cocycle::{cocycle_defect, cocycle_eval_with, galois_defect, EvalOptions};
use padreg::homology::{transfer_t, PermGroup};
use padreg::io::{ChainInput, FieldSpec, GroupSpec, RegulatorInput, TupleInput};
use padreg::regulator::{hat_r, product_formula_check, RegulatorConfig};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: serde::de::DeserializeOwned>(text: &str) -> PyResult<T> {
    serde_json::from_str(text).map_err(err)
}

#[pyclass(frozen, name = "RingParams")]
struct PyRingParams(Arc<padreg::arith::RingParams>);

#[pymethods]
impl PyRingParams {
    #[new]
    #[pyo3(signature = (p, m, d = 1, modulus = None))]
    fn new(p: u64, m: u32, d: u32, modulus: Option<Vec<i64>>) -> PyResult<Self> {
        Ok(PyRingParams(FieldSpec { p, m, d, modulus }.params().map_err(err)?))
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.p()
    }

    #[getter]
    fn precision(&self) -> u32 {
        self.0.precision()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.0.degree()
    }

    fn __repr__(&self) -> String {
        format!("RingParams(p={}, M={}, d={})", self.0.p(), self.0.precision(), self.0.degree())
    }
}

/// A p-adic number known to finite precision.
#[pyclass(frozen, name = "QpElem")]
struct PyQpElem(padreg::arith::QpElem);

#[pymethods]
impl PyQpElem {
    /// From an integer or a rational string such as "-3/7".
    #[staticmethod]
    fn from_rational(params: &PyRingParams, x: &str) -> PyResult<Self> {
        let r = BigRational::from_str(x.trim()).map_err(err)?;
        Ok(PyQpElem(padreg::arith::QpElem::from_rational(&params.0, &r)))
    }

    #[getter]
    fn valuation(&self) -> Option<i64> {
        self.0.valuation()
    }

    #[getter]
    fn precision(&self) -> i64 {
        self.0.abs_precision()
    }

    fn digits(&self) -> Vec<Vec<u64>> {
        self.0.digits()
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Valuation of self - other, or None when they agree to full precision.
    fn defect(&self, other: &PyQpElem) -> PyResult<Option<i64>> {
        Ok(match self.0.defect_against(&other.0).map_err(err)? {
            padreg::arith::Valuation::Finite(v) => Some(v),
            _ => None,
        })
    }

    fn __add__(&self, other: &PyQpElem) -> PyResult<Self> {
        Ok(PyQpElem(self.0.add(&other.0).map_err(err)?))
    }

    fn __sub__(&self, other: &PyQpElem) -> PyResult<Self> {
        Ok(PyQpElem(self.0.sub(&other.0).map_err(err)?))
    }

    fn __mul__(&self, other: &PyQpElem) -> PyResult<Self> {
        Ok(PyQpElem(self.0.mul(&other.0).map_err(err)?))
    }

    fn __neg__(&self) -> Self {
        PyQpElem(self.0.neg())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("QpElem({})", self.0)
    }
}

/// Logarithm of a unit, given by its coefficients.
#[pyfunction]
fn log(params: &PyRingParams, coeffs: Vec<i128>, target: u32) -> PyResult<PyQpElem> {
    let u = RingElem::from_coeffs(&params.0, &coeffs).map_err(err)?;
    Ok(PyQpElem(extend_log(&u, target).map_err(err)?))
}

#[pyfunction]
#[pyo3(signature = (tuple_json, target, degree_cap = None))]
fn cocycle_eval(tuple_json: &str, target: u32, degree_cap: Option<u32>) -> PyResult<PyQpElem> {
    let t = parse::<TupleInput>(tuple_json)?.tuple().map_err(err)?;
    let opts = EvalOptions { degree_cap, extra_precision: 0 };
    Ok(PyQpElem(cocycle_eval_with(&t, target, &opts).map_err(err)?.value))
}

/// Whether the alternating face sum vanishes mod p^target.
#[pyfunction]
fn cocycle_check(tuple_json: &str, target: u32) -> PyResult<bool> {
    let t = parse::<TupleInput>(tuple_json)?.tuple().map_err(err)?;
    Ok(cocycle_defect(&t, target).map_err(err)?.meets(target as i64))
}

#[pyfunction]
fn galois_check(tuple_json: &str, target: u32) -> PyResult<bool> {
    let t = parse::<TupleInput>(tuple_json)?.tuple().map_err(err)?;
    Ok(galois_defect(&t, target).map_err(err)?.meets(target as i64))
}

/// Signed integral of x^a with dx_omit left out, as a rational string.
#[pyfunction]
fn integrate_monomial(a: Vec<u32>, omit: usize) -> PyResult<String> {
    let n = a.len().saturating_sub(1);
    Ok(padreg::simplex::integrate_monomial(&a, omit, n).map_err(err)?.to_string())
}

#[pyfunction]
fn iterated_integral(a: Vec<u32>, eliminate: usize) -> PyResult<String> {
    let n = a.len().saturating_sub(1);
    Ok(padreg::simplex::iterated_integral_oracle(&a, eliminate, n).map_err(err)?.to_string())
}

#[pyfunction]
fn stokes(a: Vec<u32>, u: usize, v: usize) -> PyResult<(String, String)> {
    let (lhs, rhs) = padreg::simplex::stokes_check(&a, u, v).map_err(err)?;
    Ok((lhs.to_string(), rhs.to_string()))
}

/// Transfer of a chain; returns the image chain as JSON.
#[pyfunction]
fn transfer(group_json: &str, chain_json: &str) -> PyResult<String> {
    let spec: GroupSpec = parse(group_json)?;
    let chain: ChainInput = parse(chain_json)?;
    let image = match &spec {
        GroupSpec::Permutation { degree, .. } => {
            let cs = spec.perm_system().map_err(err)?;
            let c = chain.perm_chain(&PermGroup::new(*degree).map_err(err)?).map_err(err)?;
            ChainInput::from_perm_chain(&transfer_t(&cs, &c).map_err(err)?)
        }
        GroupSpec::Matrix { .. } => {
            let cs = spec.matrix_system().map_err(err)?;
            let c = chain.matrix_chain(cs.group().params()).map_err(err)?;
            ChainInput::from_matrix_chain(&transfer_t(&cs, &c).map_err(err)?)
        }
    };
    serde_json::to_string(&image).map_err(err)
}

fn regulator_setup(config_json: &str, chain_json: &str) -> PyResult<(RegulatorConfig, padreg::homology::BarChain<padreg::matforms::OMatrix>, u32)> {
    let cfg: RegulatorInput = parse(config_json)?;
    let params = cfg.field().params().map_err(err)?;
    let config = RegulatorConfig::new(&params, cfg.e, cfg.s, cfg.n, cfg.target).map_err(err)?;
    let chain = parse::<ChainInput>(chain_json)?.matrix_chain(&params).map_err(err)?;
    Ok((config, chain, cfg.s))
}

#[pyfunction]
#[pyo3(signature = (config_json, chain_json, check_cycle = true))]
fn regulator_pair(config_json: &str, chain_json: &str, check_cycle: bool) -> PyResult<PyQpElem> {
    let (config, chain, _) = regulator_setup(config_json, chain_json)?;
    Ok(PyQpElem(padreg::regulator::pair(&config, &chain, check_cycle).map_err(err)?))
}

/// The regulator via transfer and, second, its normalized value.
#[pyfunction]
fn regulator_rnf(config_json: &str, chain_json: &str) -> PyResult<(PyQpElem, PyQpElem)> {
    let (config, chain, s) = regulator_setup(config_json, chain_json)?;
    let value = padreg::regulator::r_nf(&config, &chain).map_err(err)?;
    let normalized = hat_r(&value, s).map_err(err)?.truncate(config.target as i64);
    Ok((PyQpElem(value), PyQpElem(normalized)))
}

/// Whether the product of all absolute values of x is exactly one and the
/// logarithms sum to zero mod p^target.
#[pyfunction]
fn product_formula(x: &str, p: u64, target: u32) -> PyResult<bool> {
    let r = BigRational::from_str(x.trim()).map_err(err)?;
    let check = product_formula_check(&r, p, target).map_err(err)?;
    Ok(check.exact_product.is_one() && check.log_sum_defect.meets(target as i64))
}

#[pymodule]
fn padreg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<PyRingParams>()?;
    m.add_class::<PyQpElem>()?;
    m.add_function(wrap_pyfunction!(log, m)?)?;
    m.add_function(wrap_pyfunction!(cocycle_eval, m)?)?;
    m.add_function(wrap_pyfunction!(cocycle_check, m)?)?;
    m.add_function(wrap_pyfunction!(galois_check, m)?)?;
    m.add_function(wrap_pyfunction!(integrate_monomial, m)?)?;
    m.add_function(wrap_pyfunction!(iterated_integral, m)?)?;
    m.add_function(wrap_pyfunction!(stokes, m)?)?;
    m.add_function(wrap_pyfunction!(transfer, m)?)?;
    m.add_function(wrap_pyfunction!(regulator_pair, m)?)?;
    m.add_function(wrap_pyfunction!(regulator_rnf, m)?)?;
    m.add_function(wrap_pyfunction!(product_formula, m)?)?;
    Ok(())
}
