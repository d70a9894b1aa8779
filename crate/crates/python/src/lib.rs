//! Python bindings for `nbwht`.

use num_rational::BigRational;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use nbwht::wht as transform;
use nbwht::{approx, convolution, exact, message, montecarlo};
use nbwht::{DenseVector, Domain, PatternMask};

fn err(e: nbwht::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn dense(values: Vec<f64>) -> PyResult<DenseVector> {
    DenseVector::new(values).map_err(err)
}

fn fraction<'py>(py: Python<'py>, r: &BigRational) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?
        .getattr("Fraction")?
        .call1((r.to_string(),))
}

#[pyclass(name = "OpCount", frozen, eq, from_py_object)]
#[derive(Clone, Copy, PartialEq)]
struct PyOpCount {
    #[pyo3(get)]
    additions: u64,
    #[pyo3(get)]
    negations: u64,
}

impl From<transform::OpCount> for PyOpCount {
    fn from(c: transform::OpCount) -> Self {
        Self {
            additions: c.additions,
            negations: c.negations,
        }
    }
}

#[pymethods]
impl PyOpCount {
    #[new]
    fn new(additions: u64, negations: u64) -> Self {
        Self {
            additions,
            negations,
        }
    }

    fn __repr__(&self) -> String {
        format!(
            "OpCount(additions={}, negations={})",
            self.additions, self.negations
        )
    }
}

/// Message storing values only on a sorted support.
#[pyclass(name = "TruncatedMessage", frozen, from_py_object)]
#[derive(Clone)]
struct PyTruncatedMessage {
    inner: message::TruncatedMessage,
}

#[pymethods]
impl PyTruncatedMessage {
    #[staticmethod]
    fn probability(q: usize, support: Vec<usize>, values: Vec<f64>) -> PyResult<Self> {
        let inner = message::TruncatedMessage::probability(q, support, values).map_err(err)?;
        Ok(Self { inner })
    }

    #[staticmethod]
    #[pyo3(signature = (q, support, values, lambda0=None))]
    fn log(
        q: usize,
        support: Vec<usize>,
        values: Vec<f64>,
        lambda0: Option<f64>,
    ) -> PyResult<Self> {
        let inner = message::TruncatedMessage::log(q, support, values, lambda0).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn q(&self) -> usize {
        self.inner.alphabet_size()
    }

    #[getter]
    fn support(&self) -> Vec<usize> {
        self.inner.support().to_vec()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    #[getter]
    fn domain(&self) -> &'static str {
        match self.inner.domain() {
            Domain::Probability => "probability",
            Domain::Log => "log",
        }
    }

    #[getter]
    fn lambda0(&self) -> Option<f64> {
        self.inner.lambda0()
    }

    fn tail_probability(&self) -> PyResult<f64> {
        message::tail_probability(&self.inner).map_err(err)
    }

    fn complete(&self) -> PyResult<Vec<f64>> {
        Ok(message::complete_with_tail(&self.inner)
            .map_err(err)?
            .into_values())
    }

    #[pyo3(signature = (lambda0=None))]
    fn to_log(&self, lambda0: Option<f64>) -> PyResult<Self> {
        let inner = message::to_log(&self.inner, lambda0).map_err(err)?;
        Ok(Self { inner })
    }

    fn to_prob(&self) -> PyResult<Self> {
        let inner = message::to_prob(&self.inner).map_err(err)?;
        Ok(Self { inner })
    }

    fn __len__(&self) -> usize {
        self.inner.kept()
    }

    fn __repr__(&self) -> String {
        format!(
            "TruncatedMessage(q={}, domain={}, support={:?}, values={:?})",
            self.q(),
            self.domain(),
            self.inner.support(),
            self.inner.values()
        )
    }
}

/// Keeps the `q_keep` largest probabilities of a full vector.
#[pyfunction]
fn truncate(values: Vec<f64>, q_keep: usize) -> PyResult<PyTruncatedMessage> {
    let inner = message::truncate(&dense(values)?, q_keep).map_err(err)?;
    Ok(PyTruncatedMessage { inner })
}

#[pyfunction]
fn wht(values: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(transform::wht_dense(&dense(values)?).into_values())
}

#[pyfunction]
fn wht_inverse(values: Vec<f64>) -> PyResult<Vec<f64>> {
    Ok(transform::wht_inverse(&dense(values)?).into_values())
}

/// Transform of `values` skipping butterflies on structural zeros. The
/// pattern defaults to the non-zero entries of `values`.
#[pyfunction]
#[pyo3(signature = (values, positions=None))]
fn wht_sparse_counted(
    values: Vec<f64>,
    positions: Option<Vec<usize>>,
) -> PyResult<(Vec<f64>, PyOpCount)> {
    let v = dense(values)?;
    let mask = match positions {
        Some(p) => PatternMask::from_positions(v.alphabet_size(), &p).map_err(err)?,
        None => PatternMask::from_values(&v),
    };
    let (out, count) = transform::wht_sparse_counted(&v, &mask).map_err(err)?;
    Ok((out.into_values(), count.into()))
}

/// Operation count of one pattern, given as positions or as a hex mask.
#[pyfunction]
#[pyo3(signature = (q, positions=None, mask=None))]
fn count_only(q: usize, positions: Option<Vec<usize>>, mask: Option<&str>) -> PyResult<PyOpCount> {
    let mask = match (positions, mask) {
        (Some(p), None) => PatternMask::from_positions(q, &p),
        (None, Some(h)) => PatternMask::from_hex(q, h),
        _ => {
            return Err(PyValueError::new_err(
                "give exactly one of positions or mask",
            ))
        }
    }
    .map_err(err)?;
    Ok(transform::count_only(&mask).into())
}

/// Exact expected (additions, negations) as `fractions.Fraction`.
#[pyfunction]
fn exact_expected_counts<'py>(
    py: Python<'py>,
    q: usize,
    q_prime: usize,
) -> PyResult<(Bound<'py, PyAny>, Bound<'py, PyAny>)> {
    let e = exact::exact_expected_counts(q, q_prime).map_err(err)?;
    Ok((fraction(py, &e.additions)?, fraction(py, &e.negations)?))
}

#[pyfunction]
fn approx_expected_counts(q: usize, q_prime: usize) -> PyResult<(f64, f64)> {
    let a = approx::approx_expected_counts(q, q_prime).map_err(err)?;
    Ok((a.additions, a.negations))
}

/// `(q, log2 q, ratio)` for every power of two in `[q_min, q_max]`.
#[pyfunction]
fn relative_additions_sweep(
    q_min: usize,
    q_max: usize,
    q_prime: usize,
) -> PyResult<Vec<(usize, u32, f64)>> {
    let points = approx::relative_additions_sweep(q_min, q_max, q_prime).map_err(err)?;
    Ok(points
        .into_iter()
        .map(|p| (p.q, p.log2_q, p.ratio))
        .collect())
}

#[pyfunction]
fn xor_convolve_direct(a: Vec<f64>, b: Vec<f64>) -> PyResult<Vec<f64>> {
    let out = convolution::xor_convolve_direct(&dense(a)?, &dense(b)?).map_err(err)?;
    Ok(out.into_values())
}

#[pyfunction]
fn xor_convolve_wht(a: Vec<f64>, b: Vec<f64>) -> PyResult<Vec<f64>> {
    let (out, _) = convolution::xor_convolve_wht(&dense(a)?, &dense(b)?).map_err(err)?;
    Ok(out.into_values())
}

/// Convolves truncated messages and truncates the result to `q_keep`.
#[pyfunction]
fn check_node(
    messages: Vec<PyTruncatedMessage>,
    q_keep: usize,
) -> PyResult<(PyTruncatedMessage, PyOpCount)> {
    let inner: Vec<_> = messages.into_iter().map(|m| m.inner).collect();
    let out = convolution::check_node(&inner, q_keep).map_err(err)?;
    Ok((
        PyTruncatedMessage { inner: out.message },
        out.cost.total().into(),
    ))
}

#[pyfunction]
fn run_trials<'py>(
    py: Python<'py>,
    q: usize,
    q_prime: usize,
    trials: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let s = py
        .detach(|| montecarlo::run_trials(q, q_prime, trials, seed))
        .map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("q", s.q)?;
    d.set_item("q_prime", s.q_prime)?;
    d.set_item("trials", s.trials)?;
    d.set_item("seed", s.seed)?;
    d.set_item("mean_additions", s.mean_additions)?;
    d.set_item("mean_negations", s.mean_negations)?;
    d.set_item("stderr_additions", s.stderr_additions)?;
    d.set_item("stderr_negations", s.stderr_negations)?;
    Ok(d)
}

/// Whether the exact expectation agrees with enumeration or sampling.
#[pyfunction]
#[pyo3(signature = (q, q_prime, trials=100_000, seed=0))]
fn validate(py: Python<'_>, q: usize, q_prime: usize, trials: u64, seed: u64) -> PyResult<bool> {
    let v = py
        .detach(|| montecarlo::validate(q, q_prime, trials, seed))
        .map_err(err)?;
    Ok(v.pass)
}

/// `(label, multiplications, additions, negations)` per strategy.
#[pyfunction]
#[pyo3(signature = (q, q_prime, d_c=1))]
fn cost_compare(
    q: usize,
    q_prime: usize,
    d_c: usize,
) -> PyResult<Vec<(&'static str, f64, f64, f64)>> {
    let models = convolution::cost_compare(q, q_prime, d_c).map_err(err)?;
    Ok(models
        .into_iter()
        .map(|m| (m.label, m.multiplications, m.additions, m.negations))
        .collect())
}

#[pymodule]
fn nbwht_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOpCount>()?;
    m.add_class::<PyTruncatedMessage>()?;
    m.add_function(wrap_pyfunction!(truncate, m)?)?;
    m.add_function(wrap_pyfunction!(wht, m)?)?;
    m.add_function(wrap_pyfunction!(wht_inverse, m)?)?;
    m.add_function(wrap_pyfunction!(wht_sparse_counted, m)?)?;
    m.add_function(wrap_pyfunction!(count_only, m)?)?;
    m.add_function(wrap_pyfunction!(exact_expected_counts, m)?)?;
    m.add_function(wrap_pyfunction!(approx_expected_counts, m)?)?;
    m.add_function(wrap_pyfunction!(relative_additions_sweep, m)?)?;
    m.add_function(wrap_pyfunction!(xor_convolve_direct, m)?)?;
    m.add_function(wrap_pyfunction!(xor_convolve_wht, m)?)?;
    m.add_function(wrap_pyfunction!(check_node, m)?)?;
    m.add_function(wrap_pyfunction!(run_trials, m)?)?;
    m.add_function(wrap_pyfunction!(validate, m)?)?;
    m.add_function(wrap_pyfunction!(cost_compare, m)?)?;
    Ok(())
}
