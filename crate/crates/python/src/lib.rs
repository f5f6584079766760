//! Python bindings. Matrices cross the boundary as row-major nested lists of
//! complex numbers; any sequence of sequences of numbers is accepted.

use cpspectra::algebra::{AlgebraElement, AlgebraShape};
use cpspectra::cpmap::{self, LinearMap};
use cpspectra::perron::{self, algebra_basis};
use cpspectra::spectra::{self, DEFAULT_SIDE_BUDGET, DEFAULT_WORD_BUDGET};
use cpspectra::{catalog, DenseMatrix, Tolerance, C64};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

create_exception!(cpspectra_py, CpSpectraError, PyException);

pub type Rows = Vec<Vec<C64>>;

fn core_err(e: cpspectra::Error) -> PyErr {
    CpSpectraError::new_err(e.to_string())
}

pub fn to_dense(rows: Rows) -> PyResult<DenseMatrix> {
    let r = rows.len();
    let c = rows.first().map_or(0, Vec::len);
    if r == 0 || c == 0 || rows.iter().any(|row| row.len() != c) {
        return Err(PyValueError::new_err("expected a non-empty rectangular matrix"));
    }
    DenseMatrix::from_row_major(r, c, rows.into_iter().flatten().collect()).map_err(core_err)
}

pub fn to_rows(m: &DenseMatrix) -> Rows {
    m.data().chunks(m.cols()).map(<[C64]>::to_vec).collect()
}

fn to_tuple(tuple: Vec<Rows>) -> PyResult<Vec<DenseMatrix>> {
    if tuple.is_empty() {
        return Err(PyValueError::new_err("the tuple is empty"));
    }
    tuple.into_iter().map(to_dense).collect()
}

fn tolerance(rank_tol: Option<f64>, psd_tol: Option<f64>, conv_tol: Option<f64>) -> Tolerance {
    let mut tol = Tolerance::default();
    tol.rank_tol = rank_tol.unwrap_or(tol.rank_tol);
    tol.psd_tol = psd_tol.unwrap_or(tol.psd_tol);
    tol.conv_tol = conv_tol.unwrap_or(tol.conv_tol);
    tol
}

/// Completely positive map `X ↦ Σ Aᵢ*XAᵢ` on a direct sum of full matrix blocks.
#[pyclass(name = "CpMap", frozen)]
pub struct PyCpMap {
    pub inner: cpmap::CpMap,
}

impl PyCpMap {
    fn linear(&self, tol: &Tolerance) -> PyResult<LinearMap> {
        LinearMap::new(self.inner.shape(), &self.inner.superop(), true, tol).map_err(core_err)
    }
}

#[pymethods]
impl PyCpMap {
    #[new]
    #[pyo3(signature = (kraus, blocks=None))]
    fn py_new(kraus: Vec<Rows>, blocks: Option<Vec<usize>>) -> PyResult<Self> {
        let kraus = to_tuple(kraus)?;
        let shape = match blocks {
            Some(b) => AlgebraShape::new(b).map_err(core_err)?,
            None => AlgebraShape::full(kraus[0].rows()),
        };
        Ok(PyCpMap {
            inner: cpmap::CpMap::new(kraus, shape).map_err(core_err)?,
        })
    }

    /// Bundled example by name: corner_collapse, golden_ratio, trace_pair or path_graph.
    #[staticmethod]
    fn example(name: &str) -> PyResult<Self> {
        let inner = match name {
            "corner_collapse" => catalog::corner_collapse_map(),
            "golden_ratio" => catalog::golden_ratio_map(),
            "trace_pair" => catalog::trace_pair_map(),
            "path_graph" => catalog::path_graph_map(),
            _ => return Err(PyValueError::new_err(format!("unknown example {name:?}"))),
        };
        Ok(PyCpMap { inner })
    }

    #[getter]
    fn m(&self) -> usize {
        self.inner.m()
    }

    #[getter]
    fn blocks(&self) -> Vec<usize> {
        self.inner.shape().blocks().to_vec()
    }

    #[getter]
    fn kraus(&self) -> Vec<Rows> {
        self.inner.kraus().iter().map(to_rows).collect()
    }

    fn apply(&self, x: Rows) -> PyResult<Rows> {
        Ok(to_rows(&self.inner.apply(&to_dense(x)?).map_err(core_err)?))
    }

    fn choi(&self) -> Rows {
        to_rows(&self.inner.choi())
    }

    /// Matrix of the map on column-stacked vectors.
    fn superop(&self) -> Rows {
        to_rows(self.inner.superop().matrix())
    }

    fn spectral_radius(&self) -> PyResult<f64> {
        self.inner.superop().spectral_radius().map_err(core_err)
    }

    fn __repr__(&self) -> String {
        format!(
            "CpMap(m={}, blocks={:?}, kraus={})",
            self.inner.m(),
            self.inner.shape().blocks(),
            self.inner.kraus().len()
        )
    }
}

#[pyfunction]
fn outer_radius(tuple: Vec<Rows>) -> PyResult<f64> {
    spectra::outer_radius(&to_tuple(tuple)?).map_err(core_err)
}

/// Returns `(lower, upper)` bounds on the joint spectral radius.
#[pyfunction]
#[pyo3(signature = (tuple, method="brute", n=10, k=2, budget=None))]
fn jsr(tuple: Vec<Rows>, method: &str, n: usize, k: usize, budget: Option<u64>) -> PyResult<(f64, f64)> {
    let t = to_tuple(tuple)?;
    let est = match method {
        "brute" => spectra::jsr_brute(&t, n, budget.map_or(DEFAULT_WORD_BUDGET, u128::from)),
        "tensor" => spectra::jsr_tensor_approx(&t, k, budget.map_or(DEFAULT_SIDE_BUDGET, u128::from)),
        _ => return Err(PyValueError::new_err("method must be \"brute\" or \"tensor\"")),
    }
    .map_err(core_err)?;
    Ok((est.lower, est.upper))
}

/// Returns `(r, L)` with `L ≥ 0` and `φ(L) = rL`.
#[pyfunction]
#[pyo3(signature = (tau, rank_tol=None, psd_tol=None, conv_tol=None))]
fn perron_vector(
    tau: &PyCpMap,
    rank_tol: Option<f64>,
    psd_tol: Option<f64>,
    conv_tol: Option<f64>,
) -> PyResult<(f64, Rows)> {
    let tol = tolerance(rank_tol, psd_tol, conv_tol);
    let pv = perron::perron_vector(&tau.linear(&tol)?, &tol).map_err(core_err)?;
    Ok((pv.r, to_rows(pv.l.matrix())))
}

/// Returns `(r, d, superop)` for the maximal part.
#[pyfunction]
#[pyo3(signature = (tau, rank_tol=None, psd_tol=None, conv_tol=None))]
fn maximal_part(
    tau: &PyCpMap,
    rank_tol: Option<f64>,
    psd_tol: Option<f64>,
    conv_tol: Option<f64>,
) -> PyResult<(f64, usize, Rows)> {
    let tol = tolerance(rank_tol, psd_tol, conv_tol);
    let mp = perron::maximal_part(&tau.linear(&tol)?, &tol).map_err(core_err)?;
    Ok((mp.r, mp.d, to_rows(mp.superop.matrix())))
}

#[pyfunction]
#[pyo3(signature = (tau, rank_tol=None))]
fn irreducible(tau: &PyCpMap, rank_tol: Option<f64>) -> PyResult<bool> {
    let tol = tolerance(rank_tol, None, None);
    Ok(perron::irreducible_cp(&tau.inner, &tol).map_err(core_err)?.irreducible)
}

/// Returns `(r, L, R)` with `φ̂(X) = trace(RX) L`.
#[pyfunction]
#[pyo3(signature = (tau, rank_tol=None, psd_tol=None, conv_tol=None))]
fn factorize(
    tau: &PyCpMap,
    rank_tol: Option<f64>,
    psd_tol: Option<f64>,
    conv_tol: Option<f64>,
) -> PyResult<(f64, Rows, Rows)> {
    let tol = tolerance(rank_tol, psd_tol, conv_tol);
    let f = perron::maximal_factorization(&tau.inner, &tol).map_err(core_err)?;
    Ok((f.r, to_rows(f.l.matrix()), to_rows(&f.density)))
}

#[pyfunction]
#[pyo3(signature = (tau, w))]
fn friedland(tau: &PyCpMap, w: Rows) -> PyResult<f64> {
    let tol = Tolerance::default();
    let w = AlgebraElement::new(tau.inner.shape(), &to_dense(w)?, &tol).map_err(core_err)?;
    spectra::friedland_value(&tau.linear(&tol)?, &w, &tol).map_err(core_err)
}

#[pyfunction]
#[pyo3(signature = (tuple, unital=true))]
fn algebra_dim(tuple: Vec<Rows>, unital: bool) -> PyResult<usize> {
    Ok(algebra_basis(&to_tuple(tuple)?, unital, &Tolerance::default())
        .map_err(core_err)?
        .dim())
}

/// Returns the domination constant `q` when `a` lies in the span of the Kraus
/// operators, else `None`.
#[pyfunction]
fn member(tau: &PyCpMap, a: Rows) -> PyResult<Option<f64>> {
    let m = cpmap::membership(&to_dense(a)?, &tau.inner, &Tolerance::default()).map_err(core_err)?;
    Ok(if m.member { m.q } else { None })
}

#[pymodule]
fn cpspectra_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CpSpectraError", m.py().get_type::<CpSpectraError>())?;
    m.add_class::<PyCpMap>()?;
    m.add_function(wrap_pyfunction!(outer_radius, m)?)?;
    m.add_function(wrap_pyfunction!(jsr, m)?)?;
    m.add_function(wrap_pyfunction!(perron_vector, m)?)?;
    m.add_function(wrap_pyfunction!(maximal_part, m)?)?;
    m.add_function(wrap_pyfunction!(irreducible, m)?)?;
    m.add_function(wrap_pyfunction!(factorize, m)?)?;
    m.add_function(wrap_pyfunction!(friedland, m)?)?;
    m.add_function(wrap_pyfunction!(algebra_dim, m)?)?;
    m.add_function(wrap_pyfunction!(member, m)?)?;
    Ok(())
}
