//! Python bindings. Orderings are lists of 0-based mode indices.

use std::collections::{BTreeMap, BTreeSet};
use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

use quesadilla as q;

fn py_err(e: q::Error) -> PyErr {
    match e {
        q::Error::Io(io) => PyOSError::new_err(io.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn ordering(modes: Vec<usize>) -> PyResult<q::Ordering> {
    q::Ordering::new(modes).map_err(py_err)
}

fn strategy(name: &str) -> PyResult<q::SortStrategy> {
    name.parse().map_err(py_err)
}

/// Sparse tensor in coordinate format. Rows are lists of 0-based indices.
#[pyclass(name = "CooTensor", module = "quesadilla", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyCooTensor {
    inner: q::CooTensor,
}

#[pymethods]
impl PyCooTensor {
    #[new]
    fn new(dims: Vec<usize>, coords: Vec<Vec<u32>>, values: Vec<f64>) -> PyResult<Self> {
        let inner = q::CooTensor::from_rows(dims, &coords, values).map_err(py_err)?;
        Ok(PyCooTensor { inner })
    }

    #[getter]
    fn dims(&self) -> Vec<usize> {
        self.inner.dims().to_vec()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    #[getter]
    fn coords(&self) -> Vec<Vec<u32>> {
        self.inner.rows().map(<[u32]>::to_vec).collect()
    }

    #[getter]
    fn values(&self) -> Vec<f64> {
        self.inner.values().to_vec()
    }

    fn __len__(&self) -> usize {
        self.inner.nnz()
    }

    fn __repr__(&self) -> String {
        format!("CooTensor(dims={:?}, nnz={})", self.inner.dims(), self.inner.nnz())
    }

    fn is_sorted_under(&self, ordering_modes: Vec<usize>) -> PyResult<bool> {
        self.inner.is_sorted_under(&ordering(ordering_modes)?).map_err(py_err)
    }

    /// Copy sorted under `target`. The tensor must be simply ordered.
    ///
    /// `strategy` is one of quesadilla, radix, qsort, splatt or topK.
    #[pyo3(signature = (target, strategy = "quesadilla", workers = None, schedule = "dynamic", verify = false))]
    fn transpose(
        &self,
        py: Python<'_>,
        target: Vec<usize>,
        strategy: &str,
        workers: Option<usize>,
        schedule: &str,
        verify: bool,
    ) -> PyResult<Self> {
        let target = ordering(target)?;
        let strategy = self::strategy(strategy)?;
        let schedule = match schedule {
            "dynamic" => q::BucketSchedule::Dynamic,
            "guided" => q::BucketSchedule::Guided,
            other => return Err(PyValueError::new_err(format!("unknown schedule {other:?}"))),
        };
        let parallel = workers
            .map(|w| q::ParallelConfig::new(w).map(|c| c.with_schedule(schedule)))
            .transpose()
            .map_err(py_err)?;
        let opts = q::TransposeOptions { verify, parallel };
        let inner = py
            .detach(|| q::transpose_with(&self.inner, &target, strategy, &opts))
            .map_err(py_err)?;
        Ok(PyCooTensor { inner })
    }
}

/// One partial-sort pass.
#[pyclass(name = "PlanStep", module = "quesadilla", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyPlanStep {
    #[pyo3(get)]
    prefix_len: usize,
    #[pyo3(get)]
    mode: usize,
}

#[pymethods]
impl PyPlanStep {
    #[getter]
    fn bucketed(&self) -> bool {
        self.prefix_len > 0
    }

    fn __repr__(&self) -> String {
        format!("PlanStep(prefix_len={}, mode={})", self.prefix_len, self.mode)
    }
}

#[pyclass(name = "SortPlan", module = "quesadilla", frozen)]
struct PySortPlan {
    #[pyo3(get)]
    target: Vec<usize>,
    #[pyo3(get)]
    steps: Vec<PyPlanStep>,
    #[pyo3(get)]
    total_passes: usize,
    #[pyo3(get)]
    bucketed_passes: usize,
}

impl From<q::SortPlan> for PySortPlan {
    fn from(p: q::SortPlan) -> Self {
        let cost = p.cost();
        PySortPlan {
            target: p.target.modes().to_vec(),
            steps: p
                .steps
                .iter()
                .map(|s| PyPlanStep { prefix_len: s.prefix_len, mode: s.mode })
                .collect(),
            total_passes: cost.total_passes,
            bucketed_passes: cost.bucketed_passes,
        }
    }
}

#[pymethods]
impl PySortPlan {
    fn __len__(&self) -> usize {
        self.steps.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "SortPlan(target={:?}, passes={}, bucketed={})",
            self.target, self.total_passes, self.bucketed_passes
        )
    }
}

#[pyfunction]
fn quesadilla_plan(target: Vec<usize>) -> PyResult<PySortPlan> {
    Ok(q::quesadilla_plan(&ordering(target)?).into())
}

#[pyfunction]
fn prefix_plan(target: Vec<usize>, k: usize) -> PyResult<PySortPlan> {
    q::prefix_plan(&ordering(target)?, k).map(Into::into).map_err(py_err)
}

#[pyfunction]
fn required_sort_count(source: Vec<usize>, target: Vec<usize>) -> PyResult<usize> {
    q::required_sort_count(&ordering(source)?, &ordering(target)?).map_err(py_err)
}

/// `(total_passes, bucketed_passes)` of the cheapest plan, by exhaustive search.
#[pyfunction]
fn min_plan_bruteforce(target: Vec<usize>) -> PyResult<(usize, usize)> {
    let c = q::min_plan_bruteforce(&ordering(target)?).map_err(py_err)?;
    Ok((c.total_passes, c.bucketed_passes))
}

#[pyfunction]
fn pass_histogram(rank: usize) -> PyResult<BTreeMap<usize, usize>> {
    q::pass_histogram(rank).map_err(py_err)
}

#[pyfunction]
fn follow_set(ordering_modes: Vec<usize>, mode: usize) -> PyResult<BTreeSet<usize>> {
    ordering(ordering_modes)?.follow_set(mode).map_err(py_err)
}

#[pyfunction]
fn apply_transition(current: Vec<usize>, prefix_len: usize, mode: usize) -> PyResult<Vec<usize>> {
    q::apply_transition(&ordering(current)?, q::PlanStep::new(prefix_len, mode))
        .map(|o| o.modes().to_vec())
        .map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (path, dims = None, canonicalize = true))]
fn read_tns(path: PathBuf, dims: Option<Vec<usize>>, canonicalize: bool) -> PyResult<PyCooTensor> {
    let (inner, _) = q::read_tns_with(path, &q::TnsOptions { dims, canonicalize }).map_err(py_err)?;
    Ok(PyCooTensor { inner })
}

#[pyfunction]
fn write_tns(tensor: &PyCooTensor, path: PathBuf) -> PyResult<()> {
    q::write_tns(&tensor.inner, path).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (dims, nnz, seed = 0, distinct = false))]
fn generate(dims: Vec<usize>, nnz: usize, seed: u64, distinct: bool) -> PyResult<PyCooTensor> {
    let mut spec = q::GenSpec::new(dims, nnz, seed);
    if distinct {
        spec = spec.distinct();
    }
    Ok(PyCooTensor { inner: q::generate(&spec).map_err(py_err)? })
}

#[pymodule]
#[pyo3(name = "quesadilla")]
fn quesadilla_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCooTensor>()?;
    m.add_class::<PyPlanStep>()?;
    m.add_class::<PySortPlan>()?;
    m.add_function(wrap_pyfunction!(quesadilla_plan, m)?)?;
    m.add_function(wrap_pyfunction!(prefix_plan, m)?)?;
    m.add_function(wrap_pyfunction!(required_sort_count, m)?)?;
    m.add_function(wrap_pyfunction!(min_plan_bruteforce, m)?)?;
    m.add_function(wrap_pyfunction!(pass_histogram, m)?)?;
    m.add_function(wrap_pyfunction!(follow_set, m)?)?;
    m.add_function(wrap_pyfunction!(apply_transition, m)?)?;
    m.add_function(wrap_pyfunction!(read_tns, m)?)?;
    m.add_function(wrap_pyfunction!(write_tns, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
