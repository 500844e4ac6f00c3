//! Python bindings. Group elements cross the boundary as lists of rows,
//! affine elements as `(a, b)` pairs, and reports as plain dicts.

use num_bigint::BigUint;
use num_complex::Complex64;
use pargrowth::cfrac::{self, Alphabet, Parity};
use pargrowth::fourier::{self, AffElem};
use pargrowth::matgrp::{ParabolicSpec, SubgroupKind};
use pargrowth::random::rng;
use pargrowth::{setops, ElemSet, GroupElem, SlGroup, WeylElem, DEFAULT_BUDGET};
use pargrowth_cli::config::{CheckSpec, ExperimentConfig};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};
use pyo3::IntoPyObjectExt;
use serde::Serialize;
use serde_json::Value;

type Rows = Vec<Vec<u32>>;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    match v {
        Value::Null => Ok(py.None().into_bound(py)),
        Value::Bool(b) => b.into_bound_py_any(py),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => u.into_bound_py_any(py),
            (_, Some(i)) => i.into_bound_py_any(py),
            _ => n.as_f64().unwrap_or(f64::NAN).into_bound_py_any(py),
        },
        Value::String(s) => s.into_bound_py_any(py),
        Value::Array(items) => {
            let list = PyList::empty(py);
            for x in items {
                list.append(to_py(py, x)?)?;
            }
            Ok(list.into_any())
        }
        Value::Object(map) => {
            let dict = PyDict::new(py);
            for (k, x) in map {
                dict.set_item(k, to_py(py, x)?)?;
            }
            Ok(dict.into_any())
        }
    }
}

fn report<'py, T: Serialize>(py: Python<'py>, r: &T) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &serde_json::to_value(r).map_err(err)?)
}

fn alphabet(digits: Vec<u64>) -> PyResult<Alphabet> {
    Alphabet::new(digits).map_err(err)
}

/// `SL_n(F_p)` for `2 ≤ n ≤ 4`.
#[pyclass(name = "SlGroup", module = "pargrowth", frozen)]
struct PySlGroup {
    g: SlGroup,
}

impl PySlGroup {
    fn elem(&self, rows: Vec<Vec<i64>>) -> PyResult<GroupElem> {
        self.g.from_rows(&rows).map_err(err)
    }
}

#[pymethods]
impl PySlGroup {
    #[new]
    fn new(n: usize, p: u64) -> PyResult<Self> {
        Ok(Self { g: SlGroup::new(n, p).map_err(err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.g.n()
    }

    #[getter]
    fn p(&self) -> u32 {
        self.g.p()
    }

    fn order(&self) -> PyResult<u128> {
        self.g.order().map_err(err)
    }

    fn identity(&self) -> Rows {
        self.g.identity().rows()
    }

    /// Checks `rows` has determinant 1 and returns it reduced mod p.
    fn element(&self, rows: Vec<Vec<i64>>) -> PyResult<Rows> {
        Ok(self.elem(rows)?.rows())
    }

    fn mul(&self, a: Vec<Vec<i64>>, b: Vec<Vec<i64>>) -> PyResult<Rows> {
        Ok(self.g.mul(&self.elem(a)?, &self.elem(b)?).rows())
    }

    fn inv(&self, a: Vec<Vec<i64>>) -> PyResult<Rows> {
        Ok(self.g.inv(&self.elem(a)?).rows())
    }

    #[pyo3(signature = (budget = DEFAULT_BUDGET))]
    fn elements(&self, budget: u128) -> PyResult<PyElemSet> {
        Ok(PyElemSet { s: self.g.enumerate(budget).map_err(err)? })
    }

    /// `kind` is one of `borel`, `lower_borel`, `unipotent`, `torus`,
    /// `parabolic` (with `j`) or `whole`.
    #[pyo3(signature = (kind, j = None))]
    fn subgroup(&self, kind: &str, j: Option<Vec<usize>>) -> PyResult<PyElemSet> {
        let kind = match kind {
            "borel" => SubgroupKind::Borel,
            "lower_borel" => SubgroupKind::LowerBorel,
            "unipotent" => SubgroupKind::Unipotent,
            "torus" => SubgroupKind::Torus,
            "whole" => SubgroupKind::Whole,
            "parabolic" => {
                let spec = ParabolicSpec::new(self.g.n(), &j.unwrap_or_default()).map_err(err)?;
                SubgroupKind::Parabolic(spec)
            }
            other => return Err(err(format!("unknown subgroup kind {other:?}"))),
        };
        Ok(PyElemSet { s: self.g.subgroup(&kind, DEFAULT_BUDGET).map_err(err)? })
    }

    /// A set from a list of matrices.
    fn set(&self, elems: Vec<Vec<Vec<i64>>>) -> PyResult<PyElemSet> {
        let xs = elems.into_iter().map(|r| self.elem(r)).collect::<PyResult<Vec<_>>>()?;
        Ok(PyElemSet { s: ElemSet::from_vec(self.g, xs) })
    }

    /// `(b, w, u)` with `g = b·ẇ·u`; `w` is given by its images `w(1), …, w(n)`.
    fn bruhat(&self, rows: Vec<Vec<i64>>) -> PyResult<(Rows, Vec<usize>, Rows)> {
        let f = self.g.bruhat_decompose(&self.elem(rows)?);
        Ok((f.b.rows(), f.w.images(), f.u.rows()))
    }

    fn weyl_rep(&self, images: Vec<usize>) -> PyResult<Rows> {
        Ok(self.g.weyl_rep(&WeylElem::from_images(&images).map_err(err)?).rows())
    }

    /// `[(images of w, |BwB|), …]` in Weyl order.
    fn bruhat_census(&self) -> PyResult<Vec<(Vec<usize>, u64)>> {
        let c = self.g.bruhat_cell_census(DEFAULT_BUDGET).map_err(err)?;
        Ok(c.into_iter().map(|(w, n)| (w.images(), n)).collect())
    }

    fn __repr__(&self) -> String {
        format!("SlGroup({}, {})", self.g.n(), self.g.p())
    }
}

/// A finite subset of one `SL_n(F_p)`; `*` is the product set.
#[pyclass(name = "ElemSet", module = "pargrowth", frozen)]
struct PyElemSet {
    s: ElemSet,
}

#[pymethods]
impl PyElemSet {
    fn __len__(&self) -> usize {
        self.s.len()
    }

    fn __contains__(&self, rows: Vec<Vec<i64>>) -> bool {
        self.s.group().from_rows(&rows).is_ok_and(|g| self.s.contains(&g))
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.s == other.s
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        Ok(Self { s: setops::product(&self.s, &other.s).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!("ElemSet(<{} elements of {}>)", self.s.len(), self.s.group())
    }

    fn group(&self) -> PySlGroup {
        PySlGroup { g: self.s.group() }
    }

    fn to_list(&self) -> Vec<Rows> {
        self.s.iter().map(|g| g.rows()).collect()
    }

    fn inverse(&self) -> Self {
        Self { s: self.s.inverse() }
    }

    fn union(&self, other: &Self) -> Self {
        Self { s: self.s.union(&other.s) }
    }

    fn intersection(&self, other: &Self) -> Self {
        Self { s: self.s.intersection(&other.s) }
    }

    fn is_subgroup(&self) -> bool {
        self.s.is_subgroup()
    }

    /// A uniformly random `k`-subset drawn with the given seed.
    #[pyo3(signature = (k, seed = 0))]
    fn random_subset(&self, k: usize, seed: u64) -> Self {
        Self { s: pargrowth::random::random_subset(&self.s, k, &mut rng(seed)) }
    }
}

#[pyfunction]
fn verify_growth<'py>(py: Python<'py>, a: &PyElemSet, p: &PyElemSet) -> PyResult<Bound<'py, PyAny>> {
    let r = setops::verify_growth(&a.s, &p.s).map_err(err)?;
    let out = report(py, &r)?;
    out.set_item("holds", r.holds())?;
    Ok(out)
}

#[pyfunction]
#[pyo3(signature = (a, target, n_max = 8))]
fn power_intersect<'py>(py: Python<'py>, a: &PyElemSet, target: &PyElemSet, n_max: u32) -> PyResult<Bound<'py, PyAny>> {
    report(py, &setops::power_intersect(&a.s, &target.s, n_max).map_err(err)?)
}

#[pyfunction]
fn r_pgp_census<'py>(py: Python<'py>, p: &PyElemSet) -> PyResult<Bound<'py, PyAny>> {
    report(py, &setops::r_pgp_census(&p.s, DEFAULT_BUDGET).map_err(err)?)
}

#[pyfunction]
fn qr_fixture(p: u64) -> PyResult<PyElemSet> {
    Ok(PyElemSet { s: setops::qr_fixture(p).map_err(err)? })
}

#[pyfunction]
fn expand(a: u64, q: u64) -> PyResult<Vec<u64>> {
    Ok(cfrac::expand(a, q).map_err(err)?.digits)
}

/// `(p_{s-1}, p_s, q_{s-1}, q_s)` of the continuant product.
#[pyfunction]
fn continuant(digits: Vec<u64>) -> PyResult<(BigUint, BigUint, BigUint, BigUint)> {
    let [a, b, c, d] = cfrac::continuant(&digits).map_err(err)?.entries;
    Ok((a, b, c, d))
}

/// Members `(u, v, digits)` of the set of `u/v` with `v ≤ q_max` and all
/// partial quotients in `alphabet`.
#[pyfunction]
fn enumerate_f(digits: Vec<u64>, q_max: u64) -> PyResult<Vec<(u64, u64, Vec<u64>)>> {
    Ok(cfrac::enumerate_f(&alphabet(digits)?, q_max).into_iter().map(|f| (f.u, f.v, f.digits)).collect())
}

#[pyfunction]
fn count_f(digits: Vec<u64>, q_max: u64) -> PyResult<u64> {
    Ok(cfrac::count_f(&alphabet(digits)?, q_max))
}

#[pyfunction]
fn dimension_estimate<'py>(py: Python<'py>, digits: Vec<u64>, qs: Vec<u64>) -> PyResult<Bound<'py, PyAny>> {
    report(py, &cfrac::dimension_estimate(&alphabet(digits)?, &qs).map_err(err)?)
}

/// Smallest `q = kp` (`k ≤ limit`, default `p`) admitting `a/q` with all
/// partial quotients in `digits`, or `None`.
#[pyfunction]
#[pyo3(signature = (p, digits, limit = None))]
fn zaremba_search<'py>(py: Python<'py>, p: u64, digits: Vec<u64>, limit: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    let r = cfrac::zaremba_search(p, &alphabet(digits)?, limit.unwrap_or(p)).map_err(err)?;
    report(py, &r)
}

#[pyfunction]
fn matrix_set_mod_p(digits: Vec<u64>, q_max: u64, p: u64) -> PyResult<PyElemSet> {
    Ok(PyElemSet { s: cfrac::matrix_set_mod_p(&alphabet(digits)?, q_max, p, Parity::Even).map_err(err)? })
}

#[pyfunction]
#[pyo3(signature = (p, digits, k = 2))]
fn lambda_set(p: u64, digits: Vec<u64>, k: u32) -> PyResult<PyElemSet> {
    Ok(PyElemSet { s: cfrac::lambda_set(p, &alphabet(digits)?, k).map_err(err)? })
}

#[pyfunction]
fn verify_sigma_bounds<'py>(py: Python<'py>, a: &PyElemSet, m: u64) -> PyResult<Bound<'py, PyAny>> {
    report(py, &cfrac::verify_sigma_bounds(&a.s, m).map_err(err)?)
}

/// `Aff(F_p)`; functions are lists of `p(p-1)` complex values indexed like
/// `elements()`.
#[pyclass(name = "AffGroup", module = "pargrowth", frozen)]
struct PyAffGroup {
    g: fourier::AffGroup,
}

impl PyAffGroup {
    fn elems(&self, pairs: Vec<(i64, i64)>) -> PyResult<Vec<AffElem>> {
        pairs.into_iter().map(|(a, b)| self.g.elem(a, b).map_err(err)).collect()
    }
}

fn pairs(xs: Vec<AffElem>) -> Vec<(u32, u32)> {
    xs.into_iter().map(|x| (x.a, x.b)).collect()
}

#[pymethods]
impl PyAffGroup {
    #[new]
    fn new(p: u64) -> PyResult<Self> {
        Ok(Self { g: fourier::AffGroup::new(p).map_err(err)? })
    }

    fn order(&self) -> usize {
        self.g.order()
    }

    fn elements(&self) -> Vec<(u32, u32)> {
        pairs(self.g.elements().collect())
    }

    fn torus(&self) -> Vec<(u32, u32)> {
        pairs(self.g.torus())
    }

    fn generated(&self, gens: Vec<(i64, i64)>) -> PyResult<Vec<(u32, u32)>> {
        Ok(pairs(self.g.generated(&self.elems(gens)?)))
    }

    fn parseval_check<'py>(&self, py: Python<'py>, f: Vec<Complex64>) -> PyResult<Bound<'py, PyAny>> {
        report(py, &self.g.parseval_check(&f).map_err(err)?)
    }

    fn inversion_check<'py>(&self, py: Python<'py>, f: Vec<Complex64>) -> PyResult<Bound<'py, PyAny>> {
        report(py, &self.g.inversion_check(&f).map_err(err)?)
    }

    fn convolution_check<'py>(&self, py: Python<'py>, f: Vec<Complex64>, h: Vec<Complex64>) -> PyResult<Bound<'py, PyAny>> {
        report(py, &self.g.convolution_check(&f, &h).map_err(err)?)
    }

    fn wiener_norm(&self, set: Vec<(i64, i64)>) -> PyResult<f64> {
        self.g.wiener_norm_of_set(&self.elems(set)?).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("AffGroup({})", self.g.p())
    }
}

#[pyfunction]
fn borel_class_count<'py>(py: Python<'py>, p: u64) -> PyResult<Bound<'py, PyAny>> {
    report(py, &fourier::borel_class_count(p).map_err(err)?)
}

/// Runs one acceptance check by name (e.g. `"zaremba"`) with default
/// parameters and returns its record.
#[pyfunction]
#[pyo3(signature = (name, seed = 0))]
fn run_check<'py>(py: Python<'py>, name: &str, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    let spec: CheckSpec = serde_json::from_value(serde_json::json!({ "check": name })).map_err(err)?;
    let rec = py.detach(|| pargrowth_cli::checks::run_check(&spec, seed)).map_err(err)?;
    report(py, &rec)
}

/// Runs a batch config given as JSON text and returns the run record.
#[pyfunction]
#[pyo3(signature = (config, jobs = 1))]
fn run_experiment<'py>(py: Python<'py>, config: &str, jobs: usize) -> PyResult<Bound<'py, PyAny>> {
    let cfg = ExperimentConfig::from_json(config).map_err(err)?;
    let rec = py.detach(|| pargrowth_cli::record::run_config(&cfg, jobs, |_, _| {})).map_err(err)?;
    report(py, &rec)
}

#[pymodule]
fn _native(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySlGroup>()?;
    m.add_class::<PyElemSet>()?;
    m.add_class::<PyAffGroup>()?;
    m.add_function(wrap_pyfunction!(verify_growth, m)?)?;
    m.add_function(wrap_pyfunction!(power_intersect, m)?)?;
    m.add_function(wrap_pyfunction!(r_pgp_census, m)?)?;
    m.add_function(wrap_pyfunction!(qr_fixture, m)?)?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(continuant, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_f, m)?)?;
    m.add_function(wrap_pyfunction!(count_f, m)?)?;
    m.add_function(wrap_pyfunction!(dimension_estimate, m)?)?;
    m.add_function(wrap_pyfunction!(zaremba_search, m)?)?;
    m.add_function(wrap_pyfunction!(matrix_set_mod_p, m)?)?;
    m.add_function(wrap_pyfunction!(lambda_set, m)?)?;
    m.add_function(wrap_pyfunction!(verify_sigma_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(borel_class_count, m)?)?;
    m.add_function(wrap_pyfunction!(run_check, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn json_values_convert() {
        Python::attach(|py| {
            let v = serde_json::json!({"a": [1, -2, 2.5, null, true], "b": "x"});
            let o = to_py(py, &v).unwrap();
            assert_eq!(o.get_item("b").unwrap().extract::<String>().unwrap(), "x");
            let a = o.get_item("a").unwrap();
            assert_eq!(a.get_item(1).unwrap().extract::<i64>().unwrap(), -2);
            assert_eq!(a.get_item(2).unwrap().extract::<f64>().unwrap(), 2.5);
            assert!(a.get_item(3).unwrap().is_none());
        });
    }

    #[test]
    fn growth_report_has_verdict() {
        Python::attach(|py| {
            let g = PySlGroup::new(2, 5).unwrap();
            let b = g.subgroup("borel", None).unwrap();
            let r = verify_growth(py, &g.elements(DEFAULT_BUDGET).unwrap(), &b).unwrap();
            assert!(r.get_item("holds").unwrap().extract::<bool>().unwrap());
            assert_eq!(r.get_item("size_ap").unwrap().extract::<u64>().unwrap(), 120);
        });
    }
}
