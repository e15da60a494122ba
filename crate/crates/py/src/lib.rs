//! Python bindings: fields and extensions, close-pair certificates, tori, their point quotients
//! and transfer isomorphisms, plus the scenario runner.

use std::sync::Arc;

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use closefield::abelian::{subgroup, GroupElem, GroupHom};
use closefield::arith::Tower;
use closefield::fixtures;
use closefield::ramification::{certify_close, relative_herbrand, ClosePairCertificate, HerbrandData, Q};
use closefield::scenario::{self, RunOptions, Scenario};
use closefield::tori::{TorusPointsQuotient, TorusSpec};
use closefield::transfer::{self as tr, ClosePairDatum, IsoOutcome};

create_exception!(closefield, ClosefieldError, PyException);

fn err(e: closefield::Error) -> PyErr {
    ClosefieldError::new_err(e.to_string())
}

fn to_q(x: &Bound<'_, PyAny>) -> PyResult<Q> {
    let n: i64 = x.getattr("numerator")?.extract()?;
    let d: i64 = x.getattr("denominator")?.extract()?;
    if d == 0 {
        return Err(ClosefieldError::new_err("zero denominator"));
    }
    Ok(Q::new(n, d))
}

fn from_q<'py>(py: Python<'py>, x: Q) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((*x.numer(), *x.denom()))
}

fn to_elem(v: &[i64]) -> GroupElem {
    v.iter().map(|&c| c.into()).collect()
}

fn from_elem(v: &[BigInt]) -> PyResult<Vec<i64>> {
    v.iter().map(|c| i64::try_from(c).map_err(|_| ClosefieldError::new_err("coordinate does not fit in 64 bits"))).collect()
}

/// A local field presented as a tower over Q_p or F_p((t)).
#[pyclass(frozen, skip_from_py_object, name = "Field", module = "closefield")]
#[derive(Clone)]
struct PyField(Arc<Tower>);

#[pymethods]
impl PyField {
    /// F_p((t)) with `precision` digits.
    #[staticmethod]
    fn laurent(p: u64, precision: usize) -> PyResult<Self> {
        fixtures::laurent(p, precision).map(PyField).map_err(err)
    }

    #[staticmethod]
    fn padic(p: u64, precision: usize) -> PyResult<Self> {
        fixtures::padic(p, precision).map(PyField).map_err(err)
    }

    /// Adjoin a root of x^degree - c * (uniformizer).
    #[pyo3(signature = (name, generator, degree, c = 1))]
    fn eisenstein(&self, name: &str, generator: &str, degree: usize, c: i64) -> PyResult<Self> {
        fixtures::eisenstein(&self.0, name, generator, degree, c).map(PyField).map_err(err)
    }

    fn unramified(&self, name: &str, generator: &str, degree: usize) -> PyResult<Self> {
        self.0.extend_unramified(name, generator, degree).map(PyField).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[getter]
    fn p(&self) -> u64 {
        self.0.p()
    }

    #[getter]
    fn e(&self) -> usize {
        self.0.e()
    }

    #[getter]
    fn f(&self) -> usize {
        self.0.f()
    }

    #[getter]
    fn levels(&self) -> usize {
        self.0.levels()
    }

    /// Herbrand data of this field over the level `base` of its tower (default: the level below the top).
    #[pyo3(signature = (base = None))]
    fn herbrand(&self, base: Option<usize>) -> PyResult<PyHerbrand> {
        let base = base.unwrap_or(self.0.levels().saturating_sub(1));
        relative_herbrand(&self.0, base).map(PyHerbrand).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Field({})", self.0.name)
    }
}

#[pyclass(frozen, name = "Herbrand", module = "closefield")]
struct PyHerbrand(HerbrandData);

#[pymethods]
impl PyHerbrand {
    fn phi<'py>(&self, py: Python<'py>, x: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        from_q(py, self.0.phi.eval(to_q(x)?))
    }

    fn psi<'py>(&self, py: Python<'py>, x: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        from_q(py, self.0.psi.eval(to_q(x)?))
    }

    #[getter]
    fn e(&self) -> usize {
        self.0.e
    }

    #[getter]
    fn different(&self) -> usize {
        self.0.different_val
    }

    fn is_tame(&self) -> bool {
        self.0.is_tame()
    }

    fn upper_breaks<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.0.upper_breaks().into_iter().map(|b| from_q(py, b)).collect()
    }

    /// l(1) = psi(l).
    fn l_one(&self, l: usize) -> PyResult<usize> {
        self.0.l_one(l).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("Herbrand({})", self.0)
    }
}

/// An l-closeness certificate between two fields.
#[pyclass(frozen, skip_from_py_object, name = "Certificate", module = "closefield")]
#[derive(Clone)]
struct PyCertificate(ClosePairCertificate);

#[pymethods]
impl PyCertificate {
    #[staticmethod]
    fn certify(left: &PyField, right: &PyField, level: usize) -> PyResult<Self> {
        certify_close(&left.0, &right.0, level).map(PyCertificate).map_err(err)
    }

    /// Certificate with explicitly matched uniformizers, given as integer multiples of the base ones.
    #[staticmethod]
    fn with_uniformizers(left: &PyField, right: &PyField, level: usize, left_unit: i64, right_unit: i64) -> PyResult<Self> {
        let lv = left.0.uniformizer().mul(&left.0.from_int(left_unit)).map_err(err)?;
        let rv = right.0.uniformizer().mul(&right.0.from_int(right_unit)).map_err(err)?;
        ClosePairCertificate::certify_with(&left.0, &right.0, level, &lv, &rv).map(PyCertificate).map_err(err)
    }

    /// Q_3(sqrt 3) and F_3((t)) at level 2.
    #[staticmethod]
    fn quadratic_pair() -> PyResult<Self> {
        fixtures::quadratic_pair().map(PyCertificate).map_err(err)
    }

    /// Q_3(3^{1/4}) and F_3((t)) at level 4.
    #[staticmethod]
    fn quartic_pair() -> PyResult<Self> {
        fixtures::quartic_pair().map(PyCertificate).map_err(err)
    }

    #[getter]
    fn level(&self) -> usize {
        self.0.level
    }

    #[getter]
    fn left(&self) -> PyField {
        PyField(self.0.left.clone())
    }

    #[getter]
    fn right(&self) -> PyField {
        PyField(self.0.right.clone())
    }

    fn is_standard(&self) -> bool {
        self.0.is_standard()
    }

    fn inverse(&self) -> Self {
        PyCertificate(self.0.inverse())
    }

    fn __str__(&self) -> String {
        self.0.to_text()
    }
}

#[pyclass(frozen, skip_from_py_object, name = "Torus", module = "closefield")]
#[derive(Clone)]
struct PyTorus(TorusSpec);

#[pymethods]
impl PyTorus {
    #[staticmethod]
    #[pyo3(signature = (name, field, rank = 1))]
    fn split(name: &str, field: &PyField, rank: usize) -> PyResult<Self> {
        TorusSpec::split(name, &field.0, rank).map(PyTorus).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (name, field, ext, rank = 1))]
    fn weil_restriction(name: &str, field: &PyField, ext: &PyField, rank: usize) -> PyResult<Self> {
        TorusSpec::weil_restriction(name, &field.0, &ext.0, rank).map(PyTorus).map_err(err)
    }

    #[staticmethod]
    fn norm_one(name: &str, field: &PyField, ext: &PyField) -> PyResult<Self> {
        TorusSpec::norm_one(name, &field.0, &ext.0).map(PyTorus).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[getter]
    fn rank(&self) -> usize {
        self.0.rank()
    }

    fn is_weakly_induced(&self) -> bool {
        self.0.is_weakly_induced()
    }

    /// T(F) modulo the naive filtration subgroup at level r.
    fn points(&self, r: &Bound<'_, PyAny>) -> PyResult<PyPoints> {
        TorusPointsQuotient::new(&self.0, to_q(r)?).map(|q| PyPoints(Arc::new(q))).map_err(err)
    }

    fn __repr__(&self) -> String {
        self.0.describe()
    }
}

fn hom_source(h: &GroupHom) -> String {
    h.source.to_string()
}

#[pyclass(frozen, name = "Points", module = "closefield")]
struct PyPoints(Arc<TorusPointsQuotient>);

#[pymethods]
impl PyPoints {
    /// Invariant factors of the quotient, e.g. "Z/6 x Z".
    #[getter]
    fn group(&self) -> String {
        self.0.group().to_string()
    }

    fn bounded(&self) -> String {
        hom_source(&self.0.bounded())
    }

    fn iwahori(&self) -> PyResult<String> {
        self.0.iwahori().map(|h| hom_source(&h)).map_err(err)
    }

    fn naive(&self, s: &Bound<'_, PyAny>) -> PyResult<String> {
        self.0.naive(to_q(s)?).map(|h| hom_source(&h)).map_err(err)
    }

    fn standard(&self, s: &Bound<'_, PyAny>) -> PyResult<String> {
        self.0.standard(to_q(s)?).map(|h| hom_source(&h)).map_err(err)
    }

    fn congruent(&self, s: &Bound<'_, PyAny>) -> PyResult<String> {
        self.0.congruent(to_q(s)?).map(|h| hom_source(&h)).map_err(err)
    }

    /// Whether the standard and naive subgroups at level s coincide.
    fn collapses(&self, s: &Bound<'_, PyAny>) -> PyResult<bool> {
        let s = to_q(s)?;
        Ok(subgroup::equal(&self.0.naive(s).map_err(err)?, &self.0.standard(s).map_err(err)?))
    }

    fn kottwitz_target(&self) -> PyResult<String> {
        self.0.kottwitz().map(|k| k.target().to_string()).map_err(err)
    }

    fn kottwitz(&self, x: Vec<i64>) -> PyResult<Vec<i64>> {
        let k = self.0.kottwitz().map_err(err)?;
        from_elem(&k.value(&self.0.group().normalize(&to_elem(&x))))
    }

    fn format(&self, x: Vec<i64>) -> String {
        self.0.format(&self.0.group().normalize(&to_elem(&x)))
    }
}

/// A report of element-wise checks.
#[pyclass(frozen, name = "Report", module = "closefield")]
struct PyReport(tr::Report);

#[pymethods]
impl PyReport {
    #[getter]
    fn passed(&self) -> bool {
        self.0.passed()
    }

    #[getter]
    fn checked(&self) -> usize {
        self.0.checked()
    }

    /// (label, passed, count, witness) per check.
    #[getter]
    fn lines(&self) -> Vec<(String, bool, usize, Option<String>)> {
        self.0.lines.iter().map(|l| (l.label.clone(), l.passed, l.count, l.witness.clone())).collect()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

fn line_report(title: &str, line: tr::CheckLine) -> PyReport {
    let mut rep = tr::Report::new(title);
    rep.push(line);
    PyReport(rep)
}

/// A close pair together with a torus over its left field.
#[pyclass(frozen, name = "Datum", module = "closefield")]
struct PyDatum(ClosePairDatum);

#[pymethods]
impl PyDatum {
    #[new]
    fn new(cert: &PyCertificate, torus: &PyTorus) -> PyResult<Self> {
        ClosePairDatum::new(&cert.0, &torus.0).map(PyDatum).map_err(err)
    }

    #[getter]
    fn right_torus(&self) -> PyTorus {
        PyTorus(self.0.right.clone())
    }

    fn reversed(&self) -> Self {
        PyDatum(self.0.reversed())
    }

    fn standard_iso(&self, r: &Bound<'_, PyAny>) -> PyResult<PyIso> {
        iso_or_error(tr::build_standard_iso(&self.0, to_q(r)?).map_err(err)?)
    }

    #[pyo3(signature = (m, stage_degree = None, cap = 10_000))]
    fn congruent_iso(&self, m: usize, stage_degree: Option<usize>, cap: usize) -> PyResult<PyIso> {
        iso_or_error(tr::build_congruent_iso(&self.0, m, stage_degree, cap).map_err(err)?)
    }

    #[pyo3(signature = (r, stage_degree = None, cap = 10_000))]
    fn verify_equivariance(&self, r: &Bound<'_, PyAny>, stage_degree: Option<usize>, cap: usize) -> PyResult<PyReport> {
        tr::verify_equivariance(&self.0, to_q(r)?, stage_degree, cap).map(PyReport).map_err(err)
    }

    #[pyo3(signature = (r, s, cap = 10_000))]
    fn verify_level_reduction(&self, r: &Bound<'_, PyAny>, s: &Bound<'_, PyAny>, cap: usize) -> PyResult<PyReport> {
        tr::verify_level_reduction(&self.0, to_q(r)?, to_q(s)?, cap).map(PyReport).map_err(err)
    }
}

fn iso_or_error(out: IsoOutcome) -> PyResult<PyIso> {
    match out {
        IsoOutcome::Built(t) => Ok(PyIso(t)),
        IsoOutcome::NotOnto { witness } => Err(ClosefieldError::new_err(format!("no isomorphism: {witness}"))),
    }
}

#[pyclass(frozen, name = "TransferIso", module = "closefield")]
struct PyIso(tr::TransferIso);

#[pymethods]
impl PyIso {
    #[getter]
    fn kind(&self) -> String {
        self.0.kind.to_string()
    }

    #[getter]
    fn source(&self) -> PyPoints {
        PyPoints(self.0.source().clone())
    }

    #[getter]
    fn target(&self) -> PyPoints {
        PyPoints(self.0.target().clone())
    }

    /// Image of a point given in the source's generator coordinates.
    fn apply(&self, x: Vec<i64>) -> PyResult<Vec<i64>> {
        from_elem(&self.0.apply(&self.0.source().group().normalize(&to_elem(&x))))
    }

    fn corresponds(&self, x: Vec<i64>, y: Vec<i64>) -> bool {
        let x = self.0.source().group().normalize(&to_elem(&x));
        let y = self.0.target().group().normalize(&to_elem(&y));
        self.0.pair.correspond(&x, &y)
    }

    #[pyo3(signature = (cap = 10_000))]
    fn check_correspondence(&self, cap: usize) -> PyReport {
        line_report("standard correspondence", self.0.check_correspondence(cap))
    }

    #[pyo3(signature = (cap = 10_000))]
    fn verify_kottwitz(&self, cap: usize) -> PyResult<PyReport> {
        tr::verify_kottwitz(&self.0, cap).map(PyReport).map_err(err)
    }

    #[pyo3(signature = (cap = 10_000))]
    fn verify_symmetry(&self, cap: usize) -> PyResult<PyReport> {
        tr::verify_symmetry(&self.0, cap).map(|l| line_report("symmetry", l)).map_err(err)
    }

    #[pyo3(signature = (cap = 10_000))]
    fn uniqueness(&self, cap: usize) -> PyReport {
        line_report("uniqueness", tr::uniqueness_scan(&self.0.pair, cap))
    }
}

/// Runs scenario text; returns (all tasks passed, report text).
#[pyfunction]
#[pyo3(signature = (text, stage_degree = None, max_enumeration = 10_000))]
fn run_scenario(text: &str, stage_degree: Option<usize>, max_enumeration: usize) -> PyResult<(bool, String)> {
    let sc = Scenario::parse(text).map_err(err)?;
    let out = scenario::run_scenario(&sc, &RunOptions { stage_degree, max_enumeration }).map_err(|e| ClosefieldError::new_err(e.to_string()))?;
    Ok((out.passed(), out.render()))
}

#[pyfunction]
fn explain(name: &str) -> PyResult<String> {
    scenario::explain(name).map_err(err)
}

#[pymodule]
#[pyo3(name = "closefield")]
fn closefield_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("ClosefieldError", m.py().get_type::<ClosefieldError>())?;
    m.add_class::<PyField>()?;
    m.add_class::<PyHerbrand>()?;
    m.add_class::<PyCertificate>()?;
    m.add_class::<PyTorus>()?;
    m.add_class::<PyPoints>()?;
    m.add_class::<PyDatum>()?;
    m.add_class::<PyIso>()?;
    m.add_class::<PyReport>()?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(explain, m)?)?;
    Ok(())
}
