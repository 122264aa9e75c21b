use std::path::PathBuf;

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use bimetric::dirac::{plane_wave_amplitude, Configuration, DiracPoint};
use bimetric::geometry::{composite_metric, PointGeometry};
use bimetric::scenario::{self as sc, CheckKind, CheckReport, ConvergenceTable, Order};
use bimetric::{parse_expression, Constants, GammaSet, Point4};

create_exception!(bimetric, BimetricError, PyValueError);

fn err(e: impl std::fmt::Display) -> PyErr {
    BimetricError::new_err(e.to_string())
}

fn rows<const N: usize>(m: &[[f64; N]; N]) -> Vec<Vec<f64>> {
    m.iter().map(|r| r.to_vec()).collect()
}

fn gammas(representation: &str) -> PyResult<GammaSet> {
    match representation {
        "dirac" => Ok(GammaSet::dirac()),
        "weyl" => Ok(GammaSet::weyl()),
        other => Err(err(format!("unknown representation `{other}`; expected `dirac` or `weyl`"))),
    }
}

/// A scalar function of `x0..x3`.
#[pyclass(name = "Expression", frozen)]
struct PyExpression(bimetric::Expression);

#[pymethods]
impl PyExpression {
    #[new]
    #[pyo3(signature = (text, constants=None))]
    fn new(text: &str, constants: Option<Constants>) -> PyResult<Self> {
        parse_expression(text, &constants.unwrap_or_default()).map(Self).map_err(err)
    }

    fn eval(&self, point: [f64; 4]) -> PyResult<f64> {
        self.0.eval(&Point4(point)).map_err(err)
    }

    fn gradient(&self, point: [f64; 4]) -> PyResult<[f64; 4]> {
        self.0.eval_jet2(&Point4(point)).map(|j| j.grad).map_err(err)
    }

    fn hessian(&self, point: [f64; 4]) -> PyResult<Vec<Vec<f64>>> {
        self.0.eval_jet2(&Point4(point)).map(|j| rows(&j.hess)).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expression('{}')", self.0)
    }
}

/// Outcome of `Scenario.check()`.
#[pyclass(name = "Report", frozen)]
struct PyReport(CheckReport);

#[pymethods]
impl PyReport {
    #[getter]
    fn passed(&self) -> bool {
        self.0.passed
    }

    #[getter]
    fn exit_code(&self) -> i32 {
        self.0.exit_code()
    }

    /// One dict per check.
    #[getter]
    fn checks<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        self.0
            .checks
            .iter()
            .map(|c| {
                let d = PyDict::new(py);
                d.set_item("name", &c.name)?;
                d.set_item("equation", &c.equation)?;
                d.set_item("points", c.points)?;
                d.set_item("max_residual", c.max_residual)?;
                d.set_item("worst_point", c.worst_point)?;
                d.set_item("tolerance", c.tolerance)?;
                d.set_item("status", c.status.label().to_lowercase())?;
                d.set_item("note", &c.note)?;
                Ok(d)
            })
            .collect()
    }

    fn max_residual(&self, name: &str) -> PyResult<f64> {
        self.0.check(name).map(|c| c.max_residual).ok_or_else(|| err(format!("no check `{name}`")))
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn summary(&self) -> String {
        self.0.summary()
    }
}

/// Outcome of `Scenario.converge()`.
#[pyclass(name = "Convergence", frozen)]
struct PyConvergence(ConvergenceTable);

#[pymethods]
impl PyConvergence {
    #[getter]
    fn passed(&self) -> bool {
        self.0.passed()
    }

    #[getter]
    fn steps(&self) -> Vec<f64> {
        self.0.steps.clone()
    }

    /// `{check: order}` with `None` for saturated checks.
    #[getter]
    fn orders(&self) -> Vec<(String, Option<f64>)> {
        self.0
            .rows
            .iter()
            .map(|r| (r.name.clone(), if let Order::Observed(p) = r.order { Some(p) } else { None }))
            .collect()
    }

    #[getter]
    fn residuals(&self) -> Vec<(String, Vec<f64>)> {
        self.0.rows.iter().map(|r| (r.name.clone(), r.residuals.clone())).collect()
    }

    fn to_json(&self) -> String {
        self.0.to_json()
    }

    fn summary(&self) -> String {
        self.0.summary()
    }
}

/// A loaded scenario: background, S-field, connection, matter and sampling.
#[pyclass(name = "Scenario")]
struct PyScenario {
    inner: sc::Scenario,
    gammas: GammaSet,
}

impl PyScenario {
    fn wrap(inner: sc::Scenario) -> Self {
        PyScenario { inner, gammas: GammaSet::dirac() }
    }

    fn with_point<T>(&self, point: [f64; 4], f: impl FnOnce(&DiracPoint) -> bimetric::Result<T>) -> PyResult<T> {
        let s = &self.inner;
        let vierbein = s.vierbein();
        let cfg = Configuration::new(&vierbein, &s.connection, &s.dirac, &self.gammas).with_adjoint(s.adjoint);
        let pt = cfg.at(&Point4(point)).map_err(err)?;
        f(&pt).map_err(err)
    }
}

#[pymethods]
impl PyScenario {
    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        sc::load_scenario(path).map(Self::wrap).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (text, name="scenario"))]
    fn parse(text: &str, name: &str) -> PyResult<Self> {
        sc::parse_scenario(text, name).map(Self::wrap).map_err(err)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name.clone()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.sampling.seed
    }

    #[setter]
    fn set_seed(&mut self, seed: u64) {
        self.inner.sampling.seed = seed;
    }

    #[getter]
    fn adjoint_sign(&self) -> &'static str {
        self.inner.adjoint.name()
    }

    /// The sample points in evaluation order.
    fn sample_points(&self) -> Vec<[f64; 4]> {
        self.inner.sampling.points().into_iter().map(|p| p.0).collect()
    }

    /// Number of random points, or points per axis in grid mode.
    fn set_point_count(&mut self, n: usize) -> PyResult<()> {
        if n == 0 {
            return Err(err("point count must be at least 1"));
        }
        self.inner.sampling.count = n;
        Ok(())
    }

    fn set_tolerance(&mut self, name: &str, value: f64) -> PyResult<()> {
        self.inner.set_tolerance(name, value).map_err(err)
    }

    fn check(&self, py: Python<'_>) -> PyResult<PyReport> {
        let s = self.inner.clone();
        py.detach(move || sc::run_all_checks(&s)).map(|r| PyReport(r.stamped())).map_err(err)
    }

    fn converge(&self, py: Python<'_>, steps: Vec<f64>) -> PyResult<PyConvergence> {
        let s = self.inner.clone();
        py.detach(move || sc::convergence_study(&s, &steps)).map(PyConvergence).map_err(|e| err(e.error))
    }

    /// Inverse composite metric `g^{mu nu}`.
    fn metric(&self, point: [f64; 4]) -> PyResult<Vec<Vec<f64>>> {
        let s = &self.inner;
        composite_metric(&s.gravity, &s.sfield, &Point4(point)).map(|g| rows(&g.upper.0)).map_err(err)
    }

    /// `Gamma^nu_{sigma mu}` as `[nu][sigma][mu]`.
    fn christoffel(&self, point: [f64; 4]) -> PyResult<Vec<Vec<Vec<f64>>>> {
        let s = &self.inner;
        let geo = PointGeometry::new(&s.vierbein(), &s.connection, &Point4(point)).map_err(err)?;
        Ok(geo.christoffel.iter().map(rows).collect())
    }

    /// Ricci scalar, curvature Lagrangian `h R`, mixed Ricci and Einstein tensors.
    fn curvature<'py>(&self, py: Python<'py>, point: [f64; 4]) -> PyResult<Bound<'py, PyDict>> {
        let s = &self.inner;
        let geo = PointGeometry::new(&s.vierbein(), &s.connection, &Point4(point)).map_err(err)?;
        let c = geo.curvature();
        let d = PyDict::new(py);
        d.set_item("scalar", c.scalar)?;
        d.set_item("lagrangian", c.lagrangian)?;
        d.set_item("density", geo.density)?;
        d.set_item("ricci", rows(&c.mixed_ricci.0))?;
        d.set_item("einstein", rows(&c.einstein.0))?;
        Ok(d)
    }

    fn dirac_lagrangian(&self, point: [f64; 4]) -> PyResult<f64> {
        self.with_point(point, |p| p.lagrangian())
    }

    /// Largest entry of the Dirac equation residual (both lines).
    fn dirac_residual(&self, point: [f64; 4]) -> PyResult<f64> {
        self.with_point(point, |p| Ok(p.residual().max_abs()))
    }

    /// `(J^mu, d_mu J^mu)`.
    fn current(&self, point: [f64; 4]) -> PyResult<([f64; 4], f64)> {
        self.with_point(point, |p| p.current().map(|c| (c.j, c.divergence)))
    }

    /// `2 L_D` against the bilinear of the equation residuals.
    fn lagrangian_identity<'py>(&self, py: Python<'py>, point: [f64; 4]) -> PyResult<Bound<'py, PyDict>> {
        let c = self.with_point(point, |p| p.onshell_check())?;
        let d = PyDict::new(py);
        d.set_item("two_lagrangian", c.two_lagrangian)?;
        d.set_item("bound", c.bound)?;
        d.set_item("identity_residual", c.identity_residual)?;
        d.set_item("scale", c.scale)?;
        d.set_item("bound_holds", c.bound_holds())?;
        Ok(d)
    }

    /// Hermiticity diagnostics under both adjoint sign conventions.
    fn adjoint_diagnostic<'py>(&self, py: Python<'py>, point: [f64; 4]) -> PyResult<Vec<Bound<'py, PyDict>>> {
        let diags = self.with_point(point, |p| p.adjoint_diagnostic())?;
        diags
            .iter()
            .map(|a| {
                let d = PyDict::new(py);
                d.set_item("convention", a.convention.name())?;
                d.set_item("adjoint_consistency", a.adjoint_consistency)?;
                d.set_item("covariant_lagrangian_imaginary", a.covariant_lagrangian_imaginary)?;
                d.set_item("covariant_vs_symmetrized", a.covariant_vs_symmetrized)?;
                d.set_item("covariant_vs_expanded", a.covariant_vs_expanded)?;
                Ok(d)
            })
            .collect()
    }

    fn __repr__(&self) -> String {
        format!("Scenario('{}')", self.inner.name)
    }
}

/// Names, tags, default tolerances and kinds of every check.
#[pyfunction]
fn checks() -> Vec<(String, String, Option<f64>, String)> {
    sc::CHECKS
        .iter()
        .map(|c| {
            let kind = match c.kind {
                CheckKind::Required => "required",
                CheckKind::Expected => "expected",
                CheckKind::TorsionFree => "torsion-free",
                CheckKind::Informational => "informational",
            };
            (c.name.to_string(), sc::tag(c.name).to_string(), c.tolerance, kind.to_string())
        })
        .collect()
}

/// Local gamma matrices `gamma^k` as nested lists of complex numbers.
#[pyfunction]
#[pyo3(signature = (representation="dirac"))]
fn gamma_matrices(representation: &str) -> PyResult<Vec<Vec<Vec<Complex64>>>> {
    let g = gammas(representation)?;
    Ok((0..4).map(|k| g.upper(k).0.iter().map(|r| r.to_vec()).collect()).collect())
}

#[pyfunction]
#[pyo3(signature = (representation="dirac"))]
fn clifford_residual(representation: &str) -> PyResult<f64> {
    Ok(gammas(representation)?.clifford_residual())
}

/// Positive-energy spinor amplitude `u` with `(gamma.k - m) u = 0`.
#[pyfunction]
#[pyo3(signature = (momentum, mass, representation="dirac"))]
fn plane_wave_spinor(momentum: [f64; 4], mass: f64, representation: &str) -> PyResult<[Complex64; 4]> {
    plane_wave_amplitude(&gammas(representation)?, momentum, mass).map(|s| s.0).map_err(err)
}

#[pymodule]
#[pyo3(name = "bimetric")]
fn bimetric_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("BimetricError", m.py().get_type::<BimetricError>())?;
    m.add_class::<PyExpression>()?;
    m.add_class::<PyScenario>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyConvergence>()?;
    m.add_function(wrap_pyfunction!(checks, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_matrices, m)?)?;
    m.add_function(wrap_pyfunction!(clifford_residual, m)?)?;
    m.add_function(wrap_pyfunction!(plane_wave_spinor, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
