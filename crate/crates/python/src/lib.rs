//! Python module `xbouss`: solitary waves, corrector solutions, residual
//! sweeps and the elliptic operator lab.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use xbouss_core::corrector::CorrectedSolution as CoreSolution;
use xbouss_core::oplab::OperatorContext as CoreContext;
use xbouss_core::residuals::{sweep, ResidualConfig};
use xbouss_core::solitary::{solve_profile_with, OdeModel, SolitaryProfile as CoreProfile, SolverOptions};
use xbouss_core::{refwaves, Error, Grid1D as CoreGrid, ModelParams as CoreParams};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Parameter(_) | Error::Grid(_) | Error::Length { .. } | Error::Depth { .. } => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

#[pyclass(name = "ModelParams", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct ModelParams(CoreParams);

#[pymethods]
impl ModelParams {
    /// Parameters of a wave traveling at speed `c > 1`.
    #[staticmethod]
    fn traveling(epsilon: f64, c: f64) -> PyResult<Self> {
        CoreParams::traveling(epsilon, c).map(Self).map_err(py_err)
    }

    /// Parameters of the standard Boussinesq solitary wave of amplitude `alpha`.
    #[staticmethod]
    fn from_alpha(epsilon: f64, alpha: f64) -> PyResult<Self> {
        CoreParams::from_alpha(epsilon, alpha).map(Self).map_err(py_err)
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.0.epsilon()
    }

    #[getter]
    fn celerity(&self) -> f64 {
        self.0.celerity()
    }

    #[getter]
    fn alpha(&self) -> f64 {
        self.0.alpha()
    }

    #[getter]
    fn k(&self) -> f64 {
        self.0.k()
    }

    #[getter]
    fn gn_amplitude(&self) -> f64 {
        self.0.gn_amplitude()
    }

    fn __repr__(&self) -> String {
        format!(
            "ModelParams(epsilon={}, celerity={}, alpha={})",
            self.0.epsilon(),
            self.0.celerity(),
            self.0.alpha()
        )
    }
}

#[pyclass(name = "Grid1D", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct Grid1D(CoreGrid);

#[pymethods]
impl Grid1D {
    #[new]
    #[pyo3(signature = (x_min, x_max, n, periodic=false))]
    fn new(x_min: f64, x_max: f64, n: usize, periodic: bool) -> PyResult<Self> {
        CoreGrid::new(x_min, x_max, n, periodic).map(Self).map_err(py_err)
    }

    #[getter]
    fn dx(&self) -> f64 {
        self.0.dx()
    }

    #[getter]
    fn periodic(&self) -> bool {
        self.0.is_periodic()
    }

    fn points(&self) -> Vec<f64> {
        self.0.points()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }
}

#[pyclass(name = "SolitaryProfile", frozen)]
struct SolitaryProfile(CoreProfile);

#[pymethods]
impl SolitaryProfile {
    #[getter]
    fn xi(&self) -> Vec<f64> {
        self.0.grid.points()
    }

    #[getter]
    fn zeta(&self) -> Vec<f64> {
        self.0.zeta.clone()
    }

    #[getter]
    fn v(&self) -> Vec<f64> {
        self.0.v.clone()
    }

    #[getter]
    fn amplitude(&self) -> f64 {
        self.0.amplitude
    }

    #[getter]
    fn decay_rate(&self) -> f64 {
        self.0.decay_rate
    }

    #[getter]
    fn params(&self) -> ModelParams {
        ModelParams(self.0.params)
    }

    /// Elevation at any `xi`, interpolated between nodes.
    fn sample(&self, xi: f64) -> f64 {
        self.0.sample(xi)
    }

    fn max_ode_residual(&self) -> f64 {
        self.0.max_ode_residual()
    }
}

/// Solitary wave of speed `c`; `gn_mode` drops the eps^2 terms.
#[pyfunction]
#[pyo3(signature = (c, epsilon=1.0, tol=1e-10, points=4001, half_width=None, gn_mode=false))]
fn solve_profile(
    py: Python<'_>,
    c: f64,
    epsilon: f64,
    tol: f64,
    points: usize,
    half_width: Option<f64>,
    gn_mode: bool,
) -> PyResult<SolitaryProfile> {
    let params = CoreParams::traveling(epsilon, c).map_err(py_err)?;
    let opts = SolverOptions {
        tol,
        half_width,
        points,
        model: if gn_mode {
            OdeModel::GreenNaghdi
        } else {
            OdeModel::Extended
        },
        cross_check: false,
    };
    py.detach(|| solve_profile_with(&params, &opts))
        .map(SolitaryProfile)
        .map_err(py_err)
}

#[pyfunction]
fn gn_profile(params: ModelParams, x: f64) -> PyResult<f64> {
    refwaves::gn_profile(&params.0, x).map_err(py_err)
}

/// `(zeta_1, v_1)` of the standard Boussinesq solitary wave.
#[pyfunction]
fn boussinesq_solitary(params: ModelParams, t: f64, x: f64) -> (f64, f64) {
    refwaves::boussinesq_solitary(&params.0, t, x)
}

#[pyclass(name = "CorrectedSolution", frozen)]
struct CorrectedSolution(CoreSolution);

#[pymethods]
impl CorrectedSolution {
    #[new]
    #[pyo3(signature = (params, quadrature_tol=1e-10))]
    fn new(params: ModelParams, quadrature_tol: f64) -> Self {
        Self(CoreSolution::new(params.0).with_quadrature_tol(quadrature_tol))
    }

    #[getter]
    fn max_time(&self) -> f64 {
        self.0.max_time()
    }

    /// `(zeta_2, v_2)` at `(t, x)`.
    fn corrector(&self, t: f64, x: f64) -> PyResult<(f64, f64)> {
        self.0.corrector(t, x).map_err(py_err)
    }

    /// `(zeta, v) = (zeta_1 + eps^2 zeta_2, v_1 + eps^2 v_2)` at `(t, x)`.
    fn eval(&self, t: f64, x: f64) -> PyResult<(f64, f64)> {
        self.0.eval(t, x).map_err(py_err)
    }
}

/// Residual norms over `eps_list` (strictly decreasing). Returns a dict
/// with `reports` (one dict per eps) and `slopes`.
#[pyfunction]
#[pyo3(signature = (eps_list, t=1.0, alpha=1.0, n=4096, half_width=50.0, dt=1e-3, quadrature_tol=1e-10, workers=1))]
#[allow(clippy::too_many_arguments)]
fn residual_sweep<'py>(
    py: Python<'py>,
    eps_list: Vec<f64>,
    t: f64,
    alpha: f64,
    n: usize,
    half_width: f64,
    dt: f64,
    quadrature_tol: f64,
    workers: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let grid = CoreGrid::new(-half_width, half_width, n, true).map_err(py_err)?;
    let config = ResidualConfig {
        t,
        alpha,
        grid,
        dt,
        quadrature_tol,
        workers,
        ..ResidualConfig::default()
    };
    let result = py.detach(|| sweep(&eps_list, &config)).map_err(py_err)?;
    let reports = result
        .reports
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("epsilon", r.epsilon)?;
            d.set_item("r1_l2", r.r1_l2)?;
            d.set_item("r2_l2", r.r2_l2)?;
            d.set_item("r1_inf", r.r1_inf)?;
            d.set_item("r2_inf", r.r2_inf)?;
            d.set_item("r1_l2_weighted", r.r1_l2_weighted)?;
            d.set_item("r2_l2_weighted", r.r2_l2_weighted)?;
            d.set_item("discretization_warning", r.discretization_warning)?;
            Ok(d)
        })
        .collect::<PyResult<Vec<_>>>()?;
    let slopes = PyDict::new(py);
    slopes.set_item("r1_l2", result.slopes.r1_l2)?;
    slopes.set_item("r2_l2", result.slopes.r2_l2)?;
    slopes.set_item("r1_inf", result.slopes.r1_inf)?;
    slopes.set_item("r2_inf", result.slopes.r2_inf)?;
    let out = PyDict::new(py);
    out.set_item("reports", reports)?;
    out.set_item("slopes", slopes)?;
    Ok(out)
}

#[pyclass(name = "OperatorContext", frozen)]
struct OperatorContext(CoreContext);

#[pymethods]
impl OperatorContext {
    /// Operator over the surface `zeta` sampled on a periodic `grid`.
    #[new]
    fn new(grid: Grid1D, epsilon: f64, zeta: Vec<f64>) -> PyResult<Self> {
        CoreContext::new(grid.0, epsilon, &zeta).map(Self).map_err(py_err)
    }

    #[getter]
    fn h_min(&self) -> f64 {
        self.0.h_min()
    }

    fn apply(&self, w: Vec<f64>) -> PyResult<Vec<f64>> {
        self.0.apply(&w).map_err(py_err)
    }

    /// Solves `I w = f`; returns `(w, iterations, relative residual)`.
    #[pyo3(signature = (f, tol=1e-12))]
    fn invert(&self, f: Vec<f64>, tol: f64) -> PyResult<(Vec<f64>, usize, f64)> {
        let inv = self.0.invert(&f, tol).map_err(py_err)?;
        Ok((inv.solution, inv.iterations, inv.residual))
    }
}

#[pymodule]
fn xbouss(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<ModelParams>()?;
    m.add_class::<Grid1D>()?;
    m.add_class::<SolitaryProfile>()?;
    m.add_class::<CorrectedSolution>()?;
    m.add_class::<OperatorContext>()?;
    m.add_function(wrap_pyfunction!(solve_profile, m)?)?;
    m.add_function(wrap_pyfunction!(gn_profile, m)?)?;
    m.add_function(wrap_pyfunction!(boussinesq_solitary, m)?)?;
    m.add_function(wrap_pyfunction!(residual_sweep, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
