//! Python bindings for `rse-core`.
//!
//! Fields cross the boundary as lists of Python `complex`; residual reports
//! come back as plain dicts.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use rse_core::evolvers::{self, RseState, WaveState};
use rse_core::fieldcore::{self, DerivMethod, DerivOrder};
use rse_core::gravwave::{self, GWState, PolTensor};
use rse_core::scenario::{self, ScenarioConfig};
use rse_core::{madelung, reference, LabError};

fn err(e: LabError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn scenario_err(e: scenario::ScenarioError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

#[pyclass(name = "PhysParams", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyPhysParams(fieldcore::PhysParams);

#[pymethods]
impl PyPhysParams {
    #[new]
    #[pyo3(signature = (c = 1.0, hbar = 1.0, omega = 1.0))]
    fn new(c: f64, hbar: f64, omega: f64) -> PyResult<Self> {
        fieldcore::PhysParams::new(c, hbar, omega).map(Self).map_err(err)
    }

    #[getter]
    fn c(&self) -> f64 {
        self.0.c()
    }

    #[getter]
    fn hbar(&self) -> f64 {
        self.0.hbar()
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.0.omega()
    }

    #[getter]
    fn effective_mass(&self) -> f64 {
        self.0.effective_mass()
    }

    #[getter]
    fn wavenumber(&self) -> f64 {
        self.0.wavenumber()
    }

    #[getter]
    fn dispersion_coefficient(&self) -> f64 {
        self.0.dispersion_coefficient()
    }

    fn __repr__(&self) -> String {
        format!("PhysParams(c={}, hbar={}, omega={})", self.0.c(), self.0.hbar(), self.0.omega())
    }
}

#[pyclass(name = "Grid", frozen, from_py_object)]
#[derive(Clone, Copy)]
struct PyGrid(fieldcore::Grid1D);

#[pymethods]
impl PyGrid {
    #[new]
    fn new(n: usize, length: f64) -> PyResult<Self> {
        fieldcore::Grid1D::new(n, length).map(Self).map_err(err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.0.length()
    }

    #[getter]
    fn spacing(&self) -> f64 {
        self.0.spacing()
    }

    fn coordinates(&self) -> Vec<f64> {
        self.0.coordinates()
    }

    fn __repr__(&self) -> String {
        format!("Grid(n={}, length={})", self.0.n(), self.0.length())
    }
}

#[pyclass(name = "Field", from_py_object)]
#[derive(Clone)]
struct PyField(fieldcore::ScalarField);

#[pymethods]
impl PyField {
    #[new]
    #[pyo3(signature = (grid, samples, time = 0.0))]
    fn new(grid: PyGrid, samples: Vec<Complex64>, time: f64) -> PyResult<Self> {
        fieldcore::ScalarField::new(grid.0, time, samples).map(Self).map_err(err)
    }

    /// `amplitude * exp(i(k x - omega t))`; `k` must fit the periodic domain.
    #[staticmethod]
    #[pyo3(signature = (grid, params, k, t = 0.0, amplitude = Complex64::new(1.0, 0.0)))]
    fn plane_wave(grid: PyGrid, params: PyPhysParams, k: f64, t: f64, amplitude: Complex64) -> PyResult<Self> {
        fieldcore::make_plane_wave(grid.0, &params.0, k, t, amplitude).map(Self).map_err(err)
    }

    /// Closed-form free Gaussian packet, normalized, evolved to time `t`
    /// with dispersion coefficient `coefficient`.
    #[staticmethod]
    #[pyo3(signature = (grid, sigma, center, k0, coefficient, t = 0.0))]
    fn gaussian(grid: PyGrid, sigma: f64, center: f64, k0: f64, coefficient: f64, t: f64) -> PyResult<Self> {
        reference::free_gaussian(grid.0, sigma, center, k0, coefficient, t).map(Self).map_err(err)
    }

    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid(*self.0.grid())
    }

    #[getter]
    fn time(&self) -> f64 {
        self.0.time()
    }

    fn samples(&self) -> Vec<Complex64> {
        self.0.samples().to_vec()
    }

    fn intensity(&self) -> Vec<f64> {
        self.0.intensity()
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn normalized(&self) -> PyResult<Self> {
        fieldcore::normalize(&self.0).map(Self).map_err(err)
    }

    /// Periodic derivative of order 1 or 2, `"spectral"` (default) or `"central2"`.
    #[pyo3(signature = (order = 1, method = "spectral"))]
    fn derivative(&self, order: u8, method: &str) -> PyResult<Self> {
        let order = DerivOrder::try_from(order).map_err(err)?;
        let method = match method {
            "spectral" => DerivMethod::Spectral,
            "central2" => DerivMethod::Central2,
            other => return Err(PyValueError::new_err(format!("unknown derivative method {other:?}"))),
        };
        Ok(Self(fieldcore::derivative(&self.0, order, method)))
    }

    fn inner(&self, other: &PyField) -> PyResult<Complex64> {
        fieldcore::inner_product(&self.0, &other.0).map_err(err)
    }

    fn relative_l2(&self, other: &PyField) -> PyResult<f64> {
        fieldcore::relative_l2(&self.0, &other.0).map_err(err)
    }

    fn __len__(&self) -> usize {
        self.0.grid().n()
    }
}

#[pyfunction]
fn rse_evolve(field: &PyField, params: PyPhysParams, t: f64) -> PyField {
    PyField(evolvers::rse_evolve(&RseState::new(field.0.clone(), params.0), t).psi)
}

#[pyfunction]
fn helmholtz_residual(field: &PyField, params: PyPhysParams) -> PyResult<f64> {
    evolvers::helmholtz_residual(&field.0, &params.0).map_err(err)
}

#[pyfunction]
fn chain_consistency<'py>(py: Python<'py>, field: &PyField, params: PyPhysParams) -> PyResult<Bound<'py, PyDict>> {
    let r = evolvers::chain_consistency(&field.0, &params.0).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("wave", r.wave)?;
    d.set_item("rse", r.rse)?;
    d.set_item("helmholtz", r.helmholtz)?;
    Ok(d)
}

#[pyfunction]
fn commutator_residual(field: &PyField, margin: f64) -> PyResult<f64> {
    fieldcore::commutator_residual(&field.0, margin).map_err(err)
}

/// Leapfrog state of the second-order wave equation.
#[pyclass(name = "WaveState")]
struct PyWaveState(WaveState);

#[pymethods]
impl PyWaveState {
    #[staticmethod]
    fn from_positive_frequencies(field: &PyField, dt: f64, params: PyPhysParams) -> PyResult<Self> {
        WaveState::from_positive_frequencies(field.0.clone(), dt, params.0).map(Self).map_err(err)
    }

    fn evolve(&self, steps: usize) -> PyResult<Self> {
        evolvers::wave_evolve(&self.0, steps).map(Self).map_err(err)
    }

    fn field(&self) -> PyField {
        PyField(self.0.psi().clone())
    }

    fn energy(&self) -> f64 {
        self.0.energy()
    }

    #[getter]
    fn cfl(&self) -> f64 {
        self.0.cfl()
    }
}

/// Polar form `sqrt(rho) exp(i phi)` with a density mask.
#[pyclass(name = "Madelung")]
struct PyMadelung(madelung::MadelungFields);

#[pymethods]
impl PyMadelung {
    #[new]
    #[pyo3(signature = (field, rho_min = None))]
    fn new(field: &PyField, rho_min: Option<f64>) -> PyResult<Self> {
        match rho_min {
            Some(r) => madelung::decompose(&field.0, r),
            None => madelung::decompose_default(&field.0),
        }
        .map(Self)
        .map_err(err)
    }

    fn rho(&self) -> Vec<f64> {
        self.0.rho().to_vec()
    }

    fn phi(&self) -> Vec<f64> {
        self.0.phi().to_vec()
    }

    fn mask(&self) -> Vec<bool> {
        self.0.mask().to_vec()
    }

    fn reconstruct(&self) -> PyField {
        PyField(self.0.reconstruct())
    }

    /// Quantum potential per sample; `None` where the density is masked.
    fn quantum_potential(&self, params: PyPhysParams) -> PyResult<Vec<Option<f64>>> {
        madelung::quantum_potential(&self.0, &params.0).map_err(err)
    }
}

fn hj_dict<'py>(py: Python<'py>, r: &madelung::HJReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("q_field", r.q_field.clone())?;
    d.set_item("hj_residual", r.hj_residual)?;
    d.set_item("hj_action_form_residual", r.hj_action_form_residual)?;
    d.set_item("continuity_residual", r.continuity_residual)?;
    d.set_item("hamiltonian_identity_residual", r.hamiltonian_identity_residual)?;
    d.set_item("poynting_residual", r.poynting_residual)?;
    d.set_item("energy_expectation", r.energy_expectation)?;
    d.set_item("momentum_expectation", r.momentum_expectation)?;
    d.set_item("unmasked_points", r.unmasked_points)?;
    Ok(d)
}

#[pyfunction]
#[pyo3(signature = (field_t0, field_t1, params, rho_min = None))]
fn hj_residuals<'py>(
    py: Python<'py>,
    field_t0: &PyField,
    field_t1: &PyField,
    params: PyPhysParams,
    rho_min: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let rho_min = rho_min.unwrap_or_else(|| madelung::default_rho_min(&field_t0.0));
    let r = madelung::hj_residuals(&field_t0.0, &field_t1.0, &params.0, rho_min).map_err(err)?;
    hj_dict(py, &r)
}

#[pyfunction]
#[pyo3(signature = (field_t0, field_t1, params, e_total = None))]
fn poynting_divergence<'py>(
    py: Python<'py>,
    field_t0: &PyField,
    field_t1: &PyField,
    params: PyPhysParams,
    e_total: Option<f64>,
) -> PyResult<Bound<'py, PyDict>> {
    let r = madelung::poynting_divergence(&field_t0.0, &field_t1.0, &params.0, e_total).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("divergence_residual", r.divergence_residual)?;
    d.set_item("flux_identity_residual", r.flux_identity_residual)?;
    d.set_item("density_drift", r.density_drift)?;
    Ok(d)
}

#[pyfunction]
fn expectations<'py>(
    py: Python<'py>,
    field: &PyField,
    field_dt: &PyField,
    params: PyPhysParams,
) -> PyResult<Bound<'py, PyDict>> {
    let e = madelung::expectations(&field.0, &field_dt.0, &params.0).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("energy", e.energy)?;
    d.set_item("momentum", e.momentum)?;
    d.set_item("energy_imag", e.energy_imag)?;
    d.set_item("momentum_imag", e.momentum_imag)?;
    Ok(d)
}

#[pyfunction]
fn current_density(field: &PyField, params: PyPhysParams) -> Vec<f64> {
    madelung::current_density(&field.0, &params.0)
}

fn tensor(rows: [[f64; 4]; 4]) -> PyResult<PolTensor> {
    PolTensor::from_rows(rows).map_err(err)
}

/// `(e_plus, e_cross)` as 4x4 row lists, indices ordered `(t, x, y, z)`.
#[pyfunction]
fn basis_tensors() -> ([[f64; 4]; 4], [[f64; 4]; 4]) {
    let (p, c) = gravwave::basis_tensors();
    (p.to_rows(), c.to_rows())
}

#[pyfunction]
fn frobenius_inner(x: [[f64; 4]; 4], y: [[f64; 4]; 4]) -> PyResult<f64> {
    Ok(gravwave::frobenius_inner(&tensor(x)?, &tensor(y)?))
}

#[pyfunction]
fn rotate_about_z(x: [[f64; 4]; 4], theta: f64) -> PyResult<[[f64; 4]; 4]> {
    Ok(gravwave::rotate_about_z(&tensor(x)?, theta).to_rows())
}

/// Largest TT-gauge violation of a symmetric tensor; 0 for a TT tensor.
#[pyfunction]
fn tt_violation(x: [[f64; 4]; 4]) -> PyResult<f64> {
    Ok(gravwave::tt_gauge_check(&tensor(x)?).max())
}

#[pyfunction]
fn gauge_constraint_residual(alpha: [[f64; 4]; 4], k: [f64; 4]) -> PyResult<f64> {
    gravwave::gauge_constraint_residual(&tensor(alpha)?, &k).map_err(err)
}

/// Plus and cross profiles of a gravitational wave travelling along z.
#[pyclass(name = "GWState", from_py_object)]
#[derive(Clone)]
struct PyGWState(GWState);

#[pymethods]
impl PyGWState {
    #[new]
    fn new(plus: &PyField, cross: &PyField, params: PyPhysParams) -> PyResult<Self> {
        GWState::from_fields(&plus.0, &cross.0, params.0).map(Self).map_err(err)
    }

    fn evolve(&self, t: f64) -> Self {
        Self(gravwave::gw_evolve(&self.0, t))
    }

    fn normalized(&self) -> PyResult<Self> {
        gravwave::gw_normalize(&self.0).map(Self).map_err(err)
    }

    fn inner(&self, other: &PyGWState) -> PyResult<Complex64> {
        gravwave::gw_inner(&self.0, &other.0).map_err(err)
    }

    fn plus(&self) -> PyField {
        PyField(self.0.plus_field())
    }

    fn cross(&self) -> PyField {
        PyField(self.0.cross_field())
    }

    #[getter]
    fn time(&self) -> f64 {
        self.0.time()
    }
}

#[pyfunction]
fn gw_madelung_and_expectations<'py>(
    py: Python<'py>,
    state: &PyGWState,
    state_dt: &PyGWState,
) -> PyResult<Bound<'py, PyDict>> {
    let r = gravwave::gw_madelung_and_expectations(&state.0, &state_dt.0).map_err(err)?;
    hj_dict(py, &r)
}

/// Names of the registered scenarios, alphabetical.
#[pyfunction]
fn list_scenarios() -> Vec<&'static str> {
    scenario::list_scenarios().into_iter().map(|(name, _, _)| name).collect()
}

/// Runs a scenario and returns its JSON report as a string.
///
/// `config` is either a registered scenario name or a full TOML config.
/// Output paths in the config are honoured.
#[pyfunction]
#[pyo3(signature = (config, tolerance_scale = 1.0))]
fn run_scenario(py: Python<'_>, config: &str, tolerance_scale: f64) -> PyResult<String> {
    let cfg = if scenario::registry::find(config).is_some() {
        ScenarioConfig::for_scenario(config)
    } else {
        ScenarioConfig::from_toml_str(config).map_err(scenario_err)?
    };
    let outcome = py
        .detach(|| scenario::evaluate(&cfg, tolerance_scale))
        .map_err(scenario_err)?;
    scenario::write_outputs(&outcome).map_err(scenario_err)?;
    Ok(outcome.report.to_json())
}

#[pymodule]
fn rse_lab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPhysParams>()?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyWaveState>()?;
    m.add_class::<PyMadelung>()?;
    m.add_class::<PyGWState>()?;
    m.add_function(wrap_pyfunction!(rse_evolve, m)?)?;
    m.add_function(wrap_pyfunction!(helmholtz_residual, m)?)?;
    m.add_function(wrap_pyfunction!(chain_consistency, m)?)?;
    m.add_function(wrap_pyfunction!(commutator_residual, m)?)?;
    m.add_function(wrap_pyfunction!(hj_residuals, m)?)?;
    m.add_function(wrap_pyfunction!(poynting_divergence, m)?)?;
    m.add_function(wrap_pyfunction!(expectations, m)?)?;
    m.add_function(wrap_pyfunction!(current_density, m)?)?;
    m.add_function(wrap_pyfunction!(basis_tensors, m)?)?;
    m.add_function(wrap_pyfunction!(frobenius_inner, m)?)?;
    m.add_function(wrap_pyfunction!(rotate_about_z, m)?)?;
    m.add_function(wrap_pyfunction!(tt_violation, m)?)?;
    m.add_function(wrap_pyfunction!(gauge_constraint_residual, m)?)?;
    m.add_function(wrap_pyfunction!(gw_madelung_and_expectations, m)?)?;
    m.add_function(wrap_pyfunction!(list_scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
