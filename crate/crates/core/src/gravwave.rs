//! Linearized gravitational waves: TT-gauge polarization tensors, the gauge
//! constraint, rotations about the propagation axis, and the two-component
//! wave state `|psi> = f_x |e_x> + f_+ |e_+>` propagating along z.
//!
//! Index order is `(t, x, y, z)` with `eta = diag(-1, 1, 1, 1)` and `c = 1`,
//! so the null wave vector `k^mu = (omega, 0, 0, omega)` gives
//! `k.x = omega (z - t)`.

use nalgebra::Matrix4;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::evolvers::free_propagate;
use crate::fieldcore::{derivative, DerivMethod, DerivOrder, Grid1D, PhysParams, ScalarField, ZERO_NORM};
use crate::madelung::{default_rho_min, polar_diagnostics, HJReport, NORMALIZATION_TOL};

/// Diagonal of the Minkowski metric.
pub const ETA: [f64; 4] = [-1.0, 1.0, 1.0, 1.0];

/// Largest relative difference between `f_+` and `f_x` accepted as one overall phase.
pub const SINGLE_PHASE_TOL: f64 = 1e-8;

/// Real symmetric 4x4 tensor.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PolTensor(Matrix4<f64>);

impl PolTensor {
    pub fn new(m: Matrix4<f64>) -> Result<Self> {
        for i in 0..4 {
            for j in (i + 1)..4 {
                if m[(i, j)] != m[(j, i)] {
                    return Err(LabError::NotSymmetric(i, j));
                }
            }
        }
        Ok(Self(m))
    }

    pub fn from_rows(rows: [[f64; 4]; 4]) -> Result<Self> {
        Self::new(Matrix4::from_fn(|i, j| rows[i][j]))
    }

    pub fn zero() -> Self {
        Self(Matrix4::zeros())
    }

    /// `eta_{mu nu}`.
    pub fn minkowski() -> Self {
        Self(Matrix4::from_diagonal(&ETA.into()))
    }

    pub fn matrix(&self) -> &Matrix4<f64> {
        &self.0
    }

    pub fn get(&self, mu: usize, nu: usize) -> f64 {
        self.0[(mu, nu)]
    }

    /// Sets both `(mu, nu)` and `(nu, mu)`.
    pub fn with_component(mut self, mu: usize, nu: usize, value: f64) -> Self {
        self.0[(mu, nu)] = value;
        self.0[(nu, mu)] = value;
        self
    }

    /// `a * self + b * other`.
    pub fn combine(&self, a: f64, other: &PolTensor, b: f64) -> PolTensor {
        PolTensor(self.0 * a + other.0 * b)
    }

    pub fn to_complex(&self) -> Matrix4<Complex64> {
        self.0.map(|v| Complex64::new(v, 0.0))
    }

    pub fn to_rows(&self) -> [[f64; 4]; 4] {
        let mut rows = [[0.0; 4]; 4];
        for (i, row) in rows.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v = self.0[(i, j)];
            }
        }
        rows
    }

    /// Metric `g = eta + h` for a small perturbation `h`.
    pub fn perturbed_metric(&self) -> PolTensor {
        PolTensor(Matrix4::from_diagonal(&ETA.into()) + self.0)
    }
}

/// `<X|Y> = Tr(X^T Y) / 2`.
pub fn frobenius_inner(x: &PolTensor, y: &PolTensor) -> f64 {
    0.5 * (x.0.transpose() * y.0).trace()
}

/// `<X|Y> = Tr(X^dagger Y) / 2` for complex tensors.
pub fn frobenius_inner_complex(x: &Matrix4<Complex64>, y: &Matrix4<Complex64>) -> Complex64 {
    0.5 * (x.adjoint() * y).trace()
}

/// Unit polarization tensors `(e_+, e_x)` for propagation along z.
pub fn basis_tensors() -> (PolTensor, PolTensor) {
    let plus = PolTensor::zero().with_component(1, 1, 1.0).with_component(2, 2, -1.0);
    let cross = PolTensor::zero().with_component(1, 2, 1.0);
    (plus, cross)
}

/// The same basis built from outer products of `|+> = (0,1,0,0)` and
/// `|-> = (0,0,1,0)`: `e_+ = |++> - |-->`, `e_x = |+-> + |-+>`.
pub fn basis_from_outer_products() -> (PolTensor, PolTensor) {
    let up = nalgebra::Vector4::new(0.0, 1.0, 0.0, 0.0);
    let down = nalgebra::Vector4::new(0.0, 0.0, 1.0, 0.0);
    let plus = up * up.transpose() - down * down.transpose();
    let cross = up * down.transpose() + down * up.transpose();
    (PolTensor(plus), PolTensor(cross))
}

/// `e_+ + sign * i e_x`; picks up `exp(-sign * 2 i theta)` under rotation by theta.
pub fn helicity_tensor(sign: f64) -> Matrix4<Complex64> {
    let (plus, cross) = basis_tensors();
    plus.to_complex() + cross.to_complex() * Complex64::new(0.0, sign)
}

/// Deviations from the TT gauge for a wave along z.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TTViolations {
    /// `max_nu |h_{t nu}|`.
    pub temporal: f64,
    /// `|h_xx + h_yy + h_zz|`.
    pub trace: f64,
    /// `max_nu |h_{z nu}|`.
    pub longitudinal: f64,
}

impl TTViolations {
    pub fn is_tt(&self) -> bool {
        self.temporal == 0.0 && self.trace == 0.0 && self.longitudinal == 0.0
    }

    pub fn max(&self) -> f64 {
        self.temporal.max(self.trace).max(self.longitudinal)
    }
}

pub fn tt_gauge_check(h: &PolTensor) -> TTViolations {
    let row_max = |mu: usize| (0..4).map(|nu| h.get(mu, nu).abs()).fold(0.0, f64::max);
    TTViolations {
        temporal: row_max(0),
        trace: (h.get(1, 1) + h.get(2, 2) + h.get(3, 3)).abs(),
        longitudinal: row_max(3),
    }
}

/// `eta_{mu nu} a^mu b^nu`.
pub fn minkowski_dot(a: &[f64; 4], b: &[f64; 4]) -> f64 {
    (0..4).map(|mu| ETA[mu] * a[mu] * b[mu]).sum()
}

fn check_null(k: &[f64; 4]) -> Result<()> {
    let k_dot_k = minkowski_dot(k, k);
    let euclid: f64 = k.iter().map(|v| v * v).sum();
    if k_dot_k.abs() > 1e-12 * euclid {
        return Err(LabError::NonNullWavevector { k_dot_k });
    }
    Ok(())
}

/// `max_mu |k^nu alpha_{nu mu} - k_mu tr(alpha) / 2|` for the plane wave
/// `h = alpha exp(i k.x)` with contravariant wave vector `k`.
///
/// This is the gauge condition `d_nu h^nu_mu - d_mu h^nu_nu / 2 = 0` with the
/// common factor `i exp(i k.x)` removed; indices are moved with `eta`.
pub fn gauge_constraint_residual(alpha: &PolTensor, k: &[f64; 4]) -> Result<f64> {
    check_null(k)?;
    let trace: f64 = (0..4).map(|nu| ETA[nu] * alpha.get(nu, nu)).sum();
    Ok((0..4)
        .map(|mu| {
            let divergence: f64 = (0..4).map(|nu| k[nu] * alpha.get(nu, mu)).sum();
            let k_lower = ETA[mu] * k[mu];
            (divergence - 0.5 * k_lower * trace).abs()
        })
        .fold(0.0, f64::max))
}

/// Spatial rotation by `theta` about z, embedded in 4x4.
pub fn rotation_about_z(theta: f64) -> Matrix4<f64> {
    let (s, c) = theta.sin_cos();
    let mut r = Matrix4::identity();
    r[(1, 1)] = c;
    r[(1, 2)] = -s;
    r[(2, 1)] = s;
    r[(2, 2)] = c;
    r
}

/// `R X R^T`.
pub fn rotate_about_z(x: &PolTensor, theta: f64) -> PolTensor {
    let r = rotation_about_z(theta);
    let mut out = r * x.0 * r.transpose();
    // restore exact symmetry lost to rounding
    for i in 0..4 {
        for j in (i + 1)..4 {
            let v = 0.5 * (out[(i, j)] + out[(j, i)]);
            out[(i, j)] = v;
            out[(j, i)] = v;
        }
    }
    PolTensor(out)
}

pub fn rotate_complex_about_z(x: &Matrix4<Complex64>, theta: f64) -> Matrix4<Complex64> {
    let r = rotation_about_z(theta).map(|v| Complex64::new(v, 0.0));
    r * x * r.transpose()
}

/// Real plane-wave perturbation `alpha e^{ik.x} + alpha* e^{-ik.x} = 2 alpha cos(k.x)`.
pub fn build_h(alpha: &PolTensor, k: &[f64; 4], x: &[f64; 4]) -> Result<PolTensor> {
    check_null(k)?;
    let phase = minkowski_dot(k, x);
    Ok(PolTensor(alpha.0 * (2.0 * phase.cos())))
}

/// Envelopes of the plus and cross polarizations on a z-grid.
#[derive(Debug, Clone, PartialEq)]
pub struct GWState {
    grid: Grid1D,
    time: f64,
    f_plus: Vec<Complex64>,
    f_cross: Vec<Complex64>,
    params: PhysParams,
}

impl GWState {
    /// `params.c()` must be 1.
    pub fn new(
        grid: Grid1D,
        time: f64,
        f_plus: Vec<Complex64>,
        f_cross: Vec<Complex64>,
        params: PhysParams,
    ) -> Result<Self> {
        if params.c() != 1.0 {
            return Err(LabError::InvalidParameter(format!(
                "gravitational-wave states use c = 1, got {}",
                params.c()
            )));
        }
        // validation of length and finiteness
        let plus = ScalarField::new(grid, time, f_plus)?;
        let cross = ScalarField::new(grid, time, f_cross)?;
        Ok(Self {
            grid,
            time,
            f_plus: plus.into_samples(),
            f_cross: cross.into_samples(),
            params,
        })
    }

    pub fn from_fields(plus: &ScalarField, cross: &ScalarField, params: PhysParams) -> Result<Self> {
        if !plus.same_grid(cross) || plus.time() != cross.time() {
            return Err(LabError::GridMismatch);
        }
        Self::new(
            *plus.grid(),
            plus.time(),
            plus.samples().to_vec(),
            cross.samples().to_vec(),
            params,
        )
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }

    pub fn f_plus(&self) -> &[Complex64] {
        &self.f_plus
    }

    pub fn f_cross(&self) -> &[Complex64] {
        &self.f_cross
    }

    pub fn plus_field(&self) -> ScalarField {
        ScalarField::new(self.grid, self.time, self.f_plus.clone()).expect("validated")
    }

    pub fn cross_field(&self) -> ScalarField {
        ScalarField::new(self.grid, self.time, self.f_cross.clone()).expect("validated")
    }

    /// `f_x(z_j) e_x + f_+(z_j) e_+`.
    pub fn tensor_at(&self, j: usize) -> Matrix4<Complex64> {
        let (plus, cross) = basis_tensors();
        plus.to_complex() * self.f_plus[j] + cross.to_complex() * self.f_cross[j]
    }

    /// Exchanges the two polarization envelopes.
    pub fn swapped(&self) -> Self {
        Self {
            f_plus: self.f_cross.clone(),
            f_cross: self.f_plus.clone(),
            ..self.clone()
        }
    }
}

/// Exact evolution under `i d_t psi = -(1/omega) d_z^2 psi` for both envelopes.
pub fn gw_evolve(state: &GWState, t: f64) -> GWState {
    let coeff = state.params.dispersion_coefficient();
    let plus = free_propagate(&state.plus_field(), coeff, t);
    let cross = free_propagate(&state.cross_field(), coeff, t);
    GWState {
        grid: state.grid,
        time: state.time + t,
        f_plus: plus.into_samples(),
        f_cross: cross.into_samples(),
        params: state.params,
    }
}

/// Gram matrix of `(e_+, e_x)` under the Frobenius product.
fn polarization_gram() -> [[f64; 2]; 2] {
    let (plus, cross) = basis_tensors();
    let basis = [plus, cross];
    let mut g = [[0.0; 2]; 2];
    for (a, row) in g.iter_mut().enumerate() {
        for (b, v) in row.iter_mut().enumerate() {
            *v = frobenius_inner(&basis[a], &basis[b]);
        }
    }
    g
}

fn view(v: &[Vec<Complex64>]) -> [&[Complex64]; 2] {
    [v[0].as_slice(), v[1].as_slice()]
}

fn components(s: &GWState) -> [&[Complex64]; 2] {
    [&s.f_plus, &s.f_cross]
}

/// `sum_j sum_ab conj(a_a) b_b <e_a|e_b> dz` for envelope slices `a`, `b`.
fn tensor_inner(a: [&[Complex64]; 2], b: [&[Complex64]; 2], dz: f64) -> Complex64 {
    let gram = polarization_gram();
    let mut total = Complex64::new(0.0, 0.0);
    for (ia, fa) in a.iter().enumerate() {
        for (ib, fb) in b.iter().enumerate() {
            if gram[ia][ib] == 0.0 {
                continue;
            }
            let s: Complex64 = fa.iter().zip(fb.iter()).map(|(x, y)| x.conj() * y).sum();
            total += s * gram[ia][ib];
        }
    }
    total * dz
}

/// `int <a(z)|b(z)> dz` with the Frobenius product on the polarization part.
pub fn gw_inner(a: &GWState, b: &GWState) -> Result<Complex64> {
    if a.grid != b.grid {
        return Err(LabError::GridMismatch);
    }
    Ok(tensor_inner(components(a), components(b), a.grid.spacing()))
}

pub fn gw_normalize(state: &GWState) -> Result<GWState> {
    let norm = gw_inner(state, state)?.re.sqrt();
    if norm < ZERO_NORM {
        return Err(LabError::ZeroField);
    }
    let scale = 1.0 / norm;
    Ok(GWState {
        f_plus: state.f_plus.iter().map(|z| z * scale).collect(),
        f_cross: state.f_cross.iter().map(|z| z * scale).collect(),
        ..state.clone()
    })
}

fn single_phase_deviation(state: &GWState) -> f64 {
    let scale = state.f_plus.iter().map(|z| z.norm()).fold(0.0, f64::max);
    let diff = state
        .f_plus
        .iter()
        .zip(&state.f_cross)
        .map(|(a, b)| (a - b).norm())
        .fold(0.0, f64::max);
    if scale == 0.0 {
        if diff == 0.0 {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        diff / scale
    }
}

/// Polar-form diagnostics and expectation values of a single-phase state
/// `R(z) exp(iS/hbar) (e_+ + e_x)`.
///
/// Requires `f_+ = f_x` (relative `1e-8`) and unit norm. Since
/// `<e|e> = 2` for `e = e_+ + e_x`, the amplitude satisfies `int 2 R^2 dz = 1`.
/// The residuals are computed in the action notation
/// `d_t S + (d_z S)^2 / 2m* + Q` with `m* = hbar omega / 2`; the energy and
/// momentum are tensor inner products over both polarizations.
pub fn gw_madelung_and_expectations(state: &GWState, state_dt: &GWState) -> Result<HJReport> {
    for s in [state, state_dt] {
        let deviation = single_phase_deviation(s);
        if deviation > SINGLE_PHASE_TOL {
            return Err(LabError::NotSinglePhase { deviation });
        }
    }
    let norm_sq = gw_inner(state, state)?.re;
    if (norm_sq - 1.0).abs() > NORMALIZATION_TOL {
        return Err(LabError::NotNormalized { norm_sq });
    }
    if state.grid != state_dt.grid {
        return Err(LabError::TimeSliceMismatch("slices live on different grids".into()));
    }
    let dt = state_dt.time - state.time;
    if !(dt > 0.0) {
        return Err(LabError::TimeSliceMismatch(format!(
            "second slice must be later than the first (dt = {dt})"
        )));
    }

    // sqrt(2) R e^{iS/hbar}: the scalar profile carrying the full tensor norm.
    let envelope = |s: &GWState| {
        let root2 = std::f64::consts::SQRT_2;
        ScalarField::new(s.grid, s.time, s.f_plus.iter().map(|z| z * root2).collect())
            .expect("validated")
    };
    let p0 = envelope(state);
    let p1 = envelope(state_dt);
    let params = state.params;
    let mut report = polar_diagnostics(&p0, &p1, &params, default_rho_min(&p0))?;
    report.hj_residual = report.hj_action_form_residual;

    let hbar = params.hbar();
    let dz = state.grid.spacing();
    let mid: Vec<Vec<Complex64>> = components(state)
        .iter()
        .zip(components(state_dt))
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect())
        .collect();
    let rate: Vec<Vec<Complex64>> = components(state)
        .iter()
        .zip(components(state_dt))
        .map(|(a, b)| a.iter().zip(b).map(|(x, y)| (y - x) / dt).collect())
        .collect();
    let grad: Vec<Vec<Complex64>> = mid
        .iter()
        .map(|m| {
            let f = ScalarField::new(state.grid, state.time, m.clone()).expect("finite");
            derivative(&f, DerivOrder::First, DerivMethod::Spectral).into_samples()
        })
        .collect();
    let norm = tensor_inner(view(&mid), view(&mid), dz).re;
    let energy = Complex64::i() * hbar * tensor_inner(view(&mid), view(&rate), dz) / norm;
    let momentum = Complex64::new(0.0, -0.5 * hbar)
        * (tensor_inner(view(&mid), view(&grad), dz) - tensor_inner(view(&grad), view(&mid), dz))
        / norm;
    report.energy_expectation = energy.re;
    report.momentum_expectation = momentum.re;
    Ok(report)
}
