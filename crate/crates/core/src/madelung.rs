//! Polar decomposition `psi = sqrt(rho) exp(i phi)` and the quantities built
//! on it: quantum potential, Hamilton-Jacobi and continuity residuals,
//! probability current, the stationary Poynting theorem and energy/momentum
//! expectation values.
//!
//! Two routes are used side by side. The *field route* works on `psi`
//! directly: `rho grad(phi) = Im(conj(psi) grad(psi))` and the quantum
//! potential follows from spectral derivatives of the smooth density,
//! `lap(sqrt rho)/sqrt rho = lap(rho)/2rho - |grad rho|^2/4rho^2`. The *polar
//! route* differentiates the unwrapped phase stored in [`MadelungFields`].
//! Agreement between the two is itself one of the checks.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::spectral;
use crate::fieldcore::{
    derivative, inner_product, real_derivative, DerivMethod, DerivOrder, Grid1D, PhysParams,
    ScalarField,
};

/// Relative density threshold used by [`decompose_default`].
pub const DEFAULT_RHO_MIN_FRACTION: f64 = 1e-10;
/// Default time offset between the two slices, in units of `1/omega`.
pub const DEFAULT_PROBE_OMEGA_DT: f64 = 1e-4;
/// Largest admissible `omega * dt` between slices for the Hamilton-Jacobi check.
pub const MAX_PROBE_OMEGA_DT: f64 = 1e-3;
/// Relative density drift above which a field is not treated as stationary.
pub const STATIONARY_DRIFT: f64 = 1e-6;
/// Allowed deviation of `||psi||^2` from one in expectation values.
pub const NORMALIZATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct MadelungFields {
    grid: Grid1D,
    time: f64,
    rho: Vec<f64>,
    phi: Vec<f64>,
    mask: Vec<bool>,
    rho_min: f64,
}

impl MadelungFields {
    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn rho(&self) -> &[f64] {
        &self.rho
    }

    /// Unwrapped phase. Masked points hold the raw argument.
    pub fn phi(&self) -> &[f64] {
        &self.phi
    }

    pub fn mask(&self) -> &[bool] {
        &self.mask
    }

    pub fn rho_min(&self) -> f64 {
        self.rho_min
    }

    pub fn unmasked_count(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    /// `sqrt(rho) exp(i phi)` at every grid point.
    pub fn reconstruct(&self) -> ScalarField {
        let samples = self
            .rho
            .iter()
            .zip(&self.phi)
            .map(|(&r, &p)| Complex64::from_polar(r.sqrt(), p))
            .collect();
        ScalarField::new(self.grid, self.time, samples).expect("finite polar data")
    }

    /// Spatial derivative of the unwrapped phase on unmasked points.
    ///
    /// A fully unmasked field has a periodic phase up to an integer winding,
    /// which is removed before spectral differentiation. Otherwise each
    /// unmasked segment is differenced on its own, fourth order in the
    /// interior and second order one-sided at segment ends.
    pub fn phase_gradient(&self) -> Vec<Option<f64>> {
        let n = self.grid.n();
        let length = self.grid.length();
        if self.mask.iter().all(|&m| m) {
            let closing = wrap_to_pi(self.phi[0] - self.phi[n - 1]);
            let total = self.phi[n - 1] - self.phi[0] + closing;
            let winding = (total / (2.0 * PI)).round();
            let slope = 2.0 * PI * winding / length;
            let periodic: Vec<f64> = self
                .phi
                .iter()
                .enumerate()
                .map(|(j, p)| p - slope * self.grid.x(j))
                .collect();
            return real_derivative(&periodic, length, DerivOrder::First)
                .into_iter()
                .map(|d| Some(d + slope))
                .collect();
        }

        let h = self.grid.spacing();
        let mut out = vec![None; n];
        for (start, end) in segments(&self.mask) {
            let len = end - start;
            let p = &self.phi[start..end];
            for i in 0..len {
                out[start + i] = if i >= 2 && i + 2 < len {
                    Some((-p[i + 2] + 8.0 * p[i + 1] - 8.0 * p[i - 1] + p[i - 2]) / (12.0 * h))
                } else if i >= 1 && i + 1 < len {
                    Some((p[i + 1] - p[i - 1]) / (2.0 * h))
                } else if len >= 3 && i == 0 {
                    Some((-3.0 * p[0] + 4.0 * p[1] - p[2]) / (2.0 * h))
                } else if len >= 3 && i + 1 == len {
                    Some((3.0 * p[i] - 4.0 * p[i - 1] + p[i - 2]) / (2.0 * h))
                } else {
                    None
                };
            }
        }
        out
    }
}

/// Contiguous runs `[start, end)` of `true` in the mask, without wrap-around.
fn segments(mask: &[bool]) -> Vec<(usize, usize)> {
    let mut out = Vec::new();
    let mut start = None;
    for (j, &m) in mask.iter().enumerate() {
        match (m, start) {
            (true, None) => start = Some(j),
            (false, Some(s)) => {
                out.push((s, j));
                start = None;
            }
            _ => {}
        }
    }
    if let Some(s) = start {
        out.push((s, mask.len()));
    }
    out
}

fn wrap_to_pi(x: f64) -> f64 {
    let y = x - 2.0 * PI * (x / (2.0 * PI)).round();
    if y <= -PI {
        y + 2.0 * PI
    } else {
        y
    }
}

/// `1e-10 * max rho`.
pub fn default_rho_min(field: &ScalarField) -> f64 {
    DEFAULT_RHO_MIN_FRACTION * field.intensity().into_iter().fold(0.0, f64::max)
}

/// Polar decomposition with points below `rho_min` masked out.
///
/// The phase is unwrapped left to right: whenever the raw argument jumps by
/// more than pi between neighbouring unmasked points a multiple of 2 pi is
/// added. Unwrapping restarts from the raw argument after every masked gap.
pub fn decompose(field: &ScalarField, rho_min: f64) -> Result<MadelungFields> {
    if !(rho_min.is_finite() && rho_min > 0.0) {
        if rho_min == 0.0 {
            return Err(LabError::AllMasked);
        }
        return Err(LabError::InvalidParameter(format!(
            "rho_min must be positive, got {rho_min}"
        )));
    }
    let rho = field.intensity();
    let mask: Vec<bool> = rho.iter().map(|&r| r >= rho_min).collect();
    if !mask.iter().any(|&m| m) {
        return Err(LabError::AllMasked);
    }
    let raw: Vec<f64> = field.samples().iter().map(|z| z.arg()).collect();
    let mut phi = raw.clone();
    let mut offset = 0.0;
    let mut prev_raw: Option<f64> = None;
    for j in 0..raw.len() {
        if !mask[j] {
            prev_raw = None;
            continue;
        }
        match prev_raw {
            None => offset = 0.0,
            Some(p) => {
                let jump = raw[j] - p;
                if jump.abs() > PI {
                    offset -= 2.0 * PI * (jump / (2.0 * PI)).round();
                }
            }
        }
        phi[j] = raw[j] + offset;
        prev_raw = Some(raw[j]);
    }
    Ok(MadelungFields {
        grid: *field.grid(),
        time: field.time(),
        rho,
        phi,
        mask,
        rho_min,
    })
}

/// [`decompose`] with `rho_min = 1e-10 * max rho`.
pub fn decompose_default(field: &ScalarField) -> Result<MadelungFields> {
    decompose(field, default_rho_min(field))
}

/// Fourier coefficients below this fraction of the largest one are treated
/// as rounding noise when forming the amplitude curvature.
const SPECTRAL_NOISE_FLOOR: f64 = 1e-14;

/// `lap(sqrt rho) / sqrt rho = lap(rho)/2rho - (grad rho)^2/4rho^2`.
///
/// The density derivatives come from the field by the product rule,
/// `grad rho = 2 Re(psi* grad psi)` and `lap rho = 2 Re(psi* lap psi) + 2 |grad psi|^2`,
/// with `psi` and its derivatives synthesized from one spectrum whose
/// noise-level coefficients are dropped. Differentiating rounding noise would
/// otherwise leave errors of order `eps k_max^2` even for uniform densities.
fn amplitude_curvature(field: &ScalarField) -> Vec<f64> {
    let n = field.grid().n();
    let ks = spectral::wavenumbers(n, field.grid().length());
    let mut spectrum = spectral::forward(field.samples());
    let peak = spectrum.iter().fold(0.0, |m: f64, z| m.max(z.norm()));
    for z in spectrum.iter_mut() {
        if z.norm() <= SPECTRAL_NOISE_FLOOR * peak {
            *z = Complex64::new(0.0, 0.0);
        }
    }
    let scaled = |f: &dyn Fn(f64, usize) -> Complex64| -> Vec<Complex64> {
        let s: Vec<Complex64> = spectrum.iter().zip(&ks).enumerate().map(|(j, (z, &k))| z * f(k, j)).collect();
        spectral::inverse(&s)
    };
    let psi = scaled(&|_, _| Complex64::new(1.0, 0.0));
    // Nyquist has no odd derivative on an even grid
    let grad = scaled(&|k, j| if j == n / 2 { Complex64::new(0.0, 0.0) } else { Complex64::new(0.0, k) });
    let lap = scaled(&|k, _| Complex64::new(-k * k, 0.0));
    psi.iter()
        .zip(grad.iter().zip(&lap))
        .map(|(p, (g, l))| {
            let r = p.norm_sqr();
            let grad_rho = 2.0 * (p.conj() * g).re;
            let lap_rho = 2.0 * (p.conj() * l).re + 2.0 * g.norm_sqr();
            lap_rho / (2.0 * r) - grad_rho * grad_rho / (4.0 * r * r)
        })
        .collect()
}

/// Quantum potential `Q = -hbar (c^2/omega) lap(sqrt rho)/sqrt rho`,
/// equivalently `-(hbar^2/2m*) lap(sqrt rho)/sqrt rho`. `None` on masked points.
pub fn quantum_potential(m: &MadelungFields, params: &PhysParams) -> Result<Vec<Option<f64>>> {
    if m.unmasked_count() == 0 {
        return Err(LabError::AllMasked);
    }
    let scale = -params.hbar() * params.dispersion_coefficient();
    let curvature = amplitude_curvature(&m.reconstruct());
    Ok(curvature
        .into_iter()
        .zip(&m.mask)
        .map(|(c, &keep)| keep.then_some(scale * c))
        .collect())
}

/// Residual metrics and expectation values of the polar form.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HJReport {
    /// Quantum potential `Q = hbar * calQ` at the midpoint of the two slices.
    pub q_field: Vec<Option<f64>>,
    /// `max |d_t phi + (c^2/omega)(grad phi)^2 + calQ| / omega`.
    pub hj_residual: f64,
    /// Same equation written for the action `S = hbar phi`:
    /// `max |d_t S + (grad S)^2/2m* + Q| / (hbar omega)`.
    pub hj_action_form_residual: f64,
    pub continuity_residual: f64,
    /// `max |H - (hbar omega + Q)| / (hbar omega)` with `H = (grad W)^2 c^2/(hbar omega) + Q`.
    pub hamiltonian_identity_residual: f64,
    /// `max |d_x (E j)|` relative to `E max|j| / L` with `E = hbar omega`.
    pub poynting_residual: f64,
    pub energy_expectation: f64,
    pub momentum_expectation: f64,
    pub unmasked_points: usize,
}

/// Field-route diagnostics of one slice.
struct SliceData {
    rho: Vec<f64>,
    grad_rho: Vec<f64>,
    /// `rho grad(phi) = Im(conj psi grad psi)`.
    flow: Vec<f64>,
    div_flow: Vec<f64>,
}

impl SliceData {
    fn new(field: &ScalarField) -> Self {
        let length = field.grid().length();
        let rho = field.intensity();
        let grad = derivative(field, DerivOrder::First, DerivMethod::Spectral);
        let flow: Vec<f64> = field
            .samples()
            .iter()
            .zip(grad.samples())
            .map(|(p, g)| (p.conj() * g).im)
            .collect();
        Self {
            grad_rho: real_derivative(&rho, length, DerivOrder::First),
            div_flow: real_derivative(&flow, length, DerivOrder::First),
            rho,
            flow,
        }
    }
}

fn check_slices(f0: &ScalarField, f1: &ScalarField) -> Result<f64> {
    if !f0.same_grid(f1) {
        return Err(LabError::TimeSliceMismatch("slices live on different grids".into()));
    }
    let dt = f1.time() - f0.time();
    if !(dt > 0.0) {
        return Err(LabError::TimeSliceMismatch(format!(
            "second slice must be later than the first (dt = {dt})"
        )));
    }
    Ok(dt)
}

fn max_abs(values: impl Iterator<Item = f64>) -> f64 {
    values.fold(0.0, |a, v| a.max(v.abs()))
}

/// Time-centred energy and momentum per unit norm, from two slices.
///
/// The slices are averaged to the midpoint and `d_t psi` is their difference
/// quotient, so a stationary state of frequency omega yields
/// `2 hbar tan(omega dt / 2) / dt`.
fn midpoint_expectations(f0: &ScalarField, f1: &ScalarField, hbar: f64) -> (Complex64, Complex64) {
    let dt = f1.time() - f0.time();
    let mid: Vec<Complex64> = f0.samples().iter().zip(f1.samples()).map(|(a, b)| 0.5 * (a + b)).collect();
    let rate: Vec<Complex64> = f0.samples().iter().zip(f1.samples()).map(|(a, b)| (b - a) / dt).collect();
    let mid = f0.with_samples(mid);
    let rate = f0.with_samples(rate);
    let norm = inner_product(&mid, &mid).expect("same grid").re;
    let energy = Complex64::i() * hbar * inner_product(&mid, &rate).expect("same grid") / norm;
    let grad = derivative(&mid, DerivOrder::First, DerivMethod::Spectral);
    // (-i hbar / 2) int (psi* d psi - (d psi)* psi)
    let forward = inner_product(&mid, &grad).expect("same grid");
    let backward = inner_product(&grad, &mid).expect("same grid");
    let momentum = Complex64::new(0.0, -0.5 * hbar) * (forward - backward) / norm;
    (energy, momentum)
}

/// Shared two-slice computation behind the scalar and gravitational-wave reports.
pub(crate) fn polar_diagnostics(
    f0: &ScalarField,
    f1: &ScalarField,
    params: &PhysParams,
    rho_min: f64,
) -> Result<HJReport> {
    let dt = check_slices(f0, f1)?;
    let m0 = decompose(f0, rho_min)?;
    let m1 = decompose(f1, rho_min)?;
    let mask: Vec<bool> = m0.mask.iter().zip(&m1.mask).map(|(a, b)| *a && *b).collect();
    let unmasked_points = mask.iter().filter(|&&m| m).count();
    if unmasked_points == 0 {
        return Err(LabError::AllMasked);
    }

    let s0 = SliceData::new(f0);
    let s1 = SliceData::new(f1);
    let length = f0.grid().length();
    let hbar = params.hbar();
    let omega = params.omega();
    let coeff = params.dispersion_coefficient();
    let mass = params.effective_mass();
    let avg = |a: &[f64], b: &[f64]| -> Vec<f64> { a.iter().zip(b).map(|(x, y)| 0.5 * (x + y)).collect() };

    let phase_rate: Vec<f64> = f0
        .samples()
        .iter()
        .zip(f1.samples())
        .map(|(a, b)| (b * a.conj()).arg() / dt)
        .collect();
    let curv0 = amplitude_curvature(f0);
    let curv1 = amplitude_curvature(f1);
    let curvature = avg(&curv0, &curv1);
    let grad_phi: Vec<f64> = {
        let g0: Vec<f64> = s0.flow.iter().zip(&s0.rho).map(|(j, r)| j / r).collect();
        let g1: Vec<f64> = s1.flow.iter().zip(&s1.rho).map(|(j, r)| j / r).collect();
        avg(&g0, &g1)
    };
    let rho = avg(&s0.rho, &s1.rho);
    let grad_rho = avg(&s0.grad_rho, &s1.grad_rho);
    let flow = avg(&s0.flow, &s1.flow);
    let div_flow = avg(&s0.div_flow, &s1.div_flow);

    let cal_q: Vec<f64> = curvature.iter().map(|c| -coeff * c).collect();
    let q_field: Vec<Option<f64>> = cal_q
        .iter()
        .zip(&mask)
        .map(|(q, &keep)| keep.then_some(hbar * q))
        .collect();

    let on_mask = |j: &usize| mask[*j];
    let idx = || (0..mask.len()).filter(on_mask);

    let hj_residual = max_abs(idx().map(|j| phase_rate[j] + coeff * grad_phi[j].powi(2) + cal_q[j])) / omega;
    let hj_action_form_residual = max_abs(idx().map(|j| {
        let ds_dt = hbar * phase_rate[j];
        let grad_s = hbar * grad_phi[j];
        ds_dt + grad_s * grad_s / (2.0 * mass) + hbar * cal_q[j]
    })) / (hbar * omega);

    // Continuity: div(rho grad phi) against the size of its two terms,
    // floored by the flow scale of one natural wavelength.
    let k1 = 2.0 * PI / length;
    let rho_max = max_abs(idx().map(|j| rho[j]));
    let flow_scale = max_abs(idx().map(|j| flow[j])).max(rho_max * params.wavenumber());
    let advective = max_abs(idx().map(|j| grad_rho[j] * grad_phi[j]));
    let laplacian_term = max_abs(idx().map(|j| div_flow[j] - grad_rho[j] * grad_phi[j]));
    let continuity_scale = (laplacian_term + advective).max(flow_scale * k1);
    let continuity_residual = max_abs(idx().map(|j| div_flow[j])) / continuity_scale;

    let hamiltonian_identity_residual =
        max_abs(idx().map(|j| coeff * grad_phi[j].powi(2) - omega)) / omega;

    // j = (hbar/m*) rho grad phi; the factor E hbar / m* cancels in the ratio.
    let poynting_residual = length * max_abs(idx().map(|j| div_flow[j])) / flow_scale;

    let (energy, momentum) = midpoint_expectations(f0, f1, hbar);

    Ok(HJReport {
        q_field,
        hj_residual,
        hj_action_form_residual,
        continuity_residual,
        hamiltonian_identity_residual,
        poynting_residual,
        energy_expectation: energy.re,
        momentum_expectation: momentum.re,
        unmasked_points,
    })
}

/// Hamilton-Jacobi, continuity and energy-identity residuals from two nearby
/// slices `field_t0`, `field_t1` of one solution.
///
/// `d_t phi` is the wrapped phase difference of the slices divided by their
/// time offset, which must not exceed `1e-3 / omega`. Spatial quantities are
/// averaged over both slices. Expectation values are per unit norm.
pub fn hj_residuals(
    field_t0: &ScalarField,
    field_t1: &ScalarField,
    params: &PhysParams,
    rho_min: f64,
) -> Result<HJReport> {
    let dt = check_slices(field_t0, field_t1)?;
    if dt * params.omega() > MAX_PROBE_OMEGA_DT * (1.0 + 1e-12) {
        return Err(LabError::TimeSliceMismatch(format!(
            "slice offset omega*dt = {} exceeds {MAX_PROBE_OMEGA_DT}",
            dt * params.omega()
        )));
    }
    polar_diagnostics(field_t0, field_t1, params, rho_min)
}

/// Probability current `j = -(i hbar / 2m*)(psi* grad psi - grad psi* psi)`.
pub fn current_density(field: &ScalarField, params: &PhysParams) -> Vec<f64> {
    let grad = derivative(field, DerivOrder::First, DerivMethod::Spectral);
    let prefactor = Complex64::new(0.0, -params.hbar() / (2.0 * params.effective_mass()));
    field
        .samples()
        .iter()
        .zip(grad.samples())
        .map(|(p, g)| (prefactor * (p.conj() * g - g.conj() * p)).re)
        .collect()
}

/// Polar-form current `rho grad(W) / m*` with `grad W = hbar grad phi`.
pub fn current_density_polar(m: &MadelungFields, params: &PhysParams) -> Vec<Option<f64>> {
    let scale = params.hbar() / params.effective_mass();
    m.phase_gradient()
        .into_iter()
        .zip(&m.rho)
        .zip(&m.mask)
        .map(|((g, &r), &keep)| if keep { g.map(|g| scale * r * g) } else { None })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoyntingReport {
    /// `max |d_x (E j)|` relative to `E max|j| / L`.
    pub divergence_residual: f64,
    /// `max |E j - E rho grad(W)/m*|` over unmasked points, relative to `E max|j|`.
    pub flux_identity_residual: f64,
    /// `max |rho(t1) - rho(t0)| / max rho(t0)`.
    pub density_drift: f64,
}

/// Stationary Poynting theorem `div(E j) = 0`.
///
/// Two slices are required to establish stationarity; `e_total` defaults to
/// `hbar omega`. Both the divergence and the identity between the derivative
/// and polar forms of the flux `S = E j` are reported.
pub fn poynting_divergence(
    field_t0: &ScalarField,
    field_t1: &ScalarField,
    params: &PhysParams,
    e_total: Option<f64>,
) -> Result<PoyntingReport> {
    check_slices(field_t0, field_t1)?;
    let energy = e_total.unwrap_or(params.hbar() * params.omega());
    if !(energy.is_finite() && energy > 0.0) {
        return Err(LabError::InvalidParameter(format!("total energy must be positive, got {energy}")));
    }
    let rho0 = field_t0.intensity();
    let rho1 = field_t1.intensity();
    let rho_max = max_abs(rho0.iter().copied());
    if rho_max == 0.0 {
        return Err(LabError::ZeroField);
    }
    let density_drift = max_abs(rho0.iter().zip(&rho1).map(|(a, b)| b - a)) / rho_max;
    if density_drift > STATIONARY_DRIFT {
        return Err(LabError::NotStationary { drift: density_drift });
    }

    let grid = field_t0.grid();
    let j = current_density(field_t0, params);
    let flux: Vec<f64> = j.iter().map(|v| energy * v).collect();
    // Central differences: the stationary flux is uniform in 1D, and the
    // three-point stencil amplifies roundoff less than a Fourier multiplier.
    let n = flux.len();
    let h = grid.spacing();
    let div: Vec<f64> = (0..n)
        .map(|i| (flux[(i + 1) % n] - flux[(i + n - 1) % n]) / (2.0 * h))
        .collect();
    let natural = params.hbar() / params.effective_mass() * rho_max * params.wavenumber();
    let j_scale = max_abs(j.iter().copied()).max(natural);
    let divergence_residual = grid.length() * max_abs(div.into_iter()) / (energy * j_scale);

    let polar = current_density_polar(&decompose_default(field_t0)?, params);
    let flux_identity_residual = max_abs(
        j.iter()
            .zip(&polar)
            .filter_map(|(a, b)| b.map(|b| a - b)),
    ) / j_scale;

    Ok(PoyntingReport {
        divergence_residual,
        flux_identity_residual,
        density_drift,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Expectations {
    pub energy: f64,
    pub momentum: f64,
    pub energy_imag: f64,
    pub momentum_imag: f64,
}

/// `<E> = i hbar int psi* d_t psi` and `<p> = (-i hbar/2) int psi* <->d psi`
/// for a normalized field, with `field_dt` the same solution slightly later.
pub fn expectations(field: &ScalarField, field_dt: &ScalarField, params: &PhysParams) -> Result<Expectations> {
    check_slices(field, field_dt)?;
    let norm_sq = field.norm_squared();
    if (norm_sq - 1.0).abs() > NORMALIZATION_TOL {
        return Err(LabError::NotNormalized { norm_sq });
    }
    let (energy, momentum) = midpoint_expectations(field, field_dt, params.hbar());
    Ok(Expectations {
        energy: energy.re,
        momentum: momentum.re,
        energy_imag: energy.im,
        momentum_imag: momentum.im,
    })
}
