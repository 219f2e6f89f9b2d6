//! Time evolution under the massless wave equation and its first-order
//! Schrödinger-like reduction, plus residual checks for the wave,
//! Schrödinger-like and Helmholtz equations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fieldcore::{
    derivative, inner_product, DerivMethod, DerivOrder, PhysParams, ScalarField, ZERO_NORM,
};
use crate::spectral;

/// Largest admissible `c dt / spacing` for the leapfrog scheme.
pub const MAX_CFL: f64 = 0.5;

/// Two consecutive time slices of a wave-equation solution.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveState {
    psi: ScalarField,
    psi_prev: ScalarField,
    dt: f64,
    params: PhysParams,
}

impl WaveState {
    pub fn new(psi: ScalarField, psi_prev: ScalarField, dt: f64, params: PhysParams) -> Result<Self> {
        if !psi.same_grid(&psi_prev) {
            return Err(LabError::GridMismatch);
        }
        if !(dt.is_finite() && dt > 0.0) {
            return Err(LabError::InvalidParameter(format!("dt must be positive, got {dt}")));
        }
        let state = Self {
            psi,
            psi_prev,
            dt,
            params,
        };
        state.check_cfl()?;
        Ok(state)
    }

    /// Starts from `psi` with every Fourier mode carrying the single frequency
    /// `+omega_k` of the discrete leapfrog dispersion relation, so the mode
    /// propagates without a spurious counter-rotating component.
    pub fn from_positive_frequencies(psi: ScalarField, dt: f64, params: PhysParams) -> Result<Self> {
        let cdt = params.c() * dt;
        let prev = spectral::apply_multiplier(psi.samples(), psi.grid().length(), |k, _| {
            let s = (0.5 * cdt * k.abs()).min(1.0);
            let omega_dt = 2.0 * s.asin();
            Complex64::from_polar(1.0, omega_dt)
        });
        let psi_prev = psi.with_samples(prev).at_time(psi.time() - dt);
        Self::new(psi, psi_prev, dt, params)
    }

    pub fn psi(&self) -> &ScalarField {
        &self.psi
    }

    pub fn psi_prev(&self) -> &ScalarField {
        &self.psi_prev
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn params(&self) -> &PhysParams {
        &self.params
    }

    pub fn cfl(&self) -> f64 {
        self.params.c() * self.dt / self.psi.grid().spacing()
    }

    fn check_cfl(&self) -> Result<()> {
        let cfl = self.cfl();
        if cfl > MAX_CFL {
            return Err(LabError::CflViolation { cfl });
        }
        Ok(())
    }

    /// Discrete energy conserved exactly by the leapfrog scheme:
    /// `||(psi - psi_prev)/dt||^2 + c^2 Re<grad psi, grad psi_prev>`.
    pub fn energy(&self) -> f64 {
        let velocity = self
            .psi
            .samples()
            .iter()
            .zip(self.psi_prev.samples())
            .map(|(a, b)| ((a - b) / self.dt).norm_sqr())
            .sum::<f64>()
            * self.psi.grid().spacing();
        let g1 = derivative(&self.psi, DerivOrder::First, DerivMethod::Spectral);
        let g0 = derivative(&self.psi_prev, DerivOrder::First, DerivMethod::Spectral);
        let c = self.params.c();
        velocity + c * c * inner_product(&g1, &g0).map(|z| z.re).unwrap_or(0.0)
    }
}

/// Advances a wave-equation state by `steps` leapfrog steps with a spectral Laplacian.
pub fn wave_evolve(state: &WaveState, steps: usize) -> Result<WaveState> {
    state.check_cfl()?;
    let factor = (state.params.c() * state.dt).powi(2);
    let mut current = state.psi.clone();
    let mut previous = state.psi_prev.clone();
    for _ in 0..steps {
        let lap = derivative(&current, DerivOrder::Second, DerivMethod::Spectral);
        let next: Vec<Complex64> = current
            .samples()
            .iter()
            .zip(previous.samples())
            .zip(lap.samples())
            .map(|((&p, &q), &l)| 2.0 * p - q + factor * l)
            .collect();
        let t_next = current.time() + state.dt;
        let next = current.with_samples(next).at_time(t_next);
        previous = std::mem::replace(&mut current, next);
    }
    Ok(WaveState {
        psi: current,
        psi_prev: previous,
        dt: state.dt,
        params: state.params,
    })
}

/// Field evolving under `i d_t psi = -(c^2/omega) d_x^2 psi`.
#[derive(Debug, Clone, PartialEq)]
pub struct RseState {
    pub psi: ScalarField,
    pub params: PhysParams,
}

impl RseState {
    pub fn new(psi: ScalarField, params: PhysParams) -> Self {
        Self { psi, params }
    }
}

/// Free-propagator phase `exp(-i D k^2 t)` applied mode by mode.
pub(crate) fn free_propagate(field: &ScalarField, coefficient: f64, t: f64) -> ScalarField {
    if t == 0.0 {
        return field.clone();
    }
    let samples = spectral::apply_multiplier(field.samples(), field.grid().length(), |k, _| {
        Complex64::from_polar(1.0, -coefficient * k * k * t)
    });
    field.with_samples(samples).at_time(field.time() + t)
}

/// Exact evolution of the Schrödinger-like equation for a duration `t`.
pub fn rse_evolve(state: &RseState, t: f64) -> RseState {
    RseState {
        psi: free_propagate(&state.psi, state.params.dispersion_coefficient(), t),
        params: state.params,
    }
}

fn l2(values: impl Iterator<Item = Complex64>) -> f64 {
    values.map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// `||lap psi + k^2 psi|| / ||k^2 psi||` with `k = omega / c`.
pub fn helmholtz_residual(field: &ScalarField, params: &PhysParams) -> Result<f64> {
    let k2 = params.wavenumber().powi(2);
    let scale = k2 * l2(field.samples().iter().copied());
    if field.norm() < ZERO_NORM || scale == 0.0 {
        return Err(LabError::ZeroField);
    }
    let lap = derivative(field, DerivOrder::Second, DerivMethod::Spectral);
    let num = l2(lap.samples().iter().zip(field.samples()).map(|(l, p)| l + k2 * p));
    Ok(num / scale)
}

/// Relative residuals of the three equations of the derivation chain.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChainResiduals {
    pub wave: f64,
    pub rse: f64,
    pub helmholtz: f64,
}

impl ChainResiduals {
    pub fn max(&self) -> f64 {
        self.wave.max(self.rse).max(self.helmholtz)
    }
}

/// Residuals of the wave, Schrödinger-like and Helmholtz equations for a
/// field claimed to be of the form `chi(x) exp(-i omega t)`.
///
/// Time derivatives are taken analytically from that form: `d_t psi = -i omega psi`
/// and `d_t^2 psi = -omega^2 psi`. Nothing about the field itself is assumed;
/// a field that is not monochromatic at `k = omega / c` shows up as large residuals.
pub fn chain_consistency(field: &ScalarField, params: &PhysParams) -> Result<ChainResiduals> {
    let omega = params.omega();
    let d_t = field.scaled(Complex64::new(0.0, -omega));
    let d_tt = field.scaled(Complex64::new(-omega * omega, 0.0));
    chain_from_time_derivatives(field, &d_t, &d_tt, params)
}

/// Same residuals with time derivatives taken by central differences of three
/// slices `before`, `field`, `after` spaced by `dt_probe`.
pub fn chain_consistency_probed(
    before: &ScalarField,
    field: &ScalarField,
    after: &ScalarField,
    params: &PhysParams,
) -> Result<ChainResiduals> {
    if !before.same_grid(field) || !after.same_grid(field) {
        return Err(LabError::GridMismatch);
    }
    let dt_back = field.time() - before.time();
    let dt_fwd = after.time() - field.time();
    if !(dt_back > 0.0) || (dt_back - dt_fwd).abs() > 1e-9 * dt_back {
        return Err(LabError::TimeSliceMismatch(
            "probe slices must be equally spaced in increasing time".into(),
        ));
    }
    let dt = dt_back;
    let d_t: Vec<Complex64> = after
        .samples()
        .iter()
        .zip(before.samples())
        .map(|(a, b)| (a - b) / (2.0 * dt))
        .collect();
    let d_tt: Vec<Complex64> = after
        .samples()
        .iter()
        .zip(field.samples())
        .zip(before.samples())
        .map(|((a, m), b)| (a - 2.0 * m + b) / (dt * dt))
        .collect();
    chain_from_time_derivatives(field, &field.with_samples(d_t), &field.with_samples(d_tt), params)
}

fn chain_from_time_derivatives(
    field: &ScalarField,
    d_t: &ScalarField,
    d_tt: &ScalarField,
    params: &PhysParams,
) -> Result<ChainResiduals> {
    if field.norm() < ZERO_NORM {
        return Err(LabError::ZeroField);
    }
    let c2 = params.c().powi(2);
    let omega = params.omega();
    let psi = field.samples();
    let lap = derivative(field, DerivOrder::Second, DerivMethod::Spectral);
    let lap = lap.samples();
    let psi_norm = l2(psi.iter().copied());

    // (lap - c^-2 d_t^2) psi = 0, scaled by k^2 ||psi||.
    let wave = l2(lap.iter().zip(d_tt.samples()).map(|(l, t)| l - t / c2))
        / (omega * omega / c2 * psi_norm);
    // i d_t psi + (c^2/omega) lap psi = 0, scaled by omega ||psi||.
    let rse = l2(
        d_t.samples()
            .iter()
            .zip(lap.iter())
            .map(|(t, l)| Complex64::i() * t + c2 / omega * l),
    ) / (omega * psi_norm);
    let helmholtz = helmholtz_residual(field, params)?;
    Ok(ChainResiduals { wave, rse, helmholtz })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldcore::{make_plane_wave, relative_l2, Grid1D};
    use std::f64::consts::PI;

    fn one() -> Complex64 {
        Complex64::new(1.0, 0.0)
    }

    #[test]
    fn leapfrog_plane_wave_returns_after_one_period() {
        let g = Grid1D::new(256, 2.0 * PI).unwrap();
        let p = PhysParams::natural(1.0).unwrap();
        let period = 2.0 * PI;
        let dt = period / 2048.0;
        let psi = make_plane_wave(g, &p, 1.0, 0.0, one()).unwrap();
        let prev = make_plane_wave(g, &p, 1.0, -dt, one()).unwrap();
        let state = WaveState::new(psi.clone(), prev, dt, p).unwrap();
        let out = wave_evolve(&state, 2048).unwrap();
        assert!(relative_l2(out.psi(), &psi).unwrap() <= 1e-4);
        assert!((out.psi().time() - period).abs() < 1e-12);
    }

    #[test]
    fn zero_field_stays_zero() {
        let g = Grid1D::new(64, 2.0 * PI).unwrap();
        let p = PhysParams::natural(1.0).unwrap();
        let z = ScalarField::zeros(g, 0.0);
        let s = WaveState::new(z.clone(), z, 0.01, p).unwrap();
        assert_eq!(wave_evolve(&s, 50).unwrap().psi().max_abs(), 0.0);
    }

    #[test]
    fn cfl_violation_detected() {
        let g = Grid1D::new(64, 2.0 * PI).unwrap();
        let p = PhysParams::natural(1.0).unwrap();
        let z = ScalarField::zeros(g, 0.0);
        let dt = 0.8 * g.spacing();
        assert!(matches!(
            WaveState::new(z.clone(), z, dt, p),
            Err(LabError::CflViolation { .. })
        ));
    }

    #[test]
    fn rse_resonant_mode_rotates_at_omega() {
        let g = Grid1D::new(64, 2.0 * PI).unwrap();
        let p = PhysParams::new(2.0, 1.0, 6.0).unwrap();
        let psi = make_plane_wave(g, &p, p.wavenumber(), 0.0, one()).unwrap();
        let out = rse_evolve(&RseState::new(psi.clone(), p), 0.37);
        let expected = psi.scaled(Complex64::from_polar(1.0, -6.0 * 0.37));
        assert!(relative_l2(&out.psi, &expected).unwrap() < 1e-12);
    }

    #[test]
    fn rse_zero_time_is_identity() {
        let g = Grid1D::new(64, 2.0 * PI).unwrap();
        let p = PhysParams::natural(1.0).unwrap();
        let psi = ScalarField::from_fn(g, 0.0, |x| Complex64::new(x.sin(), x.cos() * 0.3)).unwrap();
        assert_eq!(rse_evolve(&RseState::new(psi.clone(), p), 0.0).psi, psi);
    }

    #[test]
    fn helmholtz_cases() {
        let g = Grid1D::new(128, 2.0 * PI).unwrap();
        let p = PhysParams::new(1.0, 1.0, 3.0).unwrap();
        let pw = make_plane_wave(g, &p, 3.0, 0.0, one()).unwrap();
        assert!(helmholtz_residual(&pw, &p).unwrap() <= 1e-12);
        let standing = ScalarField::from_fn(g, 0.0, |x| Complex64::new((3.0 * x).cos(), 0.0)).unwrap();
        assert!(helmholtz_residual(&standing, &p).unwrap() <= 1e-12);
        let double = make_plane_wave(g, &p, 6.0, 0.0, one()).unwrap();
        assert!((helmholtz_residual(&double, &p).unwrap() - 3.0).abs() < 1e-10);
        assert_eq!(
            helmholtz_residual(&ScalarField::zeros(g, 0.0), &p),
            Err(LabError::ZeroField)
        );
    }

    #[test]
    fn chain_on_plane_and_standing_waves() {
        let g = Grid1D::new(256, 2.0 * PI).unwrap();
        let p = PhysParams::new(1.5, 1.0, 3.0).unwrap();
        let k = p.wavenumber();
        let pw = make_plane_wave(g, &p, k, 0.0, one()).unwrap();
        assert!(chain_consistency(&pw, &p).unwrap().max() <= 1e-12);
        let plus = make_plane_wave(g, &p, k, 0.0, one()).unwrap();
        let minus = make_plane_wave(g, &p, -k, 0.0, one()).unwrap();
        let sum: Vec<Complex64> = plus.samples().iter().zip(minus.samples()).map(|(a, b)| a + b).collect();
        let sw = plus.with_samples(sum);
        assert!(chain_consistency(&sw, &p).unwrap().max() <= 1e-12);
    }

    #[test]
    fn chain_flags_broadband_envelope() {
        let g = Grid1D::new(256, 40.0).unwrap();
        let p = PhysParams::natural(1.0).unwrap();
        let gauss = ScalarField::from_fn(g, 0.0, |x| Complex64::new((-(x - 20.0).powi(2) / 4.0).exp(), 0.0)).unwrap();
        assert!(chain_consistency(&gauss, &p).unwrap().helmholtz > 0.1);
    }
}
