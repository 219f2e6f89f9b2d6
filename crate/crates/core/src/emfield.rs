//! Field-theoretic densities of the massless complex scalar and the
//! polarization part of a classical light state.
//!
//! The scalar field stands in for the vector potential under the usual
//! correspondence `L -> |A_dot|^2/c^2 - |curl A|^2`,
//! `H -> (E^2/c^2 + B^2)/2` and momentum density `-> E x B / mu_0 c^2`.
//! Only the scalar side is computed here; the conjugate momentum is fixed as
//! `pi = conj(psi_dot)`, so `pi* pi = |psi_dot|^2`. Spatial derivatives are
//! spectral, time derivatives are supplied by the caller.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::fieldcore::{derivative, DerivMethod, DerivOrder, PhysParams, ScalarField, ZERO_NORM};

fn gradient(psi: &ScalarField) -> ScalarField {
    derivative(psi, DerivOrder::First, DerivMethod::Spectral)
}

fn same_grid(a: &ScalarField, b: &ScalarField) -> Result<()> {
    if a.same_grid(b) {
        Ok(())
    } else {
        Err(LabError::GridMismatch)
    }
}

/// `L = psi_dot* psi_dot - grad psi* . grad psi`.
pub fn lagrangian_density(psi: &ScalarField, psi_dot: &ScalarField) -> Result<Vec<f64>> {
    same_grid(psi, psi_dot)?;
    let grad = gradient(psi);
    Ok(psi_dot
        .samples()
        .iter()
        .zip(grad.samples())
        .map(|(v, g)| v.norm_sqr() - g.norm_sqr())
        .collect())
}

/// `H = pi* pi + grad psi* . grad psi`.
pub fn hamiltonian_density(psi: &ScalarField, pi_conj: &ScalarField) -> Result<Vec<f64>> {
    same_grid(psi, pi_conj)?;
    let grad = gradient(psi);
    Ok(pi_conj
        .samples()
        .iter()
        .zip(grad.samples())
        .map(|(p, g)| p.norm_sqr() + g.norm_sqr())
        .collect())
}

/// Conjugate momentum `pi = conj(psi_dot)`.
pub fn conjugate_momentum(psi_dot: &ScalarField) -> ScalarField {
    psi_dot.with_samples(psi_dot.samples().iter().map(|z| z.conj()).collect())
}

/// Momentum density `-(psi_dot* grad psi + psi_dot grad psi*) / 2c`,
/// oriented along the direction of propagation: a null plane wave
/// `exp(i(kx - omega t))` carries `+omega k / c`.
pub fn momentum_density(psi: &ScalarField, psi_dot: &ScalarField, params: &PhysParams) -> Result<Vec<f64>> {
    same_grid(psi, psi_dot)?;
    let grad = gradient(psi);
    let scale = -1.0 / (2.0 * params.c());
    Ok(psi_dot
        .samples()
        .iter()
        .zip(grad.samples())
        .map(|(v, g)| scale * (v.conj() * g + v * g.conj()).re)
        .collect())
}

/// Integral of a real density over the grid of `psi`.
pub fn integrate(psi: &ScalarField, density: &[f64]) -> f64 {
    density.iter().sum::<f64>() * psi.grid().spacing()
}

/// Polarization `e^{i phi_g} (cos theta, e^{i chi_p} sin theta)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolState {
    pub phi_g: f64,
    pub theta: f64,
    pub chi_p: f64,
}

impl PolState {
    pub fn new(phi_g: f64, theta: f64, chi_p: f64) -> Self {
        Self { phi_g, theta, chi_p }
    }
}

pub fn pol_state_vector(p: &PolState) -> [Complex64; 2] {
    let global = Complex64::from_polar(1.0, p.phi_g);
    [
        global * p.theta.cos(),
        global * Complex64::from_polar(p.theta.sin(), p.chi_p),
    ]
}

/// Transverse electric field components.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JonesVector {
    pub ex: Complex64,
    pub ey: Complex64,
}

impl JonesVector {
    pub fn new(ex: Complex64, ey: Complex64) -> Self {
        Self { ex, ey }
    }

    /// `<J|J> = |E_x|^2 + |E_y|^2`.
    pub fn intensity(&self) -> f64 {
        self.ex.norm_sqr() + self.ey.norm_sqr()
    }
}

impl From<PolState> for JonesVector {
    fn from(p: PolState) -> Self {
        let [ex, ey] = pol_state_vector(&p);
        Self { ex, ey }
    }
}

pub fn jones_normalize(v: &JonesVector) -> Result<JonesVector> {
    let norm = v.intensity().sqrt();
    if norm < ZERO_NORM {
        return Err(LabError::ZeroField);
    }
    Ok(JonesVector::new(v.ex / norm, v.ey / norm))
}

/// Norm of `|psi> (x) |e> / sqrt(int |psi|^2)`, built out explicitly over
/// both factors. Unity up to rounding.
pub fn product_state_intensity(psi: &ScalarField, p: &PolState) -> Result<f64> {
    let norm_sq = psi.norm_squared();
    if norm_sq.sqrt() < ZERO_NORM {
        return Err(LabError::ZeroField);
    }
    let pol = pol_state_vector(p);
    let scale = 1.0 / norm_sq.sqrt();
    let total: f64 = psi
        .samples()
        .iter()
        .flat_map(|z| pol.iter().map(move |e| (z * e * scale).norm_sqr()))
        .sum();
    Ok((total * psi.grid().spacing()).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fieldcore::{make_plane_wave, Grid1D};
    use std::f64::consts::{FRAC_1_SQRT_2, PI};

    fn setup(w: f64) -> (Grid1D, PhysParams) {
        (Grid1D::new(128, 2.0 * PI).unwrap(), PhysParams::natural(w).unwrap())
    }

    #[test]
    fn null_plane_wave_densities() {
        let w = 3.0;
        let (g, p) = setup(w);
        let psi = make_plane_wave(g, &p, w, 0.0, Complex64::new(1.0, 0.0)).unwrap();
        let dot = psi.scaled(Complex64::new(0.0, -w));
        assert!(lagrangian_density(&psi, &dot).unwrap().iter().all(|l| l.abs() < 1e-12));
        let h = hamiltonian_density(&psi, &conjugate_momentum(&dot)).unwrap();
        assert!(h.iter().all(|v| (v - 2.0 * w * w).abs() < 1e-12));
        let m = momentum_density(&psi, &dot, &p).unwrap();
        assert!(m.iter().all(|v| (v - w * w).abs() < 1e-12));
    }

    #[test]
    fn standing_wave_densities() {
        let w = 2.0;
        let (g, p) = setup(w);
        let psi = ScalarField::from_fn(g, 0.0, |x| Complex64::new(2.0 * (w * x).cos(), 0.0)).unwrap();
        let dot = psi.scaled(Complex64::new(0.0, -w));
        let l = lagrangian_density(&psi, &dot).unwrap();
        for (j, v) in l.iter().enumerate() {
            let x = g.x(j);
            let expected = 4.0 * w * w * (w * x).cos().powi(2) - 4.0 * w * w * (w * x).sin().powi(2);
            assert!((v - expected).abs() < 1e-11);
        }
        assert!(momentum_density(&psi, &dot, &p).unwrap().iter().all(|v| v.abs() < 1e-12));
    }

    #[test]
    fn static_and_zero_fields() {
        let (g, p) = setup(1.0);
        let c = ScalarField::from_fn(g, 0.0, |_| Complex64::new(0.7, 0.2)).unwrap();
        let z = ScalarField::zeros(g, 0.0);
        assert!(lagrangian_density(&c, &z).unwrap().iter().all(|l| l.abs() < 1e-20));
        assert!(hamiltonian_density(&z, &z).unwrap().iter().all(|&h| h == 0.0));
        assert!(momentum_density(&z, &z, &p).unwrap().iter().all(|&m| m == 0.0));
        let other = ScalarField::zeros(Grid1D::new(64, 1.0).unwrap(), 0.0);
        assert_eq!(lagrangian_density(&z, &other), Err(LabError::GridMismatch));
    }

    #[test]
    fn jones_cases() {
        let x = jones_normalize(&JonesVector::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0))).unwrap();
        assert_eq!(x, JonesVector::new(Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)));
        let v = jones_normalize(&JonesVector::new(Complex64::new(3.0, 0.0), Complex64::new(0.0, 4.0))).unwrap();
        assert!((v.ex - Complex64::new(0.6, 0.0)).norm() < 1e-15);
        assert!((v.ey - Complex64::new(0.0, 0.8)).norm() < 1e-15);
        let circ = pol_state_vector(&PolState::new(0.0, PI / 4.0, PI / 2.0));
        assert!((circ[0] - Complex64::new(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
        assert!((circ[1] - Complex64::new(0.0, FRAC_1_SQRT_2)).norm() < 1e-15);
        let zero = JonesVector::new(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0));
        assert_eq!(jones_normalize(&zero), Err(LabError::ZeroField));
    }

    #[test]
    fn product_state_has_unit_intensity() {
        let (g, _) = setup(1.0);
        let psi = ScalarField::from_fn(g, 0.0, |x| Complex64::new(x.sin() + 2.0, 0.3 * x.cos())).unwrap();
        let pol = PolState::new(0.3, 1.1, -0.4);
        assert!((product_state_intensity(&psi, &pol).unwrap() - 1.0).abs() < 1e-12);
        let big = psi.scaled(Complex64::new(7.0, 0.0));
        assert!((product_state_intensity(&big, &pol).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(
            product_state_intensity(&ScalarField::zeros(g, 0.0), &pol),
            Err(LabError::ZeroField)
        );
    }
}
