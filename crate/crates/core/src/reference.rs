//! Closed-form solutions used as independent references by the scenarios.

use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::Result;
use crate::fieldcore::{Grid1D, ScalarField};

/// Free Gaussian packet of `i d_t psi = -D d_x^2 psi` at time `t`.
///
/// At `t = 0` it is `(2 pi s^2)^(-1/4) exp(-(x-x0)^2/4s^2 + i k0 (x-x0))`, unit
/// norm on the real line. With `a = 1 + i D t / s^2` the packet at time `t` is
/// `(2 pi s^2)^(-1/4) a^(-1/2) exp([-(x-x0)^2/4s^2 + i k0 (x-x0) - i D k0^2 t] / a)`,
/// which spreads with width `s |a|` and drifts at group velocity `2 D k0`.
/// Samples are summed over the nearest periodic images.
pub fn free_gaussian(
    grid: Grid1D,
    sigma: f64,
    center: f64,
    k0: f64,
    coefficient: f64,
    t: f64,
) -> Result<ScalarField> {
    let s2 = sigma * sigma;
    let a = Complex64::new(1.0, coefficient * t / s2);
    let prefactor = (2.0 * PI * s2).powf(-0.25) / a.sqrt();
    let length = grid.length();
    ScalarField::from_fn(grid, t, |x| {
        (-2..=2)
            .map(|image| {
                let dx = x - center + image as f64 * length;
                let exponent = Complex64::new(-dx * dx / (4.0 * s2), k0 * dx - coefficient * k0 * k0 * t);
                prefactor * (exponent / a).exp()
            })
            .sum()
    })
}
