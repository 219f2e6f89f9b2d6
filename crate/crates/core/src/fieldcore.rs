//! Periodic 1D grids, complex scalar fields and the derivative operators
//! acting on them.
//!
//! Every field lives on a uniform periodic grid `x_j = j * spacing`,
//! `j = 0..n`. Spatial derivatives are either exact Fourier multipliers or
//! periodic three-point stencils. Integrals are plain Riemann sums, which
//! coincide with the trapezoid rule on a periodic grid.

use std::f64::consts::PI;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::spectral;

/// Norms below this are treated as an identically zero field.
pub const ZERO_NORM: f64 = 1e-30;

/// Speed of light, unit of action and angular frequency of the field.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PhysParams {
    c: f64,
    hbar: f64,
    omega: f64,
}

impl PhysParams {
    pub fn new(c: f64, hbar: f64, omega: f64) -> Result<Self> {
        for (name, v) in [("c", c), ("hbar", hbar), ("omega", omega)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(LabError::InvalidParameter(format!(
                    "{name} must be finite and positive, got {v}"
                )));
            }
        }
        Ok(Self { c, hbar, omega })
    }

    /// `c = hbar = 1` with the given angular frequency.
    pub fn natural(omega: f64) -> Result<Self> {
        Self::new(1.0, 1.0, omega)
    }

    pub fn c(&self) -> f64 {
        self.c
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// m* = hbar omega / 2c^2.
    pub fn effective_mass(&self) -> f64 {
        self.hbar * self.omega / (2.0 * self.c * self.c)
    }

    /// k = omega / c.
    pub fn wavenumber(&self) -> f64 {
        self.omega / self.c
    }

    /// c^2 / omega, the coefficient of the Laplacian in the Schrödinger-like
    /// equation. Equals hbar / 2m*.
    pub fn dispersion_coefficient(&self) -> f64 {
        self.c * self.c / self.omega
    }

    /// Same parameters with a different angular frequency.
    pub fn with_omega(&self, omega: f64) -> Result<Self> {
        Self::new(self.c, self.hbar, omega)
    }
}

/// Uniform periodic grid on `[0, length)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    n: usize,
    length: f64,
    spacing: f64,
}

impl Grid1D {
    pub fn new(n: usize, length: f64) -> Result<Self> {
        if n < 8 || !n.is_multiple_of(2) {
            return Err(LabError::InvalidGrid(format!(
                "sample count must be even and at least 8, got {n}"
            )));
        }
        if !(length.is_finite() && length > 0.0) {
            return Err(LabError::InvalidGrid(format!(
                "length must be finite and positive, got {length}"
            )));
        }
        Ok(Self {
            n,
            length,
            spacing: length / n as f64,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn length(&self) -> f64 {
        self.length
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn x(&self, j: usize) -> f64 {
        j as f64 * self.spacing
    }

    pub fn coordinates(&self) -> Vec<f64> {
        (0..self.n).map(|j| self.x(j)).collect()
    }

    /// Angular wavenumbers of the DFT modes, in FFT order.
    pub fn wavenumbers(&self) -> Vec<f64> {
        spectral::wavenumbers(self.n, self.length)
    }

    /// Smallest nonzero wavenumber 2 pi / L.
    pub fn fundamental_wavenumber(&self) -> f64 {
        2.0 * PI / self.length
    }
}

/// Complex samples of a field on a periodic grid at time `time`.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    grid: Grid1D,
    time: f64,
    samples: Vec<Complex64>,
}

impl ScalarField {
    pub fn new(grid: Grid1D, time: f64, samples: Vec<Complex64>) -> Result<Self> {
        if samples.len() != grid.n() {
            return Err(LabError::LengthMismatch {
                expected: grid.n(),
                got: samples.len(),
            });
        }
        if let Some(j) = samples.iter().position(|z| !(z.re.is_finite() && z.im.is_finite())) {
            return Err(LabError::NonFinite(j));
        }
        if !time.is_finite() {
            return Err(LabError::InvalidParameter(format!("time must be finite, got {time}")));
        }
        Ok(Self { grid, time, samples })
    }

    pub fn zeros(grid: Grid1D, time: f64) -> Self {
        Self {
            grid,
            time,
            samples: vec![Complex64::new(0.0, 0.0); grid.n()],
        }
    }

    /// Samples `f(x_j)` on the grid.
    pub fn from_fn<F>(grid: Grid1D, time: f64, f: F) -> Result<Self>
    where
        F: Fn(f64) -> Complex64,
    {
        Self::new(grid, time, (0..grid.n()).map(|j| f(grid.x(j))).collect())
    }

    pub fn grid(&self) -> &Grid1D {
        &self.grid
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn samples(&self) -> &[Complex64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<Complex64> {
        self.samples
    }

    /// Same grid and time, new samples. Used internally where the samples
    /// are known to be finite.
    pub(crate) fn with_samples(&self, samples: Vec<Complex64>) -> Self {
        debug_assert_eq!(samples.len(), self.grid.n());
        Self {
            grid: self.grid,
            time: self.time,
            samples,
        }
    }

    pub(crate) fn at_time(mut self, time: f64) -> Self {
        self.time = time;
        self
    }

    pub fn scaled(&self, factor: Complex64) -> Self {
        self.with_samples(self.samples.iter().map(|z| z * factor).collect())
    }

    /// Integral of |psi|^2.
    pub fn norm_squared(&self) -> f64 {
        self.samples.iter().map(|z| z.norm_sqr()).sum::<f64>() * self.grid.spacing()
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    /// Pointwise |psi|^2.
    pub fn intensity(&self) -> Vec<f64> {
        self.samples.iter().map(|z| z.norm_sqr()).collect()
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn same_grid(&self, other: &ScalarField) -> bool {
        self.grid == other.grid
    }
}

/// Relative L2 distance `||a - b|| / ||b||`.
pub fn relative_l2(a: &ScalarField, b: &ScalarField) -> Result<f64> {
    if !a.same_grid(b) {
        return Err(LabError::GridMismatch);
    }
    let diff: f64 = a
        .samples
        .iter()
        .zip(b.samples.iter())
        .map(|(x, y)| (x - y).norm_sqr())
        .sum();
    let reference: f64 = b.samples.iter().map(|y| y.norm_sqr()).sum();
    if reference.sqrt() < ZERO_NORM {
        return Err(LabError::ZeroField);
    }
    Ok((diff / reference).sqrt())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivMethod {
    /// Exact Fourier multipliers `ik` and `-k^2`.
    Spectral,
    /// Second-order central differences with periodic wrap.
    Central2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DerivOrder {
    First,
    Second,
}

impl TryFrom<u8> for DerivOrder {
    type Error = LabError;

    fn try_from(order: u8) -> Result<Self> {
        match order {
            1 => Ok(DerivOrder::First),
            2 => Ok(DerivOrder::Second),
            _ => Err(LabError::InvalidParameter(format!(
                "derivative order must be 1 or 2, got {order}"
            ))),
        }
    }
}

/// Plane wave `amp * exp(i(k x - omega t))` on a periodic grid.
pub fn make_plane_wave(
    grid: Grid1D,
    params: &PhysParams,
    k: f64,
    t: f64,
    amp: Complex64,
) -> Result<ScalarField> {
    check_commensurate(&grid, k)?;
    let omega = params.omega();
    ScalarField::from_fn(grid, t, |x| amp * Complex64::from_polar(1.0, k * x - omega * t))
}

/// Rejects wavenumbers that do not fit an integer number of periods into the domain.
pub fn check_commensurate(grid: &Grid1D, k: f64) -> Result<()> {
    let cycles = k * grid.length() / (2.0 * PI);
    if !cycles.is_finite() || (cycles - cycles.round()).abs() > 1e-9 {
        return Err(LabError::NonCommensurateWavenumber { k, cycles });
    }
    Ok(())
}

/// First or second spatial derivative of a periodic field.
pub fn derivative(field: &ScalarField, order: DerivOrder, method: DerivMethod) -> ScalarField {
    let samples = match method {
        DerivMethod::Spectral => spectral_derivative(field, order),
        DerivMethod::Central2 => central_derivative(field, order),
    };
    field.with_samples(samples)
}

fn spectral_derivative(field: &ScalarField, order: DerivOrder) -> Vec<Complex64> {
    let n = field.grid.n();
    let length = field.grid.length();
    match order {
        // The Nyquist mode has no consistent odd derivative on an even grid.
        DerivOrder::First => spectral::apply_multiplier(&field.samples, length, |k, j| {
            if j == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, k)
            }
        }),
        DerivOrder::Second => {
            spectral::apply_multiplier(&field.samples, length, |k, _| Complex64::new(-k * k, 0.0))
        }
    }
}

fn central_derivative(field: &ScalarField, order: DerivOrder) -> Vec<Complex64> {
    let n = field.grid.n();
    let h = field.grid.spacing();
    let f = &field.samples;
    (0..n)
        .map(|j| {
            let next = f[(j + 1) % n];
            let prev = f[(j + n - 1) % n];
            match order {
                DerivOrder::First => (next - prev) / (2.0 * h),
                DerivOrder::Second => (next - 2.0 * f[j] + prev) / (h * h),
            }
        })
        .collect()
}

/// Real-valued spectral derivative, used for densities and currents.
pub(crate) fn real_derivative(values: &[f64], length: f64, order: DerivOrder) -> Vec<f64> {
    let n = values.len();
    let complex: Vec<Complex64> = values.iter().map(|&v| Complex64::new(v, 0.0)).collect();
    let out = match order {
        DerivOrder::First => spectral::apply_multiplier(&complex, length, |k, j| {
            if j == n / 2 {
                Complex64::new(0.0, 0.0)
            } else {
                Complex64::new(0.0, k)
            }
        }),
        DerivOrder::Second => {
            spectral::apply_multiplier(&complex, length, |k, _| Complex64::new(-k * k, 0.0))
        }
    };
    out.into_iter().map(|z| z.re).collect()
}

/// `sum_j conj(f_j) g_j * spacing`.
pub fn inner_product(f: &ScalarField, g: &ScalarField) -> Result<Complex64> {
    if !f.same_grid(g) {
        return Err(LabError::GridMismatch);
    }
    let sum: Complex64 = f
        .samples
        .iter()
        .zip(g.samples.iter())
        .map(|(a, b)| a.conj() * b)
        .sum();
    Ok(sum * f.grid.spacing())
}

/// Rescales to unit norm.
pub fn normalize(field: &ScalarField) -> Result<ScalarField> {
    let norm = field.norm();
    if norm < ZERO_NORM {
        return Err(LabError::ZeroField);
    }
    Ok(field.scaled(Complex64::new(1.0 / norm, 0.0)))
}

/// Max over interior points of `|(x d - d x) f - i f|` with `d = -i d/dx`
/// discretized by central differences.
///
/// `x` is the non-periodic coordinate, so only points at least `margin * L`
/// away from both domain edges are inspected; the test field must vanish
/// there. The continuum commutator is exactly `i`, so the returned value is
/// pure discretization error and shrinks as `spacing^2`.
pub fn commutator_residual(test_field: &ScalarField, margin: f64) -> Result<f64> {
    let grid = test_field.grid;
    let n = grid.n();
    let min_margin = 2.0 / n as f64;
    if !(margin >= min_margin) {
        return Err(LabError::MarginTooSmall {
            margin,
            min: min_margin,
        });
    }
    let h = grid.spacing();
    let lo = margin * grid.length();
    let hi = grid.length() - lo;
    let f = &test_field.samples;
    let i = Complex64::i();
    let displacement = |vals: &dyn Fn(usize) -> Complex64, j: usize| -> Complex64 {
        -i * (vals(j + 1) - vals(j - 1)) / (2.0 * h)
    };
    let mut worst: f64 = 0.0;
    for j in 1..n - 1 {
        let x = grid.x(j);
        if x < lo || x > hi {
            continue;
        }
        let x_d_f = x * displacement(&|m| f[m], j);
        let d_x_f = displacement(&|m| grid.x(m) * f[m], j);
        worst = worst.max((x_d_f - d_x_f - i * f[j]).norm());
    }
    Ok(worst)
}
