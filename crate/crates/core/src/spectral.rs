//! FFT plumbing shared by the spectral derivative and the free propagators.

use std::cell::RefCell;
use std::f64::consts::PI;

use num_complex::Complex64;
use rustfft::FftPlanner;

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Unnormalized forward DFT.
pub(crate) fn forward(samples: &[Complex64]) -> Vec<Complex64> {
    let mut buf = samples.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_forward(buf.len()).process(&mut buf));
    buf
}

/// Inverse DFT including the 1/n factor.
pub(crate) fn inverse(spectrum: &[Complex64]) -> Vec<Complex64> {
    let mut buf = spectrum.to_vec();
    PLANNER.with(|p| p.borrow_mut().plan_fft_inverse(buf.len()).process(&mut buf));
    let scale = 1.0 / buf.len() as f64;
    buf.iter_mut().for_each(|z| *z *= scale);
    buf
}

/// Angular wavenumbers in FFT order for `n` samples over `length`.
pub(crate) fn wavenumbers(n: usize, length: f64) -> Vec<f64> {
    let dk = 2.0 * PI / length;
    (0..n)
        .map(|j| {
            let m = if j < n / 2 { j as i64 } else { j as i64 - n as i64 };
            m as f64 * dk
        })
        .collect()
}

/// Multiplies the spectrum of `samples` by `multiplier(k, index)` and transforms back.
pub(crate) fn apply_multiplier<F>(samples: &[Complex64], length: f64, multiplier: F) -> Vec<Complex64>
where
    F: Fn(f64, usize) -> Complex64,
{
    let n = samples.len();
    let ks = wavenumbers(n, length);
    let mut spec = forward(samples);
    for (j, (z, &k)) in spec.iter_mut().zip(ks.iter()).enumerate() {
        *z *= multiplier(k, j);
    }
    inverse(&spec)
}
