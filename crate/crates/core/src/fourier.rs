//! Inverse Fourier transforms of even, real spectral functions on uniform
//! grids, via the FFT.

use std::f64::consts::PI;

use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Samples of `u(x) = (2π)^{-1} ∫ e^{iξx} F(ξ) dξ` for an even real `F`.
///
/// Returns values at `x_j = (j − n/2)·step`, `j = 0..n`, computed by the
/// trapezoid rule on the dual grid `ξ_k = k·2π/(n·step)`, truncated at the
/// Nyquist frequency `π/step`. `n` must be even.
pub fn inverse_even_transform<F: Fn(f64) -> f64>(spectrum: F, n: usize, step: f64) -> Vec<f64> {
    debug_assert!(n % 2 == 0);
    let dxi = 2.0 * PI / (n as f64 * step);
    // The (−1)^k factor shifts the output origin to index n/2.
    let mut buf: Vec<Complex<f64>> = (0..n)
        .map(|k| {
            let freq = if k <= n / 2 { k as f64 } else { k as f64 - n as f64 };
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Complex::new(sign * spectrum(freq.abs() * dxi), 0.0)
        })
        .collect();
    let mut planner = FftPlanner::new();
    planner.plan_fft_inverse(n).process(&mut buf);
    let scale = dxi / (2.0 * PI);
    buf.into_iter().map(|c| c.re * scale).collect()
}
