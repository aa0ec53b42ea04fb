//! Cosine transform for cell-centered data (DCT-II) and its inverse.
//!
//! The cosine basis `cos(pi k (n + 1/2) / N)` sampled at cell centers is the
//! Neumann eigenbasis on the grid, so the transform diagonalizes both the
//! continuous Neumann Laplacian restricted to cell centers and the
//! three-point stencil with reflected ghosts.
//!
//! Forward: `X[k] = sum_n x[n] cos(pi k (2n + 1) / 2N)`.
//! Inverse: `x[n] = X[0] / N + (2 / N) sum_{k >= 1} X[k] cos(pi k (2n + 1) / 2N)`.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// FFT-backed cosine transform of a fixed length.
#[derive(Clone)]
pub struct CosineTransform {
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    // exp(i pi k / 2N) for k in 0..N
    twiddles: Vec<Complex<f64>>,
}

impl fmt::Debug for CosineTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("CosineTransform").field("len", &self.len).finish()
    }
}

impl CosineTransform {
    pub fn new(len: usize) -> Self {
        assert!(len > 0, "transform length must be positive");
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(2 * len);
        let inverse = planner.plan_fft_inverse(2 * len);
        let twiddles = (0..len)
            .map(|k| Complex::from_polar(1.0, PI * k as f64 / (2 * len) as f64))
            .collect();
        Self {
            len,
            forward,
            inverse,
            twiddles,
        }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// In-place forward transform.
    pub fn forward(&self, data: &mut [f64]) {
        let n = self.len;
        assert_eq!(data.len(), n);
        let mut buf: Vec<Complex<f64>> = data
            .iter()
            .chain(data.iter().rev())
            .map(|&x| Complex::new(x, 0.0))
            .collect();
        self.forward.process(&mut buf);
        for (k, out) in data.iter_mut().enumerate() {
            *out = 0.5 * (self.twiddles[k].conj() * buf[k]).re;
        }
    }

    /// In-place inverse transform.
    pub fn inverse(&self, data: &mut [f64]) {
        let n = self.len;
        assert_eq!(data.len(), n);
        let mut buf = vec![Complex::new(0.0, 0.0); 2 * n];
        for k in 0..n {
            buf[k] = self.twiddles[k] * (2.0 * data[k]);
        }
        for k in 1..n {
            buf[2 * n - k] = buf[k].conj();
        }
        self.inverse.process(&mut buf);
        let scale = 1.0 / (2 * n) as f64;
        for (m, out) in data.iter_mut().enumerate() {
            *out = buf[m].re * scale;
        }
    }
}

/// Direct `O(N^2)` forward transform, used as the reference path.
pub fn forward_direct(data: &[f64]) -> Vec<f64> {
    let n = data.len();
    (0..n)
        .map(|k| {
            data.iter()
                .enumerate()
                .map(|(m, &x)| x * (PI * k as f64 * (2 * m + 1) as f64 / (2 * n) as f64).cos())
                .sum()
        })
        .collect()
}

/// Direct `O(N^2)` inverse transform.
pub fn inverse_direct(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    (0..n)
        .map(|m| {
            let tail: f64 = (1..n)
                .map(|k| coeffs[k] * (PI * k as f64 * (2 * m + 1) as f64 / (2 * n) as f64).cos())
                .sum();
            (coeffs[0] + 2.0 * tail) / n as f64
        })
        .collect()
}
