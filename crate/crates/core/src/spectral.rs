//! Trigonometric differentiation on periodic uniform grids.

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

/// Cached forward/inverse FFT plans and wavenumbers for one grid size.
#[derive(Clone)]
pub struct Spectral {
    n: usize,
    wavenumbers: Vec<f64>,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl std::fmt::Debug for Spectral {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Spectral").field("n", &self.n).finish()
    }
}

impl Spectral {
    /// Plans for `n` points on a period of length `period`.
    pub fn new(n: usize, period: f64) -> Self {
        let mut planner = FftPlanner::new();
        let wavenumbers = (0..n)
            .map(|j| {
                let m = if j <= n / 2 { j as f64 } else { j as f64 - n as f64 };
                2.0 * PI * m / period
            })
            .collect();
        Self {
            n,
            wavenumbers,
            forward: planner.plan_fft_forward(n),
            inverse: planner.plan_fft_inverse(n),
        }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn wavenumbers(&self) -> &[f64] {
        &self.wavenumbers
    }

    fn is_nyquist(&self, j: usize) -> bool {
        self.n.is_multiple_of(2) && j == self.n / 2
    }

    pub fn forward(&self, f: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = f.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        self.forward.process(&mut buf);
        buf
    }

    pub fn inverse(&self, mut spec: Vec<Complex64>) -> Vec<f64> {
        self.inverse.process(&mut spec);
        let scale = 1.0 / self.n as f64;
        spec.into_iter().map(|z| z.re * scale).collect()
    }

    /// Multiplies the spectrum of `f` by `symbol(k)`; `symbol` must be even in `k`
    /// or the Nyquist mode is dropped to keep the result real.
    pub fn apply_symbol(&self, f: &[f64], odd: bool, symbol: impl Fn(f64) -> Complex64) -> Vec<f64> {
        let mut spec = self.forward(f);
        for (j, z) in spec.iter_mut().enumerate() {
            if odd && self.is_nyquist(j) {
                *z = Complex64::new(0.0, 0.0);
            } else {
                *z *= symbol(self.wavenumbers[j]);
            }
        }
        self.inverse(spec)
    }

    /// `order`-th derivative.
    pub fn derivative(&self, f: &[f64], order: u32) -> Vec<f64> {
        let i = Complex64::new(0.0, 1.0);
        self.apply_symbol(f, order % 2 == 1, |k| (i * k).powu(order))
    }
}
