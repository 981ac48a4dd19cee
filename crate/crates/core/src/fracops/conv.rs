//! Causal (lower-triangular Toeplitz) convolution `y_i = sum_{j<=i} k_{i-j} v_j`.

use std::sync::Arc;

use rayon::prelude::*;
use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

/// Below this length the direct sum beats the transform.
pub const FFT_THRESHOLD: usize = 96;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConvMethod {
    Direct,
    Fft,
    Auto,
}

/// A causal convolution kernel with its spectrum precomputed.
#[derive(Clone)]
pub struct CausalKernel {
    k: Vec<f64>,
    spectrum: Option<Vec<Complex<f64>>>,
    forward: Option<Arc<dyn Fft<f64>>>,
    inverse: Option<Arc<dyn Fft<f64>>>,
}

impl std::fmt::Debug for CausalKernel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("CausalKernel").field("len", &self.k.len()).finish()
    }
}

impl CausalKernel {
    pub fn new(k: Vec<f64>) -> Self {
        let n = k.len();
        if n < FFT_THRESHOLD {
            return Self {
                k,
                spectrum: None,
                forward: None,
                inverse: None,
            };
        }
        let len = 2 * n;
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(len);
        let inverse = planner.plan_fft_inverse(len);
        let mut spectrum: Vec<Complex<f64>> = k
            .iter()
            .map(|&x| Complex::new(x, 0.0))
            .chain(std::iter::repeat(Complex::new(0.0, 0.0)).take(n))
            .collect();
        forward.process(&mut spectrum);
        Self {
            k,
            spectrum: Some(spectrum),
            forward: Some(forward),
            inverse: Some(inverse),
        }
    }

    pub fn len(&self) -> usize {
        self.k.len()
    }

    pub fn is_empty(&self) -> bool {
        self.k.is_empty()
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.k
    }

    pub fn apply(&self, v: &[f64]) -> Vec<f64> {
        self.apply_with(v, ConvMethod::Auto)
    }

    pub fn apply_with(&self, v: &[f64], method: ConvMethod) -> Vec<f64> {
        assert_eq!(v.len(), self.k.len(), "kernel/input length mismatch");
        match method {
            ConvMethod::Direct => self.direct(v),
            ConvMethod::Fft => self.fft(v),
            ConvMethod::Auto => {
                if self.spectrum.is_some() {
                    self.fft(v)
                } else {
                    self.direct(v)
                }
            }
        }
    }

    /// Single output sample, O(i).
    pub fn apply_at(&self, v: &[f64], i: usize) -> f64 {
        (0..=i).map(|j| self.k[i - j] * v[j]).sum()
    }

    fn direct(&self, v: &[f64]) -> Vec<f64> {
        (0..v.len())
            .into_par_iter()
            .map(|i| self.apply_at(v, i))
            .collect()
    }

    fn fft(&self, v: &[f64]) -> Vec<f64> {
        let n = v.len();
        let len = 2 * n;
        let owned;
        let (spectrum, forward, inverse) = match (&self.spectrum, &self.forward, &self.inverse) {
            (Some(s), Some(f), Some(i)) => (s, f.clone(), i.clone()),
            _ => {
                // Small kernels skip planning up front; plan on demand.
                let mut planner = FftPlanner::new();
                let f = planner.plan_fft_forward(len);
                let i = planner.plan_fft_inverse(len);
                let mut s: Vec<Complex<f64>> = self
                    .k
                    .iter()
                    .map(|&x| Complex::new(x, 0.0))
                    .chain(std::iter::repeat(Complex::new(0.0, 0.0)).take(n))
                    .collect();
                f.process(&mut s);
                owned = s;
                (&owned, f, i)
            }
        };
        let mut buf: Vec<Complex<f64>> = v
            .iter()
            .map(|&x| Complex::new(x, 0.0))
            .chain(std::iter::repeat(Complex::new(0.0, 0.0)).take(n))
            .collect();
        forward.process(&mut buf);
        for (b, s) in buf.iter_mut().zip(spectrum.iter()) {
            *b *= s;
        }
        inverse.process(&mut buf);
        let scale = 1.0 / len as f64;
        buf[..n].iter().map(|c| c.re * scale).collect()
    }
}
