//! Multidimensional complex FFT on a cube of side `len`, built from 1D passes.

use std::sync::Arc;

use num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

pub struct CubeFft {
    dim: usize,
    len: usize,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
}

impl CubeFft {
    pub fn new(dim: usize, len: usize) -> Self {
        let mut planner = FftPlanner::new();
        Self {
            dim,
            len,
            forward: planner.plan_fft_forward(len),
            inverse: planner.plan_fft_inverse(len),
        }
    }

    pub fn total_len(&self) -> usize {
        self.len.pow(self.dim as u32)
    }

    pub fn forward(&self, data: &mut [Complex64]) {
        self.transform(data, &*self.forward);
    }

    /// Unnormalized inverse transform.
    pub fn inverse(&self, data: &mut [Complex64]) {
        self.transform(data, &*self.inverse);
    }

    fn transform(&self, data: &mut [Complex64], fft: &dyn Fft<f64>) {
        assert_eq!(data.len(), self.total_len());
        let n = self.len;
        let mut scratch = vec![Complex64::new(0.0, 0.0); fft.get_inplace_scratch_len()];
        // Axis 0 is contiguous.
        fft.process_with_scratch(data, &mut scratch);
        let mut line = vec![Complex64::new(0.0, 0.0); n];
        for axis in 1..self.dim {
            let stride = n.pow(axis as u32);
            let block = stride * n;
            for base in (0..data.len()).step_by(block) {
                for offset in 0..stride {
                    let start = base + offset;
                    for (t, v) in line.iter_mut().enumerate() {
                        *v = data[start + t * stride];
                    }
                    fft.process_with_scratch(&mut line, &mut scratch);
                    for (t, v) in line.iter().enumerate() {
                        data[start + t * stride] = *v;
                    }
                }
            }
        }
    }
}
