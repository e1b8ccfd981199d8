//! Discrete volume potential `V_k h = k² ∫_Ω Φ(x, y) h(y) dy` on a [`Grid`].
//!
//! Midpoint quadrature on cell centres, with the singular self cell replaced
//! by the analytic integral of `Φ` over the disk/ball of equal measure. The
//! discrete operator is a Toeplitz (block-Toeplitz) convolution, so it is
//! applied either densely or through a zero-padded FFT on a cube of side `2n`
//! (period `4R`), which makes the circular convolution exact on `Ω`.

use num_complex::Complex64;

use super::fft::CubeFft;
use super::grid::Grid;
use super::kernel::{fundamental_solution_unchecked, self_cell_integral};
use crate::error::{Error, Result};

pub struct VolumePotential {
    grid: Grid,
    k: f64,
    /// Kernel weights indexed by absolute per-axis offsets.
    table: Vec<Complex64>,
    fft: CubeFft,
    kernel_hat: Vec<Complex64>,
}

impl VolumePotential {
    pub fn new(grid: &Grid, k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidParameter(format!("wavenumber must be positive, got {k}")));
        }
        let dim = grid.dim();
        let h = grid.spacing();
        let weight = k * k * grid.cell_volume();
        let table: Vec<Complex64> = (0..grid.len())
            .map(|idx| {
                let mi = grid.multi_index(idx);
                let r2: usize = mi.iter().map(|&m| m * m).sum();
                if r2 == 0 {
                    k * k * self_cell_integral(k, h, dim)
                } else {
                    weight * fundamental_solution_unchecked(k, h * (r2 as f64).sqrt(), dim)
                }
            })
            .collect();

        let n = grid.n_per_axis();
        let p = 2 * n;
        let fft = CubeFft::new(dim, p);
        let mut kernel_hat = vec![Complex64::new(0.0, 0.0); fft.total_len()];
        for (pos, slot) in kernel_hat.iter_mut().enumerate() {
            let mut abs = [0usize; 3];
            let mut rest = pos;
            let mut unused = false;
            for a in abs.iter_mut().take(dim) {
                let t = rest % p;
                rest /= p;
                *a = match t {
                    t if t < n => t,
                    t if t > n => p - t,
                    _ => {
                        unused = true;
                        0
                    }
                };
            }
            if !unused {
                *slot = table[grid.linear_index(abs)];
            }
        }
        fft.forward(&mut kernel_hat);
        Ok(Self { grid: grid.clone(), k, table, fft, kernel_hat })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn k(&self) -> f64 {
        self.k
    }

    fn check(&self, field: &[Complex64]) -> Result<()> {
        if field.len() != self.grid.len() {
            return Err(Error::Dimension(format!(
                "field has {} samples, grid has {} nodes",
                field.len(),
                self.grid.len()
            )));
        }
        Ok(())
    }

    /// Kernel weight between nodes `i` and `j`.
    pub fn weight(&self, i: usize, j: usize) -> Complex64 {
        let a = self.grid.multi_index(i);
        let b = self.grid.multi_index(j);
        let abs = [a[0].abs_diff(b[0]), a[1].abs_diff(b[1]), a[2].abs_diff(b[2])];
        self.table[self.grid.linear_index(abs)]
    }

    /// Direct O(N²) summation.
    pub fn apply_dense(&self, field: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check(field)?;
        let n = self.grid.len();
        Ok((0..n)
            .map(|i| (0..n).map(|j| self.weight(i, j) * field[j]).sum())
            .collect())
    }

    /// FFT convolution; same discrete kernel as [`apply_dense`](Self::apply_dense).
    pub fn apply_fft(&self, field: &[Complex64]) -> Result<Vec<Complex64>> {
        self.check(field)?;
        let n = self.grid.n_per_axis();
        let p = 2 * n;
        let dim = self.grid.dim();
        let mut buf = vec![Complex64::new(0.0, 0.0); self.fft.total_len()];
        let padded = |mi: [usize; 3]| match dim {
            2 => mi[1] * p + mi[0],
            _ => (mi[2] * p + mi[1]) * p + mi[0],
        };
        for (idx, v) in field.iter().enumerate() {
            buf[padded(self.grid.multi_index(idx))] = *v;
        }
        self.fft.forward(&mut buf);
        for (b, kh) in buf.iter_mut().zip(&self.kernel_hat) {
            *b *= kh;
        }
        self.fft.inverse(&mut buf);
        let scale = 1.0 / self.fft.total_len() as f64;
        Ok((0..field.len())
            .map(|idx| buf[padded(self.grid.multi_index(idx))] * scale)
            .collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::forward::kernel::fundamental_solution;

    fn pseudo_random_field(n: usize, seed: f64) -> Vec<Complex64> {
        (0..n)
            .map(|i| {
                let t = i as f64 + seed;
                Complex64::new((t * 12.9898).sin() * 0.5, (t * 78.233).cos() * 0.5)
            })
            .collect()
    }

    #[test]
    fn zero_field_maps_to_zero() {
        let g = Grid::new(2, 8, 1.0).unwrap();
        let vp = VolumePotential::new(&g, 3.0).unwrap();
        let zero = vec![Complex64::new(0.0, 0.0); g.len()];
        assert!(vp.apply_dense(&zero).unwrap().iter().all(|v| v.norm() == 0.0));
        assert!(vp.apply_fft(&zero).unwrap().iter().all(|v| v.norm() == 0.0));
    }

    #[test]
    fn linearity() {
        let g = Grid::new(2, 10, 1.0).unwrap();
        let vp = VolumePotential::new(&g, 2.0).unwrap();
        let (h1, h2) = (pseudo_random_field(g.len(), 0.3), pseudo_random_field(g.len(), 7.1));
        let a = Complex64::new(0.7, -1.3);
        let combo: Vec<_> = h1.iter().zip(&h2).map(|(x, y)| a * x + y).collect();
        let lhs = vp.apply_dense(&combo).unwrap();
        let (v1, v2) = (vp.apply_dense(&h1).unwrap(), vp.apply_dense(&h2).unwrap());
        for i in 0..g.len() {
            assert!((lhs[i] - (a * v1[i] + v2[i])).norm() < 1e-12);
        }
    }

    #[test]
    fn fft_matches_dense_2d_and_3d() {
        for (dim, n) in [(2, 32), (3, 6)] {
            let g = Grid::new(dim, n, 1.0).unwrap();
            let vp = VolumePotential::new(&g, 6.0).unwrap();
            let h = pseudo_random_field(g.len(), 1.0);
            let dense = vp.apply_dense(&h).unwrap();
            let fast = vp.apply_fft(&h).unwrap();
            let scale = dense.iter().map(|v| v.norm()).fold(0.0, f64::max);
            let err = dense.iter().zip(&fast).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max);
            assert!(err / scale <= 1e-10, "dim {dim}: {err}");
        }
    }

    #[test]
    fn translation_equivariance_for_interior_support() {
        let g = Grid::new(2, 16, 1.0).unwrap();
        let vp = VolumePotential::new(&g, 4.0).unwrap();
        let mut h = vec![Complex64::new(0.0, 0.0); g.len()];
        let mut shifted = h.clone();
        for (ix, iy, v) in [(5, 6, 1.0), (7, 5, -0.5), (6, 8, 0.25)] {
            h[g.linear_index([ix, iy, 0])] = Complex64::new(v, 0.3 * v);
            shifted[g.linear_index([ix + 3, iy + 2, 0])] = Complex64::new(v, 0.3 * v);
        }
        let a = vp.apply_fft(&h).unwrap();
        let b = vp.apply_fft(&shifted).unwrap();
        for iy in 0..14 {
            for ix in 0..13 {
                let lhs = b[g.linear_index([ix + 3, iy + 2, 0])];
                let rhs = a[g.linear_index([ix, iy, 0])];
                assert!((lhs - rhs).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn delta_source_reproduces_fundamental_solution() {
        let g = Grid::new(2, 64, 1.0).unwrap();
        let k = 6.0;
        let vp = VolumePotential::new(&g, k).unwrap();
        let src = g.linear_index([32, 32, 0]);
        let mut h = vec![Complex64::new(0.0, 0.0); g.len()];
        h[src] = Complex64::new(1.0 / g.cell_volume(), 0.0);
        let u = vp.apply_fft(&h).unwrap();
        let y0 = g.node(src);
        for (i, p) in g.nodes().enumerate() {
            let r = crate::forward::grid::distance(&p, &y0);
            if r >= 3.0 * g.spacing() {
                let exact = k * k * fundamental_solution(k, r, 2).unwrap();
                assert!((u[i] - exact).norm() <= 0.02 * exact.norm());
            }
        }
    }
}
