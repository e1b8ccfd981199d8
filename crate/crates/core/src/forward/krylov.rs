//! Restarted GMRES for complex linear systems given as a matrix-free operator.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GmresOptions {
    pub restart: usize,
    pub max_iterations: usize,
    /// Relative residual target `‖Ax - b‖ ≤ tol ‖b‖`.
    pub tol: f64,
}

impl Default for GmresOptions {
    fn default() -> Self {
        Self { restart: 50, max_iterations: 500, tol: 1e-10 }
    }
}

#[derive(Clone, Debug)]
pub struct GmresOutcome {
    pub solution: Vec<Complex64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

fn dotc(a: &[Complex64], b: &[Complex64]) -> Complex64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

/// Solves `A x = b` from a zero initial guess.
///
/// The returned residual is recomputed explicitly, not taken from the
/// Arnoldi estimate.
pub fn gmres<F>(apply: F, b: &[Complex64], opts: &GmresOptions) -> Result<GmresOutcome>
where
    F: Fn(&[Complex64]) -> Result<Vec<Complex64>>,
{
    let n = b.len();
    let zero = Complex64::new(0.0, 0.0);
    let b_norm = norm(b);
    let mut x = vec![zero; n];
    if b_norm == 0.0 {
        return Ok(GmresOutcome { solution: x, iterations: 0, relative_residual: 0.0 });
    }
    let m = opts.restart.max(1);
    let mut iterations = 0;
    let mut residual: Vec<Complex64> = b.to_vec();
    let mut rel = 1.0;

    while iterations < opts.max_iterations {
        let beta = norm(&residual);
        rel = beta / b_norm;
        if rel <= opts.tol {
            break;
        }
        let mut basis: Vec<Vec<Complex64>> = Vec::with_capacity(m + 1);
        basis.push(residual.iter().map(|v| v / beta).collect());
        // Hessenberg columns after Givens rotations (upper triangular R).
        let mut r_cols: Vec<Vec<Complex64>> = Vec::with_capacity(m);
        let mut rotations: Vec<(f64, Complex64)> = Vec::with_capacity(m);
        let mut g = vec![Complex64::new(beta, 0.0)];

        let mut inner = 0;
        while inner < m && iterations < opts.max_iterations {
            let mut w = apply(&basis[inner])?;
            let mut hcol = vec![zero; inner + 2];
            // Modified Gram-Schmidt.
            for (i, v) in basis.iter().enumerate() {
                let hij = dotc(v, &w);
                hcol[i] = hij;
                for (wk, vk) in w.iter_mut().zip(v) {
                    *wk -= hij * vk;
                }
            }
            let h_next = norm(&w);
            hcol[inner + 1] = Complex64::new(h_next, 0.0);
            for (i, &(c, s)) in rotations.iter().enumerate() {
                let (a, b) = (hcol[i], hcol[i + 1]);
                hcol[i] = c * a + s * b;
                hcol[i + 1] = -s.conj() * a + c * b;
            }
            let (a, b) = (hcol[inner], hcol[inner + 1]);
            let denom = (a.norm_sqr() + b.norm_sqr()).sqrt();
            let (c, s) = if denom == 0.0 {
                (1.0, zero)
            } else if a.norm() == 0.0 {
                (0.0, Complex64::new(1.0, 0.0) * (b.conj() / b.norm()))
            } else {
                let phase = a / a.norm();
                (a.norm() / denom, phase * b.conj() / denom)
            };
            hcol[inner] = c * a + s * b;
            hcol[inner + 1] = zero;
            let gi = g[inner];
            g[inner] = c * gi;
            g.push(-s.conj() * gi);
            rotations.push((c, s));
            hcol.truncate(inner + 1);
            r_cols.push(hcol);
            iterations += 1;
            inner += 1;

            let estimate = g[inner].norm() / b_norm;
            if h_next == 0.0 || estimate <= opts.tol {
                break;
            }
            basis.push(w.iter().map(|v| v / h_next).collect());
        }

        // Back substitution for the update coefficients.
        let k = r_cols.len();
        let mut coeff = vec![zero; k];
        for i in (0..k).rev() {
            let mut acc = g[i];
            for j in i + 1..k {
                acc -= r_cols[j][i] * coeff[j];
            }
            coeff[i] = acc / r_cols[i][i];
        }
        for (c, v) in coeff.iter().zip(&basis) {
            for (xk, vk) in x.iter_mut().zip(v) {
                *xk += c * vk;
            }
        }
        let ax = apply(&x)?;
        residual = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        rel = norm(&residual) / b_norm;
        if rel <= opts.tol {
            break;
        }
    }

    if rel <= opts.tol && rel.is_finite() {
        Ok(GmresOutcome { solution: x, iterations, relative_residual: rel })
    } else {
        Err(Error::NonConvergence { iterations, residual: rel })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_apply(a: &[Vec<Complex64>]) -> impl Fn(&[Complex64]) -> Result<Vec<Complex64>> + '_ {
        move |x| Ok(a.iter().map(|row| row.iter().zip(x).map(|(p, q)| p * q).sum()).collect())
    }

    fn test_matrix(n: usize) -> Vec<Vec<Complex64>> {
        (0..n)
            .map(|i| {
                (0..n)
                    .map(|j| {
                        let base = Complex64::new(((i * 7 + j * 3) as f64).sin(), ((i + 2 * j) as f64).cos()) * 0.3;
                        if i == j {
                            base + Complex64::new(n as f64 * 0.5, 1.0)
                        } else {
                            base
                        }
                    })
                    .collect()
            })
            .collect()
    }

    #[test]
    fn solves_nonsymmetric_complex_system() {
        let a = test_matrix(40);
        let x_true: Vec<Complex64> = (0..40).map(|i| Complex64::new(i as f64 * 0.1, 1.0 - i as f64 * 0.05)).collect();
        let b = dense_apply(&a)(&x_true).unwrap();
        let opts = GmresOptions { restart: 10, max_iterations: 500, tol: 1e-12 };
        let out = gmres(dense_apply(&a), &b, &opts).unwrap();
        assert!(out.relative_residual <= 1e-12);
        for (p, q) in out.solution.iter().zip(&x_true) {
            assert!((p - q).norm() < 1e-9);
        }
    }

    #[test]
    fn identity_converges_in_one_step() {
        let b: Vec<Complex64> = (0..5).map(|i| Complex64::new(i as f64, 1.0)).collect();
        let out = gmres(|x: &[Complex64]| Ok(x.to_vec()), &b, &GmresOptions::default()).unwrap();
        assert_eq!(out.iterations, 1);
        assert_eq!(out.solution, b);
    }

    #[test]
    fn reports_nonconvergence() {
        // Cyclic shift: GMRES makes no progress until n iterations.
        let n = 30;
        let shift = |x: &[Complex64]| Ok((0..x.len()).map(|i| x[(i + 1) % x.len()]).collect());
        let mut b = vec![Complex64::new(0.0, 0.0); n];
        b[0] = Complex64::new(1.0, 0.0);
        let opts = GmresOptions { restart: 5, max_iterations: 20, tol: 1e-10 };
        assert!(matches!(gmres(shift, &b, &opts), Err(Error::NonConvergence { .. })));
    }
}
