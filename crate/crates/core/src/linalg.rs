//! Dense helpers shared by the solvers.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};

use crate::error::{Error, Result};

pub fn cholesky(a: DMatrix<f64>) -> Result<Cholesky<f64, Dyn>> {
    if a.iter().any(|v| !v.is_finite()) {
        return Err(Error::Factorization("matrix has non-finite entries".into()));
    }
    let n = a.nrows();
    Cholesky::new(a).ok_or_else(|| Error::Factorization(format!("{n}x{n} matrix is not positive definite")))
}

pub fn spd_solve(a: DMatrix<f64>, b: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(cholesky(a)?.solve(b))
}

/// `A[:, cols] A[:, cols]ᵀ` for the listed columns.
pub fn selected_gram(a: &DMatrix<f64>, cols: &[usize]) -> DMatrix<f64> {
    let sub = a.select_columns(cols);
    &sub * sub.transpose()
}

/// Spectral norm `‖A‖₂` by power iteration on `AᵀA` from a fixed start vector.
pub fn spectral_norm(a: &DMatrix<f64>, iterations: usize) -> f64 {
    let n = a.ncols();
    if n == 0 || a.nrows() == 0 {
        return 0.0;
    }
    // Deterministic start with no special alignment to the coordinate axes.
    let mut v = DVector::from_fn(n, |i, _| 1.0 + 0.5 * ((i as f64 + 1.0) * 0.618_033_988_75).fract());
    v /= v.norm();
    let mut estimate = 0.0;
    for _ in 0..iterations {
        let w = a.tr_mul(&(a * &v));
        let nw = w.norm();
        if nw == 0.0 {
            return 0.0;
        }
        estimate = nw.sqrt();
        v = w / nw;
    }
    estimate
}
