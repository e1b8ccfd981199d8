//! Real block representation of complex vectors and operators.
//!
//! A complex vector `v ∈ ℂⁿ` is stored as `(Re v; Im v) ∈ ℝ²ⁿ` and a complex
//! matrix `A = A_R + i A_I` as the real block matrix
//!
//! ```text
//! [ A_R  -A_I ]
//! [ A_I   A_R ]
//! ```
//!
//! With this layout the plain real transpose is the adjoint used by every
//! solver, and it coincides with the realified conjugate transpose.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Real vector of length `2n` holding the real block followed by the imaginary block.
#[derive(Clone, Debug, PartialEq)]
pub struct RealifiedVector {
    data: DVector<f64>,
}

impl RealifiedVector {
    pub fn zeros(n: usize) -> Self {
        Self { data: DVector::zeros(2 * n) }
    }

    /// Wraps raw storage; the length must be even.
    pub fn from_raw(data: DVector<f64>) -> Result<Self> {
        if data.len() % 2 != 0 {
            return Err(Error::Dimension(format!(
                "realified vector needs even length, got {}",
                data.len()
            )));
        }
        Ok(Self { data })
    }

    pub fn from_vec(data: Vec<f64>) -> Result<Self> {
        Self::from_raw(DVector::from_vec(data))
    }

    /// Builds `(re; im)` from separate blocks of equal length.
    pub fn from_parts(re: &[f64], im: &[f64]) -> Result<Self> {
        if re.len() != im.len() {
            return Err(Error::Dimension(format!(
                "real block has {} entries, imaginary block {}",
                re.len(),
                im.len()
            )));
        }
        let n = re.len();
        let data = DVector::from_fn(2 * n, |i, _| if i < n { re[i] } else { im[i - n] });
        Ok(Self { data })
    }

    /// Logical complex dimension.
    pub fn n(&self) -> usize {
        self.data.len() / 2
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn as_slice(&self) -> &[f64] {
        self.data.as_slice()
    }

    pub fn as_dvector(&self) -> &DVector<f64> {
        &self.data
    }

    pub fn into_dvector(self) -> DVector<f64> {
        self.data
    }

    pub fn re(&self) -> &[f64] {
        &self.data.as_slice()[..self.n()]
    }

    pub fn im(&self) -> &[f64] {
        &self.data.as_slice()[self.n()..]
    }

    pub fn dot(&self, other: &Self) -> f64 {
        self.data.dot(&other.data)
    }

    pub fn norm(&self) -> f64 {
        self.data.norm()
    }
}

/// Stacks real and imaginary parts.
pub fn realify(v: &[Complex64]) -> RealifiedVector {
    let n = v.len();
    let data = DVector::from_fn(2 * n, |i, _| if i < n { v[i].re } else { v[i - n].im });
    RealifiedVector { data }
}

/// Inverse of [`realify`].
pub fn derealify(v: &RealifiedVector) -> Vec<Complex64> {
    v.re()
        .iter()
        .zip(v.im())
        .map(|(&re, &im)| Complex64::new(re, im))
        .collect()
}

/// Real `2M × 2N` operator with the rotation-commuting block layout.
#[derive(Clone, Debug, PartialEq)]
pub struct RealifiedMatrix {
    data: DMatrix<f64>,
    m: usize,
    n: usize,
}

impl RealifiedMatrix {
    /// Wraps a real matrix after checking the block invariant to `tol`.
    pub fn from_raw(data: DMatrix<f64>, tol: f64) -> Result<Self> {
        let (rows, cols) = data.shape();
        if rows % 2 != 0 || cols % 2 != 0 {
            return Err(Error::Dimension(format!(
                "realified matrix needs even shape, got {rows}x{cols}"
            )));
        }
        let m = rows / 2;
        let n = cols / 2;
        for j in 0..n {
            for i in 0..m {
                let d1 = (data[(i, j)] - data[(m + i, n + j)]).abs();
                let d2 = (data[(i, n + j)] + data[(m + i, j)]).abs();
                if d1 > tol || d2 > tol {
                    return Err(Error::Dimension(format!(
                        "block structure violated at ({i}, {j})"
                    )));
                }
            }
        }
        Ok(Self { data, m, n })
    }

    /// Builds the matrix from a closure producing complex entries `A[i][j]`.
    pub fn from_complex_fn(m: usize, n: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut data = DMatrix::zeros(2 * m, 2 * n);
        for j in 0..n {
            for i in 0..m {
                let a = f(i, j);
                data[(i, j)] = a.re;
                data[(m + i, n + j)] = a.re;
                data[(m + i, j)] = a.im;
                data[(i, n + j)] = -a.im;
            }
        }
        Self { data, m, n }
    }

    /// Builds the matrix from complex rows, `rows[i][j] = A[i][j]`.
    pub fn from_complex_rows(rows: &[Vec<Complex64>]) -> Result<Self> {
        let m = rows.len();
        let n = rows.first().map_or(0, Vec::len);
        if rows.iter().any(|r| r.len() != n) {
            return Err(Error::Dimension("ragged complex rows".into()));
        }
        Ok(Self::from_complex_fn(m, n, |i, j| rows[i][j]))
    }

    /// Logical complex row count `M`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Logical complex column count `N`.
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn as_dmatrix(&self) -> &DMatrix<f64> {
        &self.data
    }

    pub fn into_dmatrix(self) -> DMatrix<f64> {
        self.data
    }

    /// Complex entry `A[i][j]`.
    pub fn complex_entry(&self, i: usize, j: usize) -> Complex64 {
        Complex64::new(self.data[(i, j)], self.data[(self.m + i, j)])
    }

    pub fn apply(&self, x: &RealifiedVector) -> Result<RealifiedVector> {
        if x.len() != 2 * self.n {
            return Err(Error::Dimension(format!(
                "operator has {} columns, vector has {} entries",
                2 * self.n,
                x.len()
            )));
        }
        Ok(RealifiedVector { data: &self.data * x.as_dvector() })
    }

    /// Plain real transpose product `Aᵀ y`.
    pub fn transpose_apply(&self, y: &RealifiedVector) -> Result<RealifiedVector> {
        transpose_apply(self, y)
    }

    /// Checks `A·J_N == J_M·A` where `J = [[0, -I], [I, 0]]`.
    pub fn commutes_with_rotation(&self, tol: f64) -> bool {
        let (m, n) = (self.m, self.n);
        for j in 0..2 * n {
            for i in 0..2 * m {
                // (A J)[i][j] = A[i][j+n] for j < n, -A[i][j-n] otherwise.
                let aj = if j < n { self.data[(i, j + n)] } else { -self.data[(i, j - n)] };
                // (J A)[i][j] = -A[i+m][j] for i < m, A[i-m][j] otherwise.
                let ja = if i < m { -self.data[(i + m, j)] } else { self.data[(i - m, j)] };
                if (aj - ja).abs() > tol {
                    return false;
                }
            }
        }
        true
    }
}

/// Realifies a complex matrix given in row-major order.
pub fn realify_matrix(a: &[Vec<Complex64>]) -> Result<RealifiedMatrix> {
    RealifiedMatrix::from_complex_rows(a)
}

/// Real transpose product `Aᵀ y` for `y` of length `2M`.
pub fn transpose_apply(a: &RealifiedMatrix, y: &RealifiedVector) -> Result<RealifiedVector> {
    if y.len() != 2 * a.m {
        return Err(Error::Dimension(format!(
            "operator has {} rows, vector has {} entries",
            2 * a.m,
            y.len()
        )));
    }
    Ok(RealifiedVector { data: a.data.tr_mul(y.as_dvector()) })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn complex_strategy() -> impl Strategy<Value = Complex64> {
        (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(a, b)| c(a, b))
    }

    #[test]
    fn realify_small_cases() {
        assert_eq!(realify(&[c(1.0, 2.0)]).as_slice(), &[1.0, 2.0]);
        assert_eq!(realify(&[c(0.0, 0.0), c(0.0, 0.0)]).as_slice(), &[0.0; 4]);
    }

    #[test]
    fn odd_length_rejected() {
        assert!(RealifiedVector::from_vec(vec![1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn imaginary_unit_is_rotation() {
        let a = realify_matrix(&[vec![c(0.0, 1.0)]]).unwrap();
        let d = a.as_dmatrix();
        assert_eq!((d[(0, 0)], d[(0, 1)], d[(1, 0)], d[(1, 1)]), (0.0, -1.0, 1.0, 0.0));
        let y = RealifiedVector::from_vec(vec![0.0, 1.0]).unwrap();
        assert_eq!(a.transpose_apply(&y).unwrap().as_slice(), &[1.0, 0.0]);
    }

    #[test]
    fn identity_block() {
        let a = realify_matrix(&[vec![c(1.0, 0.0)]]).unwrap();
        assert_eq!(a.as_dmatrix(), &DMatrix::identity(2, 2));
        let y = RealifiedVector::from_vec(vec![3.0, -4.0]).unwrap();
        assert_eq!(a.transpose_apply(&y).unwrap(), y);
    }

    #[test]
    fn transpose_dimension_mismatch() {
        let a = realify_matrix(&[vec![c(1.0, 0.0), c(2.0, 1.0)]]).unwrap();
        let y = RealifiedVector::zeros(2);
        assert!(a.transpose_apply(&y).is_err());
        assert!(a.apply(&RealifiedVector::zeros(1)).is_err());
    }

    #[test]
    fn from_raw_checks_blocks() {
        let mut d = DMatrix::identity(2, 2);
        assert!(RealifiedMatrix::from_raw(d.clone(), 0.0).is_ok());
        d[(0, 1)] = 1.0;
        assert!(RealifiedMatrix::from_raw(d, 0.0).is_err());
    }

    proptest! {
        #[test]
        fn roundtrip_exact(v in prop::collection::vec(complex_strategy(), 0..20)) {
            prop_assert_eq!(derealify(&realify(&v)), v);
        }

        #[test]
        fn inner_product_is_real_part(
            pairs in prop::collection::vec((complex_strategy(), complex_strategy()), 1..20)
        ) {
            let (u, v): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
            let direct: Complex64 = u.iter().zip(&v).map(|(a, b)| a.conj() * b).sum();
            let real = realify(&u).dot(&realify(&v));
            prop_assert!((real - direct.re).abs() <= 1e-12 * (1.0 + direct.norm()));
            let norm: f64 = u.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
            prop_assert!((realify(&u).norm() - norm).abs() <= 1e-12 * (1.0 + norm));
        }

        #[test]
        fn matrix_homomorphism(
            entries in prop::collection::vec(complex_strategy(), 12),
            v in prop::collection::vec(complex_strategy(), 4),
        ) {
            let a: Vec<Vec<Complex64>> = entries.chunks(4).map(<[_]>::to_vec).collect();
            let av: Vec<Complex64> = a
                .iter()
                .map(|row| row.iter().zip(&v).map(|(x, y)| x * y).sum())
                .collect();
            let ra = realify_matrix(&a).unwrap();
            let lhs = ra.apply(&realify(&v)).unwrap();
            let rhs = realify(&av);
            for (x, y) in lhs.as_slice().iter().zip(rhs.as_slice()) {
                prop_assert!((x - y).abs() <= 1e-14 * 400.0);
            }
            prop_assert!(ra.commutes_with_rotation(0.0));
        }

        #[test]
        fn ring_homomorphism(
            ea in prop::collection::vec(complex_strategy(), 6),
            eb in prop::collection::vec(complex_strategy(), 6),
        ) {
            // A is 2x3, B is 3x2.
            let a: Vec<Vec<Complex64>> = ea.chunks(3).map(<[_]>::to_vec).collect();
            let b: Vec<Vec<Complex64>> = eb.chunks(2).map(<[_]>::to_vec).collect();
            let ab: Vec<Vec<Complex64>> = (0..2)
                .map(|i| (0..2).map(|j| (0..3).map(|k| a[i][k] * b[k][j]).sum()).collect())
                .collect();
            let lhs = realify_matrix(&ab).unwrap();
            let rhs = realify_matrix(&a).unwrap().as_dmatrix() * realify_matrix(&b).unwrap().as_dmatrix();
            prop_assert!((lhs.as_dmatrix() - rhs).amax() <= 1e-12);
        }

        #[test]
        fn adjoint_identity(
            entries in prop::collection::vec(complex_strategy(), 6),
            x in prop::collection::vec(complex_strategy(), 3),
            y in prop::collection::vec(complex_strategy(), 2),
        ) {
            let a: Vec<Vec<Complex64>> = entries.chunks(3).map(<[_]>::to_vec).collect();
            let ra = realify_matrix(&a).unwrap();
            let (rx, ry) = (realify(&x), realify(&y));
            let lhs = ra.apply(&rx).unwrap().dot(&ry);
            let rhs = rx.dot(&ra.transpose_apply(&ry).unwrap());
            prop_assert!((lhs - rhs).abs() <= 1e-10);
        }
    }
}
