//! Solvers for the l1/l2 regularized least squares problem posed on the
//! realified boundary operator.

pub mod alm;
pub mod pda;
pub mod ssn;

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};
use rand_pcg::Pcg64;

use crate::realfield::{realify, RealifiedMatrix};

pub use alm::{solve_alm, AlmOptions, AlmSolution};
pub use pda::{solve_pda, PdaOptions, PdaSolution};
pub use ssn::{solve_ssn, SsnOptions, SsnSolution};

/// Synthetic complex instance `(V_b, u_b)` of size `M × N`, realified.
///
/// Entries of `V_b` are complex Gaussian scaled by `1/√N`; `u_b` is the image
/// of a sparse complex vector plus a Gaussian perturbation.
pub fn random_instance(m: usize, n: usize, seed: u64) -> (DMatrix<f64>, DVector<f64>) {
    let mut rng = Pcg64::seed_from_u64(seed);
    let mut gauss = || -> f64 { StandardNormal.sample(&mut rng) };
    let scale = 1.0 / (n as f64).sqrt();
    let mut entries = Vec::with_capacity(m * n);
    for _ in 0..m * n {
        entries.push(Complex64::new(gauss(), gauss()) * scale);
    }
    let vb = RealifiedMatrix::from_complex_fn(m, n, |i, j| entries[i * n + j]);
    let mut x = vec![Complex64::new(0.0, 0.0); n];
    for (j, xj) in x.iter_mut().enumerate() {
        if j % 4 == 0 {
            *xj = Complex64::new(gauss(), gauss());
        }
    }
    let u: Vec<Complex64> = (0..m)
        .map(|i| (0..n).map(|j| entries[i * n + j] * x[j]).sum::<Complex64>() + Complex64::new(gauss(), gauss()) * 0.05)
        .collect();
    (vb.into_dmatrix(), realify(&u).into_dvector())
}
