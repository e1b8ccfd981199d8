//! Helmholtz fundamental solutions and the analytic self-cell integral.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::bessel::{hankel1_0, hankel1_1};
use crate::error::{Error, Result};

/// Outgoing fundamental solution `Φ(r)`: `(i/4) H₀⁽¹⁾(kr)` in 2D, `e^{ikr}/(4πr)` in 3D.
pub fn fundamental_solution(k: f64, r: f64, dim: usize) -> Result<Complex64> {
    if r == 0.0 {
        return Err(Error::Singularity);
    }
    if !(r > 0.0) || !(k > 0.0) {
        return Err(Error::InvalidParameter(format!("need r > 0 and k > 0, got r = {r}, k = {k}")));
    }
    Ok(fundamental_solution_unchecked(k, r, dim))
}

pub(crate) fn fundamental_solution_unchecked(k: f64, r: f64, dim: usize) -> Complex64 {
    if dim == 2 {
        Complex64::new(0.0, 0.25) * hankel1_0(k * r)
    } else {
        Complex64::from_polar(1.0 / (4.0 * PI * r), k * r)
    }
}

/// Integral of `Φ` over the disk (2D) or ball (3D) whose measure equals one
/// cell of width `h`, centred at the singularity.
pub fn self_cell_integral(k: f64, h: f64, dim: usize) -> Complex64 {
    let i = Complex64::i();
    if dim == 2 {
        let a = h / PI.sqrt();
        i * (PI * a / (2.0 * k)) * hankel1_1(k * a) - 1.0 / (k * k)
    } else {
        let a = h * (3.0 / (4.0 * PI)).cbrt();
        Complex64::from_polar(1.0, k * a) * (Complex64::new(1.0 / (k * k), 0.0) - i * (a / k)) - 1.0 / (k * k)
    }
}
