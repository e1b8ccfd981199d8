//! Primal, dual and augmented Lagrangian objectives of the discrete problem
//!
//! ```text
//! P(μ) = ½‖V_b μ - u_b‖² + α₀/2 ‖μ‖² + α‖μ‖₁
//! D(y) = p*(-V_bᵀ y) + h*(y)
//! ```
//!
//! Strong duality gives `min P = -min D`, so `P(μ) + D(y) ≥ 0` is the gap.

use nalgebra::{DMatrix, DVector};

use crate::prox::RegParams;

pub fn primal_objective(vb: &DMatrix<f64>, u_b: &DVector<f64>, mu: &DVector<f64>, reg: &RegParams) -> f64 {
    0.5 * (vb * mu - u_b).norm_squared() + reg.penalty(mu)
}

pub fn dual_objective(vb: &DMatrix<f64>, u_b: &DVector<f64>, y: &DVector<f64>, reg: &RegParams) -> f64 {
    let z = -(vb.tr_mul(y));
    reg.penalty_conjugate(&z) + 0.5 * y.norm_squared() + y.dot(u_b)
}

pub fn duality_gap(vb: &DMatrix<f64>, u_b: &DVector<f64>, mu: &DVector<f64>, y: &DVector<f64>, reg: &RegParams) -> f64 {
    primal_objective(vb, u_b, mu, reg) + dual_objective(vb, u_b, y, reg)
}

/// `L_σ(y, z; λ) = h*(y) + p*(z) + ⟨λ, V_bᵀy + z⟩ + σ/2 ‖V_bᵀy + z‖²`.
#[allow(clippy::too_many_arguments)]
pub fn augmented_lagrangian(
    vb: &DMatrix<f64>,
    u_b: &DVector<f64>,
    y: &DVector<f64>,
    z: &DVector<f64>,
    lambda: &DVector<f64>,
    sigma: f64,
    reg: &RegParams,
) -> f64 {
    let r = vb.tr_mul(y) + z;
    0.5 * y.norm_squared() + y.dot(u_b) + reg.penalty_conjugate(z) + lambda.dot(&r) + 0.5 * sigma * r.norm_squared()
}
