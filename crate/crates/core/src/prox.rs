//! Proximal calculus for `p(μ) = α₀/2 ‖μ‖² + α ‖μ‖₁` and the data term conjugate.
//!
//! The l1 norm acts componentwise on the realified vector, so real and
//! imaginary parts are thresholded independently.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegParams {
    pub alpha: f64,
    pub alpha0: f64,
}

impl RegParams {
    pub fn new(alpha: f64, alpha0: f64) -> Result<Self> {
        let reg = Self { alpha, alpha0 };
        reg.validate()?;
        Ok(reg)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha >= 0.0 && self.alpha.is_finite() && self.alpha0 >= 0.0 && self.alpha0.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "regularization weights must be finite and nonnegative, got alpha={} alpha0={}",
                self.alpha, self.alpha0
            )));
        }
        Ok(())
    }

    /// Rejects `α = α₀ = 0`, for which `p` vanishes.
    pub fn require_nondegenerate(&self) -> Result<()> {
        self.validate()?;
        if self.alpha == 0.0 && self.alpha0 == 0.0 {
            return Err(Error::InvalidParameter("alpha and alpha0 are both zero".into()));
        }
        Ok(())
    }

    /// `p(μ)`.
    pub fn penalty(&self, mu: &DVector<f64>) -> f64 {
        0.5 * self.alpha0 * mu.norm_squared() + self.alpha * mu.lp_norm(1)
    }

    /// Conjugate `p*(z)`, separable with entries `max(|zᵢ| - α, 0)² / (2α₀)`.
    ///
    /// For `α₀ = 0` this is the indicator of `‖z‖∞ ≤ α`; a relative slack of
    /// `1e-12` absorbs rounding in points produced by the resolvent.
    pub fn penalty_conjugate(&self, z: &DVector<f64>) -> f64 {
        if self.alpha0 == 0.0 {
            let slack = self.alpha * (1.0 + 1e-12) + f64::MIN_POSITIVE;
            return if z.iter().all(|v| v.abs() <= slack) { 0.0 } else { f64::INFINITY };
        }
        z.iter()
            .map(|v| {
                let e = (v.abs() - self.alpha).max(0.0);
                e * e
            })
            .sum::<f64>()
            / (2.0 * self.alpha0)
    }
}

#[inline]
pub fn soft_threshold_scalar(z: f64, sigma: f64) -> f64 {
    if z.abs() <= sigma {
        0.0
    } else {
        z - sigma * z.signum()
    }
}

/// `S_σ(z)`: zero where `|zᵢ| ≤ σ`, otherwise shrunk towards zero by `σ`.
pub fn soft_threshold(z: &DVector<f64>, sigma: f64) -> DVector<f64> {
    debug_assert!(sigma >= 0.0);
    z.map(|v| soft_threshold_scalar(v, sigma))
}

/// Resolvent `(I + σ∂p)⁻¹(μ) = S_{σα/(1+σα₀)}(μ / (1+σα₀))`.
pub fn prox_p(mu: &DVector<f64>, sigma: f64, reg: &RegParams) -> DVector<f64> {
    let scale = 1.0 + sigma * reg.alpha0;
    let thr = sigma * reg.alpha / scale;
    mu.map(|v| soft_threshold_scalar(v / scale, thr))
}

/// `x - prox_p(x, σ)`, which equals `σ (I + σ⁻¹∂p*)⁻¹(x/σ)` by Moreau's identity.
pub fn moreau_complement(x: &DVector<f64>, sigma: f64, reg: &RegParams) -> DVector<f64> {
    x - prox_p(x, sigma, reg)
}

/// `h*(y) = ½‖y‖² + ⟨y, u_b⟩`.
pub fn hstar(y: &DVector<f64>, u_b: &DVector<f64>) -> Result<f64> {
    check_len(y, u_b)?;
    Ok(0.5 * y.norm_squared() + y.dot(u_b))
}

/// `∇h*(y) = y + u_b`.
pub fn hstar_grad(y: &DVector<f64>, u_b: &DVector<f64>) -> Result<DVector<f64>> {
    check_len(y, u_b)?;
    Ok(y + u_b)
}

fn check_len(a: &DVector<f64>, b: &DVector<f64>) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::Dimension(format!("vectors of length {} and {}", a.len(), b.len())));
    }
    Ok(())
}
