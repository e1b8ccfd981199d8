//! First-order primal-dual (Chambolle–Pock) iteration on the saddle problem
//!
//! ```text
//! min_μ max_p ⟨V_b μ, p⟩ - ½‖p‖² - ⟨p, u_b⟩ + p(μ)
//! ```
//!
//! with extrapolation parameter `θ = 1`.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::diagnostics::{Diagnostics, IterationRecord, RecordKind};
use crate::error::{Error, Result};
use crate::linalg::spectral_norm;
use crate::objective::{duality_gap, primal_objective};
use crate::prox::{prox_p, RegParams};
use crate::realfield::{RealifiedMatrix, RealifiedVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PdaOptions {
    pub sigma: f64,
    /// Primal step; `None` picks `1 / ((‖V_b‖² + 1e-6) σ)`.
    pub tau: Option<f64>,
    pub iterations: usize,
    /// Stop early once the duality gap drops below this value.
    pub gap_tol: Option<f64>,
    pub power_iterations: usize,
    /// Evaluate `P(μ_k)` (and the gap) every this many iterations.
    pub objective_every: usize,
}

impl Default for PdaOptions {
    fn default() -> Self {
        Self { sigma: 0.5, tau: None, iterations: 5000, gap_tol: None, power_iterations: 50, objective_every: 10 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PdaState {
    pub p: DVector<f64>,
    pub mu: DVector<f64>,
    pub mu_bar: DVector<f64>,
    pub sigma: f64,
    pub tau: f64,
    pub theta: f64,
}

impl PdaState {
    pub fn initial(m2: usize, n2: usize, sigma: f64, tau: f64) -> Self {
        Self { p: DVector::zeros(m2), mu: DVector::zeros(n2), mu_bar: DVector::zeros(n2), sigma, tau, theta: 1.0 }
    }
}

/// Step size `τ = 1/((‖V_b‖² + 1e-6) σ)` with the spectral norm from power iteration.
pub fn default_tau(vb: &DMatrix<f64>, sigma: f64, power_iterations: usize) -> f64 {
    let norm = spectral_norm(vb, power_iterations);
    1.0 / ((norm * norm + 1e-6) * sigma)
}

/// `p⁺ = (p + σV_bμ̄ - σu_b) / (1 + σ)`.
pub fn pda_dual_step(state: &PdaState, vb: &DMatrix<f64>, u_b: &DVector<f64>) -> DVector<f64> {
    let s = state.sigma;
    (&state.p + (vb * &state.mu_bar - u_b) * s) / (1.0 + s)
}

/// `μ⁺ = prox_{τp}(μ - τV_bᵀp⁺)`.
pub fn pda_primal_step(state: &PdaState, vb: &DMatrix<f64>, p_next: &DVector<f64>, reg: &RegParams) -> DVector<f64> {
    let arg = &state.mu - vb.tr_mul(p_next) * state.tau;
    prox_p(&arg, state.tau, reg)
}

#[derive(Clone, Debug)]
pub struct PdaSolution {
    /// Final iterate.
    pub mu: RealifiedVector,
    pub state: PdaState,
    pub primal_objective: f64,
    /// Smallest `P(μ_k)` seen at the sampled iterations.
    pub best_objective: f64,
    pub iterations: usize,
    pub diagnostics: Diagnostics,
}

pub fn solve_pda(vb: &RealifiedMatrix, u_b: &RealifiedVector, reg: &RegParams, opts: &PdaOptions) -> Result<PdaSolution> {
    solve_pda_dense(vb.as_dmatrix(), u_b.as_dvector(), reg, opts)
}

pub fn solve_pda_dense(vb: &DMatrix<f64>, u_b: &DVector<f64>, reg: &RegParams, opts: &PdaOptions) -> Result<PdaSolution> {
    reg.validate()?;
    if vb.nrows() != u_b.len() {
        return Err(Error::Dimension(format!("operator has {} rows, data has {} entries", vb.nrows(), u_b.len())));
    }
    if !(opts.sigma > 0.0) || opts.tau.is_some_and(|t| !(t > 0.0)) || opts.objective_every == 0 {
        return Err(Error::InvalidParameter(format!("invalid PDA options {opts:?}")));
    }
    let tau = opts.tau.unwrap_or_else(|| default_tau(vb, opts.sigma, opts.power_iterations));
    let mut st = PdaState::initial(vb.nrows(), vb.ncols(), opts.sigma, tau);
    let mut diag = Diagnostics::default();
    let (s, t) = (st.sigma, st.tau);
    let shrink = 1.0 + t * reg.alpha0;
    let thr = t * reg.alpha / shrink;

    // Work buffers so the loop does not allocate.
    let mut vmu = DVector::zeros(vb.nrows());
    let mut vtp = DVector::zeros(vb.ncols());
    let mut best = f64::INFINITY;
    let mut iterations = 0;
    for it in 1..=opts.iterations {
        vmu.gemv(1.0, vb, &st.mu_bar, 0.0);
        st.p.axpy(s, &vmu, 1.0);
        st.p.axpy(-s, u_b, 1.0);
        st.p /= 1.0 + s;
        vtp.gemv_tr(1.0, vb, &st.p, 0.0);
        for i in 0..st.mu.len() {
            let old = st.mu[i];
            let v = (old - t * vtp[i]) / shrink;
            let new = if v.abs() <= thr { 0.0 } else { v - thr * v.signum() };
            st.mu[i] = new;
            st.mu_bar[i] = new + st.theta * (new - old);
        }
        iterations = it;
        if it % opts.objective_every == 0 || it == opts.iterations {
            let obj = primal_objective(vb, u_b, &st.mu, reg);
            best = best.min(obj);
            let mut rec = IterationRecord::new("pda", RecordKind::Outer, it, 0, obj - best);
            rec.objective = Some(obj);
            if let Some(tol) = opts.gap_tol {
                let gap = duality_gap(vb, u_b, &st.mu, &st.p, reg);
                rec.gap = Some(gap);
                diag.push(rec);
                if gap <= tol {
                    diag.converged = true;
                    break;
                }
            } else {
                diag.push(rec);
            }
        }
    }
    if opts.gap_tol.is_none() {
        // Fixed budget run: completion is the only criterion.
        diag.converged = true;
    }
    let primal = primal_objective(vb, u_b, &st.mu, reg);
    Ok(PdaSolution {
        mu: RealifiedVector::from_raw(st.mu.clone())?,
        state: st,
        primal_objective: primal,
        best_objective: best.min(primal),
        iterations,
        diagnostics: diag,
    })
}
