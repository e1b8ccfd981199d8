//! Dual augmented Lagrangian method with a semismooth Newton inner solver.
//!
//! The dual problem `min_y h*(y) + p*(z)` subject to `V_bᵀy + z = 0` is
//! handled by the method of multipliers. Eliminating `z` leaves a smooth,
//! strongly convex function `φ(y) = L_σ(y, M(y); λ)` of the measurement-space
//! variable alone, whose gradient is
//!
//! ```text
//! F(y) = y + u_b - V_b (I + σ∂p)⁻¹(-λ - σV_bᵀy)
//! ```
//!
//! Newton systems are therefore `2M × 2M`, independent of the grid size.

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::diagnostics::{Diagnostics, IterationRecord, RecordKind};
use crate::error::{Error, Result};
use crate::linalg::{cholesky, selected_gram};
use crate::objective::{augmented_lagrangian, duality_gap, primal_objective};
use crate::prox::{moreau_complement, prox_p, soft_threshold, RegParams};
use crate::realfield::{RealifiedMatrix, RealifiedVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AlmOptions {
    pub sigma0: f64,
    /// Penalty growth factor `σ_{k+1} = c₀ σ_k`.
    pub c0: f64,
    pub sigma_max: f64,
    /// Armijo backtracking factor.
    pub beta: f64,
    /// Armijo sufficient decrease constant.
    pub c: f64,
    /// `ε_k = eps0 / (k+1)²`.
    pub eps0: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub max_backtracks: u32,
    pub lambda_tol: f64,
    pub gap_tol: f64,
    /// The gap test only counts once `‖μ(y) + λ‖ ≤ consistency_tol · max(1, ‖λ‖)`.
    pub consistency_tol: f64,
    /// Inner iterations stop once `‖F‖ ≤ residual_floor · (1 + ‖u_b‖)`.
    pub residual_floor: f64,
    /// Return `μ = -λ` instead of the soft-threshold recovery from `y`.
    pub mu_from_lambda: bool,
    /// Keep every multiplier iterate in the solution.
    pub record_multipliers: bool,
}

impl Default for AlmOptions {
    fn default() -> Self {
        Self {
            sigma0: 1.0,
            c0: 6.0,
            sigma_max: 1e8,
            beta: 0.3,
            c: 1e-4,
            eps0: 1e-2,
            max_outer: 30,
            max_inner: 50,
            max_backtracks: 30,
            lambda_tol: 1e-7,
            gap_tol: 1e-8,
            consistency_tol: 1e-7,
            residual_floor: 1e-14,
            mu_from_lambda: false,
            record_multipliers: false,
        }
    }
}

impl AlmOptions {
    pub fn validate(&self) -> Result<()> {
        let ok = self.sigma0 > 0.0
            && self.c0 >= 1.0
            && self.sigma_max >= self.sigma0
            && self.beta > 0.0
            && self.beta < 1.0
            && self.c > 0.0
            && self.eps0 > 0.0
            && self.max_outer > 0
            && self.max_inner > 0;
        if ok {
            Ok(())
        } else {
            Err(Error::InvalidParameter(format!("invalid ALM options {self:?}")))
        }
    }

    pub fn epsilon(&self, k: usize) -> f64 {
        self.eps0 / ((k + 1) as f64).powi(2)
    }

    pub fn delta_prime(&self, k: usize) -> f64 {
        1.0 / (k + 1) as f64
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AlmState {
    pub y: DVector<f64>,
    pub z: DVector<f64>,
    pub lambda: DVector<f64>,
    pub sigma: f64,
    pub outer_iter: usize,
    pub inner_iters: usize,
}

impl AlmState {
    pub fn initial(m2: usize, n2: usize, sigma0: f64) -> Self {
        Self {
            y: DVector::zeros(m2),
            z: DVector::zeros(n2),
            lambda: DVector::zeros(n2),
            sigma: sigma0,
            outer_iter: 0,
            inner_iters: 0,
        }
    }
}

/// Argument `-λ - σV_bᵀy` of the resolvent in `F` and `M`.
fn resolvent_argument(vty: &DVector<f64>, lambda: &DVector<f64>, sigma: f64) -> DVector<f64> {
    -(lambda + vty * sigma)
}

/// `F(y) = y + u_b - V_b prox_{σp}(-λ - σV_bᵀy)`.
pub fn residual_f(
    vb: &DMatrix<f64>,
    u_b: &DVector<f64>,
    y: &DVector<f64>,
    lambda: &DVector<f64>,
    sigma: f64,
    reg: &RegParams,
) -> DVector<f64> {
    let w = resolvent_argument(&vb.tr_mul(y), lambda, sigma);
    y + u_b - vb * prox_p(&w, sigma, reg)
}

/// Components where the resolvent is locally linear with unit slope,
/// `|λ + σV_bᵀy|ᵢ > σα`. Ties count as inactive.
pub fn active_components(vb: &DMatrix<f64>, y: &DVector<f64>, lambda: &DVector<f64>, sigma: f64, reg: &RegParams) -> Vec<usize> {
    let v = lambda + vb.tr_mul(y) * sigma;
    let thr = sigma * reg.alpha;
    v.iter().enumerate().filter(|(_, x)| x.abs() > thr).map(|(i, _)| i).collect()
}

/// Newton derivative `I + σ/(1+σα₀) V_b X V_bᵀ`.
pub fn newton_matrix(vb: &DMatrix<f64>, y: &DVector<f64>, lambda: &DVector<f64>, sigma: f64, reg: &RegParams) -> DMatrix<f64> {
    let active = active_components(vb, y, lambda, sigma, reg);
    let kappa = sigma / (1.0 + sigma * reg.alpha0);
    let mut n = selected_gram(vb, &active) * kappa;
    for i in 0..n.nrows() {
        n[(i, i)] += 1.0;
    }
    n
}

/// Solves `N(y) d = -F(y)` by Cholesky; returns `(d, F(y))`.
pub fn newton_step(
    vb: &DMatrix<f64>,
    u_b: &DVector<f64>,
    y: &DVector<f64>,
    lambda: &DVector<f64>,
    sigma: f64,
    reg: &RegParams,
) -> Result<(DVector<f64>, DVector<f64>)> {
    let f = residual_f(vb, u_b, y, lambda, sigma, reg);
    let n = newton_matrix(vb, y, lambda, sigma, reg);
    let d = cholesky(n)?.solve(&(-&f));
    Ok((d, f))
}

/// `M(y) = (1/σ)[w - prox_{σp}(w)]` with `w = -σV_bᵀy - λ`, the minimizer of `L_σ` in `z`.
pub fn recover_z(vb: &DMatrix<f64>, y: &DVector<f64>, lambda: &DVector<f64>, sigma: f64, reg: &RegParams) -> DVector<f64> {
    let w = resolvent_argument(&vb.tr_mul(y), lambda, sigma);
    moreau_complement(&w, sigma, reg) / sigma
}

/// `φ(y) = L_σ(y, M(y); λ)`.
pub fn reduced_lagrangian(
    vb: &DMatrix<f64>,
    u_b: &DVector<f64>,
    y: &DVector<f64>,
    lambda: &DVector<f64>,
    sigma: f64,
    reg: &RegParams,
) -> f64 {
    let z = recover_z(vb, y, lambda, sigma, reg);
    augmented_lagrangian(vb, u_b, y, &z, lambda, sigma, reg)
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum LineSearch {
    /// First step `βᵗ` passing the sufficient decrease test.
    Accepted { step: f64, backtracks: u32 },
    Exhausted,
}

/// Armijo test `φ(y + βᵗd) ≤ φ(y) - cβᵗ‖d‖²` for `t = 0, 1, …, t_max`.
#[allow(clippy::too_many_arguments)]
pub fn armijo_search(
    vb: &DMatrix<f64>,
    u_b: &DVector<f64>,
    y: &DVector<f64>,
    d: &DVector<f64>,
    lambda: &DVector<f64>,
    sigma: f64,
    reg: &RegParams,
    beta: f64,
    c: f64,
    t_max: u32,
) -> LineSearch {
    let phi0 = reduced_lagrangian(vb, u_b, y, lambda, sigma, reg);
    let dd = d.norm_squared();
    let mut step = 1.0;
    for t in 0..=t_max {
        let trial = y + d * step;
        let phi = reduced_lagrangian(vb, u_b, &trial, lambda, sigma, reg);
        if phi <= phi0 - c * step * dd {
            return LineSearch::Accepted { step, backtracks: t };
        }
        step *= beta;
    }
    LineSearch::Exhausted
}

/// `λ ← λ + σ(V_bᵀy + z)`, then `σ ← min(c₀σ, σ_max)`.
pub fn update_multiplier(state: &mut AlmState, vb: &DMatrix<f64>, opts: &AlmOptions) {
    let r = vb.tr_mul(&state.y) + &state.z;
    state.lambda += r * state.sigma;
    state.sigma = (state.sigma * opts.c0).min(opts.sigma_max);
}

/// `μ = S_{α/α₀}(-V_bᵀy / α₀)`.
pub fn recover_mu(vb: &DMatrix<f64>, y: &DVector<f64>, reg: &RegParams) -> Result<DVector<f64>> {
    if reg.alpha0 <= 0.0 {
        return Err(Error::InvalidParameter("primal recovery from y needs alpha0 > 0".into()));
    }
    Ok(soft_threshold(&(vb.tr_mul(y) / -reg.alpha0), reg.alpha / reg.alpha0))
}

#[derive(Clone, Debug)]
pub struct AlmSolution {
    pub mu: RealifiedVector,
    pub state: AlmState,
    pub primal_objective: f64,
    pub gap: f64,
    pub diagnostics: Diagnostics,
    /// `λ⁰, λ¹, …` when requested in the options.
    pub multipliers: Vec<DVector<f64>>,
}

impl AlmSolution {
    pub fn converged(&self) -> bool {
        self.diagnostics.converged
    }
}

fn primal_candidate(vb: &DMatrix<f64>, state: &AlmState, reg: &RegParams, from_lambda: bool) -> Result<DVector<f64>> {
    if from_lambda || reg.alpha0 == 0.0 {
        Ok(-&state.lambda)
    } else {
        recover_mu(vb, &state.y, reg)
    }
}

pub fn solve_alm(vb: &RealifiedMatrix, u_b: &RealifiedVector, reg: &RegParams, opts: &AlmOptions) -> Result<AlmSolution> {
    solve_alm_dense(vb.as_dmatrix(), u_b.as_dvector(), reg, opts)
}

pub fn solve_alm_dense(vb: &DMatrix<f64>, u_b: &DVector<f64>, reg: &RegParams, opts: &AlmOptions) -> Result<AlmSolution> {
    reg.require_nondegenerate()?;
    opts.validate()?;
    if vb.nrows() != u_b.len() {
        return Err(Error::Dimension(format!("operator has {} rows, data has {} entries", vb.nrows(), u_b.len())));
    }
    let mut diag = Diagnostics::default();
    if reg.alpha0 == 0.0 && !opts.mu_from_lambda {
        diag.warn("alpha0 = 0: primal iterate taken as -lambda");
    }
    let mut state = AlmState::initial(vb.nrows(), vb.ncols(), opts.sigma0);
    let floor = opts.residual_floor * (1.0 + u_b.norm());
    let mut multipliers = Vec::new();
    if opts.record_multipliers {
        multipliers.push(state.lambda.clone());
    }
    let mut gap = f64::INFINITY;

    for k in 0..opts.max_outer {
        state.outer_iter = k;
        let sigma = state.sigma;
        let eps_k = opts.epsilon(k);
        let dprime = opts.delta_prime(k);
        let mut l = 0;
        let mut res_norm;
        loop {
            let (d, f) = newton_step(vb, u_b, &state.y, &state.lambda, sigma, reg)?;
            res_norm = f.norm();
            let z = recover_z(vb, &state.y, &state.lambda, sigma, reg);
            let feas = (vb.tr_mul(&state.y) + &z).norm();
            let crit_a = res_norm <= eps_k / sigma.sqrt();
            let crit_b2 = res_norm <= dprime * feas;
            if (crit_a && crit_b2) || res_norm <= floor || l >= opts.max_inner {
                if l >= opts.max_inner && !(crit_a && crit_b2) && res_norm > floor {
                    diag.warn(format!("outer {k}: inner loop hit cap {} with |F| = {res_norm:.3e}", opts.max_inner));
                }
                state.z = z;
                break;
            }
            let search = armijo_search(
                vb,
                u_b,
                &state.y,
                &d,
                &state.lambda,
                sigma,
                reg,
                opts.beta,
                opts.c,
                opts.max_backtracks,
            );
            let step = match search {
                LineSearch::Accepted { step, .. } => step,
                LineSearch::Exhausted => {
                    diag.warn(format!("outer {k}, inner {l}: line search exhausted at |F| = {res_norm:.3e}"));
                    opts.beta.powi(opts.max_backtracks as i32)
                }
            };
            state.y += d * step;
            l += 1;
            state.inner_iters += 1;
            let mut rec = IterationRecord::new("alm", RecordKind::Inner, k, l, res_norm);
            rec.step = Some(step);
            rec.sigma = Some(sigma);
            rec.objective = Some(reduced_lagrangian(vb, u_b, &state.y, &state.lambda, sigma, reg));
            diag.push(rec);
            if matches!(search, LineSearch::Exhausted) {
                // Rounding defeats the descent test; further steps cannot help.
                state.z = recover_z(vb, &state.y, &state.lambda, sigma, reg);
                res_norm = residual_f(vb, u_b, &state.y, &state.lambda, sigma, reg).norm();
                break;
            }
        }

        let lambda_old = state.lambda.clone();
        update_multiplier(&mut state, vb, opts);
        if opts.record_multipliers {
            multipliers.push(state.lambda.clone());
        }
        let dl = (&state.lambda - &lambda_old).norm() / lambda_old.norm().max(1.0);
        let mu = primal_candidate(vb, &state, reg, opts.mu_from_lambda)?;
        gap = duality_gap(vb, u_b, &mu, &state.y, reg);
        let mut rec = IterationRecord::new("alm", RecordKind::Outer, k, l, res_norm);
        rec.sigma = Some(sigma);
        rec.gap = Some(gap);
        rec.objective = Some(primal_objective(vb, u_b, &mu, reg));
        diag.push(rec);
        log::debug!("alm outer {k}: sigma={sigma:.1e} |F|={res_norm:.3e} dlambda={dl:.3e} gap={gap:.3e}");
        // A small gap alone does not pin μ down when α₀ is small: both primal
        // estimates, μ(y) and -λ, must also agree.
        let consistent = (&mu + &state.lambda).norm() <= opts.consistency_tol * state.lambda.norm().max(1.0);
        if dl <= opts.lambda_tol || (gap.abs() <= opts.gap_tol && consistent) {
            diag.converged = true;
            break;
        }
    }
    if !diag.converged {
        diag.warn(format!("no convergence within {} outer iterations (gap {gap:.3e})", opts.max_outer));
    }
    let mu = primal_candidate(vb, &state, reg, opts.mu_from_lambda)?;
    let primal = primal_objective(vb, u_b, &mu, reg);
    Ok(AlmSolution {
        mu: RealifiedVector::from_raw(mu)?,
        state,
        primal_objective: primal,
        gap,
        diagnostics: diag,
        multipliers,
    })
}
