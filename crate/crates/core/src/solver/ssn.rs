//! Primal-side semismooth Newton method with Moreau–Yosida regularization.
//!
//! With `B = V_bᵀV_b + α₀I` and `q = V_bᵀu_b`, the primal minimizer is
//! `μ = y + B⁻¹q` where `y` minimizes `½yᵀBy + ⟨q, y⟩` under `‖By‖∞ ≤ α`.
//! The box constraint is replaced by the penalty
//! `γ/2 (‖max(0, By - α)‖² + ‖min(0, By + α)‖²)` and `γ` is driven up along a
//! fixed schedule. Each Newton step is globalized by an Armijo search on the
//! penalized energy. `B` is formed and factored once per instance; the Newton
//! system is `2N × 2N` but by default is solved through its restriction to
//! the active set (see [`NewtonSolve`]).

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use serde::{Deserialize, Serialize};

use crate::diagnostics::{Diagnostics, IterationRecord, RecordKind};
use crate::error::{Error, Result};
use crate::linalg::cholesky;
use crate::objective::primal_objective;
use crate::prox::RegParams;
use crate::realfield::{RealifiedMatrix, RealifiedVector};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SsnOptions {
    /// Strictly increasing path parameters.
    pub gammas: Vec<f64>,
    /// Active-set iterations allowed per path parameter.
    pub max_inner: usize,
    pub newton_solve: NewtonSolve,
}

/// How the Newton system `(B + γB_AB_Aᵀ)μ = γB_A r` is solved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NewtonSolve {
    /// Through the identity `μ_A = (B_AA + I/γ)⁻¹r`, `μ = 0` off `A`.
    /// The full matrix has condition number near `γ‖B‖²/α₀` and loses
    /// about `1e-4` relative accuracy at `γ = 1e8`; this form does not.
    #[default]
    Reduced,
    /// Cholesky factorization of the full `2N × 2N` matrix.
    Full,
}

impl Default for SsnOptions {
    fn default() -> Self {
        Self { gammas: (0..=8).map(|i| 10f64.powi(i)).collect(), max_inner: 50, newton_solve: NewtonSolve::Reduced }
    }
}

/// `B = V_bᵀV_b + α₀I` together with its Cholesky factor.
pub struct BOperator {
    b: DMatrix<f64>,
    factor: Cholesky<f64, Dyn>,
}

impl BOperator {
    pub fn new(vb: &DMatrix<f64>, alpha0: f64) -> Result<Self> {
        let mut b = vb.tr_mul(vb);
        for i in 0..b.nrows() {
            b[(i, i)] += alpha0;
        }
        let factor = cholesky(b.clone()).map_err(|e| match e {
            Error::Factorization(msg) => Error::Factorization(format!("B is not positive definite (alpha0 = {alpha0}): {msg}")),
            other => other,
        })?;
        Ok(Self { b, factor })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.b
    }

    pub fn apply(&self, y: &DVector<f64>) -> DVector<f64> {
        &self.b * y
    }

    pub fn solve(&self, r: &DVector<f64>) -> DVector<f64> {
        self.factor.solve(r)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct ActiveSets {
    /// Indices with `(By)ᵢ ≥ α`.
    pub plus: Vec<usize>,
    /// Indices with `(By)ᵢ ≤ -α`.
    pub minus: Vec<usize>,
}

impl ActiveSets {
    pub fn union(&self) -> Vec<usize> {
        let mut all: Vec<usize> = self.plus.iter().chain(&self.minus).copied().collect();
        all.sort_unstable();
        all
    }

    pub fn len(&self) -> usize {
        self.plus.len() + self.minus.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

pub fn active_sets(by: &DVector<f64>, alpha: f64) -> ActiveSets {
    let mut sets = ActiveSets::default();
    for (i, v) in by.iter().enumerate() {
        if *v >= alpha {
            sets.plus.push(i);
        } else if *v <= -alpha {
            sets.minus.push(i);
        }
    }
    sets
}

#[derive(Clone, Debug, PartialEq)]
pub struct SsnState {
    pub y: DVector<f64>,
    /// `y + B⁻¹q`, carried directly rather than recovered from `y`.
    pub mu: DVector<f64>,
    pub gamma: f64,
    pub sets: ActiveSets,
}

/// `F(y) = By + q + γB max(0, By - α) + γB min(0, By + α)`.
pub fn ssn_residual(b: &BOperator, q: &DVector<f64>, y: &DVector<f64>, alpha: f64, gamma: f64) -> DVector<f64> {
    let by = b.apply(y);
    let viol = by.map(|v| violation(v, alpha));
    &by + q + b.apply(&viol) * gamma
}

fn violation(v: f64, alpha: f64) -> f64 {
    (v - alpha).max(0.0) + (v + alpha).min(0.0)
}

/// `E(y) = ½yᵀBy + ⟨q, y⟩ + γ/2 ‖viol(By)‖²`, whose gradient is [`ssn_residual`].
pub fn ssn_energy(b: &BOperator, q: &DVector<f64>, y: &DVector<f64>, alpha: f64, gamma: f64) -> f64 {
    let by = b.apply(y);
    let pen: f64 = by.iter().map(|v| violation(*v, alpha).powi(2)).sum();
    0.5 * y.dot(&by) + q.dot(y) + 0.5 * gamma * pen
}

/// Solves `(B + γBχB) y = -q + γαB(χ⁺ - χ⁻)1` for fixed active sets.
pub fn ssn_newton_solve(
    b: &BOperator,
    q: &DVector<f64>,
    sets: &ActiveSets,
    alpha: f64,
    gamma: f64,
    mode: NewtonSolve,
) -> Result<DVector<f64>> {
    Ok(newton_mu(b, q, sets, alpha, gamma, mode)? - b.solve(q))
}

// The iteration runs in μ = y + B⁻¹q. The Newton matrix is unchanged, the
// right-hand side becomes γB_A(q_A + α(χ⁺ - χ⁻)) and By = Bμ - q, which
// avoids cancelling two terms of size ‖B⁻¹q‖ once γ is large.
fn newton_mu(
    b: &BOperator,
    q: &DVector<f64>,
    sets: &ActiveSets,
    alpha: f64,
    gamma: f64,
    mode: NewtonSolve,
) -> Result<DVector<f64>> {
    if sets.is_empty() || gamma == 0.0 {
        return Ok(DVector::zeros(q.len()));
    }
    let bm = b.matrix();
    let active = sets.union();
    if mode == NewtonSolve::Reduced {
        let mut baa = bm.select_rows(&active).select_columns(&active);
        for i in 0..active.len() {
            baa[(i, i)] += 1.0 / gamma;
        }
        let r = DVector::from_iterator(
            active.len(),
            active.iter().map(|&i| if sets.plus.binary_search(&i).is_ok() { q[i] + alpha } else { q[i] - alpha }),
        );
        let mu_a = cholesky(baa)?.solve(&r);
        let mut mu = DVector::zeros(q.len());
        for (k, &i) in active.iter().enumerate() {
            mu[i] = mu_a[k];
        }
        return Ok(mu);
    }
    let cols = bm.select_columns(&active);
    let mut system = bm + (&cols * cols.transpose()) * gamma;
    // Restore exact symmetry lost to rounding in the rank update.
    system = (&system + system.transpose()) * 0.5;
    let mut rhs = DVector::zeros(q.len());
    for &i in &sets.plus {
        rhs.axpy(gamma * (q[i] + alpha), &bm.column(i), 1.0);
    }
    for &i in &sets.minus {
        rhs.axpy(gamma * (q[i] - alpha), &bm.column(i), 1.0);
    }
    Ok(cholesky(system)?.solve(&rhs))
}

/// `E` up to a constant, written in μ.
fn energy_mu(b: &BOperator, q: &DVector<f64>, mu: &DVector<f64>, alpha: f64, gamma: f64) -> f64 {
    let bmu = b.apply(mu);
    let pen: f64 = bmu.iter().zip(q.iter()).map(|(v, qi)| violation(v - qi, alpha).powi(2)).sum();
    0.5 * mu.dot(&bmu) + 0.5 * gamma * pen
}

/// Backtracking on `E` along `target - mu`; the full step is tried first.
fn armijo(b: &BOperator, q: &DVector<f64>, mu: &DVector<f64>, target: &DVector<f64>, alpha: f64, gamma: f64) -> f64 {
    let d = target - mu;
    let bmu = b.apply(mu);
    let viol = DVector::from_iterator(q.len(), bmu.iter().zip(q.iter()).map(|(v, qi)| violation(v - qi, alpha)));
    let grad = &bmu + b.apply(&viol) * gamma;
    let slope = grad.dot(&d);
    if slope >= 0.0 {
        return 1.0;
    }
    let e0 = energy_mu(b, q, mu, alpha, gamma);
    let mut t = 1.0;
    while t > 1e-12 {
        let trial = if t == 1.0 { target.clone() } else { mu + &d * t };
        if energy_mu(b, q, &trial, alpha, gamma) <= e0 + 1e-4 * t * slope {
            return t;
        }
        t *= 0.5;
    }
    t
}

/// Runs the active-set iteration for each `γ`, warm starting from the previous one.
///
/// Steps are damped by an Armijo search on `E` when the full Newton step
/// does not decrease it; the sets count as repeated only after a full step.
pub fn path_follow(
    b: &BOperator,
    q: &DVector<f64>,
    alpha: f64,
    opts: &SsnOptions,
    diag: &mut Diagnostics,
) -> Result<SsnState> {
    if opts.gammas.windows(2).any(|w| w[1] <= w[0]) || opts.gammas.iter().any(|g| !(*g > 0.0)) {
        return Err(Error::InvalidParameter("path parameters must be positive and strictly increasing".into()));
    }
    let shift = b.solve(q);
    // y = 0.
    let mut mu = shift.clone();
    let by = |mu: &DVector<f64>| b.apply(mu) - q;
    let mut sets = active_sets(&by(&mu), alpha);
    let mut gamma = 0.0;
    for (outer, &g) in opts.gammas.iter().enumerate() {
        gamma = g;
        let mut repeated = false;
        for inner in 0..opts.max_inner {
            let target = newton_mu(b, q, &sets, alpha, gamma, opts.newton_solve)?;
            let step = armijo(b, q, &mu, &target, alpha, gamma);
            mu = if step == 1.0 { target } else { &mu + (&target - &mu) * step };
            let next = active_sets(&by(&mu), alpha);
            repeated = step == 1.0 && next == sets;
            sets = next;
            let res = ssn_residual(b, q, &(&mu - &shift), alpha, gamma).norm();
            let mut rec = IterationRecord::new("ssn", RecordKind::Inner, outer, inner + 1, res);
            rec.sigma = Some(gamma);
            rec.step = Some(step);
            diag.push(rec);
            if repeated {
                break;
            }
        }
        if !repeated {
            diag.warn(format!("gamma = {gamma:.1e}: active sets still changing after {} iterations", opts.max_inner));
        }
        let violation = by(&mu).iter().map(|v| (v.abs() - alpha).max(0.0)).fold(0.0, f64::max);
        let mut rec = IterationRecord::new("ssn", RecordKind::Outer, outer, sets.len(), violation);
        rec.sigma = Some(gamma);
        diag.push(rec);
    }
    Ok(SsnState { y: &mu - &shift, mu, gamma, sets })
}

/// `μ = y + B⁻¹q`.
pub fn ssn_recover_mu(b: &BOperator, q: &DVector<f64>, y: &DVector<f64>) -> DVector<f64> {
    y + b.solve(q)
}

#[derive(Clone, Debug)]
pub struct SsnSolution {
    pub mu: RealifiedVector,
    pub state: SsnState,
    pub primal_objective: f64,
    pub diagnostics: Diagnostics,
}

pub fn solve_ssn(vb: &RealifiedMatrix, u_b: &RealifiedVector, reg: &RegParams, opts: &SsnOptions) -> Result<SsnSolution> {
    solve_ssn_dense(vb.as_dmatrix(), u_b.as_dvector(), reg, opts)
}

pub fn solve_ssn_dense(vb: &DMatrix<f64>, u_b: &DVector<f64>, reg: &RegParams, opts: &SsnOptions) -> Result<SsnSolution> {
    reg.validate()?;
    if vb.nrows() != u_b.len() {
        return Err(Error::Dimension(format!("operator has {} rows, data has {} entries", vb.nrows(), u_b.len())));
    }
    let b = BOperator::new(vb, reg.alpha0)?;
    let q = vb.tr_mul(u_b);
    let mut diag = Diagnostics::default();
    let state = path_follow(&b, &q, reg.alpha, opts, &mut diag)?;
    let mu = state.mu.clone();
    diag.converged = !diag.warnings.iter().any(|w| w.contains("still changing"));
    let primal = primal_objective(vb, u_b, &mu, reg);
    Ok(SsnSolution { mu: RealifiedVector::from_raw(mu)?, state, primal_objective: primal, diagnostics: diag })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solver::alm::{solve_alm_dense, AlmOptions};
    use crate::solver::test_support::random_instance;

    #[test]
    fn active_set_boundaries() {
        let sets = active_sets(&DVector::zeros(5), 0.1);
        assert!(sets.is_empty());
        let sets = active_sets(&DVector::from_vec(vec![0.5]), 0.5);
        assert_eq!(sets.plus, vec![0]);
        let by = DVector::from_vec(vec![0.3, -0.3, 0.29, -0.31, 1.0]);
        let sets = active_sets(&by, 0.3);
        assert_eq!(sets.plus, vec![0, 4]);
        assert_eq!(sets.minus, vec![1, 3]);
        assert_eq!(sets.union(), vec![0, 1, 3, 4]);
    }

    #[test]
    fn unconstrained_solution_without_active_sets() {
        let (vb, u) = random_instance(3, 6, 4);
        let b = BOperator::new(&vb, 0.01).unwrap();
        let q = vb.tr_mul(&u);
        let y = ssn_newton_solve(&b, &q, &ActiveSets::default(), 0.1, 10.0, NewtonSolve::Full).unwrap();
        assert!((b.apply(&y) + &q).amax() < 1e-10);
        assert!(ssn_recover_mu(&b, &q, &y).amax() < 1e-10);
    }

    #[test]
    fn fixed_point_has_zero_residual() {
        let (vb, u) = random_instance(4, 12, 17);
        let b = BOperator::new(&vb, 0.01).unwrap();
        let q = vb.tr_mul(&u);
        let mut diag = Diagnostics::default();
        let opts = SsnOptions { gammas: vec![1.0, 10.0, 100.0], ..SsnOptions::default() };
        let st = path_follow(&b, &q, 0.05, &opts, &mut diag).unwrap();
        let res = ssn_residual(&b, &q, &st.y, 0.05, st.gamma);
        assert!(res.norm() <= 1e-9 * (1.0 + q.norm()), "{}", res.norm());
    }

    #[test]
    fn zero_data_stays_at_zero() {
        let (vb, _) = random_instance(3, 8, 1);
        let u = DVector::zeros(6);
        let sol = solve_ssn_dense(&vb, &u, &RegParams::new(0.1, 0.01).unwrap(), &SsnOptions::default()).unwrap();
        assert_eq!(sol.mu.norm(), 0.0);
        assert_eq!(sol.state.y.norm(), 0.0);
    }

    #[test]
    fn rejects_singular_b() {
        let (vb, _) = random_instance(2, 8, 1);
        assert!(matches!(BOperator::new(&vb, 0.0), Err(Error::Factorization(_))));
    }

    #[test]
    fn reduced_and_full_newton_steps_agree() {
        let (vb, u) = random_instance(4, 12, 8);
        let b = BOperator::new(&vb, 0.05).unwrap();
        let q = vb.tr_mul(&u);
        let by = b.apply(&ssn_newton_solve(&b, &q, &ActiveSets::default(), 0.02, 1.0, NewtonSolve::Full).unwrap());
        let sets = active_sets(&by, 0.02);
        assert!(!sets.is_empty());
        for gamma in [1.0, 100.0] {
            let full = ssn_newton_solve(&b, &q, &sets, 0.02, gamma, NewtonSolve::Full).unwrap();
            let reduced = ssn_newton_solve(&b, &q, &sets, 0.02, gamma, NewtonSolve::Reduced).unwrap();
            assert!((&full - &reduced).norm() <= 1e-9 * full.norm(), "gamma {gamma}");
        }
    }

    #[test]
    fn small_alpha0_matches_alm_closely() {
        let (vb, u) = random_instance(5, 20, 71);
        let reg = RegParams::new(0.01, 1e-4).unwrap();
        let sol = solve_ssn_dense(&vb, &u, &reg, &SsnOptions::default()).unwrap();
        assert!(sol.diagnostics.converged);
        let alm = solve_alm_dense(&vb, &u, &reg, &AlmOptions::default()).unwrap();
        assert!((sol.primal_objective - alm.primal_objective).abs() <= 1e-9 * alm.primal_objective);
    }

    #[test]
    fn violation_shrinks_and_matches_alm() {
        let (vb, u) = random_instance(4, 12, 33);
        let reg = RegParams::new(0.05, 0.01).unwrap();
        let sol = solve_ssn_dense(&vb, &u, &reg, &SsnOptions::default()).unwrap();
        let viol: Vec<f64> = sol.diagnostics.outer_records().map(|r| r.residual).collect();
        for w in viol.windows(2) {
            assert!(w[1] <= w[0] * (1.0 + 1e-9) + 1e-15);
        }
        assert!(*viol.last().unwrap() <= reg.alpha * 1e-4);
        let alm = solve_alm_dense(&vb, &u, &reg, &AlmOptions::default()).unwrap();
        let d = (sol.mu.as_dvector() - alm.mu.as_dvector()).norm() / alm.mu.norm();
        assert!(d <= 1e-4, "relative difference {d}");
        assert!((sol.primal_objective - alm.primal_objective).abs() <= 1e-4 * alm.primal_objective);
    }
}
