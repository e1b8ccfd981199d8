//! Outer-iteration trace of the ALM: penalty, Newton steps, residual, duality
//! gap and the contraction of the multiplier towards its final value.
//!
//! cargo run --release --example alm_convergence

use sparse_source::diagnostics::RecordKind;
use sparse_source::prox::RegParams;
use sparse_source::solver::alm::solve_alm_dense;
use sparse_source::solver::{random_instance, AlmOptions};

fn main() -> sparse_source::Result<()> {
    let (vb, u) = random_instance(6, 24, 11);
    let reg = RegParams::new(5e-3, 1e-3)?;
    let sol = solve_alm_dense(&vb, &u, &reg, &AlmOptions { record_multipliers: true, ..AlmOptions::default() })?;

    let last = sol.multipliers.last().expect("multipliers recorded");
    let dist: Vec<f64> = sol.multipliers.iter().map(|l| (l - last).norm()).collect();
    println!("{:>3} {:>9} {:>6} {:>11} {:>11} {:>12} {:>7}", "k", "sigma", "inner", "|F|", "gap", "|lam-lam*|", "ratio");
    let mut inner = 0;
    let mut outer = 0;
    for rec in &sol.diagnostics.records {
        if rec.kind == RecordKind::Inner {
            inner += 1;
            continue;
        }
        outer += 1;
        let ratio = if outer < dist.len() && dist[outer - 1] > 0.0 && outer + 1 < dist.len() {
            format!("{:.3}", dist[outer] / dist[outer - 1])
        } else {
            "-".into()
        };
        println!(
            "{:>3} {:>9.1e} {:>6} {:>11.3e} {:>11.3e} {:>12.3e} {:>7}",
            outer,
            rec.sigma.unwrap_or(f64::NAN),
            inner,
            rec.residual,
            rec.gap.unwrap_or(f64::NAN),
            dist.get(outer).copied().unwrap_or(f64::NAN),
            ratio
        );
        inner = 0;
    }
    println!("converged: {}, P(mu) = {:.12}", sol.converged(), sol.primal_objective);
    for w in &sol.diagnostics.warnings {
        println!("warning: {w}");
    }
    Ok(())
}
