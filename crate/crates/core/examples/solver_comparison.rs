//! ALM, SSN and PDA on the same random instance: objective, iterations,
//! wall time and distance between the recovered sources.
//!
//! cargo run --release --example solver_comparison [-- M N seed]

use std::time::Instant;

use sparse_source::prox::RegParams;
use sparse_source::solver::alm::solve_alm_dense;
use sparse_source::solver::pda::solve_pda_dense;
use sparse_source::solver::ssn::solve_ssn_dense;
use sparse_source::solver::{random_instance, AlmOptions, PdaOptions, SsnOptions};

fn main() -> sparse_source::Result<()> {
    let args: Vec<usize> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let (m, n, seed) = match args[..] {
        [m, n, seed] => (m, n, seed as u64),
        _ => (8, 64, 3),
    };
    let (vb, u) = random_instance(m, n, seed);
    let reg = RegParams::new(0.01, 1e-3)?;
    println!("M = {m}, N = {n} (realified {}x{}), alpha = {}, alpha0 = {}", vb.nrows(), vb.ncols(), reg.alpha, reg.alpha0);

    let t = Instant::now();
    let alm = solve_alm_dense(&vb, &u, &reg, &AlmOptions::default())?;
    let t_alm = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let ssn = solve_ssn_dense(&vb, &u, &reg, &SsnOptions::default())?;
    let t_ssn = t.elapsed().as_secs_f64();
    let t = Instant::now();
    let pda = solve_pda_dense(&vb, &u, &reg, &PdaOptions { iterations: 200_000, ..PdaOptions::default() })?;
    let t_pda = t.elapsed().as_secs_f64();

    println!("{:<4} {:>18} {:>10} {:>10} {:>9}", "", "P(mu)", "steps", "time(s)", "nnz");
    let nnz = |v: &nalgebra::DVector<f64>| v.iter().filter(|x| x.abs() > 1e-10).count();
    let alm_mu = alm.mu.as_dvector();
    println!(
        "{:<4} {:>18.12} {:>10} {:>10.4} {:>9}",
        "ALM",
        alm.primal_objective,
        format!("{}/{}", alm.state.outer_iter, alm.state.inner_iters),
        t_alm,
        nnz(alm_mu)
    );
    println!(
        "{:<4} {:>18.12} {:>10} {:>10.4} {:>9}",
        "SSN",
        ssn.primal_objective,
        ssn.diagnostics.inner_count(),
        t_ssn,
        nnz(ssn.mu.as_dvector())
    );
    println!("{:<4} {:>18.12} {:>10} {:>10.4} {:>9}", "PDA", pda.primal_objective, pda.iterations, t_pda, nnz(pda.mu.as_dvector()));
    let rel = |v: &nalgebra::DVector<f64>| (v - alm_mu).norm() / alm_mu.norm();
    println!("relative distance to ALM: SSN {:.2e}, PDA {:.2e}", rel(ssn.mu.as_dvector()), rel(pda.mu.as_dvector()));
    println!("ALM duality gap {:.2e}, |mu + lambda| = {:.2e}", alm.gap, (alm_mu + &alm.state.lambda).norm());
    Ok(())
}
