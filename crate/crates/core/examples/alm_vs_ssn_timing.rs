//! Wall time of the dual ALM against the primal SSN as the reconstruction
//! grid grows with the receiver count held fixed. ALM works with systems of
//! size 2M, SSN forms and factors the 2N × 2N matrix B.
//!
//! cargo run --release --example alm_vs_ssn_timing

use sparse_source::harness::{run_experiment, ExperimentConfig, SolverConfig};
use sparse_source::phantoms::PhantomSpec;
use sparse_source::solver::{AlmOptions, SsnOptions};

fn main() -> sparse_source::Result<()> {
    let receivers = 16;
    println!("{:>5} {:>7} {:>7} {:>10} {:>10} {:>7} {:>9} {:>9}", "grid", "2N", "2N/2M", "ALM(s)", "SSN(s)", "ratio", "err ALM", "err SSN");
    for (fine_n, coarse_n) in [(24, 16), (36, 24), (48, 32)] {
        let cfg = |solver| ExperimentConfig {
            fine_n,
            coarse_n,
            receivers: Some(receivers),
            phantom: PhantomSpec::dirac_peaks(1, 12.0),
            solver,
            ..ExperimentConfig::default()
        };
        let alm = run_experiment(&cfg(SolverConfig::Alm { alpha: 9e-4, alpha0: 1e-7, options: AlmOptions::default() }))?;
        let ssn = run_experiment(&cfg(SolverConfig::Ssn { alpha: 9e-4, alpha0: 1e-7, options: SsnOptions::default() }))?;
        let n2 = 2 * coarse_n * coarse_n;
        let (ta, ts) = (alm.result.times.solve, ssn.result.times.solve);
        println!(
            "{:>5} {:>7} {:>7} {:>10.4} {:>10.4} {:>7.1} {:>9.4} {:>9.4}",
            format!("{coarse_n}²"),
            n2,
            n2 / (2 * receivers),
            ta,
            ts,
            ts / ta,
            alm.result.n_error,
            ssn.result.n_error
        );
    }
    Ok(())
}
