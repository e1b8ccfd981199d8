//! Runs a suite described by a JSON file and prints the results table.
//! Operators are shared between experiments with the same grid, medium and
//! receivers.
//!
//! cargo run --release --example config_suite [-- configs/table.json]

use std::path::PathBuf;

use sparse_source::harness::{run_suite, SuiteConfig};

fn main() -> sparse_source::Result<()> {
    let path = std::env::args()
        .nth(1)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("configs/table.json"));
    let suite = SuiteConfig::load(&path)?;
    let outcome = run_suite(&suite)?;
    println!("{:<16} {:<6} {:<8} {:<14} {:>9} {:>9} {:>7}", "name", "Method", "Source", "Medium", "Time(s)", "N-Error", "cached");
    for (cfg, res) in suite.experiments.iter().zip(&outcome.results) {
        let name = cfg.name.clone().unwrap_or_default();
        match res {
            Ok(r) => println!(
                "{:<16} {:<6} {:<8} {:<14} {:>9.3} {:>9.4} {:>7}",
                name, r.method, r.source, r.medium, r.times.solve, r.n_error, r.operator_from_cache
            ),
            Err(e) => println!("{name:<16} failed: {e}"),
        }
    }
    if let Some(dir) = &suite.output_dir {
        println!("table written to {}", dir.join("results.csv").display());
    }
    Ok(())
}
