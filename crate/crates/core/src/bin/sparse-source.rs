use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use sparse_source::export::{write_field_csv, write_field_pgm};
use sparse_source::forward::Grid;
use sparse_source::harness::{obtain_operator, run_experiment, run_suite, ExperimentConfig, OperatorStore, SuiteConfig};
use sparse_source::phantoms::{make_phantom, PhantomSpec};
use sparse_source::{Error, Result};

#[derive(Parser)]
#[command(version, about = "Sparse acoustic source reconstruction from boundary data")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one experiment.
    Reconstruct {
        #[arg(long)]
        config: PathBuf,
    },
    /// Run a list of experiments and write a results table.
    Suite {
        #[arg(long)]
        config: PathBuf,
    },
    /// Assemble the reconstruction operator into `<output_dir>/vb.cache`.
    Assemble {
        #[arg(long)]
        config: PathBuf,
    },
    /// Render a phantom to `<out>.csv` and `<out>.pgm`.
    Phantom {
        /// Phantom JSON, inline or as a file path.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        out: PathBuf,
        #[arg(long, default_value_t = 2)]
        dim: usize,
        #[arg(long, default_value_t = 96)]
        n: usize,
        #[arg(long, default_value_t = 3.0)]
        half_width: f64,
    },
}

fn read_spec(arg: &str) -> Result<PhantomSpec> {
    let text = if Path::new(arg).is_file() { fs::read_to_string(arg)? } else { arg.to_string() };
    Ok(serde_json::from_str(&text)?)
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Reconstruct { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let run = run_experiment(&cfg)?;
            println!("{}", serde_json::to_string_pretty(&run.result)?);
        }
        Command::Suite { config } => {
            let suite = SuiteConfig::load(&config)?;
            let outcome = run_suite(&suite)?;
            let mut w = csv::Writer::from_writer(std::io::stdout());
            for row in &outcome.rows {
                w.serialize(row)?;
            }
            w.flush()?;
            if outcome.results.iter().any(|r| r.is_err()) {
                return Err(Error::InvalidParameter("some experiments failed; see the log".into()));
            }
        }
        Command::Assemble { config } => {
            let cfg = ExperimentConfig::load(&config)?;
            let Some(dir) = &cfg.output_dir else {
                return Err(Error::InvalidParameter("assemble needs output_dir in the config".into()));
            };
            let cfg = ExperimentConfig { cache: true, ..cfg.clone() };
            let (op, cached) = obtain_operator(&cfg, &OperatorStore::default())?;
            println!(
                "{} {}x{} operator at {}",
                if cached { "reused" } else { "assembled" },
                op.as_dmatrix().nrows(),
                op.as_dmatrix().ncols(),
                dir.join("vb.cache").display()
            );
        }
        Command::Phantom { spec, out, dim, n, half_width } => {
            let grid = Grid::new(dim, n, half_width)?;
            let mu = make_phantom(&read_spec(&spec)?, &grid)?;
            if let Some(parent) = out.parent().filter(|p| !p.as_os_str().is_empty()) {
                fs::create_dir_all(parent)?;
            }
            write_field_csv(&out.with_extension("csv"), &grid, mu.re())?;
            for f in write_field_pgm(&out.with_extension("pgm"), &grid, mu.re())? {
                println!("{}", f.display());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
