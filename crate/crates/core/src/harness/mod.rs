//! End-to-end experiments: synthetic data on a fine grid, noise, operator
//! assembly and reconstruction on a coarser grid, metrics and export.

pub mod metrics;

use std::collections::HashMap;
use std::fs;
use std::io::BufWriter;
use std::path::{Path, PathBuf};
use std::sync::{Arc, Mutex};
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::Diagnostics;
use crate::error::{Error, Phase, Result};
use crate::export::{write_field_csv, write_field_pgm};
use crate::forward::cache::{load_if_matching, write_operator, CacheHeader};
use crate::forward::{ForwardModel, Grid, ReceiverSet, ASSEMBLY_TOL, DATA_TOL};
use crate::phantoms::{make_medium, make_phantom, PhantomSpec};
use crate::prox::RegParams;
use crate::realfield::{RealifiedMatrix, RealifiedVector};
use crate::solver::{solve_alm, solve_pda, solve_ssn, AlmOptions, PdaOptions, SsnOptions};

pub use metrics::{add_noise, n_error, restrict, restrict_realified, RNG_NAME};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "lowercase", deny_unknown_fields)]
pub enum SolverConfig {
    Alm {
        alpha: f64,
        alpha0: f64,
        #[serde(default)]
        options: AlmOptions,
    },
    Ssn {
        alpha: f64,
        alpha0: f64,
        #[serde(default)]
        options: SsnOptions,
    },
    Pda {
        alpha: f64,
        alpha0: f64,
        #[serde(default)]
        options: PdaOptions,
    },
}

impl SolverConfig {
    pub fn label(&self) -> &'static str {
        match self {
            Self::Alm { .. } => "ALM",
            Self::Ssn { .. } => "SSN",
            Self::Pda { .. } => "PDA",
        }
    }

    pub fn reg(&self) -> Result<RegParams> {
        let (Self::Alm { alpha, alpha0, .. } | Self::Ssn { alpha, alpha0, .. } | Self::Pda { alpha, alpha0, .. }) = self;
        RegParams::new(*alpha, *alpha0)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: Option<String>,
    pub dim: usize,
    pub k: f64,
    /// The domain is the cube `[-half_width, half_width]^dim`.
    pub half_width: f64,
    /// Cells per axis of the data grid.
    pub fine_n: usize,
    /// Cells per axis of the reconstruction grid.
    pub coarse_n: usize,
    /// Receiver count; defaults to `4 · coarse_n` in 2D.
    pub receivers: Option<usize>,
    pub inhomogeneous: bool,
    pub phantom: PhantomSpec,
    /// Relative noise level `δ`.
    pub noise: f64,
    pub seed: u64,
    pub solver: SolverConfig,
    /// Where artifacts go; nothing is written when absent.
    pub output_dir: Option<PathBuf>,
    /// Reuse `vb.cache` in the output directory when its header matches.
    pub cache: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            name: None,
            dim: 2,
            k: 6.0,
            half_width: 3.0,
            fine_n: 96,
            coarse_n: 64,
            receivers: None,
            inhomogeneous: false,
            phantom: PhantomSpec::peaks(1),
            noise: 0.01,
            seed: 0,
            solver: SolverConfig::Alm { alpha: 9e-4, alpha0: 1e-7, options: AlmOptions::default() },
            output_dir: None,
            cache: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?).map_err(|e| e.in_phase(Phase::Config))
    }

    pub fn validate(&self) -> Result<()> {
        if self.fine_n == self.coarse_n {
            return Err(Error::InvalidParameter(format!(
                "data and reconstruction grids both have {} cells per axis; use different discretizations",
                self.fine_n
            )));
        }
        if !(self.noise >= 0.0 && self.noise.is_finite()) {
            return Err(Error::InvalidParameter(format!("noise level must be nonnegative, got {}", self.noise)));
        }
        self.solver.reg()?;
        self.fine_grid()?;
        self.coarse_grid()?;
        Ok(())
    }

    pub fn fine_grid(&self) -> Result<Grid> {
        Grid::new(self.dim, self.fine_n, self.half_width)
    }

    pub fn coarse_grid(&self) -> Result<Grid> {
        Grid::new(self.dim, self.coarse_n, self.half_width)
    }

    pub fn receiver_set(&self) -> Result<ReceiverSet> {
        let grid = self.coarse_grid()?;
        match self.receivers {
            Some(m) => ReceiverSet::uniform(&grid, m),
            None => ReceiverSet::boundary_default(&grid),
        }
    }

    pub fn medium_label(&self) -> &'static str {
        if self.inhomogeneous {
            "inhomogeneous"
        } else {
            "homogeneous"
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct PhaseTimes {
    pub synthesis: f64,
    pub noise: f64,
    pub assembly: f64,
    pub solve: f64,
    pub metrics: f64,
    pub export: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentResult {
    pub name: Option<String>,
    pub method: String,
    pub source: String,
    pub medium: String,
    pub n_error: f64,
    pub times: PhaseTimes,
    /// Newton steps (ALM, SSN) or iterations (PDA).
    pub iterations: usize,
    pub converged: bool,
    pub primal_objective: f64,
    /// `‖μ + λ‖` for ALM.
    pub mu_lambda_residual: Option<f64>,
    pub operator_from_cache: bool,
    pub seed: u64,
    pub rng: String,
    pub output_dir: Option<PathBuf>,
}

/// Everything an experiment produces in memory.
#[derive(Clone, Debug)]
pub struct ExperimentRun {
    pub result: ExperimentResult,
    pub mu_rec: RealifiedVector,
    pub mu_exact: RealifiedVector,
    pub diagnostics: Diagnostics,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
struct OperatorKey {
    dim: u32,
    n: u32,
    receivers: u32,
    k_bits: u64,
    q_hash: u64,
}

impl From<&CacheHeader> for OperatorKey {
    fn from(h: &CacheHeader) -> Self {
        Self { dim: h.dim, n: h.n_per_axis, receivers: h.receivers, k_bits: h.k.to_bits(), q_hash: h.q_hash }
    }
}

/// In-memory operator store shared by the experiments of a suite.
#[derive(Default)]
pub struct OperatorStore {
    memory: Mutex<HashMap<OperatorKey, Arc<RealifiedMatrix>>>,
}

impl OperatorStore {
    fn get(&self, header: &CacheHeader) -> Option<Arc<RealifiedMatrix>> {
        self.memory.lock().ok()?.get(&OperatorKey::from(header)).cloned()
    }

    fn put(&self, header: &CacheHeader, op: Arc<RealifiedMatrix>) {
        if let Ok(mut m) = self.memory.lock() {
            m.insert(OperatorKey::from(header), op);
        }
    }
}

fn phase<T>(p: Phase, r: Result<T>) -> Result<T> {
    r.map_err(|e| e.in_phase(p))
}

/// Assembles the reconstruction-grid operator, or loads it from memory or `vb.cache`.
///
/// Returns the operator and whether it came from a cache.
pub fn obtain_operator(cfg: &ExperimentConfig, store: &OperatorStore) -> Result<(Arc<RealifiedMatrix>, bool)> {
    let grid = cfg.coarse_grid()?;
    let medium = make_medium(&grid, cfg.k, cfg.inhomogeneous)?;
    let receivers = cfg.receiver_set()?;
    let header = CacheHeader::describe(&grid, &medium, &receivers);
    if let Some(op) = store.get(&header) {
        return Ok((op, true));
    }
    let disk = cfg.output_dir.as_ref().filter(|_| cfg.cache).map(|d| d.join("vb.cache"));
    if let Some(path) = &disk {
        match load_if_matching(path, &header) {
            Ok(Some(op)) => {
                let op = Arc::new(op);
                store.put(&header, op.clone());
                return Ok((op, true));
            }
            Ok(None) => {}
            Err(e) => log::warn!("ignoring unreadable cache {}: {e}", path.display()),
        }
    }
    let model = ForwardModel::new(&grid, &medium)?;
    let op = Arc::new(model.assemble_vb(&receivers, ASSEMBLY_TOL)?);
    if let Some(path) = &disk {
        fs::create_dir_all(path.parent().unwrap_or(Path::new(".")))?;
        write_operator(path, &header, &op)?;
    }
    store.put(&header, op.clone());
    Ok((op, false))
}

/// Noise-free boundary data of the configured phantom, computed on the data grid.
pub fn synthesize_data(cfg: &ExperimentConfig) -> Result<(RealifiedVector, RealifiedVector)> {
    let fine = cfg.fine_grid()?;
    let medium = make_medium(&fine, cfg.k, cfg.inhomogeneous)?;
    let mu = make_phantom(&cfg.phantom, &fine)?;
    let receivers = cfg.receiver_set()?;
    let model = ForwardModel::new(&fine, &medium)?;
    let u = model.source_to_measurement(&receivers, &mu, DATA_TOL)?;
    Ok((mu, u))
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentRun> {
    run_experiment_in(cfg, &OperatorStore::default())
}

pub fn run_experiment_in(cfg: &ExperimentConfig, store: &OperatorStore) -> Result<ExperimentRun> {
    phase(Phase::Config, cfg.validate())?;
    let mut times = PhaseTimes::default();

    let t = Instant::now();
    let (mu_fine, u_clean) = phase(Phase::Synthesis, synthesize_data(cfg))?;
    times.synthesis = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let u = phase(Phase::Noise, add_noise(&u_clean, cfg.noise, cfg.seed))?;
    times.noise = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let (vb, from_cache) = phase(Phase::Assembly, obtain_operator(cfg, store))?;
    times.assembly = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let reg = cfg.solver.reg()?;
    let solved = phase(Phase::Solve, solve(&cfg.solver, &vb, &u, &reg))?;
    times.solve = t.elapsed().as_secs_f64();

    let t = Instant::now();
    let (fine, coarse) = (cfg.fine_grid()?, cfg.coarse_grid()?);
    let mu_exact = phase(Phase::Metrics, restrict_realified(&mu_fine, &fine, &coarse))?;
    let err = phase(Phase::Metrics, n_error(&solved.mu, &mu_exact))?;
    times.metrics = t.elapsed().as_secs_f64();

    let mut run = ExperimentRun {
        result: ExperimentResult {
            name: cfg.name.clone(),
            method: cfg.solver.label().to_string(),
            source: cfg.phantom.label(),
            medium: cfg.medium_label().to_string(),
            n_error: err,
            times,
            iterations: solved.iterations,
            converged: solved.diagnostics.converged,
            primal_objective: solved.primal_objective,
            mu_lambda_residual: solved.mu_lambda_residual,
            operator_from_cache: from_cache,
            seed: cfg.seed,
            rng: RNG_NAME.to_string(),
            output_dir: cfg.output_dir.clone(),
        },
        mu_rec: solved.mu,
        mu_exact,
        diagnostics: solved.diagnostics,
    };
    if let Some(dir) = &cfg.output_dir {
        let t = Instant::now();
        phase(Phase::Export, export_run(dir, &coarse, &run))?;
        run.result.times.export = t.elapsed().as_secs_f64();
    }
    Ok(run)
}

struct Solved {
    mu: RealifiedVector,
    iterations: usize,
    primal_objective: f64,
    mu_lambda_residual: Option<f64>,
    diagnostics: Diagnostics,
}

fn solve(cfg: &SolverConfig, vb: &RealifiedMatrix, u: &RealifiedVector, reg: &RegParams) -> Result<Solved> {
    Ok(match cfg {
        SolverConfig::Alm { options, .. } => {
            let s = solve_alm(vb, u, reg, options)?;
            let residual = (s.mu.as_dvector() + &s.state.lambda).norm();
            Solved {
                iterations: s.state.inner_iters,
                primal_objective: s.primal_objective,
                mu_lambda_residual: Some(residual),
                diagnostics: s.diagnostics,
                mu: s.mu,
            }
        }
        SolverConfig::Ssn { options, .. } => {
            let s = solve_ssn(vb, u, reg, options)?;
            Solved {
                iterations: s.diagnostics.inner_count(),
                primal_objective: s.primal_objective,
                mu_lambda_residual: None,
                diagnostics: s.diagnostics,
                mu: s.mu,
            }
        }
        SolverConfig::Pda { options, .. } => {
            let s = solve_pda(vb, u, reg, options)?;
            Solved {
                iterations: s.iterations,
                primal_objective: s.primal_objective,
                mu_lambda_residual: None,
                diagnostics: s.diagnostics,
                mu: s.mu,
            }
        }
    })
}

/// Writes `results.csv`, `result.json`, `diagnostics.jsonl`, `mu_rec.csv`,
/// `mu_rec.pgm` and `mu_exact.csv` into `dir`. Fields are written as their
/// real parts on the reconstruction grid.
pub fn export_run(dir: &Path, grid: &Grid, run: &ExperimentRun) -> Result<()> {
    fs::create_dir_all(dir)?;
    write_results_csv(&dir.join("results.csv"), std::slice::from_ref(&TableRow::from(&run.result)))?;
    serde_json::to_writer_pretty(BufWriter::new(fs::File::create(dir.join("result.json"))?), &run.result)?;
    run.diagnostics.write_jsonl(&mut BufWriter::new(fs::File::create(dir.join("diagnostics.jsonl"))?))?;
    write_field_csv(&dir.join("mu_rec.csv"), grid, run.mu_rec.re())?;
    write_field_pgm(&dir.join("mu_rec.pgm"), grid, run.mu_rec.re())?;
    write_field_csv(&dir.join("mu_exact.csv"), grid, run.mu_exact.re())?;
    Ok(())
}

/// One line of the results table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TableRow {
    #[serde(rename = "Method")]
    pub method: String,
    #[serde(rename = "Source")]
    pub source: String,
    #[serde(rename = "Medium")]
    pub medium: String,
    #[serde(rename = "Time(s)")]
    pub time_s: f64,
    #[serde(rename = "N-Error")]
    pub n_error: f64,
}

impl From<&ExperimentResult> for TableRow {
    fn from(r: &ExperimentResult) -> Self {
        Self {
            method: r.method.clone(),
            source: r.source.clone(),
            medium: r.medium.clone(),
            time_s: r.times.solve,
            n_error: r.n_error,
        }
    }
}

pub const TABLE_HEADER: [&str; 5] = ["Method", "Source", "Medium", "Time(s)", "N-Error"];

pub fn write_results_csv(path: &Path, rows: &[TableRow]) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_path(path)?;
    w.write_record(TABLE_HEADER)?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_results_csv(path: &Path) -> Result<Vec<TableRow>> {
    let mut r = csv::Reader::from_path(path)?;
    let rows = r.deserialize().collect::<std::result::Result<Vec<TableRow>, _>>()?;
    Ok(rows)
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteConfig {
    pub experiments: Vec<ExperimentConfig>,
    /// Directory for the suite's `results.csv`.
    pub output_dir: Option<PathBuf>,
    /// Run experiments concurrently.
    pub parallel: bool,
}

impl SuiteConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path)?;
        serde_json::from_str(&text).map_err(|e| Error::from(e).in_phase(Phase::Config))
    }
}

#[derive(Debug)]
pub struct SuiteOutcome {
    /// One row per experiment, in config order; failed runs carry NaN numbers.
    pub rows: Vec<TableRow>,
    pub results: Vec<Result<ExperimentResult>>,
}

pub fn run_suite(suite: &SuiteConfig) -> Result<SuiteOutcome> {
    let store = OperatorStore::default();
    let run_one = |cfg: &ExperimentConfig| run_experiment_in(cfg, &store).map(|r| r.result);
    let results: Vec<Result<ExperimentResult>> = if suite.parallel {
        suite.experiments.par_iter().map(run_one).collect()
    } else {
        suite.experiments.iter().map(run_one).collect()
    };
    let rows = suite
        .experiments
        .iter()
        .zip(&results)
        .map(|(cfg, r)| match r {
            Ok(res) => TableRow::from(res),
            Err(e) => {
                log::error!("experiment {:?} failed: {e}", cfg.name);
                TableRow {
                    method: cfg.solver.label().to_string(),
                    source: cfg.phantom.label(),
                    medium: cfg.medium_label().to_string(),
                    time_s: f64::NAN,
                    n_error: f64::NAN,
                }
            }
        })
        .collect();
    let outcome = SuiteOutcome { rows, results };
    if let Some(dir) = &suite.output_dir {
        fs::create_dir_all(dir)?;
        write_results_csv(&dir.join("results.csv"), &outcome.rows).map_err(|e| e.in_phase(Phase::Export))?;
    }
    Ok(outcome)
}
