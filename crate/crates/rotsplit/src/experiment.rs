//! Convergence sweeps: reference solution, one integration per
//! `(method, n_steps)` pair, CSV rows.

use std::io::Write;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use crate::config::ExperimentConfig;
use crate::error::Result;
use crate::grid::Grid;
use crate::schemes::{integrate, Diagnostics, Method, Problem};
use crate::snapshot::Snapshot;
use crate::wave::WaveFunction;

pub const CSV_HEADER: [&str; 8] = [
    "method",
    "n_steps",
    "h",
    "l2_error",
    "final_norm",
    "fft_count",
    "wall_time_ms",
    "note",
];

/// One row of the convergence table. A failed run has `NaN` error and norm
/// and the failure in `note`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRecord {
    pub method: Method,
    pub n_steps: usize,
    pub h: f64,
    pub l2_error: f64,
    pub final_norm: f64,
    pub fft_count: u64,
    pub wall_time_ms: f64,
    pub note: String,
}

impl ConvergenceRecord {
    pub fn failed(&self) -> bool {
        self.l2_error.is_nan()
    }

    fn fields(&self) -> [String; 8] {
        [
            self.method.id().to_string(),
            self.n_steps.to_string(),
            format!("{:e}", self.h),
            format!("{:e}", self.l2_error),
            format!("{:.17e}", self.final_norm),
            self.fft_count.to_string(),
            format!("{:.3}", self.wall_time_ms),
            self.note.clone(),
        ]
    }
}

pub fn write_csv(records: &[ConvergenceRecord], out: impl Write) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CSV_HEADER)?;
    for r in records {
        w.write_record(r.fields())?;
    }
    w.flush()?;
    Ok(())
}

/// Grid, problem and initial state shared by all runs of an experiment.
#[derive(Clone)]
pub struct Setup {
    pub grid: Arc<Grid>,
    pub problem: Problem,
    pub psi0: WaveFunction,
}

impl Setup {
    pub fn new(config: &ExperimentConfig) -> Result<Self> {
        let grid = Grid::new(config.grid)?;
        let problem = config.problem()?;
        let psi0 = config.initial_state(&grid)?;
        Ok(Setup { grid, problem, psi0 })
    }
}

/// Reference solution by `reference_method` at `reference_steps()`.
pub fn make_reference(config: &ExperimentConfig, setup: &Setup) -> Result<(WaveFunction, Diagnostics)> {
    integrate(
        &setup.psi0,
        config.reference_method,
        &setup.problem,
        config.t0,
        config.t_end,
        config.reference_steps(),
    )
}

pub fn reference_comment(config: &ExperimentConfig) -> String {
    format!(
        "reference method={} n_steps={} g={} lambda={} omega0_sq={} rotation={} T={}",
        config.reference_method,
        config.reference_steps(),
        config.g,
        config.lambda,
        config.omega0_sq,
        config.rotation,
        config.t_end
    )
}

/// Output of [`run_experiment`].
pub struct ExperimentOutput {
    pub records: Vec<ConvergenceRecord>,
    pub reference: WaveFunction,
    /// Final states, in record order, when requested.
    pub finals: Vec<Option<WaveFunction>>,
}

/// Runs every `(method, n_steps)` pair against `reference` (computed when
/// `None`). Jobs run on the current rayon pool; rows come back ordered by
/// the config's method list, then by step count.
pub fn run_experiment(
    config: &ExperimentConfig,
    reference: Option<WaveFunction>,
    keep_finals: bool,
) -> Result<ExperimentOutput> {
    let setup = Setup::new(config)?;
    let reference = match reference {
        Some(r) => r,
        None => make_reference(config, &setup)?.0,
    };
    let jobs: Vec<(Method, usize)> = config
        .methods
        .iter()
        .flat_map(|&m| config.steps.iter().map(move |&n| (m, n)))
        .collect();
    let results: Vec<(ConvergenceRecord, Option<WaveFunction>)> = jobs
        .par_iter()
        .map(|&(method, n)| run_one(config, &setup, &reference, method, n, keep_finals))
        .collect();
    let (records, finals) = results.into_iter().unzip();
    Ok(ExperimentOutput { records, reference, finals })
}

fn run_one(
    config: &ExperimentConfig,
    setup: &Setup,
    reference: &WaveFunction,
    method: Method,
    n_steps: usize,
    keep_final: bool,
) -> (ConvergenceRecord, Option<WaveFunction>) {
    let h = (config.t_end - config.t0) / n_steps as f64;
    let start = Instant::now();
    let outcome = integrate(&setup.psi0, method, &setup.problem, config.t0, config.t_end, n_steps)
        .and_then(|(psi, diag)| Ok((psi.distance(reference)?, psi, diag)));
    let wall_time_ms = start.elapsed().as_secs_f64() * 1e3;
    match outcome {
        Ok((err, psi, diag)) => {
            let mut note = String::new();
            if diag.stats.halvings > 0 {
                note = format!("halvings={}", diag.stats.halvings);
            }
            let record = ConvergenceRecord {
                method,
                n_steps,
                h,
                l2_error: err,
                final_norm: psi.norm(),
                fft_count: diag.fft_count,
                wall_time_ms,
                note,
            };
            (record, keep_final.then_some(psi))
        }
        Err(e) => (
            ConvergenceRecord {
                method,
                n_steps,
                h,
                l2_error: f64::NAN,
                final_norm: f64::NAN,
                fft_count: 0,
                wall_time_ms,
                note: e.to_string(),
            },
            None,
        ),
    }
}

/// Least-squares slope of `-ln(error)` against `ln(n_steps)` over the last
/// `points` successful rows of `method`; `None` with fewer than two.
pub fn measured_order(records: &[ConvergenceRecord], method: Method, points: usize) -> Option<f64> {
    let rows: Vec<&ConvergenceRecord> = records
        .iter()
        .filter(|r| r.method == method && !r.failed() && r.l2_error > 0.0)
        .collect();
    let rows = &rows[rows.len().saturating_sub(points)..];
    if rows.len() < 2 {
        return None;
    }
    let xs: Vec<f64> = rows.iter().map(|r| (r.n_steps as f64).ln()).collect();
    let ys: Vec<f64> = rows.iter().map(|r| -r.l2_error.ln()).collect();
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let num: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    Some(num / den)
}

/// Paths written by [`write_outputs`].
#[derive(Debug, Default)]
pub struct WrittenFiles {
    pub csv: PathBuf,
    pub snapshots: Vec<PathBuf>,
}

/// Writes the CSV and, if present, final-state snapshots into `dir`.
pub fn write_outputs(config: &ExperimentConfig, output: &ExperimentOutput, dir: &Path) -> Result<WrittenFiles> {
    std::fs::create_dir_all(dir)?;
    let csv = dir.join(&config.csv);
    write_csv(&output.records, std::io::BufWriter::new(std::fs::File::create(&csv)?))?;
    let mut written = WrittenFiles { csv, snapshots: Vec::new() };
    let stem = Path::new(&config.csv).file_stem().and_then(|s| s.to_str()).unwrap_or("run").to_string();
    for (record, psi) in output.records.iter().zip(&output.finals) {
        let Some(psi) = psi else { continue };
        let path = dir.join(format!("{stem}_{}_{}.rbec", record.method, record.n_steps));
        let comment = format!("method={} n_steps={}", record.method, record.n_steps);
        Snapshot::from_wave(psi, config.t_end, comment)?.save(&path)?;
        written.snapshots.push(path);
    }
    Ok(written)
}
