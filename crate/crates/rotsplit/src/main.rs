use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use rotsplit::config::{preset_text, ExperimentConfig, PRESET_NAMES};
use rotsplit::experiment::{make_reference, measured_order, reference_comment, run_experiment, write_outputs, Setup};
use rotsplit::{Result, RotError, Snapshot};

/// Convergence experiments for rotating condensates in time-dependent traps.
#[derive(Parser)]
#[command(name = "rotsplit", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Integrate every (method, steps) pair and write the convergence CSV.
    Run {
        /// Config file, or the name of a built-in preset.
        config: String,
        #[command(flatten)]
        common: Common,
        /// Also write the final state of every run as a snapshot.
        #[arg(long)]
        snapshot_final: bool,
        /// Reuse a reference snapshot instead of recomputing it.
        #[arg(long)]
        reference: Option<PathBuf>,
    },
    /// Compute the reference solution and write it as a snapshot.
    Reference {
        config: String,
        #[command(flatten)]
        common: Common,
    },
    /// Check a config file and report every problem with its line.
    Validate { config: String },
    /// List the built-in presets, or print one.
    Presets { name: Option<String> },
}

#[derive(Args)]
struct Common {
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Worker threads for independent runs (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
}

fn load(config: &str) -> Result<ExperimentConfig> {
    let path = Path::new(config);
    if path.exists() || !PRESET_NAMES.contains(&config) {
        ExperimentConfig::load(path)
    } else {
        ExperimentConfig::preset(config)
    }
}

fn init_threads(threads: Option<usize>) -> Result<()> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| RotError::Invalid(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn reference_path(config: &ExperimentConfig, dir: &Path) -> PathBuf {
    let stem = Path::new(&config.csv).file_stem().and_then(|s| s.to_str()).unwrap_or("run");
    dir.join(format!("{stem}_reference.rbec"))
}

fn run(config: &str, common: &Common, snapshot_final: bool, reference: Option<&Path>) -> Result<()> {
    init_threads(common.threads)?;
    let config = load(config)?;
    let reference = match reference {
        Some(path) => {
            let snap = Snapshot::load(path)?;
            if snap.spec != config.grid || snap.time != config.t_end {
                return Err(RotError::Snapshot {
                    path: path.to_path_buf(),
                    message: format!("grid {:?} at t = {} does not match the config", snap.spec, snap.time),
                });
            }
            Some(snap.to_wave(None)?)
        }
        None => None,
    };
    let output = run_experiment(&config, reference, snapshot_final)?;
    let written = write_outputs(&config, &output, &common.out)?;
    for r in &output.records {
        let status = if r.failed() { format!("FAILED: {}", r.note) } else { format!("{:.3e}", r.l2_error) };
        println!("{:>8} {:>6} steps  error {status}", r.method.id(), r.n_steps);
    }
    for &m in &config.methods {
        if let Some(p) = measured_order(&output.records, m, 4) {
            println!("{:>8} measured order {p:.2} (three finest pairs)", m.id());
        }
    }
    println!("wrote {}", written.csv.display());
    for s in &written.snapshots {
        println!("wrote {}", s.display());
    }
    Ok(())
}

fn reference(config: &str, common: &Common) -> Result<()> {
    init_threads(common.threads)?;
    let config = load(config)?;
    let setup = Setup::new(&config)?;
    let (psi, diag) = make_reference(&config, &setup)?;
    std::fs::create_dir_all(&common.out)?;
    let path = reference_path(&config, &common.out);
    Snapshot::from_wave(&psi, config.t_end, reference_comment(&config))?.save(&path)?;
    println!(
        "reference {} x {} steps, norm {:.15}, boundary mass {:.2e}, fft count {}",
        config.reference_method,
        config.reference_steps(),
        psi.norm(),
        diag.boundary_mass,
        diag.fft_count
    );
    println!("wrote {}", path.display());
    Ok(())
}

fn validate(config: &str) -> Result<()> {
    let text = match preset_text(config) {
        Ok(text) if !Path::new(config).exists() => text.to_string(),
        _ => std::fs::read_to_string(config)?,
    };
    match ExperimentConfig::parse(&text) {
        Ok(c) => {
            println!(
                "OK: {} methods x {} step counts, reference {} x {}",
                c.methods.len(),
                c.steps.len(),
                c.reference_method,
                c.reference_steps()
            );
            Ok(())
        }
        Err(issues) => {
            for issue in &issues {
                eprintln!("{config}: {issue}");
            }
            Err(RotError::Invalid(format!("{} problem(s) in {config}", issues.len())))
        }
    }
}

fn presets(name: Option<&str>) -> Result<()> {
    match name {
        Some(n) => print!("{}", preset_text(n)?),
        None => PRESET_NAMES.iter().for_each(|n| println!("{n}")),
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Run { config, common, snapshot_final, reference } => {
            run(config, common, *snapshot_final, reference.as_deref())
        }
        Command::Reference { config, common } => reference(config, common),
        Command::Validate { config } => validate(config),
        Command::Presets { name } => presets(name.as_deref()),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
