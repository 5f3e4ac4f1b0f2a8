//! Command-line front end: experiment presets, parameter sweeps, and CSV
//! emission on top of the `avwave` library.

mod config;
mod output;
mod presets;
mod run;
mod sweep;

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crate::config::ExperimentConfig;

/// Errors mapped onto exit codes: config errors exit 2, numerical errors
/// exit 3, I/O errors exit 1.
#[derive(Debug, Clone)]
pub enum CliError {
    Config(String),
    Numerical(String),
    Io(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config(msg) => write!(f, "config error: {msg}"),
            CliError::Numerical(msg) => write!(f, "numerical error: {msg}"),
            CliError::Io(msg) => write!(f, "io error: {msg}"),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Io(_) => 1,
            CliError::Config(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

#[derive(Parser)]
#[command(
    name = "avwave",
    version,
    about = "Traffic wave analysis for automated-vehicle platoons"
)]
struct Cli {
    /// Experiment configuration file (key = value sections)
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Output directory for emitted CSV files
    #[arg(long, global = true, default_value = "out")]
    out: PathBuf,

    /// Worker threads for sweep evaluation (default: all cores)
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Reserved; all current paths are deterministic and ignore it
    #[arg(long, global = true)]
    seed: Option<u64>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Transfer magnitude, phase, and response time over a frequency grid
    FreqResponse,
    /// Describing-function transfer for the configured amplitude ratios
    Dfa,
    /// Propagate the input spectrum down the vehicle string
    Platoon,
    /// Wave-speed series for the configured pairs and time grid
    Wave,
    /// Integrate the platoon and export the trajectory
    Simulate,
    /// Evaluate a parameter sweep into one long-format CSV
    Sweep,
    /// Run a named preset (fig4..fig12) or a config file end-to-end
    Experiment {
        /// Preset name, or path to a configuration file
        target: String,
        /// Override the preset's oscillation frequency (rad/s)
        #[arg(long)]
        frequency: Option<f64>,
    },
}

fn load_config(path: &Option<PathBuf>) -> Result<ExperimentConfig, CliError> {
    let Some(path) = path else {
        return Err(CliError::Config("--config <path> is required".into()));
    };
    let text = read_config_file(path)?;
    ExperimentConfig::parse(&text)
}

fn read_config_file(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::FreqResponse => {
            let cfg = load_config(&cli.config)?;
            run::ensure_out_dir(&cli.out)?;
            run::emit_freq_response(&cfg, &cli.out)
        }
        Command::Dfa => {
            let cfg = load_config(&cli.config)?;
            run::ensure_out_dir(&cli.out)?;
            run::emit_dfa(&cfg, &cli.out)
        }
        Command::Platoon => {
            let cfg = load_config(&cli.config)?;
            run::ensure_out_dir(&cli.out)?;
            run::emit_spectra(&cfg, &cli.out)
        }
        Command::Wave => {
            let cfg = load_config(&cli.config)?;
            run::ensure_out_dir(&cli.out)?;
            run::emit_wave(&cfg, &cli.out)
        }
        Command::Simulate => {
            let cfg = load_config(&cli.config)?;
            run::ensure_out_dir(&cli.out)?;
            run::emit_trajectory(&cfg, &cli.out)
        }
        Command::Sweep => {
            let cfg = load_config(&cli.config)?;
            run::ensure_out_dir(&cli.out)?;
            run::emit_config_echo(&cfg, &cli.out)?;
            sweep::run_sweep(&cfg, &cli.out, cli.workers)
        }
        Command::Experiment { target, frequency } => {
            let runs = match presets::preset(target, *frequency) {
                Some(runs) => runs,
                None => {
                    let path = PathBuf::from(target);
                    if !path.exists() {
                        return Err(CliError::Config(format!(
                            "`{target}` is neither a preset ({}) nor a config file",
                            presets::PRESET_NAMES.join(", ")
                        )));
                    }
                    let text = read_config_file(&path)?;
                    vec![(String::new(), ExperimentConfig::parse(&text)?)]
                }
            };
            for (subdir, cfg) in &runs {
                let dir = if subdir.is_empty() {
                    cli.out.clone()
                } else {
                    cli.out.join(subdir)
                };
                run::run_all(cfg, &dir, cli.workers)?;
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
