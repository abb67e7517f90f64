//! CLI driver: one subcommand per experiment, with optional config file,
//! seed/trial/output overrides, and CSV or JSON reporting.

use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use abp_sim::config::{
    load_config, ControlChannelConfig, MaeeConfig, MultipathMseConfig, QuantizationConfig,
    RicianStudyConfig, SinglePathMseConfig, VarianceConfig,
};
use abp_sim::experiments;
use abp_sim::report::MetricReport;
use abp_sim::SimError;

#[derive(Parser)]
#[command(
    name = "abp-sim",
    about = "Monte Carlo experiments for auxiliary-beam-pair angle estimation",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct CommonOpts {
    /// Experiment descriptor (JSON or TOML); unset fields use defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed override.
    #[arg(long)]
    seed: Option<u64>,
    /// Trial count override.
    #[arg(long)]
    trials: Option<u64>,
    /// CSV output path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit the report as JSON on stdout instead of CSV.
    #[arg(long)]
    json: bool,
}

#[derive(Subcommand)]
enum Command {
    /// Single-path AoD/AoA MSE and analog-beamforming spectral efficiency.
    SinglePathMse(CommonOpts),
    /// Analytical-vs-numerical variance of the receive frequency estimate.
    Variance(CommonOpts),
    /// Feedback quantization study (codeword MSE and angle MSE per bits).
    Quantization(CommonOpts),
    /// Multi-path transmit response matrix MSE vs the grid-of-beams baseline.
    MultipathMse(CommonOpts),
    /// Mean absolute angle estimation error and overhead trade-off.
    Maee(CommonOpts),
    /// Layered control-channel beamforming attempt counts and pointing error.
    ControlChannel(CommonOpts),
    /// Dominant-path estimation under Rician channels.
    Rician(CommonOpts),
}

fn load_or_default<T: serde::de::DeserializeOwned + Default>(
    opts: &CommonOpts,
) -> Result<T, SimError> {
    match &opts.config {
        Some(path) => load_config(path),
        None => Ok(T::default()),
    }
}

fn run(command: &Command) -> Result<(MetricReport, &CommonOpts), SimError> {
    match command {
        Command::SinglePathMse(opts) => {
            let mut cfg: SinglePathMseConfig = load_or_default(opts)?;
            if let Some(s) = opts.seed {
                cfg.seed = s;
            }
            if let Some(t) = opts.trials {
                cfg.trials = t;
            }
            Ok((experiments::run_single_path_mse(&cfg)?, opts))
        }
        Command::Variance(opts) => {
            let mut cfg: VarianceConfig = load_or_default(opts)?;
            if let Some(s) = opts.seed {
                cfg.seed = s;
            }
            if let Some(t) = opts.trials {
                cfg.trials = t;
            }
            Ok((experiments::run_variance_validation(&cfg)?, opts))
        }
        Command::Quantization(opts) => {
            let mut cfg: QuantizationConfig = load_or_default(opts)?;
            if let Some(s) = opts.seed {
                cfg.seed = s;
            }
            if let Some(t) = opts.trials {
                cfg.trials = t;
            }
            Ok((experiments::run_quantization_study(&cfg)?, opts))
        }
        Command::MultipathMse(opts) => {
            let mut cfg: MultipathMseConfig = load_or_default(opts)?;
            if let Some(s) = opts.seed {
                cfg.seed = s;
            }
            if let Some(t) = opts.trials {
                cfg.trials = t;
            }
            Ok((experiments::run_multipath_matrix_mse(&cfg)?, opts))
        }
        Command::Maee(opts) => {
            let mut cfg: MaeeConfig = load_or_default(opts)?;
            if let Some(s) = opts.seed {
                cfg.seed = s;
            }
            if let Some(t) = opts.trials {
                cfg.trials = t;
            }
            Ok((experiments::run_maee_tradeoff(&cfg)?, opts))
        }
        Command::ControlChannel(opts) => {
            let mut cfg: ControlChannelConfig = load_or_default(opts)?;
            if let Some(s) = opts.seed {
                cfg.seed = s;
            }
            if let Some(t) = opts.trials {
                cfg.trials = t;
            }
            Ok((experiments::run_control_channel(&cfg)?, opts))
        }
        Command::Rician(opts) => {
            let mut cfg: RicianStudyConfig = load_or_default(opts)?;
            if let Some(s) = opts.seed {
                cfg.seed = s;
            }
            if let Some(t) = opts.trials {
                cfg.trials = t;
            }
            Ok((experiments::run_rician_study(&cfg)?, opts))
        }
    }
}

fn emit(report: &MetricReport, opts: &CommonOpts) -> Result<(), SimError> {
    if let Some(path) = &opts.out {
        let file = std::fs::File::create(path)?;
        report
            .write_csv(file)
            .map_err(|e| SimError::Config(format!("CSV write failed: {e}")))?;
    }
    if opts.json {
        println!("{}", report.to_json());
    } else if opts.out.is_none() {
        let stdout = std::io::stdout();
        report
            .write_csv(stdout.lock())
            .map_err(|e| SimError::Config(format!("CSV write failed: {e}")))?;
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli.command).and_then(|(report, opts)| emit(&report, opts)) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            let payload = serde_json::json!({
                "error": err.kind(),
                "message": err.to_string(),
            });
            let mut stderr = std::io::stderr();
            let _ = writeln!(stderr, "{payload}");
            ExitCode::FAILURE
        }
    }
}
