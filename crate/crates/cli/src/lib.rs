//! Command-line front end for `rescat`: TOML configs in Hz, spectrum files in
//! CSV or JSON, cross-method comparison, fitting and propagation-phase sweeps.
//!
//! Exit codes: 0 success, 1 output failure or compare tolerance exceeded,
//! 2 config or usage error, 3 solver failure, 4 analysis failure.

pub mod commands;
pub mod config;
pub mod error;
pub mod io;

use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use commands::{analyze, compare, fit, run_spectrum, sweep_theta, Overrides};
pub use config::{Format, RunConfig, SystemKind, SystemModel};
pub use error::{CliError, ErrorRecord, Result};
pub use io::SpectrumFile;

/// Scattering spectra of waveguide-coupled resonators and resonator chains.
///
/// The worker thread count follows RAYON_NUM_THREADS.
#[derive(Debug, Parser)]
#[command(name = "rescat", version)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,

    /// TOML run configuration.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Output file (a directory for sweep-theta); overrides [output].path.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    /// csv or json; overrides [output].format and the file extension.
    #[arg(long, global = true)]
    pub format: Option<String>,

    /// Evaluator, e.g. closed-form, dense, thomas, site, collective, time-domain.
    #[arg(long, global = true)]
    pub method: Option<String>,

    /// Compare tolerance on the largest complex deviation [default: 1e-8].
    #[arg(long, global = true)]
    pub tol: Option<f64>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Spectrum of one hanger, necklace or bridge resonator.
    Single,
    /// Spectrum of a side-coupled chain.
    HangerChain,
    /// Spectrum of an end-to-end coupled chain.
    NecklaceChain,
    /// Evaluate one system with several methods and report the deviations.
    Compare {
        /// Comma-separated methods; the first is the reference.
        #[arg(long, value_delimiter = ',')]
        methods: Vec<String>,
    },
    /// Least-squares fit of a single-resonator model.
    Fit {
        /// Spectrum file (CSV or JSON) to fit instead of computing one from --config.
        #[arg(long)]
        input: Option<PathBuf>,
        /// hanger, necklace or bridge.
        #[arg(long)]
        geometry: Option<String>,
    },
    /// One hanger-chain spectrum per propagation phase in [theta_sweep].
    SweepTheta,
}

impl Cli {
    fn overrides(&self) -> Result<Overrides> {
        Ok(Overrides {
            out: self.out.clone(),
            format: self.format.as_deref().map(str::parse).transpose()?,
            method: self.method.clone(),
            tol: self.tol,
        })
    }

    fn config(&self) -> Result<RunConfig> {
        match &self.config {
            Some(p) => RunConfig::load(p),
            None => Err(CliError::Config("--config <path> is required".into())),
        }
    }
}

/// Runs one command; reports without an output path go to `stdout`.
pub fn execute(cli: &Cli, stdout: &mut impl Write) -> Result<()> {
    let ov = cli.overrides()?;
    let mut print = |text: Option<String>| -> Result<()> {
        if let Some(t) = text {
            stdout
                .write_all(t.as_bytes())
                .map_err(|source| CliError::Io { path: PathBuf::from("<stdout>"), source })?;
        }
        Ok(())
    };
    match &cli.command {
        Command::Single => run_spectrum(&cli.config()?, SystemKind::Single, &ov).map(drop),
        Command::HangerChain => run_spectrum(&cli.config()?, SystemKind::HangerChain, &ov).map(drop),
        Command::NecklaceChain => run_spectrum(&cli.config()?, SystemKind::NecklaceChain, &ov).map(drop),
        Command::SweepTheta => sweep_theta(&cli.config()?, &ov).map(drop),
        Command::Compare { methods } => {
            let report = compare(&cli.config()?, methods, &ov)?;
            print(commands::emit(commands::report_text(&report), ov.out.as_deref())?)?;
            if report.pass {
                Ok(())
            } else {
                Err(CliError::Tolerance { max: report.max_deviation, tol: report.tol })
            }
        }
        Command::Fit { input, geometry } => {
            let cfg = match (&cli.config, input) {
                (None, Some(_)) => None,
                _ => Some(cli.config()?),
            };
            let report = fit(cfg.as_ref(), input.as_deref(), geometry.as_deref(), &ov)?;
            print(commands::emit(commands::report_text(&report), ov.out.as_deref())?)
        }
    }
}
