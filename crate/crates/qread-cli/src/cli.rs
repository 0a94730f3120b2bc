//! Command-line surface: one subcommand per table the tool can produce.
//!
//! Every option is optional at the clap level; a JSON config file named by
//! `--config` may supply any of them, explicit flags win, and built-in
//! defaults apply last. That resolution happens in the command modules, so
//! here the flags all parse to `Option`.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};

use crate::config::ConfigBag;
use crate::error::CliError;
use crate::output::OutputFormat;

/// Top-level argument set.
#[derive(Debug, Parser)]
#[command(
    name = "qread",
    about = "Quantum-enhanced pattern readout: probe fidelities, error bounds, and dataset experiments",
    version
)]
pub struct Cli {
    /// JSON file supplying any long option; explicit flags override it.
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Write the table here instead of standard output.
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Table format.
    #[arg(long, global = true, value_enum)]
    pub format: Option<OutputFormat>,

    /// Root seed for every randomized step.
    #[arg(long, global = true)]
    pub seed: Option<u64>,

    /// Worker threads for the parallel scans (default: all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

/// The available tables.
#[derive(Debug, Subcommand)]
pub enum Command {
    /// Readout fidelities of entangled and classical probes over a photon budget.
    Fidelity {
        /// Black-pixel reflectivity, in [0, 1].
        #[arg(long)]
        eta_b: Option<f64>,
        /// White-pixel reflectivity, in [0, 1].
        #[arg(long)]
        eta_w: Option<f64>,
        /// Mean signal photons per probe.
        #[arg(long)]
        n_signal: Option<f64>,
        /// Number of probes; fixes the budget at `probes * n_signal`.
        #[arg(long)]
        probes: Option<u64>,
        /// Total mean photon number spent on one pixel.
        #[arg(long)]
        n_total: Option<f64>,
        /// Photon-budget grid, e.g. "1:1000:5" or "10,20,50".
        #[arg(long)]
        grid: Option<String>,
    },
    /// Error-probability bounds for barcode and k-white-pixel ensembles.
    Bounds {
        /// Which pattern ensemble the bounds cover.
        #[arg(long, value_enum)]
        mode: Option<BoundsMode>,
        /// Pattern length in pixels.
        #[arg(long)]
        n_pixels: Option<u64>,
        /// White pixels per pattern (k-white mode only).
        #[arg(long)]
        k_white: Option<u64>,
        /// Probes spent per pixel.
        #[arg(long)]
        probes: Option<u64>,
        /// Single-probe fidelity between the two pixel states.
        #[arg(long)]
        fidelity: Option<f64>,
        /// Fidelity grid, e.g. "0.9:0.999:10".
        #[arg(long)]
        grid: Option<String>,
        /// Target error; adds the copies needed to reach it (barcode mode).
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Photon-information threshold over the reflectivity square.
    AdvantageMap {
        /// Grid over both reflectivities, e.g. "0:1:101".
        #[arg(long)]
        grid: Option<String>,
        /// Denser grid for the ideal-white slice rows.
        #[arg(long)]
        slice_grid: Option<String>,
    },
    /// Hamming-distance statistics between classes of an IDX image set.
    DatasetStats {
        /// Directory holding the IDX image and label files.
        #[arg(long, value_name = "PATH")]
        dataset_dir: Option<PathBuf>,
        /// Which split to scan.
        #[arg(long, value_enum)]
        role: Option<RoleArg>,
        /// Grey level at or above which a pixel counts as white.
        #[arg(long)]
        threshold: Option<u8>,
        /// Keep only these classes, e.g. "0,1".
        #[arg(long)]
        classes: Option<String>,
        /// Walk every pair or draw a fixed number per class pair.
        #[arg(long, value_enum)]
        sampling: Option<SamplingArg>,
        /// Pairs drawn per class pair when subsampling.
        #[arg(long)]
        samples: Option<u64>,
        /// One summary row per class pair, or the full histograms.
        #[arg(long, value_enum)]
        emit: Option<EmitArg>,
    },
    /// Monte-Carlo nearest-neighbor error versus pixel-flip probability.
    NnCurve {
        /// Directory holding the IDX image and label files.
        #[arg(long, value_name = "PATH")]
        dataset_dir: Option<PathBuf>,
        /// Test-set size: a 1000-image prefix or the full split.
        #[arg(long, value_enum)]
        scale: Option<ScaleArg>,
        /// Noise trials per test image and grid point.
        #[arg(long)]
        trials: Option<u64>,
        /// Flip-probability grid, e.g. "0:0.2:11".
        #[arg(long)]
        grid: Option<String>,
        /// Grey level at or above which a pixel counts as white.
        #[arg(long)]
        threshold: Option<u8>,
    },
    /// End-to-end error bands: photon budget to classification error.
    Pipeline {
        /// JSON error curve produced by nn-curve; replaces the fresh run.
        #[arg(long, value_name = "PATH")]
        curve: Option<PathBuf>,
        /// Directory holding the IDX files for a fresh error curve.
        #[arg(long, value_name = "PATH")]
        dataset_dir: Option<PathBuf>,
        /// Black-pixel reflectivity, in [0, 1].
        #[arg(long)]
        eta_b: Option<f64>,
        /// White-pixel reflectivity, in [0, 1].
        #[arg(long)]
        eta_w: Option<f64>,
        /// Photon-budget grid, e.g. "10,20,50,100".
        #[arg(long)]
        grid: Option<String>,
        /// Photon-counting pixel error: exact Fock sum or Gaussian tail.
        #[arg(long, value_enum)]
        photodet: Option<PhotodetArg>,
        /// Test-set size for a fresh curve.
        #[arg(long, value_enum)]
        scale: Option<ScaleArg>,
        /// Noise trials per test image for a fresh curve.
        #[arg(long)]
        trials: Option<u64>,
        /// Flip-probability grid for a fresh curve.
        #[arg(long)]
        curve_grid: Option<String>,
        /// Grey threshold for a fresh curve.
        #[arg(long)]
        threshold: Option<u8>,
    },
}

/// Dataset split selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RoleArg {
    Train,
    Test,
}

/// Experiment size selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ScaleArg {
    /// First 1000 test images: minutes on a desktop.
    Desk,
    /// The whole split.
    Full,
}

/// Pair-walk strategy for dataset statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SamplingArg {
    /// Every cross-class pair.
    All,
    /// A fixed number of random pairs per class pair.
    Subsample,
}

/// Output shape for dataset statistics.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EmitArg {
    /// One row per class pair.
    Summary,
    /// One row per (class pair, distance) bin.
    Histograms,
}

/// Photon-counting error model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhotodetArg {
    /// Exact photon-number sum.
    Exact,
    /// Gaussian tail approximation.
    Gauss,
}

/// Pattern ensemble for the bounds table.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum BoundsMode {
    /// All 2^n pixel patterns.
    Barcode,
    /// Patterns with exactly k white pixels.
    Kcpf,
}

/// Reads an enum-valued key from the config bag, accepting the same
/// spellings as the command line (case-insensitive).
pub fn take_enum<T: ValueEnum>(bag: &mut ConfigBag, key: &str) -> Result<Option<T>, CliError> {
    match bag.take_string(key)? {
        None => Ok(None),
        Some(text) => T::from_str(&text, true).map(Some).map_err(|_| {
            CliError::usage(format!("config key \"{key}\": unknown value \"{text}\""))
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn subcommands_and_flags_parse() {
        let cli = Cli::try_parse_from([
            "qread",
            "fidelity",
            "--eta-b",
            "0.9",
            "--eta-w",
            "0.95",
            "--n-signal",
            "1e-3",
            "--grid",
            "1:1000:5",
            "--format",
            "json",
        ])
        .unwrap();
        assert_eq!(cli.format, Some(OutputFormat::Json));
        match cli.command {
            Command::Fidelity { eta_b, n_signal, grid, probes, .. } => {
                assert_eq!(eta_b, Some(0.9));
                assert_eq!(n_signal, Some(1e-3));
                assert_eq!(grid.as_deref(), Some("1:1000:5"));
                assert_eq!(probes, None);
            }
            other => panic!("parsed the wrong command: {other:?}"),
        }
    }

    #[test]
    fn unknown_flags_are_rejected() {
        assert!(Cli::try_parse_from(["qread", "bounds", "--no-such-flag"]).is_err());
        assert!(Cli::try_parse_from(["qread", "no-such-command"]).is_err());
    }

    #[test]
    fn enum_values_accept_kebab_case() {
        let cli = Cli::try_parse_from([
            "qread",
            "dataset-stats",
            "--sampling",
            "subsample",
            "--emit",
            "histograms",
        ])
        .unwrap();
        match cli.command {
            Command::DatasetStats { sampling, emit, .. } => {
                assert_eq!(sampling, Some(SamplingArg::Subsample));
                assert_eq!(emit, Some(EmitArg::Histograms));
            }
            other => panic!("parsed the wrong command: {other:?}"),
        }
    }

    #[test]
    fn config_enum_lookup_is_case_insensitive() {
        let mut bag = ConfigBag::from_json(r#"{"role": "Test"}"#).unwrap();
        let role: Option<RoleArg> = take_enum(&mut bag, "role").unwrap();
        assert_eq!(role, Some(RoleArg::Test));
        let mut bad = ConfigBag::from_json(r#"{"role": "weekend"}"#).unwrap();
        let err = take_enum::<RoleArg>(&mut bad, "role").unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
