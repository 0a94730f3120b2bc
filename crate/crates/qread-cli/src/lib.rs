//! Command-line front end for the `qread-core` numerics: renders fidelity
//! sweeps, error-probability bounds, advantage maps, dataset statistics, and
//! Monte-Carlo error curves as CSV or JSON tables.
//!
//! The binary in `src/main.rs` is a thin wrapper over [`run`]; everything
//! else lives here so the integration tests can drive the same code paths
//! in-process.

use std::path::PathBuf;

pub mod cli;
pub mod cmd;
pub mod config;
pub mod error;
pub mod idx;
pub mod mc;
pub mod output;
pub mod stats;

use cli::{take_enum, Cli, Command};
use config::ConfigBag;
use error::CliError;
use output::{OutputFormat, Table};

/// Executes a parsed command line: resolves the transport options, runs the
/// subcommand inside a dedicated thread pool, and writes the table.
pub fn run(cli: Cli) -> Result<(), CliError> {
    let mut bag = ConfigBag::load(cli.config.as_deref())?;
    let format = match cli.format {
        Some(format) => format,
        None => take_enum(&mut bag, "format")?.unwrap_or(OutputFormat::Csv),
    };
    let out = cli.out.or(bag.take_string("out")?.map(PathBuf::from));
    let seed = cli.seed.or(bag.take_u64("seed")?).unwrap_or(7);
    let threads = match cli.threads {
        Some(threads) => threads,
        None => match bag.take_u64("threads")? {
            None => 0, // let the pool size itself to the machine
            Some(t) => usize::try_from(t)
                .map_err(|_| CliError::usage(format!("thread count {t} does not fit")))?,
        },
    };

    let name = command_name(&cli.command);
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|err| {
            CliError::usage(format!("cannot build a {threads}-thread pool: {err}"))
        })?;
    let mut table = pool.install(|| dispatch(cli.command, seed, &mut bag))?;

    // The config echo pins everything that determines the numbers — and
    // deliberately not the transport options (format, out, threads), so the
    // same experiment is byte-identical however it was rendered or
    // parallelized.
    table.set_config("command", name);
    table.set_config("seed", seed);
    bag.finish()?;
    table.write(format, out.as_deref())
}

fn command_name(command: &Command) -> &'static str {
    match command {
        Command::Fidelity { .. } => "fidelity",
        Command::Bounds { .. } => "bounds",
        Command::AdvantageMap { .. } => "advantage-map",
        Command::DatasetStats { .. } => "dataset-stats",
        Command::NnCurve { .. } => "nn-curve",
        Command::Pipeline { .. } => "pipeline",
    }
}

fn dispatch(command: Command, seed: u64, bag: &mut ConfigBag) -> Result<Table, CliError> {
    match command {
        Command::Fidelity {
            eta_b,
            eta_w,
            n_signal,
            probes,
            n_total,
            grid,
        } => cmd::fidelity::run(eta_b, eta_w, n_signal, probes, n_total, grid, bag),
        Command::Bounds {
            mode,
            n_pixels,
            k_white,
            probes,
            fidelity,
            grid,
            epsilon,
        } => cmd::bounds::run(mode, n_pixels, k_white, probes, fidelity, grid, epsilon, bag),
        Command::AdvantageMap { grid, slice_grid } => {
            cmd::advantage::run(grid, slice_grid, bag)
        }
        Command::DatasetStats {
            dataset_dir,
            role,
            threshold,
            classes,
            sampling,
            samples,
            emit,
        } => cmd::dataset_stats::run(
            dataset_dir,
            role,
            threshold,
            classes,
            sampling,
            samples,
            emit,
            seed,
            bag,
        ),
        Command::NnCurve {
            dataset_dir,
            scale,
            trials,
            grid,
            threshold,
        } => cmd::nn_curve::run(dataset_dir, scale, trials, grid, threshold, seed, bag),
        Command::Pipeline {
            curve,
            dataset_dir,
            eta_b,
            eta_w,
            grid,
            photodet,
            scale,
            trials,
            curve_grid,
            threshold,
        } => cmd::pipeline::run(
            curve,
            dataset_dir,
            eta_b,
            eta_w,
            grid,
            photodet,
            scale,
            trials,
            curve_grid,
            threshold,
            seed,
            bag,
        ),
    }
}
