//! The `nn-curve` table: nearest-neighbor error versus pixel-flip
//! probability, estimated by Monte Carlo on an IDX dataset.
//!
//! Every test image is corrupted `--trials` times per grid point and
//! classified against the full training split. The JSON rendering of this
//! table is what `pipeline --curve` consumes.

use std::path::PathBuf;

use crate::cli::{take_enum, RoleArg, ScaleArg};
use crate::cmd::dataset_stats::{resolve_dataset_dir, resolve_threshold};
use crate::config::{parse_grid, ConfigBag};
use crate::error::CliError;
use crate::idx;
use crate::mc::noisy_error_curve;
use crate::output::{Cell, Table};

pub const SCHEMA: &str = "qread.nn-curve.v1";

pub const COLUMNS: &[&str] = &["p", "error", "stderr", "trials"];

/// Test images kept in a desk-scale run.
pub const DESK_TEST_LIMIT: usize = 1000;

pub fn run(
    dataset_dir: Option<PathBuf>,
    scale: Option<ScaleArg>,
    trials: Option<u64>,
    grid: Option<String>,
    threshold: Option<u8>,
    seed: u64,
    bag: &mut ConfigBag,
) -> Result<Table, CliError> {
    let dir = resolve_dataset_dir(dataset_dir, bag)?;
    let scale = scale.or(take_enum(bag, "scale")?).unwrap_or(ScaleArg::Desk);
    let trials = trials.or(bag.take_u64("trials")?).unwrap_or(10);
    let grid = grid
        .or(bag.take_string("grid")?)
        .unwrap_or_else(|| "0:0.2:11".into());
    let threshold = resolve_threshold(threshold, bag)?;

    let mut ps = parse_grid(&grid)?;
    ps.sort_by(f64::total_cmp);
    ps.dedup();

    let limit = match scale {
        ScaleArg::Desk => Some(DESK_TEST_LIMIT),
        ScaleArg::Full => None,
    };
    let train = idx::load_dataset(&dir, role_core(RoleArg::Train), threshold, None)?;
    let test = idx::load_dataset(&dir, role_core(RoleArg::Test), threshold, limit)?;

    let curve = noisy_error_curve(&train, &test, &ps, trials, seed)?;

    let mut table = Table::new(SCHEMA, COLUMNS);
    table.set_config("dataset-dir", dir.display().to_string());
    table.set_config("scale", scale_name(scale));
    table.set_config("trials", trials);
    table.set_config("grid", grid.as_str());
    table.set_config("threshold", u64::from(threshold));
    table.set_meta("n-train", train.len() as u64);
    table.set_meta("n-test", test.len() as u64);
    for point in curve.points() {
        table.push_row(vec![
            Cell::Float(point.p),
            Cell::Float(point.error),
            Cell::Float(point.stderr),
            Cell::Uint(point.trials),
        ]);
    }
    Ok(table)
}

fn role_core(role: RoleArg) -> qread_core::image::DatasetRole {
    match role {
        RoleArg::Train => qread_core::image::DatasetRole::Train,
        RoleArg::Test => qread_core::image::DatasetRole::Test,
    }
}

pub(crate) fn scale_name(scale: ScaleArg) -> &'static str {
    match scale {
        ScaleArg::Desk => "desk",
        ScaleArg::Full => "full",
    }
}
