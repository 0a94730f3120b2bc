//! The `pipeline` table: classification error bands versus photon budget.
//!
//! Composes the physics with the dataset experiment: each receiver family
//! turns a photon budget into a single-pixel error probability (an interval
//! for the optimal-measurement sandwich, a point for photon counting), and
//! the measured noise-vs-error curve turns that into a classification error
//! band. The curve comes either from a JSON file written by `nn-curve` or
//! from a fresh Monte-Carlo run.

use std::fs;
use std::path::{Path, PathBuf};

use qread_core::classify::{
    compose_pipeline, CurvePoint, NoisyErrorCurve, PixelErrorSource,
};
use qread_core::gaussian::{TmsvMethod, TransmissivityPair};

use crate::cli::{take_enum, PhotodetArg, ScaleArg};
use crate::cmd::dataset_stats::resolve_dataset_dir;
use crate::cmd::nn_curve::{scale_name, DESK_TEST_LIMIT, SCHEMA as CURVE_SCHEMA};
use crate::config::{parse_grid, ConfigBag};
use crate::error::CliError;
use crate::idx;
use crate::mc::noisy_error_curve;
use crate::output::{Cell, Table};

const SCHEMA: &str = "qread.pipeline.v1";

const COLUMNS: &[&str] = &[
    "source", "n_total", "p_lower", "p_upper", "e_lower", "e_upper",
];

/// Every receiver family, in the order the rows appear.
const SOURCES: &[PixelErrorSource] = &[
    PixelErrorSource::QuantumHelstrom,
    PixelErrorSource::ClassicalHelstrom,
    PixelErrorSource::QuantumPhotodet,
    PixelErrorSource::ClassicalPhotodet,
];

#[allow(clippy::too_many_arguments)]
pub fn run(
    curve: Option<PathBuf>,
    dataset_dir: Option<PathBuf>,
    eta_b: Option<f64>,
    eta_w: Option<f64>,
    grid: Option<String>,
    photodet: Option<PhotodetArg>,
    scale: Option<ScaleArg>,
    trials: Option<u64>,
    curve_grid: Option<String>,
    threshold: Option<u8>,
    seed: u64,
    bag: &mut ConfigBag,
) -> Result<Table, CliError> {
    let curve_path = curve.or(bag.take_string("curve")?.map(PathBuf::from));
    let dataset_dir = dataset_dir.or(bag.take_string("dataset-dir")?.map(PathBuf::from));
    let eta_b = eta_b.or(bag.take_f64("eta-b")?).unwrap_or(0.9);
    let eta_w = eta_w.or(bag.take_f64("eta-w")?).unwrap_or(0.95);
    let grid = grid
        .or(bag.take_string("grid")?)
        .unwrap_or_else(|| "10,20,50,100,200,500,1000".into());
    let photodet = photodet
        .or(take_enum(bag, "photodet")?)
        .unwrap_or(PhotodetArg::Exact);
    let scale = scale.or(take_enum(bag, "scale")?);
    let trials = trials.or(bag.take_u64("trials")?);
    let curve_grid = curve_grid.or(bag.take_string("curve-grid")?);
    let threshold_flag = threshold;
    let threshold_config = bag.take_u64("threshold")?;

    if let Some(path) = &curve_path {
        if dataset_dir.is_some() {
            return Err(CliError::usage(
                "give --curve or --dataset-dir, not both: the curve file already fixes the experiment",
            ));
        }
        let fresh_knobs = scale.is_some()
            || trials.is_some()
            || curve_grid.is_some()
            || threshold_flag.is_some()
            || threshold_config.is_some();
        if fresh_knobs {
            return Err(CliError::usage(
                "--curve replaces the fresh run; drop --scale, --trials, --curve-grid, and --threshold",
            ));
        }
        let curve = load_curve_file(path)?;
        return compose(
            &curve,
            eta_b,
            eta_w,
            &grid,
            photodet,
            |table| {
                table.set_config("curve", path.display().to_string());
                table.set_meta("curve-source", "file");
            },
        );
    }

    // Fresh run: the nn-curve defaults, except the default grid reaches the
    // p = 1/2 a zero-photon budget maps to.
    let dir = resolve_dataset_dir(dataset_dir, bag)?;
    let scale = scale.unwrap_or(ScaleArg::Desk);
    let trials = trials.unwrap_or(10);
    let curve_grid = curve_grid.unwrap_or_else(|| "0:0.2:11,0.25:0.5:6".into());
    let threshold = match (threshold_flag, threshold_config) {
        (Some(t), _) => t,
        (None, Some(t)) => u8::try_from(t).map_err(|_| {
            CliError::usage(format!("threshold must be a grey level 0..=255, got {t}"))
        })?,
        (None, None) => 128,
    };

    let mut ps = parse_grid(&curve_grid)?;
    ps.sort_by(f64::total_cmp);
    ps.dedup();
    let limit = match scale {
        ScaleArg::Desk => Some(DESK_TEST_LIMIT),
        ScaleArg::Full => None,
    };
    let train = idx::load_dataset(&dir, qread_core::image::DatasetRole::Train, threshold, None)?;
    let test = idx::load_dataset(&dir, qread_core::image::DatasetRole::Test, threshold, limit)?;
    let curve = noisy_error_curve(&train, &test, &ps, trials, seed)?;

    compose(&curve, eta_b, eta_w, &grid, photodet, |table| {
        table.set_config("dataset-dir", dir.display().to_string());
        table.set_config("scale", scale_name(scale));
        table.set_config("trials", trials);
        table.set_config("curve-grid", curve_grid.as_str());
        table.set_config("threshold", u64::from(threshold));
        table.set_meta("curve-source", "computed");
        table.set_meta("n-train", train.len() as u64);
        table.set_meta("n-test", test.len() as u64);
    })
}

/// Runs the physics over the measured curve and assembles the table.
fn compose(
    curve: &NoisyErrorCurve,
    eta_b: f64,
    eta_w: f64,
    grid: &str,
    photodet: PhotodetArg,
    annotate: impl FnOnce(&mut Table),
) -> Result<Table, CliError> {
    let n_grid = parse_grid(grid)?;
    let pair = TransmissivityPair::new(eta_b, eta_w)?;
    let method = match photodet {
        PhotodetArg::Exact => TmsvMethod::ExactSum,
        PhotodetArg::Gauss => TmsvMethod::GaussianApprox,
    };
    let curves = compose_pipeline(curve, &pair, &n_grid, SOURCES, method)?;

    let mut table = Table::new(SCHEMA, COLUMNS);
    table.set_config("eta-b", eta_b);
    table.set_config("eta-w", eta_w);
    table.set_config("grid", grid);
    table.set_config("photodet", photodet_name(photodet));
    annotate(&mut table);
    table.set_meta("curve-points", curve.points().len() as u64);
    for family in &curves {
        let name = source_name(family.source);
        for point in &family.points {
            table.push_row(vec![
                Cell::Text(name),
                Cell::Float(point.n_total),
                Cell::Float(point.p_lower),
                Cell::Float(point.p_upper),
                Cell::Float(point.e_lower),
                Cell::Float(point.e_upper),
            ]);
        }
    }
    Ok(table)
}

fn photodet_name(photodet: PhotodetArg) -> &'static str {
    match photodet {
        PhotodetArg::Exact => "exact",
        PhotodetArg::Gauss => "gauss",
    }
}

fn source_name(source: PixelErrorSource) -> &'static str {
    match source {
        PixelErrorSource::QuantumHelstrom => "quantum-helstrom",
        PixelErrorSource::ClassicalHelstrom => "classical-helstrom",
        PixelErrorSource::QuantumPhotodet => "quantum-photodet",
        PixelErrorSource::ClassicalPhotodet => "classical-photodet",
    }
}

/// Loads a curve from the JSON rendering of an `nn-curve` table.
fn load_curve_file(path: &Path) -> Result<NoisyErrorCurve, CliError> {
    let text = fs::read_to_string(path)
        .map_err(|err| CliError::data(format!("{}: {err}", path.display())))?;
    let doc: serde_json::Value = serde_json::from_str(&text)
        .map_err(|err| CliError::data(format!("{}: {err}", path.display())))?;
    let schema = doc.get("schema").and_then(serde_json::Value::as_str);
    if schema != Some(CURVE_SCHEMA) {
        return Err(CliError::data(format!(
            "{}: expected an error-curve table (schema {CURVE_SCHEMA}), found {}",
            path.display(),
            schema.unwrap_or("none"),
        )));
    }
    let rows = doc
        .get("rows")
        .and_then(serde_json::Value::as_array)
        .ok_or_else(|| {
            CliError::data(format!("{}: the table has no rows array", path.display()))
        })?;
    let mut points = Vec::with_capacity(rows.len());
    for (i, row) in rows.iter().enumerate() {
        let field = |name: &str| {
            row.get(name).and_then(serde_json::Value::as_f64).ok_or_else(|| {
                CliError::data(format!(
                    "{}: row {i} is missing a numeric \"{name}\"",
                    path.display()
                ))
            })
        };
        let trials = row
            .get("trials")
            .and_then(serde_json::Value::as_u64)
            .ok_or_else(|| {
                CliError::data(format!(
                    "{}: row {i} is missing an integer \"trials\"",
                    path.display()
                ))
            })?;
        points.push(CurvePoint {
            p: field("p")?,
            error: field("error")?,
            stderr: field("stderr")?,
            trials,
        });
    }
    NoisyErrorCurve::new(points)
        .map_err(|err| CliError::data(format!("{}: {err}", path.display())))
}
