//! The `dataset-stats` table: cross-class Hamming-distance structure of an
//! IDX image set.
//!
//! Summary rows give each class pair's distance moments, smallest observed
//! distance, and duplicate count; `--emit histograms` dumps the full
//! distributions instead. Histograms may be subsampled for a quick look, but
//! the global minimum distance in the metadata always comes from an exact
//! scan — it is the quantity conclusions hang on, and a subsample can only
//! overestimate it.

use std::path::PathBuf;

use crate::cli::{take_enum, EmitArg, RoleArg, SamplingArg};
use crate::config::ConfigBag;
use crate::error::CliError;
use crate::idx;
use crate::output::{Cell, Table};
use crate::stats::{class_pair_statistics, min_cross_class_distance, PairSampling};

const SUMMARY_SCHEMA: &str = "qread.dataset-stats.v1";
const HISTOGRAM_SCHEMA: &str = "qread.dataset-stats-histograms.v1";

const SUMMARY_COLUMNS: &[&str] = &[
    "class_a",
    "class_b",
    "pairs",
    "mu",
    "sigma",
    "h_min",
    "cross_duplicates",
];

const HISTOGRAM_COLUMNS: &[&str] = &["class_a", "class_b", "distance", "count"];

/// Environment fallback for the dataset directory, below flag and config.
pub const DATASET_DIR_VAR: &str = "QREAD_DATASET_DIR";

/// Default dataset location relative to the working directory.
pub const DATASET_DIR_DEFAULT: &str = "data/mnist";

/// Resolves the dataset directory: flag, then config, then the
/// `QREAD_DATASET_DIR` environment variable, then `data/mnist`.
pub fn resolve_dataset_dir(
    flag: Option<PathBuf>,
    bag: &mut ConfigBag,
) -> Result<PathBuf, CliError> {
    if let Some(dir) = flag.or(bag.take_string("dataset-dir")?.map(PathBuf::from)) {
        return Ok(dir);
    }
    Ok(std::env::var_os(DATASET_DIR_VAR)
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(DATASET_DIR_DEFAULT)))
}

/// Reads a grey threshold (0..=255) from flag or config.
pub fn resolve_threshold(flag: Option<u8>, bag: &mut ConfigBag) -> Result<u8, CliError> {
    match flag {
        Some(t) => Ok(t),
        None => match bag.take_u64("threshold")? {
            None => Ok(128),
            Some(t) => u8::try_from(t).map_err(|_| {
                CliError::usage(format!("threshold must be a grey level 0..=255, got {t}"))
            }),
        },
    }
}

/// Parses `--classes 0,1` into labels.
fn parse_classes(text: &str) -> Result<Vec<u32>, CliError> {
    text.split(',')
        .map(|piece| {
            piece.trim().parse::<u32>().map_err(|_| {
                CliError::usage(format!("bad class list entry \"{piece}\": expected a label"))
            })
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
pub fn run(
    dataset_dir: Option<PathBuf>,
    role: Option<RoleArg>,
    threshold: Option<u8>,
    classes: Option<String>,
    sampling: Option<SamplingArg>,
    samples: Option<u64>,
    emit: Option<EmitArg>,
    seed: u64,
    bag: &mut ConfigBag,
) -> Result<Table, CliError> {
    let dir = resolve_dataset_dir(dataset_dir, bag)?;
    let role = role.or(take_enum(bag, "role")?).unwrap_or(RoleArg::Train);
    let threshold = resolve_threshold(threshold, bag)?;
    let classes = classes.or(bag.take_string("classes")?);
    let sampling = sampling
        .or(take_enum(bag, "sampling")?)
        .unwrap_or(SamplingArg::All);
    let samples = samples.or(bag.take_u64("samples")?);
    let emit = emit.or(take_enum(bag, "emit")?).unwrap_or(EmitArg::Summary);

    if samples.is_some() && sampling == SamplingArg::All {
        return Err(CliError::usage(
            "--samples only applies with --sampling subsample",
        ));
    }
    let samples = samples.unwrap_or(1_000_000);

    let core_role = match role {
        RoleArg::Train => qread_core::image::DatasetRole::Train,
        RoleArg::Test => qread_core::image::DatasetRole::Test,
    };
    let mut data = idx::load_dataset(&dir, core_role, threshold, None)?;
    if let Some(list) = &classes {
        let keep = parse_classes(list)?;
        data = idx::filter_classes(&data, &keep)?;
    }

    let pair_sampling = match sampling {
        SamplingArg::All => PairSampling::AllPairs,
        SamplingArg::Subsample => PairSampling::Subsample { samples, seed },
    };
    let scan = class_pair_statistics(&data, pair_sampling)?;

    let mut table = match emit {
        EmitArg::Summary => Table::new(SUMMARY_SCHEMA, SUMMARY_COLUMNS),
        EmitArg::Histograms => Table::new(HISTOGRAM_SCHEMA, HISTOGRAM_COLUMNS),
    };
    table.set_config("dataset-dir", dir.display().to_string());
    table.set_config("role", role_name(role));
    table.set_config("threshold", u64::from(threshold));
    if let Some(list) = &classes {
        table.set_config("classes", list.as_str());
    }
    table.set_config("sampling", sampling_name(sampling));
    if sampling == SamplingArg::Subsample {
        table.set_config("samples", samples);
    }

    table.set_meta("images", data.len() as u64);

    // The exact global minimum: free from exhaustive histograms, otherwise
    // its own scan.
    let (h_min, h_min_classes) = match sampling {
        SamplingArg::All => scan
            .histograms
            .iter()
            .map(|h| (h.summary().h_min(), h.classes()))
            .min()
            .expect("the scan requires at least one class pair"),
        SamplingArg::Subsample => {
            let min = min_cross_class_distance(&data)
                .expect("the scan requires at least two populated classes");
            (min.distance, (min.class_a, min.class_b))
        }
    };
    table.set_meta("h-min", h_min);
    table.set_meta(
        "h-min-classes",
        serde_json::Value::Array(vec![h_min_classes.0.into(), h_min_classes.1.into()]),
    );

    if !scan.empty_classes.is_empty() {
        let list: Vec<String> = scan.empty_classes.iter().map(u32::to_string).collect();
        table.push_warning(format!("classes with no images: {}", list.join(", ")));
    }
    for histogram in &scan.histograms {
        let duplicates = histogram.cross_class_duplicates();
        if duplicates > 0 {
            let (a, b) = histogram.classes();
            table.push_warning(format!(
                "classes ({a}, {b}): {duplicates} identical image pair(s) across classes"
            ));
        }
    }

    for histogram in &scan.histograms {
        let (a, b) = histogram.classes();
        match emit {
            EmitArg::Summary => {
                let summary = histogram.summary();
                let pairs: u64 = histogram.counts().iter().sum();
                table.push_row(vec![
                    Cell::Uint(u64::from(a)),
                    Cell::Uint(u64::from(b)),
                    Cell::Uint(pairs),
                    Cell::Float(summary.mu()),
                    Cell::Float(summary.sigma()),
                    Cell::Uint(summary.h_min()),
                    Cell::Uint(histogram.cross_class_duplicates()),
                ]);
            }
            EmitArg::Histograms => {
                for (distance, &count) in histogram.counts().iter().enumerate() {
                    if count > 0 {
                        table.push_row(vec![
                            Cell::Uint(u64::from(a)),
                            Cell::Uint(u64::from(b)),
                            Cell::Uint(distance as u64),
                            Cell::Uint(count),
                        ]);
                    }
                }
            }
        }
    }
    Ok(table)
}

fn role_name(role: RoleArg) -> &'static str {
    match role {
        RoleArg::Train => "train",
        RoleArg::Test => "test",
    }
}

fn sampling_name(sampling: SamplingArg) -> &'static str {
    match sampling {
        SamplingArg::All => "all",
        SamplingArg::Subsample => "subsample",
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn class_lists_parse_or_reject() {
        assert_eq!(parse_classes("0,1").unwrap(), vec![0, 1]);
        assert_eq!(parse_classes(" 3 , 7 ").unwrap(), vec![3, 7]);
        assert_eq!(parse_classes("1,x").unwrap_err().exit_code(), 2);
        assert_eq!(parse_classes("").unwrap_err().exit_code(), 2);
    }

    #[test]
    fn threshold_stays_a_grey_level() {
        let mut bag = ConfigBag::from_json(r#"{"threshold": 300}"#).unwrap();
        assert_eq!(resolve_threshold(None, &mut bag).unwrap_err().exit_code(), 2);
        let mut bag = ConfigBag::from_json(r#"{"threshold": 90}"#).unwrap();
        assert_eq!(resolve_threshold(None, &mut bag).unwrap(), 90);
        let mut bag = ConfigBag::from_json(r#"{"threshold": 90}"#).unwrap();
        assert_eq!(resolve_threshold(Some(10), &mut bag).unwrap(), 10);
    }

    #[test]
    fn samples_without_subsampling_is_refused() {
        let mut bag = ConfigBag::default();
        let err = run(
            None,
            None,
            None,
            None,
            Some(SamplingArg::All),
            Some(100),
            None,
            7,
            &mut bag,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }
}
