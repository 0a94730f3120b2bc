//! The `advantage-map` table: photon-information threshold over the
//! reflectivity square.
//!
//! `nu_threshold` is positive exactly where an entangled probe extracts more
//! information per photon than the best coherent one, so its sign carves the
//! advantage region out of the `(eta_b, eta_w)` square. The table holds the
//! full grid plus a denser one-dimensional slice along the ideal-white edge
//! `eta_w = 1`, where the threshold is largest.

use qread_core::advantage::nu_threshold;
use qread_core::gaussian::TransmissivityPair;

use crate::config::{parse_grid, ConfigBag};
use crate::error::CliError;
use crate::output::{Cell, Table};

const SCHEMA: &str = "qread.advantage-map.v1";

const COLUMNS: &[&str] = &["section", "eta_b", "eta_w", "nu_threshold"];

pub fn run(
    grid: Option<String>,
    slice_grid: Option<String>,
    bag: &mut ConfigBag,
) -> Result<Table, CliError> {
    let grid = grid
        .or(bag.take_string("grid")?)
        .unwrap_or_else(|| "0:1:101".into());
    let slice_grid = slice_grid
        .or(bag.take_string("slice-grid")?)
        .unwrap_or_else(|| "0:1:201".into());
    let axis = parse_grid(&grid)?;
    let slice_axis = parse_grid(&slice_grid)?;

    let mut table = Table::new(SCHEMA, COLUMNS);
    table.set_config("grid", grid.as_str());
    table.set_config("slice-grid", slice_grid.as_str());
    table.set_meta("grid-points", (axis.len() * axis.len()) as u64);
    table.set_meta("slice-points", slice_axis.len() as u64);

    // Row-major over the square: eta_b is the slow axis.
    for &eta_b in &axis {
        for &eta_w in &axis {
            table.push_row(vec![
                Cell::Text("grid"),
                Cell::Float(eta_b),
                Cell::Float(eta_w),
                Cell::Float(threshold_at(eta_b, eta_w)?),
            ]);
        }
    }
    for &eta_b in &slice_axis {
        table.push_row(vec![
            Cell::Text("slice"),
            Cell::Float(eta_b),
            Cell::Float(1.0),
            Cell::Float(threshold_at(eta_b, 1.0)?),
        ]);
    }
    Ok(table)
}

fn threshold_at(eta_b: f64, eta_w: f64) -> Result<f64, CliError> {
    let pair = TransmissivityPair::new(eta_b, eta_w)?;
    Ok(nu_threshold(&pair))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::OutputFormat;

    fn rows(table: &Table) -> Vec<Vec<String>> {
        table
            .render(OutputFormat::Csv)
            .lines()
            .filter(|l| !l.starts_with('#'))
            .skip(1)
            .map(|l| l.split(',').map(str::to_owned).collect())
            .collect()
    }

    #[test]
    fn small_grids_produce_both_sections() {
        let mut bag = ConfigBag::default();
        let table = run(Some("0.2,0.3".into()), Some("0.5".into()), &mut bag).unwrap();
        let rows = rows(&table);
        assert_eq!(rows.len(), 5);
        assert!(rows[..4].iter().all(|r| r[0] == "grid"));
        assert_eq!(rows[4][0], "slice");
        assert_eq!(rows[4][2], "1");
        // Row-major: eta_b stays put while eta_w sweeps.
        assert_eq!((rows[0][1].as_str(), rows[0][2].as_str()), ("0.2", "0.2"));
        assert_eq!((rows[1][1].as_str(), rows[1][2].as_str()), ("0.2", "0.3"));
        assert_eq!((rows[2][1].as_str(), rows[2][2].as_str()), ("0.3", "0.2"));
    }

    #[test]
    fn threshold_sign_marks_the_advantage_region() {
        // Symmetric under swapping the two reflectivities, zero along
        // eta_w = 1 - eta_b, negative below that line and positive above.
        let a = threshold_at(0.2, 0.3).unwrap();
        let b = threshold_at(0.3, 0.2).unwrap();
        assert_eq!(a, b);
        assert!(a < 0.0, "(0.2, 0.3) sits below the advantage line: {a}");
        assert!(threshold_at(0.9, 0.95).unwrap() > 0.0);
        assert!(threshold_at(0.2, 0.8).unwrap().abs() < 1e-15);
    }

    #[test]
    fn reflectivities_outside_the_unit_interval_are_domain_errors() {
        let mut bag = ConfigBag::default();
        let err = run(Some("0.5,1.2".into()), Some("0.5".into()), &mut bag).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }
}
