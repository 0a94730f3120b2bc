//! The `bounds` table: error-probability sandwiches for pattern readout.
//!
//! Two ensembles share the command. `barcode` covers all `2^n` pixel
//! patterns and reports the joint-measurement sandwich, its simplified form,
//! the local-measurement sandwich, and the Chernoff rate brackets; `kcpf`
//! covers the patterns with exactly `k` white pixels and reports the series
//! bounds next to their entropy approximation. Every bound also appears as a
//! natural log, which stays informative long after the linear value
//! underflows to zero.

use qread_core::bounds::{
    barcode_error_bounds, barcode_error_bounds_simplified, chernoff_rate_sandwich,
    kcpf_error_bounds, kcpf_pairwise_sum, local_measurement_bounds, min_copies_for_error,
    pairwise_fidelity_sum, BarcodeSpec, BoundInterval,
};
use qread_core::error::Error as CoreError;

use crate::cli::{take_enum, BoundsMode};
use crate::config::{parse_grid, ConfigBag};
use crate::error::CliError;
use crate::output::{Cell, Table};

const BARCODE_SCHEMA: &str = "qread.bounds-barcode.v1";
const KCPF_SCHEMA: &str = "qread.bounds-kcpf.v1";

const BARCODE_COLUMNS: &[&str] = &[
    "n_pixels",
    "probes",
    "fidelity",
    "pairwise_sum",
    "global_lower",
    "global_upper",
    "simplified_lower",
    "simplified_upper",
    "local_lower",
    "local_upper",
    "log_global_lower",
    "log_global_upper",
    "log_simplified_lower",
    "log_simplified_upper",
    "log_local_lower",
    "log_local_upper",
    "chernoff_lower",
    "chernoff_upper",
    "chernoff_upper_tight",
    "min_copies",
];

const KCPF_COLUMNS: &[&str] = &[
    "n_pixels",
    "k_white",
    "probes",
    "fidelity",
    "pairwise_sum",
    "exact_lower",
    "exact_upper",
    "asymptotic_lower",
    "asymptotic_upper",
    "log_exact_lower",
    "log_exact_upper",
    "log_asymptotic_lower",
    "log_asymptotic_upper",
];

#[allow(clippy::too_many_arguments)]
pub fn run(
    mode: Option<BoundsMode>,
    n_pixels: Option<u64>,
    k_white: Option<u64>,
    probes: Option<u64>,
    fidelity: Option<f64>,
    grid: Option<String>,
    epsilon: Option<f64>,
    bag: &mut ConfigBag,
) -> Result<Table, CliError> {
    let mode = match mode.or(take_enum(bag, "mode")?) {
        Some(m) => m,
        None => BoundsMode::Barcode,
    };
    let n_pixels = n_pixels.or(bag.take_u64("n-pixels")?).unwrap_or(4);
    let k_white = k_white.or(bag.take_u64("k-white")?);
    let probes = probes.or(bag.take_u64("probes")?).unwrap_or(1);
    let fidelity = fidelity.or(bag.take_f64("fidelity")?);
    let grid = grid.or(bag.take_string("grid")?);
    let epsilon = epsilon.or(bag.take_f64("epsilon")?);

    match mode {
        BoundsMode::Barcode => {
            if k_white.is_some() {
                return Err(CliError::usage(
                    "--k-white only applies to kcpf mode",
                ));
            }
        }
        BoundsMode::Kcpf => {
            if epsilon.is_some() {
                return Err(CliError::usage(
                    "--epsilon only applies to barcode mode",
                ));
            }
            if k_white.is_none() {
                return Err(CliError::usage("kcpf mode needs --k-white"));
            }
        }
    }
    if fidelity.is_some() && grid.is_some() {
        return Err(CliError::usage(
            "--fidelity and --grid both set the fidelity axis; give one",
        ));
    }

    let fidelities: Vec<f64> = match &grid {
        Some(expression) => parse_grid(expression)?,
        None => vec![fidelity.unwrap_or(0.5)],
    };

    let mut table = match mode {
        BoundsMode::Barcode => Table::new(BARCODE_SCHEMA, BARCODE_COLUMNS),
        BoundsMode::Kcpf => Table::new(KCPF_SCHEMA, KCPF_COLUMNS),
    };
    table.set_config("mode", mode_name(mode));
    table.set_config("n-pixels", n_pixels);
    table.set_config("probes", probes);
    if let Some(k) = k_white {
        table.set_config("k-white", k);
    }
    if let Some(expression) = &grid {
        table.set_config("grid", expression.as_str());
    } else {
        table.set_config("fidelity", fidelities[0]);
    }
    if let Some(eps) = epsilon {
        table.set_config("epsilon", eps);
    }

    let mut warned_degenerate = false;
    for f in fidelities {
        match mode {
            BoundsMode::Barcode => {
                let row = barcode_row(n_pixels, probes, f, epsilon, &mut table, &mut warned_degenerate)?;
                table.push_row(row);
            }
            BoundsMode::Kcpf => {
                let k = k_white.expect("checked above");
                let row = kcpf_row(n_pixels, k, probes, f)?;
                table.push_row(row);
            }
        }
    }
    Ok(table)
}

fn mode_name(mode: BoundsMode) -> &'static str {
    match mode {
        BoundsMode::Barcode => "barcode",
        BoundsMode::Kcpf => "kcpf",
    }
}

fn barcode_row(
    n_pixels: u64,
    probes: u64,
    f: f64,
    epsilon: Option<f64>,
    table: &mut Table,
    warned_degenerate: &mut bool,
) -> Result<Vec<Cell>, CliError> {
    let spec = BarcodeSpec::new(n_pixels, probes, f)?;
    let global = barcode_error_bounds(&spec);
    let simplified = barcode_error_bounds_simplified(&spec);
    let local = local_measurement_bounds(&spec);
    let pairwise = pairwise_fidelity_sum(n_pixels, f.powf(probes as f64))?;
    let rates = chernoff_rate_sandwich(f)?;
    let min_copies = match epsilon {
        None => Cell::Missing,
        Some(eps) => match min_copies_for_error(n_pixels, f, eps) {
            Ok(copies) => Cell::Uint(copies),
            Err(CoreError::DegenerateFidelity { .. }) => {
                if !*warned_degenerate {
                    table.push_warning(
                        "no finite copy count reaches the target at fidelity 0 or 1; those cells are empty"
                            .into(),
                    );
                    *warned_degenerate = true;
                }
                Cell::Missing
            }
            Err(err) => return Err(err.into()),
        },
    };
    let mut row = vec![
        Cell::Uint(n_pixels),
        Cell::Uint(probes),
        Cell::Float(f),
        Cell::Float(pairwise),
    ];
    push_interval(&mut row, &global);
    push_interval(&mut row, &simplified);
    push_interval(&mut row, &local);
    push_logs(&mut row, &global);
    push_logs(&mut row, &simplified);
    push_logs(&mut row, &local);
    row.push(Cell::Float(rates.lower));
    row.push(Cell::Float(rates.upper));
    row.push(Cell::Float(rates.upper_tight));
    row.push(min_copies);
    Ok(row)
}

fn kcpf_row(n_pixels: u64, k_white: u64, probes: u64, f: f64) -> Result<Vec<Cell>, CliError> {
    let bounds = kcpf_error_bounds(n_pixels, k_white, f, probes)?;
    let pairwise = kcpf_pairwise_sum(n_pixels, k_white, f.powf(probes as f64))?;
    let mut row = vec![
        Cell::Uint(n_pixels),
        Cell::Uint(k_white),
        Cell::Uint(probes),
        Cell::Float(f),
        Cell::Float(pairwise),
    ];
    push_interval(&mut row, &bounds.exact);
    push_interval(&mut row, &bounds.asymptotic);
    push_logs(&mut row, &bounds.exact);
    push_logs(&mut row, &bounds.asymptotic);
    Ok(row)
}

fn push_interval(row: &mut Vec<Cell>, interval: &BoundInterval) {
    row.push(Cell::Float(interval.lower));
    row.push(Cell::Float(interval.upper));
}

fn push_logs(row: &mut Vec<Cell>, interval: &BoundInterval) {
    row.push(Cell::Float(interval.log_lower));
    row.push(Cell::Float(interval.log_upper));
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::OutputFormat;

    fn run_defaults(
        mode: Option<BoundsMode>,
        k_white: Option<u64>,
        fidelity: Option<f64>,
        epsilon: Option<f64>,
    ) -> Result<Table, CliError> {
        let mut bag = ConfigBag::default();
        run(mode, None, k_white, None, fidelity, None, epsilon, &mut bag)
    }

    #[test]
    fn kcpf_needs_k_and_rejects_epsilon() {
        let err = run_defaults(Some(BoundsMode::Kcpf), None, None, None).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err =
            run_defaults(Some(BoundsMode::Kcpf), Some(2), None, Some(1e-3)).unwrap_err();
        assert_eq!(err.exit_code(), 2);
        let err = run_defaults(None, Some(2), None, None).unwrap_err();
        assert_eq!(err.exit_code(), 2, "barcode mode should reject --k-white");
    }

    #[test]
    fn out_of_range_fidelity_is_a_domain_error() {
        let err = run_defaults(None, None, Some(1.5), None).unwrap_err();
        assert_eq!(err.exit_code(), 4);
    }

    #[test]
    fn identical_states_at_unit_fidelity_sum_to_the_ensemble() {
        // At F = 1 every cross-pattern fidelity is 1, so the pairwise sum
        // counts the other patterns: 2^n - 1 for barcodes, and for k-white
        // with n=4, k=2 the histogram {2: 4, 4: 1} gives 4 + 1 = 5.
        let table = run_defaults(None, None, Some(1.0), None).unwrap();
        let csv = table.render(OutputFormat::Csv);
        let fields: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
        let sum: f64 = fields[3].parse().unwrap();
        assert!((sum - 15.0).abs() < 1e-12);
        let table =
            run_defaults(Some(BoundsMode::Kcpf), Some(2), Some(1.0), None).unwrap();
        let csv = table.render(OutputFormat::Csv);
        let fields: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
        let sum: f64 = fields[4].parse().unwrap();
        assert!((sum - 5.0).abs() < 1e-12);
    }

    #[test]
    fn degenerate_fidelity_leaves_the_copy_cell_empty() {
        let table = run_defaults(None, None, Some(1.0), Some(1e-3)).unwrap();
        let csv = table.render(OutputFormat::Csv);
        assert!(csv.lines().last().unwrap().ends_with(','));
        assert!(csv.contains("# warning:"));
        // A regular fidelity fills it in.
        let table = run_defaults(None, None, Some(0.5), Some(1e-3)).unwrap();
        let csv = table.render(OutputFormat::Csv);
        let fields: Vec<&str> = csv.lines().last().unwrap().split(',').collect();
        let copies: u64 = fields[19].parse().unwrap();
        assert!(copies >= 1);
    }
}
