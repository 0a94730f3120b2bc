//! The `fidelity` table: entangled versus coherent probe fidelities over a
//! photon budget.
//!
//! Each row fixes a total mean photon number `n_total` spent on one pixel
//! and reports three views of it side by side: the single-probe fidelities
//! at `n_signal` photons each, the finite budget `F^M` with
//! `M = round(n_total / n_signal)` probes, and the weak-probe limit
//! `exp(-n_total * delta)` the budget converges to.

use qread_core::gaussian::{
    asymptotic_fidelity_power, delta_coefficients, fidelity_classical, fidelity_quantum,
    TransmissivityPair,
};

use crate::config::{parse_grid, ConfigBag};
use crate::error::CliError;
use crate::output::{Cell, Table};

const SCHEMA: &str = "qread.fidelity.v1";

const COLUMNS: &[&str] = &[
    "eta_b",
    "eta_w",
    "n_signal",
    "probes",
    "n_total",
    "delta_q",
    "delta_c",
    "fidelity_q",
    "fidelity_c",
    "budget_fidelity_q",
    "budget_fidelity_c",
    "asymptotic_fidelity_q",
    "asymptotic_fidelity_c",
];

#[allow(clippy::too_many_arguments)]
pub fn run(
    eta_b: Option<f64>,
    eta_w: Option<f64>,
    n_signal: Option<f64>,
    probes: Option<u64>,
    n_total: Option<f64>,
    grid: Option<String>,
    bag: &mut ConfigBag,
) -> Result<Table, CliError> {
    let eta_b = eta_b.or(bag.take_f64("eta-b")?).unwrap_or(0.9);
    let eta_w = eta_w.or(bag.take_f64("eta-w")?).unwrap_or(0.95);
    let n_signal = n_signal.or(bag.take_f64("n-signal")?).unwrap_or(1.0);
    let probes = probes.or(bag.take_u64("probes")?);
    let n_total = n_total.or(bag.take_f64("n-total")?);
    let grid = grid.or(bag.take_string("grid")?);

    let fixed = [probes.is_some(), n_total.is_some(), grid.is_some()];
    if fixed.iter().filter(|&&b| b).count() > 1 {
        return Err(CliError::usage(
            "--probes, --n-total, and --grid each fix the photon budget; give at most one",
        ));
    }
    if !n_signal.is_finite() || n_signal <= 0.0 {
        return Err(CliError::numeric(format!(
            "per-probe photon number must be positive, got {n_signal}"
        )));
    }

    // (n_total, probes) points along the budget axis.
    let points: Vec<(f64, u64)> = if let Some(expression) = &grid {
        parse_grid(expression)?
            .into_iter()
            .map(|nt| (nt, probes_for(nt, n_signal)))
            .collect()
    } else if let Some(nt) = n_total {
        vec![(nt, probes_for(nt, n_signal))]
    } else if let Some(m) = probes {
        if m == 0 {
            return Err(CliError::numeric("need at least one probe"));
        }
        vec![(n_signal * m as f64, m)]
    } else {
        vec![(n_signal, 1)]
    };

    let pair = TransmissivityPair::new(eta_b, eta_w)?;
    let (delta_q, delta_c) = delta_coefficients(&pair);
    let f_q = fidelity_quantum(n_signal, &pair)?;
    let f_c = fidelity_classical(n_signal, &pair)?;

    let mut table = Table::new(SCHEMA, COLUMNS);
    table.set_config("eta-b", eta_b);
    table.set_config("eta-w", eta_w);
    table.set_config("n-signal", n_signal);
    if let Some(expression) = &grid {
        table.set_config("grid", expression.as_str());
    } else if let Some(nt) = n_total {
        table.set_config("n-total", nt);
    } else if let Some(m) = probes {
        table.set_config("probes", m);
    }
    for (nt, m) in points {
        table.push_row(vec![
            Cell::Float(eta_b),
            Cell::Float(eta_w),
            Cell::Float(n_signal),
            Cell::Uint(m),
            Cell::Float(nt),
            Cell::Float(delta_q),
            Cell::Float(delta_c),
            Cell::Float(f_q),
            Cell::Float(f_c),
            Cell::Float(f_q.powf(m as f64)),
            Cell::Float(f_c.powf(m as f64)),
            Cell::Float(asymptotic_fidelity_power(nt, delta_q)?),
            Cell::Float(asymptotic_fidelity_power(nt, delta_c)?),
        ]);
    }
    Ok(table)
}

/// Probes that spend `n_total` at `n_signal` each, at least one.
fn probes_for(n_total: f64, n_signal: f64) -> u64 {
    let ratio = n_total / n_signal;
    if ratio >= 9.0e18 {
        u64::MAX
    } else {
        (ratio.round() as u64).max(1)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::output::OutputFormat;

    #[test]
    fn default_is_a_single_probe_row() {
        let mut bag = ConfigBag::default();
        let table = run(None, None, None, None, None, None, &mut bag).unwrap();
        assert_eq!(table.row_count(), 1);
        let csv = table.render(OutputFormat::Csv);
        let row = csv.lines().last().unwrap();
        let fields: Vec<&str> = row.split(',').collect();
        // One probe: the budget fidelity equals the single-probe fidelity.
        assert_eq!(fields[3], "1");
        assert_eq!(fields[7], fields[9]);
        assert_eq!(fields[8], fields[10]);
    }

    #[test]
    fn equal_reflectivities_leave_nothing_to_distinguish() {
        let mut bag = ConfigBag::default();
        let table =
            run(Some(0.7), Some(0.7), None, None, None, None, &mut bag).unwrap();
        let csv = table.render(OutputFormat::Csv);
        let fields: Vec<&str> =
            csv.lines().last().unwrap().split(',').collect();
        for i in 7..13 {
            assert_eq!(fields[i], "1", "column {} should be unit fidelity", i);
        }
    }

    #[test]
    fn budget_axes_are_mutually_exclusive() {
        let mut bag = ConfigBag::default();
        let err = run(
            None,
            None,
            None,
            Some(10),
            None,
            Some("1:10:4".into()),
            &mut bag,
        )
        .unwrap_err();
        assert_eq!(err.exit_code(), 2);

        // The same conflict through the config file.
        let mut bag = ConfigBag::from_json(r#"{"probes": 10, "n-total": 5.0}"#).unwrap();
        let err = run(None, None, None, None, None, None, &mut bag).unwrap_err();
        assert_eq!(err.exit_code(), 2);
    }

    #[test]
    fn probe_count_follows_the_budget() {
        let mut bag = ConfigBag::default();
        let table = run(
            None,
            None,
            Some(1e-3),
            None,
            None,
            Some("1,2".into()),
            &mut bag,
        )
        .unwrap();
        let csv = table.render(OutputFormat::Csv);
        let mut rows = csv.lines().filter(|l| !l.starts_with('#')).skip(1);
        let first: Vec<&str> = rows.next().unwrap().split(',').collect();
        let second: Vec<&str> = rows.next().unwrap().split(',').collect();
        assert_eq!(first[3], "1000");
        assert_eq!(second[3], "2000");
    }
}
