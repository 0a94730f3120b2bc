//! Where entangled probes provably beat coherent ones.
//!
//! Comparing the classical *lower* bounds against the quantum *upper* bounds
//! from [`crate::bounds`] gives a sufficient condition for advantage. In the
//! weak-probe limit both bound families decay exponentially in the energy,
//! and the comparison collapses to a single rate
//!
//! ```text
//!   nu_th = (Delta_q - 2 Delta_c) / ln 2,
//! ```
//!
//! positive exactly when `eta_W > 1 - eta_B`. A barcode of `n` pixels is then
//! provably read better with entanglement once `n <= nu_th * N_tot`, with
//! analogous conditions for the constrained and trained variants. The
//! verdicts here compare bound families only: a negative margin means "not
//! provable this way", not "no advantage exists".

use alloc::vec::Vec;

use libm::{log, log2};

use crate::error::{Error, Result};
use crate::gaussian::{
    delta_coefficients, fidelity_classical, fidelity_quantum, ProbeBudget, Probes,
    TransmissivityPair,
};
use crate::math::{binary_entropy_bits, LN_2};

/// Outcome of comparing the two bound families at one parameter point.
///
/// `margin` is the log-domain gap between the classical lower bound and the
/// quantum upper bound; `quantum_wins` records a strictly positive margin
/// (ties do not count as a provable separation).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdvantageVerdict {
    /// The threshold rate of the transmissivity pair.
    pub nu_threshold: f64,
    /// Whether the classical lower bound strictly exceeds the quantum upper
    /// bound.
    pub quantum_wins: bool,
    /// `ln(classical lower bound) - ln(quantum upper bound)`, common factors
    /// dropped.
    pub margin: f64,
}

/// The advantage threshold rate `nu_th = (Delta_q - 2 Delta_c) / ln 2`.
///
/// Zero on the line `eta_W = 1 - eta_B` (the two decay coefficients cancel
/// algebraically there) and positive above it.
pub fn nu_threshold(pair: &TransmissivityPair) -> f64 {
    let (delta_q, delta_c) = delta_coefficients(pair);
    (delta_q - 2.0 * delta_c) / LN_2
}

/// One cell of the advantage-region map.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    /// Black-pixel transmissivity.
    pub eta_b: f64,
    /// White-pixel transmissivity.
    pub eta_w: f64,
    /// Threshold rate at this cell.
    pub nu_threshold: f64,
}

/// Tabulates `nu_th` on a `resolution x resolution` grid over
/// `[0, 1] x [0, 1]`, row-major with `eta_b` as the slow axis.
///
/// Requires `resolution >= 2` so both endpoints appear.
pub fn advantage_region_grid(resolution: u32) -> Result<Vec<GridPoint>> {
    if resolution < 2 {
        return Err(Error::InvalidResolution { resolution });
    }
    let step = 1.0 / (resolution - 1) as f64;
    let mut grid = Vec::with_capacity(resolution as usize * resolution as usize);
    for i in 0..resolution {
        let eta_b = (i as f64 * step).min(1.0);
        for j in 0..resolution {
            let eta_w = (j as f64 * step).min(1.0);
            let pair = TransmissivityPair::new(eta_b, eta_w)
                .expect("grid coordinates lie in the unit square");
            grid.push(GridPoint {
                eta_b,
                eta_w,
                nu_threshold: nu_threshold(&pair),
            });
        }
    }
    Ok(grid)
}

/// Verdict for reading an `n`-pixel barcode with the given energy budget.
///
/// With a finite probe count the comparison is
/// `F_c^{2M} >= 2^n F_q^M`, evaluated in log domain as
/// `margin = 2M ln F_c - n ln 2 - M ln F_q`. In the asymptotic regime the
/// fidelity powers become pure exponentials and the margin reduces to
/// `ln 2 * (nu_th * N_tot - n)`.
pub fn barcode_advantage_check(
    n_pixels: u64,
    budget: &ProbeBudget,
    pair: &TransmissivityPair,
) -> Result<AdvantageVerdict> {
    if n_pixels == 0 {
        return Err(Error::ZeroPixels);
    }
    let nu = nu_threshold(pair);
    let margin = match budget.probes() {
        Probes::Finite(m) => {
            let m = m as f64;
            let ln_fq = log(fidelity_quantum(budget.n_signal(), pair)?);
            let ln_fc = log(fidelity_classical(budget.n_signal(), pair)?);
            2.0 * m * ln_fc - n_pixels as f64 * LN_2 - m * ln_fq
        }
        Probes::Asymptotic => LN_2 * (nu * budget.n_total() - n_pixels as f64),
    };
    Ok(AdvantageVerdict {
        nu_threshold: nu,
        quantum_wins: margin > 0.0,
        margin,
    })
}

/// Verdict for the constrained ensemble with exactly `k_whites` white pixels:
/// the pixel-count term `n` is replaced by `n H2(k/n) + 1` and both fidelity
/// powers double.
///
/// Finite form `F_c^{4M} >= 2^{n H + 1} F_q^{2M}`; asymptotic margin
/// `ln 2 * (2 nu_th N_tot - (n H + 1))`.
pub fn kcpf_advantage_check(
    n_pixels: u64,
    k_whites: u64,
    budget: &ProbeBudget,
    pair: &TransmissivityPair,
) -> Result<AdvantageVerdict> {
    if n_pixels == 0 {
        return Err(Error::ZeroPixels);
    }
    if k_whites == 0 || k_whites >= n_pixels {
        return Err(Error::WhiteCountOutOfRange {
            k: k_whites,
            n: n_pixels,
        });
    }
    let nu = nu_threshold(pair);
    let entropy_term = n_pixels as f64 * binary_entropy_bits(k_whites, n_pixels) + 1.0;
    let margin = match budget.probes() {
        Probes::Finite(m) => {
            let m = m as f64;
            let ln_fq = log(fidelity_quantum(budget.n_signal(), pair)?);
            let ln_fc = log(fidelity_classical(budget.n_signal(), pair)?);
            4.0 * m * ln_fc - entropy_term * LN_2 - 2.0 * m * ln_fq
        }
        Probes::Asymptotic => LN_2 * (2.0 * nu * budget.n_total() - entropy_term),
    };
    Ok(AdvantageVerdict {
        nu_threshold: nu,
        quantum_wins: margin > 0.0,
        margin,
    })
}

/// Minimum total photons per pixel for a provable advantage in recognizing
/// patterns against a training set of `training_size` images with minimum
/// cross-class distance `h_min`:
///
/// ```text
///   N_tot >= log2(2 T) / (nu_th * h_min).
/// ```
///
/// Fails with [`Error::NoAdvantageRegime`] when `nu_th <= 0`, where no energy
/// suffices.
pub fn min_photons_for_training_advantage(
    training_size: u64,
    h_min: u64,
    pair: &TransmissivityPair,
) -> Result<f64> {
    if training_size == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    if h_min == 0 {
        return Err(Error::ZeroMinDistance);
    }
    let nu = nu_threshold(pair);
    if nu <= 0.0 {
        return Err(Error::NoAdvantageRegime { nu });
    }
    Ok(log2(2.0 * training_size as f64) / (nu * h_min as f64))
}
