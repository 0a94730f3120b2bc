//! Error-probability bounds for discriminating `n`-pixel barcodes.
//!
//! A barcode is a string of `n` black/white pixels, each read with `M`
//! probes; the only physics that enters is the per-pixel, per-probe output
//! fidelity `F`, so two barcodes at Hamming distance `h` have `M`-probe
//! output fidelity `F^(M h)`.  Summing over the ensemble of all `2^n`
//! equiprobable barcodes gives the pairwise-fidelity sum
//! `D_n(f) = (1 + f)^n - 1` (each of the `n` pixels contributes a factor
//! `1 + f`), and the pretty-good-measurement machinery sandwiches the optimal
//! error probability by
//!
//! ```text
//! D_n(F^(2M)) / 2^(n+1)  <=  p_err  <=  1 - (1 - F^M / 2)^n
//! ```
//!
//! with looser but more legible variants, a local-measurement (pixel-by-pixel
//! Helstrom) version, and the restricted ensemble of barcodes with exactly
//! `k` white pixels, whose pairwise sum is a terminating Gauss
//! hypergeometric series.  All bounds are computed in log space and reported
//! with their pre-clamp logarithms, because in the regimes of interest the
//! probabilities routinely sit hundreds of orders of magnitude below what an
//! `f64` can hold.

use libm::{ceil, exp, expm1, log, log1p, sqrt};

use crate::error::{Error, Result};
use crate::math::{binary_entropy_bits, ln_expm1, log_binomial, sqrt_one_minus_sq, LogSum, LN_2};

/// Which family a [`BoundInterval`] belongs to.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    /// Pretty-good-measurement sandwich over the full `2^n` ensemble.
    GlobalPgm,
    /// Pixel-by-pixel Helstrom measurement bounds.
    LocalHelstrom,
    /// Legible weakenings `[n F^(2M) / 2^(n+1), (n/2) F^M]`.
    Simplified,
    /// Exact-series bounds for the `k`-white-pixel ensemble.
    Kcpf,
    /// Entropy-approximation bounds for the `k`-white-pixel ensemble.
    KcpfAsymptotic,
}

/// A two-sided bound on an error probability.
///
/// `lower` and `upper` are clamped into `[0, 1]`; `log_lower` / `log_upper`
/// keep the pre-clamp natural logs so that bounds far below `f64` range
/// remain comparable (e.g. for rate computations).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundInterval {
    /// Clamped lower bound.
    pub lower: f64,
    /// Clamped upper bound.
    pub upper: f64,
    /// Which bound family produced this interval.
    pub kind: BoundKind,
    /// `ln` of the lower bound before clamping.
    pub log_lower: f64,
    /// `ln` of the upper bound before clamping.
    pub log_upper: f64,
}

impl BoundInterval {
    /// Build from natural logs, clamping the linear values into `[0, 1]`
    /// and guarding the order against rounding-level inversions.
    pub(crate) fn from_logs(log_lower: f64, log_upper: f64, kind: BoundKind) -> Self {
        let lower = exp(log_lower).clamp(0.0, 1.0);
        let upper = exp(log_upper).clamp(lower, 1.0);
        BoundInterval { lower, upper, kind, log_lower, log_upper }
    }

    /// Build from already-linear values in `[0, 1]` with `lower <= upper`.
    pub fn new(lower: f64, upper: f64, kind: BoundKind) -> Result<Self> {
        for value in [lower, upper] {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidProbability { name: "bound", value });
            }
        }
        if lower > upper {
            return Err(Error::InvalidProbability { name: "bound order (lower)", value: lower });
        }
        Ok(BoundInterval { lower, upper, kind, log_lower: log(lower), log_upper: log(upper) })
    }
}

/// Problem statement for the barcode bounds: `n` pixels, `M` probes per
/// pixel, per-probe output fidelity `F`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BarcodeSpec {
    n_pixels: u64,
    probes: u64,
    fidelity: f64,
}

impl BarcodeSpec {
    /// Validate `n >= 1`, `M >= 1`, `F` in `[0, 1]`.
    pub fn new(n_pixels: u64, probes: u64, fidelity: f64) -> Result<Self> {
        if n_pixels == 0 {
            return Err(Error::ZeroPixels);
        }
        if probes == 0 {
            return Err(Error::ZeroProbes);
        }
        if !fidelity.is_finite() || !(0.0..=1.0).contains(&fidelity) {
            return Err(Error::InvalidFidelity { value: fidelity });
        }
        Ok(BarcodeSpec { n_pixels, probes, fidelity })
    }

    /// Number of pixels.
    #[inline]
    pub fn n_pixels(&self) -> u64 {
        self.n_pixels
    }

    /// Probes per pixel.
    #[inline]
    pub fn probes(&self) -> u64 {
        self.probes
    }

    /// Per-probe output fidelity.
    #[inline]
    pub fn fidelity(&self) -> f64 {
        self.fidelity
    }

    /// `ln F^M` and `ln F^(2M)`, the two log-fidelity arguments every bound
    /// is built from.
    fn log_powers(&self) -> (f64, f64) {
        let ln_f = log(self.fidelity);
        let m = self.probes as f64;
        (m * ln_f, 2.0 * m * ln_f)
    }
}

/// Sum of output fidelities between one barcode and all `2^n - 1` others:
/// `D_n(f) = (1 + f)^n - 1`, with `f` the per-pixel fidelity.
///
/// Returned linearly; overflows to `inf` for astronomically large `n`,
/// which the log-domain bound evaluations below never do.
pub fn pairwise_fidelity_sum(n_pixels: u64, fidelity: f64) -> Result<f64> {
    if n_pixels == 0 {
        return Err(Error::ZeroPixels);
    }
    if !fidelity.is_finite() || !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::InvalidFidelity { value: fidelity });
    }
    Ok(expm1(n_pixels as f64 * log1p(fidelity)))
}

/// Pretty-good-measurement sandwich over all `2^n` equiprobable barcodes:
///
/// ```text
/// ((F^(2M) + 1)^n - 1) / 2^(n+1)  <=  p_err  <=  1 - (1 - F^M / 2)^n
/// ```
pub fn barcode_error_bounds(spec: &BarcodeSpec) -> BoundInterval {
    let n = spec.n_pixels as f64;
    let (ln_fm, ln_f2m) = spec.log_powers();

    let f2m = exp(ln_f2m);
    let log_lower = if f2m == 0.0 && ln_f2m.is_finite() {
        // F^(2M) underflowed: D_n(f) ~ n f, keep the diagnostic log alive.
        log(n) + ln_f2m - (n + 1.0) * LN_2
    } else {
        ln_expm1_safe(n * log1p(f2m)) - (n + 1.0) * LN_2
    };

    let fm = exp(ln_fm);
    let log_upper = if fm == 0.0 && ln_fm.is_finite() {
        log(n) - LN_2 + ln_fm
    } else {
        ln_of_one_minus_exp(n * log1p(-0.5 * fm))
    };

    BoundInterval::from_logs(log_lower, log_upper, BoundKind::GlobalPgm)
}

/// The legible weakening of [`barcode_error_bounds`]:
/// `[n F^(2M) / 2^(n+1), (n / 2) F^M]`.
pub fn barcode_error_bounds_simplified(spec: &BarcodeSpec) -> BoundInterval {
    let n = spec.n_pixels as f64;
    let (ln_fm, ln_f2m) = spec.log_powers();
    let log_lower = log(n) + ln_f2m - (n + 1.0) * LN_2;
    let log_upper = log(n) - LN_2 + ln_fm;
    BoundInterval::from_logs(log_lower, log_upper, BoundKind::Simplified)
}

/// Bounds when each pixel is measured separately (optimal local strategy):
///
/// ```text
/// 1 - ((1 + sqrt(1 - F^(2M))) / 2)^n  <=  p_err  <=  1 - (1 - F^M / 2)^n
/// ```
pub fn local_measurement_bounds(spec: &BarcodeSpec) -> BoundInterval {
    let n = spec.n_pixels as f64;
    let (ln_fm, ln_f2m) = spec.log_powers();

    // u = sqrt(1 - F^(2M)) enters only through (1 + u)/2; write
    // ln((1+u)/2) = ln1p(-(1-u)/2) with 1 - u = F^(2M)/(1+u), and
    // 1 - F^(2M) via expm1 — no cancellation anywhere in [0, 1].
    let u = sqrt(-expm1(ln_f2m));
    let b = n * log1p(-exp(ln_f2m) / (2.0 * (1.0 + u)));
    let log_lower = ln_of_one_minus_exp(b);

    let fm = exp(ln_fm);
    let log_upper = if fm == 0.0 && ln_fm.is_finite() {
        log(n) - LN_2 + ln_fm
    } else {
        ln_of_one_minus_exp(n * log1p(-0.5 * fm))
    };

    BoundInterval::from_logs(log_lower, log_upper, BoundKind::LocalHelstrom)
}

/// `ln(1 - e^b)` for `b <= 0`, with `b == 0` mapping to `-inf` (value 0).
fn ln_of_one_minus_exp(b: f64) -> f64 {
    if b == 0.0 {
        f64::NEG_INFINITY
    } else {
        crate::math::ln_1m_exp(b)
    }
}

/// [`ln_expm1`] that maps an exactly-zero argument to `-inf` instead of a
/// domain error; callers above feed `a = 0` only when the bound is exactly 0.
fn ln_expm1_safe(a: f64) -> f64 {
    if a == 0.0 {
        f64::NEG_INFINITY
    } else {
        ln_expm1(a)
    }
}

/// Smallest probe count `M` for which the simplified upper bound meets a
/// target error `epsilon`, i.e. the least `M` with
/// `exp(n F^M) - 1 <= epsilon`:
///
/// ```text
/// M = max(1, ceil( ln(n / ln(1 + epsilon)) / (-ln F) ))
/// ```
pub fn min_copies_for_error(n_pixels: u64, fidelity: f64, epsilon: f64) -> Result<u64> {
    if n_pixels == 0 {
        return Err(Error::ZeroPixels);
    }
    if !fidelity.is_finite() || !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::InvalidFidelity { value: fidelity });
    }
    if fidelity == 0.0 || fidelity == 1.0 {
        return Err(Error::DegenerateFidelity { value: fidelity });
    }
    if !epsilon.is_finite() || epsilon <= 0.0 || epsilon >= 1.0 {
        return Err(Error::InvalidProbability { name: "target error", value: epsilon });
    }
    let arg = n_pixels as f64 / log1p(epsilon);
    if arg <= 1.0 {
        return Ok(1);
    }
    let m = ceil(log(arg) / (-log(fidelity)));
    Ok((m as u64).max(1))
}

/// Pairwise-fidelity sum over barcodes with exactly `k` white pixels:
///
/// ```text
/// D_n^k(f) = 2F1(-k, k - n; 1; f^2) - 1
///          = sum_{j>=1} C(k, j) C(n-k, j) f^(2j)
/// ```
///
/// (swapping `j` white pixels with `j` black ones moves Hamming distance
/// `2j`).  The series terminates at `j = min(k, n - k)`; every term is
/// positive, so plain summation is stable.
pub fn kcpf_pairwise_sum(n_pixels: u64, k_white: u64, fidelity: f64) -> Result<f64> {
    check_kcpf_args(n_pixels, k_white, fidelity)?;
    let f2 = fidelity * fidelity;
    let (k, nk) = (k_white as f64, (n_pixels - k_white) as f64);
    let j_max = k_white.min(n_pixels - k_white);
    let mut term = k * nk * f2;
    let mut sum = term;
    for j in 1..j_max {
        let jf = j as f64;
        term *= (k - jf) * (nk - jf) / ((jf + 1.0) * (jf + 1.0)) * f2;
        sum += term;
    }
    Ok(sum)
}

/// `ln D_n^k(f)` with the fidelity passed as `ln f`; log-domain version of
/// [`kcpf_pairwise_sum`] for arguments far below `f64` range.
fn ln_kcpf_series(n_pixels: u64, k_white: u64, ln_f: f64) -> f64 {
    let (k, nk) = (k_white as f64, (n_pixels - k_white) as f64);
    let j_max = k_white.min(n_pixels - k_white);
    let two_ln_f = 2.0 * ln_f;
    let mut acc = LogSum::new();
    let mut ln_term = log(k) + log(nk) + two_ln_f;
    acc.push(ln_term);
    for j in 1..j_max {
        let jf = j as f64;
        ln_term += log(k - jf) + log(nk - jf) - 2.0 * log(jf + 1.0) + two_ln_f;
        acc.push(ln_term);
    }
    acc.value()
}

fn check_kcpf_args(n_pixels: u64, k_white: u64, fidelity: f64) -> Result<()> {
    if n_pixels == 0 {
        return Err(Error::ZeroPixels);
    }
    if k_white == 0 || k_white >= n_pixels {
        return Err(Error::WhiteCountOutOfRange { k: k_white, n: n_pixels });
    }
    if !fidelity.is_finite() || !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::InvalidFidelity { value: fidelity });
    }
    Ok(())
}

/// Exact and entropy-approximation bounds for the `k`-white-pixel ensemble.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KcpfBounds {
    /// Series bounds `[D_n^k(F^(2M)) / (2 C(n,k)), D_n^k(F^M)]`.
    pub exact: BoundInterval,
    /// Approximation `[k(n-k) F^(4M) / 2^(n H2(k/n) + 1), k(n-k) F^(2M)]`
    /// with `H2` the binary entropy in bits.
    pub asymptotic: BoundInterval,
}

/// Error bounds for discriminating the `C(n, k)` barcodes with exactly `k`
/// white pixels, `M` probes per pixel at per-probe fidelity `F`.
pub fn kcpf_error_bounds(
    n_pixels: u64,
    k_white: u64,
    fidelity: f64,
    probes: u64,
) -> Result<KcpfBounds> {
    check_kcpf_args(n_pixels, k_white, fidelity)?;
    if probes == 0 {
        return Err(Error::ZeroProbes);
    }
    let ln_f = log(fidelity);
    let m = probes as f64;

    let exact = BoundInterval::from_logs(
        ln_kcpf_series(n_pixels, k_white, 2.0 * m * ln_f)
            - LN_2
            - log_binomial(n_pixels, k_white),
        ln_kcpf_series(n_pixels, k_white, m * ln_f),
        BoundKind::Kcpf,
    );

    let ln_knk = log(k_white as f64) + log((n_pixels - k_white) as f64);
    let entropy = binary_entropy_bits(k_white, n_pixels);
    let asymptotic = BoundInterval::from_logs(
        ln_knk + 4.0 * m * ln_f - (n_pixels as f64 * entropy + 1.0) * LN_2,
        ln_knk + 2.0 * m * ln_f,
        BoundKind::KcpfAsymptotic,
    );

    Ok(KcpfBounds { exact, asymptotic })
}

/// Chernoff-style bounds on the per-copy error exponent of barcode
/// discrimination, in terms of the largest cross-pattern fidelity `f_max`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChernoffRates {
    /// Guaranteed achievable rate `-(1/3) ln f_max`.
    pub lower: f64,
    /// Loose converse `-ln(f_max^2 / 2)`.
    pub upper: f64,
    /// Tight converse `-ln(1 - sqrt(1 - f_max^2))`.
    pub upper_tight: f64,
}

/// Rate sandwich `lower <= rate <= upper_tight <= upper`.
///
/// `f_max = 0` (orthogonal outputs) legitimately yields infinite rates and
/// is returned as such rather than an error.
pub fn chernoff_rate_sandwich(f_max: f64) -> Result<ChernoffRates> {
    if !f_max.is_finite() || !(0.0..=1.0).contains(&f_max) {
        return Err(Error::InvalidFidelity { value: f_max });
    }
    if f_max == 0.0 {
        return Ok(ChernoffRates {
            lower: f64::INFINITY,
            upper: f64::INFINITY,
            upper_tight: f64::INFINITY,
        });
    }
    let ln_f = log(f_max);
    // `+ 0.0` normalizes the -0.0 that appears at f_max = 1.
    let lower = -ln_f / 3.0 + 0.0;
    let upper = LN_2 - 2.0 * ln_f;
    // 1 - sqrt(1 - f^2) = f^2 / (1 + sqrt(1 - f^2)), stable at both ends.
    let upper_tight = -2.0 * ln_f + log1p(sqrt_one_minus_sq(f_max));
    Ok(ChernoffRates { lower, upper, upper_tight })
}
