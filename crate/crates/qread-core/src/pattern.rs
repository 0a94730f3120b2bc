//! Error functionals for multi-pattern recognition.
//!
//! Discriminating many patterns at once is governed by the pairwise-fidelity
//! functional
//!
//! ```text
//!   B[F] = (1/2) Σ_{c≠c'} P(c) P(c') Σ_h P_cc'(h) F^h,
//! ```
//!
//! where `P_cc'(h)` is the probability that one image from class `c` and one
//! from `c'` differ in exactly `h` pixels and `F` is the per-pixel channel
//! fidelity. The classification error of the pretty-good measurement is
//! sandwiched as `B[F^{2M}] ≤ E ≤ 2K · B[F^M]` with a discreteness factor `K`
//! ([`k_factor`]); for a training set of `T` distinct images `K = T`. Large
//! mean distances make `B` numerically tiny, so every evaluator here has a
//! log-domain form.

use alloc::vec;
use alloc::vec::Vec;

use libm::{exp, log, sqrt};

use crate::bounds::{BoundInterval, BoundKind};
use crate::error::{Error, Result};
use crate::image::{hamming, LabeledDataset};
use crate::math::{ln_erfc, sq, LogSum, LN_2};

/// Distribution of Hamming distances between two classes.
///
/// `counts[h]` is the number of cross-class image pairs at distance `h`;
/// `counts[0]` therefore counts duplicate images appearing in both classes,
/// which collapse the minimum distance to zero and deserve a dataset-quality
/// warning rather than silent acceptance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassPairHistogram {
    class_a: u32,
    class_b: u32,
    counts: Vec<u64>,
    total: u64,
}

impl ClassPairHistogram {
    /// Wraps pair counts for the unordered class pair `{class_a, class_b}`.
    ///
    /// The two ids are stored in ascending order. Fails with
    /// [`Error::SelfPair`] when they coincide and [`Error::EmptyHistogram`]
    /// when no pair was counted at all.
    pub fn new(class_a: u32, class_b: u32, counts: Vec<u64>) -> Result<Self> {
        if class_a == class_b {
            return Err(Error::SelfPair { class: class_a });
        }
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyHistogram);
        }
        let (lo, hi) = if class_a < class_b {
            (class_a, class_b)
        } else {
            (class_b, class_a)
        };
        Ok(ClassPairHistogram {
            class_a: lo,
            class_b: hi,
            counts,
            total,
        })
    }

    /// The class ids, ascending.
    pub fn classes(&self) -> (u32, u32) {
        (self.class_a, self.class_b)
    }

    /// Pair counts indexed by Hamming distance.
    pub fn counts(&self) -> &[u64] {
        &self.counts
    }

    /// Total number of counted pairs.
    pub fn total(&self) -> u64 {
        self.total
    }

    /// Empirical probability of distance `h` (zero past the table end).
    pub fn probability(&self, h: usize) -> f64 {
        match self.counts.get(h) {
            Some(&c) => c as f64 / self.total as f64,
            None => 0.0,
        }
    }

    /// Number of identical images appearing in both classes.
    pub fn cross_class_duplicates(&self) -> u64 {
        self.counts[0]
    }

    /// Mean, standard deviation, and minimum of the distance distribution.
    pub fn summary(&self) -> HistogramSummary {
        let total = self.total as f64;
        let mut mean = 0.0;
        let mut h_min = None;
        for (h, &c) in self.counts.iter().enumerate() {
            if c > 0 {
                mean += h as f64 * c as f64;
                h_min.get_or_insert(h as u64);
            }
        }
        mean /= total;
        let mut var = 0.0;
        for (h, &c) in self.counts.iter().enumerate() {
            if c > 0 {
                var += sq(h as f64 - mean) * c as f64;
            }
        }
        HistogramSummary {
            mu: mean,
            sigma: sqrt(var / total),
            h_min: h_min.expect("constructor guarantees a nonzero count"),
        }
    }
}

/// Moments of a cross-class distance distribution: mean `mu`, standard
/// deviation `sigma`, and smallest distance `h_min` carrying probability.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HistogramSummary {
    mu: f64,
    sigma: f64,
    h_min: u64,
}

impl HistogramSummary {
    /// Validates and wraps externally supplied moments.
    ///
    /// `mu` must be finite and at least `h_min` (the mean of a distribution
    /// supported on `h ≥ h_min` cannot be smaller); `sigma` must be finite
    /// and non-negative.
    pub fn new(mu: f64, sigma: f64, h_min: u64) -> Result<Self> {
        if !sigma.is_finite() || sigma < 0.0 {
            return Err(Error::InvalidSigma { value: sigma });
        }
        if !mu.is_finite() || mu < h_min as f64 {
            return Err(Error::InvalidProbability {
                name: "histogram mean",
                value: mu,
            });
        }
        Ok(HistogramSummary { mu, sigma, h_min })
    }

    /// Mean distance.
    pub fn mu(&self) -> f64 {
        self.mu
    }

    /// Standard deviation of the distance.
    pub fn sigma(&self) -> f64 {
        self.sigma
    }

    /// Smallest distance with nonzero probability.
    pub fn h_min(&self) -> u64 {
        self.h_min
    }
}

/// Class prior `P(c)` together with the training counts that induced it.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassPrior {
    probabilities: Vec<f64>,
    counts: Vec<u64>,
    total: u64,
}

impl ClassPrior {
    /// Empirical prior `P(c) = T_c / T` from per-class training counts.
    pub fn from_counts(counts: &[u64]) -> Result<Self> {
        let total: u64 = counts.iter().sum();
        if total == 0 {
            return Err(Error::EmptyTrainingSet);
        }
        let probabilities = counts.iter().map(|&c| c as f64 / total as f64).collect();
        Ok(ClassPrior {
            probabilities,
            counts: counts.to_vec(),
            total,
        })
    }

    /// A prior given directly as probabilities (no counts recorded).
    ///
    /// The entries must be non-negative and sum to 1 within `1e-9`.
    pub fn from_probabilities(probabilities: &[f64]) -> Result<Self> {
        let mut sum = 0.0;
        for &p in probabilities {
            if !p.is_finite() || p < 0.0 {
                return Err(Error::InvalidProbability {
                    name: "class prior",
                    value: p,
                });
            }
            sum += p;
        }
        if (sum - 1.0).abs() > 1e-9 {
            return Err(Error::UnnormalizedDistribution { sum });
        }
        Ok(ClassPrior {
            probabilities: probabilities.to_vec(),
            counts: vec![0; probabilities.len()],
            total: 0,
        })
    }

    /// Number of classes.
    pub fn num_classes(&self) -> u32 {
        self.probabilities.len() as u32
    }

    /// Prior probability of class `c`.
    pub fn probability(&self, c: u32) -> f64 {
        self.probabilities[c as usize]
    }

    /// Training count of class `c` (zero when built from probabilities).
    pub fn count(&self, c: u32) -> u64 {
        self.counts[c as usize]
    }

    /// Total training count `T` (zero when built from probabilities).
    pub fn total(&self) -> u64 {
        self.total
    }
}

/// The functional `B[f] = (1/2) Σ_{c≠c'} P(c)P(c') Σ_h P_cc'(h) f^h`.
///
/// `histograms` must contain an entry for every unordered class pair on which
/// the prior puts mass; pairs with zero prior weight may be omitted. With one
/// class only, the sum is empty and `B = 0`.
pub fn b_functional(
    histograms: &[ClassPairHistogram],
    prior: &ClassPrior,
    fidelity: f64,
) -> Result<f64> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::InvalidFidelity { value: fidelity });
    }
    Ok(exp(ln_b_functional(histograms, prior, log(fidelity))?))
}

/// Log-domain form of [`b_functional`], taking `ln f` directly.
///
/// The value of `B` decays like `f^h_min` and underflows `f64` for the deep
/// suppression reached by multi-probe fidelities; this form keeps the sweep
/// meaningful there. `ln_fidelity` must be `≤ 0`. Returns `-∞` when `B = 0`.
pub fn ln_b_functional(
    histograms: &[ClassPairHistogram],
    prior: &ClassPrior,
    ln_fidelity: f64,
) -> Result<f64> {
    if !(ln_fidelity <= 0.0) {
        return Err(Error::InvalidFidelity {
            value: exp(ln_fidelity),
        });
    }
    let classes = prior.num_classes();
    for hist in histograms {
        // The ids are stored ascending, so checking the larger one suffices.
        let (_, b) = hist.classes();
        if b >= classes {
            return Err(Error::LabelOutOfRange {
                label: b,
                num_classes: classes,
            });
        }
    }
    let mut sum = LogSum::new();
    for a in 0..classes {
        for b in (a + 1)..classes {
            let weight = prior.probability(a) * prior.probability(b);
            if weight == 0.0 {
                continue;
            }
            let hist = histograms
                .iter()
                .find(|h| h.classes() == (a, b))
                .ok_or(Error::MissingClassPair {
                    class_a: a,
                    class_b: b,
                })?;
            let ln_weight = log(weight) - log(hist.total() as f64);
            for (h, &c) in hist.counts().iter().enumerate() {
                if c == 0 {
                    continue;
                }
                let mut term = ln_weight + log(c as f64);
                // h = 0 contributes f^0 = 1 even at f = 0; skipping the
                // product avoids 0 * (-inf).
                if h > 0 {
                    term += h as f64 * ln_fidelity;
                }
                sum.push(term);
            }
        }
    }
    Ok(sum.value())
}

/// Empirical per-class-pair distance histograms and the empirical prior.
///
/// Walks all unordered cross-class image pairs — an `O(T²)` scan — so sweeps
/// over many fidelities should reuse the returned histograms instead of
/// calling [`b_training`] repeatedly.
pub fn empirical_class_pair_histograms(
    dataset: &LabeledDataset,
) -> Result<(Vec<ClassPairHistogram>, ClassPrior)> {
    let prior = ClassPrior::from_counts(&dataset.class_counts())?;
    let classes = dataset.num_classes() as usize;
    let n_pixels = dataset
        .shape()
        .map(|(w, h)| w as usize * h as usize)
        .unwrap_or(0);
    let mut tables: Vec<Option<Vec<u64>>> = vec![None; classes * classes];
    for i in 0..dataset.len() {
        for j in (i + 1)..dataset.len() {
            let (mut a, mut b) = (dataset.label(i), dataset.label(j));
            if a == b {
                continue;
            }
            if a > b {
                core::mem::swap(&mut a, &mut b);
            }
            let h = hamming(dataset.image(i), dataset.image(j))?;
            tables[a as usize * classes + b as usize]
                .get_or_insert_with(|| vec![0; n_pixels + 1])[h as usize] += 1;
        }
    }
    let mut histograms = Vec::new();
    for a in 0..classes {
        for b in (a + 1)..classes {
            if let Some(counts) = tables[a * classes + b].take() {
                histograms.push(ClassPairHistogram::new(a as u32, b as u32, counts)?);
            }
        }
    }
    Ok((histograms, prior))
}

/// The training-set functional `B_T[f] = Σ_{k≠k'} f^{h_kk'} / (2T²)` over
/// cross-class pairs of training images.
///
/// Evaluated through the empirical histograms of
/// [`empirical_class_pair_histograms`]; the weights `T_c T_c' / T²` and the
/// per-pair probabilities recombine into exactly the pairwise sum. A dataset
/// with images in only one class yields 0.
pub fn b_training(dataset: &LabeledDataset, fidelity: f64) -> Result<f64> {
    let (histograms, prior) = empirical_class_pair_histograms(dataset)?;
    b_functional(&histograms, &prior, fidelity)
}

/// The discreteness factor `K`: the reciprocal of the smallest nonzero
/// `√(P(c,i) P(c',i'))` over entries of a joint pattern distribution with
/// `c ≠ c'`.
///
/// `joint` lists `(class, probability)` per pattern. For the empirical
/// distribution of `T` distinct training images (each with probability
/// `1/T`), `K = T`. Requires nonzero mass on at least two classes.
pub fn k_factor(joint: &[(u32, f64)]) -> Result<f64> {
    let mut sum = 0.0;
    // Smallest nonzero probability per class, tracked sparsely.
    let mut class_min: Vec<(u32, f64)> = Vec::new();
    for &(class, p) in joint {
        if !p.is_finite() || p < 0.0 {
            return Err(Error::InvalidProbability {
                name: "joint probability",
                value: p,
            });
        }
        sum += p;
        if p > 0.0 {
            match class_min.iter_mut().find(|(c, _)| *c == class) {
                Some((_, m)) => *m = m.min(p),
                None => class_min.push((class, p)),
            }
        }
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::UnnormalizedDistribution { sum });
    }
    if class_min.len() < 2 {
        return Err(Error::NoCrossClassMass);
    }
    // The minimum product over distinct classes pairs the two smallest
    // per-class minima.
    let mut smallest = f64::INFINITY;
    let mut second = f64::INFINITY;
    for &(_, m) in &class_min {
        if m < smallest {
            second = smallest;
            smallest = m;
        } else if m < second {
            second = m;
        }
    }
    Ok(1.0 / sqrt(smallest * second))
}

/// Sandwiches the multi-pattern error from two evaluations of the functional:
/// `b_low = B[F^{2M}]` bounds it below, `2K · b_high = 2K · B[F^M]` above
/// (clamped to 1).
pub fn pattern_error_sandwich(b_low: f64, b_high: f64, k_factor: f64) -> Result<BoundInterval> {
    for (name, value) in [("lower functional", b_low), ("upper functional", b_high)] {
        if !value.is_finite() || value < 0.0 {
            return Err(Error::InvalidProbability { name, value });
        }
    }
    pattern_error_sandwich_from_logs(log(b_low), log(b_high), k_factor)
}

/// Log-domain form of [`pattern_error_sandwich`] for functionals that
/// underflow, taking `ln B[F^{2M}]` and `ln B[F^M]`.
pub fn pattern_error_sandwich_from_logs(
    ln_b_low: f64,
    ln_b_high: f64,
    k_factor: f64,
) -> Result<BoundInterval> {
    if !k_factor.is_finite() || k_factor < 1.0 {
        return Err(Error::InvalidProbability {
            name: "discreteness factor",
            value: k_factor,
        });
    }
    Ok(BoundInterval::from_logs(
        ln_b_low,
        LN_2 + log(k_factor) + ln_b_high,
        BoundKind::GlobalPgm,
    ))
}

/// Normal approximation to a single class pair's functional
/// `B_cc'[F] = Σ_h P_cc'(h) F^h`:
///
/// ```text
///   B ≈ (1/2) F^μ exp(σ² ln²F / 2) (erf(w / (√2 σ)) + 1),
///   w = σ² ln F + μ − h⁰,
/// ```
///
/// the exact integral of `F^h` against a normal density truncated at `h⁰`.
/// For `μ ≫ σ` this approaches `F^μ`; for `f → 0` it decays like `F^{h⁰}`.
/// A degenerate `σ = 0` collapses to `F^μ` (for `μ ≥ h⁰`, else 0).
pub fn gaussian_approx_bcc(summary: &HistogramSummary, fidelity: f64) -> Result<f64> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::InvalidFidelity { value: fidelity });
    }
    Ok(exp(ln_gaussian_approx_bcc(summary, log(fidelity))?))
}

/// Log-domain form of [`gaussian_approx_bcc`], taking `ln f ≤ 0`.
///
/// The two leading terms `μ ln F` and `σ² ln²F / 2` grow like thousands while
/// their sum with `ln erfc` stays moderate; evaluating through [`ln_erfc`]
/// keeps the result accurate far past the underflow threshold of the linear
/// form.
pub fn ln_gaussian_approx_bcc(summary: &HistogramSummary, ln_fidelity: f64) -> Result<f64> {
    if !(ln_fidelity <= 0.0) {
        return Err(Error::InvalidFidelity {
            value: exp(ln_fidelity),
        });
    }
    let mu = summary.mu();
    let sigma = summary.sigma();
    let h0 = summary.h_min() as f64;
    if sigma == 0.0 {
        if mu < h0 {
            return Ok(f64::NEG_INFINITY);
        }
        return Ok(if mu == 0.0 { 0.0 } else { mu * ln_fidelity });
    }
    if ln_fidelity == f64::NEG_INFINITY {
        // f -> 0 limit: the truncated normal keeps no mass at h = 0.
        return Ok(f64::NEG_INFINITY);
    }
    let w = sq(sigma) * ln_fidelity + mu - h0;
    // (erf(x) + 1) / 2 = erfc(-x) / 2.
    Ok(mu * ln_fidelity + sq(sigma * ln_fidelity) / 2.0 + ln_erfc(-w / (sqrt(2.0) * sigma)) - LN_2)
}

/// The large-`M` decay-rate window for the training-set error: the rate
/// `-lim (ln E) / M` lies in `[-h_min ln f, -2 h_min ln f]`.
///
/// Requires `h_min ≥ 1` (cross-class duplicates leave no decay at all) and
/// `f` strictly inside `(0, 1)`.
pub fn asymptotic_rate_sandwich(h_min: u64, fidelity: f64) -> Result<(f64, f64)> {
    if h_min == 0 {
        return Err(Error::ZeroMinDistance);
    }
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(Error::InvalidFidelity { value: fidelity });
    }
    if fidelity == 0.0 || fidelity == 1.0 {
        return Err(Error::DegenerateFidelity { value: fidelity });
    }
    let rate = -(h_min as f64) * log(fidelity);
    Ok((rate, 2.0 * rate))
}
