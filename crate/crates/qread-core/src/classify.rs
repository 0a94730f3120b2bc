//! Nearest-neighbor classification and the bound-to-error pipeline.
//!
//! A noisy readout's classification error is estimated empirically as a curve
//! `e(p)` over the per-pixel flip probability `p` (Monte Carlo, produced by
//! the driving application and carried here as [`NoisyErrorCurve`]). Physics
//! enters through [`pixel_error_from_source`], which converts an energy
//! budget into `p` — an interval from the single-pixel Helstrom sandwich, or
//! a point value from the photon-counting receivers — and
//! [`compose_pipeline`] chains the two maps into classification-error curves
//! over photon number.

use alloc::vec::Vec;

use libm::{expm1, log1p};

use crate::bounds::{local_measurement_bounds, BarcodeSpec};
use crate::error::{Error, Result};
use crate::gaussian::{
    asymptotic_fidelity_power, delta_coefficients, photodet_error_coherent, photodet_error_tmsv,
    TmsvMethod, TransmissivityPair,
};
use crate::image::{hamming, BinaryImage, LabeledDataset};

/// Result of a nearest-neighbor query.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct NnDecision {
    /// Label of the closest training image.
    pub label: u32,
    /// Index of that image in the training set.
    pub index: usize,
    /// Its Hamming distance to the query.
    pub distance: u64,
}

/// Classifies `query` by the label of the nearest training image under
/// Hamming distance, breaking ties toward the lowest training index.
pub fn nn_classify(train: &LabeledDataset, query: &BinaryImage) -> Result<NnDecision> {
    if train.is_empty() {
        return Err(Error::EmptyTrainingSet);
    }
    let mut best = NnDecision {
        label: train.label(0),
        index: 0,
        distance: hamming(train.image(0), query)?,
    };
    for index in 1..train.len() {
        let distance = hamming(train.image(index), query)?;
        if distance < best.distance {
            best = NnDecision {
                label: train.label(index),
                index,
                distance,
            };
        }
    }
    Ok(best)
}

/// One Monte Carlo estimate on the error-vs-noise curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CurvePoint {
    /// Pixel flip probability the trials were run at.
    pub p: f64,
    /// Estimated classification error.
    pub error: f64,
    /// Standard error of the estimate.
    pub stderr: f64,
    /// Number of classification trials behind the estimate.
    pub trials: u64,
}

/// An empirical classification-error curve `e(p)`, strictly ordered in `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct NoisyErrorCurve {
    points: Vec<CurvePoint>,
}

impl NoisyErrorCurve {
    /// Validates and wraps curve points.
    ///
    /// `p` must be strictly increasing within `[0, 1]`, errors must be
    /// probabilities, standard errors non-negative, and every point backed by
    /// at least one trial.
    pub fn new(points: Vec<CurvePoint>) -> Result<Self> {
        if points.is_empty() {
            return Err(Error::InvalidCurve {
                reason: "curve has no points",
            });
        }
        let mut last_p = -1.0;
        for point in &points {
            if !(0.0..=1.0).contains(&point.p) {
                return Err(Error::InvalidCurve {
                    reason: "p outside [0, 1]",
                });
            }
            if point.p <= last_p {
                return Err(Error::InvalidCurve {
                    reason: "p values must be strictly increasing",
                });
            }
            if !(0.0..=1.0).contains(&point.error) {
                return Err(Error::InvalidCurve {
                    reason: "error outside [0, 1]",
                });
            }
            if !point.stderr.is_finite() || point.stderr < 0.0 {
                return Err(Error::InvalidCurve {
                    reason: "stderr must be finite and non-negative",
                });
            }
            if point.trials == 0 {
                return Err(Error::InvalidCurve {
                    reason: "every point needs at least one trial",
                });
            }
            last_p = point.p;
        }
        Ok(NoisyErrorCurve { points })
    }

    /// The curve points in increasing `p`.
    pub fn points(&self) -> &[CurvePoint] {
        &self.points
    }
}

/// Monotone piecewise-linear interpolant of a [`NoisyErrorCurve`].
///
/// Monte Carlo noise can make the raw estimates locally decreasing even
/// though the true error grows with `p`; the fit first applies
/// trial-weighted isotonic regression (pool adjacent violators) and then
/// interpolates linearly between the smoothed values. Evaluation outside the
/// measured `p` range is refused rather than extrapolated.
#[derive(Debug, Clone)]
pub struct CurveInterpolator {
    ps: Vec<f64>,
    fitted: Vec<f64>,
}

impl CurveInterpolator {
    /// Fits the isotonic piecewise-linear interpolant; needs two points.
    pub fn fit(curve: &NoisyErrorCurve) -> Result<Self> {
        let points = curve.points();
        if points.len() < 2 {
            return Err(Error::InvalidCurve {
                reason: "interpolation needs at least two points",
            });
        }
        // Pool adjacent violators: merge blocks while a later block mean
        // drops below an earlier one.
        struct Block {
            weight: f64,
            weighted_sum: f64,
            len: usize,
        }
        let mut blocks: Vec<Block> = Vec::with_capacity(points.len());
        for point in points {
            let mut block = Block {
                weight: point.trials as f64,
                weighted_sum: point.trials as f64 * point.error,
                len: 1,
            };
            while let Some(prev) = blocks.last() {
                if prev.weighted_sum * block.weight > block.weighted_sum * prev.weight {
                    let prev = blocks.pop().expect("just peeked");
                    block.weight += prev.weight;
                    block.weighted_sum += prev.weighted_sum;
                    block.len += prev.len;
                } else {
                    break;
                }
            }
            blocks.push(block);
        }
        let mut fitted = Vec::with_capacity(points.len());
        for block in &blocks {
            let mean = block.weighted_sum / block.weight;
            fitted.extend(core::iter::repeat(mean).take(block.len));
        }
        Ok(CurveInterpolator {
            ps: points.iter().map(|pt| pt.p).collect(),
            fitted,
        })
    }

    /// The isotonic error values at the curve's `p` knots.
    pub fn fitted(&self) -> &[f64] {
        &self.fitted
    }

    /// Interpolated classification error at pixel error probability `p`.
    ///
    /// Fails with [`Error::Extrapolation`] outside the fitted range; the
    /// composition must never silently invent data past the measurements.
    pub fn eval(&self, p: f64) -> Result<f64> {
        let (lo, hi) = (self.ps[0], *self.ps.last().expect("fit kept >= 2 knots"));
        if !(p >= lo && p <= hi) {
            return Err(Error::Extrapolation { value: p, lo, hi });
        }
        // Index of the first knot >= p; p lands in [ps[i-1], ps[i]].
        let i = self.ps.partition_point(|&x| x < p);
        if i == 0 {
            return Ok(self.fitted[0]);
        }
        let (x0, x1) = (self.ps[i - 1], self.ps[i]);
        let (y0, y1) = (self.fitted[i - 1], self.fitted[i]);
        Ok(y0 + (y1 - y0) * ((p - x0) / (x1 - x0)))
    }
}

/// Which physical receiver sets the single-pixel error probability.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PixelErrorSource {
    /// Optimal joint measurement on entangled probes: Helstrom interval.
    QuantumHelstrom,
    /// Optimal measurement on coherent probes: Helstrom interval.
    ClassicalHelstrom,
    /// Photon counting on the signal and idler of entangled probes.
    QuantumPhotodet,
    /// Photon counting on coherent probes with a threshold decision.
    ClassicalPhotodet,
}

/// A pixel error probability, either bracketed or exact.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PixelError {
    /// Both endpoints of the single-pixel Helstrom sandwich
    /// `[(1 - sqrt(1 - F^2))/2, F/2]`.
    Interval {
        /// Lower endpoint.
        lower: f64,
        /// Upper endpoint.
        upper: f64,
    },
    /// An exact receiver error probability.
    Point(f64),
}

/// Single-pixel error probability at total energy `n_total`, per source.
///
/// Helstrom sources work in the weak-probe limit: the fidelity is
/// `exp(-n_total * delta)` and the returned interval is the one-pixel case of
/// [`local_measurement_bounds`]. Photodetection sources return the exact
/// threshold-receiver error, using `method` for the entangled receiver's
/// counting distribution.
pub fn pixel_error_from_source(
    n_total: f64,
    pair: &TransmissivityPair,
    source: PixelErrorSource,
    method: TmsvMethod,
) -> Result<PixelError> {
    let (delta_q, delta_c) = delta_coefficients(pair);
    let helstrom = |delta: f64| -> Result<PixelError> {
        let f = asymptotic_fidelity_power(n_total, delta)?;
        let interval = local_measurement_bounds(&BarcodeSpec::new(1, 1, f)?);
        Ok(PixelError::Interval {
            lower: interval.lower,
            upper: interval.upper,
        })
    };
    match source {
        PixelErrorSource::QuantumHelstrom => helstrom(delta_q),
        PixelErrorSource::ClassicalHelstrom => helstrom(delta_c),
        PixelErrorSource::QuantumPhotodet => {
            Ok(PixelError::Point(photodet_error_tmsv(pair, n_total, method)?))
        }
        PixelErrorSource::ClassicalPhotodet => {
            Ok(PixelError::Point(photodet_error_coherent(pair, n_total)?))
        }
    }
}

/// One grid point of a composed pipeline curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PipelinePoint {
    /// Total photons per pixel.
    pub n_total: f64,
    /// Lower pixel error probability endpoint (equal to `p_upper` for point
    /// sources).
    pub p_lower: f64,
    /// Upper pixel error probability endpoint.
    pub p_upper: f64,
    /// Classification error at `p_lower`.
    pub e_lower: f64,
    /// Classification error at `p_upper`.
    pub e_upper: f64,
}

/// Classification error versus photon number for one receiver family.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineCurve {
    /// The receiver that produced the pixel errors.
    pub source: PixelErrorSource,
    /// Points in the order of the requested grid.
    pub points: Vec<PipelinePoint>,
}

/// Maps each energy in `n_total_grid` through pixel error probability into
/// classification error, once per requested source.
///
/// The interpolator is monotone, so interval sources keep
/// `e_lower <= e_upper`. Fails with [`Error::Extrapolation`] when a pixel
/// error lands outside the measured curve — extend the curve rather than
/// trusting invented values.
pub fn compose_pipeline(
    curve: &NoisyErrorCurve,
    pair: &TransmissivityPair,
    n_total_grid: &[f64],
    sources: &[PixelErrorSource],
    method: TmsvMethod,
) -> Result<Vec<PipelineCurve>> {
    let interpolator = CurveInterpolator::fit(curve)?;
    let mut curves = Vec::with_capacity(sources.len());
    for &source in sources {
        let mut points = Vec::with_capacity(n_total_grid.len());
        for &n_total in n_total_grid {
            let (p_lower, p_upper) = match pixel_error_from_source(n_total, pair, source, method)? {
                PixelError::Interval { lower, upper } => (lower, upper),
                PixelError::Point(p) => (p, p),
            };
            points.push(PipelinePoint {
                n_total,
                p_lower,
                p_upper,
                e_lower: interpolator.eval(p_lower)?,
                e_upper: interpolator.eval(p_upper)?,
            });
        }
        curves.push(PipelineCurve { source, points });
    }
    Ok(curves)
}

/// Probability that a training set of `training_size` independent draws
/// contains a specific image of probability `p_image`: `1 - (1 - p)^T`.
pub fn finite_training_exact_match(p_image: f64, training_size: u64) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_image) {
        return Err(Error::InvalidProbability {
            name: "image probability",
            value: p_image,
        });
    }
    if training_size == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    Ok(-expm1(training_size as f64 * log1p(-p_image)))
}

/// Distribution of the minimum distance to a training set of
/// `training_size` i.i.d. draws: maps each entry `P(d <= D)` of a cumulative
/// distribution to `1 - (1 - P(d <= D))^T`.
pub fn finite_training_min_distance_cdf(
    d_cumulative: &[f64],
    training_size: u64,
) -> Result<Vec<f64>> {
    if training_size == 0 {
        return Err(Error::EmptyTrainingSet);
    }
    let mut last = 0.0;
    for &value in d_cumulative {
        if !(0.0..=1.0).contains(&value) {
            return Err(Error::InvalidCurve {
                reason: "cumulative values must lie in [0, 1]",
            });
        }
        if value < last {
            return Err(Error::InvalidCurve {
                reason: "cumulative distribution must be non-decreasing",
            });
        }
        last = value;
    }
    Ok(d_cumulative
        .iter()
        .map(|&value| -expm1(training_size as f64 * log1p(-value)))
        .collect())
}
