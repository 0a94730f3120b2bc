//! Error type shared by all modules in this crate.
//!
//! Every fallible operation returns [`Result`].  Variants carry the offending
//! values so that callers (CLI, tests) can report actionable messages without
//! string-formatting in the core.

use core::fmt;

/// Convenience alias used throughout the crate.
pub type Result<T> = core::result::Result<T, Error>;

/// All ways the numerical contracts in this crate can be violated.
#[derive(Debug, Clone, Copy, PartialEq)]
#[non_exhaustive]
pub enum Error {
    /// A transmissivity was outside the physical interval `[0, 1]`.
    InvalidTransmissivity {
        /// The rejected value.
        value: f64,
    },
    /// A transmissivity sat on the boundary `{0, 1}` of its allowed range,
    /// but the operation needs it strictly inside `(0, 1)` (e.g. photon
    /// statistics that condition on both click and no-click events).
    BoundaryTransmissivity {
        /// The rejected value.
        value: f64,
    },
    /// The two hypotheses have equal transmissivity, so no measurement can
    /// tell them apart and threshold formulas divide by zero.
    DegeneratePair {
        /// The common transmissivity.
        eta: f64,
    },
    /// Receiver thresholds assume the "black" channel is the lossier one
    /// (`eta_b < eta_w`); the caller passed them in the opposite order.
    UnorderedPair {
        /// Black-pixel transmissivity.
        eta_b: f64,
        /// White-pixel transmissivity.
        eta_w: f64,
    },
    /// A mean photon number was negative or non-finite.
    InvalidPhotonNumber {
        /// The rejected value.
        value: f64,
    },
    /// A probe budget must contain at least one probe.
    ZeroProbes,
    /// A covariance matrix failed a structural check (asymmetric, or it
    /// violates the bosonic uncertainty relation).
    InvalidCovariance,
    /// A Fock-space cutoff outside the supported range.
    InvalidCutoff {
        /// The rejected cutoff.
        cutoff: usize,
    },
    /// A fidelity was outside `[0, 1]`.
    InvalidFidelity {
        /// The rejected value.
        value: f64,
    },
    /// A fidelity of exactly 0 or 1, where the operation divides by
    /// `ln f` or by `1 - f`.
    DegenerateFidelity {
        /// The rejected value.
        value: f64,
    },
    /// A probability-like parameter was outside its valid interval.
    InvalidProbability {
        /// What the parameter means.
        name: &'static str,
        /// The rejected value.
        value: f64,
    },
    /// A barcode must have at least one pixel.
    ZeroPixels,
    /// The white-pixel count `k` must satisfy `1 <= k <= n - 1`.
    WhiteCountOutOfRange {
        /// Requested number of white pixels.
        k: u64,
        /// Number of pixels.
        n: u64,
    },
    /// A histogram had no counts, or a summary had a non-positive width
    /// where a positive one is required.
    EmptyHistogram,
    /// A class-pair histogram was declared between a class and itself.
    SelfPair {
        /// The repeated class label.
        class: u32,
    },
    /// The histogram collection is missing the pair needed by the ensemble.
    MissingClassPair {
        /// First class of the missing pair.
        class_a: u32,
        /// Second class of the missing pair.
        class_b: u32,
    },
    /// Class priors (or a joint distribution) do not sum to one.
    UnnormalizedDistribution {
        /// The actual sum.
        sum: f64,
    },
    /// The joint distribution puts mass on fewer than two classes, so no
    /// cross-class pair exists.
    NoCrossClassMass,
    /// A histogram width parameter must be non-negative.
    InvalidSigma {
        /// The rejected value.
        value: f64,
    },
    /// Cross-class duplicate patterns give a minimum distance of zero, for
    /// which no positive error rate exists.
    ZeroMinDistance,
    /// No threshold photon number exists because the entangled probe never
    /// beats the classical one for this transmissivity pair.
    NoAdvantageRegime {
        /// The (non-positive) threshold rate.
        nu: f64,
    },
    /// A grid needs at least two points per axis.
    InvalidResolution {
        /// The rejected resolution.
        resolution: u32,
    },
    /// Two image buffers (or datasets) disagree in width/height.
    ShapeMismatch {
        /// Expected `(width, height)`.
        expected: (u32, u32),
        /// Found `(width, height)`.
        found: (u32, u32),
    },
    /// A buffer length did not match the declared dimensions.
    LengthMismatch {
        /// Expected number of elements.
        expected: usize,
        /// Found number of elements.
        found: usize,
    },
    /// A label was not below the declared class count.
    LabelOutOfRange {
        /// The offending label.
        label: u32,
        /// Number of classes in the dataset.
        num_classes: u32,
    },
    /// Classification requires at least one training image.
    EmptyTrainingSet,
    /// An error curve violated its contract (non-increasing grid, values
    /// outside `[0, 1]`, zero trials, or too few points to interpolate).
    InvalidCurve {
        /// Which contract failed.
        reason: &'static str,
    },
    /// A query point fell outside the measured range of a curve; the caller
    /// must extend the measurement instead of trusting an extrapolation.
    Extrapolation {
        /// The query point.
        value: f64,
        /// Smallest measured abscissa.
        lo: f64,
        /// Largest measured abscissa.
        hi: f64,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Error::InvalidTransmissivity { value } => {
                write!(f, "transmissivity {value} outside [0, 1]")
            }
            Error::BoundaryTransmissivity { value } => {
                write!(f, "transmissivity {value} must lie strictly inside (0, 1)")
            }
            Error::DegeneratePair { eta } => {
                write!(f, "channels are indistinguishable: eta_b = eta_w = {eta}")
            }
            Error::UnorderedPair { eta_b, eta_w } => {
                write!(
                    f,
                    "expected eta_b < eta_w (black lossier than white), got {eta_b} >= {eta_w}"
                )
            }
            Error::InvalidPhotonNumber { value } => {
                write!(f, "mean photon number {value} must be finite and >= 0")
            }
            Error::ZeroProbes => write!(f, "probe count must be at least 1"),
            Error::InvalidCovariance => {
                write!(f, "matrix is not a valid two-mode covariance matrix")
            }
            Error::InvalidCutoff { cutoff } => {
                write!(f, "Fock cutoff {cutoff} outside supported range [1, 512]")
            }
            Error::InvalidFidelity { value } => write!(f, "fidelity {value} outside [0, 1]"),
            Error::DegenerateFidelity { value } => {
                write!(f, "fidelity {value} must lie strictly inside (0, 1)")
            }
            Error::InvalidProbability { name, value } => {
                write!(f, "{name} = {value} outside its valid range")
            }
            Error::ZeroPixels => write!(f, "barcode must have at least one pixel"),
            Error::WhiteCountOutOfRange { k, n } => {
                write!(f, "white-pixel count {k} outside 1..={} for n = {n}", n.saturating_sub(1))
            }
            Error::EmptyHistogram => write!(f, "histogram has no counts"),
            Error::SelfPair { class } => {
                write!(f, "class pair must join two distinct classes, got ({class}, {class})")
            }
            Error::MissingClassPair { class_a, class_b } => {
                write!(f, "no histogram provided for class pair ({class_a}, {class_b})")
            }
            Error::UnnormalizedDistribution { sum } => {
                write!(f, "distribution sums to {sum}, expected 1")
            }
            Error::NoCrossClassMass => {
                write!(f, "joint distribution has support on fewer than two classes")
            }
            Error::InvalidSigma { value } => {
                write!(f, "histogram width {value} must be finite and >= 0")
            }
            Error::ZeroMinDistance => {
                write!(f, "minimum cross-class distance is zero; patterns collide")
            }
            Error::NoAdvantageRegime { nu } => {
                write!(f, "threshold rate {nu} is not positive: no photon budget suffices")
            }
            Error::InvalidResolution { resolution } => {
                write!(f, "grid resolution {resolution} must be at least 2")
            }
            Error::ShapeMismatch { expected, found } => {
                write!(
                    f,
                    "image shape mismatch: expected {}x{}, found {}x{}",
                    expected.0, expected.1, found.0, found.1
                )
            }
            Error::LengthMismatch { expected, found } => {
                write!(f, "buffer length mismatch: expected {expected}, found {found}")
            }
            Error::LabelOutOfRange { label, num_classes } => {
                write!(f, "label {label} outside 0..{num_classes}")
            }
            Error::EmptyTrainingSet => write!(f, "training set is empty"),
            Error::InvalidCurve { reason } => write!(f, "invalid error curve: {reason}"),
            Error::Extrapolation { value, lo, hi } => {
                write!(
                    f,
                    "query {value} outside measured range [{lo}, {hi}]; refusing to extrapolate"
                )
            }
        }
    }
}

impl core::error::Error for Error {}
