//! Gaussian probe states, output fidelities, and photon-counting receivers.
//!
//! Each barcode pixel is a pure-loss bosonic channel with transmissivity
//! `eta_b` (black) or `eta_w` (white).  Two probe families are compared at
//! equal signal energy `N_S` per use:
//!
//! * **Entangled**: a two-mode squeezed vacuum (TMSV), signal through the
//!   pixel, idler kept.  With `mu = 2 N_S + 1` and `mu' = sqrt(mu^2 - 1)`,
//!   the output covariance matrix is
//!
//!   ```text
//!   V(eta) = 1/2 [ mu I             sqrt(eta) mu' Z ]
//!                [ sqrt(eta) mu' Z  mu(eta) I       ],   mu(eta) = eta mu + (1 - eta)
//!   ```
//!
//!   in `(x1, p1, x2, p2)` ordering with vacuum variance `1/2`; mode 1 is the
//!   retained idler, mode 2 the transmitted signal, `Z = diag(1, -1)`.
//!
//! * **Classical**: a coherent state of the same energy, for which the output
//!   fidelity is `exp(-N_S (sqrt(eta_b) - sqrt(eta_w))^2 / 2)`.
//!
//! The discriminating power of a probe is captured by the fidelity between
//! the two output states.  For the TMSV it admits the closed form
//! `F_q = 1 / (1 + N_S delta_q)` with
//! `delta_q = 1 - sqrt((1-eta_w)(1-eta_b)) - sqrt(eta_w eta_b)`, but it can
//! also be computed from three symplectic invariants of the output
//! covariances ([`invariants`] / [`fidelity_from_invariants`]); the two
//! routes validate each other in the test suite, and a Fock-basis oracle
//! ([`fock::fock_fidelity_oracle`]) provides a third, basis-level route.
//!
//! Beyond fidelities, this module models an explicit photon-counting
//! receiver for both probes ([`photodet_error_coherent`],
//! [`photodet_error_tmsv`]): threshold tests on Poisson / thinned-Poisson
//! counts, evaluated either by exact log-domain summation or by a Gaussian
//! approximation to the count statistics.

use libm::{exp, floor, lgamma, log, log1p, sqrt};

use crate::error::{Error, Result};
use crate::math::{integrate, ln_poisson_cdf, normal_cdf, poisson_tail_bound, LogSum};

pub mod fock;
pub use fock::{fock_fidelity_oracle, FockFidelity};

/// Transmissivities of the two pixel hypotheses.
///
/// `eta_b` is the black-pixel (lossier) channel, `eta_w` the white-pixel
/// channel.  Construction only enforces the physical range `[0, 1]`;
/// operations that need the hypotheses distinct or ordered check separately
/// so that symmetric quantities (fidelities) accept any valid pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransmissivityPair {
    eta_b: f64,
    eta_w: f64,
}

impl TransmissivityPair {
    /// Validate both transmissivities into `[0, 1]`.
    pub fn new(eta_b: f64, eta_w: f64) -> Result<Self> {
        for value in [eta_b, eta_w] {
            if !value.is_finite() || !(0.0..=1.0).contains(&value) {
                return Err(Error::InvalidTransmissivity { value });
            }
        }
        Ok(TransmissivityPair { eta_b, eta_w })
    }

    /// Black-pixel transmissivity.
    #[inline]
    pub fn eta_b(&self) -> f64 {
        self.eta_b
    }

    /// White-pixel transmissivity.
    #[inline]
    pub fn eta_w(&self) -> f64 {
        self.eta_w
    }

    /// Receiver thresholds need `eta_b < eta_w` strictly.
    fn require_ordered(&self) -> Result<()> {
        if self.eta_b == self.eta_w {
            return Err(Error::DegeneratePair { eta: self.eta_b });
        }
        if self.eta_b > self.eta_w {
            return Err(Error::UnorderedPair { eta_b: self.eta_b, eta_w: self.eta_w });
        }
        Ok(())
    }

    /// Thinned photon statistics additionally need both channels strictly
    /// inside `(0, 1)`.
    fn require_interior(&self) -> Result<()> {
        for value in [self.eta_b, self.eta_w] {
            if value <= 0.0 || value >= 1.0 {
                return Err(Error::BoundaryTransmissivity { value });
            }
        }
        Ok(())
    }
}

/// How many probes the transmitter spends.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Probes {
    /// Exactly `M` identical probes per pixel.
    Finite(u64),
    /// The limit of many weak probes (`M -> inf`, `N_S -> 0`) at fixed
    /// total energy.
    Asymptotic,
}

/// Signal energy accounting: per-probe energy, probe count, and their
/// product, the total transmitted energy per pixel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbeBudget {
    n_signal: f64,
    probes: Probes,
    n_total: f64,
}

impl ProbeBudget {
    /// `M` probes of `n_signal` photons each; `n_total = n_signal * M`.
    pub fn finite(n_signal: f64, probes: u64) -> Result<Self> {
        check_photon_number(n_signal)?;
        if probes == 0 {
            return Err(Error::ZeroProbes);
        }
        Ok(ProbeBudget { n_signal, probes: Probes::Finite(probes), n_total: n_signal * probes as f64 })
    }

    /// The weak-probe limit at fixed total energy (`n_signal` loses meaning
    /// and is reported as 0).
    pub fn asymptotic(n_total: f64) -> Result<Self> {
        check_photon_number(n_total)?;
        Ok(ProbeBudget { n_signal: 0.0, probes: Probes::Asymptotic, n_total })
    }

    /// Per-probe signal energy (0 in the asymptotic regime).
    #[inline]
    pub fn n_signal(&self) -> f64 {
        self.n_signal
    }

    /// Probe count or the asymptotic marker.
    #[inline]
    pub fn probes(&self) -> Probes {
        self.probes
    }

    /// Total transmitted energy per pixel.
    #[inline]
    pub fn n_total(&self) -> f64 {
        self.n_total
    }
}

fn check_photon_number(value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(Error::InvalidPhotonNumber { value });
    }
    Ok(())
}

/// Symplectic form `Omega = iY (+) iY` in `(x1, p1, x2, p2)` ordering.
const OMEGA: [[f64; 4]; 4] = [
    [0.0, 1.0, 0.0, 0.0],
    [-1.0, 0.0, 0.0, 0.0],
    [0.0, 0.0, 0.0, 1.0],
    [0.0, 0.0, -1.0, 0.0],
];

/// A two-mode covariance matrix in `(x1, p1, x2, p2)` ordering with vacuum
/// variance `1/2`.
///
/// Valid instances are symmetric and satisfy the bosonic uncertainty
/// relation `V + i Omega / 2 >= 0`, i.e. both symplectic eigenvalues are at
/// least `1/2`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoModeCovariance {
    m: [[f64; 4]; 4],
}

impl TwoModeCovariance {
    /// Validate a raw matrix: symmetry to ~1e-12 (relative to its largest
    /// entry) and symplectic eigenvalues `>= 1/2 - 1e-9`.
    pub fn from_matrix(m: [[f64; 4]; 4]) -> Result<Self> {
        let mut scale: f64 = 0.0;
        for row in &m {
            for &v in row {
                if !v.is_finite() {
                    return Err(Error::InvalidCovariance);
                }
                scale = scale.max(v.abs());
            }
        }
        for i in 0..4 {
            for j in (i + 1)..4 {
                if (m[i][j] - m[j][i]).abs() > 1e-12 * scale.max(1.0) {
                    return Err(Error::InvalidCovariance);
                }
            }
        }
        let cm = TwoModeCovariance { m };
        let [lo, _] = cm.symplectic_eigenvalues();
        if lo < 0.5 - 1e-9 {
            return Err(Error::InvalidCovariance);
        }
        Ok(cm)
    }

    /// The raw matrix.
    #[inline]
    pub fn matrix(&self) -> &[[f64; 4]; 4] {
        &self.m
    }

    /// Symplectic eigenvalues `[lo, hi]`.
    ///
    /// With `V = [[A, C], [C^T, B]]` in 2x2 blocks and
    /// `s = det A + det B + 2 det C`, they are
    /// `nu^2 = (s ± sqrt(s^2 - 4 det V)) / 2`.
    pub fn symplectic_eigenvalues(&self) -> [f64; 2] {
        let m = &self.m;
        let det_a = det2(m[0][0], m[0][1], m[1][0], m[1][1]);
        let det_b = det2(m[2][2], m[2][3], m[3][2], m[3][3]);
        let det_c = det2(m[0][2], m[0][3], m[1][2], m[1][3]);
        let s = det_a + det_b + 2.0 * det_c;
        let det = det4(m);
        // s^2 and 4 det V each carry a few ulps of rounding; when they cancel
        // (degenerate eigenvalues, e.g. a pure state) the raw difference is
        // pure noise, and sqrt would amplify ~1e-16 of it into ~1e-8 of
        // spurious eigenvalue splitting.  Treat anything below the rounding
        // floor as an exact double eigenvalue.
        let raw = s * s - 4.0 * det;
        let noise = 1e-13 * (s * s + 4.0 * det.abs());
        let disc = if raw <= noise { 0.0 } else { raw };
        let root = sqrt(disc);
        let hi = sqrt((0.5 * (s + root)).max(0.0));
        let lo = sqrt((0.5 * (s - root)).max(0.0));
        [lo, hi]
    }

    /// Determinant of the full 4x4 matrix.
    #[inline]
    pub fn det(&self) -> f64 {
        det4(&self.m)
    }
}

/// The three invariants that determine the fidelity between two two-mode
/// Gaussian states of zero mean.
///
/// For covariances `V_B`, `V_W`:
///
/// ```text
/// Delta  = det(V_B + V_W)
/// Gamma  = 2^4 det(Omega V_B Omega V_W - I/4)
/// Lambda = 2^4 det(V_B + i Omega/2) det(V_W + i Omega/2)
/// ```
///
/// `Lambda` is evaluated through the identity
/// `det(V + i Omega/2) = prod_k (nu_k^2 - 1/4)` over symplectic eigenvalues,
/// which keeps the computation real; it vanishes whenever either state has a
/// pure-mode direction, as the loss-channel outputs here always do.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GaussianInvariants {
    /// `det(V_B + V_W)`.
    pub delta: f64,
    /// `2^4 det(Omega V_B Omega V_W - I/4)`.
    pub gamma: f64,
    /// `2^4 det(V_B + i Omega/2) det(V_W + i Omega/2)`, clamped to 0 when a
    /// rounding-level negative appears.
    pub lambda: f64,
}

/// Output covariance of a TMSV probe after one arm passes a loss channel.
///
/// Mode 1 is the retained idler, mode 2 the transmitted signal; see the
/// module docs for the block structure.
pub fn output_covariance(n_signal: f64, eta: f64) -> Result<TwoModeCovariance> {
    check_photon_number(n_signal)?;
    if !eta.is_finite() || !(0.0..=1.0).contains(&eta) {
        return Err(Error::InvalidTransmissivity { value: eta });
    }
    let mu = 2.0 * n_signal + 1.0;
    let mu_p = sqrt(mu * mu - 1.0);
    let mu_eta = eta * mu + (1.0 - eta);
    let c = 0.5 * sqrt(eta) * mu_p;
    let m = [
        [0.5 * mu, 0.0, c, 0.0],
        [0.0, 0.5 * mu, 0.0, -c],
        [c, 0.0, 0.5 * mu_eta, 0.0],
        [0.0, -c, 0.0, 0.5 * mu_eta],
    ];
    // Loss-channel outputs of a valid state are valid by construction; the
    // checked constructor is still used so the invariant is enforced in one
    // place.
    TwoModeCovariance::from_matrix(m)
}

/// Fidelity invariants of a pair of output covariances.
pub fn invariants(v_b: &TwoModeCovariance, v_w: &TwoModeCovariance) -> GaussianInvariants {
    let mut sum = [[0.0f64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            sum[i][j] = v_b.m[i][j] + v_w.m[i][j];
        }
    }
    let delta = det4(&sum);

    let t = matmul(&matmul(&matmul(&OMEGA, &v_b.m), &OMEGA), &v_w.m);
    let mut shifted = t;
    for i in 0..4 {
        shifted[i][i] -= 0.25;
    }
    let gamma = 16.0 * det4(&shifted);

    let lambda = 16.0 * pure_defect(v_b) * pure_defect(v_w);

    GaussianInvariants { delta, gamma, lambda: if lambda < 0.0 { 0.0 } else { lambda } }
}

/// `det(V + i Omega / 2) = (nu_lo^2 - 1/4)(nu_hi^2 - 1/4)`.
fn pure_defect(v: &TwoModeCovariance) -> f64 {
    let [lo, hi] = v.symplectic_eigenvalues();
    // Clamp rounding-level negatives: the uncertainty relation guarantees
    // nu >= 1/2 for valid covariances.
    (lo * lo - 0.25).max(0.0) * (hi * hi - 0.25).max(0.0)
}

/// Uhlmann fidelity of two zero-mean two-mode Gaussian states from their
/// invariants:
///
/// ```text
/// F = 1 / ( sqrt((sqrt G + sqrt L + sqrt D)/2) - sqrt((sqrt G + sqrt L - sqrt D)/2) )
/// ```
pub fn fidelity_from_invariants(inv: &GaussianInvariants) -> Result<f64> {
    let d = inv.delta;
    let g = inv.gamma;
    let l = inv.lambda.max(0.0);
    if !(d > 0.0) || g < 0.0 || !d.is_finite() || !g.is_finite() {
        return Err(Error::InvalidCovariance);
    }
    let sg = sqrt(g);
    let sl = sqrt(l);
    let sd = sqrt(d);
    let plus = sqrt(0.5 * (sg + sl + sd));
    let minus = sqrt((0.5 * (sg + sl - sd)).max(0.0));
    let f_tot = plus - minus;
    if !f_tot.is_finite() || f_tot <= 0.0 {
        return Err(Error::InvalidCovariance);
    }
    Ok((1.0 / f_tot).min(1.0))
}

/// Per-probe fidelity decay coefficients `(delta_q, delta_c)` for the
/// entangled and coherent probes:
///
/// ```text
/// delta_q = 1 - sqrt((1 - eta_w)(1 - eta_b)) - sqrt(eta_w eta_b)
/// delta_c = (sqrt(eta_b) - sqrt(eta_w))^2 / 2
/// ```
///
/// Both vanish iff `eta_b = eta_w` (AM-GM), and `delta_q >= 0` always.
pub fn delta_coefficients(pair: &TransmissivityPair) -> (f64, f64) {
    let (eb, ew) = (pair.eta_b, pair.eta_w);
    // AM-GM guarantees the true value is >= 0; on the diagonal eta_b = eta_w
    // the two square roots cancel the 1 exactly and rounding can leave a
    // stray negative ulp, which downstream energy aggregation rejects.
    let delta_q = (1.0 - sqrt((1.0 - ew) * (1.0 - eb)) - sqrt(ew * eb)).max(0.0);
    let root_diff = sqrt(eb) - sqrt(ew);
    let delta_c = 0.5 * root_diff * root_diff;
    (delta_q, delta_c)
}

/// Output fidelity of the TMSV probe: `F_q = 1 / (1 + N_S delta_q)`.
pub fn fidelity_quantum(n_signal: f64, pair: &TransmissivityPair) -> Result<f64> {
    check_photon_number(n_signal)?;
    let (delta_q, _) = delta_coefficients(pair);
    Ok(1.0 / (1.0 + n_signal * delta_q))
}

/// Output fidelity of the coherent-state probe: `F_c = exp(-N_S delta_c)`.
pub fn fidelity_classical(n_signal: f64, pair: &TransmissivityPair) -> Result<f64> {
    check_photon_number(n_signal)?;
    let (_, delta_c) = delta_coefficients(pair);
    Ok(exp(-n_signal * delta_c))
}

/// Fidelity accumulated over a whole energy budget in the weak-probe limit:
/// `F^M -> exp(-n_total * delta)` as `M -> inf` at fixed `n_total`.
pub fn asymptotic_fidelity_power(n_total: f64, delta: f64) -> Result<f64> {
    check_photon_number(n_total)?;
    if !delta.is_finite() || delta < 0.0 {
        return Err(Error::InvalidProbability { name: "decay coefficient", value: delta });
    }
    Ok(exp(-n_total * delta))
}

/// Error probability of a threshold photon counter fed by coherent probes.
///
/// All the energy is radiated as one coherent state of `n_total` photons;
/// the count is Poisson with mean `n_total * eta`.  The likelihood-ratio
/// threshold is `n_th = n_total (eta_w - eta_b) / ln(eta_w / eta_b)`; with
/// `m = floor(n_th)` the receiver decides "black" iff the count is `<= m`,
/// giving
///
/// ```text
/// p_err = 1/2 (1 - [Q(m + 1, n eta_b) - Q(m + 1, n eta_w)])
/// ```
///
/// where `Q` is the regularized upper incomplete gamma function, i.e. the
/// Poisson CDF, evaluated as an exact log-domain sum.
pub fn photodet_error_coherent(pair: &TransmissivityPair, n_total: f64) -> Result<f64> {
    check_photon_number(n_total)?;
    pair.require_ordered()?;
    let (eb, ew) = (pair.eta_b, pair.eta_w);
    // eta_b = 0 degenerates gracefully: ln(ew/0) = inf, n_th = +0, m = 0.
    let n_th = n_total * (ew - eb) / log(ew / eb);
    let m = floor(n_th) as u64;
    let q_b = exp(ln_poisson_cdf(m, n_total * eb));
    let q_w = exp(ln_poisson_cdf(m, n_total * ew));
    Ok((0.5 * (1.0 - (q_b - q_w))).clamp(0.0, 1.0))
}

/// How [`photodet_error_tmsv`] evaluates the double sum over count pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TmsvMethod {
    /// Exact log-domain summation over `(n1, n2)`, with the Poisson tail
    /// truncated only once its analytic bound is below `1e-9`.
    ExactSum,
    /// Gaussian approximation to the conditional signal-count distribution,
    /// integrated against the Poisson idler density by adaptive quadrature
    /// (relative tolerance `1e-8`).
    GaussianApprox,
}

/// Slope of the photon-coincidence decision boundary `n1 <= c * n2` for the
/// TMSV receiver:
///
/// ```text
/// c = 1 / ( ln(eta_w / eta_b) / ln((1 - eta_b)/(1 - eta_w)) + 1 )
/// ```
///
/// Requires `0 < eta_b < eta_w < 1`.
pub fn tmsv_decision_slope(pair: &TransmissivityPair) -> Result<f64> {
    pair.require_ordered()?;
    pair.require_interior()?;
    let (eb, ew) = (pair.eta_b, pair.eta_w);
    let ratio = log(ew / eb) / log((1.0 - eb) / (1.0 - ew));
    Ok(1.0 / (ratio + 1.0))
}

/// Error probability of the photon-coincidence receiver fed by TMSV probes.
///
/// Aggregated over the budget, the idler count `n2` is Poisson with mean
/// `n_total` and the signal count is the `eta`-thinned copy:
/// `n1 | n2 ~ Binomial(n2, eta)`.  The receiver decides "black" iff
/// `n1 <= c * n2` with `c` from [`tmsv_decision_slope`], so
///
/// ```text
/// p_err = 1/2 [ P(n1 > c n2 | eta_b) + P(n1 <= c n2 | eta_w) ]
/// ```
pub fn photodet_error_tmsv(
    pair: &TransmissivityPair,
    n_total: f64,
    method: TmsvMethod,
) -> Result<f64> {
    check_photon_number(n_total)?;
    let c = tmsv_decision_slope(pair)?;
    if n_total == 0.0 {
        // No light: n2 = 0 with certainty and 0 <= c*0 always decides
        // "black", so exactly one hypothesis is ever wrong.
        return Ok(0.5);
    }
    let p = match method {
        TmsvMethod::ExactSum => tmsv_exact_sum(pair, n_total, c),
        TmsvMethod::GaussianApprox => tmsv_gaussian_approx(pair, n_total, c),
    };
    Ok(p.clamp(0.0, 1.0))
}

fn tmsv_exact_sum(pair: &TransmissivityPair, lambda: f64, c: f64) -> f64 {
    // Truncate the Poisson sum where its analytic tail bound drops below
    // 1e-9; the initial guess covers that with wide margin for all lambda,
    // the loop is a safety net.
    let mut hi = (lambda + 12.0 * sqrt(lambda) + 30.0) as u64;
    while poisson_tail_bound(hi, lambda) >= 1e-9 {
        hi = hi * 2 + 50;
    }
    // ln k! table: three lookups per binomial beat three lgamma calls.
    let mut ln_fact = alloc::vec![0.0f64; hi as usize + 1];
    for k in 1..=hi as usize {
        ln_fact[k] = ln_fact[k - 1] + log(k as f64);
    }
    let ln_lambda = log(lambda);
    let (eb, ew) = (pair.eta_b, pair.eta_w);
    let mut below_b = 0.0; // P(n1 <= c n2 | black)
    let mut below_w = 0.0;
    for n2 in 0..=hi {
        let n2f = n2 as f64;
        let ln_pois = -lambda + n2f * ln_lambda - ln_fact[n2 as usize];
        let t = floor(c * n2f) as u64;
        below_b += exp(ln_pois + ln_binomial_cdf(n2, t, eb, &ln_fact));
        below_w += exp(ln_pois + ln_binomial_cdf(n2, t, ew, &ln_fact));
    }
    0.5 * (1.0 - below_b + below_w)
}

/// `ln P[Binomial(n, p) <= t]` by log-domain summation.
fn ln_binomial_cdf(n: u64, t: u64, p: f64, ln_fact: &[f64]) -> f64 {
    if t >= n {
        return 0.0;
    }
    let ln_p = log(p);
    let ln_q = log1p(-p);
    let ln_n = ln_fact[n as usize];
    let mut acc = LogSum::new();
    for j in 0..=t {
        acc.push(
            ln_n - ln_fact[j as usize] - ln_fact[(n - j) as usize]
                + j as f64 * ln_p
                + (n - j) as f64 * ln_q,
        );
    }
    acc.value().min(0.0)
}

fn tmsv_gaussian_approx(pair: &TransmissivityPair, lambda: f64, c: f64) -> f64 {
    let spread = 10.0 * sqrt(lambda);
    let lo = (lambda - spread).max(0.0);
    let hi = lambda + spread;
    let ln_lambda = log(lambda);
    // P(decide black | eta), with the binomial n1 | n2 replaced by a normal
    // of matching mean and variance and n2 relaxed to a continuous Poisson
    // density exp(-lambda + x ln lambda - ln Gamma(x+1)).
    let g = |eta: f64| -> f64 {
        let z_scale = (c - eta) / sqrt(eta * (1.0 - eta));
        let integrand = move |x: f64| -> f64 {
            let ln_pdf = -lambda + x * ln_lambda - lgamma(x + 1.0);
            exp(ln_pdf) * normal_cdf(z_scale * sqrt(x))
        };
        integrate(&integrand, lo, hi, 1e-8)
    };
    0.5 - 0.5 * (g(pair.eta_b) - g(pair.eta_w))
}

#[inline]
fn det2(a: f64, b: f64, c: f64, d: f64) -> f64 {
    a * d - b * c
}

fn det3(m: &[[f64; 4]; 4], rows: [usize; 3], cols: [usize; 3]) -> f64 {
    let e = |i: usize, j: usize| m[rows[i]][cols[j]];
    e(0, 0) * det2(e(1, 1), e(1, 2), e(2, 1), e(2, 2))
        - e(0, 1) * det2(e(1, 0), e(1, 2), e(2, 0), e(2, 2))
        + e(0, 2) * det2(e(1, 0), e(1, 1), e(2, 0), e(2, 1))
}

fn det4(m: &[[f64; 4]; 4]) -> f64 {
    m[0][0] * det3(m, [1, 2, 3], [1, 2, 3]) - m[0][1] * det3(m, [1, 2, 3], [0, 2, 3])
        + m[0][2] * det3(m, [1, 2, 3], [0, 1, 3])
        - m[0][3] * det3(m, [1, 2, 3], [0, 1, 2])
}

fn matmul(a: &[[f64; 4]; 4], b: &[[f64; 4]; 4]) -> [[f64; 4]; 4] {
    let mut out = [[0.0f64; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            let mut acc = 0.0;
            for (k, bk) in b.iter().enumerate() {
                acc += a[i][k] * bk[j];
            }
            out[i][j] = acc;
        }
    }
    out
}
