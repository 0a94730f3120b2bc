//! Numerically careful scalar helpers shared across the crate.
//!
//! Most error probabilities here live many orders of magnitude below the
//! smallest normal `f64`, so sums and products are carried in log space and
//! only exponentiated at the end.  This module collects the stable building
//! blocks: `ln(e^x - 1)`, `ln(1 - e^x)`, log-binomials, a streaming
//! log-sum-exp accumulator, `ln(erfc x)` valid far into the tail, and a small
//! adaptive Simpson integrator for smooth one-dimensional integrands.

use libm::{erfc, exp, expm1, fabs, lgamma, log, log1p, log2, sqrt};

/// Natural log of 2, used when converting between bit- and nat-based rates.
pub const LN_2: f64 = core::f64::consts::LN_2;

/// Stable `ln(e^x - 1)` for `x > 0`.
///
/// For large `x` the direct form overflows, but
/// `ln(e^x - 1) = x + ln(1 - e^-x)`.
#[inline]
pub fn ln_expm1(x: f64) -> f64 {
    if x > 36.0 {
        // e^-x < 2e-16: log1p(-e^-x) is exact to machine precision.
        x + log1p(-exp(-x))
    } else {
        log(expm1(x))
    }
}

/// Stable `ln(1 - e^x)` for `x <= 0`.
///
/// Splits at `x = -ln 2`: above it `1 - e^x` loses bits, so use
/// `ln(-expm1(x))`; below it `e^x` is small and `log1p` is exact.
#[inline]
pub fn ln_1m_exp(x: f64) -> f64 {
    if x > -LN_2 {
        log(-expm1(x))
    } else {
        log1p(-exp(x))
    }
}

/// `ln C(n, k)` via log-gamma.
///
/// Exact to ~1 ulp of the log; safe for `n` far beyond the range where the
/// binomial itself fits in an `f64`.
#[inline]
pub fn log_binomial(n: u64, k: u64) -> f64 {
    debug_assert!(k <= n);
    lgamma((n + 1) as f64) - lgamma((k + 1) as f64) - lgamma((n - k + 1) as f64)
}

/// Binary entropy `H2(k/n)` in bits, with the `0 log 0 = 0` convention.
#[inline]
pub fn binary_entropy_bits(k: u64, n: u64) -> f64 {
    debug_assert!(k <= n && n > 0);
    if k == 0 || k == n {
        return 0.0;
    }
    let p = k as f64 / n as f64;
    let q = 1.0 - p;
    -p * log2(p) - q * log2(q)
}

/// `ln(erfc x)`, valid for all finite `x` including deep tails.
///
/// `erfc` itself underflows near `x ~ 26.5`; beyond `x = 25` we switch to the
/// asymptotic expansion
///
/// ```text
/// erfc(x) = exp(-x^2) / (x sqrt(pi)) * (1 - 1/(2x^2) + 3/(4x^4) - 15/(8x^6) + 105/(16x^8) - ...)
/// ```
///
/// whose truncation error at the crossover is ~3e-13 relative — far below
/// what any bound in this crate resolves.
pub fn ln_erfc(x: f64) -> f64 {
    if x < 25.0 {
        log(erfc(x))
    } else {
        let inv2 = 1.0 / (x * x);
        // Alternating asymptotic series in 1/(2x^2); five terms suffice here.
        let t = 0.5 * inv2;
        let series = 1.0 - t * (1.0 - 3.0 * t * (1.0 - 5.0 * t * (1.0 - 7.0 * t)));
        -x * x - log(x) - 0.5 * log(core::f64::consts::PI) + log(series)
    }
}

/// Standard normal CDF `Phi(x) = erfc(-x / sqrt 2) / 2`.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * erfc(-x / core::f64::consts::SQRT_2)
}

/// Streaming log-sum-exp accumulator.
///
/// Feeds of `-inf` are ignored (they add zero mass); the empty sum is `-inf`.
/// The running maximum is tracked so intermediate sums never overflow.
#[derive(Debug, Clone, Copy)]
pub struct LogSum {
    max: f64,
    scaled: f64,
}

impl LogSum {
    /// An empty accumulator, equal to `ln(0)`.
    pub const fn new() -> Self {
        LogSum { max: f64::NEG_INFINITY, scaled: 0.0 }
    }

    /// Add a term given as its natural log.
    pub fn push(&mut self, ln_term: f64) {
        if ln_term == f64::NEG_INFINITY {
            return;
        }
        if ln_term <= self.max {
            self.scaled += exp(ln_term - self.max);
        } else {
            self.scaled = self.scaled * exp(self.max - ln_term) + 1.0;
            self.max = ln_term;
        }
    }

    /// Natural log of the accumulated sum.
    pub fn value(&self) -> f64 {
        if self.max == f64::NEG_INFINITY {
            f64::NEG_INFINITY
        } else {
            self.max + log(self.scaled)
        }
    }
}

impl Default for LogSum {
    fn default() -> Self {
        Self::new()
    }
}

/// Adaptive Simpson quadrature with a relative tolerance.
///
/// Splits intervals until the classic `|S2 - S1| <= 15 eps` criterion holds,
/// with `eps` scaled to the running estimate so the tolerance is relative.
/// Depth is capped at 48 halvings; at that point the local estimate is
/// accepted (for the smooth, unimodal integrands used here the cap is never
/// reached).
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, rel_tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = simpson(a, b, fa, fm, fb);
    // Absolute floor keeps the recursion from chasing noise when the true
    // integral is exactly zero on a subinterval.
    let floor = 1e-300;
    adapt(f, a, b, fa, fm, fb, whole, rel_tol, floor, 48)
}

#[inline]
fn simpson(a: f64, b: f64, fa: f64, fm: f64, fb: f64) -> f64 {
    (b - a) / 6.0 * (fa + 4.0 * fm + fb)
}

#[allow(clippy::too_many_arguments)]
fn adapt<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    rel_tol: f64,
    floor: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = simpson(a, m, fa, flm, fm);
    let right = simpson(m, b, fm, frm, fb);
    let s2 = left + right;
    let tol = rel_tol * fabs(s2) + floor;
    if depth == 0 || fabs(s2 - whole) <= 15.0 * tol {
        // Richardson extrapolation: one order better than S2 for free.
        return s2 + (s2 - whole) / 15.0;
    }
    adapt(f, a, m, fa, flm, fm, left, rel_tol, floor, depth - 1)
        + adapt(f, m, b, fm, frm, fb, right, rel_tol, floor, depth - 1)
}

/// `x^2` written out; clearer than `powi` in hot formulas.
#[inline]
pub fn sq(x: f64) -> f64 {
    x * x
}

/// Convert a `u64` drawn from an RNG to a uniform `f64` in `[0, 1)`.
///
/// Uses the top 53 bits, the standard construction that makes every
/// representable value equally likely at the `2^-53` grid.
#[inline]
pub fn u64_to_unit_f64(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// ln of the regularized upper tail helper: natural log of
/// `P[Poisson(lambda) <= m]`, evaluated as a finite log-domain sum.
///
/// This equals `ln Q(m + 1, lambda)` with `Q` the regularized upper
/// incomplete gamma function.  A direct sum is exact for the `m <~ 10^5`
/// used here and avoids the cancellation traps of continued-fraction
/// evaluations near `lambda ~ m`.
pub fn ln_poisson_cdf(m: u64, lambda: f64) -> f64 {
    debug_assert!(lambda >= 0.0);
    if lambda == 0.0 {
        return 0.0; // P[X <= m] = 1 for the degenerate-at-zero distribution.
    }
    let ln_lambda = log(lambda);
    let mut acc = LogSum::new();
    for k in 0..=m {
        let kf = k as f64;
        acc.push(kf * ln_lambda - lgamma(kf + 1.0));
    }
    // The CDF is exp(-lambda) * sum; clamp to 0 against rounding overshoot.
    (acc.value() - lambda).min(0.0)
}

/// Upper bound on the Poisson upper tail `P[X > hi]` for `hi >= lambda`.
///
/// Geometric-series bound: beyond `hi` the pmf ratio is at most
/// `lambda / (hi + 2)`, so the tail is dominated by
/// `pmf(hi + 1) / (1 - lambda / (hi + 2))`.
pub fn poisson_tail_bound(hi: u64, lambda: f64) -> f64 {
    let k = (hi + 1) as f64;
    debug_assert!(k > lambda);
    let ln_pmf = -lambda + k * log(lambda.max(f64::MIN_POSITIVE)) - lgamma(k + 1.0);
    let ratio = lambda / (k + 1.0);
    exp(ln_pmf) / (1.0 - ratio)
}

/// `sqrt(1 - f^2)` without cancellation near `f = 1`.
#[inline]
pub fn sqrt_one_minus_sq(f: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&f));
    sqrt((1.0 - f) * (1.0 + f))
}

#[cfg(test)]
mod tests {
    use super::*;
    use libm::erf;

    const TOL: f64 = 1e-12;

    #[test]
    fn ln_expm1_matches_direct_and_survives_large_args() {
        for &x in &[1e-9, 0.1, 1.0, 10.0, 35.0] {
            let direct = log(expm1(x));
            assert!((ln_expm1(x) - direct).abs() <= TOL * direct.abs().max(1.0));
        }
        // Large arguments: ln(e^x - 1) ~ x - e^-x.
        let x = 700.0;
        assert!((ln_expm1(x) - x).abs() < 1e-300);
        // Branch continuity at the crossover.
        assert!((ln_expm1(36.0 + 1e-9) - ln_expm1(36.0 - 1e-9)).abs() < 1e-8);
    }

    #[test]
    fn ln_1m_exp_branches_agree() {
        // The naive form is well-conditioned only away from 0; compare there.
        for &x in &[-0.1, -LN_2, -5.0, -50.0] {
            let direct = log(1.0 - exp(x));
            let stable = ln_1m_exp(x);
            if direct.is_finite() {
                assert!(
                    (stable - direct).abs() <= 1e-9 * direct.abs().max(1.0),
                    "x={x}: {stable} vs {direct}"
                );
            }
        }
        // Near zero: ln(1 - e^x) = ln(-x) + ln(1 + x/2 + x^2/6 + ...), and
        // for x = -1e-12 everything past the linear correction is below
        // double precision.
        let x = -1e-12;
        let series = log(1e-12) + log1p(-0.5e-12);
        assert!((ln_1m_exp(x) - series).abs() < 1e-12);
    }

    #[test]
    fn log_binomial_is_exact_for_small_cases() {
        assert!((log_binomial(10, 3) - log(120.0)).abs() < TOL);
        assert!((log_binomial(4, 0)).abs() < TOL);
        assert!((log_binomial(60, 30) - log(118_264_581_564_861_424.0)).abs() < 1e-10);
    }

    #[test]
    fn binary_entropy_edges_and_symmetry() {
        assert_eq!(binary_entropy_bits(0, 8), 0.0);
        assert_eq!(binary_entropy_bits(8, 8), 0.0);
        assert!((binary_entropy_bits(4, 8) - 1.0).abs() < TOL);
        assert!((binary_entropy_bits(3, 8) - binary_entropy_bits(5, 8)).abs() < TOL);
    }

    #[test]
    fn ln_erfc_matches_erfc_below_crossover() {
        for &x in &[-3.0, 0.0, 1.0, 5.0, 20.0, 24.9] {
            let direct = log(erfc(x));
            assert!((ln_erfc(x) - direct).abs() < 1e-11 * direct.abs().max(1.0));
        }
    }

    #[test]
    fn ln_erfc_is_continuous_at_crossover_and_sane_in_tail() {
        let below = ln_erfc(25.0 - 1e-9);
        let above = ln_erfc(25.0 + 1e-9);
        assert!((below - above).abs() < 1e-6, "{below} vs {above}");
        // Tail dominated by -x^2: check the leading term at x = 100.
        let v = ln_erfc(100.0);
        assert!((v + 10_000.0 + log(100.0) + 0.5 * log(core::f64::consts::PI)).abs() < 1e-4);
    }

    #[test]
    fn normal_cdf_reference_points() {
        assert!((normal_cdf(0.0) - 0.5).abs() < TOL);
        assert!((normal_cdf(1.0) - 0.841_344_746_068_542_9).abs() < 1e-12);
        assert!((normal_cdf(-1.0) + normal_cdf(1.0) - 1.0).abs() < TOL);
    }

    #[test]
    fn logsum_matches_naive_and_handles_spread() {
        let terms = [-1000.0, -1001.0, -999.5];
        let mut acc = LogSum::new();
        for &t in &terms {
            acc.push(t);
        }
        let shifted: f64 = terms.iter().map(|t| exp(t + 999.5)).sum();
        assert!((acc.value() - (log(shifted) - 999.5)).abs() < TOL);
        assert_eq!(LogSum::new().value(), f64::NEG_INFINITY);
    }

    #[test]
    fn simpson_integrates_polynomials_and_gaussians() {
        let cubic = |x: f64| x * x * x - 2.0 * x + 1.0;
        // Simpson is exact on cubics: integral over [0,2] is 2.
        assert!((integrate(&cubic, 0.0, 2.0, 1e-10) - 2.0).abs() < 1e-12);

        let gauss = |x: f64| exp(-x * x);
        let half_sqrt_pi_erf = 0.5 * sqrt(core::f64::consts::PI) * erf(3.0);
        assert!((integrate(&gauss, 0.0, 3.0, 1e-10) - half_sqrt_pi_erf).abs() < 1e-10);
    }

    #[test]
    fn poisson_cdf_matches_direct_sum_and_tail_bound_holds() {
        let lambda = 47.5;
        let m = 60;
        let direct: f64 = (0..=m).map(|k| {
            exp(-lambda + k as f64 * log(lambda) - lgamma(k as f64 + 1.0))
        }).sum();
        assert!((exp(ln_poisson_cdf(m, lambda)) - direct).abs() < 1e-12);
        assert_eq!(ln_poisson_cdf(5, 0.0), 0.0);

        // Tail bound really bounds the tail (compare against 1 - CDF).
        let hi = 90;
        let tail = 1.0 - exp(ln_poisson_cdf(hi, lambda));
        assert!(poisson_tail_bound(hi, lambda) >= tail);
        assert!(poisson_tail_bound(hi, lambda) < 1e-6);
    }

    #[test]
    fn sqrt_one_minus_sq_stable_near_one() {
        // Exactly representable point: 1 - f = 2^-47, so the true value is
        // 2^-23 sqrt(1 - 2^-48) and the product form must hit it to a few
        // ulp.  (The naive 1 - f*f loses ~1e-3 of relative accuracy here.)
        let f = 1.0 - 1.0 / ((1u64 << 47) as f64);
        let expect = 1.0 / ((1u64 << 23) as f64);
        assert!((sqrt_one_minus_sq(f) - expect).abs() < 1e-13 * expect);
        assert_eq!(sqrt_one_minus_sq(1.0), 0.0);
        assert_eq!(sqrt_one_minus_sq(0.0), 1.0);
    }

    #[test]
    fn unit_float_conversion_covers_range() {
        assert_eq!(u64_to_unit_f64(0), 0.0);
        let max = u64_to_unit_f64(u64::MAX);
        assert!(max < 1.0 && max > 1.0 - 1e-15);
        assert!((u64_to_unit_f64(1u64 << 63) - 0.5).abs() < 1e-15);
    }
}
