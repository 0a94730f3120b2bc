//! Randomized and grid-swept invariants that tie the modules together:
//! orderings between bound families, agreement between independent
//! computation routes, and structural symmetries of the fidelity formulas.

use libm::{exp, log, pow};
use proptest::prelude::*;
use rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use qread_core::bounds::{
    barcode_error_bounds, barcode_error_bounds_simplified, chernoff_rate_sandwich,
    kcpf_error_bounds, kcpf_pairwise_sum, local_measurement_bounds, pairwise_fidelity_sum,
    BarcodeSpec,
};
use qread_core::classify::nn_classify;
use qread_core::gaussian::{
    asymptotic_fidelity_power, delta_coefficients, fidelity_classical, fidelity_from_invariants,
    fidelity_quantum, fock_fidelity_oracle, invariants, output_covariance,
    photodet_error_coherent, photodet_error_tmsv, TmsvMethod, TransmissivityPair,
};
use qread_core::image::{hamming, BinaryImage, DatasetRole, LabeledDataset};
use qread_core::math::u64_to_unit_f64;
use qread_core::pattern::{b_training, empirical_class_pair_histograms, ln_b_functional};

fn unit(rng: &mut ChaCha8Rng) -> f64 {
    u64_to_unit_f64(rng.next_u64())
}

// ---------------------------------------------------------------------------
// Gaussian-probe invariants
// ---------------------------------------------------------------------------

#[test]
fn delta_ordering_and_power_ordering_on_dense_grid() {
    // delta_q >= delta_c >= 0 everywhere on the unit square, so the
    // budget-aggregated fidelities order the same way at every energy.
    for i in 0..=100u32 {
        for j in 0..=100u32 {
            let pair = TransmissivityPair::new(i as f64 / 100.0, j as f64 / 100.0).unwrap();
            let (dq, dc) = delta_coefficients(&pair);
            assert!(dc >= 0.0, "delta_c < 0 at ({i},{j})");
            assert!(dq >= dc - 1e-15, "delta_q < delta_c at ({i},{j}): {dq} vs {dc}");
            for &n_total in &[0.0, 1.0, 350.0] {
                let fq = asymptotic_fidelity_power(n_total, dq).unwrap();
                let fc = asymptotic_fidelity_power(n_total, dc).unwrap();
                assert!(fq <= fc + 1e-15);
            }
        }
    }
}

proptest! {
    /// `1/(1+x) >= e^-x`: the finite-energy quantum fidelity dominates its
    /// weak-probe limit at equal signal energy.
    #[test]
    fn quantum_fidelity_dominates_its_asymptotic_form(
        n_signal in 0.0..10.0f64,
        eta_b in 0.0..=1.0f64,
        eta_w in 0.0..=1.0f64,
    ) {
        let pair = TransmissivityPair::new(eta_b, eta_w).unwrap();
        let (dq, _) = delta_coefficients(&pair);
        let f = fidelity_quantum(n_signal, &pair).unwrap();
        prop_assert!(f >= exp(-n_signal * dq) - 1e-15);
        prop_assert!((0.0..=1.0).contains(&f));
    }

    /// Every fidelity-layer quantity is symmetric under swapping the two
    /// transmissivities.
    #[test]
    fn exchange_symmetry_of_fidelities(
        n_signal in 0.0..6.0f64,
        eta_b in 0.0..=1.0f64,
        eta_w in 0.0..=1.0f64,
    ) {
        let ab = TransmissivityPair::new(eta_b, eta_w).unwrap();
        let ba = TransmissivityPair::new(eta_w, eta_b).unwrap();
        let (dq_ab, dc_ab) = delta_coefficients(&ab);
        let (dq_ba, dc_ba) = delta_coefficients(&ba);
        prop_assert_eq!(dq_ab, dq_ba);
        prop_assert_eq!(dc_ab, dc_ba);
        prop_assert_eq!(
            fidelity_quantum(n_signal, &ab).unwrap(),
            fidelity_quantum(n_signal, &ba).unwrap()
        );
        prop_assert_eq!(
            fidelity_classical(n_signal, &ab).unwrap(),
            fidelity_classical(n_signal, &ba).unwrap()
        );
    }

    /// Both classical fidelity and the Fock-basis oracle stay inside [0, 1],
    /// and the oracle honors its own reported truncation bound at cutoff 24.
    #[test]
    fn fock_oracle_within_its_reported_bound(
        n_signal in 0.01..2.0f64,
        eta_b in 0.0..=1.0f64,
        eta_w in 0.0..=1.0f64,
    ) {
        let pair = TransmissivityPair::new(eta_b, eta_w).unwrap();
        let closed = fidelity_quantum(n_signal, &pair).unwrap();
        let f = fock_fidelity_oracle(n_signal, &pair, 24).unwrap();
        prop_assert!((0.0..=1.0 + 1e-12).contains(&f.value));
        prop_assert!(
            (f.value - closed).abs() <= f.truncation_bound + 1e-12,
            "oracle drifted: |{} - {closed}| > {}", f.value, f.truncation_bound
        );
    }
}

#[test]
fn invariant_route_matches_closed_form_on_random_sample() {
    // 1000 random (N_S, eta_b, eta_w) triples: the determinant route through
    // the output covariances agrees with the closed-form fidelity, the
    // purity invariant vanishes, and both covariances are physical.
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..1000 {
        let n_signal = 4.0 * unit(&mut rng);
        let eta_b = unit(&mut rng);
        let eta_w = unit(&mut rng);
        let pair = TransmissivityPair::new(eta_b, eta_w).unwrap();
        let vb = output_covariance(n_signal, eta_b).unwrap();
        let vw = output_covariance(n_signal, eta_w).unwrap();
        for v in [&vb, &vw] {
            let [lo, _] = v.symplectic_eigenvalues();
            assert!(lo >= 0.5 - 1e-9, "unphysical output covariance: nu_lo = {lo}");
        }
        let inv = invariants(&vb, &vw);
        assert!(inv.lambda.abs() < 1e-12, "purity invariant nonzero: {}", inv.lambda);
        let via_inv = fidelity_from_invariants(&inv).unwrap();
        let closed = fidelity_quantum(n_signal, &pair).unwrap();
        assert!(
            (via_inv - closed).abs() < 1e-10,
            "N={n_signal}, ({eta_b},{eta_w}): {via_inv} vs {closed}"
        );
    }
}

#[test]
fn photodetection_errors_monotone_and_bounded() {
    // Both receivers only improve with more light, and neither can do worse
    // than the coin flip they start from at zero energy.
    for &(eb, ew) in &[(0.6, 0.99), (0.9, 0.95), (0.2, 0.5)] {
        let pair = TransmissivityPair::new(eb, ew).unwrap();
        let mut last_c = 0.5 + 1e-12;
        let mut last_t = 0.5 + 1e-12;
        for &n_total in &[0.0, 0.5, 2.0, 10.0, 50.0, 200.0, 1000.0] {
            let pc = photodet_error_coherent(&pair, n_total).unwrap();
            let pt = photodet_error_tmsv(&pair, n_total, TmsvMethod::ExactSum).unwrap();
            assert!((0.0..=0.5 + 1e-12).contains(&pc), "coherent out of range: {pc}");
            assert!((0.0..=0.5 + 1e-12).contains(&pt), "tmsv out of range: {pt}");
            assert!(pc <= last_c + 1e-9, "coherent error grew at n_total={n_total}");
            assert!(pt <= last_t + 1e-9, "tmsv error grew at n_total={n_total}");
            last_c = pc;
            last_t = pt;
        }
    }
}

// ---------------------------------------------------------------------------
// Bound-family orderings
// ---------------------------------------------------------------------------

#[test]
fn bound_families_ordered_across_full_grid() {
    // For every (n <= 12, M <= 3, F on a 21-point grid): each interval is
    // ordered, the simplified pair brackets the global pair, and the local
    // upper bound sits below the clamped product-expansion upper bound
    // (1 + F^M)^n - 1.
    for n in 1..=12u64 {
        for m in 1..=3u64 {
            for i in 0..=20u32 {
                let f = i as f64 / 20.0;
                let spec = BarcodeSpec::new(n, m, f).unwrap();
                let g = barcode_error_bounds(&spec);
                let s = barcode_error_bounds_simplified(&spec);
                let l = local_measurement_bounds(&spec);
                assert!(g.lower <= g.upper + 1e-15);
                assert!(s.lower <= s.upper + 1e-15);
                assert!(l.lower <= l.upper + 1e-15);
                assert!(s.log_lower <= g.log_lower + 1e-12);
                assert!(g.log_upper <= s.log_upper + 1e-12);
                let expansion_upper = (pow(1.0 + pow(f, m as f64), n as f64) - 1.0).min(1.0);
                assert!(
                    l.upper <= expansion_upper + 1e-12,
                    "n={n}, m={m}, f={f}: local upper {} above expansion {expansion_upper}",
                    l.upper
                );
            }
        }
    }
}

#[test]
fn bounds_monotone_in_probes_and_fidelity() {
    // More probes never hurt; higher per-probe fidelity never helps.  The
    // comparison uses the pre-clamp logs so deep-suppression regimes stay
    // ordered too.
    let fs: Vec<f64> = (0..=20).map(|i| i as f64 / 20.0).collect();
    for n in [1u64, 3, 8, 40] {
        for m in 1..=5u64 {
            for &f in &fs {
                let a = barcode_error_bounds(&BarcodeSpec::new(n, m, f).unwrap());
                let b = barcode_error_bounds(&BarcodeSpec::new(n, m + 1, f).unwrap());
                assert!(b.log_lower <= a.log_lower + 1e-9);
                assert!(b.log_upper <= a.log_upper + 1e-9);
                let la = local_measurement_bounds(&BarcodeSpec::new(n, m, f).unwrap());
                let lb = local_measurement_bounds(&BarcodeSpec::new(n, m + 1, f).unwrap());
                assert!(lb.log_lower <= la.log_lower + 1e-9);
                assert!(lb.log_upper <= la.log_upper + 1e-9);
            }
            for w in fs.windows(2) {
                let lo = barcode_error_bounds(&BarcodeSpec::new(n, m, w[0]).unwrap());
                let hi = barcode_error_bounds(&BarcodeSpec::new(n, m, w[1]).unwrap());
                assert!(lo.log_lower <= hi.log_lower + 1e-9);
                assert!(lo.log_upper <= hi.log_upper + 1e-9);
            }
        }
    }
}

#[test]
fn kcpf_bounds_monotone_in_probes() {
    for (n, k) in [(6u64, 2u64), (10, 5), (12, 1)] {
        for &f in &[0.2, 0.6, 0.95] {
            for m in 1..=4u64 {
                let a = kcpf_error_bounds(n, k, f, m).unwrap();
                let b = kcpf_error_bounds(n, k, f, m + 1).unwrap();
                assert!(b.exact.log_lower <= a.exact.log_lower + 1e-9);
                assert!(b.exact.log_upper <= a.exact.log_upper + 1e-9);
                assert!(b.asymptotic.log_lower <= a.asymptotic.log_lower + 1e-9);
                assert!(b.asymptotic.log_upper <= a.asymptotic.log_upper + 1e-9);
            }
        }
    }
}

#[test]
fn asymptotic_log_bracket_at_large_probe_count() {
    // At large M the per-probe decay rate of the error sandwich pins
    // -log(p_err)/M between -log F and -2 log F.
    let m = 100_000u64;
    for &f in &[0.3, 0.9] {
        for n in [2u64, 4, 16] {
            let b = barcode_error_bounds(&BarcodeSpec::new(n, m, f).unwrap());
            let rate_up = -b.log_upper / m as f64;
            let rate_lo = -b.log_lower / m as f64;
            let unit_rate = -log(f);
            assert!(
                (rate_up - unit_rate).abs() < 1e-3 * unit_rate,
                "upper rate {rate_up} vs {unit_rate}"
            );
            assert!(
                (rate_lo - 2.0 * unit_rate).abs() < 1e-3 * unit_rate,
                "lower rate {rate_lo} vs {}", 2.0 * unit_rate
            );
            assert!(rate_up <= rate_lo);
        }
    }
}

#[test]
fn chernoff_rates_non_increasing_in_fidelity() {
    let mut last = chernoff_rate_sandwich(0.02).unwrap();
    for i in 1..=48 {
        let f = 0.02 + i as f64 * 0.02;
        let r = chernoff_rate_sandwich(f).unwrap();
        assert!(r.lower <= last.lower + 1e-12, "lower rate grew at f={f}");
        assert!(r.upper <= last.upper + 1e-12, "loose upper grew at f={f}");
        assert!(r.upper_tight <= last.upper_tight + 1e-12, "tight upper grew at f={f}");
        last = r;
    }
}

proptest! {
    /// The closed product form of the all-barcodes pairwise sum matches a
    /// Hamming-shell enumeration, and the k-white restriction matches its
    /// brute-force subset scan, on random instances up to n = 12.
    #[test]
    fn pairwise_sums_match_enumeration(
        n in 1u64..=12,
        k_seed in 0u64..12,
        f in 0.0..=1.0f64,
    ) {
        // D_n by shells: sum over h of C(n,h) f^h, h >= 1.
        let mut shells = 0.0;
        let mut binom = 1.0;
        for h in 1..=n {
            binom *= (n - h + 1) as f64 / h as f64;
            shells += binom * pow(f, h as f64);
        }
        let closed = pairwise_fidelity_sum(n, f).unwrap();
        prop_assert!((closed - shells).abs() <= 1e-12 * shells.max(1.0));

        if n >= 2 {
            let k = 1 + k_seed % (n - 1);
            let mut brute = 0.0;
            let subsets: Vec<u32> = (0u32..(1 << n))
                .filter(|s| u64::from(s.count_ones()) == k)
                .collect();
            for &a in &subsets {
                for &b in &subsets {
                    if a != b {
                        brute += pow(f, f64::from((a ^ b).count_ones()));
                    }
                }
            }
            brute /= subsets.len() as f64;
            let closed_k = kcpf_pairwise_sum(n, k, f).unwrap();
            prop_assert!(
                (closed_k - brute).abs() <= 1e-11 * brute.max(1.0),
                "n={n}, k={k}, f={f}: {closed_k} vs {brute}"
            );
        }
    }
}

// ---------------------------------------------------------------------------
// Pattern-functional identities
// ---------------------------------------------------------------------------

/// Random labeled dataset of tiny binary images (12 pixels, 4x3).
fn random_dataset(rng: &mut ChaCha8Rng, t: usize, classes: u32) -> LabeledDataset {
    let images: Vec<BinaryImage> = (0..t)
        .map(|_| {
            let word = rng.next_u64();
            BinaryImage::from_bits(4, 3, (0..12).map(|b| word >> b & 1 == 1)).unwrap()
        })
        .collect();
    // Guarantee at least two populated classes so the functional is nonzero.
    let labels: Vec<u32> = (0..t)
        .map(|i| if i < 2 { i as u32 % 2 } else { rng.next_u64() as u32 % classes })
        .collect();
    LabeledDataset::new(images, labels, classes, DatasetRole::Train).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// The histogram route for the training functional equals the direct
    /// O(T^2) pairwise sum — a polynomial identity in f, checked at five
    /// fidelity values per random dataset up to T = 200.
    #[test]
    fn histogram_route_matches_direct_pairwise_sum(
        seed in 0u64..1_000_000,
        t in 2usize..=200,
        classes in 2u32..=5,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_dataset(&mut rng, t, classes);
        for &f in &[0.0, 0.15, 0.5, 0.85, 1.0] {
            let via_hist = b_training(&data, f).unwrap();
            let mut direct = 0.0;
            for i in 0..t {
                for j in 0..t {
                    if data.label(i) != data.label(j) {
                        let h = hamming(data.image(i), data.image(j)).unwrap();
                        direct += pow(f, h as f64);
                    }
                }
            }
            direct /= 2.0 * (t * t) as f64;
            prop_assert!(
                (via_hist - direct).abs() <= 1e-12 * direct.max(1.0),
                "T={t}, f={f}: {via_hist} vs {direct}"
            );
        }
    }

    /// B is non-decreasing and midpoint-convex in f on [0, 1] for random
    /// empirical histograms.
    #[test]
    fn training_functional_monotone_and_convex(seed in 0u64..1_000_000) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let data = random_dataset(&mut rng, 60, 3);
        let (hists, prior) = empirical_class_pair_histograms(&data).unwrap();
        let grid: Vec<f64> = (0..=16).map(|i| i as f64 / 16.0).collect();
        let vals: Vec<f64> = grid
            .iter()
            .map(|&f| exp(ln_b_functional(&hists, &prior, log(f)).unwrap()))
            .collect();
        for w in vals.windows(2) {
            prop_assert!(w[1] >= w[0] - 1e-12);
        }
        for w in vals.windows(3) {
            prop_assert!(w[0] + w[2] >= 2.0 * w[1] - 1e-10);
        }
    }
}

// ---------------------------------------------------------------------------
// Classifier ground truth
// ---------------------------------------------------------------------------

#[test]
fn nearest_neighbor_matches_naive_scan_with_tie_breaking() {
    // Random toy sets up to T = 200, 1000 queries each round: the decision
    // must equal an explicit argmin over (distance, index).
    let mut rng = ChaCha8Rng::seed_from_u64(41);
    for round in 0..5 {
        let t = 40 + round * 40;
        let data = random_dataset(&mut rng, t, 4);
        for _ in 0..1000 {
            let word = rng.next_u64();
            let query = BinaryImage::from_bits(4, 3, (0..12).map(|b| word >> b & 1 == 1)).unwrap();
            let got = nn_classify(&data, &query).unwrap();
            let best = (0..t)
                .map(|i| (hamming(data.image(i), &query).unwrap(), i))
                .min()
                .unwrap();
            assert_eq!(got.index, best.1);
            assert_eq!(got.distance, best.0);
            assert_eq!(got.label, data.label(best.1));
        }
    }
}
