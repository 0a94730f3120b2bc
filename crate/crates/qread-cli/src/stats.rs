//! Parallel Hamming statistics over a labeled dataset.
//!
//! These are the `O(T²)` all-pairs walks: histograms of cross-class
//! distances per class pair and the exact minimum cross-class distance.
//! Work splits over blocks of rows into per-thread integer accumulators that
//! merge by addition (or an order-free minimum), so every result is
//! independent of the worker count and schedule.

use qread_core::image::{hamming, LabeledDataset};
use qread_core::pattern::ClassPairHistogram;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;

use crate::error::CliError;

/// How class-pair histograms sample the image pairs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PairSampling {
    /// Every cross-class pair exactly once.
    AllPairs,
    /// `samples` ordered pairs per class pair, drawn uniformly with
    /// replacement. The generator is seeded per class pair (stream
    /// `a * num_classes + b`), so a pair's histogram never depends on which
    /// worker computed it or on which other pairs were requested.
    Subsample {
        /// Ordered pairs drawn per class pair.
        samples: u64,
        /// Root seed shared by all pairs.
        seed: u64,
    },
}

/// Result of a class-pair scan: one histogram per populated cross-class
/// pair, plus the classes that had no images and were skipped.
#[derive(Debug, Clone)]
pub struct PairScan {
    /// Histograms in lexicographic `(class_a, class_b)` order.
    pub histograms: Vec<ClassPairHistogram>,
    /// Classes with zero images, reported rather than silently dropped.
    pub empty_classes: Vec<u32>,
}

/// Builds the cross-class distance histogram of every populated class pair.
///
/// Needs at least two populated classes; empty ones are listed in the result
/// and their pairs skipped.
pub fn class_pair_statistics(
    data: &LabeledDataset,
    sampling: PairSampling,
) -> Result<PairScan, CliError> {
    if let PairSampling::Subsample { samples: 0, .. } = sampling {
        return Err(CliError::usage("subsampling needs at least one pair per class pair"));
    }
    let classes = data.num_classes();
    let mut by_class: Vec<Vec<u32>> = vec![Vec::new(); classes as usize];
    for i in 0..data.len() {
        by_class[data.label(i) as usize].push(i as u32);
    }
    let empty_classes: Vec<u32> = (0..classes)
        .filter(|&c| by_class[c as usize].is_empty())
        .collect();
    if classes as usize - empty_classes.len() < 2 {
        return Err(CliError::data(
            "cross-class statistics need at least two populated classes",
        ));
    }
    let n_bits = bit_count(data);
    let mut histograms = Vec::new();
    for a in 0..classes {
        for b in (a + 1)..classes {
            let (left, right) = (&by_class[a as usize], &by_class[b as usize]);
            if left.is_empty() || right.is_empty() {
                continue;
            }
            let counts = match sampling {
                PairSampling::AllPairs => all_pairs_counts(data, left, right, n_bits),
                PairSampling::Subsample { samples, seed } => {
                    let stream = u64::from(a) * u64::from(classes) + u64::from(b);
                    subsample_counts(data, left, right, n_bits, samples, seed, stream)
                }
            };
            let histogram = ClassPairHistogram::new(a, b, counts)
                .map_err(|err| CliError::data(format!("classes ({a}, {b}): {err}")))?;
            histograms.push(histogram);
        }
    }
    Ok(PairScan { histograms, empty_classes })
}

fn bit_count(data: &LabeledDataset) -> usize {
    data.shape().map(|(w, h)| (w * h) as usize).unwrap_or(0)
}

fn all_pairs_counts(data: &LabeledDataset, left: &[u32], right: &[u32], n_bits: usize) -> Vec<u64> {
    left.par_chunks(64)
        .fold(
            || vec![0u64; n_bits + 1],
            |mut acc, chunk| {
                for &i in chunk {
                    let image = data.image(i as usize);
                    for &j in right {
                        let h = hamming(image, data.image(j as usize))
                            .expect("a dataset holds one image shape");
                        acc[h as usize] += 1;
                    }
                }
                acc
            },
        )
        .reduce(|| vec![0u64; n_bits + 1], merge_counts)
}

fn merge_counts(mut into: Vec<u64>, from: Vec<u64>) -> Vec<u64> {
    for (a, b) in into.iter_mut().zip(from) {
        *a += b;
    }
    into
}

fn subsample_counts(
    data: &LabeledDataset,
    left: &[u32],
    right: &[u32],
    n_bits: usize,
    samples: u64,
    seed: u64,
    stream: u64,
) -> Vec<u64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    let mut counts = vec![0u64; n_bits + 1];
    for _ in 0..samples {
        // Plain modulo indexing: for class sizes around 10^4 the bias is of
        // order size / 2^64 ~ 1e-15, invisible next to sampling noise.
        let i = left[(rng.next_u64() % left.len() as u64) as usize];
        let j = right[(rng.next_u64() % right.len() as u64) as usize];
        let h = hamming(data.image(i as usize), data.image(j as usize))
            .expect("a dataset holds one image shape");
        counts[h as usize] += 1;
    }
    counts
}

/// The exact minimum cross-class Hamming distance and where it occurs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct MinCrossDistance {
    /// The minimum distance; 0 means duplicate images across classes.
    pub distance: u64,
    /// Smaller class label of the achieving pair.
    pub class_a: u32,
    /// Larger class label of the achieving pair.
    pub class_b: u32,
    /// Image indices achieving the minimum, `index_a < index_b`.
    pub index_a: usize,
    /// See `index_a`.
    pub index_b: usize,
}

impl MinCrossDistance {
    /// Total order used to pick one witness deterministically: smallest
    /// distance, then classes, then indices.
    fn key(&self) -> (u64, u32, u32, usize, usize) {
        (self.distance, self.class_a, self.class_b, self.index_a, self.index_b)
    }
}

/// Scans every cross-class image pair — the full `O(T²)` walk — for the
/// minimum Hamming distance. Returns `None` when fewer than two classes have
/// images. Ties resolve to the lexicographically smallest witness, so the
/// result is exact and schedule-independent.
pub fn min_cross_class_distance(data: &LabeledDataset) -> Option<MinCrossDistance> {
    (0..data.len())
        .into_par_iter()
        .filter_map(|i| {
            let image = data.image(i);
            let label = data.label(i);
            let mut best: Option<MinCrossDistance> = None;
            for j in (i + 1)..data.len() {
                if data.label(j) == label {
                    continue;
                }
                let distance =
                    hamming(image, data.image(j)).expect("a dataset holds one image shape");
                let (class_a, class_b) = if label < data.label(j) {
                    (label, data.label(j))
                } else {
                    (data.label(j), label)
                };
                let candidate = MinCrossDistance { distance, class_a, class_b, index_a: i, index_b: j };
                if best.map_or(true, |b| candidate.key() < b.key()) {
                    best = Some(candidate);
                }
            }
            best
        })
        .min_by_key(MinCrossDistance::key)
}
