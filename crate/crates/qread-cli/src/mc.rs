//! Monte-Carlo estimation of the nearest-neighbor error under pixel noise.
//!
//! Each (flip probability, test image) cell is an independent task with its
//! own counter-mode RNG stream, and cells combine by integer addition. The
//! resulting curve is therefore bit-identical for a given seed regardless of
//! thread count.

use qread_core::classify::{nn_classify, CurvePoint, NoisyErrorCurve};
use qread_core::image::{apply_pixel_noise, LabeledDataset};
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rayon::prelude::*;

use crate::error::CliError;

/// Estimates the classification error of nearest-neighbor readout at each
/// flip probability in `p_grid`.
///
/// Every test image is corrupted `trials_per_image` times per grid point and
/// classified against `train`; a point's error is the wrong fraction over
/// `test.len() * trials_per_image` trials, with the binomial standard error
/// attached. `p_grid` must be strictly increasing within `[0, 1]`.
pub fn noisy_error_curve(
    train: &LabeledDataset,
    test: &LabeledDataset,
    p_grid: &[f64],
    trials_per_image: u64,
    seed: u64,
) -> Result<NoisyErrorCurve, CliError> {
    if trials_per_image == 0 {
        return Err(CliError::usage("need at least one noise trial per image"));
    }
    if p_grid.is_empty() {
        return Err(CliError::usage("the flip-probability grid is empty"));
    }
    let mut last = -1.0;
    for &p in p_grid {
        if !(0.0..=1.0).contains(&p) {
            return Err(CliError::usage(format!(
                "flip probability {p} is outside [0, 1]"
            )));
        }
        if p <= last {
            return Err(CliError::usage(
                "flip probabilities must be strictly increasing",
            ));
        }
        last = p;
    }
    if train.len() == 0 {
        return Err(CliError::data("the training set is empty"));
    }
    if test.len() == 0 {
        return Err(CliError::data("the test set is empty"));
    }
    if train.shape() != test.shape() {
        return Err(CliError::data(
            "training and test images disagree on shape",
        ));
    }

    let n_test = test.len() as u64;
    let trials_total = n_test * trials_per_image;
    let mut points = Vec::with_capacity(p_grid.len());
    for (p_index, &p) in p_grid.iter().enumerate() {
        let wrong: u64 = (0..test.len())
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(p_index as u64 * n_test + i as u64);
                let image = test.image(i);
                let truth = test.label(i);
                let mut wrong = 0u64;
                for _ in 0..trials_per_image {
                    let noisy = apply_pixel_noise(image, p, &mut rng)
                        .expect("probability already validated");
                    let decision =
                        nn_classify(train, &noisy).expect("training set already validated");
                    if decision.label != truth {
                        wrong += 1;
                    }
                }
                wrong
            })
            .sum();
        let error = wrong as f64 / trials_total as f64;
        let stderr = (error * (1.0 - error) / trials_total as f64).sqrt();
        points.push(CurvePoint {
            p,
            error,
            stderr,
            trials: trials_total,
        });
    }
    Ok(NoisyErrorCurve::new(points)?)
}
