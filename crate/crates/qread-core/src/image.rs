//! Binary barcode images and labeled datasets.
//!
//! Greyscale sources are thresholded into bit-packed black/white images
//! ([`binarize`]); readout noise flips individual pixels ([`apply_pixel_noise`]);
//! and every downstream statistic reduces to Hamming distances between packed
//! images ([`hamming`]). Bits are stored row-major in 64-bit words, least
//! significant bit first, with the unused tail of the last word kept at zero so
//! that the distance is a plain `popcount(xor)` sum over words.

use alloc::vec;
use alloc::vec::Vec;

use rand_core::RngCore;

use crate::error::{Error, Result};
use crate::math::u64_to_unit_f64;

/// Threshold used by the standard binarization convention: a pixel is white
/// iff its grey level is `>= 128`, the midpoint rule for 0–255 data.
pub const DEFAULT_BINARIZE_THRESHOLD: u8 = 128;

/// A greyscale image with one byte per pixel, row-major.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GreyImage {
    width: u32,
    height: u32,
    pixels: Vec<u8>,
}

impl GreyImage {
    /// Wraps row-major `pixels` as a `width x height` image.
    ///
    /// Fails with [`Error::ZeroPixels`] for an empty shape and
    /// [`Error::LengthMismatch`] when the buffer does not hold exactly
    /// `width * height` bytes.
    pub fn new(width: u32, height: u32, pixels: Vec<u8>) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroPixels);
        }
        let expected = width as usize * height as usize;
        if pixels.len() != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: pixels.len(),
            });
        }
        Ok(GreyImage {
            width,
            height,
            pixels,
        })
    }

    /// Image width in pixels.
    pub fn width(&self) -> u32 {
        self.width
    }

    /// Image height in pixels.
    pub fn height(&self) -> u32 {
        self.height
    }

    /// Row-major pixel bytes.
    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    /// Grey level at column `x`, row `y`.
    ///
    /// # Panics
    /// Panics if `x >= width` or `y >= height`.
    pub fn pixel(&self, x: u32, y: u32) -> u8 {
        assert!(x < self.width && y < self.height, "pixel out of bounds");
        self.pixels[y as usize * self.width as usize + x as usize]
    }
}

/// A black/white image packed 64 pixels per word.
///
/// Bit `i = y * width + x` lives in word `i / 64` at position `i % 64`;
/// 1 means white, 0 means black. Trailing bits past `width * height` in the
/// last word are always zero, so [`hamming`] needs no masking.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BinaryImage {
    width: u32,
    height: u32,
    words: Vec<u64>,
}

impl BinaryImage {
    /// An all-black image of the given shape.
    pub fn blank(width: u32, height: u32) -> Result<Self> {
        if width == 0 || height == 0 {
            return Err(Error::ZeroPixels);
        }
        let bits = width as usize * height as usize;
        Ok(BinaryImage {
            width,
            height,
            words: vec![0u64; bits.div_ceil(64)],
        })
    }

    /// Packs an iterator of row-major bits (`true` = white).
    ///
    /// The iterator must yield exactly `width * height` items or the call
    /// fails with [`Error::LengthMismatch`].
    pub fn from_bits<I>(width: u32, height: u32, bits: I) -> Result<Self>
    where
        I: IntoIterator<Item = bool>,
    {
        let mut image = BinaryImage::blank(width, height)?;
        let expected = image.bit_len();
        let mut count = 0usize;
        for bit in bits {
            if count < expected && bit {
                image.words[count / 64] |= 1u64 << (count % 64);
            }
            count += 1;
        }
        if count != expected {
            return Err(Error::LengthMismatch {
                expected,
                found: count,
            });
        }
        Ok(image)
    }

    /// Image width in pixels.
    pub fn width(&self) -> u32 {
        self.width
    }

    /// Image height in pixels.
    pub fn height(&self) -> u32 {
        self.height
    }

    /// Number of pixels, `width * height`.
    pub fn bit_len(&self) -> usize {
        self.width as usize * self.height as usize
    }

    /// The packed words, trailing bits zero.
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    /// Pixel at column `x`, row `y` (`true` = white).
    ///
    /// # Panics
    /// Panics if `x >= width` or `y >= height`.
    pub fn get(&self, x: u32, y: u32) -> bool {
        assert!(x < self.width && y < self.height, "pixel out of bounds");
        let i = y as usize * self.width as usize + x as usize;
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    /// Sets the pixel at column `x`, row `y`.
    ///
    /// # Panics
    /// Panics if `x >= width` or `y >= height`.
    pub fn set(&mut self, x: u32, y: u32, value: bool) {
        assert!(x < self.width && y < self.height, "pixel out of bounds");
        let i = y as usize * self.width as usize + x as usize;
        if value {
            self.words[i / 64] |= 1u64 << (i % 64);
        } else {
            self.words[i / 64] &= !(1u64 << (i % 64));
        }
    }

    /// Number of white pixels.
    pub fn ones(&self) -> u64 {
        self.words.iter().map(|w| w.count_ones() as u64).sum()
    }

    /// The image with every pixel flipped.
    pub fn complement(&self) -> BinaryImage {
        let mut words: Vec<u64> = self.words.iter().map(|w| !w).collect();
        mask_tail(&mut words, self.bit_len());
        BinaryImage {
            width: self.width,
            height: self.height,
            words,
        }
    }

    /// Expands back to grey levels 0 (black) and 255 (white).
    ///
    /// Round-tripping through [`binarize`] at any threshold in 1..=255
    /// reproduces the binary image exactly.
    pub fn to_grey(&self) -> GreyImage {
        let mut pixels = vec![0u8; self.bit_len()];
        for (i, px) in pixels.iter_mut().enumerate() {
            if self.words[i / 64] >> (i % 64) & 1 == 1 {
                *px = 255;
            }
        }
        GreyImage {
            width: self.width,
            height: self.height,
            pixels,
        }
    }
}

/// Zeroes every bit at position `>= bits` in the packed words.
fn mask_tail(words: &mut [u64], bits: usize) {
    let tail = bits % 64;
    if tail != 0 {
        if let Some(last) = words.last_mut() {
            *last &= (1u64 << tail) - 1;
        }
    }
}

/// Thresholds grey levels to black/white: a pixel maps to white iff its value
/// is `>= threshold`.
///
/// With [`DEFAULT_BINARIZE_THRESHOLD`] this is the midpoint convention, which
/// sends each of the extremes 0 and 255 to its own colour; 127 stays black and
/// 128 turns white.
pub fn binarize(grey: &GreyImage, threshold: u8) -> BinaryImage {
    let mut image = BinaryImage::blank(grey.width, grey.height).expect("source image is non-empty");
    for (i, &px) in grey.pixels.iter().enumerate() {
        if px >= threshold {
            image.words[i / 64] |= 1u64 << (i % 64);
        }
    }
    image
}

/// Hamming distance: the number of pixels in which the two images differ.
///
/// Fails with [`Error::ShapeMismatch`] when the images have different
/// dimensions.
pub fn hamming(a: &BinaryImage, b: &BinaryImage) -> Result<u64> {
    if a.width != b.width || a.height != b.height {
        return Err(Error::ShapeMismatch {
            expected: (a.width, a.height),
            found: (b.width, b.height),
        });
    }
    Ok(a.words
        .iter()
        .zip(&b.words)
        .map(|(x, y)| (x ^ y).count_ones() as u64)
        .sum())
}

/// Flips each pixel independently with probability `p`.
///
/// Consumes exactly `width * height` draws from `rng`, one per pixel in
/// row-major order, regardless of `p` — callers that split generators per
/// work item therefore get schedule-independent results. `p = 0` returns the
/// image unchanged and `p = 1` returns its complement.
pub fn apply_pixel_noise<R: RngCore>(
    image: &BinaryImage,
    p: f64,
    rng: &mut R,
) -> Result<BinaryImage> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::InvalidProbability {
            name: "pixel flip probability",
            value: p,
        });
    }
    let mut noisy = image.clone();
    for i in 0..image.bit_len() {
        if u64_to_unit_f64(rng.next_u64()) < p {
            noisy.words[i / 64] ^= 1u64 << (i % 64);
        }
    }
    Ok(noisy)
}

/// Whether a dataset plays the training or the testing role.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DatasetRole {
    /// Reference images the classifier may consult.
    Train,
    /// Held-out images used only as queries.
    Test,
}

/// A set of equally shaped binary images with class labels in
/// `0..num_classes`.
#[derive(Debug, Clone)]
pub struct LabeledDataset {
    images: Vec<BinaryImage>,
    labels: Vec<u32>,
    num_classes: u32,
    role: DatasetRole,
}

impl LabeledDataset {
    /// Bundles images and labels after validating that the counts match, all
    /// images share one shape, and every label is below `num_classes`.
    ///
    /// An empty dataset or one where only a single class has images is
    /// accepted here; operations that need more (nearest-neighbor search,
    /// cross-class statistics) reject it at the call site.
    pub fn new(
        images: Vec<BinaryImage>,
        labels: Vec<u32>,
        num_classes: u32,
        role: DatasetRole,
    ) -> Result<Self> {
        if images.len() != labels.len() {
            return Err(Error::LengthMismatch {
                expected: images.len(),
                found: labels.len(),
            });
        }
        if let Some(first) = images.first() {
            let shape = (first.width(), first.height());
            for image in &images {
                let found = (image.width(), image.height());
                if found != shape {
                    return Err(Error::ShapeMismatch {
                        expected: shape,
                        found,
                    });
                }
            }
        }
        for &label in &labels {
            if label >= num_classes {
                return Err(Error::LabelOutOfRange { label, num_classes });
            }
        }
        Ok(LabeledDataset {
            images,
            labels,
            num_classes,
            role,
        })
    }

    /// Number of images.
    pub fn len(&self) -> usize {
        self.images.len()
    }

    /// Whether the dataset holds no images.
    pub fn is_empty(&self) -> bool {
        self.images.is_empty()
    }

    /// All images, in storage order.
    pub fn images(&self) -> &[BinaryImage] {
        &self.images
    }

    /// Labels aligned with [`images`](Self::images).
    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    /// Number of classes the labels are drawn from.
    pub fn num_classes(&self) -> u32 {
        self.num_classes
    }

    /// Whether this is a training or a test set.
    pub fn role(&self) -> DatasetRole {
        self.role
    }

    /// The image at `index`.
    pub fn image(&self, index: usize) -> &BinaryImage {
        &self.images[index]
    }

    /// The label at `index`.
    pub fn label(&self, index: usize) -> u32 {
        self.labels[index]
    }

    /// Common `(width, height)` of the images, or `None` when empty.
    pub fn shape(&self) -> Option<(u32, u32)> {
        self.images.first().map(|i| (i.width(), i.height()))
    }

    /// Image count per class, indexed by label.
    pub fn class_counts(&self) -> Vec<u64> {
        let mut counts = vec![0u64; self.num_classes as usize];
        for &label in &self.labels {
            counts[label as usize] += 1;
        }
        counts
    }
}
