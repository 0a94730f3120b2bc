//! IDX-format ingestion: big-endian headers plus raw unsigned bytes, the
//! container MNIST ships in. Files are read whole (the full training set is
//! ~45 MB), validated against their declared dimensions with byte-offset
//! error messages, and binarized into packed [`LabeledDataset`]s.

use std::fs;
use std::path::Path;

use qread_core::image::{binarize, BinaryImage, DatasetRole, GreyImage, LabeledDataset};

use crate::error::CliError;

/// Magic number opening an images file: 0x00000803.
const IMAGES_MAGIC: u32 = 0x0000_0803;
/// Magic number opening a labels file: 0x00000801.
const LABELS_MAGIC: u32 = 0x0000_0801;

fn read_be_u32(bytes: &[u8], offset: usize, path: &Path, what: &str) -> Result<u32, CliError> {
    match bytes.get(offset..offset + 4) {
        Some(word) => Ok(u32::from_be_bytes(word.try_into().expect("slice has length 4"))),
        None => Err(CliError::data(format!(
            "{}: truncated at byte {offset}: need 4 bytes for {what}, file has {}",
            path.display(),
            bytes.len()
        ))),
    }
}

/// Parses the images half of an IDX pair: magic, count, rows, cols, then
/// `count * rows * cols` pixel bytes in row-major order.
pub fn parse_idx_images(bytes: &[u8], path: &Path) -> Result<Vec<GreyImage>, CliError> {
    let magic = read_be_u32(bytes, 0, path, "the magic number")?;
    if magic != IMAGES_MAGIC {
        return Err(CliError::data(format!(
            "{}: bad magic {magic:#010x} at byte 0: an images file starts with {IMAGES_MAGIC:#010x}",
            path.display()
        )));
    }
    let count = read_be_u32(bytes, 4, path, "the image count")? as usize;
    let rows = read_be_u32(bytes, 8, path, "the row count")? as usize;
    let cols = read_be_u32(bytes, 12, path, "the column count")? as usize;
    if rows == 0 || cols == 0 {
        return Err(CliError::data(format!(
            "{}: zero image dimensions ({rows} rows x {cols} cols) in the header",
            path.display()
        )));
    }
    let pixels_per_image = rows
        .checked_mul(cols)
        .filter(|&n| n <= u32::MAX as usize)
        .ok_or_else(|| {
            CliError::data(format!(
                "{}: implausible image dimensions {rows} x {cols}",
                path.display()
            ))
        })?;
    let payload = count.checked_mul(pixels_per_image).ok_or_else(|| {
        CliError::data(format!(
            "{}: implausible payload size ({count} images of {rows}x{cols})",
            path.display()
        ))
    })?;
    if bytes.len() != 16 + payload {
        return Err(CliError::data(format!(
            "{}: expected {payload} pixel bytes after the 16-byte header \
             ({count} images of {rows}x{cols}), found {}",
            path.display(),
            bytes.len().saturating_sub(16)
        )));
    }
    let mut images = Vec::with_capacity(count);
    for i in 0..count {
        let start = 16 + i * pixels_per_image;
        let pixels = bytes[start..start + pixels_per_image].to_vec();
        let image = GreyImage::new(cols as u32, rows as u32, pixels).map_err(|err| {
            CliError::data(format!("{}: image {i}: {err}", path.display()))
        })?;
        images.push(image);
    }
    Ok(images)
}

/// Parses the labels half of an IDX pair: magic, count, then `count` label
/// bytes.
pub fn parse_idx_labels(bytes: &[u8], path: &Path) -> Result<Vec<u8>, CliError> {
    let magic = read_be_u32(bytes, 0, path, "the magic number")?;
    if magic != LABELS_MAGIC {
        return Err(CliError::data(format!(
            "{}: bad magic {magic:#010x} at byte 0: a labels file starts with {LABELS_MAGIC:#010x}",
            path.display()
        )));
    }
    let count = read_be_u32(bytes, 4, path, "the label count")? as usize;
    if bytes.len() != 8 + count {
        return Err(CliError::data(format!(
            "{}: expected {count} label bytes after the 8-byte header, found {}",
            path.display(),
            bytes.len().saturating_sub(8)
        )));
    }
    Ok(bytes[8..].to_vec())
}

/// Loads and cross-checks an images/labels file pair.
pub fn load_idx(
    images_path: &Path,
    labels_path: &Path,
) -> Result<(Vec<GreyImage>, Vec<u8>), CliError> {
    let image_bytes = fs::read(images_path)
        .map_err(|err| CliError::data(format!("{}: {err}", images_path.display())))?;
    let images = parse_idx_images(&image_bytes, images_path)?;
    let label_bytes = fs::read(labels_path)
        .map_err(|err| CliError::data(format!("{}: {err}", labels_path.display())))?;
    let labels = parse_idx_labels(&label_bytes, labels_path)?;
    if images.len() != labels.len() {
        return Err(CliError::data(format!(
            "image/label count mismatch: {} images in {} vs {} labels in {}",
            images.len(),
            images_path.display(),
            labels.len(),
            labels_path.display()
        )));
    }
    Ok((images, labels))
}

/// Standard MNIST file names for each dataset role.
fn role_files(role: DatasetRole) -> (&'static str, &'static str) {
    match role {
        DatasetRole::Train => ("train-images-idx3-ubyte", "train-labels-idx1-ubyte"),
        DatasetRole::Test => ("t10k-images-idx3-ubyte", "t10k-labels-idx1-ubyte"),
    }
}

/// Loads one role of an MNIST-layout directory, binarized at `threshold`
/// (white iff pixel value >= threshold), keeping only the first `limit`
/// images when given — the desk-scale prefix convention.
pub fn load_dataset(
    dir: &Path,
    role: DatasetRole,
    threshold: u8,
    limit: Option<usize>,
) -> Result<LabeledDataset, CliError> {
    let (image_name, label_name) = role_files(role);
    let (greys, raw_labels) = load_idx(&dir.join(image_name), &dir.join(label_name))?;
    let take = limit.unwrap_or(greys.len()).min(greys.len());
    let images: Vec<BinaryImage> = greys[..take]
        .iter()
        .map(|grey| binarize(grey, threshold))
        .collect();
    let labels: Vec<u32> = raw_labels[..take].iter().map(|&l| u32::from(l)).collect();
    let num_classes = labels.iter().map(|&l| l + 1).max().unwrap_or(1);
    LabeledDataset::new(images, labels, num_classes, role)
        .map_err(|err| CliError::data(format!("{}: {err}", dir.display())))
}

/// Keeps only the listed classes; labels keep their original ids, so class 7
/// is still class 7 after filtering to `--classes 1,7`.
pub fn filter_classes(data: &LabeledDataset, keep: &[u32]) -> Result<LabeledDataset, CliError> {
    for &class in keep {
        if class >= data.num_classes() {
            return Err(CliError::usage(format!(
                "class {class} does not exist: labels run 0..{}",
                data.num_classes()
            )));
        }
    }
    let mut images = Vec::new();
    let mut labels = Vec::new();
    for i in 0..data.len() {
        if keep.contains(&data.label(i)) {
            images.push(data.image(i).clone());
            labels.push(data.label(i));
        }
    }
    LabeledDataset::new(images, labels, data.num_classes(), data.role())
        .map_err(|err| CliError::data(format!("class filter produced an invalid dataset: {err}")))
}
