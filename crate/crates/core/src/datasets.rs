//! Pixel-image datasets and their phase encoding.
//!
//! Pixel `p` in row-major order (`p = c + width * r`) maps to basis index
//! `p`, so column bits are the low qubits and row bits the high ones. A
//! ket printed as `b0 b1 b2 b3` names qubit 0 first. With this reading both
//! printed example states in the reference material reproduce exactly.
//! Amplitude of pixel `p` is `(-1)^pixel / sqrt(count)`; white (1) is negative.

use rand::seq::{index, SliceRandom};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quantum::StateVector;
use crate::rng;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PixelImage {
    width: usize,
    height: usize,
    pixels: Vec<u8>,
}

impl PixelImage {
    pub fn new(width: usize, height: usize, pixels: Vec<u8>) -> Result<Self> {
        if pixels.len() != width * height {
            return Err(Error::DimensionMismatch {
                expected: width * height,
                actual: pixels.len(),
            });
        }
        if !(width * height).is_power_of_two() || width * height < 2 {
            return Err(Error::domain(format!(
                "pixel count {} is not a power of two",
                width * height
            )));
        }
        if pixels.iter().any(|&p| p > 1) {
            return Err(Error::domain("pixels must be 0 or 1"));
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Image whose pixel `p` is bit `p` of `bits`.
    pub fn from_bits(width: usize, height: usize, bits: u64) -> Result<Self> {
        let pixels = (0..width * height)
            .map(|p| ((bits >> p) & 1) as u8)
            .collect();
        Self::new(width, height, pixels)
    }

    /// Parses rows like `["1111", "1001", ...]`.
    pub fn from_rows(rows: &[&str]) -> Result<Self> {
        let height = rows.len();
        let width = rows.first().map_or(0, |r| r.len());
        let mut pixels = Vec::with_capacity(width * height);
        for row in rows {
            if row.len() != width {
                return Err(Error::domain("ragged pixel rows"));
            }
            for ch in row.chars() {
                match ch {
                    '0' => pixels.push(0),
                    '1' => pixels.push(1),
                    other => return Err(Error::domain(format!("bad pixel `{other}`"))),
                }
            }
        }
        Self::new(width, height, pixels)
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixels(&self) -> &[u8] {
        &self.pixels
    }

    pub fn pixel(&self, col: usize, row: usize) -> u8 {
        self.pixels[col + self.width * row]
    }

    pub fn num_qubits(&self) -> usize {
        self.pixels.len().trailing_zeros() as usize
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodedImage {
    pub id: usize,
    pub image: PixelImage,
    pub state: StateVector,
}

pub fn encode(id: usize, image: &PixelImage) -> Result<EncodedImage> {
    let count = image.pixels.len();
    if !count.is_power_of_two() {
        return Err(Error::domain(format!(
            "pixel count {count} is not a power of two"
        )));
    }
    let amp = 1.0 / (count as f64).sqrt();
    let values: Vec<f64> = image
        .pixels
        .iter()
        .map(|&p| if p == 0 { amp } else { -amp })
        .collect();
    Ok(EncodedImage {
        id,
        image: image.clone(),
        state: StateVector::from_real(&values)?,
    })
}

/// Reads the pixels back off the amplitude signs.
pub fn decode(state: &StateVector, width: usize, height: usize) -> Result<PixelImage> {
    if state.dim() != width * height {
        return Err(Error::DimensionMismatch {
            expected: width * height,
            actual: state.dim(),
        });
    }
    let pixels = state
        .amplitudes()
        .iter()
        .map(|a| u8::from(a.re < 0.0))
        .collect();
    PixelImage::new(width, height, pixels)
}

/// Row-major indices of the four centre pixels of a 4×4 grid.
const CENTRE_4X4: [usize; 4] = [5, 6, 9, 10];

/// The 32 framed 4×4 images. Image `i` has frame bit `i / 16` and centre
/// pixel `k` (row-major among the four centre pixels) equal to bit `k` of
/// `i % 16`.
pub fn framed_4x4_dataset() -> Vec<PixelImage> {
    (0..32u64)
        .map(|i| {
            let frame = (i >> 4) as u8;
            let mut pixels = vec![frame; 16];
            for (k, &p) in CENTRE_4X4.iter().enumerate() {
                pixels[p] = ((i >> k) & 1) as u8;
            }
            PixelImage::new(4, 4, pixels).expect("4x4 is a valid shape")
        })
        .collect()
}

pub fn is_bar_or_stripe(image: &PixelImage) -> bool {
    let (w, h) = (image.width, image.height);
    let rows_uniform = (0..h).all(|r| (0..w).all(|c| image.pixel(c, r) == image.pixel(0, r)));
    let cols_uniform = (0..w).all(|c| (0..h).all(|r| image.pixel(c, r) == image.pixel(c, 0)));
    rows_uniform || cols_uniform
}

/// All 18 distinct 2×4 bar or stripe patterns, in increasing order of their
/// row-major bit value.
pub fn bars_and_stripes_2x4() -> Vec<PixelImage> {
    (0..256u64)
        .map(|bits| PixelImage::from_bits(4, 2, bits).expect("2x4 is a valid shape"))
        .filter(is_bar_or_stripe)
        .collect()
}

#[derive(Debug, Clone)]
pub struct DatasetSplit {
    pub train: Vec<EncodedImage>,
    pub test: Vec<EncodedImage>,
    pub batch_size: usize,
    pub seed: u64,
    /// Dataset indices chosen for training, ascending.
    pub train_indices: Vec<usize>,
}

impl DatasetSplit {
    pub fn batches(&self) -> std::slice::Chunks<'_, EncodedImage> {
        self.train.chunks(self.batch_size)
    }
}

/// Seeded choice of `train_count` of `count` dataset indices, ascending.
pub fn select_train_indices(count: usize, train_count: usize, seed: u64) -> Result<Vec<usize>> {
    if train_count == 0 || train_count > count {
        return Err(Error::domain(format!(
            "train_count {train_count} must be in 1..={count}"
        )));
    }
    let mut chosen = index::sample(&mut rng::stream(seed, 0), count, train_count).into_vec();
    chosen.sort_unstable();
    Ok(chosen)
}

pub fn make_split(
    images: &[PixelImage],
    train_count: usize,
    replication: usize,
    batch_size: usize,
    seed: u64,
) -> Result<DatasetSplit> {
    let chosen = select_train_indices(images.len(), train_count, seed)?;
    make_split_with_indices(images, &chosen, replication, batch_size, seed)
}

/// Split with an explicit training index list; the rest is the test set in
/// dataset order. Replicated training images are shuffled under `seed`.
pub fn make_split_with_indices(
    images: &[PixelImage],
    train_indices: &[usize],
    replication: usize,
    batch_size: usize,
    seed: u64,
) -> Result<DatasetSplit> {
    if replication == 0 {
        return Err(Error::domain("replication must be at least 1"));
    }
    let mut chosen = train_indices.to_vec();
    chosen.sort_unstable();
    chosen.dedup();
    if chosen.len() != train_indices.len() || chosen.is_empty() {
        return Err(Error::domain(
            "training indices must be distinct and non-empty",
        ));
    }
    if let Some(&bad) = chosen.iter().find(|&&i| i >= images.len()) {
        return Err(Error::domain(format!(
            "training index {bad} outside dataset of {}",
            images.len()
        )));
    }
    let augmented = chosen.len() * replication;
    if batch_size == 0 || !augmented.is_multiple_of(batch_size) {
        return Err(Error::domain(format!(
            "batch size {batch_size} does not divide {augmented} training images"
        )));
    }

    let mut train = Vec::with_capacity(augmented);
    for _ in 0..replication {
        for &i in &chosen {
            train.push(encode(i, &images[i])?);
        }
    }
    train.shuffle(&mut rng::stream(seed, 1));

    let test = (0..images.len())
        .filter(|i| chosen.binary_search(i).is_err())
        .map(|i| encode(i, &images[i]))
        .collect::<Result<Vec<_>>>()?;

    Ok(DatasetSplit {
        train,
        test,
        batch_size,
        seed,
        train_indices: chosen,
    })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ImageRecord {
    pub id: usize,
    pub width: usize,
    pub height: usize,
    pub pixels: Vec<u8>,
    pub amplitudes: Vec<f64>,
}

/// JSON export: pixels as 0/1 arrays plus the real amplitude list.
pub fn export_json(images: &[PixelImage]) -> Result<String> {
    let records = images
        .iter()
        .enumerate()
        .map(|(id, img)| {
            let enc = encode(id, img)?;
            Ok(ImageRecord {
                id,
                width: img.width,
                height: img.height,
                pixels: img.pixels.clone(),
                amplitudes: enc.state.amplitudes().iter().map(|a| a.re).collect(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(serde_json::to_string_pretty(&records)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn framed_counts_and_order() {
        let ds = framed_4x4_dataset();
        assert_eq!(ds.len(), 32);
        assert!(ds[0].pixels().iter().all(|&p| p == 0));
        assert!(ds[31].pixels().iter().all(|&p| p == 1));
        let distinct: std::collections::HashSet<_> = ds.iter().collect();
        assert_eq!(distinct.len(), 32);
    }

    #[test]
    fn all_black_encodes_uniform() {
        let e = encode(0, &framed_4x4_dataset()[0]).unwrap();
        for a in e.state.amplitudes() {
            assert!((a.re - 0.25).abs() < 1e-12 && a.im == 0.0);
        }
    }

    #[test]
    fn decode_round_trip() {
        for (i, img) in bars_and_stripes_2x4().iter().enumerate() {
            let e = encode(i, img).unwrap();
            assert_eq!(&decode(&e.state, 4, 2).unwrap(), img);
        }
    }

    #[test]
    fn split_sizes() {
        let s = make_split(&framed_4x4_dataset(), 14, 3, 7, 1).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (42, 18));
        assert_eq!(s.batches().count(), 6);
        let s = make_split(&bars_and_stripes_2x4(), 10, 2, 5, 1).unwrap();
        assert_eq!((s.train.len(), s.test.len()), (20, 8));
        assert!(make_split(&framed_4x4_dataset(), 14, 3, 5, 1).is_err());
        assert!(make_split(&framed_4x4_dataset(), 33, 1, 1, 1).is_err());
    }

    #[test]
    fn replication_one_is_permutation() {
        let ds = framed_4x4_dataset();
        let s = make_split(&ds, 32, 1, 4, 9).unwrap();
        let mut ids: Vec<_> = s.train.iter().map(|e| e.id).collect();
        ids.sort_unstable();
        assert_eq!(ids, (0..32).collect::<Vec<_>>());
        assert!(s.test.is_empty());
    }

    #[test]
    fn explicit_indices_override() {
        let s = make_split_with_indices(&bars_and_stripes_2x4(), &[0, 17, 3], 2, 3, 0).unwrap();
        assert_eq!(s.train_indices, vec![0, 3, 17]);
        assert_eq!(s.test.len(), 15);
        assert!(make_split_with_indices(&bars_and_stripes_2x4(), &[0, 0], 1, 1, 0).is_err());
        assert!(make_split_with_indices(&bars_and_stripes_2x4(), &[18], 1, 1, 0).is_err());
    }

    #[test]
    fn bad_shapes_rejected() {
        assert!(PixelImage::new(3, 1, vec![0, 1, 0]).is_err());
        assert!(PixelImage::new(2, 2, vec![0, 1, 0]).is_err());
        assert!(PixelImage::new(2, 2, vec![0, 1, 0, 2]).is_err());
    }

    #[test]
    fn json_export_shape() {
        let text = export_json(&framed_4x4_dataset()[..2]).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        assert_eq!(v[1]["pixels"].as_array().unwrap().len(), 16);
        assert_eq!(v[1]["amplitudes"][5].as_f64().unwrap(), -0.25);
    }
}
