use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Histogram bin width over `[-1, 1]`.
pub const BIN_WIDTH: f64 = 0.01;
/// Number of bins covering `[-1, 1]`.
pub const BINS: usize = 200;

/// Bin index of a cosine similarity; 1.0 lands in the last bin and values
/// outside `[-1, 1]` (rounding) are clamped.
pub fn bin_of(c: f64) -> usize {
    let i = libm::floor((c + 1.0) / BIN_WIDTH) as i64;
    i.clamp(0, BINS as i64 - 1) as usize
}

pub fn bin_left(i: usize) -> f64 {
    -1.0 + i as f64 * BIN_WIDTH
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Histogram {
    pub counts: Vec<usize>,
}

impl Histogram {
    pub fn from_values(values: &[f64]) -> Result<Self> {
        let mut counts = vec![0; BINS];
        for &v in values {
            if !v.is_finite() {
                return Err(Error::NonFinite("similarity is not finite".into()));
            }
            counts[bin_of(v)] += 1;
        }
        Ok(Self { counts })
    }

    pub fn total(&self) -> usize {
        self.counts.iter().sum()
    }

    /// Center of the fullest bin (the lowest such bin on ties), or `None`
    /// when empty.
    pub fn peak(&self) -> Option<f64> {
        if self.total() == 0 {
            return None;
        }
        let mut best = 0;
        for (i, &c) in self.counts.iter().enumerate() {
            if c > self.counts[best] {
                best = i;
            }
        }
        Some(bin_left(best) + BIN_WIDTH / 2.0)
    }
}

/// Cosine similarity histograms for positive, negative and soft-negative
/// pairs.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SimilarityDistribution {
    pub positive: Histogram,
    pub negative: Histogram,
    pub soft_negative: Histogram,
}

impl SimilarityDistribution {
    pub fn from_similarities(positive: &[f64], negative: &[f64], soft_negative: &[f64]) -> Result<Self> {
        Ok(Self {
            positive: Histogram::from_values(positive)?,
            negative: Histogram::from_values(negative)?,
            soft_negative: Histogram::from_values(soft_negative)?,
        })
    }

    /// `(bin_left, positive, negative, soft_negative)` per bin.
    pub fn rows(&self) -> impl Iterator<Item = (f64, usize, usize, usize)> + '_ {
        (0..BINS).map(|i| (bin_left(i), self.positive.counts[i], self.negative.counts[i], self.soft_negative.counts[i]))
    }
}
