//! Exact signature similarity: cosine times the size rectification factor.

use crate::error::{Error, Result};
use crate::features::GraphSignature;

/// Similarity value in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct SimilarityScore(f64);

impl SimilarityScore {
    /// Clamps into `[0, 1]`; NaN becomes 0.
    pub fn new(value: f64) -> Self {
        if value.is_nan() {
            Self(0.0)
        } else {
            Self(value.clamp(0.0, 1.0))
        }
    }

    pub fn value(self) -> f64 {
        self.0
    }

    pub fn distance(self) -> f64 {
        1.0 - self.0
    }
}

impl From<SimilarityScore> for f64 {
    fn from(s: SimilarityScore) -> f64 {
        s.0
    }
}

fn require_nonempty(a: &GraphSignature, b: &GraphSignature) -> Result<()> {
    if a.total() == 0 || b.total() == 0 {
        Err(Error::EmptySignature)
    } else {
        Ok(())
    }
}

/// Cosine of the angle between two count vectors.
///
/// Dot product and squared norms are accumulated exactly in integers, and the
/// denominator is `sqrt(|a|^2 * |b|^2)`, so `cosine(a, a)` is exactly 1.
pub fn cosine(a: &GraphSignature, b: &GraphSignature) -> Result<f64> {
    require_nonempty(a, b)?;
    let sq = |s: &GraphSignature| -> u128 {
        s.entries()
            .iter()
            .map(|&(_, c)| (c as u128) * (c as u128))
            .sum()
    };
    let (ea, eb) = (a.entries(), b.entries());
    let (mut i, mut j) = (0, 0);
    let mut dot: u128 = 0;
    while i < ea.len() && j < eb.len() {
        match ea[i].0.cmp(&eb[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                dot += ea[i].1 as u128 * eb[j].1 as u128;
                i += 1;
                j += 1;
            }
        }
    }
    let denom = ((sq(a) as f64) * (sq(b) as f64)).sqrt();
    Ok((dot as f64 / denom).min(1.0))
}

/// Ratio of the smaller total feature count to the larger.
pub fn rectification(a: &GraphSignature, b: &GraphSignature) -> Result<f64> {
    require_nonempty(a, b)?;
    Ok(rectify_totals(a.total(), b.total()))
}

pub(crate) fn rectify_totals(a: u32, b: u32) -> f64 {
    a.min(b) as f64 / a.max(b) as f64
}

pub fn exact_similarity(a: &GraphSignature, b: &GraphSignature) -> Result<SimilarityScore> {
    if a.n() != b.n() {
        return Err(Error::ParamMismatch(format!(
            "signatures built with n={} and n={}",
            a.n(),
            b.n()
        )));
    }
    Ok(SimilarityScore::new(rectification(a, b)? * cosine(a, b)?))
}

pub fn exact_distance(a: &GraphSignature, b: &GraphSignature) -> Result<f64> {
    exact_similarity(a, b).map(SimilarityScore::distance)
}
