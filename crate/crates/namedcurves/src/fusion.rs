//! Thresholded probability-map weighting and the final weighted average of
//! the per-group adjusted images.

use thiserror::Error;

use crate::color_naming::{ProbabilityMapSet, GROUP_COUNT};
use crate::imaging::ImageBuffer;

/// Default probability threshold for fusion weights.
pub const DEFAULT_TAU: f64 = 0.2;

#[derive(Debug, Error)]
pub enum FusionError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Per-pixel blending weights over the 6 groups. Each pixel sums to 1;
/// entries below the threshold are exactly 0 except at fallback pixels
/// where every entry fell below it.
#[derive(Debug, Clone)]
pub struct FusionWeights {
    width: usize,
    height: usize,
    tau: f64,
    data: Vec<f64>,
}

impl FusionWeights {
    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    /// The threshold these weights were built with.
    pub fn tau(&self) -> f64 {
        self.tau
    }

    #[inline]
    pub fn weights(&self, x: usize, y: usize) -> &[f64] {
        let i = (y * self.width + x) * GROUP_COUNT;
        &self.data[i..i + GROUP_COUNT]
    }
}

/// Threshold each pixel's 6-group distribution at `tau` (entries below it
/// become 0) and renormalize the survivors to sum to 1. When every entry
/// falls below `tau`, the unthresholded vector is renormalized instead, so
/// no pixel ever ends up with a zero or undefined weight.
pub fn make_weights(maps: &ProbabilityMapSet, tau: f64) -> FusionWeights {
    assert!(
        maps.is_grouped(),
        "fusion weights need grouped (6-plane) probability maps"
    );
    assert!(tau >= 0.0, "threshold must be nonnegative");
    let (w, h) = (maps.width(), maps.height());
    let mut data = Vec::with_capacity(w * h * GROUP_COUNT);
    for y in 0..h {
        for x in 0..w {
            let probs = maps.probabilities(x, y);
            let mut kept = [0.0f64; GROUP_COUNT];
            let mut kept_sum = 0.0f64;
            for (k, &p) in kept.iter_mut().zip(probs) {
                let v = p as f64;
                if v >= tau {
                    *k = v;
                    kept_sum += v;
                }
            }
            if kept_sum > 0.0 {
                data.extend(kept.iter().map(|&v| v / kept_sum));
            } else {
                // fallback: renormalize the original vector
                let total: f64 = probs.iter().map(|&p| p as f64).sum();
                if total > 0.0 {
                    data.extend(probs.iter().map(|&p| p as f64 / total));
                } else {
                    data.extend(std::iter::repeat_n(1.0 / GROUP_COUNT as f64, GROUP_COUNT));
                }
            }
        }
    }
    FusionWeights {
        width: w,
        height: h,
        tau,
        data,
    }
}

/// Weighted per-pixel average of the six adjusted images; output clamped
/// to `[0, 1]`.
pub fn blend(
    adjusted: &[ImageBuffer; GROUP_COUNT],
    weights: &FusionWeights,
) -> Result<ImageBuffer, FusionError> {
    for (g, img) in adjusted.iter().enumerate() {
        if img.width() != weights.width() || img.height() != weights.height() {
            return Err(FusionError::DimensionMismatch(format!(
                "adjusted image {g} is {}x{}, weights are {}x{}",
                img.width(),
                img.height(),
                weights.width(),
                weights.height()
            )));
        }
    }
    let mut out = ImageBuffer::new(weights.width(), weights.height());
    for y in 0..weights.height() {
        for x in 0..weights.width() {
            let w = weights.weights(x, y);
            let mut acc = [0.0f64; 3];
            for (g, img) in adjusted.iter().enumerate() {
                let wg = w[g];
                if wg == 0.0 {
                    continue;
                }
                let px = img.pixel(x, y);
                acc[0] += wg * px[0] as f64;
                acc[1] += wg * px[1] as f64;
                acc[2] += wg * px[2] as f64;
            }
            out.set_pixel(
                x,
                y,
                [
                    acc[0].clamp(0.0, 1.0) as f32,
                    acc[1].clamp(0.0, 1.0) as f32,
                    acc[2].clamp(0.0, 1.0) as f32,
                ],
            );
        }
    }
    Ok(out)
}

/// Histogram of per-pixel nonzero-weight counts: entry `k − 1` counts the
/// pixels blending exactly `k` branches. Few active branches per pixel
/// means the enhancement degenerates toward a global adjustment.
pub fn active_branch_stats(weights: &FusionWeights) -> [u64; GROUP_COUNT] {
    let mut hist = [0u64; GROUP_COUNT];
    for y in 0..weights.height() {
        for x in 0..weights.width() {
            let k = weights.weights(x, y).iter().filter(|&&w| w != 0.0).count();
            debug_assert!(k >= 1, "weights always have at least one active branch");
            hist[k - 1] += 1;
        }
    }
    hist
}
