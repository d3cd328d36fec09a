//! Monotone Bezier tone curves: increment normalization, Bernstein-form
//! evaluation, a de Casteljau cross-check, 1D LUT baking, and pixel-wise
//! application of a full curve set.
//!
//! Each curve maps input intensity to output intensity on `[0, 1]`. Control
//! points are evenly spaced on the input axis; only their output values are
//! stored. Nonnegative increments normalized to a unit total pin the
//! endpoints at (0, 0) and (1, 1) and make every curve nondecreasing.

use thiserror::Error;

use crate::color_naming::{ColorGroup, GROUP_COUNT};
use crate::imaging::ImageBuffer;

#[derive(Debug, Error)]
pub enum CurveError {
    #[error("increment sum {0} is too small to define a curve")]
    DegenerateIncrements(f64),
    #[error("lut resolution {0} is invalid, need at least 2 samples")]
    BadResolution(usize),
    #[error("invalid control points: {0}")]
    InvalidControlPoints(String),
    #[error("invalid curve set: {0}")]
    InvalidCurveSet(String),
}

/// RGB channel selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Channel {
    R,
    G,
    B,
}

pub const CHANNEL_COUNT: usize = 3;

impl Channel {
    pub const ALL: [Channel; CHANNEL_COUNT] = [Channel::R, Channel::G, Channel::B];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Channel::R => "r",
            Channel::G => "g",
            Channel::B => "b",
        }
    }

    pub fn from_name(s: &str) -> Option<Channel> {
        Channel::ALL.into_iter().find(|c| c.name() == s)
    }
}

/// Nonnegative output-axis increments for one curve; M − 1 deltas define
/// M control points once normalized.
#[derive(Debug, Clone, PartialEq)]
pub struct IncrementSet {
    pub group: ColorGroup,
    pub channel: Channel,
    pub deltas: Vec<f64>,
}

/// Normalized control-point outputs for one curve: `P_0 = 0`, `P_{M−1} = 1`,
/// nondecreasing, all within `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ControlPoints {
    group: ColorGroup,
    channel: Channel,
    points: Vec<f64>,
}

impl ControlPoints {
    /// Validate externally supplied output values against the invariants.
    pub fn from_values(
        group: ColorGroup,
        channel: Channel,
        points: Vec<f64>,
    ) -> Result<ControlPoints, CurveError> {
        if points.len() < 2 {
            return Err(CurveError::InvalidControlPoints(format!(
                "need at least 2 control points, got {}",
                points.len()
            )));
        }
        if points[0] != 0.0 {
            return Err(CurveError::InvalidControlPoints(format!(
                "first control point must be 0, got {}",
                points[0]
            )));
        }
        let last = *points.last().unwrap();
        if (last - 1.0).abs() > 1e-12 {
            return Err(CurveError::InvalidControlPoints(format!(
                "last control point must be 1 within 1e-12, got {last}"
            )));
        }
        for w in points.windows(2) {
            if w[1] < w[0] {
                return Err(CurveError::InvalidControlPoints(format!(
                    "control points must be nondecreasing, got {} after {}",
                    w[1], w[0]
                )));
            }
        }
        if points.iter().any(|&p| !(0.0..=1.0).contains(&p)) {
            return Err(CurveError::InvalidControlPoints(
                "control points must lie in [0, 1]".into(),
            ));
        }
        Ok(ControlPoints {
            group,
            channel,
            points,
        })
    }

    /// The identity curve: evenly spaced outputs `m / (M − 1)`.
    pub fn identity(group: ColorGroup, channel: Channel, point_count: usize) -> ControlPoints {
        assert!(point_count >= 2);
        let n = point_count - 1;
        let points = (0..point_count).map(|m| m as f64 / n as f64).collect();
        ControlPoints {
            group,
            channel,
            points,
        }
    }

    pub fn group(&self) -> ColorGroup {
        self.group
    }

    pub fn channel(&self) -> Channel {
        self.channel
    }

    pub fn values(&self) -> &[f64] {
        &self.points
    }

    pub fn point_count(&self) -> usize {
        self.points.len()
    }
}

/// Accumulate increments into normalized control points:
/// `P_m = (Σ_{k≤m} ΔP_k) / S` with `S` the total. Exact division of the
/// running sum by its own final value pins `P_{M−1}` at exactly 1.
pub fn normalize_increments(inc: &IncrementSet) -> Result<ControlPoints, CurveError> {
    assert!(
        inc.deltas.iter().all(|&d| d >= 0.0),
        "increments must be nonnegative"
    );
    let mut cumulative = Vec::with_capacity(inc.deltas.len() + 1);
    cumulative.push(0.0f64);
    let mut running = 0.0f64;
    for &d in &inc.deltas {
        running += d;
        cumulative.push(running);
    }
    let total = running;
    if total <= 1e-12 {
        return Err(CurveError::DegenerateIncrements(total));
    }
    let points: Vec<f64> = cumulative.into_iter().map(|c| c / total).collect();
    Ok(ControlPoints {
        group: inc.group,
        channel: inc.channel,
        points,
    })
}

/// Bernstein basis of fixed degree with exact integer binomials.
#[derive(Debug, Clone)]
pub(crate) struct BernsteinBasis {
    binom: Vec<f64>,
}

impl BernsteinBasis {
    /// Basis for curves with `point_count` control points (degree
    /// `point_count − 1`). Binomials come from Pascal's rule in integer
    /// arithmetic.
    pub(crate) fn new(point_count: usize) -> BernsteinBasis {
        assert!(point_count >= 1);
        let n = point_count - 1;
        let mut row = vec![1u128; 1];
        for _ in 0..n {
            let mut next = vec![1u128; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        BernsteinBasis {
            binom: row.into_iter().map(|b| b as f64).collect(),
        }
    }

    /// Write the basis values `C(n, m)·(1−i)^{n−m}·i^m` into `out`.
    pub(crate) fn eval_into(&self, i: f64, out: &mut [f64]) {
        let count = self.binom.len();
        debug_assert_eq!(out.len(), count);
        let j = 1.0 - i;
        // forward powers of i, then multiply backward powers of (1 - i)
        let mut p = 1.0f64;
        for (m, o) in out.iter_mut().enumerate() {
            *o = self.binom[m] * p;
            p *= i;
        }
        let mut q = 1.0f64;
        for m in (0..count).rev() {
            out[m] *= q;
            q *= j;
        }
    }
}

/// Evaluate the curve in Bernstein form:
/// `B(i) = Σ_m P_m · C(M−1, m) · (1−i)^{M−1−m} · i^m`, with `i` clamped to
/// `[0, 1]`.
pub fn bezier_eval(cp: &ControlPoints, i: f64) -> f64 {
    let basis = BernsteinBasis::new(cp.point_count());
    let mut b = vec![0.0f64; cp.point_count()];
    basis.eval_into(i.clamp(0.0, 1.0), &mut b);
    b.iter().zip(cp.values()).map(|(w, p)| w * p).sum()
}

/// Evaluate the same curve by repeated linear interpolation. Independent
/// of the Bernstein route; used as its algebraic cross-check.
pub fn de_casteljau_eval(cp: &ControlPoints, i: f64) -> f64 {
    let i = i.clamp(0.0, 1.0);
    let mut scratch: Vec<f64> = cp.values().to_vec();
    let mut len = scratch.len();
    while len > 1 {
        for k in 0..len - 1 {
            scratch[k] = scratch[k] * (1.0 - i) + scratch[k + 1] * i;
        }
        len -= 1;
    }
    scratch[0]
}

/// Uniform samples of one curve for LUT application.
#[derive(Debug, Clone, PartialEq)]
pub struct TonemapLut {
    samples: Vec<f64>,
}

impl TonemapLut {
    pub fn resolution(&self) -> usize {
        self.samples.len()
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    /// Linear interpolation between the two neighboring samples; input is
    /// clamped to `[0, 1]`.
    #[inline]
    pub fn sample(&self, i: f64) -> f64 {
        let i = i.clamp(0.0, 1.0);
        let r = self.samples.len();
        let x = i * (r - 1) as f64;
        let k = (x.floor() as usize).min(r - 2);
        let t = x - k as f64;
        self.samples[k] + t * (self.samples[k + 1] - self.samples[k])
    }
}

/// Sample `cp` on a uniform grid of `resolution` points. Samples are forced
/// nondecreasing (floating-point dips are clipped to the running maximum).
pub fn bake_lut(cp: &ControlPoints, resolution: usize) -> Result<TonemapLut, CurveError> {
    if resolution < 2 {
        return Err(CurveError::BadResolution(resolution));
    }
    let basis = BernsteinBasis::new(cp.point_count());
    let mut b = vec![0.0f64; cp.point_count()];
    let mut samples = Vec::with_capacity(resolution);
    let mut running = 0.0f64;
    for r in 0..resolution {
        let i = r as f64 / (resolution - 1) as f64;
        basis.eval_into(i, &mut b);
        let v: f64 = b.iter().zip(cp.values()).map(|(w, p)| w * p).sum();
        running = running.max(v);
        samples.push(running);
    }
    Ok(TonemapLut { samples })
}

/// One curve per color group and RGB channel, all sharing one point count.
#[derive(Debug, Clone, PartialEq)]
pub struct CurveSet {
    /// Indexed `[group][channel]`.
    curves: Vec<ControlPoints>,
}

pub const CURVE_COUNT: usize = GROUP_COUNT * CHANNEL_COUNT;

impl CurveSet {
    /// Assemble 18 curves covering each (group, channel) pair exactly once,
    /// with a uniform point count.
    pub fn new(curves: Vec<ControlPoints>) -> Result<CurveSet, CurveError> {
        if curves.len() != CURVE_COUNT {
            return Err(CurveError::InvalidCurveSet(format!(
                "expected {CURVE_COUNT} curves, got {}",
                curves.len()
            )));
        }
        let m = curves[0].point_count();
        if curves.iter().any(|c| c.point_count() != m) {
            return Err(CurveError::InvalidCurveSet(
                "curves must share one control point count".into(),
            ));
        }
        let mut ordered: Vec<Option<ControlPoints>> = vec![None; CURVE_COUNT];
        for cp in curves {
            let slot = cp.group().index() * CHANNEL_COUNT + cp.channel().index();
            if ordered[slot].is_some() {
                return Err(CurveError::InvalidCurveSet(format!(
                    "duplicate curve for {} {}",
                    cp.group().name(),
                    cp.channel().name()
                )));
            }
            ordered[slot] = Some(cp);
        }
        Ok(CurveSet {
            curves: ordered.into_iter().map(|c| c.unwrap()).collect(),
        })
    }

    /// Identity curves for every group and channel.
    pub fn identity(point_count: usize) -> CurveSet {
        let mut curves = Vec::with_capacity(CURVE_COUNT);
        for group in ColorGroup::ALL {
            for channel in Channel::ALL {
                curves.push(ControlPoints::identity(group, channel, point_count));
            }
        }
        CurveSet { curves }
    }

    pub fn curve(&self, group: ColorGroup, channel: Channel) -> &ControlPoints {
        &self.curves[group.index() * CHANNEL_COUNT + channel.index()]
    }

    pub fn curves(&self) -> &[ControlPoints] {
        &self.curves
    }

    pub fn point_count(&self) -> usize {
        self.curves[0].point_count()
    }
}

/// How [`apply_curveset`] evaluates curves: exact Bernstein evaluation per
/// pixel, or a baked LUT with linear interpolation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalMode {
    Direct,
    Lut { resolution: usize },
}

/// Default LUT resolution for curve application.
pub const DEFAULT_LUT_RESOLUTION: usize = 4096;

impl Default for EvalMode {
    fn default() -> Self {
        EvalMode::Lut {
            resolution: DEFAULT_LUT_RESOLUTION,
        }
    }
}

/// Apply every group's three channel curves to `img`, producing one
/// globally adjusted image per group. Inputs are clamped to `[0, 1]`.
pub fn apply_curveset(curves: &CurveSet, img: &ImageBuffer, mode: EvalMode) -> [ImageBuffer; 6] {
    let m = curves.point_count();
    let basis = BernsteinBasis::new(m);
    let mut scratch = vec![0.0f64; m];

    std::array::from_fn(|group_idx| {
        let group = ColorGroup::ALL[group_idx];
        let mut out = ImageBuffer::new(img.width(), img.height());
        match mode {
            EvalMode::Direct => {
                let points: [&[f64]; CHANNEL_COUNT] =
                    std::array::from_fn(|c| curves.curve(group, Channel::ALL[c]).values());
                for (dst, src) in out
                    .data_mut()
                    .chunks_exact_mut(3)
                    .zip(img.data().chunks_exact(3))
                {
                    for c in 0..CHANNEL_COUNT {
                        let i = (src[c] as f64).clamp(0.0, 1.0);
                        basis.eval_into(i, &mut scratch);
                        let v: f64 = scratch.iter().zip(points[c]).map(|(w, p)| w * p).sum();
                        dst[c] = v as f32;
                    }
                }
            }
            EvalMode::Lut { resolution } => {
                let luts: [TonemapLut; CHANNEL_COUNT] = std::array::from_fn(|c| {
                    bake_lut(curves.curve(group, Channel::ALL[c]), resolution)
                        .expect("lut resolution >= 2")
                });
                for (dst, src) in out
                    .data_mut()
                    .chunks_exact_mut(3)
                    .zip(img.data().chunks_exact(3))
                {
                    for c in 0..CHANNEL_COUNT {
                        dst[c] = luts[c].sample(src[c] as f64) as f32;
                    }
                }
            }
        }
        out
    })
}
