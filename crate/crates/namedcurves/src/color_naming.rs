//! Per-pixel color-name probabilities, the 11 → 6 grouping, and the
//! probability-map visualizations.
//!
//! Two interchangeable backends produce the 11-name distribution: a binned
//! lookup table loaded from a `CNLUT` file, and a built-in parametric model
//! over HSV so the toolkit works without external data. Either way, every
//! classified pixel yields a valid probability vector over the canonical
//! name order.

use std::fs;
use std::io;
use std::path::Path;

use thiserror::Error;

use crate::atomic::write_atomic;
use crate::imaging::ImageBuffer;

/// Number of basic color terms.
pub const NAME_COUNT: usize = 11;
/// Number of merged color groups.
pub const GROUP_COUNT: usize = 6;

/// The 11 basic color terms, in canonical lexicographic order. This order
/// fixes vector layouts and file formats everywhere.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColorName {
    Black,
    Blue,
    Brown,
    Green,
    Grey,
    Orange,
    Pink,
    Purple,
    Red,
    White,
    Yellow,
}

impl ColorName {
    pub const ALL: [ColorName; NAME_COUNT] = [
        ColorName::Black,
        ColorName::Blue,
        ColorName::Brown,
        ColorName::Green,
        ColorName::Grey,
        ColorName::Orange,
        ColorName::Pink,
        ColorName::Purple,
        ColorName::Red,
        ColorName::White,
        ColorName::Yellow,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ColorName::Black => "black",
            ColorName::Blue => "blue",
            ColorName::Brown => "brown",
            ColorName::Green => "green",
            ColorName::Grey => "grey",
            ColorName::Orange => "orange",
            ColorName::Pink => "pink",
            ColorName::Purple => "purple",
            ColorName::Red => "red",
            ColorName::White => "white",
            ColorName::Yellow => "yellow",
        }
    }

    /// The merged group this name belongs to.
    pub fn group(self) -> ColorGroup {
        match self {
            ColorName::Red => ColorGroup::Red,
            ColorName::Green => ColorGroup::Green,
            ColorName::Blue => ColorGroup::Blue,
            ColorName::Orange | ColorName::Brown | ColorName::Yellow => ColorGroup::Oby,
            ColorName::Pink | ColorName::Purple => ColorGroup::PinkPurple,
            ColorName::White | ColorName::Grey | ColorName::Black => ColorGroup::Achromatic,
        }
    }
}

/// The 6 merged categories: the three primaries plus orange∪brown∪yellow,
/// pink∪purple, and white∪grey∪black. Together they partition the 11 names.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ColorGroup {
    Red,
    Green,
    Blue,
    Oby,
    PinkPurple,
    Achromatic,
}

impl ColorGroup {
    pub const ALL: [ColorGroup; GROUP_COUNT] = [
        ColorGroup::Red,
        ColorGroup::Green,
        ColorGroup::Blue,
        ColorGroup::Oby,
        ColorGroup::PinkPurple,
        ColorGroup::Achromatic,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            ColorGroup::Red => "red",
            ColorGroup::Green => "green",
            ColorGroup::Blue => "blue",
            ColorGroup::Oby => "oby",
            ColorGroup::PinkPurple => "pinkpurple",
            ColorGroup::Achromatic => "achromatic",
        }
    }

    pub fn from_name(s: &str) -> Option<ColorGroup> {
        ColorGroup::ALL.into_iter().find(|g| g.name() == s)
    }

    pub fn members(self) -> &'static [ColorName] {
        match self {
            ColorGroup::Red => &[ColorName::Red],
            ColorGroup::Green => &[ColorName::Green],
            ColorGroup::Blue => &[ColorName::Blue],
            ColorGroup::Oby => &[ColorName::Orange, ColorName::Brown, ColorName::Yellow],
            ColorGroup::PinkPurple => &[ColorName::Pink, ColorName::Purple],
            ColorGroup::Achromatic => &[ColorName::White, ColorName::Grey, ColorName::Black],
        }
    }
}

#[derive(Debug, Error)]
pub enum ColorNamingError {
    #[error("plane index {index} out of range for {planes} planes")]
    IndexOutOfRange { index: usize, planes: usize },
}

#[derive(Debug, Error)]
pub enum CnlutError {
    #[error("bad magic: {0}")]
    BadMagic(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("bin {bin} probabilities sum to {sum}, expected 1 within 1e-4")]
    NonNormalizedBin { bin: usize, sum: f64 },
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// Per-pixel probability planes aligned to a source image. `planes` is 11
/// (names) or 6 (groups); vectors are stored interleaved per pixel.
#[derive(Debug, Clone)]
pub struct ProbabilityMapSet {
    width: usize,
    height: usize,
    planes: usize,
    data: Vec<f32>,
}

impl ProbabilityMapSet {
    /// Wrap externally produced planes: `data` holds one `planes`-long
    /// vector per pixel, row-major. Panics unless `planes` is 11 or 6 and
    /// the length matches.
    pub fn from_raw(width: usize, height: usize, planes: usize, data: Vec<f32>) -> Self {
        assert!(
            planes == NAME_COUNT || planes == GROUP_COUNT,
            "maps carry 11 name planes or 6 group planes"
        );
        assert_eq!(
            data.len(),
            width * height * planes,
            "data length must be width * height * planes"
        );
        ProbabilityMapSet {
            width,
            height,
            planes,
            data,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn planes(&self) -> usize {
        self.planes
    }

    pub fn is_grouped(&self) -> bool {
        self.planes == GROUP_COUNT
    }

    /// The per-pixel probability vector, one entry per plane.
    #[inline]
    pub fn probabilities(&self, x: usize, y: usize) -> &[f32] {
        let i = (y * self.width + x) * self.planes;
        &self.data[i..i + self.planes]
    }

    pub fn value(&self, plane: usize, x: usize, y: usize) -> f32 {
        self.probabilities(x, y)[plane]
    }
}

/// Smooth Hermite step: 0 below `a`, 1 above `b`, `3t² − 2t³` between.
#[inline]
fn smooth_step(x: f64, a: f64, b: f64) -> f64 {
    if x <= a {
        0.0
    } else if x >= b {
        1.0
    } else {
        let t = (x - a) / (b - a);
        t * t * (3.0 - 2.0 * t)
    }
}

#[inline]
fn rgb_to_hsv(rgb: [f64; 3]) -> (f64, f64, f64) {
    let r = rgb[0];
    let g = rgb[1];
    let b = rgb[2];
    let max = r.max(g).max(b);
    let min = r.min(g).min(b);
    let delta = max - min;
    let mut h = if delta == 0.0 {
        0.0
    } else if max == r {
        60.0 * (((g - b) / delta).rem_euclid(6.0))
    } else if max == g {
        60.0 * ((b - r) / delta + 2.0)
    } else {
        60.0 * ((r - g) / delta + 4.0)
    };
    if h >= 360.0 {
        h -= 360.0;
    }
    let s = if max == 0.0 { 0.0 } else { delta / max };
    (h, s, max)
}

// Chromatic terms in hue-circle order. Indices into the 11-vector.
const HUE_ORDER: [ColorName; 7] = [
    ColorName::Red,
    ColorName::Orange,
    ColorName::Yellow,
    ColorName::Green,
    ColorName::Blue,
    ColorName::Purple,
    ColorName::Pink,
];

/// Parametric HSV fallback model. Achromatic mass is gated on saturation;
/// within it, black/white/grey shares are gated on value. The chromatic
/// remainder is split over fuzzy hue bands (full membership inside each
/// core, linear ramps between adjacent cores, summing to 1 around the
/// circle), and a value gate carves brown out of orange+yellow.
///
/// `hue_cores` are `(start, end)` degrees in a shifted frame: real hue plus
/// `hue_shift`, modulo 360. With the default shift of 15° the red core
/// `[0, 30]` corresponds to real hues `[345°, 15°]` across the wrap.
#[derive(Debug, Clone, PartialEq)]
pub struct ParametricModel {
    /// Saturation band `(a, b)` below/above which a pixel is fully
    /// achromatic/chromatic.
    pub saturation_gate: (f64, f64),
    /// Value band for the black share of the achromatic mass.
    pub black_gate: (f64, f64),
    /// Value band for the white share of the achromatic mass.
    pub white_gate: (f64, f64),
    /// Value band below which orange/yellow membership turns brown.
    pub brown_gate: (f64, f64),
    /// Degrees added to the hue before the core lookup.
    pub hue_shift: f64,
    /// Core intervals for red, orange, yellow, green, blue, purple, pink
    /// in the shifted frame, each within `[0, 360)` and in ascending order.
    pub hue_cores: [(f64, f64); 7],
}

impl Default for ParametricModel {
    fn default() -> Self {
        ParametricModel {
            saturation_gate: (0.15, 0.30),
            black_gate: (0.20, 0.35),
            white_gate: (0.75, 0.90),
            brown_gate: (0.45, 0.65),
            hue_shift: 15.0,
            // red [345,15], orange [25,45], yellow [55,70], green [85,160],
            // blue [200,260], purple [270,300], pink [315,340] in real hue.
            hue_cores: [
                (0.0, 30.0),
                (40.0, 60.0),
                (70.0, 85.0),
                (100.0, 175.0),
                (215.0, 275.0),
                (285.0, 315.0),
                (330.0, 355.0),
            ],
        }
    }
}

impl ParametricModel {
    /// Fuzzy hue memberships in `HUE_ORDER`; sums to 1 for any hue.
    fn hue_membership(&self, hue: f64) -> [f64; 7] {
        let hs = (hue + self.hue_shift).rem_euclid(360.0);
        let mut m = [0.0f64; 7];
        for (k, &(start, end)) in self.hue_cores.iter().enumerate() {
            if hs >= start && hs <= end {
                m[k] = 1.0;
                return m;
            }
        }
        // Between core k and the next core (wrapping to red at 360°).
        for k in 0..self.hue_cores.len() {
            let end = self.hue_cores[k].1;
            let (next, next_start) = if k + 1 < self.hue_cores.len() {
                (k + 1, self.hue_cores[k + 1].0)
            } else {
                (0, 360.0)
            };
            if hs > end && hs < next_start {
                let t = (hs - end) / (next_start - end);
                m[k] = 1.0 - t;
                m[next] = t;
                return m;
            }
        }
        // Unreachable for well-formed cores; attribute to red for safety.
        m[0] = 1.0;
        m
    }

    fn classify(&self, rgb: [f64; 3]) -> [f64; NAME_COUNT] {
        let (h, s, v) = rgb_to_hsv(rgb);
        let achromatic = 1.0 - smooth_step(s, self.saturation_gate.0, self.saturation_gate.1);
        let black = 1.0 - smooth_step(v, self.black_gate.0, self.black_gate.1);
        let white = smooth_step(v, self.white_gate.0, self.white_gate.1);
        let grey = 1.0 - black - white;

        let mut membership = self.hue_membership(h);
        let gate = 1.0 - smooth_step(v, self.brown_gate.0, self.brown_gate.1);
        let brown = (membership[1] + membership[2]) * gate;
        membership[1] *= 1.0 - gate;
        membership[2] *= 1.0 - gate;

        let chromatic = 1.0 - achromatic;
        let mut out = [0.0f64; NAME_COUNT];
        out[ColorName::Black.index()] = achromatic * black;
        out[ColorName::Grey.index()] = achromatic * grey;
        out[ColorName::White.index()] = achromatic * white;
        out[ColorName::Brown.index()] = chromatic * brown;
        for (k, name) in HUE_ORDER.iter().enumerate() {
            out[name.index()] += chromatic * membership[k];
        }
        out
    }
}

/// Binned color-name table: `cube_side`³ RGB bins, 11 probabilities each.
#[derive(Debug, Clone)]
pub struct CnLut {
    cube_side: usize,
    /// Bin-major: 11 consecutive floats per bin index
    /// `((ir·N) + ig)·N + ib`.
    probs: Vec<f32>,
}

impl CnLut {
    pub fn cube_side(&self) -> usize {
        self.cube_side
    }

    /// Build a table by classifying each bin center with `model`.
    pub fn sample_from(model: &ColorNamingModel, cube_side: usize) -> CnLut {
        assert!(cube_side >= 1);
        let n = cube_side;
        let mut probs = Vec::with_capacity(n * n * n * NAME_COUNT);
        for ir in 0..n {
            for ig in 0..n {
                for ib in 0..n {
                    let center = |i: usize| (i as f64 + 0.5) / n as f64;
                    let p = model.classify([center(ir), center(ig), center(ib)]);
                    probs.extend(p.iter().map(|&v| v as f32));
                }
            }
        }
        CnLut { cube_side, probs }
    }

    #[inline]
    fn bin_index(&self, rgb: [f64; 3]) -> usize {
        let n = self.cube_side;
        let idx = |v: f64| {
            let v8 = crate::imaging::quantize_8bit(v as f32) as usize;
            (v8 * n / 256).min(n - 1)
        };
        ((idx(rgb[0]) * n) + idx(rgb[1])) * n + idx(rgb[2])
    }

    fn classify(&self, rgb: [f64; 3]) -> [f64; NAME_COUNT] {
        let b = self.bin_index(rgb);
        let raw = &self.probs[b * NAME_COUNT..(b + 1) * NAME_COUNT];
        let mut out = [0.0f64; NAME_COUNT];
        let mut sum = 0.0f64;
        for (o, &v) in out.iter_mut().zip(raw) {
            *o = v as f64;
            sum += v as f64;
        }
        // Stored bins are validated to sum to 1 within 1e-4; renormalize so
        // classification always emits an exact distribution.
        for o in out.iter_mut() {
            *o /= sum;
        }
        out
    }
}

/// A color-naming backend: an external binned table or the built-in
/// parametric model.
#[derive(Debug, Clone)]
pub enum ColorNamingModel {
    Parametric(ParametricModel),
    Lut(CnLut),
}

impl ColorNamingModel {
    /// The built-in parametric model with default constants.
    pub fn parametric() -> Self {
        ColorNamingModel::Parametric(ParametricModel::default())
    }

    /// Probability of each of the 11 color names for one sRGB value in
    /// `[0, 1]` (clamped first). The result is a probability vector in
    /// canonical name order.
    pub fn classify(&self, rgb: [f64; 3]) -> [f64; NAME_COUNT] {
        let rgb = [
            rgb[0].clamp(0.0, 1.0),
            rgb[1].clamp(0.0, 1.0),
            rgb[2].clamp(0.0, 1.0),
        ];
        match self {
            ColorNamingModel::Parametric(m) => m.classify(rgb),
            ColorNamingModel::Lut(l) => l.classify(rgb),
        }
    }
}

const CNLUT_MAGIC: &str = "CNLUT";
const CNLUT_VERSION: &str = "1";

/// Load a `CNLUT 1` file: one ASCII header line `CNLUT 1 <N> 11`, then
/// `N³ × 11` little-endian `f32` probabilities, 11 per bin in canonical
/// name order with bin index `((ir·N) + ig)·N + ib`.
pub fn load_cnlut(path: impl AsRef<Path>) -> Result<ColorNamingModel, CnlutError> {
    let bytes = fs::read(path.as_ref())?;
    let nl = bytes
        .iter()
        .position(|&b| b == b'\n')
        .ok_or_else(|| CnlutError::BadMagic("missing header line".into()))?;
    let header = std::str::from_utf8(&bytes[..nl])
        .map_err(|_| CnlutError::BadMagic("header is not ASCII".into()))?;
    let fields: Vec<&str> = header.split_whitespace().collect();
    if fields.len() != 4 || fields[0] != CNLUT_MAGIC || fields[1] != CNLUT_VERSION {
        return Err(CnlutError::BadMagic(format!("bad header {header:?}")));
    }
    let n: usize = fields[2]
        .parse()
        .map_err(|_| CnlutError::DimensionMismatch(format!("bad cube side {:?}", fields[2])))?;
    if n == 0 {
        return Err(CnlutError::DimensionMismatch(
            "cube side must be >= 1".into(),
        ));
    }
    let planes: usize = fields[3]
        .parse()
        .map_err(|_| CnlutError::DimensionMismatch(format!("bad plane count {:?}", fields[3])))?;
    if planes != NAME_COUNT {
        return Err(CnlutError::DimensionMismatch(format!(
            "expected {NAME_COUNT} planes, header says {planes}"
        )));
    }

    let payload = &bytes[nl + 1..];
    let expected = n * n * n * NAME_COUNT * 4;
    if payload.len() != expected {
        return Err(CnlutError::DimensionMismatch(format!(
            "payload is {} bytes, expected {expected} for N={n}",
            payload.len()
        )));
    }
    let mut probs = Vec::with_capacity(n * n * n * NAME_COUNT);
    for chunk in payload.chunks_exact(4) {
        probs.push(f32::from_le_bytes([chunk[0], chunk[1], chunk[2], chunk[3]]));
    }
    for (bin, vec) in probs.chunks_exact(NAME_COUNT).enumerate() {
        let sum: f64 = vec.iter().map(|&v| v as f64).sum();
        if (sum - 1.0).abs() > 1e-4 {
            return Err(CnlutError::NonNormalizedBin { bin, sum });
        }
    }
    Ok(ColorNamingModel::Lut(CnLut {
        cube_side: n,
        probs,
    }))
}

/// Write a table in the `CNLUT 1` format read by [`load_cnlut`].
pub fn save_cnlut(lut: &CnLut, path: impl AsRef<Path>) -> Result<(), CnlutError> {
    let n = lut.cube_side;
    let mut out = Vec::with_capacity(16 + lut.probs.len() * 4);
    out.extend_from_slice(format!("{CNLUT_MAGIC} {CNLUT_VERSION} {n} {NAME_COUNT}\n").as_bytes());
    for &v in &lut.probs {
        out.extend_from_slice(&v.to_le_bytes());
    }
    write_atomic(path.as_ref(), &out)?;
    Ok(())
}

/// Sum the 11-name vector into the 6 groups. Pure addition: total mass is
/// conserved and nothing is renormalized.
pub fn group_probabilities(p11: &[f64; NAME_COUNT]) -> [f64; GROUP_COUNT] {
    let mut out = [0.0f64; GROUP_COUNT];
    for name in ColorName::ALL {
        out[name.group().index()] += p11[name.index()];
    }
    out
}

/// Classify every pixel of `img`, optionally grouped to 6 planes.
pub fn compute_maps(
    model: &ColorNamingModel,
    img: &ImageBuffer,
    grouped: bool,
) -> ProbabilityMapSet {
    let planes = if grouped { GROUP_COUNT } else { NAME_COUNT };
    let mut data = Vec::with_capacity(img.pixel_count() * planes);
    for y in 0..img.height() {
        for x in 0..img.width() {
            let p = img.pixel(x, y);
            let p11 = model.classify([p[0] as f64, p[1] as f64, p[2] as f64]);
            if grouped {
                let g = group_probabilities(&p11);
                data.extend(g.iter().map(|&v| v as f32));
            } else {
                data.extend(p11.iter().map(|&v| v as f32));
            }
        }
    }
    ProbabilityMapSet {
        width: img.width(),
        height: img.height(),
        planes,
        data,
    }
}

/// Visualize one probability plane: per pixel, blend from white toward the
/// original color by the probability, `out = (1 − p)·white + p·rgb`.
pub fn render_map_visualization(
    img: &ImageBuffer,
    maps: &ProbabilityMapSet,
    plane: usize,
) -> Result<ImageBuffer, ColorNamingError> {
    assert!(
        img.width() == maps.width() && img.height() == maps.height(),
        "image and maps must share dimensions"
    );
    if plane >= maps.planes() {
        return Err(ColorNamingError::IndexOutOfRange {
            index: plane,
            planes: maps.planes(),
        });
    }
    let out = ImageBuffer::from_fn(img.width(), img.height(), |x, y| {
        let p = maps.value(plane, x, y);
        let rgb = img.pixel(x, y);
        [
            (1.0 - p) + p * rgb[0],
            (1.0 - p) + p * rgb[1],
            (1.0 - p) + p * rgb[2],
        ]
    });
    Ok(out)
}

#[cfg(test)]
pub(crate) mod test_support {
    use super::*;

    /// Grouped maps with one explicit distribution per pixel, row-major.
    pub(crate) fn grouped_maps(
        width: usize,
        height: usize,
        rows: &[[f64; GROUP_COUNT]],
    ) -> ProbabilityMapSet {
        let mut data = Vec::with_capacity(rows.len() * GROUP_COUNT);
        for r in rows {
            data.extend(r.iter().map(|&v| v as f32));
        }
        ProbabilityMapSet::from_raw(width, height, GROUP_COUNT, data)
    }
}
