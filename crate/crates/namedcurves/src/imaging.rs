//! Image buffers, PNG I/O, and sRGB → CIELAB conversion.
//!
//! All pixel data is interleaved RGB `f32` in nominal range `[0, 1]`,
//! sRGB-encoded unless stated otherwise. Color difference metrics run in
//! `f64` on top of the conversions defined here.

use std::io;
use std::path::Path;

use image::{DynamicImage, ImageEncoder, ImageFormat, ImageReader};
use thiserror::Error;

use crate::atomic::write_atomic;

#[derive(Debug, Error)]
pub enum ImagingError {
    #[error("file not found: {0}")]
    FileNotFound(String),
    #[error("unsupported image format: {0}")]
    UnsupportedFormat(String),
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// Height×width RGB image, interleaved `f32` samples in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImageBuffer {
    width: usize,
    height: usize,
    data: Vec<f32>,
}

impl ImageBuffer {
    /// All-black image. Panics if either dimension is zero.
    pub fn new(width: usize, height: usize) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be >= 1");
        ImageBuffer {
            width,
            height,
            data: vec![0.0; width * height * 3],
        }
    }

    /// Wrap an interleaved RGB buffer. Panics on a length mismatch.
    pub fn from_raw(width: usize, height: usize, data: Vec<f32>) -> Self {
        assert!(width >= 1 && height >= 1, "image dimensions must be >= 1");
        assert_eq!(
            data.len(),
            width * height * 3,
            "buffer length must be width * height * 3"
        );
        ImageBuffer {
            width,
            height,
            data,
        }
    }

    /// Build an image by evaluating `f(x, y)` for every pixel.
    pub fn from_fn(
        width: usize,
        height: usize,
        mut f: impl FnMut(usize, usize) -> [f32; 3],
    ) -> Self {
        let mut img = ImageBuffer::new(width, height);
        for y in 0..height {
            for x in 0..width {
                img.set_pixel(x, y, f(x, y));
            }
        }
        img
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn pixel_count(&self) -> usize {
        self.width * self.height
    }

    pub fn data(&self) -> &[f32] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [f32] {
        &mut self.data
    }

    #[inline]
    pub fn pixel(&self, x: usize, y: usize) -> [f32; 3] {
        let i = (y * self.width + x) * 3;
        [self.data[i], self.data[i + 1], self.data[i + 2]]
    }

    #[inline]
    pub fn set_pixel(&mut self, x: usize, y: usize, rgb: [f32; 3]) {
        let i = (y * self.width + x) * 3;
        self.data[i] = rgb[0];
        self.data[i + 1] = rgb[1];
        self.data[i + 2] = rgb[2];
    }

    pub fn same_dimensions(&self, other: &ImageBuffer) -> bool {
        self.width == other.width && self.height == other.height
    }
}

/// Quantize a `[0, 1]` sample to 8 bits: clamp, scale by 255, round half
/// away from zero.
#[inline]
pub fn quantize_8bit(v: f32) -> u8 {
    (v.clamp(0.0, 1.0) * 255.0).round() as u8
}

/// Load an 8- or 16-bit RGB/RGBA PNG. Values are scaled to `[0, 1]` by
/// dividing by 255 or 65535; an alpha channel is dropped. Palette images
/// arrive already expanded by the decoder.
pub fn load_png(path: impl AsRef<Path>) -> Result<ImageBuffer, ImagingError> {
    let path = path.as_ref();
    let reader = ImageReader::open(path).map_err(|e| {
        if e.kind() == io::ErrorKind::NotFound {
            ImagingError::FileNotFound(path.display().to_string())
        } else {
            ImagingError::Io(e)
        }
    })?;
    let reader = reader.with_guessed_format()?;
    if reader.format() != Some(ImageFormat::Png) {
        return Err(ImagingError::UnsupportedFormat(format!(
            "{}: not a PNG file",
            path.display()
        )));
    }
    let decoded = reader
        .decode()
        .map_err(|e| ImagingError::UnsupportedFormat(format!("{}: {e}", path.display())))?;

    let (width, height) = (decoded.width() as usize, decoded.height() as usize);
    let mut data = Vec::with_capacity(width * height * 3);
    match decoded {
        DynamicImage::ImageRgb8(im) => {
            for px in im.pixels() {
                data.extend(px.0.iter().map(|&v| v as f32 / 255.0));
            }
        }
        DynamicImage::ImageRgba8(im) => {
            for px in im.pixels() {
                data.extend(px.0[..3].iter().map(|&v| v as f32 / 255.0));
            }
        }
        DynamicImage::ImageRgb16(im) => {
            for px in im.pixels() {
                data.extend(px.0.iter().map(|&v| v as f32 / 65535.0));
            }
        }
        DynamicImage::ImageRgba16(im) => {
            for px in im.pixels() {
                data.extend(px.0[..3].iter().map(|&v| v as f32 / 65535.0));
            }
        }
        other => {
            return Err(ImagingError::UnsupportedFormat(format!(
                "{}: expected 8/16-bit RGB or RGBA, got {:?}",
                path.display(),
                other.color()
            )));
        }
    }
    Ok(ImageBuffer::from_raw(width, height, data))
}

/// Write an 8-bit RGB PNG. Samples are clamped to `[0, 1]` and quantized
/// with round half away from zero. The file appears atomically (temp file
/// plus rename), so no partial output survives a failure.
pub fn save_png(img: &ImageBuffer, path: impl AsRef<Path>) -> Result<(), ImagingError> {
    let bytes: Vec<u8> = img.data().iter().map(|&v| quantize_8bit(v)).collect();
    let mut encoded = Vec::new();
    image::codecs::png::PngEncoder::new(&mut encoded)
        .write_image(
            &bytes,
            img.width() as u32,
            img.height() as u32,
            image::ExtendedColorType::Rgb8,
        )
        .map_err(|e| ImagingError::Io(io::Error::other(e)))?;
    write_atomic(path.as_ref(), &encoded)?;
    Ok(())
}

/// Write an 8-bit grayscale PNG from per-pixel values in `[0, 1]`.
pub(crate) fn save_gray_png(
    width: usize,
    height: usize,
    values: &[f32],
    path: impl AsRef<Path>,
) -> Result<(), ImagingError> {
    assert_eq!(values.len(), width * height);
    let bytes: Vec<u8> = values.iter().map(|&v| quantize_8bit(v)).collect();
    let mut encoded = Vec::new();
    image::codecs::png::PngEncoder::new(&mut encoded)
        .write_image(
            &bytes,
            width as u32,
            height as u32,
            image::ExtendedColorType::L8,
        )
        .map_err(|e| ImagingError::Io(io::Error::other(e)))?;
    write_atomic(path.as_ref(), &encoded)?;
    Ok(())
}

/// CIELAB color value (D65 white point).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct LabPixel {
    /// Lightness in `[0, 100]`.
    pub l: f64,
    pub a: f64,
    pub b: f64,
}

impl LabPixel {
    pub fn new(l: f64, a: f64, b: f64) -> Self {
        LabPixel { l, a, b }
    }
}

// sRGB (IEC 61966-2-1) linearization.
#[inline]
fn srgb_eotf(c: f64) -> f64 {
    if c <= 0.04045 {
        c / 12.92
    } else {
        ((c + 0.055) / 1.055).powf(2.4)
    }
}

// CIE Lab forward companding with the exact rational constants.
#[inline]
fn lab_f(t: f64) -> f64 {
    const EPS: f64 = 216.0 / 24389.0;
    const KAPPA: f64 = 24389.0 / 27.0;
    if t > EPS {
        t.cbrt()
    } else {
        (KAPPA * t + 16.0) / 116.0
    }
}

const D65_XN: f64 = 0.95047;
const D65_YN: f64 = 1.0;
const D65_ZN: f64 = 1.08883;

/// Convert an sRGB triple in `[0, 1]` to CIELAB (D65). Inputs are clamped
/// to `[0, 1]` first.
pub fn srgb_to_lab(rgb: [f64; 3]) -> LabPixel {
    let r = srgb_eotf(rgb[0].clamp(0.0, 1.0));
    let g = srgb_eotf(rgb[1].clamp(0.0, 1.0));
    let b = srgb_eotf(rgb[2].clamp(0.0, 1.0));

    let x = 0.4124564 * r + 0.3575761 * g + 0.1804375 * b;
    let y = 0.2126729 * r + 0.7151522 * g + 0.0721750 * b;
    let z = 0.0193339 * r + 0.1191920 * g + 0.9503041 * b;

    let fx = lab_f(x / D65_XN);
    let fy = lab_f(y / D65_YN);
    let fz = lab_f(z / D65_ZN);

    LabPixel {
        l: 116.0 * fy - 16.0,
        a: 500.0 * (fx - fy),
        b: 200.0 * (fy - fz),
    }
}

/// Lab → (L, C, h). Chroma is `sqrt(a² + b²)`; hue is in degrees in
/// `[0, 360)` and defined as 0 when chroma is 0.
pub fn lab_to_lch(p: LabPixel) -> (f64, f64, f64) {
    let c = p.a.hypot(p.b);
    if c == 0.0 {
        return (p.l, 0.0, 0.0);
    }
    let mut h = p.b.atan2(p.a).to_degrees();
    if h < 0.0 {
        h += 360.0;
    }
    if h >= 360.0 {
        h -= 360.0;
    }
    (p.l, c, h)
}

/// Area-averaged reduction so that the longest side is at most `max_side`.
/// Returns a clone when the image already fits.
pub fn downsample_max_side(img: &ImageBuffer, max_side: usize) -> ImageBuffer {
    assert!(max_side >= 1);
    let (w, h) = (img.width(), img.height());
    let longest = w.max(h);
    if longest <= max_side {
        return img.clone();
    }
    let scale = max_side as f64 / longest as f64;
    let nw = ((w as f64 * scale).round() as usize).max(1);
    let nh = ((h as f64 * scale).round() as usize).max(1);

    // Fractional box filter: each output pixel averages its exact source span.
    let mut out = ImageBuffer::new(nw, nh);
    let x_ratio = w as f64 / nw as f64;
    let y_ratio = h as f64 / nh as f64;
    for oy in 0..nh {
        let y0 = oy as f64 * y_ratio;
        let y1 = (oy + 1) as f64 * y_ratio;
        for ox in 0..nw {
            let x0 = ox as f64 * x_ratio;
            let x1 = (ox + 1) as f64 * x_ratio;
            let mut acc = [0.0f64; 3];
            let mut area = 0.0f64;
            let sy0 = y0.floor() as usize;
            let sy1 = (y1.ceil() as usize).min(h);
            let sx0 = x0.floor() as usize;
            let sx1 = (x1.ceil() as usize).min(w);
            for sy in sy0..sy1 {
                let wy = (y1.min((sy + 1) as f64) - y0.max(sy as f64)).max(0.0);
                for sx in sx0..sx1 {
                    let wx = (x1.min((sx + 1) as f64) - x0.max(sx as f64)).max(0.0);
                    let wgt = wx * wy;
                    if wgt > 0.0 {
                        let px = img.pixel(sx, sy);
                        acc[0] += wgt * px[0] as f64;
                        acc[1] += wgt * px[1] as f64;
                        acc[2] += wgt * px[2] as f64;
                        area += wgt;
                    }
                }
            }
            out.set_pixel(
                ox,
                oy,
                [
                    (acc[0] / area) as f32,
                    (acc[1] / area) as f32,
                    (acc[2] / area) as f32,
                ],
            );
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use tempfile::tempdir;

    #[test]
    fn quantize_rules() {
        assert_eq!(quantize_8bit(1.0), 255);
        assert_eq!(quantize_8bit(0.5), 128); // round(127.5) away from zero
        assert_eq!(quantize_8bit(1.2), 255); // clamp
        assert_eq!(quantize_8bit(-0.3), 0);
        assert_eq!(quantize_8bit(0.0), 0);
    }

    #[test]
    fn load_scales_8bit_values() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("a.png");
        let im = image::RgbImage::from_fn(2, 1, |x, _| {
            if x == 0 {
                image::Rgb([255u8, 128, 0])
            } else {
                image::Rgb([0, 0, 0])
            }
        });
        im.save(&path).unwrap();
        let img = load_png(&path).unwrap();
        let p = img.pixel(0, 0);
        assert_eq!(p[0], 1.0);
        assert!((p[1] - 128.0 / 255.0).abs() < 1e-9);
        assert_eq!(p[2], 0.0);
        assert_eq!(img.pixel(1, 0), [0.0, 0.0, 0.0]);
    }

    #[test]
    fn load_scales_16bit_values() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("a16.png");
        let im = image::ImageBuffer::<image::Rgb<u16>, Vec<u16>>::from_fn(1, 1, |_, _| {
            image::Rgb([65535u16, 0, 65535])
        });
        im.save(&path).unwrap();
        let img = load_png(&path).unwrap();
        assert_eq!(img.pixel(0, 0), [1.0, 0.0, 1.0]);
    }

    #[test]
    fn alpha_is_dropped() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("rgba.png");
        let im = image::RgbaImage::from_pixel(2, 2, image::Rgba([10u8, 20, 30, 40]));
        im.save(&path).unwrap();
        let img = load_png(&path).unwrap();
        let p = img.pixel(1, 1);
        assert!((p[0] - 10.0 / 255.0).abs() < 1e-9);
        assert!((p[2] - 30.0 / 255.0).abs() < 1e-9);
    }

    #[test]
    fn missing_file_and_bad_format() {
        let dir = tempdir().unwrap();
        match load_png(dir.path().join("nope.png")) {
            Err(ImagingError::FileNotFound(_)) => {}
            other => panic!("expected FileNotFound, got {other:?}"),
        }
        let txt = dir.path().join("not_png.png");
        std::fs::write(&txt, b"hello world, definitely not a png").unwrap();
        match load_png(&txt) {
            Err(ImagingError::UnsupportedFormat(_)) => {}
            other => panic!("expected UnsupportedFormat, got {other:?}"),
        }
    }

    #[test]
    fn grayscale_png_is_rejected() {
        let dir = tempdir().unwrap();
        let path = dir.path().join("gray.png");
        let im = image::GrayImage::from_pixel(3, 3, image::Luma([99u8]));
        im.save(&path).unwrap();
        assert!(matches!(
            load_png(&path),
            Err(ImagingError::UnsupportedFormat(_))
        ));
    }

    #[test]
    fn png_round_trip_is_byte_exact() {
        let dir = tempdir().unwrap();
        let src = dir.path().join("src.png");
        let dst = dir.path().join("dst.png");
        let im = image::RgbImage::from_fn(13, 7, |x, y| {
            image::Rgb([
                (x * 19 + y * 3) as u8,
                (x * 7 + y * 31) as u8,
                (x * 11 + y * 13) as u8,
            ])
        });
        im.save(&src).unwrap();
        let img = load_png(&src).unwrap();
        save_png(&img, &dst).unwrap();
        let back = image::open(&dst).unwrap().to_rgb8();
        assert_eq!(im.as_raw(), back.as_raw());
    }

    #[test]
    fn lab_white_black_and_mid_grey() {
        let w = srgb_to_lab([1.0, 1.0, 1.0]);
        assert!((w.l - 100.0).abs() < 1e-3);
        assert!(w.a.abs() < 1e-3 && w.b.abs() < 1e-3);

        let k = srgb_to_lab([0.0, 0.0, 0.0]);
        assert_eq!((k.l, k.a, k.b), (0.0, 0.0, 0.0));

        // Frozen from an independent implementation of the published
        // sRGB EOTF + XYZ + Lab formulas.
        let g = srgb_to_lab([0.5, 0.5, 0.5]);
        assert!((g.l - 53.38896705407973).abs() < 1e-9);
        assert!(g.a.abs() < 1e-3 && g.b.abs() < 1e-3);
    }

    #[test]
    fn lab_lightness_monotone_for_greys() {
        let mut prev = -1.0;
        for k in 0..=100 {
            let v = k as f64 / 100.0;
            let l = srgb_to_lab([v, v, v]).l;
            assert!(l > prev, "L not increasing at grey {v}");
            prev = l;
        }
    }

    #[test]
    fn lch_conventions() {
        let (l, c, h) = lab_to_lch(LabPixel::new(50.0, 0.0, 0.0));
        assert_eq!((l, c, h), (50.0, 0.0, 0.0));

        let (_, c, h) = lab_to_lch(LabPixel::new(50.0, 3.0, 4.0));
        assert!((c - 5.0).abs() < 1e-12);
        assert!((h - 53.13010235415598).abs() < 1e-9);

        let (_, c, h) = lab_to_lch(LabPixel::new(50.0, -3.0, 0.0));
        assert!((c - 3.0).abs() < 1e-12);
        assert!((h - 180.0).abs() < 1e-12);
    }

    #[test]
    fn downsample_constant_image_stays_constant() {
        let img = ImageBuffer::from_fn(100, 40, |_, _| [0.25, 0.5, 0.75]);
        let small = downsample_max_side(&img, 32);
        assert_eq!(small.width(), 32);
        assert_eq!(small.height(), 13);
        for y in 0..small.height() {
            for x in 0..small.width() {
                let p = small.pixel(x, y);
                assert!((p[0] - 0.25).abs() < 1e-6);
                assert!((p[1] - 0.5).abs() < 1e-6);
                assert!((p[2] - 0.75).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn downsample_preserves_mean() {
        let img = ImageBuffer::from_fn(97, 53, |x, y| {
            [
                ((x * 13 + y * 7) % 64) as f32 / 63.0,
                ((x * 5 + y * 29) % 64) as f32 / 63.0,
                ((x * 3 + y * 11) % 64) as f32 / 63.0,
            ]
        });
        let small = downsample_max_side(&img, 24);
        let mean = |im: &ImageBuffer| {
            im.data().iter().map(|&v| v as f64).sum::<f64>() / im.data().len() as f64
        };
        assert!((mean(&img) - mean(&small)).abs() < 2e-3);
    }
}
