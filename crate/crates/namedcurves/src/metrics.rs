//! Image-pair quality metrics: PSNR, SSIM, mean CIE76 and CIEDE2000 color
//! differences, and the composite fidelity loss used when fitting against
//! an expert-retouched target.
//!
//! All accumulation runs in `f64` with a fixed reduction order, so results
//! are bit-reproducible across runs.

use thiserror::Error;

use crate::imaging::{srgb_to_lab, ImageBuffer, LabPixel};

#[derive(Debug, Error)]
pub enum MetricsError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("image too small: SSIM needs both sides >= {0} pixels")]
    ImageTooSmall(usize),
}

/// Scores for one image pair. `psnr` is `f64::INFINITY` for bit-identical
/// images; `loss` is only present when a fit computed it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub psnr: f64,
    pub ssim: f64,
    pub de_ab: f64,
    pub de_00: f64,
    pub loss: Option<f64>,
}

/// Weight of the standardization term in [`fidelity_loss`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    pub alpha: f64,
}

impl Default for LossConfig {
    fn default() -> Self {
        LossConfig { alpha: 0.5 }
    }
}

fn check_dims(a: &ImageBuffer, b: &ImageBuffer) -> Result<(), MetricsError> {
    if !a.same_dimensions(b) {
        return Err(MetricsError::DimensionMismatch(format!(
            "{}x{} vs {}x{}",
            a.width(),
            a.height(),
            b.width(),
            b.height()
        )));
    }
    Ok(())
}

/// Mean squared difference over all pixels and channels on the `[0, 1]`
/// scale.
pub fn mse(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64, MetricsError> {
    check_dims(a, b)?;
    let mut acc = 0.0f64;
    for (x, y) in a.data().iter().zip(b.data()) {
        let d = *x as f64 - *y as f64;
        acc += d * d;
    }
    Ok(acc / a.data().len() as f64)
}

/// Peak signal-to-noise ratio in decibels: `10·log10(1 / MSE)`. Identical
/// images return `f64::INFINITY`.
pub fn psnr(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64, MetricsError> {
    let m = mse(a, b)?;
    if m == 0.0 {
        return Ok(f64::INFINITY);
    }
    Ok(-10.0 * m.log10())
}

/// SSIM window size (11×11) and Gaussian sigma.
const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

/// Normalized 1D Gaussian taps for the separable SSIM window.
fn ssim_kernel() -> [f64; SSIM_WINDOW] {
    let r = (SSIM_WINDOW / 2) as isize;
    let mut k = [0.0f64; SSIM_WINDOW];
    let mut sum = 0.0;
    for (i, t) in k.iter_mut().enumerate() {
        let d = (i as isize - r) as f64;
        *t = (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp();
        sum += *t;
    }
    for t in k.iter_mut() {
        *t /= sum;
    }
    k
}

/// Valid-mode separable convolution with the SSIM kernel.
/// `src` is `width`×`height`; output is `(width−10)`×`(height−10)`.
fn gaussian_valid(
    src: &[f64],
    width: usize,
    height: usize,
    kernel: &[f64; SSIM_WINDOW],
) -> Vec<f64> {
    let ow = width - (SSIM_WINDOW - 1);
    let oh = height - (SSIM_WINDOW - 1);
    // horizontal pass
    let mut tmp = vec![0.0f64; ow * height];
    for y in 0..height {
        let row = &src[y * width..(y + 1) * width];
        for x in 0..ow {
            let mut acc = 0.0;
            for (k, &w) in kernel.iter().enumerate() {
                acc += w * row[x + k];
            }
            tmp[y * ow + x] = acc;
        }
    }
    // vertical pass
    let mut out = vec![0.0f64; ow * oh];
    for y in 0..oh {
        for x in 0..ow {
            let mut acc = 0.0;
            for (k, &w) in kernel.iter().enumerate() {
                acc += w * tmp[(y + k) * ow + x];
            }
            out[y * ow + x] = acc;
        }
    }
    out
}

/// Structural similarity with the standard parameters: 11×11 Gaussian
/// window (σ = 1.5), K1 = 0.01, K2 = 0.03, dynamic range 1. Computed per
/// channel over the valid (fully covered) window positions, then averaged
/// across channels.
pub fn ssim(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64, MetricsError> {
    check_dims(a, b)?;
    let (w, h) = (a.width(), a.height());
    if w < SSIM_WINDOW || h < SSIM_WINDOW {
        return Err(MetricsError::ImageTooSmall(SSIM_WINDOW));
    }
    let kernel = ssim_kernel();
    let c1 = (SSIM_K1 * 1.0) * (SSIM_K1 * 1.0);
    let c2 = (SSIM_K2 * 1.0) * (SSIM_K2 * 1.0);

    let n = w * h;
    let mut pa = vec![0.0f64; n];
    let mut pb = vec![0.0f64; n];
    let mut paa = vec![0.0f64; n];
    let mut pbb = vec![0.0f64; n];
    let mut pab = vec![0.0f64; n];

    let mut channel_mean = [0.0f64; 3];
    for (c, mean_slot) in channel_mean.iter_mut().enumerate() {
        for (i, (xa, xb)) in a
            .data()
            .iter()
            .skip(c)
            .step_by(3)
            .zip(b.data().iter().skip(c).step_by(3))
            .enumerate()
        {
            let va = *xa as f64;
            let vb = *xb as f64;
            pa[i] = va;
            pb[i] = vb;
            paa[i] = va * va;
            pbb[i] = vb * vb;
            pab[i] = va * vb;
        }
        let mu_a = gaussian_valid(&pa, w, h, &kernel);
        let mu_b = gaussian_valid(&pb, w, h, &kernel);
        let m_aa = gaussian_valid(&paa, w, h, &kernel);
        let m_bb = gaussian_valid(&pbb, w, h, &kernel);
        let m_ab = gaussian_valid(&pab, w, h, &kernel);

        let mut acc = 0.0f64;
        for i in 0..mu_a.len() {
            let ma = mu_a[i];
            let mb = mu_b[i];
            let va = m_aa[i] - ma * ma;
            let vb = m_bb[i] - mb * mb;
            let cov = m_ab[i] - ma * mb;
            let s = ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
                / ((ma * ma + mb * mb + c1) * (va + vb + c2));
            acc += s;
        }
        *mean_slot = acc / mu_a.len() as f64;
    }
    Ok((channel_mean[0] + channel_mean[1] + channel_mean[2]) / 3.0)
}

/// Euclidean distance between two Lab values (CIE76).
pub fn cie76(a: LabPixel, b: LabPixel) -> f64 {
    let dl = a.l - b.l;
    let da = a.a - b.a;
    let db = a.b - b.b;
    (dl * dl + da * da + db * db).sqrt()
}

/// CIEDE2000 color difference with kL = kC = kH = 1.
pub fn ciede2000(lab1: LabPixel, lab2: LabPixel) -> f64 {
    const POW25_7: f64 = 6103515625.0; // 25^7

    let c1 = lab1.a.hypot(lab1.b);
    let c2 = lab2.a.hypot(lab2.b);
    let c_bar = 0.5 * (c1 + c2);
    let c_bar7 = c_bar.powi(7);
    let g = 0.5 * (1.0 - (c_bar7 / (c_bar7 + POW25_7)).sqrt());

    let a1p = (1.0 + g) * lab1.a;
    let a2p = (1.0 + g) * lab2.a;
    let c1p = a1p.hypot(lab1.b);
    let c2p = a2p.hypot(lab2.b);

    let hp = |a: f64, b: f64| -> f64 {
        if a == 0.0 && b == 0.0 {
            return 0.0;
        }
        let mut h = b.atan2(a).to_degrees();
        if h < 0.0 {
            h += 360.0;
        }
        h
    };
    let h1p = hp(a1p, lab1.b);
    let h2p = hp(a2p, lab2.b);

    let dl = lab2.l - lab1.l;
    let dc = c2p - c1p;

    let dh = if c1p * c2p == 0.0 {
        0.0
    } else {
        let diff = h2p - h1p;
        if diff.abs() <= 180.0 {
            diff
        } else if diff > 180.0 {
            diff - 360.0
        } else {
            diff + 360.0
        }
    };
    let dh_big = 2.0 * (c1p * c2p).sqrt() * (dh.to_radians() / 2.0).sin();

    let l_bar = 0.5 * (lab1.l + lab2.l);
    let cp_bar = 0.5 * (c1p + c2p);
    let h_bar = if c1p * c2p == 0.0 {
        h1p + h2p
    } else {
        let sum = h1p + h2p;
        if (h1p - h2p).abs() <= 180.0 {
            0.5 * sum
        } else if sum < 360.0 {
            0.5 * (sum + 360.0)
        } else {
            0.5 * (sum - 360.0)
        }
    };

    let t = 1.0 - 0.17 * (h_bar - 30.0).to_radians().cos()
        + 0.24 * (2.0 * h_bar).to_radians().cos()
        + 0.32 * (3.0 * h_bar + 6.0).to_radians().cos()
        - 0.20 * (4.0 * h_bar - 63.0).to_radians().cos();

    let dtheta = 30.0 * (-((h_bar - 275.0) / 25.0) * ((h_bar - 275.0) / 25.0)).exp();
    let cp_bar7 = cp_bar.powi(7);
    let rc = 2.0 * (cp_bar7 / (cp_bar7 + POW25_7)).sqrt();
    let rt = -rc * (2.0 * dtheta).to_radians().sin();

    let l50 = (l_bar - 50.0) * (l_bar - 50.0);
    let sl = 1.0 + 0.015 * l50 / (20.0 + l50).sqrt();
    let sc = 1.0 + 0.045 * cp_bar;
    let sh = 1.0 + 0.015 * cp_bar * t;

    let tl = dl / sl;
    let tc = dc / sc;
    let th = dh_big / sh;
    (tl * tl + tc * tc + th * th + rt * tc * th).sqrt()
}

fn lab_of(img: &ImageBuffer, x: usize, y: usize) -> LabPixel {
    let p = img.pixel(x, y);
    srgb_to_lab([p[0] as f64, p[1] as f64, p[2] as f64])
}

/// Mean CIE76 distance over all pixels.
pub fn delta_e_ab(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64, MetricsError> {
    check_dims(a, b)?;
    let mut acc = 0.0f64;
    for y in 0..a.height() {
        for x in 0..a.width() {
            acc += cie76(lab_of(a, x, y), lab_of(b, x, y));
        }
    }
    Ok(acc / a.pixel_count() as f64)
}

/// Mean CIEDE2000 distance over all pixels.
pub fn delta_e_00(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64, MetricsError> {
    check_dims(a, b)?;
    let mut acc = 0.0f64;
    for y in 0..a.height() {
        for x in 0..a.width() {
            acc += ciede2000(lab_of(a, x, y), lab_of(b, x, y));
        }
    }
    Ok(acc / a.pixel_count() as f64)
}

fn rmse(a: &ImageBuffer, b: &ImageBuffer) -> Result<f64, MetricsError> {
    Ok(mse(a, b)?.sqrt())
}

/// Composite loss
/// `alpha·RMSE(target, standardized) + RMSE(target, output) + (1 − SSIM(target, output))`.
/// With identity standardization the first term compares the target to the
/// raw input.
pub fn fidelity_loss(
    standardized: &ImageBuffer,
    output: &ImageBuffer,
    target: &ImageBuffer,
    cfg: &LossConfig,
) -> Result<f64, MetricsError> {
    check_dims(standardized, target)?;
    check_dims(output, target)?;
    let term_std = rmse(target, standardized)?;
    let term_out = rmse(target, output)?;
    let term_ssim = 1.0 - ssim(target, output)?;
    Ok(cfg.alpha * term_std + term_out + term_ssim)
}

/// PSNR, SSIM, and both color differences for one pair; `loss` left unset.
pub fn report(a: &ImageBuffer, b: &ImageBuffer) -> Result<MetricsReport, MetricsError> {
    Ok(MetricsReport {
        psnr: psnr(a, b)?,
        ssim: ssim(a, b)?,
        de_ab: delta_e_ab(a, b)?,
        de_00: delta_e_00(a, b)?,
        loss: None,
    })
}
