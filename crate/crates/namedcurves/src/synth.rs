//! Deterministic sample data for demos and tests: procedural landscape
//! scenes with a spread of named colors, a stylized "expert" retouch that
//! is intentionally outside the global-curve family (it includes spatial
//! edits), and random monotone curve sets for round-trip experiments.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::color_naming::ColorGroup;
use crate::imaging::ImageBuffer;
use crate::tone_curves::{normalize_increments, Channel, CurveSet, IncrementSet};

/// Value noise on a random lattice with smooth bilinear interpolation.
struct ValueNoise {
    nx: usize,
    ny: usize,
    grid: Vec<f64>,
}

impl ValueNoise {
    fn new(rng: &mut ChaCha8Rng, nx: usize, ny: usize) -> ValueNoise {
        let grid = (0..(nx + 1) * (ny + 1))
            .map(|_| rng.random::<f64>())
            .collect();
        ValueNoise { nx, ny, grid }
    }

    fn sample(&self, u: f64, v: f64) -> f64 {
        let x = u.clamp(0.0, 1.0) * self.nx as f64;
        let y = v.clamp(0.0, 1.0) * self.ny as f64;
        let ix = (x.floor() as usize).min(self.nx - 1);
        let iy = (y.floor() as usize).min(self.ny - 1);
        let fx = x - ix as f64;
        let fy = y - iy as f64;
        let sx = fx * fx * (3.0 - 2.0 * fx);
        let sy = fy * fy * (3.0 - 2.0 * fy);
        let at = |gx: usize, gy: usize| self.grid[gy * (self.nx + 1) + gx];
        let top = at(ix, iy) * (1.0 - sx) + at(ix + 1, iy) * sx;
        let bot = at(ix, iy + 1) * (1.0 - sx) + at(ix + 1, iy + 1) * sx;
        top * (1.0 - sy) + bot * sy
    }
}

fn lerp3(a: [f64; 3], b: [f64; 3], t: f64) -> [f64; 3] {
    [
        a[0] + (b[0] - a[0]) * t,
        a[1] + (b[1] - a[1]) * t,
        a[2] + (b[2] - a[2]) * t,
    ]
}

/// A procedural landscape: sky gradient with clouds and a warm sun, a
/// noisy horizon, green/brown ground with scattered warm and pink accents.
/// Deterministic in `(width, height, seed)` and intentionally rich in
/// distinct color names.
pub fn demo_scene(width: usize, height: usize, seed: u64) -> ImageBuffer {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let clouds = ValueNoise::new(&mut rng, 10, 4);
    let terrain = ValueNoise::new(&mut rng, 12, 6);
    let detail = ValueNoise::new(&mut rng, 24, 12);
    let horizon_noise = ValueNoise::new(&mut rng, 8, 1);

    let sun_u = 0.25 + 0.5 * rng.random::<f64>();
    let sun_v = 0.10 + 0.18 * rng.random::<f64>();
    let sun_r = 0.05 + 0.04 * rng.random::<f64>();

    let sky_top = [0.16, 0.30, 0.62];
    let sky_low = [0.66, 0.80, 0.92];
    let grass = [0.20, 0.44, 0.16];
    let soil = [0.38, 0.26, 0.12];
    let rock = [0.42, 0.40, 0.38];
    let bloom_warm = [0.88, 0.52, 0.10];
    let bloom_pink = [0.88, 0.36, 0.60];

    ImageBuffer::from_fn(width, height, |px, py| {
        let u = px as f64 / (width.max(2) - 1) as f64;
        let v = py as f64 / (height.max(2) - 1) as f64;
        let horizon = 0.42 + 0.14 * (horizon_noise.sample(u, 0.5) - 0.5);

        let rgb = if v < horizon {
            let t = (v / horizon).clamp(0.0, 1.0);
            let mut c = lerp3(sky_top, sky_low, t * t.sqrt());
            // clouds brighten toward white
            let cl = (clouds.sample(u, v * 2.0) - 0.55).max(0.0) * 2.2;
            c = lerp3(c, [0.97, 0.97, 0.98], cl.min(1.0) * 0.8);
            // sun disc and halo
            let du = u - sun_u;
            let dv = (v - sun_v) * 1.3;
            let d = (du * du + dv * dv).sqrt();
            if d < sun_r {
                c = [1.0, 0.86, 0.46];
            } else {
                let halo = (-(d - sun_r) * 14.0).exp();
                c = lerp3(c, [0.98, 0.72, 0.30], halo * 0.7);
            }
            c
        } else {
            let t = ((v - horizon) / (1.0 - horizon)).clamp(0.0, 1.0);
            let tn = terrain.sample(u, v);
            let mut c = lerp3(grass, soil, (tn - 0.25).clamp(0.0, 1.0));
            // darker toward the foreground, lighter at the horizon line
            c = lerp3(c, [0.07, 0.16, 0.06], t * 0.45);
            let dn = detail.sample(u, v);
            if dn > 0.80 {
                let accent = if ((dn * 1e4) as u64).is_multiple_of(2) {
                    bloom_warm
                } else {
                    bloom_pink
                };
                c = lerp3(c, accent, ((dn - 0.80) / 0.20).min(1.0));
            } else if dn < 0.16 {
                c = lerp3(c, rock, ((0.16 - dn) / 0.16).min(1.0));
            }
            c
        };
        [
            rgb[0].clamp(0.0, 1.0) as f32,
            rgb[1].clamp(0.0, 1.0) as f32,
            rgb[2].clamp(0.0, 1.0) as f32,
        ]
    })
}

/// A hand-tuned "expert" edit used as a fitting target: warm white
/// balance, vibrance, a gentle luminance lift, and a vignette. The
/// vignette makes it spatially varying, so no global curve set reproduces
/// it exactly.
pub fn stylized_retouch(img: &ImageBuffer) -> ImageBuffer {
    let (w, h) = (img.width() as f64, img.height() as f64);
    ImageBuffer::from_fn(img.width(), img.height(), |x, y| {
        let p = img.pixel(x, y);
        let mut r = p[0] as f64 * 1.06;
        let mut g = p[1] as f64;
        let mut b = p[2] as f64 * 0.94;

        // vibrance: push channels away from luma, more for muted colors
        let luma = 0.299 * r + 0.587 * g + 0.114 * b;
        let sat = (r.max(g).max(b) - r.min(g).min(b)).min(1.0);
        let boost = 1.0 + 0.22 * (1.0 - sat);
        r = luma + (r - luma) * boost;
        g = luma + (g - luma) * boost;
        b = luma + (b - luma) * boost;

        // gentle midtone lift
        let lift = |v: f64| (v.clamp(0.0, 1.0)).powf(0.92);
        r = lift(r);
        g = lift(g);
        b = lift(b);

        // vignette centred on the frame
        let du = (x as f64 + 0.5) / w - 0.5;
        let dv = (y as f64 + 0.5) / h - 0.5;
        let falloff = 1.0 - 0.30 * (du * du + dv * dv) / 0.5;
        r *= falloff;
        g *= falloff;
        b *= falloff;

        [
            r.clamp(0.0, 1.0) as f32,
            g.clamp(0.0, 1.0) as f32,
            b.clamp(0.0, 1.0) as f32,
        ]
    })
}

/// A random monotone curve set: increments drawn from `[0.3, 1.3)` per
/// step, normalized per curve. Deterministic in `(points, seed)`.
pub fn random_curveset(points: usize, seed: u64) -> CurveSet {
    assert!(points >= 2);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut curves = Vec::new();
    for group in ColorGroup::ALL {
        for channel in Channel::ALL {
            let deltas: Vec<f64> = (0..points - 1).map(|_| 0.3 + rng.random::<f64>()).collect();
            curves.push(
                normalize_increments(&IncrementSet {
                    group,
                    channel,
                    deltas,
                })
                .expect("positive increments"),
            );
        }
    }
    CurveSet::new(curves).expect("full curve coverage")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::color_naming::{compute_maps, ColorNamingModel, GROUP_COUNT};

    #[test]
    fn scene_is_deterministic_and_in_range() {
        let a = demo_scene(64, 48, 7);
        let b = demo_scene(64, 48, 7);
        assert_eq!(a, b);
        assert!(a.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
        let c = demo_scene(64, 48, 8);
        assert_ne!(a, c);
    }

    #[test]
    fn scene_activates_multiple_color_groups() {
        let img = demo_scene(96, 64, 3);
        let maps = compute_maps(&ColorNamingModel::parametric(), &img, true);
        let mut mass = [0.0f64; GROUP_COUNT];
        for y in 0..maps.height() {
            for x in 0..maps.width() {
                for (g, &p) in maps.probabilities(x, y).iter().enumerate() {
                    mass[g] += p as f64;
                }
            }
        }
        let active = mass.iter().filter(|&&m| m > 1.0).count();
        assert!(active >= 4, "scene too monochrome: {mass:?}");
    }

    #[test]
    fn retouch_changes_image_but_stays_in_range() {
        let img = demo_scene(48, 48, 5);
        let edit = stylized_retouch(&img);
        assert_ne!(img, edit);
        assert!(edit.data().iter().all(|&v| (0.0..=1.0).contains(&v)));
    }

    #[test]
    fn random_curvesets_are_valid_and_seeded() {
        let a = random_curveset(11, 1);
        let b = random_curveset(11, 1);
        assert_eq!(a, b);
        let c = random_curveset(11, 2);
        assert_ne!(a, c);
        for cp in a.curves() {
            assert_eq!(cp.values()[0], 0.0);
            assert_eq!(*cp.values().last().unwrap(), 1.0);
        }
    }
}
