//! Score an image pair with PSNR, SSIM, and the two Lab color-difference
//! metrics, plus a few pairwise CIEDE2000 values on raw Lab coordinates.
//!
//! Run with `cargo run --release --example evaluate_metrics`.

use namedcurves::imaging::{lab_to_lch, srgb_to_lab, LabPixel};
use namedcurves::metrics::{ciede2000, report};
use namedcurves::synth::{demo_scene, stylized_retouch};

fn main() {
    let a = demo_scene(240, 160, 31);
    let b = stylized_retouch(&a);

    let r = report(&a, &b).expect("same dimensions");
    println!("scene vs stylized retouch:");
    println!("  psnr  {:.4} dB", r.psnr);
    println!("  ssim  {:.4}", r.ssim);
    println!("  de_ab {:.4}", r.de_ab);
    println!("  de_00 {:.4}", r.de_00);

    println!("\nsRGB -> Lab -> LCh for a few colors:");
    for (name, rgb) in [
        ("white", [1.0, 1.0, 1.0]),
        ("mid grey", [0.5, 0.5, 0.5]),
        ("sky blue", [0.35, 0.60, 0.92]),
        ("grass", [0.20, 0.44, 0.16]),
    ] {
        let lab = srgb_to_lab(rgb);
        let (l, c, h) = lab_to_lch(lab);
        println!(
            "  {name:<8} L={l:7.3} a={a:8.3} b={b:8.3}  C={c:7.3} h={h:7.2}°",
            a = lab.a,
            b = lab.b
        );
    }

    println!("\npairwise CIEDE2000 on Lab values:");
    let pairs = [
        (
            LabPixel::new(50.0, 2.6772, -79.7751),
            LabPixel::new(50.0, 0.0, -82.7485),
        ),
        (
            LabPixel::new(50.0, 0.0, 0.0),
            LabPixel::new(50.0, -1.0, 2.0),
        ),
        (
            LabPixel::new(2.0776, 0.0795, -1.1350),
            LabPixel::new(0.9033, -0.0636, -0.5514),
        ),
    ];
    for (x, y) in pairs {
        println!(
            "  ({:7.4} {:8.4} {:9.4}) vs ({:7.4} {:8.4} {:9.4}) -> {:.4}",
            x.l,
            x.a,
            x.b,
            y.l,
            y.a,
            y.b,
            ciede2000(x, y)
        );
    }
}
