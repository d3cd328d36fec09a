//! Fit curves so an input image approaches a retouched target, then apply
//! them and compare metrics before and after.
//!
//! The target here is a stylized edit with a spatial vignette, so no
//! global curve set can match it exactly — the point is how close the
//! eighteen curves get.
//!
//! Run with `cargo run --release --example fit_expert_pair`.

use std::fs;
use std::path::PathBuf;

use namedcurves::cli::curve_file::serialize_curveset;
use namedcurves::fitter::{apply_fitted, fit, FitConfig};
use namedcurves::imaging::save_png;
use namedcurves::metrics;
use namedcurves::synth::{demo_scene, stylized_retouch};
use namedcurves::ColorNamingModel;

fn main() {
    let out = PathBuf::from("target/example-output/fit_expert_pair");
    fs::create_dir_all(&out).expect("create output directory");

    let input = demo_scene(384, 256, 2024);
    let target = stylized_retouch(&input);
    save_png(&input, out.join("input.png")).expect("write input");
    save_png(&target, out.join("target.png")).expect("write target");

    let model = ColorNamingModel::parametric();
    let cfg = FitConfig::default();
    println!(
        "fitting {} iterations over {} curve parameters…",
        cfg.iterations,
        18 * (cfg.points - 1)
    );
    let result = fit(&input, &target, &model, &cfg).expect("dimensions match");
    println!(
        "objective: {:.6e} -> {:.6e} (best at iteration {})",
        result.trace[0],
        result.best_objective(),
        result.best_iteration
    );

    let output = apply_fitted(&result.curves, &input, &model, cfg.tau);
    save_png(&output, out.join("output.png")).expect("write output");
    fs::write(out.join("curves.ncv"), serialize_curveset(&result.curves))
        .expect("write curve file");

    let before = metrics::report(&input, &target).expect("metrics");
    let after = metrics::report(&output, &target).expect("metrics");
    println!("\n                 before       after");
    println!("psnr      {:>12.4} {:>12.4}", before.psnr, after.psnr);
    println!("ssim      {:>12.4} {:>12.4}", before.ssim, after.ssim);
    println!("de_ab     {:>12.4} {:>12.4}", before.de_ab, after.de_ab);
    println!("de_00     {:>12.4} {:>12.4}", before.de_00, after.de_00);
    println!(
        "\npsnr gain {:+.2} dB; outputs under {}",
        after.psnr - before.psnr,
        out.display()
    );
}
