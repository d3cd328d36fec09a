//! Decompose an image into the six color-group probability maps and write
//! grayscale maps plus color-coded visualizations.
//!
//! Run with `cargo run --release --example decompose_maps`.

use std::fs;
use std::path::PathBuf;

use namedcurves::color_naming::{compute_maps, render_map_visualization, ColorGroup};
use namedcurves::fusion::{active_branch_stats, make_weights, DEFAULT_TAU};
use namedcurves::imaging::save_png;
use namedcurves::synth::demo_scene;
use namedcurves::{ColorNamingModel, ImageBuffer};

fn main() {
    let out = PathBuf::from("target/example-output/decompose_maps");
    fs::create_dir_all(&out).expect("create output directory");

    let scene = demo_scene(320, 200, 11);
    save_png(&scene, out.join("scene.png")).expect("write scene");

    let model = ColorNamingModel::parametric();
    let maps = compute_maps(&model, &scene, true);

    for group in ColorGroup::ALL {
        let plane = group.index();
        // grayscale probability plane
        let gray = ImageBuffer::from_fn(scene.width(), scene.height(), |x, y| {
            let p = maps.value(plane, x, y);
            [p, p, p]
        });
        save_png(&gray, out.join(format!("scene.{}.prob.png", group.name())))
            .expect("write probability map");

        let viz = render_map_visualization(&scene, &maps, plane).expect("plane in range");
        save_png(&viz, out.join(format!("scene.{}.viz.png", group.name())))
            .expect("write visualization");

        let mass: f64 = (0..scene.height())
            .flat_map(|y| (0..scene.width()).map(move |x| (x, y)))
            .map(|(x, y)| maps.value(plane, x, y) as f64)
            .sum();
        println!(
            "{:<11} mean probability {:.4}",
            group.name(),
            mass / scene.pixel_count() as f64
        );
    }

    let weights = make_weights(&maps, DEFAULT_TAU);
    let hist = active_branch_stats(&weights);
    println!("\nactive branches per pixel after thresholding at {DEFAULT_TAU}:");
    for (k, count) in hist.iter().enumerate() {
        if *count > 0 {
            println!("  {} branch(es): {count} pixels", k + 1);
        }
    }
    println!("\noutputs under {}", out.display());
}
