//! Build a small paired corpus on disk and run the batch fitter over it,
//! producing per-pair curve files and a CSV summary.
//!
//! Run with `cargo run --release --example batch_corpus`.

use std::fs;
use std::path::PathBuf;

use namedcurves::cli::{cmd_fit_batch, FitOptions, TimingMode};
use namedcurves::imaging::save_png;
use namedcurves::synth::{demo_scene, stylized_retouch};

fn main() {
    let root = PathBuf::from("target/example-output/batch_corpus");
    let corpus = root.join("corpus");
    fs::create_dir_all(corpus.join("input")).expect("create corpus");
    fs::create_dir_all(corpus.join("target")).expect("create corpus");

    for (i, seed) in [5u64, 23, 71].iter().enumerate() {
        let input = demo_scene(192, 128, *seed);
        let target = stylized_retouch(&input);
        let name = format!("pair{i}.png");
        save_png(&input, corpus.join("input").join(&name)).expect("write input");
        save_png(&target, corpus.join("target").join(&name)).expect("write target");
    }

    let out_dir = root.join("fits");
    let opts = FitOptions {
        iterations: 200,
        ..FitOptions::default()
    };
    cmd_fit_batch(&corpus, &out_dir, &opts, TimingMode::Wall).expect("batch run");

    println!("\nsummary.csv:");
    let csv = fs::read_to_string(out_dir.join("summary.csv")).expect("read summary");
    for line in csv.lines() {
        println!("  {line}");
    }
}
