//! Build a tone curve from raw increments, evaluate it along both
//! algebraic routes, and bake it into a LUT.
//!
//! Run with `cargo run --release --example curve_playground`.

use namedcurves::tone_curves::{
    bake_lut, bezier_eval, de_casteljau_eval, normalize_increments, Channel, IncrementSet,
};
use namedcurves::ColorGroup;

fn main() {
    // a gentle shadow lift: large early increments, small late ones
    let increments = IncrementSet {
        group: ColorGroup::Red,
        channel: Channel::R,
        deltas: vec![2.0, 1.8, 1.5, 1.2, 1.0, 0.8, 0.7, 0.6, 0.55, 0.5],
    };
    let curve = normalize_increments(&increments).expect("positive increments");

    println!("control points (input evenly spaced, output accumulated):");
    for (m, v) in curve.values().iter().enumerate() {
        println!("  P_{m:<2} x={:.1} y={v:.6}", m as f64 / 10.0);
    }

    println!("\nBernstein vs de Casteljau evaluation:");
    println!(
        "{:>6} {:>12} {:>12} {:>10}",
        "input", "bernstein", "casteljau", "|diff|"
    );
    for k in 0..=10 {
        let i = k as f64 / 10.0;
        let a = bezier_eval(&curve, i);
        let b = de_casteljau_eval(&curve, i);
        println!("{i:>6.2} {a:>12.8} {b:>12.8} {:>10.1e}", (a - b).abs());
    }

    let lut = bake_lut(&curve, 9).expect("resolution >= 2");
    println!("\n9-sample LUT of the same curve:");
    for (r, s) in lut.samples().iter().enumerate() {
        let bar = "#".repeat((s * 40.0).round() as usize);
        println!("  {:>5.3} -> {s:>8.5} {bar}", r as f64 / 8.0);
    }

    // endpoints are pinned and the curve never decreases
    assert_eq!(lut.samples()[0], 0.0);
    assert_eq!(*lut.samples().last().unwrap(), 1.0);
    assert!(lut.samples().windows(2).all(|w| w[1] >= w[0]));
    println!("\nendpoints pinned at (0,0) and (1,1); monotone throughout");
}
