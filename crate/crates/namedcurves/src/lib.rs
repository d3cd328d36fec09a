//! Color-name guided tone curve enhancement.
//!
//! The pipeline decomposes an image into per-pixel probabilities over a
//! small set of universal color names, merges them into six groups that
//! each span the full intensity range, applies one monotone Bezier tone
//! curve per group and RGB channel, and fuses the six globally adjusted
//! images with thresholded, renormalized probability weights. A
//! deterministic adaptive-moment optimizer fits the curve parameters to an
//! (input, target) pair, and PSNR/SSIM/ΔE metrics score the results.
//!
//! Start with the runnable programs in `examples/` — one per capability —
//! or the `namedcurves` binary, which exposes the same operations as
//! subcommands (`decompose`, `fit`, `apply`, `eval`, `fit-batch`,
//! `bake-lut`).

mod atomic;

pub mod cli;
pub mod color_naming;
pub mod fitter;
pub mod fusion;
pub mod imaging;
pub mod metrics;
pub mod synth;
pub mod tone_curves;

pub use color_naming::{
    compute_maps, group_probabilities, load_cnlut, ColorGroup, ColorName, ColorNamingModel,
    ProbabilityMapSet,
};
pub use fitter::{apply_fitted, fit, FitConfig, FitParams, FitResult};
pub use fusion::{active_branch_stats, blend, make_weights, FusionWeights};
pub use imaging::{load_png, save_png, srgb_to_lab, ImageBuffer, LabPixel};
pub use metrics::{delta_e_00, delta_e_ab, psnr, ssim, MetricsReport};
pub use tone_curves::{
    apply_curveset, bake_lut, bezier_eval, de_casteljau_eval, normalize_increments, Channel,
    ControlPoints, CurveSet, EvalMode, IncrementSet, TonemapLut,
};
