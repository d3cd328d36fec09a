//! Per-image-pair curve fitting: adaptive-moment gradient descent over
//! unconstrained parameters that map to monotone curve increments via a
//! softplus, so every iterate is a valid curve set.
//!
//! The objective is the MSE between the fused pipeline output and the
//! target. Fusion weights are computed once from the input image and held
//! fixed, the gradient is analytic through the whole chain (softplus →
//! cumulative sum → normalization → Bernstein basis → weighted blend →
//! MSE), and the best iterate is returned, so the fitted result never
//! scores worse than the identity initialization at fit resolution.

use thiserror::Error;

use crate::color_naming::{compute_maps, ColorGroup, ColorNamingModel};
use crate::fusion::{blend, make_weights, FusionWeights};
use crate::imaging::{downsample_max_side, ImageBuffer};
use crate::metrics::{self, LossConfig, MetricsError, MetricsReport};
use crate::tone_curves::{
    apply_curveset, normalize_increments, BernsteinBasis, Channel, CurveSet, EvalMode,
    IncrementSet, CHANNEL_COUNT, CURVE_COUNT,
};

#[derive(Debug, Error)]
pub enum FitError {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
}

/// Lower bound on the increments induced by the parameter mapping; keeps
/// the curve normalization away from the degenerate all-zero case even for
/// extreme parameters.
const DELTA_FLOOR: f64 = 1e-12;

/// Fit objective. MSE is the default and currently the only option; the
/// SSIM term of the evaluation loss stays an evaluation metric.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
#[non_exhaustive]
pub enum Objective {
    #[default]
    Mse,
}

/// Optimizer configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Gradient steps to run.
    pub iterations: usize,
    /// Adaptive-moment step size.
    pub step_size: f64,
    /// First-moment decay.
    pub beta1: f64,
    /// Second-moment decay.
    pub beta2: f64,
    /// Stabilizer added to the square-rooted second moment.
    pub epsilon: f64,
    /// Control points per curve.
    pub points: usize,
    /// Longest image side used during fitting; larger pairs are reduced by
    /// area averaging. Fitted curves are global, so they apply at full
    /// resolution afterwards.
    pub max_fit_side: usize,
    /// Fusion threshold used for the fixed weights.
    pub tau: f64,
    pub objective: Objective,
}

impl Default for FitConfig {
    fn default() -> Self {
        FitConfig {
            iterations: 500,
            step_size: 0.05,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
            points: 11,
            max_fit_side: 256,
            tau: crate::fusion::DEFAULT_TAU,
            objective: Objective::Mse,
        }
    }
}

#[inline]
fn softplus(x: f64) -> f64 {
    let v = if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    };
    v.max(DELTA_FLOOR)
}

#[inline]
fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Unconstrained curve parameters: one value per (group, channel,
/// increment). The induced increments `softplus(θ)` are strictly positive,
/// so every parameter vector maps to a valid monotone curve set.
#[derive(Debug, Clone, PartialEq)]
pub struct FitParams {
    theta: Vec<f64>,
    points: usize,
}

impl FitParams {
    /// Parameter count for a given control-point count.
    pub fn dim(points: usize) -> usize {
        CURVE_COUNT * (points - 1)
    }

    /// All-zero parameters: equal increments, hence exactly the identity
    /// curve for every group and channel.
    pub fn identity(points: usize) -> FitParams {
        assert!(points >= 2);
        FitParams {
            theta: vec![0.0; Self::dim(points)],
            points,
        }
    }

    pub fn from_theta(theta: Vec<f64>, points: usize) -> FitParams {
        assert!(points >= 2);
        assert_eq!(theta.len(), Self::dim(points), "theta length mismatch");
        FitParams { theta, points }
    }

    pub fn theta(&self) -> &[f64] {
        &self.theta
    }

    pub fn points(&self) -> usize {
        self.points
    }

    /// Materialize the curve set this parameter vector encodes.
    pub fn to_curves(&self) -> CurveSet {
        let n_inc = self.points - 1;
        let mut curves = Vec::with_capacity(CURVE_COUNT);
        for (ci, chunk) in self.theta.chunks_exact(n_inc).enumerate() {
            let group = ColorGroup::ALL[ci / CHANNEL_COUNT];
            let channel = Channel::ALL[ci % CHANNEL_COUNT];
            let deltas: Vec<f64> = chunk.iter().map(|&t| softplus(t)).collect();
            curves.push(
                normalize_increments(&IncrementSet {
                    group,
                    channel,
                    deltas,
                })
                .expect("softplus keeps increments positive"),
            );
        }
        CurveSet::new(curves).expect("one curve per group and channel")
    }
}

/// Everything that stays fixed across iterations: per-pixel Bernstein
/// basis rows for the (clamped) input values, the target in f64, and the
/// per-pixel list of groups with nonzero fusion weight.
struct Workspace {
    points: usize,
    pixel_count: usize,
    basis: Vec<f64>,
    target: Vec<f64>,
    active_offsets: Vec<usize>,
    active: Vec<(u8, f64)>,
}

impl Workspace {
    fn new(
        input: &ImageBuffer,
        target: &ImageBuffer,
        weights: &FusionWeights,
        points: usize,
    ) -> Result<Workspace, FitError> {
        if !input.same_dimensions(target) {
            return Err(FitError::DimensionMismatch(format!(
                "input {}x{} vs target {}x{}",
                input.width(),
                input.height(),
                target.width(),
                target.height()
            )));
        }
        if input.width() != weights.width() || input.height() != weights.height() {
            return Err(FitError::DimensionMismatch(format!(
                "images {}x{} vs weights {}x{}",
                input.width(),
                input.height(),
                weights.width(),
                weights.height()
            )));
        }
        let pixel_count = input.pixel_count();
        let bernstein = BernsteinBasis::new(points);
        let mut basis = vec![0.0f64; pixel_count * CHANNEL_COUNT * points];
        for (i, &v) in input.data().iter().enumerate() {
            let row = &mut basis[i * points..(i + 1) * points];
            bernstein.eval_into((v as f64).clamp(0.0, 1.0), row);
        }
        let target64: Vec<f64> = target.data().iter().map(|&v| v as f64).collect();

        let mut active_offsets = Vec::with_capacity(pixel_count + 1);
        let mut active = Vec::new();
        active_offsets.push(0);
        for y in 0..weights.height() {
            for x in 0..weights.width() {
                for (g, &w) in weights.weights(x, y).iter().enumerate() {
                    if w != 0.0 {
                        active.push((g as u8, w));
                    }
                }
                active_offsets.push(active.len());
            }
        }
        Ok(Workspace {
            points,
            pixel_count,
            basis,
            target: target64,
            active_offsets,
            active,
        })
    }

    /// Objective and analytic gradient at `theta`, in one pass.
    fn eval(&self, theta: &[f64]) -> (f64, Vec<f64>) {
        let m = self.points;
        let n_inc = m - 1;
        debug_assert_eq!(theta.len(), CURVE_COUNT * n_inc);

        // curve outputs P per (group, channel), plus each normalizer S
        let mut p = vec![0.0f64; CURVE_COUNT * m];
        let mut totals = [0.0f64; CURVE_COUNT];
        for curve in 0..CURVE_COUNT {
            let th = &theta[curve * n_inc..(curve + 1) * n_inc];
            let dst = &mut p[curve * m..(curve + 1) * m];
            let mut running = 0.0;
            for (k, &t) in th.iter().enumerate() {
                running += softplus(t);
                dst[k + 1] = running;
            }
            totals[curve] = running;
            for v in dst.iter_mut() {
                *v /= running;
            }
        }

        // forward pass and accumulation of dObjective/dP (unscaled)
        let mut q = vec![0.0f64; CURVE_COUNT * m];
        let mut obj_acc = 0.0f64;
        for px in 0..self.pixel_count {
            let entries = &self.active[self.active_offsets[px]..self.active_offsets[px + 1]];
            for c in 0..CHANNEL_COUNT {
                let b = &self.basis[(px * CHANNEL_COUNT + c) * m..(px * CHANNEL_COUNT + c + 1) * m];
                let mut out = 0.0f64;
                for &(g, w) in entries {
                    let pc = &p[(g as usize * CHANNEL_COUNT + c) * m..];
                    let mut dot = 0.0f64;
                    for k in 0..m {
                        dot += pc[k] * b[k];
                    }
                    out += w * dot;
                }
                let r = out - self.target[px * CHANNEL_COUNT + c];
                obj_acc += r * r;
                for &(g, w) in entries {
                    let coef = w * r;
                    let qc = &mut q[(g as usize * CHANNEL_COUNT + c) * m
                        ..(g as usize * CHANNEL_COUNT + c + 1) * m];
                    for k in 0..m {
                        qc[k] += coef * b[k];
                    }
                }
            }
        }
        let denom = (self.pixel_count * CHANNEL_COUNT) as f64;
        let objective = obj_acc / denom;

        // backward through normalization and softplus:
        // dP_m/dΔ_k = ([k ≤ m] − P_m) / S for m ≥ 1, and P_0 is constant.
        let scale = 2.0 / denom;
        let mut grad = vec![0.0f64; CURVE_COUNT * n_inc];
        for curve in 0..CURVE_COUNT {
            let qc = &q[curve * m..(curve + 1) * m];
            let pc = &p[curve * m..(curve + 1) * m];
            let s = totals[curve];
            let mut dot_qp = 0.0f64;
            for k in 1..m {
                dot_qp += qc[k] * pc[k];
            }
            let mut suffix = 0.0f64;
            for k in (1..m).rev() {
                suffix += qc[k];
                let j = curve * n_inc + (k - 1);
                grad[j] = scale * (suffix - dot_qp) / s * sigmoid(theta[j]);
            }
        }
        (objective, grad)
    }
}

/// MSE between the fused output for `params` and the target, under fixed
/// fusion weights.
pub fn objective(
    params: &FitParams,
    input: &ImageBuffer,
    target: &ImageBuffer,
    weights: &FusionWeights,
) -> Result<f64, FitError> {
    let ws = Workspace::new(input, target, weights, params.points())?;
    Ok(ws.eval(params.theta()).0)
}

/// Analytic gradient of [`objective`] with respect to the unconstrained
/// parameters, in the same layout as `params.theta()`.
pub fn gradient(
    params: &FitParams,
    input: &ImageBuffer,
    target: &ImageBuffer,
    weights: &FusionWeights,
) -> Result<Vec<f64>, FitError> {
    let ws = Workspace::new(input, target, weights, params.points())?;
    Ok(ws.eval(params.theta()).1)
}

/// Outcome of a fit: the best curve set seen, the objective trace
/// (per-iteration values, starting at the identity initialization), and
/// full-resolution metrics of the applied result against the target.
#[derive(Debug, Clone)]
pub struct FitResult {
    pub curves: CurveSet,
    pub trace: Vec<f64>,
    pub best_iteration: usize,
    pub metrics: MetricsReport,
}

impl FitResult {
    /// Smallest objective in the trace; the returned curves attain it.
    pub fn best_objective(&self) -> f64 {
        self.trace[self.best_iteration]
    }
}

/// Fit a curve set so the fused pipeline output of `input` approaches
/// `target`. Fitting runs on an area-downsampled copy (longest side at
/// most `cfg.max_fit_side`); weights come from the downsampled input and
/// stay fixed. Initialization is the identity curve set and the best
/// iterate wins, so the returned objective never exceeds the identity
/// baseline.
pub fn fit(
    input: &ImageBuffer,
    target: &ImageBuffer,
    model: &ColorNamingModel,
    cfg: &FitConfig,
) -> Result<FitResult, FitError> {
    assert!(cfg.iterations >= 1, "need at least one iteration");
    assert!(cfg.step_size > 0.0, "step size must be positive");
    assert!(cfg.points >= 2, "need at least two control points");
    if !input.same_dimensions(target) {
        return Err(FitError::DimensionMismatch(format!(
            "input {}x{} vs target {}x{}",
            input.width(),
            input.height(),
            target.width(),
            target.height()
        )));
    }

    let fit_input = downsample_max_side(input, cfg.max_fit_side);
    let fit_target = downsample_max_side(target, cfg.max_fit_side);
    let maps = compute_maps(model, &fit_input, true);
    let weights = make_weights(&maps, cfg.tau);
    let ws = Workspace::new(&fit_input, &fit_target, &weights, cfg.points)?;

    let dim = FitParams::dim(cfg.points);
    let mut theta = vec![0.0f64; dim];
    let Objective::Mse = cfg.objective;
    let (obj0, mut grad) = ws.eval(&theta);
    let mut trace = Vec::with_capacity(cfg.iterations + 1);
    trace.push(obj0);
    let mut best_theta = theta.clone();
    let mut best_obj = obj0;
    let mut best_iteration = 0;

    let mut m1 = vec![0.0f64; dim];
    let mut m2 = vec![0.0f64; dim];
    for t in 1..=cfg.iterations {
        let bc1 = 1.0 - cfg.beta1.powi(t as i32);
        let bc2 = 1.0 - cfg.beta2.powi(t as i32);
        for j in 0..dim {
            let g = grad[j];
            m1[j] = cfg.beta1 * m1[j] + (1.0 - cfg.beta1) * g;
            m2[j] = cfg.beta2 * m2[j] + (1.0 - cfg.beta2) * g * g;
            let mhat = m1[j] / bc1;
            let vhat = m2[j] / bc2;
            theta[j] -= cfg.step_size * mhat / (vhat.sqrt() + cfg.epsilon);
        }
        let (obj, g) = ws.eval(&theta);
        grad = g;
        trace.push(obj);
        if obj < best_obj {
            best_obj = obj;
            best_theta = theta.clone();
            best_iteration = t;
        }
    }

    let curves = FitParams::from_theta(best_theta, cfg.points).to_curves();
    let output = apply_fitted(&curves, input, model, cfg.tau);
    let metrics = full_metrics(input, &output, target);
    Ok(FitResult {
        curves,
        trace,
        best_iteration,
        metrics,
    })
}

/// Full pipeline metrics; SSIM (and the loss that depends on it) degrade
/// to NaN/None when the pair is too small for the SSIM window.
fn full_metrics(input: &ImageBuffer, output: &ImageBuffer, target: &ImageBuffer) -> MetricsReport {
    let ssim = match metrics::ssim(output, target) {
        Ok(v) => v,
        Err(MetricsError::ImageTooSmall(_)) => f64::NAN,
        Err(e) => unreachable!("dimensions already checked: {e}"),
    };
    MetricsReport {
        psnr: metrics::psnr(output, target).expect("dimensions already checked"),
        ssim,
        de_ab: metrics::delta_e_ab(output, target).expect("dimensions already checked"),
        de_00: metrics::delta_e_00(output, target).expect("dimensions already checked"),
        loss: metrics::fidelity_loss(input, output, target, &LossConfig::default()).ok(),
    }
}

/// Run the full enhancement pipeline for a known curve set: grouped
/// probability maps → thresholded weights → per-group curve application →
/// weighted blend.
pub fn apply_fitted(
    curves: &CurveSet,
    input: &ImageBuffer,
    model: &ColorNamingModel,
    tau: f64,
) -> ImageBuffer {
    let maps = compute_maps(model, input, true);
    let weights = make_weights(&maps, tau);
    let adjusted = apply_curveset(curves, input, EvalMode::Direct);
    blend(&adjusted, &weights).expect("pipeline dimensions agree")
}
