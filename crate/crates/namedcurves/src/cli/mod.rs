//! Command implementations behind the `namedcurves` binary and the file
//! formats they exchange: `NCV` curve files, text LUT exports, and the
//! batch-run CSV summary.
//!
//! Exit codes: 0 success, 2 missing input, 3 dimension mismatch, 4
//! malformed or invalid artifact file, 5 empty corpus, 1 anything else.

pub mod curve_file;

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::time::Instant;

use thiserror::Error;

use crate::atomic::write_atomic;
use crate::cli::curve_file::{parse_curveset, serialize_curveset, CurveFileError};
use crate::color_naming::{
    compute_maps, load_cnlut, render_map_visualization, CnlutError, ColorGroup, ColorNamingModel,
};
use crate::fitter::{apply_fitted, fit, FitConfig, FitError};
use crate::fusion::FusionError;
use crate::imaging::{load_png, save_gray_png, save_png, ImagingError};
use crate::metrics::{self, MetricsError, MetricsReport};
use crate::tone_curves::{bake_lut, Channel, CurveError, CurveSet};

/// Environment variable holding a fallback CNLUT path, consulted when the
/// `--lut` flag is absent.
pub const CNLUT_ENV: &str = "NAMEDCURVES_CNLUT";

pub const EXIT_MISSING_INPUT: i32 = 2;
pub const EXIT_DIMENSION_MISMATCH: i32 = 3;
pub const EXIT_INVALID_ARTIFACT: i32 = 4;
pub const EXIT_EMPTY_CORPUS: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    MissingInput(String),
    #[error("{0}")]
    DimensionMismatch(String),
    #[error("{0}")]
    InvalidArtifact(String),
    #[error("no usable image pairs in corpus")]
    EmptyCorpus,
    #[error("{0}")]
    Other(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::MissingInput(_) => EXIT_MISSING_INPUT,
            CliError::DimensionMismatch(_) => EXIT_DIMENSION_MISMATCH,
            CliError::InvalidArtifact(_) => EXIT_INVALID_ARTIFACT,
            CliError::EmptyCorpus => EXIT_EMPTY_CORPUS,
            CliError::Other(_) => 1,
        }
    }
}

impl From<ImagingError> for CliError {
    fn from(e: ImagingError) -> Self {
        match e {
            ImagingError::FileNotFound(p) => CliError::MissingInput(format!("file not found: {p}")),
            ImagingError::UnsupportedFormat(m) => {
                CliError::InvalidArtifact(format!("unsupported image: {m}"))
            }
            ImagingError::Io(e) => CliError::Other(format!("i/o error: {e}")),
        }
    }
}

impl From<CnlutError> for CliError {
    fn from(e: CnlutError) -> Self {
        match e {
            CnlutError::Io(ref io_err) if io_err.kind() == io::ErrorKind::NotFound => {
                CliError::MissingInput(format!("color naming table: {e}"))
            }
            other => CliError::InvalidArtifact(format!("color naming table: {other}")),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        CliError::DimensionMismatch(e.to_string())
    }
}

impl From<FitError> for CliError {
    fn from(e: FitError) -> Self {
        CliError::DimensionMismatch(e.to_string())
    }
}

impl From<FusionError> for CliError {
    fn from(e: FusionError) -> Self {
        CliError::DimensionMismatch(e.to_string())
    }
}

impl From<CurveError> for CliError {
    fn from(e: CurveError) -> Self {
        CliError::InvalidArtifact(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Other(format!("i/o error: {e}"))
    }
}

/// Pick the color-naming backend: explicit `--lut` path, then the
/// `NAMEDCURVES_CNLUT` environment variable, then the parametric model.
pub fn resolve_model(lut: Option<&Path>) -> Result<ColorNamingModel, CliError> {
    if let Some(path) = lut {
        return Ok(load_cnlut(path)?);
    }
    if let Ok(path) = std::env::var(CNLUT_ENV) {
        if !path.is_empty() {
            return Ok(load_cnlut(Path::new(&path))?);
        }
    }
    Ok(ColorNamingModel::parametric())
}

fn read_curveset(path: &Path) -> Result<CurveSet, CliError> {
    let text = fs::read_to_string(path).map_err(|e| {
        if e.kind() == io::ErrorKind::NotFound {
            CliError::MissingInput(format!("file not found: {}", path.display()))
        } else {
            CliError::Other(format!("i/o error reading {}: {e}", path.display()))
        }
    })?;
    parse_curveset(&text)
        .map_err(|e: CurveFileError| CliError::InvalidArtifact(format!("{}: {e}", path.display())))
}

fn file_stem(path: &Path) -> String {
    path.file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "image".to_string())
}

/// Shared knobs for `fit` and `fit-batch`.
#[derive(Debug, Clone)]
pub struct FitOptions {
    pub iterations: usize,
    pub points: usize,
    pub tau: f64,
    /// Accepted for reproducibility bookkeeping; the default MSE objective
    /// is deterministic, so the seed does not influence the result.
    pub seed: u64,
    pub lut: Option<PathBuf>,
}

impl Default for FitOptions {
    fn default() -> Self {
        FitOptions {
            iterations: 500,
            points: 11,
            tau: crate::fusion::DEFAULT_TAU,
            seed: 0,
            lut: None,
        }
    }
}

impl FitOptions {
    fn to_config(&self) -> Result<FitConfig, CliError> {
        if self.points < 2 {
            return Err(CliError::Other(format!(
                "--points must be at least 2, got {}",
                self.points
            )));
        }
        if self.iterations < 1 {
            return Err(CliError::Other("--iters must be at least 1".into()));
        }
        if !(0.0..1.0).contains(&self.tau) {
            return Err(CliError::Other(format!(
                "--tau must be in [0, 1), got {}",
                self.tau
            )));
        }
        Ok(FitConfig {
            iterations: self.iterations,
            points: self.points,
            tau: self.tau,
            ..FitConfig::default()
        })
    }
}

fn print_report(report: &MetricsReport) {
    println!("psnr {:.4}", report.psnr);
    println!("ssim {:.4}", report.ssim);
    println!("de_ab {:.4}", report.de_ab);
    println!("de_00 {:.4}", report.de_00);
    if let Some(loss) = report.loss {
        println!("loss {:.4}", loss);
    }
}

/// Write the 6 grayscale probability maps and 6 color-coded visualizations
/// for `input` into `out_dir`, named `<stem>.<group>.prob.png` and
/// `<stem>.<group>.viz.png`.
pub fn cmd_decompose(input: &Path, out_dir: &Path, lut: Option<&Path>) -> Result<(), CliError> {
    let model = resolve_model(lut)?;
    let img = load_png(input)?;
    fs::create_dir_all(out_dir)?;
    let maps = compute_maps(&model, &img, true);
    let stem = file_stem(input);
    for group in ColorGroup::ALL {
        let plane = group.index();
        let mut values = Vec::with_capacity(img.pixel_count());
        for y in 0..img.height() {
            for x in 0..img.width() {
                values.push(maps.value(plane, x, y));
            }
        }
        save_gray_png(
            img.width(),
            img.height(),
            &values,
            out_dir.join(format!("{stem}.{}.prob.png", group.name())),
        )?;
        let viz = render_map_visualization(&img, &maps, plane).expect("plane index in range");
        save_png(
            &viz,
            out_dir.join(format!("{stem}.{}.viz.png", group.name())),
        )?;
    }
    println!(
        "decomposed {} into 6 probability maps and 6 visualizations under {}",
        input.display(),
        out_dir.display()
    );
    Ok(())
}

/// Fit a curve set to an (input, target) pair and write it as an `NCV`
/// file; prints the objective trace summary and full-resolution metrics.
pub fn cmd_fit(
    input: &Path,
    target: &Path,
    out_curves: &Path,
    opts: &FitOptions,
) -> Result<(), CliError> {
    let cfg = opts.to_config()?;
    let model = resolve_model(opts.lut.as_deref())?;
    let a = load_png(input)?;
    let b = load_png(target)?;
    let result = fit(&a, &b, &model, &cfg)?;

    write_atomic(out_curves, serialize_curveset(&result.curves).as_bytes())?;

    println!(
        "fit: {} iterations, {} points, tau {}, seed {}",
        cfg.iterations, cfg.points, cfg.tau, opts.seed
    );
    println!(
        "objective: initial {:.6e} -> best {:.6e} (iteration {})",
        result.trace[0],
        result.best_objective(),
        result.best_iteration
    );
    println!("curves written to {}", out_curves.display());
    print_report(&result.metrics);
    Ok(())
}

/// Apply a curve file to an image and write the enhanced PNG.
pub fn cmd_apply(
    input: &Path,
    curves_path: &Path,
    output: &Path,
    tau: f64,
    lut: Option<&Path>,
) -> Result<(), CliError> {
    let curves = read_curveset(curves_path)?;
    let model = resolve_model(lut)?;
    let img = load_png(input)?;
    let out = apply_fitted(&curves, &img, &model, tau);
    save_png(&out, output)?;
    println!("wrote {}", output.display());
    Ok(())
}

/// Metric keys accepted by `cmd_eval`.
const METRIC_KEYS: [&str; 4] = ["psnr", "ssim", "de_ab", "de_00"];

/// Print the requested metrics (all four by default) as `<key> <value>`
/// lines with 4 decimal places; exact-match PSNR prints as `inf`.
pub fn cmd_eval(a_path: &Path, b_path: &Path, selected: Option<&[String]>) -> Result<(), CliError> {
    let keys: Vec<String> = match selected {
        Some(list) if !list.is_empty() => {
            for k in list {
                if !METRIC_KEYS.contains(&k.as_str()) {
                    return Err(CliError::Other(format!(
                        "unknown metric {k:?}; available: {}",
                        METRIC_KEYS.join(", ")
                    )));
                }
            }
            METRIC_KEYS
                .iter()
                .filter(|k| list.iter().any(|s| s == *k))
                .map(|s| s.to_string())
                .collect()
        }
        _ => METRIC_KEYS.iter().map(|s| s.to_string()).collect(),
    };
    let a = load_png(a_path)?;
    let b = load_png(b_path)?;
    for key in &keys {
        let value = match key.as_str() {
            "psnr" => metrics::psnr(&a, &b)?,
            "ssim" => metrics::ssim(&a, &b)?,
            "de_ab" => metrics::delta_e_ab(&a, &b)?,
            "de_00" => metrics::delta_e_00(&a, &b)?,
            _ => unreachable!(),
        };
        println!("{key} {value:.4}");
    }
    Ok(())
}

/// How `fit-batch` fills the CSV `seconds` column.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TimingMode {
    /// Measured wall-clock seconds per pair.
    #[default]
    Wall,
    /// Report 0.000 so repeated runs produce byte-identical CSVs.
    None,
}

impl std::str::FromStr for TimingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "wall" => Ok(TimingMode::Wall),
            "none" => Ok(TimingMode::None),
            other => Err(format!("unknown timing mode {other:?} (wall|none)")),
        }
    }
}

/// Fit every pair in a corpus (`<root>/input/*.png` matched to
/// `<root>/target/<same name>`), writing one curve file per pair and a CSV
/// summary with a final row of means. Unreadable pairs are skipped with a
/// report; the command fails with the empty-corpus code when nothing was
/// fit.
pub fn cmd_fit_batch(
    corpus: &Path,
    out_dir: &Path,
    opts: &FitOptions,
    timing: TimingMode,
) -> Result<(), CliError> {
    let cfg = opts.to_config()?;
    let model = resolve_model(opts.lut.as_deref())?;
    let input_dir = corpus.join("input");
    let target_dir = corpus.join("target");
    if !input_dir.is_dir() || !target_dir.is_dir() {
        return Err(CliError::EmptyCorpus);
    }

    let mut names: Vec<String> = fs::read_dir(&input_dir)?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_file())
        .filter_map(|e| e.file_name().to_str().map(|s| s.to_string()))
        .filter(|name| target_dir.join(name).is_file())
        .collect();
    names.sort_unstable();

    fs::create_dir_all(out_dir)?;

    struct Row {
        name: String,
        psnr_in: f64,
        psnr_out: f64,
        ssim_out: f64,
        de00_in: f64,
        de00_out: f64,
        seconds: f64,
    }

    let mut rows: Vec<Row> = Vec::new();
    for name in &names {
        let in_path = input_dir.join(name);
        let tg_path = target_dir.join(name);
        let pair = (|| -> Result<Row, CliError> {
            let input = load_png(&in_path)?;
            let target = load_png(&tg_path)?;
            let started = Instant::now();
            let result = fit(&input, &target, &model, &cfg)?;
            let seconds = match timing {
                TimingMode::Wall => started.elapsed().as_secs_f64(),
                TimingMode::None => 0.0,
            };
            let stem = file_stem(Path::new(name));
            write_atomic(
                &out_dir.join(format!("{stem}.ncv")),
                serialize_curveset(&result.curves).as_bytes(),
            )?;
            Ok(Row {
                name: stem,
                psnr_in: metrics::psnr(&input, &target)?,
                psnr_out: result.metrics.psnr,
                ssim_out: result.metrics.ssim,
                de00_in: metrics::delta_e_00(&input, &target)?,
                de00_out: result.metrics.de_00,
                seconds,
            })
        })();
        match pair {
            Ok(row) => rows.push(row),
            Err(e) => eprintln!("skipping {name}: {e}"),
        }
    }

    if rows.is_empty() {
        return Err(CliError::EmptyCorpus);
    }

    let mut csv = String::from("name,psnr_in,psnr_out,ssim_out,de00_in,de00_out,seconds\n");
    let mut sums = [0.0f64; 6];
    for row in &rows {
        writeln!(
            csv,
            "{},{:.4},{:.4},{:.4},{:.4},{:.4},{:.3}",
            row.name,
            row.psnr_in,
            row.psnr_out,
            row.ssim_out,
            row.de00_in,
            row.de00_out,
            row.seconds
        )
        .unwrap();
        for (s, v) in sums.iter_mut().zip([
            row.psnr_in,
            row.psnr_out,
            row.ssim_out,
            row.de00_in,
            row.de00_out,
            row.seconds,
        ]) {
            *s += v;
        }
    }
    let n = rows.len() as f64;
    writeln!(
        csv,
        "mean,{:.4},{:.4},{:.4},{:.4},{:.4},{:.3}",
        sums[0] / n,
        sums[1] / n,
        sums[2] / n,
        sums[3] / n,
        sums[4] / n,
        sums[5] / n
    )
    .unwrap();

    let csv_path = out_dir.join("summary.csv");
    write_atomic(&csv_path, csv.as_bytes())?;
    println!(
        "fit {} of {} pairs; summary at {}",
        rows.len(),
        names.len(),
        csv_path.display()
    );
    Ok(())
}

/// Round to 12 significant digits so grid values print compactly without
/// losing anything at the text LUT's precision level.
fn round_sig(v: f64, digits: i32) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    let magnitude = v.abs().log10().floor() as i32;
    let factor = 10f64.powi(digits - 1 - magnitude);
    (v * factor).round() / factor
}

fn fmt_compact(v: f64) -> String {
    format!("{}", round_sig(v, 12))
}

/// Bake each of the 18 curves into a text LUT `<group>.<channel>.txt` in
/// `out_dir`: `resolution` lines of `input output`, inputs uniform on
/// `[0, 1]`.
pub fn cmd_bake_lut(curves_path: &Path, resolution: usize, out_dir: &Path) -> Result<(), CliError> {
    let curves = read_curveset(curves_path)?;
    fs::create_dir_all(out_dir)?;
    for group in ColorGroup::ALL {
        for channel in Channel::ALL {
            let lut = bake_lut(curves.curve(group, channel), resolution)?;
            let mut text = String::new();
            for (r, &sample) in lut.samples().iter().enumerate() {
                let input = r as f64 / (resolution - 1) as f64;
                writeln!(text, "{} {}", fmt_compact(input), fmt_compact(sample)).unwrap();
            }
            write_atomic(
                &out_dir.join(format!("{}.{}.txt", group.name(), channel.name())),
                text.as_bytes(),
            )?;
        }
    }
    println!(
        "baked 18 luts at resolution {resolution} under {}",
        out_dir.display()
    );
    Ok(())
}
