//! The subcommands. Each returns the paths it wrote (manifest last) and a
//! short summary for the terminal.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use monogenic_core::edgeops::{detect, Detection, DetectorConfig, Method};
use monogenic_core::export::{intensities_to_gray8, magnitude_to_gray8, write_raw_f32};
use monogenic_core::field::ScalarField;
use monogenic_core::fixtures::Fixture;
use monogenic_core::verify::{parse_suites, CheckParams, ResidualReport};
use rayon::prelude::*;
use serde::Serialize;

use crate::args::{DetectorArgs, OutputArgs};
use crate::error::{CliError, Result};
use crate::io::{read_image, write_bytes, write_gray8, Format};
use crate::manifest::{ConfigEcho, RunManifest};

/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "MONOGENIC_THREADS";

const SEPARATOR_WIDTH: usize = 2;
const SEPARATOR_GRAY: u8 = 128;

/// Runs `f` on a pool capped by [`THREADS_ENV`] (unset or 0: rayon's default).
fn with_pool<T: Send>(f: impl FnOnce() -> T + Send) -> Result<T> {
    let threads = match std::env::var(THREADS_ENV) {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| CliError::Validation(format!("{THREADS_ENV} must be a non-negative integer (got '{v}')")))?,
        Err(_) => 0,
    };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| CliError::Validation(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(f))
}

fn millis(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

fn create_out_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::Write { path: dir.into(), reason: e.to_string() })
}

fn stem(path: &Path) -> Result<String> {
    path.file_stem()
        .and_then(|s| s.to_str())
        .map(str::to_string)
        .ok_or_else(|| CliError::Validation(format!("cannot derive an output name from {}", path.display())))
}

/// Writes an 8-bit raster into the manifest's directory and records it.
fn emit_gray8(m: &mut RunManifest, name: String, dims: (usize, usize), pixels: &[u8], format: Format) -> Result<()> {
    write_gray8(&m.out_dir.join(&name), dims.0, dims.1, pixels, format)?;
    m.record(name);
    Ok(())
}

fn emit_bytes(m: &mut RunManifest, name: String, bytes: &[u8]) -> Result<()> {
    write_bytes(&m.out_dir.join(&name), bytes)?;
    m.record(name);
    Ok(())
}

/// Files written by a command and one summary line per result.
#[derive(Debug, Clone, PartialEq)]
pub struct RunSummary {
    pub files: Vec<PathBuf>,
    pub lines: Vec<String>,
}

fn finish(m: RunManifest, lines: Vec<String>) -> Result<RunSummary> {
    let mut files: Vec<PathBuf> = m.artifacts.iter().map(|a| m.out_dir.join(a)).collect();
    files.push(m.write()?);
    Ok(RunSummary { files, lines })
}

struct Timed<T> {
    value: T,
    read_ms: f64,
    detect_ms: f64,
}

fn read_and_detect(input: &Path, cfg: &DetectorConfig) -> Result<Timed<(ScalarField, Detection)>> {
    let t = Instant::now();
    let img = read_image(input)?;
    let read_ms = millis(t);
    let t = Instant::now();
    let det = detect(&img, cfg)?;
    Ok(Timed { value: (img, det), read_ms, detect_ms: millis(t) })
}

/// Edge map, gradient magnitude and optionally the raw normalized magnitude
/// for each input.
pub fn cmd_detect(inputs: &[PathBuf], cfg: &DetectorConfig, out: &OutputArgs, raw: bool) -> Result<RunSummary> {
    cfg.validate()?;
    let stems = inputs.iter().map(|p| stem(p)).collect::<Result<Vec<_>>>()?;
    for (i, s) in stems.iter().enumerate() {
        if stems[..i].contains(s) {
            return Err(CliError::Validation(format!("two inputs share the output name '{s}'")));
        }
    }
    create_out_dir(&out.out_dir)?;
    let mut m =
        RunManifest::new("detect", inputs.to_vec(), ConfigEcho::new(cfg, out.format), &out.out_dir, out.timings);

    let results: Vec<Result<Timed<(ScalarField, Detection)>>> =
        with_pool(|| inputs.par_iter().map(|p| read_and_detect(p, cfg)).collect())?;
    let ext = out.format.extension();
    let mut lines = Vec::new();
    for (result, stem) in results.into_iter().zip(&stems) {
        let Timed { value: (img, det), read_ms, detect_ms } = result?;
        m.add_time("read", read_ms);
        m.add_time("detect", detect_ms);
        let t = Instant::now();
        let dims = img.dims();
        emit_gray8(&mut m, format!("{stem}.edges.{ext}"), dims, &det.edges.to_gray8(), out.format)?;
        emit_gray8(
            &mut m,
            format!("{stem}.gradient.{ext}"),
            dims,
            &magnitude_to_gray8(&det.gradient.magnitude),
            out.format,
        )?;
        if raw {
            let mut buf = Vec::new();
            write_raw_f32(&det.gradient.magnitude, &mut buf).expect("writing to memory");
            emit_bytes(&mut m, format!("{stem}.gradient.mgf"), &buf)?;
        }
        m.add_time("write", millis(t));
        lines.push(format!("{stem}: {} edge pixels ({})", det.edges.edge_count(), describe(cfg)));
    }
    finish(m, lines)
}

fn describe(cfg: &DetectorConfig) -> String {
    if cfg.method.is_phase_based() {
        format!("{}, s={}", cfg.method, cfg.scale)
    } else {
        cfg.method.to_string()
    }
}

#[derive(Serialize)]
struct CompareEcho {
    methods: Vec<String>,
    #[serde(flatten)]
    detector: ConfigEcho,
}

/// Side by side: the input followed by one edge map per method, separated by
/// thin gray bars.
pub fn montage(input: &ScalarField, maps: &[Vec<u8>]) -> (usize, usize, Vec<u8>) {
    let (w, h) = input.dims();
    let tiles: Vec<Vec<u8>> = std::iter::once(intensities_to_gray8(input)).chain(maps.iter().cloned()).collect();
    let total_w = tiles.len() * w + (tiles.len() - 1) * SEPARATOR_WIDTH;
    let mut out = Vec::with_capacity(total_w * h);
    for y in 0..h {
        for (i, tile) in tiles.iter().enumerate() {
            if i > 0 {
                out.extend(std::iter::repeat_n(SEPARATOR_GRAY, SEPARATOR_WIDTH));
            }
            out.extend_from_slice(&tile[y * w..(y + 1) * w]);
        }
    }
    (total_w, h, out)
}

/// One edge map per method, a montage and a CSV of edge-pixel counts.
/// Repeated methods are dropped with a warning; at least two distinct
/// methods are required.
pub fn cmd_compare(input: &Path, methods: &[Method], detector: &DetectorArgs, out: &OutputArgs) -> Result<RunSummary> {
    let mut unique: Vec<Method> = Vec::new();
    let mut duplicates = Vec::new();
    for &mth in methods {
        if unique.contains(&mth) {
            duplicates.push(mth.name());
        } else {
            unique.push(mth);
        }
    }
    if unique.len() < 2 {
        return Err(CliError::Validation(format!(
            "compare needs at least two distinct methods (got {})",
            unique.len()
        )));
    }
    let configs: Vec<DetectorConfig> = unique.iter().map(|&mth| detector.config(mth)).collect();
    for cfg in &configs {
        cfg.validate()?;
    }
    let stem = stem(input)?;
    create_out_dir(&out.out_dir)?;
    let echo = CompareEcho {
        methods: unique.iter().map(|m| m.name().to_string()).collect(),
        detector: ConfigEcho { method: None, ..ConfigEcho::new(&configs[0], out.format) },
    };
    let mut m = RunManifest::new("compare", vec![input.to_path_buf()], echo, &out.out_dir, out.timings);
    if !duplicates.is_empty() {
        duplicates.dedup();
        m.warn(format!("ignoring repeated method(s): {}", duplicates.join(", ")));
    }

    let t = Instant::now();
    let img = read_image(input)?;
    m.add_time("read", millis(t));
    let t = Instant::now();
    let detections: Vec<Result<Detection>> =
        with_pool(|| configs.par_iter().map(|cfg| detect(&img, cfg).map_err(CliError::from)).collect())?;
    let detections = detections.into_iter().collect::<Result<Vec<_>>>()?;
    m.add_time("detect", millis(t));

    let t = Instant::now();
    let ext = out.format.extension();
    let mut lines = Vec::new();
    let mut csv = String::from("method,edge_pixels\n");
    let mut maps = Vec::new();
    for (mth, det) in unique.iter().zip(&detections) {
        let pixels = det.edges.to_gray8();
        emit_gray8(&mut m, format!("{stem}.{}.edges.{ext}", mth.name()), img.dims(), &pixels, out.format)?;
        maps.push(pixels);
        writeln!(csv, "{},{}", mth.name(), det.edges.edge_count()).expect("writing to a string");
        lines.push(format!("{stem}: {:>8} {} edge pixels", mth.name(), det.edges.edge_count()));
    }
    let (mw, mh, mont) = montage(&img, &maps);
    emit_gray8(&mut m, format!("{stem}.montage.{ext}"), (mw, mh), &mont, out.format)?;
    emit_bytes(&mut m, format!("{stem}.counts.csv"), csv.as_bytes())?;
    m.add_time("write", millis(t));
    finish(m, lines)
}

#[derive(Serialize)]
struct SweepEcho {
    scales: Vec<f64>,
    #[serde(flatten)]
    detector: ConfigEcho,
}

/// One edge map per scale and a CSV of edge-pixel count against scale.
pub fn cmd_sweep(
    input: &Path,
    scales: &[f64],
    method: Method,
    detector: &DetectorArgs,
    out: &OutputArgs,
) -> Result<RunSummary> {
    if scales.is_empty() {
        return Err(CliError::Validation("sweep needs at least one scale".into()));
    }
    if let Some(bad) = scales.iter().find(|s| !(**s > 0.0 && s.is_finite())) {
        return Err(CliError::Validation(format!("scales must be positive (got {bad})")));
    }
    let configs: Vec<DetectorConfig> =
        scales.iter().map(|&s| DetectorConfig { scale: s, ..detector.config(method) }).collect();
    for cfg in &configs {
        cfg.validate()?;
    }
    let stem = stem(input)?;
    create_out_dir(&out.out_dir)?;
    let echo = SweepEcho { scales: scales.to_vec(), detector: ConfigEcho::new(&configs[0], out.format) };
    let mut m = RunManifest::new("sweep", vec![input.to_path_buf()], echo, &out.out_dir, out.timings);

    let t = Instant::now();
    let img = read_image(input)?;
    m.add_time("read", millis(t));
    let t = Instant::now();
    let detections: Vec<Result<Detection>> =
        with_pool(|| configs.par_iter().map(|cfg| detect(&img, cfg).map_err(CliError::from)).collect())?;
    let detections = detections.into_iter().collect::<Result<Vec<_>>>()?;
    m.add_time("detect", millis(t));

    let t = Instant::now();
    let ext = out.format.extension();
    let mut lines = Vec::new();
    let mut csv = String::from("scale,edge_pixels\n");
    let mut seen = Vec::new();
    for (&s, det) in scales.iter().zip(&detections) {
        let name = format!("{stem}.{}.s{s}.edges.{ext}", method.name());
        if seen.contains(&name) {
            continue;
        }
        emit_gray8(&mut m, name.clone(), img.dims(), &det.edges.to_gray8(), out.format)?;
        seen.push(name);
        writeln!(csv, "{s},{}", det.edges.edge_count()).expect("writing to a string");
        lines.push(format!("{stem}: s={s:<6} {} edge pixels", det.edges.edge_count()));
    }
    emit_bytes(&mut m, format!("{stem}.{}.sweep.csv", method.name()), csv.as_bytes())?;
    m.add_time("write", millis(t));
    finish(m, lines)
}

#[derive(Serialize)]
struct VerifyEcho {
    suites: Vec<String>,
    fd_step: Option<f64>,
    mask_eps: Option<f64>,
}

pub const VERIFY_CSV: &str = "verify.csv";

/// Outcome of [`cmd_verify`]: every report plus the files written.
pub struct VerifyOutcome {
    pub reports: Vec<ResidualReport>,
    pub summary: RunSummary,
}

impl VerifyOutcome {
    pub fn failures(&self) -> usize {
        self.reports.iter().filter(|r| !r.passed).count()
    }
}

/// Runs the selected identity suites and writes their CSV report.
pub fn cmd_verify(suite: &str, params: &CheckParams, out_dir: &Path, timings: bool) -> Result<VerifyOutcome> {
    let suites = parse_suites(suite)?;
    if let Some(e) = params.eps {
        if !(e > 0.0) {
            return Err(CliError::Validation(format!("mask epsilon must be positive (got {e})")));
        }
    }
    create_out_dir(out_dir)?;
    let echo = VerifyEcho {
        suites: suites.iter().map(|s| s.name().to_string()).collect(),
        fd_step: params.delta,
        mask_eps: params.eps,
    };
    let mut m = RunManifest::new("verify", Vec::new(), echo, out_dir, timings);

    let runs: Vec<(f64, monogenic_core::Result<Vec<ResidualReport>>)> = with_pool(|| {
        suites
            .par_iter()
            .map(|s| {
                let t = Instant::now();
                let r = s.run(params);
                (millis(t), r)
            })
            .collect()
    })?;
    let mut reports = Vec::new();
    for (suite, (ms, run)) in suites.iter().zip(runs) {
        m.add_time(suite.name(), ms);
        reports.extend(run?);
    }

    let mut lines = Vec::new();
    let mut csv = format!("{}\n", ResidualReport::CSV_HEADER);
    for r in &reports {
        for row in r.csv_rows() {
            csv.push_str(&row);
            csv.push('\n');
        }
        let verdict = if r.passed { "PASS" } else { "FAIL" };
        let note = r.note.as_deref().map(|n| format!(" ({n})")).unwrap_or_default();
        lines.push(format!(
            "{verdict} {:<16} {} = {:.3e} (tolerance {:e}){note}",
            r.identity,
            r.statistic.name(),
            r.value(),
            r.tolerance
        ));
    }
    emit_bytes(&mut m, VERIFY_CSV.to_string(), csv.as_bytes())?;
    Ok(VerifyOutcome { summary: finish(m, lines)?, reports })
}

/// Renders a named fixture into `output` (PNG if the extension says so).
pub fn cmd_fixture(fixture: Fixture, width: usize, height: usize, seed: u64, output: &Path) -> Result<PathBuf> {
    if width == 0 || height == 0 {
        return Err(CliError::Validation("fixture dimensions must be positive".into()));
    }
    let format = match output.extension().and_then(|e| e.to_str()) {
        Some(e) if e.eq_ignore_ascii_case("png") => Format::Png,
        _ => Format::Pgm,
    };
    if let Some(dir) = output.parent().filter(|d| !d.as_os_str().is_empty()) {
        create_out_dir(dir)?;
    }
    let img = fixture.generate(width, height, seed);
    write_gray8(output, width, height, &intensities_to_gray8(&img), format)?;
    Ok(output.to_path_buf())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn montage_layout() {
        let img = ScalarField::new(2, 2, vec![0.0, 255.0, 10.0, 20.0]).unwrap();
        let (w, h, px) = montage(&img, &[vec![255, 0, 0, 255]]);
        assert_eq!((w, h), (2 + SEPARATOR_WIDTH + 2, 2));
        assert_eq!(&px[..w], &[0, 255, 128, 128, 255, 0]);
        assert_eq!(&px[w..], &[10, 20, 128, 128, 0, 255]);
    }

    #[test]
    fn stems_come_from_file_names() {
        assert_eq!(stem(Path::new("a/b/step.pgm")).unwrap(), "step");
        assert!(stem(Path::new("/")).is_err());
    }
}
