//! Command-line syntax.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use monogenic_core::edgeops::{DetectorConfig, Method};
use monogenic_core::fixtures::Fixture;
use monogenic_core::scalespace::ScaleDerivativeMode;

use crate::io::Format;

#[derive(Debug, Parser)]
#[command(name = "monogenic", version, about = "Monogenic-signal edge detection and identity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Detect edges in one or more images.
    Detect {
        #[arg(required = true)]
        inputs: Vec<PathBuf>,
        #[arg(long, default_value = "mdpc", value_parser = parse_method)]
        method: Method,
        #[command(flatten)]
        detector: DetectorArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Also write the normalized gradient magnitude as a raw float grid.
        #[arg(long)]
        raw: bool,
    },
    /// Run several methods on one image and assemble a montage.
    Compare {
        input: PathBuf,
        /// Comma-separated methods, or `all`.
        #[arg(long, default_value = "all", value_delimiter = ',', value_parser = parse_method_or_all)]
        method: Vec<MethodChoice>,
        #[command(flatten)]
        detector: DetectorArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Run one method at several scales.
    Sweep {
        input: PathBuf,
        #[arg(required = true, allow_negative_numbers = true)]
        scales: Vec<f64>,
        #[arg(long, default_value = "dpc", value_parser = parse_method)]
        method: Method,
        #[command(flatten)]
        detector: DetectorArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Check the analytic identities numerically on built-in fixtures.
    Verify {
        /// `all` or a comma-separated list of suites.
        #[arg(long, default_value = "all")]
        suite: String,
        /// Scale step of the central differences.
        #[arg(long, allow_negative_numbers = true)]
        fd_step: Option<f64>,
        /// Amplitude mask threshold.
        #[arg(long, allow_negative_numbers = true)]
        mask_eps: Option<f64>,
        #[arg(long, default_value = "monogenic-out")]
        out_dir: PathBuf,
        /// Record wall-clock time per stage in the manifest.
        #[arg(long)]
        timings: bool,
    },
    /// Write a synthetic test image.
    Fixture {
        #[arg(value_parser = parse_fixture)]
        name: Fixture,
        /// Output path; `.png` selects PNG, anything else PGM.
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, default_value_t = 128)]
        width: usize,
        #[arg(long, default_value_t = 128)]
        height: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

/// `Some(method)` or `None` for `all`.
pub type MethodChoice = Option<Method>;

#[derive(Debug, Clone, Args)]
pub struct DetectorArgs {
    /// Poisson scale s.
    #[arg(long, default_value_t = 0.5, allow_negative_numbers = true)]
    pub scale: f64,
    /// Use a central difference in scale with this step instead of the analytic derivative.
    #[arg(long, allow_negative_numbers = true)]
    pub fd_step: Option<f64>,
    /// Amplitude below which pixels are masked (default: relative to the peak amplitude).
    #[arg(long, allow_negative_numbers = true)]
    pub mask_eps: Option<f64>,
    #[arg(long, default_value_t = 1.5, allow_negative_numbers = true)]
    pub nms_radius: f64,
    #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
    pub low: f64,
    #[arg(long, default_value_t = 3.5, allow_negative_numbers = true)]
    pub high: f64,
    /// Mirror padding in pixels before frequency-domain filtering.
    #[arg(long, default_value_t = 16)]
    pub pad: usize,
}

impl DetectorArgs {
    pub fn config(&self, method: Method) -> DetectorConfig {
        DetectorConfig {
            method,
            scale: self.scale,
            scale_derivative: match self.fd_step {
                None => ScaleDerivativeMode::Analytic,
                Some(step) => ScaleDerivativeMode::FiniteDifference { step: Some(step) },
            },
            mask_eps: self.mask_eps,
            nms_radius: self.nms_radius,
            low: self.low,
            high: self.high,
            pad: self.pad,
            ..DetectorConfig::default()
        }
    }
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, default_value = "monogenic-out")]
    pub out_dir: PathBuf,
    #[arg(long, value_enum, default_value_t = Format::Pgm)]
    pub format: Format,
    /// Record wall-clock time per stage in the manifest.
    #[arg(long)]
    pub timings: bool,
}

fn parse_method(s: &str) -> Result<Method, String> {
    s.parse().map_err(|e: monogenic_core::Error| e.to_string())
}

fn parse_method_or_all(s: &str) -> Result<MethodChoice, String> {
    if s.eq_ignore_ascii_case("all") {
        Ok(None)
    } else {
        parse_method(s).map(Some)
    }
}

fn parse_fixture(s: &str) -> Result<Fixture, String> {
    s.parse().map_err(|e: monogenic_core::Error| e.to_string())
}
