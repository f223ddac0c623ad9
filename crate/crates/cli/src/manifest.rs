//! The JSON record written alongside every run.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use monogenic_core::edgeops::DetectorConfig;
use monogenic_core::scalespace::ScaleDerivativeMode;
use serde::Serialize;

use crate::error::{CliError, Result};
use crate::io::{write_bytes, Format};

pub const MANIFEST_NAME: &str = "manifest.json";

/// The detector configuration as it was applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConfigEcho {
    /// Absent when a run covers several methods.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub method: Option<String>,
    pub scale: f64,
    /// `null` for the analytic scale derivative, otherwise the central-difference step.
    pub fd_step: Option<f64>,
    pub mask_eps: Option<f64>,
    pub nms_radius: f64,
    pub low: f64,
    pub high: f64,
    pub pad: usize,
    pub canny_sigma: f64,
    pub normalize_percentile: f64,
    pub normalized_level: f64,
    pub format: Format,
}

impl ConfigEcho {
    pub fn new(cfg: &DetectorConfig, format: Format) -> Self {
        let fd_step = match cfg.scale_derivative {
            ScaleDerivativeMode::Analytic => None,
            ScaleDerivativeMode::FiniteDifference { step } => {
                Some(step.unwrap_or_else(|| monogenic_core::scalespace::default_scale_step(cfg.scale)))
            }
        };
        Self {
            method: Some(cfg.method.name().to_string()),
            scale: cfg.scale,
            fd_step,
            mask_eps: cfg.mask_eps,
            nms_radius: cfg.nms_radius,
            low: cfg.low,
            high: cfg.high,
            pad: cfg.pad,
            canny_sigma: cfg.canny_sigma,
            normalize_percentile: cfg.normalize_percentile,
            normalized_level: cfg.normalized_level,
            format,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub inputs: Vec<PathBuf>,
    pub config: serde_json::Value,
    pub out_dir: PathBuf,
    /// File names relative to `out_dir`, in write order; includes the manifest.
    pub artifacts: Vec<String>,
    pub warnings: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timings_ms: Option<BTreeMap<String, f64>>,
}

impl RunManifest {
    pub fn new(command: &str, inputs: Vec<PathBuf>, config: impl Serialize, out_dir: &Path, timings: bool) -> Self {
        Self {
            command: command.to_string(),
            inputs,
            config: serde_json::to_value(config).expect("config serializes"),
            out_dir: out_dir.to_path_buf(),
            artifacts: Vec::new(),
            warnings: Vec::new(),
            timings_ms: timings.then(BTreeMap::new),
        }
    }

    pub fn record(&mut self, name: impl Into<String>) {
        self.artifacts.push(name.into());
    }

    pub fn warn(&mut self, message: impl Into<String>) {
        let message = message.into();
        eprintln!("warning: {message}");
        self.warnings.push(message);
    }

    /// Accumulates wall-clock time for `stage` (no-op unless timings are on).
    pub fn add_time(&mut self, stage: &str, ms: f64) {
        if let Some(t) = &mut self.timings_ms {
            *t.entry(stage.to_string()).or_insert(0.0) += ms;
        }
    }

    /// Writes the manifest into `out_dir` and returns its path.
    pub fn write(mut self) -> Result<PathBuf> {
        self.record(MANIFEST_NAME);
        let path = self.out_dir.join(MANIFEST_NAME);
        let mut json = serde_json::to_vec_pretty(&self)
            .map_err(|e| CliError::Write { path: path.clone(), reason: e.to_string() })?;
        json.push(b'\n');
        write_bytes(&path, &json)?;
        Ok(path)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn timings_are_omitted_unless_requested() {
        let cfg = ConfigEcho::new(&DetectorConfig::default(), Format::Pgm);
        let mut m = RunManifest::new("detect", vec![], &cfg, Path::new("out"), false);
        m.add_time("read", 1.0);
        let json = serde_json::to_string(&m).unwrap();
        assert!(!json.contains("timings_ms"));
        assert!(json.contains("\"method\":\"mdpc\""));
        assert!(json.contains("\"fd_step\":null"));

        let mut m = RunManifest::new("detect", vec![], &cfg, Path::new("out"), true);
        m.add_time("read", 1.0);
        m.add_time("read", 2.0);
        assert_eq!(m.timings_ms.unwrap()["read"], 3.0);
    }

    #[test]
    fn finite_difference_step_is_echoed() {
        let cfg = DetectorConfig {
            scale_derivative: ScaleDerivativeMode::FiniteDifference { step: None },
            scale: 2.0,
            ..DetectorConfig::default()
        };
        let echo = ConfigEcho::new(&cfg, Format::Png);
        assert_eq!(echo.fd_step, Some(monogenic_core::scalespace::default_scale_step(2.0)));
        assert_eq!(serde_json::to_value(echo).unwrap()["format"], "png");
    }
}
