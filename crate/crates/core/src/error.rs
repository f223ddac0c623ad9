use thiserror::Error;

/// Errors raised by the algebra, filtering and detection stages.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("norm {norm:e} is below epsilon {eps:e}")]
    ZeroNorm { norm: f64, eps: f64 },

    #[error("scale must be non-negative (got {0})")]
    NegativeScale(f64),

    #[error("scale must be strictly positive (got {0})")]
    NonPositiveScale(f64),

    #[error("finite-difference step {step} must be positive and smaller than the scale {scale}")]
    BadScaleStep { step: f64, scale: f64 },

    #[error("inverse transform left an imaginary residue of {residue:e}")]
    NonRealOutput { residue: f64 },

    #[error("image is {width}x{height}; at least {min}x{min} is required")]
    ImageTooSmall { width: usize, height: usize, min: usize },

    #[error("field dimensions {0}x{1} do not match {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),

    #[error("field must be non-empty with {expected} samples (got {got})")]
    BadSampleCount { expected: usize, got: usize },

    #[error("field contains a non-finite sample")]
    NonFinite,

    #[error("hysteresis thresholds need low < high (got low={low}, high={high})")]
    BadThresholds { low: f64, high: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("the Cauchy kernel is singular at the origin")]
    OriginSingularity,
}

pub type Result<T> = std::result::Result<T, Error>;
