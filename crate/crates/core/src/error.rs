use thiserror::Error;

/// Errors raised by the transform, inversion and geometry routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunkError {
    #[error("rotation axis index {0} is not one of 1, 2")]
    InvalidAxis(usize),

    #[error("{name} = {value} is outside its admissible range {range}")]
    OutOfRange { name: &'static str, value: f64, range: &'static str },

    #[error("bandlimit {bandlimit} exceeds grid resolution (max {max})")]
    BandlimitTooLarge { bandlimit: usize, max: usize },

    #[error("grid shape mismatch: expected {expected} values, got {got}")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("function on great circles must be antipodally even; odd part has size {odd_norm:.3e}")]
    NotEven { odd_norm: f64 },

    #[error("data is not in the range of the transform: odd-degree content at degrees {degrees:?}")]
    RangeCondition { degrees: Vec<usize> },

    #[error("support function is not positive at ({x:.6}, {y:.6}, {z:.6}): H = {value:.3e}")]
    NonPositiveSupport { x: f64, y: f64, z: f64, value: f64 },

    #[error(
        "convexity certificate failed: h + h'' = {value:.3e} at phi = {phi:.6} on the section with pole ({px:.6}, {py:.6}, {pz:.6})"
    )]
    Convexity { phi: f64, px: f64, py: f64, pz: f64, value: f64 },

    #[error("circumference formulas disagree: {integrand_form} vs {support_form}")]
    FormulaMismatch { integrand_form: f64, support_form: f64 },

    #[error("degenerate input: {0}")]
    Degenerate(&'static str),
}

pub type Result<T> = std::result::Result<T, FunkError>;

impl FunkError {
    pub(crate) fn out_of_range(name: &'static str, value: f64, range: &'static str) -> Self {
        FunkError::OutOfRange { name, value, range }
    }
}
