use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("field has {got} values but the space has {expected} points")]
    ShapeMismatch { expected: usize, got: usize },

    #[error("radius {radius} is below the grid resolution {resolution}")]
    BelowResolution { radius: f64, resolution: f64 },

    #[error("invalid space input: {0}")]
    InvalidSpace(String),

    #[error("quadrature did not converge: estimated error {error:e} exceeds tolerance {tolerance:e}")]
    Quadrature { error: f64, tolerance: f64 },

    #[error("profile is not Hölder: sampled quotient {quotient} exceeds declared constant {declared}")]
    NotHolder { quotient: f64, declared: f64 },

    #[error("kernel tail norm diverges over the sampled scales (trend {trend:?})")]
    TailDiverges { trend: Vec<f64> },

    #[error("kernel support {support} exceeds the admissible patch radius {limit}")]
    NotLocal { support: f64, limit: f64 },

    #[error("no admissible constant: binding constraint `{binding}`")]
    Infeasible { binding: String, detail: String },

    #[error("level {level}: scale {scale:e} is below the grid resolution {resolution:e}")]
    NetResolution { level: usize, scale: f64, resolution: f64 },

    #[error("cutoff is not in the test class: {0}")]
    NotTestFunction(String),

    #[error("residual bound fails at level {level}, point {point}: ratio {ratio}")]
    ResidualBound { level: usize, point: usize, ratio: f64 },

    #[error("lp solver failed: {0}")]
    Lp(String),

    #[error("atom support leaves the chart patch at point {point}")]
    PatchOverflow { point: usize },

    #[error("normalising constant {h} is below the admissible threshold {threshold}")]
    HBelowThreshold { h: f64, threshold: f64 },

    #[error("config error: {0}")]
    Config(String),

    #[error("bundle schema {found} is not supported (expected {expected})")]
    Schema { found: u64, expected: u64 },

    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name: name.to_string(),
        reason: reason.into(),
    }
}
