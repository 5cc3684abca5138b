//! Crate-wide error type.

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong across the planning stack.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A vector had the wrong number of entries for the space or layer it met.
    #[error("dimension mismatch in {context}: expected {expected}, got {actual}")]
    DimensionMismatch {
        context: &'static str,
        expected: usize,
        actual: usize,
    },

    /// A joint value fell outside its configured interval.
    #[error("joint {joint} value {value} outside limits [{lo}, {hi}]")]
    JointOutOfLimits {
        joint: usize,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// A polygon failed the convex-CCW validity checks.
    #[error("invalid obstacle polygon: {0}")]
    InvalidPolygon(String),

    /// A chain, space, or environment was built with inconsistent parameters.
    #[error("invalid construction: {0}")]
    InvalidConstruction(String),

    /// Two configurations that must share workspace coordinates did not.
    #[error("workspace coordinates differ between configurations")]
    WorkspaceMismatch,

    /// A planning query was rejected before search started.
    #[error("invalid query: {0}")]
    InvalidQuery(String),

    /// A file did not match the expected on-disk format.
    #[error("malformed {what} at line {line}: {msg}")]
    MalformedFile {
        what: &'static str,
        line: usize,
        msg: String,
    },

    /// A checkpoint or dataset declared an unsupported format version.
    #[error("unsupported {what} version {found} (expected {expected})")]
    UnsupportedVersion {
        what: &'static str,
        found: u32,
        expected: u32,
    },

    /// Rejection sampling gave up before finding enough admissible draws.
    #[error("sampling budget exhausted: {0}")]
    SamplingExhausted(String),

    /// Amortization is impossible for the given factors.
    #[error("denominator {0} is not positive: savings never amortize")]
    NeverAmortizes(f64),

    /// A measured scenario had no time saving to amortize against.
    #[error("planner time saving is not positive ({0} s per query)")]
    NoTimeSaving(f64),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}
