use thiserror::Error;

/// Errors produced by the percept-let library.
#[derive(Debug, Error)]
pub enum Error {
    /// A value fell outside the domain an operation is defined on.
    #[error("domain error: {0}")]
    Domain(String),

    /// A sample that should sit on the dyadic grid does not.
    #[error("sample #{index} at x = {x} is not on the level-{pr} dyadic grid")]
    OffGrid { index: usize, x: f64, pr: u32 },

    /// Boundary learning requires every grid node to be observed.
    #[error("missing grid nodes: {}", .0.join(", "))]
    MissingNodes(Vec<String>),

    /// Least squares weight with no nonzero activation.
    #[error("weight is undefined: every activation is zero")]
    UndefinedWeight,

    /// Perception was the Null state where a numeric value is required.
    #[error("null perception cannot be used here")]
    NullPerception,

    /// Malformed model document.
    #[error("model format error: {0}")]
    Format(String),

    #[error("unsupported model document version {0}")]
    UnsupportedVersion(u32),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}

/// Checks `x` is a finite value in `[-1, +1]`.
pub(crate) fn check_perception(x: f64) -> Result<f64> {
    if x.is_finite() && (-1.0..=1.0).contains(&x) {
        Ok(x)
    } else {
        domain(format!("perception value {x} is outside [-1, +1]"))
    }
}
