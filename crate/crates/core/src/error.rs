use thiserror::Error;

/// Errors raised by the library. Verification failures are not errors; they
/// are reported as verdicts in a [`crate::verify::Report`].
#[derive(Debug, Error)]
pub enum Error {
    #[error("polynomial has degree {degree}, need at least {required}")]
    DegreeTooLow { degree: usize, required: usize },

    #[error("root solver did not converge after {iterations} iterations (best residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("generator index {index} out of range for {count} generators")]
    InvalidIndex { index: usize, count: usize },

    #[error("empty word")]
    EmptyWord,

    #[error("generator set is empty")]
    NoGenerators,

    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("rasters are on different grids")]
    GridMismatch,

    #[error("empty raster: {0}")]
    EmptyRaster(&'static str),

    #[error("grid does not cover the closed disk of radius {radius}")]
    GridDoesNotCoverDisk { radius: f64 },

    #[error("resource budget exceeded: {what} ({count} > {budget})")]
    Budget {
        what: &'static str,
        count: usize,
        budget: usize,
    },

    #[error("no repelling fixed point found for generator {0}; supply a start point")]
    NoRepellingFixedPoint(String),

    #[error("anchor lies outside the polynomial hull of component {0}")]
    AnchorOutsideHull(u32),

    #[error("no component of the Julia raster meets {0}")]
    NoComponentFound(&'static str),

    #[error("J_min/J_max identification mismatch: {0}")]
    ExtremeMismatch(String),

    #[error("preimage lies outside the window")]
    PreimageOutsideWindow,

    #[error("preimage meets {0} components")]
    MultiComponent(usize),

    #[error("construction check failed: {name} (margin {margin:e}){hint}")]
    Construction {
        name: String,
        margin: f64,
        hint: String,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
