use std::fmt;

use crate::Point;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("degenerate metric at ({}, {}): det g = {det:e}", .at.x, .at.y)]
    DegenerateMetric { at: Point, det: f64 },

    #[error("dimension {0} is not supported (only n = 2 is implemented)")]
    UnsupportedDimension(usize),

    #[error("invalid profile curve: {0}")]
    InvalidProfile(String),

    #[error("degenerate domain: {0}")]
    DegenerateDomain(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("gluing mismatch: vertex {vertex} at ({}, {}) has no partner", .at.x, .at.y)]
    GluingMismatch { vertex: usize, at: Point },

    #[error("point ({}, {}) lies outside the mesh", .0.x, .0.y)]
    PointOutsideMesh(Point),

    #[error("sample point ({}, {}) lies outside the chart domain", .0.x, .0.y)]
    OutsideDomain(Point),

    #[error("degree of freedom {index} out of range (n = {n})")]
    DofOutOfRange { index: usize, n: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("matrix is not positive definite (pivot {pivot} = {value:e})")]
    NotPositiveDefinite { pivot: usize, value: f64 },

    #[error("internal solver error: {0}")]
    Internal(String),

    #[error("rank-deficient Gram matrix: computed fields do not span a {0}-dimensional space")]
    DegenerateSpan(usize),

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorCategory {
    Config,
    Numerical,
    Io,
}

impl Error {
    pub fn category(&self) -> ErrorCategory {
        match self {
            Error::Config(_) | Error::Json(_) | Error::Parse { .. } | Error::UnsupportedDimension(_) => {
                ErrorCategory::Config
            }
            Error::Io(_) => ErrorCategory::Io,
            _ => ErrorCategory::Numerical,
        }
    }
}

impl fmt::Display for ErrorCategory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ErrorCategory::Config => "config",
            ErrorCategory::Numerical => "numerical",
            ErrorCategory::Io => "io",
        })
    }
}
