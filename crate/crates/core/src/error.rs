//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Clone, Error, PartialEq)]
pub enum Error {
    /// A point that must lie strictly inside the unit disk does not.
    #[error("point ({re}, {im}) lies outside the open unit disk")]
    PointOutsideDisk { re: f64, im: f64 },

    /// An arc length outside (0, 2*pi].
    #[error("arc length {0} outside (0, 2*pi]")]
    InvalidArcLength(f64),

    /// Operation needs at least one zero / sample / arc and got none.
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    /// boundary_arc at the origin: every direction is equidistant, no arc.
    #[error("boundary arc undefined for the disk center")]
    DegenerateCenter,

    /// A zero at the origin has no radial boundary projection.
    #[error("zero at the origin has no radial projection")]
    OriginZero,

    /// Parameter out of its documented range, with the offending field named.
    #[error("invalid parameter {field}: {message}")]
    InvalidParameter { field: &'static str, message: String },

    /// Model construction failed a structural invariant.
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// Evaluation requested too close to the unit circle for the discrete kernel.
    #[error("evaluation point with |z| = {modulus} too close to the boundary (limit {limit})")]
    TooCloseToBoundary { modulus: f64, limit: f64 },

    /// An input exceeds a documented size cap.
    #[error("size limit exceeded for {what}: {got} > {cap}")]
    SizeLimit { what: &'static str, got: usize, cap: usize },

    /// Iterative solver stopped at its iteration cap before reaching tolerance.
    #[error("no convergence after {iterations} iterations (residual {residual})")]
    NoConvergence { iterations: usize, residual: f64 },

    /// Linear system is numerically rank-deficient and no regularization was requested.
    #[error("rank-deficient system: {0}")]
    RankDeficient(String),

    /// A gauge failed the admissibility precondition of the certificate.
    #[error("gauge not admissible: {0}")]
    InadmissibleGauge(String),

    /// Malformed serialized data (CSV or JSON).
    #[error("parse error at {location}: {message}")]
    Parse { location: String, message: String },

    /// Underlying I/O failure, flattened to its message.
    #[error("i/o failure: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
