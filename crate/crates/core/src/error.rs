use thiserror::Error;

/// Errors raised by the geometric operations in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum GeomError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("point is not on the unit 3-sphere (|p|^2 = {0})")]
    NotUnit(f64),
    #[error("vector is not tangent to the sphere at its base point (<v,p> = {0})")]
    NotTangent(f64),
    #[error("tangent vectors have different base points")]
    BaseMismatch,
    #[error("parameter {name} = {value} outside domain {domain}")]
    OutOfDomain { name: &'static str, value: f64, domain: String },
    #[error("horizontal geodesics intersect without coinciding")]
    IntersectingGeodesics,
    #[error("degenerate data: {0}")]
    Degenerate(String),
    #[error("isometry does not fix the glue curve (max displacement {0:e})")]
    GlueNotFixed(f64),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for GeomError {
    fn from(e: std::io::Error) -> Self {
        GeomError::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, GeomError>;
