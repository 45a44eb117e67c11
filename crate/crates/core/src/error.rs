use thiserror::Error;

/// Errors produced by the checks in this crate.
///
/// "Undefined" model angles are not errors; they are ordinary `None` values.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("distance matrix rejected: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    InvalidMatrix(Vec<MatrixViolation>),

    #[error("points violate the triangle inequality: {0}")]
    NotAMetric(String),

    #[error("no geodesic between {from} and {to}: {reason}")]
    NoGeodesic {
        from: String,
        to: String,
        reason: String,
    },

    #[error("model triangle is undefined: {0}")]
    UndefinedTriangle(String),

    #[error("no split point satisfies both angle bounds (lower {t_lo:.6}, upper {t_hi:.6})")]
    Infeasible { t_lo: f64, t_hi: f64 },

    #[error("strategy infeasible: {0}")]
    InfeasibleStrategy(String),

    #[error("bracket invalid: {0}")]
    InvalidBracket(String),

    #[error("unknown point `{0}`")]
    UnknownPoint(String),

    #[error("radial curve trapped at t = {t:.6} (vertex {vertex})")]
    Trapped { t: f64, vertex: String },

    #[error("region is not a certified curvature domain: {0}")]
    DomainNotCertified(String),

    #[error("no certified ball covers the segment starting at parameter {param:.6}")]
    ChainObstructed { param: f64 },

    #[error("completion unavailable: {0}")]
    NoCompletion(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

/// One failed constraint of distance-matrix validation, with its first witness.
#[derive(Debug, Clone, PartialEq, serde::Serialize)]
pub struct MatrixViolation {
    pub constraint: Constraint,
    /// Point identifiers of the first offending entry (pair or triple).
    pub witness: Vec<String>,
    pub detail: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Constraint {
    Shape,
    NonFinite,
    Negative,
    Diagonal,
    Asymmetry,
    Coincident,
    TriangleInequality,
}

impl std::fmt::Display for MatrixViolation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "{:?} at ({}): {}",
            self.constraint,
            self.witness.join(", "),
            self.detail
        )
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
