//! Error type shared by every module.

use thiserror::Error;

/// Everything that can go wrong while building or analysing a scene.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("curve speed vanishes near raw parameter {t}")]
    NonRegularCurve { t: f64 },
    #[error("adaptive quadrature exceeded its panel budget")]
    QuadratureFailure,
    #[error("arclength {s} lies outside the component domain [{lo}, {hi}]")]
    OutOfDomain { s: f64, lo: f64, hi: f64 },
    #[error("weight is not positive (value {value} at s = {s})")]
    NonpositiveWeight { s: f64, value: f64 },
    #[error("weight on a closed component is not periodic (mismatch {mismatch})")]
    NonperiodicWeight { mismatch: f64 },
    #[error("offset height {r} exceeds 1/|mu'| = {limit}")]
    OutOfW { r: f64, limit: f64 },
    #[error("direction has no component normal to the curve")]
    DegenerateDirection,
    #[error("foot is not critical: |F'| = {residual} above tolerance {tol}")]
    NotCriticalFoot { residual: f64, tol: f64 },
    #[error("the mu-closest point is not unique ({count} feet tie)")]
    NonUniqueFoot { count: usize },
    #[error("no solution in the admissible interval")]
    NoSolution,
    #[error("svg export needs a planar scene, got ambient dimension {dim}")]
    SvgUnsupportedDim { dim: usize },
    #[error("components {a} and {b} intersect or touch (distance {distance})")]
    ComponentsIntersect { a: usize, b: usize, distance: f64 },
    #[error("invalid scene: {0}")]
    InvalidScene(String),
    #[error("invalid tolerance {name} = {value}")]
    InvalidTolerance { name: String, value: f64 },
    #[error("component index {0} does not exist")]
    NoSuchComponent(usize),
    #[error("i/o failure: {0}")]
    Io(String),
}

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// The input was rejected (bad schema, bad parameters, bad geometry).
    Config,
    /// A numerical routine failed on valid input.
    Numeric,
}

impl Error {
    /// Stable upper-case identifier, also used as the FFI error name.
    pub fn code(&self) -> &'static str {
        match self {
            Error::NonRegularCurve { .. } => "NON_REGULAR_CURVE",
            Error::QuadratureFailure => "QUADRATURE_FAILURE",
            Error::OutOfDomain { .. } => "OUT_OF_DOMAIN",
            Error::NonpositiveWeight { .. } => "NONPOSITIVE_WEIGHT",
            Error::NonperiodicWeight { .. } => "NONPERIODIC_WEIGHT",
            Error::OutOfW { .. } => "OUT_OF_W",
            Error::DegenerateDirection => "DEGENERATE_DIRECTION",
            Error::NotCriticalFoot { .. } => "NOT_CRITICAL_FOOT",
            Error::NonUniqueFoot { .. } => "NON_UNIQUE_FOOT",
            Error::NoSolution => "NO_SOLUTION",
            Error::SvgUnsupportedDim { .. } => "SVG_UNSUPPORTED_DIM",
            Error::ComponentsIntersect { .. } => "COMPONENTS_INTERSECT",
            Error::InvalidScene(_) => "INVALID_SCENE",
            Error::InvalidTolerance { .. } => "INVALID_TOLERANCE",
            Error::NoSuchComponent(_) => "NO_SUCH_COMPONENT",
            Error::Io(_) => "IO",
        }
    }

    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::QuadratureFailure | Error::NoSolution | Error::NotCriticalFoot { .. } => ErrorKind::Numeric,
            Error::NonUniqueFoot { .. } | Error::Io(_) => ErrorKind::Numeric,
            _ => ErrorKind::Config,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
