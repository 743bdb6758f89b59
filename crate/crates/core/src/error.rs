use thiserror::Error;

use crate::Point;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("syntax error at byte {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("unknown identifier `{name}` at byte {offset}")]
    UnknownIdentifier { name: String, offset: usize },

    #[error("{function} of non-positive value {value}")]
    Domain { function: &'static str, value: f64 },

    #[error("division by a jet whose value is zero")]
    DivisionByZero,

    #[error("jet order {0} exceeds the supported maximum of 4")]
    OrderTooHigh(usize),

    #[error("non-finite {what} at {point}")]
    NonFinite { what: &'static str, point: Point },

    #[error("point {point} is outside the chart of `{surface}` (guard: {guard})")]
    OutsideChart {
        surface: String,
        guard: String,
        point: Point,
    },

    #[error("Gaussian curvature K = {curvature:e} at {point} is below the singularity threshold; the lifted metric is undefined on this fiber")]
    SingularCurvature { point: Point, curvature: f64 },

    #[error("unknown catalog surface `{0}` (expected one of: sphere, halfplane, bump)")]
    UnknownSurface(String),

    #[error("invalid guard `{0}`: expected `all`, `x2>0` or `<expr> > 0`")]
    InvalidGuard(String),

    #[error("frame index pair ({i}, {j}) is invalid for dimension {dim}")]
    BadIndex { i: usize, j: usize, dim: usize },

    #[error("adaptive step size underflow at t = {t}")]
    StepFailure { t: f64 },

    #[error("trajectory has {0} samples; at least 3 are needed for differencing")]
    TooShort(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

impl Error {
    /// The base point an evaluation error refers to, when there is one.
    pub fn point(&self) -> Option<Point> {
        match self {
            Error::NonFinite { point, .. }
            | Error::OutsideChart { point, .. }
            | Error::SingularCurvature { point, .. } => Some(*point),
            _ => None,
        }
    }
}
