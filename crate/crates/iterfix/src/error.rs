//! Crate-wide error type. Every fallible operation returns [`Result`].

use crate::expr::{EvalError, ParseError};

/// Unified error for construction, parsing, evaluation, iteration, and
/// checking. Messages name the offending value or bound so that a failing
/// run can be diagnosed from the message alone.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("coordinate {index} is not finite")]
    NonFiniteCoordinate { index: usize },

    #[error("a point needs at least one coordinate")]
    EmptyPoint,

    #[error("cannot parse point from {text:?}")]
    BadPoint { text: String },

    #[error("combination weight {alpha} lies outside [0, 1]")]
    WeightOutOfRange { alpha: f64 },

    #[error("invalid domain: lower bound {lower} exceeds upper bound {upper} in coordinate {index}")]
    InvalidDomain { index: usize, lower: f64, upper: f64 },

    #[error("cannot parse domain from {text:?}; expected per-coordinate bounds like \"0,1 ; 0,1\"")]
    BadDomain { text: String },

    #[error(
        "{what} lies outside the domain: coordinate {index} = {value} violates the {side} bound {bound}"
    )]
    OutsideDomain {
        what: String,
        index: usize,
        value: f64,
        side: &'static str,
        bound: f64,
    },

    #[error("unknown norm {name:?}; use euclidean, max, or sum")]
    UnknownNorm { name: String },

    #[error("parse error: {0}")]
    Parse(#[from] ParseError),

    #[error("evaluation error: {0}")]
    Eval(#[from] EvalError),

    #[error("mapping {id:?} declares {declared} output expression(s) for dimension {dim}")]
    OutputArity {
        id: String,
        declared: usize,
        dim: usize,
    },

    #[error("a mapping with id {0:?} is already registered")]
    DuplicateMapping(String),

    #[error("no mapping with id {0:?} is registered")]
    UnknownMapping(String),

    #[error(
        "mapping {id:?} is not a self-map: x = ({x}) maps to ({image}), \
         which violates the {side} bound {bound} in coordinate {index}"
    )]
    NotSelfMap {
        id: String,
        x: String,
        image: String,
        index: usize,
        side: &'static str,
        bound: f64,
    },

    #[error(
        "mapping {id:?} declares ({point}) as a fixed point, but its residual is {residual:e}"
    )]
    NotAFixedPoint {
        id: String,
        point: String,
        residual: f64,
    },

    #[error("mapping {id:?} declares no fixed points, which {operation} requires")]
    MissingFixedPoints { id: String, operation: &'static str },

    #[error("schedule {name} is {value} at n = {n}; schedules must stay strictly inside (0, 1)")]
    ScheduleOutOfRange { name: char, n: usize, value: f64 },

    #[error("schedule {name} failed to evaluate at n = {n}: {detail}")]
    ScheduleEval {
        name: char,
        n: usize,
        detail: String,
    },

    #[error("invalid stopping criteria: {0}")]
    BadStopCriteria(String),

    #[error("an error tolerance was given but no reference point to measure errors against")]
    MissingReference,

    #[error("rate estimation needs at least {needed} usable error entries, found {found}")]
    NotEnoughData { needed: usize, found: usize },

    #[error("invalid parameter {name}: {detail}")]
    BadParameter { name: &'static str, detail: String },

    #[error("rate function rejected: {0}")]
    BadRateFunction(String),

    #[error("trace too short: residual decay needs {needed} entries, found {found}")]
    TraceTooShort { needed: usize, found: usize },

    #[error("config error at line {line}: {detail}")]
    Config { line: usize, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
