use alloc::string::String;
use core::fmt;

use crate::expr::{EvalError, ParseError};

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    Parse(ParseError),
    Eval(EvalError),
    /// Wrong number of arguments for a form, or wrong form degree for a chain.
    Arity {
        expected: usize,
        found: usize,
    },
    DegreeOverflow {
        degree: usize,
        dim: usize,
    },
    DegreeZero,
    DimensionMismatch {
        expected: usize,
        found: usize,
    },
    InvalidDimension(usize),
    InvalidInput(String),
    TooFewSamples {
        axis: usize,
        found: usize,
        min: usize,
    },
    StepSizeUnderflow {
        t: f64,
        h: f64,
    },
    RegionExit {
        t: f64,
        coords: alloc::vec::Vec<f64>,
    },
    MaxStepsExceeded {
        t: f64,
        steps: usize,
    },
    /// A failure while transporting sample `index` of a cycle or chain.
    Sample {
        index: usize,
        source: alloc::boxed::Box<Error>,
    },
    NoBoundary,
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parse(e) => write!(f, "{e}"),
            Error::Eval(e) => write!(f, "{e}"),
            Error::Arity { expected, found } => {
                write!(f, "arity mismatch: expected {expected} arguments, found {found}")
            }
            Error::DegreeOverflow { degree, dim } => {
                write!(f, "form degree {degree} exceeds dimension {dim}")
            }
            Error::DegreeZero => write!(f, "interior product of a 0-form"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::InvalidDimension(n) => write!(f, "unsupported dimension {n}"),
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::TooFewSamples { axis, found, min } => {
                write!(f, "axis {axis} has {found} samples, need at least {min}")
            }
            Error::StepSizeUnderflow { t, h } => write!(f, "step size underflow (h = {h:e}) at t = {t}"),
            Error::RegionExit { t, coords } => {
                write!(f, "trajectory left the working region at t = {t}: {coords:?}")
            }
            Error::MaxStepsExceeded { t, steps } => {
                write!(f, "maximum number of steps ({steps}) exceeded at t = {t}")
            }
            Error::Sample { index, source } => write!(f, "sample {index}: {source}"),
            Error::NoBoundary => write!(f, "chain carries no boundary metadata"),
        }
    }
}

impl core::error::Error for Error {}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}

impl From<EvalError> for Error {
    fn from(e: EvalError) -> Self {
        Error::Eval(e)
    }
}
