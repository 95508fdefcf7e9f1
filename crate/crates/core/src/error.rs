use alloc::string::String;
use core::fmt;

use crate::realizations::GenId;

pub type Result<T, E = Error> = core::result::Result<T, E>;

/// An elementary function was evaluated outside its domain.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DomainError {
    pub op: &'static str,
    pub value: f64,
}

impl fmt::Display for DomainError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} undefined at {:e}", self.op, self.value)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    Domain(DomainError),
    /// A trajectory left the domain of its Hamiltonian at time `t`.
    OrbitExit { t: f64, cause: DomainError },
    DimensionMismatch { expected: usize, found: usize },
    SamplingExhausted { attempts: u64 },
    StepLimitExceeded { steps: usize, t: f64 },
    SingularProfile { z: f64 },
    DegenerateFrame { det: f64 },
    InvalidParams(String),
    MissingGenerator(GenId),
    NoPeriodDetected,
    /// The field cannot be differentiated to the requested order.
    Unsupported(&'static str),
}

impl Error {
    pub fn is_domain(&self) -> bool {
        matches!(self, Error::Domain(_))
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParams(msg.into())
    }
}

impl From<DomainError> for Error {
    fn from(e: DomainError) -> Self {
        Error::Domain(e)
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Domain(e) => write!(f, "domain error: {e}"),
            Error::OrbitExit { t, cause } => write!(f, "orbit left the domain at t={t}: {cause}"),
            Error::DimensionMismatch { expected, found } => {
                write!(f, "dimension mismatch: expected {expected}, found {found}")
            }
            Error::SamplingExhausted { attempts } => {
                write!(f, "sampling exhausted after {attempts} consecutive rejections")
            }
            Error::StepLimitExceeded { steps, t } => {
                write!(f, "integrator step limit {steps} exceeded at t={t}")
            }
            Error::SingularProfile { z } => write!(f, "singular profile at z={z}"),
            Error::DegenerateFrame { det } => {
                write!(f, "degenerate frame: determinant {det:e}")
            }
            Error::InvalidParams(msg) => write!(f, "invalid parameters: {msg}"),
            Error::MissingGenerator(id) => write!(f, "missing generator {id}"),
            Error::NoPeriodDetected => f.write_str("no period detected"),
            Error::Unsupported(what) => write!(f, "unsupported: {what}"),
        }
    }
}

impl core::error::Error for Error {}
impl core::error::Error for DomainError {}
