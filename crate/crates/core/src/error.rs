use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{name} = {value} outside {allowed}")]
    Domain {
        name: &'static str,
        value: f64,
        allowed: &'static str,
    },

    #[error("quadrature did not converge: achieved {achieved:e}, requested {requested:e}")]
    Quadrature { achieved: f64, requested: f64 },

    #[error("no limit soliton: omega = {omega} exceeds omega1 = {omega1}")]
    NoLimitSolution { omega: f64, omega1: f64 },

    #[error("invalid ansatz: {0}")]
    Ansatz(String),

    #[error("invalid field: {0}")]
    Field(String),

    #[error("solver failed after {iterations} iterations: {reason}")]
    Solver { iterations: usize, reason: String },

    #[error("parse error: {0}")]
    Parse(String),

    #[error("io error on {path}: {message}")]
    Io { path: String, message: String },
}

impl Error {
    pub(crate) fn domain(name: &'static str, value: f64, allowed: &'static str) -> Self {
        Error::Domain {
            name,
            value,
            allowed,
        }
    }
}
