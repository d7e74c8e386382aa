use thiserror::Error;

/// Errors produced by the simulation and analysis routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("undefined degree: attraction table has no value for out-degree {0}")]
    UndefinedDegree(usize),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid attraction spec: {0}")]
    InvalidSpec(String),

    #[error("population cap exceeded: more than {cap} vertices")]
    PopulationCapExceeded { cap: usize },

    #[error("series not converged after {terms} terms: partial sum {partial}, remainder bound {bound}")]
    SeriesNotConverged { partial: f64, bound: f64, terms: usize },

    #[error("series diverges at theta = {theta}")]
    SeriesDiverged { theta: f64 },

    #[error("no Malthusian parameter in search range ({lo}, {hi})")]
    NoMalthusianRoot { lo: f64, hi: f64 },

    #[error("tree format error on line {line}: {msg}")]
    TreeFormat { line: usize, msg: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
