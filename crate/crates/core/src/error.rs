use thiserror::Error;

use crate::horizon::ExistenceReport;
use crate::Vector;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid input: {0}")]
    Invalid(String),

    #[error("empty set: {0}")]
    Empty(String),

    /// An iterative method ran out of budget. `best` is the best iterate
    /// seen, `bounds` a (lower, upper) bracket when the method maintains one.
    #[error("{context}: no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence {
        context: &'static str,
        iterations: usize,
        residual: f64,
        best: Option<Vector>,
        partner: Option<Vector>,
        bounds: Option<(f64, f64)>,
    },

    /// A numeric probe could not decide; `lower_bound` is the best certified
    /// lower bound on the probed quantity, if any.
    #[error("inconclusive: {context}")]
    Inconclusive {
        context: String,
        lower_bound: Option<f64>,
    },

    #[error("unknown name `{0}`")]
    UnknownName(String),

    #[error("deadline exceeded in {0}")]
    Deadline(&'static str),

    #[error("solver did not reach a stationary point; partial report attached")]
    SolveIncomplete(Box<ExistenceReport>),
}

impl Error {
    pub(crate) fn convergence(
        context: &'static str,
        iterations: usize,
        residual: f64,
        best: Option<Vector>,
    ) -> Self {
        Error::Convergence {
            context,
            iterations,
            residual,
            best,
            partner: None,
            bounds: None,
        }
    }

    pub(crate) fn inconclusive(context: impl Into<String>, lower_bound: Option<f64>) -> Self {
        Error::Inconclusive {
            context: context.into(),
            lower_bound,
        }
    }

    /// Short machine-readable tag used by report writers.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Dimension { .. } => "DimensionError",
            Error::NonFinite(_) => "NonFiniteError",
            Error::Invalid(_) => "InvalidInput",
            Error::Empty(_) => "EmptySet",
            Error::Convergence { .. } => "ConvergenceError",
            Error::Inconclusive { .. } => "InconclusiveError",
            Error::UnknownName(_) => "KeyError",
            Error::Deadline(_) => "DeadlineExceeded",
            Error::SolveIncomplete(_) => "ConvergenceError",
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::Dimension { expected, got })
    }
}

pub(crate) fn check_finite(v: &Vector, what: &'static str) -> Result<()> {
    if v.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
