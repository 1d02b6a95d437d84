use std::path::PathBuf;

use thiserror::Error;

use crate::multiscale::ObservableSeries;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Coarse failure class, used by the CLI to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorClass {
    InvalidInput,
    Numerical,
    Io,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice size {n} is invalid: N must be even and at least 6")]
    InvalidLatticeSize { n: usize },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("component {index} is not strictly positive ({value})")]
    NonPositive { index: usize, value: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("trace power p = {p} must be even with 2 <= p <= {n}")]
    InvalidTracePower { p: usize, n: usize },

    #[error("observable index {j} out of range 1..={count}")]
    ObservableIndex { j: usize, count: usize },

    #[error("positivity lost at t = {time}: component {index} = {value}")]
    PositivityLost { time: f64, index: usize, value: f64 },

    #[error("state is a fixed point of the fast field (|F(U)| = {rhs_norm:e})")]
    FixedPoint { rhs_norm: f64 },

    #[error("no return below threshold {threshold} within horizon {horizon} (closest {best})")]
    NoReturnFound { horizon: f64, threshold: f64, best: f64 },

    #[error("lifting Jacobian is singular for fixed indices {fixed:?}")]
    SingularJacobian { fixed: Vec<usize> },

    #[error("lifting did not converge in {iters} iterations (residual {residual:e})")]
    MaxItersExceeded { iters: usize, residual: f64 },

    #[error("lifting iterate left the positive orthant")]
    LeftPositiveOrthant,

    #[error("infeasible lifting target: {0}")]
    InfeasibleTarget(String),

    #[error("series horizons differ: {reference} vs {multiscale}")]
    HorizonMismatch { reference: f64, multiscale: f64 },

    #[error("multiscale run aborted at step {step}: {source}")]
    RunAborted {
        step: usize,
        partial: Box<ObservableSeries>,
        source: Box<Error>,
    },

    #[error("table cell (euler step {euler_step}) failed: {source}")]
    TableCell { euler_step: usize, source: Box<Error> },

    #[error("config: {0}")]
    Config(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub fn class(&self) -> ErrorClass {
        match self {
            Error::InvalidLatticeSize { .. }
            | Error::DimensionMismatch { .. }
            | Error::NonPositive { .. }
            | Error::InvalidArgument(_)
            | Error::InvalidTracePower { .. }
            | Error::ObservableIndex { .. }
            | Error::InfeasibleTarget(_)
            | Error::HorizonMismatch { .. }
            | Error::Config(_) => ErrorClass::InvalidInput,
            Error::PositivityLost { .. }
            | Error::FixedPoint { .. }
            | Error::NoReturnFound { .. }
            | Error::SingularJacobian { .. }
            | Error::MaxItersExceeded { .. }
            | Error::LeftPositiveOrthant => ErrorClass::Numerical,
            Error::RunAborted { source, .. } | Error::TableCell { source, .. } => source.class(),
            Error::Io { .. } => ErrorClass::Io,
        }
    }
}
