//! Crate-wide error type and the exit-code classification used by the CLI.

use thiserror::Error;

/// How an error maps onto a process exit code: validation failures exit
/// with 2, resource/guard failures with 3.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ExitClass {
    Validation,
    Resource,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not unitary: max |U\u{2020}U - I| = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotUnitary { deviation: f64, tolerance: f64 },

    #[error("matrix is not Hermitian: max |H - H\u{2020}| = {deviation:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { deviation: f64, tolerance: f64 },

    #[error("non-physical kernel: spectral norm of B\u{2020}B is {norm} (must be < 1)")]
    NonPhysicalKernel { norm: f64 },

    #[error("Gram matrix eigenvalue {value:.3e} below the -1e-12 clamp window")]
    NegativeGram { value: f64 },

    #[error("invalid outcome pattern: {0}")]
    Pattern(String),

    #[error("invalid squeezing parameters: {0}")]
    Squeezing(String),

    #[error("instance file error: {0}")]
    InstanceFile(String),

    #[error("cost guard exceeded: {what} = {value} > {limit} (raise the limit explicitly; this will be slow)")]
    GuardExceeded {
        what: &'static str,
        value: usize,
        limit: usize,
    },

    #[error("memory budget exceeded: estimated {needed} bytes > budget {budget} bytes; \
             lower the order, shrink the grid block, or fall back to the naive path")]
    MemoryBudget { needed: u64, budget: u64 },

    #[error("Fourier grid did not converge within N = {cap} nodes (worst relative change {worst:.3e})")]
    GridConvergence { cap: usize, worst: f64 },

    #[error("moment fit did not converge at order {order} (residual {residual:.3e} after {iterations} iterations)")]
    FitNonConvergence {
        order: usize,
        residual: f64,
        iterations: usize,
    },

    #[error("inconsistent moment sequence: {0}")]
    InconsistentMoments(String),

    #[error("removal subset size {0} exceeds the supported moment order (max 4)")]
    SubsetTooLarge(usize),

    #[error("relative deviation undefined: exact probability is zero")]
    ZeroExactProbability,

    #[error("numerical instability: {0}")]
    Numerical(String),

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),

    #[error("json error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Classify for process exit: bad inputs are `Validation`, blown
    /// guards/budgets and numerical failures are `Resource`.
    pub fn exit_class(&self) -> ExitClass {
        match self {
            Error::Dimension(_)
            | Error::NotUnitary { .. }
            | Error::NotHermitian { .. }
            | Error::NonPhysicalKernel { .. }
            | Error::NegativeGram { .. }
            | Error::Pattern(_)
            | Error::Squeezing(_)
            | Error::InstanceFile(_)
            | Error::InconsistentMoments(_)
            | Error::SubsetTooLarge(_)
            | Error::ZeroExactProbability
            | Error::Json(_) => ExitClass::Validation,
            Error::GuardExceeded { .. }
            | Error::MemoryBudget { .. }
            | Error::GridConvergence { .. }
            | Error::FitNonConvergence { .. }
            | Error::Numerical(_)
            | Error::Io(_) => ExitClass::Resource,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
