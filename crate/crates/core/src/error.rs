use thiserror::Error;

#[derive(Debug, Error)]
pub enum HitmixError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("input contains no edges")]
    EmptyGraph,

    #[error("invalid seed set: {0}")]
    InvalidSeeds(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error(
        "conjugate gradient broke down at iteration {iteration} ({reason}); \
         the operator is not positive definite, exclude vertices that cannot reach the seed set"
    )]
    SolverBreakdown { iteration: usize, reason: String },

    #[error(
        "conjugate gradient did not converge for moment {moment}: \
         {iterations} iterations, relative residual {residual:e}"
    )]
    NotConverged {
        moment: usize,
        iterations: usize,
        residual: f64,
    },

    #[error("no non-seed vertex can reach the seed set")]
    AllUnreachable,

    #[error("all {0} simulated walks were truncated")]
    NoCompletedWalks(usize),

    #[error("mixture component {component} collapsed to zero weight after {restarts} restarts")]
    ComponentCollapse { component: usize, restarts: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, HitmixError>;
