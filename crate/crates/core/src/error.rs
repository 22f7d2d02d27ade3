use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {}", .0.join("; "))]
    InvalidConfig(Vec<String>),

    #[error("teacher output is not centered: E[f(h)] = {mean:e}")]
    NotCentered { mean: f64 },

    #[error("degenerate teacher: <f'> = {mean_fp:e}")]
    DegenerateTeacher { mean_fp: f64 },

    #[error("Gauss-Hermite quadrature did not converge: {order} and {} nodes differ by {diff:e}", 2 * .order)]
    QuadratureNotConverged { order: usize, diff: f64 },

    #[error("no root of the susceptibility cubic in (0, 1] at lambda_bar = {lambda_bar:e}")]
    NoPhysicalRoot { lambda_bar: f64 },

    #[error("singular linear system for the squared averages")]
    SingularSystem,

    #[error("no support edge found below x = {x_hi:e}")]
    NoEdgeFound { x_hi: f64 },

    #[error("training-set size m is not set")]
    MissingDimension,

    #[error("working set of {bytes} bytes exceeds the {budget} byte budget")]
    DimensionOverflow { bytes: u64, budget: u64 },

    #[error("positive-definite solve failed: {0}")]
    SolveFailure(String),

    #[error("symmetric eigenvalue decomposition failed: {0}")]
    EigenFailure(String),
}

pub type Result<T> = std::result::Result<T, Error>;
