use thiserror::Error;

pub type Result<T> = std::result::Result<T, BratuError>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BratuError {
    #[error("singular matrix: pivot {pivot:e} at row {row} below threshold {threshold:e}")]
    SingularMatrix { row: usize, pivot: f64, threshold: f64 },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigenvector iteration did not converge (residual {residual:e})")]
    ConvergenceFailure { residual: f64 },

    #[error("adaptive quadrature exceeded depth {depth}")]
    QuadratureFailure { depth: usize },

    #[error("non-finite nonlinear term at node {node} (lambda = {lambda:e}, u = {u:e})")]
    Overflow { node: usize, lambda: f64, u: f64 },

    #[error("Newton corrector did not converge in {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("continuation step size {ds:e} fell below ds_min at s = {s}")]
    StepFailure { ds: f64, s: f64 },

    #[error("degenerate Legendre grid: tanh({alpha}) rounds to 1")]
    DegenerateGrid { alpha: f64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
}
