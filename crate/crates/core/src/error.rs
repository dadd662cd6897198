use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("log-weight {log_weight} exceeds the overflow guard (partition of size {size})")]
    Overflow { log_weight: f64, size: usize },

    #[error("Newton iteration did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },

    #[error("invalid cut: beta = {beta}, lambda = {lambda}")]
    InvalidCut { beta: f64, lambda: f64 },

    #[error("point u = {u} lies on the cut; a side must be given")]
    OnCut { u: f64 },

    #[error("one-cut admissibility violated at u = {u}: rho = {rho}")]
    Admissibility { u: f64, rho: f64 },

    #[error("Laurent series window [{lo}, {hi}] cannot hold power {power}")]
    WindowViolation { lo: i64, hi: i64, power: i64 },

    #[error("singular Jacobian")]
    SingularJacobian,

    #[error("invalid contour: {0}")]
    InvalidContour(String),
}
