use thiserror::Error;

/// Errors produced by model construction, enumeration, generation and solving.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("state space has {size} states, above the limit of {limit}; instance too large for exact solution")]
    StateSpaceTooLarge { size: u128, limit: usize },

    #[error("no feasible placement found after {attempts} resamples (side {side}, threshold {threshold})")]
    InfeasiblePlacement {
        attempts: usize,
        side: f64,
        threshold: f64,
    },

    #[error("{context} did not converge after {iterations} iterations (residual {residual:.3e})")]
    NonConvergence {
        context: &'static str,
        iterations: usize,
        residual: f64,
    },

    #[error("linear system is singular or ill-conditioned: {0}")]
    SingularSystem(String),
}

pub type Result<T> = std::result::Result<T, Error>;
