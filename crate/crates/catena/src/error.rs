use thiserror::Error;

/// Errors surfaced by the solvers and the CLI.
#[derive(Debug, Error)]
pub enum Error {
    #[error("no catenoid exists for sigma = {sigma}: below sigma_crit = {sigma_crit}")]
    NoSolution { sigma: f64, sigma_crit: f64 },

    #[error("profile gap u+1 fell below {eps} at node {node} (touchdown regime)")]
    SingularGap { node: usize, eps: f64 },

    #[error("{what}: no convergence after {iterations} iterations")]
    NoConvergence { what: String, iterations: usize },

    #[error("{what}: no sign change bracketed in scan window")]
    NotBracketed { what: String },

    #[error("singular Jacobian (zero pivot in tridiagonal solve, fold proximity)")]
    SingularJacobian,

    #[error("singular linear operator (near-zero pivot; c at the critical branch point)")]
    SingularOperator,

    #[error("trajectory distances span fewer than two decades; cannot fit a rate")]
    InsufficientDecay,

    #[error("anti-maximum criterion violated: {detail}")]
    CriterionViolated { detail: String },

    #[error("invalid config key `{key}`: {reason}")]
    InvalidConfig { key: String, reason: String },

    #[error("touchdown: film reached the axis-side limit at t = {t}")]
    Touchdown { t: f64 },

    #[error("ceiling contact: film reached the cylinder at t = {t}")]
    CeilingContact { t: f64 },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code convention: 2 config, 3 domain, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidConfig { .. } => 2,
            Error::NoSolution { .. }
            | Error::SingularGap { .. }
            | Error::Touchdown { .. }
            | Error::CeilingContact { .. } => 3,
            _ => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
