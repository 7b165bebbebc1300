//! Error type shared across the crate.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument is outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A precondition on problem-size or density is violated.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// The mean equation has no root (target at or below the cutoff).
    #[error("no root: mean target {target} is not above cutoff {cutoff}")]
    NoRoot { target: f64, cutoff: i64 },

    /// A brute-force guard refused to run; `estimate` is the work estimate
    /// that tripped the limit.
    #[error("enumeration guard: {what} (estimated work {estimate:.3e} exceeds limit {limit:.1e})")]
    Guard {
        what: String,
        estimate: f64,
        limit: f64,
    },

    /// A rejection sampler ran out of attempts.
    #[error("sampler exhausted after {attempts} attempts")]
    Exhausted { attempts: u64 },

    /// The minimax optimizer failed to converge; carries the best iterate.
    #[error("optimizer did not converge: best value {best_value} at ({z1}, {z2})")]
    NonConvergence { best_value: f64, z1: f64, z2: f64 },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
