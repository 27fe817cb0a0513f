//! Brute-force checks of the security and optimality claims.
//!
//! Everything here works by exhaustive enumeration over the (small) input
//! space, independently of the algebra used to build the codes:
//!
//! - [`observation_distribution`] and [`mutual_information`] give the exact
//!   joint law of `(M, Y_A)` for a bundle and a wiretap set.
//! - [`verify_security`] scans every wiretap set of size at most `r` and every
//!   sink, producing a [`SecurityReport`].
//! - [`rank_security_criterion`] is the algebraic shortcut the enumeration is
//!   cross-checked against.
//! - [`refute_key_rate`] searches all linear codes with a shorter key for one
//!   that is both decodable and secure.
//! - [`han_profile`] evaluates the averaged conditional entropies `h_1..h_n`.

mod distribution;
mod han;
mod refute;

pub use distribution::{
    mutual_information, observation_distribution, rank_security_criterion, row_space_contained,
    verify_security, JointDistribution, SecurityReport, SetResult, VerifyOptions,
};
pub use han::{han_profile, ProbabilityTable};
pub use refute::{refute_key_rate, RefutationResult, Verdict};

use thiserror::Error;

use crate::field::FieldError;
use crate::network::NetworkError;
use crate::secure::SecureError;

/// Default cap on `q^(ω + key_dim)` for distribution enumeration.
pub const DEFAULT_ENUMERATION_BUDGET: u64 = 10_000_000;

/// Default cap on the number of linear codes a refutation may enumerate.
pub const DEFAULT_SEARCH_BUDGET: u64 = 100_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum OracleError {
    #[error("enumeration needs {needed} cases, budget is {budget}")]
    BudgetExceeded { needed: String, budget: u64 },
    #[error("key dimension {key_dim} must be below the security level {r}")]
    InvalidKeyDim { key_dim: usize, r: usize },
    #[error("information rate must be at least 1")]
    InvalidRate,
    #[error("not a probability distribution: {0}")]
    NotADistribution(String),
    #[error("h_{} = {upper} is below h_{r} = {lower}", r + 1)]
    MonotonicityViolated { r: usize, lower: f64, upper: f64 },
    #[error("invalid joint distribution: {0}")]
    InvalidDistribution(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    #[error(transparent)]
    Secure(#[from] SecureError),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub(crate) fn check_budget(needed: Option<u64>, budget: u64) -> Result<u64, OracleError> {
    match needed {
        Some(n) if n <= budget => Ok(n),
        Some(n) => Err(OracleError::BudgetExceeded {
            needed: n.to_string(),
            budget,
        }),
        None => Err(OracleError::BudgetExceeded {
            needed: "more than 2^64".into(),
            budget,
        }),
    }
}

/// Runs `f` on a dedicated pool when a worker count is given, else on the global one.
pub(crate) fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> T {
    match jobs {
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j.max(1))
            .build()
            .expect("thread pool")
            .install(f),
        None => f(),
    }
}
