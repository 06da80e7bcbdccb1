//! Error type shared by all modules of the crate.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    /// A profile sample does not match the grid it claims to live on.
    #[error("grid/sample length mismatch: grid has {expected} nodes, sample has {got}")]
    GridMismatch { expected: usize, got: usize },

    /// A constructor or operation received an out-of-range argument.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Newton iteration on the backward-Euler residual did not converge.
    /// Signals that dt is too large or the profile is near-degenerate.
    #[error("Newton did not converge within {max_iter} iterations (residual {residual:.3e})")]
    NewtonDivergence { max_iter: usize, residual: f64 },

    /// A time step produced a non-finite node value.
    #[error("non-finite value at node {node} (x = {x}) at t = {t}")]
    StabilityViolation { node: usize, x: f64, t: f64 },

    /// A rotational surface cannot be generated from a nonpositive profile.
    #[error("nonpositive profile value {value:.6e} at node {node}; surface of revolution degenerate")]
    DegenerateSurface { node: usize, value: f64 },

    /// A checker that requires a far-field constant was given a run without one.
    #[error("trajectory has no far-field constant (not a compactly supported perturbation)")]
    NotProblemTwo,

    /// A barrier was paired with a trajectory it was not built for.
    #[error("barrier/trajectory constant mismatch: {0}")]
    ConstantMismatch(String),

    /// An operation's stated precondition does not hold for the given input.
    #[error("precondition violated: {0}")]
    Precondition(String),

    /// Malformed configuration or data file.
    #[error("parse error: {0}")]
    Parse(String),

    /// Structurally valid input that violates a documented invariant.
    #[error("validation error ({field}): {message}")]
    Validation { field: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn validation(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
