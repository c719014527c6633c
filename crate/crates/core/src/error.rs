//! Error type shared by all modules of the crate.

use thiserror::Error;

/// Crate-wide error enumeration.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A linear system has no reliable solution: the best remaining pivot is
    /// below the singularity threshold relative to its row scale.
    #[error("singular matrix: pivot {pivot:.3e} below threshold {threshold:.3e} at column {column}")]
    SingularMatrix {
        column: usize,
        pivot: f64,
        threshold: f64,
    },

    /// A field produced a non-finite value at a point where it was sampled
    /// (directly or at a finite-difference stencil node).
    #[error("field evaluation failed at {point:?}: {reason}")]
    EvaluationFailure { point: Vec<f64>, reason: String },

    /// An integration stage produced NaN or infinity.
    #[error("state became non-finite during integration near t = {t}")]
    NonFiniteState { t: f64 },

    /// A set of vectors or one-forms expected to have full rank does not.
    #[error("rank-deficient {what} at {point:?}")]
    RankDeficient { what: String, point: Vec<f64> },

    /// The gyroscopic coefficients do not fit the conformal pattern
    /// `C^c_ab = d_b(phi) delta^c_a - d_a(phi) delta^c_b` within tolerance.
    #[error("gyroscopic tensor is not phi-simple: residual {residual:.3e} exceeds threshold {threshold:.3e}")]
    NotPhiSimple { residual: f64, threshold: f64 },

    /// The recovered differential of phi is not closed, so no potential for it
    /// exists locally.
    #[error("recovered d(phi) is not closed: curl residual {residual:.3e} exceeds {threshold:.3e}")]
    NonClosedForm { residual: f64, threshold: f64 },

    /// Initial velocity violates the constraints by more than the admissible
    /// projection tolerance.
    #[error("constraint violated: |mu(v)| = {violation:.3e} exceeds {tolerance:.3e}")]
    ConstraintViolated { violation: f64, tolerance: f64 },

    /// The saddle-point system of the constrained equations of motion is
    /// singular (constraint rows rank-deficient).
    #[error("singular saddle system: {0}")]
    SingularSaddle(String),

    /// Geodesic shooting failed to reach the target endpoint.
    #[error("geodesic shooting diverged after {iterations} iterations (endpoint error {endpoint_error:.3e})")]
    ShootingDiverged {
        iterations: usize,
        endpoint_error: f64,
    },

    /// A system descriptor carries invalid physical parameters.
    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    /// Malformed argument to a kernel routine (dimension mismatch, odd panel
    /// count, non-positive step, ...).
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T> = std::result::Result<T, Error>;
