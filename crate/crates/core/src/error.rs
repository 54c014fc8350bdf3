use thiserror::Error;

/// Errors raised by the subspace, modular, tower, skeleton, sequence-model and
/// Fock modules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "subspace is not standard: dim(K∩iK) = {complex_part} (real), codim(K+iK) = {cyclic_defect} (real)"
    )]
    NotStandard {
        complex_part: usize,
        cyclic_defect: usize,
    },

    #[error("pair is not standard: dim(E∧F) = {meet_dim}, codim(E∨F) = {join_codim}")]
    NotStandardPair { meet_dim: usize, join_codim: usize },

    #[error("operator is singular (smallest singular value {sigma_min:e})")]
    Singular { sigma_min: f64 },

    #[error("operator is not a conjugate-linear involution (‖j²−I‖ = {residual:e})")]
    NotInvolution { residual: f64 },

    #[error("declared linearity {declared} does not match computed {computed}")]
    LinearityMismatch { declared: String, computed: String },

    #[error("tower step {step}: {reason}")]
    NotStandardAtStep { step: i64, reason: String },

    #[error("tower index {index} outside computed range [{min}, {max}]")]
    IndexOutOfRange { index: i64, min: i64, max: i64 },

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("degenerate pairing between B_{left} and B_{right}: {reason}")]
    DegeneratePairing {
        left: usize,
        right: usize,
        reason: String,
    },

    #[error("involution J_{index} infeasible: {axiom}")]
    InvolutionInfeasible { index: usize, axiom: String },

    #[error("center formula requested without involutions")]
    MissingInvolutions,

    #[error("goal {goal} infeasible: {reason}")]
    GoalInfeasible { goal: String, reason: String },

    #[error("vector norm {norm} exceeds configured radius {radius}")]
    RadiusExceeded { norm: f64, radius: f64 },

    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("invalid literal: {0}")]
    InvalidLiteral(String),
}

pub type Result<T> = std::result::Result<T, Error>;
