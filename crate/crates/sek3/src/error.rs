use thiserror::Error;

/// Errors raised by the operations in this crate.
#[derive(Debug, Clone, PartialEq, Error)]
#[non_exhaustive]
pub enum Error {
    /// Two values built for different numbers of translation slots were mixed.
    #[error("dimension mismatch: expected K={expected}, got K={got}")]
    DimensionMismatch { expected: usize, got: usize },

    /// A matrix that must be skew-symmetric is not, beyond tolerance.
    #[error("matrix is not skew-symmetric (defect {defect:.3e})")]
    NotSkew { defect: f64 },

    /// A matrix does not satisfy the rotation invariants.
    #[error("matrix is not a valid rotation (defect {defect:.3e})")]
    InvalidRotation { defect: f64 },

    /// A matrix does not have the block layout of an algebra element.
    #[error("matrix is not a valid algebra element: {reason}")]
    MalformedAlgebra { reason: &'static str },

    /// A matrix does not have the block layout of an adjoint.
    #[error("matrix is not a valid adjoint: {reason}")]
    MalformedAdjoint { reason: &'static str },

    /// A matrix does not have the block layout of a group embedding.
    #[error("matrix is not a valid group embedding: {reason}")]
    MalformedEmbedding { reason: &'static str },

    /// Jacobian inverses are singular where the rotation angle hits 2π.
    #[error("Jacobian inverse is singular at rotation angle {theta}")]
    SingularJacobian { theta: f64 },

    /// BCH truncation orders outside 1..=4 are not provided.
    #[error("unsupported series order {order} (expected 1..=4)")]
    UnsupportedOrder { order: usize },

    /// A velocity was supplied in the wrong frame.
    #[error("expected a {expected}-frame velocity")]
    FrameMismatch { expected: &'static str },

    /// A Monte Carlo bounding box has a lower bound above its upper bound.
    #[error("invalid integration box for slot {slot}")]
    InvalidBox { slot: usize },

    /// A covariance matrix has eigenvalues below the PSD tolerance.
    #[error("covariance is not positive semidefinite (min eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    /// Samples are spread too far from the running mean to recover a
    /// concentrated distribution.
    #[error("samples are not concentrated (max deviation {max_deviation:.3e})")]
    NotConcentrated { max_deviation: f64 },

    /// The Gauss-Newton normal equations are numerically rank deficient.
    #[error("normal equations are rank deficient (condition {condition:.3e})")]
    RankDeficient { condition: f64 },

    /// Step halving could not find a cost-decreasing Gauss-Newton step.
    #[error("cost did not decrease after {halvings} step halvings")]
    NonDecreasingCost { halvings: usize },

    /// The matrix logarithm is undefined on the closed negative real axis.
    #[error("matrix has an eigenvalue on the logarithm branch cut")]
    LogBranch,
}

pub type Result<T> = std::result::Result<T, Error>;
