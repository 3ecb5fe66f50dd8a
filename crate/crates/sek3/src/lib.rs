//! Geometry, calculus, kinematics and uncertainty for the extended-pose
//! groups SE_K(3): one rotation plus K translation-like vectors, embedded as
//! (K+3)×(K+3) matrices. K = 0 recovers SO(3), K = 1 recovers SE(3), and
//! K = 2 is the extended pose (orientation, velocity, position) used in
//! inertial navigation.
//!
//! K is a runtime parameter; every closed-form expression here is covered by
//! a brute-force reference in [`oracle`] (series exponentials, numerical
//! integrals, finite differences) that the test suites and the identity
//! runner in [`verify`] evaluate against it.
//!
//! # Layout
//!
//! - [`so3`]: rotation primitives (skew maps, Rodrigues exponential,
//!   logarithm, SO(3) Jacobians).
//! - [`group`]: the group elements, tangent vectors, hat/vee, exp/log, the
//!   parametric action on ℝ³ and the wire format.
//! - [`adjoint`]: `Ad_T`, the algebra adjoint `𝔏(ξ)` and the adjoint group's
//!   own exponential and logarithm.
//! - [`jacobian`]: left/right group Jacobians, Q blocks, inverses and the
//!   determinant.
//! - [`bch`]: truncated Baker-Campbell-Hausdorff composition and the
//!   perturbation identities.
//! - [`metrics`]: invariant distances, weighted inner products, the volume
//!   element, Monte Carlo integration and interpolation.
//! - [`calculus`]: action derivatives and Gauss-Newton point registration.
//! - [`kinematics`]: generalized velocities, exponential propagation,
//!   coordinate kinematics and perturbation transition matrices.
//! - [`uncertainty`]: concentrated Gaussians (sampling, recovery, side
//!   conversion).
//!
//! # Features
//!
//! - `parallel` (default): fan data-parallel loops out over rayon; results
//!   are bit-identical to the sequential fallback.
//! - `oracle` (default): the brute-force references and the identity suite;
//!   disable in release builds that only need the closed forms.

mod coeffs;
mod error;
mod exec;

pub mod adjoint;
pub mod bch;
pub mod calculus;
pub mod group;
pub mod jacobian;
pub mod kinematics;
pub mod metrics;
pub mod so3;
pub mod uncertainty;

#[cfg(feature = "oracle")]
pub mod oracle;
#[cfg(feature = "oracle")]
pub mod verify;

pub use adjoint::{log_adjoint, AdjointMatrix, AlgebraAdjointMatrix};
pub use bch::{bch, bch_first_order, group_difference, perturb, SmallArg};
pub use calculus::{
    d_adjoint_action_algebra, d_adjoint_action_left_perturbation, d_point_action_algebra,
    d_point_action_left_perturbation, gauss_newton_fit, stacked_point_jacobian,
    GaussNewtonReport, Observation, PointBlock,
};
pub use error::{Error, Result};
pub use group::{
    generator, AlgebraMatrix, GroupElement, GroupElementRecord, TangentVector,
    TangentVectorRecord,
};
pub use jacobian::{
    group_jacobian, group_jacobian_block_form, group_jacobian_determinant,
    group_jacobian_inverse, group_jacobian_polynomial_form, q_block_left, GroupJacobian, Side,
};
pub use kinematics::{
    convert_velocity, jacobian_identity_residual, perturbation_step, perturbation_transition,
    propagate, xi_dot, Frame, GeneralizedVelocity,
};
pub use metrics::{
    distance, inner_product, integrate_mc, interpolate, interpolate_coordinates,
    trace_inner_product_adjoint, trace_inner_product_embedding, volume_element,
    volume_element_half_angle, WeightSpec,
};
pub use so3::{Rotation, RotationVector};
pub use uncertainty::{convert_side, recover, sample, ConcentratedGaussian};

#[cfg(feature = "oracle")]
pub use verify::{run_identity_suite, IdentityCheck};
