//! Left and right group Jacobians of SE_K(3): Q blocks, the quartic
//! polynomial closed form, block inverses and the determinant.
//!
//! Two algebraic routes to the same matrix are kept alive deliberately:
//! block assembly from the SO(3) Jacobian plus Q blocks, and the quartic
//! polynomial in `𝔏(ξ)`. [`group_jacobian`] dispatches between them (blocks
//! for K ≤ 1, polynomial otherwise) and the test suites cross-check one
//! against the other. Right-side quantities are evaluated as the left-side
//! quantities of `−ξ`, so the reflection identities hold exactly.

use nalgebra::{DMatrix, Matrix3};

use crate::coeffs::{jacobian_det_coeff, jacobian_poly_coeffs, q_block_coeffs};
use crate::error::{Error, Result};
use crate::group::TangentVector;
use crate::so3::{self, SINGULARITY_MARGIN};

/// Which invariant differential the Jacobian belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Side {
    Left,
    Right,
}

impl Side {
    pub fn flipped(self) -> Side {
        match self {
            Side::Left => Side::Right,
            Side::Right => Side::Left,
        }
    }
}

/// A group Jacobian or its inverse: block-lower-triangular with identical
/// SO(3) Jacobian blocks on the diagonal.
#[derive(Clone, Debug, PartialEq)]
pub struct GroupJacobian {
    m: DMatrix<f64>,
    side: Side,
}

impl GroupJacobian {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn k(&self) -> usize {
        self.m.nrows() / 3 - 1
    }

    pub fn apply(&self, xi: &TangentVector) -> TangentVector {
        assert_eq!(self.k(), xi.k(), "jacobian and tangent vector have different K");
        TangentVector::from_vector(&(&self.m * xi.as_vector())).expect("dimensions agree")
    }
}

/// The left Q block coupling rotation and the k-th translation:
/// `½t∧ + c₁(φ∧t∧ + t∧φ∧ + φ∧t∧φ∧) + c₂(φ∧²t∧ + t∧φ∧² − 3φ∧t∧φ∧)
///  + c₃(φ∧t∧φ∧² + φ∧²t∧φ∧)`.
pub fn q_block_left(phi: &nalgebra::Vector3<f64>, tk: &nalgebra::Vector3<f64>) -> Matrix3<f64> {
    let [c1, c2, c3] = q_block_coeffs(phi.norm());
    let p = so3::hat(phi);
    let t = so3::hat(tk);
    let pt = p * t;
    let tp = t * p;
    let ptp = pt * p;
    0.5 * t + c1 * (pt + tp + ptp) + c2 * (p * pt + tp * p - 3.0 * ptp) + c3 * (ptp * p + p * ptp)
}

/// The group Jacobian, by the production route for the dimension: block
/// assembly for K ≤ 1, the quartic polynomial otherwise.
pub fn group_jacobian(xi: &TangentVector, side: Side) -> GroupJacobian {
    if xi.k() <= 1 {
        group_jacobian_block_form(xi, side)
    } else {
        group_jacobian_polynomial_form(xi, side)
    }
}

/// Block assembly: `J` on the diagonal, `Q_k` down the first block column.
pub fn group_jacobian_block_form(xi: &TangentVector, side: Side) -> GroupJacobian {
    let reflected;
    let xi_left = match side {
        Side::Left => xi,
        Side::Right => {
            reflected = -xi;
            &reflected
        }
    };
    let k = xi_left.k();
    let n = 3 * (k + 1);
    let jl = so3::left_jacobian(xi_left.phi());
    let mut m = DMatrix::zeros(n, n);
    for i in 0..=k {
        m.fixed_view_mut::<3, 3>(3 * i, 3 * i).copy_from(&jl);
    }
    for (i, t) in xi_left.translations().iter().enumerate() {
        m.fixed_view_mut::<3, 3>(3 * (i + 1), 0)
            .copy_from(&q_block_left(xi_left.phi(), t));
    }
    GroupJacobian { m, side }
}

/// Quartic closed form: `I + b₁𝔗 + b₂𝔗² + b₃𝔗³ + b₄𝔗⁴` in `𝔗 = 𝔏(ξ)`.
pub fn group_jacobian_polynomial_form(xi: &TangentVector, side: Side) -> GroupJacobian {
    let reflected;
    let xi_left = match side {
        Side::Left => xi,
        Side::Right => {
            reflected = -xi;
            &reflected
        }
    };
    let n = xi_left.dim();
    let [b1, b2, b3, b4] = jacobian_poly_coeffs(xi_left.phi().norm());
    let t = xi_left.small_adjoint().matrix().clone();
    let t2 = &t * &t;
    let t3 = &t2 * &t;
    let t4 = &t2 * &t2;
    let m = DMatrix::identity(n, n) + t * b1 + t2 * b2 + t3 * b3 + t4 * b4;
    GroupJacobian { m, side }
}

/// Block inverse: `J⁻¹` on the diagonal, `−J⁻¹Q_kJ⁻¹` down the first block
/// column. Singular where the rotation angle reaches 2π.
pub fn group_jacobian_inverse(xi: &TangentVector, side: Side) -> Result<GroupJacobian> {
    let reflected;
    let xi_left = match side {
        Side::Left => xi,
        Side::Right => {
            reflected = -xi;
            &reflected
        }
    };
    let theta = xi_left.phi().norm();
    if theta >= std::f64::consts::TAU - SINGULARITY_MARGIN {
        return Err(Error::SingularJacobian { theta });
    }
    let k = xi_left.k();
    let n = 3 * (k + 1);
    let jl_inv = so3::left_jacobian_inv(xi_left.phi())?;
    let mut m = DMatrix::zeros(n, n);
    for i in 0..=k {
        m.fixed_view_mut::<3, 3>(3 * i, 3 * i).copy_from(&jl_inv);
    }
    for (i, t) in xi_left.translations().iter().enumerate() {
        let q = q_block_left(xi_left.phi(), t);
        m.fixed_view_mut::<3, 3>(3 * (i + 1), 0)
            .copy_from(&(-jl_inv * q * jl_inv));
    }
    Ok(GroupJacobian { m, side })
}

/// `|det 𝒥| = (2(1−cosθ)/θ²)^{K+1}`, identical for both sides.
pub fn group_jacobian_determinant(xi: &TangentVector) -> f64 {
    jacobian_det_coeff(xi.phi().norm()).powi(xi.k() as i32 + 1)
}
