//! Rotation-group primitives: skew maps, the Rodrigues exponential, the
//! logarithm, and the left/right Jacobians of SO(3) with their inverses.
//!
//! Small rotation angles are handled by evaluating each trigonometric
//! coefficient through a short Taylor polynomial below [`SMALL_ANGLE`]; this
//! removes the 0/0 limits while keeping the coefficient error below 1e-12.
//! The logarithm switches to an axis-from-symmetric-part extraction within
//! [`NEAR_PI`] of θ = π, where the skew-part formula degenerates.

use nalgebra::{Matrix3, Vector3};

use crate::error::{Error, Result};

/// Below this angle every trigonometric coefficient is evaluated by its
/// Taylor polynomial.
pub const SMALL_ANGLE: f64 = 1e-4;

/// Margin around θ = π inside which the logarithm extracts the axis from the
/// symmetric part of the rotation.
pub const NEAR_PI: f64 = 1e-6;

/// Margin around θ = 2π inside which the Jacobian inverses are treated as
/// singular.
pub const SINGULARITY_MARGIN: f64 = 1e-6;

/// Orthogonality defect above which a matrix is rejected as a rotation.
pub const ORTHOGONALITY_TOL: f64 = 1e-9;

/// Frobenius tolerance for accepting a matrix as skew-symmetric.
pub const SKEW_TOL: f64 = 1e-9;

/// Minimal coordinates of a rotation: the angle is the norm, the axis the
/// direction. Operations returning one keep the angle in [0, π].
pub type RotationVector = Vector3<f64>;

/// A member of SO(3): orthogonal with determinant +1.
///
/// The wrapped matrix is only ever produced by constructors that keep the
/// orthogonality defect below [`ORTHOGONALITY_TOL`]. Composition re-orthonormalizes
/// (nearest orthogonal matrix, polar-style) only when the defect actually
/// exceeds that bound, so results stay bit-reproducible in the normal case.
#[derive(Clone, Debug, PartialEq)]
pub struct Rotation {
    m: Matrix3<f64>,
}

impl Rotation {
    pub fn identity() -> Self {
        Rotation {
            m: Matrix3::identity(),
        }
    }

    /// Wraps a matrix after checking the rotation invariants.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self> {
        let defect = orthogonality_defect(&m);
        let det = m.determinant();
        if defect > ORTHOGONALITY_TOL || (det - 1.0).abs() > ORTHOGONALITY_TOL {
            return Err(Error::InvalidRotation {
                defect: defect.max((det - 1.0).abs()),
            });
        }
        Ok(Rotation { m })
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.m
    }

    /// The inverse rotation, i.e. the transpose.
    pub fn inverse(&self) -> Rotation {
        Rotation {
            m: self.m.transpose(),
        }
    }

    /// Group composition `self * other`.
    pub fn compose(&self, other: &Rotation) -> Rotation {
        Rotation::from_product(self.m * other.m)
    }

    /// Rotates a vector.
    pub fn apply(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.m * v
    }

    /// Rotates a vector by the inverse rotation.
    pub fn apply_inverse(&self, v: &Vector3<f64>) -> Vector3<f64> {
        self.m.tr_mul(v)
    }

    pub fn orthogonality_defect(&self) -> f64 {
        orthogonality_defect(&self.m)
    }

    /// Accepts a product of valid rotations, re-orthonormalizing only when
    /// drift took the defect past the invariant bound.
    pub(crate) fn from_product(m: Matrix3<f64>) -> Rotation {
        if orthogonality_defect(&m) > ORTHOGONALITY_TOL {
            Rotation {
                m: nearest_orthogonal(&m),
            }
        } else {
            Rotation { m }
        }
    }
}

fn orthogonality_defect(m: &Matrix3<f64>) -> f64 {
    (m.transpose() * m - Matrix3::identity()).norm()
}

/// Nearest orthogonal matrix with determinant +1, via the SVD polar factor.
fn nearest_orthogonal(m: &Matrix3<f64>) -> Matrix3<f64> {
    let svd = m.svd(true, true);
    let u = svd.u.expect("svd requested u");
    let vt = svd.v_t.expect("svd requested v_t");
    let mut r = u * vt;
    if r.determinant() < 0.0 {
        // Flip the weakest direction to land on the proper rotations.
        let mut u = u;
        u.column_mut(2).neg_mut();
        r = u * vt;
    }
    r
}

/// Skew-symmetric matrix of `v`, so that `hat(v) * w = v × w`.
#[rustfmt::skip]
pub fn hat(v: &Vector3<f64>) -> Matrix3<f64> {
    Matrix3::new(
        0.0,  -v.z,  v.y,
        v.z,   0.0, -v.x,
       -v.y,   v.x,  0.0,
    )
}

/// Inverse of [`hat`]; rejects matrices that are not skew-symmetric.
pub fn vee(m: &Matrix3<f64>) -> Result<Vector3<f64>> {
    let defect = (m + m.transpose()).norm();
    if defect > SKEW_TOL {
        return Err(Error::NotSkew { defect });
    }
    Ok(Vector3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)]))
}

/// Rodrigues exponential: `I + sinθ/θ φ∧ + (1−cosθ)/θ² φ∧²`.
pub fn exp(phi: &RotationVector) -> Rotation {
    let theta = phi.norm();
    let k = hat(phi);
    let m = Matrix3::identity() + sin_over_theta(theta) * k + cos_coeff(theta) * (k * k);
    Rotation { m }
}

/// Principal logarithm; the returned angle lies in [0, π].
pub fn log(r: &Rotation) -> RotationVector {
    let m = r.matrix();
    let cos_theta = ((m.trace() - 1.0) * 0.5).clamp(-1.0, 1.0);
    // Skew part of R equals sinθ·φ∧/θ, so w = sinθ·u.
    let w = Vector3::new(
        m[(2, 1)] - m[(1, 2)],
        m[(0, 2)] - m[(2, 0)],
        m[(1, 0)] - m[(0, 1)],
    ) * 0.5;
    let sin_theta = w.norm();
    let theta = sin_theta.atan2(cos_theta);

    if theta < SMALL_ANGLE {
        // θ/sinθ = 1 + θ²/6 + 7θ⁴/360
        let t2 = theta * theta;
        w * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0)
    } else if theta > std::f64::consts::PI - NEAR_PI {
        log_near_pi(m, cos_theta, theta, &w)
    } else {
        w * (theta / sin_theta)
    }
}

/// Axis extraction near θ = π, where the skew part vanishes. Reads the axis
/// off the dominant diagonal of the symmetric part and fixes its sign with
/// the largest remaining skew component.
fn log_near_pi(
    m: &Matrix3<f64>,
    cos_theta: f64,
    theta: f64,
    skew: &Vector3<f64>,
) -> RotationVector {
    // (sym(R) − cosθ·I)/(1 − cosθ) = uuᵀ
    let sym = (m + m.transpose()) * 0.5;
    let outer = (sym - Matrix3::identity() * cos_theta) / (1.0 - cos_theta);

    let mut pivot = 0;
    for i in 1..3 {
        if outer[(i, i)] > outer[(pivot, pivot)] {
            pivot = i;
        }
    }
    let mut u = Vector3::zeros();
    u[pivot] = outer[(pivot, pivot)].max(0.0).sqrt();
    for j in 0..3 {
        if j != pivot {
            u[j] = outer[(j, pivot)] / (2.0 * u[pivot]) + outer[(pivot, j)] / (2.0 * u[pivot]);
        }
    }
    u.normalize_mut();

    let strongest = skew.iamax();
    if skew[strongest].abs() > 1e-12 {
        if skew[strongest] * u[strongest] < 0.0 {
            u = -u;
        }
    } else {
        // θ = π exactly: the axis sign is a convention; make the dominant
        // component positive so the result is deterministic.
        let dominant = u.iamax();
        if u[dominant] < 0.0 {
            u = -u;
        }
    }
    u * theta
}

/// Left Jacobian of SO(3): `I + (1−cosθ)/θ² φ∧ + (θ−sinθ)/θ³ φ∧²`.
pub fn left_jacobian(phi: &RotationVector) -> Matrix3<f64> {
    let theta = phi.norm();
    let k = hat(phi);
    Matrix3::identity() + cos_coeff(theta) * k + sin_coeff(theta) * (k * k)
}

/// Right Jacobian of SO(3); equals the left Jacobian of `-φ`.
pub fn right_jacobian(phi: &RotationVector) -> Matrix3<f64> {
    left_jacobian(&-phi)
}

/// Inverse left Jacobian: `I − φ∧/2 + (1/θ² − cot(θ/2)/(2θ)) φ∧²`.
///
/// Singular where θ reaches 2π.
pub fn left_jacobian_inv(phi: &RotationVector) -> Result<Matrix3<f64>> {
    let theta = phi.norm();
    if theta >= std::f64::consts::TAU - SINGULARITY_MARGIN {
        return Err(Error::SingularJacobian { theta });
    }
    let k = hat(phi);
    Ok(Matrix3::identity() - 0.5 * k + left_jacobian_inv_coeff(theta) * (k * k))
}

/// Inverse right Jacobian; equals the inverse left Jacobian of `-φ`.
pub fn right_jacobian_inv(phi: &RotationVector) -> Result<Matrix3<f64>> {
    left_jacobian_inv(&-phi)
}

// ---------------------------------------------------------------------------
// Trigonometric coefficients with small-angle Taylor fallbacks.
//
// The multipliers these attach to (φ∧, φ∧²) vanish quadratically with θ, so
// the absolute error of the assembled matrices stays near machine precision
// even where an individual coefficient loses relative accuracy.
// ---------------------------------------------------------------------------

/// sinθ/θ
pub(crate) fn sin_over_theta(theta: f64) -> f64 {
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        1.0 - t2 / 6.0 + t2 * t2 / 120.0
    } else {
        theta.sin() / theta
    }
}

/// (1−cosθ)/θ², computed as 2sin²(θ/2)/θ² to stay stable near θ = 2π.
pub(crate) fn cos_coeff(theta: f64) -> f64 {
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        0.5 - t2 / 24.0 + t2 * t2 / 720.0
    } else {
        let s = (0.5 * theta).sin();
        2.0 * s * s / (theta * theta)
    }
}

/// (θ−sinθ)/θ³
pub(crate) fn sin_coeff(theta: f64) -> f64 {
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0
    } else {
        (theta - theta.sin()) / (theta * theta * theta)
    }
}

/// 1/θ² − cot(θ/2)/(2θ), the φ∧² coefficient of the inverse Jacobians.
pub(crate) fn left_jacobian_inv_coeff(theta: f64) -> f64 {
    if theta < SMALL_ANGLE {
        let t2 = theta * theta;
        1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0
    } else {
        let half = 0.5 * theta;
        1.0 / (theta * theta) - half.cos() / (2.0 * theta * half.sin())
    }
}
