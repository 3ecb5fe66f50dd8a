//! Coefficient families of the quartic and quintic closed forms.
//!
//! Each coefficient has a removable singularity at θ = 0 and loses relative
//! accuracy to cancellation well before that, because the numerators are
//! high-order differences of trigonometric terms. Below
//! [`EXTENDED_SMALL_ANGLE`] every coefficient switches to a Taylor polynomial
//! whose truncation error at the guard is below 1e-15, which keeps the
//! assembled matrices accurate to ~1e-13 absolute across the switch.

/// Guard below which the extended coefficient families use Taylor polynomials.
/// This is deliberately larger than the SO(3) guard: the θ⁻²..θ⁻⁵ numerators
/// here cancel much more violently.
pub(crate) const EXTENDED_SMALL_ANGLE: f64 = 0.05;

/// Coefficients of `I + a₁𝔗 + a₂𝔗² + a₃𝔗³ + a₄𝔗⁴` for the adjoint exponential.
pub(crate) fn adjoint_exp_coeffs(theta: f64) -> [f64; 4] {
    if theta < EXTENDED_SMALL_ANGLE {
        let t2 = theta * theta;
        let t4 = t2 * t2;
        let t6 = t4 * t2;
        [
            1.0 - t4 / 120.0 + t6 / 2520.0,
            0.5 - t4 / 720.0 + t6 / 20160.0,
            1.0 / 6.0 - t2 / 60.0 + t4 / 1680.0 - t6 / 90720.0,
            1.0 / 24.0 - t2 / 360.0 + t4 / 13440.0 - t6 / 907200.0,
        ]
    } else {
        let (s, c) = theta.sin_cos();
        let t2 = theta * theta;
        [
            (3.0 * s - theta * c) / (2.0 * theta),
            (4.0 - theta * s - 4.0 * c) / (2.0 * t2),
            (s - theta * c) / (2.0 * t2 * theta),
            (2.0 - theta * s - 2.0 * c) / (2.0 * t2 * t2),
        ]
    }
}

/// Coefficients of `I + b₁𝔗 + b₂𝔗² + b₃𝔗³ + b₄𝔗⁴` for the left group Jacobian.
pub(crate) fn jacobian_poly_coeffs(theta: f64) -> [f64; 4] {
    if theta < EXTENDED_SMALL_ANGLE {
        let t2 = theta * theta;
        let t4 = t2 * t2;
        let t6 = t4 * t2;
        [
            0.5 - t4 / 720.0 + t6 / 20160.0,
            1.0 / 6.0 - t4 / 5040.0 + t6 / 181440.0,
            1.0 / 24.0 - t2 / 360.0 + t4 / 13440.0 - t6 / 907200.0,
            1.0 / 120.0 - t2 / 2520.0 + t4 / 120960.0 - t6 / 9979200.0,
        ]
    } else {
        let (s, c) = theta.sin_cos();
        let t2 = theta * theta;
        let t3 = t2 * theta;
        [
            (4.0 - theta * s - 4.0 * c) / (2.0 * t2),
            (4.0 * theta - 5.0 * s + theta * c) / (2.0 * t3),
            (2.0 - theta * s - 2.0 * c) / (2.0 * t2 * t2),
            (2.0 * theta - 3.0 * s + theta * c) / (2.0 * t2 * t3),
        ]
    }
}

/// Coefficients `(c₁, c₂, c₃)` of the closed-form Q block.
pub(crate) fn q_block_coeffs(theta: f64) -> [f64; 3] {
    if theta < EXTENDED_SMALL_ANGLE {
        let t2 = theta * theta;
        let t4 = t2 * t2;
        let t6 = t4 * t2;
        [
            1.0 / 6.0 - t2 / 120.0 + t4 / 5040.0 - t6 / 362880.0,
            1.0 / 24.0 - t2 / 720.0 + t4 / 40320.0 - t6 / 3628800.0,
            1.0 / 120.0 - t2 / 2520.0 + t4 / 120960.0 - t6 / 9979200.0,
        ]
    } else {
        let (s, c) = theta.sin_cos();
        let t2 = theta * theta;
        let t3 = t2 * theta;
        [
            (theta - s) / t3,
            (t2 + 2.0 * c - 2.0) / (2.0 * t2 * t2),
            (2.0 * theta - 3.0 * s + theta * c) / (2.0 * t2 * t3),
        ]
    }
}

/// `2(1−cosθ)/θ²`, the SO(3) Jacobian determinant.
pub(crate) fn jacobian_det_coeff(theta: f64) -> f64 {
    if theta < EXTENDED_SMALL_ANGLE {
        let t2 = theta * theta;
        let t4 = t2 * t2;
        1.0 - t2 / 12.0 + t4 / 360.0 - t4 * t2 / 20160.0
    } else {
        2.0 * (1.0 - theta.cos()) / (theta * theta)
    }
}
