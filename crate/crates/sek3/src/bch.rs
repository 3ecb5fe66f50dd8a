//! Baker-Campbell-Hausdorff composition in coordinates, its Jacobian-based
//! first-order approximations, and the left/right perturbation identities.

use crate::error::{Error, Result};
use crate::group::{GroupElement, TangentVector};
use crate::jacobian::{group_jacobian, group_jacobian_inverse, Side};

/// Which argument of the first-order BCH approximation is treated as small.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SmallArg {
    First,
    Second,
}

fn check_same_k(a: &TangentVector, b: &TangentVector) -> Result<()> {
    if a.k() != b.k() {
        return Err(Error::DimensionMismatch {
            expected: a.k(),
            got: b.k(),
        });
    }
    Ok(())
}

/// Truncated BCH series
/// `ξ₁ + ξ₂ + ½[ξ₁,ξ₂] + 1/12([ξ₁,[ξ₁,ξ₂]] + [ξ₂,[ξ₂,ξ₁]]) − 1/24[ξ₂,[ξ₁,[ξ₁,ξ₂]]]`
/// cut at the requested order (1 to 4).
pub fn bch(xi1: &TangentVector, xi2: &TangentVector, order: usize) -> Result<TangentVector> {
    check_same_k(xi1, xi2)?;
    if !(1..=4).contains(&order) {
        return Err(Error::UnsupportedOrder { order });
    }
    let mut out = xi1 + xi2;
    if order >= 2 {
        let b12 = xi1.bracket(xi2)?;
        out = &out + &(&b12 * 0.5);
        if order >= 3 {
            let b112 = xi1.bracket(&b12)?;
            let b221 = xi2.bracket(&xi2.bracket(xi1)?)?;
            out = &out + &(&(&b112 + &b221) * (1.0 / 12.0));
            if order >= 4 {
                let b2112 = xi2.bracket(&b112)?;
                out = &out - &(&b2112 * (1.0 / 24.0));
            }
        }
    }
    Ok(out)
}

/// First-order BCH through the inverse group Jacobians:
/// `𝒥_l(ξ₂)⁻¹ξ₁ + ξ₂` when the first argument is small,
/// `ξ₁ + 𝒥_r(ξ₁)⁻¹ξ₂` when the second is.
pub fn bch_first_order(
    xi1: &TangentVector,
    xi2: &TangentVector,
    small: SmallArg,
) -> Result<TangentVector> {
    check_same_k(xi1, xi2)?;
    Ok(match small {
        SmallArg::First => {
            let jl_inv = group_jacobian_inverse(xi2, Side::Left)?;
            &jl_inv.apply(xi1) + xi2
        }
        SmallArg::Second => {
            let jr_inv = group_jacobian_inverse(xi1, Side::Right)?;
            xi1 + &jr_inv.apply(xi2)
        }
    })
}

/// Factored form of a perturbed exponential:
/// left → `exp(𝒥_l(ξ)·δ)·exp(ξ)`, right → `exp(ξ)·exp(𝒥_r(ξ)·δ)`.
/// Approximates `exp(ξ + δ)` to second order in `δ`.
pub fn perturb(xi: &TangentVector, delta: &TangentVector, side: Side) -> Result<GroupElement> {
    check_same_k(xi, delta)?;
    let step = group_jacobian(xi, side).apply(delta).exp();
    match side {
        Side::Left => step.compose(&xi.exp()),
        Side::Right => xi.exp().compose(&step),
    }
}

/// First-order coordinate difference of `exp(ξ+δ)` relative to `exp(ξ)`:
/// `𝒥_r(ξ)·δ` for the right quotient `log(T⁻¹T′)`, `𝒥_l(ξ)·δ` for the left
/// quotient `log(T′T⁻¹)`.
pub fn group_difference(
    xi: &TangentVector,
    delta: &TangentVector,
    side: Side,
) -> Result<TangentVector> {
    check_same_k(xi, delta)?;
    Ok(group_jacobian(xi, side).apply(delta))
}
