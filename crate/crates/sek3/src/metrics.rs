//! Distances, weighted inner products, the infinitesimal volume element,
//! Monte Carlo integration over the group, and geodesic-style interpolation.

use nalgebra::{DMatrix, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exec;
use crate::group::{GroupElement, TangentVector};
use crate::jacobian::{group_jacobian_determinant, group_jacobian_inverse, Side};
use crate::so3;

/// Weights of the trace-form inner products. The defaults reproduce the
/// plain Euclidean inner product of the coordinates.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSpec {
    /// Rotation weight of the embedding form.
    pub c: f64,
    /// Per-slot translation weights of the embedding form.
    pub d: Vec<f64>,
    /// Rotation weight of the adjoint form.
    pub a: f64,
    /// Per-slot translation weights of the adjoint form.
    pub b: Vec<f64>,
}

impl WeightSpec {
    /// `c = 1/2, d_k = 1, a = 1/2, b_k = 0`.
    pub fn default_for(k: usize) -> Self {
        WeightSpec {
            c: 0.5,
            d: vec![1.0; k],
            a: 0.5,
            b: vec![0.0; k],
        }
    }
}

fn check_same_k(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// Norm of the quotient log: `‖log(g₁⁻¹g₂)‖` for the left-invariant metric,
/// `‖log(g₂g₁⁻¹)‖` for the right-invariant one.
pub fn distance(g1: &GroupElement, g2: &GroupElement, side: Side) -> Result<f64> {
    check_same_k(g1.k(), g2.k())?;
    let quotient = match side {
        Side::Left => g1.inverse().compose(g2)?,
        Side::Right => g2.compose(&g1.inverse())?,
    };
    Ok(quotient.log().norm())
}

/// The inner product of tangent coordinates, `ξ₁ᵀξ₂`.
pub fn inner_product(xi1: &TangentVector, xi2: &TangentVector) -> Result<f64> {
    check_same_k(xi1.k(), xi2.k())?;
    Ok(xi1.as_vector().dot(&xi2.as_vector()))
}

/// Trace form over the embeddings, `tr(𝓛(ξ₁)·W·𝓛(ξ₂)ᵀ)` with
/// `W = diag(cI₃, d₁, …, d_K)`. With the default weights this reproduces
/// `ξ₁ᵀξ₂`. The transpose on the second factor is the only reading
/// consistent with that normalization; the weight layout as typeset without
/// it loses every translation term.
pub fn trace_inner_product_embedding(
    xi1: &TangentVector,
    xi2: &TangentVector,
    weights: &WeightSpec,
) -> Result<f64> {
    check_same_k(xi1.k(), xi2.k())?;
    check_same_k(xi1.k(), weights.d.len())?;
    let k = xi1.k();
    let mut w = DMatrix::zeros(k + 3, k + 3);
    for i in 0..3 {
        w[(i, i)] = weights.c;
    }
    for (i, d) in weights.d.iter().enumerate() {
        w[(3 + i, 3 + i)] = *d;
    }
    let a = xi1.hat().matrix().clone();
    let b = xi2.hat().matrix().clone();
    Ok((a * w * b.transpose()).trace())
}

/// Trace form over the algebra adjoints, `tr(𝔏(ξ₁)·W·𝔏(ξ₂)ᵀ)` with
/// `W = diag(aI₃, b₁I₃, …, b_KI₃)`.
pub fn trace_inner_product_adjoint(
    xi1: &TangentVector,
    xi2: &TangentVector,
    weights: &WeightSpec,
) -> Result<f64> {
    check_same_k(xi1.k(), xi2.k())?;
    check_same_k(xi1.k(), weights.b.len())?;
    let k = xi1.k();
    let n = 3 * (k + 1);
    let mut w = DMatrix::zeros(n, n);
    for i in 0..3 {
        w[(i, i)] = weights.a;
    }
    for (slot, b) in weights.b.iter().enumerate() {
        for i in 0..3 {
            w[(3 * (slot + 1) + i, 3 * (slot + 1) + i)] = *b;
        }
    }
    let a = xi1.small_adjoint().matrix().clone();
    let b = xi2.small_adjoint().matrix().clone();
    Ok((a * w * b.transpose()).trace())
}

/// The infinitesimal volume element `|det 𝒥| = (2(1−cosθ)/θ²)^{K+1}`,
/// identical for the left and right Jacobians.
pub fn volume_element(xi: &TangentVector) -> f64 {
    group_jacobian_determinant(xi)
}

/// The same volume element through the half-angle form
/// `(sin(θ/2)/(θ/2))^{2(K+1)}`; kept as an independent evaluation route.
pub fn volume_element_half_angle(xi: &TangentVector) -> f64 {
    let half_sinc = so3::sin_over_theta(0.5 * xi.phi().norm());
    (half_sinc * half_sinc).powi(xi.k() as i32 + 1)
}

/// Monte Carlo estimate of `∫ f(T) dT` over the chart `{‖φ‖ < π} × boxes`,
/// weighting each draw by the volume element. The i-th draw is a pure
/// function of `(seed, i)`, so the estimate is bit-identical whether the
/// samples are evaluated in parallel or sequentially.
pub fn integrate_mc<F>(
    f: F,
    k: usize,
    boxes: &[(Vector3<f64>, Vector3<f64>)],
    samples: usize,
    seed: u64,
) -> Result<f64>
where
    F: Fn(&GroupElement) -> f64 + Sync + Send,
{
    check_same_k(k, boxes.len())?;
    assert!(samples > 0, "Monte Carlo estimate needs at least one sample");
    let mut volume = std::f64::consts::PI.powi(4) * 4.0 / 3.0;
    for (slot, (lo, hi)) in boxes.iter().enumerate() {
        for c in 0..3 {
            let width = hi[c] - lo[c];
            if width < 0.0 || !width.is_finite() {
                return Err(Error::InvalidBox { slot });
            }
            volume *= width;
        }
    }

    let total = exec::block_sum(samples, |i| {
        let xi = draw_chart_point(seed, i as u64, boxes);
        f(&xi.exp()) * group_jacobian_determinant(&xi)
    });
    Ok(volume * total / samples as f64)
}

/// Draws φ uniformly in the radius-π ball and each t_k uniformly in its box,
/// deterministically from `(seed, index)`.
fn draw_chart_point(seed: u64, index: u64, boxes: &[(Vector3<f64>, Vector3<f64>)]) -> TangentVector {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index.wrapping_add(1));
    let dir = loop {
        let candidate = Vector3::new(
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
            rng.sample::<f64, _>(StandardNormal),
        );
        let norm = candidate.norm();
        if norm > 1e-12 {
            break candidate / norm;
        }
    };
    let radius = std::f64::consts::PI * rng.random::<f64>().cbrt();
    let t = boxes
        .iter()
        .map(|(lo, hi)| {
            Vector3::new(
                lo.x + (hi.x - lo.x) * rng.random::<f64>(),
                lo.y + (hi.y - lo.y) * rng.random::<f64>(),
                lo.z + (hi.z - lo.z) * rng.random::<f64>(),
            )
        })
        .collect();
    TangentVector::new(dir * radius, t)
}

/// Interpolation along the exact group curve `exp(α·log(g₂g₁⁻¹))·g₁`.
pub fn interpolate(g1: &GroupElement, g2: &GroupElement, alpha: f64) -> Result<GroupElement> {
    check_same_k(g1.k(), g2.k())?;
    let xi21 = g2.compose(&g1.inverse())?.log();
    (&xi21 * alpha).exp().compose(g1)
}

/// Coordinate-space linearization of [`interpolate`]:
/// `exp(α·𝒥_l(ξ₁)⁻¹ξ₂₁ + ξ₁)`. Exposed for validation; its error against
/// the exact curve is quadratic in `‖ξ₂₁‖`.
pub fn interpolate_coordinates(
    g1: &GroupElement,
    g2: &GroupElement,
    alpha: f64,
) -> Result<GroupElement> {
    check_same_k(g1.k(), g2.k())?;
    let xi1 = g1.log();
    let xi21 = g2.compose(&g1.inverse())?.log();
    let jl_inv = group_jacobian_inverse(&xi1, Side::Left)?;
    let xi = &(&jl_inv.apply(&xi21) * alpha) + &xi1;
    Ok(xi.exp())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::{random_element, random_tangent};
    use rand::rngs::StdRng;
    use rand::SeedableRng;
    use std::f64::consts::PI;

    #[test]
    fn distance_of_equal_elements_is_zero() {
        let mut rng = StdRng::seed_from_u64(110);
        let g = random_element(&mut rng, 2, 2.0);
        // The quotient is the identity up to roundoff in the composition.
        assert!(distance(&g, &g, Side::Left).unwrap() <= 1e-14);
        assert!(distance(&g, &g, Side::Right).unwrap() <= 1e-14);
        assert!(matches!(
            distance(&g, &GroupElement::identity(1), Side::Left),
            Err(crate::error::Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn distance_respects_its_invariance() {
        let mut rng = StdRng::seed_from_u64(111);
        for _ in 0..200 {
            let g1 = random_element(&mut rng, 2, 1.2);
            let g2 = random_element(&mut rng, 2, 1.2);
            let h = random_element(&mut rng, 2, 1.2);

            let left = distance(&g1, &g2, Side::Left).unwrap();
            let shifted = distance(
                &h.compose(&g1).unwrap(),
                &h.compose(&g2).unwrap(),
                Side::Left,
            )
            .unwrap();
            assert!((left - shifted).abs() <= 1e-11);

            let right = distance(&g1, &g2, Side::Right).unwrap();
            let shifted = distance(
                &g1.compose(&h).unwrap(),
                &g2.compose(&h).unwrap(),
                Side::Right,
            )
            .unwrap();
            assert!((right - shifted).abs() <= 1e-11);

            // Swapping the arguments inverts the quotient, not its norm.
            assert!((left - distance(&g2, &g1, Side::Left).unwrap()).abs() <= 1e-12);
        }
    }

    #[test]
    fn inner_product_matches_trace_forms_under_default_weights() {
        let mut rng = StdRng::seed_from_u64(112);
        for k in 0..4 {
            let w = WeightSpec::default_for(k);
            for _ in 0..100 {
                let xi1 = random_tangent(&mut rng, k, 3.0);
                let xi2 = random_tangent(&mut rng, k, 3.0);
                let plain = inner_product(&xi1, &xi2).unwrap();
                let emb = trace_inner_product_embedding(&xi1, &xi2, &w).unwrap();
                let adj = trace_inner_product_adjoint(&xi1, &xi2, &w).unwrap();
                assert!((plain - emb).abs() <= 1e-12 * plain.abs().max(1.0));
                assert!((plain - adj).abs() <= 1e-12 * plain.abs().max(1.0));
            }
        }
        let e0 = TangentVector::basis(2, 0);
        assert_eq!(inner_product(&e0, &e0).unwrap(), 1.0);
        assert_eq!(
            inner_product(&e0, &TangentVector::zero(2)).unwrap(),
            0.0
        );
    }

    #[test]
    fn volume_element_routes_agree() {
        let mut rng = StdRng::seed_from_u64(113);
        assert_eq!(volume_element(&TangentVector::zero(1)), 1.0);

        // θ = π at K = 1: (sin(π/2)/(π/2))⁴ = (2/π)⁴.
        let xi = TangentVector::new(Vector3::new(PI, 0.0, 0.0), vec![Vector3::zeros()]);
        let expected = (2.0 / PI).powi(4);
        assert!((volume_element(&xi) - expected).abs() <= 1e-12);

        for k in 0..4 {
            for _ in 0..200 {
                let xi = random_tangent(&mut rng, k, PI);
                let a = volume_element(&xi);
                let b = volume_element_half_angle(&xi);
                assert!((a - b).abs() <= 1e-10 * a.abs().max(1e-30));
            }
        }
    }

    /// Radial quadrature of `4π ∫ r² f(r) w(r)^{K+1} dr` over [0, π] by
    /// Simpson's rule; the reference for chart integrals of radial functions.
    fn radial_reference(k: usize, f: impl Fn(f64) -> f64) -> f64 {
        let n = 100_000; // even
        let h = PI / n as f64;
        let integrand = |r: f64| {
            let w = if r < 1e-8 {
                1.0
            } else {
                2.0 * (1.0 - r.cos()) / (r * r)
            };
            4.0 * PI * r * r * f(r) * w.powi(k as i32 + 1)
        };
        let mut acc = integrand(0.0) + integrand(PI);
        for i in 1..n {
            let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += weight * integrand(i as f64 * h);
        }
        acc * h / 3.0
    }

    #[test]
    fn integrate_mc_of_zero_is_zero() {
        let est = integrate_mc(|_| 0.0, 1, &[(Vector3::zeros(), Vector3::new(1.0, 1.0, 1.0))], 100, 7)
            .unwrap();
        assert_eq!(est, 0.0);
    }

    #[test]
    fn integrate_mc_recovers_chart_volume_at_k0() {
        let est = integrate_mc(|_| 1.0, 0, &[], 1_000_000, 42).unwrap();
        let reference = radial_reference(0, |_| 1.0);
        // The reference is the closed form 8π² up to quadrature error.
        assert!((reference - 8.0 * PI * PI).abs() <= 1e-6);
        assert!(
            (est - reference).abs() <= 0.01 * reference,
            "estimate {est} deviates from {reference}"
        );
    }

    #[test]
    fn integrate_mc_matches_radial_quadrature_for_angle_functions() {
        let f = |g: &GroupElement| {
            let theta = g.log().phi().norm();
            theta * theta
        };
        let est = integrate_mc(f, 0, &[], 1_000_000, 43).unwrap();
        let reference = radial_reference(0, |r| r * r);
        assert!((est - reference).abs() <= 0.02 * reference);
    }

    #[test]
    fn integrate_mc_handles_translation_boxes() {
        // f ≡ 1 over a box factors into chart volume times box volume.
        let boxes = [(Vector3::new(-1.0, 0.0, 2.0), Vector3::new(1.0, 0.5, 3.0))];
        let est = integrate_mc(|_| 1.0, 1, &boxes, 400_000, 44).unwrap();
        let reference = radial_reference(1, |_| 1.0) * 2.0 * 0.5 * 1.0;
        assert!((est - reference).abs() <= 0.02 * reference);
    }

    #[test]
    fn integrate_mc_is_deterministic_per_seed() {
        let boxes = [(Vector3::new(-1.0, -1.0, -1.0), Vector3::new(1.0, 1.0, 1.0))];
        let f = |g: &GroupElement| g.translation(0).norm();
        let a = integrate_mc(f, 1, &boxes, 50_000, 7).unwrap();
        let b = integrate_mc(f, 1, &boxes, 50_000, 7).unwrap();
        assert_eq!(a, b);
        let c = integrate_mc(f, 1, &boxes, 50_000, 8).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn integrate_mc_rejects_bad_boxes() {
        let boxes = [(Vector3::new(1.0, 0.0, 0.0), Vector3::new(-1.0, 1.0, 1.0))];
        assert!(matches!(
            integrate_mc(|_| 1.0, 1, &boxes, 10, 0),
            Err(Error::InvalidBox { slot: 0 })
        ));
        assert!(matches!(
            integrate_mc(|_| 1.0, 2, &boxes, 10, 0),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn interpolation_hits_its_endpoints() {
        let mut rng = StdRng::seed_from_u64(114);
        for _ in 0..50 {
            let g1 = random_element(&mut rng, 2, 1.2);
            let g2 = random_element(&mut rng, 2, 1.2);
            let at0 = interpolate(&g1, &g2, 0.0).unwrap();
            let at1 = interpolate(&g1, &g2, 1.0).unwrap();
            assert!((at0.embedding() - g1.embedding()).norm() <= 1e-12);
            assert!((at1.embedding() - g2.embedding()).norm() <= 1e-12);
        }
    }

    #[test]
    fn interpolation_from_identity_is_a_power_curve() {
        let mut rng = StdRng::seed_from_u64(115);
        for _ in 0..50 {
            let g2 = random_element(&mut rng, 2, 1.5);
            let alpha = 0.37;
            let direct = interpolate(&GroupElement::identity(2), &g2, alpha).unwrap();
            let power = (&g2.log() * alpha).exp();
            assert!((direct.embedding() - power.embedding()).norm() <= 1e-12);
        }
    }

    #[test]
    fn coordinate_interpolation_error_is_quadratic() {
        let mut rng = StdRng::seed_from_u64(116);
        let mut ratios = Vec::new();
        for _ in 0..100 {
            let g1 = random_element(&mut rng, 2, 1.0);
            let dir = random_tangent(&mut rng, 2, 1.0);
            let alpha = 0.4;
            let err = |scale: f64| {
                let g2 = (&dir * scale).exp().compose(&g1).unwrap();
                let exact = interpolate(&g1, &g2, alpha).unwrap();
                let approx = interpolate_coordinates(&g1, &g2, alpha).unwrap();
                (exact.embedding() - approx.embedding()).norm()
            };
            ratios.push(err(0.02) / err(0.01));
        }
        ratios.sort_by(f64::total_cmp);
        let median = ratios[ratios.len() / 2];
        assert!(
            (3.0..=5.0).contains(&median),
            "interpolation error is not quadratic (ratio {median})"
        );
    }
}
