//! Derivatives of group actions with respect to tangent coordinates, the
//! homogeneous point block, and a Gauss-Newton solver for weighted
//! point-registration costs.
//!
//! Point Jacobians come in two flavors: with respect to a left perturbation
//! `g ← exp(δ)·g` (cheap, no group Jacobian) and with respect to the algebra
//! parameter of `g = exp(ξ)` (the left-perturbation Jacobian chained with
//! `𝒥_l(ξ)`). The solver uses the left-perturbation flavor exclusively.

use nalgebra::{DMatrix, DVector, Vector3};

use crate::error::{Error, Result};
use crate::group::{GroupElement, TangentVector};
use crate::jacobian::{group_jacobian, Side};
use crate::so3;

/// Condition-number bound above which normal equations are rejected.
pub const CONDITION_LIMIT: f64 = 1e12;

/// Step halvings attempted before a Gauss-Newton iteration gives up.
pub const MAX_HALVINGS: usize = 20;

/// K homogeneous points stacked as the (K+3)×K block `[p₁ … p_K; I_K]`.
#[derive(Clone, Debug, PartialEq)]
pub struct PointBlock {
    points: Vec<Vector3<f64>>,
}

impl PointBlock {
    pub fn new(points: Vec<Vector3<f64>>) -> Self {
        PointBlock { points }
    }

    pub fn k(&self) -> usize {
        self.points.len()
    }

    pub fn points(&self) -> &[Vector3<f64>] {
        &self.points
    }

    pub fn point(&self, slot: usize) -> &Vector3<f64> {
        &self.points[slot]
    }

    /// The dense homogeneous block; its bottom K×K block is exactly I_K.
    pub fn block(&self) -> DMatrix<f64> {
        let k = self.k();
        let mut m = DMatrix::zeros(k + 3, k);
        for (j, p) in self.points.iter().enumerate() {
            m.fixed_view_mut::<3, 1>(0, j).copy_from(p);
            m[(3 + j, j)] = 1.0;
        }
        m
    }
}

fn check_same_k(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

fn vector_as_tangent(x: &DVector<f64>) -> Result<TangentVector> {
    TangentVector::from_vector(x)
}

/// Derivative of `𝒯x` with respect to a left perturbation of `𝒯 = Ad_g`:
/// `−𝔏(𝒯x)`, reading the product vector as tangent coordinates.
pub fn d_adjoint_action_left_perturbation(
    g: &GroupElement,
    x: &DVector<f64>,
) -> Result<DMatrix<f64>> {
    check_same_k(g.dim(), x.len())?;
    let moved = vector_as_tangent(&g.adjoint().apply_vector(x))?;
    Ok(-moved.small_adjoint().matrix())
}

/// Derivative of `exp_adjoint(ξ)·x` with respect to the algebra parameter:
/// `−𝔏(𝒯x)·𝒥_l(ξ)`.
pub fn d_adjoint_action_algebra(xi: &TangentVector, x: &DVector<f64>) -> Result<DMatrix<f64>> {
    check_same_k(xi.dim(), x.len())?;
    let moved = vector_as_tangent(&xi.exp_adjoint().apply_vector(x))?;
    Ok(-moved.small_adjoint().matrix() * group_jacobian(xi, Side::Left).matrix())
}

/// Per-point Jacobians of the transformed point block with respect to a left
/// perturbation: `E_m = [−(Rp_m + t_m)∧ | 0 … I₃ at slot m … 0]`, each of
/// shape 3×3(K+1).
pub fn d_point_action_left_perturbation(
    g: &GroupElement,
    points: &PointBlock,
) -> Result<Vec<DMatrix<f64>>> {
    check_same_k(g.k(), points.k())?;
    let k = g.k();
    Ok((0..k)
        .map(|m| {
            let transformed = g.rotation().apply(points.point(m)) + g.translation(m);
            point_jacobian_row(k, m, &transformed)
        })
        .collect())
}

/// Per-point Jacobians with respect to the algebra parameter of `g = exp(ξ)`:
/// the left-perturbation Jacobians chained with `𝒥_l(ξ)`.
pub fn d_point_action_algebra(
    xi: &TangentVector,
    points: &PointBlock,
) -> Result<Vec<DMatrix<f64>>> {
    check_same_k(xi.k(), points.k())?;
    let jl = group_jacobian(xi, Side::Left);
    Ok(d_point_action_left_perturbation(&xi.exp(), points)?
        .into_iter()
        .map(|e| e * jl.matrix())
        .collect())
}

/// Stacks per-point Jacobians into the 3K×3(K+1) concatenation.
pub fn stacked_point_jacobian(parts: &[DMatrix<f64>]) -> DMatrix<f64> {
    let k = parts.len();
    let cols = parts.first().map_or(0, |e| e.ncols());
    let mut out = DMatrix::zeros(3 * k, cols);
    for (m, e) in parts.iter().enumerate() {
        out.view_mut((3 * m, 0), (3, cols)).copy_from(e);
    }
    out
}

fn point_jacobian_row(k: usize, slot: usize, transformed: &Vector3<f64>) -> DMatrix<f64> {
    let mut e = DMatrix::zeros(3, 3 * (k + 1));
    e.fixed_view_mut::<3, 3>(0, 0)
        .copy_from(&(-so3::hat(transformed)));
    e.fixed_view_mut::<3, 3>(0, 3 * (slot + 1))
        .copy_from(&nalgebra::Matrix3::identity());
    e
}

/// One point-to-target match: the model point is carried per observation so
/// that several distinct points can constrain the same translation slot,
/// which is what makes the normal equations full rank.
#[derive(Clone, Debug, PartialEq)]
pub struct Observation {
    /// Translation slot the point is expressed against.
    pub slot: usize,
    /// Model point before transformation.
    pub point: Vector3<f64>,
    /// Observed location of the transformed point.
    pub target: Vector3<f64>,
    /// Nonnegative residual weight.
    pub weight: f64,
}

/// Outcome of [`gauss_newton_fit`].
#[derive(Clone, Debug)]
pub struct GaussNewtonReport {
    pub estimate: GroupElement,
    pub final_cost: f64,
    /// Accepted update steps.
    pub iterations: usize,
}

fn registration_cost(g: &GroupElement, observations: &[Observation]) -> f64 {
    0.5 * observations
        .iter()
        .map(|obs| {
            let transformed = g.rotation().apply(&obs.point) + g.translation(obs.slot);
            obs.weight * (transformed - obs.target).norm_squared()
        })
        .sum::<f64>()
}

/// Minimizes `½ Σ w‖R·p + t_slot − y‖²` by Gauss-Newton over left
/// perturbations: each accepted step applies `g ← exp(δ)·g`, with `δ` from
/// the normal equations of the per-observation Jacobians and plain step
/// halving as the safeguard.
pub fn gauss_newton_fit(
    observations: &[Observation],
    k: usize,
    init: &GroupElement,
    max_iters: usize,
    tol: f64,
) -> Result<GaussNewtonReport> {
    check_same_k(k, init.k())?;
    for obs in observations {
        if obs.slot >= k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: obs.slot + 1,
            });
        }
    }

    let n = 3 * (k + 1);
    let mut estimate = init.clone();
    let mut cost = registration_cost(&estimate, observations);
    let mut iterations = 0;

    for _ in 0..max_iters {
        let mut normal = DMatrix::<f64>::zeros(n, n);
        let mut rhs = DVector::<f64>::zeros(n);
        for obs in observations {
            let transformed =
                estimate.rotation().apply(&obs.point) + estimate.translation(obs.slot);
            let residual = transformed - obs.target;
            let e = point_jacobian_row(k, obs.slot, &transformed);
            normal += obs.weight * e.transpose() * &e;
            rhs -= obs.weight * e.transpose() * residual;
        }

        let svd = normal.clone().svd(true, true);
        let s_max = svd.singular_values.max();
        let s_min = svd.singular_values.min();
        let condition = s_max / s_min;
        if !condition.is_finite() || condition > CONDITION_LIMIT {
            return Err(Error::RankDeficient { condition });
        }
        let delta = svd.solve(&rhs, 0.0).expect("svd was computed with u and v_t");
        if delta.norm() < tol {
            break;
        }
        let delta = TangentVector::from_vector(&delta)?;

        let mut accepted = false;
        let mut scale = 1.0;
        let mut best_candidate_cost = f64::INFINITY;
        for _ in 0..=MAX_HALVINGS {
            let candidate = (&delta * scale).exp().compose(&estimate)?;
            let candidate_cost = registration_cost(&candidate, observations);
            best_candidate_cost = best_candidate_cost.min(candidate_cost);
            if candidate_cost < cost {
                estimate = candidate;
                cost = candidate_cost;
                iterations += 1;
                accepted = true;
                break;
            }
            scale *= 0.5;
        }
        if !accepted {
            // A stall within floating-point resolution of the current cost is
            // convergence, not a descent failure.
            if best_candidate_cost <= cost * (1.0 + 1e-12) {
                break;
            }
            return Err(Error::NonDecreasingCost {
                halvings: MAX_HALVINGS,
            });
        }
    }

    Ok(GaussNewtonReport {
        estimate,
        final_cost: cost,
        iterations,
    })
}
