//! The identity suite: randomized checks of the closed-form relations the
//! rest of the crate relies on, each reporting its worst residual over a
//! batch of trials. The CLI's `verify` subcommand prints one line per check.
//!
//! Trials are counter-based (one RNG stream per check and trial index), so
//! the suite is deterministic for a fixed seed and may fan trials out over
//! threads without changing any residual.

use nalgebra::{DMatrix, DVector, Vector3};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::exec;
use crate::group::{GroupElement, TangentVector};
use crate::jacobian::{
    group_jacobian, group_jacobian_block_form, group_jacobian_determinant,
    group_jacobian_inverse, group_jacobian_polynomial_form, q_block_left, Side,
};
use crate::kinematics::jacobian_identity_residual;
use crate::metrics::{
    inner_product, trace_inner_product_adjoint, trace_inner_product_embedding,
    volume_element, volume_element_half_angle, WeightSpec,
};
use crate::oracle;
use crate::so3;

/// Result of one identity check: its worst residual over the trial batch and
/// the tolerance it must stay under.
#[derive(Clone, Debug)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub max_residual: f64,
    pub tolerance: f64,
}

impl IdentityCheck {
    pub fn passed(&self) -> bool {
        self.max_residual.is_finite() && self.max_residual <= self.tolerance
    }
}

fn trial_rng(seed: u64, check_index: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream((check_index << 32) | (trial + 1));
    rng
}

fn random_unit(rng: &mut ChaCha8Rng) -> Vector3<f64> {
    loop {
        let v = Vector3::new(
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
            rng.random_range(-1.0..1.0),
        );
        let norm = v.norm();
        if norm > 1e-3 {
            return v / norm;
        }
    }
}

fn random_tangent(rng: &mut ChaCha8Rng, k: usize, max_phi: f64) -> TangentVector {
    let phi = random_unit(rng) * rng.random_range(0.0..max_phi);
    let t = (0..k)
        .map(|_| {
            Vector3::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            )
        })
        .collect();
    TangentVector::new(phi, t)
}

fn random_element(rng: &mut ChaCha8Rng, k: usize, max_phi: f64) -> GroupElement {
    random_tangent(rng, k, max_phi).exp()
}

/// Runs every identity check with `trials` random draws each and returns the
/// reports in a fixed order.
pub fn run_identity_suite(k: usize, trials: usize, seed: u64) -> Vec<IdentityCheck> {
    type Check = (&'static str, f64, fn(&mut ChaCha8Rng, usize) -> f64);
    // name, tolerance, per-trial residual
    let checks: Vec<Check> = vec![
        ("so3-left-jacobian-rotation-similarity", 1e-10, |rng, _| {
            let phi = random_unit(rng) * rng.random_range(1e-6..std::f64::consts::PI);
            let r = so3::exp(&(random_unit(rng) * rng.random_range(0.0..3.0)));
            let lhs = so3::left_jacobian(&(r.matrix() * phi));
            let rhs = r.matrix() * so3::left_jacobian(&phi) * r.matrix().transpose();
            (lhs - rhs).amax()
        }),
        ("so3-jacobian-times-hat-reaches-rotation", 1e-10, |rng, _| {
            let phi = random_unit(rng) * rng.random_range(0.0..std::f64::consts::PI);
            let left = (so3::left_jacobian(&phi) * so3::hat(&phi)
                - (so3::exp(&phi).matrix() - nalgebra::Matrix3::identity()))
            .amax();
            let right = (so3::right_jacobian(&phi) * so3::hat(&phi)
                - (nalgebra::Matrix3::identity() - so3::exp(&-phi).matrix()))
            .amax();
            left.max(right)
        }),
        ("algebra-quartic-identity", 1e-9, |rng, k| {
            let xi = random_tangent(rng, k, 3.0);
            let theta2 = xi.phi().norm_squared();
            let s = xi.hat().matrix().clone();
            let s2 = &s * &s;
            let residual = (&s2 * &s2 + s2 * theta2).amax();
            residual / 1.0f64.max(theta2 * theta2)
        }),
        ("adjoint-quintic-identity", 1e-9, |rng, k| {
            let xi = random_tangent(rng, k, 3.0);
            let theta2 = xi.phi().norm_squared();
            let l = xi.small_adjoint().matrix().clone();
            let l2 = &l * &l;
            let l3 = &l2 * &l;
            let residual =
                (&l3 * &l2 + &l3 * (2.0 * theta2) + &l * (theta2 * theta2)).amax();
            residual / 1.0f64.max(theta2.powf(2.5))
        }),
        ("bracket-antisymmetry", 1e-13, |rng, k| {
            let xi1 = random_tangent(rng, k, 3.0);
            let xi2 = random_tangent(rng, k, 3.0);
            let sum = &xi1.bracket(&xi2).expect("same K")
                + &xi2.bracket(&xi1).expect("same K");
            sum.norm()
        }),
        ("bracket-closure-under-the-algebra-adjoint", 1e-12, |rng, k| {
            let xi1 = random_tangent(rng, k, 3.0);
            let xi2 = random_tangent(rng, k, 3.0);
            let l1 = xi1.small_adjoint().matrix().clone();
            let l2 = xi2.small_adjoint().matrix().clone();
            let comm = &l1 * &l2 - &l2 * &l1;
            let nested = xi1
                .bracket(&xi2)
                .expect("same K")
                .small_adjoint()
                .matrix()
                .clone();
            (comm - nested).amax()
        }),
        ("adjoint-exp-block-double-series", 1e-10, |rng, k| {
            if k == 0 {
                return 0.0;
            }
            let xi = random_tangent(rng, k, 3.0);
            let mut worst = 0.0f64;
            for slot in 0..k {
                let series = oracle::adjoint_exp_block_series(xi.phi(), xi.translation(slot), 30);
                let closed = so3::hat(&(so3::left_jacobian(xi.phi()) * xi.translation(slot)))
                    * so3::exp(xi.phi()).matrix();
                worst = worst.max((closed - series).amax());
            }
            worst
        }),
        ("adjoint-exp-commutes-with-group-exp", 1e-11, |rng, k| {
            let xi = random_tangent(rng, k, 3.0);
            (xi.exp_adjoint().matrix() - xi.exp().adjoint().matrix()).amax()
        }),
        ("adjoint-exp-closed-form-vs-series", 1e-11, |rng, k| {
            let xi = random_tangent(rng, k, 3.0);
            let series = oracle::expm_series(xi.small_adjoint().matrix());
            (xi.exp_adjoint().matrix() - series).amax()
        }),
        ("group-action-composition", 1e-12, |rng, k| {
            let g = random_element(rng, k, 2.0);
            let h = random_element(rng, k, 2.0);
            let gamma: Vec<f64> = (0..k).map(|_| rng.random_range(-1.0..1.0)).collect();
            let b = Vector3::new(
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
                rng.random_range(-2.0..2.0),
            );
            let nested = g
                .act(&h.act(&b, &gamma).expect("same K"), &gamma)
                .expect("same K");
            let flat = g
                .compose(&h)
                .expect("same K")
                .act(&b, &gamma)
                .expect("same K");
            (nested - flat).norm()
        }),
        ("left-jacobian-is-adjoint-exp-times-right", 1e-10, |rng, k| {
            let xi = random_tangent(rng, k, 3.0);
            let lhs = group_jacobian(&xi, Side::Left);
            let rhs = xi.exp_adjoint().matrix() * group_jacobian(&xi, Side::Right).matrix();
            (lhs.matrix() - rhs).amax()
        }),
        ("jacobian-left-right-reflection", 0.0, |rng, k| {
            let xi = random_tangent(rng, k, 3.0);
            (group_jacobian(&xi, Side::Right).matrix()
                - group_jacobian(&-&xi, Side::Left).matrix())
            .amax()
        }),
        ("q-block-side-relation", 1e-10, |rng, _| {
            let xi = random_tangent(rng, 1, 3.0);
            let phi = xi.phi();
            let t = xi.translation(0);
            let r = so3::exp(phi);
            let lhs = q_block_left(phi, t);
            let rhs = r.matrix() * q_block_left(&-phi, &-t)
                + so3::hat(&(so3::left_jacobian(phi) * t))
                    * r.matrix()
                    * so3::right_jacobian(phi);
            (lhs - rhs).amax()
        }),
        ("q-block-reflection", 0.0, |rng, _| {
            let xi = random_tangent(rng, 1, 3.0);
            let via_right = group_jacobian_block_form(&xi, Side::Right);
            let q_right = via_right.matrix().fixed_view::<3, 3>(3, 0).into_owned();
            (q_right - q_block_left(&-xi.phi(), &-xi.translation(0))).amax()
        }),
        ("adjoint-exp-is-identity-plus-ad-jacobian", 1e-10, |rng, k| {
            let xi = random_tangent(rng, k, 3.0);
            let n = xi.dim();
            let rhs = DMatrix::identity(n, n)
                + xi.small_adjoint().matrix() * group_jacobian(&xi, Side::Left).matrix();
            (xi.exp_adjoint().matrix() - rhs).amax()
        }),
        ("jacobian-polynomial-vs-block-assembly", 1e-10, |rng, k| {
            let xi = random_tangent(rng, k, 3.0);
            let mut worst = 0.0f64;
            for side in [Side::Left, Side::Right] {
                let poly = group_jacobian_polynomial_form(&xi, side);
                let block = group_jacobian_block_form(&xi, side);
                worst = worst.max((poly.matrix() - block.matrix()).amax());
            }
            worst
        }),
        ("jacobian-inverse-product", 1e-9, |rng, k| {
            let xi = random_tangent(rng, k, 3.0);
            let n = xi.dim();
            let mut worst = 0.0f64;
            for side in [Side::Left, Side::Right] {
                let j = group_jacobian(&xi, side);
                let j_inv = group_jacobian_inverse(&xi, side).expect("angle below 2pi");
                worst = worst.max((j.matrix() * j_inv.matrix() - DMatrix::identity(n, n)).amax());
            }
            worst
        }),
        ("jacobian-determinant-closed-form", 1e-8, |rng, k| {
            let xi = random_tangent(rng, k, 3.0);
            let closed = group_jacobian_determinant(&xi);
            let mut worst = 0.0f64;
            for side in [Side::Left, Side::Right] {
                let dense = group_jacobian(&xi, side).matrix().determinant().abs();
                worst = worst.max((closed - dense).abs() / dense.max(1e-30));
            }
            let power = so3::left_jacobian(xi.phi())
                .determinant()
                .powi(k as i32 + 1);
            worst.max((closed - power).abs() / closed.max(1e-30))
        }),
        ("jacobian-gram-positive-definite", 0.5, |rng, k| {
            let theta = rng.random_range(0.0..std::f64::consts::TAU - 0.1);
            let base = random_tangent(rng, k, 1.0);
            let xi = TangentVector::new(random_unit(rng) * theta, base.translations().to_vec());
            for side in [Side::Left, Side::Right] {
                let j = group_jacobian(&xi, side);
                let gram = j.matrix() * j.matrix().transpose();
                if nalgebra::Cholesky::new(gram).is_none() {
                    return 1.0;
                }
            }
            0.0
        }),
        ("trace-inner-product-embedding-weights", 1e-12, |rng, k| {
            let xi1 = random_tangent(rng, k, 3.0);
            let xi2 = random_tangent(rng, k, 3.0);
            let w = WeightSpec::default_for(k);
            let plain = inner_product(&xi1, &xi2).expect("same K");
            let traced = trace_inner_product_embedding(&xi1, &xi2, &w).expect("same K");
            (plain - traced).abs() / plain.abs().max(1.0)
        }),
        ("trace-inner-product-adjoint-weights", 1e-12, |rng, k| {
            let xi1 = random_tangent(rng, k, 3.0);
            let xi2 = random_tangent(rng, k, 3.0);
            let w = WeightSpec::default_for(k);
            let plain = inner_product(&xi1, &xi2).expect("same K");
            let traced = trace_inner_product_adjoint(&xi1, &xi2, &w).expect("same K");
            (plain - traced).abs() / plain.abs().max(1.0)
        }),
        ("volume-element-closed-forms", 1e-10, |rng, k| {
            let xi = random_tangent(rng, k, std::f64::consts::PI);
            let a = volume_element(&xi);
            let b = volume_element_half_angle(&xi);
            (a - b).abs() / a.abs().max(1e-30)
        }),
        ("velocity-conversion-block-formula", 1e-13, |rng, k| {
            let g = random_element(rng, k, 2.0);
            let omega = random_unit(rng) * rng.random_range(0.0..2.0);
            let nu: Vec<Vector3<f64>> = (0..k)
                .map(|_| {
                    Vector3::new(
                        rng.random_range(-2.0..2.0),
                        rng.random_range(-2.0..2.0),
                        rng.random_range(-2.0..2.0),
                    )
                })
                .collect();
            let stacked = {
                let mut v = DVector::zeros(3 * (k + 1));
                v.fixed_rows_mut::<3>(0).copy_from(&omega);
                for (i, n) in nu.iter().enumerate() {
                    v.fixed_rows_mut::<3>(3 * (i + 1)).copy_from(n);
                }
                v
            };
            let product = g.adjoint().apply_vector(&stacked);
            let r = g.rotation().matrix();
            let mut worst = (product.fixed_rows::<3>(0) - r * omega).norm();
            for (slot, rate) in nu.iter().enumerate() {
                let expected = so3::hat(g.translation(slot)) * r * omega + r * rate;
                worst =
                    worst.max((product.fixed_rows::<3>(3 * (slot + 1)) - expected).norm());
            }
            worst
        }),
        ("kinematics-jacobian-identity", 1e-4, |rng, k| {
            let base = &random_tangent(rng, k, 1.0) * 0.6;
            let rate = &random_tangent(rng, k, 1.0) * 0.6;
            jacobian_identity_residual(|t| &base + &(&rate * t), 0.3)
        }),
        ("noise-conjugation-moves-the-side", 1e-11, |rng, k| {
            let mean = random_element(rng, k, 2.0);
            let eps = random_tangent(rng, k, 2.0);
            let lhs = mean
                .compose(&eps.exp())
                .expect("same K")
                .compose(&mean.inverse())
                .expect("same K");
            let rhs = mean.adjoint().apply(&eps).exp();
            (lhs.embedding() - rhs.embedding()).amax()
        }),
    ];

    checks
        .into_iter()
        .enumerate()
        .map(|(index, (name, tolerance, body))| {
            let residuals = exec::map_indexed(trials, |trial| {
                let mut rng = trial_rng(seed, index as u64, trial as u64);
                body(&mut rng, k)
            });
            let max_residual = residuals.into_iter().fold(0.0f64, f64::max);
            IdentityCheck {
                name,
                max_residual,
                tolerance,
            }
        })
        .collect()
}
