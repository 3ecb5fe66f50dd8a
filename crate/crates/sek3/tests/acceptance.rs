//! Acceptance suite: one test per criterion, each printing a pass line with
//! the worst observed residual against its pinned tolerance.
//!
//! Run with `cargo test -p sek3 --test acceptance -- --nocapture` to see the
//! per-criterion lines.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use std::f64::consts::PI;
use std::time::Instant;

use sek3::oracle;
use sek3::{
    bch, bch_first_order, convert_side, d_adjoint_action_algebra,
    d_adjoint_action_left_perturbation, d_point_action_algebra,
    d_point_action_left_perturbation, distance, gauss_newton_fit, group_jacobian,
    group_jacobian_block_form, group_jacobian_determinant, group_jacobian_polynomial_form,
    jacobian_identity_residual, propagate, q_block_left, recover, sample, so3, xi_dot,
    ConcentratedGaussian, Frame, GeneralizedVelocity, GroupElement, Observation, PointBlock,
    Side, SmallArg, TangentVector,
};

fn random_vec3(rng: &mut StdRng, scale: f64) -> Vector3<f64> {
    Vector3::new(
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
        rng.random_range(-scale..scale),
    )
}

fn random_tangent(rng: &mut StdRng, k: usize, max_phi: f64) -> TangentVector {
    let dir = random_vec3(rng, 1.0).normalize();
    let phi = dir * rng.random_range(0.0..max_phi);
    let t = (0..k).map(|_| random_vec3(rng, 2.0)).collect();
    TangentVector::new(phi, t)
}

fn report(number: u32, what: &str, residual: f64, tolerance: f64) {
    println!("acceptance {number:02} {what}: PASS (max residual {residual:.3e}, tolerance {tolerance:.1e})");
}

#[test]
fn acceptance_01_closed_form_exponential_matches_series_oracle() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1001);
    let mut worst = 0.0f64;
    for k in 0..4 {
        for _ in 0..1000 {
            let xi = random_tangent(&mut rng, k, 3.0);
            let series = oracle::expm_series(xi.hat().matrix());
            worst = worst.max((xi.exp().embedding() - series).amax());
        }
    }
    let elapsed = start.elapsed().as_secs_f64();
    assert!(worst <= 1e-12, "worst residual {worst:.3e}");
    assert!(elapsed < 5.0, "took {elapsed:.2}s, budget 5s");
    report(1, "closed-form exponential vs series oracle", worst, 1e-12);
    println!("              ({elapsed:.2}s, budget 5s)");
}

#[test]
fn acceptance_02_log_exp_round_trip() {
    let mut rng = StdRng::seed_from_u64(1002);
    let mut worst = 0.0f64;
    for k in 0..4 {
        for _ in 0..1000 {
            let xi = random_tangent(&mut rng, k, PI - 0.1);
            worst = worst.max((&xi.exp().log() - &xi).norm());
        }
    }
    assert!(worst <= 1e-10, "worst residual {worst:.3e}");
    report(2, "log-exp round trip", worst, 1e-10);
}

#[test]
fn acceptance_03_adjoint_exponential_commutes() {
    let mut rng = StdRng::seed_from_u64(1003);
    let mut worst = 0.0f64;
    for k in 0..4 {
        for _ in 0..1000 {
            let xi = random_tangent(&mut rng, k, 3.0);
            worst = worst.max((xi.exp_adjoint().matrix() - xi.exp().adjoint().matrix()).amax());
        }
    }
    assert!(worst <= 1e-11, "worst residual {worst:.3e}");
    report(3, "adjoint exponential commutes with group exponential", worst, 1e-11);
}

#[test]
fn acceptance_04_algebra_identities() {
    let mut rng = StdRng::seed_from_u64(1004);
    let mut worst = 0.0f64;
    for k in 0..4 {
        for _ in 0..1000 {
            let xi = random_tangent(&mut rng, k, 3.0);
            let theta2 = xi.phi().norm_squared();

            let s = xi.hat().matrix().clone();
            let s2 = &s * &s;
            let quartic = (&s2 * &s2 + s2 * theta2).amax() / 1.0f64.max(theta2 * theta2);

            let l = xi.small_adjoint().matrix().clone();
            let l2 = &l * &l;
            let l3 = &l2 * &l;
            let quintic = (&l3 * &l2 + &l3 * (2.0 * theta2) + &l * (theta2 * theta2)).amax()
                / 1.0f64.max(theta2.powf(2.5));

            worst = worst.max(quartic).max(quintic);
        }
    }
    assert!(worst <= 1e-9, "worst scaled residual {worst:.3e}");
    report(4, "quartic and quintic algebra identities", worst, 1e-9);
}

#[test]
fn acceptance_05_jacobian_structure() {
    let mut rng = StdRng::seed_from_u64(1005);
    let mut worst_forms = 0.0f64;
    let mut worst_ad = 0.0f64;
    let mut worst_generator = 0.0f64;
    let mut worst_det = 0.0f64;
    for k in 0..4 {
        let n = 3 * (k + 1);
        for _ in 0..250 {
            let xi = random_tangent(&mut rng, k, 3.0);
            for side in [Side::Left, Side::Right] {
                let poly = group_jacobian_polynomial_form(&xi, side);
                let block = group_jacobian_block_form(&xi, side);
                worst_forms = worst_forms.max((poly.matrix() - block.matrix()).amax());
            }

            let lhs = group_jacobian(&xi, Side::Left);
            let rhs = xi.exp_adjoint().matrix() * group_jacobian(&xi, Side::Right).matrix();
            worst_ad = worst_ad.max((lhs.matrix() - rhs).amax());

            let rebuilt = DMatrix::identity(n, n)
                + xi.small_adjoint().matrix() * group_jacobian(&xi, Side::Left).matrix();
            worst_generator = worst_generator.max((xi.exp_adjoint().matrix() - rebuilt).amax());

            let closed = group_jacobian_determinant(&xi);
            let half_angle = sek3::volume_element_half_angle(&xi);
            let dense = group_jacobian(&xi, Side::Left).matrix().determinant().abs();
            worst_det = worst_det.max((closed - dense).abs() / dense.max(1e-30));
            worst_det = worst_det.max((half_angle - dense).abs() / dense.max(1e-30));
        }
    }
    assert!(worst_forms <= 1e-10, "polynomial vs block {worst_forms:.3e}");
    assert!(worst_ad <= 1e-10, "left vs adjoint-times-right {worst_ad:.3e}");
    assert!(worst_generator <= 1e-10, "identity-plus-ad-jacobian {worst_generator:.3e}");
    assert!(worst_det <= 1e-8, "determinant closed forms {worst_det:.3e}");
    report(
        5,
        "group Jacobian structure (forms, adjoint relation, determinant)",
        worst_forms.max(worst_ad).max(worst_generator).max(worst_det),
        1e-8,
    );
}

#[test]
fn acceptance_06_integral_oracles() {
    let mut rng = StdRng::seed_from_u64(1006);
    let mut worst = 0.0f64;
    for trial in 0..100 {
        let k = 1 + (trial % 2);
        let xi = random_tangent(&mut rng, k, 3.0);
        for side in [Side::Left, Side::Right] {
            let numeric = oracle::integral_group_jacobian(&xi, side, 10_000);
            worst = worst.max((group_jacobian(&xi, side).matrix() - numeric).amax());
        }
        let phi = xi.phi();
        let numeric = oracle::integral_so3_left_jacobian(phi, 10_000);
        worst = worst.max((so3::left_jacobian(phi) - numeric).amax());
    }
    assert!(worst <= 1e-7, "worst residual {worst:.3e}");
    report(6, "Jacobians vs trapezoid integral oracles", worst, 1e-7);
}

#[test]
fn acceptance_07_bch_truncation_and_first_order_forms() {
    let mut rng = StdRng::seed_from_u64(1007);

    let mut worst = 0.0f64;
    for k in 0..4 {
        for _ in 0..250 {
            let raw1 = random_tangent(&mut rng, k, 1.0);
            let raw2 = random_tangent(&mut rng, k, 1.0);
            let xi1 = &raw1 * (0.05 / raw1.norm().max(1.0));
            let xi2 = &raw2 * (0.05 / raw2.norm().max(1.0));
            let exact = xi1.exp().compose(&xi2.exp()).unwrap().log();
            let truncated = bch(&xi1, &xi2, 4).unwrap();
            worst = worst.max((&truncated - &exact).norm());
        }
    }
    assert!(worst <= 1e-6, "order-4 truncation error {worst:.3e}");

    for small in [SmallArg::First, SmallArg::Second] {
        let mut ratios = Vec::new();
        for _ in 0..100 {
            let base = random_tangent(&mut rng, 2, 1.5);
            let dir = random_tangent(&mut rng, 2, 1.0);
            let err = |scale: f64| {
                let perturbation = &dir * scale;
                let (a, b) = match small {
                    SmallArg::First => (&perturbation, &base),
                    SmallArg::Second => (&base, &perturbation),
                };
                let exact = a.exp().compose(&b.exp()).unwrap().log();
                let approx = bch_first_order(a, b, small).unwrap();
                (&approx - &exact).norm()
            };
            ratios.push(err(0.01) / err(0.005));
        }
        ratios.sort_by(f64::total_cmp);
        let median = ratios[ratios.len() / 2];
        assert!(
            (3.5..=4.5).contains(&median),
            "{small:?} halving ratio median {median}"
        );
    }
    report(7, "BCH order-4 truncation and first-order decay", worst, 1e-6);
}

#[test]
fn acceptance_08_analytic_jacobians_match_finite_differences() {
    let mut rng = StdRng::seed_from_u64(1008);
    let mut worst = 0.0f64;
    for k in 1..4 {
        let n = 3 * (k + 1);
        for _ in 0..200 {
            let g = random_tangent(&mut rng, k, 2.0).exp();
            let xi = random_tangent(&mut rng, k, 2.0);
            let x = DVector::from_fn(n, |_, _| rng.random_range(-2.0..2.0));
            let points = PointBlock::new((0..k).map(|_| random_vec3(&mut rng, 2.0)).collect());

            // Adjoint action, left perturbation.
            let analytic = d_adjoint_action_left_perturbation(&g, &x).unwrap();
            let f = |delta: &DVector<f64>| {
                TangentVector::from_vector(delta)
                    .unwrap()
                    .exp_adjoint()
                    .apply_vector(&g.adjoint().apply_vector(&x))
            };
            let numeric = oracle::central_difference_jacobian(f, &DVector::zeros(n), 1e-6);
            worst = worst.max((analytic - numeric).amax());

            // Adjoint action, algebra parameter.
            let analytic = d_adjoint_action_algebra(&xi, &x).unwrap();
            let f = |coords: &DVector<f64>| {
                TangentVector::from_vector(coords)
                    .unwrap()
                    .exp_adjoint()
                    .apply_vector(&x)
            };
            let numeric = oracle::central_difference_jacobian(f, &xi.as_vector(), 1e-6);
            worst = worst.max((analytic - numeric).amax());

            // Point actions, both parametrizations.
            let analytic = d_point_action_left_perturbation(&g, &points).unwrap();
            for (m, row) in analytic.iter().enumerate() {
                let f = |delta: &DVector<f64>| {
                    let moved = TangentVector::from_vector(delta)
                        .unwrap()
                        .exp()
                        .compose(&g)
                        .unwrap();
                    let p = moved.rotation().apply(points.point(m)) + moved.translation(m);
                    DVector::from_column_slice(&[p.x, p.y, p.z])
                };
                let numeric = oracle::central_difference_jacobian(f, &DVector::zeros(n), 1e-6);
                worst = worst.max((row - numeric).amax());
            }

            let analytic = d_point_action_algebra(&xi, &points).unwrap();
            for (m, row) in analytic.iter().enumerate() {
                let f = |coords: &DVector<f64>| {
                    let at = TangentVector::from_vector(coords).unwrap().exp();
                    let p = at.rotation().apply(points.point(m)) + at.translation(m);
                    DVector::from_column_slice(&[p.x, p.y, p.z])
                };
                let numeric = oracle::central_difference_jacobian(f, &xi.as_vector(), 1e-6);
                worst = worst.max((row - numeric).amax());
            }
        }
    }
    assert!(worst <= 1e-5, "worst residual {worst:.3e}");
    report(8, "analytic action Jacobians vs central differences", worst, 1e-5);
}

#[test]
fn acceptance_09_kinematics_cross_paths() {
    let mut rng = StdRng::seed_from_u64(1009);

    let mut worst_cross = 0.0f64;
    for frame in [Frame::Left, Frame::Right] {
        for _ in 0..10 {
            let xi0 = &random_tangent(&mut rng, 2, 1.0) * 0.5;
            let v = GeneralizedVelocity::from_tangent(
                frame,
                &(&random_tangent(&mut rng, 2, 1.0) * 0.5),
            );
            let steps = 1000;
            let h = 1.0 / steps as f64;
            let mut xi = xi0.clone();
            for _ in 0..steps {
                let k1 = xi_dot(&xi, &v).unwrap();
                let k2 = xi_dot(&(&xi + &(&k1 * (0.5 * h))), &v).unwrap();
                let k3 = xi_dot(&(&xi + &(&k2 * (0.5 * h))), &v).unwrap();
                let k4 = xi_dot(&(&xi + &(&k3 * h)), &v).unwrap();
                let incr = &(&(&k1 + &(&k2 * 2.0)) + &(&(&k3 * 2.0) + &k4)) * (h / 6.0);
                xi = &xi + &incr;
            }
            let exact = propagate(&xi0.exp(), &v, 1.0).unwrap();
            worst_cross = worst_cross.max((xi.exp().embedding() - exact.embedding()).amax());
        }
    }
    assert!(worst_cross <= 1e-6, "cross-path residual {worst_cross:.3e}");

    let mut worst_identity = 0.0f64;
    for k in 0..3 {
        for _ in 0..20 {
            let base = &random_tangent(&mut rng, k, 1.0) * 0.6;
            let rate = &random_tangent(&mut rng, k, 1.0) * 0.6;
            worst_identity =
                worst_identity.max(jacobian_identity_residual(|t| &base + &(&rate * t), 0.25));
        }
    }
    assert!(worst_identity <= 1e-4, "identity residual {worst_identity:.3e}");
    report(
        9,
        "coordinate vs exponential kinematics and the Jacobian identity",
        worst_cross.max(worst_identity),
        1e-4,
    );
}

#[test]
fn acceptance_10_uncertainty_round_trip() {
    let start = Instant::now();
    let mut rng = StdRng::seed_from_u64(1010);
    let n = 100_000;
    let cov = DMatrix::identity(9, 9) * 0.01;

    for side in [Side::Left, Side::Right] {
        // Keep the mean's translations moderate: recovery runs in the left
        // convention, so right-side quotients get adjoint-amplified.
        let mean = (&random_tangent(&mut rng, 2, 1.0) * 0.25).exp();
        let d = ConcentratedGaussian::new(mean.clone(), cov.clone(), side).unwrap();
        let samples = sample(&d, 2024, n).unwrap();
        let recovered = recover(&samples, side).unwrap();

        let mean_err = distance(recovered.mean(), &mean, Side::Right).unwrap();
        assert!(mean_err <= 0.01, "{side:?} mean error {mean_err:.3e}");
        let cov_err = (recovered.covariance() - &cov).norm() / cov.norm();
        assert!(cov_err <= 0.10, "{side:?} covariance error {cov_err:.3}");
    }

    // Left/right conversion is statistically consistent: both sample sets
    // show the same empirical right-side covariance.
    let mean = (&random_tangent(&mut rng, 2, 1.0) * 0.25).exp();
    let left = ConcentratedGaussian::new(mean.clone(), cov.clone(), Side::Left).unwrap();
    let right = convert_side(&left);
    let left_samples = sample(&left, 7, n).unwrap();
    let right_samples = sample(&right, 8, n).unwrap();
    let empirical = |set: &[GroupElement]| {
        let mut acc = DMatrix::zeros(9, 9);
        for s in set {
            let eps = s.compose(&mean.inverse()).unwrap().log().as_vector();
            acc += &eps * eps.transpose();
        }
        acc / set.len() as f64
    };
    let a = empirical(&left_samples);
    let b = empirical(&right_samples);
    let conversion_err = (&a - &b).norm() / a.norm();
    assert!(conversion_err <= 0.10, "conversion mismatch {conversion_err:.3}");

    let elapsed = start.elapsed().as_secs_f64();
    assert!(elapsed < 30.0, "took {elapsed:.2}s, budget 30s");
    report(10, "concentrated Gaussian sample-recover round trip", conversion_err, 0.10);
    println!("              ({elapsed:.2}s, budget 30s)");
}

#[test]
fn acceptance_11_gauss_newton_registration() {
    let mut rng = StdRng::seed_from_u64(1011);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let truth = random_tangent(&mut rng, 2, 1.5).exp();
        let mut observations = Vec::new();
        for slot in 0..2 {
            for _ in 0..5 {
                let point = random_vec3(&mut rng, 2.0);
                observations.push(Observation {
                    slot,
                    point,
                    target: truth.rotation().apply(&point) + truth.translation(slot),
                    weight: 1.0,
                });
            }
        }
        let outcome =
            gauss_newton_fit(&observations, 2, &GroupElement::identity(2), 15, 1e-12).unwrap();
        assert!(outcome.iterations <= 15);
        worst = worst.max(distance(&outcome.estimate, &truth, Side::Right).unwrap());
    }
    assert!(worst <= 1e-8, "worst recovery error {worst:.3e}");
    report(11, "noise-free Gauss-Newton registration at K=2", worst, 1e-8);
}

#[test]
fn acceptance_12_low_dimensional_reductions() {
    let mut rng = StdRng::seed_from_u64(1012);
    let mut worst = 0.0f64;

    // Independent classical formulas, written in the axis/outer-product form
    // rather than the φ∧ polynomial the production code uses.
    let classic_rotation = |phi: &Vector3<f64>| -> Matrix3<f64> {
        let theta = phi.norm();
        if theta == 0.0 {
            return Matrix3::identity();
        }
        let u = phi / theta;
        Matrix3::identity() * theta.cos()
            + u * u.transpose() * (1.0 - theta.cos())
            + so3::hat(&u) * theta.sin()
    };
    let classic_left_jacobian = |phi: &Vector3<f64>| -> Matrix3<f64> {
        let theta = phi.norm();
        if theta == 0.0 {
            return Matrix3::identity();
        }
        let u = phi / theta;
        let sinc = theta.sin() / theta;
        Matrix3::identity() * sinc
            + u * u.transpose() * (1.0 - sinc)
            + so3::hat(&u) * ((1.0 - theta.cos()) / theta)
    };
    let classic_left_jacobian_inv = |phi: &Vector3<f64>| -> Matrix3<f64> {
        let theta = phi.norm();
        if theta == 0.0 {
            return Matrix3::identity();
        }
        let u = phi / theta;
        let half_cot = 0.5 * theta * (0.5 * theta).cos() / (0.5 * theta).sin();
        Matrix3::identity() * half_cot
            + u * u.transpose() * (1.0 - half_cot)
            - so3::hat(&u) * (0.5 * theta)
    };

    for _ in 0..500 {
        // K = 0: the rotation group.
        let xi = random_tangent(&mut rng, 0, PI - 0.1);
        let g = xi.exp();
        worst = worst.max((g.rotation().matrix() - classic_rotation(xi.phi())).amax());
        worst = worst.max((g.log().phi() - xi.phi()).norm());
        // Ad of a rotation is the rotation itself.
        worst = worst.max((g.adjoint().matrix() - g.embedding()).amax());
        let j = group_jacobian(&xi, Side::Left);
        worst = worst.max(
            (j.matrix() - DMatrix::from_fn(3, 3, |i, c| classic_left_jacobian(xi.phi())[(i, c)]))
                .amax(),
        );

        // K = 1: the rigid-body group.
        let xi = random_tangent(&mut rng, 1, PI - 0.1);
        let g = xi.exp();
        let r = classic_rotation(xi.phi());
        let v = classic_left_jacobian(xi.phi());
        worst = worst.max((g.rotation().matrix() - r).amax());
        worst = worst.max((g.translation(0) - v * xi.translation(0)).norm());

        let back = g.log();
        let p = g.translation(0);
        worst = worst.max((back.translation(0) - classic_left_jacobian_inv(xi.phi()) * p).norm());

        // Classical SE(3) adjoint [[R,0],[p∧R,R]].
        let ad = g.adjoint();
        let mut classic_ad = DMatrix::zeros(6, 6);
        classic_ad.fixed_view_mut::<3, 3>(0, 0).copy_from(&r);
        classic_ad.fixed_view_mut::<3, 3>(3, 3).copy_from(&r);
        classic_ad
            .fixed_view_mut::<3, 3>(3, 0)
            .copy_from(&(so3::hat(p) * r));
        worst = worst.max((ad.matrix() - classic_ad).amax());

        // Q block against its defining double series (30 total orders).
        let q = q_block_left(xi.phi(), xi.translation(0));
        let series = oracle::q_block_series(xi.phi(), xi.translation(0), 30);
        worst = worst.max((q - series).amax());

        // Full SE(3) Jacobian assembled from the classical pieces.
        let j = group_jacobian(&xi, Side::Left);
        let mut classic_j = DMatrix::zeros(6, 6);
        classic_j.fixed_view_mut::<3, 3>(0, 0).copy_from(&v);
        classic_j.fixed_view_mut::<3, 3>(3, 3).copy_from(&v);
        classic_j.fixed_view_mut::<3, 3>(3, 0).copy_from(&series);
        worst = worst.max((j.matrix() - classic_j).amax());
    }
    assert!(worst <= 1e-10, "worst reduction residual {worst:.3e}");
    report(12, "K=0 and K=1 reductions to the classical groups", worst, 1e-10);
}
