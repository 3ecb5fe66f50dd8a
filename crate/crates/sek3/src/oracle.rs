//! Brute-force numerical references for the test suites: dense series
//! exponential and logarithm, numerical-integral Jacobians, an RK4 matrix-ODE
//! integrator and central finite differences.
//!
//! Nothing here is used by a production path. The oracles are slow by
//! design; a production/oracle disagreement is a test failure, never
//! something to resolve inside this module.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::error::{Error, Result};
use crate::group::TangentVector;
use crate::jacobian::Side;
use crate::so3;

/// Matrix exponential by scaling-and-squaring over a 30-term Taylor series.
/// Relative accuracy is near machine precision for 1-norms up to ~50.
pub fn expm_series(m: &DMatrix<f64>) -> DMatrix<f64> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "exponential needs a square matrix");
    let norm = one_norm(m);
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = m / 2f64.powi(squarings);
    let mut term = DMatrix::identity(n, n);
    let mut acc = DMatrix::identity(n, n);
    for k in 1..=30 {
        term = &term * &scaled / k as f64;
        acc += &term;
    }
    for _ in 0..squarings {
        acc = &acc * &acc;
    }
    acc
}

/// Principal matrix logarithm by inverse scaling and squaring: repeated
/// Denman-Beavers square roots pull the matrix toward the identity, then the
/// Mercator series finishes. Rejects matrices with an eigenvalue on the
/// closed negative real axis, where the principal branch is undefined.
pub fn logm(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    assert_eq!(n, m.ncols(), "logarithm needs a square matrix");
    for ev in m.complex_eigenvalues().iter() {
        if ev.re <= 0.0 && ev.im.abs() <= 1e-12 {
            return Err(Error::LogBranch);
        }
    }
    let mut a = m.clone();
    let mut sqrt_count = 0u32;
    while max_abs(&(&a - DMatrix::identity(n, n))) > 0.25 {
        a = sqrtm(&a)?;
        sqrt_count += 1;
        if sqrt_count > 60 {
            return Err(Error::LogBranch);
        }
    }
    let e = &a - DMatrix::identity(n, n);
    let mut term = e.clone();
    let mut acc = e.clone();
    let mut sign = 1.0;
    for k in 2..=48 {
        term = &term * &e;
        sign = -sign;
        acc += &term * (sign / k as f64);
    }
    Ok(acc * 2f64.powi(sqrt_count as i32))
}

/// Principal square root by the Denman-Beavers iteration.
fn sqrtm(m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = m.nrows();
    let mut y = m.clone();
    let mut z = DMatrix::identity(n, n);
    for _ in 0..100 {
        let y_inv = y.clone().try_inverse().ok_or(Error::LogBranch)?;
        let z_inv = z.clone().try_inverse().ok_or(Error::LogBranch)?;
        let next_y = (&y + &z_inv) * 0.5;
        let next_z = (&z + &y_inv) * 0.5;
        let step = max_abs(&(&next_y - &y));
        y = next_y;
        z = next_z;
        if step <= 1e-15 * (1.0 + max_abs(&y)) {
            break;
        }
    }
    Ok(y)
}

/// Numerical-integral group Jacobian: the trapezoid rule applied to
/// `∫₀¹ exp_adjoint(±αξ) dα`.
pub fn integral_group_jacobian(xi: &TangentVector, side: Side, points: usize) -> DMatrix<f64> {
    assert!(points >= 2, "trapezoid rule needs at least two points");
    let n = xi.dim();
    let sign = match side {
        Side::Left => 1.0,
        Side::Right => -1.0,
    };
    let mut acc = DMatrix::<f64>::zeros(n, n);
    let h = 1.0 / points as f64;
    for i in 0..=points {
        let alpha = sign * (i as f64 * h);
        let sample = (xi * alpha).exp_adjoint();
        let weight = if i == 0 || i == points { 0.5 } else { 1.0 };
        acc += sample.matrix() * (weight * h);
    }
    acc
}

/// Numerical-integral SO(3) left Jacobian: `∫₀¹ exp(αφ) dα` by trapezoid.
pub fn integral_so3_left_jacobian(phi: &Vector3<f64>, points: usize) -> Matrix3<f64> {
    assert!(points >= 2, "trapezoid rule needs at least two points");
    let mut acc = Matrix3::zeros();
    let h = 1.0 / points as f64;
    for i in 0..=points {
        let alpha = i as f64 * h;
        let weight = if i == 0 || i == points { 0.5 } else { 1.0 };
        acc += so3::exp(&(phi * alpha)).matrix() * (weight * h);
    }
    acc
}

/// Classical RK4 on the matrix ODE `Ẋ = A(t)·X` from `t0` to `t1`.
pub fn rk4_matrix_ode(
    a: impl Fn(f64) -> DMatrix<f64>,
    x0: &DMatrix<f64>,
    t0: f64,
    t1: f64,
    steps: usize,
) -> DMatrix<f64> {
    assert!(steps > 0);
    let h = (t1 - t0) / steps as f64;
    let mut x = x0.clone();
    let mut t = t0;
    for _ in 0..steps {
        let k1 = a(t) * &x;
        let k2 = a(t + 0.5 * h) * (&x + &k1 * (0.5 * h));
        let k3 = a(t + 0.5 * h) * (&x + &k2 * (0.5 * h));
        let k4 = a(t + h) * (&x + &k3 * h);
        x += (k1 + k2 * 2.0 + k3 * 2.0 + k4) * (h / 6.0);
        t += h;
    }
    x
}

/// Central-difference Jacobian of a vector function, one column per input
/// coordinate; error is O(eps²).
pub fn central_difference_jacobian(
    f: impl Fn(&DVector<f64>) -> DVector<f64>,
    x: &DVector<f64>,
    eps: f64,
) -> DMatrix<f64> {
    let cols = x.len();
    let probe = f(x);
    let mut jac = DMatrix::zeros(probe.len(), cols);
    for j in 0..cols {
        let mut hi = x.clone();
        let mut lo = x.clone();
        hi[j] += eps;
        lo[j] -= eps;
        let col = (f(&hi) - f(&lo)) / (2.0 * eps);
        jac.set_column(j, &col);
    }
    jac
}

/// Truncated double series `Σₙₘ (φ∧)ⁿ(t)∧(φ∧)ᵐ/(n+m+offset)!` over
/// `n+m ≤ max_total`. Offset 1 gives the first-column block of the adjoint
/// exponential, offset 2 the Q block of the left group Jacobian (one more
/// α-power under the defining integral).
pub fn hat_sandwich_series(
    phi: &Vector3<f64>,
    t: &Vector3<f64>,
    max_total: usize,
    factorial_offset: usize,
) -> Matrix3<f64> {
    let p = so3::hat(phi);
    let t_hat = so3::hat(t);
    // Powers of φ∧ up to the truncation order.
    let mut powers: Vec<Matrix3<f64>> = Vec::with_capacity(max_total + 1);
    powers.push(Matrix3::identity());
    for i in 1..=max_total {
        let next = powers[i - 1] * p;
        powers.push(next);
    }
    let top = max_total + factorial_offset;
    let mut inv_factorial = vec![1.0f64; top + 1];
    for i in 1..=top {
        inv_factorial[i] = inv_factorial[i - 1] / i as f64;
    }
    let mut acc = Matrix3::zeros();
    for n in 0..=max_total {
        for m in 0..=(max_total - n) {
            acc += powers[n] * t_hat * powers[m] * inv_factorial[n + m + factorial_offset];
        }
    }
    acc
}

/// `Σₙₘ (φ∧)ⁿ(t)∧(φ∧)ᵐ/(n+m+1)!`: the `(J_l t)∧R` block of the adjoint
/// exponential.
pub fn adjoint_exp_block_series(
    phi: &Vector3<f64>,
    t: &Vector3<f64>,
    max_total: usize,
) -> Matrix3<f64> {
    hat_sandwich_series(phi, t, max_total, 1)
}

/// `Σₙₘ (φ∧)ⁿ(t)∧(φ∧)ᵐ/(n+m+2)!`: the Q block of the left group Jacobian.
pub fn q_block_series(phi: &Vector3<f64>, t: &Vector3<f64>, max_total: usize) -> Matrix3<f64> {
    hat_sandwich_series(phi, t, max_total, 2)
}

/// Largest absolute entry; the norm used by most oracle comparisons.
pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0f64, |a, x| a.max(x.abs()))
}

fn one_norm(m: &DMatrix<f64>) -> f64 {
    (0..m.ncols())
        .map(|j| m.column(j).iter().map(|x| x.abs()).sum::<f64>())
        .fold(0.0f64, f64::max)
}
