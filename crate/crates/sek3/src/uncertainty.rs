//! Concentrated Gaussian distributions on SE_K(3): left- and right-invariant
//! definitions, deterministic sampling, empirical recovery of the mean and
//! covariance, and conversion between the two noise conventions.
//!
//! Sampling is counter-based: the i-th draw is a pure function of
//! `(seed, i)`, so parallel and sequential evaluation agree bit for bit.

use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::exec;
use crate::group::{GroupElement, TangentVector};
use crate::jacobian::Side;

/// Tolerance scale for the symmetry and positive-semidefiniteness checks.
const PSD_TOL: f64 = 1e-12;

/// Concentration bound: every sample must stay within this quotient-log
/// radius of the running mean during recovery.
const CONCENTRATION_RADIUS: f64 = std::f64::consts::FRAC_PI_2;

/// A Gaussian in tangent coordinates applied around a mean element, on the
/// left (`T = T̂·exp(ε)`) or the right (`T = exp(ε)·T̂`).
#[derive(Clone, Debug, PartialEq)]
pub struct ConcentratedGaussian {
    mean: GroupElement,
    cov: DMatrix<f64>,
    side: Side,
}

impl ConcentratedGaussian {
    /// Validates symmetry and positive semidefiniteness of the covariance.
    pub fn new(mean: GroupElement, cov: DMatrix<f64>, side: Side) -> Result<Self> {
        let n = mean.dim();
        if cov.nrows() != n || cov.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: cov.nrows().max(cov.ncols()),
            });
        }
        let scale = cov.amax().max(1.0);
        if (&cov - cov.transpose()).amax() > PSD_TOL * scale {
            return Err(Error::NotPsd {
                min_eigenvalue: f64::NAN,
            });
        }
        let min_eigenvalue = DMatrix::symmetric_eigen(cov.clone()).eigenvalues.min();
        if min_eigenvalue < -PSD_TOL * scale {
            return Err(Error::NotPsd { min_eigenvalue });
        }
        Ok(ConcentratedGaussian { mean, cov, side })
    }

    pub fn mean(&self) -> &GroupElement {
        &self.mean
    }

    pub fn covariance(&self) -> &DMatrix<f64> {
        &self.cov
    }

    pub fn side(&self) -> Side {
        self.side
    }

    pub fn k(&self) -> usize {
        self.mean.k()
    }
}

/// A square factor `F` with `FFᵀ = cov`: Cholesky when the covariance is
/// strictly positive definite, otherwise an eigenvalue factorization with
/// negative eigenvalues clipped at zero.
fn covariance_factor(cov: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if let Some(chol) = nalgebra::Cholesky::new(cov.clone()) {
        return Ok(chol.l());
    }
    let eigen = DMatrix::symmetric_eigen(cov.clone());
    let min = eigen.eigenvalues.min();
    if min < -PSD_TOL * cov.amax().max(1.0) {
        return Err(Error::NotPsd {
            min_eigenvalue: min,
        });
    }
    let mut factor = eigen.eigenvectors.clone();
    for (j, lambda) in eigen.eigenvalues.iter().enumerate() {
        let s = lambda.max(0.0).sqrt();
        factor.column_mut(j).scale_mut(s);
    }
    Ok(factor)
}

/// Draws `n` elements; the i-th output is a pure function of `(seed, i)`.
pub fn sample(
    distribution: &ConcentratedGaussian,
    seed: u64,
    n: usize,
) -> Result<Vec<GroupElement>> {
    let dim = distribution.mean.dim();
    let factor = covariance_factor(&distribution.cov)?;
    let mean = &distribution.mean;
    let side = distribution.side;
    Ok(exec::map_indexed(n, move |i| {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(i as u64 + 1);
        let z = DVector::from_fn(dim, |_, _| rng.sample::<f64, _>(StandardNormal));
        let eps = TangentVector::from_vector(&(&factor * z)).expect("factor is square");
        let noise = eps.exp();
        match side {
            Side::Left => mean.compose(&noise).expect("matching K"),
            Side::Right => noise.compose(mean).expect("matching K"),
        }
    }))
}

/// Recovers a concentrated Gaussian from samples by the iterated
/// log-average: the mean update runs in the left convention and the result
/// is converted when the right convention is requested. Fails if any sample
/// sits further than a quarter turn (in quotient-log norm) from the running
/// mean.
pub fn recover(samples: &[GroupElement], side: Side) -> Result<ConcentratedGaussian> {
    let Some(first) = samples.first() else {
        return Err(Error::NotConcentrated {
            max_deviation: f64::INFINITY,
        });
    };
    let k = first.k();
    for s in samples {
        if s.k() != k {
            return Err(Error::DimensionMismatch {
                expected: k,
                got: s.k(),
            });
        }
    }

    let n = samples.len();
    let dim = first.dim();
    let mut mean = first.clone();

    // Left-convention quotient logs against a candidate mean, rejecting
    // dispersed sample sets.
    let quotient_logs = |mean: &GroupElement| -> Result<Vec<TangentVector>> {
        let mean_inv = mean.inverse();
        let mut max_deviation = 0.0f64;
        let mut logs = Vec::with_capacity(n);
        for s in samples {
            let eps = mean_inv.compose(s).expect("matching K").log();
            max_deviation = max_deviation.max(eps.norm());
            logs.push(eps);
        }
        if max_deviation >= CONCENTRATION_RADIUS {
            return Err(Error::NotConcentrated { max_deviation });
        }
        Ok(logs)
    };

    for _ in 0..100 {
        let logs = quotient_logs(&mean)?;
        let mut avg = DVector::zeros(dim);
        for eps in &logs {
            avg += eps.as_vector();
        }
        avg /= n as f64;
        let step = TangentVector::from_vector(&avg).expect("dimension fixed");
        if step.norm() < 1e-10 {
            break;
        }
        mean = mean.compose(&step.exp()).expect("matching K");
    }

    let logs = quotient_logs(&mean)?;
    let mut cov = DMatrix::zeros(dim, dim);
    for eps in &logs {
        let v = eps.as_vector();
        cov += &v * v.transpose();
    }
    cov /= n as f64;
    // Dampen asymmetry from the rank-one accumulation.
    cov = (&cov + cov.transpose()) * 0.5;

    let left = ConcentratedGaussian {
        mean,
        cov,
        side: Side::Left,
    };
    Ok(match side {
        Side::Left => left,
        Side::Right => convert_side(&left),
    })
}

/// Converts between the left and right noise conventions around the same
/// mean: left to right maps the covariance by `Ad_T̂ · P · Ad_T̂ᵀ`, right to
/// left by the inverse adjoint.
pub fn convert_side(distribution: &ConcentratedGaussian) -> ConcentratedGaussian {
    let adjoint = match distribution.side {
        Side::Left => distribution.mean.adjoint(),
        Side::Right => distribution.mean.adjoint_inverse(),
    };
    let cov = adjoint.matrix() * &distribution.cov * adjoint.matrix().transpose();
    ConcentratedGaussian {
        mean: distribution.mean.clone(),
        cov,
        side: distribution.side.flipped(),
    }
}
