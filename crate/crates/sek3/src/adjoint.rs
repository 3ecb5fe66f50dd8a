//! Adjoint machinery: `Ad_T` on the group, the algebra adjoint `𝔏(ξ)`, and
//! the adjoint matrix group with its own closed-form exponential and
//! structure-exploiting logarithm.

use nalgebra::{DMatrix, DVector};

use crate::coeffs::adjoint_exp_coeffs;
use crate::error::{Error, Result};
use crate::group::{GroupElement, TangentVector};
use crate::so3::{self, Rotation};

/// Frobenius tolerance for accepting the adjoint block layout.
pub const ADJOINT_BLOCK_TOL: f64 = 1e-9;

/// A member of Ad(SE_K(3)): block-lower-triangular with the rotation
/// repeated on the diagonal and `(p_k)∧R` down the first block column.
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointMatrix {
    m: DMatrix<f64>,
}

impl AdjointMatrix {
    pub fn identity(k: usize) -> Self {
        AdjointMatrix {
            m: DMatrix::identity(3 * (k + 1), 3 * (k + 1)),
        }
    }

    /// Wraps a dense matrix after checking the `Ad` block layout.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<AdjointMatrix> {
        let n = m.nrows();
        if m.ncols() != n || n < 3 || !n.is_multiple_of(3) {
            return Err(Error::MalformedAdjoint {
                reason: "adjoint must be square with a multiple of three rows",
            });
        }
        let blocks = n / 3;
        let r = m.fixed_view::<3, 3>(0, 0).into_owned();
        Rotation::from_matrix(r).map_err(|_| Error::MalformedAdjoint {
            reason: "diagonal blocks must be a valid rotation",
        })?;
        for i in 0..blocks {
            for j in 0..blocks {
                let block = m.fixed_view::<3, 3>(3 * i, 3 * j);
                if i == j {
                    if (block - r).norm() > ADJOINT_BLOCK_TOL {
                        return Err(Error::MalformedAdjoint {
                            reason: "diagonal blocks must repeat the rotation",
                        });
                    }
                } else if j == 0 {
                    // (p)∧R block: p∧ = B·Rᵀ must be skew.
                    let skew = block * r.transpose();
                    if (skew + skew.transpose()).norm() > ADJOINT_BLOCK_TOL {
                        return Err(Error::MalformedAdjoint {
                            reason: "first-column blocks must be skew times the rotation",
                        });
                    }
                } else if block.norm() > ADJOINT_BLOCK_TOL {
                    return Err(Error::MalformedAdjoint {
                        reason: "blocks off the first column must vanish",
                    });
                }
            }
        }
        Ok(AdjointMatrix { m })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn k(&self) -> usize {
        self.m.nrows() / 3 - 1
    }

    pub fn dim(&self) -> usize {
        self.m.nrows()
    }

    /// Applies the adjoint to tangent coordinates.
    pub fn apply(&self, xi: &TangentVector) -> TangentVector {
        assert_eq!(self.k(), xi.k(), "adjoint and tangent vector have different K");
        TangentVector::from_vector(&(&self.m * xi.as_vector())).expect("dimensions agree")
    }

    pub fn apply_vector(&self, x: &DVector<f64>) -> DVector<f64> {
        &self.m * x
    }
}

impl std::ops::Mul for &AdjointMatrix {
    type Output = AdjointMatrix;
    fn mul(self, rhs: &AdjointMatrix) -> AdjointMatrix {
        assert_eq!(self.k(), rhs.k(), "adjoint dimensions differ");
        AdjointMatrix {
            m: &self.m * &rhs.m,
        }
    }
}

/// The algebra adjoint `𝔏(ξ)`: `φ∧` repeated on the block diagonal and
/// `(t_k)∧` down the first block column.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraAdjointMatrix {
    m: DMatrix<f64>,
}

impl AlgebraAdjointMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn k(&self) -> usize {
        self.m.nrows() / 3 - 1
    }

    /// Applying `𝔏(ξ₁)` to ξ₂ is the Lie bracket.
    pub fn apply(&self, xi: &TangentVector) -> TangentVector {
        assert_eq!(self.k(), xi.k(), "dimensions differ");
        TangentVector::from_vector(&(&self.m * xi.as_vector())).expect("dimensions agree")
    }
}

impl GroupElement {
    /// The adjoint `Ad_T` as a dense 3(K+1)×3(K+1) matrix.
    pub fn adjoint(&self) -> AdjointMatrix {
        let k = self.k();
        let n = 3 * (k + 1);
        let r = self.rotation().matrix();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..=k {
            m.fixed_view_mut::<3, 3>(3 * i, 3 * i).copy_from(r);
        }
        for (i, p) in self.translations().iter().enumerate() {
            m.fixed_view_mut::<3, 3>(3 * (i + 1), 0)
                .copy_from(&(so3::hat(p) * r));
        }
        AdjointMatrix { m }
    }

    /// `Ad_{T⁻¹}`, assembled directly from the block inverse: `Rᵀ` on the
    /// diagonal and `−Rᵀ(p_k)∧` down the first block column.
    pub fn adjoint_inverse(&self) -> AdjointMatrix {
        let k = self.k();
        let n = 3 * (k + 1);
        let rt = self.rotation().matrix().transpose();
        let mut m = DMatrix::zeros(n, n);
        for i in 0..=k {
            m.fixed_view_mut::<3, 3>(3 * i, 3 * i).copy_from(&rt);
        }
        for (i, p) in self.translations().iter().enumerate() {
            m.fixed_view_mut::<3, 3>(3 * (i + 1), 0)
                .copy_from(&(-rt * so3::hat(p)));
        }
        AdjointMatrix { m }
    }
}

impl TangentVector {
    /// The algebra adjoint `𝔏(ξ)` of these coordinates.
    pub fn small_adjoint(&self) -> AlgebraAdjointMatrix {
        let k = self.k();
        let n = 3 * (k + 1);
        let phi_hat = so3::hat(self.phi());
        let mut m = DMatrix::zeros(n, n);
        for i in 0..=k {
            m.fixed_view_mut::<3, 3>(3 * i, 3 * i).copy_from(&phi_hat);
        }
        for (i, t) in self.translations().iter().enumerate() {
            m.fixed_view_mut::<3, 3>(3 * (i + 1), 0)
                .copy_from(&so3::hat(t));
        }
        AlgebraAdjointMatrix { m }
    }

    /// Closed-form exponential into the adjoint group: the quartic
    /// polynomial `I + a₁𝔗 + a₂𝔗² + a₃𝔗³ + a₄𝔗⁴` in `𝔗 = 𝔏(ξ)`.
    pub fn exp_adjoint(&self) -> AdjointMatrix {
        let n = self.dim();
        let [a1, a2, a3, a4] = adjoint_exp_coeffs(self.phi().norm());
        let t = self.small_adjoint().m;
        let t2 = &t * &t;
        let t3 = &t2 * &t;
        let t4 = &t2 * &t2;
        let m = DMatrix::identity(n, n) + t * a1 + t2 * a2 + t3 * a3 + t4 * a4;
        AdjointMatrix { m }
    }
}

/// Logarithm of an adjoint, exploiting the block structure instead of a
/// dense matrix logarithm: reads the rotation off the diagonal, solves the
/// first block column for the translations, and maps back through the
/// inverse SO(3) Jacobian.
pub fn log_adjoint(a: &AdjointMatrix) -> Result<TangentVector> {
    let k = a.k();
    let r_m = a.m.fixed_view::<3, 3>(0, 0).into_owned();
    let r = Rotation::from_matrix(r_m).map_err(|_| Error::MalformedAdjoint {
        reason: "diagonal blocks must be a valid rotation",
    })?;
    let phi = so3::log(&r);
    let jl_inv = so3::left_jacobian_inv(&phi).expect("angle from log is at most pi");
    let mut t = Vec::with_capacity(k);
    for i in 0..k {
        let block = a.m.fixed_view::<3, 3>(3 * (i + 1), 0).into_owned();
        let skew = block * r.matrix().transpose();
        let p = so3::vee(&skew).map_err(|_| Error::MalformedAdjoint {
            reason: "first-column blocks must be skew times the rotation",
        })?;
        t.push(jl_inv * p);
    }
    Ok(TangentVector::new(phi, t))
}
