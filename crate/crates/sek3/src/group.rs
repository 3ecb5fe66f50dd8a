//! The group SE_K(3): one rotation plus K translation-like 3-vectors,
//! embedded as (K+3)×(K+3) matrices.
//!
//! Elements are stored structurally as `(R, p_1..p_K)`; the dense embedding
//! is materialized only on demand (oracle checks, I/O). Tangent vectors use
//! the fixed slot order `(φ, t_1, …, t_K)` throughout the crate.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::so3::{self, Rotation};

/// Frobenius tolerance for accepting the block layout of embeddings and
/// algebra matrices.
pub const BLOCK_TOL: f64 = 1e-9;

fn check_same_k(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// An element of SE_K(3).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "GroupElementRecord", try_from = "GroupElementRecord")]
pub struct GroupElement {
    r: Rotation,
    p: Vec<Vector3<f64>>,
}

impl GroupElement {
    pub fn new(r: Rotation, p: Vec<Vector3<f64>>) -> Self {
        GroupElement { r, p }
    }

    /// The identity element with `k` translation slots.
    pub fn identity(k: usize) -> Self {
        GroupElement {
            r: Rotation::identity(),
            p: vec![Vector3::zeros(); k],
        }
    }

    /// Number of translation slots.
    pub fn k(&self) -> usize {
        self.p.len()
    }

    /// Tangent-space dimension 3(K+1).
    pub fn dim(&self) -> usize {
        3 * (self.p.len() + 1)
    }

    pub fn rotation(&self) -> &Rotation {
        &self.r
    }

    pub fn translations(&self) -> &[Vector3<f64>] {
        &self.p
    }

    pub fn translation(&self, slot: usize) -> &Vector3<f64> {
        &self.p[slot]
    }

    /// Group composition: rotation `R₁R₂`, translations `R₁p₂ₖ + p₁ₖ`.
    pub fn compose(&self, other: &GroupElement) -> Result<GroupElement> {
        check_same_k(self.k(), other.k())?;
        let r = self.r.compose(&other.r);
        let p = self
            .p
            .iter()
            .zip(&other.p)
            .map(|(p1, p2)| self.r.apply(p2) + p1)
            .collect();
        Ok(GroupElement { r, p })
    }

    /// Group inverse: rotation `Rᵀ`, translations `−Rᵀp_k`.
    pub fn inverse(&self) -> GroupElement {
        let r = self.r.inverse();
        let p = self.p.iter().map(|p| -r.apply(p)).collect();
        GroupElement { r, p }
    }

    /// Principal logarithm: `φ = log(R)`, `t_k = J_l(φ)⁻¹ p_k`.
    pub fn log(&self) -> TangentVector {
        let phi = so3::log(&self.r);
        // log keeps ‖φ‖ ≤ π, well away from the 2π singularity.
        let jl_inv = so3::left_jacobian_inv(&phi).expect("angle from log is at most pi");
        let t = self.p.iter().map(|p| jl_inv * p).collect();
        TangentVector { phi, t }
    }

    /// Parametric action on ℝ³: `R·b + Σ γᵢ·pᵢ`.
    pub fn act(&self, b: &Vector3<f64>, gamma: &[f64]) -> Result<Vector3<f64>> {
        check_same_k(self.k(), gamma.len())?;
        let mut out = self.r.apply(b);
        for (g, p) in gamma.iter().zip(&self.p) {
            out += *g * p;
        }
        Ok(out)
    }

    /// Dense (K+3)×(K+3) embedding.
    pub fn embedding(&self) -> DMatrix<f64> {
        let k = self.k();
        let n = k + 3;
        let mut m = DMatrix::identity(n, n);
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(self.r.matrix());
        for (i, p) in self.p.iter().enumerate() {
            m.fixed_view_mut::<3, 1>(0, 3 + i).copy_from(p);
        }
        m
    }

    /// Rebuilds an element from its dense embedding, checking the block
    /// layout and the rotation invariants.
    pub fn from_embedding(m: &DMatrix<f64>) -> Result<GroupElement> {
        let n = m.nrows();
        if m.ncols() != n || n < 3 {
            return Err(Error::MalformedEmbedding {
                reason: "embedding must be square with at least three rows",
            });
        }
        let k = n - 3;
        let mut defect = 0.0f64;
        for i in 3..n {
            for j in 0..n {
                let expected = if i == j { 1.0 } else { 0.0 };
                defect += (m[(i, j)] - expected).powi(2);
            }
        }
        if defect.sqrt() > BLOCK_TOL {
            return Err(Error::MalformedEmbedding {
                reason: "rows below the rotation block must be an identity pad",
            });
        }
        let r = Rotation::from_matrix(m.fixed_view::<3, 3>(0, 0).into_owned())?;
        let p = (0..k)
            .map(|i| m.fixed_view::<3, 1>(0, 3 + i).into_owned())
            .collect();
        Ok(GroupElement { r, p })
    }
}

/// Minimal coordinates ξ = (φ, t_1, …, t_K) of the Lie algebra.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(into = "TangentVectorRecord", try_from = "TangentVectorRecord")]
pub struct TangentVector {
    phi: Vector3<f64>,
    t: Vec<Vector3<f64>>,
}

impl TangentVector {
    pub fn new(phi: Vector3<f64>, t: Vec<Vector3<f64>>) -> Self {
        TangentVector { phi, t }
    }

    pub fn zero(k: usize) -> Self {
        TangentVector {
            phi: Vector3::zeros(),
            t: vec![Vector3::zeros(); k],
        }
    }

    /// The i-th standard basis vector of ℝ^{3(K+1)}.
    pub fn basis(k: usize, i: usize) -> Self {
        let mut v = DVector::zeros(3 * (k + 1));
        v[i] = 1.0;
        TangentVector::from_vector(&v).expect("basis dimension is valid")
    }

    pub fn k(&self) -> usize {
        self.t.len()
    }

    pub fn dim(&self) -> usize {
        3 * (self.t.len() + 1)
    }

    pub fn phi(&self) -> &Vector3<f64> {
        &self.phi
    }

    pub fn translations(&self) -> &[Vector3<f64>] {
        &self.t
    }

    pub fn translation(&self, slot: usize) -> &Vector3<f64> {
        &self.t[slot]
    }

    pub fn norm(&self) -> f64 {
        let mut s = self.phi.norm_squared();
        for t in &self.t {
            s += t.norm_squared();
        }
        s.sqrt()
    }

    /// Stacks the coordinates into a dense vector.
    pub fn as_vector(&self) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim());
        v.fixed_rows_mut::<3>(0).copy_from(&self.phi);
        for (i, t) in self.t.iter().enumerate() {
            v.fixed_rows_mut::<3>(3 * (i + 1)).copy_from(t);
        }
        v
    }

    /// Splits a stacked coordinate vector; the length must be a positive
    /// multiple of three.
    pub fn from_vector(v: &DVector<f64>) -> Result<TangentVector> {
        if v.len() < 3 || !v.len().is_multiple_of(3) {
            return Err(Error::DimensionMismatch {
                expected: 3,
                got: v.len(),
            });
        }
        let k = v.len() / 3 - 1;
        let phi = v.fixed_rows::<3>(0).into_owned();
        let t = (0..k)
            .map(|i| v.fixed_rows::<3>(3 * (i + 1)).into_owned())
            .collect();
        Ok(TangentVector { phi, t })
    }

    /// The hat map into the (K+3)×(K+3) algebra.
    pub fn hat(&self) -> AlgebraMatrix {
        let k = self.k();
        let n = k + 3;
        let mut m = DMatrix::zeros(n, n);
        m.fixed_view_mut::<3, 3>(0, 0).copy_from(&so3::hat(&self.phi));
        for (i, t) in self.t.iter().enumerate() {
            m.fixed_view_mut::<3, 1>(0, 3 + i).copy_from(t);
        }
        AlgebraMatrix { m }
    }

    /// Lie bracket in coordinates: `(φ₁×φ₂, t₁ₖ×φ₂ + φ₁×t₂ₖ)`.
    pub fn bracket(&self, other: &TangentVector) -> Result<TangentVector> {
        check_same_k(self.k(), other.k())?;
        let phi = self.phi.cross(&other.phi);
        let t = self
            .t
            .iter()
            .zip(&other.t)
            .map(|(t1, t2)| t1.cross(&other.phi) + self.phi.cross(t2))
            .collect();
        Ok(TangentVector { phi, t })
    }

    /// Closed-form exponential: rotation `exp(φ)`, translations `J_l(φ)·t_k`.
    pub fn exp(&self) -> GroupElement {
        let r = so3::exp(&self.phi);
        let jl = so3::left_jacobian(&self.phi);
        let p = self.t.iter().map(|t| jl * t).collect();
        GroupElement { r, p }
    }
}

impl std::ops::Add for &TangentVector {
    type Output = TangentVector;
    fn add(self, rhs: &TangentVector) -> TangentVector {
        assert_eq!(self.k(), rhs.k(), "tangent vectors have different K");
        TangentVector {
            phi: self.phi + rhs.phi,
            t: self.t.iter().zip(&rhs.t).map(|(a, b)| a + b).collect(),
        }
    }
}

impl std::ops::Sub for &TangentVector {
    type Output = TangentVector;
    fn sub(self, rhs: &TangentVector) -> TangentVector {
        assert_eq!(self.k(), rhs.k(), "tangent vectors have different K");
        TangentVector {
            phi: self.phi - rhs.phi,
            t: self.t.iter().zip(&rhs.t).map(|(a, b)| a - b).collect(),
        }
    }
}

impl std::ops::Neg for &TangentVector {
    type Output = TangentVector;
    fn neg(self) -> TangentVector {
        TangentVector {
            phi: -self.phi,
            t: self.t.iter().map(|t| -t).collect(),
        }
    }
}

impl std::ops::Mul<f64> for &TangentVector {
    type Output = TangentVector;
    fn mul(self, s: f64) -> TangentVector {
        TangentVector {
            phi: self.phi * s,
            t: self.t.iter().map(|t| t * s).collect(),
        }
    }
}

/// The (K+3)×(K+3) hat-form of a tangent vector: skew top-left block, the
/// translations as columns, zero rows below the third.
#[derive(Clone, Debug, PartialEq)]
pub struct AlgebraMatrix {
    m: DMatrix<f64>,
}

impl AlgebraMatrix {
    /// Wraps a dense matrix after checking the algebra block layout.
    pub fn from_matrix(m: DMatrix<f64>) -> Result<AlgebraMatrix> {
        let n = m.nrows();
        if m.ncols() != n || n < 3 {
            return Err(Error::MalformedAlgebra {
                reason: "algebra matrix must be square with at least three rows",
            });
        }
        let mut lower = 0.0f64;
        for i in 3..n {
            for j in 0..n {
                lower += m[(i, j)].powi(2);
            }
        }
        if lower.sqrt() > BLOCK_TOL {
            return Err(Error::MalformedAlgebra {
                reason: "rows below the skew block must vanish",
            });
        }
        let top = m.fixed_view::<3, 3>(0, 0);
        if (top + top.transpose()).norm() > BLOCK_TOL {
            return Err(Error::MalformedAlgebra {
                reason: "top-left block must be skew-symmetric",
            });
        }
        Ok(AlgebraMatrix { m })
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.m
    }

    pub fn k(&self) -> usize {
        self.m.nrows() - 3
    }

    /// Inverse of the hat map; reads the independent entries exactly.
    pub fn vee(&self) -> TangentVector {
        let phi = Vector3::new(self.m[(2, 1)], self.m[(0, 2)], self.m[(1, 0)]);
        let t = (0..self.k())
            .map(|i| self.m.fixed_view::<3, 1>(0, 3 + i).into_owned())
            .collect();
        TangentVector { phi, t }
    }
}

/// One generator of the algebra: the hat of the i-th basis vector.
pub fn generator(k: usize, i: usize) -> AlgebraMatrix {
    TangentVector::basis(k, i).hat()
}

// ---------------------------------------------------------------------------
// Wire format: flat records consumed by the CLI (JSON lines).
// ---------------------------------------------------------------------------

/// Flat serialization of a [`GroupElement`]: `k`, the rotation row-major,
/// and the translations concatenated.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GroupElementRecord {
    pub k: usize,
    pub r: Vec<f64>,
    pub p: Vec<f64>,
}

impl From<GroupElement> for GroupElementRecord {
    fn from(g: GroupElement) -> Self {
        let mut r = Vec::with_capacity(9);
        for i in 0..3 {
            for j in 0..3 {
                r.push(g.r.matrix()[(i, j)]);
            }
        }
        let mut p = Vec::with_capacity(3 * g.k());
        for t in &g.p {
            p.extend_from_slice(&[t.x, t.y, t.z]);
        }
        GroupElementRecord { k: g.k(), r, p }
    }
}

impl TryFrom<GroupElementRecord> for GroupElement {
    type Error = Error;

    fn try_from(rec: GroupElementRecord) -> Result<GroupElement> {
        if rec.r.len() != 9 {
            return Err(Error::MalformedEmbedding {
                reason: "rotation record must hold nine entries",
            });
        }
        if rec.p.len() != 3 * rec.k {
            return Err(Error::DimensionMismatch {
                expected: 3 * rec.k,
                got: rec.p.len(),
            });
        }
        let r = Rotation::from_matrix(Matrix3::from_row_slice(&rec.r))?;
        let p = rec.p.chunks_exact(3).map(Vector3::from_column_slice).collect();
        Ok(GroupElement { r, p })
    }
}

/// Flat serialization of a [`TangentVector`]: `k` and the stacked
/// coordinates `(φ, t_1, …, t_K)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TangentVectorRecord {
    pub k: usize,
    pub xi: Vec<f64>,
}

impl From<TangentVector> for TangentVectorRecord {
    fn from(xi: TangentVector) -> Self {
        TangentVectorRecord {
            k: xi.k(),
            xi: xi.as_vector().iter().copied().collect(),
        }
    }
}

impl TryFrom<TangentVectorRecord> for TangentVector {
    type Error = Error;

    fn try_from(rec: TangentVectorRecord) -> Result<TangentVector> {
        if rec.xi.len() != 3 * (rec.k + 1) {
            return Err(Error::DimensionMismatch {
                expected: 3 * (rec.k + 1),
                got: rec.xi.len(),
            });
        }
        TangentVector::from_vector(&DVector::from_column_slice(&rec.xi))
    }
}

// Shared random draws for the sibling modules' test suites.
#[cfg(test)]
pub(crate) use tests::{random_element, random_tangent};
