//! Dense small-matrix kernel.
//!
//! Everything here works on matrices of at most a few dozen rows (the toy
//! model never exceeds 8×8), so only dense direct algorithms are used. The
//! heavy lifting is delegated to `nalgebra`; this module adds validation
//! (finiteness, squareness, symmetry) and the accuracy contracts the rest of
//! the crate relies on.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Relative tolerance used when validating symmetry.
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Reciprocal pivot ratio below which [`adjugate`] switches to cofactors.
const ADJUGATE_PIVOT_RATIO: f64 = 1e-10;

/// A finite, row-major real matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix(DMatrix<f64>);

impl DenseMatrix {
    /// Builds a matrix from row-major entries.
    pub fn from_row_slice(rows: usize, cols: usize, entries: &[f64]) -> Result<Self> {
        if rows * cols != entries.len() {
            return Err(Error::Dimension(format!(
                "{rows}x{cols} matrix needs {} entries, got {}",
                rows * cols,
                entries.len()
            )));
        }
        Self::from_nalgebra(DMatrix::from_row_slice(rows, cols, entries))
    }

    pub fn from_nalgebra(m: DMatrix<f64>) -> Result<Self> {
        if m.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(DenseMatrix(m))
    }

    /// Wraps a matrix whose entries are known to be finite.
    pub(crate) fn from_trusted(m: DMatrix<f64>) -> Self {
        debug_assert!(m.iter().all(|x| x.is_finite()));
        DenseMatrix(m)
    }

    pub fn identity(n: usize) -> Self {
        DenseMatrix(DMatrix::identity(n, n))
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        DenseMatrix(DMatrix::zeros(rows, cols))
    }

    pub fn rows(&self) -> usize {
        self.0.nrows()
    }

    pub fn cols(&self) -> usize {
        self.0.ncols()
    }

    pub fn is_square(&self) -> bool {
        self.rows() == self.cols()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// Row-major copy of the entries.
    pub fn to_row_major(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.rows() * self.cols());
        for i in 0..self.rows() {
            for j in 0..self.cols() {
                out.push(self.0[(i, j)]);
            }
        }
        out
    }

    pub fn as_nalgebra(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_nalgebra(self) -> DMatrix<f64> {
        self.0
    }

    pub fn transpose(&self) -> Self {
        DenseMatrix(self.0.transpose())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
    }

    /// Largest entrywise deviation from `other`.
    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!(self.0.shape(), other.0.shape());
        self.0
            .iter()
            .zip(other.0.iter())
            .fold(0.0_f64, |acc, (a, b)| acc.max((a - b).abs()))
    }

    /// Relative asymmetry `max|M - Mᵀ| / max|M|` (0 for the zero matrix).
    pub fn asymmetry(&self) -> f64 {
        let scale = self.max_abs();
        if scale == 0.0 {
            return 0.0;
        }
        let n = self.rows();
        let mut worst = 0.0_f64;
        for i in 0..n {
            for j in (i + 1)..n {
                worst = worst.max((self.0[(i, j)] - self.0[(j, i)]).abs());
            }
        }
        worst / scale
    }

    /// `(M + Mᵀ)/2`.
    pub fn symmetrized(&self) -> Self {
        DenseMatrix((&self.0 + self.0.transpose()) * 0.5)
    }

    pub fn mul(&self, rhs: &DenseMatrix) -> Result<DenseMatrix> {
        if self.cols() != rhs.rows() {
            return Err(Error::Dimension(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows(),
                self.cols(),
                rhs.rows(),
                rhs.cols()
            )));
        }
        DenseMatrix::from_nalgebra(&self.0 * &rhs.0)
    }

    pub fn trace(&self) -> f64 {
        self.0.trace()
    }
}

fn require_square(m: &DenseMatrix) -> Result<()> {
    if m.is_square() {
        Ok(())
    } else {
        Err(Error::Dimension(format!(
            "expected a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )))
    }
}

fn require_symmetric(m: &DenseMatrix) -> Result<()> {
    require_square(m)?;
    let asym = m.asymmetry();
    if asym > SYMMETRY_TOL {
        return Err(Error::NotSymmetric(asym));
    }
    Ok(())
}

/// Eigenvalues and orthonormal eigenvectors of a symmetric matrix.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    /// Ascending eigenvalues.
    pub values: Vec<f64>,
    /// Column `k` is the eigenvector for `values[k]`.
    pub vectors: DenseMatrix,
}

impl SymmetricEigen {
    /// `Q Λ Qᵀ`.
    pub fn reconstruct(&self) -> DenseMatrix {
        let q = self.vectors.as_nalgebra();
        let lambda = DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(&self.values));
        DenseMatrix::from_trusted(q * lambda * q.transpose())
    }
}

/// Ascending eigenvalues of a symmetric matrix.
pub fn eig_symmetric(m: &DenseMatrix) -> Result<Vec<f64>> {
    Ok(eigh(m)?.values)
}

/// Symmetric eigendecomposition. The input is validated for symmetry and
/// then averaged with its transpose before solving.
pub fn eigh(m: &DenseMatrix) -> Result<SymmetricEigen> {
    require_symmetric(m)?;
    let sym = m.symmetrized().into_nalgebra();
    let eig = sym.symmetric_eigen();
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = DMatrix::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    Ok(SymmetricEigen {
        values,
        vectors: DenseMatrix::from_trusted(vectors),
    })
}

/// Complex eigenvalues of a general real square matrix, in no particular order.
pub fn spectrum_real_general(m: &DenseMatrix) -> Result<Vec<Complex64>> {
    require_square(m)?;
    if m.rows() == 0 {
        return Ok(Vec::new());
    }
    let values = m.as_nalgebra().complex_eigenvalues();
    Ok(values.iter().copied().collect())
}

pub fn determinant(m: &DenseMatrix) -> Result<f64> {
    require_square(m)?;
    Ok(m.as_nalgebra().clone().lu().determinant())
}

pub fn inverse(m: &DenseMatrix) -> Result<DenseMatrix> {
    require_square(m)?;
    m.as_nalgebra()
        .clone()
        .try_inverse()
        .ok_or_else(|| Error::Numerical("matrix is singular".into()))
        .and_then(DenseMatrix::from_nalgebra)
}

/// Which algorithm produced an adjugate.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AdjugatePath {
    /// `det(M)·M⁻¹` from an LU factorization.
    ScaledInverse,
    /// Signed minors, used when the LU pivots are badly scaled.
    Cofactor,
}

#[derive(Debug, Clone)]
pub struct Adjugate {
    pub matrix: DenseMatrix,
    pub path: AdjugatePath,
}

/// Adjugate (classical adjoint) of a square matrix.
///
/// Well-conditioned inputs go through `det(M)·M⁻¹`; when the smallest LU
/// pivot is below `1e-10` of the largest the cofactor expansion is used
/// instead, which stays exact for singular matrices.
pub fn adjugate(m: &DenseMatrix) -> Result<Adjugate> {
    require_square(m)?;
    let n = m.rows();
    if n == 0 {
        return Ok(Adjugate {
            matrix: DenseMatrix::zeros(0, 0),
            path: AdjugatePath::Cofactor,
        });
    }
    if n == 1 {
        return Ok(Adjugate {
            matrix: DenseMatrix::identity(1),
            path: AdjugatePath::Cofactor,
        });
    }
    let lu = m.as_nalgebra().clone().lu();
    let u = lu.u();
    let (mut lo, mut hi) = (f64::INFINITY, 0.0_f64);
    for k in 0..n {
        let p = u[(k, k)].abs();
        lo = lo.min(p);
        hi = hi.max(p);
    }
    if hi > 0.0 && lo / hi > ADJUGATE_PIVOT_RATIO {
        if let Some(inv) = lu.try_inverse() {
            let det = lu.determinant();
            return Ok(Adjugate {
                matrix: DenseMatrix::from_nalgebra(inv * det)?,
                path: AdjugatePath::ScaledInverse,
            });
        }
    }
    Ok(Adjugate {
        matrix: cofactor_adjugate(m.as_nalgebra()),
        path: AdjugatePath::Cofactor,
    })
}

fn cofactor_adjugate(m: &DMatrix<f64>) -> DenseMatrix {
    let n = m.nrows();
    let mut adj = DMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            // adj(M)_{ij} is the (j,i) cofactor
            let minor = m.clone().remove_row(j).remove_column(i);
            let sign = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
            adj[(i, j)] = sign * minor.lu().determinant();
        }
    }
    DenseMatrix::from_trusted(adj)
}

/// Sum in a fixed pairwise tree; the result depends only on the order of
/// `values`, never on how the caller computed them.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    const LEAF: usize = 16;
    if values.len() <= LEAF {
        return values.iter().sum();
    }
    let mid = values.len() / 2;
    pairwise_sum(&values[..mid]) + pairwise_sum(&values[mid..])
}
