//! Dense symmetric linear algebra used throughout the crate.
//!
//! Everything here works on `nalgebra::DMatrix<f64>`. The symmetric
//! eigensolver is the one numerical primitive most other modules lean on;
//! the Laplacian pseudoinverse deliberately avoids it (see
//! [`laplacian_pseudoinverse`]) so the two can be checked against each other.

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::graph::LaplacianMatrix;

/// Relative threshold below which an eigenvalue counts as zero.
pub const ZERO_EIGENVALUE_RTOL: f64 = 1e-10;

/// Relative asymmetry accepted by [`SymmetricMatrix::new`].
pub const SYMMETRY_RTOL: f64 = 1e-12;

const SINGULAR_PIVOT_RTOL: f64 = 1e-13;

/// The all-ones vector `u`.
pub fn ones(n: usize) -> DVector<f64> {
    DVector::from_element(n, 1.0)
}

/// Standard basis vector `e_i`.
pub fn basis(n: usize, i: usize) -> DVector<f64> {
    let mut e = DVector::zeros(n);
    e[i] = 1.0;
    e
}

/// The projector `I - uu^T/n` onto the complement of the constant vector.
pub fn centering(n: usize) -> DMatrix<f64> {
    let mut p = DMatrix::from_element(n, n, -1.0 / n as f64);
    for i in 0..n {
        p[(i, i)] += 1.0;
    }
    p
}

/// Two-sided centering `(I - uu^T/n) A (I - uu^T/n)`.
pub fn center(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let nf = n as f64;
    let row_means: Vec<f64> = (0..n).map(|i| a.row(i).sum() / nf).collect();
    let col_means: Vec<f64> = (0..n).map(|j| a.column(j).sum() / nf).collect();
    let grand = row_means.iter().sum::<f64>() / nf;
    DMatrix::from_fn(n, n, |i, j| a[(i, j)] - row_means[i] - col_means[j] + grand)
}

/// Largest absolute entry, the norm used for every residual in this crate.
pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub(crate) fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    a.iter().zip(b.iter()).fold(0.0_f64, |m, (x, y)| m.max((x - y).abs()))
}

pub(crate) fn check_square_finite(a: &DMatrix<f64>) -> Result<()> {
    if a.nrows() != a.ncols() {
        return Err(Error::NonSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    for j in 0..a.ncols() {
        for i in 0..a.nrows() {
            if !a[(i, j)].is_finite() {
                return Err(Error::NonFiniteEntry { row: i, col: j });
            }
        }
    }
    Ok(())
}

pub(crate) fn symmetrize(a: &DMatrix<f64>) -> DMatrix<f64> {
    (a + a.transpose()) * 0.5
}

/// Square matrix that is exactly symmetric.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix(DMatrix<f64>);

impl SymmetricMatrix {
    /// Accepts a matrix symmetric to within [`SYMMETRY_RTOL`] of its largest
    /// entry and symmetrizes it exactly.
    pub fn new(a: DMatrix<f64>) -> Result<Self> {
        check_square_finite(&a)?;
        let asym = max_abs_diff(&a, &a.transpose());
        if asym > SYMMETRY_RTOL * max_abs(&a) {
            return Err(Error::NotSymmetric(asym));
        }
        Ok(Self(symmetrize(&a)))
    }

    /// Symmetrizes `(A + A^T)/2` without any tolerance check.
    pub fn symmetrized(a: &DMatrix<f64>) -> Self {
        Self(symmetrize(a))
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn as_matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

/// Eigenpairs of a symmetric matrix with eigenvalues in descending order.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    values: DVector<f64>,
    vectors: DMatrix<f64>,
}

impl EigenDecomposition {
    pub fn values(&self) -> &DVector<f64> {
        &self.values
    }

    /// Orthonormal eigenvectors as columns, matching [`Self::values`].
    pub fn vectors(&self) -> &DMatrix<f64> {
        &self.vectors
    }

    /// Zero threshold `rtol * max_k |mu_k|`.
    pub fn zero_threshold(&self, rtol: f64) -> f64 {
        rtol * self.values.amax()
    }

    /// Number of eigenvalues with `|mu| <= rtol * max |mu|`.
    pub fn zero_count(&self, rtol: f64) -> usize {
        let thr = self.zero_threshold(rtol);
        self.values.iter().filter(|mu| mu.abs() <= thr).count()
    }

    pub fn reconstruct(&self) -> DMatrix<f64> {
        let scaled = DMatrix::from_fn(self.vectors.nrows(), self.vectors.ncols(), |i, k| {
            self.vectors[(i, k)] * self.values[k]
        });
        scaled * self.vectors.transpose()
    }
}

/// Symmetric eigendecomposition (Householder tridiagonalization followed by
/// implicit-shift QR), eigenvalues sorted descending.
pub fn eigh(a: &SymmetricMatrix) -> Result<EigenDecomposition> {
    let n = a.order();
    if n == 0 {
        return Ok(EigenDecomposition {
            values: DVector::zeros(0),
            vectors: DMatrix::zeros(0, 0),
        });
    }
    let budget = 100 * n.max(10);
    let eig = SymmetricEigen::try_new(a.0.clone(), f64::EPSILON, budget).ok_or(Error::NoConvergence)?;

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let values = DVector::from_iterator(n, order.iter().map(|&k| eig.eigenvalues[k]));
    let vectors = DMatrix::from_fn(n, n, |i, k| eig.eigenvectors[(i, order[k])]);
    Ok(EigenDecomposition { values, vectors })
}

/// Determinant by LU factorization with partial pivoting.
pub fn determinant(a: &DMatrix<f64>) -> Result<f64> {
    check_square_finite(a)?;
    if a.nrows() == 0 {
        return Ok(1.0);
    }
    Ok(a.clone().lu().determinant())
}

/// Moore-Penrose pseudoinverse of a symmetric matrix with exactly one zero
/// eigenvalue, computed from its eigendecomposition.
pub fn spectral_pseudoinverse(a: &SymmetricMatrix) -> Result<SymmetricMatrix> {
    let eig = eigh(a)?;
    let zeros = eig.zero_count(ZERO_EIGENVALUE_RTOL);
    if zeros != 1 {
        return Err(Error::RankDeficient { zeros });
    }
    let thr = eig.zero_threshold(ZERO_EIGENVALUE_RTOL);
    let n = a.order();
    let mut out = DMatrix::zeros(n, n);
    for (k, &mu) in eig.values.iter().enumerate() {
        if mu.abs() <= thr {
            continue;
        }
        let z = eig.vectors.column(k);
        out += (z * z.transpose()) / mu;
    }
    Ok(SymmetricMatrix::symmetrized(&out))
}

/// `(Q + uu^T/n)^{-1} - uu^T/n` for a matrix whose kernel is exactly the
/// constant vector. The shifted matrix is positive definite in that case and
/// is factored by Cholesky.
pub(crate) fn shifted_pseudoinverse(q: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = q.nrows();
    let shift = 1.0 / n as f64;
    let shifted = q.add_scalar(shift);
    let scale = shifted.diagonal().amax();
    let chol = Cholesky::new(shifted).ok_or(Error::SingularShift)?;
    // A singular shifted matrix can still factor with a rounding-level pivot.
    let min_pivot = chol
        .l_dirty()
        .diagonal()
        .iter()
        .fold(f64::INFINITY, |m, x| m.min(x * x));
    if min_pivot <= SINGULAR_PIVOT_RTOL * scale {
        return Err(Error::SingularShift);
    }
    let inv = chol.inverse();
    if inv.iter().any(|x| !x.is_finite()) {
        return Err(Error::SingularShift);
    }
    Ok(symmetrize(&inv.add_scalar(-shift)))
}

/// Pseudoinverse `Q^+` of a Laplacian via the rank-one shift.
pub fn laplacian_pseudoinverse(q: &LaplacianMatrix) -> Result<SymmetricMatrix> {
    shifted_pseudoinverse(q.matrix()).map(SymmetricMatrix)
}
