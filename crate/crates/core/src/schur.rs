//! Kron reduction: eliminating nodes from a Laplacian by Schur complement.
//!
//! For kept nodes `V` and eliminated nodes `V^c`,
//! `Q/V^c = Q_VV - Q_VVc (Q_VcVc)^{-1} Q_VcV`. The result is again a
//! Laplacian, it preserves effective resistances between kept nodes, and it
//! is the pseudoinverse Gram matrix of the face of the simplex spanned by `V`.

use nalgebra::{Cholesky, DMatrix};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::graph::LaplacianMatrix;
use crate::linalg::{self, SymmetricMatrix};
use crate::resistance;
use crate::simplex::{check_subset, submatrix};

/// Off-diagonals within this fraction of the largest diagonal entry are
/// snapped to zero after a reduction.
pub const CLAMP_RTOL: f64 = 1e-12;

/// Kept and eliminated node indices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    kept: Vec<usize>,
    eliminated: Vec<usize>,
}

impl Partition {
    /// `kept` keeps its order; the eliminated nodes are listed ascending.
    pub fn new(n: usize, kept: &[usize]) -> Result<Self> {
        if kept.is_empty() {
            return Err(Error::EmptyKeptSet);
        }
        check_subset(kept, n)?;
        let mut is_kept = vec![false; n];
        for &k in kept {
            is_kept[k] = true;
        }
        let eliminated = (0..n).filter(|&i| !is_kept[i]).collect();
        Ok(Partition {
            kept: kept.to_vec(),
            eliminated,
        })
    }

    pub fn kept(&self) -> &[usize] {
        &self.kept
    }

    pub fn eliminated(&self) -> &[usize] {
        &self.eliminated
    }

    /// `(A_VV, A_VVc, A_VcV, A_VcVc)`.
    pub fn blocks(&self, a: &DMatrix<f64>) -> [DMatrix<f64>; 4] {
        let (v, c) = (&self.kept, &self.eliminated);
        [
            submatrix(a, v, v),
            submatrix(a, v, c),
            submatrix(a, c, v),
            submatrix(a, c, c),
        ]
    }
}

/// A reduced Laplacian over `kept` (in that order).
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub laplacian: LaplacianMatrix,
    pub kept: Vec<usize>,
    /// Number of off-diagonal entries snapped to zero (each counted once per pair).
    pub clamped: usize,
}

/// Symmetrizes, snaps rounding-level off-diagonals to zero and recomputes the
/// diagonal so rows sum to exactly zero.
fn canonicalize(a: &DMatrix<f64>) -> (DMatrix<f64>, usize) {
    let n = a.nrows();
    let mut out = linalg::symmetrize(a);
    let scale = out.diagonal().amax();
    let band = CLAMP_RTOL * scale;
    let mut clamped = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            let x = out[(i, j)];
            if x != 0.0 && x.abs() <= band {
                out[(i, j)] = 0.0;
                out[(j, i)] = 0.0;
                clamped += 1;
            }
        }
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| out[(i, j)]).sum();
        out[(i, i)] = -off;
    }
    (out, clamped)
}

/// `Q/V^c` for the kept nodes `kept`. Keeping every node returns `Q`
/// (permuted into `kept` order).
pub fn schur_complement(q: &LaplacianMatrix, kept: &[usize]) -> Result<Reduction> {
    let part = Partition::new(q.order(), kept)?;
    let [vv, vc, cv, cc] = part.blocks(q.matrix());
    if part.eliminated().is_empty() {
        return Ok(Reduction {
            laplacian: LaplacianMatrix::from_trusted(vv),
            kept: kept.to_vec(),
            clamped: 0,
        });
    }
    let chol =
        Cholesky::new(cc).ok_or_else(|| Error::Internal("eliminated block is not positive definite".to_string()))?;
    let reduced = vv - vc * chol.solve(&cv);
    let (reduced, clamped) = canonicalize(&reduced);
    Ok(Reduction {
        laplacian: LaplacianMatrix::from_trusted(reduced),
        kept: kept.to_vec(),
        clamped,
    })
}

/// Eliminates the single node `v`: with `q` the link weights to `v` and `d_v`
/// its degree, the result is `Q' + diag(q) - q q^T / d_v` where `Q'` is the
/// Laplacian of the graph with `v` removed.
pub fn kron_reduce_single(q: &LaplacianMatrix, v: usize) -> Result<Reduction> {
    let n = q.order();
    if v >= n {
        return Err(Error::IndexOutOfRange { index: v, n });
    }
    if n < 3 {
        return Err(Error::TooSmall(n));
    }
    let kept: Vec<usize> = (0..n).filter(|&i| i != v).collect();
    let a = q.matrix();
    let links: Vec<f64> = kept.iter().map(|&i| -a[(i, v)]).collect();
    let degree = a[(v, v)];
    let m = kept.len();
    let mut out = DMatrix::zeros(m, m);
    for (r, &i) in kept.iter().enumerate() {
        for (c, &j) in kept.iter().enumerate() {
            let without_v = if r == c { a[(i, i)] - links[r] } else { a[(i, j)] };
            let star = if r == c { links[r] } else { 0.0 };
            out[(r, c)] = without_v + (star - links[r] * links[c] / degree);
        }
    }
    let (out, clamped) = canonicalize(&out);
    Ok(Reduction {
        laplacian: LaplacianMatrix::from_trusted(out),
        kept,
        clamped,
    })
}

/// The same reduction through the pseudoinverse:
/// `(Q/V^c)^+ = (I - uu^T/v) (Q^+)_VV (I - uu^T/v)`.
pub fn schur_via_pinv(q: &LaplacianMatrix, kept: &[usize]) -> Result<LaplacianMatrix> {
    let part = Partition::new(q.order(), kept)?;
    if kept.len() < 2 {
        return Err(Error::FaceTooSmall(kept.len()));
    }
    let p = q.pseudoinverse()?;
    let face = linalg::center(&submatrix(p, part.kept(), part.kept()));
    let reduced = linalg::spectral_pseudoinverse(&SymmetricMatrix::symmetrized(&face))?;
    Ok(LaplacianMatrix::from_trusted(reduced.into_inner()))
}

#[derive(Debug, Clone, PartialEq)]
pub struct QuotientReport {
    /// One-shot versus reducing to the outer set first.
    pub staged_difference: f64,
    /// One-shot versus eliminating one node at a time.
    pub incremental_difference: f64,
    pub seed: u64,
    /// Original indices in the order they were eliminated.
    pub elimination_order: Vec<usize>,
}

impl QuotientReport {
    pub fn max_difference(&self) -> f64 {
        self.staged_difference.max(self.incremental_difference)
    }
}

/// Compares `Q/(N\W)` with `[Q/(N\V)]/(V\W)` and with single-node
/// elimination of `N\W` in an order shuffled by `seed`.
pub fn check_quotient(q: &LaplacianMatrix, outer: &[usize], inner: &[usize], seed: u64) -> Result<QuotientReport> {
    let n = q.order();
    Partition::new(n, outer)?;
    Partition::new(n, inner)?;
    let inner_in_outer: Vec<usize> = inner
        .iter()
        .map(|w| outer.iter().position(|v| v == w).ok_or(Error::SubsetViolation(*w)))
        .collect::<Result<_>>()?;
    if inner.len() < 2 {
        return Err(Error::FaceTooSmall(inner.len()));
    }

    let one_shot = schur_complement(q, inner)?;
    let first = schur_complement(q, outer)?;
    let staged = schur_complement(&first.laplacian, &inner_in_outer)?;
    let staged_difference = linalg::max_abs_diff(one_shot.laplacian.matrix(), staged.laplacian.matrix());

    let mut order: Vec<usize> = (0..n).filter(|i| !inner.contains(i)).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut current: Vec<usize> = (0..n).collect();
    let mut lap = q.clone();
    for &v in &order {
        let pos = current.iter().position(|&c| c == v).expect("node not yet eliminated");
        lap = kron_reduce_single(&lap, pos)?.laplacian;
        current.remove(pos);
    }
    let positions: Vec<usize> = inner
        .iter()
        .map(|w| current.iter().position(|c| c == w).expect("inner node kept"))
        .collect();
    let incremental = submatrix(lap.matrix(), &positions, &positions);
    let incremental_difference = linalg::max_abs_diff(one_shot.laplacian.matrix(), &incremental);

    Ok(QuotientReport {
        staged_difference,
        incremental_difference,
        seed,
        elimination_order: order,
    })
}

/// `max |Omega(Q/V^c)_ab - Omega(Q)_{V[a] V[b]}|`.
pub fn check_resistance_preservation(q: &LaplacianMatrix, kept: &[usize]) -> Result<f64> {
    if kept.len() < 2 {
        Partition::new(q.order(), kept)?;
        return Err(Error::FaceTooSmall(kept.len()));
    }
    let reduced = schur_complement(q, kept)?;
    let omega_reduced = resistance::resistance_matrix(&reduced.laplacian)?;
    let omega = resistance::resistance_matrix(q)?;
    let restricted = submatrix(omega.matrix(), kept, kept);
    Ok(linalg::max_abs_diff(omega_reduced.matrix(), &restricted))
}
