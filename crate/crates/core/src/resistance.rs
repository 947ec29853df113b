//! Effective resistances and the identities that tie them to the Laplacian.
//!
//! The resistance matrix is `Omega = zeta u^T + u zeta^T - 2 Q^+` with
//! `zeta = diag(Q^+)`. Bordering it with a row and column of ones gives the
//! Cayley-Menger matrix, whose inverse is built from `Q`, the circumcenter
//! coordinates `r` and the circumradius `R`:
//!
//! ```text
//! -1/2 [ 0  u^T   ]   [ 4R^2  -2r^T ]
//!      [ u  Omega ] * [ -2r    Q    ] = I
//! ```

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::LaplacianMatrix;
use crate::linalg::{self, SymmetricMatrix};
use crate::simplex::SquaredDistanceMatrix;
use crate::tolerance::Tolerances;

/// Matrix of pairwise effective resistances.
#[derive(Debug, Clone, PartialEq)]
pub struct ResistanceMatrix(DMatrix<f64>);

impl ResistanceMatrix {
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.0[(i, j)]
    }

    /// Resistances are the squared vertex distances of the corresponding simplex.
    pub fn to_distances(&self) -> SquaredDistanceMatrix {
        SquaredDistanceMatrix::from_trusted(self.0.clone())
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

fn check_index(i: usize, n: usize) -> Result<()> {
    if i >= n {
        Err(Error::IndexOutOfRange { index: i, n })
    } else {
        Ok(())
    }
}

/// `(e_i - e_j)^T Q^+ (e_i - e_j)`.
pub fn effective_resistance(q: &LaplacianMatrix, i: usize, j: usize) -> Result<f64> {
    let n = q.order();
    check_index(i, n)?;
    check_index(j, n)?;
    if i == j {
        return Ok(0.0);
    }
    let p = q.pseudoinverse()?;
    let x = linalg::basis(n, i) - linalg::basis(n, j);
    Ok((x.transpose() * p * &x)[(0, 0)])
}

/// Squared distances `diag(G) u^T + u diag(G)^T - 2G` read off a Gram matrix.
pub(crate) fn distances_from_gram(gram: &DMatrix<f64>) -> DMatrix<f64> {
    let n = gram.nrows();
    DMatrix::from_fn(n, n, |i, j| {
        if i == j {
            0.0
        } else {
            gram[(i, i)] + gram[(j, j)] - 2.0 * gram[(i, j)]
        }
    })
}

pub fn resistance_matrix(q: &LaplacianMatrix) -> Result<ResistanceMatrix> {
    Ok(ResistanceMatrix(distances_from_gram(q.pseudoinverse()?)))
}

/// `zeta = diag(Q^+)`, circumcenter coordinates `r = Q zeta / 2 + u/n`
/// (so `S r` is the circumcenter) and circumradius `R`.
#[derive(Debug, Clone, PartialEq)]
pub struct FiedlerBlocks {
    pub zeta: DVector<f64>,
    pub r: DVector<f64>,
    pub radius: f64,
}

impl FiedlerBlocks {
    /// `q_like` plays the role of `Q` and `pinv_like` of `Q^+`.
    pub(crate) fn from_pair(q_like: &DMatrix<f64>, pinv_like: &DMatrix<f64>) -> Self {
        let n = q_like.nrows();
        let u_over_n = linalg::ones(n) / n as f64;
        let zeta = pinv_like.diagonal();
        let r = q_like * &zeta * 0.5 + &u_over_n;
        let radius = (0.5 * zeta.dot(&(&r + &u_over_n))).sqrt();
        FiedlerBlocks { zeta, r, radius }
    }

    /// The bordered matrix `[[4R^2, -2r^T], [-2r, Q]]`.
    pub(crate) fn bordered_inverse(&self, q_like: &DMatrix<f64>) -> DMatrix<f64> {
        let n = q_like.nrows();
        let mut b = DMatrix::zeros(n + 1, n + 1);
        b[(0, 0)] = 4.0 * self.radius * self.radius;
        for i in 0..n {
            b[(0, i + 1)] = -2.0 * self.r[i];
            b[(i + 1, 0)] = -2.0 * self.r[i];
        }
        b.view_mut((1, 1), (n, n)).copy_from(q_like);
        b
    }
}

pub fn fiedler_blocks(q: &LaplacianMatrix) -> Result<FiedlerBlocks> {
    Ok(FiedlerBlocks::from_pair(q.matrix(), q.pseudoinverse()?))
}

/// The Cayley-Menger matrix `[[0, u^T], [u, D]]`.
pub fn bordered_distance_matrix(d: &DMatrix<f64>) -> DMatrix<f64> {
    let n = d.nrows();
    let mut b = DMatrix::from_element(n + 1, n + 1, 1.0);
    b[(0, 0)] = 0.0;
    b.view_mut((1, 1), (n, n)).copy_from(d);
    b
}

/// Max-abs residuals of `AB - I` and `BA - I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IdentityResidual {
    pub left: f64,
    pub right: f64,
}

impl IdentityResidual {
    pub fn max(&self) -> f64 {
        self.left.max(self.right)
    }

    fn of(a: &DMatrix<f64>, b: &DMatrix<f64>) -> Self {
        let id = DMatrix::identity(a.nrows(), a.ncols());
        IdentityResidual {
            left: linalg::max_abs_diff(&(a * b), &id),
            right: linalg::max_abs_diff(&(b * a), &id),
        }
    }
}

impl fmt::Display for IdentityResidual {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "|AB-I|={:e} |BA-I|={:e}", self.left, self.right)
    }
}

fn identity_residual(d: &DMatrix<f64>, q_like: &DMatrix<f64>, blocks: &FiedlerBlocks) -> IdentityResidual {
    let a = bordered_distance_matrix(d) * -0.5;
    let b = blocks.bordered_inverse(q_like);
    IdentityResidual::of(&a, &b)
}

pub fn verify_fiedler_identity(q: &LaplacianMatrix) -> Result<IdentityResidual> {
    let blocks = fiedler_blocks(q)?;
    let omega = resistance_matrix(q)?;
    Ok(identity_residual(omega.matrix(), q.matrix(), &blocks))
}

/// The same identity for any simplex: `pinv_gram` is a canonical
/// pseudoinverse Gram matrix (kernel spanned by `u`) and `d` the squared
/// distance matrix of that simplex.
pub fn verify_identity_general(pinv_gram: &SymmetricMatrix, d: &SquaredDistanceMatrix) -> Result<IdentityResidual> {
    let n = pinv_gram.order();
    if d.order() != n {
        return Err(Error::NonSquare {
            rows: n,
            cols: d.order(),
        });
    }
    let gram = linalg::spectral_pseudoinverse(pinv_gram)?;
    check_constant_kernel(pinv_gram.as_matrix())?;
    let blocks = FiedlerBlocks::from_pair(pinv_gram.as_matrix(), gram.as_matrix());
    Ok(identity_residual(d.matrix(), pinv_gram.as_matrix(), &blocks))
}

pub(crate) fn check_constant_kernel(a: &DMatrix<f64>) -> Result<()> {
    let n = a.nrows();
    let residual = (a * linalg::ones(n)).amax() / (n as f64).sqrt();
    if residual > 1e-9 * linalg::max_abs(a).max(f64::MIN_POSITIVE) {
        return Err(Error::KernelNotConstant(residual));
    }
    Ok(())
}

/// `Omega^{-1} = -1/2 (Q - r r^T / R^2)`.
pub fn inverse_resistance_matrix(q: &LaplacianMatrix) -> Result<SymmetricMatrix> {
    let blocks = fiedler_blocks(q)?;
    let rr = &blocks.r * blocks.r.transpose() / (blocks.radius * blocks.radius);
    Ok(SymmetricMatrix::symmetrized(&((q.matrix() - rr) * -0.5)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MetricMode {
    /// Check the entries as given.
    Plain,
    /// Check the entrywise square roots.
    Sqrt,
}

impl fmt::Display for MetricMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            MetricMode::Plain => "plain",
            MetricMode::Sqrt => "sqrt",
        })
    }
}

/// `x_ik > x_ij + x_jk` by `excess`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleViolation {
    pub i: usize,
    pub j: usize,
    pub k: usize,
    pub excess: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricReport {
    pub mode: MetricMode,
    pub order: usize,
    /// Off-diagonal pairs that are not strictly positive.
    pub indiscernible_pairs: usize,
    pub triples_checked: usize,
    pub violations: usize,
    pub worst: Option<TriangleViolation>,
    /// Absolute slack actually applied.
    pub slack: f64,
}

impl MetricReport {
    pub fn passed(&self) -> bool {
        self.indiscernible_pairs == 0 && self.violations == 0
    }
}

/// Exhaustive check of the metric axioms over all ordered triples.
pub fn check_metric(d: &DMatrix<f64>, mode: MetricMode, tol: &Tolerances) -> Result<MetricReport> {
    linalg::check_square_finite(d)?;
    let n = d.nrows();
    let scale = linalg::max_abs(d);
    let entry_tol = tol.metric_slack * scale;
    for i in 0..n {
        if d[(i, i)].abs() > entry_tol {
            return Err(Error::NonZeroDiagonal {
                index: i,
                value: d[(i, i)],
            });
        }
        for j in (i + 1)..n {
            if (d[(i, j)] - d[(j, i)]).abs() > entry_tol {
                return Err(Error::Asymmetric { i, j });
            }
        }
    }

    let x = match mode {
        MetricMode::Plain => d.clone(),
        MetricMode::Sqrt => d.map(|v| v.max(0.0).sqrt()),
    };
    let slack = tol.metric_slack * linalg::max_abs(&x);

    let mut indiscernible_pairs = 0;
    for i in 0..n {
        for j in (i + 1)..n {
            if x[(i, j)] <= 0.0 {
                indiscernible_pairs += 1;
            }
        }
    }

    let mut triples_checked = 0;
    let mut violations = 0;
    let mut worst: Option<TriangleViolation> = None;
    for i in 0..n {
        for j in 0..n {
            if j == i {
                continue;
            }
            for k in 0..n {
                if k == i || k == j {
                    continue;
                }
                triples_checked += 1;
                let excess = x[(i, k)] - x[(i, j)] - x[(j, k)];
                if excess > slack {
                    violations += 1;
                    if worst.is_none_or(|w| excess > w.excess) {
                        worst = Some(TriangleViolation { i, j, k, excess });
                    }
                }
            }
        }
    }

    Ok(MetricReport {
        mode,
        order: n,
        indiscernible_pairs,
        triples_checked,
        violations,
        worst,
        slack,
    })
}
