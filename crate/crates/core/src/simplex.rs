//! Simplex geometry on the other side of the graph correspondence.
//!
//! A simplex on `n` vertices is stored either as an `(n-1) x n` vertex matrix
//! or, independent of rotation and translation, as its canonical Gram matrix
//! `M` (Gram matrix of the centroid-centered vertices) together with `M^+`.
//! For a Laplacian `Q` the simplex with `M^+ = Q` has squared edge lengths
//! equal to the effective resistances, and the sign of each off-diagonal of
//! `M^+` tells whether the dihedral angle between the two facets opposite
//! those vertices is acute, right or obtuse.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::graph::LaplacianMatrix;
use crate::linalg::{self, SymmetricMatrix, ZERO_EIGENVALUE_RTOL};
use crate::resistance::{self, FiedlerBlocks};
use crate::tolerance::Tolerances;

/// Symmetric matrix of squared distances with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct SquaredDistanceMatrix(DMatrix<f64>);

impl SquaredDistanceMatrix {
    pub fn new(d: DMatrix<f64>) -> Result<Self> {
        linalg::check_square_finite(&d)?;
        let n = d.nrows();
        for i in 0..n {
            if d[(i, i)] != 0.0 {
                return Err(Error::NonZeroDiagonal {
                    index: i,
                    value: d[(i, i)],
                });
            }
            for j in (i + 1)..n {
                if d[(i, j)] != d[(j, i)] {
                    return Err(Error::Asymmetric { i, j });
                }
            }
        }
        Ok(Self(d))
    }

    pub(crate) fn from_trusted(d: DMatrix<f64>) -> Self {
        Self(d)
    }

    pub fn order(&self) -> usize {
        self.0.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.0
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.0
    }
}

/// Centered vertex matrix: column `i` is vertex `s_i` in `R^(n-1)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SimplexEmbedding {
    vertices: DMatrix<f64>,
}

impl SimplexEmbedding {
    pub fn vertices(&self) -> &DMatrix<f64> {
        &self.vertices
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.ncols()
    }

    pub fn vertex(&self, i: usize) -> DVector<f64> {
        self.vertices.column(i).into_owned()
    }

    pub fn centroid(&self) -> DVector<f64> {
        self.vertices.column_sum() / self.vertex_count() as f64
    }

    pub fn gram(&self) -> DMatrix<f64> {
        self.vertices.transpose() * &self.vertices
    }

    pub fn squared_distances(&self) -> SquaredDistanceMatrix {
        SquaredDistanceMatrix(resistance::distances_from_gram(&self.gram()))
    }
}

/// Vertices `(s_i)_k = (z_k)_i / sqrt(mu_k)` from the nonzero eigenpairs of `Q`.
pub fn embed_from_laplacian(q: &LaplacianMatrix) -> Result<SimplexEmbedding> {
    let n = q.order();
    let eig = linalg::eigh(&q.as_symmetric())?;
    let dim = n.saturating_sub(1);
    let vertices = DMatrix::from_fn(dim, n, |k, i| eig.vectors()[(i, k)] / eig.values()[k].sqrt());
    Ok(SimplexEmbedding { vertices })
}

/// Canonical Gram matrix `M` of a simplex and its pseudoinverse `M^+`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramPair {
    gram: DMatrix<f64>,
    pinv_gram: DMatrix<f64>,
}

impl GramPair {
    /// The simplex whose canonical pseudoinverse Gram matrix is `Q`.
    pub fn from_laplacian(q: &LaplacianMatrix) -> Result<Self> {
        Ok(GramPair {
            gram: q.pseudoinverse()?.clone(),
            pinv_gram: q.matrix().clone(),
        })
    }

    /// Any symmetric positive semidefinite matrix of rank `n-1` with the
    /// constant vector as kernel is the pseudoinverse Gram of some simplex.
    pub fn from_pinv_gram(pinv_gram: &SymmetricMatrix) -> Result<Self> {
        resistance::check_constant_kernel(pinv_gram.as_matrix())?;
        let gram = linalg::spectral_pseudoinverse(pinv_gram)?;
        Ok(GramPair {
            gram: gram.into_inner(),
            pinv_gram: pinv_gram.as_matrix().clone(),
        })
    }

    pub fn order(&self) -> usize {
        self.gram.nrows()
    }

    /// `M`.
    pub fn gram(&self) -> &DMatrix<f64> {
        &self.gram
    }

    /// `M^+`.
    pub fn pinv_gram(&self) -> &DMatrix<f64> {
        &self.pinv_gram
    }

    pub fn squared_distances(&self) -> SquaredDistanceMatrix {
        SquaredDistanceMatrix(resistance::distances_from_gram(&self.gram))
    }
}

/// `M = (I - uu^T/n) S^T S (I - uu^T/n)` for any representative `S`
/// (one vertex per column, any ambient dimension).
pub fn canonical_gram(vertices: &DMatrix<f64>) -> Result<GramPair> {
    let gram = linalg::center(&(vertices.transpose() * vertices));
    let pinv_gram = match linalg::spectral_pseudoinverse(&SymmetricMatrix::symmetrized(&gram)) {
        Ok(p) => p,
        Err(Error::RankDeficient { .. }) => return Err(Error::DegenerateSimplex),
        Err(e) => return Err(e),
    };
    Ok(GramPair {
        gram: linalg::symmetrize(&gram),
        pinv_gram: pinv_gram.into_inner(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum AngleKind {
    Acute,
    Right,
    Obtuse,
}

impl fmt::Display for AngleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            AngleKind::Acute => "acute",
            AngleKind::Right => "right",
            AngleKind::Obtuse => "obtuse",
        })
    }
}

/// Dihedral angle between the facets opposite vertices `i` and `j`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DihedralAngle {
    pub i: usize,
    pub j: usize,
    /// `cos(pi - phi_ij)`.
    pub cosine: f64,
    pub kind: AngleKind,
}

impl DihedralAngle {
    /// The interior angle `phi_ij` in radians.
    pub fn angle(&self) -> f64 {
        std::f64::consts::PI - self.cosine.clamp(-1.0, 1.0).acos()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct AngleClassification {
    /// One entry per unordered pair, `i < j`, in lexicographic order.
    pub angles: Vec<DihedralAngle>,
    /// Sign dead-band applied to the entries of `M^+`.
    pub tolerance: f64,
}

impl AngleClassification {
    pub fn get(&self, i: usize, j: usize) -> Option<&DihedralAngle> {
        let (i, j) = (i.min(j), i.max(j));
        self.angles.iter().find(|a| a.i == i && a.j == j)
    }

    pub fn obtuse(&self) -> impl Iterator<Item = &DihedralAngle> {
        self.angles.iter().filter(|a| a.kind == AngleKind::Obtuse)
    }
}

/// Classifies every dihedral angle by the sign of `(M^+)_ij`, with a dead-band
/// of `tol.structural * max_i (M^+)_ii` classified as right.
pub fn dihedral_angles(gp: &GramPair, tol: &Tolerances) -> AngleClassification {
    let p = &gp.pinv_gram;
    let n = p.nrows();
    let tau = tol.structural * p.diagonal().max();
    let mut angles = Vec::with_capacity(n * n.saturating_sub(1) / 2);
    for i in 0..n {
        for j in (i + 1)..n {
            let x = p[(i, j)];
            let kind = if x > tau {
                AngleKind::Obtuse
            } else if x < -tau {
                AngleKind::Acute
            } else {
                AngleKind::Right
            };
            let cosine = x / (p[(i, i)] * p[(j, j)]).sqrt();
            angles.push(DihedralAngle { i, j, cosine, kind });
        }
    }
    AngleClassification { angles, tolerance: tau }
}

/// True when no dihedral angle is obtuse.
pub fn is_hyperacute(gp: &GramPair, tol: &Tolerances) -> bool {
    dihedral_angles(gp, tol).obtuse().next().is_none()
}

/// Rejects empty subsets, repeated indices and indices `>= n`.
pub(crate) fn check_subset(subset: &[usize], n: usize) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    let mut seen = vec![false; n];
    for &i in subset {
        if i >= n {
            return Err(Error::IndexOutOfRange { index: i, n });
        }
        if seen[i] {
            return Err(Error::DuplicateIndex(i));
        }
        seen[i] = true;
    }
    Ok(())
}

pub(crate) fn submatrix(a: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |r, c| a[(rows[r], cols[c])])
}

/// Squared distances of the face spanned by `subset`, in subset order.
pub fn face_distance(d: &SquaredDistanceMatrix, subset: &[usize]) -> Result<SquaredDistanceMatrix> {
    check_subset(subset, d.order())?;
    Ok(SquaredDistanceMatrix(submatrix(&d.0, subset, subset)))
}

/// Canonical Gram pair of the face spanned by `subset`: the centered
/// principal submatrix of `M` and its pseudoinverse.
pub fn face_gram(gp: &GramPair, subset: &[usize]) -> Result<GramPair> {
    check_subset(subset, gp.order())?;
    if subset.len() < 2 {
        return Err(Error::FaceTooSmall(subset.len()));
    }
    let gram = linalg::symmetrize(&linalg::center(&submatrix(&gp.gram, subset, subset)));
    let pinv_gram = linalg::spectral_pseudoinverse(&SymmetricMatrix::symmetrized(&gram))?;
    Ok(GramPair {
        gram,
        pinv_gram: pinv_gram.into_inner(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct CircumsphereReport {
    /// `S r`.
    pub center: DVector<f64>,
    pub radius: f64,
    /// `max_i | |S r - s_i| - R |`.
    pub max_deviation: f64,
}

impl CircumsphereReport {
    pub const RTOL: f64 = 1e-8;

    pub fn passed(&self) -> bool {
        self.max_deviation <= Self::RTOL * self.radius
    }
}

/// Measures how far each vertex lies from the sphere of radius `R` about `S r`.
pub fn circumsphere_check(s: &SimplexEmbedding, blocks: &FiedlerBlocks) -> CircumsphereReport {
    let center = &s.vertices * &blocks.r;
    let max_deviation = (0..s.vertex_count())
        .map(|i| ((&center - s.vertices.column(i)).norm() - blocks.radius).abs())
        .fold(0.0_f64, f64::max);
    CircumsphereReport {
        center,
        radius: blocks.radius,
        max_deviation,
    }
}

fn ln_factorial(k: usize) -> f64 {
    (2..=k).map(|i| (i as f64).ln()).sum()
}

/// Volume of the simplex with squared edge lengths `d`, from the
/// Cayley-Menger determinant:
/// `vol^2 = (-1)^n det([[0, u^T], [u, D]]) / (((n-1)!)^2 2^(n-1))`.
pub fn cayley_menger_volume(d: &SquaredDistanceMatrix) -> Result<f64> {
    let n = d.order();
    if n == 0 {
        return Err(Error::EmptySubset);
    }
    // Realizable and nondegenerate iff -PDP/2 is PSD of rank n-1.
    let gram = SymmetricMatrix::symmetrized(&(linalg::center(&d.0) * -0.5));
    let eig = linalg::eigh(&gram)?;
    let thr = eig.zero_threshold(ZERO_EIGENVALUE_RTOL);
    let realizable = eig.values().min() >= -thr && eig.zero_count(ZERO_EIGENVALUE_RTOL) == 1;

    let bordered = resistance::bordered_distance_matrix(&d.0);
    let lu = bordered.lu();
    let u = lu.u();
    let mut sign = lu.p().determinant::<f64>();
    let mut ln_abs = 0.0;
    for x in u.diagonal().iter() {
        if *x == 0.0 {
            return Err(Error::DegenerateDistanceMatrix(0.0));
        }
        sign *= x.signum();
        ln_abs += x.abs().ln();
    }
    if n % 2 == 1 {
        sign = -sign;
    }
    let ln_vol2 = ln_abs - 2.0 * ln_factorial(n - 1) - (n - 1) as f64 * std::f64::consts::LN_2;
    let vol2 = sign * ln_vol2.exp();
    if !realizable || vol2.is_nan() || vol2 <= 0.0 {
        return Err(Error::DegenerateDistanceMatrix(vol2));
    }
    Ok((0.5 * ln_vol2).exp())
}
