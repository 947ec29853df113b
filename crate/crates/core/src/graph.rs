//! Weighted graphs, their Laplacian matrices, and the checks that take a
//! matrix back to a graph.
//!
//! A connected weighted graph on `n` labeled nodes and its Laplacian
//! `Q = diag(d) - W` determine each other. [`validate_laplacian`] checks both
//! the entrywise characterization (symmetry, sign pattern, zero row sums,
//! irreducibility) and the spectral one (positive semidefinite with a single
//! zero eigenvalue whose eigenvector is constant), and reports whether the
//! two agree.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::sync::OnceLock;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::linalg::{self, SymmetricMatrix};
use crate::tolerance::Tolerances;

/// Connected graph with strictly positive link weights.
///
/// Node indices follow the order in which labels were first seen. Links are
/// stored once, as `(i, j)` with `i < j`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<String>,
    links: BTreeMap<(usize, usize), f64>,
}

impl WeightedGraph {
    /// Builds a graph from labels and `(i, j, weight)` records. Parallel
    /// records are merged by adding their weights. Record positions are
    /// reported 1-based in errors.
    pub fn new<I>(labels: Vec<String>, records: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        let n = labels.len();
        let mut links = BTreeMap::new();
        for (pos, (i, j, w)) in records.into_iter().enumerate() {
            let line = pos + 1;
            for idx in [i, j] {
                if idx >= n {
                    return Err(Error::IndexOutOfRange { index: idx, n });
                }
            }
            if i == j {
                return Err(Error::SelfLoop {
                    line,
                    label: labels[i].clone(),
                });
            }
            if !(w.is_finite() && w > 0.0) {
                return Err(Error::NonPositiveWeight { line, weight: w });
            }
            *links.entry((i.min(j), i.max(j))).or_insert(0.0) += w;
        }
        let g = WeightedGraph { labels, links };
        g.check_shape()?;
        Ok(g)
    }

    fn check_shape(&self) -> Result<()> {
        if self.labels.len() < 2 {
            return Err(Error::TooFewNodes(self.labels.len()));
        }
        let components = self.component_count();
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(())
    }

    fn component_count(&self) -> usize {
        let n = self.labels.len();
        let mut adjacency = vec![Vec::new(); n];
        for &(i, j) in self.links.keys() {
            adjacency[i].push(j);
            adjacency[j].push(i);
        }
        count_components(&adjacency)
    }

    pub fn node_count(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    /// Links as `((i, j), weight)` with `i < j`, in index order.
    pub fn links(&self) -> impl Iterator<Item = ((usize, usize), f64)> + '_ {
        self.links.iter().map(|(&k, &w)| (k, w))
    }

    pub fn link_count(&self) -> usize {
        self.links.len()
    }

    pub fn weight(&self, i: usize, j: usize) -> Option<f64> {
        self.links.get(&(i.min(j), i.max(j))).copied()
    }

    /// Weighted degrees `d_i`.
    pub fn degrees(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.labels.len()];
        for (&(i, j), &w) in &self.links {
            d[i] += w;
            d[j] += w;
        }
        d
    }
}

fn count_components(adjacency: &[Vec<usize>]) -> usize {
    let n = adjacency.len();
    let mut seen = vec![false; n];
    let mut components = 0;
    let mut stack = Vec::new();
    for start in 0..n {
        if seen[start] {
            continue;
        }
        components += 1;
        seen[start] = true;
        stack.push(start);
        while let Some(v) = stack.pop() {
            for &w in &adjacency[v] {
                if !seen[w] {
                    seen[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    components
}

/// Parses the edge-list format: one `<label_a> <label_b> <weight>` record per
/// line, blank lines and `#` comments ignored.
pub fn parse_graph(text: &str) -> Result<WeightedGraph> {
    let mut labels: Vec<String> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();
    let mut links: BTreeMap<(usize, usize), f64> = BTreeMap::new();

    for (lineno, raw) in text.lines().enumerate() {
        let line = lineno + 1;
        let trimmed = raw.trim_start_matches(|c: char| c.is_ascii_whitespace());
        if trimmed.is_empty() || trimmed.starts_with('#') {
            continue;
        }
        let fields: Vec<&str> = trimmed.split_ascii_whitespace().collect();
        if fields.len() != 3 {
            return Err(Error::Syntax {
                line,
                message: format!("expected '<label> <label> <weight>', found {} fields", fields.len()),
            });
        }
        let weight: f64 = fields[2].parse().map_err(|_| Error::Syntax {
            line,
            message: format!("'{}' is not a decimal number", fields[2]),
        })?;
        if fields[0] == fields[1] {
            return Err(Error::SelfLoop {
                line,
                label: fields[0].to_string(),
            });
        }
        if !(weight.is_finite() && weight > 0.0) {
            return Err(Error::NonPositiveWeight { line, weight });
        }
        let mut intern = |label: &str| -> usize {
            *index.entry(label.to_string()).or_insert_with(|| {
                labels.push(label.to_string());
                labels.len() - 1
            })
        };
        let a = intern(fields[0]);
        let b = intern(fields[1]);
        *links.entry((a.min(b), a.max(b))).or_insert(0.0) += weight;
    }

    let g = WeightedGraph { labels, links };
    g.check_shape()?;
    Ok(g)
}

/// Laplacian matrix of a connected weighted graph.
///
/// The pseudoinverse is computed on first use and cached.
#[derive(Debug, Clone)]
pub struct LaplacianMatrix {
    q: DMatrix<f64>,
    pinv: OnceLock<DMatrix<f64>>,
}

impl LaplacianMatrix {
    /// Validates `a` and wraps it; the stored matrix is exactly symmetric.
    pub fn new(a: DMatrix<f64>, tol: &Tolerances) -> Result<Self> {
        let report = validate_laplacian(&a, tol)?;
        if !report.passed() {
            return Err(Error::NotALaplacian(report.failure_summary()));
        }
        Ok(Self::from_trusted(linalg::symmetrize(&a)))
    }

    /// `(Q)_ii = d_i`, `(Q)_ij = -w_ij` on links and zero elsewhere.
    pub fn from_graph(g: &WeightedGraph) -> Self {
        let n = g.node_count();
        let mut q = DMatrix::zeros(n, n);
        for ((i, j), w) in g.links() {
            q[(i, j)] = -w;
            q[(j, i)] = -w;
        }
        for (i, d) in g.degrees().into_iter().enumerate() {
            q[(i, i)] = d;
        }
        Self::from_trusted(q)
    }

    pub(crate) fn from_trusted(q: DMatrix<f64>) -> Self {
        LaplacianMatrix {
            q,
            pinv: OnceLock::new(),
        }
    }

    pub fn order(&self) -> usize {
        self.q.nrows()
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn as_symmetric(&self) -> SymmetricMatrix {
        SymmetricMatrix::symmetrized(&self.q)
    }

    /// `Q^+`, the inverse of `Q` on the complement of the constant vector.
    pub fn pseudoinverse(&self) -> Result<&DMatrix<f64>> {
        if let Some(p) = self.pinv.get() {
            return Ok(p);
        }
        let p = linalg::shifted_pseudoinverse(&self.q)?;
        Ok(self.pinv.get_or_init(|| p))
    }

    pub fn into_matrix(self) -> DMatrix<f64> {
        self.q
    }
}

impl PartialEq for LaplacianMatrix {
    fn eq(&self, other: &Self) -> bool {
        self.q == other.q
    }
}

/// Same as [`LaplacianMatrix::from_graph`].
pub fn build_laplacian(g: &WeightedGraph) -> LaplacianMatrix {
    LaplacianMatrix::from_graph(g)
}

/// Reads a graph off a validated Laplacian. Labels are `"0".."n-1"`;
/// off-diagonal entries inside the sign dead-band are treated as absent links.
pub fn graph_from_laplacian(a: &DMatrix<f64>, tol: &Tolerances) -> Result<WeightedGraph> {
    let report = validate_laplacian(a, tol)?;
    if !report.passed() {
        return Err(Error::NotALaplacian(report.failure_summary()));
    }
    let n = a.nrows();
    let dead_band = tol.structural * report.scale;
    let labels = (0..n).map(|i| i.to_string()).collect();
    let mut records = Vec::new();
    for i in 0..n {
        for j in (i + 1)..n {
            let w = -0.5 * (a[(i, j)] + a[(j, i)]);
            if w > dead_band {
                records.push((i, j, w));
            }
        }
    }
    WeightedGraph::new(labels, records)
}

/// One of the seven properties checked by [`validate_laplacian`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum LaplacianProperty {
    Symmetric,
    NonPositiveOffDiagonal,
    ZeroRowSums,
    Irreducible,
    PositiveSemidefinite,
    SingleZeroEigenvalue,
    ConstantNullVector,
}

impl LaplacianProperty {
    pub const STRUCTURAL: [LaplacianProperty; 4] = [
        LaplacianProperty::Symmetric,
        LaplacianProperty::NonPositiveOffDiagonal,
        LaplacianProperty::ZeroRowSums,
        LaplacianProperty::Irreducible,
    ];

    pub const SPECTRAL: [LaplacianProperty; 3] = [
        LaplacianProperty::PositiveSemidefinite,
        LaplacianProperty::SingleZeroEigenvalue,
        LaplacianProperty::ConstantNullVector,
    ];

    pub fn name(self) -> &'static str {
        match self {
            LaplacianProperty::Symmetric => "symmetric",
            LaplacianProperty::NonPositiveOffDiagonal => "non-positive off-diagonals",
            LaplacianProperty::ZeroRowSums => "zero row sums",
            LaplacianProperty::Irreducible => "irreducible",
            LaplacianProperty::PositiveSemidefinite => "positive semidefinite",
            LaplacianProperty::SingleZeroEigenvalue => "single zero eigenvalue",
            LaplacianProperty::ConstantNullVector => "constant null vector",
        }
    }
}

impl fmt::Display for LaplacianProperty {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PropertyCheck {
    pub property: LaplacianProperty,
    pub passed: bool,
    /// The quantity compared against `threshold` (for irreducibility, the
    /// number of components; for the zero eigenvalue, their count).
    pub measured: f64,
    pub threshold: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ValidationReport {
    pub checks: Vec<PropertyCheck>,
    /// `max_i |A_ii|`, the scale of the structural tolerances.
    pub scale: f64,
    pub eigenvalues: Vec<f64>,
    pub tolerances: Tolerances,
}

impl ValidationReport {
    pub fn check(&self, p: LaplacianProperty) -> &PropertyCheck {
        self.checks
            .iter()
            .find(|c| c.property == p)
            .expect("every property is checked")
    }

    fn all(&self, props: &[LaplacianProperty]) -> bool {
        props.iter().all(|&p| self.check(p).passed)
    }

    /// Verdict from the entrywise characterization.
    pub fn passed(&self) -> bool {
        self.all(&LaplacianProperty::STRUCTURAL)
    }

    /// Verdict from the spectral characterization plus the sign pattern.
    pub fn spectral_verdict(&self) -> bool {
        self.all(&LaplacianProperty::SPECTRAL) && self.check(LaplacianProperty::NonPositiveOffDiagonal).passed
    }

    /// Whether the two characterizations agree.
    pub fn consistent(&self) -> bool {
        self.passed() == self.spectral_verdict()
    }

    pub fn failed(&self) -> Vec<LaplacianProperty> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.property).collect()
    }

    pub fn failure_summary(&self) -> String {
        let failed: Vec<&str> = self.failed().into_iter().map(LaplacianProperty::name).collect();
        if failed.is_empty() {
            "nothing".to_string()
        } else {
            failed.join(", ")
        }
    }
}

/// Checks every Laplacian property of `a` and reports each separately.
pub fn validate_laplacian(a: &DMatrix<f64>, tol: &Tolerances) -> Result<ValidationReport> {
    linalg::check_square_finite(a)?;
    let n = a.nrows();
    if n == 0 {
        return Err(Error::TooFewNodes(0));
    }
    let scale = a.diagonal().amax();
    let band = tol.structural * scale;

    let asymmetry = linalg::max_abs_diff(a, &a.transpose());
    let symmetric = asymmetry <= band;

    let mut max_positive = 0.0_f64;
    let mut adjacency = vec![Vec::new(); n];
    for i in 0..n {
        for j in 0..n {
            if i == j {
                continue;
            }
            max_positive = max_positive.max(a[(i, j)]);
            if a[(i, j)].abs() > band || a[(j, i)].abs() > band {
                adjacency[i].push(j);
            }
        }
    }
    let row_sum = (0..n)
        .map(|i| a.row(i).sum().abs().max(a.column(i).sum().abs()))
        .fold(0.0_f64, f64::max);
    let components = count_components(&adjacency);

    let sym = SymmetricMatrix::symmetrized(a);
    let eig = linalg::eigh(&sym)?;
    let zero_thr = eig.zero_threshold(tol.zero_eigenvalue);
    let min_eig = eig.values().min();
    let zeros = eig.zero_count(tol.zero_eigenvalue);
    let unit = linalg::ones(n) / (n as f64).sqrt();
    let null_residual = (sym.as_matrix() * &unit).amax();

    let checks = vec![
        PropertyCheck {
            property: LaplacianProperty::Symmetric,
            passed: symmetric,
            measured: asymmetry,
            threshold: band,
        },
        PropertyCheck {
            property: LaplacianProperty::NonPositiveOffDiagonal,
            passed: max_positive <= band,
            measured: max_positive,
            threshold: band,
        },
        PropertyCheck {
            property: LaplacianProperty::ZeroRowSums,
            passed: row_sum <= band,
            measured: row_sum,
            threshold: band,
        },
        PropertyCheck {
            property: LaplacianProperty::Irreducible,
            passed: components == 1,
            measured: components as f64,
            threshold: 1.0,
        },
        PropertyCheck {
            property: LaplacianProperty::PositiveSemidefinite,
            // A non-symmetric matrix is never positive semidefinite here.
            passed: symmetric && min_eig >= -zero_thr,
            measured: min_eig,
            threshold: -zero_thr,
        },
        PropertyCheck {
            property: LaplacianProperty::SingleZeroEigenvalue,
            passed: zeros == 1,
            measured: zeros as f64,
            threshold: 1.0,
        },
        PropertyCheck {
            property: LaplacianProperty::ConstantNullVector,
            passed: null_residual <= zero_thr,
            measured: null_residual,
            threshold: zero_thr,
        },
    ];

    Ok(ValidationReport {
        checks,
        scale,
        eigenvalues: eig.values().iter().copied().collect(),
        tolerances: *tol,
    })
}

/// Weighted spanning-tree count: the product of the nonzero Laplacian
/// eigenvalues divided by `n`.
pub fn spanning_tree_count(q: &LaplacianMatrix) -> Result<f64> {
    let n = q.order();
    let eig = linalg::eigh(&q.as_symmetric())?;
    let product: f64 = eig.values().iter().take(n.saturating_sub(1)).product();
    Ok(product / n as f64)
}
