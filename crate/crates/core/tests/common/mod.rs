#![allow(dead_code)]

use laplacian_simplex::{build_laplacian, LaplacianMatrix, WeightedGraph};
use nalgebra::DMatrix;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const CORPUS_SEED: u64 = 0x5eed_2024;
pub const CORPUS_SIZE: usize = 200;

pub fn labels(n: usize) -> Vec<String> {
    (0..n).map(|i| format!("v{i}")).collect()
}

/// A random spanning tree plus extra links, weights drawn from `(0.1, 10)`.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize) -> WeightedGraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut records = Vec::new();
    for k in 1..n {
        let parent = order[rng.random_range(0..k)];
        records.push((parent, order[k]));
    }
    let density: f64 = rng.random_range(0.0..0.5);
    for i in 0..n {
        for j in i + 1..n {
            if rng.random_bool(density) {
                records.push((i, j));
            }
        }
    }
    let records: Vec<_> = records.into_iter().map(|(i, j)| (i, j, weight(rng))).collect();
    WeightedGraph::new(labels(n), records).expect("connected by construction")
}

fn weight(rng: &mut ChaCha8Rng) -> f64 {
    loop {
        let w: f64 = rng.random_range(0.1..10.0);
        if w > 0.1 {
            return w;
        }
    }
}

pub fn random_laplacian(seed: u64, n: usize) -> (WeightedGraph, LaplacianMatrix) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let g = random_graph(&mut rng, n);
    let q = build_laplacian(&g);
    (g, q)
}

/// Connected graphs with `n` in `[2, 50]`.
pub fn corpus() -> Vec<(WeightedGraph, LaplacianMatrix)> {
    let mut rng = ChaCha8Rng::seed_from_u64(CORPUS_SEED);
    (0..CORPUS_SIZE)
        .map(|k| {
            let n = if k < 49 { k + 2 } else { rng.random_range(2..=50) };
            let g = random_graph(&mut rng, n);
            let q = build_laplacian(&g);
            (g, q)
        })
        .collect()
}

/// Sorted random subset of `0..n` with at least `min` elements.
pub fn random_subset(rng: &mut ChaCha8Rng, n: usize, min: usize) -> Vec<usize> {
    let size = rng.random_range(min..=n);
    let mut all: Vec<usize> = (0..n).collect();
    all.shuffle(rng);
    let mut s = all[..size].to_vec();
    s.sort_unstable();
    s
}

pub fn unit_graph(n: usize, links: &[(usize, usize)]) -> WeightedGraph {
    WeightedGraph::new(labels(n), links.iter().map(|&(i, j)| (i, j, 1.0))).unwrap()
}

pub fn complete_graph(n: usize) -> WeightedGraph {
    let links: Vec<_> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    unit_graph(n, &links)
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    parent[x] = r;
    r
}

/// Weighted spanning-tree count by enumerating every `(n-1)`-subset of links.
pub fn brute_force_spanning_trees(n: usize, links: &[(usize, usize, f64)]) -> f64 {
    fn go(n: usize, links: &[(usize, usize, f64)], start: usize, chosen: &mut Vec<usize>, total: &mut f64) {
        if chosen.len() == n - 1 {
            let mut parent: Vec<usize> = (0..n).collect();
            let mut product = 1.0;
            for &e in chosen.iter() {
                let (a, b, w) = links[e];
                let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
                if ra == rb {
                    return;
                }
                parent[ra] = rb;
                product *= w;
            }
            *total += product;
            return;
        }
        for e in start..links.len() {
            if links.len() - e < n - 1 - chosen.len() {
                break;
            }
            chosen.push(e);
            go(n, links, e + 1, chosen, total);
            chosen.pop();
        }
    }
    if n == 1 {
        return 1.0;
    }
    let mut total = 0.0;
    go(n, links, 0, &mut Vec::new(), &mut total);
    total
}

pub fn is_connected(n: usize, links: &[(usize, usize)]) -> bool {
    let mut parent: Vec<usize> = (0..n).collect();
    let mut components = n;
    for &(a, b) in links {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
            components -= 1;
        }
    }
    components == 1
}

/// Every labeled simple graph on `n` nodes, as link lists.
pub fn all_graphs(n: usize) -> impl Iterator<Item = Vec<(usize, usize)>> {
    let pairs: Vec<(usize, usize)> = (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect();
    (0u32..1 << pairs.len()).map(move |mask| {
        pairs
            .iter()
            .enumerate()
            .filter(|(k, _)| mask >> k & 1 == 1)
            .map(|(_, &p)| p)
            .collect()
    })
}

/// Determinant by Laplace expansion along the first row.
pub fn cofactor_determinant(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    match n {
        0 => 1.0,
        1 => a[(0, 0)],
        _ => (0..n)
            .map(|j| {
                let minor = a.clone().remove_row(0).remove_column(j);
                let sign = if j % 2 == 0 { 1.0 } else { -1.0 };
                sign * a[(0, j)] * cofactor_determinant(&minor)
            })
            .sum(),
    }
}

/// Two-terminal series-parallel network.
#[derive(Debug, Clone)]
pub enum Circuit {
    Edge(f64),
    Series(Box<Circuit>, Box<Circuit>),
    Parallel(Box<Circuit>, Box<Circuit>),
}

impl Circuit {
    pub fn random(rng: &mut ChaCha8Rng, depth: usize) -> Circuit {
        if depth == 0 || rng.random_bool(0.25) {
            return Circuit::Edge(weight(rng));
        }
        let a = Box::new(Circuit::random(rng, depth - 1));
        let b = Box::new(Circuit::random(rng, depth - 1));
        if rng.random_bool(0.5) {
            Circuit::Series(a, b)
        } else {
            Circuit::Parallel(a, b)
        }
    }

    /// Resistance between the terminals by series and parallel rules.
    pub fn resistance(&self) -> f64 {
        match self {
            Circuit::Edge(w) => 1.0 / w,
            Circuit::Series(a, b) => a.resistance() + b.resistance(),
            Circuit::Parallel(a, b) => {
                let (x, y) = (a.resistance(), b.resistance());
                x * y / (x + y)
            }
        }
    }

    /// Realizes the network; terminals are nodes 0 and 1.
    pub fn to_graph(&self) -> WeightedGraph {
        let mut records = Vec::new();
        let mut next = 2;
        self.emit(0, 1, &mut next, &mut records);
        WeightedGraph::new(labels(next), records).unwrap()
    }

    fn emit(&self, s: usize, t: usize, next: &mut usize, out: &mut Vec<(usize, usize, f64)>) {
        match self {
            Circuit::Edge(w) => out.push((s, t, *w)),
            Circuit::Series(a, b) => {
                let mid = *next;
                *next += 1;
                a.emit(s, mid, next, out);
                b.emit(mid, t, next, out);
            }
            Circuit::Parallel(a, b) => {
                a.emit(s, t, next, out);
                b.emit(s, t, next, out);
            }
        }
    }
}

/// Vertices of a regular simplex with unit edges: `e_i / sqrt(2)` in `R^n`,
/// one vertex per column.
pub fn regular_simplex(n: usize) -> DMatrix<f64> {
    DMatrix::identity(n, n) / 2f64.sqrt()
}

pub fn squared_distances_of(vertices: &DMatrix<f64>) -> DMatrix<f64> {
    let n = vertices.ncols();
    DMatrix::from_fn(n, n, |i, j| (vertices.column(i) - vertices.column(j)).norm_squared())
}

/// Volume from coordinates: `sqrt(det(E^T E)) / k!` with edge vectors `E`
/// from the first vertex.
pub fn coordinate_volume(vertices: &DMatrix<f64>) -> f64 {
    let k = vertices.ncols() - 1;
    let e = DMatrix::from_fn(vertices.nrows(), k, |r, c| vertices[(r, c + 1)] - vertices[(r, 0)]);
    let factorial: f64 = (1..=k).map(|x| x as f64).product();
    cofactor_determinant(&(e.transpose() * e)).sqrt() / factorial
}

pub fn max_abs_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    assert_eq!(a.shape(), b.shape());
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &DMatrix<f64>) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn relative_diff(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    max_abs_diff(a, b) / max_abs(b).max(f64::MIN_POSITIVE)
}

pub fn verdict(ok: bool) -> &'static str {
    if ok {
        "PASS"
    } else {
        "FAIL"
    }
}
