//! AROPE-style spectral embedding: the top eigenpairs of the adjacency matrix
//! (by magnitude), each eigenvector scaled by a cubic polynomial of its
//! eigenvalue whose coefficients are the first-, second- and third-order
//! proximity weights.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::Rng;

use super::{check_dim, ComplexityClass, EmbedError, Embedder, EmbedderDescriptor, EmbedderKind, EmbeddingMatrix};
use crate::graph::Graph;
use crate::rng;
use crate::tune::{Configuration, Dim, HyperparameterSpace};

pub const DEFAULT_SPECTRAL_DIM: usize = 16;
/// Graphs up to this size are decomposed densely.
const DENSE_LIMIT: usize = 256;
const MAX_RESTARTS: usize = 500;

pub struct Spectral {
    descriptor: EmbedderDescriptor,
    dim: usize,
}

impl Spectral {
    pub fn new(dim: usize) -> Self {
        let space = HyperparameterSpace::new(vec![
            Dim::float("w1", 1e-4, 3.0),
            Dim::float("w2", 1e-4, 3.0),
            Dim::float("w3", 1e-4, 3.0),
        ])
        .expect("static space is valid");
        Self {
            descriptor: EmbedderDescriptor {
                name: "spectral".into(),
                space,
                complexity_class: ComplexityClass::EPlusV,
                kind: EmbedderKind::Native,
            },
            dim,
        }
    }
}

/// Eigenpairs sorted by decreasing `|λ|` (ties: larger `λ` first). Each
/// vector has unit norm and its largest-magnitude coordinate positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenPairs {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
}

fn matvec(graph: &Graph, x: &[f64], out: &mut [f64]) {
    for (u, slot) in out.iter_mut().enumerate() {
        *slot = graph.neighbors(u).iter().map(|&(v, w)| w * x[v]).sum();
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn residual_inf(graph: &Graph, lambda: f64, x: &[f64]) -> f64 {
    let mut ax = vec![0.0; x.len()];
    matvec(graph, x, &mut ax);
    ax.iter().zip(x).map(|(a, b)| (a - lambda * b).abs()).fold(0.0, f64::max)
}

fn tolerance(max_abs_lambda: f64) -> f64 {
    1e-8 * max_abs_lambda.max(100.0)
}

/// Indices of the `k` entries of largest magnitude, ties toward larger value.
fn top_by_magnitude(values: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..values.len()).collect();
    let key = |x: f64| (x.abs() * 1e9).round() as i64;
    idx.sort_by(|&a, &b| {
        key(values[b])
            .cmp(&key(values[a]))
            .then(values[b].total_cmp(&values[a]))
            .then(a.cmp(&b))
    });
    idx.truncate(k);
    idx
}

fn fix_sign(x: &mut [f64]) {
    let mut best = 0;
    for (i, v) in x.iter().enumerate() {
        if v.abs() > x[best].abs() + 1e-12 {
            best = i;
        }
    }
    if x[best] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

/// Appends `v`, orthonormalized against `basis` (two Gram–Schmidt passes).
/// A vector that vanishes is replaced by a fresh random direction.
fn push_orthonormal<R: Rng>(basis: &mut Vec<Vec<f64>>, mut v: Vec<f64>, rng: &mut R) -> bool {
    let n = v.len();
    if basis.len() >= n {
        return false;
    }
    for _attempt in 0..10 {
        let before = dot(&v, &v).sqrt();
        for _ in 0..2 {
            for q in basis.iter() {
                let c = dot(q, &v);
                v.iter_mut().zip(q).for_each(|(a, b)| *a -= c * b);
            }
        }
        let norm = dot(&v, &v).sqrt();
        if norm > 1e-10 * before.max(1e-300) && norm > 1e-300 {
            v.iter_mut().for_each(|a| *a /= norm);
            basis.push(v);
            return true;
        }
        v = (0..n).map(|_| rng.gen::<f64>() - 0.5).collect();
    }
    false
}

fn dense_pairs(graph: &Graph, k: usize) -> EigenPairs {
    let n = graph.node_count();
    let mut a = DMatrix::<f64>::zeros(n, n);
    for e in graph.edges() {
        a[(e.u, e.v)] = e.w;
        a[(e.v, e.u)] = e.w;
    }
    let eig = SymmetricEigen::new(a);
    let values: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    let chosen = top_by_magnitude(&values, k);
    let mut out = EigenPairs {
        values: Vec::with_capacity(k),
        vectors: Vec::with_capacity(k),
    };
    for i in chosen {
        let mut x: Vec<f64> = eig.eigenvectors.column(i).iter().copied().collect();
        fix_sign(&mut x);
        out.values.push(values[i]);
        out.vectors.push(x);
    }
    out
}

/// Restarted block Krylov iteration with Rayleigh–Ritz extraction. Each
/// cycle expands the current block into a Krylov basis, takes the Ritz pairs
/// of largest magnitude, and restarts from them until every requested pair
/// meets the residual tolerance.
fn krylov_pairs(graph: &Graph, k: usize, seed: u64) -> Result<EigenPairs, EmbedError> {
    let n = graph.node_count();
    let mut rng = rng::seeded(seed);
    let block = n.min(k + (k / 2).max(8));
    let max_basis = n.min(4 * block + 40);
    let mut start: Vec<Vec<f64>> = (0..block)
        .map(|_| (0..n).map(|_| rng.gen::<f64>() - 0.5).collect())
        .collect();
    let mut worst = f64::INFINITY;

    for _restart in 0..MAX_RESTARTS {
        let mut basis: Vec<Vec<f64>> = Vec::with_capacity(max_basis);
        let mut images: Vec<Vec<f64>> = Vec::with_capacity(max_basis);
        for v in start.drain(..) {
            push_orthonormal(&mut basis, v, &mut rng);
        }
        let (mut block_start, mut block_end) = (0, basis.len());
        while block_start < block_end {
            let mut fresh = Vec::with_capacity(block_end - block_start);
            for q in &basis[block_start..block_end] {
                let mut aq = vec![0.0; n];
                matvec(graph, q, &mut aq);
                images.push(aq.clone());
                fresh.push(aq);
            }
            block_start = basis.len();
            for v in fresh {
                if basis.len() >= max_basis {
                    break;
                }
                push_orthonormal(&mut basis, v, &mut rng);
            }
            block_end = basis.len();
        }
        let m = basis.len();
        let mut t = DMatrix::<f64>::zeros(m, m);
        for i in 0..m {
            for j in i..m {
                let x = 0.5 * (dot(&basis[i], &images[j]) + dot(&basis[j], &images[i]));
                t[(i, j)] = x;
                t[(j, i)] = x;
            }
        }
        let eig = SymmetricEigen::new(t);
        let thetas: Vec<f64> = eig.eigenvalues.iter().copied().collect();
        let keep = top_by_magnitude(&thetas, block.min(m));
        let lambda_max = thetas.iter().fold(0.0f64, |a, b| a.max(b.abs()));
        let tol = tolerance(lambda_max);

        let mut ritz = Vec::with_capacity(keep.len());
        worst = 0.0;
        for (rank, &i) in keep.iter().enumerate() {
            let s = eig.eigenvectors.column(i);
            let mut y = vec![0.0; n];
            let mut ay = vec![0.0; n];
            for (c, &coef) in s.iter().enumerate() {
                y.iter_mut().zip(&basis[c]).for_each(|(a, b)| *a += coef * b);
                ay.iter_mut().zip(&images[c]).for_each(|(a, b)| *a += coef * b);
            }
            if rank < k {
                let r = ay
                    .iter()
                    .zip(&y)
                    .map(|(a, b)| (a - thetas[i] * b).abs())
                    .fold(0.0, f64::max);
                worst = worst.max(r);
            }
            ritz.push((thetas[i], y));
        }
        if worst <= tol {
            let mut out = EigenPairs {
                values: Vec::with_capacity(k),
                vectors: Vec::with_capacity(k),
            };
            for (theta, mut y) in ritz.into_iter().take(k) {
                let norm = dot(&y, &y).sqrt();
                y.iter_mut().for_each(|a| *a /= norm);
                fix_sign(&mut y);
                out.values.push(theta);
                out.vectors.push(y);
            }
            return Ok(out);
        }
        start = ritz.into_iter().map(|(_, y)| y).collect();
    }
    Err(EmbedError::NoConvergence {
        iterations: MAX_RESTARTS,
        residual: worst,
    })
}

/// The `k` eigenpairs of largest `|λ|` of the weighted adjacency matrix.
pub fn top_eigenpairs(graph: &Graph, k: usize, seed: u64) -> Result<EigenPairs, EmbedError> {
    let n = graph.node_count();
    if n == 0 {
        return Err(EmbedError::EmptyGraph);
    }
    if k == 0 {
        return Err(EmbedError::InvalidDim(0));
    }
    if k > n {
        return Err(EmbedError::DimTooLarge { dim: k, nodes: n });
    }
    let pairs = if n <= DENSE_LIMIT {
        dense_pairs(graph, k)
    } else {
        krylov_pairs(graph, k, seed)?
    };
    let lambda_max = pairs.values.iter().fold(0.0f64, |a, b| a.max(b.abs()));
    let worst = pairs
        .values
        .iter()
        .zip(&pairs.vectors)
        .map(|(&l, x)| residual_inf(graph, l, x))
        .fold(0.0, f64::max);
    if worst > tolerance(lambda_max) {
        return Err(EmbedError::NoConvergence {
            iterations: 0,
            residual: worst,
        });
    }
    Ok(pairs)
}

fn proximity(w: [f64; 3], lambda: f64) -> f64 {
    w[0] * lambda + w[1] * lambda * lambda + w[2] * lambda * lambda * lambda
}

impl Embedder for Spectral {
    fn descriptor(&self) -> &EmbedderDescriptor {
        &self.descriptor
    }

    fn embed(&self, graph: &Graph, config: &Configuration, seed: u64) -> Result<EmbeddingMatrix, EmbedError> {
        let dim = match config.get("dim") {
            Some(_) => check_dim(config.int("dim")?)?,
            None => self.dim,
        };
        let w = [config.float("w1")?, config.float("w2")?, config.float("w3")?];
        let pairs = top_eigenpairs(graph, dim, seed)?;
        let n = graph.node_count();
        let scale: Vec<f64> = pairs.values.iter().map(|&l| proximity(w, l)).collect();
        let mut values = vec![0.0; n * dim];
        for (k, x) in pairs.vectors.iter().enumerate() {
            for v in 0..n {
                values[v * dim + k] = scale[k] * x[v];
            }
        }
        EmbeddingMatrix::new(n, dim, values)
    }
}
