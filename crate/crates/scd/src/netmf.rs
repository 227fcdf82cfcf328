//! Embedding by matrix factorization: build the random-walk factorization
//! target of the graph and factorize it into a low-rank node embedding.

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{Embedding, EmbeddingParams, RowMatrix};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::par;

/// Above this size the exact dense eigendecomposition is replaced by seeded
/// subspace iteration (the target matrix stays dense either way).
const DENSE_EIG_LIMIT: usize = 2048;

/// Extra subspace columns carried by the randomized factorization path.
const OVERSAMPLE: usize = 8;

/// Options for building the factorization target.
#[derive(Debug, Clone)]
pub struct NetmfOptions {
    /// Context window size `T`.
    pub window: usize,
    /// Negative-sample count `b`.
    pub negative: usize,
    /// Refuse to build the dense |N|×|N| target above this many nodes.
    pub dense_limit: usize,
}

impl NetmfOptions {
    pub fn new(window: usize, negative: usize) -> Self {
        NetmfOptions {
            window,
            negative,
            dense_limit: 20_000,
        }
    }
}

/// Builds the |N|×|N| factorization target
/// `M = log(max(1, vol(G) · ((1/T) Σ_{r=1..T} (D⁻¹A)^r) · D⁻¹ / b))`.
///
/// The power series is accumulated with `T-1` sparse-dense multiplies; the
/// result is symmetrized before the log to cancel roundoff drift, so the
/// output is exactly symmetric and non-negative. Degree-0 nodes contribute
/// zero rows and columns.
pub fn netmf_target(g: &Graph, opts: &NetmfOptions) -> Result<RowMatrix> {
    if opts.window == 0 || opts.negative == 0 {
        return Err(Error::InvalidParameter {
            name: "window/negative",
            reason: "T and b must be >= 1".into(),
        });
    }
    let n = g.n_nodes();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    if n > opts.dense_limit {
        return Err(Error::DenseLimitExceeded {
            nodes: n,
            limit: opts.dense_limit,
        });
    }

    let inv_deg: Vec<f64> = g
        .degrees()
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d } else { 0.0 })
        .collect();

    // walk = (D⁻¹A)^r, accumulated into sum across r = 1..T.
    let mut walk = RowMatrix::zeros(n, n);
    par::for_each_row(walk.data_mut(), n, |i, row| {
        for &(j, w) in g.neighbors(i) {
            row[j] = w * inv_deg[i];
        }
    });
    let mut sum = walk.clone();
    for _ in 1..opts.window {
        let mut next = RowMatrix::zeros(n, n);
        par::for_each_row(next.data_mut(), n, |i, row| {
            // (P · walk) row i: Σ_j P_ij walk[j, :], fixed neighbor order.
            for &(j, w) in g.neighbors(i) {
                let coeff = w * inv_deg[i];
                let src = walk.row(j);
                for (dst, s) in row.iter_mut().zip(src) {
                    *dst += coeff * s;
                }
            }
        });
        for (acc, v) in sum.data_mut().iter_mut().zip(next.data()) {
            *acc += v;
        }
        walk = next;
    }

    let scale = g.volume() / (opts.window as f64 * opts.negative as f64);
    let mut target = RowMatrix::zeros(n, n);
    {
        let sum_ref = &sum;
        let inv = &inv_deg;
        par::for_each_row(target.data_mut(), n, |i, row| {
            for j in 0..n {
                // Symmetrize the inner matrix before the log floor.
                let a = sum_ref.get(i, j) * inv[j];
                let b = sum_ref.get(j, i) * inv[i];
                let inner = scale * 0.5 * (a + b);
                row[j] = if inner > 1.0 { inner.ln() } else { 0.0 };
            }
        });
    }
    Ok(target)
}

/// Factorizes a symmetric matrix into `emb = U_d √Σ_d` over the top-d
/// non-negative eigenvalues. Small matrices use an exact dense
/// eigendecomposition; larger ones use seeded subspace iteration, which is
/// exact when the matrix rank fits inside the oversampled subspace.
pub fn factorize(m: &RowMatrix, d: usize, seed: u64) -> Result<RowMatrix> {
    let n = m.n_rows();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if m.n_cols() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: m.n_cols(),
        });
    }
    if d == 0 || d > n {
        return Err(Error::InvalidParameter {
            name: "dim",
            reason: format!("d must satisfy 1 <= d <= {n}, got {d}"),
        });
    }

    let (eigvals, eigvecs) = if n <= DENSE_EIG_LIMIT || d + OVERSAMPLE >= n {
        dense_eigen(m)
    } else {
        subspace_eigen(m, d + OVERSAMPLE, seed)
    };

    // Eigenpairs arrive sorted by descending eigenvalue.
    let mut emb = RowMatrix::zeros(n, d);
    for (c, (lambda, vec)) in eigvals.iter().zip(&eigvecs).take(d).enumerate() {
        if *lambda <= 0.0 {
            break;
        }
        let s = lambda.sqrt();
        let flip = column_sign(vec);
        for i in 0..n {
            emb.set(i, c, flip * s * vec[i]);
        }
    }
    debug_assert!(emb.is_finite());
    Ok(emb)
}

/// End-to-end factorization embedding (target construction + factorization).
pub fn netmf_embed(g: &Graph, params: &EmbeddingParams) -> Result<Embedding> {
    params.validate(g.n_nodes())?;
    let target = netmf_target(g, &NetmfOptions::new(params.window, params.negative))?;
    let matrix = factorize(&target, params.dim, params.seed)?;
    let mut emb = Embedding::new(matrix, params.clone());
    emb.zero_degree_rows = g.degrees().iter().filter(|&&d| d == 0.0).count();
    Ok(emb)
}

/// Flip factor making the largest-magnitude entry of a column positive.
fn column_sign(v: &[f64]) -> f64 {
    let mut best = 0usize;
    for (i, x) in v.iter().enumerate() {
        if x.abs() > v[best].abs() {
            best = i;
        }
    }
    if v[best] < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Exact symmetric eigendecomposition, eigenpairs sorted by descending value.
fn dense_eigen(m: &RowMatrix) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = m.n_rows();
    let dm = DMatrix::from_row_slice(n, n, m.data());
    let eig = dm.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("non-finite eigenvalue")
            .then(a.cmp(&b))
    });
    let vals = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vecs = order
        .iter()
        .map(|&i| eig.eigenvectors.column(i).iter().copied().collect())
        .collect();
    (vals, vecs)
}

/// Seeded subspace iteration for the top `l` eigenpairs of a symmetric
/// matrix. Deterministic for a fixed seed and any worker count.
fn subspace_eigen(m: &RowMatrix, l: usize, seed: u64) -> (Vec<f64>, Vec<Vec<f64>>) {
    let n = m.n_rows();
    let l = l.min(n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x5cd_fac70);
    let mut basis: Vec<Vec<f64>> = (0..l)
        .map(|_| (0..n).map(|_| standard_normal(&mut rng)).collect())
        .collect();
    basis = orthonormalize(multiply_columns(m, &basis));
    for _ in 0..6 {
        basis = orthonormalize(multiply_columns(m, &basis));
    }
    // Project: B = Qᵀ M Q, then solve the small symmetric problem.
    let mq = multiply_columns(m, &basis);
    let r = basis.len();
    let mut small = DMatrix::zeros(r, r);
    for (a, qa) in basis.iter().enumerate() {
        for (b, mqb) in mq.iter().enumerate() {
            let dot: f64 = qa.iter().zip(mqb).map(|(x, y)| x * y).sum();
            small[(a, b)] = dot;
        }
    }
    // Symmetrize the projection to keep the small solver honest.
    for a in 0..r {
        for b in (a + 1)..r {
            let avg = 0.5 * (small[(a, b)] + small[(b, a)]);
            small[(a, b)] = avg;
            small[(b, a)] = avg;
        }
    }
    let eig = small.symmetric_eigen();
    let mut order: Vec<usize> = (0..r).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .partial_cmp(&eig.eigenvalues[a])
            .expect("non-finite eigenvalue")
            .then(a.cmp(&b))
    });
    let mut vals = Vec::with_capacity(r);
    let mut vecs = Vec::with_capacity(r);
    for &c in &order {
        vals.push(eig.eigenvalues[c]);
        let mut v = vec![0.0; n];
        for (q, col) in basis.iter().enumerate() {
            let coeff = eig.eigenvectors[(q, c)];
            for (dst, x) in v.iter_mut().zip(col) {
                *dst += coeff * x;
            }
        }
        vecs.push(v);
    }
    (vals, vecs)
}

/// `M · C` for a set of column vectors, parallel over output rows.
fn multiply_columns(m: &RowMatrix, cols: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = m.n_rows();
    let l = cols.len();
    let products = par::map_indexed(n, |i| {
        let row = m.row(i);
        cols.iter()
            .map(|c| row.iter().zip(c).map(|(a, b)| a * b).sum::<f64>())
            .collect::<Vec<f64>>()
    });
    let mut out = vec![vec![0.0; n]; l];
    for (i, per_row) in products.iter().enumerate() {
        for (j, v) in per_row.iter().enumerate() {
            out[j][i] = *v;
        }
    }
    out
}

/// Modified Gram-Schmidt; near-zero columns are dropped so rank-deficient
/// inputs shrink the basis instead of poisoning it.
fn orthonormalize(mut cols: Vec<Vec<f64>>) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = Vec::with_capacity(cols.len());
    let scale = cols
        .iter()
        .flat_map(|c| c.iter())
        .fold(0.0f64, |m, v| m.max(v.abs()))
        .max(1e-300);
    for col in cols.iter_mut() {
        for q in &out {
            let dot: f64 = q.iter().zip(col.iter()).map(|(a, b)| a * b).sum();
            for (c, qv) in col.iter_mut().zip(q) {
                *c -= dot * qv;
            }
        }
        let norm: f64 = col.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 1e-12 * scale {
            out.push(col.iter().map(|v| v / norm).collect());
        }
    }
    out
}

fn standard_normal(rng: &mut ChaCha8Rng) -> f64 {
    let u1: f64 = rng.random::<f64>().max(1e-300);
    let u2: f64 = rng.random();
    (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
}
