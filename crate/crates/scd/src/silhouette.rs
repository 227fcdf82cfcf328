//! Per-point and global Silhouette scores, plus the optional min-max
//! normalization applied per embedding group.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{euclidean, RowMatrix};
use crate::error::{Error, Result};
use crate::par;

/// Result of a full Silhouette evaluation.
#[derive(Debug, Clone)]
pub struct SilhouetteResult {
    /// `s(i)` per row, each in `[-1, 1]`.
    pub per_point: Vec<f64>,
    /// Arithmetic mean of the per-point scores.
    pub global: f64,
    /// Number of non-empty clusters evaluated.
    pub k: usize,
}

fn cluster_sizes(labels: &[usize]) -> Vec<usize> {
    let k = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut sizes = vec![0usize; k];
    for &l in labels {
        sizes[l] += 1;
    }
    sizes
}

fn validate(x: &RowMatrix, labels: &[usize]) -> Result<Vec<usize>> {
    if labels.len() != x.n_rows() {
        return Err(Error::DimensionMismatch {
            expected: x.n_rows(),
            got: labels.len(),
        });
    }
    if x.n_rows() == 0 {
        return Err(Error::EmptyMatrix);
    }
    let sizes = cluster_sizes(labels);
    let non_empty = sizes.iter().filter(|&&s| s > 0).count();
    if non_empty < 2 {
        return Err(Error::TooFewClusters(non_empty));
    }
    Ok(sizes)
}

/// `s(i)` from per-cluster mean distances computed for one point:
/// `a(i)` the mean distance to the rest of its own cluster, `b(i)` the
/// smallest mean distance to another cluster, `s(i) = (b-a)/max(a,b)`.
/// Singleton clusters score 0 by definition, as does the 0/0 case of
/// coincident clusters.
pub fn silhouette_point(i: usize, x: &RowMatrix, labels: &[usize]) -> Result<f64> {
    let sizes = validate(x, labels)?;
    Ok(point_score(i, x, labels, &sizes))
}

fn point_score(i: usize, x: &RowMatrix, labels: &[usize], sizes: &[usize]) -> f64 {
    let own = labels[i];
    if sizes[own] <= 1 {
        return 0.0;
    }
    let k = sizes.len();
    let mut sums = vec![0.0f64; k];
    let row = x.row(i);
    for (j, &lj) in labels.iter().enumerate() {
        sums[lj] += euclidean(row, x.row(j));
    }
    let a = sums[own] / (sizes[own] - 1) as f64;
    let mut b = f64::INFINITY;
    for c in 0..k {
        if c != own && sizes[c] > 0 {
            b = b.min(sums[c] / sizes[c] as f64);
        }
    }
    let denom = a.max(b);
    if denom == 0.0 {
        0.0
    } else {
        (b - a) / denom
    }
}

/// Full Silhouette evaluation; per-point scores computed in parallel blocks
/// with a sequential final mean.
pub fn silhouette(x: &RowMatrix, labels: &[usize]) -> Result<SilhouetteResult> {
    let sizes = validate(x, labels)?;
    let sizes_ref = &sizes;
    let per_point = par::map_indexed(x.n_rows(), |i| point_score(i, x, labels, sizes_ref));
    let global = per_point.iter().sum::<f64>() / per_point.len() as f64;
    Ok(SilhouetteResult {
        per_point,
        global,
        k: sizes.iter().filter(|&&s| s > 0).count(),
    })
}

/// Mean Silhouette over all points.
pub fn silhouette_global(x: &RowMatrix, labels: &[usize]) -> Result<f64> {
    Ok(silhouette(x, labels)?.global)
}

/// Approximate global Silhouette on a uniform point subsample. Only the
/// sampled points (and distances among them) enter the score, so the result
/// is an estimate; `sample >= n` falls back to the exact computation.
pub fn silhouette_global_sampled(
    x: &RowMatrix,
    labels: &[usize],
    sample: usize,
    seed: u64,
) -> Result<f64> {
    let n = x.n_rows();
    if sample == 0 || sample >= n {
        return silhouette_global(x, labels);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut pool: Vec<usize> = (0..n).collect();
    for i in 0..sample {
        let j = rng.random_range(i..n);
        pool.swap(i, j);
    }
    let mut picked = pool[..sample].to_vec();
    picked.sort_unstable();
    let mut sub = RowMatrix::zeros(sample, x.n_cols());
    let mut sub_labels = Vec::with_capacity(sample);
    for (si, &i) in picked.iter().enumerate() {
        sub.row_mut(si).copy_from_slice(x.row(i));
        sub_labels.push(labels[i]);
    }
    silhouette_global(&sub, &sub_labels)
}

/// Min-max normalization of `(k, score)` sweep traces, applied per embedding
/// group. Returns the normalized trace and a degeneracy flag: when all
/// scores coincide the output is all zeros and the flag is set.
pub fn normalize_scores(scores: &[(usize, f64)]) -> (Vec<(usize, f64)>, bool) {
    let min = scores.iter().map(|&(_, s)| s).fold(f64::INFINITY, f64::min);
    let max = scores
        .iter()
        .map(|&(_, s)| s)
        .fold(f64::NEG_INFINITY, f64::max);
    let range = max - min;
    if scores.is_empty() || !(range > 0.0) {
        return (scores.iter().map(|&(k, _)| (k, 0.0)).collect(), true);
    }
    (
        scores
            .iter()
            .map(|&(k, s)| (k, (s - min) / range))
            .collect(),
        false,
    )
}
