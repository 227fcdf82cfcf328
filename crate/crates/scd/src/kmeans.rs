//! Mini-batch k-means over embedding rows, seeded by k-means++.
//!
//! Batches are drawn without replacement, assignments within a batch use the
//! centers frozen at batch start, and the running-mean center updates are
//! applied in batch order. All reductions have a fixed order, so results are
//! identical for any worker count.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::embedding::{euclidean_sq, RowMatrix};
use crate::error::{Error, Result};
use crate::par;

/// Tuning knobs for [`minibatch_kmeans`].
#[derive(Debug, Clone)]
pub struct KMeansOptions {
    /// Rows per mini-batch; `None` resolves to `min(1024, n_rows)`.
    pub batch_size: Option<usize>,
    /// Maximum number of mini-batch steps.
    pub max_iters: usize,
    /// Early stop once the largest squared center shift in a step drops
    /// below `center_tol` times the mean squared row norm. 0 disables.
    pub center_tol: f64,
    /// k-means++ restarts; the seeding with the lowest full-data inertia
    /// starts the optimization.
    pub n_init: usize,
}

impl Default for KMeansOptions {
    fn default() -> Self {
        KMeansOptions {
            batch_size: None,
            max_iters: 100,
            center_tol: 1e-8,
            n_init: 3,
        }
    }
}

/// A fitted clustering.
#[derive(Debug, Clone)]
pub struct ClusterModel {
    pub centers: RowMatrix,
    pub labels: Vec<usize>,
    /// Sum over rows of the squared Euclidean distance to the nearest center.
    pub inertia: f64,
    pub k: usize,
    pub seed: u64,
}

/// k-means++ seeding: first center uniform, later centers drawn with
/// probability proportional to the squared distance to the nearest chosen
/// center. Duplicate rows of already-chosen centers can never be re-drawn.
pub fn kmeanspp_init(x: &RowMatrix, k: usize, rng: &mut ChaCha8Rng) -> Result<RowMatrix> {
    let n = x.n_rows();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("k must satisfy 1 <= k <= {n}, got {k}"),
        });
    }
    let d = x.n_cols();
    let mut centers = RowMatrix::zeros(k, d);
    let first = rng.random_range(0..n);
    centers.row_mut(0).copy_from_slice(x.row(first));

    let mut best_sq: Vec<f64> = (0..n)
        .map(|i| euclidean_sq(x.row(i), centers.row(0)))
        .collect();
    for c in 1..k {
        let total: f64 = best_sq.iter().sum();
        if total <= 0.0 {
            return Err(Error::KExceedsDistinctRows { k, distinct: c });
        }
        let target = rng.random::<f64>() * total;
        let mut cum = 0.0;
        let mut chosen = n - 1;
        for (i, &w) in best_sq.iter().enumerate() {
            cum += w;
            if cum > target {
                chosen = i;
                break;
            }
        }
        centers.row_mut(c).copy_from_slice(x.row(chosen));
        for i in 0..n {
            let dist = euclidean_sq(x.row(i), centers.row(c));
            if dist < best_sq[i] {
                best_sq[i] = dist;
            }
        }
    }
    Ok(centers)
}

/// Nearest center by squared Euclidean distance; ties break toward the
/// lowest center index.
fn nearest(point: &[f64], centers: &RowMatrix) -> (usize, f64) {
    let mut best = 0usize;
    let mut best_sq = euclidean_sq(point, centers.row(0));
    for c in 1..centers.n_rows() {
        let dist = euclidean_sq(point, centers.row(c));
        if dist < best_sq {
            best_sq = dist;
            best = c;
        }
    }
    (best, best_sq)
}

/// Nearest-center labels for every row; ties break toward the lowest index.
pub fn assign(x: &RowMatrix, centers: &RowMatrix) -> Result<Vec<usize>> {
    Ok(assign_with_dists(x, centers)?.0)
}

fn assign_with_dists(x: &RowMatrix, centers: &RowMatrix) -> Result<(Vec<usize>, Vec<f64>)> {
    if centers.n_rows() == 0 {
        return Err(Error::EmptyMatrix);
    }
    if centers.n_cols() != x.n_cols() {
        return Err(Error::DimensionMismatch {
            expected: x.n_cols(),
            got: centers.n_cols(),
        });
    }
    let pairs = par::map_indexed(x.n_rows(), |i| nearest(x.row(i), centers));
    let mut labels = Vec::with_capacity(pairs.len());
    let mut dists = Vec::with_capacity(pairs.len());
    for (c, d) in pairs {
        labels.push(c);
        dists.push(d);
    }
    Ok((labels, dists))
}

/// Mini-batch k-means, restarted `n_init` times from derived sub-seeds; the
/// run with the lowest final inertia wins (first on ties). Deterministic for
/// a fixed seed: batch sampling, k-means++ seeding and tie-breaking all come
/// from one ChaCha stream per run, and parallel assignment never changes the
/// update order.
pub fn minibatch_kmeans(
    x: &RowMatrix,
    k: usize,
    opts: &KMeansOptions,
    seed: u64,
) -> Result<ClusterModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut best: Option<ClusterModel> = None;
    for _ in 0..opts.n_init.max(1) {
        let sub_seed = rng.random::<u64>();
        let model = minibatch_run(x, k, opts, sub_seed)?;
        if best.as_ref().is_none_or(|b| model.inertia < b.inertia) {
            best = Some(model);
        }
    }
    let mut model = best.expect("n_init >= 1");
    model.seed = seed;
    Ok(model)
}

fn minibatch_run(
    x: &RowMatrix,
    k: usize,
    opts: &KMeansOptions,
    seed: u64,
) -> Result<ClusterModel> {
    let n = x.n_rows();
    if n == 0 {
        return Err(Error::EmptyMatrix);
    }
    if k == 0 || k > n {
        return Err(Error::InvalidParameter {
            name: "k",
            reason: format!("k must satisfy 1 <= k <= {n}, got {k}"),
        });
    }
    let batch_size = opts.batch_size.unwrap_or(1024).clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centers = kmeanspp_init(x, k, &mut rng)?;
    let mut counts = vec![0u64; k];
    let mut pool: Vec<usize> = (0..n).collect();

    let scale_sq = {
        let total: f64 = x.data().iter().map(|v| v * v).sum();
        (total / n.max(1) as f64).max(1e-300)
    };

    for _ in 0..opts.max_iters {
        for i in 0..batch_size {
            let j = rng.random_range(i..n);
            pool.swap(i, j);
        }
        let batch = &pool[..batch_size];
        let assigns = {
            let centers_ref = &centers;
            par::map_indexed(batch_size, |bi| nearest(x.row(batch[bi]), centers_ref))
        };

        let before = centers.clone();
        for (bi, &(c, _)) in assigns.iter().enumerate() {
            counts[c] += 1;
            let eta = 1.0 / counts[c] as f64;
            let point = x.row(batch[bi]);
            for (cv, pv) in centers.row_mut(c).iter_mut().zip(point) {
                *cv += eta * (pv - *cv);
            }
        }

        // Centers never hit by any batch so far restart at the worst-served
        // batch point, so k cannot silently collapse.
        if counts.iter().any(|&c| c == 0) {
            let mut order: Vec<usize> = (0..batch_size).collect();
            order.sort_by(|&a, &b| {
                assigns[b]
                    .1
                    .partial_cmp(&assigns[a].1)
                    .unwrap()
                    .then(a.cmp(&b))
            });
            let mut cursor = 0usize;
            for c in 0..k {
                if counts[c] == 0 && cursor < order.len() {
                    centers.row_mut(c).copy_from_slice(x.row(batch[order[cursor]]));
                    counts[c] = 1;
                    cursor += 1;
                }
            }
        }

        if opts.center_tol > 0.0 {
            let mut shift = 0.0f64;
            for c in 0..k {
                shift = shift.max(euclidean_sq(centers.row(c), before.row(c)));
            }
            if shift <= opts.center_tol * scale_sq {
                break;
            }
        }
    }

    // One full assignment pass produces the labels and the inertia; empty
    // clusters are re-seeded to the point farthest from its center.
    let (mut labels, mut dists) = assign_with_dists(x, &centers)?;
    for _ in 0..k {
        let mut sizes = vec![0usize; k];
        for &l in &labels {
            sizes[l] += 1;
        }
        if sizes.iter().all(|&s| s > 0) {
            break;
        }
        let mut taken = vec![false; n];
        let mut changed = false;
        for c in 0..k {
            if sizes[c] > 0 {
                continue;
            }
            let mut far = usize::MAX;
            for i in 0..n {
                if taken[i] {
                    continue;
                }
                if far == usize::MAX || dists[i] > dists[far] {
                    far = i;
                }
            }
            if far == usize::MAX {
                break;
            }
            centers.row_mut(c).copy_from_slice(x.row(far));
            taken[far] = true;
            changed = true;
        }
        if !changed {
            break;
        }
        let refreshed = assign_with_dists(x, &centers)?;
        labels = refreshed.0;
        dists = refreshed.1;
    }
    let inertia: f64 = dists.iter().sum();

    Ok(ClusterModel {
        centers,
        labels,
        inertia,
        k,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mat(rows: &[&[f64]]) -> RowMatrix {
        RowMatrix::from_rows(&rows.iter().map(|r| r.to_vec()).collect::<Vec<_>>())
    }

    #[test]
    fn init_with_k_equal_rows_returns_a_permutation() {
        let x = mat(&[&[0.0], &[1.0], &[5.0], &[9.0]]);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let centers = kmeanspp_init(&x, 4, &mut rng).unwrap();
        let mut got: Vec<f64> = (0..4).map(|i| centers.get(i, 0)).collect();
        got.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert_eq!(got, vec![0.0, 1.0, 5.0, 9.0]);
    }

    #[test]
    fn init_k1_picks_a_row() {
        let x = mat(&[&[2.0], &[4.0]]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let centers = kmeanspp_init(&x, 1, &mut rng).unwrap();
        assert!(centers.get(0, 0) == 2.0 || centers.get(0, 0) == 4.0);
    }

    #[test]
    fn squared_distance_weighting_forces_distant_point() {
        let x = mat(&[&[0.0], &[0.0], &[100.0]]);
        let mut hit = 0;
        for seed in 0..50 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let centers = kmeanspp_init(&x, 2, &mut rng).unwrap();
            if centers.get(0, 0) == 0.0 {
                hit += 1;
                assert_eq!(centers.get(1, 0), 100.0);
            }
        }
        assert!(hit > 0, "no trial drew a duplicate-zero first center");
    }

    #[test]
    fn init_errors_when_k_exceeds_distinct_rows() {
        let x = mat(&[&[1.0], &[1.0], &[2.0]]);
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            kmeanspp_init(&x, 3, &mut rng),
            Err(Error::KExceedsDistinctRows { .. })
        ));
    }

    #[test]
    fn recovers_well_separated_pairs() {
        let x = mat(&[&[0.0], &[0.1], &[10.0], &[10.1]]);
        let model = minibatch_kmeans(&x, 2, &KMeansOptions::default(), 7).unwrap();
        assert_eq!(model.labels[0], model.labels[1]);
        assert_eq!(model.labels[2], model.labels[3]);
        assert_ne!(model.labels[0], model.labels[2]);
        // Exhaustive 2-partition oracle: the planted split minimizes inertia.
        let best = exhaustive_best_inertia(&x, 2);
        assert!(model.inertia <= best * 1.05 + 1e-12);
    }

    #[test]
    fn k1_full_batch_converges_to_the_mean() {
        let x = mat(&[&[0.0], &[0.1], &[10.0], &[10.1]]);
        let opts = KMeansOptions {
            batch_size: Some(4),
            ..KMeansOptions::default()
        };
        let model = minibatch_kmeans(&x, 1, &opts, 5).unwrap();
        assert!((model.centers.get(0, 0) - 5.05).abs() < 1e-9);
    }

    #[test]
    fn k_equals_rows_gives_zero_inertia() {
        let x = mat(&[&[0.0], &[1.0], &[2.0], &[3.0]]);
        let model = minibatch_kmeans(&x, 4, &KMeansOptions::default(), 1).unwrap();
        assert_eq!(model.inertia, 0.0);
        let mut sorted = model.labels.clone();
        sorted.sort_unstable();
        assert_eq!(sorted, vec![0, 1, 2, 3]);
    }

    #[test]
    fn assignment_tie_breaks_to_lowest_center() {
        let centers = mat(&[&[0.0], &[1.0]]);
        let x = mat(&[&[0.5]]);
        assert_eq!(assign(&x, &centers).unwrap(), vec![0]);
    }

    #[test]
    fn assignment_exact_center_match() {
        let centers = mat(&[&[0.0], &[1.0], &[2.0], &[3.0]]);
        let x = mat(&[&[3.0]]);
        assert_eq!(assign(&x, &centers).unwrap(), vec![3]);
    }

    #[test]
    fn assignment_matches_brute_force_table() {
        let centers = mat(&[&[0.0, 0.0], &[2.0, 1.0], &[5.0, 5.0]]);
        let x = mat(&[&[1.0, 0.4], &[4.0, 4.0], &[2.1, 0.9], &[-1.0, -1.0]]);
        let labels = assign(&x, &centers).unwrap();
        for i in 0..x.n_rows() {
            let mut best = 0;
            for c in 1..3 {
                if euclidean_sq(x.row(i), centers.row(c)) < euclidean_sq(x.row(i), centers.row(best))
                {
                    best = c;
                }
            }
            assert_eq!(labels[i], best);
        }
    }

    #[test]
    fn assignment_rejects_dimension_mismatch() {
        let centers = mat(&[&[0.0, 1.0]]);
        let x = mat(&[&[0.0]]);
        assert!(matches!(
            assign(&x, &centers),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn deterministic_across_seeds_and_thread_counts() {
        let x = random_rows(40, 3, 99);
        let run = || minibatch_kmeans(&x, 5, &KMeansOptions::default(), 123).unwrap();
        let base = run();
        for threads in [1, 2, 4] {
            let model = par::with_threads(threads, run);
            assert_eq!(base.labels, model.labels);
            assert_eq!(base.centers.data(), model.centers.data());
            assert_eq!(base.inertia, model.inertia);
        }
    }

    #[test]
    fn near_optimal_on_tiny_instances() {
        for seed in 0..12u64 {
            let x = random_rows(9, 2, seed);
            for k in 2..=3usize {
                let model = minibatch_kmeans(&x, k, &KMeansOptions::default(), seed ^ 55).unwrap();
                let best = exhaustive_best_inertia(&x, k);
                assert!(
                    model.inertia <= best * 1.05 + 1e-9,
                    "seed {seed} k {k}: {} vs optimal {best}",
                    model.inertia
                );
            }
        }
    }

    #[test]
    fn centers_stay_inside_the_bounding_box() {
        let x = random_rows(30, 2, 4);
        let model = minibatch_kmeans(&x, 4, &KMeansOptions::default(), 11).unwrap();
        for dim in 0..2 {
            let lo = (0..30).map(|i| x.get(i, dim)).fold(f64::INFINITY, f64::min);
            let hi = (0..30)
                .map(|i| x.get(i, dim))
                .fold(f64::NEG_INFINITY, f64::max);
            let mut used = vec![false; model.k];
            for &l in &model.labels {
                used[l] = true;
            }
            for c in 0..model.k {
                if used[c] {
                    let v = model.centers.get(c, dim);
                    assert!(v >= lo - 1e-12 && v <= hi + 1e-12);
                }
            }
        }
    }

    /// Global optimum by enumerating every assignment of rows to k labels.
    fn exhaustive_best_inertia(x: &RowMatrix, k: usize) -> f64 {
        let n = x.n_rows();
        let d = x.n_cols();
        let mut best = f64::INFINITY;
        let total = (k as u64).pow(n as u32);
        for code in 0..total {
            let mut labels = vec![0usize; n];
            let mut c = code;
            for l in labels.iter_mut() {
                *l = (c % k as u64) as usize;
                c /= k as u64;
            }
            let mut sums = vec![vec![0.0; d]; k];
            let mut counts = vec![0usize; k];
            for (i, &l) in labels.iter().enumerate() {
                counts[l] += 1;
                for (s, v) in sums[l].iter_mut().zip(x.row(i)) {
                    *s += v;
                }
            }
            if counts.iter().any(|&c| c == 0) {
                continue;
            }
            let mut inertia = 0.0;
            for (i, &l) in labels.iter().enumerate() {
                let mean: Vec<f64> = sums[l].iter().map(|s| s / counts[l] as f64).collect();
                inertia += euclidean_sq(x.row(i), &mean);
            }
            best = best.min(inertia);
        }
        best
    }

    fn random_rows(n: usize, d: usize, seed: u64) -> RowMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut m = RowMatrix::zeros(n, d);
        for i in 0..n {
            for j in 0..d {
                m.set(i, j, rng.random::<f64>() * 4.0 - 2.0);
            }
        }
        m
    }
}
