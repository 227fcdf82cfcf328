//! Embedding by personalized node ranking: one random-walk-with-restart
//! stationary distribution per source node, assembled row-wise.

use crate::embedding::{Backend, Embedding, EmbeddingParams, RowMatrix};
use crate::error::{Error, Result};
use crate::graph::{Graph, NodeId};
use crate::par;

/// Power-iteration parameters for personalized PageRank.
#[derive(Debug, Clone, PartialEq)]
pub struct PprParams {
    /// Damping factor: probability of following an edge instead of
    /// restarting at the source node.
    pub alpha: f64,
    /// L1 convergence threshold between iterates.
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for PprParams {
    fn default() -> Self {
        PprParams {
            alpha: 0.85,
            tol: 1e-6,
            max_iter: 100,
        }
    }
}

impl PprParams {
    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::InvalidParameter {
                name: "alpha",
                reason: format!("must be in (0,1), got {}", self.alpha),
            });
        }
        if !(self.tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "tol",
                reason: format!("must be > 0, got {}", self.tol),
            });
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iter",
                reason: "must be >= 1".into(),
            });
        }
        Ok(())
    }
}

/// One personalized PageRank vector.
#[derive(Debug, Clone)]
pub struct PprVector {
    pub probs: Vec<f64>,
    pub converged: bool,
    pub iterations: usize,
}

/// Fixed point of `γ ← α·Pᵀγ + (1−α)·e_u` with `P` the row-normalized
/// adjacency. Walk mass on dangling (degree-0) nodes restarts at `u`.
///
/// The iteration only touches `u`'s connected component; every node outside
/// it provably carries zero mass.
pub fn ppr_vector(g: &Graph, u: NodeId, params: &PprParams) -> Result<PprVector> {
    params.validate()?;
    if g.n_nodes() == 0 {
        return Err(Error::EmptyInput);
    }
    if u >= g.n_nodes() {
        return Err(Error::InvalidParameter {
            name: "node",
            reason: format!("source {u} out of range (n={})", g.n_nodes()),
        });
    }
    let component = g.component_of(u);
    let mut probs = vec![0.0; g.n_nodes()];
    probs[u] = 1.0;
    if component.len() == 1 {
        // Isolated source: all mass restarts immediately.
        return Ok(PprVector {
            probs,
            converged: true,
            iterations: 1,
        });
    }

    let alpha = params.alpha;
    let mut next = vec![0.0; g.n_nodes()];
    let mut iterations = 0;
    let mut converged = false;
    while iterations < params.max_iter {
        iterations += 1;
        for &v in &component {
            let mut acc = 0.0;
            for &(j, w) in g.neighbors(v) {
                acc += probs[j] * w / g.degree(j);
            }
            next[v] = alpha * acc;
        }
        next[u] += 1.0 - alpha;
        let mut diff = 0.0;
        for &v in &component {
            diff += (next[v] - probs[v]).abs();
            probs[v] = next[v];
        }
        if diff < params.tol {
            converged = true;
            break;
        }
    }
    Ok(PprVector {
        probs,
        converged,
        iterations,
    })
}

/// Stacks one PPR vector per source node into an |N|×|N| embedding. Rows are
/// independent and computed in parallel with deterministic per-row results.
pub fn ppr_embed(g: &Graph, params: &PprParams, seed: u64) -> Result<Embedding> {
    params.validate()?;
    let n = g.n_nodes();
    if n == 0 {
        return Err(Error::EmptyInput);
    }
    let rows = par::map_indexed(n, |u| ppr_vector(g, u, params).expect("validated params"));
    let mut matrix = RowMatrix::zeros(n, n);
    let mut unconverged = 0usize;
    for (u, row) in rows.iter().enumerate() {
        matrix.row_mut(u).copy_from_slice(&row.probs);
        if !row.converged {
            unconverged += 1;
        }
    }
    let mut emb_params = EmbeddingParams::ppr(seed);
    emb_params.backend = Backend::Ppr;
    emb_params.dim = n;
    let mut emb = Embedding::new(matrix, emb_params);
    emb.unconverged_rows = unconverged;
    emb.zero_degree_rows = g.degrees().iter().filter(|&&d| d == 0.0).count();
    Ok(emb)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params() -> PprParams {
        PprParams {
            tol: 1e-12,
            max_iter: 10_000,
            ..PprParams::default()
        }
    }

    /// Direct solve of `(I − αPᵀ)γ = (1−α)e_u` by Gaussian elimination.
    fn solve_ppr(g: &Graph, u: usize, alpha: f64) -> Vec<f64> {
        let n = g.n_nodes();
        let mut a = vec![vec![0.0; n + 1]; n];
        for i in 0..n {
            a[i][i] = 1.0;
            for &(j, w) in g.neighbors(i) {
                // (Pᵀ)_{ij} = P_{ji} = w_{ji} / deg_j
                a[i][j] -= alpha * w / g.degree(j);
            }
        }
        a[u][n] = 1.0 - alpha;
        for col in 0..n {
            let pivot = (col..n)
                .max_by(|&x, &y| a[x][col].abs().partial_cmp(&a[y][col].abs()).unwrap())
                .unwrap();
            a.swap(col, pivot);
            let p = a[col][col];
            for j in col..=n {
                a[col][j] /= p;
            }
            for row in 0..n {
                if row != col && a[row][col] != 0.0 {
                    let f = a[row][col];
                    for j in col..=n {
                        a[row][j] -= f * a[col][j];
                    }
                }
            }
        }
        (0..n).map(|i| a[i][n]).collect()
    }

    #[test]
    fn k2_closed_form() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        let v = ppr_vector(&g, 0, &PprParams::default()).unwrap();
        let alpha = 0.85;
        assert!((v.probs[0] - 1.0 / (1.0 + alpha)).abs() < 1e-4);
        assert!((v.probs[1] - alpha / (1.0 + alpha)).abs() < 1e-4);
        assert!(v.converged);
    }

    #[test]
    fn vanishing_alpha_returns_restart_vector() {
        let g = Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        let p = PprParams {
            alpha: 1e-9,
            ..PprParams::default()
        };
        let v = ppr_vector(&g, 1, &p).unwrap();
        assert!((v.probs[1] - 1.0).abs() < 1e-8);
        assert!(v.probs[0] < 1e-8 && v.probs[2] < 1e-8);
    }

    #[test]
    fn isolated_node_is_pure_restart() {
        let g = Graph::from_weighted_edges(3, vec![(0, 1, 1.0)]).unwrap();
        let v = ppr_vector(&g, 2, &PprParams::default()).unwrap();
        assert_eq!(v.probs, vec![0.0, 0.0, 1.0]);
        assert_eq!(v.iterations, 1);
        assert!(v.converged);
    }

    #[test]
    fn rows_are_stochastic_and_component_supported() {
        let g = Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap();
        let emb = ppr_embed(&g, &PprParams::default(), 0).unwrap();
        for u in 0..6 {
            let row = emb.matrix.row(u);
            let sum: f64 = row.iter().sum();
            assert!((sum - 1.0).abs() < 1e-9, "row {u} sums to {sum}");
            assert!(row.iter().all(|&x| x >= 0.0));
            for (v, &mass) in row.iter().enumerate() {
                if (u < 3) != (v < 3) {
                    assert_eq!(mass, 0.0, "mass crossed components: {u}->{v}");
                }
            }
        }
    }

    #[test]
    fn cycle_rows_are_rotations_of_each_other() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let p = params();
        let emb = ppr_embed(&g, &p, 0).unwrap();
        let exact = solve_ppr(&g, 0, p.alpha);
        for u in 0..4 {
            for offset in 0..4 {
                let got = emb.matrix.get(u, (u + offset) % 4);
                assert!(
                    (got - exact[offset]).abs() < 10.0 * p.tol,
                    "row {u} offset {offset}: {got} vs {}",
                    exact[offset]
                );
            }
        }
    }

    #[test]
    fn power_iteration_matches_linear_solve() {
        let p = params();
        for seed in 0..5u64 {
            let g = crate::testutil::random_graph(10 + 4 * seed as usize, 0.25, seed);
            for u in [0usize, 3] {
                let fast = ppr_vector(&g, u, &p).unwrap();
                let exact = solve_ppr(&g, u, p.alpha);
                let linf = fast
                    .probs
                    .iter()
                    .zip(&exact)
                    .map(|(a, b)| (a - b).abs())
                    .fold(0.0f64, f64::max);
                assert!(linf <= 10.0 * p.tol, "seed {seed} u {u}: L∞ {linf}");
            }
        }
    }

    #[test]
    fn non_convergence_is_flagged_not_fatal() {
        let g = Graph::from_edges(4, &[(0, 1), (1, 2), (2, 3), (3, 0)]).unwrap();
        let p = PprParams {
            tol: 1e-15,
            max_iter: 2,
            ..PprParams::default()
        };
        let v = ppr_vector(&g, 0, &p).unwrap();
        assert!(!v.converged);
        assert_eq!(v.iterations, 2);
    }
}
