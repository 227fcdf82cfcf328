//! Reference community detectors: asynchronous label propagation (weak
//! baseline) and two-phase Louvain modularity optimization (strong baseline).

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};

/// Asynchronous label propagation. Every node starts with a unique label;
/// nodes are visited in a freshly shuffled order each pass and adopt the
/// weighted majority label among their neighbors, breaking ties at random.
/// Stops after a pass with no change, or after `max_iter` passes.
pub fn label_propagation(g: &Graph, seed: u64, max_iter: usize) -> Partition {
    let n = g.n_nodes();
    let mut labels: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    for _ in 0..max_iter {
        order.shuffle(&mut rng);
        let mut changed = false;
        for &i in &order {
            if g.neighbors(i).is_empty() {
                continue;
            }
            let mut weight: HashMap<usize, f64> = HashMap::new();
            for &(j, w) in g.neighbors(i) {
                *weight.entry(labels[j]).or_insert(0.0) += w;
            }
            let max = weight.values().cloned().fold(f64::NEG_INFINITY, f64::max);
            let mut candidates: Vec<usize> = weight
                .iter()
                .filter(|&(_, &w)| w == max)
                .map(|(&l, _)| l)
                .collect();
            candidates.sort_unstable();
            if candidates.contains(&labels[i]) {
                continue;
            }
            let pick = if candidates.len() == 1 {
                candidates[0]
            } else {
                candidates[rng.random_range(0..candidates.len())]
            };
            labels[i] = pick;
            changed = true;
        }
        if !changed {
            break;
        }
    }
    Partition::from_labels(&labels)
}

/// Aggregated graph used between Louvain levels. Self-loop weights carry the
/// collapsed internal edge weight of each supernode.
struct LevelGraph {
    n: usize,
    adj: Vec<Vec<(usize, f64)>>,
    self_w: Vec<f64>,
    strength: Vec<f64>,
    two_m: f64,
}

impl LevelGraph {
    fn from_graph(g: &Graph) -> Self {
        let n = g.n_nodes();
        let adj: Vec<Vec<(usize, f64)>> = (0..n).map(|u| g.neighbors(u).to_vec()).collect();
        let strength: Vec<f64> = g.degrees().to_vec();
        let two_m = g.volume();
        LevelGraph {
            n,
            adj,
            self_w: vec![0.0; n],
            strength,
            two_m,
        }
    }

    /// One round of local moving. Returns the node→community assignment and
    /// how many moves were made in total.
    fn local_moving(&self, rng: &mut ChaCha8Rng) -> (Vec<usize>, usize) {
        self.local_moving_from(rng, (0..self.n).collect())
    }

    /// Local moving from a given starting assignment (labels must be dense).
    fn local_moving_from(&self, rng: &mut ChaCha8Rng, init: Vec<usize>) -> (Vec<usize>, usize) {
        let mut comm = init;
        let mut comm_tot = vec![0.0f64; self.n];
        for (node, &c) in comm.iter().enumerate() {
            comm_tot[c] += self.strength[node];
        }
        let mut order: Vec<usize> = (0..self.n).collect();
        let mut total_moves = 0usize;
        let mut passes = 0usize;
        loop {
            passes += 1;
            if passes > 256 {
                break;
            }
            order.shuffle(rng);
            let mut moved = 0usize;
            for &i in &order {
                let ci = comm[i];
                let k_i = self.strength[i];
                let mut to: Vec<(usize, f64)> = Vec::with_capacity(self.adj[i].len());
                for &(j, w) in &self.adj[i] {
                    match to.binary_search_by(|probe| probe.0.cmp(&comm[j])) {
                        Ok(pos) => to[pos].1 += w,
                        Err(pos) => to.insert(pos, (comm[j], w)),
                    }
                }
                comm_tot[ci] -= k_i;
                let own_links = to
                    .binary_search_by(|probe| probe.0.cmp(&ci))
                    .map(|pos| to[pos].1)
                    .unwrap_or(0.0);
                let mut best_comm = ci;
                let mut best_gain = own_links - comm_tot[ci] * k_i / self.two_m;
                for &(c, k_ic) in &to {
                    if c == ci {
                        continue;
                    }
                    let gain = k_ic - comm_tot[c] * k_i / self.two_m;
                    if gain > best_gain {
                        best_gain = gain;
                        best_comm = c;
                    }
                }
                comm[i] = best_comm;
                comm_tot[best_comm] += k_i;
                if best_comm != ci {
                    moved += 1;
                }
            }
            total_moves += moved;
            if moved == 0 {
                break;
            }
        }
        (comm, total_moves)
    }

    /// Collapses communities into supernodes.
    fn aggregate(&self, comm: &[usize]) -> (LevelGraph, Vec<usize>) {
        let dense = Partition::from_labels(comm);
        let labels = dense.labels().to_vec();
        let k = dense.n_communities();
        let mut self_w = vec![0.0f64; k];
        let mut between: Vec<HashMap<usize, f64>> = vec![HashMap::new(); k];
        for i in 0..self.n {
            let ci = labels[i];
            self_w[ci] += self.self_w[i];
            for &(j, w) in &self.adj[i] {
                let cj = labels[j];
                if ci == cj {
                    if i < j {
                        self_w[ci] += w;
                    }
                } else {
                    *between[ci].entry(cj).or_insert(0.0) += w;
                }
            }
        }
        let mut adj: Vec<Vec<(usize, f64)>> = between
            .into_iter()
            .map(|m| {
                let mut v: Vec<(usize, f64)> = m.into_iter().collect();
                v.sort_unstable_by(|a, b| a.0.cmp(&b.0));
                v
            })
            .collect();
        for list in &mut adj {
            list.shrink_to_fit();
        }
        let strength: Vec<f64> = (0..k)
            .map(|c| 2.0 * self_w[c] + adj[c].iter().map(|&(_, w)| w).sum::<f64>())
            .collect();
        (
            LevelGraph {
                n: k,
                adj,
                self_w,
                strength,
                two_m: self.two_m,
            },
            labels,
        )
    }
}

/// Two-phase Louvain: local moving to positive-gain modularity optima, then
/// graph aggregation, repeated until no move improves anything. The visit
/// order is reshuffled from the seed each pass.
pub fn louvain(g: &Graph, seed: u64) -> Result<Partition> {
    if g.n_edges() == 0 {
        return Err(Error::EdgelessGraph);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = LevelGraph::from_graph(g);
    let mut level = LevelGraph::from_graph(g);
    let mut node_comm: Vec<usize> = (0..g.n_nodes()).collect();
    loop {
        let (comm, moves) = level.local_moving(&mut rng);
        if moves == 0 {
            break;
        }
        let (next, labels) = level.aggregate(&comm);
        for slot in node_comm.iter_mut() {
            *slot = labels[*slot];
        }
        if next.n == level.n {
            break;
        }
        level = next;
    }
    // Refine at the original resolution so no single-node move is left with
    // positive gain (aggregation alone does not guarantee that).
    let dense = Partition::from_labels(&node_comm);
    let (refined, _) = base.local_moving_from(&mut rng, dense.labels().to_vec());
    Ok(Partition::from_labels(&refined))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::modularity;

    fn two_triangles() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap()
    }

    #[test]
    fn label_propagation_finds_components() {
        let g = two_triangles();
        let p = label_propagation(&g, 3, 100);
        assert_eq!(p.n_communities(), 2);
        assert_eq!(p.labels()[0], p.labels()[1]);
        assert_eq!(p.labels()[0], p.labels()[2]);
        assert_eq!(p.labels()[3], p.labels()[4]);
        assert_ne!(p.labels()[0], p.labels()[3]);
    }

    #[test]
    fn label_propagation_on_edgeless_graph_gives_singletons() {
        let g = Graph::from_edges(4, &[]).unwrap();
        let p = label_propagation(&g, 0, 100);
        assert_eq!(p.n_communities(), 4);
    }

    #[test]
    fn label_propagation_collapses_complete_graph() {
        let mut edges = Vec::new();
        for u in 0..10 {
            for v in (u + 1)..10 {
                edges.push((u, v));
            }
        }
        let g = Graph::from_edges(10, &edges).unwrap();
        for seed in 0..50 {
            let p = label_propagation(&g, seed, 100);
            assert_eq!(p.n_communities(), 1, "seed {seed}");
        }
    }

    #[test]
    fn label_propagation_is_deterministic() {
        let g = crate::testutil::random_graph(40, 0.1, 8);
        let a = label_propagation(&g, 17, 100);
        let b = label_propagation(&g, 17, 100);
        assert_eq!(a, b);
    }

    #[test]
    fn louvain_recovers_two_triangles() {
        let g = two_triangles();
        let p = louvain(&g, 0).unwrap();
        assert_eq!(p.n_communities(), 2);
        let q = modularity(&g, &p).unwrap();
        assert!((q - 0.5).abs() < 1e-12);
    }

    #[test]
    fn louvain_keeps_star_together() {
        let g = Graph::from_edges(6, &[(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)]).unwrap();
        let p = louvain(&g, 1).unwrap();
        assert_eq!(p.n_communities(), 1);
        // Exhaustive check: no partition of 6 nodes beats the single block.
        let best = best_modularity_exhaustive(&g);
        let got = modularity(&g, &p).unwrap();
        assert!(got >= best - 1e-12, "louvain {got} vs exhaustive {best}");
    }

    #[test]
    fn louvain_beats_trivial_partitions() {
        for seed in 0..5u64 {
            let g = crate::testutil::random_graph(30, 0.15, seed);
            let p = louvain(&g, seed).unwrap();
            let q = modularity(&g, &p).unwrap();
            let singletons = modularity(&g, &Partition::singletons(30)).unwrap();
            let single = modularity(&g, &Partition::from_labels(&vec![0; 30])).unwrap();
            assert!(q >= singletons - 1e-12);
            assert!(q >= single - 1e-12);
        }
    }

    #[test]
    fn louvain_is_single_move_optimal() {
        for seed in 0..3u64 {
            let g = crate::testutil::random_graph(25, 0.2, seed + 30);
            let p = louvain(&g, seed).unwrap();
            let base = modularity(&g, &p).unwrap();
            let k = p.n_communities();
            for node in 0..g.n_nodes() {
                for target in 0..=k {
                    if target == p.labels()[node] {
                        continue;
                    }
                    let mut labels = p.labels().to_vec();
                    labels[node] = target;
                    let q = modularity(&g, &Partition::from_labels(&labels)).unwrap();
                    assert!(
                        q <= base + 1e-9,
                        "seed {seed}: moving {node} to {target} raises Q {base} -> {q}"
                    );
                }
            }
        }
    }

    #[test]
    fn louvain_rejects_edgeless_graphs() {
        let g = Graph::from_edges(3, &[]).unwrap();
        assert!(matches!(louvain(&g, 0), Err(Error::EdgelessGraph)));
    }

    /// Enumerates every partition of the graph's nodes (Bell-number search;
    /// fine for n <= 8) and returns the best modularity.
    fn best_modularity_exhaustive(g: &Graph) -> f64 {
        let n = g.n_nodes();
        let mut labels = vec![0usize; n];
        let mut best = f64::NEG_INFINITY;
        fn rec(g: &Graph, labels: &mut Vec<usize>, pos: usize, max_used: usize, best: &mut f64) {
            if pos == labels.len() {
                let p = Partition::from_labels(labels);
                if let Ok(q) = modularity(g, &p) {
                    if q > *best {
                        *best = q;
                    }
                }
                return;
            }
            for label in 0..=max_used + 1 {
                labels[pos] = label;
                rec(g, labels, pos + 1, max_used.max(label), best);
            }
        }
        rec(g, &mut labels, 1, 0, &mut best);
        best
    }
}
