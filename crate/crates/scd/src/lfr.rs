//! Synthetic benchmark graphs with planted communities: power-law degrees,
//! power-law community sizes, and configuration-model stub matching split
//! into intra- and inter-community pools by the mixing parameter.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::mix_seed;
use crate::par;

/// Parameters of one synthetic network.
#[derive(Debug, Clone, PartialEq)]
pub struct LfrParams {
    pub n: usize,
    pub avg_deg: f64,
    pub max_deg: usize,
    /// Fraction of each node's edges wired outside its community.
    pub mixing: f64,
    /// Exponent of the degree distribution.
    pub degree_exp: f64,
    /// Exponent of the community-size distribution.
    pub comm_exp: f64,
    pub seed: u64,
}

impl LfrParams {
    pub fn new(n: usize, avg_deg: f64, max_deg: usize, mixing: f64, seed: u64) -> Self {
        LfrParams {
            n,
            avg_deg,
            max_deg,
            mixing,
            degree_exp: 2.0,
            comm_exp: 1.0,
            seed,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.n < 4 {
            return Err(Error::Infeasible(format!("n = {} too small", self.n)));
        }
        if !(0.0..=1.0).contains(&self.mixing) {
            return Err(Error::Infeasible(format!(
                "mixing {} outside [0,1]",
                self.mixing
            )));
        }
        if self.avg_deg < 1.0 {
            return Err(Error::Infeasible(format!(
                "avg_deg {} below 1",
                self.avg_deg
            )));
        }
        if (self.max_deg as f64) < self.avg_deg {
            return Err(Error::Infeasible(format!(
                "max_deg {} below avg_deg {}",
                self.max_deg, self.avg_deg
            )));
        }
        if self.max_deg >= self.n {
            return Err(Error::Infeasible(format!(
                "max_deg {} not below n {}",
                self.max_deg, self.n
            )));
        }
        if self.degree_exp <= 1.0 {
            return Err(Error::Infeasible(format!(
                "degree_exp {} must exceed 1",
                self.degree_exp
            )));
        }
        if self.comm_exp <= 0.0 {
            return Err(Error::Infeasible(format!(
                "comm_exp {} must be positive",
                self.comm_exp
            )));
        }
        Ok(())
    }

    /// Stable one-line description used in manifests.
    pub fn describe(&self) -> String {
        format!(
            "n={} avg_deg={} max_deg={} mixing={} degree_exp={} comm_exp={} seed={}",
            self.n, self.avg_deg, self.max_deg, self.mixing, self.degree_exp, self.comm_exp, self.seed
        )
    }
}

/// Mean of the continuous truncated power law `pdf ∝ x^-tau` on `[a, b]`.
fn truncated_mean(tau: f64, a: f64, b: f64) -> f64 {
    let z = if (tau - 1.0).abs() < 1e-12 {
        (b / a).ln()
    } else {
        (a.powf(1.0 - tau) - b.powf(1.0 - tau)) / (tau - 1.0)
    };
    let first = if (tau - 2.0).abs() < 1e-12 {
        (b / a).ln()
    } else {
        (a.powf(2.0 - tau) - b.powf(2.0 - tau)) / (tau - 2.0)
    };
    first / z
}

/// Inverse-CDF sample of the same distribution.
fn truncated_sample(tau: f64, a: f64, b: f64, u: f64) -> f64 {
    if (tau - 1.0).abs() < 1e-12 {
        a * (b / a).powf(u)
    } else {
        let lo = a.powf(1.0 - tau);
        let hi = b.powf(1.0 - tau);
        (lo - u * (lo - hi)).powf(1.0 / (1.0 - tau))
    }
}

/// Lower cutoff whose truncated power law has the requested mean.
fn solve_lower_cutoff(tau: f64, b: f64, target_mean: f64) -> Result<f64> {
    if truncated_mean(tau, 1.0, b) > target_mean {
        return Err(Error::Infeasible(format!(
            "avg_deg {target_mean} unreachable with degree_exp {tau} and max_deg {b}"
        )));
    }
    let (mut lo, mut hi) = (1.0f64, b);
    for _ in 0..80 {
        let mid = 0.5 * (lo + hi);
        if truncated_mean(tau, mid, b) < target_mean {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Repeatedly shuffles a stub pool and pairs adjacent entries, rejecting
/// pairs refused by `accept`. Every rejection spends budget; a full round
/// with no progress drops one stub so parity deadlocks cannot loop forever.
/// Returns the stubs left unmatched.
fn match_stubs(
    mut stubs: Vec<usize>,
    rng: &mut ChaCha8Rng,
    budget: &mut i64,
    mut accept: impl FnMut(usize, usize) -> bool,
    edges: &mut Vec<(usize, usize)>,
) -> Result<Vec<usize>> {
    while stubs.len() >= 2 {
        stubs.shuffle(rng);
        let mut retry = Vec::new();
        let mut accepted = 0usize;
        let mut it = stubs.chunks_exact(2);
        for pair in &mut it {
            let (u, v) = (pair[0], pair[1]);
            if u != v && accept(u, v) {
                edges.push((u, v));
                accepted += 1;
            } else {
                retry.push(u);
                retry.push(v);
                *budget -= 1;
                if *budget < 0 {
                    return Err(Error::Infeasible(
                        "stub matching exceeded its rejection budget".into(),
                    ));
                }
            }
        }
        retry.extend_from_slice(it.remainder());
        if accepted == 0 {
            retry.pop();
        }
        stubs = retry;
    }
    Ok(stubs)
}

/// Generates one synthetic network and its planted partition.
pub fn generate_lfr(params: &LfrParams) -> Result<(Graph, Partition)> {
    params.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(params.seed);
    let n = params.n;
    let b = params.max_deg as f64;
    let a = solve_lower_cutoff(params.degree_exp, b, params.avg_deg)?;

    let mut degrees: Vec<usize> = (0..n)
        .map(|_| {
            let x = truncated_sample(params.degree_exp, a, b, rng.random::<f64>());
            (x.round() as usize).clamp(1, params.max_deg)
        })
        .collect();
    if degrees.iter().sum::<usize>() % 2 == 1 {
        let bump = (0..n).find(|&i| degrees[i] < params.max_deg).unwrap_or(0);
        degrees[bump] += 1;
    }

    let mut internal: Vec<usize> = degrees
        .iter()
        .map(|&d| {
            let raw = ((1.0 - params.mixing) * d as f64).round() as usize;
            raw.min(d)
        })
        .collect();

    // Community sizes: power law anchored at the typical internal degree,
    // topping out at the largest internal degree present (plus one).
    let externalize = params.mixing > 0.0;
    let max_int = internal.iter().copied().max().unwrap_or(0);
    let typical_int = ((1.0 - params.mixing) * params.avg_deg).ceil() as usize + 1;
    let s_min = typical_int.max(3).min(n);
    let s_max = (max_int + 1).max(s_min + 1).min(n);
    // The first community is pinned to the top of the size range so the
    // largest internal degree always has a host.
    let mut sizes: Vec<usize> = vec![s_max];
    let mut assigned = s_max;
    while assigned < n {
        let s = truncated_sample(params.comm_exp, s_min as f64, s_max as f64, rng.random::<f64>())
            .round() as usize;
        let s = s.clamp(s_min, s_max).min(n - assigned);
        sizes.push(s);
        assigned += s;
    }
    // A trimmed tail below the minimum merges into its neighbor.
    if sizes.len() > 1 && *sizes.last().unwrap() < s_min {
        let tail = sizes.pop().unwrap();
        *sizes.last_mut().unwrap() += tail;
    }
    let n_comms = sizes.len();

    // Hardest nodes first: assign members to communities that can host their
    // internal degree, weighted by remaining capacity.
    let mut node_order: Vec<usize> = (0..n).collect();
    node_order.sort_by(|&x, &y| internal[y].cmp(&internal[x]).then(x.cmp(&y)));
    let mut capacity = sizes.clone();
    let mut membership = vec![usize::MAX; n];
    for &node in &node_order {
        let mut need = internal[node];
        let feasible_total = |need: usize, capacity: &[usize]| -> usize {
            (0..n_comms)
                .filter(|&c| capacity[c] > 0 && sizes[c] > need)
                .map(|c| capacity[c])
                .sum()
        };
        let mut total = feasible_total(need, &capacity);
        if total == 0 {
            // Capacity in large-enough communities ran out: demote internal
            // stubs until the node fits the largest community still open.
            let fit = (0..n_comms)
                .filter(|&c| capacity[c] > 0)
                .map(|c| sizes[c] - 1)
                .max()
                .ok_or_else(|| Error::Infeasible("community capacities exhausted".into()))?;
            let demoted = need - fit;
            internal[node] = fit;
            if !externalize {
                degrees[node] -= demoted;
            }
            need = fit;
            total = feasible_total(need, &capacity);
        }
        let mut target = rng.random_range(0..total);
        for c in 0..n_comms {
            if capacity[c] == 0 || sizes[c] <= need {
                continue;
            }
            if target < capacity[c] {
                membership[node] = c;
                capacity[c] -= 1;
                break;
            }
            target -= capacity[c];
        }
    }

    // Per-community internal stub parity: demote one stub to external.
    let mut members: Vec<Vec<usize>> = vec![Vec::new(); n_comms];
    for (node, &c) in membership.iter().enumerate() {
        members[c].push(node);
    }
    for comm in &members {
        let stub_sum: usize = comm.iter().map(|&i| internal[i]).sum();
        if stub_sum % 2 == 1 {
            let victim = *comm
                .iter()
                .max_by(|&&x, &&y| internal[x].cmp(&internal[y]).then(y.cmp(&x)))
                .expect("non-empty community");
            internal[victim] -= 1;
            if !externalize {
                // Zero mixing must stay exact: drop the stub instead of
                // rewiring it across communities.
                degrees[victim] -= 1;
            }
        }
    }

    let total_stubs: usize = degrees.iter().sum();
    let mut budget: i64 = 100 * total_stubs as i64;
    let mut seen = HashSet::new();
    let mut edges: Vec<(usize, usize)> = Vec::with_capacity(total_stubs / 2);
    let push_unique = |u: usize, v: usize, seen: &mut HashSet<(usize, usize)>| -> bool {
        seen.insert((u.min(v), u.max(v)))
    };

    let mut external_stubs: Vec<usize> = Vec::new();
    for comm in &members {
        let mut stubs = Vec::new();
        for &node in comm {
            stubs.extend(std::iter::repeat(node).take(internal[node]));
        }
        let leftover = match_stubs(stubs, &mut rng, &mut budget, |u, v| {
            push_unique(u, v, &mut seen)
        }, &mut edges)?;
        if externalize {
            external_stubs.extend(leftover);
        }
    }
    for (node, &deg) in degrees.iter().enumerate() {
        external_stubs.extend(std::iter::repeat(node).take(deg - internal[node]));
    }
    let membership_ref = &membership;
    match_stubs(external_stubs, &mut rng, &mut budget, |u, v| {
        membership_ref[u] != membership_ref[v] && push_unique(u, v, &mut seen)
    }, &mut edges)?;

    let graph = Graph::from_weighted_edges(n, edges.iter().map(|&(u, v)| (u, v, 1.0)))?;
    graph.assert_invariants();
    let truth = Partition::from_labels(&membership);

    if graph.n_edges() == 0 {
        return Err(Error::Infeasible("generation produced no edges".into()));
    }
    let empirical = mixing_fraction(&graph, &truth);
    if (empirical - params.mixing).abs() > 0.05 {
        return Err(Error::Infeasible(format!(
            "empirical mixing {empirical:.3} strayed from target {}",
            params.mixing
        )));
    }
    Ok((graph, truth))
}

/// Fraction of edge weight crossing community boundaries.
pub fn mixing_fraction(g: &Graph, p: &Partition) -> f64 {
    let labels = p.labels();
    let mut cross = 0.0;
    let mut total = 0.0;
    for &(u, v, w) in g.edges() {
        total += w;
        if labels[u] != labels[v] {
            cross += w;
        }
    }
    if total == 0.0 {
        0.0
    } else {
        cross / total
    }
}

/// Cartesian grid of generator parameters.
#[derive(Debug, Clone)]
pub struct GridSpec {
    pub nodes: Vec<usize>,
    pub avg_degs: Vec<f64>,
    pub max_degs: Vec<usize>,
    pub mixings: Vec<f64>,
    pub degree_exp: f64,
    pub comm_exp: f64,
    pub seed: u64,
}

/// One grid entry: its parameters and either the generated network or the
/// reason it was skipped.
pub struct GridCell {
    pub index: usize,
    pub params: LfrParams,
    pub outcome: Result<(Graph, Partition)>,
}

/// Expands the grid in `nodes × avg_degs × max_degs × mixings` order,
/// generating cells in parallel. Each cell's RNG seed is derived from the
/// grid seed and the cell index, so the grid is reproducible regardless of
/// worker count. Infeasible combinations are reported, not fatal.
pub fn generate_grid(spec: &GridSpec) -> Vec<GridCell> {
    let mut combos = Vec::new();
    for &n in &spec.nodes {
        for &avg in &spec.avg_degs {
            for &max in &spec.max_degs {
                for &mix in &spec.mixings {
                    let index = combos.len();
                    combos.push(LfrParams {
                        n,
                        avg_deg: avg,
                        max_deg: max,
                        mixing: mix,
                        degree_exp: spec.degree_exp,
                        comm_exp: spec.comm_exp,
                        seed: mix_seed(&[spec.seed, index as u64]),
                    });
                }
            }
        }
    }
    par::map_indexed(combos.len(), |i| {
        let params = combos[i].clone();
        let outcome = generate_lfr(&params);
        GridCell {
            index: i,
            params,
            outcome,
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metrics::modularity;

    #[test]
    fn zero_mixing_has_no_cross_edges() {
        let params = LfrParams::new(200, 8.0, 20, 0.0, 42);
        let (g, truth) = generate_lfr(&params).unwrap();
        assert_eq!(mixing_fraction(&g, &truth), 0.0);
    }

    #[test]
    fn thousand_node_benchmark_hits_targets() {
        let params = LfrParams::new(1000, 15.0, 50, 0.1, 7);
        let (g, truth) = generate_lfr(&params).unwrap();
        let mix = mixing_fraction(&g, &truth);
        assert!((0.05..=0.15).contains(&mix), "mixing {mix}");
        let mean_deg = g.volume() / g.n_nodes() as f64;
        assert!((13.5..=16.5).contains(&mean_deg), "mean degree {mean_deg}");
        assert!(truth.n_communities() > 5);
    }

    #[test]
    fn full_mixing_destroys_community_signal() {
        let params = LfrParams::new(500, 10.0, 30, 1.0, 3);
        let (g, truth) = generate_lfr(&params).unwrap();
        let q = modularity(&g, &truth).unwrap();
        assert!(q.abs() < 0.05, "modularity {q}");
    }

    #[test]
    fn low_mixing_keeps_planted_modularity_high() {
        for mixing in [0.1, 0.2] {
            let params = LfrParams::new(400, 10.0, 30, mixing, 11);
            let (g, truth) = generate_lfr(&params).unwrap();
            let q = modularity(&g, &truth).unwrap();
            assert!(q >= 0.5, "mixing {mixing}: modularity {q}");
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let params = LfrParams::new(300, 12.0, 40, 0.2, 99);
        let (g1, t1) = generate_lfr(&params).unwrap();
        let (g2, t2) = generate_lfr(&params).unwrap();
        assert_eq!(g1.edges(), g2.edges());
        assert_eq!(t1, t2);
    }

    #[test]
    fn grid_counts_and_skips() {
        let spec = GridSpec {
            nodes: vec![100, 200],
            avg_degs: vec![8.0],
            max_degs: vec![20],
            mixings: vec![0.1, 0.3],
            degree_exp: 2.0,
            comm_exp: 1.0,
            seed: 5,
        };
        let cells = generate_grid(&spec);
        assert_eq!(cells.len(), 4);
        assert!(cells.iter().all(|c| c.outcome.is_ok()));

        let bad = GridSpec {
            avg_degs: vec![30.0],
            max_degs: vec![10],
            ..spec
        };
        let cells = generate_grid(&bad);
        assert_eq!(cells.len(), 4);
        for cell in &cells {
            match &cell.outcome {
                Err(Error::Infeasible(reason)) => assert!(reason.contains("max_deg")),
                other => panic!("expected infeasible, got {other:?}"),
            }
        }
    }

    #[test]
    fn paper_style_grid_passes_graph_invariants() {
        let spec = GridSpec {
            nodes: vec![100, 500, 1000],
            avg_degs: vec![15.0],
            max_degs: vec![10, 50],
            mixings: vec![0.1, 0.5],
            degree_exp: 2.0,
            comm_exp: 1.0,
            seed: 1,
        };
        let cells = generate_grid(&spec);
        let mut ok = 0;
        for cell in &cells {
            if let Ok((g, truth)) = &cell.outcome {
                g.assert_invariants();
                assert_eq!(truth.len(), g.n_nodes());
                ok += 1;
            }
        }
        // max_deg = 10 < avg_deg = 15 is skipped; the rest generate.
        assert_eq!(ok, 6);
    }
}
