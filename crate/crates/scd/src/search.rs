//! Two-phase search for the partition maximizing the global Silhouette:
//! a coarse sweep over a strided range of cluster counts with an
//! improvement-patience stop, followed by exhaustive refinement around the
//! coarse optimum, repeated for every embedding parameter set.

use std::io::Write;
use std::time::Instant;

use crate::embedding::{Backend, EmbeddingParams, RowMatrix};
use crate::error::{Error, Result};
use crate::graph::{Graph, Partition};
use crate::kmeans::{minibatch_kmeans, KMeansOptions};
use crate::mix_seed;
use crate::netmf::netmf_embed;
use crate::par;
use crate::ppr::{ppr_embed, PprParams};
use crate::silhouette::{normalize_scores, silhouette_global, silhouette_global_sampled};

/// Configuration of one full search run.
#[derive(Debug, Clone)]
pub struct SearchConfig {
    /// Embedding parameter sets to sweep (𝒫).
    pub param_sets: Vec<EmbeddingParams>,
    /// Maximum cluster count considered (K); 0 resolves to the node count.
    pub max_clusters: usize,
    /// Coarse grid step (γ); 0 resolves to [`gamma_estimate`].
    pub gamma: usize,
    /// Stopping patience (w): consecutive non-improving coarse evaluations
    /// tolerated before the sweep halts.
    pub patience: usize,
    /// Smallest cluster count on the coarse grid.
    pub k_min: usize,
    /// Emit min-max-normalized scores in reports.
    pub normalize: bool,
    pub seed: u64,
    pub kmeans: KMeansOptions,
    pub ppr: PprParams,
    /// Refinement radius around the coarse optimum; `None` resolves to γ−1,
    /// the gap left by the coarse grid.
    pub fine_radius: Option<usize>,
    /// Optional uniform point subsample for the Silhouette (approximate).
    pub silhouette_sample: Option<usize>,
}

impl Default for SearchConfig {
    fn default() -> Self {
        SearchConfig {
            param_sets: Vec::new(),
            max_clusters: 0,
            gamma: 0,
            patience: 5,
            k_min: 5,
            normalize: false,
            seed: 0,
            kmeans: KMeansOptions::default(),
            ppr: PprParams::default(),
            fine_radius: None,
            silhouette_sample: None,
        }
    }
}

/// `γ = max(1, round(K^(2/3)))`.
pub fn gamma_estimate(max_clusters: usize) -> usize {
    let k = max_clusters as f64;
    ((k * k).cbrt().round() as usize).max(1)
}

/// Arithmetic progression `k_min, k_min+γ, … ≤ K`.
pub fn valid_range(max_clusters: usize, gamma: usize, k_min: usize) -> Result<Vec<usize>> {
    if gamma == 0 {
        return Err(Error::InvalidParameter {
            name: "gamma",
            reason: "must be >= 1".into(),
        });
    }
    if k_min == 0 || k_min > max_clusters {
        return Err(Error::EmptyRange);
    }
    Ok((k_min..=max_clusters).step_by(gamma).collect())
}

/// Which search phase produced an evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Phase {
    Coarse,
    Fine,
}

impl std::fmt::Display for Phase {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Phase::Coarse => write!(f, "coarse"),
            Phase::Fine => write!(f, "fine"),
        }
    }
}

/// One `(param set, k)` evaluation.
#[derive(Debug, Clone)]
pub struct EvalRecord {
    pub param_idx: usize,
    pub k: usize,
    pub phase: Phase,
    pub silhouette: Option<f64>,
    pub error: Option<String>,
    pub millis: u64,
}

/// Evaluates one cluster count against a fixed embedding: cluster, then
/// score. The k-means seed is derived from `(seed, param index, k)` so any
/// single evaluation can be re-run in isolation.
pub struct Evaluator<'a> {
    pub embedding: &'a RowMatrix,
    pub kmeans: KMeansOptions,
    pub seed: u64,
    pub param_idx: usize,
    pub silhouette_sample: Option<usize>,
}

impl Evaluator<'_> {
    pub fn evaluate(&self, k: usize) -> Result<(Vec<usize>, f64)> {
        let seed = mix_seed(&[self.seed, self.param_idx as u64, k as u64]);
        let model = minibatch_kmeans(self.embedding, k, &self.kmeans, seed)?;
        let quality = match self.silhouette_sample {
            Some(sample) => {
                silhouette_global_sampled(self.embedding, &model.labels, sample, seed)?
            }
            None => silhouette_global(self.embedding, &model.labels)?,
        };
        Ok((model.labels, quality))
    }

    fn record(&self, k: usize, phase: Phase) -> (EvalRecord, Option<(Vec<usize>, f64)>) {
        let start = Instant::now();
        let outcome = self.evaluate(k);
        let millis = start.elapsed().as_millis() as u64;
        match outcome {
            Ok((labels, q)) => (
                EvalRecord {
                    param_idx: self.param_idx,
                    k,
                    phase,
                    silhouette: Some(q),
                    error: None,
                    millis,
                },
                Some((labels, q)),
            ),
            Err(e) => (
                EvalRecord {
                    param_idx: self.param_idx,
                    k,
                    phase,
                    silhouette: None,
                    error: Some(e.to_string()),
                    millis,
                },
                None,
            ),
        }
    }
}

/// Result of one coarse sweep.
pub struct SweepOutcome {
    /// Best `(k, labels, quality)` found, if anything beat the baseline.
    pub best: Option<(usize, Vec<usize>, f64)>,
    pub records: Vec<EvalRecord>,
}

/// Walks the range in order, keeping a running maximum. A patience counter
/// starts at `patience`, loses one per evaluation, resets on improvement
/// over the running maximum (seeded with `baseline`), and stops the sweep
/// at zero. Per-k failures are recorded and the sweep continues.
pub fn coarse_sweep(
    evaluator: &Evaluator<'_>,
    range: &[usize],
    patience: usize,
    baseline: f64,
) -> SweepOutcome {
    sweep_impl(range, patience, baseline, |k| {
        evaluator.record(k, Phase::Coarse)
    })
}

fn sweep_impl<F>(range: &[usize], patience: usize, baseline: f64, mut eval: F) -> SweepOutcome
where
    F: FnMut(usize) -> (EvalRecord, Option<(Vec<usize>, f64)>),
{
    let mut best: Option<(usize, Vec<usize>, f64)> = None;
    let mut best_quality = baseline;
    let mut patience_left = patience;
    let mut records = Vec::new();
    for &k in range {
        let (record, outcome) = eval(k);
        records.push(record);
        patience_left = patience_left.saturating_sub(1);
        if let Some((labels, quality)) = outcome {
            if quality > best_quality {
                best_quality = quality;
                best = Some((k, labels, quality));
                patience_left = patience;
            }
        }
        if patience_left == 0 {
            break;
        }
    }
    SweepOutcome { best, records }
}

/// Exhaustively evaluates every k in `[best_k − radius, best_k + radius]`
/// clamped to `[2, k_max]`, reusing the cached result at `best_k` itself.
/// Evaluations are order-independent and run in parallel; the argmax breaks
/// ties toward the lowest k. Returns at least the cached optimum.
pub fn fine_grained(
    evaluator: &Evaluator<'_>,
    best_k: usize,
    best_labels: Vec<usize>,
    best_quality: f64,
    radius: usize,
    k_max: usize,
) -> (usize, Vec<usize>, f64, Vec<EvalRecord>) {
    let lo = best_k.saturating_sub(radius).max(2);
    let hi = (best_k + radius).min(k_max);
    let window: Vec<usize> = (lo..=hi).filter(|&k| k != best_k).collect();
    let results = par::map_indexed(window.len(), |i| evaluator.record(window[i], Phase::Fine));

    let mut chosen = (best_k, best_labels, best_quality);
    let mut records = Vec::with_capacity(window.len());
    // Ascending k with strict improvement keeps the lowest k on ties; the
    // cached coarse optimum participates at its own position.
    for (record, outcome) in results {
        let k = record.k;
        records.push(record);
        if let Some((labels, quality)) = outcome {
            let better = quality > chosen.2 || (quality == chosen.2 && k < chosen.0);
            if better {
                chosen = (k, labels, quality);
            }
        }
    }
    (chosen.0, chosen.1, chosen.2, records)
}

/// Provenance and outcome of one embedding parameter set.
#[derive(Debug, Clone)]
pub struct ParamSummary {
    pub params: EmbeddingParams,
    pub embed_millis: u64,
    pub embed_error: Option<String>,
}

/// The winning evaluation.
#[derive(Debug, Clone)]
pub struct Chosen {
    pub param_idx: usize,
    pub k: usize,
    pub quality: f64,
}

/// Full trace of a search run.
#[derive(Debug, Clone)]
pub struct SearchReport {
    pub params: Vec<ParamSummary>,
    pub records: Vec<EvalRecord>,
    pub chosen: Option<Chosen>,
    /// Degree-0 nodes forced into singleton communities on output.
    pub isolated_nodes: usize,
    pub total_millis: u64,
    /// Resolved search knobs, for the report header.
    pub resolved_k_max: usize,
    pub resolved_gamma: usize,
}

/// Runs the full search: for each parameter set, embed, sweep coarsely, and
/// refine when the sweep improved the global optimum, keeping the best of
/// the coarse and fine results. Deterministic given `config.seed`.
///
/// Isolated (degree-0) nodes are reassigned to their own singleton
/// communities in the returned partition and counted in the report.
pub fn scd_detect(g: &Graph, config: &SearchConfig) -> Result<(Partition, SearchReport)> {
    let started = Instant::now();
    let n = g.n_nodes();
    if n < 2 || g.n_edges() == 0 {
        return Err(Error::InvalidParameter {
            name: "graph",
            reason: format!("need >= 2 nodes and >= 1 edge, got {n} nodes, {} edges", g.n_edges()),
        });
    }
    if config.param_sets.is_empty() {
        return Err(Error::NoParamSets);
    }
    let k_max = if config.max_clusters == 0 {
        n
    } else {
        config.max_clusters.min(n)
    };
    let k_min = config.k_min;
    if k_min < 2 {
        return Err(Error::InvalidParameter {
            name: "k_min",
            reason: "must be >= 2".into(),
        });
    }
    if k_min > k_max {
        return Err(Error::EmptyRange);
    }
    let gamma = if config.gamma == 0 {
        gamma_estimate(k_max)
    } else {
        config.gamma
    };
    let range = valid_range(k_max, gamma, k_min)?;
    let radius = config.fine_radius.unwrap_or(gamma - 1);

    let mut report = SearchReport {
        params: Vec::new(),
        records: Vec::new(),
        chosen: None,
        isolated_nodes: 0,
        total_millis: 0,
        resolved_k_max: k_max,
        resolved_gamma: gamma,
    };
    let mut global: Option<(usize, usize, Vec<usize>, f64)> = None;
    let mut last_error = String::from("no parameter sets ran");

    for (param_idx, params) in config.param_sets.iter().enumerate() {
        let embed_start = Instant::now();
        let embedded = match params.backend {
            Backend::NetMf => netmf_embed(g, params),
            Backend::Ppr => ppr_embed(g, &config.ppr, params.seed),
        };
        let embed_millis = embed_start.elapsed().as_millis() as u64;
        let emb = match embedded {
            Ok(e) => {
                report.params.push(ParamSummary {
                    params: e.params.clone(),
                    embed_millis,
                    embed_error: None,
                });
                e
            }
            Err(e) => {
                last_error = e.to_string();
                report.params.push(ParamSummary {
                    params: params.clone(),
                    embed_millis,
                    embed_error: Some(last_error.clone()),
                });
                continue;
            }
        };

        let evaluator = Evaluator {
            embedding: &emb.matrix,
            kmeans: config.kmeans.clone(),
            seed: config.seed,
            param_idx,
            silhouette_sample: config.silhouette_sample,
        };
        let baseline = global.as_ref().map_or(f64::NEG_INFINITY, |g| g.3);
        let sweep = coarse_sweep(&evaluator, &range, config.patience, baseline);
        report.records.extend(sweep.records);
        if let Some((k, labels, quality)) = sweep.best {
            let (k, labels, quality, fine_records) =
                fine_grained(&evaluator, k, labels, quality, radius, k_max);
            report.records.extend(fine_records);
            global = Some((param_idx, k, labels, quality));
        }
    }

    let (param_idx, k, mut labels, quality) = match global {
        Some(g) => g,
        None => return Err(Error::AllEmbeddingsFailed(last_error)),
    };

    // Isolated nodes become singleton communities at output time.
    let mut next_label = labels.iter().copied().max().unwrap_or(0) + 1;
    let mut isolated = 0usize;
    for node in 0..n {
        if g.degree(node) == 0.0 {
            labels[node] = next_label;
            next_label += 1;
            isolated += 1;
        }
    }
    report.isolated_nodes = isolated;
    report.chosen = Some(Chosen {
        param_idx,
        k,
        quality,
    });
    report.total_millis = started.elapsed().as_millis() as u64;
    Ok((Partition::from_labels(&labels), report))
}

/// Serializes a report: header lines, one parameter-provenance line per
/// set, one record per evaluation, and a trailing `chosen` line. Millis
/// columns are zeroed unless `timings` is set, keeping default output
/// byte-identical across runs.
pub fn write_report<W: Write>(
    report: &SearchReport,
    seed: u64,
    config_hash: u64,
    timings: bool,
    mut w: W,
) -> Result<()> {
    writeln!(w, "# scd-report v{}", env!("CARGO_PKG_VERSION"))?;
    writeln!(w, "# seed {seed}")?;
    writeln!(w, "# config-hash {config_hash:016x}")?;
    writeln!(w, "# k-max {}", report.resolved_k_max)?;
    writeln!(w, "# gamma {}", report.resolved_gamma)?;
    writeln!(w, "# isolated-nodes {}", report.isolated_nodes)?;
    if timings {
        writeln!(w, "# total-millis {}", report.total_millis)?;
    }
    for (idx, summary) in report.params.iter().enumerate() {
        let status = match &summary.embed_error {
            None => "ok".to_string(),
            Some(e) => format!("error: {}", sanitize(e)),
        };
        let millis = if timings { summary.embed_millis } else { 0 };
        writeln!(
            w,
            "# param {idx} {} embed-millis {millis} status {status}",
            summary.params.describe()
        )?;
    }
    writeln!(w, "# columns: param\tphase\tk\tsilhouette\tnormalized\tmillis\tstatus")?;

    // Min-max normalization per parameter-set group.
    let normalized = normalize_records(report);
    for (record, norm) in report.records.iter().zip(&normalized) {
        let sil = record
            .silhouette
            .map_or("-".to_string(), |s| format!("{s:.6}"));
        let norm = norm.map_or("-".to_string(), |s| format!("{s:.6}"));
        let status = match &record.error {
            None => "ok".to_string(),
            Some(e) => format!("error: {}", sanitize(e)),
        };
        let millis = if timings { record.millis } else { 0 };
        writeln!(
            w,
            "{}\t{}\t{}\t{sil}\t{norm}\t{millis}\t{status}",
            record.param_idx, record.phase, record.k
        )?;
    }
    if let Some(chosen) = &report.chosen {
        writeln!(
            w,
            "# chosen param {} k {} silhouette {:.6}",
            chosen.param_idx, chosen.k, chosen.quality
        )?;
    }
    Ok(())
}

/// Per-record normalized scores grouped by parameter set; `None` mirrors
/// failed evaluations.
fn normalize_records(report: &SearchReport) -> Vec<Option<f64>> {
    let mut out = vec![None; report.records.len()];
    let n_params = report.params.len();
    for param_idx in 0..n_params {
        let group: Vec<(usize, f64)> = report
            .records
            .iter()
            .enumerate()
            .filter(|(_, r)| r.param_idx == param_idx)
            .filter_map(|(i, r)| r.silhouette.map(|s| (i, s)))
            .collect();
        if group.is_empty() {
            continue;
        }
        let scores: Vec<(usize, f64)> = group.iter().map(|&(_, s)| (0usize, s)).collect();
        let (normed, _) = normalize_scores(&scores);
        for (&(record_idx, _), &(_, value)) in group.iter().zip(&normed) {
            out[record_idx] = Some(value);
        }
    }
    out
}

fn sanitize(s: &str) -> String {
    s.replace(['\t', '\n'], " ")
}

/// Writes a `k<TAB>silhouette<TAB>normalized` sweep trace.
pub fn write_sweep_trace<W: Write>(scores: &[(usize, f64)], mut w: W) -> Result<()> {
    let (normalized, degenerate) = normalize_scores(scores);
    writeln!(w, "# k\tsilhouette\tnormalized{}", if degenerate { "\t(degenerate)" } else { "" })?;
    for (&(k, s), &(_, norm)) in scores.iter().zip(&normalized) {
        writeln!(w, "{k}\t{s:.6}\t{norm:.6}")?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::embedding::EmbeddingParams;

    #[test]
    fn gamma_estimate_examples() {
        assert_eq!(gamma_estimate(1000), 100);
        assert_eq!(gamma_estimate(1), 1);
        assert_eq!(gamma_estimate(8), 4);
    }

    #[test]
    fn valid_range_examples() {
        let r = valid_range(1005, 10, 5).unwrap();
        assert_eq!(r.first(), Some(&5));
        assert_eq!(r.last(), Some(&1005));
        assert_eq!(r.len(), 101);
        assert!(r.windows(2).all(|w| w[1] - w[0] == 10));

        assert_eq!(valid_range(10, 100, 5).unwrap(), vec![5]);
        assert_eq!(valid_range(12, 4, 4).unwrap(), vec![4, 8, 12]);
        assert!(matches!(valid_range(3, 1, 5), Err(Error::EmptyRange)));
    }

    /// Four well-separated 1D blobs; silhouette peaks at k = 4.
    fn planted_four_blobs() -> RowMatrix {
        let mut rows = Vec::new();
        for (center, jitter) in [(0.0, 0.01), (10.0, 0.02), (20.0, 0.015), (30.0, 0.01)] {
            for i in 0..5 {
                rows.push(vec![center + jitter * i as f64]);
            }
        }
        RowMatrix::from_rows(&rows)
    }

    fn evaluator(m: &RowMatrix) -> Evaluator<'_> {
        Evaluator {
            embedding: m,
            kmeans: KMeansOptions::default(),
            seed: 7,
            param_idx: 0,
            silhouette_sample: None,
        }
    }

    #[test]
    fn coarse_sweep_exhausts_range_with_full_patience() {
        let m = planted_four_blobs();
        let ev = evaluator(&m);
        let range = vec![2, 3, 4, 5, 6];
        let sweep = coarse_sweep(&ev, &range, range.len(), f64::NEG_INFINITY);
        let (k, _, _) = sweep.best.unwrap();
        assert_eq!(k, 4);
        assert_eq!(sweep.records.len(), 5);
    }

    #[test]
    fn constant_quality_stops_after_patience_plus_one() {
        // Stub evaluator with a flat quality curve: the first evaluation
        // improves over -inf and resets the counter, then exactly w more
        // evaluations run before the sweep halts.
        for w in [1usize, 2, 5] {
            let range: Vec<usize> = (2..60).collect();
            let sweep = sweep_impl(&range, w, f64::NEG_INFINITY, |k| {
                (
                    EvalRecord {
                        param_idx: 0,
                        k,
                        phase: Phase::Coarse,
                        silhouette: Some(0.5),
                        error: None,
                        millis: 0,
                    },
                    Some((vec![0, 1], 0.5)),
                )
            });
            assert_eq!(sweep.records.len(), w + 1, "patience {w}");
            assert_eq!(sweep.best.as_ref().unwrap().0, 2);
        }
    }

    #[test]
    fn decreasing_quality_stops_after_patience() {
        let m = planted_four_blobs();
        let ev = evaluator(&m);
        // Quality decreases after k=4, so patience w=2 stops 2 evals later.
        let range = vec![4, 5, 6, 7, 8, 9, 10];
        let sweep = coarse_sweep(&ev, &range, 2, f64::NEG_INFINITY);
        assert_eq!(sweep.best.as_ref().unwrap().0, 4);
        assert_eq!(sweep.records.len(), 3, "one improving + w non-improving");
    }

    #[test]
    fn fine_grained_with_zero_radius_returns_input() {
        let m = planted_four_blobs();
        let ev = evaluator(&m);
        let (labels, q) = ev.evaluate(4).unwrap();
        let (k, _, q2, records) = fine_grained(&ev, 4, labels, q, 0, 20);
        assert_eq!(k, 4);
        assert_eq!(q2, q);
        assert!(records.is_empty());
    }

    #[test]
    fn fine_grained_recovers_planted_k() {
        let m = planted_four_blobs();
        let ev = evaluator(&m);
        // Coarse grid {2, 6} with gamma 4 picks one of the endpoints.
        let sweep = coarse_sweep(&ev, &[2, 6], 2, f64::NEG_INFINITY);
        let (bk, labels, q) = sweep.best.unwrap();
        let (k, _, _, _) = fine_grained(&ev, bk, labels, q, 3, 20);
        assert_eq!(k, 4);
    }

    #[test]
    fn fine_grained_clamps_window_at_two() {
        let m = planted_four_blobs();
        let ev = evaluator(&m);
        let (labels, q) = ev.evaluate(3).unwrap();
        let (_, _, _, records) = fine_grained(&ev, 3, labels, q, 5, 20);
        assert!(records.iter().all(|r| r.k >= 2));
        assert!(records.iter().any(|r| r.k == 2));
    }

    fn two_triangles() -> Graph {
        Graph::from_edges(6, &[(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]).unwrap()
    }

    fn detect_config(params: Vec<EmbeddingParams>) -> SearchConfig {
        SearchConfig {
            param_sets: params,
            k_min: 2,
            seed: 3,
            ..SearchConfig::default()
        }
    }

    #[test]
    fn detect_splits_two_triangles() {
        let g = two_triangles();
        let config = detect_config(vec![EmbeddingParams::netmf(2, 1, 4, 0)]);
        let (partition, report) = scd_detect(&g, &config).unwrap();
        assert_eq!(partition.n_communities(), 2);
        assert_eq!(partition.labels()[0], partition.labels()[1]);
        assert_ne!(partition.labels()[0], partition.labels()[5]);
        assert_eq!(report.chosen.as_ref().unwrap().k, 2);
    }

    #[test]
    fn chosen_quality_is_max_over_records() {
        let g = two_triangles();
        let config = detect_config(vec![
            EmbeddingParams::netmf(1, 1, 2, 0),
            EmbeddingParams::netmf(2, 1, 4, 0),
        ]);
        let (_, report) = scd_detect(&g, &config).unwrap();
        let chosen = report.chosen.as_ref().unwrap();
        let max = report
            .records
            .iter()
            .filter_map(|r| r.silhouette)
            .fold(f64::NEG_INFINITY, f64::max);
        assert_eq!(chosen.quality, max);
    }

    #[test]
    fn second_param_set_wins_when_it_dominates() {
        // Param set 0 embeds into d=1, collapsing the triangles; set 1 keeps
        // them separated and must be chosen.
        let g = two_triangles();
        let config = detect_config(vec![
            EmbeddingParams::netmf(1, 1_000_000_000, 1, 0),
            EmbeddingParams::netmf(2, 1, 4, 0),
        ]);
        let (_, report) = scd_detect(&g, &config).unwrap();
        assert_eq!(report.chosen.as_ref().unwrap().param_idx, 1);
    }

    #[test]
    fn larger_patience_never_hurts() {
        let g = crate::testutil::random_graph(24, 0.2, 2);
        for (small, large) in [(1usize, 3usize), (2, 6)] {
            let mut config = detect_config(vec![EmbeddingParams::netmf(2, 1, 6, 0)]);
            config.patience = small;
            let (_, a) = scd_detect(&g, &config).unwrap();
            config.patience = large;
            let (_, b) = scd_detect(&g, &config).unwrap();
            assert!(
                b.chosen.as_ref().unwrap().quality >= a.chosen.as_ref().unwrap().quality,
                "patience {large} returned less than {small}"
            );
        }
    }

    #[test]
    fn gamma_one_equals_brute_force() {
        for seed in [1u64, 2, 3] {
            let g = crate::testutil::random_graph(20, 0.25, seed);
            let k_max = 10;
            let mut config = detect_config(vec![EmbeddingParams::netmf(2, 1, 5, seed)]);
            config.gamma = 1;
            config.max_clusters = k_max;
            config.patience = k_max; // never stop early
            let (_, report) = scd_detect(&g, &config).unwrap();
            let chosen = report.chosen.as_ref().unwrap();

            // Brute force: evaluate every k in [2, k_max] with the same
            // derived seeds and take the strict argmax.
            let emb = netmf_embed(&g, &config.param_sets[0]).unwrap();
            let ev = Evaluator {
                embedding: &emb.matrix,
                kmeans: config.kmeans.clone(),
                seed: config.seed,
                param_idx: 0,
                silhouette_sample: None,
            };
            let mut best = (0usize, f64::NEG_INFINITY);
            for k in 2..=k_max {
                if let Ok((_, q)) = ev.evaluate(k) {
                    if q > best.1 {
                        best = (k, q);
                    }
                }
            }
            assert_eq!(chosen.k, best.0, "seed {seed}");
            assert_eq!(chosen.quality, best.1, "seed {seed}");
        }
    }

    #[test]
    fn isolated_nodes_become_singletons() {
        let mut edges = vec![(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)];
        edges.push((6, 7)); // keep 8 isolated
        let g = Graph::from_edges(9, &edges).unwrap();
        let config = detect_config(vec![EmbeddingParams::netmf(2, 1, 4, 0)]);
        let (partition, report) = scd_detect(&g, &config).unwrap();
        assert_eq!(report.isolated_nodes, 1);
        let label8 = partition.labels()[8];
        assert!(partition.labels().iter().filter(|&&l| l == label8).count() == 1);
    }

    #[test]
    fn report_serialization_is_stable() {
        let g = two_triangles();
        let config = detect_config(vec![EmbeddingParams::netmf(2, 1, 4, 0)]);
        let (_, report) = scd_detect(&g, &config).unwrap();
        let mut a = Vec::new();
        write_report(&report, config.seed, 0xdead_beef, false, &mut a).unwrap();
        let (_, report2) = scd_detect(&g, &config).unwrap();
        let mut b = Vec::new();
        write_report(&report2, config.seed, 0xdead_beef, false, &mut b).unwrap();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert!(text.contains("# chosen param 0 k 2"));
        assert!(text.contains("coarse"));
    }
}
