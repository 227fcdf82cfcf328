//! `scd bench`: run detectors across a synthetic grid and aggregate the
//! quality metrics per mixing level.

use std::io::Write;

use scd::baselines::{label_propagation, louvain};
use scd::embedding::EmbeddingParams;
use scd::graph::{Graph, Partition};
use scd::kmeans::KMeansOptions;
use scd::lfr::{generate_lfr, LfrParams};
use scd::metrics::{ari, modularity, nmi, EvalScores};
use scd::ppr::PprParams;
use scd::search::{scd_detect, SearchConfig};
use scd::{mix_seed, par};

use crate::cli::{parse_list, BenchArgs, CliError, CliResult, Settings};
use crate::commands::{create_file, write_header, ConfigEcho};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Algo {
    ScdNetmf,
    ScdPpr,
    Louvain,
    LabelProp,
}

impl Algo {
    pub fn name(self) -> &'static str {
        match self {
            Algo::ScdNetmf => "scd-netmf",
            Algo::ScdPpr => "scd-ppr",
            Algo::Louvain => "louvain",
            Algo::LabelProp => "labelprop",
        }
    }

    fn parse(raw: &str) -> CliResult<Self> {
        match raw {
            "scd-netmf" => Ok(Algo::ScdNetmf),
            "scd-ppr" => Ok(Algo::ScdPpr),
            "louvain" => Ok(Algo::Louvain),
            "labelprop" => Ok(Algo::LabelProp),
            other => Err(CliError::Usage(format!(
                "field `algorithms`: unknown algorithm `{other}`"
            ))),
        }
    }
}

/// Resolved bench parameters.
#[derive(Debug, Clone)]
pub struct BenchSpec {
    pub nodes: Vec<usize>,
    pub avg_degs: Vec<f64>,
    pub max_degs: Vec<usize>,
    pub mixings: Vec<f64>,
    pub reps: usize,
    pub algorithms: Vec<Algo>,
    pub kmin: usize,
    pub kmax: usize,
    pub gamma: usize,
    pub patience: usize,
    pub kmeans_restarts: usize,
    pub sample: usize,
    pub seed: u64,
}

/// Mean ± std of each metric for one (mixing, algorithm) pair.
#[derive(Debug, Clone)]
pub struct Aggregate {
    pub mixing: f64,
    pub algorithm: &'static str,
    pub cells: usize,
    pub failures: usize,
    pub nmi: (f64, f64),
    pub ari: (f64, f64),
    pub modularity: (f64, f64),
}

#[derive(Debug)]
pub struct BenchOutcome {
    pub aggregates: Vec<Aggregate>,
    pub generated: usize,
    pub skipped: usize,
    /// Per-cell problem log: skipped combinations and failed algorithm runs.
    pub log: Vec<String>,
}

fn run_algorithm(
    algo: Algo,
    graph: &Graph,
    truth: &Partition,
    seed: u64,
    spec: &BenchSpec,
) -> Result<EvalScores, String> {
    let pred = match algo {
        Algo::Louvain => louvain(graph, seed).map_err(|e| e.to_string())?,
        Algo::LabelProp => label_propagation(graph, seed, 100),
        Algo::ScdNetmf | Algo::ScdPpr => {
            let n = graph.n_nodes();
            let params = match algo {
                Algo::ScdNetmf => EmbeddingParams::netmf(5, 1, 32.min(n), seed),
                _ => EmbeddingParams::ppr(seed),
            };
            let config = SearchConfig {
                param_sets: vec![params],
                max_clusters: spec.kmax,
                gamma: spec.gamma,
                patience: spec.patience,
                k_min: spec.kmin.max(2).min(n.saturating_sub(1).max(2)),
                normalize: false,
                seed,
                kmeans: KMeansOptions {
                    n_init: spec.kmeans_restarts,
                    ..KMeansOptions::default()
                },
                ppr: PprParams::default(),
                fine_radius: None,
                silhouette_sample: if spec.sample == 0 {
                    None
                } else {
                    Some(spec.sample)
                },
            };
            scd_detect(graph, &config).map_err(|e| e.to_string())?.0
        }
    };
    Ok(EvalScores {
        nmi: nmi(truth, &pred).map_err(|e| e.to_string())?,
        ari: ari(truth, &pred).map_err(|e| e.to_string())?,
        modularity: modularity(graph, &pred).map_err(|e| e.to_string())?,
    })
}

struct CellResult {
    mixing: f64,
    label: String,
    skip_reason: Option<String>,
    per_algo: Vec<Result<EvalScores, String>>,
}

fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, var.sqrt())
}

/// Generates every grid cell and runs every requested algorithm on it.
/// Cells run in parallel; aggregation order is fixed, so the outcome is
/// deterministic for any worker count.
pub fn compute(spec: &BenchSpec) -> CliResult<BenchOutcome> {
    let mut cells = Vec::new();
    for rep in 0..spec.reps {
        for &n in &spec.nodes {
            for &avg in &spec.avg_degs {
                for &max in &spec.max_degs {
                    for &mix in &spec.mixings {
                        let idx = cells.len() as u64;
                        cells.push((
                            rep,
                            LfrParams {
                                n,
                                avg_deg: avg,
                                max_deg: max,
                                mixing: mix,
                                degree_exp: 2.0,
                                comm_exp: 1.0,
                                seed: mix_seed(&[spec.seed, idx]),
                            },
                        ));
                    }
                }
            }
        }
    }

    let results: Vec<CellResult> = par::map_indexed(cells.len(), |i| {
        let (rep, params) = &cells[i];
        let label = format!("rep {rep} {}", params.describe());
        match generate_lfr(params) {
            Err(e) => CellResult {
                mixing: params.mixing,
                label,
                skip_reason: Some(e.to_string()),
                per_algo: Vec::new(),
            },
            Ok((graph, truth)) => {
                let per_algo = spec
                    .algorithms
                    .iter()
                    .enumerate()
                    .map(|(ai, &algo)| {
                        let seed = mix_seed(&[spec.seed, i as u64, 1 + ai as u64]);
                        run_algorithm(algo, &graph, &truth, seed, spec)
                    })
                    .collect();
                CellResult {
                    mixing: params.mixing,
                    label,
                    skip_reason: None,
                    per_algo,
                }
            }
        }
    });

    let mut log = Vec::new();
    let mut generated = 0usize;
    let mut skipped = 0usize;
    for cell in &results {
        match &cell.skip_reason {
            Some(reason) => {
                skipped += 1;
                log.push(format!("skipped {}: {reason}", cell.label));
            }
            None => {
                generated += 1;
                for (ai, outcome) in cell.per_algo.iter().enumerate() {
                    if let Err(e) = outcome {
                        log.push(format!(
                            "failed {} on {}: {e}",
                            spec.algorithms[ai].name(),
                            cell.label
                        ));
                    }
                }
            }
        }
    }

    let mut mix_levels: Vec<f64> = spec.mixings.clone();
    mix_levels.sort_by(f64::total_cmp);
    mix_levels.dedup();

    let mut aggregates = Vec::new();
    for &mix in &mix_levels {
        for (ai, &algo) in spec.algorithms.iter().enumerate() {
            let mut nmis = Vec::new();
            let mut aris = Vec::new();
            let mut mods = Vec::new();
            let mut failures = 0usize;
            for cell in results.iter().filter(|c| c.mixing == mix) {
                if cell.skip_reason.is_some() {
                    continue;
                }
                match &cell.per_algo[ai] {
                    Ok(scores) => {
                        nmis.push(scores.nmi);
                        aris.push(scores.ari);
                        mods.push(scores.modularity);
                    }
                    Err(_) => failures += 1,
                }
            }
            aggregates.push(Aggregate {
                mixing: mix,
                algorithm: algo.name(),
                cells: nmis.len(),
                failures,
                nmi: mean_std(&nmis),
                ari: mean_std(&aris),
                modularity: mean_std(&mods),
            });
        }
    }
    Ok(BenchOutcome {
        aggregates,
        generated,
        skipped,
        log,
    })
}

fn format_stat(cells: usize, stat: (f64, f64)) -> String {
    if cells == 0 {
        "-".to_string()
    } else {
        format!("{:.3} ± {:.3}", stat.0, stat.1)
    }
}

pub fn run(args: &BenchArgs) -> CliResult<()> {
    let cfg = Settings::load(args.common.config.as_deref())?;
    let seed: u64 = cfg.resolve(&args.common.seed, "seed", 42)?;
    let threads: usize = cfg.resolve(&args.common.threads, "threads", 0)?;
    let algorithms: Vec<Algo> = parse_list::<String>(
        &cfg.resolve(&args.algorithms, "algorithms", "scd-netmf,louvain".into())?,
        "algorithms",
    )?
    .iter()
    .map(|s| Algo::parse(s))
    .collect::<CliResult<_>>()?;
    let spec = BenchSpec {
        nodes: parse_list(&cfg.resolve(&args.nodes, "nodes", "100,500,1000".into())?, "nodes")?,
        avg_degs: parse_list(&cfg.resolve(&args.avg_deg, "avg-deg", "15".into())?, "avg-deg")?,
        max_degs: parse_list(&cfg.resolve(&args.max_deg, "max-deg", "50".into())?, "max-deg")?,
        mixings: parse_list(&cfg.resolve(&args.mixing, "mixing", "0.1,0.5,0.9".into())?, "mixing")?,
        reps: cfg.resolve(&args.reps, "reps", 1)?,
        algorithms,
        kmin: cfg.resolve(&args.kmin, "kmin", 2)?,
        kmax: cfg.resolve(&args.kmax, "kmax", 0)?,
        gamma: cfg.resolve(&args.gamma, "gamma", 0)?,
        patience: cfg.resolve(&args.patience, "patience", 5)?,
        kmeans_restarts: cfg.resolve(&args.kmeans_restarts, "kmeans-restarts", 3)?,
        sample: cfg.resolve(&args.sample, "sample", 0)?,
        seed,
    };

    let mut echo = ConfigEcho::new("bench");
    echo.push("seed", seed);
    echo.push("nodes", format!("{:?}", spec.nodes));
    echo.push("avg-deg", format!("{:?}", spec.avg_degs));
    echo.push("max-deg", format!("{:?}", spec.max_degs));
    echo.push("mixing", format!("{:?}", spec.mixings));
    echo.push("reps", spec.reps);
    echo.push(
        "algorithms",
        spec.algorithms
            .iter()
            .map(|a| a.name())
            .collect::<Vec<_>>()
            .join(","),
    );
    echo.push("kmin", spec.kmin);
    echo.push("kmax", spec.kmax);
    echo.push("gamma", spec.gamma);
    echo.push("patience", spec.patience);
    echo.push("kmeans-restarts", spec.kmeans_restarts);
    echo.push("sample", spec.sample);

    let outcome = par::with_threads(threads, || compute(&spec))?;

    println!(
        "{:<8} {:<11} {:>5} {:>6}  {:<16} {:<16} {:<16}",
        "mixing", "algorithm", "cells", "failed", "nmi", "ari", "modularity"
    );
    for agg in &outcome.aggregates {
        println!(
            "{:<8} {:<11} {:>5} {:>6}  {:<16} {:<16} {:<16}",
            agg.mixing,
            agg.algorithm,
            agg.cells,
            agg.failures,
            format_stat(agg.cells, agg.nmi),
            format_stat(agg.cells, agg.ari),
            format_stat(agg.cells, agg.modularity)
        );
    }
    println!(
        "networks: {} generated, {} skipped",
        outcome.generated, outcome.skipped
    );
    for line in &outcome.log {
        eprintln!("{line}");
    }

    if let Some(records_path) = &args.records {
        let mut w = create_file(records_path)?;
        write_header(&mut w, seed, echo.hash())?;
        writeln!(
            w,
            "# columns: mixing\talgorithm\tcells\tfailures\tnmi_mean\tnmi_std\tari_mean\tari_std\tmodularity_mean\tmodularity_std"
        )
        .map_err(scd::Error::from)?;
        for agg in &outcome.aggregates {
            writeln!(
                w,
                "{}\t{}\t{}\t{}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}\t{:.6}",
                agg.mixing,
                agg.algorithm,
                agg.cells,
                agg.failures,
                agg.nmi.0,
                agg.nmi.1,
                agg.ari.0,
                agg.ari.1,
                agg.modularity.0,
                agg.modularity.1
            )
            .map_err(scd::Error::from)?;
        }
    }
    Ok(())
}
