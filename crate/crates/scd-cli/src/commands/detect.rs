//! `scd detect`: end-to-end community detection on one graph.

use scd::embedding::{Backend, EmbeddingParams};
use scd::graph::write_partition;
use scd::kmeans::KMeansOptions;
use scd::ppr::PprParams;
use scd::search::{scd_detect, write_report, SearchConfig};

use crate::cli::{parse_list, CliResult, DetectArgs, Settings};
use crate::commands::{create_file, load_graph, parse_backend, ConfigEcho};

/// The §-grid swept by default; `--fast` keeps the single starred set.
const DEFAULT_WINDOWS: &str = "1,3,5,10,30,50";
const DEFAULT_NEGATIVES: &str = "1,5,20";
const DEFAULT_DIMS: &str = "16,32,64,128,256";

/// Builds the parameter sets for a graph of `n` nodes. Dimensions are
/// clamped to `n` and exact duplicates merged.
pub fn build_param_sets(
    backend: Backend,
    fast: bool,
    windows: &[usize],
    negatives: &[usize],
    dims: &[usize],
    n: usize,
    seed: u64,
) -> Vec<EmbeddingParams> {
    match backend {
        Backend::Ppr => vec![EmbeddingParams::ppr(seed)],
        Backend::NetMf => {
            let combos: Vec<(usize, usize, usize)> = if fast {
                vec![(5, 1, 32)]
            } else {
                let mut v = Vec::new();
                for &d in dims {
                    for &t in windows {
                        for &b in negatives {
                            v.push((t, b, d));
                        }
                    }
                }
                v
            };
            let mut seen = Vec::new();
            let mut out = Vec::new();
            for (t, b, d) in combos {
                let d = d.min(n).max(1);
                if seen.contains(&(t, b, d)) {
                    continue;
                }
                seen.push((t, b, d));
                out.push(EmbeddingParams::netmf(t, b, d, seed));
            }
            out
        }
    }
}

pub fn run(args: &DetectArgs) -> CliResult<()> {
    let cfg = Settings::load(args.common.config.as_deref())?;
    let seed: u64 = cfg.resolve(&args.common.seed, "seed", 42)?;
    let threads: usize = cfg.resolve(&args.common.threads, "threads", 0)?;
    let weighted = cfg.resolve_switch(args.weighted, "weighted")?;
    let backend = parse_backend(&cfg.resolve(&args.backend, "backend", "netmf".into())?)?;
    let fast = cfg.resolve_switch(args.fast, "fast")?;
    let windows: Vec<usize> = parse_list(
        &cfg.resolve(&args.windows, "windows", DEFAULT_WINDOWS.into())?,
        "windows",
    )?;
    let negatives: Vec<usize> = parse_list(
        &cfg.resolve(&args.negatives, "negatives", DEFAULT_NEGATIVES.into())?,
        "negatives",
    )?;
    let dims: Vec<usize> = parse_list(
        &cfg.resolve(&args.dims, "dims", DEFAULT_DIMS.into())?,
        "dims",
    )?;
    let kmin: usize = cfg.resolve(&args.kmin, "kmin", 2)?;
    let kmax: usize = cfg.resolve(&args.kmax, "kmax", 0)?;
    let gamma: usize = cfg.resolve(&args.gamma, "gamma", 0)?;
    let patience: usize = cfg.resolve(&args.patience, "patience", 5)?;
    let batch_size: usize = cfg.resolve(&args.batch_size, "batch-size", 0)?;
    let kmeans_iters: usize = cfg.resolve(&args.kmeans_iters, "kmeans-iters", 100)?;
    let kmeans_restarts: usize = cfg.resolve(&args.kmeans_restarts, "kmeans-restarts", 3)?;
    let sample: usize = cfg.resolve(&args.sample, "sample", 0)?;
    let normalize = cfg.resolve_switch(args.normalize, "normalize")?;
    let timings = cfg.resolve_switch(args.timings, "timings")?;
    let ppr_params = PprParams {
        alpha: cfg.resolve(&args.alpha, "alpha", 0.85)?,
        tol: cfg.resolve(&args.tol, "tol", 1e-6)?,
        max_iter: cfg.resolve(&args.max_iter, "max-iter", 100)?,
    };

    let mut echo = ConfigEcho::new("detect");
    echo.push("seed", seed);
    echo.push("weighted", weighted);
    echo.push("backend", backend);
    echo.push("fast", fast);
    echo.push("windows", format!("{windows:?}"));
    echo.push("negatives", format!("{negatives:?}"));
    echo.push("dims", format!("{dims:?}"));
    echo.push("kmin", kmin);
    echo.push("kmax", kmax);
    echo.push("gamma", gamma);
    echo.push("patience", patience);
    echo.push("batch-size", batch_size);
    echo.push("kmeans-iters", kmeans_iters);
    echo.push("kmeans-restarts", kmeans_restarts);
    echo.push("sample", sample);
    echo.push("normalize", normalize);
    echo.push("alpha", ppr_params.alpha);
    echo.push("tol", ppr_params.tol);
    echo.push("max-iter", ppr_params.max_iter);

    scd::par::with_threads(threads, || -> CliResult<()> {
        let (graph, map) = load_graph(&args.graph, weighted)?;
        let config = SearchConfig {
            param_sets: build_param_sets(
                backend,
                fast,
                &windows,
                &negatives,
                &dims,
                graph.n_nodes(),
                seed,
            ),
            max_clusters: kmax,
            gamma,
            patience,
            k_min: kmin.min(graph.n_nodes().saturating_sub(1)).max(2),
            normalize,
            seed,
            kmeans: KMeansOptions {
                batch_size: if batch_size == 0 { None } else { Some(batch_size) },
                max_iters: kmeans_iters,
                n_init: kmeans_restarts,
                ..KMeansOptions::default()
            },
            ppr: ppr_params.clone(),
            fine_radius: None,
            silhouette_sample: if sample == 0 { None } else { Some(sample) },
        };
        let (partition, report) = scd_detect(&graph, &config)?;

        let mut pw = create_file(&args.out)?;
        write_partition(&partition, &map, &mut pw)?;
        if let Some(report_path) = &args.report {
            let mut rw = create_file(report_path)?;
            write_report(&report, seed, echo.hash(), timings, &mut rw)?;
        }
        let chosen = report.chosen.as_ref().expect("detect always picks an optimum");
        println!(
            "{} nodes -> {} communities (k = {}, silhouette = {:.6}, param set {})",
            graph.n_nodes(),
            partition.n_communities(),
            chosen.k,
            chosen.quality,
            chosen.param_idx
        );
        Ok(())
    })
}
