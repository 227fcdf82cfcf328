//! `scd sweep`: Silhouette-versus-k trace for one embedding, for plotting
//! quality curves.

use std::io::Write;

use scd::embedding::{Backend, EmbeddingParams};
use scd::kmeans::KMeansOptions;
use scd::netmf::netmf_embed;
use scd::ppr::{ppr_embed, PprParams};
use scd::search::{write_sweep_trace, Evaluator};

use crate::cli::{CliError, CliResult, Settings, SweepArgs};
use crate::commands::{create_file, load_graph, parse_backend, write_header, ConfigEcho};

pub fn run(args: &SweepArgs) -> CliResult<()> {
    let cfg = Settings::load(args.common.config.as_deref())?;
    let seed: u64 = cfg.resolve(&args.common.seed, "seed", 42)?;
    let threads: usize = cfg.resolve(&args.common.threads, "threads", 0)?;
    let weighted = cfg.resolve_switch(args.weighted, "weighted")?;
    let backend = parse_backend(&cfg.resolve(&args.backend, "backend", "netmf".into())?)?;
    let window: usize = cfg.resolve(&args.window, "window", 5)?;
    let negative: usize = cfg.resolve(&args.negative, "negative", 1)?;
    let dim: usize = cfg.resolve(&args.dim, "dim", 32)?;
    let kmin: usize = cfg.resolve(&args.kmin, "kmin", 2)?;
    let kmax: usize = cfg.resolve(&args.kmax, "kmax", 0)?;
    let step: usize = cfg.resolve(&args.step, "step", 1)?;
    let ppr_params = PprParams {
        alpha: cfg.resolve(&args.alpha, "alpha", 0.85)?,
        tol: cfg.resolve(&args.tol, "tol", 1e-6)?,
        max_iter: cfg.resolve(&args.max_iter, "max-iter", 100)?,
    };
    if step == 0 {
        return Err(CliError::Usage("field `step`: must be >= 1".into()));
    }
    if kmin < 2 {
        return Err(CliError::Usage("field `kmin`: must be >= 2".into()));
    }

    let mut echo = ConfigEcho::new("sweep");
    echo.push("seed", seed);
    echo.push("backend", backend);
    echo.push("window", window);
    echo.push("negative", negative);
    echo.push("dim", dim);
    echo.push("kmin", kmin);
    echo.push("kmax", kmax);
    echo.push("step", step);

    scd::par::with_threads(threads, || -> CliResult<()> {
        let (graph, _) = load_graph(&args.graph, weighted)?;
        let n = graph.n_nodes();
        let embedding = match backend {
            Backend::NetMf => {
                netmf_embed(&graph, &EmbeddingParams::netmf(window, negative, dim.min(n), seed))?
            }
            Backend::Ppr => ppr_embed(&graph, &ppr_params, seed)?,
        };
        let k_top = if kmax == 0 { n } else { kmax.min(n) };
        let ks: Vec<usize> = (kmin..=k_top).step_by(step).collect();
        let evaluator = Evaluator {
            embedding: &embedding.matrix,
            kmeans: KMeansOptions::default(),
            seed,
            param_idx: 0,
            silhouette_sample: None,
        };
        let evaluated = scd::par::map_indexed(ks.len(), |i| (ks[i], evaluator.evaluate(ks[i])));
        let mut scores = Vec::new();
        for (k, outcome) in evaluated {
            match outcome {
                Ok((_, quality)) => scores.push((k, quality)),
                Err(e) => eprintln!("k = {k}: {e}"),
            }
        }
        if scores.is_empty() {
            return Err(CliError::Data("no cluster count could be evaluated".into()));
        }
        match &args.out {
            Some(path) => {
                let mut w = create_file(path)?;
                write_header(&mut w, seed, echo.hash())?;
                write_sweep_trace(&scores, &mut w)?;
            }
            None => {
                let mut stdout = std::io::stdout().lock();
                write_header(&mut stdout, seed, echo.hash())?;
                write_sweep_trace(&scores, &mut stdout)?;
                stdout.flush().map_err(scd::Error::from)?;
            }
        }
        Ok(())
    })
}
