//! `scd embed`: compute one node embedding and dump it.

use scd::embedding::{Backend, EmbeddingParams};
use scd::netmf::netmf_embed;
use scd::ppr::{ppr_embed, PprParams};

use crate::cli::{CliResult, EmbedArgs, Settings};
use crate::commands::{create_file, load_graph, parse_backend};

pub fn run(args: &EmbedArgs) -> CliResult<()> {
    let cfg = Settings::load(args.common.config.as_deref())?;
    let seed: u64 = cfg.resolve(&args.common.seed, "seed", 42)?;
    let threads: usize = cfg.resolve(&args.common.threads, "threads", 0)?;
    let weighted = cfg.resolve_switch(args.weighted, "weighted")?;
    let backend = parse_backend(&cfg.resolve(&args.backend, "backend", "netmf".into())?)?;
    let window: usize = cfg.resolve(&args.window, "window", 5)?;
    let negative: usize = cfg.resolve(&args.negative, "negative", 1)?;
    let dim: usize = cfg.resolve(&args.dim, "dim", 32)?;
    let ppr_params = PprParams {
        alpha: cfg.resolve(&args.alpha, "alpha", 0.85)?,
        tol: cfg.resolve(&args.tol, "tol", 1e-6)?,
        max_iter: cfg.resolve(&args.max_iter, "max-iter", 100)?,
    };

    scd::par::with_threads(threads, || -> CliResult<()> {
        let (graph, _) = load_graph(&args.graph, weighted)?;
        let embedding = match backend {
            Backend::NetMf => {
                let params =
                    EmbeddingParams::netmf(window, negative, dim.min(graph.n_nodes()), seed);
                netmf_embed(&graph, &params)?
            }
            Backend::Ppr => ppr_embed(&graph, &ppr_params, seed)?,
        };
        let mut out = create_file(&args.out)?;
        embedding.write_dump(&mut out)?;
        let mut notes = Vec::new();
        if embedding.zero_degree_rows > 0 {
            notes.push(format!("{} zero-degree rows", embedding.zero_degree_rows));
        }
        if embedding.unconverged_rows > 0 {
            notes.push(format!("{} unconverged rows", embedding.unconverged_rows));
        }
        let suffix = if notes.is_empty() {
            String::new()
        } else {
            format!(" ({})", notes.join(", "))
        };
        println!(
            "embedded {} nodes into {} dimensions via {}{suffix}",
            embedding.n_nodes(),
            embedding.dim(),
            embedding.params.backend
        );
        Ok(())
    })
}
