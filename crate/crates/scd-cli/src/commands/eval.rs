//! `scd eval`: score a predicted partition. Works with partitions from any
//! tool that writes the `token<TAB>label` format.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use scd::graph::{load_partition, NodeMap, Partition};
use scd::metrics::{ari, modularity, nmi};

use crate::cli::{CliError, CliResult, EvalArgs, Settings};
use crate::commands::load_graph;

fn read_partition(path: &Path, map: &NodeMap) -> CliResult<Partition> {
    let file = File::open(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    load_partition(BufReader::new(file), map)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub fn run(args: &EvalArgs) -> CliResult<()> {
    let cfg = Settings::load(args.common.config.as_deref())?;
    let weighted = cfg.resolve_switch(args.weighted, "weighted")?;

    let (graph, map) = load_graph(&args.graph, weighted)?;
    let pred = read_partition(&args.pred, &map)?;
    if let Some(truth_path) = &args.truth {
        let truth = read_partition(truth_path, &map)?;
        println!("nmi\t{:.6}", nmi(&truth, &pred)?);
        println!("ari\t{:.6}", ari(&truth, &pred)?);
    }
    println!("modularity\t{:.6}", modularity(&graph, &pred)?);
    Ok(())
}
