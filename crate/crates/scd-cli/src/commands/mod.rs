//! Command implementations and the helpers they share.

pub mod bench;
pub mod detect;
pub mod embed;
pub mod eval;
pub mod generate;
pub mod sweep;

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::Path;

use scd::embedding::Backend;
use scd::graph::{load_edge_list, Graph, NodeMap};

use crate::cli::{CliError, CliResult};

pub(crate) fn load_graph(path: &Path, weighted: bool) -> CliResult<(Graph, NodeMap)> {
    let file = File::open(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    load_edge_list(BufReader::new(file), weighted)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))
}

pub(crate) fn create_file(path: &Path) -> CliResult<BufWriter<File>> {
    let file = File::create(path)
        .map_err(|e| CliError::Data(format!("{}: {e}", path.display())))?;
    Ok(BufWriter::new(file))
}

pub(crate) fn parse_backend(raw: &str) -> CliResult<Backend> {
    match raw {
        "netmf" => Ok(Backend::NetMf),
        "ppr" => Ok(Backend::Ppr),
        other => Err(CliError::Usage(format!(
            "field `backend`: expected netmf or ppr, got `{other}`"
        ))),
    }
}

/// Collects the resolved options of a run; hashing them fingerprints the
/// effective configuration for report headers.
#[derive(Debug, Default)]
pub(crate) struct ConfigEcho {
    entries: Vec<(String, String)>,
}

impl ConfigEcho {
    pub fn new(command: &str) -> Self {
        ConfigEcho {
            entries: vec![("command".into(), command.into())],
        }
    }

    pub fn push(&mut self, key: &str, value: impl std::fmt::Display) {
        self.entries.push((key.into(), value.to_string()));
    }

    pub fn hash(&self) -> u64 {
        let mut canon: Vec<String> = self
            .entries
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        canon.sort();
        scd::fnv1a64(canon.join("\n").as_bytes())
    }
}

/// Standard report-file header: tool version, config hash, seed.
pub(crate) fn write_header<W: Write>(w: &mut W, seed: u64, hash: u64) -> CliResult<()> {
    writeln!(w, "# scd v{}", env!("CARGO_PKG_VERSION"))
        .and_then(|_| writeln!(w, "# seed {seed}"))
        .and_then(|_| writeln!(w, "# config-hash {hash:016x}"))
        .map_err(|e| CliError::Data(e.to_string()))
}
