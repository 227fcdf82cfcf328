//! Argument definitions, the config-file layer, and the error-to-exit-code
//! mapping.
//!
//! Every tunable can come from three places, in priority order: an explicit
//! command-line flag, a `key = value` line in the `--config` file, or the
//! built-in default. Flags are therefore declared as `Option`s and resolved
//! through [`Settings`].

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand};

/// Error carrying the process exit code: 1 usage, 2 data, 3 internal.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
            CliError::Internal(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
            CliError::Internal(m) => write!(f, "internal error: {m}"),
        }
    }
}

impl From<scd::Error> for CliError {
    fn from(e: scd::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(
    name = "scd",
    version,
    about = "Community detection by clustering node embeddings under the Silhouette score",
    disable_help_subcommand = true
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Generate synthetic benchmark networks with planted communities
    Generate(GenerateArgs),
    /// Compute a node embedding and dump it to a file
    Embed(EmbedArgs),
    /// Detect communities via the Silhouette search
    Detect(DetectArgs),
    /// Score a predicted partition (NMI/ARI vs truth, modularity)
    Eval(EvalArgs),
    /// Run detectors over a benchmark grid and aggregate per mixing level
    Bench(BenchArgs),
    /// Trace Silhouette over a range of cluster counts for one embedding
    Sweep(SweepArgs),
}

#[derive(Args, Debug, Clone)]
pub struct CommonArgs {
    /// RNG seed [default: 42]
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads, 0 = all cores [default: 0]
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Key-value config file (`key = value` lines); flags override it
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct GenerateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Output directory for edge lists, truth partitions, and the manifest
    #[arg(long)]
    pub out: PathBuf,
    /// Node counts, comma separated [default: 1000]
    #[arg(long)]
    pub nodes: Option<String>,
    /// Average degrees [default: 15]
    #[arg(long)]
    pub avg_deg: Option<String>,
    /// Maximum degrees [default: 50]
    #[arg(long)]
    pub max_deg: Option<String>,
    /// Mixing levels [default: 0.1]
    #[arg(long)]
    pub mixing: Option<String>,
    /// Repetitions per grid cell with derived seeds [default: 1]
    #[arg(long)]
    pub reps: Option<usize>,
    /// Degree-distribution exponent [default: 2]
    #[arg(long)]
    pub degree_exp: Option<f64>,
    /// Community-size exponent [default: 1]
    #[arg(long)]
    pub comm_exp: Option<f64>,
}

#[derive(Args, Debug, Clone)]
pub struct EmbedArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Input edge list
    #[arg(long)]
    pub graph: PathBuf,
    /// Edge list carries a third weight column
    #[arg(long)]
    pub weighted: bool,
    /// Embedding backend: netmf or ppr [default: netmf]
    #[arg(long)]
    pub backend: Option<String>,
    /// Context window T (netmf) [default: 5]
    #[arg(short = 'T', long)]
    pub window: Option<usize>,
    /// Negative samples b (netmf) [default: 1]
    #[arg(short = 'b', long)]
    pub negative: Option<usize>,
    /// Embedding dimension d (netmf; clamped to the node count) [default: 32]
    #[arg(short = 'd', long)]
    pub dim: Option<usize>,
    /// Damping factor (ppr) [default: 0.85]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// L1 convergence threshold (ppr) [default: 1e-6]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Power-iteration cap (ppr) [default: 100]
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Output dump file
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct DetectArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Input edge list
    #[arg(long)]
    pub graph: PathBuf,
    /// Edge list carries a third weight column
    #[arg(long)]
    pub weighted: bool,
    /// Output partition file
    #[arg(long)]
    pub out: PathBuf,
    /// Output search-report file
    #[arg(long)]
    pub report: Option<PathBuf>,
    /// Smallest cluster count on the coarse grid [default: 2]
    #[arg(long)]
    pub kmin: Option<usize>,
    /// Largest cluster count, 0 = node count [default: 0]
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Coarse grid step, 0 = K^(2/3) estimate [default: 0]
    #[arg(long)]
    pub gamma: Option<usize>,
    /// Non-improving coarse evaluations tolerated [default: 5]
    #[arg(long, short = 'w')]
    pub patience: Option<usize>,
    /// Single parameter set (T=5, b=1, d=32) instead of the full grid
    #[arg(long)]
    pub fast: bool,
    /// Embedding backend: netmf or ppr [default: netmf]
    #[arg(long)]
    pub backend: Option<String>,
    /// Grid of window sizes (netmf) [default: 1,3,5,10,30,50]
    #[arg(long)]
    pub windows: Option<String>,
    /// Grid of negative-sample counts (netmf) [default: 1,5,20]
    #[arg(long)]
    pub negatives: Option<String>,
    /// Grid of dimensions (netmf; clamped to n, duplicates merged)
    /// [default: 16,32,64,128,256]
    #[arg(long)]
    pub dims: Option<String>,
    /// Damping factor (ppr) [default: 0.85]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// L1 convergence threshold (ppr) [default: 1e-6]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Power-iteration cap (ppr) [default: 100]
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Mini-batch size, 0 = min(1024, n) [default: 0]
    #[arg(long)]
    pub batch_size: Option<usize>,
    /// Mini-batch steps per k-means run [default: 100]
    #[arg(long)]
    pub kmeans_iters: Option<usize>,
    /// k-means restarts per evaluation [default: 3]
    #[arg(long)]
    pub kmeans_restarts: Option<usize>,
    /// Silhouette point subsample, 0 = exact [default: 0]
    #[arg(long)]
    pub sample: Option<usize>,
    /// Report min-max-normalized scores alongside raw ones
    #[arg(long)]
    pub normalize: bool,
    /// Write measured wall-clock times into the report (breaks byte-for-byte
    /// reproducibility of report files)
    #[arg(long)]
    pub timings: bool,
}

#[derive(Args, Debug, Clone)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Input edge list
    #[arg(long)]
    pub graph: PathBuf,
    /// Edge list carries a third weight column
    #[arg(long)]
    pub weighted: bool,
    /// Predicted partition file
    #[arg(long)]
    pub pred: PathBuf,
    /// Ground-truth partition file; enables NMI and ARI
    #[arg(long)]
    pub truth: Option<PathBuf>,
}

#[derive(Args, Debug, Clone)]
pub struct BenchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Node counts, comma separated [default: 100,500,1000]
    #[arg(long)]
    pub nodes: Option<String>,
    /// Average degrees [default: 15]
    #[arg(long)]
    pub avg_deg: Option<String>,
    /// Maximum degrees [default: 50]
    #[arg(long)]
    pub max_deg: Option<String>,
    /// Mixing levels [default: 0.1,0.5,0.9]
    #[arg(long)]
    pub mixing: Option<String>,
    /// Repetitions per grid cell with derived seeds [default: 1]
    #[arg(long)]
    pub reps: Option<usize>,
    /// Algorithms: scd-netmf, scd-ppr, louvain, labelprop
    /// [default: scd-netmf,louvain]
    #[arg(long)]
    pub algorithms: Option<String>,
    /// Write machine-readable records to this file
    #[arg(long)]
    pub records: Option<PathBuf>,
    /// Smallest cluster count for the SCD variants [default: 2]
    #[arg(long)]
    pub kmin: Option<usize>,
    /// Largest cluster count, 0 = node count [default: 0]
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Coarse grid step, 0 = estimate [default: 0]
    #[arg(long)]
    pub gamma: Option<usize>,
    /// Stopping patience [default: 5]
    #[arg(long, short = 'w')]
    pub patience: Option<usize>,
    /// k-means restarts per evaluation [default: 3]
    #[arg(long)]
    pub kmeans_restarts: Option<usize>,
    /// Silhouette point subsample, 0 = exact [default: 0]
    #[arg(long)]
    pub sample: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct SweepArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Input edge list
    #[arg(long)]
    pub graph: PathBuf,
    /// Edge list carries a third weight column
    #[arg(long)]
    pub weighted: bool,
    /// Embedding backend: netmf or ppr [default: netmf]
    #[arg(long)]
    pub backend: Option<String>,
    /// Context window T (netmf) [default: 5]
    #[arg(short = 'T', long)]
    pub window: Option<usize>,
    /// Negative samples b (netmf) [default: 1]
    #[arg(short = 'b', long)]
    pub negative: Option<usize>,
    /// Embedding dimension d (netmf; clamped to n) [default: 32]
    #[arg(short = 'd', long)]
    pub dim: Option<usize>,
    /// Damping factor (ppr) [default: 0.85]
    #[arg(long)]
    pub alpha: Option<f64>,
    /// L1 convergence threshold (ppr) [default: 1e-6]
    #[arg(long)]
    pub tol: Option<f64>,
    /// Power-iteration cap (ppr) [default: 100]
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Smallest k in the trace [default: 2]
    #[arg(long)]
    pub kmin: Option<usize>,
    /// Largest k, 0 = node count [default: 0]
    #[arg(long)]
    pub kmax: Option<usize>,
    /// Step between traced k values [default: 1]
    #[arg(long)]
    pub step: Option<usize>,
    /// Trace output file (stdout when omitted)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Key-value pairs loaded from the `--config` file.
#[derive(Debug, Default)]
pub struct Settings {
    map: HashMap<String, String>,
}

impl Settings {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Settings::default());
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("config {}: {e}", path.display())))?;
        let mut map = HashMap::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(CliError::Usage(format!(
                    "config {} line {}: expected `key = value`",
                    path.display(),
                    lineno + 1
                )));
            };
            map.insert(key.trim().to_string(), value.trim().to_string());
        }
        Ok(Settings { map })
    }

    fn get<T: FromStr>(&self, key: &str) -> CliResult<Option<T>> {
        match self.map.get(key) {
            None => Ok(None),
            Some(raw) => raw.parse().map(Some).map_err(|_| {
                CliError::Usage(format!("config field `{key}`: cannot parse `{raw}`"))
            }),
        }
    }

    /// Flag value if given, else config value, else the default.
    pub fn resolve<T: FromStr + Clone>(
        &self,
        flag: &Option<T>,
        key: &str,
        default: T,
    ) -> CliResult<T> {
        if let Some(v) = flag {
            return Ok(v.clone());
        }
        Ok(self.get(key)?.unwrap_or(default))
    }

    /// Boolean switch: a present flag forces `true`; otherwise the config
    /// may enable it.
    pub fn resolve_switch(&self, flag: bool, key: &str) -> CliResult<bool> {
        if flag {
            return Ok(true);
        }
        Ok(self.get(key)?.unwrap_or(false))
    }
}

/// Parses a comma-separated list, naming the offending field on failure.
pub fn parse_list<T: FromStr>(raw: &str, field: &str) -> CliResult<Vec<T>> {
    let mut out = Vec::new();
    for part in raw.split(',') {
        let part = part.trim();
        if part.is_empty() {
            continue;
        }
        out.push(part.parse().map_err(|_| {
            CliError::Usage(format!("field `{field}`: cannot parse `{part}`"))
        })?);
    }
    if out.is_empty() {
        return Err(CliError::Usage(format!("field `{field}`: empty list")));
    }
    Ok(out)
}
