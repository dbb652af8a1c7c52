//! The `chromalex` command line.

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::analysis::AnalysisError;

mod commands;
pub mod config;

pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_CONFIG: i32 = 2;
pub const EXIT_EMBED: i32 = 3;
pub const EXIT_LOOKUP: i32 = 4;
pub const EXIT_JOIN: i32 = 5;
pub const EXIT_INTERRUPTED: i32 = 130;

pub const MANIFEST_FILE: &str = "run-manifest.json";
pub const DEFAULT_OUT: &str = "chromalex-out";
pub const DEFAULT_CACHE: &str = "chromalex-cache";

#[derive(Debug, Parser)]
#[command(name = "chromalex", version, about = "Word–color embeddings from image sets")]
pub struct Cli {
    /// key = value configuration file
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Output directory
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Log more (-v info, -vv debug)
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    pub verbose: u8,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fetch images for each word into the cache
    Ingest(IngestArgs),
    /// Build embeddings and colorgrams from cached images
    Embed(EmbedArgs),
    /// Print the JS divergence between two words
    Compare(CompareArgs),
    /// Run an analysis
    Analyze {
        #[command(subcommand)]
        which: AnalyzeCommand,
    },
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Word list, one word per line
    pub words: PathBuf,
    /// local_dir or http_search
    #[arg(long)]
    pub mode: Option<String>,
    /// Root with one sub-directory of images per word (local_dir mode)
    #[arg(long)]
    pub source_dir: Option<PathBuf>,
    /// Search URL template containing {query} (http_search mode)
    #[arg(long)]
    pub endpoint: Option<String>,
    #[arg(long)]
    pub cache: Option<PathBuf>,
    #[arg(long)]
    pub images_per_word: Option<usize>,
    /// Requests per second
    #[arg(long)]
    pub rate_limit: Option<f64>,
    /// Search result format: jsonl or html
    #[arg(long)]
    pub parser: Option<String>,
    #[arg(long)]
    pub max_in_flight: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EmbedArgs {
    pub words: PathBuf,
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Embedding JSON path (default: <out>/embeddings.json)
    #[arg(long)]
    pub output: Option<PathBuf>,
    /// Include per-bin standard deviations (default)
    #[arg(long, overrides_with = "no_std")]
    pub std: bool,
    #[arg(long = "no-std")]
    pub no_std: bool,
    /// Concreteness ratings to copy into the records
    #[arg(long)]
    pub concreteness: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CompareArgs {
    pub embeddings: PathBuf,
    pub word_a: String,
    pub word_b: String,
}

#[derive(Debug, Subcommand)]
pub enum AnalyzeCommand {
    /// Similarity against summed concreteness, with regressions
    Concreteness(ConcretenessArgs),
    /// Color similarity against text-vector similarity
    SimilarityTrend(TrendArgs),
    /// Metaphorical vs. literal pair classification
    Metaphor(MetaphorArgs),
}

#[derive(Debug, Args)]
pub struct PairArgs {
    /// Quantile bins
    #[arg(long)]
    pub bins: Option<usize>,
    /// Reference words sampled for pairing
    #[arg(long)]
    pub references: Option<usize>,
    /// Explicit word pairs (CSV word_a,word_b) instead of sampling
    #[arg(long)]
    pub pairs: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConcretenessArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub concreteness: PathBuf,
    #[arg(long)]
    pub text_vectors: Option<PathBuf>,
    #[command(flatten)]
    pub pairs: PairArgs,
}

#[derive(Debug, Args)]
pub struct TrendArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub text_vectors: PathBuf,
    #[command(flatten)]
    pub pairs: PairArgs,
}

#[derive(Debug, Args)]
pub struct MetaphorArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub text_vectors: PathBuf,
    /// Labeled pairs CSV: adjective,noun,label
    #[arg(long)]
    pub pairs: PathBuf,
    /// Comma-separated PCA dimensions
    #[arg(long)]
    pub dims: Option<String>,
    #[arg(long)]
    pub rounds: Option<usize>,
    #[arg(long)]
    pub depth: Option<usize>,
    #[arg(long)]
    pub learning_rate: Option<f64>,
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn new(code: i32, message: impl std::fmt::Display) -> Self {
        Self { code, message: message.to_string() }
    }

    pub fn config(message: impl std::fmt::Display) -> Self {
        Self::new(EXIT_CONFIG, message)
    }

    pub fn failure(message: impl std::fmt::Display) -> Self {
        Self::new(EXIT_FAILURE, message)
    }
}

impl From<AnalysisError> for CliError {
    fn from(e: AnalysisError) -> Self {
        let code = match e {
            AnalysisError::InsufficientJoin { .. }
            | AnalysisError::InsufficientData { .. }
            | AnalysisError::DegenerateLabels { .. } => EXIT_JOIN,
            _ => EXIT_FAILURE,
        };
        Self::new(code, e)
    }
}

#[derive(Debug, Serialize)]
pub struct InputHash {
    pub path: String,
    pub sha256: String,
}

/// Provenance record written next to every command's outputs.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub command: String,
    pub arguments: Vec<String>,
    pub config: BTreeMap<String, String>,
    pub seed: Option<u64>,
    pub inputs: Vec<InputHash>,
    pub version: String,
    pub started_at: String,
    pub finished_at: String,
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    let mut h = Sha256::new();
    let mut f = std::fs::File::open(path)?;
    std::io::copy(&mut f, &mut h)?;
    Ok(hex::encode(h.finalize()))
}

pub(crate) fn now() -> String {
    chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Millis, true)
}

/// Parses arguments and runs the command, returning the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let args: Vec<OsString> = args.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_CONFIG } else { 0 };
        }
    };
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    let _ = env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).try_init();
    let argv: Vec<String> = args.iter().skip(1).map(|a| a.to_string_lossy().into_owned()).collect();
    match commands::execute(cli, argv) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
