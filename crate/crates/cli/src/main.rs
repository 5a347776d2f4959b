//! `langxfer`: source-language selection for cross-lingual transfer.
//!
//! Exit codes: 0 on success, 1 on a usage error, 2 on a data error.

mod commands;
mod manifest;

use std::fmt;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use langxfer::ranking::Method;

#[derive(Debug, Parser)]
#[command(name = "langxfer", version, about = "Pick source languages for cross-lingual transfer on code tasks")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Tokenize a corpus (one subdirectory per language) into tokhist.v1 files.
    Features(FeaturesArgs),
    /// Build featvec.v1 rows for every ordered language pair.
    Pairs(PairsArgs),
    /// Train a ranker or regression model on one task.
    Train(TrainArgs),
    /// Rank candidate sources for a target with a trained model.
    Rank(RankArgs),
    /// Leave-one-target-out NDCG@k of a ranking method.
    Evaluate(EvaluateArgs),
    /// Per-feature SHAP importance of a trained model.
    Explain(ExplainArgs),
    /// Summary tables, mean ranks, best sources and heat maps.
    Stats(StatsArgs),
    /// Average-linkage clustering of transfer performance vectors.
    Cluster(ClusterArgs),
}

#[derive(Debug, Args)]
pub struct FeaturesArgs {
    /// Corpus root; each subdirectory is named by a language id.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Directory of langdef.v1 TOML files. Defaults to the shipped definitions.
    #[arg(long)]
    pub langdefs: Option<PathBuf>,
    /// Output directory for `<language>.tokhist` files.
    #[arg(long)]
    pub out: PathBuf,
    /// Sample at most this many files per language.
    #[arg(long)]
    pub max_files: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct PairsArgs {
    /// Directory of tokhist.v1 files.
    #[arg(long)]
    pub histograms: PathBuf,
    /// langprof.v1 table. Defaults to the shipped profiles.
    #[arg(long)]
    pub profiles: Option<PathBuf>,
    /// dsstats.v1 table; dataset features are missing without it.
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// Languages seen in pre-training, one id per line.
    #[arg(long)]
    pub seen: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Ranker,
    Regression,
    History,
}

impl From<MethodArg> for Method {
    fn from(m: MethodArg) -> Self {
        match m {
            MethodArg::Ranker => Method::Ranker,
            MethodArg::Regression => Method::Regression,
            MethodArg::History => Method::History,
        }
    }
}

/// Options shared by commands that train models.
#[derive(Debug, Args)]
pub struct TrainingOpts {
    /// Relevance grades per query.
    #[arg(long, default_value_t = 5)]
    pub grades: u32,
    /// Keep the source == target pair as a candidate.
    #[arg(long)]
    pub include_mono: bool,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub trees: usize,
    #[arg(long, default_value_t = 16)]
    pub leaves: usize,
    #[arg(long, default_value_t = 0.1)]
    pub learning_rate: f64,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    /// scores.v1 file.
    #[arg(long)]
    pub scores: PathBuf,
    /// featvec.v1 file.
    #[arg(long)]
    pub features: PathBuf,
    /// Task to train on; optional when the score file holds one task.
    #[arg(long)]
    pub task: Option<String>,
    #[arg(long, value_enum, default_value_t = MethodArg::Ranker)]
    pub method: MethodArg,
    #[command(flatten)]
    pub training: TrainingOpts,
    /// Output gbrank.v1 model.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct RankArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub target: String,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long)]
    pub include_mono: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    #[arg(long)]
    pub task: Option<String>,
    #[arg(long, value_enum, default_value_t = MethodArg::Ranker)]
    pub method: MethodArg,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    /// plhist.v1 graph for the history method. Defaults to the shipped graph.
    #[arg(long)]
    pub graph: Option<PathBuf>,
    #[command(flatten)]
    pub training: TrainingOpts,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ExplainArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub features: PathBuf,
    /// Task label written to the table.
    #[arg(long)]
    pub task: String,
    /// Restrict the explained pairs to cells scored for the task.
    #[arg(long)]
    pub scores: Option<PathBuf>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub scores: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    /// Cluster sources by their scores over targets.
    Sources,
    /// Cluster targets by their scores over sources.
    Targets,
}

#[derive(Debug, Args)]
pub struct ClusterArgs {
    #[arg(long)]
    pub scores: PathBuf,
    #[arg(long)]
    pub task: Option<String>,
    #[arg(long, value_enum, default_value_t = AxisArg::Sources)]
    pub axis: AxisArg,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(String),
}

impl CliError {
    pub fn io(path: &Path, e: std::io::Error) -> Self {
        CliError::Data(format!("{}: {e}", path.display()))
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Data(m) => write!(f, "data error: {m}"),
        }
    }
}

impl From<langxfer::Error> for CliError {
    fn from(e: langxfer::Error) -> Self {
        CliError::Data(e.to_string())
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match cli.command {
        Command::Features(a) => commands::features(&a),
        Command::Pairs(a) => commands::pairs(&a),
        Command::Train(a) => commands::train(&a),
        Command::Rank(a) => commands::rank(&a),
        Command::Evaluate(a) => commands::evaluate(&a),
        Command::Explain(a) => commands::explain(&a),
        Command::Stats(a) => commands::stats(&a),
        Command::Cluster(a) => commands::cluster(&a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("langxfer: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
