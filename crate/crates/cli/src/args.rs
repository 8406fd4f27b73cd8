//! Flag definitions. Every subcommand flattens [`CommonOpts`] so seed,
//! determinism and thread count are recorded uniformly; enum-like flags are
//! taken as strings and validated where they are used so the error paths all
//! speak the library's error type.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;

#[derive(Parser)]
#[command(
    name = "veclogic",
    version,
    about = "corpus to embeddings to composed queries, with built-in identity checks"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Tokenize a corpus and write vocabulary + co-occurrence files
    Count(CountArgs),
    /// Train SGNS or GloVe embeddings
    Train(TrainArgs),
    /// Center an embedding file (freq, unif, or abtt)
    Center(CenterArgs),
    /// Check the library's identities and scaling laws on synthetic models
    Verify(VerifyArgs),
    /// Evaluate an AND/OR/NOT expression and print nearest neighbors
    Query(QueryArgs),
    /// Run an evaluation task and write a JSON report
    Eval(EvalArgs),
    /// Rewrite a corpus with artificial merged words for OR experiments
    SynthOr(SynthOrArgs),
}

#[derive(Args, Clone, Serialize)]
pub struct CommonOpts {
    /// master RNG seed, recorded in every report
    #[arg(long, default_value_t = 42, env = "VECLOGIC_SEED")]
    pub seed: u64,
    /// force the bitwise-reproducible code paths
    #[arg(long, default_value_t = false, env = "VECLOGIC_DETERMINISTIC")]
    pub deterministic: bool,
    /// worker threads for evaluation loops (deterministic mode forces 1)
    #[arg(long, default_value_t = 1, env = "VECLOGIC_THREADS")]
    pub threads: usize,
}

#[derive(Args, Clone, Serialize)]
pub struct CountArgs {
    /// plain-text corpus, whitespace tokenized, lowercased
    #[arg(long)]
    pub corpus: PathBuf,
    /// directory for vocab.tsv, cooc.tsv and count_report.json
    #[arg(long)]
    pub out_dir: PathBuf,
    /// symmetric context window size
    #[arg(long, default_value_t = 5, env = "VECLOGIC_WINDOW")]
    pub window: usize,
    /// drop words occurring fewer than this many times
    #[arg(long, default_value_t = 100, env = "VECLOGIC_MIN_COUNT")]
    pub min_count: u64,
    /// window weighting: uniform or harmonic
    #[arg(long, default_value = "uniform", env = "VECLOGIC_WEIGHTING")]
    pub weighting: String,
    /// shorthand for small inputs: desk lowers min-count to 5
    #[arg(long)]
    pub preset: Option<String>,
    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Args, Clone, Serialize)]
pub struct TrainArgs {
    /// sgns or glove
    #[arg(long, env = "VECLOGIC_MODE")]
    pub mode: String,
    /// corpus text (sgns)
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// vocabulary file (glove; optional for sgns to pin the vocabulary)
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// co-occurrence counts file (glove)
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// directory for embeddings.txt, vocab.tsv and train_report.json
    #[arg(long)]
    pub out_dir: PathBuf,
    #[arg(long, default_value_t = 100, env = "VECLOGIC_DIM")]
    pub dim: usize,
    #[arg(long, default_value_t = 5, env = "VECLOGIC_WINDOW")]
    pub window: usize,
    /// passes over the data; defaults to 5 for sgns and 50 for glove
    #[arg(long)]
    pub epochs: Option<usize>,
    /// initial step size; defaults to 0.025 for sgns and 0.05 for glove
    #[arg(long)]
    pub learning_rate: Option<f64>,
    /// negative samples per positive pair (sgns)
    #[arg(long, default_value_t = 15, env = "VECLOGIC_NEGATIVES")]
    pub negatives: usize,
    /// negative-sampling exponent q(w) proportional to count^alpha (sgns)
    #[arg(long, default_value_t = 0.75, env = "VECLOGIC_ALPHA")]
    pub alpha: f64,
    /// count cap in the least-squares weight (glove)
    #[arg(long, default_value_t = 100.0, env = "VECLOGIC_X_MAX")]
    pub x_max: f64,
    /// exponent in the least-squares weight (glove)
    #[arg(long, default_value_t = 0.75)]
    pub weighting_power: f64,
    /// vocabulary cutoff when building from a raw corpus
    #[arg(long, default_value_t = 100, env = "VECLOGIC_MIN_COUNT")]
    pub min_count: u64,
    /// window weighting recorded with a loaded counts file
    #[arg(long, default_value = "uniform", env = "VECLOGIC_WEIGHTING")]
    pub weighting: String,
    /// glove: full-batch descent with a line search instead of adaptive updates
    #[arg(long, default_value_t = false)]
    pub full_batch: bool,
    /// shorthand for small inputs: desk lowers min-count to 5
    #[arg(long)]
    pub preset: Option<String>,
    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Args, Clone, Serialize)]
pub struct CenterArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    /// vocabulary file; required for freq mode
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// freq, unif, or abtt
    #[arg(long, env = "VECLOGIC_MODE")]
    pub mode: String,
    /// abtt: number of principal directions to strip; defaults to dim/100
    #[arg(long)]
    pub components: Option<usize>,
    /// output embedding file
    #[arg(long)]
    pub out: PathBuf,
    /// where to write the centering report (default: alongside --out)
    #[arg(long)]
    pub report: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Args, Clone, Serialize)]
pub struct VerifyArgs {
    /// which check to run: t1, prop1, or, not
    pub check: String,
    /// vocabulary size of the synthetic models
    #[arg(long = "V", default_value_t = 30)]
    pub v_size: usize,
    /// embedding dimension of the synthetic models
    #[arg(long, default_value_t = 10)]
    pub d: usize,
    /// parameter scale for single-scale checks
    #[arg(long, default_value_t = 0.1)]
    pub scale: f64,
    /// comma-separated scales for the slope checks
    #[arg(long, default_value = "0.02,0.04,0.08,0.16")]
    pub scales: String,
    /// number of consecutive seeds to try
    #[arg(long, default_value_t = 10)]
    pub seeds: u64,
    /// random instances for the not check
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    /// members per composed set in the or check
    #[arg(long, default_value_t = 3)]
    pub set_size: usize,
    /// residual tolerance; defaults to 1e-9 (t1) or 1e-12 (not)
    #[arg(long)]
    pub tol: Option<f64>,
    /// also write the verdict JSON here
    #[arg(long)]
    pub json: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Args, Clone, Serialize)]
pub struct QueryArgs {
    #[arg(long)]
    pub embeddings: PathBuf,
    /// vocabulary file supplying word frequencies
    #[arg(long)]
    pub vocab: PathBuf,
    /// e.g. "AND(red, car)", "OR(cat, dog)", "NOT(cat | cat, dog, fish)"
    #[arg(long)]
    pub expression: String,
    #[arg(long, default_value_t = 10, env = "VECLOGIC_TOP_N")]
    pub top_n: usize,
    /// set weighting: freq or uniform
    #[arg(long, default_value = "freq", env = "VECLOGIC_WEIGHTING")]
    pub weighting: String,
    /// drop the expression's own words from the neighbor list
    #[arg(long, default_value_t = false, env = "VECLOGIC_EXCLUDE_MEMBERS")]
    pub exclude_members: bool,
    /// also write the result JSON here
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Args, Clone, Serialize)]
pub struct EvalArgs {
    /// pmi-error, phrase, word2word, or, sts, pca
    #[arg(long)]
    pub task: String,
    #[arg(long)]
    pub embeddings: PathBuf,
    #[arg(long)]
    pub vocab: Option<PathBuf>,
    /// co-occurrence counts file (pmi-error)
    #[arg(long)]
    pub counts: Option<PathBuf>,
    /// window recorded with the counts file
    #[arg(long, default_value_t = 5, env = "VECLOGIC_WINDOW")]
    pub window: usize,
    /// window weighting recorded with the counts file: uniform or harmonic
    #[arg(long, default_value = "uniform")]
    pub count_weighting: String,
    /// task dataset (TSV; format depends on the task)
    #[arg(long)]
    pub dataset: Option<PathBuf>,
    /// drop pairs co-occurring fewer than this many times (pmi-error)
    #[arg(long, default_value_t = 1.0, env = "VECLOGIC_MIN_COOC")]
    pub min_cooc: f64,
    #[arg(long, default_value_t = 10, env = "VECLOGIC_TOP_N")]
    pub top_n: usize,
    /// set weighting for composed queries: freq or uniform
    #[arg(long, default_value = "freq", env = "VECLOGIC_WEIGHTING")]
    pub weighting: String,
    /// drop an item's member words from its candidate ranking
    #[arg(long, default_value_t = false, env = "VECLOGIC_EXCLUDE_MEMBERS")]
    pub exclude_members: bool,
    /// random-word queries per item for the baseline rank
    #[arg(long, default_value_t = 1)]
    pub random_baseline_samples: usize,
    /// report destination (default: stdout)
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// also write a histogram CSV of the sampled values (pmi-error)
    #[arg(long)]
    pub histogram_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.1)]
    pub bin_width: f64,
    /// histogram range as "lo,hi"
    #[arg(long, default_value = "-5,5")]
    pub hist_range: String,
    /// comma-separated word list (pca)
    #[arg(long)]
    pub words: Option<String>,
    /// extra origin marker "label=w1,w2,..." (pca; repeatable)
    #[arg(long)]
    pub origin: Vec<String>,
    /// projection dimensions (pca)
    #[arg(long, default_value_t = 2)]
    pub dims: usize,
    #[command(flatten)]
    pub common: CommonOpts,
}

#[derive(Args, Clone, Serialize)]
pub struct SynthOrArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// where to write the rewritten corpus
    #[arg(long)]
    pub out: PathBuf,
    /// where to write the merged-token spec TSV
    #[arg(long)]
    pub specs: PathBuf,
    #[arg(long, default_value_t = 50)]
    pub num_sets: usize,
    /// members per merged word
    #[arg(long, default_value_t = 2)]
    pub set_size: usize,
    /// member words must occur at least this many times
    #[arg(long, default_value_t = 100, env = "VECLOGIC_MIN_COUNT")]
    pub min_count: u64,
    #[command(flatten)]
    pub common: CommonOpts,
}

impl Command {
    pub fn common(&self) -> &CommonOpts {
        match self {
            Command::Count(a) => &a.common,
            Command::Train(a) => &a.common,
            Command::Center(a) => &a.common,
            Command::Verify(a) => &a.common,
            Command::Query(a) => &a.common,
            Command::Eval(a) => &a.common,
            Command::SynthOr(a) => &a.common,
        }
    }
}
