use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

/// Treebank headedness toolkit.
///
/// Trees are read and written in Penn bracketed format, dependencies in
/// 10-column CoNLL format. Head files hold one line per tree with
/// space-separated `rank:head` entries, where `rank` is the preorder rank of
/// a nonterminal (counting nonterminals only, root = 0) and `head` the
/// 1-based position of its head child; a line starting with `#` marks a
/// tree without heads. Summaries are printed as `key=value` lines.
#[derive(Parser, Debug)]
#[command(name = "headlayer", version)]
pub struct Cli {
    #[command(flatten)]
    pub global: Global,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Global {
    /// Seed for every random choice (training shuffles, synthetic data).
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Drop sentences whose tree and dependency word forms differ instead of
    /// warning.
    #[arg(long, global = true)]
    pub strict_align: bool,
    /// Suppress warnings and progress on standard error.
    #[arg(long, global = true)]
    pub quiet: bool,
    /// Worker threads for per-sentence stages (0 = all cores). Output order
    /// never depends on this.
    #[arg(long, global = true, default_value_t = 1)]
    pub jobs: usize,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Induce gold heads from trees and aligned dependencies.
    InduceHeads {
        #[arg(long)]
        trees: PathBuf,
        #[arg(long)]
        deps: PathBuf,
        /// Head file to write; failing sentences get a `#` line.
        #[arg(long)]
        out: Option<PathBuf>,
        /// File of 0-based sentence indices to skip, one per line.
        #[arg(long)]
        exclude: Option<PathBuf>,
        /// Report every failing node instead of the first per sentence.
        #[arg(long)]
        verbose: bool,
    },
    /// Assign heads with a percolation rule table.
    Percolate {
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        trees: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Train the learned head chooser on induced heads.
    Train {
        #[arg(long)]
        trees: PathBuf,
        #[arg(long)]
        deps: PathBuf,
        /// Model file to write.
        #[arg(long)]
        out: PathBuf,
        /// Development trees; the epoch with the lowest dev loss is kept.
        #[arg(long, requires = "dev_deps")]
        dev_trees: Option<PathBuf>,
        #[arg(long, requires = "dev_trees")]
        dev_deps: Option<PathBuf>,
        #[arg(long, default_value_t = 10)]
        epochs: usize,
        #[arg(long, default_value_t = 0.1)]
        learning_rate: f64,
        #[arg(long, default_value_t = 1e-6)]
        l2: f64,
    },
    /// Predict heads with a trained model.
    PredictHeads {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        trees: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Integrate punctuation into the tree structure with `@` nodes.
    Normalize {
        #[arg(long)]
        trees: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Head-driven binarization.
    Binarize {
        #[arg(long)]
        trees: PathBuf,
        #[command(flatten)]
        heads: HeadArgs,
        /// Normalize punctuation before binarizing.
        #[arg(long)]
        normalize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Splice out every `@` node.
    Debinarize {
        #[arg(long)]
        trees: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Convert constituency trees to dependencies.
    Convert {
        #[arg(long)]
        trees: PathBuf,
        #[command(flatten)]
        heads: HeadArgs,
        /// Reject trees with `@` nodes instead of debinarizing them.
        #[arg(long)]
        no_auto_debinarize: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Head accuracy of predicted heads against gold heads.
    EvalHeads {
        #[arg(long)]
        trees: PathBuf,
        /// Gold head file.
        #[arg(long)]
        gold: PathBuf,
        /// Predicted head file.
        #[arg(long)]
        pred: PathBuf,
    },
    /// Labeled bracket precision, recall and F1.
    EvalBrackets {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        /// Score `@` brackets too.
        #[arg(long)]
        include_intermediate: bool,
        /// Legacy scoring without punctuation tokens.
        #[arg(long)]
        exclude_punct: bool,
    },
    /// Unlabeled attachment score, in percent.
    EvalUas {
        #[arg(long)]
        gold: PathBuf,
        #[arg(long)]
        pred: PathBuf,
        #[arg(long)]
        exclude_punct: bool,
    },
    /// Compare two binarizations of the same treebank.
    DiffBinarized {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        /// Number of divergent sentence indices to list.
        #[arg(long, default_value_t = 5)]
        examples: usize,
    },
    /// Apply a model to another resource through a label map.
    Transfer {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        trees: PathBuf,
        /// Target dependencies; when given, transferred heads are scored
        /// against induced ones.
        #[arg(long)]
        deps: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a synthetic treebank with a known head convention.
    Synth {
        #[arg(long, default_value_t = 100)]
        sentences: usize,
        #[arg(long)]
        trees_out: PathBuf,
        #[arg(long)]
        deps_out: PathBuf,
        /// Also write the gold heads.
        #[arg(long)]
        heads_out: Option<PathBuf>,
        #[arg(long, default_value_t = 0.05)]
        exception_rate: f64,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum HeadKind {
    /// Percolation rule table (`--rules`).
    Rules,
    /// Trained model (`--model`).
    Model,
    /// Heads induced from aligned dependencies (`--deps`).
    Oracle,
    /// Head file (`--head-file`).
    File,
}

#[derive(Args, Debug, Clone)]
pub struct HeadArgs {
    /// Where heads come from.
    #[arg(long, value_enum)]
    pub heads: HeadKind,
    #[arg(long)]
    pub rules: Option<PathBuf>,
    #[arg(long)]
    pub model: Option<PathBuf>,
    #[arg(long)]
    pub deps: Option<PathBuf>,
    #[arg(long)]
    pub head_file: Option<PathBuf>,
}
