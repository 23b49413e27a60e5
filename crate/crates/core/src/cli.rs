//! Command-line front end: preprocess, train, eval, query, project.
//!
//! Exit codes: 0 success, 1 usage error, 2 data error, 3 internal
//! invariant violation. Results go to standard output; progress and
//! warnings go to standard error.

use std::ffi::OsString;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cooc::CoocTable;
use crate::corpus::{self, RemovalSet, SentenceDelimiters, StopList, TokenStream};
use crate::embed::{self, Compose, EmbeddingModel, Embeddings, TrainConfig, VecEmbeddings, MODEL_MAGIC};
use crate::eval::{self, SimilarityDataset, SimilarityScorer};
use crate::subword::SubwordConfig;
use crate::vocab::{Vocabulary, DEFAULT_NEGATIVE_ALPHA};
use crate::Error;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_DATA: i32 = 2;
pub const EXIT_INTERNAL: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "subvec", version, about = "Subword embeddings and co-occurrence similarity for word-similarity tasks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Normalize a raw corpus into one tokenized sentence per line.
    Preprocess(PreprocessArgs),
    /// Train a subword skip-gram model or build a bigram co-occurrence table.
    Train(TrainArgs),
    /// Evaluate models on word-similarity datasets.
    Eval(EvalArgs),
    /// Query a model: nearest neighbors, analogies or pair similarity.
    Query(QueryArgs),
    /// Project word vectors onto their top two principal components.
    Project(ProjectArgs),
}

#[derive(Debug, Args)]
pub struct TextArgs {
    /// Stop-word file, one token per line.
    #[arg(long)]
    pub stoplist: Option<PathBuf>,
    /// Regex character class of characters replaced by spaces.
    #[arg(long)]
    pub removal_class: Option<String>,
    /// Extra sentence delimiter characters (newline is always one).
    #[arg(long, default_value = "\u{06D4}")]
    pub delimiters: String,
}

#[derive(Debug, Args)]
pub struct PreprocessArgs {
    pub input: PathBuf,
    pub output: PathBuf,
    #[command(flatten)]
    pub text: TextArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModelKind {
    Fasttext,
    Bigram,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ComposeArg {
    Mean,
    Sum,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    pub corpus: PathBuf,
    pub output: PathBuf,
    #[arg(long, value_enum, default_value = "fasttext")]
    pub model: ModelKind,
    #[arg(long, default_value_t = 100)]
    pub dim: usize,
    #[arg(long, default_value_t = 5)]
    pub epochs: usize,
    #[arg(long, default_value_t = 0.05)]
    pub lr: f64,
    #[arg(long, default_value_t = 3)]
    pub minn: usize,
    #[arg(long, default_value_t = 6)]
    pub maxn: usize,
    /// Context window (default 5 for fasttext, 1 for bigram).
    #[arg(long)]
    pub window: Option<usize>,
    /// Negative samples per positive pair.
    #[arg(long, default_value_t = 5)]
    pub neg: usize,
    /// Minimum token count (default 5 for fasttext, 1 for bigram).
    #[arg(long)]
    pub min_count: Option<u64>,
    /// Frequent-word subsampling threshold.
    #[arg(long, default_value_t = 1e-4)]
    pub t: f64,
    /// Number of n-gram hash buckets.
    #[arg(long, default_value_t = 2_000_000)]
    pub bucket: usize,
    /// Do not wrap words in `<` and `>` before extracting n-grams.
    #[arg(long)]
    pub no_markers: bool,
    #[arg(long, value_enum, default_value = "mean")]
    pub compose: ComposeArg,
    /// Worker threads (default: available parallelism).
    #[arg(long)]
    pub threads: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Single worker, seeded: bit-reproducible output.
    #[arg(long)]
    pub deterministic: bool,
    /// Also write composed vectors in `.vec` text format.
    #[arg(long)]
    pub vec: Option<PathBuf>,
    /// Also write the vocabulary as `token<TAB>count` lines.
    #[arg(long)]
    pub vocab_dump: Option<PathBuf>,
    #[command(flatten)]
    pub text: TextArgs,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Tsv,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    /// Model files (binary model, `.vec` vectors or co-occurrence table).
    #[arg(long = "model", required = true, num_args = 1..)]
    pub models: Vec<PathBuf>,
    /// Dataset files with `word1, word2, score` rows.
    #[arg(long = "dataset", required = true, num_args = 1..)]
    pub datasets: Vec<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum QueryMode {
    Nn,
    Analogy,
    Sim,
}

#[derive(Debug, Args)]
pub struct QueryArgs {
    pub model: PathBuf,
    #[arg(value_enum)]
    pub mode: QueryMode,
    #[arg(required = true)]
    pub words: Vec<String>,
    #[arg(short, default_value_t = 10)]
    pub k: usize,
}

#[derive(Debug, Args)]
pub struct ProjectArgs {
    pub model: PathBuf,
    /// Words to project, one per line.
    pub words: PathBuf,
    /// Output file (standard output when absent).
    #[arg(short, long)]
    pub output: Option<PathBuf>,
}

/// Resolved configuration and paths, written next to every artifact.
#[derive(Debug, Serialize)]
pub struct RunManifest {
    pub subcommand: String,
    pub config: serde_json::Value,
    pub inputs: Vec<PathBuf>,
    pub outputs: Vec<PathBuf>,
    pub seed: Option<u64>,
    pub timestamp: u64,
    pub version: String,
}

impl RunManifest {
    fn new(subcommand: &str, config: serde_json::Value, inputs: Vec<PathBuf>, outputs: Vec<PathBuf>, seed: Option<u64>) -> Self {
        RunManifest {
            subcommand: subcommand.to_owned(),
            config,
            inputs,
            outputs,
            seed,
            timestamp: SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs()),
            version: env!("CARGO_PKG_VERSION").to_owned(),
        }
    }

    pub fn path_for(artifact: &Path) -> PathBuf {
        let mut name = artifact.file_name().map(OsString::from).unwrap_or_default();
        name.push(".manifest.json");
        artifact.with_file_name(name)
    }

    fn write_for(&self, artifact: &Path) -> Result<(), CliError> {
        let json = serde_json::to_vec_pretty(self).map_err(|e| CliError::internal(e.to_string()))?;
        write_atomic(&Self::path_for(artifact), |w| w.write_all(&json).map_err(|e| Error::io(artifact, e)))
    }
}

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn usage(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_USAGE,
            message: message.into(),
        }
    }

    fn data(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_DATA,
            message: message.into(),
        }
    }

    fn internal(message: impl Into<String>) -> Self {
        CliError {
            code: EXIT_INTERNAL,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::InvalidConfig(_) | Error::InvalidRemovalClass(_) => EXIT_USAGE,
            Error::Invariant(_) => EXIT_INTERNAL,
            _ => EXIT_DATA,
        };
        CliError {
            code,
            message: e.to_string(),
        }
    }
}

/// Write through a temporary file in the destination directory, renamed
/// into place only when `fill` succeeds.
pub fn write_atomic<F>(path: &Path, fill: F) -> Result<(), CliError>
where
    F: FnOnce(&mut BufWriter<&File>) -> crate::Result<()>,
{
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p.to_path_buf(),
        _ => PathBuf::from("."),
    };
    let tmp = tempfile::NamedTempFile::new_in(&dir).map_err(|e| CliError::data(format!("{}: {}", dir.display(), e)))?;
    {
        let mut w = BufWriter::new(tmp.as_file());
        fill(&mut w)?;
        w.flush().map_err(|e| CliError::data(format!("{}: {}", path.display(), e)))?;
    }
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        let _ = tmp.as_file().set_permissions(fs::Permissions::from_mode(0o644));
    }
    tmp.persist(path)
        .map_err(|e| CliError::data(format!("{}: {}", path.display(), e.error)))?;
    Ok(())
}

fn text_settings(args: &TextArgs) -> Result<(RemovalSet, SentenceDelimiters, StopList), CliError> {
    let removal = match &args.removal_class {
        Some(class) => RemovalSet::from_class(class)?,
        None => RemovalSet::default(),
    };
    let delimiters = SentenceDelimiters::new(args.delimiters.chars());
    let stops = match &args.stoplist {
        Some(path) => StopList::load(path)?,
        None => StopList::default(),
    };
    Ok((removal, delimiters, stops))
}

fn read_tokens(path: &Path, args: &TextArgs) -> Result<TokenStream, CliError> {
    let (removal, delimiters, stops) = text_settings(args)?;
    let stream = corpus::read_corpus(path, &removal, &delimiters)?;
    Ok(corpus::remove_stopwords(stream, &stops))
}

fn text_config(args: &TextArgs) -> serde_json::Value {
    serde_json::json!({
        "stoplist": args.stoplist,
        "removal_class": args.removal_class.clone().unwrap_or_else(|| RemovalSet::default().as_str().to_owned()),
        "delimiters": args.delimiters,
    })
}

fn cmd_preprocess(args: &PreprocessArgs) -> Result<(), CliError> {
    let stream = read_tokens(&args.input, &args.text)?;
    log::info!(
        "{}: {} sentences, {} tokens",
        args.input.display(),
        stream.n_sentences(),
        stream.n_tokens()
    );
    write_atomic(&args.output, |w| stream.write_to(w).map_err(|e| Error::io(&args.output, e)))?;
    RunManifest::new(
        "preprocess",
        text_config(&args.text),
        vec![args.input.clone()],
        vec![args.output.clone()],
        None,
    )
    .write_for(&args.output)
}

#[derive(Debug, Serialize)]
struct BigramConfig {
    window: usize,
    min_count: u64,
}

fn resolve_train_config(args: &TrainArgs) -> Result<TrainConfig, CliError> {
    let threads = if args.deterministic {
        1
    } else {
        args.threads
            .unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()))
    };
    let cfg = TrainConfig {
        dim: args.dim,
        epochs: args.epochs,
        lr0: args.lr,
        window: args.window.unwrap_or(5),
        negatives: args.neg,
        min_count: args.min_count.unwrap_or(5),
        subsample_t: args.t,
        neg_alpha: DEFAULT_NEGATIVE_ALPHA,
        subword: SubwordConfig {
            min_n: args.minn,
            max_n: args.maxn,
            bucket_count: args.bucket,
            use_boundary_markers: !args.no_markers,
        },
        compose: match args.compose {
            ComposeArg::Mean => Compose::Mean,
            ComposeArg::Sum => Compose::Sum,
        },
        threads,
        seed: args.seed,
    };
    cfg.validate()?;
    Ok(cfg)
}

fn cmd_train(args: &TrainArgs) -> Result<(), CliError> {
    let mut outputs = vec![args.output.clone()];
    match args.model {
        ModelKind::Fasttext => {
            let cfg = resolve_train_config(args)?;
            let matrix_bytes = cfg.subword.bucket_count as f64 * cfg.dim as f64 * 4.0;
            if matrix_bytes > 512.0 * 1024.0 * 1024.0 {
                log::warn!(
                    "bucket matrix needs {:.0} MB; pass a smaller --bucket for desk-scale runs",
                    matrix_bytes / (1024.0 * 1024.0)
                );
            }
            let stream = read_tokens(&args.corpus, &args.text)?;
            let vocab = Vocabulary::build(&stream, cfg.min_count)?;
            log::info!(
                "vocabulary: {} words, {} tokens; dim {} threads {}",
                vocab.len(),
                vocab.total_tokens(),
                cfg.dim,
                cfg.threads
            );
            if let Some(path) = &args.vocab_dump {
                write_atomic(path, |w| vocab.write_dump(w).map_err(|e| Error::io(path, e)))?;
                outputs.push(path.clone());
            }
            let mut model = EmbeddingModel::init(vocab, cfg.clone())?;
            let stats = embed::train(&mut model, &stream)?;
            log::info!(
                "trained on {} retained tokens, {} pairs, final loss {:.6}",
                stats.retained_tokens,
                stats.pairs,
                stats.epoch_loss.last().copied().unwrap_or(0.0)
            );
            write_atomic(&args.output, |w| model.write_binary(w))?;
            if let Some(path) = &args.vec {
                write_atomic(path, |w| embed::write_vec(&model, w))?;
                outputs.push(path.clone());
            }
            let mut config = serde_json::to_value(&cfg).map_err(|e| CliError::internal(e.to_string()))?;
            config["model"] = serde_json::json!(ModelKind::Fasttext);
            config["deterministic"] = serde_json::json!(args.deterministic);
            config["text"] = text_config(&args.text);
            RunManifest::new("train", config, vec![args.corpus.clone()], outputs, Some(cfg.seed)).write_for(&args.output)
        }
        ModelKind::Bigram => {
            let bigram = BigramConfig {
                window: args.window.unwrap_or(1),
                min_count: args.min_count.unwrap_or(1),
            };
            if bigram.window < 1 || bigram.min_count < 1 {
                return Err(CliError::usage("window and min-count must be at least 1"));
            }
            let stream = read_tokens(&args.corpus, &args.text)?;
            let vocab = Vocabulary::build(&stream, bigram.min_count)?;
            if let Some(path) = &args.vocab_dump {
                write_atomic(path, |w| vocab.write_dump(w).map_err(|e| Error::io(path, e)))?;
                outputs.push(path.clone());
            }
            let table = CoocTable::build(&stream, &vocab, bigram.window)?;
            log::info!("co-occurrence table: {} words, {} pairs", table.tokens().len(), table.n_pairs());
            write_atomic(&args.output, |w| table.write_text(w))?;
            let config = serde_json::json!({
                "model": ModelKind::Bigram,
                "window": bigram.window,
                "min_count": bigram.min_count,
                "text": text_config(&args.text),
            });
            RunManifest::new("train", config, vec![args.corpus.clone()], outputs, None).write_for(&args.output)
        }
    }
}

/// Any model file the CLI can read.
pub enum LoadedModel {
    Subword(EmbeddingModel),
    Vectors(VecEmbeddings),
    Cooc(CoocTable),
}

impl LoadedModel {
    /// Detect the format from the first bytes: binary magic, co-occurrence
    /// header, otherwise `.vec` text.
    pub fn load(path: &Path) -> crate::Result<Self> {
        let mut head = [0u8; 8];
        let n = File::open(path)
            .and_then(|mut f| f.read(&mut head))
            .map_err(|e| Error::io(path, e))?;
        let open = || File::open(path).map(BufReader::new).map_err(|e| Error::io(path, e));
        if n == 8 && &head == MODEL_MAGIC {
            Ok(LoadedModel::Subword(EmbeddingModel::read_binary(open()?)?))
        } else if head[..n].starts_with(b"#window") {
            Ok(LoadedModel::Cooc(CoocTable::read_text(open()?)?))
        } else {
            Ok(LoadedModel::Vectors(embed::read_vec(open()?)?))
        }
    }

    fn embeddings(&self) -> Option<&dyn Embeddings> {
        match self {
            LoadedModel::Subword(m) => Some(m),
            LoadedModel::Vectors(v) => Some(v),
            LoadedModel::Cooc(_) => None,
        }
    }
}

impl SimilarityScorer for LoadedModel {
    fn similarity(&self, w1: &str, w2: &str) -> Option<f64> {
        match self {
            LoadedModel::Subword(m) => m.similarity(w1, w2),
            LoadedModel::Vectors(v) => v.similarity(w1, w2),
            LoadedModel::Cooc(t) => t.similarity(w1, w2),
        }
    }
}

fn model_name(path: &Path, all: &[PathBuf]) -> String {
    let stem = |p: &Path| p.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    let name = stem(path);
    if all.iter().filter(|p| stem(p) == name).count() > 1 {
        path.display().to_string()
    } else {
        name
    }
}

fn cmd_eval(args: &EvalArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let datasets = args
        .datasets
        .iter()
        .map(SimilarityDataset::load)
        .collect::<crate::Result<Vec<_>>>()?;
    let mut reports = Vec::new();
    for path in &args.models {
        let name = model_name(path, &args.models);
        let model = LoadedModel::load(path)?;
        for ds in &datasets {
            match eval::evaluate(&model, ds, &name) {
                Ok(r) => {
                    log::info!(
                        "{} on {}: rho {:.4}, scored {}/{} ({} pairs out of vocabulary)",
                        name,
                        ds.name,
                        r.rho,
                        r.n_scored,
                        r.n_total,
                        r.oov_pairs.len()
                    );
                    reports.push(r);
                }
                Err(e @ (Error::TooFewPairs(_) | Error::ZeroVariance)) => {
                    log::warn!("{} on {}: no correlation ({})", name, ds.name, e);
                }
                Err(e) => return Err(e.into()),
            }
        }
    }
    let table = eval::compare(&reports);
    let mut table = table;
    // Keep every requested model and dataset in the grid, even when all
    // of its cells are empty.
    for path in &args.models {
        let name = model_name(path, &args.models);
        if !table.models.contains(&name) {
            table.models.push(name);
        }
    }
    for ds in &datasets {
        if !table.datasets.contains(&ds.name) {
            table.datasets.push(ds.name.clone());
        }
    }
    let text = match args.format {
        OutputFormat::Text => format!("{}\n{}", table.render_text(), table.render_tsv()),
        OutputFormat::Tsv => table.render_tsv(),
    };
    out.write_all(text.as_bytes()).map_err(|e| CliError::data(e.to_string()))
}

fn cmd_query(args: &QueryArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let expect = |n: usize| {
        if args.words.len() != n {
            Err(CliError::usage(format!("{:?} takes {} word(s), got {}", args.mode, n, args.words.len())))
        } else {
            Ok(())
        }
    };
    match args.mode {
        QueryMode::Nn => expect(1)?,
        QueryMode::Analogy => expect(3)?,
        QueryMode::Sim => expect(2)?,
    }
    if args.k == 0 {
        return Err(CliError::usage("-k must be at least 1"));
    }
    let model = LoadedModel::load(&args.model)?;
    let w = &args.words;

    let ranked = match (args.mode, &model) {
        (QueryMode::Sim, _) => {
            let s = model
                .similarity(&w[0], &w[1])
                .ok_or_else(|| CliError::data(format!("no similarity for ({}, {}): word not representable", w[0], w[1])))?;
            return writeln!(out, "{}", s).map_err(|e| CliError::data(e.to_string()));
        }
        (QueryMode::Nn, LoadedModel::Cooc(t)) => t.most_similar(&w[0], args.k)?,
        (QueryMode::Analogy, LoadedModel::Cooc(_)) => {
            return Err(CliError::usage("analogy needs a vector model"));
        }
        (QueryMode::Nn, m) => embed::nearest_neighbors(m.embeddings().expect("vector model"), &w[0], args.k)?,
        (QueryMode::Analogy, m) => embed::analogy(m.embeddings().expect("vector model"), &w[0], &w[1], &w[2], args.k)?,
    };
    for (token, score) in ranked {
        writeln!(out, "{}\t{}", token, score).map_err(|e| CliError::data(e.to_string()))?;
    }
    Ok(())
}

fn cmd_project(args: &ProjectArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let model = LoadedModel::load(&args.model)?;
    let emb = model
        .embeddings()
        .ok_or_else(|| CliError::usage("projection needs a vector model"))?;
    let text = fs::read_to_string(&args.words).map_err(|e| Error::io(&args.words, e))?;
    let words: Vec<&str> = text.lines().map(str::trim).filter(|l| !l.is_empty()).collect();
    let projection = eval::project_2d(emb, &words)?;
    log::info!(
        "projected {} words ({} skipped); component variances {:.6} {:.6}",
        projection.points.len(),
        projection.skipped.len(),
        projection.variances[0],
        projection.variances[1]
    );
    let tsv = projection.to_tsv();
    match &args.output {
        Some(path) => {
            write_atomic(path, |w| w.write_all(tsv.as_bytes()).map_err(|e| Error::io(path, e)))?;
            RunManifest::new(
                "project",
                serde_json::json!({ "skipped": projection.skipped }),
                vec![args.model.clone(), args.words.clone()],
                vec![path.clone()],
                None,
            )
            .write_for(path)
        }
        None => out.write_all(tsv.as_bytes()).map_err(|e| CliError::data(e.to_string())),
    }
}

pub fn execute(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Preprocess(a) => cmd_preprocess(a),
        Command::Train(a) => cmd_train(a),
        Command::Eval(a) => cmd_eval(a, out),
        Command::Query(a) => cmd_query(a, out),
        Command::Project(a) => cmd_project(a, out),
    }
}

/// Parse arguments, run the command and return the process exit code.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = write!(out, "{}", e);
                    EXIT_OK
                }
                _ => {
                    eprint!("{}", e);
                    EXIT_USAGE
                }
            };
        }
    };
    match execute(&cli, out) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {}", e.message);
            e.code
        }
    }
}
