//! Pipeline driver: extract pairs, build counts, train vectors, resolve
//! bridging anaphors, score. Every subcommand is also callable on its own;
//! `pipeline` chains the same functions over intermediate files, so a
//! chained run and a stepwise run produce identical bytes.

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use ppembed::cooccur::{count_cooccurrences, count_cooccurrences_parallel, CooccurrenceTable};
use ppembed::documents::{read_bridging_documents, read_bridging_documents_dir, BridgingDocument};
use ppembed::extract::extract_noun_pairs;
use ppembed::glove::{export_vectors, train, TrainConfig};
use ppembed::resolve::{evaluate, export_links, read_links, resolve_document, ResolveMode};
use ppembed::store::load_vectors;
use ppembed::vocab::{build_vocabulary, Vocabulary};
use ppembed::{read_parsed_corpus, token_lines};

#[derive(Parser)]
#[command(name = "ppembed", version, about = "Noun-pair embeddings and bridging resolution")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Extract (head_PP, modifier) noun pairs from a parsed corpus
    Extract(ExtractArgs),
    /// Build a frequency-filtered vocabulary from a token-line corpus
    Vocab(VocabArgs),
    /// Count co-occurrences of a token-line corpus against a vocabulary
    Cooccur(CooccurArgs),
    /// Train embedding vectors on co-occurrence counts
    Train(TrainArgs),
    /// Print a word's nearest neighbors
    Neighbors(NeighborsArgs),
    /// Resolve bridging anaphors against a vector file
    Resolve(ResolveArgs),
    /// Score a links file against gold annotation
    Evaluate(EvaluateArgs),
    /// Run extract, vocab, cooccur, train, resolve, evaluate end to end
    Pipeline(PipelineArgs),
}

#[derive(Args)]
struct ExtractArgs {
    /// Parsed corpus (tab-separated columnar format)
    #[arg(long = "in")]
    input: PathBuf,
    /// Output pairs file
    #[arg(long)]
    out: PathBuf,
    /// Append the head suffix (the default)
    #[arg(long)]
    suffix: bool,
    /// Emit unsuffixed heads (ablation mode)
    #[arg(long, overrides_with = "suffix")]
    no_suffix: bool,
    /// Abort on the first malformed sentence instead of skipping it
    #[arg(long)]
    strict: bool,
}

#[derive(Args)]
struct VocabArgs {
    /// Token-line corpus (e.g. a pairs file)
    #[arg(long = "in")]
    input: PathBuf,
    /// Output vocabulary file (word<TAB>count, descending)
    #[arg(long)]
    out: PathBuf,
    /// Drop words occurring fewer times than this
    #[arg(long, default_value_t = 10)]
    min_count: u64,
}

#[derive(Args)]
struct CooccurArgs {
    /// Token-line corpus
    #[arg(long = "in")]
    input: PathBuf,
    /// Vocabulary file from `vocab`
    #[arg(long)]
    vocab: PathBuf,
    /// Output co-occurrence triples (i<TAB>j<TAB>x)
    #[arg(long)]
    out: PathBuf,
    /// Context window size
    #[arg(long, default_value_t = 2)]
    window: usize,
    /// Count only left-to-right contexts
    #[arg(long)]
    asymmetric: bool,
    /// Worker threads (1 = streaming single pass)
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct TrainArgs {
    /// Co-occurrence triples from `cooccur`
    #[arg(long)]
    cooccur: PathBuf,
    /// Vocabulary file from `vocab`
    #[arg(long)]
    vocab: PathBuf,
    /// Output vector file
    #[arg(long)]
    out: PathBuf,
    /// Vector dimension
    #[arg(long, default_value_t = 100)]
    dim: usize,
    /// Full passes over the records
    #[arg(long, default_value_t = 15)]
    iterations: usize,
    /// Initial learning rate
    #[arg(long, default_value_t = 0.05)]
    learning_rate: f64,
    /// Weighting cap x_max
    #[arg(long, default_value_t = 100.0)]
    x_max: f64,
    /// Weighting exponent
    #[arg(long, default_value_t = 0.75)]
    alpha: f64,
    /// RNG seed for initialization and shuffles
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; more than 1 switches to nondeterministic updates
    #[arg(long, default_value_t = 1)]
    threads: usize,
}

#[derive(Args)]
struct NeighborsArgs {
    /// Vector file
    #[arg(long)]
    vectors: PathBuf,
    /// Query word
    #[arg(long)]
    word: String,
    /// Neighbor count
    #[arg(long, default_value_t = 5)]
    k: usize,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    /// Cosine between anaphor head (suffixed) and candidate head
    HeadOnly,
    /// Cosine between NP mean vectors
    NpAverage,
}

impl From<Mode> for ResolveMode {
    fn from(m: Mode) -> ResolveMode {
        match m {
            Mode::HeadOnly => ResolveMode::HeadOnly,
            Mode::NpAverage => ResolveMode::NpAverage,
        }
    }
}

#[derive(Args)]
struct ResolveArgs {
    /// Bridging documents: a JSON file or a directory of them
    #[arg(long)]
    docs: PathBuf,
    /// Vector file
    #[arg(long)]
    vectors: PathBuf,
    /// Output links file
    #[arg(long)]
    out: PathBuf,
    #[arg(long, value_enum, default_value_t = Mode::HeadOnly)]
    mode: Mode,
    /// Query with the plain head instead of the suffixed form
    #[arg(long)]
    no_suffix: bool,
}

#[derive(Args)]
struct EvaluateArgs {
    /// Links file from `resolve`
    #[arg(long)]
    pred: PathBuf,
    /// Gold documents: a JSON file or a directory of them
    #[arg(long)]
    gold: PathBuf,
    /// Also write the report to this file
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct PipelineArgs {
    /// Parsed corpus (tab-separated columnar format)
    #[arg(long)]
    corpus: PathBuf,
    /// Bridging documents: a JSON file or a directory of them
    #[arg(long)]
    docs: PathBuf,
    /// Directory for all intermediate and final files
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 10)]
    min_count: u64,
    #[arg(long, default_value_t = 2)]
    window: usize,
    #[arg(long, default_value_t = 100)]
    dim: usize,
    #[arg(long, default_value_t = 15)]
    iterations: usize,
    #[arg(long, default_value_t = 0.05)]
    learning_rate: f64,
    #[arg(long, default_value_t = 100.0)]
    x_max: f64,
    #[arg(long, default_value_t = 0.75)]
    alpha: f64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Worker threads; more than 1 is nondeterministic
    #[arg(long, default_value_t = 1)]
    threads: usize,
    #[arg(long, value_enum, default_value_t = Mode::HeadOnly)]
    mode: Mode,
    /// Ablation: no head suffix in extraction and no suffixed queries
    #[arg(long)]
    no_suffix: bool,
    /// Abort on the first malformed sentence
    #[arg(long)]
    strict: bool,
    #[arg(long)]
    asymmetric: bool,
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    if let Err(e) = run(cli.command) {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Extract(a) => run_extract(&a.input, &a.out, !a.no_suffix, a.strict),
        Command::Vocab(a) => run_vocab(&a.input, &a.out, a.min_count),
        Command::Cooccur(a) => run_cooccur(&a.input, &a.vocab, &a.out, a.window, !a.asymmetric, a.threads),
        Command::Train(a) => {
            let cfg = TrainConfig {
                dimension: a.dim,
                iterations: a.iterations,
                learning_rate: a.learning_rate,
                x_max: a.x_max,
                alpha: a.alpha,
                seed: a.seed,
                deterministic: a.threads <= 1,
                threads: a.threads,
                ..TrainConfig::default()
            };
            run_train(&a.cooccur, &a.vocab, &a.out, &cfg)
        }
        Command::Neighbors(a) => run_neighbors(&a.vectors, &a.word, a.k),
        Command::Resolve(a) => run_resolve(&a.docs, &a.vectors, &a.out, a.mode.into(), !a.no_suffix),
        Command::Evaluate(a) => run_evaluate(&a.pred, &a.gold, a.out.as_deref()),
        Command::Pipeline(a) => run_pipeline(a),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    Ok(BufReader::new(
        File::open(path).with_context(|| format!("cannot open {}", path.display()))?,
    ))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(
        File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
    ))
}

fn run_extract(input: &Path, out: &Path, suffix: bool, strict: bool) -> Result<()> {
    let reader = open(input)?;
    let mut writer = create(out)?;
    let mut sentences = 0usize;
    let mut skipped = 0usize;
    let mut pairs = 0usize;
    for sentence in read_parsed_corpus(reader) {
        match sentence {
            Ok(s) => {
                sentences += 1;
                for pair in extract_noun_pairs(&s, suffix) {
                    writeln!(writer, "{}", pair.to_line())?;
                    pairs += 1;
                }
            }
            Err(e) if strict => return Err(e).context("malformed sentence in strict mode"),
            Err(e) => {
                skipped += 1;
                log::warn!("skipping malformed sentence: {e}");
            }
        }
    }
    writer.flush()?;
    log::info!("extracted {pairs} pairs from {sentences} sentences ({skipped} skipped)");
    Ok(())
}

fn run_vocab(input: &Path, out: &Path, min_count: u64) -> Result<()> {
    let vocab = build_vocabulary(token_lines(open(input)?), min_count)?;
    let mut writer = create(out)?;
    vocab.write_tsv(&mut writer)?;
    writer.flush()?;
    log::info!("kept {} words", vocab.len());
    Ok(())
}

fn run_cooccur(
    input: &Path,
    vocab_path: &Path,
    out: &Path,
    window: usize,
    symmetric: bool,
    threads: usize,
) -> Result<()> {
    let vocab = Vocabulary::read_tsv(open(vocab_path)?)?;
    let table = if threads > 1 {
        let sentences = token_lines(open(input)?).collect::<ppembed::Result<Vec<_>>>()?;
        count_cooccurrences_parallel(&sentences, &vocab, window, symmetric, threads)?
    } else {
        count_cooccurrences(token_lines(open(input)?), &vocab, window, symmetric)?
    };
    let mut writer = create(out)?;
    table.write_tsv(&mut writer)?;
    writer.flush()?;
    log::info!("{} records, total mass {}", table.len(), table.total_mass());
    Ok(())
}

fn run_train(cooccur: &Path, vocab_path: &Path, out: &Path, cfg: &TrainConfig) -> Result<()> {
    let vocab = Vocabulary::read_tsv(open(vocab_path)?)?;
    let table = CooccurrenceTable::read_tsv(open(cooccur)?)?;
    let model = train(&table, vocab.len(), cfg)?;
    if let Some(loss) = model.final_mean_loss() {
        log::info!("final mean loss {loss:.6}");
    }
    let mut writer = create(out)?;
    export_vectors(&model, &vocab, &mut writer)?;
    writer.flush()?;
    Ok(())
}

fn run_neighbors(vectors: &Path, word: &str, k: usize) -> Result<()> {
    let store = load_vectors(open(vectors)?)?;
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    for (neighbor, score) in store.nearest_neighbors(word, k)? {
        writeln!(out, "{neighbor}\t{score:.6}")?;
    }
    Ok(())
}

fn load_documents(path: &Path) -> Result<Vec<BridgingDocument>> {
    let docs = if path.is_dir() {
        read_bridging_documents_dir(path)?
    } else {
        read_bridging_documents(open(path)?, &path.display().to_string())?
    };
    Ok(docs)
}

fn run_resolve(
    docs_path: &Path,
    vectors: &Path,
    out: &Path,
    mode: ResolveMode,
    suffix_query: bool,
) -> Result<()> {
    let store = load_vectors(open(vectors)?)?;
    let docs = load_documents(docs_path)?;
    let mut predictions = Vec::new();
    for doc in &docs {
        predictions.extend(resolve_document(doc, &store, mode, suffix_query)?);
    }
    let mut writer = create(out)?;
    export_links(&predictions, &mut writer)?;
    writer.flush()?;
    log::info!("resolved {} anaphors over {} documents", predictions.len(), docs.len());
    Ok(())
}

fn run_evaluate(pred: &Path, gold: &Path, out: Option<&Path>) -> Result<()> {
    let predictions = read_links(open(pred)?)?;
    let docs = load_documents(gold)?;
    let report = evaluate(&predictions, &docs)?;
    let rendered = report.render();
    print!("{rendered}");
    if let Some(path) = out {
        let mut writer = create(path)?;
        writer.write_all(rendered.as_bytes())?;
        writer.flush()?;
    }
    Ok(())
}

fn run_pipeline(a: PipelineArgs) -> Result<()> {
    for input in [&a.corpus, &a.docs] {
        if !input.exists() {
            bail!("input path {} does not exist", input.display());
        }
    }
    std::fs::create_dir_all(&a.out_dir)
        .with_context(|| format!("cannot create {}", a.out_dir.display()))?;
    let suffix = !a.no_suffix;
    let pairs = a.out_dir.join("pairs.txt");
    run_extract(&a.corpus, &pairs, suffix, a.strict)?;
    let vocab = a.out_dir.join("vocab.tsv");
    run_vocab(&pairs, &vocab, a.min_count)?;
    let cooccur = a.out_dir.join("cooccur.tsv");
    run_cooccur(&pairs, &vocab, &cooccur, a.window, !a.asymmetric, a.threads)?;
    let vectors = a.out_dir.join("vectors.txt");
    let cfg = TrainConfig {
        dimension: a.dim,
        window: a.window,
        min_count: a.min_count,
        iterations: a.iterations,
        learning_rate: a.learning_rate,
        x_max: a.x_max,
        alpha: a.alpha,
        seed: a.seed,
        symmetric_context: !a.asymmetric,
        deterministic: a.threads <= 1,
        threads: a.threads,
    };
    run_train(&cooccur, &vocab, &vectors, &cfg)?;
    let links = a.out_dir.join("links.tsv");
    run_resolve(&a.docs, &vectors, &links, a.mode.into(), suffix)?;
    run_evaluate(&links, &a.docs, Some(&a.out_dir.join("report.txt")))?;
    Ok(())
}
