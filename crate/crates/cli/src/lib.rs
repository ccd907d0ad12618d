//! Command-line front end: `train`, `tag`, `eval`, `stats` and `bio`.
//!
//! Exit codes: 0 success, 1 runtime failure, 2 usage or configuration error.

pub mod config;

use std::ffi::OsString;
use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::Context;
use clap::{Args, Parser, Subcommand};
use unicode_normalization::UnicodeNormalization;

use crfner::corpus::{self, Corpus};
use crfner::crf;
use crfner::eval;
use crfner::gazetteer;
use crfner::Error;

use config::RunConfig;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "crfner", version, about = "Linear-chain CRF named-entity recognizer")]
pub struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Train a model from a labeled 4-column corpus.
    Train(TrainArgs),
    /// Append predicted NE labels to a 3-column corpus.
    Tag(TagArgs),
    /// Entity-level precision, recall and F-measure.
    Eval(EvalArgs),
    /// Sentence and token counts and the label histogram.
    Stats(StatsArgs),
    /// Check, and optionally repair, the BIO chains of a labeled corpus.
    Bio(BioArgs),
}

#[derive(Debug, Args)]
struct TrainArgs {
    #[arg(long, value_name = "FILE")]
    train: PathBuf,
    #[arg(long, value_name = "FILE")]
    config: PathBuf,
    #[arg(long, value_name = "PATH")]
    model_out: PathBuf,
    /// Gazetteer file for a named slot; repeatable.
    #[arg(long, value_name = "NAME=PATH")]
    gazetteer: Vec<String>,
    /// Labeled development corpus scored after training.
    #[arg(long, value_name = "FILE")]
    dev: Option<PathBuf>,
    /// NFC-normalize surface forms before feature extraction.
    #[arg(long)]
    nfc: bool,
}

#[derive(Debug, Args)]
struct TagArgs {
    #[arg(long, value_name = "FILE")]
    model: PathBuf,
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    #[arg(long, value_name = "PATH")]
    output: PathBuf,
    #[arg(long)]
    nfc: bool,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[arg(long, value_name = "FILE")]
    gold: PathBuf,
    #[arg(long, value_name = "FILE")]
    pred: PathBuf,
    /// Also print one key=value record per entity type.
    #[arg(long)]
    records: bool,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    #[arg(long)]
    nfc: bool,
}

#[derive(Debug, Args)]
struct BioArgs {
    #[arg(long, value_name = "FILE")]
    input: PathBuf,
    /// Write the repaired corpus here (stray I-X becomes B-X).
    #[arg(long, value_name = "PATH")]
    repair: Option<PathBuf>,
}

/// A failure tagged with its exit code.
#[derive(Debug)]
pub enum CliError {
    Usage(anyhow::Error),
    Runtime(anyhow::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => EXIT_USAGE,
            CliError::Runtime(_) => EXIT_FAILURE,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(e) => write!(f, "usage error: {e:#}"),
            CliError::Runtime(e) => write!(f, "error: {e:#}"),
        }
    }
}

fn usage(msg: impl fmt::Display) -> CliError {
    CliError::Usage(anyhow::anyhow!("{msg}"))
}

fn runtime(e: impl Into<anyhow::Error>) -> CliError {
    CliError::Runtime(e.into())
}

fn require_file(flag: &str, path: &Path) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(usage(format_args!("--{flag}: no such file {}", path.display())))
    }
}

fn nfc(corpus: Corpus) -> Result<Corpus, CliError> {
    corpus
        .map_surfaces(|s| s.nfc().collect())
        .map_err(runtime)
}

fn read_labeled(path: &Path, normalize: bool) -> Result<Corpus, CliError> {
    let c = corpus::parse_column_file(path, true)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Runtime)?;
    if normalize {
        nfc(c)
    } else {
        Ok(c)
    }
}

/// Parses argv and runs the subcommand, writing reports to `out`.
pub fn run<I, T, W>(args: I, out: &mut W) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
    W: Write,
{
    let cli = Cli::try_parse_from(args).map_err(|e| {
        // --help and --version are not failures, but they still end the run.
        CliError::Usage(anyhow::Error::new(e))
    })?;
    match cli.command {
        Command::Train(a) => train(a, out),
        Command::Tag(a) => tag(a),
        Command::Eval(a) => evaluate(a, out),
        Command::Stats(a) => stats(a, out),
        Command::Bio(a) => bio(a, out),
    }
}

/// Entry point used by the binary. Returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut out = stdout.lock();
    match run(args, &mut out) {
        Ok(()) => EXIT_OK,
        Err(CliError::Usage(e)) if e.downcast_ref::<clap::Error>().is_some() => {
            let clap_err = e.downcast::<clap::Error>().expect("checked above");
            let _ = clap_err.print();
            if clap_err.use_stderr() {
                EXIT_USAGE
            } else {
                EXIT_OK
            }
        }
        Err(e) => {
            let _ = out.flush();
            eprintln!("{e}");
            e.exit_code()
        }
    }
}

fn train<W: Write>(a: TrainArgs, out: &mut W) -> Result<(), CliError> {
    require_file("train", &a.train)?;
    require_file("config", &a.config)?;
    if let Some(dev) = &a.dev {
        require_file("dev", dev)?;
    }
    let mut cfg = RunConfig::load(&a.config).map_err(usage)?;
    for spec in &a.gazetteer {
        let (name, path) = spec
            .split_once('=')
            .ok_or_else(|| usage(format_args!("--gazetteer expects NAME=PATH, got {spec:?}")))?;
        cfg.add_gazetteer(name, PathBuf::from(path)).map_err(usage)?;
    }
    for (name, path) in &cfg.gazetteer_files {
        if !path.is_file() {
            return Err(usage(format_args!(
                "gazetteer {name}: no such file {}",
                path.display()
            )));
        }
    }
    let unfilled = cfg.unfilled_slots();
    if !unfilled.is_empty() {
        eprintln!(
            "warning: no file for gazetteer slot(s) {}; the feature is disabled",
            unfilled.join(", ")
        );
        cfg.features.gazetteers.retain(|g| !unfilled.contains(g));
    }

    let corpus = read_labeled(&a.train, a.nfc)?;
    let gazetteers = cfg
        .gazetteer_files
        .iter()
        .map(|(name, path)| {
            let g = gazetteer::load_gazetteer(path, name, cfg.fold_case)?;
            if a.nfc {
                let lines: Vec<String> = g.entries().iter().map(|e| e.join(" ").nfc().collect()).collect();
                return gazetteer::Gazetteer::from_lines(name.as_str(), lines, cfg.fold_case);
            }
            Ok(g)
        })
        .collect::<Result<Vec<_>, Error>>()
        .map_err(runtime)?;

    let (model, report) = crf::train_with_report(&corpus, &cfg.features, &gazetteers, &cfg.params)
        .context("training failed")
        .map_err(CliError::Runtime)?;
    crf::save_model(&model, &a.model_out).map_err(runtime)?;

    let w = |e: std::io::Error| runtime(e);
    writeln!(
        out,
        "trained {} sentences: {} labels, {} features, {} iterations ({:?}), objective {:.6}",
        report.num_instances,
        model.num_labels(),
        report.num_features,
        report.iterations,
        report.stop,
        report.final_objective
    )
    .map_err(w)?;
    writeln!(out, "model written to {}", a.model_out.display()).map_err(w)?;

    if let Some(dev) = &a.dev {
        let gold = read_labeled(dev, a.nfc)?;
        let pred = model.tag_corpus(&gold.strip_labels()).map_err(runtime)?;
        let report = eval::score(&gold, &pred).map_err(runtime)?;
        writeln!(out, "dev evaluation:\n{}", report.table()).map_err(w)?;
    }
    Ok(())
}

fn tag(a: TagArgs) -> Result<(), CliError> {
    require_file("model", &a.model)?;
    require_file("input", &a.input)?;
    let model = crf::load_model(&a.model)
        .with_context(|| format!("loading model {}", a.model.display()))
        .map_err(CliError::Runtime)?;
    let input = match corpus::parse_column_file(&a.input, false) {
        Ok(c) => c,
        Err(e @ Error::Parse { .. }) => {
            return Err(usage(format_args!(
                "{}: {e}; tagging expects 3-column (surface POS chunk) input",
                a.input.display()
            )))
        }
        Err(e) => return Err(runtime(e)),
    };
    let features_input = if a.nfc { nfc(input.clone())? } else { input.clone() };
    let labels: Vec<Vec<String>> = features_input
        .sentences()
        .iter()
        .map(|s| model.tag(s))
        .collect();
    let tagged = input.with_labels(&labels).map_err(runtime)?;
    corpus::write_column_file(&tagged, &a.output).map_err(runtime)
}

fn evaluate<W: Write>(a: EvalArgs, out: &mut W) -> Result<(), CliError> {
    require_file("gold", &a.gold)?;
    require_file("pred", &a.pred)?;
    let gold = read_labeled(&a.gold, false)?;
    let pred = read_labeled(&a.pred, false)?;
    let report = eval::score(&gold, &pred).map_err(runtime)?;
    let w = |e: std::io::Error| runtime(e);
    write!(out, "{}", report.table()).map_err(w)?;
    if a.records {
        write!(out, "{}", report.records()).map_err(w)?;
    }
    Ok(())
}

/// Labeled unless the first token line has exactly three columns.
fn sniff_labeled(path: &Path) -> Result<bool, CliError> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))
        .map_err(CliError::Runtime)?;
    let first = text
        .lines()
        .map(|l| l.split([' ', '\t']).filter(|c| !c.is_empty()).count())
        .find(|&n| n > 0);
    Ok(first != Some(3))
}

fn stats<W: Write>(a: StatsArgs, out: &mut W) -> Result<(), CliError> {
    require_file("input", &a.input)?;
    let labeled = sniff_labeled(&a.input)?;
    let mut c = corpus::parse_column_file(&a.input, labeled)
        .with_context(|| format!("reading {}", a.input.display()))
        .map_err(CliError::Runtime)?;
    if a.nfc {
        c = nfc(c)?;
    }
    write!(out, "{}", c.stats()).map_err(runtime)
}

fn bio<W: Write>(a: BioArgs, out: &mut W) -> Result<(), CliError> {
    require_file("input", &a.input)?;
    let c = read_labeled(&a.input, false)?;
    let check = corpus::validate_bio(&c, a.repair.is_some()).map_err(runtime)?;
    let w = |e: std::io::Error| runtime(e);
    for v in &check.violations {
        writeln!(
            out,
            "sentence {} token {}: {} does not continue an entity",
            v.sentence, v.position, v.label
        )
        .map_err(w)?;
    }
    writeln!(out, "violations: {}", check.violations.len()).map_err(w)?;
    match &a.repair {
        Some(path) => corpus::write_column_file(&check.corpus, path).map_err(runtime),
        None if !check.violations.is_empty() => Err(runtime(anyhow::anyhow!(
            "{} BIO violation(s); rerun with --repair <PATH>",
            check.violations.len()
        ))),
        None => Ok(()),
    }
}
