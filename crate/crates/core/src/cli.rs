//! The `basenp` command line.
//!
//! Exit codes: 0 success, 1 internal error, 2 input error (unreadable or
//! malformed files, bad arguments), 3 data-contract violation (corpora that
//! should be aligned are not).

use std::collections::BTreeSet;
use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use log::info;

use crate::bracketer::{bracket_corpus, par_bracket_corpus};
use crate::corpus::{read_bracketed, read_iob2, write_bracketed, write_iob2, Corpus};
use crate::error::{Error, Result};
use crate::experiment::{
    run_crossval, run_crossval_folds, ConfigGrid, CrossvalOptions, CrossvalResult, Fold,
    PruneParams,
};
use crate::grammar::{drop_singletons, extract_grammar, load_grammar, save_grammar, RuleTrie};
use crate::pruner::{
    prune_by_class, prune_incremental, prune_threshold, IncrementalConfig, PruneOutcome,
    RuleClassFilter, TagsetMap,
};
use crate::repair::{load_lexicon, repair, RepairConfig};
use crate::scorer::evaluate;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Bracketed,
    Iob2,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Threshold,
    Incremental,
    Classes,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Grid {
    /// initial, threshold, incremental, classes
    Methods,
    /// threshold and incremental, each with and without repair
    Repair,
    /// all methods, with and without repair and singleton dropping
    Full,
}

#[derive(Debug, Parser)]
#[command(
    name = "basenp",
    version,
    about = "Base NP chunking by tag-sequence rules"
)]
pub struct Cli {
    /// More logging (-v info, -vv debug).
    #[arg(short, long, action = clap::ArgAction::Count, global = true)]
    verbose: u8,

    /// Worker threads for sentence- and fold-parallel stages.
    #[arg(long, default_value_t = 1, global = true)]
    jobs: usize,

    /// Seed for every random choice (fold assignment).
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, clap::Args)]
struct PruneArgs {
    /// Minimum benefit kept by threshold pruning.
    #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
    threshold: i64,

    /// Rules discarded per incremental round.
    #[arg(long, default_value_t = 10)]
    batch: usize,

    /// Incremental rounds below the best precision tolerated before stopping.
    #[arg(long, default_value_t = 0)]
    patience: usize,

    /// Tag classification file (`TAG<TAB>class` lines); Penn tagset if absent.
    #[arg(long)]
    tagset: Option<PathBuf>,

    /// Comma-separated rule-class filters; all of them if absent.
    #[arg(long, value_delimiter = ',')]
    filters: Option<Vec<String>>,
}

#[derive(Debug, clap::Args)]
struct RepairArgs {
    /// Time-word lexicon, one word per line; built-in list if absent.
    #[arg(long)]
    time_words: Option<PathBuf>,

    /// Month-name lexicon; built-in list if absent.
    #[arg(long)]
    month_words: Option<PathBuf>,

    /// Quantifier lexicon; built-in list if absent.
    #[arg(long)]
    quantifier_words: Option<PathBuf>,

    /// Disable merging of consecutive NPs.
    #[arg(long)]
    no_merge: bool,

    /// Disable date merging.
    #[arg(long)]
    no_dates: bool,

    /// Disable quantifier splitting.
    #[arg(long)]
    no_quantifiers: bool,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract a grammar from an annotated corpus.
    Train {
        /// Annotated training corpus.
        input: PathBuf,
        /// Grammar file to write.
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Bracketed)]
        format: Format,
        /// Keep only rules seen at least twice.
        #[arg(long)]
        drop_singletons: bool,
    },
    /// Prune a grammar against an annotated pruning corpus.
    Prune {
        /// Grammar file to prune.
        #[arg(long)]
        grammar: PathBuf,
        /// Annotated pruning corpus.
        #[arg(long)]
        corpus: PathBuf,
        /// Pruned grammar file.
        #[arg(short, long)]
        output: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Incremental)]
        method: Method,
        /// Write the pruning trace as CSV.
        #[arg(long)]
        trace: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Bracketed)]
        format: Format,
        #[command(flatten)]
        params: PruneArgs,
    },
    /// Bracket base NPs in tagged text. Existing brackets are discarded.
    Bracket {
        /// Grammar file.
        #[arg(long)]
        grammar: PathBuf,
        /// Tagged input text.
        input: PathBuf,
        /// Output file; standard output if absent.
        #[arg(short, long)]
        output: Option<PathBuf>,
        /// Apply the local repair heuristics.
        #[arg(long)]
        repair: bool,
        #[arg(long, value_enum, default_value_t = Format::Bracketed)]
        format: Format,
        #[command(flatten)]
        lexicons: RepairArgs,
    },
    /// Compare proposed NPs against a reference.
    Eval {
        proposed: PathBuf,
        reference: PathBuf,
        #[arg(long, value_enum, default_value_t = Format::Bracketed)]
        format: Format,
    },
    /// k-fold cross-validation with rotating train/prune/test roles.
    Crossval {
        /// Corpus to split; omit when using --manifest.
        #[arg(required_unless_present = "manifest")]
        corpus: Option<PathBuf>,
        /// Number of folds (at least 3).
        #[arg(long, default_value_t = 5)]
        folds: usize,
        /// File listing one fold corpus path per line.
        #[arg(long, conflicts_with = "corpus")]
        manifest: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Grid::Methods)]
        configs: Grid,
        /// Per-run results CSV.
        #[arg(long)]
        csv: Option<PathBuf>,
        /// Averaged results CSV.
        #[arg(long)]
        summary_csv: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Bracketed)]
        format: Format,
        #[command(flatten)]
        params: PruneArgs,
        #[command(flatten)]
        lexicons: RepairArgs,
    },
    /// Convert between bracketed and IOB2 formats.
    Convert {
        input: PathBuf,
        #[arg(short, long)]
        output: Option<PathBuf>,
        #[arg(long, value_enum)]
        from: Format,
        #[arg(long, value_enum)]
        to: Format,
    },
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    File::create(path)
        .map(BufWriter::new)
        .map_err(|source| Error::File {
            path: path.to_path_buf(),
            source,
        })
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) if p != Path::new("-") => Box::new(create(p)?),
        _ => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

pub fn read_corpus(path: &Path, format: Format) -> Result<Corpus> {
    let file = open(path)?;
    let name = path.display().to_string();
    match format {
        Format::Bracketed => read_bracketed(file, &name),
        Format::Iob2 => read_iob2(file, &name),
    }
}

fn write_corpus<W: Write>(corpus: &Corpus, format: Format, out: W) -> Result<()> {
    match format {
        Format::Bracketed => write_bracketed(corpus, out),
        Format::Iob2 => write_iob2(corpus, out),
    }
}

fn load_grammar_file(path: &Path) -> Result<crate::grammar::Grammar> {
    load_grammar(open(path)?, &path.display().to_string())
}

impl PruneArgs {
    fn params(&self) -> Result<PruneParams> {
        let tagset = match &self.tagset {
            Some(p) => TagsetMap::load(open(p)?, &p.display().to_string())?,
            None => TagsetMap::penn(),
        };
        let filters = match &self.filters {
            Some(names) => names
                .iter()
                .map(|n| n.parse())
                .collect::<Result<BTreeSet<RuleClassFilter>>>()?,
            None => RuleClassFilter::ALL.into_iter().collect(),
        };
        Ok(PruneParams {
            threshold: self.threshold,
            incremental: IncrementalConfig {
                batch: self.batch.max(1),
                patience: self.patience,
            },
            filters,
            tagset,
        })
    }
}

impl RepairArgs {
    fn config(&self) -> Result<RepairConfig> {
        let mut config = RepairConfig {
            merge_consecutive: !self.no_merge,
            date_merge: !self.no_dates,
            quantifier_of_split: !self.no_quantifiers,
            ..RepairConfig::default()
        };
        if let Some(p) = &self.time_words {
            config.time_words = load_lexicon(open(p)?)?;
        }
        if let Some(p) = &self.month_words {
            config.month_words = load_lexicon(open(p)?)?;
        }
        if let Some(p) = &self.quantifier_words {
            config.quantifier_words = load_lexicon(open(p)?)?;
        }
        config.validate()?;
        Ok(config)
    }
}

fn with_jobs<T: Send>(jobs: usize, f: impl FnOnce() -> T + Send) -> Result<T> {
    if jobs <= 1 {
        return Ok(f());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(e.to_string()))?;
    Ok(pool.install(f))
}

fn read_manifest(path: &Path, format: Format) -> Result<Vec<Fold>> {
    let text = std::fs::read_to_string(path).map_err(|source| Error::File {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or(Path::new("."));
    let mut folds = Vec::new();
    let mut next_id = 0;
    for line in text.lines() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let corpus = read_corpus(&base.join(line), format)?;
        let ids = (next_id..next_id + corpus.len()).collect();
        next_id += corpus.len();
        folds.push(Fold { corpus, ids });
    }
    Ok(folds)
}

fn print_prune_summary(method: &str, before: usize, outcome: Option<&PruneOutcome>, after: usize) {
    let passes = outcome.map_or(0, |o| o.passes);
    println!(
        "method={method} rules_in={before} rules_out={after} removed={} passes={passes}",
        before - after
    );
    if let Some(o) = outcome {
        println!("pruning corpus: {}", o.selected_step().report);
    }
}

fn execute(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Train {
            input,
            output,
            format,
            drop_singletons: drop,
        } => {
            let corpus = read_corpus(&input, format)?;
            let grammar = extract_grammar(&corpus);
            let singletons = grammar.singleton_count();
            let written = if drop {
                drop_singletons(&grammar)
            } else {
                grammar.clone()
            };
            save_grammar(&written, create(&output)?)?;
            println!(
                "rules={} singletons={singletons} written={}",
                grammar.len(),
                written.len()
            );
        }
        Command::Prune {
            grammar,
            corpus,
            output,
            method,
            trace,
            format,
            params,
        } => {
            let grammar = load_grammar_file(&grammar)?;
            let pruning = read_corpus(&corpus, format)?;
            let params = params.params()?;
            let (pruned, outcome) = match method {
                Method::Threshold => {
                    let o = prune_threshold(&grammar, &pruning, params.threshold);
                    (o.grammar.clone(), Some(o))
                }
                Method::Incremental => {
                    let o = with_jobs(cli.jobs, || {
                        prune_incremental(&grammar, &pruning, params.incremental)
                    })?;
                    (o.grammar.clone(), Some(o))
                }
                Method::Classes => (
                    prune_by_class(&grammar, &params.filters, &params.tagset)?,
                    None,
                ),
            };
            save_grammar(&pruned, create(&output)?)?;
            if let (Some(path), Some(o)) = (&trace, &outcome) {
                o.trace.write_csv(create(path)?)?;
            }
            let name = format!("{method:?}").to_lowercase();
            print_prune_summary(&name, grammar.len(), outcome.as_ref(), pruned.len());
        }
        Command::Bracket {
            grammar,
            input,
            output,
            repair: do_repair,
            format,
            lexicons,
        } => {
            let trie = RuleTrie::compile(&load_grammar_file(&grammar)?);
            let config = if do_repair {
                Some(lexicons.config()?)
            } else {
                None
            };
            let text = read_corpus(&input, format)?.unbracketed();
            let mut out = with_jobs(cli.jobs, || {
                if cli.jobs > 1 {
                    par_bracket_corpus(&text, &trie)
                } else {
                    bracket_corpus(&text, &trie)
                }
            })?;
            if let Some(config) = &config {
                out = repair(&out, config);
            }
            info!("proposed {} NPs in {} sentences", out.np_count(), out.len());
            write_corpus(&out, format, sink(output.as_deref())?)?;
        }
        Command::Eval {
            proposed,
            reference,
            format,
        } => {
            let proposed = read_corpus(&proposed, format)?;
            let reference = read_corpus(&reference, format)?;
            println!("{}", evaluate(&proposed, &reference)?);
        }
        Command::Crossval {
            corpus,
            folds,
            manifest,
            configs,
            csv,
            summary_csv,
            format,
            params,
            lexicons,
        } => {
            let params = params.params()?;
            let grid = match configs {
                Grid::Methods => ConfigGrid::Methods,
                Grid::Repair => ConfigGrid::Repair,
                Grid::Full => ConfigGrid::Full,
            };
            let configs = grid.configs(&params);
            let options = CrossvalOptions {
                repair: lexicons.config()?,
                jobs: cli.jobs,
            };
            let result: CrossvalResult = match (&manifest, &corpus) {
                (Some(m), _) => {
                    let folds = read_manifest(m, format)?;
                    run_crossval_folds(&folds, &configs, &options, &m.display().to_string())?
                }
                (None, Some(c)) => {
                    let corpus = read_corpus(c, format)?;
                    run_crossval(&corpus, folds, cli.seed, &configs, &options)?
                }
                (None, None) => {
                    return Err(Error::InvalidArgument("no corpus or manifest given".into()))
                }
            };
            if let Some(path) = &csv {
                result.write_runs_csv(create(path)?)?;
            }
            if let Some(path) = &summary_csv {
                result.write_summary_csv(create(path)?)?;
            }
            print!("{}", result.table());
        }
        Command::Convert {
            input,
            output,
            from,
            to,
        } => {
            let corpus = read_corpus(&input, from)?;
            write_corpus(&corpus, to, sink(output.as_deref())?)?;
        }
    }
    Ok(())
}

/// Exit status for an error.
pub fn exit_code(error: &Error) -> i32 {
    match error {
        Error::Misaligned(_) => 3,
        Error::Parse { .. }
        | Error::InvalidArgument(_)
        | Error::InvalidToken(_)
        | Error::InvalidSpan(_)
        | Error::UnclassifiedTag(_)
        | Error::File { .. } => 2,
        Error::Io(_) => 1,
    }
}

/// Parses `args` (including the program name), runs the command and
/// returns the process exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    let level = match cli.verbose {
        0 => log::LevelFilter::Warn,
        1 => log::LevelFilter::Info,
        _ => log::LevelFilter::Debug,
    };
    let _ = env_logger::Builder::new().filter_level(level).try_init();
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("basenp: {e}");
            exit_code(&e)
        }
    }
}
