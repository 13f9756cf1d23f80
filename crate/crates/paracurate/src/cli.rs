//! The `paracurate` command line.
//!
//! Every subcommand resolves a [`PipelineConfig`] from built-in defaults, an
//! optional `--config` TOML file, `PARACURATE_*` environment variables and
//! flags, in that order, then writes a run record beside its outputs.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::parser::ValueSource;
use clap::{ArgMatches, Args, CommandFactory, FromArgMatches, Parser, Subcommand};
use paracurate_core::{ClinicalMajority, ClinicalSubsetFilter, GroupBy, VariantConfig, VariantName};

use crate::annotate::{parse_responses, rejected_path, sample_corpus, write_jsonl};
use crate::config::PipelineConfig;
use crate::corpus::{ingest_dir, write_corpus};
use crate::error::{io_err, Error};
use crate::lang::WhatlangDetector;
use crate::record::write_run_record;
use crate::report::{stats_dir, write_plots, write_report};
use crate::validate::{validate_path, ValidateOptions};
use crate::variants::{build_variant_dir, extract_clinical_dir, pack_dir};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "paracurate",
    version,
    about = "Paragraph-level curation of biomedical article corpora"
)]
struct Cli {
    /// TOML file with pipeline settings; flags and environment override it.
    #[arg(long, global = true, env = "PARACURATE_CONFIG", value_name = "FILE")]
    config: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, global = true, env = "PARACURATE_JOBS", default_value_t = 1)]
    jobs: usize,
    /// Token counter used for every count.
    #[arg(
        long,
        global = true,
        env = "PARACURATE_TOKEN_COUNTER",
        default_value = "whitespace-v1"
    )]
    token_counter: String,
    /// Digest for manifests and run records.
    #[arg(long, global = true, env = "PARACURATE_HASH", default_value = "sha256")]
    hash: String,
    /// Print nothing on success.
    #[arg(long, short, global = true)]
    quiet: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Parse JATS XML into filtered paragraph shards.
    Ingest(IngestArgs),
    /// Draw the paragraphs to annotate, with their prompts.
    Sample(SampleArgs),
    /// Turn LLM completions into annotation records.
    ParseResponses(ParseArgs),
    /// Check a corpus, annotation, variant or packed directory.
    Validate(ValidateArgs),
    /// Materialize one dataset variant.
    Build(BuildArgs),
    /// Extract clinical-case paragraphs.
    ExtractClinical(ClinicalArgs),
    /// Pack variant documents into fixed-budget training windows.
    Pack(PackArgs),
    /// Score distributions over annotations.
    Stats(StatsArgs),
}

#[derive(Debug, Args)]
struct IngestArgs {
    /// Directory of JATS XML files.
    #[arg(long, env = "PARACURATE_INPUT", value_name = "DIR")]
    input: Option<PathBuf>,
    #[arg(long, env = "PARACURATE_OUTPUT", value_name = "DIR")]
    output: Option<PathBuf>,
    /// Paragraphs with fewer tokens are dropped.
    #[arg(long, env = "PARACURATE_MIN_TOKENS", default_value_t = paracurate_core::DEFAULT_MIN_TOKENS)]
    min_tokens: usize,
    /// Articles per output shard.
    #[arg(long, env = "PARACURATE_SHARD_SIZE", default_value_t = 1000)]
    shard_size: usize,
}

#[derive(Debug, Args)]
struct SampleArgs {
    #[arg(long, env = "PARACURATE_CORPUS", value_name = "DIR")]
    corpus: Option<PathBuf>,
    /// Paragraphs to draw.
    #[arg(
        long = "n",
        id = "sample_size",
        value_name = "N",
        env = "PARACURATE_SAMPLE_SIZE",
        default_value_t = 400_000
    )]
    sample_size: usize,
    #[arg(long, env = "PARACURATE_SEED", default_value_t = 0)]
    seed: u64,
    /// JSONL file of {paragraph_id, article_id, text, prompt}.
    #[arg(long, env = "PARACURATE_OUTPUT", value_name = "FILE")]
    output: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ParseArgs {
    /// JSONL file of {paragraph_id, response}.
    #[arg(long, env = "PARACURATE_INPUT", value_name = "FILE")]
    input: Option<PathBuf>,
    /// Annotation JSONL; rejects go to <stem>.rejected.ndjson beside it.
    #[arg(long, env = "PARACURATE_OUTPUT", value_name = "FILE")]
    output: Option<PathBuf>,
    /// Corpus to detect paragraph languages from; without it language is "und".
    #[arg(long, env = "PARACURATE_CORPUS", value_name = "DIR")]
    corpus: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ValidateArgs {
    /// Shard directory, shard file or variant directory.
    path: PathBuf,
    #[arg(long, env = "PARACURATE_MIN_TOKENS", default_value_t = paracurate_core::DEFAULT_MIN_TOKENS)]
    min_tokens: usize,
    /// Token budget packed windows must respect.
    #[arg(long = "context", id = "context_budget", value_name = "TOKENS", env = "PARACURATE_CONTEXT_BUDGET", default_value_t = paracurate_core::DEFAULT_CONTEXT_BUDGET)]
    context_budget: usize,
}

#[derive(Debug, Args)]
struct BuildArgs {
    /// be-base, be-educational, be-clinical, be-clinicalcase, be-french, be-prefix or be-all.
    #[arg(long, value_parser = parse_variant)]
    variant: VariantName,
    /// Minimum educational score kept by filtering variants.
    #[arg(long, env = "PARACURATE_EDU_THRESHOLD", default_value_t = VariantConfig::DEFAULT_EDU_THRESHOLD)]
    edu_threshold: u8,
    /// Copies of each upsampled article.
    #[arg(long = "factor", id = "replication_factor", value_name = "N", env = "PARACURATE_REPLICATION_FACTOR", default_value_t = VariantConfig::DEFAULT_REPLICATION_FACTOR)]
    replication_factor: u32,
    /// Language upsampled by be-french and be-all.
    #[arg(long = "language", id = "language_target", value_name = "CODE", env = "PARACURATE_LANGUAGE_TARGET", default_value = VariantConfig::DEFAULT_LANGUAGE)]
    language_target: String,
    /// How "predominantly clinical" is measured: paragraphs or tokens.
    #[arg(long, default_value = "paragraphs", value_parser = parse_clinical_rule)]
    clinical_rule: ClinicalMajority,
    #[arg(long, env = "PARACURATE_CORPUS", value_name = "DIR")]
    corpus: Option<PathBuf>,
    #[arg(long, env = "PARACURATE_ANNOTATIONS", value_name = "DIR")]
    annotations: Option<PathBuf>,
    #[arg(long, env = "PARACURATE_OUTPUT", value_name = "DIR")]
    output: Option<PathBuf>,
    /// Documents per output shard.
    #[arg(long, env = "PARACURATE_SHARD_SIZE", default_value_t = 1000)]
    shard_size: usize,
}

#[derive(Debug, Args)]
struct ClinicalArgs {
    /// Minimum educational score.
    #[arg(
        long = "min-score",
        id = "clinical_min_score",
        value_name = "SCORE",
        env = "PARACURATE_CLINICAL_MIN_SCORE",
        default_value_t = 4
    )]
    clinical_min_score: u8,
    /// Keep only commercially licensed articles.
    #[arg(
        long,
        env = "PARACURATE_COMMERCIAL_ONLY",
        default_value_t = true,
        num_args = 0..=1,
        default_missing_value = "true",
        action = clap::ArgAction::Set
    )]
    commercial_only: bool,
    #[arg(long, env = "PARACURATE_CORPUS", value_name = "DIR")]
    corpus: Option<PathBuf>,
    #[arg(long, env = "PARACURATE_ANNOTATIONS", value_name = "DIR")]
    annotations: Option<PathBuf>,
    #[arg(long, env = "PARACURATE_OUTPUT", value_name = "DIR")]
    output: Option<PathBuf>,
    #[arg(long, env = "PARACURATE_SHARD_SIZE", default_value_t = 1000)]
    shard_size: usize,
}

#[derive(Debug, Args)]
struct PackArgs {
    /// Variant directory.
    #[arg(long, env = "PARACURATE_INPUT", value_name = "DIR")]
    input: Option<PathBuf>,
    /// Token budget per window.
    #[arg(long = "context", id = "context_budget", value_name = "TOKENS", env = "PARACURATE_CONTEXT_BUDGET", default_value_t = paracurate_core::DEFAULT_CONTEXT_BUDGET)]
    context_budget: usize,
    #[arg(long, env = "PARACURATE_OUTPUT", value_name = "DIR")]
    output: Option<PathBuf>,
    /// Windows per output shard.
    #[arg(long, env = "PARACURATE_SHARD_SIZE", default_value_t = 1000)]
    shard_size: usize,
}

#[derive(Debug, Args)]
struct StatsArgs {
    #[arg(long, env = "PARACURATE_ANNOTATIONS", value_name = "DIR")]
    annotations: Option<PathBuf>,
    /// Grouping: none, doc_type or domain.
    #[arg(long, default_value = "none", value_parser = parse_group_by)]
    by: GroupBy,
    /// Report JSON; the aligned table goes beside it as .txt.
    #[arg(long, env = "PARACURATE_OUTPUT", value_name = "FILE")]
    output: Option<PathBuf>,
    /// Directory for one SVG histogram per group.
    #[arg(long, value_name = "DIR")]
    plot: Option<PathBuf>,
}

fn parse_variant(s: &str) -> Result<VariantName, String> {
    s.parse().map_err(|e: paracurate_core::VariantError| e.to_string())
}

fn parse_group_by(s: &str) -> Result<GroupBy, String> {
    s.parse()
}

fn parse_clinical_rule(s: &str) -> Result<ClinicalMajority, String> {
    match s {
        "paragraphs" | "paragraph-count" => Ok(ClinicalMajority::ParagraphCount),
        "tokens" | "token-weighted" => Ok(ClinicalMajority::TokenWeighted),
        other => Err(format!("unknown clinical rule {other:?} (paragraphs or tokens)")),
    }
}

enum Failure {
    Usage(String),
    Run(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Run(e)
    }
}

/// Copies `id` into `slot` when this subcommand has the argument and it came
/// from a flag or the environment. Clap defaults only document the built-in
/// values; they never override a config file.
fn overlay<T: Clone + Send + Sync + 'static>(m: &ArgMatches, id: &str, slot: &mut T) {
    if m.try_contains_id(id).is_err() {
        return;
    }
    if matches!(
        m.value_source(id),
        Some(ValueSource::CommandLine | ValueSource::EnvVariable)
    ) {
        if let Ok(Some(v)) = m.try_get_one::<T>(id) {
            *slot = v.clone();
        }
    }
}

fn resolve_config(m: &ArgMatches) -> Result<PipelineConfig, Failure> {
    let mut config = match m.get_one::<PathBuf>("config") {
        Some(path) => PipelineConfig::load(path)?,
        None => PipelineConfig::default(),
    };
    for (id, slot) in [
        ("input", &mut config.input),
        ("corpus", &mut config.corpus),
        ("annotations", &mut config.annotations),
        ("output", &mut config.output),
    ] {
        if let Ok(Some(path)) = m.try_get_one::<PathBuf>(id) {
            *slot = Some(path.clone());
        }
    }
    overlay(m, "jobs", &mut config.jobs);
    overlay(m, "token_counter", &mut config.token_counter);
    overlay(m, "hash", &mut config.hash);
    overlay(m, "min_tokens", &mut config.min_tokens);
    overlay(m, "shard_size", &mut config.shard_size);
    overlay(m, "sample_size", &mut config.sample_size);
    overlay(m, "seed", &mut config.seed);
    overlay(m, "context_budget", &mut config.context_budget);
    overlay(m, "edu_threshold", &mut config.edu_threshold);
    overlay(m, "replication_factor", &mut config.replication_factor);
    overlay(m, "language_target", &mut config.language_target);
    overlay(m, "clinical_min_score", &mut config.clinical_min_score);
    overlay(m, "commercial_only", &mut config.commercial_only);
    config.validate()?;
    Ok(config)
}

fn required<'a>(value: &'a Option<PathBuf>, flag: &str) -> Result<&'a Path, Failure> {
    value.as_deref().ok_or_else(|| {
        Failure::Usage(format!(
            "--{flag} is required (flag, config file or PARACURATE_{})",
            flag.to_uppercase()
        ))
    })
}

struct Run<'a> {
    quiet: bool,
    subcommand: &'a str,
    args: &'a [String],
    config: &'a PipelineConfig,
}

impl Run<'_> {
    fn record(&self, inputs: &[&Path], output: &Path, output_is_dir: bool) -> Result<(), Failure> {
        write_run_record(self.subcommand, self.args, self.config, inputs, output, output_is_dir)?;
        Ok(())
    }

    fn say(&self, message: std::fmt::Arguments) {
        if !self.quiet {
            println!("{message}");
        }
    }
}

fn execute(command: &Command, run: &Run) -> Result<i32, Failure> {
    let config = run.config;
    let counter = config.counter()?;
    match command {
        Command::Ingest(_) => {
            let input = required(&config.input, "input")?;
            let output = required(&config.output, "output")?;
            let articles = ingest_dir(input, config.min_tokens, counter, config.jobs)?;
            let shards = write_corpus(&articles, output, config.shard_size)?;
            let paragraphs: usize = articles.iter().map(|a| a.paragraphs.len()).sum();
            run.record(&[input], output, true)?;
            run.say(format_args!(
                "ingested {} articles, {paragraphs} paragraphs into {} shards",
                articles.len(),
                shards.len()
            ));
        }
        Command::Sample(_) => {
            let corpus = required(&config.corpus, "corpus")?;
            let output = required(&config.output, "output")?;
            let records = sample_corpus(corpus, config.sample_size, config.seed)?;
            let n = write_jsonl(output, &records)?;
            run.record(&[corpus], output, false)?;
            run.say(format_args!("sampled {n} paragraphs"));
        }
        Command::ParseResponses(_) => {
            let input = required(&config.input, "input")?;
            let output = required(&config.output, "output")?;
            let corpus = config.corpus.as_deref();
            let summary = parse_responses(input, output, corpus, &WhatlangDetector)?;
            let mut inputs = vec![input];
            inputs.extend(corpus);
            run.record(&inputs, output, false)?;
            run.say(format_args!(
                "parsed {} responses, rejected {} (see {})",
                summary.parsed,
                summary.rejected,
                rejected_path(output).display()
            ));
        }
        Command::Validate(args) => {
            let options = ValidateOptions {
                min_tokens: config.min_tokens,
                context_budget: config.context_budget,
            };
            let report = validate_path(&args.path, options, counter)?;
            run.say(format_args!(
                "{}: {} {} in {} files, {} errors",
                args.path.display(),
                report.records,
                report.kind,
                report.files,
                report.error_count
            ));
            for e in &report.errors {
                println!("  {e}");
            }
            if report.error_count > report.errors.len() {
                println!("  ... {} more", report.error_count - report.errors.len());
            }
            return Ok(if report.is_valid() { EXIT_OK } else { EXIT_FAILURE });
        }
        Command::Build(args) => {
            let corpus = required(&config.corpus, "corpus")?;
            let annotations = required(&config.annotations, "annotations")?;
            let output = required(&config.output, "output")?;
            let mut variant = VariantConfig::new(args.variant);
            variant.edu_threshold = config.edu_threshold;
            variant.replication_factor = config.replication_factor;
            variant.language_target = config.language_target.clone();
            variant.clinical_rule = args.clinical_rule;
            let manifest = build_variant_dir(&variant, corpus, annotations, output, counter, config.shard_size)?;
            run.record(&[corpus, annotations], output, true)?;
            run.say(format_args!(
                "built {}: {} articles, {} tokens, content hash {}",
                manifest.variant_name,
                manifest.entries.len(),
                manifest.total_tokens,
                manifest.content_hash
            ));
        }
        Command::ExtractClinical(_) => {
            let corpus = required(&config.corpus, "corpus")?;
            let annotations = required(&config.annotations, "annotations")?;
            let output = required(&config.output, "output")?;
            let filter = ClinicalSubsetFilter {
                min_score: config.clinical_min_score,
                require_commercial: config.commercial_only,
            };
            let n = extract_clinical_dir(corpus, annotations, filter, output, config.shard_size)?;
            run.record(&[corpus, annotations], output, true)?;
            run.say(format_args!("extracted {n} clinical-case paragraphs"));
        }
        Command::Pack(_) => {
            let input = required(&config.input, "input")?;
            let output = required(&config.output, "output")?;
            let shards = pack_dir(input, output, config.context_budget, counter, config.shard_size)?;
            let windows: u64 = shards.iter().map(|s| s.documents).sum();
            run.record(&[input], output, true)?;
            run.say(format_args!("packed {windows} windows into {} shards", shards.len()));
        }
        Command::Stats(args) => {
            let annotations = required(&config.annotations, "annotations")?;
            let output = required(&config.output, "output")?;
            let report = stats_dir(annotations, args.by, config.jobs)?;
            let table = write_report(&report, output)?;
            if let Some(dir) = &args.plot {
                write_plots(&report, dir)?;
            }
            run.record(&[annotations], output, false)?;
            if !run.quiet {
                print!("{}", fs::read_to_string(&table).map_err(io_err(&table))?);
            }
        }
    }
    Ok(EXIT_OK)
}

/// Runs one invocation and returns its exit code: 0 on success, 1 when
/// validation or processing fails, 2 on a usage error.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let argv: Vec<OsString> = argv.into_iter().map(Into::into).collect();
    let matches = match Cli::command().try_get_matches_from(&argv) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return EXIT_USAGE;
        }
    };
    let (subcommand, sub_matches) = matches.subcommand().expect("subcommand is required");
    let args: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();

    let outcome = resolve_config(sub_matches).and_then(|config| {
        let run = Run {
            quiet: cli.quiet,
            subcommand,
            args: &args,
            config: &config,
        };
        execute(&cli.command, &run)
    });
    match outcome {
        Ok(code) => code,
        Err(Failure::Usage(message)) => {
            eprintln!("error: {message}");
            EXIT_USAGE
        }
        Err(Failure::Run(e)) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}
