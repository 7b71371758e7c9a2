//! Command-line front end: single-file detection, corpus benchmarking and
//! cache maintenance.
//!
//! Exit codes are script-friendly and documented in the README: `detect`
//! maps its verdict to 0 (positive), 1 (negative) or 2 (unparseable);
//! operational failures use 3 (usage/config/corpus/io), 4 (missing
//! credential), 5 (replay cache miss), 6 (token budget) and 7 (remote
//! failure). `bench` exits 1 when any unit was not scored; `cache verify`
//! exits 1 when it finds a corrupt entry.

use crate::client::{
    CacheRequest, ChatClient, ClientError, HttpChatClient, Mode, ResponseCache, RetryPolicy,
};
use crate::config::{ConfigError, FileConfig, Overrides, RunConfig};
use crate::corpus::tokens::reduce_tokens;
use crate::corpus::{Corpus, CorpusError, Language, SourceUnit};
use crate::evaluation::report::{accuracy_line, build_report, emit_report, Report};
use crate::evaluation::score_records;
use crate::parser::{parse_verdict, VerdictKind};
use crate::pipeline::{corpus_hash, run_corpus, write_run, RunManifest};
use crate::prompt::{render_explain, render_followup, Algorithm, AlgorithmQuery};
use crate::strategy::{DetectionStrategy, StrategyError, StrategyRegistry};
use clap::{Args, Parser, Subcommand};
use std::collections::HashSet;
use std::path::{Path, PathBuf};
use thiserror::Error;

#[derive(Debug, Parser)]
#[command(
    name = "kerndetect",
    version,
    about = "Detect acceleratable kernels (GEMM, convolution, FFT) in C/C++ sources with a chat-completion model"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Ask whether one source file contains a given kernel
    Detect {
        /// C or C++ source file to analyze
        file: PathBuf,
        /// Algorithm to ask about: gemm, conv or fft
        #[arg(long)]
        algorithm: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Run every (unit x query) detection over a labeled corpus and score it
    Bench {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Inspect or maintain the record/replay cache
    Cache {
        #[command(subcommand)]
        action: CacheAction,
    },
}

#[derive(Debug, Subcommand)]
pub enum CacheAction {
    /// List cache entries
    List {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Check key and checksum integrity of every entry
    Verify {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Remove entries not reachable from the corpus manifest
    Prune {
        #[command(flatten)]
        opts: CommonOpts,
    },
}

/// Flags shared by all subcommands; each has a config-file equivalent and
/// flags win over the file.
#[derive(Debug, Clone, Args)]
pub struct CommonOpts {
    /// TOML config file (default: ./kerndetect.toml when present)
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Corpus manifest file
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Root directory for manifest-relative source paths (default: the
    /// manifest's directory)
    #[arg(long)]
    pub corpus_root: Option<PathBuf>,
    /// Detection strategy: direct | explain-then-ask
    #[arg(long)]
    pub strategy: Option<String>,
    /// Algorithms to query during bench (comma-separated: gemm,conv,fft)
    #[arg(long, value_delimiter = ',')]
    pub queries: Option<Vec<String>>,
    /// Network behavior: live | record | replay
    #[arg(long)]
    pub mode: Option<Mode>,
    /// Model identifier
    #[arg(long)]
    pub model: Option<String>,
    /// Sampling temperature
    #[arg(long)]
    pub temperature: Option<f64>,
    /// Nucleus sampling parameter
    #[arg(long)]
    pub top_p: Option<f64>,
    /// Output token limit per request
    #[arg(long)]
    pub max_tokens: Option<u32>,
    /// Model context window in tokens
    #[arg(long)]
    pub context_window: Option<u32>,
    /// Maximum in-flight model requests
    #[arg(long)]
    pub parallelism: Option<usize>,
    /// Response cache directory
    #[arg(long)]
    pub cache_dir: Option<PathBuf>,
    /// Output directory for run records and reports
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Chat-completions endpoint base URL
    #[arg(long)]
    pub base_url: Option<String>,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error("{0}")]
    Io(String),
    #[error("live and record modes need an API key; set KERNDETECT_API_KEY (or OPENAI_API_KEY)")]
    Credential,
    #[error("replay cache miss: {0}")]
    CacheMiss(String),
    #[error("{0}")]
    TokenBudget(String),
    #[error("{0}")]
    Remote(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Config(_) | CliError::Corpus(_) | CliError::Io(_) => 3,
            CliError::Credential => 4,
            CliError::CacheMiss(_) => 5,
            CliError::TokenBudget(_) => 6,
            CliError::Remote(_) => 7,
        }
    }
}

impl From<ClientError> for CliError {
    fn from(e: ClientError) -> Self {
        match e {
            ClientError::AuthMissing => CliError::Credential,
            ClientError::CacheMiss { key } => CliError::CacheMiss(key),
            ClientError::TokenBudgetExceeded { .. } => CliError::TokenBudget(e.to_string()),
            ClientError::Http { .. }
            | ClientError::Transport { .. }
            | ClientError::MalformedResponse(_) => CliError::Remote(e.to_string()),
            ClientError::Cache(inner) => CliError::Io(inner.to_string()),
        }
    }
}

impl From<StrategyError> for CliError {
    fn from(e: StrategyError) -> Self {
        match e {
            StrategyError::Client(inner) => inner.into(),
            StrategyError::Prompt(inner) => CliError::Remote(inner.to_string()),
        }
    }
}

/// Dispatch a parsed command line; returns the process exit code.
pub fn run(cli: Cli) -> i32 {
    let result = match cli.command {
        Command::Detect {
            file,
            algorithm,
            opts,
        } => cmd_detect(&file, &algorithm, &opts),
        Command::Bench { opts } => cmd_bench(&opts),
        Command::Cache { action } => match action {
            CacheAction::List { opts } => cmd_cache_list(&opts),
            CacheAction::Verify { opts } => cmd_cache_verify(&opts),
            CacheAction::Prune { opts } => cmd_cache_prune(&opts),
        },
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn resolve_config(opts: &CommonOpts) -> Result<RunConfig, CliError> {
    let file = match &opts.config {
        Some(path) => FileConfig::load(path)?,
        None => {
            let default = Path::new("kerndetect.toml");
            if default.is_file() {
                FileConfig::load(default)?
            } else {
                FileConfig::default()
            }
        }
    };
    let flags = Overrides {
        manifest: opts.manifest.clone(),
        corpus_root: opts.corpus_root.clone(),
        strategy: opts.strategy.clone(),
        queries: opts.queries.clone(),
        mode: opts.mode,
        model: opts.model.clone(),
        temperature: opts.temperature,
        top_p: opts.top_p,
        max_tokens: opts.max_tokens,
        context_window: opts.context_window,
        parallelism: opts.parallelism,
        cache_dir: opts.cache_dir.clone(),
        out_dir: opts.out_dir.clone(),
        base_url: opts.base_url.clone(),
    };
    Ok(RunConfig::resolve(&flags, &file)?)
}

fn lookup_strategy(
    registry: &StrategyRegistry,
    name: &str,
) -> Result<std::sync::Arc<dyn DetectionStrategy>, CliError> {
    registry.get(name).ok_or_else(|| {
        CliError::Usage(format!(
            "unknown strategy \"{name}\" (available: {})",
            registry.names().join(", ")
        ))
    })
}

/// Build the HTTP client for the configured mode, enforcing the mode's
/// preconditions: replay needs an existing cache directory, live and
/// record need a credential.
fn build_client(config: &RunConfig) -> Result<HttpChatClient, CliError> {
    let (cache, api_key) = match config.mode {
        Mode::Replay => {
            let cache = ResponseCache::open_existing(&config.cache_dir).map_err(|_| {
                CliError::Usage(format!(
                    "replay mode requires an existing cache directory ({} not found); \
                     record one first or pass --cache-dir",
                    config.cache_dir.display()
                ))
            })?;
            (Some(cache), HttpChatClient::api_key_from_env())
        }
        Mode::Record => {
            let cache =
                ResponseCache::open(&config.cache_dir).map_err(|e| CliError::Io(e.to_string()))?;
            let key = HttpChatClient::api_key_from_env().ok_or(CliError::Credential)?;
            (Some(cache), Some(key))
        }
        Mode::Live => {
            let key = HttpChatClient::api_key_from_env().ok_or(CliError::Credential)?;
            (None, Some(key))
        }
    };
    Ok(HttpChatClient::new(
        config.model.clone(),
        config.base_url.clone(),
        api_key,
        config.mode,
        cache,
        RetryPolicy::default(),
    ))
}

fn language_for(path: &Path) -> Language {
    match path.extension().and_then(|e| e.to_str()) {
        Some("c") | Some("h") => Language::C,
        _ => Language::Cpp,
    }
}

fn cmd_detect(file: &Path, algorithm: &str, opts: &CommonOpts) -> Result<i32, CliError> {
    let algorithm = Algorithm::from_key(algorithm)
        .ok_or_else(|| CliError::Usage(format!("unknown algorithm \"{algorithm}\" (gemm|conv|fft)")))?;
    let config = resolve_config(opts)?;
    let registry = StrategyRegistry::builtin();
    let strategy = lookup_strategy(&registry, &config.strategy)?;

    let text = std::fs::read_to_string(file)
        .map_err(|e| CliError::Io(format!("cannot read {}: {e}", file.display())))?;
    if text.is_empty() {
        return Err(CliError::Usage(format!("{} is empty", file.display())));
    }
    let unit = SourceUnit {
        id: file
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .unwrap_or_else(|| "unit".into()),
        path: file.to_path_buf(),
        language: language_for(file),
        token_estimate: crate::corpus::tokens::estimate_tokens(&text),
        text,
        suite: "adhoc".into(),
    };

    let client = build_client(&config)?;
    let query = AlgorithmQuery::new(algorithm);
    let overhead = strategy.overhead_tokens(&query, client.config());
    let budget = (config.model.context_window as usize)
        .saturating_sub(config.model.max_output_tokens as usize)
        .saturating_sub(overhead)
        .max(1);
    let reduced = reduce_tokens(&unit, budget);
    if reduced.over_budget {
        return Err(CliError::TokenBudget(format!(
            "{} needs ~{} tokens even after reduction; budget is {}",
            file.display(),
            reduced.unit.token_estimate,
            budget
        )));
    }

    let run = strategy.execute(&client, &query, &reduced.unit.text)?;
    let final_text = run.responses.last().map(|r| r.text.as_str()).unwrap_or("");
    let verdict = parse_verdict(final_text);
    match verdict.kind {
        VerdictKind::Positive => {
            println!("Positive: {}", verdict.functions.join(", "));
            Ok(0)
        }
        VerdictKind::Negative => {
            println!("Negative");
            Ok(1)
        }
        VerdictKind::Unparseable => {
            println!("Unparseable");
            eprintln!("raw output: {}", verdict.raw);
            Ok(2)
        }
    }
}

fn cmd_bench(opts: &CommonOpts) -> Result<i32, CliError> {
    let config = resolve_config(opts)?;
    let manifest = config
        .manifest
        .clone()
        .ok_or_else(|| CliError::Usage("bench requires --manifest".into()))?;
    let root = config
        .effective_corpus_root()
        .expect("manifest implies a corpus root");
    let corpus = Corpus::load(&manifest, &root)?;

    let registry = StrategyRegistry::builtin();
    let strategy = lookup_strategy(&registry, &config.strategy)?;
    let client = build_client(&config)?;

    let records = run_corpus(
        &corpus,
        &config.queries,
        strategy.as_ref(),
        &client,
        config.parallelism,
    );

    let manifest_data = RunManifest {
        strategy: strategy.name().to_string(),
        mode: config.mode.as_str().to_string(),
        config: config.model.clone(),
        queries: config.queries.clone(),
        corpus_hash: corpus_hash(&corpus),
        unit_count: corpus.len(),
        record_count: records.len(),
    };
    write_run(&config.out_dir, &manifest_data, &records)
        .map_err(|e| CliError::Io(e.to_string()))?;

    let scored = score_records(&records, &corpus, &config.queries)
        .map_err(|e| CliError::Io(e.to_string()))?;
    let report = build_report(manifest_data, &scored);
    emit_report(&config.out_dir, &report).map_err(|e| CliError::Io(e.to_string()))?;

    print_bench_summary(&report);
    println!(
        "reports: {}, {}",
        config.out_dir.join("report.json").display(),
        config.out_dir.join("report.txt").display()
    );
    Ok(if report.not_scored.is_empty() { 0 } else { 1 })
}

/// Stdout summary; every number comes from the report struct, so it always
/// agrees with the emitted files.
fn print_bench_summary(report: &Report) {
    println!(
        "strategy: {} | mode: {} | model: {}",
        report.run.strategy, report.run.mode, report.run.config.model_id
    );
    println!(
        "corpus: {} units, {} detections",
        report.run.unit_count, report.run.record_count
    );
    if report.queries.is_empty() {
        println!("no scored units");
    }
    for q in &report.queries {
        println!(
            "{}: tp {} ({:.1}%)  fn {} ({:.1}%)  fp {} ({:.1}%)  tn {} ({:.1}%)  accuracy {:.1}%",
            q.algorithm.label(),
            q.matrix.tp,
            q.percent.tp,
            q.matrix.fn_count,
            q.percent.fn_pct,
            q.matrix.fp,
            q.percent.fp,
            q.matrix.tn,
            q.percent.tn,
            q.accuracy_pct
        );
    }
    println!("{}", accuracy_line(report));
    println!("not scored: {}", report.not_scored.len());
}

fn open_cache(opts: &CommonOpts) -> Result<(RunConfig, ResponseCache), CliError> {
    let config = resolve_config(opts)?;
    let cache = ResponseCache::open_existing(&config.cache_dir).map_err(|_| {
        CliError::Usage(format!(
            "cache directory {} does not exist",
            config.cache_dir.display()
        ))
    })?;
    Ok((config, cache))
}

fn cmd_cache_list(opts: &CommonOpts) -> Result<i32, CliError> {
    let (_, cache) = open_cache(opts)?;
    let keys = cache.keys().map_err(|e| CliError::Io(e.to_string()))?;
    for key in &keys {
        println!("{key}");
    }
    println!("{} entries", keys.len());
    Ok(0)
}

fn cmd_cache_verify(opts: &CommonOpts) -> Result<i32, CliError> {
    let (_, cache) = open_cache(opts)?;
    let total = cache.keys().map_err(|e| CliError::Io(e.to_string()))?.len();
    let corrupt = cache.verify().map_err(|e| CliError::Io(e.to_string()))?;
    if corrupt.is_empty() {
        println!("ok, {total} entries");
        Ok(0)
    } else {
        for entry in &corrupt {
            println!("corrupt: {}: {}", entry.key, entry.reason);
        }
        println!("{} corrupt of {total} entries", corrupt.len());
        Ok(1)
    }
}

fn cmd_cache_prune(opts: &CommonOpts) -> Result<i32, CliError> {
    let (config, cache) = open_cache(opts)?;
    let manifest = config
        .manifest
        .clone()
        .ok_or_else(|| CliError::Usage("cache prune requires --manifest".into()))?;
    let root = config
        .effective_corpus_root()
        .expect("manifest implies a corpus root");
    let corpus = Corpus::load(&manifest, &root)?;
    let keep = reachable_keys(&corpus, &config, &cache)?;
    let (kept, removed) = cache
        .prune(&keep)
        .map_err(|e| CliError::Io(e.to_string()))?;
    println!("kept {kept}, removed {removed}");
    Ok(0)
}

/// Every cache key the configured pipeline could request for this corpus,
/// across all queries and both strategies. Two-turn follow-up keys depend
/// on the recorded explanation, so they are only reachable when the
/// explanation entry is present.
fn reachable_keys(
    corpus: &Corpus,
    config: &RunConfig,
    cache: &ResponseCache,
) -> Result<HashSet<String>, CliError> {
    let registry = StrategyRegistry::builtin();
    let mut keys = HashSet::new();
    for unit in corpus.units() {
        for algorithm in Algorithm::ALL {
            let query = AlgorithmQuery::new(algorithm);
            for name in registry.names() {
                let strategy = registry.get(name).expect("registered name resolves");
                let overhead = strategy.overhead_tokens(&query, &config.model);
                let budget = (config.model.context_window as usize)
                    .saturating_sub(config.model.max_output_tokens as usize)
                    .saturating_sub(overhead)
                    .max(1);
                let reduced = reduce_tokens(unit, budget);
                if reduced.over_budget {
                    continue;
                }
                let code = &reduced.unit.text;
                match name {
                    "direct" => {
                        let transcript = crate::prompt::render_direct(&query, code);
                        keys.insert(CacheRequest::new(&config.model, &transcript).key());
                    }
                    "explain-then-ask" => {
                        let explain = render_explain(code);
                        let explain_key = CacheRequest::new(&config.model, &explain).key();
                        let explanation = cache
                            .get(&explain_key)
                            .map_err(|e| CliError::Io(e.to_string()))?;
                        keys.insert(explain_key);
                        if let Some(entry) = explanation {
                            if let Ok(followup) =
                                render_followup(&query, &explain, &entry.response.text)
                            {
                                keys.insert(CacheRequest::new(&config.model, &followup).key());
                            }
                        }
                    }
                    _ => {}
                }
            }
        }
    }
    Ok(keys)
}
