//! Batch command-line driver: decode a corpus, analyze decoded runs, and
//! sweep beam sizes against exact search.

use std::collections::{BTreeSet, HashSet};
use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Duration;

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::analysis::{
    aggregate_report, classify_search_errors, corpus_bleu, histogram_csv, length_ratio_histogram, Decoded,
    Denominator, SentenceRecord,
};
use crate::model::{load_model, AnyModel, SequenceModel};
use crate::search::{
    beam_search, brute_force, exact_search, exact_search_constrained, exact_search_per_length,
    optimize_length_objective, LengthConstraint, LengthObjective, SearchConfig,
};
use crate::types::{BoundInit, SearchFlag, SearchOutcome, SearchStats};

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage error: {0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

fn data_err(context: impl std::fmt::Display, err: impl std::fmt::Display) -> CliError {
    CliError::Data(format!("{context}: {err}"))
}

/// One line of an input corpus.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorpusLine {
    pub id: String,
    pub source: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<String>,
}

impl CorpusLine {
    pub fn source_tokens(&self) -> Vec<String> {
        self.source.split_whitespace().map(String::from).collect()
    }

    pub fn reference_tokens(&self) -> Option<Vec<String>> {
        self.reference
            .as_ref()
            .map(|r| r.split_whitespace().map(String::from).collect())
    }
}

/// One line of decode output. Failed sentences carry `error` and no
/// hypothesis.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecodeLine {
    pub id: String,
    pub search: String,
    pub hypothesis: Option<Vec<String>>,
    pub score: Option<f64>,
    pub exact: bool,
    pub flags: BTreeSet<SearchFlag>,
    pub stats: Option<SearchStats>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<String>,
}

impl DecodeLine {
    fn into_result(self) -> Result<Decoded, String> {
        match (self.error, self.hypothesis, self.score) {
            (Some(e), _, _) => Err(e),
            (None, Some(tokens), Some(score)) => Ok(Decoded {
                tokens,
                score,
                exact: self.exact,
                flags: self.flags,
                stats: self.stats.unwrap_or_default(),
            }),
            _ => Err("decode line has neither a hypothesis nor an error".into()),
        }
    }
}

/// Target length for fixed-length exact search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum FixedLen {
    /// Length of the beam hypothesis.
    Beam,
    /// Length of the reference.
    Reference,
    Absolute(usize),
}

impl FromStr for FixedLen {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        match s {
            "beam" => Ok(FixedLen::Beam),
            "ref" => Ok(FixedLen::Reference),
            n => n
                .parse()
                .map(FixedLen::Absolute)
                .map_err(|_| CliError::Usage(format!("fixed length must be beam, ref or an integer, got {n:?}"))),
        }
    }
}

/// Parsed `--search` value.
#[derive(Debug, Clone, PartialEq)]
pub enum SearchSpec {
    Greedy,
    Beam(usize),
    Exact(Option<usize>),
    ExactMinLen(Option<f64>),
    ExactFixedLen(Option<FixedLen>),
    ExactLenNorm,
    Brute(usize),
}

impl FromStr for SearchSpec {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self, CliError> {
        let usage = |msg: &str| CliError::Usage(format!("bad search {s:?}: {msg}"));
        let positive = |v: &str| -> Result<usize, CliError> {
            match v.parse::<usize>() {
                Ok(n) if n >= 1 => Ok(n),
                _ => Err(usage("beam size must be a positive integer")),
            }
        };
        let (kind, arg) = match s.split_once(':') {
            Some((k, a)) => (k, Some(a)),
            None => (s, None),
        };
        match (kind, arg) {
            ("greedy", None) => Ok(SearchSpec::Greedy),
            ("beam", Some(n)) => positive(n).map(SearchSpec::Beam),
            ("exact", None) => Ok(SearchSpec::Exact(None)),
            ("exact", Some(n)) => positive(n).map(|n| SearchSpec::Exact(Some(n))),
            ("exact-minlen", None) => Ok(SearchSpec::ExactMinLen(None)),
            ("exact-minlen", Some(r)) => match r.parse::<f64>() {
                Ok(r) if r > 0.0 && r.is_finite() => Ok(SearchSpec::ExactMinLen(Some(r))),
                _ => Err(usage("ratio must be a positive number")),
            },
            ("exact-fixedlen", None) => Ok(SearchSpec::ExactFixedLen(None)),
            ("exact-fixedlen", Some(l)) => l.parse().map(|l| SearchSpec::ExactFixedLen(Some(l))),
            ("exact-lennorm", None) => Ok(SearchSpec::ExactLenNorm),
            ("brute", Some(l)) => l
                .parse()
                .map(SearchSpec::Brute)
                .map_err(|_| usage("length must be a non-negative integer")),
            _ => Err(usage(
                "expected greedy | beam:N | exact[:N] | exact-minlen[:R] | exact-fixedlen[:beam|ref|L] | exact-lennorm | brute:L",
            )),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "exactsearch", version, about = "Beam and exact decoding with search-error analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Decode every corpus line and write one JSON line per sentence.
    Decode(DecodeArgs),
    /// Compare decoded runs and write a report with histogram CSVs.
    Analyze(AnalyzeArgs),
    /// Run exact search once and beam search per size; write a CSV.
    Sweep(SweepArgs),
}

#[derive(Debug, Clone, Args)]
pub struct SearchOptions {
    /// Beam size for the beam phase of exact searches.
    #[arg(long, default_value_t = 10)]
    pub beam_size: usize,
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    /// Length cap as a multiple of the source length.
    #[arg(long)]
    pub max_len_factor: Option<f64>,
    /// Per-sentence time budget.
    #[arg(long)]
    pub timeout_secs: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct DecodeArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub search: String,
    #[command(flatten)]
    pub options: SearchOptions,
    /// Ratio for `exact-minlen` when the search string carries none.
    #[arg(long, default_value_t = 0.25)]
    pub min_len_ratio: f64,
    /// Target for `exact-fixedlen` when the search string carries none: beam, ref or L.
    #[arg(long, default_value = "beam")]
    pub fixed_len: String,
    /// Include wall-clock seconds in the statistics (breaks byte-identical reruns).
    #[arg(long)]
    pub timings: bool,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    /// Decode outputs, one per run.
    #[arg(long, required = true, num_args = 1..)]
    pub decoded: Vec<PathBuf>,
    /// Comma-separated labels, one per decoded file.
    #[arg(long, value_delimiter = ',')]
    pub labels: Vec<String>,
    /// Run treated as the global optimum; defaults to a run labeled `exact`.
    #[arg(long)]
    pub reference_label: Option<String>,
    #[arg(long, default_value_t = 1e-6)]
    pub epsilon: f64,
    /// Width of the source-length buckets.
    #[arg(long, default_value_t = 10)]
    pub bucket_width: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct SweepArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    /// Comma-separated beam sizes.
    #[arg(long, value_delimiter = ',', required = true)]
    pub beam_sizes: Vec<usize>,
    #[command(flatten)]
    pub options: SearchOptions,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses arguments, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 1 } else { 0 };
        }
    };
    let result = match &cli.command {
        Command::Decode(a) => cmd_decode(a),
        Command::Analyze(a) => cmd_analyze(a),
        Command::Sweep(a) => cmd_sweep(a),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

pub fn read_corpus(path: &Path) -> Result<Vec<CorpusLine>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| data_err(path.display(), e))?;
    let mut seen = HashSet::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        if raw.trim().is_empty() {
            continue;
        }
        let line: CorpusLine =
            serde_json::from_str(raw).map_err(|e| data_err(format!("{}:{}", path.display(), i + 1), e))?;
        if !seen.insert(line.id.clone()) {
            return Err(data_err(path.display(), format!("duplicate id {:?}", line.id)));
        }
        lines.push(line);
    }
    Ok(lines)
}

pub fn write_corpus(path: &Path, lines: &[CorpusLine]) -> std::io::Result<()> {
    let mut out = String::new();
    for l in lines {
        out.push_str(&serde_json::to_string(l).expect("corpus lines serialize"));
        out.push('\n');
    }
    fs::write(path, out)
}

fn read_decode_lines(path: &Path) -> Result<Vec<DecodeLine>, CliError> {
    let text = fs::read_to_string(path).map_err(|e| data_err(path.display(), e))?;
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| serde_json::from_str(l).map_err(|e| data_err(format!("{}:{}", path.display(), i + 1), e)))
        .collect()
}

impl SearchOptions {
    fn validate(&self) -> Result<(), CliError> {
        if self.beam_size == 0 {
            return Err(CliError::Usage("--beam-size must be at least 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(CliError::Usage("--epsilon must be positive".into()));
        }
        if self.max_len_factor.is_some_and(|f| !(f > 0.0) || !f.is_finite()) {
            return Err(CliError::Usage("--max-len-factor must be positive".into()));
        }
        if self.timeout_secs.is_some_and(|t| !(t >= 0.0) || !t.is_finite()) {
            return Err(CliError::Usage("--timeout-secs must be non-negative".into()));
        }
        Ok(())
    }

    fn config(&self, beam_size: usize, source_len: usize) -> SearchConfig {
        SearchConfig {
            beam_size,
            max_len_cap: self
                .max_len_factor
                .map(|f| ((f * source_len as f64).floor() as usize).max(1)),
            timeout: self.timeout_secs.map(Duration::from_secs_f64),
            epsilon: self.epsilon,
            ..SearchConfig::default()
        }
    }
}

struct Decoder<'a> {
    model: &'a AnyModel,
    spec: SearchSpec,
    options: &'a SearchOptions,
    min_len_ratio: f64,
    fixed_len: FixedLen,
}

impl Decoder<'_> {
    fn decode(&self, line: &CorpusLine) -> Result<SearchOutcome, String> {
        let source = line.source_tokens();
        let base = self.options.beam_size;
        let cfg = |n| self.options.config(n, source.len());
        let model = self.model;
        let outcome = match self.spec {
            SearchSpec::Greedy => beam_search(model, &source, &cfg(1)),
            SearchSpec::Beam(n) => beam_search(model, &source, &cfg(n)),
            SearchSpec::Exact(n) => exact_search(model, &source, &cfg(n.unwrap_or(base))),
            SearchSpec::ExactMinLen(r) => {
                let constraint = LengthConstraint::MinRatio(r.unwrap_or(self.min_len_ratio));
                let beam = beam_search(model, &source, &cfg(base)).map_err(|e| e.to_string())?;
                let incumbent = (beam.best.is_complete() && constraint.admits(beam.best.len(), source.len()))
                    .then_some(&beam.best);
                exact_search_constrained(model, &source, &cfg(base), constraint, incumbent)
            }
            SearchSpec::ExactFixedLen(which) => {
                let (len, incumbent) = match which.unwrap_or(self.fixed_len) {
                    FixedLen::Beam => {
                        let beam = beam_search(model, &source, &cfg(base)).map_err(|e| e.to_string())?;
                        if !beam.best.is_complete() {
                            return Err("beam search found no complete hypothesis".into());
                        }
                        (beam.best.len(), Some(beam.best))
                    }
                    FixedLen::Reference => {
                        let reference = line
                            .reference_tokens()
                            .ok_or_else(|| "exact-fixedlen:ref needs a reference".to_string())?;
                        (reference.len(), None)
                    }
                    FixedLen::Absolute(l) => (l, None),
                };
                exact_search_constrained(model, &source, &cfg(base), LengthConstraint::Exact(len), incumbent.as_ref())
            }
            SearchSpec::ExactLenNorm => exact_search_per_length(model, &source, &cfg(base), None, BoundInit::BeamDerived)
                .and_then(|per| {
                    let best = optimize_length_objective(&per.table, &per.beam, LengthObjective::LengthNorm)?;
                    let mut outcome = SearchOutcome::certified(best, per.flags, per.stats);
                    outcome.exact = per.exact;
                    Ok(outcome)
                }),
            SearchSpec::Brute(max_len) => brute_force(model, &source, max_len).and_then(|all| {
                all.into_iter()
                    .next()
                    .map(|best| SearchOutcome::certified(best, BTreeSet::new(), SearchStats::default()))
                    .ok_or(crate::search::SearchError::NoFeasibleHypothesis)
            }),
        };
        outcome.map_err(|e| e.to_string())
    }
}

fn to_decode_line(
    line: &CorpusLine,
    search: &str,
    result: Result<SearchOutcome, String>,
    vocab: &crate::types::Vocabulary,
    timings: bool,
) -> DecodeLine {
    match result {
        Ok(outcome) => {
            let mut stats = outcome.stats.clone();
            if !timings {
                stats.wall_time = None;
            }
            DecodeLine {
                id: line.id.clone(),
                search: search.to_string(),
                hypothesis: Some(vocab.render(&outcome.best.seq)),
                score: Some(outcome.best.score),
                exact: outcome.exact,
                flags: outcome.flags,
                stats: Some(stats),
                error: None,
            }
        }
        Err(error) => DecodeLine {
            id: line.id.clone(),
            search: search.to_string(),
            hypothesis: None,
            score: None,
            exact: false,
            flags: BTreeSet::new(),
            stats: None,
            error: Some(error),
        },
    }
}

/// Decodes the corpus; sentence-level failures become error lines.
pub fn decode_corpus(
    model: &AnyModel,
    corpus: &[CorpusLine],
    search: &str,
    options: &SearchOptions,
    min_len_ratio: f64,
    fixed_len: &str,
    timings: bool,
) -> Result<Vec<DecodeLine>, CliError> {
    options.validate()?;
    let spec: SearchSpec = search.parse()?;
    if !(min_len_ratio > 0.0) {
        return Err(CliError::Usage("--min-len-ratio must be positive".into()));
    }
    let decoder = Decoder { model, spec, options, min_len_ratio, fixed_len: fixed_len.parse()? };
    let vocab = model.target_vocab();
    Ok(corpus
        .par_iter()
        .map(|line| to_decode_line(line, search, decoder.decode(line), vocab, timings))
        .collect())
}

fn jsonl<T: Serialize>(items: &[T]) -> String {
    let mut out = String::new();
    for item in items {
        out.push_str(&serde_json::to_string(item).expect("output lines serialize"));
        out.push('\n');
    }
    out
}

fn write_file(path: &Path, contents: &str) -> Result<(), CliError> {
    fs::write(path, contents).map_err(|e| data_err(path.display(), e))
}

pub fn cmd_decode(args: &DecodeArgs) -> Result<(), CliError> {
    args.options.validate()?;
    let spec_check: SearchSpec = args.search.parse()?;
    drop(spec_check);
    let model = load_model(&args.model).map_err(|e| data_err(args.model.display(), e))?;
    let corpus = read_corpus(&args.corpus)?;
    let lines = decode_corpus(
        &model,
        &corpus,
        &args.search,
        &args.options,
        args.min_len_ratio,
        &args.fixed_len,
        args.timings,
    )?;
    write_file(&args.out, &jsonl(&lines))
}

/// Joins decode outputs with the corpus. Outputs must list the corpus ids
/// in corpus order.
pub fn build_records(
    corpus: &[CorpusLine],
    runs: &[(String, Vec<DecodeLine>)],
) -> Result<Vec<SentenceRecord>, CliError> {
    let mut records: Vec<SentenceRecord> = corpus
        .iter()
        .map(|l| SentenceRecord {
            id: l.id.clone(),
            source: l.source_tokens(),
            reference: l.reference_tokens(),
            decoded: Default::default(),
        })
        .collect();
    for (label, lines) in runs {
        if lines.len() != corpus.len() {
            return Err(CliError::Data(format!(
                "ID_MISMATCH: run {label:?} has {} lines for {} corpus sentences",
                lines.len(),
                corpus.len()
            )));
        }
        for (record, line) in records.iter_mut().zip(lines) {
            if record.id != line.id {
                return Err(CliError::Data(format!(
                    "ID_MISMATCH: run {label:?} has id {:?} where the corpus has {:?}",
                    line.id, record.id
                )));
            }
            record.decoded.insert(label.clone(), line.clone().into_result());
        }
    }
    Ok(records)
}

fn sanitize(label: &str) -> String {
    label
        .chars()
        .map(|c| if c.is_ascii_alphanumeric() || c == '-' || c == '_' || c == '.' { c } else { '_' })
        .collect()
}

fn default_reference(labels: &[String]) -> Option<String> {
    labels
        .iter()
        .find(|l| *l == "exact" || l.starts_with("exact:"))
        .cloned()
}

pub fn cmd_analyze(args: &AnalyzeArgs) -> Result<(), CliError> {
    if !(args.epsilon > 0.0) {
        return Err(CliError::Usage("--epsilon must be positive".into()));
    }
    if args.bucket_width == 0 {
        return Err(CliError::Usage("--bucket-width must be at least 1".into()));
    }
    if !args.labels.is_empty() && args.labels.len() != args.decoded.len() {
        return Err(CliError::Usage(format!(
            "{} labels for {} decoded files",
            args.labels.len(),
            args.decoded.len()
        )));
    }
    let corpus = read_corpus(&args.corpus)?;
    let mut runs = Vec::new();
    for (i, path) in args.decoded.iter().enumerate() {
        let lines = read_decode_lines(path)?;
        let label = match args.labels.get(i) {
            Some(l) => l.clone(),
            None => lines
                .first()
                .map(|l| l.search.clone())
                .unwrap_or_else(|| path.display().to_string()),
        };
        if runs.iter().any(|(l, _): &(String, _)| *l == label) {
            return Err(CliError::Usage(format!("duplicate run label {label:?}")));
        }
        runs.push((label, lines));
    }
    let labels: Vec<String> = runs.iter().map(|(l, _)| l.clone()).collect();
    let reference = args.reference_label.clone().or_else(|| default_reference(&labels));
    if let Some(r) = &reference {
        if !labels.contains(r) {
            return Err(CliError::Data(format!("MISSING_RUN: reference run {r:?} was not supplied")));
        }
    }
    let records = build_records(&corpus, &runs)?;
    let report = aggregate_report(&records, &labels, reference.as_deref(), args.epsilon, args.bucket_width)
        .map_err(|e| CliError::Data(e.to_string()))?;

    write_file(&args.out, &(report.to_json() + "\n"))?;
    let stem = args.out.with_extension("");
    for run in &report.runs {
        for (name, hist) in [("source", &run.histogram_source), ("reference", &run.histogram_reference)] {
            let path = PathBuf::from(format!("{}.{}.{}.csv", stem.display(), sanitize(&run.label), name));
            write_file(&path, &histogram_csv(hist))?;
        }
    }
    Ok(())
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

/// Rows of `n,search_error_pct,length_ratio_source,length_ratio_reference,bleu,mean_expansions`.
pub fn sweep(
    model: &AnyModel,
    corpus: &[CorpusLine],
    beam_sizes: &[usize],
    options: &SearchOptions,
) -> Result<String, CliError> {
    options.validate()?;
    if beam_sizes.is_empty() {
        return Err(CliError::Usage("--beam-sizes needs at least one size".into()));
    }
    if beam_sizes.contains(&0) {
        return Err(CliError::Usage("beam sizes must be positive".into()));
    }
    if corpus.is_empty() {
        return Err(CliError::Data("EMPTY_CORPUS: nothing to sweep".into()));
    }
    let sizes: BTreeSet<usize> = beam_sizes.iter().copied().collect();

    let mut runs = vec![(
        "exact".to_string(),
        decode_corpus(model, corpus, "exact", options, 0.25, "beam", false)?,
    )];
    for &n in &sizes {
        let label = format!("beam:{n}");
        runs.push((label.clone(), decode_corpus(model, corpus, &label, options, 0.25, "beam", false)?));
    }
    let records = build_records(corpus, &runs)?;
    let analysis = |e: crate::analysis::AnalysisError| CliError::Data(e.to_string());

    let mut csv = String::from("n,search_error_pct,length_ratio_source,length_ratio_reference,bleu,mean_expansions\n");
    for (&n, (label, lines)) in sizes.iter().zip(&runs[1..]) {
        let errors = classify_search_errors(&records, label, "exact", options.epsilon).map_err(analysis)?;
        let src = length_ratio_histogram(&records, label, Denominator::Source).map_err(analysis)?;
        let reference = length_ratio_histogram(&records, label, Denominator::Reference).map_err(analysis)?;
        let ok: Vec<(&SentenceRecord, Decoded)> = records
            .iter()
            .filter_map(|r| r.decoded[label].clone().ok().map(|d| (r, d)))
            .collect();
        let bleu = if !ok.is_empty() && ok.iter().all(|(r, _)| r.reference.is_some()) {
            let hyps: Vec<Vec<String>> = ok.iter().map(|(_, d)| d.content().to_vec()).collect();
            let refs: Vec<Vec<String>> = ok.iter().filter_map(|(r, _)| r.reference.clone()).collect();
            Some(corpus_bleu(&hyps, &refs, 4).map_err(analysis)?)
        } else {
            None
        };
        let expansions: Vec<u64> = lines.iter().filter_map(|l| l.stats.as_ref().map(|s| s.expansions)).collect();
        let mean_expansions = expansions.iter().sum::<u64>() as f64 / expansions.len().max(1) as f64;
        writeln!(
            csv,
            "{n},{},{},{},{},{}",
            errors.pct,
            fmt_opt(src.aggregate_ratio),
            fmt_opt(reference.aggregate_ratio),
            fmt_opt(bleu),
            mean_expansions
        )
        .expect("writing to a String");
    }
    Ok(csv)
}

pub fn cmd_sweep(args: &SweepArgs) -> Result<(), CliError> {
    args.options.validate()?;
    if args.beam_sizes.is_empty() || args.beam_sizes.contains(&0) {
        return Err(CliError::Usage("--beam-sizes must list positive sizes".into()));
    }
    let model = load_model(&args.model).map_err(|e| data_err(args.model.display(), e))?;
    let corpus = read_corpus(&args.corpus)?;
    let csv = sweep(&model, &corpus, &args.beam_sizes, &args.options)?;
    write_file(&args.out, &csv)
}
