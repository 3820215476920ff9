//! Corpus-level measurements over decoded runs: search errors, empty
//! translations, length ratios and BLEU.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::types::{SearchFlag, SearchOutcome, SearchStats, Vocabulary, EOS_TOKEN};

mod bleu;
mod report;

pub use bleu::corpus_bleu;
pub use report::{aggregate_report, histogram_csv, Report, RunReport, StatsAggregate};

#[derive(Debug, Error, PartialEq)]
pub enum AnalysisError {
    #[error("run {label:?} is missing for sentence {id:?}")]
    MissingRun { label: String, id: String },
    #[error("reference run {0:?} is not exact on any counted sentence")]
    NonExactReference(String),
    #[error("{hypotheses} hypotheses but {references} references")]
    LengthMismatch { hypotheses: usize, references: usize },
    #[error("nothing to analyze")]
    EmptyCorpus,
}

/// One decoded hypothesis as stored in run outputs.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Decoded {
    /// Target tokens including the trailing `</s>` when complete.
    pub tokens: Vec<String>,
    pub score: f64,
    pub exact: bool,
    pub flags: BTreeSet<SearchFlag>,
    pub stats: SearchStats,
}

impl Decoded {
    pub fn from_outcome(outcome: &SearchOutcome, vocab: &Vocabulary) -> Self {
        Self {
            tokens: vocab.render(&outcome.best.seq),
            score: outcome.best.score,
            exact: outcome.exact,
            flags: outcome.flags.clone(),
            stats: outcome.stats.clone(),
        }
    }

    /// Hypothesis length without the trailing `</s>`.
    pub fn len(&self) -> usize {
        self.content().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn is_empty_translation(&self) -> bool {
        self.tokens.len() == 1 && self.tokens[0] == EOS_TOKEN
    }

    pub fn content(&self) -> &[String] {
        match self.tokens.split_last() {
            Some((last, rest)) if last == EOS_TOKEN => rest,
            _ => &self.tokens,
        }
    }
}

/// A corpus sentence with the runs decoded for it. A failed run keeps its
/// error message.
#[derive(Debug, Clone, PartialEq)]
pub struct SentenceRecord {
    pub id: String,
    pub source: Vec<String>,
    pub reference: Option<Vec<String>>,
    pub decoded: BTreeMap<String, Result<Decoded, String>>,
}

impl SentenceRecord {
    fn run(&self, label: &str) -> Result<Option<&Decoded>, AnalysisError> {
        match self.decoded.get(label) {
            None => Err(AnalysisError::MissingRun { label: label.into(), id: self.id.clone() }),
            Some(Ok(d)) => Ok(Some(d)),
            Some(Err(_)) => Ok(None),
        }
    }
}

fn pct(part: usize, whole: usize) -> f64 {
    if whole == 0 {
        0.0
    } else {
        100.0 * part as f64 / whole as f64
    }
}

fn require_runs(records: &[SentenceRecord], label: &str) -> Result<(), AnalysisError> {
    if records.is_empty() {
        return Err(AnalysisError::EmptyCorpus);
    }
    records.iter().try_for_each(|r| r.run(label).map(|_| ()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SearchErrorSummary {
    /// `None` for sentences left out of the count.
    pub per_sentence: Vec<Option<bool>>,
    pub errors: usize,
    pub counted: usize,
    /// Sentences where either run failed or the reference run is inexact.
    pub excluded: usize,
    pub pct: f64,
}

/// A sentence is a search error when the reference run scores more than
/// `epsilon` above the approximate run.
pub fn classify_search_errors(
    records: &[SentenceRecord],
    approx_label: &str,
    exact_label: &str,
    epsilon: f64,
) -> Result<SearchErrorSummary, AnalysisError> {
    require_runs(records, approx_label)?;
    require_runs(records, exact_label)?;
    let mut per_sentence = Vec::with_capacity(records.len());
    for r in records {
        let verdict = match (r.run(approx_label)?, r.run(exact_label)?) {
            (Some(approx), Some(exact)) if exact.exact => Some(exact.score - approx.score > epsilon),
            _ => None,
        };
        per_sentence.push(verdict);
    }
    let counted = per_sentence.iter().flatten().count();
    let errors = per_sentence.iter().flatten().filter(|e| **e).count();
    if counted == 0 {
        return Err(AnalysisError::NonExactReference(exact_label.into()));
    }
    Ok(SearchErrorSummary { errors, counted, excluded: records.len() - counted, pct: pct(errors, counted), per_sentence })
}

/// Percentage of successfully decoded sentences whose hypothesis is the
/// empty translation.
pub fn empty_rate(records: &[SentenceRecord], label: &str) -> Result<f64, AnalysisError> {
    require_runs(records, label)?;
    let mut decoded = 0;
    let mut empty = 0;
    for r in records {
        if let Some(d) = r.run(label)? {
            decoded += 1;
            empty += usize::from(d.is_empty_translation());
        }
    }
    Ok(pct(empty, decoded))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Denominator {
    Source,
    Reference,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Bucket {
    pub low: f64,
    /// `None` for the open-ended overflow bucket.
    pub high: Option<f64>,
    pub count: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RatioHistogram {
    pub denominator: Denominator,
    pub buckets: Vec<Bucket>,
    /// Total hypothesis length over total denominator length.
    pub aggregate_ratio: Option<f64>,
    pub included: usize,
    /// Failed decodes and sentences with an empty or missing denominator.
    pub excluded: usize,
}

/// Number of ratio buckets: `[0, 0.1]`, twenty `(i/10, (i+1)/10]` up to
/// 2.0, then `(2.0, inf)`.
pub const RATIO_BUCKETS: usize = 21;

/// Bucket index for the ratio `hyp / denom`, computed in integers so that
/// boundary ratios land in the closed upper end.
pub fn ratio_bucket(hyp: usize, denom: usize) -> usize {
    if hyp > 2 * denom {
        return RATIO_BUCKETS - 1;
    }
    (10 * hyp).div_ceil(denom).saturating_sub(1)
}

fn bucket_bounds(i: usize) -> (f64, Option<f64>) {
    match i {
        0 => (0.0, Some(0.1)),
        i if i == RATIO_BUCKETS - 1 => (2.0, None),
        i => (i as f64 / 10.0, Some((i + 1) as f64 / 10.0)),
    }
}

pub fn length_ratio_histogram(
    records: &[SentenceRecord],
    label: &str,
    denominator: Denominator,
) -> Result<RatioHistogram, AnalysisError> {
    require_runs(records, label)?;
    let mut counts = [0usize; RATIO_BUCKETS];
    let (mut hyp_total, mut denom_total, mut included) = (0usize, 0usize, 0usize);
    for r in records {
        let Some(d) = r.run(label)? else { continue };
        let denom = match denominator {
            Denominator::Source => Some(r.source.len()),
            Denominator::Reference => r.reference.as_ref().map(Vec::len),
        };
        let Some(denom) = denom.filter(|&n| n > 0) else { continue };
        counts[ratio_bucket(d.len(), denom)] += 1;
        hyp_total += d.len();
        denom_total += denom;
        included += 1;
    }
    let buckets = counts
        .iter()
        .enumerate()
        .map(|(i, &count)| {
            let (low, high) = bucket_bounds(i);
            Bucket { low, high, count }
        })
        .collect();
    Ok(RatioHistogram {
        denominator,
        buckets,
        aggregate_ratio: (denom_total > 0).then(|| hyp_total as f64 / denom_total as f64),
        included,
        excluded: records.len() - included,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BreakdownRow {
    /// Inclusive source-length range.
    pub low: usize,
    pub high: usize,
    pub sentences: usize,
    pub search_error_pct: f64,
    pub empty_pct: f64,
}

/// Search-error and empty-optimum rates per source-length bucket
/// `[1, w], [w + 1, 2w], ...`. Buckets without counted sentences are
/// omitted.
pub fn source_length_breakdown(
    records: &[SentenceRecord],
    approx_label: &str,
    exact_label: &str,
    bucket_width: usize,
    epsilon: f64,
) -> Result<Vec<BreakdownRow>, AnalysisError> {
    let width = bucket_width.max(1);
    let summary = classify_search_errors(records, approx_label, exact_label, epsilon)?;
    // bucket -> (sentences, errors, empties)
    let mut buckets: BTreeMap<usize, (usize, usize, usize)> = BTreeMap::new();
    for (r, verdict) in records.iter().zip(&summary.per_sentence) {
        let (Some(is_error), false) = (verdict, r.source.is_empty()) else { continue };
        let exact = r.run(exact_label)?.expect("counted sentences have an exact run");
        let entry = buckets.entry((r.source.len() - 1) / width).or_default();
        entry.0 += 1;
        entry.1 += usize::from(*is_error);
        entry.2 += usize::from(exact.is_empty_translation());
    }
    Ok(buckets
        .into_iter()
        .map(|(b, (n, errors, empties))| BreakdownRow {
            low: b * width + 1,
            high: (b + 1) * width,
            sentences: n,
            search_error_pct: pct(errors, n),
            empty_pct: pct(empties, n),
        })
        .collect())
}
