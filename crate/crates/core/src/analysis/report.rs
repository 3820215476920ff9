use std::fmt::Write as _;

use serde::Serialize;

use super::{
    classify_search_errors, corpus_bleu, empty_rate, length_ratio_histogram, source_length_breakdown,
    AnalysisError, BreakdownRow, Denominator, RatioHistogram, SentenceRecord,
};
use crate::types::SearchFlag;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsAggregate {
    pub exact_sentences: usize,
    pub cap_hits: usize,
    pub timeouts: usize,
    pub fallbacks: usize,
    pub mean_expansions: f64,
    pub mean_evaluations: f64,
    pub mean_gamma_updates: f64,
    pub max_depth: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunReport {
    pub label: String,
    pub decoded: usize,
    pub failed: usize,
    /// `None` when some decoded sentence has no reference.
    pub bleu: Option<f64>,
    pub length_ratio_source: Option<f64>,
    pub length_ratio_reference: Option<f64>,
    pub search_error_pct: Option<f64>,
    pub search_errors: Option<usize>,
    /// Sentences left out of the search-error count.
    pub search_error_excluded: Option<usize>,
    pub empty_pct: f64,
    pub histogram_source: RatioHistogram,
    pub histogram_reference: RatioHistogram,
    pub source_length_breakdown: Option<Vec<BreakdownRow>>,
    pub stats: StatsAggregate,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Report {
    pub sentences: usize,
    /// Run whose scores define the global optimum for search errors.
    pub reference_label: Option<String>,
    pub epsilon: f64,
    pub runs: Vec<RunReport>,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

/// Builds a report with one section per label. Search-error columns are
/// filled when `reference_label` names the exact run.
pub fn aggregate_report(
    records: &[SentenceRecord],
    labels: &[String],
    reference_label: Option<&str>,
    epsilon: f64,
    bucket_width: usize,
) -> Result<Report, AnalysisError> {
    if labels.is_empty() || records.is_empty() {
        return Err(AnalysisError::EmptyCorpus);
    }
    let runs = labels
        .iter()
        .map(|label| run_report(records, label, reference_label, epsilon, bucket_width))
        .collect::<Result<_, _>>()?;
    Ok(Report {
        sentences: records.len(),
        reference_label: reference_label.map(String::from),
        epsilon,
        runs,
    })
}

fn run_report(
    records: &[SentenceRecord],
    label: &str,
    reference_label: Option<&str>,
    epsilon: f64,
    bucket_width: usize,
) -> Result<RunReport, AnalysisError> {
    let mut ok = Vec::new();
    for r in records {
        if let Some(d) = r.run(label)? {
            ok.push((r, d));
        }
    }

    let bleu = if !ok.is_empty() && ok.iter().all(|(r, _)| r.reference.is_some()) {
        let hyps: Vec<Vec<String>> = ok.iter().map(|(_, d)| d.content().to_vec()).collect();
        let refs: Vec<Vec<String>> = ok.iter().filter_map(|(r, _)| r.reference.clone()).collect();
        Some(corpus_bleu(&hyps, &refs, 4)?)
    } else {
        None
    };

    let (errors, breakdown) = match reference_label {
        Some(reference) => (
            Some(classify_search_errors(records, label, reference, epsilon)?),
            Some(source_length_breakdown(records, label, reference, bucket_width, epsilon)?),
        ),
        None => (None, None),
    };

    let histogram_source = length_ratio_histogram(records, label, Denominator::Source)?;
    let histogram_reference = length_ratio_histogram(records, label, Denominator::Reference)?;
    let n = ok.len().max(1) as f64;
    let stats = StatsAggregate {
        exact_sentences: ok.iter().filter(|(_, d)| d.exact).count(),
        cap_hits: ok.iter().filter(|(_, d)| d.flags.contains(&SearchFlag::CapHit)).count(),
        timeouts: ok.iter().filter(|(_, d)| d.flags.contains(&SearchFlag::Timeout)).count(),
        fallbacks: ok.iter().filter(|(_, d)| d.flags.contains(&SearchFlag::FallbackToIncumbent)).count(),
        mean_expansions: ok.iter().map(|(_, d)| d.stats.expansions as f64).sum::<f64>() / n,
        mean_evaluations: ok.iter().map(|(_, d)| d.stats.evaluations as f64).sum::<f64>() / n,
        mean_gamma_updates: ok.iter().map(|(_, d)| d.stats.gamma_updates as f64).sum::<f64>() / n,
        max_depth: ok.iter().map(|(_, d)| d.stats.max_depth).max().unwrap_or(0),
    };

    Ok(RunReport {
        label: label.to_string(),
        decoded: ok.len(),
        failed: records.len() - ok.len(),
        bleu,
        length_ratio_source: histogram_source.aggregate_ratio,
        length_ratio_reference: histogram_reference.aggregate_ratio,
        search_error_pct: errors.as_ref().map(|e| e.pct),
        search_errors: errors.as_ref().map(|e| e.errors),
        search_error_excluded: errors.as_ref().map(|e| e.excluded),
        empty_pct: empty_rate(records, label)?,
        histogram_source,
        histogram_reference,
        source_length_breakdown: breakdown,
        stats,
    })
}

/// `bucket_low,bucket_high,count` rows; the overflow bucket's upper end is
/// written as `inf`.
pub fn histogram_csv(hist: &RatioHistogram) -> String {
    let mut out = String::from("bucket_low,bucket_high,count\n");
    for b in &hist.buckets {
        let high = b.high.map_or_else(|| "inf".to_string(), |h| h.to_string());
        writeln!(out, "{},{},{}", b.low, high, b.count).expect("writing to a String");
    }
    out
}
