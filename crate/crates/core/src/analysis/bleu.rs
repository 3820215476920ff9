use std::collections::HashMap;

use super::AnalysisError;
use crate::types::EOS_TOKEN;

fn strip_eos(tokens: &[String]) -> &[String] {
    match tokens.split_last() {
        Some((last, rest)) if last == EOS_TOKEN => rest,
        _ => tokens,
    }
}

fn ngram_counts(tokens: &[String], n: usize) -> HashMap<&[String], usize> {
    let mut counts = HashMap::new();
    if tokens.len() >= n {
        for gram in tokens.windows(n) {
            *counts.entry(gram).or_insert(0) += 1;
        }
    }
    counts
}

/// Case-sensitive corpus BLEU in percent, single reference, no smoothing.
///
/// Orders with no hypothesis n-grams are left out of the geometric mean;
/// any included order with zero matches makes the score 0. A trailing
/// `</s>` is removed from every sentence first.
pub fn corpus_bleu(hypotheses: &[Vec<String>], references: &[Vec<String>], max_n: usize) -> Result<f64, AnalysisError> {
    if hypotheses.len() != references.len() {
        return Err(AnalysisError::LengthMismatch { hypotheses: hypotheses.len(), references: references.len() });
    }
    if hypotheses.is_empty() {
        return Err(AnalysisError::EmptyCorpus);
    }
    let mut matches = vec![0usize; max_n];
    let mut totals = vec![0usize; max_n];
    let (mut hyp_len, mut ref_len) = (0usize, 0usize);

    for (hyp, reference) in hypotheses.iter().zip(references) {
        let (hyp, reference) = (strip_eos(hyp), strip_eos(reference));
        hyp_len += hyp.len();
        ref_len += reference.len();
        for n in 1..=max_n {
            let ref_counts = ngram_counts(reference, n);
            for (gram, count) in ngram_counts(hyp, n) {
                matches[n - 1] += count.min(ref_counts.get(gram).copied().unwrap_or(0));
                totals[n - 1] += count;
            }
        }
    }

    if hyp_len == 0 {
        return Ok(0.0);
    }
    let mut log_sum = 0.0;
    let mut orders = 0;
    for (m, t) in matches.iter().zip(&totals) {
        if *t == 0 {
            continue;
        }
        if *m == 0 {
            return Ok(0.0);
        }
        log_sum += (*m as f64 / *t as f64).ln();
        orders += 1;
    }
    let brevity = if hyp_len < ref_len {
        (1.0 - ref_len as f64 / hyp_len as f64).exp()
    } else {
        1.0
    };
    Ok(100.0 * brevity * (log_sum / orders as f64).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sent(s: &str) -> Vec<String> {
        s.split_whitespace().map(String::from).collect()
    }

    #[test]
    fn identical_corpus_scores_100() {
        let c = vec![sent("the cat sat on the mat"), sent("a b"), sent("x")];
        assert!((corpus_bleu(&c, &c, 4).unwrap() - 100.0).abs() < 1e-9);
    }

    #[test]
    fn short_hypothesis_gets_brevity_penalty() {
        // p1 = 2/2, p2 = 1/1, orders 3 and 4 have no hypothesis n-grams
        let bleu = corpus_bleu(&[sent("a a")], &[sent("a a a")], 4).unwrap();
        let oracle = 100.0 * (1.0f64 - 1.5).exp();
        assert!((bleu - oracle).abs() < 1e-9);
        assert!((bleu - 60.65).abs() < 0.01);
    }

    #[test]
    fn no_overlap_scores_zero() {
        assert_eq!(corpus_bleu(&[sent("x y z")], &[sent("a b c")], 4).unwrap(), 0.0);
    }

    #[test]
    fn clipping_limits_repeated_words() {
        // unigram precision 2/7 as in the classic "the the the" example
        let bleu = corpus_bleu(&[sent("the the the the the the the")], &[sent("the cat is on the mat")], 1).unwrap();
        assert!((bleu - 100.0 * 2.0 / 7.0).abs() < 1e-9);
    }

    #[test]
    fn eos_is_ignored_and_case_matters() {
        let with_eos = corpus_bleu(&[sent("a b </s>")], &[sent("a b")], 4).unwrap();
        assert!((with_eos - 100.0).abs() < 1e-9);
        assert_eq!(corpus_bleu(&[sent("A")], &[sent("a")], 4).unwrap(), 0.0);
    }

    #[test]
    fn empty_hypotheses_score_zero() {
        assert_eq!(corpus_bleu(&[sent("</s>")], &[sent("a b")], 4).unwrap(), 0.0);
    }

    #[test]
    fn errors() {
        assert!(matches!(corpus_bleu(&[], &[], 4), Err(AnalysisError::EmptyCorpus)));
        assert!(matches!(
            corpus_bleu(&[sent("a")], &[], 4),
            Err(AnalysisError::LengthMismatch { .. })
        ));
    }
}
