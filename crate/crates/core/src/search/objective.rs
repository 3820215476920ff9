use std::cmp::Ordering;

use super::SearchError;
use crate::types::{total_order, BoundInit, Hypothesis, LengthTable, LogScore};

/// Scoring rule applied to complete hypotheses.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthObjective {
    Raw,
    /// `score / (len + 1)`.
    LengthNorm,
    /// `score + λ (len + 1)` with a positive per-token reward.
    WordReward(f64),
}

impl LengthObjective {
    pub fn value(&self, raw: LogScore, len: usize) -> f64 {
        let tokens = (len + 1) as f64;
        match *self {
            LengthObjective::Raw => raw,
            LengthObjective::LengthNorm => raw / tokens,
            LengthObjective::WordReward(reward) => raw + reward * tokens,
        }
    }
}

/// Picks the best of the beam hypothesis and the table's per-length
/// incumbents under `objective`. Ties fall back to [`total_order`].
pub fn optimize_length_objective(
    table: &LengthTable,
    beam_incumbent: &Hypothesis,
    objective: LengthObjective,
) -> Result<Hypothesis, SearchError> {
    if let LengthObjective::WordReward(reward) = objective {
        if !(reward > 0.0) {
            return Err(SearchError::InvalidConfig(format!("word reward {reward} must be positive")));
        }
        if table.init() != BoundInit::NegInf {
            return Err(SearchError::BoundMismatch);
        }
    }
    let stored = table.entries().iter().filter_map(|e| e.incumbent.as_ref());
    std::iter::once(beam_incumbent)
        .filter(|h| h.is_complete())
        .chain(stored)
        .min_by(|a, b| {
            let (va, vb) = (objective.value(a.score, a.len()), objective.value(b.score, b.len()));
            match vb.total_cmp(&va) {
                Ordering::Equal => total_order(a, b),
                other => other,
            }
        })
        .cloned()
        .ok_or(SearchError::EmptyTable)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::types::NEG_INF;

    fn m1_table() -> LengthTable {
        let mut t = LengthTable::new(3, BoundInit::NegInf, |_| NEG_INF);
        let (la, lh, le) = (0.6f64.ln(), 0.5f64.ln(), 0.4f64.ln());
        t.offer(&Hypothesis::new(vec![0], le));
        t.offer(&Hypothesis::new(vec![1, 0], la + lh));
        t.offer(&Hypothesis::new(vec![1, 1, 0], la + 2.0 * lh));
        t.offer(&Hypothesis::new(vec![1, 1, 1, 0], la + 3.0 * lh));
        t
    }

    fn greedy() -> Hypothesis {
        Hypothesis::new(vec![1, 0], 0.6f64.ln() + 0.5f64.ln())
    }

    #[test]
    fn length_norm_prefers_one_token() {
        let t = m1_table();
        let normalized: Vec<f64> = (0..=3)
            .map(|k| LengthObjective::LengthNorm.value(t.gamma(k), k))
            .collect();
        let expected = [-0.9163, -0.6020, -0.6324, -0.6476];
        for (got, want) in normalized.iter().zip(expected) {
            assert!((got - want).abs() < 5e-5, "{got} vs {want}");
        }
        let best = optimize_length_objective(&t, &greedy(), LengthObjective::LengthNorm).unwrap();
        assert_eq!(best.seq, vec![1, 0]);
    }

    #[test]
    fn raw_objective_keeps_empty_translation() {
        let best = optimize_length_objective(&m1_table(), &greedy(), LengthObjective::Raw).unwrap();
        assert_eq!(best.seq, vec![0]);
        assert!((best.score - 0.4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn word_reward() {
        let t = m1_table();
        let values: Vec<f64> = (0..=2)
            .map(|k| LengthObjective::WordReward(0.5).value(t.gamma(k), k))
            .collect();
        for (got, want) in values.iter().zip([-0.4163, -0.2040, -0.3971]) {
            assert!((got - want).abs() < 5e-5);
        }
        let best = optimize_length_objective(&t, &greedy(), LengthObjective::WordReward(0.5)).unwrap();
        assert_eq!(best.seq, vec![1, 0]);
    }

    #[test]
    fn word_reward_needs_unbounded_table() {
        let t = LengthTable::new(2, BoundInit::BeamDerived, |k| -(k as f64));
        assert!(matches!(
            optimize_length_objective(&t, &greedy(), LengthObjective::WordReward(0.5)),
            Err(SearchError::BoundMismatch)
        ));
    }

    #[test]
    fn nothing_to_choose() {
        let t = LengthTable::new(2, BoundInit::NegInf, |_| NEG_INF);
        let partial = Hypothesis::new(vec![1], -0.1);
        assert!(matches!(
            optimize_length_objective(&t, &partial, LengthObjective::Raw),
            Err(SearchError::EmptyTable)
        ));
        // the beam hypothesis alone is a valid answer
        assert_eq!(optimize_length_objective(&t, &greedy(), LengthObjective::Raw).unwrap(), greedy());
    }
}
