use super::SearchError;
use crate::model::SequenceModel;
use crate::types::{total_order, Hypothesis, LogScore, TokenId, EOS, NEG_INF};

/// Enumeration refuses search spaces with more than this many leaves.
pub const MAX_BRUTE_FORCE_LEAVES: f64 = 1e7;

/// Every complete hypothesis of length at most `max_len` with non-zero
/// probability, sorted best first by [`total_order`].
pub fn brute_force<M: SequenceModel>(
    model: &M,
    source: &[String],
    max_len: usize,
) -> Result<Vec<Hypothesis>, SearchError> {
    let leaves = (model.target_vocab().len() as f64).powf(max_len as f64);
    if leaves > MAX_BRUTE_FORCE_LEAVES {
        return Err(SearchError::SpaceTooLarge(leaves));
    }
    let mut out = Vec::new();
    let mut prefix = Vec::with_capacity(max_len + 1);
    enumerate(model, &model.init_state(source)?, 0.0, max_len, &mut prefix, &mut out)?;
    out.sort_by(total_order);
    Ok(out)
}

fn enumerate<M: SequenceModel>(
    model: &M,
    state: &M::State,
    score: LogScore,
    max_len: usize,
    prefix: &mut Vec<TokenId>,
    out: &mut Vec<Hypothesis>,
) -> Result<(), SearchError> {
    let logprobs = model.logprobs(state);
    for (token, &lp) in logprobs.iter().enumerate() {
        if lp == NEG_INF {
            continue;
        }
        prefix.push(token);
        if token == EOS {
            out.push(Hypothesis::new(prefix.clone(), score + lp));
        } else if prefix.len() <= max_len {
            let child = model.advance(state, token)?;
            enumerate(model, &child, score + lp, max_len, prefix, out)?;
        }
        prefix.pop();
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::m1;
    use crate::model::{ModelFile, SequenceModel};

    #[test]
    fn m1_up_to_two() {
        let all = brute_force(&m1(), &[], 2).unwrap();
        let seqs: Vec<_> = all.iter().map(|h| h.seq.clone()).collect();
        assert_eq!(seqs, vec![vec![0], vec![1, 0], vec![1, 1, 0]]);
        let want = [0.4f64.ln(), (0.6f64 * 0.5).ln(), (0.6f64 * 0.25).ln()];
        for (h, w) in all.iter().zip(want) {
            assert!((h.score - w).abs() < 1e-12);
        }
    }

    #[test]
    fn m1_zero_length() {
        let all = brute_force(&m1(), &[], 0).unwrap();
        assert_eq!(all.len(), 1);
        assert_eq!(all[0].seq, vec![0]);
    }

    #[test]
    fn refuses_large_spaces() {
        let mut vocab = vec!["</s>".to_string()];
        vocab.extend((1..10).map(|i| format!("w{i}")));
        let uniform: std::collections::BTreeMap<String, f64> = vocab.iter().map(|t| (t.clone(), 0.1)).collect();
        let model = ModelFile::Tabular {
            target_vocab: vocab,
            contexts: Default::default(),
            default: uniform,
            source_override: Default::default(),
        }
        .build()
        .unwrap();
        assert_eq!(model.target_vocab().len(), 10);
        assert!(matches!(brute_force(&model, &[], 8), Err(SearchError::SpaceTooLarge(_))));
        assert!(brute_force(&model, &[], 3).is_ok());
    }
}
