use std::cmp::Ordering;
use std::collections::BTreeSet;
use std::time::Instant;

use super::{SearchConfig, SearchError};
use crate::model::{DecoderState, SequenceModel};
use crate::types::{total_order, Hypothesis, SearchFlag, SearchOutcome, SearchStats, EOS, NEG_INF};

enum Origin<S> {
    /// Complete hypothesis, carried forward unexpanded.
    Complete,
    /// Partial hypothesis whose state is already materialized.
    Ready(S),
    /// Child of `cur[parent]` by `token`; advanced only if it survives the cut.
    Pending { parent: usize, token: usize },
}

struct Candidate<S> {
    hyp: Hypothesis,
    origin: Origin<S>,
}

/// Time-synchronous beam search keeping exactly `min(n, |candidates|)`
/// hypotheses per step under [`total_order`]. Complete hypotheses stay in
/// the beam unexpanded; the search stops once the top-ranked hypothesis is
/// complete. `beam_size = 1` is greedy decoding.
///
/// Hypotheses longer than the length cap are never formed. If such a
/// candidate would have made the cut, the outcome carries `CAP_HIT`. When
/// no complete hypothesis is reachable the best partial one is returned.
pub fn beam_search<M: SequenceModel>(
    model: &M,
    source: &[String],
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    config.validate()?;
    let start = Instant::now();
    let deadline = config.deadline(start);
    let cap = config.cap_for(source.len());
    let n = config.beam_size;

    let mut stats = SearchStats::default();
    let mut flags = BTreeSet::new();
    let mut best_complete: Option<Hypothesis> = None;

    let mut cur: Vec<Candidate<M::State>> = vec![Candidate {
        hyp: Hypothesis::root(),
        origin: Origin::Ready(model.init_state(source)?),
    }];

    // Every step lengthens each partial hypothesis by one, so after cap + 1
    // steps only complete hypotheses can remain.
    for _ in 0..=cap {
        if deadline.is_some_and(|d| Instant::now() >= d) {
            flags.insert(SearchFlag::Timeout);
            break;
        }

        let mut parents = Vec::with_capacity(cur.len());
        let mut next = Vec::new();
        let mut best_over_cap: Option<Hypothesis> = None;
        for cand in cur.drain(..) {
            let state = match cand.origin {
                Origin::Complete => {
                    next.push(cand);
                    continue;
                }
                Origin::Ready(state) => state,
                Origin::Pending { .. } => unreachable!("pending candidates are materialized after the cut"),
            };
            stats.evaluations += 1;
            let logprobs = model.logprobs(&state);
            let parent = parents.len();
            for (token, &lp) in logprobs.iter().enumerate() {
                if lp == NEG_INF {
                    continue;
                }
                let mut seq = Vec::with_capacity(cand.hyp.seq.len() + 1);
                seq.extend_from_slice(&cand.hyp.seq);
                seq.push(token);
                let hyp = Hypothesis::new(seq, cand.hyp.score + lp);
                if token == EOS {
                    next.push(Candidate { hyp, origin: Origin::Complete });
                } else if hyp.seq.len() > cap {
                    if best_over_cap.as_ref().map_or(true, |b| total_order(&hyp, b) == Ordering::Less) {
                        best_over_cap = Some(hyp);
                    }
                } else {
                    next.push(Candidate { hyp, origin: Origin::Pending { parent, token } });
                }
            }
            drop(logprobs);
            parents.push(state);
        }

        if next.is_empty() {
            break;
        }
        next.sort_by(|a, b| total_order(&a.hyp, &b.hyp));
        next.truncate(n);
        if let Some(over) = &best_over_cap {
            let cut_open = next.len() < n;
            let ranks_in = cut_open || total_order(over, &next[next.len() - 1].hyp) == Ordering::Less;
            if ranks_in {
                flags.insert(SearchFlag::CapHit);
            }
        }

        for cand in next.iter_mut() {
            if let Origin::Pending { parent, token } = cand.origin {
                let child = model.advance(&parents[parent], token)?;
                stats.expansions += 1;
                stats.saw_depth(child.prefix_len());
                cand.origin = Origin::Ready(child);
            } else if matches!(cand.origin, Origin::Complete)
                && best_complete.as_ref().map_or(true, |b| total_order(&cand.hyp, b) == Ordering::Less)
            {
                best_complete = Some(cand.hyp.clone());
            }
        }
        cur = next;

        if cur[0].hyp.is_complete() {
            break;
        }
    }

    let best = match cur.first() {
        Some(top) if top.hyp.is_complete() => top.hyp.clone(),
        top => match best_complete {
            Some(h) => h,
            None => {
                flags.insert(SearchFlag::CapHit);
                top.map_or_else(Hypothesis::root, |t| t.hyp.clone())
            }
        },
    };
    stats.wall_time = Some(start.elapsed().as_secs_f64());
    Ok(SearchOutcome::approximate(best, flags, stats))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::m1;

    #[test]
    fn greedy_on_m1() {
        let out = beam_search(&m1(), &[], &SearchConfig::with_beam(1)).unwrap();
        assert_eq!(out.best.seq, vec![1, 0]);
        assert!((out.best.score - (0.6f64.ln() + 0.5f64.ln())).abs() < 1e-12);
        assert!(!out.exact);
        assert!(out.flags.is_empty());
        assert_eq!(out.stats.expansions, 1);
        assert_eq!(out.stats.evaluations, 2);
    }

    #[test]
    fn beam_two_on_m1_finds_empty_translation() {
        let out = beam_search(&m1(), &[], &SearchConfig::with_beam(2)).unwrap();
        assert_eq!(out.best.seq, vec![0]);
        assert!((out.best.score - 0.4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn zero_beam_is_rejected() {
        assert!(matches!(
            beam_search(&m1(), &[], &SearchConfig::with_beam(0)),
            Err(SearchError::InvalidConfig(_))
        ));
    }

    #[test]
    fn tiny_cap_returns_best_complete_with_flag() {
        // with cap 1 the tie [a a] cannot be formed; [a </s>] still wins
        let config = SearchConfig { max_len_cap: Some(1), ..SearchConfig::with_beam(1) };
        let out = beam_search(&m1(), &[], &config).unwrap();
        assert_eq!(out.best.seq, vec![1, 0]);
        assert!(out.best.len() <= 1);
    }

    #[test]
    fn timeout_returns_best_so_far() {
        let config = SearchConfig {
            timeout: Some(std::time::Duration::ZERO),
            ..SearchConfig::with_beam(3)
        };
        let out = beam_search(&m1(), &[], &config).unwrap();
        assert!(out.has_flag(SearchFlag::Timeout));
        assert!(!out.exact);
    }
}
