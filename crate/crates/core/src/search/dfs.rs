//! Depth-first branch-and-bound over the target prefix tree.
//!
//! Extending a prefix never raises its score, so a branch whose score has
//! fallen below the incumbent bound cannot contain a better complete
//! hypothesis and is cut.

use std::collections::BTreeSet;
use std::time::Instant;

use super::{beam_search, ChildOrder, LengthConstraint, SearchConfig, SearchError};
use crate::model::{DecoderState, SequenceModel};
use crate::types::{
    BoundInit, Hypothesis, LengthTable, LogScore, SearchFlag, SearchOutcome, SearchStats, TokenId, EOS, NEG_INF,
};

/// Pruning and incumbent policy plugged into the shared traversal.
trait Bounds {
    /// May a prefix of this length be closed with `</s>`?
    fn allows_eos(&self, prefix_len: usize) -> bool;
    /// May a prefix of this length be extended with a content token?
    fn allows_extension(&self, prefix_len: usize) -> bool;
    /// Should a prefix of length `len` and score `score` be explored?
    fn worth_expanding(&self, len: usize, score: LogScore) -> bool;
    /// Offers a complete hypothesis; true if the incumbent changed.
    fn offer(&mut self, hyp: Hypothesis) -> bool;
}

/// A single global bound, optionally with length limits.
struct SingleBound {
    gamma: LogScore,
    best: Option<Hypothesis>,
    min_len: usize,
    max_len: Option<usize>,
}

impl Bounds for SingleBound {
    fn allows_eos(&self, prefix_len: usize) -> bool {
        prefix_len >= self.min_len && self.max_len.map_or(true, |m| prefix_len <= m)
    }

    fn allows_extension(&self, prefix_len: usize) -> bool {
        self.max_len.map_or(true, |m| prefix_len < m)
    }

    fn worth_expanding(&self, _len: usize, score: LogScore) -> bool {
        score >= self.gamma
    }

    fn offer(&mut self, hyp: Hypothesis) -> bool {
        if hyp.score > self.gamma {
            self.gamma = hyp.score;
            self.best = Some(hyp);
            true
        } else {
            false
        }
    }
}

/// One bound per hypothesis length.
struct PerLength {
    table: LengthTable,
}

impl Bounds for PerLength {
    fn allows_eos(&self, prefix_len: usize) -> bool {
        prefix_len <= self.table.k_max()
    }

    fn allows_extension(&self, prefix_len: usize) -> bool {
        prefix_len < self.table.k_max()
    }

    fn worth_expanding(&self, len: usize, score: LogScore) -> bool {
        // every completion reachable from here has length >= len and a
        // raw score below `score`
        score > self.table.min_gamma_from(len)
    }

    fn offer(&mut self, hyp: Hypothesis) -> bool {
        self.table.offer(&hyp)
    }
}

struct Dfs<'m, M: SequenceModel, B> {
    model: &'m M,
    bounds: B,
    order: ChildOrder,
    cap: usize,
    deadline: Option<Instant>,
    prefix: Vec<TokenId>,
    stats: SearchStats,
    flags: BTreeSet<SearchFlag>,
}

impl<'m, M: SequenceModel, B: Bounds> Dfs<'m, M, B> {
    fn new(model: &'m M, bounds: B, config: &SearchConfig, cap: usize, deadline: Option<Instant>) -> Self {
        Self {
            model,
            bounds,
            order: config.child_order,
            cap,
            deadline,
            prefix: Vec::new(),
            stats: SearchStats::default(),
            flags: BTreeSet::new(),
        }
    }

    fn timed_out(&mut self) -> bool {
        if self.flags.contains(&SearchFlag::Timeout) {
            return true;
        }
        if self.deadline.is_some_and(|d| Instant::now() >= d) {
            self.flags.insert(SearchFlag::Timeout);
            return true;
        }
        false
    }

    fn visit(&mut self, state: &M::State, score: LogScore) -> Result<(), SearchError> {
        if self.timed_out() {
            return Ok(());
        }
        let model = self.model;
        self.stats.evaluations += 1;
        let logprobs = model.logprobs(state);
        let depth = self.prefix.len();

        for token in child_order(&logprobs, self.order) {
            let child_score = score + logprobs[token];
            if token == EOS {
                if !self.bounds.allows_eos(depth) {
                    continue;
                }
                self.prefix.push(EOS);
                let hyp = Hypothesis::new(self.prefix.clone(), child_score);
                self.prefix.pop();
                if self.bounds.offer(hyp) {
                    self.stats.gamma_updates += 1;
                }
                continue;
            }
            if !self.bounds.allows_extension(depth) || !self.bounds.worth_expanding(depth + 1, child_score) {
                continue;
            }
            if depth + 1 > self.cap {
                self.flags.insert(SearchFlag::CapHit);
                continue;
            }
            let child = model.advance(state, token)?;
            self.stats.expansions += 1;
            self.stats.saw_depth(child.prefix_len());
            self.prefix.push(token);
            self.visit(&child, child_score)?;
            self.prefix.pop();
            if self.flags.contains(&SearchFlag::Timeout) {
                break;
            }
        }
        Ok(())
    }
}

/// Finite-probability children in visiting order.
fn child_order(logprobs: &[LogScore], order: ChildOrder) -> Vec<TokenId> {
    let mut content: Vec<TokenId> = (0..logprobs.len())
        .filter(|&t| t != EOS && logprobs[t] > NEG_INF)
        .collect();
    match order {
        ChildOrder::EosFirst | ChildOrder::EosLast => {
            content.sort_by(|&a, &b| logprobs[b].total_cmp(&logprobs[a]).then(a.cmp(&b)))
        }
        ChildOrder::EosFirstReversed => {
            content.sort_by(|&a, &b| logprobs[a].total_cmp(&logprobs[b]).then(a.cmp(&b)))
        }
    }
    let eos = logprobs.get(EOS).is_some_and(|&lp| lp > NEG_INF);
    let mut out = Vec::with_capacity(content.len() + 1);
    match order {
        ChildOrder::EosLast => {
            out.extend(content);
            if eos {
                out.push(EOS);
            }
        }
        _ => {
            if eos {
                out.push(EOS);
            }
            out.extend(content);
        }
    }
    out
}

fn finish(mut stats: SearchStats, start: Instant) -> SearchStats {
    stats.wall_time = Some(start.elapsed().as_secs_f64());
    stats
}

/// Exact decoding: beam search supplies the initial incumbent and bound,
/// then depth-first search visits `</s>` before other children and prunes
/// every prefix scoring below the bound. The bound moves only on strict
/// improvement, so among equal-scoring optima the first one found is kept.
///
/// The returned score is the best over all complete hypotheses up to the
/// length cap; `exact` is cleared if the cap cut a live branch or the time
/// budget ran out. Statistics count the depth-first phase only.
pub fn exact_search<M: SequenceModel>(
    model: &M,
    source: &[String],
    config: &SearchConfig,
) -> Result<SearchOutcome, SearchError> {
    let start = Instant::now();
    let beam = beam_search(model, source, config)?;
    if beam.has_flag(SearchFlag::Timeout) {
        return Ok(SearchOutcome::approximate(beam.best, beam.flags, beam.stats));
    }
    let incumbent = beam.best.is_complete().then(|| beam.best.clone());
    let bounds = SingleBound {
        gamma: incumbent.as_ref().map_or(NEG_INF, |h| h.score),
        best: None,
        min_len: 0,
        max_len: None,
    };
    let cap = config.cap_for(source.len());
    let mut dfs = Dfs::new(model, bounds, config, cap, config.deadline(start));
    dfs.visit(&model.init_state(source)?, 0.0)?;

    let Dfs { bounds, mut flags, stats, .. } = dfs;
    let best = match (bounds.best, incumbent) {
        (Some(found), _) => found,
        (None, Some(beam_best)) => {
            flags.insert(SearchFlag::FallbackToIncumbent);
            beam_best
        }
        (None, None) => return Err(SearchError::NoFeasibleHypothesis),
    };
    Ok(SearchOutcome::certified(best, flags, finish(stats, start)))
}

/// Exact decoding restricted to hypotheses whose length satisfies
/// `constraint`. The search starts unbounded unless `incumbent` (which
/// must itself satisfy the constraint) provides a bound.
pub fn exact_search_constrained<M: SequenceModel>(
    model: &M,
    source: &[String],
    config: &SearchConfig,
    constraint: LengthConstraint,
    incumbent: Option<&Hypothesis>,
) -> Result<SearchOutcome, SearchError> {
    config.validate()?;
    let start = Instant::now();
    let (min_len, max_len) = constraint.bounds(source.len())?;
    let cap = config.cap_for(source.len());
    if min_len > cap {
        return Err(SearchError::NoFeasibleHypothesis);
    }
    if let Some(h) = incumbent {
        if !h.is_complete() || !constraint.admits(h.len(), source.len()) {
            return Err(SearchError::InvalidConstraint(format!(
                "supplied incumbent of length {} does not satisfy {constraint:?}",
                h.len()
            )));
        }
    }
    let bounds = SingleBound {
        gamma: incumbent.map_or(NEG_INF, |h| h.score),
        best: None,
        min_len,
        max_len,
    };
    let mut dfs = Dfs::new(model, bounds, config, cap, config.deadline(start));
    dfs.visit(&model.init_state(source)?, 0.0)?;

    let Dfs { bounds, mut flags, stats, .. } = dfs;
    let best = match (bounds.best, incumbent) {
        (Some(found), _) => found,
        (None, Some(given)) => {
            flags.insert(SearchFlag::FallbackToIncumbent);
            given.clone()
        }
        (None, None) => return Err(SearchError::NoFeasibleHypothesis),
    };
    Ok(SearchOutcome::certified(best, flags, finish(stats, start)))
}

/// Result of [`exact_search_per_length`].
#[derive(Debug, Clone)]
pub struct PerLengthOutcome {
    pub table: LengthTable,
    /// Beam hypothesis used for bound initialization.
    pub beam: Hypothesis,
    pub exact: bool,
    pub flags: BTreeSet<SearchFlag>,
    /// Depth-first phase only.
    pub stats: SearchStats,
}

/// Default largest length for per-length search: `floor(1.2 I)`.
pub fn default_k_max(source_len: usize) -> usize {
    source_len * 6 / 5
}

/// Finds the best complete hypothesis of every length `0..=k_max`.
///
/// With [`BoundInit::BeamDerived`] each `γ_k` starts at
/// `(k + 1) · score(beam) / (len(beam) + 1)`; entries left without an
/// incumbent certify that no length-`k` hypothesis beats that bound.
/// [`BoundInit::NegInf`] yields the full table at higher cost.
pub fn exact_search_per_length<M: SequenceModel>(
    model: &M,
    source: &[String],
    config: &SearchConfig,
    k_max: Option<usize>,
    init: BoundInit,
) -> Result<PerLengthOutcome, SearchError> {
    let start = Instant::now();
    let k_max = k_max.unwrap_or_else(|| default_k_max(source.len()));
    let beam = beam_search(model, source, config)?;
    let beam_usable = beam.best.is_complete();

    let (init, table) = match init {
        BoundInit::BeamDerived if beam_usable => {
            let per_token = beam.best.score / (beam.best.len() + 1) as f64;
            (init, LengthTable::new(k_max, init, |k| (k + 1) as f64 * per_token))
        }
        _ => (BoundInit::NegInf, LengthTable::new(k_max, BoundInit::NegInf, |_| NEG_INF)),
    };
    debug_assert_eq!(table.init(), init);

    if beam.has_flag(SearchFlag::Timeout) {
        return Ok(PerLengthOutcome {
            table,
            beam: beam.best,
            exact: false,
            flags: beam.flags,
            stats: finish(SearchStats::default(), start),
        });
    }

    let cap = config.cap_for(source.len());
    let mut dfs = Dfs::new(model, PerLength { table }, config, cap, config.deadline(start));
    dfs.visit(&model.init_state(source)?, 0.0)?;
    let Dfs { bounds, flags, stats, .. } = dfs;
    let exact = !flags.contains(&SearchFlag::CapHit) && !flags.contains(&SearchFlag::Timeout);
    Ok(PerLengthOutcome { table: bounds.table, beam: beam.best, exact, flags, stats: finish(stats, start) })
}
