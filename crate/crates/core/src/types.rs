//! Shared domain types: vocabularies, hypotheses, per-length tables and
//! search outcomes.

use std::cmp::Ordering;
use std::collections::{BTreeSet, HashMap};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Index into a [`Vocabulary`].
pub type TokenId = usize;

/// Natural-log probability. Impossible events are [`NEG_INF`].
pub type LogScore = f64;

pub const NEG_INF: LogScore = f64::NEG_INFINITY;

/// The end-of-sentence token is always stored first.
pub const EOS: TokenId = 0;

pub const EOS_TOKEN: &str = "</s>";

#[derive(Debug, Error, PartialEq)]
pub enum VocabError {
    #[error("vocabulary must start with \"{EOS_TOKEN}\"")]
    MissingEos,
    #[error("vocabulary needs at least two tokens, got {0}")]
    TooSmall(usize),
    #[error("empty token at index {0}")]
    EmptyToken(usize),
    #[error("token {0:?} contains whitespace")]
    Whitespace(String),
    #[error("duplicate token {0:?}")]
    Duplicate(String),
}

/// Ordered token inventory with `</s>` at index 0.
#[derive(Debug, Clone, PartialEq)]
pub struct Vocabulary {
    tokens: Vec<String>,
    index: HashMap<String, TokenId>,
}

impl Vocabulary {
    pub fn new<S: Into<String>>(tokens: impl IntoIterator<Item = S>) -> Result<Self, VocabError> {
        let tokens: Vec<String> = tokens.into_iter().map(Into::into).collect();
        if tokens.first().map(String::as_str) != Some(EOS_TOKEN) {
            return Err(VocabError::MissingEos);
        }
        if tokens.len() < 2 {
            return Err(VocabError::TooSmall(tokens.len()));
        }
        let mut index = HashMap::with_capacity(tokens.len());
        for (i, tok) in tokens.iter().enumerate() {
            if tok.is_empty() {
                return Err(VocabError::EmptyToken(i));
            }
            if tok.chars().any(char::is_whitespace) {
                return Err(VocabError::Whitespace(tok.clone()));
            }
            if index.insert(tok.clone(), i).is_some() {
                return Err(VocabError::Duplicate(tok.clone()));
            }
        }
        Ok(Self { tokens, index })
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    pub fn eos_id(&self) -> TokenId {
        EOS
    }

    pub fn id(&self, token: &str) -> Option<TokenId> {
        self.index.get(token).copied()
    }

    pub fn token(&self, id: TokenId) -> Option<&str> {
        self.tokens.get(id).map(String::as_str)
    }

    pub fn tokens(&self) -> &[String] {
        &self.tokens
    }

    /// Maps ids to their surface strings. Panics on an out-of-range id.
    pub fn render(&self, ids: &[TokenId]) -> Vec<String> {
        ids.iter().map(|&i| self.tokens[i].clone()).collect()
    }
}

/// A target token sequence with its accumulated log-probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Hypothesis {
    pub seq: Vec<TokenId>,
    pub score: LogScore,
}

impl Hypothesis {
    pub fn new(seq: Vec<TokenId>, score: LogScore) -> Self {
        Self { seq, score }
    }

    /// The empty prefix with zero score.
    pub fn root() -> Self {
        Self { seq: Vec::new(), score: 0.0 }
    }

    pub fn is_complete(&self) -> bool {
        self.seq.last() == Some(&EOS)
    }

    /// Number of tokens excluding a trailing `</s>`; the empty translation
    /// has length 0.
    pub fn len(&self) -> usize {
        if self.is_complete() {
            self.seq.len() - 1
        } else {
            self.seq.len()
        }
    }

    pub fn is_empty_translation(&self) -> bool {
        self.seq == [EOS]
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Deterministic ranking used for every n-best cut and tie-break: score
/// descending, then sequence length ascending, then token ids
/// lexicographically ascending. `Less` means `a` ranks ahead of `b`.
pub fn total_order(a: &Hypothesis, b: &Hypothesis) -> Ordering {
    b.score
        .total_cmp(&a.score)
        .then_with(|| a.seq.len().cmp(&b.seq.len()))
        .then_with(|| a.seq.cmp(&b.seq))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum SearchFlag {
    CapHit,
    Timeout,
    FallbackToIncumbent,
}

impl fmt::Display for SearchFlag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            SearchFlag::CapHit => "CAP_HIT",
            SearchFlag::Timeout => "TIMEOUT",
            SearchFlag::FallbackToIncumbent => "FALLBACK_TO_INCUMBENT",
        };
        f.write_str(s)
    }
}

/// Counters collected during one search call.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct SearchStats {
    /// Decoder-state advance operations.
    pub expansions: u64,
    /// Next-token distribution queries.
    pub evaluations: u64,
    /// Incumbent improvements.
    pub gamma_updates: u64,
    /// Deepest prefix length explored.
    pub max_depth: usize,
    /// Seconds spent in the call.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub wall_time: Option<f64>,
}

impl SearchStats {
    pub(crate) fn saw_depth(&mut self, depth: usize) {
        self.max_depth = self.max_depth.max(depth);
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchOutcome {
    pub best: Hypothesis,
    pub exact: bool,
    pub flags: BTreeSet<SearchFlag>,
    pub stats: SearchStats,
}

impl SearchOutcome {
    /// Builds an outcome whose exactness is claimed unless the cap or the
    /// time budget interfered.
    pub fn certified(best: Hypothesis, flags: BTreeSet<SearchFlag>, stats: SearchStats) -> Self {
        let exact = !flags.contains(&SearchFlag::CapHit) && !flags.contains(&SearchFlag::Timeout);
        Self { best, exact, flags, stats }
    }

    /// Builds an outcome that never claims exactness.
    pub fn approximate(best: Hypothesis, flags: BTreeSet<SearchFlag>, stats: SearchStats) -> Self {
        Self { best, exact: false, flags, stats }
    }

    pub fn has_flag(&self, flag: SearchFlag) -> bool {
        self.flags.contains(&flag)
    }
}

/// How the per-length bounds of a [`LengthTable`] were initialized.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundInit {
    /// Scaled from the beam hypothesis' score.
    BeamDerived,
    NegInf,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LengthEntry {
    pub gamma: LogScore,
    pub incumbent: Option<Hypothesis>,
}

/// Per-length lower bounds and incumbents for lengths `0..=k_max`.
#[derive(Debug, Clone, PartialEq)]
pub struct LengthTable {
    k_max: usize,
    init: BoundInit,
    entries: Vec<LengthEntry>,
}

impl LengthTable {
    pub fn new(k_max: usize, init: BoundInit, bounds: impl Fn(usize) -> LogScore) -> Self {
        let entries = (0..=k_max)
            .map(|k| LengthEntry { gamma: bounds(k), incumbent: None })
            .collect();
        Self { k_max, init, entries }
    }

    pub fn k_max(&self) -> usize {
        self.k_max
    }

    pub fn init(&self) -> BoundInit {
        self.init
    }

    pub fn entries(&self) -> &[LengthEntry] {
        &self.entries
    }

    pub fn gamma(&self, k: usize) -> LogScore {
        self.entries[k].gamma
    }

    pub fn incumbent(&self, k: usize) -> Option<&Hypothesis> {
        self.entries.get(k).and_then(|e| e.incumbent.as_ref())
    }

    /// Smallest bound over lengths `from..=k_max`.
    pub(crate) fn min_gamma_from(&self, from: usize) -> LogScore {
        self.entries[from.min(self.k_max + 1)..]
            .iter()
            .map(|e| e.gamma)
            .fold(f64::INFINITY, f64::min)
    }

    /// Records a complete hypothesis if it strictly beats the bound at its
    /// length. Returns whether the table changed.
    pub(crate) fn offer(&mut self, hyp: &Hypothesis) -> bool {
        let k = hyp.len();
        match self.entries.get_mut(k) {
            Some(entry) if hyp.score > entry.gamma => {
                entry.gamma = hyp.score;
                entry.incumbent = Some(hyp.clone());
                true
            }
            _ => false,
        }
    }
}
