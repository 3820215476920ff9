//! Decoding algorithms: beam search, exact depth-first branch-and-bound,
//! its length-constrained and per-length variants, and exhaustive
//! enumeration for cross-checking.

use std::time::{Duration, Instant};

use thiserror::Error;

use crate::model::ModelError;

mod beam;
mod brute;
mod dfs;
mod objective;

pub use beam::beam_search;
pub use brute::{brute_force, MAX_BRUTE_FORCE_LEAVES};
pub use dfs::{exact_search, exact_search_constrained, exact_search_per_length, PerLengthOutcome};
pub use objective::{optimize_length_objective, LengthObjective};

#[derive(Debug, Error)]
pub enum SearchError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error("invalid search configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid length constraint: {0}")]
    InvalidConstraint(String),
    #[error("no hypothesis satisfies the length constraint")]
    NoFeasibleHypothesis,
    #[error("search space of {0} leaves is too large to enumerate")]
    SpaceTooLarge(f64),
    #[error("word reward needs a table built with unbounded (NEG_INF) initialization")]
    BoundMismatch,
    #[error("length table holds no complete hypothesis")]
    EmptyTable,
}

/// Order in which DFS visits the children of a prefix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ChildOrder {
    /// `</s>` first, then by descending log-probability.
    #[default]
    EosFirst,
    /// `</s>` first, then by ascending log-probability.
    EosFirstReversed,
    /// Descending log-probability, `</s>` last.
    EosLast,
}

#[derive(Debug, Clone)]
pub struct SearchConfig {
    pub beam_size: usize,
    /// Longest hypothesis explored; `None` means `max(2 I, I + 10)`.
    pub max_len_cap: Option<usize>,
    pub timeout: Option<Duration>,
    /// Tolerance for comparing final scores between runs.
    pub epsilon: f64,
    pub child_order: ChildOrder,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            beam_size: 10,
            max_len_cap: None,
            timeout: None,
            epsilon: 1e-6,
            child_order: ChildOrder::EosFirst,
        }
    }
}

impl SearchConfig {
    pub fn with_beam(beam_size: usize) -> Self {
        Self { beam_size, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), SearchError> {
        if self.beam_size == 0 {
            return Err(SearchError::InvalidConfig("beam size must be at least 1".into()));
        }
        if self.max_len_cap == Some(0) {
            return Err(SearchError::InvalidConfig("max_len_cap must be at least 1".into()));
        }
        if !(self.epsilon > 0.0) {
            return Err(SearchError::InvalidConfig("epsilon must be positive".into()));
        }
        Ok(())
    }

    /// Length cap for a source of `source_len` tokens.
    pub fn cap_for(&self, source_len: usize) -> usize {
        self.max_len_cap
            .unwrap_or_else(|| (2 * source_len).max(source_len + 10))
    }

    pub(crate) fn deadline(&self, start: Instant) -> Option<Instant> {
        self.timeout.map(|t| start + t)
    }
}

/// Restriction on the length of the returned hypothesis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum LengthConstraint {
    None,
    /// At least `ceil(r * I)` tokens.
    MinRatio(f64),
    MinAbs(usize),
    Exact(usize),
}

impl LengthConstraint {
    /// Smallest and largest admissible lengths for a source of length `I`.
    pub fn bounds(&self, source_len: usize) -> Result<(usize, Option<usize>), SearchError> {
        match *self {
            LengthConstraint::None => Ok((0, None)),
            LengthConstraint::MinRatio(r) => {
                if !(r > 0.0) || !r.is_finite() {
                    return Err(SearchError::InvalidConstraint(format!("ratio {r} must be positive")));
                }
                Ok((min_len_for_ratio(r, source_len), None))
            }
            LengthConstraint::MinAbs(l) => Ok((l, None)),
            LengthConstraint::Exact(l) => Ok((l, Some(l))),
        }
    }

    pub fn admits(&self, len: usize, source_len: usize) -> bool {
        match self.bounds(source_len) {
            Ok((lo, hi)) => len >= lo && hi.map_or(true, |h| len <= h),
            Err(_) => false,
        }
    }
}

/// `ceil(r * I)`, ignoring floating-point dust just above an integer.
pub fn min_len_for_ratio(ratio: f64, source_len: usize) -> usize {
    let raw = ratio * source_len as f64;
    (raw - 1e-9).ceil().max(0.0) as usize
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_cap() {
        let c = SearchConfig::default();
        assert_eq!(c.cap_for(0), 10);
        assert_eq!(c.cap_for(5), 15);
        assert_eq!(c.cap_for(20), 40);
        let c = SearchConfig { max_len_cap: Some(3), ..c };
        assert_eq!(c.cap_for(20), 3);
    }

    #[test]
    fn config_validation() {
        assert!(SearchConfig::with_beam(1).validate().is_ok());
        assert!(SearchConfig::with_beam(0).validate().is_err());
        let c = SearchConfig { max_len_cap: Some(0), ..SearchConfig::default() };
        assert!(c.validate().is_err());
        let c = SearchConfig { epsilon: 0.0, ..SearchConfig::default() };
        assert!(c.validate().is_err());
    }

    #[test]
    fn min_ratio_resolves_with_ceil() {
        assert_eq!(min_len_for_ratio(0.25, 4), 1);
        assert_eq!(min_len_for_ratio(0.25, 5), 2);
        assert_eq!(min_len_for_ratio(0.25, 1), 1);
        assert_eq!(min_len_for_ratio(0.1, 30), 3);
        assert_eq!(min_len_for_ratio(0.25, 0), 0);
        assert!(!LengthConstraint::MinRatio(0.25).admits(0, 3));
        assert!(LengthConstraint::MinRatio(0.25).admits(1, 3));
        assert!(LengthConstraint::MinRatio(0.0).bounds(3).is_err());
    }
}
