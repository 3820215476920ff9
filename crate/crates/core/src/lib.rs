//! Beam search and exact depth-first branch-and-bound decoding for
//! autoregressive sequence models, with tools for measuring search errors,
//! empty-translation optima and length bias.

pub mod analysis;
pub mod cli;
pub mod fixtures;
pub mod model;
pub mod search;
pub mod types;

pub use model::{load_model, AnyModel, SequenceModel};
pub use search::{
    beam_search, brute_force, exact_search, exact_search_constrained, exact_search_per_length,
    optimize_length_objective, LengthConstraint, LengthObjective, SearchConfig, SearchError,
};
pub use types::{total_order, Hypothesis, LengthTable, SearchOutcome, Vocabulary};
