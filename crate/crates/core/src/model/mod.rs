//! Sequence-model interface and the concrete models that implement it.
//!
//! A model exposes next-token log-probabilities for an immutable
//! [`DecoderState`]. Advancing a state returns a fresh value, so a
//! depth-first search can backtrack by simply dropping states.

use std::borrow::Cow;

use thiserror::Error;

use crate::types::{LogScore, TokenId, VocabError, Vocabulary};

mod file;
mod lexical;
mod tabular;

pub use file::{load_model, AnyModel, AnyState, Distribution, ModelFile};
pub use lexical::{LexicalState, ToyLexicalModel};
pub use tabular::{TabularModel, TabularState};

/// Largest conditional probability a model may assign to any token.
pub const MAX_PROB: f64 = 1.0 - 1e-6;

/// Tolerance on the sum of an explicit distribution.
pub const SUM_TOLERANCE: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ModelError {
    #[error("cannot read model file: {0}")]
    Io(#[from] std::io::Error),
    #[error("malformed model file: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid model at {context:?}: {reason}")]
    Validation { context: String, reason: String },
    #[error("invalid vocabulary: {0}")]
    Vocab(#[from] VocabError),
    #[error("source token {0:?} is not in the translation table")]
    UnknownSourceToken(String),
    #[error("the model needs a non-empty source sentence")]
    EmptySource,
    #[error("cannot advance past the end-of-sentence token")]
    AdvancePastEos,
    #[error("token {0} has zero probability in this context")]
    ImpossibleToken(TokenId),
    #[error("token id {0} is out of range")]
    TokenOutOfRange(TokenId),
}

impl ModelError {
    pub(crate) fn validation(context: impl Into<String>, reason: impl Into<String>) -> Self {
        ModelError::Validation { context: context.into(), reason: reason.into() }
    }
}

pub trait DecoderState: Clone + Send + Sync {
    /// Number of target tokens conditioned on.
    fn prefix_len(&self) -> usize;
}

/// A locally normalized left-to-right model over a target vocabulary.
pub trait SequenceModel: Send + Sync {
    type State: DecoderState;

    fn target_vocab(&self) -> &Vocabulary;

    /// State conditioned on `source` and the empty target prefix.
    fn init_state(&self, source: &[String]) -> Result<Self::State, ModelError>;

    /// Extends the prefix by one non-EOS token. The input is left untouched.
    fn advance(&self, state: &Self::State, token: TokenId) -> Result<Self::State, ModelError>;

    /// One log-probability per target token, `NEG_INF` for impossible ones.
    fn logprobs<'a>(&'a self, state: &'a Self::State) -> Cow<'a, [LogScore]>;
}

/// Checks the shared preconditions of [`SequenceModel::advance`].
pub(crate) fn check_advance(logprobs: &[LogScore], token: TokenId) -> Result<(), ModelError> {
    if token == crate::types::EOS {
        return Err(ModelError::AdvancePastEos);
    }
    match logprobs.get(token) {
        None => Err(ModelError::TokenOutOfRange(token)),
        Some(lp) if *lp == f64::NEG_INFINITY => Err(ModelError::ImpossibleToken(token)),
        Some(_) => Ok(()),
    }
}

/// Re-evaluates `seq` step by step and returns its total log-probability.
pub fn rescore<M: SequenceModel>(
    model: &M,
    source: &[String],
    seq: &[TokenId],
) -> Result<LogScore, ModelError> {
    let mut state = model.init_state(source)?;
    let mut total = 0.0;
    for (i, &tok) in seq.iter().enumerate() {
        let lp = *model
            .logprobs(&state)
            .get(tok)
            .ok_or(ModelError::TokenOutOfRange(tok))?;
        total += lp;
        if tok == crate::types::EOS || i + 1 == seq.len() {
            break;
        }
        state = model.advance(&state, tok)?;
    }
    Ok(total)
}
