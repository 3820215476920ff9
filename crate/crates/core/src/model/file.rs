use std::borrow::Cow;
use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{DecoderState, LexicalState, ModelError, SequenceModel, TabularModel, TabularState, ToyLexicalModel};
use crate::types::{LogScore, TokenId, Vocabulary};

/// `{token: probability}` object as written in model files.
pub type Distribution = BTreeMap<String, f64>;

/// On-disk model description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum ModelFile {
    Tabular {
        target_vocab: Vec<String>,
        contexts: BTreeMap<String, Distribution>,
        default: Distribution,
        #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
        source_override: BTreeMap<String, BTreeMap<String, Distribution>>,
    },
    ToyLexical {
        target_vocab: Vec<String>,
        ttable: BTreeMap<String, Distribution>,
        a: f64,
        b: f64,
    },
}

impl ModelFile {
    pub fn parse(json: &str) -> Result<Self, ModelError> {
        Ok(serde_json::from_str(json)?)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model files always serialize")
    }

    /// Validates the description and builds the model.
    pub fn build(&self) -> Result<AnyModel, ModelError> {
        match self {
            ModelFile::Tabular { target_vocab, contexts, default, source_override } => {
                let vocab = Vocabulary::new(target_vocab.iter().cloned())?;
                Ok(AnyModel::Tabular(TabularModel::new(vocab, contexts, default, source_override)?))
            }
            ModelFile::ToyLexical { target_vocab, ttable, a, b } => {
                let vocab = Vocabulary::new(target_vocab.iter().cloned())?;
                Ok(AnyModel::Lexical(ToyLexicalModel::new(vocab, ttable, *a, *b)?))
            }
        }
    }
}

/// Reads, parses and validates a model file.
pub fn load_model(path: impl AsRef<Path>) -> Result<AnyModel, ModelError> {
    let text = std::fs::read_to_string(path)?;
    ModelFile::parse(&text)?.build()
}

/// Any model that can be loaded from a file.
#[derive(Debug, Clone)]
pub enum AnyModel {
    Tabular(TabularModel),
    Lexical(ToyLexicalModel),
}

#[derive(Debug, Clone, PartialEq)]
pub enum AnyState {
    Tabular(TabularState),
    Lexical(LexicalState),
}

impl DecoderState for AnyState {
    fn prefix_len(&self) -> usize {
        match self {
            AnyState::Tabular(s) => s.prefix_len(),
            AnyState::Lexical(s) => s.prefix_len(),
        }
    }
}

impl SequenceModel for AnyModel {
    type State = AnyState;

    fn target_vocab(&self) -> &Vocabulary {
        match self {
            AnyModel::Tabular(m) => m.target_vocab(),
            AnyModel::Lexical(m) => m.target_vocab(),
        }
    }

    fn init_state(&self, source: &[String]) -> Result<AnyState, ModelError> {
        match self {
            AnyModel::Tabular(m) => m.init_state(source).map(AnyState::Tabular),
            AnyModel::Lexical(m) => m.init_state(source).map(AnyState::Lexical),
        }
    }

    fn advance(&self, state: &AnyState, token: TokenId) -> Result<AnyState, ModelError> {
        match (self, state) {
            (AnyModel::Tabular(m), AnyState::Tabular(s)) => m.advance(s, token).map(AnyState::Tabular),
            (AnyModel::Lexical(m), AnyState::Lexical(s)) => m.advance(s, token).map(AnyState::Lexical),
            _ => panic!("decoder state used with a different model kind"),
        }
    }

    fn logprobs<'a>(&'a self, state: &'a AnyState) -> Cow<'a, [LogScore]> {
        match (self, state) {
            (AnyModel::Tabular(m), AnyState::Tabular(s)) => m.logprobs(s),
            (AnyModel::Lexical(m), AnyState::Lexical(s)) => m.logprobs(s),
            _ => panic!("decoder state used with a different model kind"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::MAX_PROB;

    const M1: &str = r#"{
        "type": "tabular",
        "target_vocab": ["</s>", "a"],
        "contexts": {"": {"a": 0.6, "</s>": 0.4}},
        "default": {"a": 0.5, "</s>": 0.5}
    }"#;

    #[test]
    fn loads_m1() {
        let m = ModelFile::parse(M1).unwrap().build().unwrap();
        assert!(matches!(m, AnyModel::Tabular(_)));
        assert_eq!(m.target_vocab().tokens(), ["</s>", "a"]);
        let s = m.init_state(&[]).unwrap();
        assert!((m.logprobs(&s)[1] - 0.6f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn serialization_round_trips() {
        let file = ModelFile::parse(M1).unwrap();
        assert_eq!(ModelFile::parse(&file.to_json()).unwrap(), file);
    }

    #[test]
    fn normalization_failure_names_the_context() {
        let bad = M1.replace("\"a\": 0.6, \"</s>\": 0.4", "\"a\": 0.7, \"</s>\": 0.4");
        match ModelFile::parse(&bad).unwrap().build() {
            Err(ModelError::Validation { context, reason }) => {
                assert_eq!(context, "\"\"");
                assert!(reason.contains("sum"));
            }
            other => panic!("expected validation error, got {other:?}"),
        }
    }

    #[test]
    fn certain_token_is_rejected() {
        let bad = M1.replace("\"a\": 0.6, \"</s>\": 0.4", "\"a\": 1.0");
        let err = ModelFile::parse(&bad).unwrap().build().unwrap_err();
        assert!(err.to_string().contains(&MAX_PROB.to_string()), "{err}");
    }

    #[test]
    fn malformed_json_is_a_parse_error() {
        assert!(matches!(ModelFile::parse("{\"type\": \"tabular\""), Err(ModelError::Parse(_))));
        assert!(matches!(ModelFile::parse("{\"type\": \"neural\"}"), Err(ModelError::Parse(_))));
    }

    #[test]
    fn toy_lexical_file() {
        let json = r#"{"type": "toy_lexical", "target_vocab": ["</s>", "x"],
                       "ttable": {"s": {"x": 1.0}}, "a": 1.0, "b": 1.0}"#;
        let m = ModelFile::parse(json).unwrap().build().unwrap();
        let err = m.init_state(&["q".into()]).unwrap_err();
        assert!(matches!(err, ModelError::UnknownSourceToken(_)));
    }

    #[test]
    fn missing_file_is_io_error() {
        assert!(matches!(load_model("/nonexistent/model.json"), Err(ModelError::Io(_))));
    }
}
