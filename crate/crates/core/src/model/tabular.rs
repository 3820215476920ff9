use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};

use super::{check_advance, DecoderState, Distribution, ModelError, SequenceModel, MAX_PROB, SUM_TOLERANCE};
use crate::types::{LogScore, TokenId, Vocabulary, EOS};

/// Conditional language model given by explicit next-token tables keyed on
/// the target prefix. Prefixes without an entry use the default table.
/// A source sentence listed in the overrides swaps in its own context map.
#[derive(Debug, Clone)]
pub struct TabularModel {
    vocab: Vocabulary,
    /// Log-probability vectors, indexed by the context maps below.
    dists: Vec<Vec<LogScore>>,
    default: usize,
    /// `[0]` holds the top-level contexts, later entries the overrides.
    context_maps: Vec<HashMap<String, usize>>,
    overrides: HashMap<String, usize>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TabularState {
    prefix_len: usize,
    key: String,
    map: usize,
    dist: usize,
}

impl DecoderState for TabularState {
    fn prefix_len(&self) -> usize {
        self.prefix_len
    }
}

impl TabularState {
    /// Space-joined prefix tokens.
    pub fn key(&self) -> &str {
        &self.key
    }
}

impl TabularModel {
    pub fn new(
        vocab: Vocabulary,
        contexts: &BTreeMap<String, Distribution>,
        default: &Distribution,
        source_override: &BTreeMap<String, BTreeMap<String, Distribution>>,
    ) -> Result<Self, ModelError> {
        let mut dists = Vec::new();
        dists.push(to_logprobs(&vocab, "default", default)?);
        let mut context_maps = vec![build_map(&vocab, contexts, "", &mut dists)?];
        let mut overrides = HashMap::new();
        for (source, ctxs) in source_override {
            let label = format!("source_override[{source:?}]");
            context_maps.push(build_map(&vocab, ctxs, &label, &mut dists)?);
            let canonical = source.split_whitespace().collect::<Vec<_>>().join(" ");
            overrides.insert(canonical, context_maps.len() - 1);
        }
        Ok(Self { vocab, dists, default: 0, context_maps, overrides })
    }

    fn resolve(&self, map: usize, key: &str) -> usize {
        self.context_maps[map].get(key).copied().unwrap_or(self.default)
    }
}

impl SequenceModel for TabularModel {
    type State = TabularState;

    fn target_vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    fn init_state(&self, source: &[String]) -> Result<TabularState, ModelError> {
        let map = if self.overrides.is_empty() {
            0
        } else {
            self.overrides.get(&source.join(" ")).copied().unwrap_or(0)
        };
        let key = String::new();
        let dist = self.resolve(map, &key);
        Ok(TabularState { prefix_len: 0, key, map, dist })
    }

    fn advance(&self, state: &TabularState, token: TokenId) -> Result<TabularState, ModelError> {
        check_advance(&self.dists[state.dist], token)?;
        let tok = self.vocab.token(token).ok_or(ModelError::TokenOutOfRange(token))?;
        let key = if state.key.is_empty() {
            tok.to_string()
        } else {
            format!("{} {}", state.key, tok)
        };
        let dist = self.resolve(state.map, &key);
        Ok(TabularState { prefix_len: state.prefix_len + 1, key, map: state.map, dist })
    }

    fn logprobs<'a>(&'a self, state: &'a TabularState) -> Cow<'a, [LogScore]> {
        Cow::Borrowed(&self.dists[state.dist])
    }
}

fn build_map(
    vocab: &Vocabulary,
    contexts: &BTreeMap<String, Distribution>,
    label: &str,
    dists: &mut Vec<Vec<LogScore>>,
) -> Result<HashMap<String, usize>, ModelError> {
    let mut map = HashMap::with_capacity(contexts.len());
    for (key, dist) in contexts {
        let where_ = format!("{label}{key:?}");
        let canonical = canonical_key(vocab, key).map_err(|r| ModelError::validation(&where_, r))?;
        dists.push(to_logprobs(vocab, &where_, dist)?);
        if map.insert(canonical, dists.len() - 1).is_some() {
            return Err(ModelError::validation(where_, "duplicate context after normalizing whitespace"));
        }
    }
    Ok(map)
}

fn canonical_key(vocab: &Vocabulary, key: &str) -> Result<String, String> {
    let toks: Vec<&str> = key.split_whitespace().collect();
    for tok in &toks {
        match vocab.id(tok) {
            None => return Err(format!("unknown token {tok:?} in context key")),
            Some(EOS) => return Err("context key may not contain </s>".into()),
            Some(_) => {}
        }
    }
    Ok(toks.join(" "))
}

/// Validates an explicit distribution and converts it to log space.
pub(crate) fn to_logprobs(
    vocab: &Vocabulary,
    context: &str,
    dist: &Distribution,
) -> Result<Vec<LogScore>, ModelError> {
    let mut probs = vec![0.0; vocab.len()];
    for (tok, &p) in dist {
        let id = vocab
            .id(tok)
            .ok_or_else(|| ModelError::validation(context, format!("unknown token {tok:?}")))?;
        if !p.is_finite() || p < 0.0 {
            return Err(ModelError::validation(context, format!("invalid probability {p} for {tok:?}")));
        }
        probs[id] = p;
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > SUM_TOLERANCE {
        return Err(ModelError::validation(context, format!("probabilities sum to {sum}, not 1")));
    }
    let max = probs.iter().copied().fold(0.0, f64::max);
    if max > MAX_PROB {
        return Err(ModelError::validation(
            context,
            format!("max probability {max} exceeds {MAX_PROB}"),
        ));
    }
    Ok(probs.into_iter().map(f64::ln).collect())
}
