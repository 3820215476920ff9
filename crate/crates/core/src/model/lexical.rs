use std::borrow::Cow;
use std::collections::{BTreeMap, HashMap};
use std::sync::Arc;

use super::{check_advance, DecoderState, Distribution, ModelError, SequenceModel, SUM_TOLERANCE};
use crate::types::{LogScore, TokenId, Vocabulary, EOS};

/// Clamp applied to the stopping probability.
const HAZARD_FLOOR: f64 = 1e-6;

/// Bag-of-words translation model with a logistic stopping hazard.
///
/// At prefix length `j` for a source of length `I` the model stops with
/// probability `1 / (1 + exp(-a (j - b I)))`, clamped to
/// `[1e-6, 1 - 1e-6]`. The remaining mass is spread over content tokens in
/// proportion to the source-averaged translation table rows.
#[derive(Debug, Clone)]
pub struct ToyLexicalModel {
    vocab: Vocabulary,
    /// Probabilities indexed by target id; the EOS slot is always zero.
    ttable: HashMap<String, Vec<f64>>,
    a: f64,
    b: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LexicalState {
    prefix_len: usize,
    source_len: usize,
    /// Log of the content distribution, indexed by target id.
    content: Arc<[LogScore]>,
}

impl DecoderState for LexicalState {
    fn prefix_len(&self) -> usize {
        self.prefix_len
    }
}

impl ToyLexicalModel {
    pub fn new(
        vocab: Vocabulary,
        ttable: &BTreeMap<String, Distribution>,
        a: f64,
        b: f64,
    ) -> Result<Self, ModelError> {
        if !a.is_finite() || !b.is_finite() {
            return Err(ModelError::validation("a/b", "hazard parameters must be finite"));
        }
        if ttable.is_empty() {
            return Err(ModelError::validation("ttable", "translation table is empty"));
        }
        let mut rows = HashMap::with_capacity(ttable.len());
        for (src, dist) in ttable {
            let context = format!("ttable[{src:?}]");
            let mut row = vec![0.0; vocab.len()];
            for (tok, &p) in dist {
                let id = match vocab.id(tok) {
                    None => return Err(ModelError::validation(&context, format!("unknown token {tok:?}"))),
                    Some(EOS) => {
                        return Err(ModelError::validation(&context, "translation rows may not contain </s>"))
                    }
                    Some(id) => id,
                };
                if !p.is_finite() || p < 0.0 {
                    return Err(ModelError::validation(&context, format!("invalid probability {p}")));
                }
                row[id] = p;
            }
            let sum: f64 = row.iter().sum();
            if (sum - 1.0).abs() > SUM_TOLERANCE {
                return Err(ModelError::validation(&context, format!("probabilities sum to {sum}, not 1")));
            }
            rows.insert(src.clone(), row);
        }
        Ok(Self { vocab, ttable: rows, a, b })
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn b(&self) -> f64 {
        self.b
    }

    /// Stopping probability after `prefix_len` target tokens.
    pub fn p_eos(&self, prefix_len: usize, source_len: usize) -> f64 {
        let z = -self.a * (prefix_len as f64 - self.b * source_len as f64);
        (1.0 / (1.0 + z.exp())).clamp(HAZARD_FLOOR, 1.0 - HAZARD_FLOOR)
    }
}

impl SequenceModel for ToyLexicalModel {
    type State = LexicalState;

    fn target_vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    fn init_state(&self, source: &[String]) -> Result<LexicalState, ModelError> {
        if source.is_empty() {
            return Err(ModelError::EmptySource);
        }
        let mut mix = vec![0.0; self.vocab.len()];
        for tok in source {
            let row = self
                .ttable
                .get(tok)
                .ok_or_else(|| ModelError::UnknownSourceToken(tok.clone()))?;
            for (m, p) in mix.iter_mut().zip(row) {
                *m += p;
            }
        }
        let total: f64 = mix.iter().sum();
        let content: Arc<[LogScore]> = mix.iter().map(|m| (m / total).ln()).collect();
        Ok(LexicalState { prefix_len: 0, source_len: source.len(), content })
    }

    fn advance(&self, state: &LexicalState, token: TokenId) -> Result<LexicalState, ModelError> {
        if token == EOS {
            return Err(ModelError::AdvancePastEos);
        }
        check_advance(&state.content, token)?;
        Ok(LexicalState { prefix_len: state.prefix_len + 1, ..state.clone() })
    }

    fn logprobs<'a>(&'a self, state: &'a LexicalState) -> Cow<'a, [LogScore]> {
        let p = self.p_eos(state.prefix_len, state.source_len);
        let keep = (1.0 - p).ln();
        let mut out: Vec<LogScore> = state.content.iter().map(|q| keep + q).collect();
        out[EOS] = p.ln();
        Cow::Owned(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(a: f64, b: f64) -> ToyLexicalModel {
        let vocab = Vocabulary::new(["</s>", "x", "y"]).unwrap();
        let mut tt = BTreeMap::new();
        tt.insert("s".to_string(), [("x".to_string(), 0.75), ("y".to_string(), 0.25)].into());
        tt.insert("t".to_string(), [("x".to_string(), 0.25), ("y".to_string(), 0.75)].into());
        ToyLexicalModel::new(vocab, &tt, a, b).unwrap()
    }

    fn src(toks: &[&str]) -> Vec<String> {
        toks.iter().map(|t| t.to_string()).collect()
    }

    #[test]
    fn logistic_hazard_at_the_midpoint() {
        let m = model(1.0, 1.0);
        // j = I = 1: logistic(0) = 1/2
        let oracle = 1.0 / (1.0 + (0.0f64).exp());
        assert!((m.p_eos(1, 1) - oracle).abs() < 1e-15);
        let s = m.advance(&m.init_state(&src(&["s"])).unwrap(), 1).unwrap();
        assert!((m.logprobs(&s)[0] - (-0.693_147_180_559_945_3)).abs() < 1e-12);
    }

    #[test]
    fn hazard_is_clamped() {
        let m = model(50.0, 0.0);
        assert_eq!(m.p_eos(100, 1), 1.0 - 1e-6);
        let m = model(50.0, 10.0);
        assert_eq!(m.p_eos(0, 10), 1e-6);
    }

    #[test]
    fn hazard_increases_with_prefix_length() {
        let m = model(0.8, 0.6);
        for i in 1..6 {
            for j in 0..50 {
                let (lo, hi) = (m.p_eos(j, i), m.p_eos(j + 1, i));
                // strict until the upper clamp is reached
                assert!(hi > lo || hi == 1.0 - 1e-6, "j={j} I={i}");
            }
        }
        let m = model(0.1, 0.6);
        for j in 0..50 {
            assert!(m.p_eos(j + 1, 4) > m.p_eos(j, 4));
        }
    }

    #[test]
    fn content_mass_is_source_average() {
        let m = model(1.0, 1.0);
        let s = m.init_state(&src(&["s", "t", "t"])).unwrap();
        let lp = m.logprobs(&s);
        let p = m.p_eos(0, 3);
        // q(x) = (0.75 + 0.25 + 0.25) / 3
        let qx = 1.25 / 3.0;
        assert!((lp[1] - ((1.0 - p) * qx).ln()).abs() < 1e-12);
        assert!((lp[2] - ((1.0 - p) * (1.0 - qx)).ln()).abs() < 1e-12);
        let total: f64 = lp.iter().map(|v| v.exp()).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn source_errors() {
        let m = model(1.0, 1.0);
        assert!(matches!(m.init_state(&src(&["s", "zz"])), Err(ModelError::UnknownSourceToken(t)) if t == "zz"));
        assert!(matches!(m.init_state(&[]), Err(ModelError::EmptySource)));
        let s = m.init_state(&src(&["s"])).unwrap();
        assert!(matches!(m.advance(&s, 0), Err(ModelError::AdvancePastEos)));
    }

    #[test]
    fn rows_may_not_name_eos() {
        let vocab = Vocabulary::new(["</s>", "x"]).unwrap();
        let mut tt = BTreeMap::new();
        tt.insert("s".to_string(), [("</s>".to_string(), 0.5), ("x".to_string(), 0.5)].into());
        assert!(matches!(ToyLexicalModel::new(vocab, &tt, 1.0, 1.0), Err(ModelError::Validation { .. })));
    }
}
