//! Reproducible toy models and corpora for tests, benchmarks and demos.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cli::CorpusLine;
use crate::model::{Distribution, ModelFile, TabularModel, MAX_PROB};
use crate::types::EOS_TOKEN;

/// Two-token model whose global optimum is the empty translation while
/// greedy decoding returns `a </s>`.
pub fn m1_file() -> ModelFile {
    let dist = |a: f64, eos: f64| -> Distribution {
        [("a".to_string(), a), (EOS_TOKEN.to_string(), eos)].into()
    };
    ModelFile::Tabular {
        target_vocab: vec![EOS_TOKEN.into(), "a".into()],
        contexts: [(String::new(), dist(0.6, 0.4))].into(),
        default: dist(0.5, 0.5),
        source_override: BTreeMap::new(),
    }
}

pub fn m1() -> TabularModel {
    match m1_file().build() {
        Ok(crate::model::AnyModel::Tabular(m)) => m,
        _ => unreachable!("M1 is a valid tabular model"),
    }
}

/// Random conditional LM over 3 or 4 target tokens with explicit tables for
/// a random subset of prefixes up to depth 2.
pub fn random_tabular(rng: &mut impl Rng) -> ModelFile {
    let size = rng.gen_range(3..=4);
    let mut vocab = vec![EOS_TOKEN.to_string()];
    vocab.extend(["a", "b", "c"].iter().take(size - 1).map(|s| s.to_string()));
    let content = &vocab[1..];

    let mut prefixes = vec![String::new()];
    for x in content {
        prefixes.push(x.clone());
        for y in content {
            prefixes.push(format!("{x} {y}"));
        }
    }
    let mut contexts = BTreeMap::new();
    for p in prefixes {
        if rng.gen_bool(0.6) {
            contexts.insert(p, random_distribution(rng, &vocab, true));
        }
    }
    let default = random_distribution(rng, &vocab, false);
    ModelFile::Tabular { target_vocab: vocab, contexts, default, source_override: BTreeMap::new() }
}

fn random_distribution(rng: &mut impl Rng, vocab: &[String], allow_zero_eos: bool) -> Distribution {
    loop {
        let weights: Vec<f64> = vocab
            .iter()
            .enumerate()
            .map(|(i, _)| {
                let zero_p = if i == 0 { if allow_zero_eos { 0.1 } else { 0.0 } } else { 0.15 };
                if rng.gen_bool(zero_p) {
                    0.0
                } else {
                    let u: f64 = rng.gen_range(0.02..1.0);
                    u * u
                }
            })
            .collect();
        let total: f64 = weights.iter().sum();
        if total <= 0.0 || weights.iter().filter(|&&w| w > 0.0).count() < 2 {
            continue;
        }
        let probs: Vec<f64> = weights.iter().map(|w| w / total).collect();
        if probs.iter().any(|&p| p > MAX_PROB) {
            continue;
        }
        return vocab
            .iter()
            .zip(probs)
            .filter(|(_, p)| *p > 0.0)
            .map(|(t, p)| (t.clone(), p))
            .collect();
    }
}

/// The seeded set of random tabular models used for cross-checking search
/// against enumeration.
pub fn random_tabular_set(seed: u64, count: usize) -> Vec<ModelFile> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count).map(|_| random_tabular(&mut rng)).collect()
}

/// Parameters of the synthetic lexical translation task.
#[derive(Debug, Clone, Copy)]
pub struct LexicalTask {
    pub vocab_size: usize,
    pub a: f64,
    pub b: f64,
    /// Probability of a source word's own translation.
    pub fidelity: f64,
}

impl Default for LexicalTask {
    fn default() -> Self {
        Self { vocab_size: 6, a: 0.8, b: 0.6, fidelity: 0.7 }
    }
}

impl LexicalTask {
    /// Source word `s{i}` translates to `t{i}` with probability `fidelity`;
    /// the rest is spread over other target words with seeded weights.
    pub fn model_file(&self, seed: u64) -> ModelFile {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = self.vocab_size;
        let mut target_vocab = vec![EOS_TOKEN.to_string()];
        target_vocab.extend((0..n).map(|i| format!("t{i}")));
        let mut ttable = BTreeMap::new();
        for i in 0..n {
            let noise: Vec<f64> = (0..n).map(|j| if j == i { 0.0 } else { rng.gen_range(0.1..1.0) }).collect();
            let noise_total: f64 = noise.iter().sum();
            let row: Distribution = (0..n)
                .map(|j| {
                    let p = if j == i {
                        self.fidelity
                    } else {
                        (1.0 - self.fidelity) * noise[j] / noise_total
                    };
                    (format!("t{j}"), p)
                })
                .collect();
            ttable.insert(format!("s{i}"), row);
        }
        ModelFile::ToyLexical { target_vocab, ttable, a: self.a, b: self.b }
    }

    /// Sentences of 3 to 12 source words; the reference is the word-by-word
    /// translation.
    pub fn corpus(&self, seed: u64, sentences: usize) -> Vec<CorpusLine> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let words: Vec<usize> = (0..self.vocab_size).collect();
        (0..sentences)
            .map(|i| {
                let len = rng.gen_range(3..=12);
                let src: Vec<usize> = (0..len).map(|_| *words.choose(&mut rng).unwrap()).collect();
                CorpusLine {
                    id: format!("s{i:04}"),
                    source: src.iter().map(|w| format!("s{w}")).collect::<Vec<_>>().join(" "),
                    reference: Some(src.iter().map(|w| format!("t{w}")).collect::<Vec<_>>().join(" ")),
                }
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn random_models_are_valid_and_reproducible() {
        let a = random_tabular_set(7, 50);
        let b = random_tabular_set(7, 50);
        assert_eq!(a, b);
        for f in &a {
            f.build().unwrap();
        }
    }

    #[test]
    fn lexical_task_builds() {
        let task = LexicalTask::default();
        task.model_file(1).build().unwrap();
        let corpus = task.corpus(1, 20);
        assert_eq!(corpus.len(), 20);
        for line in corpus {
            let n = line.source.split_whitespace().count();
            assert!((3..=12).contains(&n));
        }
    }
}
