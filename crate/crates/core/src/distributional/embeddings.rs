//! Skip-gram with negative sampling, plus the plain-text vector format.

use std::collections::{BTreeMap, HashMap};
use std::io::Write;
use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::resources::TaggedCorpus;

/// Dense word vectors of a fixed dimension.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingTable {
    dim: usize,
    words: Vec<String>,
    index: HashMap<String, usize>,
    data: Vec<f32>,
}

impl EmbeddingTable {
    pub fn new(dim: usize) -> Self {
        EmbeddingTable {
            dim,
            words: Vec::new(),
            index: HashMap::new(),
            data: Vec::new(),
        }
    }

    /// Adds or replaces the vector for `word`.
    pub fn insert(&mut self, word: &str, vector: &[f32]) -> Result<()> {
        if vector.len() != self.dim {
            return Err(Error::DimensionMismatch {
                left: self.dim,
                right: vector.len(),
            });
        }
        if vector.iter().any(|x| !x.is_finite()) {
            return Err(Error::NonFinite(format!("embedding of `{word}`")));
        }
        match self.index.get(word) {
            Some(&i) => self.data[i * self.dim..(i + 1) * self.dim].copy_from_slice(vector),
            None => {
                self.index.insert(word.to_string(), self.words.len());
                self.words.push(word.to_string());
                self.data.extend_from_slice(vector);
            }
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn get(&self, word: &str) -> Option<&[f32]> {
        self.index
            .get(word)
            .map(|&i| &self.data[i * self.dim..(i + 1) * self.dim])
    }

    /// Words in table order.
    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    /// Cosine similarity of two words' vectors, `None` if either is missing.
    pub fn similarity(&self, a: &str, b: &str) -> Option<f64> {
        let (u, v) = (self.get(a)?, self.get(b)?);
        Some(cosine(u, v).expect("table vectors share one dimension"))
    }

    /// Header `<count> <dim>`, then `<word> <v1> ... <vd>` with six decimals.
    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_with(path, |out| {
            writeln!(out, "{} {}", self.words.len(), self.dim)?;
            for (i, word) in self.words.iter().enumerate() {
                write!(out, "{word}")?;
                for x in &self.data[i * self.dim..(i + 1) * self.dim] {
                    write!(out, " {x:.6}")?;
                }
                writeln!(out)?;
            }
            Ok(())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut declared: Option<(usize, usize)> = None;
        let mut table = EmbeddingTable::new(0);
        io::for_each_line(path, |line_no, line| {
            if line.trim().is_empty() {
                return Ok(());
            }
            let mut cols = line.split_whitespace();
            let Some((count, dim)) = declared else {
                let count = cols.next().and_then(|c| c.parse::<usize>().ok());
                let dim = cols.next().and_then(|c| c.parse::<usize>().ok());
                match (count, dim, cols.next()) {
                    (Some(c), Some(d), None) => {
                        declared = Some((c, d));
                        table = EmbeddingTable::new(d);
                        return Ok(());
                    }
                    _ => return Err(Error::parse(path, line_no, "expected header `<count> <dim>`")),
                }
            };
            let word = cols.next().expect("nonblank line");
            let values: Vec<f32> = cols
                .map(|c| {
                    c.parse::<f32>()
                        .map_err(|e| Error::parse(path, line_no, format!("bad value `{c}`: {e}")))
                })
                .collect::<Result<_>>()?;
            if values.len() != dim {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("expected {dim} values, found {}", values.len()),
                ));
            }
            if values.iter().any(|v| !v.is_finite()) {
                return Err(Error::parse(path, line_no, "non-finite value"));
            }
            if table.len() == count {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("more rows than the {count} declared in the header"),
                ));
            }
            table.insert(word, &values)
        })?;
        match declared {
            None => Err(Error::parse(path, 1, "missing header")),
            Some((count, _)) if count != table.len() => Err(Error::parse(
                path,
                1,
                format!("header declares {count} rows, found {}", table.len()),
            )),
            Some(_) => Ok(table),
        }
    }
}

/// Cosine similarity; 0 when either vector has zero norm.
pub fn cosine(u: &[f32], v: &[f32]) -> Result<f64> {
    if u.len() != v.len() {
        return Err(Error::DimensionMismatch {
            left: u.len(),
            right: v.len(),
        });
    }
    let (mut dot, mut nu, mut nv) = (0.0f64, 0.0f64, 0.0f64);
    for (&a, &b) in u.iter().zip(v) {
        let (a, b) = (a as f64, b as f64);
        dot += a * b;
        nu += a * a;
        nv += b * b;
    }
    if nu == 0.0 || nv == 0.0 {
        return Ok(0.0);
    }
    Ok((dot / (nu.sqrt() * nv.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SkipGramConfig {
    pub dim: usize,
    pub window: usize,
    pub negatives: usize,
    pub epochs: usize,
    pub min_count: usize,
    pub learning_rate: f32,
    pub seed: u64,
}

impl Default for SkipGramConfig {
    fn default() -> Self {
        SkipGramConfig {
            dim: 300,
            window: 5,
            negatives: 5,
            epochs: 5,
            min_count: 5,
            learning_rate: 0.025,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct TrainingReport {
    pub vocab_size: usize,
    pub tokens: usize,
    /// Mean negative-sampling loss per (center, context) pair, per epoch.
    pub epoch_losses: Vec<f64>,
}

const UNIGRAM_POWER: f64 = 0.75;

struct NegativeSampler {
    cumulative: Vec<f64>,
}

impl NegativeSampler {
    fn new(counts: &[u64]) -> Self {
        let mut acc = 0.0;
        let cumulative = counts
            .iter()
            .map(|&c| {
                acc += (c as f64).powf(UNIGRAM_POWER);
                acc
            })
            .collect();
        NegativeSampler { cumulative }
    }

    fn sample(&self, rng: &mut ChaCha8Rng) -> usize {
        let total = *self.cumulative.last().expect("nonempty vocab");
        let x = rng.gen::<f64>() * total;
        self.cumulative
            .partition_point(|&c| c <= x)
            .min(self.cumulative.len() - 1)
    }
}

fn sigmoid(x: f32) -> f32 {
    1.0 / (1.0 + (-x.clamp(-30.0, 30.0)).exp())
}

fn dot(a: &[f32], b: &[f32]) -> f32 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Trains skip-gram vectors with negative sampling on the corpus lemmas.
///
/// Sentences are the context boundary. Single-threaded and fully determined
/// by `config.seed`.
pub fn train_skipgram(
    corpus: &TaggedCorpus,
    config: &SkipGramConfig,
) -> Result<(EmbeddingTable, TrainingReport)> {
    let mut counts: BTreeMap<&str, u64> = BTreeMap::new();
    for t in corpus.tokens() {
        *counts.entry(&t.lemma).or_default() += 1;
    }
    let mut vocab: Vec<(&str, u64)> = counts
        .into_iter()
        .filter(|&(_, c)| c >= config.min_count as u64)
        .collect();
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary {
            min_count: config.min_count,
        });
    }
    if config.dim == 0 {
        return Err(Error::Config("embedding dimension must be positive".into()));
    }
    vocab.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(b.0)));
    let ids: HashMap<&str, usize> = vocab.iter().enumerate().map(|(i, (w, _))| (*w, i)).collect();
    let sentences: Vec<Vec<usize>> = corpus
        .sentences()
        .map(|s| s.iter().filter_map(|t| ids.get(t.lemma.as_str()).copied()).collect::<Vec<_>>())
        .filter(|s: &Vec<usize>| s.len() > 1)
        .collect();
    let tokens: usize = sentences.iter().map(Vec::len).sum();

    let dim = config.dim;
    let n = vocab.len();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    let mut input: Vec<f32> = (0..n * dim)
        .map(|_| (rng.gen::<f32>() - 0.5) / dim as f32)
        .collect();
    let mut output = vec![0.0f32; n * dim];
    let sampler = NegativeSampler::new(&vocab.iter().map(|v| v.1).collect::<Vec<_>>());

    let total_steps = (tokens * config.epochs).max(1) as f32;
    let min_lr = config.learning_rate * 1e-4;
    let mut processed = 0usize;
    let mut grad = vec![0.0f32; dim];
    let mut report = TrainingReport {
        vocab_size: n,
        tokens,
        epoch_losses: Vec::with_capacity(config.epochs),
    };

    for _ in 0..config.epochs {
        let mut loss_sum = 0.0f64;
        let mut pairs = 0usize;
        for sentence in &sentences {
            for (pos, &center) in sentence.iter().enumerate() {
                let lr = (config.learning_rate * (1.0 - processed as f32 / total_steps)).max(min_lr);
                processed += 1;
                let shrink = if config.window > 0 {
                    rng.gen_range(0..config.window)
                } else {
                    0
                };
                let span = config.window - shrink;
                let lo = pos.saturating_sub(span);
                let hi = (pos + span + 1).min(sentence.len());
                for (cpos, &context) in sentence.iter().enumerate().take(hi).skip(lo) {
                    if cpos == pos {
                        continue;
                    }
                    grad.iter_mut().for_each(|g| *g = 0.0);
                    let center_vec = center * dim..(center + 1) * dim;
                    for d in 0..=config.negatives {
                        let (target, label) = if d == 0 {
                            (context, 1.0f32)
                        } else {
                            let t = sampler.sample(&mut rng);
                            if t == context {
                                continue;
                            }
                            (t, 0.0f32)
                        };
                        let out = &mut output[target * dim..(target + 1) * dim];
                        let inp = &input[center_vec.clone()];
                        let score = sigmoid(dot(inp, out));
                        loss_sum -= if label == 1.0 {
                            (score.max(1e-7) as f64).ln()
                        } else {
                            ((1.0 - score).max(1e-7) as f64).ln()
                        };
                        let g = (label - score) * lr;
                        for k in 0..dim {
                            grad[k] += g * out[k];
                            out[k] += g * inp[k];
                        }
                    }
                    for (x, g) in input[center_vec].iter_mut().zip(&grad) {
                        *x += g;
                    }
                    pairs += 1;
                }
            }
        }
        report
            .epoch_losses
            .push(if pairs == 0 { 0.0 } else { loss_sum / pairs as f64 });
    }

    let mut table = EmbeddingTable::new(dim);
    for (i, (word, _)) in vocab.iter().enumerate() {
        table.insert(word, &input[i * dim..(i + 1) * dim])?;
    }
    Ok((table, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::resources::{Document, Token};
    use proptest::prelude::{prop, prop_assert, proptest};

    /// Two clusters of words, each sharing a private pool of context words.
    fn clustered_corpus() -> TaggedCorpus {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut sentences = Vec::new();
        for _ in 0..600 {
            let cluster = rng.gen_range(0..2);
            let head = format!("{}{}", ["ant", "bee"][cluster], rng.gen_range(0..4));
            let mut s = vec![Token::new(&head, &head, "n")];
            for _ in 0..5 {
                let ctx = format!("{}ctx{}", ["p", "q"][cluster], rng.gen_range(0..6));
                s.push(Token::new(&ctx, &ctx, "n"));
            }
            sentences.push(s);
        }
        TaggedCorpus::new(vec![Document {
            category: None,
            sentences,
        }])
    }

    fn small_config() -> SkipGramConfig {
        SkipGramConfig {
            dim: 24,
            epochs: 5,
            min_count: 1,
            seed: 11,
            ..SkipGramConfig::default()
        }
    }

    #[test]
    fn cosine_cases() {
        assert!((cosine(&[1.0, 2.0], &[1.0, 2.0]).unwrap() - 1.0).abs() < 1e-12);
        assert_eq!(cosine(&[1.0, 0.0], &[0.0, 1.0]).unwrap(), 0.0);
        let c = cosine(&[1.0, 1.0], &[1.0, 0.0]).unwrap();
        assert!((c - std::f64::consts::FRAC_1_SQRT_2).abs() < 1e-4);
        assert_eq!(cosine(&[0.0, 0.0], &[1.0, 0.0]).unwrap(), 0.0);
        assert!(cosine(&[1.0], &[1.0, 0.0]).is_err());
    }

    #[test]
    fn clusters_separate() {
        let (table, _) = train_skipgram(&clustered_corpus(), &small_config()).unwrap();
        let words = |p: &'static str| (0..4).map(move |i| format!("{p}{i}"));
        let (mut intra, mut ni, mut inter, mut nx) = (0.0, 0, 0.0, 0);
        for a in words("ant").chain(words("bee")) {
            for b in words("ant").chain(words("bee")) {
                if a >= b {
                    continue;
                }
                let s = table.similarity(&a, &b).unwrap();
                if a[..3] == b[..3] {
                    intra += s;
                    ni += 1;
                } else {
                    inter += s;
                    nx += 1;
                }
            }
        }
        let (intra, inter) = (intra / ni as f64, inter / nx as f64);
        assert!(intra > inter, "intra {intra} inter {inter}");
    }

    #[test]
    fn loss_decreases() {
        let (_, report) = train_skipgram(&clustered_corpus(), &small_config()).unwrap();
        for w in report.epoch_losses.windows(2) {
            assert!(w[1] <= w[0] * 1.05, "{:?}", report.epoch_losses);
        }
    }

    #[test]
    fn deterministic_for_seed() {
        let c = clustered_corpus();
        let (a, _) = train_skipgram(&c, &small_config()).unwrap();
        let (b, _) = train_skipgram(&c, &small_config()).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn empty_vocabulary_is_an_error() {
        let cfg = SkipGramConfig {
            min_count: 100_000,
            ..small_config()
        };
        assert!(matches!(
            train_skipgram(&clustered_corpus(), &cfg),
            Err(Error::EmptyVocabulary { .. })
        ));
    }

    #[test]
    fn trained_table_reloads() {
        let (table, _) = train_skipgram(&clustered_corpus(), &small_config()).unwrap();
        let f = tempfile::NamedTempFile::new().unwrap();
        table.write(f.path()).unwrap();
        let back = EmbeddingTable::load(f.path()).unwrap();
        assert_eq!(back.len(), table.len());
        for w in table.words() {
            for (x, y) in table.get(w).unwrap().iter().zip(back.get(w).unwrap()) {
                assert!((x - y).abs() <= 1e-6);
            }
        }
    }

    #[test]
    fn text_format() {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "2 3\nx 1 2 3\ny 0.5 0 -1").unwrap();
        let t = EmbeddingTable::load(f.path()).unwrap();
        assert_eq!(t.get("y").unwrap(), &[0.5, 0.0, -1.0]);

        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "2 3\nx 1 2 3\ny 0.5 0").unwrap();
        match EmbeddingTable::load(f.path()) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("{other:?}"),
        }

        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "3 1\nx 1\ny 2").unwrap();
        assert!(EmbeddingTable::load(f.path()).is_err());

        let mut f = tempfile::NamedTempFile::new().unwrap();
        writeln!(f, "1 1\nx NaN").unwrap();
        assert!(EmbeddingTable::load(f.path()).is_err());
    }

    proptest! {
        #[test]
        fn cosine_bounds(u in prop::collection::vec(-10.0f32..10.0, 5), v in prop::collection::vec(-10.0f32..10.0, 5)) {
            let c = cosine(&u, &v).unwrap();
            prop_assert!(c.abs() <= 1.0 + 1e-12);
            if u.iter().any(|x| *x != 0.0) {
                prop_assert!((cosine(&u, &u).unwrap() - 1.0).abs() < 1e-9);
            }
        }
    }
}
