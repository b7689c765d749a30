use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::io;
use crate::resources::TaggedCorpus;

/// Sentence-level co-occurrence counts over token instances.
///
/// Every unordered pair of token positions in a sentence whose lemmas differ
/// adds one to the pair's count.
#[derive(Debug, Clone, Default)]
pub struct CooccurrenceCounts {
    words: Vec<String>,
    ids: HashMap<String, u32>,
    frequency: Vec<u64>,
    pairs: HashMap<(u32, u32), u64>,
}

fn ordered(a: u32, b: u32) -> (u32, u32) {
    if a < b {
        (a, b)
    } else {
        (b, a)
    }
}

impl CooccurrenceCounts {
    /// Counts pairs over `corpus`, sharding documents over the current rayon
    /// pool. Integer sums make the result independent of the sharding.
    pub fn from_corpus(corpus: &TaggedCorpus) -> Self {
        let words: Vec<String> = corpus.vocabulary().into_iter().collect();
        let ids: HashMap<String, u32> = words
            .iter()
            .enumerate()
            .map(|(i, w)| (w.clone(), i as u32))
            .collect();

        let (frequency, pairs) = corpus
            .documents
            .par_iter()
            .fold(
                || (vec![0u64; words.len()], HashMap::<(u32, u32), u64>::new()),
                |(mut freq, mut pairs), doc| {
                    for sentence in &doc.sentences {
                        let toks: Vec<u32> = sentence.iter().map(|t| ids[&t.lemma]).collect();
                        for (i, &a) in toks.iter().enumerate() {
                            freq[a as usize] += 1;
                            for &b in &toks[i + 1..] {
                                if a != b {
                                    *pairs.entry(ordered(a, b)).or_default() += 1;
                                }
                            }
                        }
                    }
                    (freq, pairs)
                },
            )
            .reduce(
                || (vec![0u64; words.len()], HashMap::new()),
                |(mut fa, mut pa), (fb, pb)| {
                    for (x, y) in fa.iter_mut().zip(fb) {
                        *x += y;
                    }
                    for (k, v) in pb {
                        *pa.entry(k).or_default() += v;
                    }
                    (fa, pa)
                },
            );

        CooccurrenceCounts {
            words,
            ids,
            frequency,
            pairs,
        }
    }

    pub fn count(&self, a: &str, b: &str) -> u64 {
        match (self.ids.get(a), self.ids.get(b)) {
            (Some(&x), Some(&y)) if x != y => self.pairs.get(&ordered(x, y)).copied().unwrap_or(0),
            _ => 0,
        }
    }

    /// Number of token occurrences of `word`.
    pub fn frequency(&self, word: &str) -> u64 {
        self.ids
            .get(word)
            .map_or(0, |&i| self.frequency[i as usize])
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }

    fn neighbors(&self) -> Vec<Vec<(u32, u64)>> {
        let mut adj = vec![Vec::new(); self.words.len()];
        for (&(a, b), &c) in &self.pairs {
            adj[a as usize].push((b, c));
            adj[b as usize].push((a, c));
        }
        adj
    }
}

/// The top co-occurring lemmas of a word.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextVector {
    pub word: String,
    pub neighbors: BTreeSet<String>,
}

/// Context vectors for every word of a corpus that passed the frequency cut.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ContextVectors {
    vectors: BTreeMap<String, ContextVector>,
}

impl ContextVectors {
    pub fn from_sets<W, N>(sets: impl IntoIterator<Item = (W, N)>) -> Self
    where
        W: Into<String>,
        N: IntoIterator,
        N::Item: Into<String>,
    {
        let vectors = sets
            .into_iter()
            .map(|(w, ns)| {
                let word: String = w.into();
                let neighbors = ns.into_iter().map(Into::into).collect();
                (word.clone(), ContextVector { word, neighbors })
            })
            .collect();
        ContextVectors { vectors }
    }

    pub fn get(&self, word: &str) -> Option<&ContextVector> {
        self.vectors.get(word)
    }

    /// Neighbor set of `word`; empty when the word has no vector.
    pub fn neighbors(&self, word: &str) -> &BTreeSet<String> {
        static EMPTY: BTreeSet<String> = BTreeSet::new();
        self.vectors.get(word).map_or(&EMPTY, |cv| &cv.neighbors)
    }

    pub fn iter(&self) -> impl Iterator<Item = &ContextVector> {
        self.vectors.values()
    }

    pub fn len(&self) -> usize {
        self.vectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vectors.is_empty()
    }

    /// One line per word: `word<TAB>neighbor<TAB>neighbor...`, neighbors sorted.
    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_with(path, |out| {
            for cv in self.vectors.values() {
                write!(out, "{}", cv.word)?;
                for n in &cv.neighbors {
                    write!(out, "\t{n}")?;
                }
                writeln!(out)?;
            }
            Ok(())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut vectors = BTreeMap::new();
        io::for_each_line(path, |line_no, line| {
            if line.is_empty() {
                return Ok(());
            }
            let mut cols = line.split('\t');
            let word = cols.next().unwrap_or("").to_string();
            if word.is_empty() {
                return Err(Error::parse(path, line_no, "empty word"));
            }
            let neighbors = cols.map(str::to_string).collect();
            vectors.insert(word.clone(), ContextVector { word, neighbors });
            Ok(())
        })?;
        Ok(ContextVectors { vectors })
    }
}

/// Builds the top-`k` context vector of every lemma occurring at least
/// `min_count` times. Ties in co-occurrence count are broken by ascending lemma.
pub fn build_context_vectors(corpus: &TaggedCorpus, k: usize, min_count: u64) -> ContextVectors {
    let counts = CooccurrenceCounts::from_corpus(corpus);
    context_vectors_from_counts(&counts, k, min_count)
}

pub fn context_vectors_from_counts(
    counts: &CooccurrenceCounts,
    k: usize,
    min_count: u64,
) -> ContextVectors {
    let adjacency = counts.neighbors();
    let vectors = adjacency
        .into_iter()
        .enumerate()
        .filter(|(i, _)| counts.frequency[*i] >= min_count)
        .map(|(i, mut row)| {
            // words are sorted, so id order is lexicographic order
            row.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
            let word = counts.words[i].clone();
            let neighbors = row
                .into_iter()
                .take(k)
                .map(|(j, _)| counts.words[j as usize].clone())
                .collect();
            (word.clone(), ContextVector { word, neighbors })
        })
        .collect();
    ContextVectors { vectors }
}

/// |A ∩ B| / |A ∪ B|, or 0 when both sets are empty.
pub fn jaccard<T: Ord>(a: &BTreeSet<T>, b: &BTreeSet<T>) -> f64 {
    let inter = a.intersection(b).count();
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}

/// Jaccard index over two strictly increasing id lists.
pub(crate) fn jaccard_sorted(a: &[u32], b: &[u32]) -> f64 {
    let (mut i, mut j, mut inter) = (0, 0, 0usize);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = a.len() + b.len() - inter;
    if union == 0 {
        0.0
    } else {
        inter as f64 / union as f64
    }
}
