use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io;
use crate::resources::TaggedCorpus;

/// A word's probability distribution over document categories.
#[derive(Debug, Clone, PartialEq)]
pub struct DomainDistribution(pub Vec<f64>);

impl DomainDistribution {
    pub fn probabilities(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Domain distributions over one fixed category ordering.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct DomainTable {
    categories: Vec<String>,
    distributions: BTreeMap<String, DomainDistribution>,
}

impl DomainTable {
    pub fn new(categories: Vec<String>) -> Self {
        DomainTable {
            categories,
            distributions: BTreeMap::new(),
        }
    }

    pub fn insert(&mut self, word: &str, dist: DomainDistribution) -> Result<()> {
        if dist.len() != self.categories.len() {
            return Err(Error::DimensionMismatch {
                left: self.categories.len(),
                right: dist.len(),
            });
        }
        self.distributions.insert(word.to_string(), dist);
        Ok(())
    }

    /// Per word, the share of its occurrences in labeled documents that fall in
    /// each category. Categories are the corpus labels in sorted order; words
    /// never seen in a labeled document get no entry.
    pub fn from_corpus(corpus: &TaggedCorpus) -> Self {
        let categories = corpus.categories();
        let slot: BTreeMap<&str, usize> = categories
            .iter()
            .enumerate()
            .map(|(i, c)| (c.as_str(), i))
            .collect();
        let mut counts: BTreeMap<&str, Vec<u64>> = BTreeMap::new();
        for doc in &corpus.documents {
            let Some(label) = &doc.category else { continue };
            let i = slot[label.as_str()];
            for token in doc.sentences.iter().flatten() {
                counts
                    .entry(&token.lemma)
                    .or_insert_with(|| vec![0; categories.len()])[i] += 1;
            }
        }
        let distributions = counts
            .into_iter()
            .map(|(word, row)| {
                let total: u64 = row.iter().sum();
                let probs = row.iter().map(|&c| c as f64 / total as f64).collect();
                (word.to_string(), DomainDistribution(probs))
            })
            .collect();
        DomainTable {
            categories,
            distributions,
        }
    }

    pub fn categories(&self) -> &[String] {
        &self.categories
    }

    pub fn get(&self, word: &str) -> Option<&DomainDistribution> {
        self.distributions.get(word)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &DomainDistribution)> {
        self.distributions.iter().map(|(w, d)| (w.as_str(), d))
    }

    pub fn len(&self) -> usize {
        self.distributions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.distributions.is_empty()
    }

    /// Header `#categories<TAB>c1<TAB>...`, then `word<TAB>p1<TAB>...`.
    ///
    /// Probabilities use the shortest round-trip form, so reloading is exact.
    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_with(path, |out| {
            write!(out, "#categories")?;
            for c in &self.categories {
                write!(out, "\t{c}")?;
            }
            writeln!(out)?;
            for (word, dist) in &self.distributions {
                write!(out, "{word}")?;
                for p in &dist.0 {
                    write!(out, "\t{p:e}")?;
                }
                writeln!(out)?;
            }
            Ok(())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut table: Option<DomainTable> = None;
        io::for_each_line(path, |line_no, line| {
            if line.is_empty() {
                return Ok(());
            }
            let mut cols = line.split('\t');
            let head = cols.next().unwrap_or("");
            match &mut table {
                None => {
                    if head != "#categories" {
                        return Err(Error::parse(path, line_no, "expected `#categories` header"));
                    }
                    table = Some(DomainTable::new(cols.map(str::to_string).collect()));
                    Ok(())
                }
                Some(t) => {
                    let probs = cols
                        .map(|c| {
                            c.parse::<f64>()
                                .ok()
                                .filter(|p| p.is_finite() && (0.0..=1.0).contains(p))
                                .ok_or_else(|| {
                                    Error::parse(path, line_no, format!("bad probability `{c}`"))
                                })
                        })
                        .collect::<Result<Vec<f64>>>()?;
                    if probs.len() != t.categories.len() {
                        return Err(Error::parse(
                            path,
                            line_no,
                            format!("expected {} values, found {}", t.categories.len(), probs.len()),
                        ));
                    }
                    t.distributions
                        .insert(head.to_string(), DomainDistribution(probs));
                    Ok(())
                }
            }
        })?;
        table.ok_or_else(|| Error::parse(path, 1, "missing `#categories` header"))
    }
}
