//! POS-tagged corpus in vertical format.
//!
//! One token per line as `surface<TAB>lemma<TAB>tag`; a blank line ends a
//! sentence; `#DOC` or `#DOC<TAB>category=<label>` opens a document. Rows
//! with only `surface<TAB>tag` use the surface form as lemma.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use super::Pos;
use crate::error::{Error, Result};
use crate::io;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Token {
    pub surface: String,
    pub lemma: String,
    pub tag: String,
}

impl Token {
    pub fn new(surface: &str, lemma: &str, tag: &str) -> Self {
        Token {
            surface: surface.to_string(),
            lemma: lemma.to_string(),
            tag: tag.to_string(),
        }
    }

    pub fn pos(&self) -> Option<Pos> {
        Pos::from_tag(&self.tag)
    }
}

pub type Sentence = Vec<Token>;

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Document {
    pub category: Option<String>,
    pub sentences: Vec<Sentence>,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TaggedCorpus {
    pub documents: Vec<Document>,
}

impl TaggedCorpus {
    pub fn new(documents: Vec<Document>) -> Self {
        TaggedCorpus { documents }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut documents: Vec<Document> = Vec::new();
        let mut sentence: Sentence = Vec::new();

        fn flush(documents: &mut Vec<Document>, sentence: &mut Sentence) {
            if sentence.is_empty() {
                return;
            }
            if documents.is_empty() {
                documents.push(Document::default());
            }
            let doc = documents.last_mut().expect("nonempty");
            doc.sentences.push(std::mem::take(sentence));
        }

        io::for_each_line(path, |line_no, line| {
            if line.trim().is_empty() {
                flush(&mut documents, &mut sentence);
                return Ok(());
            }
            if let Some(rest) = line.strip_prefix("#DOC") {
                flush(&mut documents, &mut sentence);
                let rest = rest.trim();
                let category = if rest.is_empty() {
                    None
                } else {
                    let label = rest.strip_prefix("category=").ok_or_else(|| {
                        Error::parse(path, line_no, "expected `#DOC<TAB>category=<label>`")
                    })?;
                    let label = label.trim();
                    (!label.is_empty()).then(|| label.to_string())
                };
                documents.push(Document {
                    category,
                    sentences: Vec::new(),
                });
                return Ok(());
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let token = match cols.as_slice() {
                [surface, lemma, tag] => Token::new(surface, lemma, tag),
                [surface, tag] => Token::new(surface, surface, tag),
                _ => {
                    return Err(Error::parse(
                        path,
                        line_no,
                        format!("expected 2 or 3 tab-separated columns, found {}", cols.len()),
                    ))
                }
            };
            if token.lemma.is_empty() {
                return Err(Error::parse(path, line_no, "empty lemma"));
            }
            sentence.push(token);
            Ok(())
        })?;
        flush(&mut documents, &mut sentence);
        Ok(TaggedCorpus { documents })
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_with(path, |out| {
            for doc in &self.documents {
                match &doc.category {
                    Some(label) => writeln!(out, "#DOC\tcategory={label}")?,
                    None => writeln!(out, "#DOC")?,
                }
                for sentence in &doc.sentences {
                    for t in sentence {
                        writeln!(out, "{}\t{}\t{}", t.surface, t.lemma, t.tag)?;
                    }
                    writeln!(out)?;
                }
            }
            Ok(())
        })
    }

    pub fn sentences(&self) -> impl Iterator<Item = &Sentence> {
        self.documents.iter().flat_map(|d| d.sentences.iter())
    }

    pub fn tokens(&self) -> impl Iterator<Item = &Token> {
        self.sentences().flat_map(|s| s.iter())
    }

    /// Distinct category labels, sorted.
    pub fn categories(&self) -> Vec<String> {
        self.documents
            .iter()
            .filter_map(|d| d.category.clone())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect()
    }

    /// Distinct lemmas.
    pub fn vocabulary(&self) -> BTreeSet<String> {
        self.tokens().map(|t| t.lemma.clone()).collect()
    }

    pub fn token_count(&self) -> usize {
        self.sentences().map(Vec::len).sum()
    }
}

/// Per-lemma distribution over the four parts of speech.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct PosProfile {
    rows: BTreeMap<String, BTreeMap<Pos, f64>>,
}

impl PosProfile {
    /// Relative frequency of each part of speech per lemma. Tokens whose tag is
    /// outside the four categories are ignored.
    pub fn from_corpus(corpus: &TaggedCorpus) -> Self {
        let mut counts: BTreeMap<&str, BTreeMap<Pos, usize>> = BTreeMap::new();
        for token in corpus.tokens() {
            if let Some(pos) = token.pos() {
                *counts.entry(&token.lemma).or_default().entry(pos).or_default() += 1;
            }
        }
        let rows = counts
            .into_iter()
            .map(|(lemma, by_pos)| {
                let total: usize = by_pos.values().sum();
                let row = by_pos
                    .into_iter()
                    .map(|(pos, c)| (pos, c as f64 / total as f64))
                    .collect();
                (lemma.to_string(), row)
            })
            .collect();
        PosProfile { rows }
    }

    pub fn get(&self, lemma: &str) -> Option<&BTreeMap<Pos, f64>> {
        self.rows.get(lemma)
    }

    /// Probability of `pos` for `lemma`, or `None` when the lemma was never tagged.
    pub fn probability(&self, lemma: &str, pos: Pos) -> Option<f64> {
        self.rows
            .get(lemma)
            .map(|row| row.get(&pos).copied().unwrap_or(0.0))
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.rows.keys().map(String::as_str)
    }

    pub fn rows(&self) -> impl Iterator<Item = (&str, &BTreeMap<Pos, f64>)> {
        self.rows.iter().map(|(k, v)| (k.as_str(), v))
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }
}
