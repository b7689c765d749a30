use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use log::warn;
use serde::{Deserialize, Serialize};

use super::WordnetIndex;
use crate::error::{Error, Result};
use crate::io;

/// A (target lemma, synset id) pair. Orders by lemma, then synset id.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct LinkKey {
    pub lemma: String,
    pub synset: String,
}

impl LinkKey {
    pub fn new(lemma: impl Into<String>, synset: impl Into<String>) -> Self {
        LinkKey {
            lemma: lemma.into(),
            synset: synset.into(),
        }
    }
}

impl fmt::Display for LinkKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lemma, self.synset)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Label {
    Correct,
    Incorrect,
}

impl Label {
    pub const BOTH: [Label; 2] = [Label::Correct, Label::Incorrect];

    pub fn as_str(self) -> &'static str {
        match self {
            Label::Correct => "correct",
            Label::Incorrect => "incorrect",
        }
    }

    pub fn index(self) -> usize {
        match self {
            Label::Correct => 0,
            Label::Incorrect => 1,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "correct" => Ok(Label::Correct),
            "incorrect" => Ok(Label::Incorrect),
            other => Err(format!("label must be `correct` or `incorrect`, got `{other}`")),
        }
    }
}

/// A trusted word-to-synset link from a pre-existing wordnet.
pub type SeedLink = LinkKey;

/// Raw row of the link TSV format `lemma<TAB>synset_id[<TAB>label]`.
pub(crate) fn read_link_rows(path: &Path) -> Result<Vec<(usize, LinkKey, Option<Label>)>> {
    let mut rows = Vec::new();
    io::for_each_line(path, |line_no, line| {
        if line.trim().is_empty() {
            return Ok(());
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        let (lemma, synset, label) = match cols.as_slice() {
            [l, s] => (*l, *s, None),
            [l, s, lab] => (
                *l,
                *s,
                Some(lab.parse::<Label>().map_err(|m| Error::parse(path, line_no, m))?),
            ),
            _ => {
                return Err(Error::parse(
                    path,
                    line_no,
                    "expected `lemma<TAB>synset_id[<TAB>label]`",
                ))
            }
        };
        if lemma.is_empty() || synset.is_empty() {
            return Err(Error::parse(path, line_no, "empty lemma or synset id"));
        }
        rows.push((line_no, LinkKey::new(lemma, synset), label));
        Ok(())
    })?;
    Ok(rows)
}

/// Seed links whose synsets exist in `index`, plus the number dropped for
/// referencing unknown synset ids.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct SeedLinks {
    pub links: BTreeSet<SeedLink>,
    pub dropped: usize,
}

pub fn load_seed_links(path: &Path, index: &WordnetIndex) -> Result<SeedLinks> {
    let mut out = SeedLinks::default();
    for (line_no, key, _) in read_link_rows(path)? {
        if index.contains_id(&key.synset) {
            out.links.insert(key);
        } else {
            warn!(
                "{}:{line_no}: unknown synset id `{}`, link dropped",
                path.display(),
                key.synset
            );
            out.dropped += 1;
        }
    }
    Ok(out)
}

pub fn write_links<'a>(path: &Path, links: impl IntoIterator<Item = &'a LinkKey>) -> Result<()> {
    io::write_with(path, |out| {
        for k in links {
            writeln!(out, "{}\t{}", k.lemma, k.synset)?;
        }
        Ok(())
    })
}

pub fn write_labeled_links<'a>(
    path: &Path,
    links: impl IntoIterator<Item = (&'a LinkKey, Label)>,
) -> Result<()> {
    io::write_with(path, |out| {
        for (k, label) in links {
            writeln!(out, "{}\t{}\t{}", k.lemma, k.synset, label)?;
        }
        Ok(())
    })
}
