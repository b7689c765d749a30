use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Pos;
use crate::error::{Error, Result};
use crate::io;

/// One concept of the reference wordnet.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Synset {
    pub id: String,
    pub pos: Pos,
    pub members: Vec<String>,
    #[serde(default)]
    pub gloss: String,
}

impl Synset {
    pub fn new(id: impl Into<String>, pos: Pos, members: &[&str], gloss: impl Into<String>) -> Self {
        Synset {
            id: id.into(),
            pos,
            members: members.iter().map(|m| m.to_string()).collect(),
            gloss: gloss.into(),
        }
    }

    pub fn contains(&self, lemma: &str) -> bool {
        self.members.iter().any(|m| m == lemma)
    }

    fn validate(&mut self) -> std::result::Result<(), String> {
        let mut seen = BTreeSet::new();
        self.members.retain(|m| seen.insert(m.clone()));
        if self.members.is_empty() {
            return Err(format!("synset `{}` has no members", self.id));
        }
        match Pos::from_synset_id(&self.id) {
            Some(p) if p == self.pos => Ok(()),
            Some(p) => Err(format!(
                "synset `{}` declares pos `{}` but its id says `{}`",
                self.id,
                self.pos.code(),
                p.code()
            )),
            None => Err(format!(
                "synset id `{}` lacks a `-<pos>` suffix",
                self.id
            )),
        }
    }
}

/// Which synsets count towards a lemma's polysemy degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum PolysemyScope {
    /// Only synsets sharing the link's part of speech.
    #[default]
    Pos,
    /// Every synset containing the lemma.
    All,
}

impl std::fmt::Display for PolysemyScope {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            PolysemyScope::Pos => "pos",
            PolysemyScope::All => "all",
        })
    }
}

impl FromStr for PolysemyScope {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "pos" => Ok(PolysemyScope::Pos),
            "all" => Ok(PolysemyScope::All),
            other => Err(format!("polysemy scope must be `pos` or `all`, got `{other}`")),
        }
    }
}

/// Synsets by id with an inverted lemma index.
#[derive(Debug, Clone, Default)]
pub struct WordnetIndex {
    synsets: BTreeMap<String, Synset>,
    by_lemma: BTreeMap<String, BTreeSet<String>>,
}

impl WordnetIndex {
    pub fn from_synsets(synsets: impl IntoIterator<Item = Synset>) -> Result<Self> {
        let mut index = WordnetIndex::default();
        for mut synset in synsets {
            synset.validate().map_err(Error::Config)?;
            index.insert(synset)?;
        }
        Ok(index)
    }

    fn insert(&mut self, synset: Synset) -> Result<()> {
        if self.synsets.contains_key(&synset.id) {
            return Err(Error::DuplicateSynset(synset.id));
        }
        for member in &synset.members {
            self.by_lemma
                .entry(member.clone())
                .or_default()
                .insert(synset.id.clone());
        }
        self.synsets.insert(synset.id.clone(), synset);
        Ok(())
    }

    /// Reads the JSON-lines wordnet format, one synset per line. Blank lines are skipped.
    pub fn load(path: &Path) -> Result<Self> {
        let mut index = WordnetIndex::default();
        io::for_each_line(path, |line_no, line| {
            if line.trim().is_empty() {
                return Ok(());
            }
            let mut synset: Synset = serde_json::from_str(line)
                .map_err(|e| Error::parse(path, line_no, e.to_string()))?;
            synset
                .validate()
                .map_err(|m| Error::parse(path, line_no, m))?;
            index.insert(synset)
        })?;
        Ok(index)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_with(path, |out| {
            for synset in self.synsets.values() {
                let line = serde_json::to_string(synset).map_err(std::io::Error::other)?;
                writeln!(out, "{line}")?;
            }
            Ok(())
        })
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn get(&self, id: &str) -> Option<&Synset> {
        self.synsets.get(id)
    }

    pub fn contains_id(&self, id: &str) -> bool {
        self.synsets.contains_key(id)
    }

    /// Synsets in id order.
    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.values()
    }

    /// Ids of every synset containing `lemma`, in id order.
    pub fn synsets_of(&self, lemma: &str) -> impl Iterator<Item = &str> {
        self.by_lemma
            .get(lemma)
            .into_iter()
            .flat_map(|ids| ids.iter().map(String::as_str))
    }

    pub fn lemmas(&self) -> impl Iterator<Item = &str> {
        self.by_lemma.keys().map(String::as_str)
    }

    /// Number of synsets of part of speech `pos` containing `lemma`.
    pub fn polysemy(&self, lemma: &str, pos: Pos) -> usize {
        self.synsets_of(lemma)
            .filter(|id| self.synsets[*id].pos == pos)
            .count()
    }

    /// Number of synsets of any part of speech containing `lemma`.
    pub fn polysemy_all(&self, lemma: &str) -> usize {
        self.by_lemma.get(lemma).map_or(0, BTreeSet::len)
    }

    pub fn polysemy_in(&self, lemma: &str, pos: Pos, scope: PolysemyScope) -> usize {
        match scope {
            PolysemyScope::Pos => self.polysemy(lemma, pos),
            PolysemyScope::All => self.polysemy_all(lemma),
        }
    }
}
