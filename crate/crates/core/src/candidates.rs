//! Dictionary-induced word-to-synset candidate links.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;
use std::path::Path;

use crate::error::{Error, Result};
use crate::io;
use crate::resources::{
    BilingualDictionary, LinkKey, PolysemyScope, Pos, PosProfile, WordnetIndex,
};

/// A proposed link from a word to a synset, with the translations that induced it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateLink {
    pub key: LinkKey,
    /// Translations of the word that are members of the synset.
    pub inducers: BTreeSet<String>,
    pub pos: Pos,
}

impl CandidateLink {
    pub fn lemma(&self) -> &str {
        &self.key.lemma
    }

    pub fn synset(&self) -> &str {
        &self.key.synset
    }
}

/// Links sorted and unique by key.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CandidateSet {
    links: BTreeMap<LinkKey, CandidateLink>,
}

impl CandidateSet {
    pub fn from_links(links: impl IntoIterator<Item = CandidateLink>) -> Self {
        let mut set = CandidateSet::default();
        for link in links {
            match set.links.get_mut(&link.key) {
                Some(existing) => existing.inducers.extend(link.inducers),
                None => {
                    set.links.insert(link.key.clone(), link);
                }
            }
        }
        set
    }

    pub fn len(&self) -> usize {
        self.links.len()
    }

    pub fn is_empty(&self) -> bool {
        self.links.is_empty()
    }

    pub fn get(&self, key: &LinkKey) -> Option<&CandidateLink> {
        self.links.get(key)
    }

    pub fn contains(&self, key: &LinkKey) -> bool {
        self.links.contains_key(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = &CandidateLink> {
        self.links.values()
    }

    pub fn keys(&self) -> impl Iterator<Item = &LinkKey> {
        self.links.keys()
    }

    /// `lemma<TAB>synset<TAB>inducer1,inducer2,...`, sorted by key.
    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_with(path, |out| {
            for link in self.links.values() {
                let inducers: Vec<&str> = link.inducers.iter().map(String::as_str).collect();
                writeln!(out, "{}\t{}\t{}", link.key.lemma, link.key.synset, inducers.join(","))?;
            }
            Ok(())
        })
    }

    /// The part of speech of each link is read from its synset id suffix.
    pub fn load(path: &Path) -> Result<Self> {
        let mut links = Vec::new();
        io::for_each_line(path, |line_no, line| {
            if line.is_empty() {
                return Ok(());
            }
            let cols: Vec<&str> = line.split('\t').collect();
            let [lemma, synset, inducers] = cols.as_slice() else {
                return Err(Error::parse(
                    path,
                    line_no,
                    "expected `lemma<TAB>synset_id<TAB>inducer,...`",
                ));
            };
            let pos = Pos::from_synset_id(synset).ok_or_else(|| {
                Error::parse(path, line_no, format!("synset id `{synset}` has no part-of-speech suffix"))
            })?;
            let inducers: BTreeSet<String> = inducers
                .split(',')
                .filter(|e| !e.is_empty())
                .map(str::to_string)
                .collect();
            if inducers.is_empty() {
                return Err(Error::parse(path, line_no, "link has no inducing translation"));
            }
            links.push(CandidateLink {
                key: LinkKey::new(*lemma, *synset),
                inducers,
                pos,
            });
            Ok(())
        })?;
        Ok(CandidateSet::from_links(links))
    }
}

impl<'a> IntoIterator for &'a CandidateSet {
    type Item = &'a CandidateLink;
    type IntoIter = std::collections::btree_map::Values<'a, LinkKey, CandidateLink>;

    fn into_iter(self) -> Self::IntoIter {
        self.links.values()
    }
}

/// One link per (word, synset) reachable through a translation of the word
/// that is a member of the synset.
pub fn generate_candidates<'a>(
    vocab: impl IntoIterator<Item = &'a str>,
    dict: &BilingualDictionary,
    wn: &WordnetIndex,
) -> CandidateSet {
    let mut links: BTreeMap<LinkKey, CandidateLink> = BTreeMap::new();
    for f in vocab {
        for e in dict.translate(f) {
            for s in wn.synsets_of(e) {
                let key = LinkKey::new(f, s);
                links
                    .entry(key.clone())
                    .or_insert_with(|| CandidateLink {
                        key,
                        inducers: BTreeSet::new(),
                        pos: wn.get(s).expect("indexed synset").pos,
                    })
                    .inducers
                    .insert(e.clone());
            }
        }
    }
    CandidateSet { links }
}

/// Keeps a link when its word has been seen with the synset's part of speech
/// more often than `threshold`. Words missing from the profile are kept.
pub fn prune_pos(links: &CandidateSet, profile: &PosProfile, threshold: f64) -> CandidateSet {
    let kept = links
        .links
        .iter()
        .filter(|(_, link)| {
            profile
                .probability(link.lemma(), link.pos)
                .is_none_or(|p| p > threshold)
        })
        .map(|(k, v)| (k.clone(), v.clone()))
        .collect();
    CandidateSet { links: kept }
}

/// The words currently linked to one synset with their translation weights.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureContext {
    /// Cohort members in lemma order with weight Σ 1/polysemy(e) over their inducers.
    pub cohort: Vec<(String, f64)>,
}

impl FeatureContext {
    pub fn k(&self) -> usize {
        self.cohort.len()
    }

    pub fn weight(&self, lemma: &str) -> Option<f64> {
        self.cohort
            .iter()
            .find(|(l, _)| l == lemma)
            .map(|(_, w)| *w)
    }
}

/// Weight of a link: sum of inverse polysemy degrees of its inducers.
pub fn link_weight(link: &CandidateLink, wn: &WordnetIndex, scope: PolysemyScope) -> f64 {
    link.inducers
        .iter()
        .map(|e| {
            let degree = wn.polysemy_in(e, link.pos, scope);
            // an inducer is a member of the linked synset, so degree >= 1
            1.0 / degree.max(1) as f64
        })
        .sum()
}

pub fn build_feature_context(
    links: &CandidateSet,
    wn: &WordnetIndex,
    scope: PolysemyScope,
) -> BTreeMap<String, FeatureContext> {
    let mut contexts: BTreeMap<String, FeatureContext> = BTreeMap::new();
    for link in links {
        contexts
            .entry(link.synset().to_string())
            .or_insert_with(|| FeatureContext { cohort: Vec::new() })
            .cohort
            .push((link.lemma().to_string(), link_weight(link, wn, scope)));
    }
    contexts
}
