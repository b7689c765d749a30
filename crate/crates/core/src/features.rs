//! The seven per-link features.
//!
//! | feature              | idea                                                          |
//! |----------------------|---------------------------------------------------------------|
//! | relatedness (R)      | translated context of the word vs. contexts of synset members |
//! | synset strength (SS) | embedding similarity to the other words linked to the synset  |
//! | context overlap (CO) | word context vs. translated synset gloss                      |
//! | domain similarity    | category distribution similarity to the other linked words    |
//! | monosemous (ME)      | some inducing translation has a single sense                  |
//! | commonality (SC)     | number of inducing translations                               |
//! | importance (IM)      | how many of R/SS/CO/DS this synset wins among a translation's senses |
//!
//! The free functions compute one feature for one link and are the reference
//! definitions. [`featurize`] computes everything for a whole candidate set,
//! memoizing relatedness per synset.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::candidates::{build_feature_context, CandidateLink, CandidateSet, FeatureContext};
use crate::distributional::{
    distribution_similarity, jaccard, jaccard_sorted, ContextVectors, DomainTable, EmbeddingTable,
};
use crate::error::{Error, Result};
use crate::io;
use crate::resources::{BilingualDictionary, LinkKey, PolysemyScope, Synset, WordnetIndex};

/// Feature identifiers in declaration order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Feature {
    Relatedness,
    SynsetStrength,
    ContextOverlap,
    DomainSimilarity,
    MonosemousEnglish,
    SynsetCommonality,
    Importance,
}

impl Feature {
    pub const ALL: [Feature; 7] = [
        Feature::Relatedness,
        Feature::SynsetStrength,
        Feature::ContextOverlap,
        Feature::DomainSimilarity,
        Feature::MonosemousEnglish,
        Feature::SynsetCommonality,
        Feature::Importance,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn name(self) -> &'static str {
        match self {
            Feature::Relatedness => "relatedness",
            Feature::SynsetStrength => "synset_strength",
            Feature::ContextOverlap => "context_overlap",
            Feature::DomainSimilarity => "domain_similarity",
            Feature::MonosemousEnglish => "monosemous_english",
            Feature::SynsetCommonality => "synset_commonality",
            Feature::Importance => "importance",
        }
    }

    pub fn abbreviation(self) -> &'static str {
        match self {
            Feature::Relatedness => "R",
            Feature::SynsetStrength => "SS",
            Feature::ContextOverlap => "CO",
            Feature::DomainSimilarity => "DS",
            Feature::MonosemousEnglish => "ME",
            Feature::SynsetCommonality => "SC",
            Feature::Importance => "IM",
        }
    }
}

impl fmt::Display for Feature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Feature {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        Feature::ALL
            .into_iter()
            .find(|f| f.name() == s || f.abbreviation().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown feature `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FeatureVector {
    pub relatedness: f64,
    pub synset_strength: f64,
    pub context_overlap: f64,
    pub domain_similarity: f64,
    pub monosemous_english: u8,
    pub synset_commonality: u32,
    pub importance: u8,
}

impl FeatureVector {
    pub fn to_array(&self) -> [f64; 7] {
        [
            self.relatedness,
            self.synset_strength,
            self.context_overlap,
            self.domain_similarity,
            self.monosemous_english as f64,
            self.synset_commonality as f64,
            self.importance as f64,
        ]
    }

    pub fn get(&self, feature: Feature) -> f64 {
        self.to_array()[feature.index()]
    }

    /// The seven values tab-separated; floats with six decimals.
    pub(crate) fn tsv_columns(&self) -> String {
        format!(
            "{:.6}\t{:.6}\t{:.6}\t{:.6}\t{}\t{}\t{}",
            self.relatedness,
            self.synset_strength,
            self.context_overlap,
            self.domain_similarity,
            self.monosemous_english,
            self.synset_commonality,
            self.importance
        )
    }

    /// Inverse of [`FeatureVector::tsv_columns`]; `cols` holds exactly seven fields.
    pub(crate) fn parse_columns(cols: &[&str], path: &Path, line_no: usize) -> Result<Self> {
        let float = |i: usize| {
            cols[i]
                .parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| Error::parse(path, line_no, format!("bad number `{}`", cols[i])))
        };
        let int = |i: usize| {
            cols[i]
                .parse::<u32>()
                .map_err(|_| Error::parse(path, line_no, format!("bad integer `{}`", cols[i])))
        };
        Ok(FeatureVector {
            relatedness: float(0)?,
            synset_strength: float(1)?,
            context_overlap: float(2)?,
            domain_similarity: float(3)?,
            monosemous_english: int(4)?.min(1) as u8,
            synset_commonality: int(5)?,
            importance: int(6)?.min(4) as u8,
        })
    }

    /// The four continuous features Importance is computed from.
    fn contested(&self) -> [f64; 4] {
        [
            self.relatedness,
            self.synset_strength,
            self.context_overlap,
            self.domain_similarity,
        ]
    }
}

/// How equal maxima are scored by [`importance`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ImportanceTies {
    /// Every synset attaining the maximum scores.
    #[default]
    All,
    /// Only a unique maximum scores.
    Strict,
}

impl fmt::Display for ImportanceTies {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ImportanceTies::All => "all",
            ImportanceTies::Strict => "strict",
        })
    }
}

impl FromStr for ImportanceTies {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "all" => Ok(ImportanceTies::All),
            "strict" => Ok(ImportanceTies::Strict),
            other => Err(format!("importance ties must be `all` or `strict`, got `{other}`")),
        }
    }
}

/// Everything the features are computed from.
#[derive(Debug, Clone, Copy)]
pub struct FeatureResources<'a> {
    pub wordnet: &'a WordnetIndex,
    pub dictionary: &'a BilingualDictionary,
    /// Context vectors of the words being linked.
    pub target_cvs: &'a ContextVectors,
    /// Context vectors of reference wordnet lemmas.
    pub source_cvs: &'a ContextVectors,
    pub embeddings: &'a EmbeddingTable,
    pub domains: &'a DomainTable,
    pub polysemy_scope: PolysemyScope,
    pub importance_ties: ImportanceTies,
}

/// Mean Jaccard overlap between the context vector of `e` and those of the
/// synset's members.
pub fn relatedness_e_s(e: &str, synset: &Synset, source_cvs: &ContextVectors) -> f64 {
    let cv = source_cvs.neighbors(e);
    let total: f64 = synset
        .members
        .iter()
        .map(|m| jaccard(cv, source_cvs.neighbors(m)))
        .sum();
    total / synset.members.len() as f64
}

/// Reference-language translations of the word's context vector; the link's
/// inducers when the word has no context.
pub fn context_translation<'a>(
    link: &'a CandidateLink,
    target_cvs: &'a ContextVectors,
    dict: &'a BilingualDictionary,
) -> BTreeSet<&'a str> {
    let cv = target_cvs.neighbors(link.lemma());
    if cv.is_empty() {
        return link.inducers.iter().map(String::as_str).collect();
    }
    cv.iter()
        .flat_map(|w| dict.translate(w).iter().map(String::as_str))
        .collect()
}

/// Synsets sharing at least one member with `synset`, itself included.
pub fn member_closure<'a>(synset: &Synset, wn: &'a WordnetIndex) -> BTreeSet<&'a str> {
    synset
        .members
        .iter()
        .flat_map(|m| wn.synsets_of(m))
        .collect()
}

/// Average relative relatedness of the translated context to the synset.
pub fn relatedness_measure(
    link: &CandidateLink,
    target_cvs: &ContextVectors,
    dict: &BilingualDictionary,
    wn: &WordnetIndex,
    source_cvs: &ContextVectors,
) -> f64 {
    let Some(synset) = wn.get(link.synset()) else {
        return 0.0;
    };
    let cvt = context_translation(link, target_cvs, dict);
    if cvt.is_empty() {
        return 0.0;
    }
    let closure: Vec<&Synset> = member_closure(synset, wn)
        .into_iter()
        .map(|id| wn.get(id).expect("indexed"))
        .collect();
    let total: f64 = cvt
        .iter()
        .map(|e| {
            let own = relatedness_e_s(e, synset, source_cvs);
            let denom: f64 = closure
                .iter()
                .map(|s| relatedness_e_s(e, s, source_cvs))
                .sum();
            if denom > 0.0 {
                own / denom
            } else {
                0.0
            }
        })
        .sum();
    total / cvt.len() as f64
}

/// Weighted mean of `similarity(f, fᵢ)` over the other cohort members; 1 for
/// a singleton cohort.
fn cohort_mean<F>(lemma: &str, ctx: &FeatureContext, similarity: F) -> f64
where
    F: Fn(&str) -> f64,
{
    let k = ctx.k();
    if k <= 1 {
        return 1.0;
    }
    let total: f64 = ctx
        .cohort
        .iter()
        .filter(|(other, _)| other != lemma)
        .map(|(other, weight)| weight * similarity(other))
        .sum();
    total / (k - 1) as f64
}

/// Clamped to [-1, 1]; the weighted mean exceeds it when translation weights
/// sum past 1.
pub fn synset_strength(link: &CandidateLink, ctx: &FeatureContext, emb: &EmbeddingTable) -> f64 {
    cohort_mean(link.lemma(), ctx, |other| {
        emb.similarity(link.lemma(), other).unwrap_or(0.0)
    })
    .clamp(-1.0, 1.0)
}

/// Lowercased alphabetic runs of at least two characters.
pub fn gloss_tokens(gloss: &str) -> impl Iterator<Item = String> + '_ {
    gloss
        .split(|c: char| !c.is_alphabetic())
        .filter(|t| t.chars().count() >= 2)
        .map(str::to_lowercase)
}

/// Translations of a synset's gloss words into the linked language.
pub fn gloss_translation<'a>(synset: &Synset, dict: &'a BilingualDictionary) -> BTreeSet<&'a str> {
    gloss_tokens(&synset.gloss)
        .flat_map(|t| dict.inverse(&t).collect::<Vec<_>>())
        .collect()
}

pub fn context_overlap(
    link: &CandidateLink,
    target_cvs: &ContextVectors,
    dict: &BilingualDictionary,
    wn: &WordnetIndex,
) -> f64 {
    let Some(synset) = wn.get(link.synset()) else {
        return 0.0;
    };
    let gt = gloss_translation(synset, dict);
    let cv: BTreeSet<&str> = target_cvs
        .neighbors(link.lemma())
        .iter()
        .map(String::as_str)
        .collect();
    jaccard(&gt, &cv)
}

/// Clamped to [0, 1] like [`synset_strength`].
pub fn domain_similarity(link: &CandidateLink, ctx: &FeatureContext, domains: &DomainTable) -> f64 {
    if ctx.k() <= 1 {
        return 1.0;
    }
    let Some(own) = domains.get(link.lemma()) else {
        return 0.0;
    };
    cohort_mean(link.lemma(), ctx, |other| {
        domains
            .get(other)
            .map_or(0.0, |d| distribution_similarity(own, d).unwrap_or(0.0))
    })
    .clamp(0.0, 1.0)
}

pub fn monosemous_english(link: &CandidateLink, wn: &WordnetIndex, scope: PolysemyScope) -> u8 {
    link.inducers
        .iter()
        .any(|e| wn.polysemy_in(e, link.pos, scope) == 1) as u8
}

pub fn synset_commonality(link: &CandidateLink) -> u32 {
    link.inducers.len() as u32
}

/// Importance of `link` given the four contested features (R, SS, CO, DS) of
/// every candidate link.
///
/// For each inducer, the competitors are the word's links to the inducer's
/// other synsets. The score per inducer counts the features on which this
/// link attains the maximum; the link keeps its best inducer's score.
pub fn importance(
    link: &CandidateLink,
    contested: &BTreeMap<LinkKey, [f64; 4]>,
    wn: &WordnetIndex,
    ties: ImportanceTies,
) -> u8 {
    let Some(own) = contested.get(&link.key) else {
        return 0;
    };
    link.inducers
        .iter()
        .map(|e| {
            let rivals: Vec<&[f64; 4]> = wn
                .synsets_of(e)
                .filter(|s| *s != link.synset())
                .filter_map(|s| contested.get(&LinkKey::new(link.lemma(), s)))
                .collect();
            (0..4)
                .filter(|&i| match ties {
                    ImportanceTies::All => rivals.iter().all(|r| own[i] >= r[i]),
                    ImportanceTies::Strict => rivals.iter().all(|r| own[i] > r[i]),
                })
                .count() as u8
        })
        .max()
        .unwrap_or(0)
}

/// Feature vectors keyed and sorted by link.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct FeatureMatrix {
    rows: BTreeMap<LinkKey, FeatureVector>,
}

impl FeatureMatrix {
    pub fn from_rows(rows: impl IntoIterator<Item = (LinkKey, FeatureVector)>) -> Self {
        FeatureMatrix {
            rows: rows.into_iter().collect(),
        }
    }

    pub fn get(&self, key: &LinkKey) -> Option<&FeatureVector> {
        self.rows.get(key)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LinkKey, &FeatureVector)> {
        self.rows.iter()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `lemma<TAB>synset<TAB>R<TAB>SS<TAB>CO<TAB>DS<TAB>ME<TAB>SC<TAB>IM`.
    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_with(path, |out| {
            for (k, v) in &self.rows {
                writeln!(out, "{}\t{}\t{}", k.lemma, k.synset, v.tsv_columns())?;
            }
            Ok(())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut rows = BTreeMap::new();
        io::for_each_line(path, |line_no, line| {
            if line.is_empty() {
                return Ok(());
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 9 {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("expected 9 columns, found {}", cols.len()),
                ));
            }
            let fv = FeatureVector::parse_columns(&cols[2..], path, line_no)?;
            rows.insert(LinkKey::new(cols[0], cols[1]), fv);
            Ok(())
        })?;
        Ok(FeatureMatrix { rows })
    }
}

/// Context vectors as sorted id lists over one shared interner.
struct InternedContexts<'a> {
    vectors: HashMap<&'a str, Vec<u32>>,
}

impl<'a> InternedContexts<'a> {
    fn new(cvs: &'a ContextVectors) -> Self {
        let mut ids: BTreeMap<&str, u32> = BTreeMap::new();
        for cv in cvs.iter() {
            for n in &cv.neighbors {
                ids.insert(n, 0);
            }
        }
        for (i, v) in ids.values_mut().enumerate() {
            *v = i as u32;
        }
        // ids follow lexicographic order, so BTreeSet order maps to sorted ids
        let vectors = cvs
            .iter()
            .map(|cv| {
                let list = cv.neighbors.iter().map(|n| ids[n.as_str()]).collect();
                (cv.word.as_str(), list)
            })
            .collect();
        InternedContexts { vectors }
    }

    fn get(&self, word: &str) -> &[u32] {
        self.vectors.get(word).map_or(&[], Vec::as_slice)
    }

    fn relatedness(&self, e: &str, synset: &Synset) -> f64 {
        let cv = self.get(e);
        let total: f64 = synset
            .members
            .iter()
            .map(|m| jaccard_sorted(cv, self.get(m)))
            .sum();
        total / synset.members.len() as f64
    }
}

/// Computes all seven features for every link. Work is spread over the
/// current rayon pool; the result does not depend on the number of workers.
pub fn featurize(links: &CandidateSet, res: &FeatureResources<'_>) -> Result<FeatureMatrix> {
    let contexts = build_feature_context(links, res.wordnet, res.polysemy_scope);
    let interned = InternedContexts::new(res.source_cvs);

    let mut by_synset: BTreeMap<&str, Vec<&CandidateLink>> = BTreeMap::new();
    for link in links {
        by_synset.entry(link.synset()).or_default().push(link);
    }

    let partial: Vec<(LinkKey, FeatureVector)> = by_synset
        .par_iter()
        .map(|(synset_id, group)| -> Result<Vec<(LinkKey, FeatureVector)>> {
            let synset = res.wordnet.get(synset_id).ok_or_else(|| {
                Error::Invariant(format!("candidate link to unknown synset `{synset_id}`"))
            })?;
            let ctx = &contexts[*synset_id];
            let closure: Vec<&Synset> = member_closure(synset, res.wordnet)
                .into_iter()
                .map(|id| res.wordnet.get(id).expect("indexed"))
                .collect();
            let mut ratio_cache: HashMap<&str, f64> = HashMap::new();
            let gt = gloss_translation(synset, res.dictionary);

            let mut rows = Vec::with_capacity(group.len());
            for link in group {
                let cvt = context_translation(link, res.target_cvs, res.dictionary);
                let relatedness = if cvt.is_empty() {
                    0.0
                } else {
                    let total: f64 = cvt
                        .iter()
                        .map(|e| {
                            *ratio_cache.entry(e).or_insert_with(|| {
                                let own = interned.relatedness(e, synset);
                                let denom: f64 =
                                    closure.iter().map(|s| interned.relatedness(e, s)).sum();
                                if denom > 0.0 {
                                    own / denom
                                } else {
                                    0.0
                                }
                            })
                        })
                        .sum();
                    total / cvt.len() as f64
                };
                let cv: BTreeSet<&str> = res
                    .target_cvs
                    .neighbors(link.lemma())
                    .iter()
                    .map(String::as_str)
                    .collect();
                let fv = FeatureVector {
                    relatedness,
                    synset_strength: synset_strength(link, ctx, res.embeddings),
                    context_overlap: jaccard(&gt, &cv),
                    domain_similarity: domain_similarity(link, ctx, res.domains),
                    monosemous_english: monosemous_english(link, res.wordnet, res.polysemy_scope),
                    synset_commonality: synset_commonality(link),
                    importance: 0,
                };
                rows.push((link.key.clone(), fv));
            }
            Ok(rows)
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect();

    let mut rows: BTreeMap<LinkKey, FeatureVector> = partial.into_iter().collect();
    let contested: BTreeMap<LinkKey, [f64; 4]> =
        rows.iter().map(|(k, v)| (k.clone(), v.contested())).collect();
    let scores: Vec<(LinkKey, u8)> = links
        .iter()
        .collect::<Vec<_>>()
        .par_iter()
        .map(|link| {
            (
                link.key.clone(),
                importance(link, &contested, res.wordnet, res.importance_ties),
            )
        })
        .collect();
    for (key, im) in scores {
        rows.get_mut(&key).expect("featurized").importance = im;
    }
    Ok(FeatureMatrix { rows })
}
