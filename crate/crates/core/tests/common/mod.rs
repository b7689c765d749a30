//! Random micro-worlds and brute-force reference implementations of the
//! seven link features. The references work on plain collections and share
//! no code with the library beyond constructing its inputs.
#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};

use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use wnlink::candidates::{generate_candidates, CandidateSet};
use wnlink::distributional::{ContextVectors, DomainDistribution, DomainTable, EmbeddingTable};
use wnlink::features::{featurize, FeatureMatrix, FeatureResources, ImportanceTies};
use wnlink::resources::{BilingualDictionary, PolysemyScope, Pos, Synset, WordnetIndex};

pub const EMBEDDING_DIM: usize = 3;
pub const CATEGORIES: usize = 3;

#[derive(Debug, Clone)]
pub struct RawSynset {
    pub id: String,
    pub pos: Pos,
    pub members: Vec<String>,
    pub gloss: String,
}

#[derive(Debug, Clone)]
pub struct RawWorld {
    pub synsets: Vec<RawSynset>,
    /// (target word, reference lemma) dictionary pairs.
    pub pairs: BTreeSet<(String, String)>,
    pub target_words: Vec<String>,
    pub target_cvs: BTreeMap<String, BTreeSet<String>>,
    pub source_cvs: BTreeMap<String, BTreeSet<String>>,
    pub embeddings: BTreeMap<String, Vec<f32>>,
    pub domains: BTreeMap<String, Vec<f64>>,
}

/// Letters only, so gloss tokenization keeps the whole name.
fn name(prefix: char, i: usize) -> String {
    let mut s = prefix.to_string();
    let mut i = i;
    loop {
        s.push((b'a' + (i % 26) as u8) as char);
        i /= 26;
        if i == 0 {
            return s;
        }
    }
}

fn subset(rng: &mut ChaCha8Rng, pool: &[String], max: usize, skip: &str) -> BTreeSet<String> {
    let n = rng.gen_range(0..=max);
    pool.choose_multiple(rng, n)
        .filter(|w| w.as_str() != skip)
        .cloned()
        .collect()
}

/// A world with at most `max_words` target words and `max_synsets` synsets.
pub fn micro_world(rng: &mut ChaCha8Rng, max_words: usize, max_synsets: usize) -> RawWorld {
    let lemmas: Vec<String> = (0..rng.gen_range(3..=12)).map(|i| name('e', i)).collect();
    let targets: Vec<String> = (0..rng.gen_range(1..=max_words)).map(|i| name('f', i)).collect();

    let synsets: Vec<RawSynset> = (0..rng.gen_range(1..=max_synsets))
        .map(|i| {
            let pos = Pos::ALL[rng.gen_range(0..4)];
            let size = rng.gen_range(1..=3);
            let members: Vec<String> = lemmas.choose_multiple(rng, size).cloned().collect();
            let mut words: Vec<String> = Vec::new();
            for _ in 0..rng.gen_range(0..6) {
                let w = match rng.gen_range(0..4) {
                    0 => "x".to_string(),
                    1 => lemmas.choose(rng).unwrap().to_uppercase(),
                    _ => lemmas.choose(rng).unwrap().clone(),
                };
                words.push(w);
            }
            RawSynset {
                id: format!("{:05}-{}", i, pos.code()),
                pos,
                members,
                gloss: words.join(if rng.gen_bool(0.5) { " " } else { ", " }),
            }
        })
        .collect();

    let mut pairs = BTreeSet::new();
    for f in &targets {
        for _ in 0..rng.gen_range(0..=3) {
            pairs.insert((f.clone(), lemmas.choose(rng).unwrap().clone()));
        }
    }

    let mut target_cvs = BTreeMap::new();
    let mut embeddings = BTreeMap::new();
    let mut domains = BTreeMap::new();
    for f in &targets {
        if rng.gen_bool(0.8) {
            target_cvs.insert(f.clone(), subset(rng, &targets, 5, f));
        }
        if rng.gen_bool(0.8) {
            let v: Vec<f32> = if rng.gen_bool(0.1) {
                vec![0.0; EMBEDDING_DIM]
            } else {
                (0..EMBEDDING_DIM).map(|_| rng.gen_range(-1.0f32..1.0)).collect()
            };
            embeddings.insert(f.clone(), v);
        }
        if rng.gen_bool(0.8) {
            let raw: Vec<f64> = (0..CATEGORIES)
                .map(|_| if rng.gen_bool(0.3) { 0.0 } else { rng.gen_range(0.01..1.0) })
                .collect();
            let total: f64 = raw.iter().sum();
            let dist = if total == 0.0 {
                let mut d = vec![0.0; CATEGORIES];
                d[0] = 1.0;
                d
            } else {
                raw.iter().map(|x| x / total).collect()
            };
            domains.insert(f.clone(), dist);
        }
    }
    let mut source_cvs = BTreeMap::new();
    for e in &lemmas {
        if rng.gen_bool(0.8) {
            source_cvs.insert(e.clone(), subset(rng, &lemmas, 5, e));
        }
    }

    RawWorld {
        synsets,
        pairs,
        target_words: targets,
        target_cvs,
        source_cvs,
        embeddings,
        domains,
    }
}

/// The library's view of a raw world.
pub struct LibraryWorld {
    pub wordnet: WordnetIndex,
    pub dictionary: BilingualDictionary,
    pub target_cvs: ContextVectors,
    pub source_cvs: ContextVectors,
    pub embeddings: EmbeddingTable,
    pub domains: DomainTable,
}

impl LibraryWorld {
    pub fn new(raw: &RawWorld) -> Self {
        let wordnet = WordnetIndex::from_synsets(raw.synsets.iter().map(|s| {
            let members: Vec<&str> = s.members.iter().map(String::as_str).collect();
            Synset::new(s.id.clone(), s.pos, &members, s.gloss.clone())
        }))
        .unwrap();
        let dictionary = BilingualDictionary::from_pairs(raw.pairs.iter().map(|(f, e)| (f, e)));
        let mut embeddings = EmbeddingTable::new(EMBEDDING_DIM);
        for (w, v) in &raw.embeddings {
            embeddings.insert(w, v).unwrap();
        }
        let mut domains = DomainTable::new((0..CATEGORIES).map(|c| format!("c{c}")).collect());
        for (w, d) in &raw.domains {
            domains.insert(w, DomainDistribution(d.clone())).unwrap();
        }
        LibraryWorld {
            wordnet,
            dictionary,
            target_cvs: ContextVectors::from_sets(raw.target_cvs.clone()),
            source_cvs: ContextVectors::from_sets(raw.source_cvs.clone()),
            embeddings,
            domains,
        }
    }

    pub fn resources(&self) -> FeatureResources<'_> {
        FeatureResources {
            wordnet: &self.wordnet,
            dictionary: &self.dictionary,
            target_cvs: &self.target_cvs,
            source_cvs: &self.source_cvs,
            embeddings: &self.embeddings,
            domains: &self.domains,
            polysemy_scope: PolysemyScope::Pos,
            importance_ties: ImportanceTies::All,
        }
    }

    pub fn candidates(&self, raw: &RawWorld) -> CandidateSet {
        generate_candidates(
            raw.target_words.iter().map(String::as_str),
            &self.dictionary,
            &self.wordnet,
        )
    }

    pub fn featurize(&self, links: &CandidateSet) -> FeatureMatrix {
        featurize(links, &self.resources()).unwrap()
    }
}

/// Reference feature values of one link; importance is filled in separately.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleFeatures {
    pub r: f64,
    pub ss: f64,
    pub co: f64,
    pub ds: f64,
    pub me: u8,
    pub sc: u32,
}

/// Candidate links with their inducers, by brute force over every
/// (word, translation, synset) triple.
pub fn oracle_candidates(raw: &RawWorld) -> BTreeMap<(String, String), BTreeSet<String>> {
    let mut out: BTreeMap<(String, String), BTreeSet<String>> = BTreeMap::new();
    for f in &raw.target_words {
        for (pf, e) in &raw.pairs {
            if pf != f {
                continue;
            }
            for s in &raw.synsets {
                if s.members.contains(e) {
                    out.entry((f.clone(), s.id.clone())).or_default().insert(e.clone());
                }
            }
        }
    }
    out
}

fn synset<'a>(raw: &'a RawWorld, id: &str) -> &'a RawSynset {
    raw.synsets.iter().find(|s| s.id == id).unwrap()
}

fn polysemy(raw: &RawWorld, e: &str, pos: Pos) -> usize {
    raw.synsets
        .iter()
        .filter(|s| s.pos == pos && s.members.iter().any(|m| m == e))
        .count()
}

fn jaccard(a: &BTreeSet<String>, b: &BTreeSet<String>) -> f64 {
    let inter = a.iter().filter(|x| b.contains(*x)).count();
    let union: BTreeSet<&String> = a.iter().chain(b.iter()).collect();
    if union.is_empty() {
        0.0
    } else {
        inter as f64 / union.len() as f64
    }
}

fn source_cv(raw: &RawWorld, e: &str) -> BTreeSet<String> {
    raw.source_cvs.get(e).cloned().unwrap_or_default()
}

fn relatedness_to(raw: &RawWorld, e: &str, s: &RawSynset) -> f64 {
    let cv = source_cv(raw, e);
    let total: f64 = s.members.iter().map(|m| jaccard(&cv, &source_cv(raw, m))).sum();
    total / s.members.len() as f64
}

fn oracle_cosine(a: &[f32], b: &[f32]) -> f64 {
    let dot: f64 = a.iter().zip(b).map(|(x, y)| *x as f64 * *y as f64).sum();
    let na: f64 = a.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| (*x as f64).powi(2)).sum::<f64>().sqrt();
    if na == 0.0 || nb == 0.0 {
        0.0
    } else {
        dot / (na * nb)
    }
}

/// Jensen-Shannon divergence in bits, from natural logarithms.
pub fn oracle_js(p: &[f64], q: &[f64]) -> f64 {
    let mut total = 0.0;
    for i in 0..p.len() {
        let m = (p[i] + q[i]) / 2.0;
        if p[i] > 0.0 {
            total += 0.5 * p[i] * (p[i] / m).ln();
        }
        if q[i] > 0.0 {
            total += 0.5 * q[i] * (q[i] / m).ln();
        }
    }
    total / std::f64::consts::LN_2
}

fn gloss_words(gloss: &str) -> BTreeSet<String> {
    let mut words = BTreeSet::new();
    let mut current = String::new();
    for c in gloss.chars().chain(std::iter::once(' ')) {
        if c.is_alphabetic() {
            current.extend(c.to_lowercase());
        } else {
            if current.chars().count() >= 2 {
                words.insert(current.clone());
            }
            current.clear();
        }
    }
    words
}

/// Reference values for every candidate link.
pub fn oracle_features(raw: &RawWorld) -> BTreeMap<(String, String), OracleFeatures> {
    let cands = oracle_candidates(raw);
    let weight = |f: &str, s: &RawSynset| -> f64 {
        cands[&(f.to_string(), s.id.clone())]
            .iter()
            .map(|e| 1.0 / polysemy(raw, e, s.pos) as f64)
            .sum()
    };

    let mut out = BTreeMap::new();
    for ((f, sid), inducers) in &cands {
        let s = synset(raw, sid);
        let cohort: Vec<&String> = cands
            .keys()
            .filter(|(_, other)| other == sid)
            .map(|(w, _)| w)
            .collect();
        let k = cohort.len();

        // relatedness
        let cv = raw.target_cvs.get(f).cloned().unwrap_or_default();
        let cvt: BTreeSet<String> = if cv.is_empty() {
            inducers.clone()
        } else {
            raw.pairs
                .iter()
                .filter(|(w, _)| cv.contains(w))
                .map(|(_, e)| e.clone())
                .collect()
        };
        let closure: Vec<&RawSynset> = raw
            .synsets
            .iter()
            .filter(|o| o.members.iter().any(|m| s.members.contains(m)))
            .collect();
        let r = if cvt.is_empty() {
            0.0
        } else {
            let total: f64 = cvt
                .iter()
                .map(|e| {
                    let denom: f64 = closure.iter().map(|o| relatedness_to(raw, e, o)).sum();
                    if denom > 0.0 {
                        relatedness_to(raw, e, s) / denom
                    } else {
                        0.0
                    }
                })
                .sum();
            total / cvt.len() as f64
        };

        // synset strength and domain similarity
        let ss = if k <= 1 {
            1.0
        } else {
            let total: f64 = cohort
                .iter()
                .filter(|o| **o != f)
                .map(|o| {
                    let cos = match (raw.embeddings.get(f), raw.embeddings.get(*o)) {
                        (Some(a), Some(b)) => oracle_cosine(a, b),
                        _ => 0.0,
                    };
                    weight(o, s) * cos
                })
                .sum();
            (total / (k - 1) as f64).clamp(-1.0, 1.0)
        };
        let ds = if k <= 1 {
            1.0
        } else if let Some(own) = raw.domains.get(f) {
            let total: f64 = cohort
                .iter()
                .filter(|o| **o != f)
                .map(|o| {
                    let sim = raw.domains.get(*o).map_or(0.0, |d| 1.0 - oracle_js(own, d).max(0.0).sqrt());
                    weight(o, s) * sim
                })
                .sum();
            (total / (k - 1) as f64).clamp(0.0, 1.0)
        } else {
            0.0
        };

        // context overlap
        let tokens = gloss_words(&s.gloss);
        let gt: BTreeSet<String> = raw
            .pairs
            .iter()
            .filter(|(_, e)| tokens.contains(e))
            .map(|(w, _)| w.clone())
            .collect();
        let co = jaccard(&gt, &cv);

        let me = inducers.iter().any(|e| polysemy(raw, e, s.pos) == 1) as u8;
        out.insert(
            (f.clone(), sid.clone()),
            OracleFeatures {
                r,
                ss,
                co,
                ds,
                me,
                sc: inducers.len() as u32,
            },
        );
    }
    out
}

/// Reference importance from given contested values [R, SS, CO, DS] per link.
pub fn oracle_importance(
    raw: &RawWorld,
    contested: &BTreeMap<(String, String), [f64; 4]>,
) -> BTreeMap<(String, String), u8> {
    let cands = oracle_candidates(raw);
    cands
        .iter()
        .map(|((f, sid), inducers)| {
            let own = contested[&(f.clone(), sid.clone())];
            let best = inducers
                .iter()
                .map(|e| {
                    let rivals: Vec<[f64; 4]> = raw
                        .synsets
                        .iter()
                        .filter(|o| &o.id != sid && o.members.contains(e))
                        .filter_map(|o| contested.get(&(f.clone(), o.id.clone())).copied())
                        .collect();
                    (0..4)
                        .filter(|&i| rivals.iter().all(|r| own[i] >= r[i]))
                        .count() as u8
                })
                .max()
                .unwrap_or(0);
            ((f.clone(), sid.clone()), best)
        })
        .collect()
}
