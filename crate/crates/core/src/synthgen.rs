//! Synthetic bilingual worlds with planted ground truth.
//!
//! A world has a reference wordnet, a dictionary from invented target words
//! to its members, tagged corpora in both languages, seed and judged links,
//! and the label of every candidate link. Correct links are planted so that
//! synonyms share sentence contexts, document categories and gloss vocabulary;
//! the noise knobs control how much the incorrect links look alike.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::io::Write;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::resources::{
    write_labeled_links, write_links, BilingualDictionary, Document, Label, LinkKey, Pos,
    Synset, TaggedCorpus, Token, WordnetIndex,
};

pub const MANIFEST_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WorldSpec {
    pub seed: u64,
    /// Distinct reference-language wordnet members.
    pub source_words: usize,
    pub synsets: usize,
    pub target_words: usize,
    pub documents: usize,
    pub categories: usize,
    /// Probability that a synset also borrows a member of another synset.
    pub ambiguity_rate: f64,
    /// Probability that a target word gets one translation unrelated to its meanings.
    pub misleading_rate: f64,
    /// Probability that a target word has a second meaning.
    pub target_polysemy_rate: f64,
    pub gloss_length: usize,
    /// Share of gloss tokens drawn from unrelated vocabulary.
    pub gloss_noise: f64,
    pub sentences_per_doc: usize,
    /// Context words planted per synset in each language.
    pub context_words: usize,
    /// Unrelated filler tokens per sentence.
    pub context_noise: usize,
    /// Reference-language sentences per synset.
    pub source_sentences: usize,
    /// Share of correct links published as seed links.
    pub seed_fraction: f64,
    /// Share of the remaining candidate links published as judged test links.
    pub test_fraction: f64,
    pub core_fraction: f64,
}

impl Default for WorldSpec {
    fn default() -> Self {
        WorldSpec {
            seed: 1,
            source_words: 450,
            synsets: 300,
            target_words: 500,
            documents: 200,
            categories: 9,
            ambiguity_rate: 0.3,
            misleading_rate: 0.1,
            target_polysemy_rate: 0.2,
            gloss_length: 8,
            gloss_noise: 0.25,
            sentences_per_doc: 40,
            context_words: 6,
            context_noise: 2,
            source_sentences: 12,
            seed_fraction: 0.5,
            test_fraction: 0.3,
            core_fraction: 0.3,
        }
    }
}

impl WorldSpec {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("source_words", self.source_words),
            ("synsets", self.synsets),
            ("target_words", self.target_words),
            ("documents", self.documents),
            ("categories", self.categories),
            ("gloss_length", self.gloss_length),
            ("sentences_per_doc", self.sentences_per_doc),
            ("context_words", self.context_words),
            ("source_sentences", self.source_sentences),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::Config(format!("{name} must be at least 1")));
            }
        }
        if self.source_words < self.synsets {
            return Err(Error::Config(format!(
                "source_words ({}) must be at least synsets ({})",
                self.source_words, self.synsets
            )));
        }
        let rates = [
            ("ambiguity_rate", self.ambiguity_rate),
            ("misleading_rate", self.misleading_rate),
            ("target_polysemy_rate", self.target_polysemy_rate),
            ("gloss_noise", self.gloss_noise),
            ("seed_fraction", self.seed_fraction),
            ("test_fraction", self.test_fraction),
            ("core_fraction", self.core_fraction),
        ];
        for (name, v) in rates {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::Config(format!("{name} must lie in [0, 1], got {v}")));
            }
        }
        Ok(())
    }
}

/// Draws unused words from a fixed consonant inventory. Inventories of the
/// two languages share no consonant, so their words never collide.
struct Lexicon {
    consonants: &'static [u8],
    used: HashSet<String>,
}

const VOWELS: &[u8] = b"aeiou";
const SOURCE_CONSONANTS: &[u8] = b"bdfgklmnprstvz";
const TARGET_CONSONANTS: &[u8] = b"chjqwxy";

impl Lexicon {
    fn new(consonants: &'static [u8]) -> Self {
        Lexicon {
            consonants,
            used: HashSet::new(),
        }
    }

    fn fresh(&mut self, rng: &mut ChaCha8Rng) -> String {
        loop {
            let syllables = rng.gen_range(2..=3);
            let mut w = String::with_capacity(syllables * 2);
            for _ in 0..syllables {
                w.push(*self.consonants.choose(rng).expect("nonempty") as char);
                w.push(*VOWELS.choose(rng).expect("nonempty") as char);
            }
            if self.used.insert(w.clone()) {
                return w;
            }
        }
    }

    fn many(&mut self, n: usize, rng: &mut ChaCha8Rng) -> Vec<String> {
        (0..n).map(|_| self.fresh(rng)).collect()
    }
}

fn draw_pos(rng: &mut ChaCha8Rng) -> Pos {
    match rng.gen_range(0..20) {
        0..=11 => Pos::Noun,
        12..=15 => Pos::Verb,
        16..=18 => Pos::Adjective,
        _ => Pos::Adverb,
    }
}

/// Everything a generated world consists of, in memory.
#[derive(Debug, Clone)]
pub struct World {
    pub wordnet: WordnetIndex,
    pub dictionary: BilingualDictionary,
    pub target_corpus: TaggedCorpus,
    pub source_corpus: TaggedCorpus,
    /// Meanings (synset ids) planted for each target word.
    pub meanings: BTreeMap<String, BTreeSet<String>>,
    /// Every dictionary-induced link with its planted label.
    pub ground_truth: BTreeMap<LinkKey, Label>,
    pub seeds: BTreeSet<LinkKey>,
    pub test: BTreeMap<LinkKey, Label>,
    pub core: BTreeSet<String>,
}

struct Concept {
    id: String,
    pos: Pos,
    category: usize,
    members: Vec<String>,
    target_context: Vec<String>,
    source_context: Vec<String>,
    expressers: Vec<String>,
}

pub fn build_world(spec: &WorldSpec) -> Result<World> {
    spec.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut source = Lexicon::new(SOURCE_CONSONANTS);
    let mut target = Lexicon::new(TARGET_CONSONANTS);

    // reference wordnet: one fresh member per synset, spare members spread
    // at random, then borrowed members for ambiguity
    let mut concepts: Vec<Concept> = (0..spec.synsets)
        .map(|i| {
            let pos = draw_pos(&mut rng);
            Concept {
                id: format!("{:08}-{}", i + 1, pos.code()),
                pos,
                category: rng.gen_range(0..spec.categories),
                members: vec![source.fresh(&mut rng)],
                target_context: Vec::new(),
                source_context: Vec::new(),
                expressers: Vec::new(),
            }
        })
        .collect();
    for _ in spec.synsets..spec.source_words {
        let w = source.fresh(&mut rng);
        let i = rng.gen_range(0..concepts.len());
        concepts[i].members.push(w);
    }
    if concepts.len() > 1 {
        for i in 0..concepts.len() {
            if rng.gen_bool(spec.ambiguity_rate) {
                let mut j = rng.gen_range(0..concepts.len() - 1);
                if j >= i {
                    j += 1;
                }
                let borrowed = concepts[j].members.choose(&mut rng).expect("nonempty").clone();
                if !concepts[i].members.contains(&borrowed) {
                    concepts[i].members.push(borrowed);
                }
            }
        }
    }
    for c in &mut concepts {
        c.target_context = target.many(spec.context_words, &mut rng);
        c.source_context = source.many(spec.context_words, &mut rng);
    }
    let target_noise = target.many(300, &mut rng);
    let source_noise = source.many(400, &mut rng);

    // target words and their meanings; the first ones cover every synset
    let mut order: Vec<usize> = (0..concepts.len()).collect();
    order.shuffle(&mut rng);
    let mut meanings: BTreeMap<String, BTreeSet<String>> = BTreeMap::new();
    let mut dictionary = BilingualDictionary::new();
    let all_members: Vec<String> = {
        let set: BTreeSet<&String> = concepts.iter().flat_map(|c| &c.members).collect();
        set.into_iter().cloned().collect()
    };
    for t in 0..spec.target_words {
        let f = target.fresh(&mut rng);
        let mut mine = vec![if t < order.len() {
            order[t]
        } else {
            rng.gen_range(0..concepts.len())
        }];
        if concepts.len() > 1 && rng.gen_bool(spec.target_polysemy_rate) {
            let other = rng.gen_range(0..concepts.len());
            if other != mine[0] {
                mine.push(other);
            }
        }
        for &c in &mine {
            let members = &concepts[c].members;
            let n = rng.gen_range(1..=members.len().min(2));
            for e in members.choose_multiple(&mut rng, n) {
                dictionary.insert(&f, e);
            }
            concepts[c].expressers.push(f.clone());
        }
        if rng.gen_bool(spec.misleading_rate) {
            let mine_members: BTreeSet<&String> =
                mine.iter().flat_map(|&c| &concepts[c].members).collect();
            if let Some(e) = all_members
                .iter()
                .filter(|e| !mine_members.contains(e))
                .collect::<Vec<_>>()
                .choose(&mut rng)
            {
                dictionary.insert(&f, e);
            }
        }
        meanings.insert(f, mine.iter().map(|&c| concepts[c].id.clone()).collect());
    }
    for c in &concepts {
        for (tc, sc) in c.target_context.iter().zip(&c.source_context) {
            dictionary.insert(tc, sc);
        }
    }

    let synsets: Vec<Synset> = concepts
        .iter()
        .map(|c| {
            let n_noise = (spec.gloss_length as f64 * spec.gloss_noise).round() as usize;
            let n_noise = n_noise.min(spec.gloss_length);
            let mut tokens: Vec<&str> = (0..spec.gloss_length - n_noise)
                .map(|_| c.source_context.choose(&mut rng).expect("nonempty").as_str())
                .collect();
            tokens.extend((0..n_noise).map(|_| source_noise.choose(&mut rng).expect("nonempty").as_str()));
            tokens.shuffle(&mut rng);
            let members: Vec<&str> = c.members.iter().map(String::as_str).collect();
            Synset::new(c.id.clone(), c.pos, &members, tokens.join(" "))
        })
        .collect();
    let wordnet = WordnetIndex::from_synsets(synsets)?;

    let target_corpus = target_corpus(spec, &concepts, &target_noise, &mut rng);
    let source_corpus = source_corpus(spec, &concepts, &source_noise, &mut rng);

    // label every dictionary-induced link by brute force
    let mut ground_truth = BTreeMap::new();
    for (f, planted) in &meanings {
        for e in dictionary.translate(f) {
            for s in wordnet.synsets_of(e) {
                let label = if planted.contains(s) {
                    Label::Correct
                } else {
                    Label::Incorrect
                };
                ground_truth.insert(LinkKey::new(f.as_str(), s), label);
            }
        }
    }

    let mut correct: Vec<&LinkKey> = ground_truth
        .iter()
        .filter(|(_, l)| **l == Label::Correct)
        .map(|(k, _)| k)
        .collect();
    correct.shuffle(&mut rng);
    let n_seed = (correct.len() as f64 * spec.seed_fraction).round() as usize;
    let seeds: BTreeSet<LinkKey> = correct[..n_seed].iter().map(|&k| k.clone()).collect();
    let mut rest: Vec<(&LinkKey, &Label)> = ground_truth.iter().filter(|(k, _)| !seeds.contains(*k)).collect();
    rest.shuffle(&mut rng);
    let n_test = (rest.len() as f64 * spec.test_fraction).round() as usize;
    let test = rest[..n_test].iter().map(|(k, l)| ((*k).clone(), **l)).collect();

    let mut ids: Vec<&String> = concepts.iter().map(|c| &c.id).collect();
    ids.shuffle(&mut rng);
    let n_core = (ids.len() as f64 * spec.core_fraction).round() as usize;
    let core = ids[..n_core].iter().map(|s| (*s).clone()).collect();

    Ok(World {
        wordnet,
        dictionary,
        target_corpus,
        source_corpus,
        meanings,
        ground_truth,
        seeds,
        test,
        core,
    })
}

fn concept_sentence(
    c: &Concept,
    turn: usize,
    spec: &WorldSpec,
    noise: &[String],
    rng: &mut ChaCha8Rng,
) -> Vec<Token> {
    let tag = c.pos.code().to_string();
    let mut tokens = Vec::new();
    let f = &c.expressers[turn % c.expressers.len()];
    tokens.push(Token::new(f, f, &tag));
    if c.expressers.len() > 1 && rng.gen_bool(0.5) {
        let other = &c.expressers[(turn + 1) % c.expressers.len()];
        tokens.push(Token::new(other, other, &tag));
    }
    let n_ctx = rng.gen_range(3..=4).min(c.target_context.len());
    for w in c.target_context.choose_multiple(rng, n_ctx) {
        tokens.push(Token::new(w, w, "n"));
    }
    for _ in 0..spec.context_noise {
        let w = noise.choose(rng).expect("nonempty");
        tokens.push(Token::new(w, w, "x"));
    }
    tokens.shuffle(rng);
    tokens
}

fn target_corpus(spec: &WorldSpec, concepts: &[Concept], noise: &[String], rng: &mut ChaCha8Rng) -> TaggedCorpus {
    let expressed: Vec<usize> = (0..concepts.len()).filter(|&i| !concepts[i].expressers.is_empty()).collect();
    let mut by_category: Vec<Vec<usize>> = vec![Vec::new(); spec.categories];
    for &i in &expressed {
        by_category[concepts[i].category].push(i);
    }
    let mut turns = vec![0usize; concepts.len()];
    let mut documents: Vec<Document> = (0..spec.documents)
        .map(|d| {
            let category = d % spec.categories;
            let sentences = (0..spec.sentences_per_doc)
                .filter_map(|_| {
                    let pool = if !by_category[category].is_empty() && rng.gen_bool(0.8) {
                        &by_category[category]
                    } else {
                        &expressed
                    };
                    let &i = pool.choose(rng)?;
                    turns[i] += 1;
                    Some(concept_sentence(&concepts[i], turns[i], spec, noise, rng))
                })
                .collect();
            Document {
                category: Some(format!("domain{category}")),
                sentences,
            }
        })
        .collect();
    // every expresser of every synset appears with that synset's POS a few times
    for &i in &expressed {
        let needed = 3 * concepts[i].expressers.len();
        let home = concepts[i].category;
        let docs: Vec<usize> = (0..documents.len()).filter(|d| d % spec.categories == home).collect();
        let docs = if docs.is_empty() { (0..documents.len()).collect() } else { docs };
        while turns[i] < needed {
            turns[i] += 1;
            let d = *docs.choose(rng).expect("at least one document");
            let s = concept_sentence(&concepts[i], turns[i], spec, noise, rng);
            documents[d].sentences.push(s);
        }
    }
    TaggedCorpus::new(documents)
}

fn source_corpus(spec: &WorldSpec, concepts: &[Concept], noise: &[String], rng: &mut ChaCha8Rng) -> TaggedCorpus {
    let documents = concepts
        .iter()
        .map(|c| {
            let tag = c.pos.code().to_string();
            let sentences = (0..spec.source_sentences)
                .map(|n| {
                    let mut tokens = Vec::new();
                    let m = &c.members[n % c.members.len()];
                    tokens.push(Token::new(m, m, &tag));
                    if c.members.len() > 1 && rng.gen_bool(0.5) {
                        let other = &c.members[(n + 1) % c.members.len()];
                        tokens.push(Token::new(other, other, &tag));
                    }
                    let n_ctx = rng.gen_range(3..=4).min(c.source_context.len());
                    for w in c.source_context.choose_multiple(rng, n_ctx) {
                        tokens.push(Token::new(w, w, "n"));
                    }
                    for _ in 0..spec.context_noise {
                        let w = noise.choose(rng).expect("nonempty");
                        tokens.push(Token::new(w, w, "x"));
                    }
                    tokens.shuffle(rng);
                    tokens
                })
                .collect();
            Document {
                category: None,
                sentences,
            }
        })
        .collect();
    TaggedCorpus::new(documents)
}

/// Emitted file names (relative to the output directory) and counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub format_version: u32,
    pub spec: WorldSpec,
    pub files: BTreeMap<String, PathBuf>,
    pub counts: BTreeMap<String, usize>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Self> {
        io::read_json(path)
    }

    /// Absolute path of an emitted file, given the directory it was written to.
    pub fn path(&self, dir: &Path, name: &str) -> Option<PathBuf> {
        self.files.get(name).map(|p| dir.join(p))
    }
}

pub const WORDNET_FILE: &str = "wordnet.jsonl";
pub const DICTIONARY_FILE: &str = "dictionary.tsv";
pub const TARGET_CORPUS_FILE: &str = "target_corpus.txt";
pub const SOURCE_CORPUS_FILE: &str = "source_corpus.txt";
pub const SEED_FILE: &str = "seed.tsv";
pub const TEST_FILE: &str = "test.tsv";
pub const GROUND_TRUTH_FILE: &str = "ground_truth.tsv";
pub const CORE_FILE: &str = "core.txt";
pub const CONFIG_FILE: &str = "pipeline.ini";
pub const MANIFEST_FILE: &str = "manifest.json";

/// Writes a world into `dir` together with a pipeline config that runs on it.
pub fn generate_world(spec: &WorldSpec, dir: &Path) -> Result<(Manifest, World)> {
    let world = build_world(spec)?;
    std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    world.wordnet.write(&dir.join(WORDNET_FILE))?;
    world.dictionary.write(&dir.join(DICTIONARY_FILE))?;
    world.target_corpus.write(&dir.join(TARGET_CORPUS_FILE))?;
    world.source_corpus.write(&dir.join(SOURCE_CORPUS_FILE))?;
    write_links(&dir.join(SEED_FILE), &world.seeds)?;
    write_labeled_links(&dir.join(TEST_FILE), world.test.iter().map(|(k, &l)| (k, l)))?;
    write_labeled_links(
        &dir.join(GROUND_TRUTH_FILE),
        world.ground_truth.iter().map(|(k, &l)| (k, l)),
    )?;
    io::write_with(&dir.join(CORE_FILE), |out| {
        for id in &world.core {
            writeln!(out, "{id}")?;
        }
        Ok(())
    })?;
    let config = crate::pipeline::PipelineConfig::for_inputs(crate::pipeline::Inputs {
        wordnet: WORDNET_FILE.into(),
        dictionary: DICTIONARY_FILE.into(),
        target_corpus: TARGET_CORPUS_FILE.into(),
        source_corpus: SOURCE_CORPUS_FILE.into(),
        seed_links: SEED_FILE.into(),
        test_links: Some(TEST_FILE.into()),
        core_synsets: Some(CORE_FILE.into()),
    });
    config.write(&dir.join(CONFIG_FILE))?;

    let files = [
        ("wordnet", WORDNET_FILE),
        ("dictionary", DICTIONARY_FILE),
        ("target_corpus", TARGET_CORPUS_FILE),
        ("source_corpus", SOURCE_CORPUS_FILE),
        ("seed_links", SEED_FILE),
        ("test_links", TEST_FILE),
        ("ground_truth", GROUND_TRUTH_FILE),
        ("core_synsets", CORE_FILE),
        ("config", CONFIG_FILE),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), PathBuf::from(v)))
    .collect();
    let correct = world.ground_truth.values().filter(|l| **l == Label::Correct).count();
    let counts = [
        ("synsets", world.wordnet.len()),
        ("source_words", world.wordnet.lemmas().count()),
        ("target_words", world.meanings.len()),
        ("dictionary_pairs", world.dictionary.len()),
        ("documents", world.target_corpus.documents.len()),
        ("target_tokens", world.target_corpus.token_count()),
        ("source_tokens", world.source_corpus.token_count()),
        ("candidate_links", world.ground_truth.len()),
        ("correct_links", correct),
        ("incorrect_links", world.ground_truth.len() - correct),
        ("seed_links", world.seeds.len()),
        ("test_links", world.test.len()),
        ("core_synsets", world.core.len()),
    ]
    .into_iter()
    .map(|(k, v)| (k.to_string(), v))
    .collect();
    let manifest = Manifest {
        format_version: MANIFEST_FORMAT_VERSION,
        spec: spec.clone(),
        files,
        counts,
    };
    io::write_json(&dir.join(MANIFEST_FILE), &manifest)?;
    Ok((manifest, world))
}
