//! File-to-file pipeline stages driven by one flat `key = value` config.
//!
//! Every stage reads its inputs from the configured resource paths or from
//! the work directory and writes its outputs to the work directory, so each
//! one can be rerun on its own.

use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::Instant;

use ini::Ini;
use log::info;
use serde::{Deserialize, Serialize};

use crate::candidates::{generate_candidates, prune_pos, CandidateSet};
use crate::distributional::{build_context_vectors, train_skipgram, ContextVectors, DomainTable, EmbeddingTable, SkipGramConfig};
use crate::error::{Error, Result};
use crate::evaluation::{
    coverage, evaluate, load_core_list, render_coverage, render_crossval, render_evaluation,
    render_incremental, render_stats, CoverageReport, EvaluationReport, TestSet, WordnetStats,
};
use crate::features::{featurize, Feature, FeatureMatrix, FeatureResources, ImportanceTies};
use crate::io;
use crate::learning::{
    build_train_set, cross_validate, incremental_feature_eval, induce_wordnet, information_gain,
    load_induced, write_induced, ClassifierKind, ClassifierSpec, FeatureGain, MetricsReport, Model,
    TrainSet,
};
use crate::resources::{
    load_seed_links, BilingualDictionary, LinkKey, PolysemyScope, PosProfile, TaggedCorpus,
    WordnetIndex,
};

pub const TARGET_CV_FILE: &str = "target_cv.tsv";
pub const SOURCE_CV_FILE: &str = "source_cv.tsv";
pub const EMBEDDINGS_FILE: &str = "embeddings.txt";
pub const EMBEDDING_REPORT_FILE: &str = "embeddings.json";
pub const DOMAINS_FILE: &str = "domains.tsv";
pub const CANDIDATES_FILE: &str = "candidates.tsv";
pub const FEATURES_FILE: &str = "features.tsv";
pub const TRAINSET_FILE: &str = "trainset.tsv";
pub const MODEL_FILE: &str = "model.json";
pub const CROSSVAL_FILE: &str = "crossval.json";
pub const RANKING_FILE: &str = "ranking.json";
pub const INCREMENTAL_FILE: &str = "incremental.json";
pub const INDUCED_FILE: &str = "induced.tsv";
pub const EVALUATION_FILE: &str = "evaluation.json";
pub const STATS_FILE: &str = "stats.json";
pub const CROSSVAL_TEXT_FILE: &str = "crossval.txt";
pub const RANKING_TEXT_FILE: &str = "ranking.txt";
pub const INCREMENTAL_TEXT_FILE: &str = "incremental.txt";
pub const EVALUATION_TEXT_FILE: &str = "evaluation.txt";
pub const STATS_TEXT_FILE: &str = "stats.txt";

/// Resource paths a pipeline needs.
#[derive(Debug, Clone, PartialEq)]
pub struct Inputs {
    pub wordnet: PathBuf,
    pub dictionary: PathBuf,
    pub target_corpus: PathBuf,
    pub source_corpus: PathBuf,
    pub seed_links: PathBuf,
    pub test_links: Option<PathBuf>,
    pub core_synsets: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineConfig {
    pub inputs: Inputs,
    pub work_dir: PathBuf,
    pub context_k: usize,
    pub cv_min_count: u64,
    /// Corpus lemmas below this frequency get no candidate links.
    pub min_word_freq: u64,
    pub embedding: SkipGramConfig,
    pub prune_threshold: f64,
    pub polysemy_scope: PolysemyScope,
    pub importance_ties: ImportanceTies,
    /// Explicit number of random negatives; otherwise `negative_ratio` times
    /// the number of positives.
    pub negative_count: Option<usize>,
    pub negative_ratio: f64,
    pub folds: usize,
    pub ig_bins: usize,
    pub classifier: ClassifierKind,
    pub split_seed: u64,
    pub cv_seed: u64,
    pub workers: usize,
}

/// Keys accepted in a config file, in the order they are written.
pub const CONFIG_KEYS: &[&str] = &[
    "wordnet",
    "dictionary",
    "target_corpus",
    "source_corpus",
    "seed_links",
    "test_links",
    "core_synsets",
    "work_dir",
    "context_k",
    "cv_min_count",
    "min_word_freq",
    "embedding_dim",
    "embedding_window",
    "embedding_negatives",
    "embedding_epochs",
    "embedding_min_count",
    "embedding_learning_rate",
    "embedding_seed",
    "prune_threshold",
    "polysemy_scope",
    "importance_ties",
    "negative_count",
    "negative_ratio",
    "folds",
    "ig_bins",
    "classifier",
    "split_seed",
    "cv_seed",
    "workers",
];

fn parse<T: FromStr>(key: &str, value: &str) -> std::result::Result<T, String> {
    value
        .parse()
        .map_err(|_| format!("invalid value `{value}` for `{key}`"))
}

fn at_least<T: FromStr + PartialOrd + std::fmt::Display + Copy>(
    key: &str,
    value: &str,
    min: T,
) -> std::result::Result<T, String> {
    let v: T = parse(key, value)?;
    if v < min {
        return Err(format!("`{key}` must be at least {min}, got {v}"));
    }
    Ok(v)
}

impl PipelineConfig {
    pub fn for_inputs(inputs: Inputs) -> Self {
        PipelineConfig {
            inputs,
            work_dir: PathBuf::from("work"),
            context_k: 100,
            cv_min_count: 1,
            min_word_freq: 1,
            embedding: SkipGramConfig::default(),
            prune_threshold: 0.0,
            polysemy_scope: PolysemyScope::Pos,
            importance_ties: ImportanceTies::All,
            negative_count: None,
            negative_ratio: 0.46,
            folds: 10,
            ig_bins: 10,
            classifier: ClassifierKind::NaiveBayes,
            split_seed: 1,
            cv_seed: 1,
            workers: 1,
        }
    }

    /// Applies one `key = value` setting. Relative paths are taken relative
    /// to `base`.
    pub fn set(&mut self, key: &str, value: &str, base: &Path) -> std::result::Result<(), String> {
        let value = value.trim();
        let path = || {
            if value.is_empty() {
                return Err(format!("`{key}` needs a path"));
            }
            Ok(base.join(value))
        };
        let optional_path = || (!value.is_empty()).then(|| base.join(value));
        match key {
            "wordnet" => self.inputs.wordnet = path()?,
            "dictionary" => self.inputs.dictionary = path()?,
            "target_corpus" => self.inputs.target_corpus = path()?,
            "source_corpus" => self.inputs.source_corpus = path()?,
            "seed_links" => self.inputs.seed_links = path()?,
            "test_links" => self.inputs.test_links = optional_path(),
            "core_synsets" => self.inputs.core_synsets = optional_path(),
            "work_dir" => self.work_dir = path()?,
            "context_k" => self.context_k = at_least(key, value, 1)?,
            "cv_min_count" => self.cv_min_count = at_least(key, value, 1)?,
            "min_word_freq" => self.min_word_freq = at_least(key, value, 1)?,
            "embedding_dim" => self.embedding.dim = at_least(key, value, 1)?,
            "embedding_window" => self.embedding.window = at_least(key, value, 1)?,
            "embedding_negatives" => self.embedding.negatives = parse(key, value)?,
            "embedding_epochs" => self.embedding.epochs = at_least(key, value, 1)?,
            "embedding_min_count" => self.embedding.min_count = at_least(key, value, 1)?,
            "embedding_learning_rate" => {
                let lr: f32 = parse(key, value)?;
                if !(lr > 0.0 && lr.is_finite()) {
                    return Err(format!("`{key}` must be positive, got {value}"));
                }
                self.embedding.learning_rate = lr;
            }
            "embedding_seed" => self.embedding.seed = parse(key, value)?,
            "prune_threshold" => {
                let t: f64 = parse(key, value)?;
                if !(0.0..1.0).contains(&t) {
                    return Err(format!("`{key}` must lie in [0, 1), got {value}"));
                }
                self.prune_threshold = t;
            }
            "polysemy_scope" => self.polysemy_scope = value.parse()?,
            "importance_ties" => self.importance_ties = value.parse()?,
            "negative_count" => {
                self.negative_count = if value.is_empty() || value == "auto" {
                    None
                } else {
                    Some(parse(key, value)?)
                }
            }
            "negative_ratio" => {
                let r: f64 = parse(key, value)?;
                if !(r >= 0.0 && r.is_finite()) {
                    return Err(format!("`{key}` must be non-negative, got {value}"));
                }
                self.negative_ratio = r;
            }
            "folds" => self.folds = at_least(key, value, 2)?,
            "ig_bins" => self.ig_bins = at_least(key, value, 1)?,
            "classifier" => {
                self.classifier = value.parse()?;
                if self.classifier == (ClassifierKind::Knn { k: 0 }) {
                    return Err("`classifier` knn needs k of at least 1".into());
                }
            }
            "split_seed" => self.split_seed = parse(key, value)?,
            "cv_seed" => self.cv_seed = parse(key, value)?,
            "workers" => self.workers = at_least(key, value, 1)?,
            other => return Err(format!("unknown key `{other}`")),
        }
        Ok(())
    }

    /// Reads a config file. The five resource paths are required; every
    /// other key has a default. Relative paths are relative to the file.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let ini = Ini::load_from_str_noescape(&text)
            .map_err(|e| Error::parse(path, e.line + 1, e.msg.to_string()))?;
        if let Some(name) = ini.sections().flatten().next() {
            return Err(Error::Config(format!(
                "{}: sections are not supported (found `[{name}]`)",
                path.display()
            )));
        }
        let base = path.parent().unwrap_or(Path::new(""));
        let line_of = |key: &str| {
            text.lines()
                .position(|l| l.trim_start().starts_with(key))
                .map_or(0, |i| i + 1)
        };
        let mut cfg = Self::for_inputs(Inputs {
            wordnet: PathBuf::new(),
            dictionary: PathBuf::new(),
            target_corpus: PathBuf::new(),
            source_corpus: PathBuf::new(),
            seed_links: PathBuf::new(),
            test_links: None,
            core_synsets: None,
        });
        cfg.work_dir = base.join("work");
        for (key, value) in ini.general_section().iter() {
            cfg.set(key, value, base)
                .map_err(|m| Error::parse(path, line_of(key), m))?;
        }
        for (key, p) in [
            ("wordnet", &cfg.inputs.wordnet),
            ("dictionary", &cfg.inputs.dictionary),
            ("target_corpus", &cfg.inputs.target_corpus),
            ("source_corpus", &cfg.inputs.source_corpus),
            ("seed_links", &cfg.inputs.seed_links),
        ] {
            if p.as_os_str().is_empty() {
                return Err(Error::Config(format!("{}: missing required key `{key}`", path.display())));
            }
        }
        Ok(cfg)
    }

    fn value_of(&self, key: &str) -> String {
        let p = |p: &Path| p.display().to_string();
        let opt = |p: &Option<PathBuf>| p.as_deref().map(p_display).unwrap_or_default();
        fn p_display(p: &Path) -> String {
            p.display().to_string()
        }
        match key {
            "wordnet" => p(&self.inputs.wordnet),
            "dictionary" => p(&self.inputs.dictionary),
            "target_corpus" => p(&self.inputs.target_corpus),
            "source_corpus" => p(&self.inputs.source_corpus),
            "seed_links" => p(&self.inputs.seed_links),
            "test_links" => opt(&self.inputs.test_links),
            "core_synsets" => opt(&self.inputs.core_synsets),
            "work_dir" => p(&self.work_dir),
            "context_k" => self.context_k.to_string(),
            "cv_min_count" => self.cv_min_count.to_string(),
            "min_word_freq" => self.min_word_freq.to_string(),
            "embedding_dim" => self.embedding.dim.to_string(),
            "embedding_window" => self.embedding.window.to_string(),
            "embedding_negatives" => self.embedding.negatives.to_string(),
            "embedding_epochs" => self.embedding.epochs.to_string(),
            "embedding_min_count" => self.embedding.min_count.to_string(),
            "embedding_learning_rate" => self.embedding.learning_rate.to_string(),
            "embedding_seed" => self.embedding.seed.to_string(),
            "prune_threshold" => self.prune_threshold.to_string(),
            "polysemy_scope" => self.polysemy_scope.to_string(),
            "importance_ties" => self.importance_ties.to_string(),
            "negative_count" => self
                .negative_count
                .map_or_else(|| "auto".to_string(), |n| n.to_string()),
            "negative_ratio" => self.negative_ratio.to_string(),
            "folds" => self.folds.to_string(),
            "ig_bins" => self.ig_bins.to_string(),
            "classifier" => match self.classifier {
                ClassifierKind::NaiveBayes => "nb".to_string(),
                ClassifierKind::Knn { k } => format!("knn:{k}"),
            },
            "split_seed" => self.split_seed.to_string(),
            "cv_seed" => self.cv_seed.to_string(),
            "workers" => self.workers.to_string(),
            _ => unreachable!("CONFIG_KEYS and value_of disagree on `{key}`"),
        }
    }

    /// Every key with its value, one `key = value` line each.
    pub fn to_ini(&self) -> String {
        let mut s = String::new();
        for key in CONFIG_KEYS {
            let _ = writeln!(s, "{key} = {}", self.value_of(key));
        }
        s
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        let text = self.to_ini();
        io::write_with(path, |out| std::io::Write::write_all(out, text.as_bytes()))
    }

    pub fn work(&self, file: &str) -> PathBuf {
        self.work_dir.join(file)
    }
}

fn require(path: &Path) -> Result<&Path> {
    if path.exists() {
        Ok(path)
    } else {
        Err(Error::io(
            path,
            std::io::Error::new(std::io::ErrorKind::NotFound, "file not found"),
        ))
    }
}

fn write_text(path: &Path, text: &str) -> Result<()> {
    io::write_with(path, |out| std::io::Write::write_all(out, text.as_bytes()))
}

/// The stages in pipeline order.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    BuildCv,
    TrainEmbeddings,
    BuildDomains,
    GenCandidates,
    Featurize,
    BuildTrainset,
    Train,
    Crossval,
    RankFeatures,
    Induce,
    Evaluate,
    Stats,
}

impl Stage {
    pub const ALL: [Stage; 12] = [
        Stage::BuildCv,
        Stage::TrainEmbeddings,
        Stage::BuildDomains,
        Stage::GenCandidates,
        Stage::Featurize,
        Stage::BuildTrainset,
        Stage::Train,
        Stage::Crossval,
        Stage::RankFeatures,
        Stage::Induce,
        Stage::Evaluate,
        Stage::Stats,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Stage::BuildCv => "build-cv",
            Stage::TrainEmbeddings => "train-embeddings",
            Stage::BuildDomains => "build-domains",
            Stage::GenCandidates => "gen-candidates",
            Stage::Featurize => "featurize",
            Stage::BuildTrainset => "build-trainset",
            Stage::Train => "train",
            Stage::Crossval => "crossval",
            Stage::RankFeatures => "rank-features",
            Stage::Induce => "induce",
            Stage::Evaluate => "evaluate",
            Stage::Stats => "stats",
        }
    }

    /// Human-readable reports the stage writes into the work directory.
    pub fn reports(self) -> &'static [&'static str] {
        match self {
            Stage::Crossval => &[CROSSVAL_TEXT_FILE],
            Stage::RankFeatures => &[RANKING_TEXT_FILE, INCREMENTAL_TEXT_FILE],
            Stage::Evaluate => &[EVALUATION_TEXT_FILE],
            Stage::Stats => &[STATS_TEXT_FILE],
            _ => &[],
        }
    }

    pub fn run(self, cfg: &PipelineConfig) -> Result<()> {
        let start = Instant::now();
        match self {
            Stage::BuildCv => build_cv(cfg),
            Stage::TrainEmbeddings => train_embeddings(cfg),
            Stage::BuildDomains => build_domains(cfg),
            Stage::GenCandidates => gen_candidates(cfg),
            Stage::Featurize => featurize_stage(cfg),
            Stage::BuildTrainset => build_trainset(cfg),
            Stage::Train => train(cfg),
            Stage::Crossval => crossval(cfg),
            Stage::RankFeatures => rank_features(cfg),
            Stage::Induce => induce(cfg),
            Stage::Evaluate => evaluate_stage(cfg),
            Stage::Stats => stats(cfg),
        }?;
        info!("{} done in {:.2?}", self.name(), start.elapsed());
        Ok(())
    }
}

pub fn build_cv(cfg: &PipelineConfig) -> Result<()> {
    let target = TaggedCorpus::load(require(&cfg.inputs.target_corpus)?)?;
    let source = TaggedCorpus::load(require(&cfg.inputs.source_corpus)?)?;
    let t = build_context_vectors(&target, cfg.context_k, cfg.cv_min_count);
    let s = build_context_vectors(&source, cfg.context_k, cfg.cv_min_count);
    info!("context vectors: {} target, {} source", t.len(), s.len());
    t.write(&cfg.work(TARGET_CV_FILE))?;
    s.write(&cfg.work(SOURCE_CV_FILE))
}

pub fn train_embeddings(cfg: &PipelineConfig) -> Result<()> {
    let corpus = TaggedCorpus::load(require(&cfg.inputs.target_corpus)?)?;
    let (table, report) = train_skipgram(&corpus, &cfg.embedding)?;
    info!("embeddings: {} words, final loss {:?}", report.vocab_size, report.epoch_losses.last());
    table.write(&cfg.work(EMBEDDINGS_FILE))?;
    io::write_json(&cfg.work(EMBEDDING_REPORT_FILE), &report)
}

pub fn build_domains(cfg: &PipelineConfig) -> Result<()> {
    let corpus = TaggedCorpus::load(require(&cfg.inputs.target_corpus)?)?;
    let table = DomainTable::from_corpus(&corpus);
    info!("domains: {} categories, {} words", table.categories().len(), table.len());
    table.write(&cfg.work(DOMAINS_FILE))
}

fn vocabulary(corpus: &TaggedCorpus, min_freq: u64) -> BTreeSet<String> {
    let mut counts = std::collections::BTreeMap::<&str, u64>::new();
    for t in corpus.tokens() {
        *counts.entry(&t.lemma).or_default() += 1;
    }
    counts
        .into_iter()
        .filter(|&(_, c)| c >= min_freq)
        .map(|(w, _)| w.to_string())
        .collect()
}

pub fn gen_candidates(cfg: &PipelineConfig) -> Result<()> {
    let wn = WordnetIndex::load(require(&cfg.inputs.wordnet)?)?;
    let dict = BilingualDictionary::load(require(&cfg.inputs.dictionary)?)?;
    let corpus = TaggedCorpus::load(require(&cfg.inputs.target_corpus)?)?;
    let vocab = vocabulary(&corpus, cfg.min_word_freq);
    let all = generate_candidates(vocab.iter().map(String::as_str), &dict, &wn);
    let pruned = prune_pos(&all, &PosProfile::from_corpus(&corpus), cfg.prune_threshold);
    info!("candidates: {} generated, {} after pruning", all.len(), pruned.len());
    pruned.write(&cfg.work(CANDIDATES_FILE))
}

pub fn featurize_stage(cfg: &PipelineConfig) -> Result<()> {
    let wn = WordnetIndex::load(require(&cfg.inputs.wordnet)?)?;
    let dict = BilingualDictionary::load(require(&cfg.inputs.dictionary)?)?;
    let target_cvs = ContextVectors::load(require(&cfg.work(TARGET_CV_FILE))?)?;
    let source_cvs = ContextVectors::load(require(&cfg.work(SOURCE_CV_FILE))?)?;
    let embeddings = EmbeddingTable::load(require(&cfg.work(EMBEDDINGS_FILE))?)?;
    let domains = DomainTable::load(require(&cfg.work(DOMAINS_FILE))?)?;
    let candidates = CandidateSet::load(require(&cfg.work(CANDIDATES_FILE))?)?;
    let res = FeatureResources {
        wordnet: &wn,
        dictionary: &dict,
        target_cvs: &target_cvs,
        source_cvs: &source_cvs,
        embeddings: &embeddings,
        domains: &domains,
        polysemy_scope: cfg.polysemy_scope,
        importance_ties: cfg.importance_ties,
    };
    let matrix = featurize(&candidates, &res)?;
    info!("features: {} links", matrix.len());
    matrix.write(&cfg.work(FEATURES_FILE))
}

fn test_keys(cfg: &PipelineConfig) -> Result<BTreeSet<LinkKey>> {
    match &cfg.inputs.test_links {
        Some(p) => Ok(TestSet::load(require(p)?)?.keys()),
        None => Ok(BTreeSet::new()),
    }
}

fn seed_links(cfg: &PipelineConfig, wn: &WordnetIndex) -> Result<BTreeSet<LinkKey>> {
    let seeds = load_seed_links(require(&cfg.inputs.seed_links)?, wn)?;
    if seeds.dropped > 0 {
        log::warn!("{} seed links dropped for unknown synset ids", seeds.dropped);
    }
    Ok(seeds.links)
}

pub fn build_trainset(cfg: &PipelineConfig) -> Result<()> {
    let wn = WordnetIndex::load(require(&cfg.inputs.wordnet)?)?;
    let seeds = seed_links(cfg, &wn)?;
    let test = test_keys(cfg)?;
    let candidates = CandidateSet::load(require(&cfg.work(CANDIDATES_FILE))?)?;
    let features = FeatureMatrix::load(require(&cfg.work(FEATURES_FILE))?)?;
    let negatives = match cfg.negative_count {
        Some(n) => n,
        None => {
            let positives = candidates
                .keys()
                .filter(|k| seeds.contains(*k) && !test.contains(*k))
                .count();
            let pool = candidates
                .keys()
                .filter(|k| !seeds.contains(*k) && !test.contains(*k))
                .count();
            ((positives as f64 * cfg.negative_ratio).round() as usize).min(pool)
        }
    };
    let ts = build_train_set(&seeds, &candidates, &features, negatives, &test, cfg.split_seed)?;
    info!(
        "train set: {} positives, {} negatives, {} excluded test overlaps",
        ts.seed_positives, ts.random_negatives, ts.excluded_overlaps
    );
    ts.write(&cfg.work(TRAINSET_FILE))
}

fn spec(cfg: &PipelineConfig) -> ClassifierSpec {
    ClassifierSpec::new(cfg.classifier, &Feature::ALL)
}

pub fn train(cfg: &PipelineConfig) -> Result<()> {
    let ts = TrainSet::load(require(&cfg.work(TRAINSET_FILE))?)?;
    let model = spec(cfg).train(&ts.instances)?;
    model.write(&cfg.work(MODEL_FILE))
}

pub fn crossval(cfg: &PipelineConfig) -> Result<()> {
    let ts = TrainSet::load(require(&cfg.work(TRAINSET_FILE))?)?;
    let report = cross_validate(&ts.instances, cfg.folds, cfg.cv_seed, &spec(cfg))?;
    info!(
        "cross-validation: correct precision {:?}, recall {:?}",
        report.correct().precision,
        report.correct().recall
    );
    io::write_json(&cfg.work(CROSSVAL_FILE), &report)?;
    write_text(&cfg.work(CROSSVAL_TEXT_FILE), &render_crossval(&report))
}

pub fn rank_features(cfg: &PipelineConfig) -> Result<()> {
    let ts = TrainSet::load(require(&cfg.work(TRAINSET_FILE))?)?;
    let ranking = information_gain(&ts.instances, cfg.ig_bins);
    let order: Vec<Feature> = ranking.iter().map(|g| g.feature).collect();
    let rows = incremental_feature_eval(&ts.instances, &order, cfg.classifier, cfg.folds, cfg.cv_seed)?;
    io::write_json(&cfg.work(RANKING_FILE), &ranking)?;
    let mut text = String::new();
    for g in &ranking {
        let _ = writeln!(text, "{:<4} {:.6}", g.feature.abbreviation(), g.gain);
    }
    write_text(&cfg.work(RANKING_TEXT_FILE), &text)?;
    io::write_json(&cfg.work(INCREMENTAL_FILE), &rows)?;
    write_text(&cfg.work(INCREMENTAL_TEXT_FILE), &render_incremental(&rows))
}

pub fn induce(cfg: &PipelineConfig) -> Result<()> {
    let wn = WordnetIndex::load(require(&cfg.inputs.wordnet)?)?;
    let seeds = seed_links(cfg, &wn)?;
    let model = Model::load(require(&cfg.work(MODEL_FILE))?)?;
    let candidates = CandidateSet::load(require(&cfg.work(CANDIDATES_FILE))?)?;
    let features = FeatureMatrix::load(require(&cfg.work(FEATURES_FILE))?)?;
    let induced = induce_wordnet(&model, &candidates, &features, &seeds)?;
    info!("induced wordnet: {} links", induced.len());
    write_induced(&cfg.work(INDUCED_FILE), &induced)
}

fn induced_keys(cfg: &PipelineConfig) -> Result<BTreeSet<LinkKey>> {
    Ok(load_induced(require(&cfg.work(INDUCED_FILE))?)?
        .into_iter()
        .map(|l| l.key)
        .collect())
}

pub fn evaluate_stage(cfg: &PipelineConfig) -> Result<()> {
    let Some(test_path) = &cfg.inputs.test_links else {
        return Err(Error::Config("`test_links` is not set; nothing to evaluate against".into()));
    };
    let test = TestSet::load(require(test_path)?)?;
    let report = evaluate(&induced_keys(cfg)?, &test)?;
    info!(
        "evaluation: precision {:?}, recall {:?} over {} judged links",
        report.overall.precision, report.overall.recall, report.overall.evaluated
    );
    io::write_json(&cfg.work(EVALUATION_FILE), &report)?;
    write_text(&cfg.work(EVALUATION_TEXT_FILE), &render_evaluation(&report))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StatsReport {
    pub wordnet: WordnetStats,
    pub coverage: CoverageReport,
}

pub fn stats(cfg: &PipelineConfig) -> Result<()> {
    let wn = WordnetIndex::load(require(&cfg.inputs.wordnet)?)?;
    let corpus = TaggedCorpus::load(require(&cfg.inputs.target_corpus)?)?;
    let core = match &cfg.inputs.core_synsets {
        Some(p) => load_core_list(require(p)?)?,
        None => BTreeSet::new(),
    };
    let induced = induced_keys(cfg)?;
    let report = StatsReport {
        wordnet: crate::evaluation::wordnet_stats(&induced)?,
        coverage: coverage(&induced, &corpus.vocabulary(), &wn, &core),
    };
    io::write_json(&cfg.work(STATS_FILE), &report)?;
    let text = format!("{}\n{}", render_stats(&report.wordnet), render_coverage(&report.coverage));
    write_text(&cfg.work(STATS_TEXT_FILE), &text)
}

/// Headline results of a full run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineSummary {
    pub crossval: MetricsReport,
    pub ranking: Vec<FeatureGain>,
    pub evaluation: Option<EvaluationReport>,
    pub stats: StatsReport,
}

/// Runs every stage in order, stopping at the first failure. Evaluation is
/// skipped when no test links are configured.
pub fn run_all(cfg: &PipelineConfig) -> Result<PipelineSummary> {
    for stage in Stage::ALL {
        if stage == Stage::Evaluate && cfg.inputs.test_links.is_none() {
            info!("no test links configured, skipping evaluation");
            continue;
        }
        stage.run(cfg)?;
    }
    Ok(PipelineSummary {
        crossval: io::read_json(&cfg.work(CROSSVAL_FILE))?,
        ranking: io::read_json(&cfg.work(RANKING_FILE))?,
        evaluation: match cfg.inputs.test_links {
            Some(_) => Some(io::read_json(&cfg.work(EVALUATION_FILE))?),
            None => None,
        },
        stats: io::read_json(&cfg.work(STATS_FILE))?,
    })
}
