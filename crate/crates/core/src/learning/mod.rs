//! Training-set construction, classifiers, cross-validation and feature ranking.

mod crossval;
mod infogain;
mod knn;
mod nb;

use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub(crate) use crossval::f_measure;
pub use crossval::{cross_validate, stratified_folds, ClassMetrics, MetricsReport, WeightedMetrics};
pub use infogain::{equal_frequency_bins, information_gain, information_gain_of, FeatureGain};
pub use knn::KnnModel;
pub use nb::{ClassGaussians, GaussianNb, VARIANCE_FLOOR};

use crate::candidates::CandidateSet;
use crate::error::{Error, Result};
use crate::features::{Feature, FeatureMatrix, FeatureVector};
use crate::io;
use crate::resources::{Label, LinkKey};

/// Version written into model files; loading rejects any other value.
pub const MODEL_FORMAT_VERSION: u32 = 1;

/// A labeled link. The label cannot change after construction.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Instance {
    pub(crate) key: LinkKey,
    pub(crate) features: FeatureVector,
    pub(crate) label: Label,
}

impl Instance {
    pub fn new(key: LinkKey, features: FeatureVector, label: Label) -> Self {
        Instance { key, features, label }
    }

    pub fn key(&self) -> &LinkKey {
        &self.key
    }

    pub fn features(&self) -> &FeatureVector {
        &self.features
    }

    pub fn label(&self) -> Label {
        self.label
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Prediction {
    pub label: Label,
    /// Posterior probability of `correct` (NB) or the share of `correct`
    /// votes (kNN).
    pub score: f64,
}

/// The values of `features`, in that order.
pub fn project(fv: &FeatureVector, features: &[Feature]) -> Vec<f64> {
    features.iter().map(|&f| fv.get(f)).collect()
}

/// Training instances with the counts of where they came from.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainSet {
    pub instances: Vec<Instance>,
    pub seed_positives: usize,
    pub random_negatives: usize,
    /// Seed or candidate keys dropped because they appear in the test set.
    pub excluded_overlaps: usize,
}

impl TrainSet {
    pub fn len(&self) -> usize {
        self.instances.len()
    }

    pub fn is_empty(&self) -> bool {
        self.instances.is_empty()
    }

    pub fn count(&self, label: Label) -> usize {
        self.instances.iter().filter(|i| i.label == label).count()
    }

    /// A `#` provenance line, then `lemma<TAB>synset<TAB>label<TAB>` and the
    /// seven feature values per instance.
    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_with(path, |out| {
            writeln!(
                out,
                "# seed_positives={} random_negatives={} excluded_overlaps={}",
                self.seed_positives, self.random_negatives, self.excluded_overlaps
            )?;
            for i in &self.instances {
                writeln!(
                    out,
                    "{}\t{}\t{}\t{}",
                    i.key.lemma,
                    i.key.synset,
                    i.label,
                    i.features.tsv_columns()
                )?;
            }
            Ok(())
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let mut ts = TrainSet {
            instances: Vec::new(),
            seed_positives: 0,
            random_negatives: 0,
            excluded_overlaps: 0,
        };
        let mut seen = BTreeSet::new();
        io::for_each_line(path, |line_no, line| {
            if let Some(meta) = line.strip_prefix('#') {
                for field in meta.split_whitespace() {
                    let Some((k, v)) = field.split_once('=') else { continue };
                    let v: usize = v
                        .parse()
                        .map_err(|_| Error::parse(path, line_no, format!("bad count `{field}`")))?;
                    match k {
                        "seed_positives" => ts.seed_positives = v,
                        "random_negatives" => ts.random_negatives = v,
                        "excluded_overlaps" => ts.excluded_overlaps = v,
                        _ => {}
                    }
                }
                return Ok(());
            }
            if line.is_empty() {
                return Ok(());
            }
            let cols: Vec<&str> = line.split('\t').collect();
            if cols.len() != 10 {
                return Err(Error::parse(
                    path,
                    line_no,
                    format!("expected 10 columns, found {}", cols.len()),
                ));
            }
            let label: Label = cols[2].parse().map_err(|m| Error::parse(path, line_no, m))?;
            let features = FeatureVector::parse_columns(&cols[3..], path, line_no)?;
            let key = LinkKey::new(cols[0], cols[1]);
            if !seen.insert(key.clone()) {
                return Err(Error::DuplicateLink {
                    lemma: key.lemma,
                    synset: key.synset,
                });
            }
            ts.instances.push(Instance::new(key, features, label));
            Ok(())
        })?;
        Ok(ts)
    }
}

/// Seed links that are candidates become positives; `negative_count`
/// non-seed candidates drawn uniformly without replacement become negatives.
/// Keys in `test_keys` are excluded from both.
pub fn build_train_set(
    seeds: &BTreeSet<LinkKey>,
    candidates: &CandidateSet,
    featurized: &FeatureMatrix,
    negative_count: usize,
    test_keys: &BTreeSet<LinkKey>,
    rng_seed: u64,
) -> Result<TrainSet> {
    let mut excluded = 0usize;
    let mut positives = Vec::new();
    let mut pool = Vec::new();
    for key in candidates.keys() {
        if test_keys.contains(key) {
            excluded += 1;
        } else if seeds.contains(key) {
            positives.push(key);
        } else {
            pool.push(key);
        }
    }
    if negative_count > pool.len() {
        return Err(Error::NegativePoolTooSmall {
            requested: negative_count,
            available: pool.len(),
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(rng_seed);
    let mut negatives: Vec<&LinkKey> = pool
        .choose_multiple(&mut rng, negative_count)
        .copied()
        .collect();
    negatives.sort();

    let lookup = |key: &LinkKey| {
        featurized.get(key).copied().ok_or_else(|| Error::MissingFeatures {
            lemma: key.lemma.clone(),
            synset: key.synset.clone(),
        })
    };
    let mut instances = Vec::with_capacity(positives.len() + negatives.len());
    for (keys, label) in [(&positives, Label::Correct), (&negatives, Label::Incorrect)] {
        for &key in keys.iter() {
            instances.push(Instance::new(key.clone(), lookup(key)?, label));
        }
    }
    let ts = TrainSet {
        seed_positives: positives.len(),
        random_negatives: negatives.len(),
        excluded_overlaps: excluded,
        instances,
    };
    check_disjoint(&ts, test_keys)?;
    Ok(ts)
}

fn check_disjoint(ts: &TrainSet, test_keys: &BTreeSet<LinkKey>) -> Result<()> {
    let mut seen = BTreeSet::new();
    for i in &ts.instances {
        if !seen.insert(&i.key) {
            return Err(Error::Invariant(format!("training key {} appears twice", i.key)));
        }
        if test_keys.contains(&i.key) {
            return Err(Error::Invariant(format!("training key {} is in the test set", i.key)));
        }
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClassifierKind {
    NaiveBayes,
    Knn { k: usize },
}

impl fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ClassifierKind::NaiveBayes => f.write_str("nb"),
            ClassifierKind::Knn { k } => write!(f, "knn(k={k})"),
        }
    }
}

impl FromStr for ClassifierKind {
    type Err = String;

    /// `nb`, `knn` (k = 10) or `knn:<k>`.
    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "nb" | "naive_bayes" | "naivebayes" => Ok(ClassifierKind::NaiveBayes),
            "knn" => Ok(ClassifierKind::Knn { k: 10 }),
            other => other
                .strip_prefix("knn:")
                .and_then(|k| k.parse().ok())
                .map(|k| ClassifierKind::Knn { k })
                .ok_or_else(|| format!("unknown classifier `{s}` (expected nb, knn or knn:<k>)")),
        }
    }
}

/// Which classifier to train and on which features.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ClassifierSpec {
    pub kind: ClassifierKind,
    pub features: Vec<Feature>,
}

impl ClassifierSpec {
    pub fn new(kind: ClassifierKind, features: &[Feature]) -> Self {
        ClassifierSpec {
            kind,
            features: features.to_vec(),
        }
    }

    pub fn naive_bayes() -> Self {
        Self::new(ClassifierKind::NaiveBayes, &Feature::ALL)
    }

    pub fn train(&self, instances: &[Instance]) -> Result<Model> {
        match self.kind {
            ClassifierKind::NaiveBayes => GaussianNb::fit(instances, &self.features).map(Model::NaiveBayes),
            ClassifierKind::Knn { k } => KnnModel::fit(instances, &self.features, k).map(Model::Knn),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "classifier", rename_all = "snake_case")]
pub enum Model {
    NaiveBayes(GaussianNb),
    Knn(KnnModel),
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format_version: u32,
    model: Model,
}

impl Model {
    pub fn features(&self) -> &[Feature] {
        match self {
            Model::NaiveBayes(m) => &m.features,
            Model::Knn(m) => &m.features,
        }
    }

    pub fn predict(&self, fv: &FeatureVector) -> Result<Prediction> {
        match self {
            Model::NaiveBayes(m) => m.predict(fv),
            Model::Knn(m) => m.predict(fv),
        }
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        io::write_json(
            path,
            &ModelFile {
                format_version: MODEL_FORMAT_VERSION,
                model: self.clone(),
            },
        )
    }

    pub fn load(path: &Path) -> Result<Self> {
        let file: ModelFile = io::read_json(path)?;
        if file.format_version != MODEL_FORMAT_VERSION {
            return Err(Error::Config(format!(
                "{}: model format version {} is not supported (expected {})",
                path.display(),
                file.format_version,
                MODEL_FORMAT_VERSION
            )));
        }
        Ok(file.model)
    }
}

/// Correct-class metrics for one prefix of a feature ranking.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IncrementalRow {
    pub features: Vec<Feature>,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f_measure: Option<f64>,
    pub report: MetricsReport,
}

/// Cross-validates every prefix of `ranking`, shortest first.
pub fn incremental_feature_eval(
    instances: &[Instance],
    ranking: &[Feature],
    kind: ClassifierKind,
    folds: usize,
    seed: u64,
) -> Result<Vec<IncrementalRow>> {
    (1..=ranking.len())
        .map(|n| {
            let spec = ClassifierSpec::new(kind, &ranking[..n]);
            let report = cross_validate(instances, folds, seed, &spec)?;
            let c = report.correct().clone();
            Ok(IncrementalRow {
                features: spec.features,
                precision: c.precision,
                recall: c.recall,
                f_measure: c.f_measure,
                report,
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct InducedLink {
    pub key: LinkKey,
    pub posterior: f64,
}

/// Candidates predicted correct, minus the seed links, sorted by key.
pub fn induce_wordnet(
    model: &Model,
    candidates: &CandidateSet,
    featurized: &FeatureMatrix,
    seeds: &BTreeSet<LinkKey>,
) -> Result<Vec<InducedLink>> {
    let keys: Vec<&LinkKey> = candidates.keys().filter(|k| !seeds.contains(*k)).collect();
    let predicted: Vec<Option<InducedLink>> = keys
        .par_iter()
        .map(|&key| {
            let fv = featurized.get(key).ok_or_else(|| Error::MissingFeatures {
                lemma: key.lemma.clone(),
                synset: key.synset.clone(),
            })?;
            let p = model.predict(fv)?;
            Ok((p.label == Label::Correct).then(|| InducedLink {
                key: key.clone(),
                posterior: p.score,
            }))
        })
        .collect::<Result<_>>()?;
    Ok(predicted.into_iter().flatten().collect())
}

/// `lemma<TAB>synset_id<TAB>posterior` with four decimals.
pub fn write_induced(path: &Path, links: &[InducedLink]) -> Result<()> {
    io::write_with(path, |out| {
        for l in links {
            writeln!(out, "{}\t{}\t{:.4}", l.key.lemma, l.key.synset, l.posterior)?;
        }
        Ok(())
    })
}

/// Reads an induced wordnet; the score column is optional so that link
/// lists from other sources can be scored too. Missing scores read as 1.
pub fn load_induced(path: &Path) -> Result<Vec<InducedLink>> {
    let mut links = Vec::new();
    io::for_each_line(path, |line_no, line| {
        if line.trim().is_empty() {
            return Ok(());
        }
        let cols: Vec<&str> = line.split('\t').map(str::trim).collect();
        let (lemma, synset, posterior) = match cols.as_slice() {
            [l, s] => (*l, *s, 1.0),
            [l, s, p] => {
                let p: f64 = p
                    .parse()
                    .ok()
                    .filter(|p: &f64| p.is_finite())
                    .ok_or_else(|| Error::parse(path, line_no, format!("bad score `{p}`")))?;
                (*l, *s, p)
            }
            _ => {
                return Err(Error::parse(
                    path,
                    line_no,
                    "expected `lemma<TAB>synset_id[<TAB>score]`",
                ))
            }
        };
        links.push(InducedLink {
            key: LinkKey::new(lemma, synset),
            posterior,
        });
        Ok(())
    })?;
    links.sort_by(|a, b| a.key.cmp(&b.key));
    links.dedup_by(|a, b| a.key == b.key);
    Ok(links)
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;
    use crate::candidates::CandidateLink;
    use crate::resources::Pos;

    pub(crate) fn instance_with(i: usize, v: [f64; 7], label: Label) -> Instance {
        Instance::new(
            LinkKey::new(format!("w{i}"), format!("{i:04}-n")),
            FeatureVector {
                relatedness: v[0],
                synset_strength: v[1],
                context_overlap: v[2],
                domain_similarity: v[3],
                monosemous_english: v[4] as u8,
                synset_commonality: v[5] as u32,
                importance: v[6] as u8,
            },
            label,
        )
    }

    fn world(n: usize) -> (CandidateSet, FeatureMatrix) {
        let links: Vec<CandidateLink> = (0..n)
            .map(|i| CandidateLink {
                key: LinkKey::new(format!("f{i:03}"), format!("{i:03}-n")),
                inducers: BTreeSet::from([format!("e{i}")]),
                pos: Pos::Noun,
            })
            .collect();
        let fm = FeatureMatrix::from_rows(links.iter().map(|l| {
            let x = l.key.lemma[1..].parse::<f64>().unwrap() / n as f64;
            (l.key.clone(), instance_with(0, [x, x, x, x, 0.0, 1.0, 0.0], Label::Correct).features)
        }));
        (CandidateSet::from_links(links), fm)
    }

    fn keys(range: std::ops::Range<usize>) -> BTreeSet<LinkKey> {
        range
            .map(|i| LinkKey::new(format!("f{i:03}"), format!("{i:03}-n")))
            .collect()
    }

    #[test]
    fn positives_and_negatives_are_disjoint() {
        let (cands, fm) = world(300);
        let ts = build_train_set(&keys(0..100), &cands, &fm, 50, &BTreeSet::new(), 4).unwrap();
        assert_eq!(ts.count(Label::Correct), 100);
        assert_eq!(ts.count(Label::Incorrect), 50);
        let seeds = keys(0..100);
        for i in &ts.instances {
            assert_eq!(seeds.contains(&i.key), i.label == Label::Correct);
        }
    }

    #[test]
    fn test_keys_are_excluded() {
        let (cands, fm) = world(300);
        let test = keys(90..110);
        let ts = build_train_set(&keys(0..100), &cands, &fm, 150, &test, 4).unwrap();
        assert_eq!(ts.seed_positives, 90);
        assert_eq!(ts.excluded_overlaps, 20);
        assert!(ts.instances.iter().all(|i| !test.contains(&i.key)));
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let (cands, fm) = world(300);
        let a = build_train_set(&keys(0..100), &cands, &fm, 50, &BTreeSet::new(), 4).unwrap();
        let b = build_train_set(&keys(0..100), &cands, &fm, 50, &BTreeSet::new(), 4).unwrap();
        let c = build_train_set(&keys(0..100), &cands, &fm, 50, &BTreeSet::new(), 5).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn pool_too_small() {
        let (cands, fm) = world(120);
        match build_train_set(&keys(0..100), &cands, &fm, 21, &BTreeSet::new(), 1) {
            Err(Error::NegativePoolTooSmall { requested, available }) => {
                assert_eq!((requested, available), (21, 20));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn missing_features() {
        let (cands, _) = world(10);
        let empty = FeatureMatrix::from_rows([]);
        assert!(matches!(
            build_train_set(&keys(0..5), &cands, &empty, 1, &BTreeSet::new(), 1),
            Err(Error::MissingFeatures { .. })
        ));
    }

    #[test]
    fn train_set_round_trip() {
        let (cands, fm) = world(50);
        let ts = build_train_set(&keys(0..20), &cands, &fm, 10, &keys(45..50), 2).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("train.tsv");
        ts.write(&path).unwrap();
        let back = TrainSet::load(&path).unwrap();
        assert_eq!(back.len(), ts.len());
        assert_eq!(
            (back.seed_positives, back.random_negatives, back.excluded_overlaps),
            (20, 10, 5)
        );
        for (a, b) in back.instances.iter().zip(&ts.instances) {
            assert_eq!((&a.key, a.label), (&b.key, b.label));
            assert!((a.features.relatedness - b.features.relatedness).abs() < 1e-6);
        }
    }

    #[test]
    fn induction_excludes_seeds_and_sorts() {
        let (cands, fm) = world(200);
        let seeds = keys(150..160);
        let ts = build_train_set(&seeds, &cands, &fm, 10, &BTreeSet::new(), 3).unwrap();
        // a model that calls everything correct
        let model = Model::Knn(KnnModel::fit(&ts.instances[..1], &[Feature::Relatedness], 1).unwrap());
        let induced = induce_wordnet(&model, &cands, &fm, &seeds).unwrap();
        assert_eq!(induced.len(), 190);
        assert!(induced.iter().all(|l| !seeds.contains(&l.key)));
        assert!(induced.windows(2).all(|w| w[0].key < w[1].key));

        let none = Model::Knn(KnnModel::fit(&ts.instances[ts.len() - 1..], &[Feature::Relatedness], 1).unwrap());
        assert!(induce_wordnet(&none, &cands, &fm, &seeds).unwrap().is_empty());
    }

    #[test]
    fn model_and_induced_round_trip() {
        let (cands, fm) = world(200);
        let ts = build_train_set(&keys(100..200), &cands, &fm, 50, &BTreeSet::new(), 3).unwrap();
        let dir = tempfile::tempdir().unwrap();
        for spec in [
            ClassifierSpec::naive_bayes(),
            ClassifierSpec::new(ClassifierKind::Knn { k: 3 }, &Feature::ALL),
        ] {
            let model = spec.train(&ts.instances).unwrap();
            let path = dir.path().join("model.json");
            model.write(&path).unwrap();
            assert_eq!(Model::load(&path).unwrap(), model);
        }
        let model = ClassifierSpec::naive_bayes().train(&ts.instances).unwrap();
        let induced = induce_wordnet(&model, &cands, &fm, &keys(100..200)).unwrap();
        let path = dir.path().join("induced.tsv");
        write_induced(&path, &induced).unwrap();
        let back = load_induced(&path).unwrap();
        assert_eq!(back.len(), induced.len());
        for (a, b) in back.iter().zip(&induced) {
            assert_eq!(a.key, b.key);
            assert!((a.posterior - b.posterior).abs() <= 5e-5);
        }
    }

    #[test]
    fn classifier_names() {
        assert_eq!("nb".parse::<ClassifierKind>().unwrap(), ClassifierKind::NaiveBayes);
        assert_eq!("knn".parse::<ClassifierKind>().unwrap(), ClassifierKind::Knn { k: 10 });
        assert_eq!("KNN:3".parse::<ClassifierKind>().unwrap(), ClassifierKind::Knn { k: 3 });
        assert!("svm".parse::<ClassifierKind>().is_err());
    }

    #[test]
    fn incremental_rows_match_direct_runs() {
        let data: Vec<Instance> = (0..80)
            .map(|i| {
                let l = if i % 3 == 0 { Label::Incorrect } else { Label::Correct };
                let x = (i as f64 * 0.37).sin() + if l == Label::Correct { 0.8 } else { 0.0 };
                instance_with(i, [x, (i as f64).cos(), x * 0.5, 0.1, (i % 2) as f64, 1.0, (i % 5) as f64], l)
            })
            .collect();
        let ranking: Vec<Feature> = information_gain(&data, 10).into_iter().map(|g| g.feature).collect();
        let rows = incremental_feature_eval(&data, &ranking, ClassifierKind::NaiveBayes, 10, 7).unwrap();
        assert_eq!(rows.len(), 7);
        for (n, row) in rows.iter().enumerate() {
            let direct = cross_validate(&data, 10, 7, &ClassifierSpec::new(ClassifierKind::NaiveBayes, &ranking[..=n])).unwrap();
            assert_eq!(row.report, direct);
        }
    }
}
