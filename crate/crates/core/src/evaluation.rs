//! Scoring an induced wordnet against judged links, and its size and
//! coverage statistics.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::io;
use crate::learning::{f_measure, IncrementalRow, MetricsReport};
use crate::resources::{read_link_rows, Label, LinkKey, Pos, WordnetIndex};

/// Judged links with unique keys.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct TestSet {
    labels: BTreeMap<LinkKey, Label>,
}

impl TestSet {
    pub fn from_labels(rows: impl IntoIterator<Item = (LinkKey, Label)>) -> Result<Self> {
        let mut labels = BTreeMap::new();
        for (key, label) in rows {
            if labels.contains_key(&key) {
                return Err(Error::DuplicateLink {
                    lemma: key.lemma,
                    synset: key.synset,
                });
            }
            labels.insert(key, label);
        }
        Ok(TestSet { labels })
    }

    /// Link TSV with a mandatory third `correct`/`incorrect` column.
    pub fn load(path: &Path) -> Result<Self> {
        let rows = read_link_rows(path)?;
        let mut labeled = Vec::with_capacity(rows.len());
        for (line_no, key, label) in rows {
            let label = label.ok_or_else(|| Error::parse(path, line_no, "missing label column"))?;
            labeled.push((key, label));
        }
        Self::from_labels(labeled)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        crate::resources::write_labeled_links(path, self.labels.iter().map(|(k, &l)| (k, l)))
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn get(&self, key: &LinkKey) -> Option<Label> {
        self.labels.get(key).copied()
    }

    pub fn iter(&self) -> impl Iterator<Item = (&LinkKey, Label)> {
        self.labels.iter().map(|(k, &l)| (k, l))
    }

    pub fn keys(&self) -> BTreeSet<LinkKey> {
        self.labels.keys().cloned().collect()
    }
}

fn pos_of(key: &LinkKey) -> Result<Pos> {
    Pos::from_synset_id(&key.synset).ok_or_else(|| Error::UnknownPos(key.synset.clone()))
}

fn ratio(num: usize, den: usize) -> Option<f64> {
    (den > 0).then(|| num as f64 / den as f64)
}

/// Precision is over induced links that were judged; recall is over the
/// judged-correct links.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EvalCounts {
    /// Induced links present in the test set.
    pub evaluated: usize,
    /// Induced links judged correct.
    pub correct_induced: usize,
    /// Test links judged correct.
    pub correct_total: usize,
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f_measure: Option<f64>,
}

impl EvalCounts {
    fn finish(mut self) -> Self {
        self.precision = ratio(self.correct_induced, self.evaluated);
        self.recall = ratio(self.correct_induced, self.correct_total);
        self.f_measure = f_measure(self.precision, self.recall);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub induced_links: usize,
    pub test_links: usize,
    pub overall: EvalCounts,
    pub per_pos: BTreeMap<Pos, EvalCounts>,
}

pub fn evaluate(induced: &BTreeSet<LinkKey>, test: &TestSet) -> Result<EvaluationReport> {
    let mut overall = EvalCounts::default();
    let mut per_pos: BTreeMap<Pos, EvalCounts> = BTreeMap::new();
    for (key, label) in test.iter() {
        let part = per_pos.entry(pos_of(key)?).or_default();
        let hit = induced.contains(key);
        for c in [&mut overall, &mut *part] {
            c.evaluated += hit as usize;
            if label == Label::Correct {
                c.correct_total += 1;
                c.correct_induced += hit as usize;
            }
        }
    }
    Ok(EvaluationReport {
        induced_links: induced.len(),
        test_links: test.len(),
        overall: overall.finish(),
        per_pos: per_pos.into_iter().map(|(p, c)| (p, c.finish())).collect(),
    })
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeCounts {
    pub words: usize,
    pub synsets: usize,
    pub pairs: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WordnetStats {
    #[serde(flatten)]
    pub total: SizeCounts,
    pub per_pos: BTreeMap<Pos, SizeCounts>,
    /// Words linked to more than one synset.
    pub polysemous_words: usize,
    /// `polysemous_words / words`, 0 for an empty wordnet.
    pub polysemy_rate: f64,
}

fn size_counts<'a>(links: impl IntoIterator<Item = &'a LinkKey>) -> (SizeCounts, BTreeMap<&'a str, usize>) {
    let mut senses: BTreeMap<&str, usize> = BTreeMap::new();
    let mut synsets = BTreeSet::new();
    let mut pairs = 0;
    for k in links {
        *senses.entry(&k.lemma).or_default() += 1;
        synsets.insert(&k.synset);
        pairs += 1;
    }
    let counts = SizeCounts {
        words: senses.len(),
        synsets: synsets.len(),
        pairs,
    };
    (counts, senses)
}

pub fn wordnet_stats(links: &BTreeSet<LinkKey>) -> Result<WordnetStats> {
    let mut by_pos: BTreeMap<Pos, Vec<&LinkKey>> = BTreeMap::new();
    for k in links {
        by_pos.entry(pos_of(k)?).or_default().push(k);
    }
    let (total, senses) = size_counts(links);
    let polysemous_words = senses.values().filter(|&&n| n > 1).count();
    Ok(WordnetStats {
        polysemy_rate: ratio(polysemous_words, total.words).unwrap_or(0.0),
        total,
        per_pos: by_pos
            .into_iter()
            .map(|(p, ks)| (p, size_counts(ks).0))
            .collect(),
        polysemous_words,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageReport {
    /// Distinct induced words found in the corpus vocabulary.
    pub corpus_words: usize,
    pub vocabulary_size: usize,
    pub induced_synsets: usize,
    pub wordnet_synsets: usize,
    pub synset_coverage: f64,
    pub core_size: usize,
    pub core_covered: usize,
    /// `None` when the core list is empty.
    pub core_coverage: Option<f64>,
}

pub fn coverage(
    induced: &BTreeSet<LinkKey>,
    vocabulary: &BTreeSet<String>,
    wn: &WordnetIndex,
    core: &BTreeSet<String>,
) -> CoverageReport {
    let words: BTreeSet<&str> = induced.iter().map(|k| k.lemma.as_str()).collect();
    let synsets: BTreeSet<&str> = induced.iter().map(|k| k.synset.as_str()).collect();
    let core_covered = core.iter().filter(|id| synsets.contains(id.as_str())).count();
    CoverageReport {
        corpus_words: words.iter().filter(|w| vocabulary.contains(**w)).count(),
        vocabulary_size: vocabulary.len(),
        induced_synsets: synsets.len(),
        wordnet_synsets: wn.len(),
        synset_coverage: ratio(synsets.len(), wn.len()).unwrap_or(0.0),
        core_size: core.len(),
        core_covered,
        core_coverage: ratio(core_covered, core.len()),
    }
}

/// One synset id per line; blank lines and `#` comments are skipped.
pub fn load_core_list(path: &Path) -> Result<BTreeSet<String>> {
    let mut ids = BTreeSet::new();
    io::for_each_line(path, |_, line| {
        let id = line.trim();
        if !id.is_empty() && !id.starts_with('#') {
            ids.insert(id.to_string());
        }
        Ok(())
    })?;
    Ok(ids)
}

fn pct(x: Option<f64>) -> String {
    x.map_or_else(|| "n/a".to_string(), |v| format!("{:.2}", 100.0 * v))
}

/// Precision, recall and F (percent) per part of speech and overall.
pub fn render_evaluation(r: &EvaluationReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<10} {:>9} {:>9} {:>9} {:>9}", "POS", "Evaluated", "Precision", "Recall", "F");
    let rows = r
        .per_pos
        .iter()
        .map(|(p, c)| (p.name(), c))
        .chain([("total", &r.overall)]);
    for (name, c) in rows {
        let _ = writeln!(
            s,
            "{:<10} {:>9} {:>9} {:>9} {:>9}",
            name,
            c.evaluated,
            pct(c.precision),
            pct(c.recall),
            pct(c.f_measure)
        );
    }
    s
}

/// Words, synsets and pairs per part of speech, then the polysemy rate.
pub fn render_stats(st: &WordnetStats) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<10} {:>8} {:>8} {:>8}", "POS", "Words", "Synsets", "Pairs");
    let rows = st
        .per_pos
        .iter()
        .map(|(p, c)| (p.name(), c))
        .chain([("total", &st.total)]);
    for (name, c) in rows {
        let _ = writeln!(s, "{:<10} {:>8} {:>8} {:>8}", name, c.words, c.synsets, c.pairs);
    }
    let _ = writeln!(
        s,
        "polysemous words: {} ({:.2}%)",
        st.polysemous_words,
        100.0 * st.polysemy_rate
    );
    s
}

pub fn render_coverage(c: &CoverageReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "corpus words covered: {} of {}", c.corpus_words, c.vocabulary_size);
    let _ = writeln!(
        s,
        "synsets covered:      {} of {} ({:.2}%)",
        c.induced_synsets,
        c.wordnet_synsets,
        100.0 * c.synset_coverage
    );
    let _ = writeln!(
        s,
        "core synsets covered: {} of {} ({})",
        c.core_covered,
        c.core_size,
        c.core_coverage.map_or_else(|| "n/a".to_string(), |v| format!("{:.2}%", 100.0 * v))
    );
    s
}

/// Per-class and weighted precision, recall and F from cross-validation.
pub fn render_crossval(r: &MetricsReport) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<10} {:>9} {:>9} {:>9} {:>8}", "Class", "Precision", "Recall", "F", "Support");
    for c in &r.classes {
        let _ = writeln!(
            s,
            "{:<10} {:>9} {:>9} {:>9} {:>8}",
            c.label.as_str(),
            pct(c.precision),
            pct(c.recall),
            pct(c.f_measure),
            c.support
        );
    }
    let w = &r.weighted;
    let _ = writeln!(
        s,
        "{:<10} {:>9} {:>9} {:>9} {:>8}",
        "weighted",
        pct(Some(w.precision)),
        pct(Some(w.recall)),
        pct(Some(w.f_measure)),
        r.instances
    );
    s
}

/// Correct-class metrics as features are added in ranking order.
pub fn render_incremental(rows: &[IncrementalRow]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{:<28} {:>9} {:>9} {:>9}", "Features", "Precision", "Recall", "F");
    for r in rows {
        let names: Vec<&str> = r.features.iter().map(|f| f.abbreviation()).collect();
        let _ = writeln!(
            s,
            "{:<28} {:>9} {:>9} {:>9}",
            names.join(","),
            pct(r.precision),
            pct(r.recall),
            pct(r.f_measure)
        );
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn key(l: &str, s: &str) -> LinkKey {
        LinkKey::new(l, s)
    }

    fn test_set() -> TestSet {
        TestSet::from_labels([
            (key("a", "1-n"), Label::Correct),
            (key("b", "2-n"), Label::Correct),
            (key("c", "3-v"), Label::Incorrect),
            (key("d", "4-v"), Label::Correct),
            (key("e", "5-a"), Label::Incorrect),
        ])
        .unwrap()
    }

    #[test]
    fn exact_correct_links() {
        let t = test_set();
        let induced = t
            .iter()
            .filter(|(_, l)| *l == Label::Correct)
            .map(|(k, _)| k.clone())
            .collect();
        let r = evaluate(&induced, &t).unwrap();
        assert_eq!(r.overall.precision, Some(1.0));
        assert_eq!(r.overall.recall, Some(1.0));
    }

    #[test]
    fn no_overlap() {
        let r = evaluate(&BTreeSet::from([key("z", "9-n")]), &test_set()).unwrap();
        assert_eq!(r.overall.precision, None);
        assert_eq!(r.overall.recall, Some(0.0));
        assert_eq!(r.overall.f_measure, None);
    }

    #[test]
    fn hand_counted() {
        let induced = BTreeSet::from([key("a", "1-n"), key("c", "3-v"), key("d", "4-v"), key("x", "7-n")]);
        let r = evaluate(&induced, &test_set()).unwrap();
        assert_eq!(r.overall.evaluated, 3);
        assert_eq!(r.overall.correct_induced, 2);
        assert_eq!(r.overall.correct_total, 3);
        let v = &r.per_pos[&Pos::Verb];
        assert_eq!((v.evaluated, v.correct_induced, v.precision), (2, 1, Some(0.5)));
        assert_eq!(r.per_pos[&Pos::Adjective].precision, None);
    }

    #[test]
    fn unknown_pos_rejected() {
        let t = TestSet::from_labels([(key("a", "1"), Label::Correct)]).unwrap();
        assert!(matches!(evaluate(&BTreeSet::new(), &t), Err(Error::UnknownPos(_))));
    }

    #[test]
    fn duplicate_and_unlabeled_rows() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("t.tsv");
        std::fs::write(&p, "a\t1-n\tcorrect\na\t1-n\tincorrect\n").unwrap();
        assert!(matches!(TestSet::load(&p), Err(Error::DuplicateLink { .. })));
        std::fs::write(&p, "a\t1-n\tcorrect\nb\t2-n\n").unwrap();
        match TestSet::load(&p) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 2),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn stats_small_cases() {
        let one = wordnet_stats(&BTreeSet::from([key("a", "1-n")])).unwrap();
        assert_eq!((one.total.words, one.total.synsets, one.total.pairs), (1, 1, 1));
        assert_eq!(one.polysemy_rate, 0.0);
        let two = wordnet_stats(&BTreeSet::from([key("a", "1-n"), key("a", "2-v")])).unwrap();
        assert_eq!(two.polysemy_rate, 1.0);
        assert_eq!(two.per_pos[&Pos::Verb].pairs, 1);
        let empty = wordnet_stats(&BTreeSet::new()).unwrap();
        assert_eq!(empty.polysemy_rate, 0.0);
    }

    #[test]
    fn coverage_cases() {
        let wn = WordnetIndex::from_synsets((1..=4).map(|i| {
            crate::resources::Synset::new(format!("{i}-n"), Pos::Noun, &["w"], "")
        }))
        .unwrap();
        let core: BTreeSet<String> = ["1-n".to_string(), "2-n".to_string()].into();
        let vocab: BTreeSet<String> = ["a".to_string(), "q".to_string()].into();
        let induced = BTreeSet::from([key("a", "1-n"), key("b", "2-n")]);
        let c = coverage(&induced, &vocab, &wn, &core);
        assert_eq!(c.core_coverage, Some(1.0));
        assert_eq!(c.synset_coverage, 0.5);
        assert_eq!(c.corpus_words, 1);
        let e = coverage(&BTreeSet::new(), &vocab, &wn, &core);
        assert_eq!((e.corpus_words, e.synset_coverage, e.core_coverage), (0, 0.0, Some(0.0)));
        assert_eq!(coverage(&induced, &vocab, &wn, &BTreeSet::new()).core_coverage, None);
    }

    #[test]
    fn renderers_mention_every_row() {
        let r = evaluate(&BTreeSet::from([key("a", "1-n")]), &test_set()).unwrap();
        let t = render_evaluation(&r);
        assert!(t.contains("noun") && t.contains("verb") && t.contains("total"));
        assert!(t.contains("n/a"));
    }

    fn arb_world() -> impl Strategy<Value = (Vec<(LinkKey, Label)>, Vec<bool>)> {
        prop::collection::vec((0u8..6, 0u8..6, 0u8..3, any::<bool>(), any::<bool>()), 1..40).prop_map(|rows| {
            let mut seen = BTreeSet::new();
            let mut labels = Vec::new();
            let mut induced = Vec::new();
            for (w, s, p, correct, hit) in rows {
                let k = key(&format!("w{w}"), &format!("{s}-{}", ['n', 'v', 'r'][p as usize]));
                if seen.insert(k.clone()) {
                    labels.push((k, if correct { Label::Correct } else { Label::Incorrect }));
                    induced.push(hit);
                }
            }
            (labels, induced)
        })
    }

    proptest! {
        #[test]
        fn per_pos_sums_and_monotonicity((labels, hits) in arb_world()) {
            let t = TestSet::from_labels(labels.clone()).unwrap();
            let induced: BTreeSet<LinkKey> = labels.iter().zip(&hits).filter(|(_, h)| **h).map(|((k, _), _)| k.clone()).collect();
            let r = evaluate(&induced, &t).unwrap();
            let sum = |f: fn(&EvalCounts) -> usize| r.per_pos.values().map(f).sum::<usize>();
            prop_assert_eq!(sum(|c| c.evaluated), r.overall.evaluated);
            prop_assert_eq!(sum(|c| c.correct_induced), r.overall.correct_induced);
            prop_assert_eq!(sum(|c| c.correct_total), r.overall.correct_total);
            for v in [r.overall.precision, r.overall.recall].into_iter().flatten() {
                prop_assert!((0.0..=1.0).contains(&v));
            }
            // add one correct test link not yet induced
            if let Some((k, _)) = labels.iter().find(|(k, l)| *l == Label::Correct && !induced.contains(k)) {
                let mut more = induced.clone();
                more.insert(k.clone());
                let r2 = evaluate(&more, &t).unwrap();
                prop_assert!(r2.overall.recall.unwrap() >= r.overall.recall.unwrap());
                if let (Some(p1), Some(p2)) = (r.overall.precision, r2.overall.precision) {
                    let bound = p1 * r.overall.evaluated as f64 / r2.overall.evaluated as f64;
                    prop_assert!(p2 >= bound - 1e-12);
                }
            }
        }
    }
}
