mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use wnlink::candidates::{build_feature_context, generate_candidates};
use wnlink::features::{domain_similarity, featurize, importance, synset_strength, ImportanceTies};
use wnlink::resources::{LinkKey, PolysemyScope};

use common::{micro_world, LibraryWorld};

fn world(seed: u64) -> (common::RawWorld, LibraryWorld) {
    let raw = micro_world(&mut ChaCha8Rng::seed_from_u64(seed), 20, 15);
    let lib = LibraryWorld::new(&raw);
    (raw, lib)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn values_stay_in_range(seed in any::<u64>()) {
        let (raw, lib) = world(seed);
        let cands = lib.candidates(&raw);
        let matrix = lib.featurize(&cands);
        for link in &cands {
            let fv = matrix.get(&link.key).unwrap();
            prop_assert!((0.0..=1.0 + 1e-12).contains(&fv.relatedness));
            prop_assert!((0.0..=1.0).contains(&fv.context_overlap));
            prop_assert!((-1.0..=1.0).contains(&fv.synset_strength));
            prop_assert!((0.0..=1.0).contains(&fv.domain_similarity));
            prop_assert!(fv.monosemous_english <= 1);
            prop_assert_eq!(fv.synset_commonality as usize, link.inducers.len());
            prop_assert!(fv.importance <= 4);
        }
    }

    #[test]
    fn singleton_cohorts_score_one(seed in any::<u64>()) {
        let (raw, lib) = world(seed);
        let cands = lib.candidates(&raw);
        let matrix = lib.featurize(&cands);
        let contexts = build_feature_context(&cands, &lib.wordnet, PolysemyScope::Pos);
        for link in &cands {
            if contexts[link.synset()].k() == 1 {
                let fv = matrix.get(&link.key).unwrap();
                prop_assert_eq!(fv.synset_strength, 1.0);
                prop_assert_eq!(fv.domain_similarity, 1.0);
            }
        }
    }

    #[test]
    fn vocabulary_order_is_irrelevant(seed in any::<u64>(), shuffle in any::<u64>()) {
        let (raw, lib) = world(seed);
        let mut vocab: Vec<&str> = raw.target_words.iter().map(String::as_str).collect();
        let reference = featurize(&generate_candidates(vocab.clone(), &lib.dictionary, &lib.wordnet), &lib.resources()).unwrap();
        vocab.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle));
        let permuted = featurize(&generate_candidates(vocab, &lib.dictionary, &lib.wordnet), &lib.resources()).unwrap();
        prop_assert_eq!(reference, permuted);
    }

    #[test]
    fn strict_ties_never_raise_importance(seed in any::<u64>()) {
        let (raw, lib) = world(seed);
        let cands = lib.candidates(&raw);
        let all = lib.featurize(&cands);
        let strict = featurize(&cands, &wnlink::features::FeatureResources {
            importance_ties: ImportanceTies::Strict,
            ..lib.resources()
        }).unwrap();
        for (key, fv) in all.iter() {
            let s = strict.get(key).unwrap();
            prop_assert!(s.importance <= fv.importance);
            prop_assert_eq!(s.relatedness, fv.relatedness);
        }
    }
}

#[test]
fn worker_count_does_not_change_features() {
    for seed in 0..20 {
        let (raw, lib) = world(seed);
        let cands = lib.candidates(&raw);
        let run = |threads| {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build()
                .unwrap()
                .install(|| lib.featurize(&cands))
        };
        assert_eq!(run(1), run(4), "world {seed}");
    }
}

fn contested(fv: &wnlink::features::FeatureVector) -> [f64; 4] {
    [fv.relatedness, fv.synset_strength, fv.context_overlap, fv.domain_similarity]
}

#[test]
fn removing_a_rival_never_lowers_importance() {
    let mut checked = 0;
    for seed in 0..60 {
        let (raw, lib) = world(seed);
        let cands = lib.candidates(&raw);
        let matrix = lib.featurize(&cands);
        let values: BTreeMap<LinkKey, [f64; 4]> = matrix.iter().map(|(k, v)| (k.clone(), contested(v))).collect();
        for removed in cands.keys() {
            let mut fewer = values.clone();
            fewer.remove(removed);
            for link in cands.iter().filter(|l| l.key != *removed) {
                for ties in [ImportanceTies::All, ImportanceTies::Strict] {
                    let before = importance(link, &values, &lib.wordnet, ties);
                    let after = importance(link, &fewer, &lib.wordnet, ties);
                    assert!(after >= before, "{} lost importance when {} was removed", link.key, removed);
                    checked += 1;
                }
            }
        }
    }
    assert!(checked > 1000);
}

#[test]
fn single_sense_inducer_gives_full_importance() {
    for seed in 0..40 {
        let (raw, lib) = world(seed);
        let cands = lib.candidates(&raw);
        let matrix = lib.featurize(&cands);
        for link in &cands {
            if link.inducers.iter().any(|e| lib.wordnet.synsets_of(e).count() == 1) {
                assert_eq!(matrix.get(&link.key).unwrap().importance, 4, "{}", link.key);
            }
        }
    }
}

#[test]
fn cohort_order_does_not_matter() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for seed in 0..40 {
        let (raw, lib) = world(seed);
        let cands = lib.candidates(&raw);
        let contexts = build_feature_context(&cands, &lib.wordnet, PolysemyScope::Pos);
        for link in &cands {
            let ctx = &contexts[link.synset()];
            let mut shuffled = ctx.clone();
            shuffled.cohort.shuffle(&mut rng);
            let ss = (synset_strength(link, ctx, &lib.embeddings), synset_strength(link, &shuffled, &lib.embeddings));
            let ds = (domain_similarity(link, ctx, &lib.domains), domain_similarity(link, &shuffled, &lib.domains));
            assert!((ss.0 - ss.1).abs() <= 1e-12);
            assert!((ds.0 - ds.1).abs() <= 1e-12);
        }
    }
}
