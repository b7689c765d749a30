use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ClassifierSpec, Instance};
use crate::error::{Error, Result};
use crate::resources::Label;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassMetrics {
    pub label: Label,
    /// Instances whose true label is this class.
    pub support: usize,
    /// Instances predicted as this class.
    pub predicted: usize,
    pub true_positives: usize,
    /// `None` when nothing was predicted as this class.
    pub precision: Option<f64>,
    pub recall: Option<f64>,
    pub f_measure: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WeightedMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f_measure: f64,
}

/// Precision and recall per class, support-weighted averages, and the
/// confusion matrix (`confusion[actual][predicted]`, `correct` = 0).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsReport {
    pub instances: usize,
    pub folds: usize,
    pub fold_sizes: Vec<usize>,
    pub classes: Vec<ClassMetrics>,
    pub weighted: WeightedMetrics,
    pub confusion: [[usize; 2]; 2],
}

pub(crate) fn f_measure(p: Option<f64>, r: Option<f64>) -> Option<f64> {
    match (p, r) {
        (Some(p), Some(r)) if p + r > 0.0 => Some(2.0 * p * r / (p + r)),
        (Some(_), Some(_)) => Some(0.0),
        _ => None,
    }
}

impl MetricsReport {
    pub fn from_predictions(pairs: &[(Label, Label)], folds: usize, fold_sizes: Vec<usize>) -> Self {
        let mut confusion = [[0usize; 2]; 2];
        for &(actual, predicted) in pairs {
            confusion[actual.index()][predicted.index()] += 1;
        }
        let classes: Vec<ClassMetrics> = Label::BOTH
            .iter()
            .map(|&label| {
                let i = label.index();
                let support = confusion[i][0] + confusion[i][1];
                let predicted = confusion[0][i] + confusion[1][i];
                let tp = confusion[i][i];
                let precision = (predicted > 0).then(|| tp as f64 / predicted as f64);
                let recall = (support > 0).then(|| tp as f64 / support as f64);
                ClassMetrics {
                    label,
                    support,
                    predicted,
                    true_positives: tp,
                    precision,
                    recall,
                    f_measure: f_measure(precision, recall),
                }
            })
            .collect();
        let n = pairs.len().max(1) as f64;
        let avg = |get: fn(&ClassMetrics) -> Option<f64>| {
            classes
                .iter()
                .map(|c| c.support as f64 * get(c).unwrap_or(0.0))
                .sum::<f64>()
                / n
        };
        let weighted = WeightedMetrics {
            precision: avg(|c| c.precision),
            recall: avg(|c| c.recall),
            f_measure: avg(|c| c.f_measure),
        };
        MetricsReport {
            instances: pairs.len(),
            folds,
            fold_sizes,
            classes,
            weighted,
            confusion,
        }
    }

    pub fn class(&self, label: Label) -> &ClassMetrics {
        &self.classes[label.index()]
    }

    pub fn correct(&self) -> &ClassMetrics {
        self.class(Label::Correct)
    }
}

/// Assigns each instance to a fold. Classes are shuffled separately, laid out
/// one after the other and dealt round-robin, so fold sizes and per-class
/// fold counts each differ by at most one.
pub fn stratified_folds(labels: &[Label], folds: usize, seed: u64) -> Result<Vec<usize>> {
    if folds < 2 {
        return Err(Error::Config(format!("need at least 2 folds, got {folds}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut assignment = vec![0usize; labels.len()];
    let mut slot = 0usize;
    for label in Label::BOTH {
        let mut members: Vec<usize> = (0..labels.len()).filter(|&i| labels[i] == label).collect();
        if members.len() < folds {
            return Err(Error::ClassTooSmall {
                class: label.to_string(),
                count: members.len(),
                needed: folds,
            });
        }
        members.shuffle(&mut rng);
        for i in members {
            assignment[i] = slot % folds;
            slot += 1;
        }
    }
    Ok(assignment)
}

/// Stratified k-fold cross-validation with predictions pooled over folds.
pub fn cross_validate(
    instances: &[Instance],
    folds: usize,
    seed: u64,
    spec: &ClassifierSpec,
) -> Result<MetricsReport> {
    let labels: Vec<Label> = instances.iter().map(|i| i.label).collect();
    let assignment = stratified_folds(&labels, folds, seed)?;
    let per_fold: Vec<Vec<(Label, Label)>> = (0..folds)
        .into_par_iter()
        .map(|fold| -> Result<Vec<(Label, Label)>> {
            let train: Vec<Instance> = instances
                .iter()
                .zip(&assignment)
                .filter(|(_, &a)| a != fold)
                .map(|(i, _)| i.clone())
                .collect();
            let model = spec.train(&train)?;
            instances
                .iter()
                .zip(&assignment)
                .filter(|(_, &a)| a == fold)
                .map(|(i, _)| Ok((i.label, model.predict(&i.features)?.label)))
                .collect()
        })
        .collect::<Result<_>>()?;
    let fold_sizes = per_fold.iter().map(Vec::len).collect();
    let pairs: Vec<(Label, Label)> = per_fold.into_iter().flatten().collect();
    Ok(MetricsReport::from_predictions(&pairs, folds, fold_sizes))
}
