use serde::{Deserialize, Serialize};

use super::{project, Instance, Prediction};
use crate::error::{Error, Result};
use crate::features::{Feature, FeatureVector};
use crate::resources::Label;

/// k-nearest neighbours over z-scored features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnnModel {
    pub k: usize,
    pub features: Vec<Feature>,
    pub means: Vec<f64>,
    /// Population standard deviations; zero marks a feature left out of the distance.
    pub scales: Vec<f64>,
    pub points: Vec<Vec<f64>>,
    pub labels: Vec<Label>,
}

impl KnnModel {
    pub fn fit(instances: &[Instance], features: &[Feature], k: usize) -> Result<Self> {
        if k == 0 || k > instances.len() {
            return Err(Error::KTooLarge {
                k,
                size: instances.len(),
            });
        }
        let raw: Vec<Vec<f64>> = instances.iter().map(|i| project(&i.features, features)).collect();
        let n = raw.len() as f64;
        let means: Vec<f64> = (0..features.len())
            .map(|j| raw.iter().map(|r| r[j]).sum::<f64>() / n)
            .collect();
        let scales: Vec<f64> = (0..features.len())
            .map(|j| (raw.iter().map(|r| (r[j] - means[j]).powi(2)).sum::<f64>() / n).sqrt())
            .collect();
        let mut model = KnnModel {
            k,
            features: features.to_vec(),
            means,
            scales,
            points: Vec::new(),
            labels: instances.iter().map(|i| i.label).collect(),
        };
        model.points = raw.iter().map(|r| model.normalize(r)).collect();
        Ok(model)
    }

    fn normalize(&self, x: &[f64]) -> Vec<f64> {
        x.iter()
            .zip(self.means.iter().zip(&self.scales))
            .filter(|(_, (_, &s))| s > 0.0)
            .map(|(&v, (&m, &s))| (v - m) / s)
            .collect()
    }

    /// Indices of the k nearest training points; equal distances keep
    /// training order.
    pub fn neighbours(&self, x: &[f64]) -> Vec<usize> {
        let z = self.normalize(x);
        let mut dist: Vec<(f64, usize)> = self
            .points
            .iter()
            .enumerate()
            .map(|(i, p)| (p.iter().zip(&z).map(|(a, b)| (a - b).powi(2)).sum(), i))
            .collect();
        dist.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        dist.into_iter().take(self.k).map(|(_, i)| i).collect()
    }

    pub fn predict_values(&self, x: &[f64]) -> Result<Prediction> {
        if let Some((f, _)) = self.features.iter().zip(x).find(|(_, v)| !v.is_finite()) {
            return Err(Error::NonFinite(f.name().to_string()));
        }
        let nn = self.neighbours(x);
        let correct = nn
            .iter()
            .filter(|&&i| self.labels[i] == Label::Correct)
            .count();
        let incorrect = nn.len() - correct;
        Ok(Prediction {
            label: if correct > incorrect {
                Label::Correct
            } else {
                Label::Incorrect
            },
            score: correct as f64 / nn.len() as f64,
        })
    }

    pub fn predict(&self, fv: &FeatureVector) -> Result<Prediction> {
        self.predict_values(&project(fv, &self.features))
    }
}
