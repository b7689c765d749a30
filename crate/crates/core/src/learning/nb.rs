use serde::{Deserialize, Serialize};

use super::{project, Instance, Prediction};
use crate::error::{Error, Result};
use crate::features::{Feature, FeatureVector};
use crate::resources::Label;

pub const VARIANCE_FLOOR: f64 = 1e-9;

/// Per-class Gaussian parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassGaussians {
    pub label: Label,
    pub count: usize,
    pub prior: f64,
    pub means: Vec<f64>,
    pub variances: Vec<f64>,
}

/// Gaussian naive Bayes over a chosen subset of the features.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaussianNb {
    pub features: Vec<Feature>,
    /// `correct` first, then `incorrect`.
    pub classes: Vec<ClassGaussians>,
}

fn check_finite(features: &[Feature], x: &[f64]) -> Result<()> {
    match features.iter().zip(x).find(|(_, v)| !v.is_finite()) {
        Some((f, _)) => Err(Error::NonFinite(f.name().to_string())),
        None => Ok(()),
    }
}

impl GaussianNb {
    /// Priors are class frequencies; variances are unbiased and floored.
    pub fn fit(instances: &[Instance], features: &[Feature]) -> Result<Self> {
        let n = instances.len();
        let mut classes = Vec::with_capacity(2);
        for label in Label::BOTH {
            let rows: Vec<Vec<f64>> = instances
                .iter()
                .filter(|i| i.label == label)
                .map(|i| project(&i.features, features))
                .collect();
            if rows.len() < 2 {
                return Err(Error::ClassTooSmall {
                    class: label.to_string(),
                    count: rows.len(),
                    needed: 2,
                });
            }
            for row in &rows {
                check_finite(features, row)?;
            }
            let m = rows.len() as f64;
            let means: Vec<f64> = (0..features.len())
                .map(|j| rows.iter().map(|r| r[j]).sum::<f64>() / m)
                .collect();
            let variances = (0..features.len())
                .map(|j| {
                    let ss: f64 = rows.iter().map(|r| (r[j] - means[j]).powi(2)).sum();
                    (ss / (m - 1.0)).max(VARIANCE_FLOOR)
                })
                .collect();
            classes.push(ClassGaussians {
                label,
                count: rows.len(),
                prior: m / n as f64,
                means,
                variances,
            });
        }
        Ok(GaussianNb {
            features: features.to_vec(),
            classes,
        })
    }

    /// Log prior plus Gaussian log-likelihood, per class.
    pub fn joint_log_likelihoods(&self, x: &[f64]) -> Result<Vec<f64>> {
        check_finite(&self.features, x)?;
        if x.len() != self.features.len() {
            return Err(Error::DimensionMismatch {
                left: self.features.len(),
                right: x.len(),
            });
        }
        Ok(self
            .classes
            .iter()
            .map(|c| {
                let ll: f64 = x
                    .iter()
                    .zip(c.means.iter().zip(&c.variances))
                    .map(|(&v, (&mu, &var))| {
                        -0.5 * (2.0 * std::f64::consts::PI * var).ln() - (v - mu).powi(2) / (2.0 * var)
                    })
                    .sum();
                c.prior.ln() + ll
            })
            .collect())
    }

    /// Predicts from already projected values.
    pub fn predict_values(&self, x: &[f64]) -> Result<Prediction> {
        let jll = self.joint_log_likelihoods(x)?;
        debug_assert!(self.classes[0].label == Label::Correct);
        // two-class log-sum-exp reduces to the logistic of the log-ratio
        let posterior = 1.0 / (1.0 + (jll[1] - jll[0]).exp());
        let label = if posterior > 0.5 {
            Label::Correct
        } else {
            Label::Incorrect
        };
        Ok(Prediction {
            label,
            score: posterior,
        })
    }

    pub fn predict(&self, fv: &FeatureVector) -> Result<Prediction> {
        self.predict_values(&project(fv, &self.features))
    }
}
