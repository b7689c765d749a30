use serde::{Deserialize, Serialize};

use super::Instance;
use crate::features::Feature;
use crate::resources::Label;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FeatureGain {
    pub feature: Feature,
    pub gain: f64,
}

fn entropy(counts: &[usize]) -> f64 {
    let n: usize = counts.iter().sum();
    if n == 0 {
        return 0.0;
    }
    counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / n as f64;
            -p * p.log2()
        })
        .sum()
}

/// Equal-frequency bin index of each value.
///
/// With at most `bins` distinct values each value gets its own bin. Otherwise
/// a value's bin is `⌊rank·bins/n⌋`, rank being the number of strictly smaller
/// values, so equal values share a bin and only the ordering matters.
pub fn equal_frequency_bins(values: &[f64], bins: usize) -> Vec<usize> {
    let n = values.len();
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut distinct = sorted.clone();
    distinct.dedup();
    if distinct.len() <= bins {
        return values
            .iter()
            .map(|v| distinct.partition_point(|d| d.total_cmp(v).is_lt()))
            .collect();
    }
    values
        .iter()
        .map(|v| {
            let rank = sorted.partition_point(|s| s.total_cmp(v).is_lt());
            rank * bins / n
        })
        .collect()
}

/// Information gain in bits of one column of values about the labels.
pub fn information_gain_of(values: &[f64], labels: &[Label], bins: usize) -> f64 {
    let n = labels.len();
    if n == 0 {
        return 0.0;
    }
    let mut total = [0usize; 2];
    for l in labels {
        total[l.index()] += 1;
    }
    let binned = equal_frequency_bins(values, bins.max(1));
    let nbins = binned.iter().max().map_or(0, |m| m + 1);
    let mut table = vec![[0usize; 2]; nbins];
    for (&b, l) in binned.iter().zip(labels) {
        table[b][l.index()] += 1;
    }
    let conditional: f64 = table
        .iter()
        .map(|row| (row[0] + row[1]) as f64 / n as f64 * entropy(row))
        .sum();
    (entropy(&total) - conditional).max(0.0)
}

/// Features ranked by information gain, highest first; equal gains keep
/// declaration order.
pub fn information_gain(instances: &[Instance], bins: usize) -> Vec<FeatureGain> {
    let labels: Vec<Label> = instances.iter().map(|i| i.label).collect();
    let mut gains: Vec<FeatureGain> = Feature::ALL
        .iter()
        .map(|&feature| {
            let values: Vec<f64> = instances.iter().map(|i| i.features.get(feature)).collect();
            FeatureGain {
                feature,
                gain: information_gain_of(&values, &labels, bins),
            }
        })
        .collect();
    gains.sort_by(|a, b| b.gain.total_cmp(&a.gain));
    gains
}
