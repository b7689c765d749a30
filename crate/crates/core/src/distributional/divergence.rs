use super::DomainDistribution;
use crate::error::{Error, Result};

/// Kullback-Leibler term sum Σ p·log2(p/m), skipping p = 0.
fn kl_to_mixture(p: &[f64], m: &[f64]) -> f64 {
    p.iter()
        .zip(m)
        .filter(|(&pi, _)| pi > 0.0)
        .map(|(&pi, &mi)| pi * (pi / mi).log2())
        .sum()
}

/// Jensen-Shannon divergence in bits, clamped to [0, 1].
pub fn js_divergence(p: &[f64], q: &[f64]) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::DimensionMismatch {
            left: p.len(),
            right: q.len(),
        });
    }
    let m: Vec<f64> = p.iter().zip(q).map(|(a, b)| 0.5 * (a + b)).collect();
    let js = 0.5 * (kl_to_mixture(p, &m) + kl_to_mixture(q, &m));
    Ok(js.clamp(0.0, 1.0))
}

/// Square root of the Jensen-Shannon divergence; a metric.
pub fn js_distance(p: &[f64], q: &[f64]) -> Result<f64> {
    js_divergence(p, q).map(f64::sqrt)
}

/// 1 − √JS(P, Q), in [0, 1].
pub fn distribution_similarity(p: &DomainDistribution, q: &DomainDistribution) -> Result<f64> {
    js_distance(&p.0, &q.0).map(|d| 1.0 - d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn identity_is_zero() {
        let p = [0.2, 0.3, 0.5];
        assert_eq!(js_divergence(&p, &p).unwrap(), 0.0);
    }

    #[test]
    fn disjoint_supports_give_one_bit() {
        // M = (½, ½); each KL term is log2(2) = 1
        assert!((js_divergence(&[1.0, 0.0], &[0.0, 1.0]).unwrap() - 1.0).abs() < 1e-12);
        let s = distribution_similarity(
            &DomainDistribution(vec![1.0, 0.0]),
            &DomainDistribution(vec![0.0, 1.0]),
        )
        .unwrap();
        assert!(s.abs() < 1e-12);
    }

    #[test]
    fn half_versus_point_mass() {
        // M = (3/4, 1/4)
        // KL(P‖M) = .5 log2(.5/.75) + .5 log2(.5/.25) = .5(-0.5849625) + .5(1) = 0.2075187
        // KL(Q‖M) = log2(1/.75) = 0.4150375
        // JS = (0.2075187 + 0.4150375) / 2 = 0.3112781
        let hand = 0.5 * ((0.5 * (0.5f64 / 0.75).log2() + 0.5 * 2f64.log2()) + (1.0f64 / 0.75).log2());
        let js = js_divergence(&[0.5, 0.5], &[1.0, 0.0]).unwrap();
        assert!((js - 0.3113).abs() < 1e-4, "{js}");
        assert!((js - hand).abs() < 1e-12);
        let s = distribution_similarity(
            &DomainDistribution(vec![0.5, 0.5]),
            &DomainDistribution(vec![1.0, 0.0]),
        )
        .unwrap();
        assert!((s - 0.4421).abs() < 1e-4, "{s}");
    }

    #[test]
    fn length_mismatch() {
        assert!(js_divergence(&[1.0], &[0.5, 0.5]).is_err());
    }

    fn distribution(n: usize) -> impl Strategy<Value = Vec<f64>> {
        prop::collection::vec(0.0f64..1.0, n).prop_map(|v| {
            let s: f64 = v.iter().sum();
            if s == 0.0 {
                let mut u = vec![0.0; v.len()];
                u[0] = 1.0;
                u
            } else {
                v.iter().map(|x| x / s).collect()
            }
        })
    }

    proptest! {
        #[test]
        fn symmetric_and_bounded(p in distribution(5), q in distribution(5)) {
            let a = js_divergence(&p, &q).unwrap();
            prop_assert_eq!(a, js_divergence(&q, &p).unwrap());
            prop_assert!((0.0..=1.0).contains(&a));
        }
    }
}
