//! Pearson correlation and cross-validated feature ranking.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureId, FeatureVector};

/// Product-moment correlation; 0 when either side has zero variance.
pub fn pearson(x: &[f64], y: &[f64]) -> Result<f64> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if x.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "pearson needs at least 2 points, got {}",
            x.len()
        )));
    }
    let constant = |v: &[f64]| v.iter().all(|a| *a == v[0]);
    if constant(x) || constant(y) {
        return Ok(0.0);
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if sxx == 0.0 || syy == 0.0 {
        return Ok(0.0);
    }
    Ok((sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RankedFeature {
    pub feature: FeatureId,
    /// Fold-averaged signed correlation.
    pub pearson_r: f64,
    pub mean_abs_pearson: f64,
    /// 1-based.
    pub rank: usize,
}

/// Ranks all fifty features by |r| against the label, averaged over
/// contiguous folds: for each fold the correlation is computed on the other
/// folds. `vectors` should be in temporal order. Ties go to the lower id.
pub fn rank_features(vectors: &[FeatureVector], folds: usize) -> Result<Vec<RankedFeature>> {
    if folds < 2 {
        return Err(Error::InvalidConfig(format!(
            "folds must be at least 2, got {folds}"
        )));
    }
    let n = vectors.len();
    if n < 2 * folds {
        return Err(Error::InvalidConfig(format!(
            "{n} vectors are too few for {folds} folds"
        )));
    }
    let labels: Vec<f64> = vectors.iter().map(|v| if v.label { 1.0 } else { 0.0 }).collect();
    let bounds: Vec<usize> = (0..=folds).map(|f| f * n / folds).collect();

    let mut ranked: Vec<RankedFeature> = FeatureId::all()
        .map(|id| {
            let column: Vec<f64> = vectors.iter().map(|v| v.get(id)).collect();
            let (mut sum_r, mut sum_abs) = (0.0, 0.0);
            for f in 0..folds {
                let (lo, hi) = (bounds[f], bounds[f + 1]);
                let x: Vec<f64> = column[..lo].iter().chain(&column[hi..]).copied().collect();
                let y: Vec<f64> = labels[..lo].iter().chain(&labels[hi..]).copied().collect();
                let r = pearson(&x, &y).expect("equal lengths >= 2");
                sum_r += r;
                sum_abs += r.abs();
            }
            RankedFeature {
                feature: id,
                pearson_r: sum_r / folds as f64,
                mean_abs_pearson: sum_abs / folds as f64,
                rank: 0,
            }
        })
        .collect();

    ranked.sort_by(|a, b| {
        b.mean_abs_pearson
            .total_cmp(&a.mean_abs_pearson)
            .then(a.feature.cmp(&b.feature))
    });
    for (i, r) in ranked.iter_mut().enumerate() {
        r.rank = i + 1;
    }
    Ok(ranked)
}

pub fn top_features(ranking: &[RankedFeature], m: usize) -> Vec<FeatureId> {
    ranking.iter().take(m).map(|r| r.feature).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::ft;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn pearson_cases() {
        assert!((pearson(&[1.0, 2.0, 3.0], &[1.0, 2.0, 3.0]).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(pearson(&[2.0, 2.0, 2.0], &[1.0, 2.0, 3.0]).unwrap(), 0.0);
        assert_eq!(
            pearson(&[0.0, 1.0, 0.0, 1.0], &[0.0, 1.0, 1.0, 0.0]).unwrap(),
            0.0
        );
        assert!(pearson(&[1.0, 2.0], &[1.0]).is_err());
        assert!(pearson(&[1.0], &[1.0]).is_err());
    }

    #[test]
    fn label_feature_ranks_first() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let vectors: Vec<FeatureVector> = (0..200)
            .map(|i| {
                let label = rng.random::<bool>();
                let mut v = FeatureVector::zeros(i, label);
                v.set(ft(43), if label { 1.0 } else { 0.0 });
                for id in FeatureId::all().filter(|&id| id != ft(43)) {
                    v.set(id, rng.random::<f64>());
                }
                v
            })
            .collect();
        let r = rank_features(&vectors, 10).unwrap();
        assert_eq!(r[0].feature, ft(43));
        assert_eq!(r[0].rank, 1);
        assert!((r[0].mean_abs_pearson - 1.0).abs() < 1e-12);
        assert_eq!(r.len(), 50);
    }

    #[test]
    fn noise_feature_near_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(42);
        let vectors: Vec<FeatureVector> = (0..5000)
            .map(|i| {
                let mut v = FeatureVector::zeros(i, rng.random::<bool>());
                v.set(ft(1), rng.random::<f64>());
                v
            })
            .collect();
        let r = rank_features(&vectors, 10).unwrap();
        let noise = r.iter().find(|f| f.feature == ft(1)).unwrap();
        assert!(noise.mean_abs_pearson < 0.1, "{}", noise.mean_abs_pearson);
    }

    #[test]
    fn ties_break_by_id_and_folds_enforced() {
        let vectors: Vec<FeatureVector> = (0..20).map(|i| FeatureVector::zeros(i, i % 2 == 0)).collect();
        let r = rank_features(&vectors, 5).unwrap();
        let ids: Vec<u8> = r.iter().map(|f| f.feature.number()).collect();
        assert_eq!(ids, (1..=50).collect::<Vec<u8>>());
        assert!(rank_features(&vectors, 1).is_err());
    }

    proptest! {
        #[test]
        fn pearson_bounded_and_symmetric(
            pairs in prop::collection::vec((-100.0f64..100.0, -100.0f64..100.0), 2..50)
        ) {
            let (x, y): (Vec<f64>, Vec<f64>) = pairs.into_iter().unzip();
            let r = pearson(&x, &y).unwrap();
            prop_assert!((-1.0..=1.0).contains(&r));
            prop_assert!((r - pearson(&y, &x).unwrap()).abs() < 1e-12);
        }
    }
}
