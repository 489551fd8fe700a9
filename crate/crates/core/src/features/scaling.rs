//! Min-max scaling of the unbounded features, fit on training data only.

use serde::{Deserialize, Serialize};

use super::{FeatureId, FeatureVector, NUM_FEATURES};

/// Counts and magnitudes that get min-max scaled. Flags and similarities
/// already live in [0, 1] and pass through.
pub const SCALED_FEATURES: &[u8] = &[
    1, 5, 6, 9, 14, 15, 16, 17, 19, 21, 22, 23, 24, 25, 26, 27, 28, 30, 32, 33, 34, 35, 41, 45, 46, 47, 48,
    49, 50,
];

pub fn is_scaled(id: FeatureId) -> bool {
    SCALED_FEATURES.contains(&id.number())
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScaleRange {
    pub feature: FeatureId,
    pub min: f64,
    pub max: f64,
}

impl ScaleRange {
    pub fn apply(&self, x: f64) -> f64 {
        let span = self.max - self.min;
        if span <= 0.0 {
            0.0
        } else {
            ((x - self.min) / span).clamp(0.0, 1.0)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ScalingParams {
    pub ranges: Vec<ScaleRange>,
}

impl ScalingParams {
    pub fn range(&self, id: FeatureId) -> Option<&ScaleRange> {
        self.ranges.iter().find(|r| r.feature == id)
    }

    pub fn apply_value(&self, id: FeatureId, x: f64) -> f64 {
        match self.range(id) {
            Some(r) => r.apply(x),
            None if is_scaled(id) => 0.0,
            None => x,
        }
    }

    pub fn apply_values(&self, values: &[f64]) -> Vec<f64> {
        values
            .iter()
            .enumerate()
            .map(|(i, &x)| self.apply_value(FeatureId::from_index(i), x))
            .collect()
    }
}

pub fn fit_scaling(training: &[FeatureVector]) -> ScalingParams {
    let ranges = SCALED_FEATURES
        .iter()
        .map(|&n| {
            let id = FeatureId::new(n).expect("valid id");
            let (min, max) = training
                .iter()
                .map(|v| v.get(id))
                .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), x| {
                    (lo.min(x), hi.max(x))
                });
            if min.is_finite() {
                ScaleRange {
                    feature: id,
                    min,
                    max,
                }
            } else {
                ScaleRange {
                    feature: id,
                    min: 0.0,
                    max: 0.0,
                }
            }
        })
        .collect();
    ScalingParams { ranges }
}

pub fn apply_scaling(vector: &FeatureVector, params: &ScalingParams) -> FeatureVector {
    debug_assert_eq!(vector.values.len(), NUM_FEATURES);
    FeatureVector {
        values: params.apply_values(&vector.values),
        ..vector.clone()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vec_with(id: u8, x: f64) -> FeatureVector {
        let mut v = FeatureVector::zeros(0, false);
        v.set(FeatureId::new(id).unwrap(), x);
        v
    }

    #[test]
    fn midpoint_and_clamp() {
        let params = fit_scaling(&[vec_with(1, 0.0), vec_with(1, 1000.0)]);
        let ft1 = FeatureId::new(1).unwrap();
        assert_eq!(apply_scaling(&vec_with(1, 500.0), &params).get(ft1), 0.5);
        assert_eq!(apply_scaling(&vec_with(1, 2000.0), &params).get(ft1), 1.0);
        assert_eq!(apply_scaling(&vec_with(1, -5.0), &params).get(ft1), 0.0);
    }

    #[test]
    fn constant_feature_maps_to_zero() {
        let params = fit_scaling(&[vec_with(5, 7.0), vec_with(5, 7.0)]);
        let ft5 = FeatureId::new(5).unwrap();
        assert_eq!(apply_scaling(&vec_with(5, 7.0), &params).get(ft5), 0.0);
        assert_eq!(apply_scaling(&vec_with(5, 70.0), &params).get(ft5), 0.0);
    }

    #[test]
    fn klout_identity_range() {
        let params = ScalingParams {
            ranges: vec![ScaleRange {
                feature: FeatureId::new(21).unwrap(),
                min: 0.0,
                max: 100.0,
            }],
        };
        assert!((params.apply_value(FeatureId::new(21).unwrap(), 55.0) - 0.55).abs() < 1e-15);
    }

    #[test]
    fn unscaled_pass_through() {
        let params = fit_scaling(&[vec_with(10, 0.3)]);
        assert_eq!(params.apply_value(FeatureId::new(10).unwrap(), 0.3), 0.3);
        assert!(params.range(FeatureId::new(10).unwrap()).is_none());
    }
}
