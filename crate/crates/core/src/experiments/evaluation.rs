//! Precision/recall/F1, learning curves and two-feature scatter data.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{FeatureId, FeatureVector};
use crate::learner::{train, Hyper, Model};

use super::ranking::{rank_features, top_features, RankedFeature};

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub tp: usize,
    pub fp: usize,
    #[serde(rename = "fn")]
    pub fn_: usize,
    pub tn: usize,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

impl Metrics {
    /// Undefined precision or recall reads as 0, and so does F1 when both are 0.
    pub fn from_counts(tp: usize, fp: usize, fn_: usize, tn: usize) -> Self {
        let ratio = |num: usize, den: usize| if den == 0 { 0.0 } else { num as f64 / den as f64 };
        let precision = ratio(tp, tp + fp);
        let recall = ratio(tp, tp + fn_);
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            0.0
        };
        Metrics {
            tp,
            fp,
            fn_,
            tn,
            precision,
            recall,
            f1,
        }
    }

    pub fn from_predictions(predicted: impl IntoIterator<Item = (bool, bool)>) -> Self {
        let (mut tp, mut fp, mut fn_, mut tn) = (0, 0, 0, 0);
        for (pred, gold) in predicted {
            match (pred, gold) {
                (true, true) => tp += 1,
                (true, false) => fp += 1,
                (false, true) => fn_ += 1,
                (false, false) => tn += 1,
            }
        }
        Metrics::from_counts(tp, fp, fn_, tn)
    }
}

pub fn evaluate(model: &Model, vectors: &[FeatureVector], threshold: f64) -> Result<Metrics> {
    let mut pairs = Vec::with_capacity(vectors.len());
    for v in vectors {
        pairs.push((model.classify(&v.values, threshold)?, v.label));
    }
    Ok(Metrics::from_predictions(pairs))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CurveRow {
    pub k: usize,
    pub train_f1: f64,
    pub eval_f1: f64,
}

/// For each k, trains on the first k batches (scaling re-fit on them) with
/// the given features and scores both those batches and `eval`. Rows are
/// computed in parallel and returned in k order.
pub fn incremental_eval(
    train_batches: &[Vec<FeatureVector>],
    eval: &[FeatureVector],
    selected: &[FeatureId],
    hyper: &Hyper,
    threshold: f64,
) -> Result<Vec<CurveRow>> {
    (1..=train_batches.len())
        .into_par_iter()
        .map(|k| {
            let training: Vec<FeatureVector> = train_batches[..k].iter().flatten().cloned().collect();
            let model = train(&training, selected, hyper)?;
            Ok(CurveRow {
                k,
                train_f1: evaluate(&model, &training, threshold)?.f1,
                eval_f1: evaluate(&model, eval, threshold)?.f1,
            })
        })
        .collect()
}

/// The full learning-curve experiment: features ranked once on all
/// training batches, then the top `top_m` used for every k.
pub fn learning_curve(
    train_batches: &[Vec<FeatureVector>],
    eval: &[FeatureVector],
    top_m: usize,
    folds: usize,
    hyper: &Hyper,
    threshold: f64,
) -> Result<(Vec<RankedFeature>, Vec<CurveRow>)> {
    if top_m == 0 {
        return Err(Error::InvalidConfig("top_m must be at least 1".into()));
    }
    let all: Vec<FeatureVector> = train_batches.iter().flatten().cloned().collect();
    let ranking = rank_features(&all, folds)?;
    let selected = top_features(&ranking, top_m);
    let rows = incremental_eval(train_batches, eval, &selected, hyper, threshold)?;
    Ok((ranking, rows))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScatterRow {
    pub x: f64,
    pub y: f64,
    pub label: bool,
    pub predicted: bool,
}

/// Scaled coordinates of a two-feature model's inputs plus its separator
/// `w_a * x + w_b * y + b = 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Scatter {
    pub w_a: f64,
    pub w_b: f64,
    pub b: f64,
    pub rows: Vec<ScatterRow>,
}

pub fn scatter_export(
    eval: &[FeatureVector],
    ft_a: FeatureId,
    ft_b: FeatureId,
    model: &Model,
) -> Result<Scatter> {
    if model.selected != [ft_a, ft_b] {
        return Err(Error::FeatureMismatch {
            expected: vec![ft_a.number(), ft_b.number()],
            found: model.selected.iter().map(|f| f.number()).collect(),
        });
    }
    let mut rows = Vec::with_capacity(eval.len());
    for v in eval {
        let xy = model.scaled_inputs(&v.values)?;
        rows.push(ScatterRow {
            x: xy[0],
            y: xy[1],
            label: v.label,
            predicted: model.classify(&v.values, 0.5)?,
        });
    }
    Ok(Scatter {
        w_a: model.weights[0],
        w_b: model.weights[1],
        b: model.intercept,
        rows,
    })
}
