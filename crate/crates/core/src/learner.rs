//! Binary logistic regression.
//!
//! Minimizes the mean negative log-likelihood plus `lambda/2 * |w|^2`
//! (intercept unpenalized) with damped Newton steps and a backtracking line
//! search. Full-batch and sequential, so identical inputs give bitwise
//! identical models.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::{fit_scaling, FeatureId, FeatureVector, ScalingParams};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hyper {
    pub lambda: f64,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for Hyper {
    fn default() -> Self {
        Hyper {
            lambda: 1e-8,
            tol: 1e-6,
            max_iter: 1000,
        }
    }
}

/// Raw optimizer output on an already-scaled design matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Fit {
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub loss: f64,
    pub grad_max_norm: f64,
    pub iterations: usize,
    pub converged: bool,
}

pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

/// `ln(1 + e^z)` without overflow.
fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

fn margin(row: &[f64], w: &[f64], b: f64) -> f64 {
    row.iter().zip(w).map(|(x, w)| x * w).sum::<f64>() + b
}

/// Regularized mean negative log-likelihood.
pub fn objective(x: &[Vec<f64>], y: &[bool], w: &[f64], b: f64, lambda: f64) -> f64 {
    let n = x.len() as f64;
    let nll: f64 = x
        .iter()
        .zip(y)
        .map(|(row, &yi)| {
            let z = margin(row, w, b);
            softplus(z) - if yi { z } else { 0.0 }
        })
        .sum();
    nll / n + 0.5 * lambda * w.iter().map(|v| v * v).sum::<f64>()
}

/// Gradient of [`objective`]: weights first, intercept last.
pub fn gradient(x: &[Vec<f64>], y: &[bool], w: &[f64], b: f64, lambda: f64) -> Vec<f64> {
    let d = w.len();
    let n = x.len() as f64;
    let mut g = vec![0.0; d + 1];
    for (row, &yi) in x.iter().zip(y) {
        let r = sigmoid(margin(row, w, b)) - if yi { 1.0 } else { 0.0 };
        for j in 0..d {
            g[j] += r * row[j];
        }
        g[d] += r;
    }
    for j in 0..d {
        g[j] = g[j] / n + lambda * w[j];
    }
    g[d] /= n;
    g
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Solves `a x = rhs` for symmetric positive definite `a` (row-major,
/// `m x m`), adding diagonal jitter until the factorization succeeds.
fn solve_spd(a: &[f64], rhs: &[f64], m: usize) -> Vec<f64> {
    let scale = (0..m).map(|i| a[i * m + i].abs()).fold(0.0, f64::max).max(1e-300);
    let mut jitter = 0.0;
    loop {
        if let Some(l) = cholesky(a, m, jitter) {
            let mut z = rhs.to_vec();
            for i in 0..m {
                for k in 0..i {
                    z[i] -= l[i * m + k] * z[k];
                }
                z[i] /= l[i * m + i];
            }
            for i in (0..m).rev() {
                for k in i + 1..m {
                    z[i] -= l[k * m + i] * z[k];
                }
                z[i] /= l[i * m + i];
            }
            return z;
        }
        jitter = if jitter == 0.0 {
            scale * 1e-12
        } else {
            jitter * 10.0
        };
    }
}

fn cholesky(a: &[f64], m: usize, jitter: f64) -> Option<Vec<f64>> {
    let mut l = vec![0.0; m * m];
    for i in 0..m {
        for j in 0..=i {
            let mut s = a[i * m + j];
            if i == j {
                s += jitter;
            }
            for k in 0..j {
                s -= l[i * m + k] * l[j * m + k];
            }
            if i == j {
                if s <= 0.0 || !s.is_finite() {
                    return None;
                }
                l[i * m + i] = s.sqrt();
            } else {
                l[i * m + j] = s / l[j * m + j];
            }
        }
    }
    Some(l)
}

fn hessian(x: &[Vec<f64>], w: &[f64], b: f64, lambda: f64) -> Vec<f64> {
    let d = w.len();
    let m = d + 1;
    let n = x.len() as f64;
    let mut h = vec![0.0; m * m];
    for row in x {
        let p = sigmoid(margin(row, w, b));
        let s = p * (1.0 - p);
        for i in 0..m {
            let xi = if i < d { row[i] } else { 1.0 };
            if xi == 0.0 {
                continue;
            }
            for j in 0..=i {
                let xj = if j < d { row[j] } else { 1.0 };
                h[i * m + j] += s * xi * xj;
            }
        }
    }
    for i in 0..m {
        for j in 0..=i {
            h[i * m + j] /= n;
            h[j * m + i] = h[i * m + j];
        }
    }
    for i in 0..d {
        h[i * m + i] += lambda;
    }
    h
}

/// Fits weights on a scaled design matrix. Requires both classes present.
pub fn fit(x: &[Vec<f64>], y: &[bool], hyper: &Hyper) -> Result<Fit> {
    if x.len() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.len(),
            right: y.len(),
        });
    }
    if !(y.iter().any(|&v| v) && y.iter().any(|&v| !v)) {
        return Err(Error::DegenerateLabels);
    }
    let d = x.first().map_or(0, Vec::len);
    let mut w = vec![0.0; d];
    let mut b = 0.0;
    let lambda = hyper.lambda;
    let mut loss = objective(x, y, &w, b, lambda);
    let mut g = gradient(x, y, &w, b, lambda);
    let mut iterations = 0;

    while max_abs(&g) >= hyper.tol && iterations < hyper.max_iter {
        iterations += 1;
        let h = hessian(x, &w, b, lambda);
        let neg_g: Vec<f64> = g.iter().map(|v| -v).collect();
        let mut dir = solve_spd(&h, &neg_g, d + 1);
        let mut slope: f64 = dir.iter().zip(&g).map(|(a, b)| a * b).sum();
        if slope.is_nan() || slope >= 0.0 {
            dir = neg_g;
            slope = -g.iter().map(|v| v * v).sum::<f64>();
        }

        let mut step = 1.0;
        let mut accepted = false;
        for _ in 0..60 {
            let w_try: Vec<f64> = w.iter().zip(&dir).map(|(w, d)| w + step * d).collect();
            let b_try = b + step * dir[d];
            let l_try = objective(x, y, &w_try, b_try, lambda);
            if l_try <= loss + 1e-4 * step * slope {
                w = w_try;
                b = b_try;
                loss = l_try;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            // no representable decrease left along the Newton direction
            break;
        }
        g = gradient(x, y, &w, b, lambda);
    }

    let grad_max_norm = max_abs(&g);
    Ok(Fit {
        weights: w,
        intercept: b,
        loss,
        grad_max_norm,
        iterations,
        converged: grad_max_norm < hyper.tol,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Model {
    #[serde(rename = "selected_features")]
    pub selected: Vec<FeatureId>,
    pub weights: Vec<f64>,
    pub intercept: f64,
    pub scaling: ScalingParams,
    pub hyper: Hyper,
    pub converged: bool,
    pub iterations: usize,
    pub grad_max_norm: f64,
}

/// Selected, scaled columns of raw FT1..FT50 vectors.
pub fn design_matrix(
    vectors: &[FeatureVector],
    selected: &[FeatureId],
    scaling: &ScalingParams,
) -> Vec<Vec<f64>> {
    vectors
        .iter()
        .map(|v| {
            selected
                .iter()
                .map(|&id| scaling.apply_value(id, v.get(id)))
                .collect()
        })
        .collect()
}

/// Fits scaling on `vectors`, then the weights of the `selected` features.
pub fn train(vectors: &[FeatureVector], selected: &[FeatureId], hyper: &Hyper) -> Result<Model> {
    for v in vectors {
        for &id in selected {
            if !v.get(id).is_finite() {
                return Err(Error::NonFinite {
                    instance_id: v.instance_id,
                    feature: id.number(),
                });
            }
        }
    }
    let labels: Vec<bool> = vectors.iter().map(|v| v.label).collect();
    if !(labels.iter().any(|&l| l) && labels.iter().any(|&l| !l)) {
        return Err(Error::DegenerateLabels);
    }
    let scaling = fit_scaling(vectors);
    let x = design_matrix(vectors, selected, &scaling);
    let fit = fit(&x, &labels, hyper)?;
    Ok(Model {
        selected: selected.to_vec(),
        weights: fit.weights,
        intercept: fit.intercept,
        scaling,
        hyper: *hyper,
        converged: fit.converged,
        iterations: fit.iterations,
        grad_max_norm: fit.grad_max_norm,
    })
}

impl Model {
    /// Scaled coordinates of the selected features of a raw FT1..FT50 vector.
    pub fn scaled_inputs(&self, values: &[f64]) -> Result<Vec<f64>> {
        self.selected
            .iter()
            .map(|&id| {
                values
                    .get(id.index())
                    .map(|&x| self.scaling.apply_value(id, x))
                    .ok_or(Error::MissingFeature(id.number()))
            })
            .collect()
    }

    /// `w . x + b` on scaled inputs.
    pub fn decision_value(&self, values: &[f64]) -> Result<f64> {
        let x = self.scaled_inputs(values)?;
        Ok(margin(&x, &self.weights, self.intercept))
    }

    pub fn predict_proba(&self, values: &[f64]) -> Result<f64> {
        self.decision_value(values).map(sigmoid)
    }

    /// Positive iff the probability reaches `threshold`; compared in logit
    /// space so that `threshold = 0.5` is exactly `w . x + b >= 0`.
    pub fn classify(&self, values: &[f64], threshold: f64) -> Result<bool> {
        let cut = (threshold / (1.0 - threshold)).ln();
        Ok(self.decision_value(values)? >= cut)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serializes")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Model = serde_json::from_str(text).map_err(|e| Error::Parse {
            path: "<model>".into(),
            line: e.line(),
            message: e.to_string(),
        })?;
        if model.weights.len() != model.selected.len() {
            return Err(Error::InvalidConfig(format!(
                "model has {} weights for {} features",
                model.weights.len(),
                model.selected.len()
            )));
        }
        Ok(model)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Model::from_json(&text).map_err(|e| match e {
            Error::Parse { line, message, .. } => Error::Parse {
                path: path.to_path_buf(),
                line,
                message,
            },
            other => other,
        })
    }
}
