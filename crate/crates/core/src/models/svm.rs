//! One-vs-rest linear SVMs fit by subgradient descent on hinge loss + L2.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseFeatureMatrix;
use crate::models::{
    check_training_input, logistic::LinearParams, softmax, ClassDistribution, ModelKind,
    ModelParams, TrainedModel, MODEL_FORMAT_VERSION,
};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct SvmHyper {
    pub c: f64,
    pub lr: f64,
    pub epochs: usize,
    pub seed: u64,
}

impl Default for SvmHyper {
    fn default() -> Self {
        SvmHyper {
            c: 1.0,
            lr: 0.1,
            epochs: 50,
            seed: 0,
        }
    }
}

/// One weight vector per class (bias last). Prediction is argmax margin;
/// the distribution is a softmax of margins, normalized for ranking only.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SvmParams {
    pub linear: LinearParams,
}

impl SvmParams {
    pub fn score_row(&self, row: &[(usize, f64)]) -> ClassDistribution {
        ClassDistribution {
            scores: softmax(&self.linear.margins(row)),
            normalized: true,
        }
    }
}

/// Objective per class k (labels mapped to +/-1):
///   J = (1/n) sum max(0, 1 - y (w.x + b)) + ||w||^2 / (2 c n)
pub fn hinge_objective(w: &[f64], rows: &[Vec<(usize, f64)>], y_signed: &[f64], c: f64) -> f64 {
    let width = w.len();
    let n = rows.len() as f64;
    let mut loss = 0.0;
    for (row, &ys) in rows.iter().zip(y_signed) {
        let margin: f64 =
            row.iter().map(|&(i, v)| w[i] * v).sum::<f64>() + w[width - 1];
        loss += (1.0 - ys * margin).max(0.0);
    }
    loss /= n;
    let reg: f64 = w[..width - 1].iter().map(|&v| v * v).sum::<f64>() / (2.0 * c * n);
    loss + reg
}

pub fn train(
    x: &SparseFeatureMatrix,
    y: &[usize],
    n_classes: usize,
    hyper: SvmHyper,
) -> Result<TrainedModel> {
    check_training_input(x, y, n_classes)?;
    if hyper.c <= 0.0 {
        return Err(Error::BadHyperparameter(format!(
            "c {} must be > 0",
            hyper.c
        )));
    }
    if hyper.epochs == 0 {
        return Err(Error::BadHyperparameter("epochs must be >= 1".into()));
    }
    let width = x.n_columns + 1;
    let n = x.n_rows() as f64;
    let mut weights = vec![vec![0.0f64; width]; n_classes];
    for (k, w) in weights.iter_mut().enumerate() {
        let y_signed: Vec<f64> = y.iter().map(|&l| if l == k { 1.0 } else { -1.0 }).collect();
        for epoch in 0..hyper.epochs {
            // full-batch subgradient of hinge + L2
            let mut grad = vec![0.0f64; width];
            for (row, &ys) in x.rows.iter().zip(&y_signed) {
                let margin: f64 =
                    row.iter().map(|&(i, v)| w[i] * v).sum::<f64>() + w[width - 1];
                if ys * margin < 1.0 {
                    for &(i, v) in row {
                        grad[i] -= ys * v;
                    }
                    grad[width - 1] -= ys;
                }
            }
            for i in 0..width {
                grad[i] /= n;
                if i != width - 1 {
                    grad[i] += w[i] / (hyper.c * n);
                }
                w[i] -= hyper.lr * grad[i];
                if !w[i].is_finite() {
                    return Err(Error::NonFinite {
                        kind: "svm".into(),
                        what: "weights".into(),
                        step: epoch,
                    });
                }
            }
        }
    }
    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        kind: ModelKind::Svm,
        hyperparameters: serde_json::to_value(hyper)?,
        vocabulary_fingerprint: x.vocabulary_fingerprint.clone(),
        n_features: x.n_columns,
        n_classes,
        params: ModelParams::Svm(SvmParams {
            linear: LinearParams { weights },
        }),
        loss_curve: Vec::new(),
    })
}
