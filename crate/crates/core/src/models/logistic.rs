//! Multinomial logistic regression trained by gradient descent on
//! softmax cross-entropy with L2 penalty.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseFeatureMatrix;
use crate::models::{
    check_training_input, softmax, ClassDistribution, ModelKind, ModelParams, TrainedModel,
    MODEL_FORMAT_VERSION,
};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct LogisticHyper {
    pub l2: f64,
    pub lr: f64,
    pub epochs: usize,
    /// None = full batch. Mini-batches are drawn from a seeded shuffle.
    pub batch_size: Option<usize>,
    pub seed: u64,
}

impl Default for LogisticHyper {
    fn default() -> Self {
        LogisticHyper {
            l2: 1e-4,
            lr: 0.1,
            epochs: 50,
            batch_size: None,
            seed: 0,
        }
    }
}

/// K x (V+1) weights, bias last. Shared by logistic and (per-class) SVM.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinearParams {
    pub weights: Vec<Vec<f64>>,
}

impl LinearParams {
    pub fn margins(&self, row: &[(usize, f64)]) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| {
                let bias = *w.last().unwrap();
                row.iter().map(|&(i, v)| w[i] * v).sum::<f64>() + bias
            })
            .collect()
    }

    pub fn score_row(&self, row: &[(usize, f64)]) -> ClassDistribution {
        ClassDistribution {
            scores: softmax(&self.margins(row)),
            normalized: true,
        }
    }
}

/// Mean cross-entropy + (l2/2)*||W||^2 (bias excluded) and its analytic
/// gradient, over the given rows. Exposed so the gradient can be checked
/// against finite differences.
pub fn loss_and_gradient(
    weights: &[Vec<f64>],
    rows: &[Vec<(usize, f64)>],
    y: &[usize],
    l2: f64,
) -> (f64, Vec<Vec<f64>>) {
    let n_classes = weights.len();
    let width = weights[0].len();
    let n = rows.len() as f64;
    let mut loss = 0.0;
    let mut grad = vec![vec![0.0; width]; n_classes];
    for (row, &label) in rows.iter().zip(y) {
        let margins: Vec<f64> = weights
            .iter()
            .map(|w| row.iter().map(|&(i, v)| w[i] * v).sum::<f64>() + w[width - 1])
            .collect();
        let probs = softmax(&margins);
        loss -= probs[label].max(1e-300).ln();
        for k in 0..n_classes {
            let delta = probs[k] - if k == label { 1.0 } else { 0.0 };
            for &(i, v) in row {
                grad[k][i] += delta * v;
            }
            grad[k][width - 1] += delta;
        }
    }
    loss /= n;
    for k in 0..n_classes {
        for i in 0..width {
            grad[k][i] /= n;
            if i != width - 1 {
                loss += 0.5 * l2 * weights[k][i] * weights[k][i];
                grad[k][i] += l2 * weights[k][i];
            }
        }
    }
    (loss, grad)
}

pub fn train(
    x: &SparseFeatureMatrix,
    y: &[usize],
    n_classes: usize,
    hyper: LogisticHyper,
) -> Result<TrainedModel> {
    check_training_input(x, y, n_classes)?;
    if hyper.epochs == 0 {
        return Err(Error::BadHyperparameter("epochs must be >= 1".into()));
    }
    if hyper.lr <= 0.0 {
        return Err(Error::BadHyperparameter(format!(
            "lr {} must be > 0",
            hyper.lr
        )));
    }
    if hyper.l2 < 0.0 {
        return Err(Error::BadHyperparameter(format!(
            "l2 {} must be >= 0",
            hyper.l2
        )));
    }
    let width = x.n_columns + 1;
    let mut weights = vec![vec![0.0f64; width]; n_classes];
    let n = x.n_rows();
    let mut order: Vec<usize> = (0..n).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(hyper.seed);
    let batch = hyper.batch_size.unwrap_or(n).max(1);
    let mut loss_curve = Vec::with_capacity(hyper.epochs);
    for epoch in 0..hyper.epochs {
        if batch < n {
            order.shuffle(&mut rng);
        }
        for chunk in order.chunks(batch) {
            let rows: Vec<Vec<(usize, f64)>> =
                chunk.iter().map(|&i| x.rows[i].clone()).collect();
            let labels: Vec<usize> = chunk.iter().map(|&i| y[i]).collect();
            let (_, grad) = loss_and_gradient(&weights, &rows, &labels, hyper.l2);
            for k in 0..n_classes {
                for i in 0..width {
                    weights[k][i] -= hyper.lr * grad[k][i];
                }
            }
        }
        let (loss, _) = loss_and_gradient(&weights, &x.rows, y, hyper.l2);
        if !loss.is_finite() {
            return Err(Error::NonFinite {
                kind: "logistic".into(),
                what: "loss".into(),
                step: epoch,
            });
        }
        loss_curve.push(loss);
    }
    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        kind: ModelKind::Logistic,
        hyperparameters: serde_json::to_value(hyper)?,
        vocabulary_fingerprint: x.vocabulary_fingerprint.clone(),
        n_features: x.n_columns,
        n_classes,
        params: ModelParams::Logistic(LinearParams { weights }),
        loss_curve,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::WeightKind;

    fn matrix(rows: Vec<Vec<(usize, f64)>>, n_columns: usize) -> SparseFeatureMatrix {
        SparseFeatureMatrix {
            rows,
            n_columns,
            kind: WeightKind::Count,
            vocabulary_fingerprint: "test".into(),
        }
    }

    #[test]
    fn separable_points_reach_full_accuracy() {
        let x = matrix(vec![vec![(0, 1.0)], vec![(1, 1.0)]], 2);
        let y = vec![0, 1];
        let model = train(
            &x,
            &y,
            2,
            LogisticHyper {
                epochs: 200,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(model.predict(&x).unwrap(), y);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        // random 5x4 problem, central differences with h = 1e-5
        let mut rng_state = 12345u64;
        let mut next = || {
            rng_state = rng_state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            (rng_state >> 33) as f64 / (1u64 << 31) as f64 - 0.5
        };
        let rows: Vec<Vec<(usize, f64)>> = (0..5)
            .map(|_| (0..4).map(|j| (j, next())).collect())
            .collect();
        let y = vec![0usize, 1, 2, 0, 1];
        let n_classes = 3;
        let width = 5;
        let weights: Vec<Vec<f64>> = (0..n_classes)
            .map(|_| (0..width).map(|_| next() * 0.2).collect())
            .collect();
        let l2 = 0.01;
        let (_, grad) = loss_and_gradient(&weights, &rows, &y, l2);
        let h = 1e-5;
        let mut max_rel_err: f64 = 0.0;
        for k in 0..n_classes {
            for i in 0..width {
                let mut wp = weights.clone();
                wp[k][i] += h;
                let (lp, _) = loss_and_gradient(&wp, &rows, &y, l2);
                let mut wm = weights.clone();
                wm[k][i] -= h;
                let (lm, _) = loss_and_gradient(&wm, &rows, &y, l2);
                let numeric = (lp - lm) / (2.0 * h);
                let denom = numeric.abs().max(grad[k][i].abs()).max(1e-8);
                max_rel_err = max_rel_err.max((numeric - grad[k][i]).abs() / denom);
            }
        }
        assert!(max_rel_err < 1e-4, "max relative error {max_rel_err}");
    }

    #[test]
    fn identical_features_predict_priors() {
        let rows = vec![vec![(0, 1.0)]; 4];
        let x = matrix(rows, 1);
        let y = vec![0, 0, 1, 1];
        let model = train(&x, &y, 2, LogisticHyper::default()).unwrap();
        let dist = model.score_row(&[(0, 1.0)]);
        assert!((dist.scores[0] - 0.5).abs() < 1e-6);
        assert!((dist.scores[1] - 0.5).abs() < 1e-6);
    }

    #[test]
    fn loss_non_increasing_full_batch() {
        let x = matrix(
            vec![
                vec![(0, 2.0)],
                vec![(0, 1.0), (1, 1.0)],
                vec![(1, 2.0)],
                vec![(1, 1.0), (2, 1.0)],
                vec![(2, 2.0)],
            ],
            3,
        );
        let y = vec![0, 0, 1, 1, 2];
        let model = train(&x, &y, 3, LogisticHyper::default()).unwrap();
        for w in model.loss_curve.windows(2) {
            assert!(w[1] <= w[0] + 1e-6, "loss increased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn bad_hyperparameters_rejected() {
        let x = matrix(vec![vec![(0, 1.0)]], 1);
        assert!(train(&x, &[0], 1, LogisticHyper { lr: 0.0, ..Default::default() }).is_err());
        assert!(train(&x, &[0], 1, LogisticHyper { epochs: 0, ..Default::default() }).is_err());
    }
}
