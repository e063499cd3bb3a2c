//! Multinomial naive Bayes with Laplace smoothing.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseFeatureMatrix;
use crate::models::{
    check_training_input, softmax, ClassDistribution, ModelKind, ModelParams, TrainedModel,
    MODEL_FORMAT_VERSION,
};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct NaiveBayesHyper {
    pub alpha: f64,
}

impl Default for NaiveBayesHyper {
    fn default() -> Self {
        NaiveBayesHyper { alpha: 1.0 }
    }
}

/// Likelihoods are stored in probability space (always finite); scoring
/// moves to log space, where an alpha=0 zero-likelihood becomes -inf and
/// drops the class out of the argmax.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NaiveBayesParams {
    pub priors: Vec<f64>,
    /// per-class term likelihoods, class-major: likelihoods[k][t]
    pub likelihoods: Vec<Vec<f64>>,
}

impl NaiveBayesParams {
    pub fn score_row(&self, row: &[(usize, f64)]) -> ClassDistribution {
        let log_posteriors: Vec<f64> = self
            .priors
            .iter()
            .zip(&self.likelihoods)
            .map(|(&prior, likelihood)| {
                let mut score = prior.ln();
                for &(idx, count) in row {
                    score += count * likelihood[idx].ln();
                }
                score
            })
            .collect();
        ClassDistribution {
            scores: softmax(&log_posteriors),
            normalized: true,
        }
    }
}

/// Class priors from class frequencies; per-class term likelihoods with
/// additive smoothing alpha. Count features; TF-IDF weights are accepted
/// as fractional counts.
pub fn train(
    x: &SparseFeatureMatrix,
    y: &[usize],
    n_classes: usize,
    hyper: NaiveBayesHyper,
) -> Result<TrainedModel> {
    check_training_input(x, y, n_classes)?;
    if hyper.alpha < 0.0 {
        return Err(Error::BadHyperparameter(format!(
            "alpha {} must be >= 0",
            hyper.alpha
        )));
    }
    let n_features = x.n_columns;
    let mut class_counts = vec![0usize; n_classes];
    let mut term_counts = vec![vec![0.0f64; n_features]; n_classes];
    for (row, &label) in x.rows.iter().zip(y) {
        class_counts[label] += 1;
        for &(idx, count) in row {
            term_counts[label][idx] += count;
        }
    }
    for (k, &count) in class_counts.iter().enumerate() {
        if count == 0 {
            let label = crate::corpus::SentimentLabel::from_code(k)
                .unwrap_or(crate::corpus::SentimentLabel::Neutral);
            return Err(Error::MissingClass(label));
        }
    }
    let n = y.len() as f64;
    let priors: Vec<f64> = class_counts.iter().map(|&c| c as f64 / n).collect();
    let likelihoods: Vec<Vec<f64>> = term_counts
        .iter()
        .map(|counts| {
            let total: f64 = counts.iter().sum();
            let denom = total + hyper.alpha * n_features as f64;
            counts
                .iter()
                .map(|&c| {
                    if denom == 0.0 {
                        // class with no tokens and alpha 0: uniform
                        1.0 / n_features as f64
                    } else {
                        (c + hyper.alpha) / denom
                    }
                })
                .collect()
        })
        .collect();
    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        kind: ModelKind::NaiveBayes,
        hyperparameters: serde_json::to_value(hyper)?,
        vocabulary_fingerprint: x.vocabulary_fingerprint.clone(),
        n_features,
        n_classes,
        params: ModelParams::NaiveBayes(NaiveBayesParams {
            priors,
            likelihoods,
        }),
        loss_curve: Vec::new(),
    })
}
