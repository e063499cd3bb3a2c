//! Six classifiers behind one train/predict contract.

pub mod forest;
pub mod gbt;
pub mod logistic;
pub mod naive_bayes;
pub mod svm;
pub mod tree;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseFeatureMatrix;

pub const MODEL_FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    NaiveBayes,
    Logistic,
    Svm,
    DecisionTree,
    RandomForest,
    Gbt,
}

impl ModelKind {
    pub const ALL: [ModelKind; 6] = [
        ModelKind::NaiveBayes,
        ModelKind::Logistic,
        ModelKind::Svm,
        ModelKind::DecisionTree,
        ModelKind::RandomForest,
        ModelKind::Gbt,
    ];

    pub fn name(self) -> &'static str {
        match self {
            ModelKind::NaiveBayes => "naive_bayes",
            ModelKind::Logistic => "logistic",
            ModelKind::Svm => "svm",
            ModelKind::DecisionTree => "decision_tree",
            ModelKind::RandomForest => "random_forest",
            ModelKind::Gbt => "gbt",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        match s.to_ascii_lowercase().as_str() {
            "naive_bayes" | "nb" => Some(ModelKind::NaiveBayes),
            "logistic" | "lr" => Some(ModelKind::Logistic),
            "svm" => Some(ModelKind::Svm),
            "decision_tree" | "dt" => Some(ModelKind::DecisionTree),
            "random_forest" | "rf" => Some(ModelKind::RandomForest),
            "gbt" | "xgb" | "gradient_boosting" => Some(ModelKind::Gbt),
        _ => None,
        }
    }
}

/// Per-label scores. `normalized` means entries are >= 0 and sum to 1;
/// SVM margins pass through a rank-preserving softmax and are flagged
/// normalized only for ranking purposes (ROC).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassDistribution {
    pub scores: Vec<f64>,
    pub normalized: bool,
}

impl ClassDistribution {
    /// Argmax with lowest-class-code tie-break. Total on ties.
    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for (i, &s) in self.scores.iter().enumerate().skip(1) {
            if s > self.scores[best] {
                best = i;
            }
        }
        best
    }
}

pub fn softmax(scores: &[f64]) -> Vec<f64> {
    let max = scores.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if !max.is_finite() {
        // all -inf: fall back to uniform
        return vec![1.0 / scores.len() as f64; scores.len()];
    }
    let exps: Vec<f64> = scores.iter().map(|&s| (s - max).exp()).collect();
    let sum: f64 = exps.iter().sum();
    exps.iter().map(|&e| e / sum).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "model", rename_all = "snake_case")]
pub enum ModelParams {
    NaiveBayes(naive_bayes::NaiveBayesParams),
    Logistic(logistic::LinearParams),
    Svm(svm::SvmParams),
    DecisionTree(tree::ClassificationTreeParams),
    RandomForest(forest::ForestParams),
    Gbt(gbt::GbtParams),
}

/// Serialized classifier: versioned envelope with kind tag,
/// hyperparameters, vocabulary fingerprint, and learned parameters.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrainedModel {
    pub format_version: u32,
    pub kind: ModelKind,
    pub hyperparameters: serde_json::Value,
    pub vocabulary_fingerprint: String,
    pub n_features: usize,
    pub n_classes: usize,
    pub params: ModelParams,
    /// Training loss per epoch/round, where the trainer records one.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub loss_curve: Vec<f64>,
}

impl TrainedModel {
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(raw: &str) -> Result<Self> {
        let value: serde_json::Value = serde_json::from_str(raw)?;
        let version = value
            .get("format_version")
            .and_then(|v| v.as_u64())
            .unwrap_or(0) as u32;
        if version != MODEL_FORMAT_VERSION {
            return Err(Error::UnknownFormatVersion(version));
        }
        Ok(serde_json::from_value(value)?)
    }

    fn check_compatible(&self, x: &SparseFeatureMatrix) -> Result<()> {
        if x.vocabulary_fingerprint != self.vocabulary_fingerprint {
            return Err(Error::FingerprintMismatch {
                model: self.vocabulary_fingerprint.clone(),
                features: x.vocabulary_fingerprint.clone(),
            });
        }
        for row in &x.rows {
            if let Some(&(max_idx, _)) = row.last() {
                if max_idx >= self.n_features {
                    return Err(Error::RowTooWide {
                        row: max_idx + 1,
                        vocab: self.n_features,
                    });
                }
            }
        }
        Ok(())
    }

    /// One distribution row per feature row.
    pub fn predict_dist(&self, x: &SparseFeatureMatrix) -> Result<Vec<ClassDistribution>> {
        self.check_compatible(x)?;
        Ok(x.rows
            .iter()
            .map(|row| self.score_row(row))
            .collect())
    }

    /// One label code per row: argmax of the distribution, lowest code on ties.
    pub fn predict(&self, x: &SparseFeatureMatrix) -> Result<Vec<usize>> {
        Ok(self.predict_dist(x)?.iter().map(|d| d.argmax()).collect())
    }

    pub fn score_row(&self, row: &[(usize, f64)]) -> ClassDistribution {
        match &self.params {
            ModelParams::NaiveBayes(p) => p.score_row(row),
            ModelParams::Logistic(p) => p.score_row(row),
            ModelParams::Svm(p) => p.score_row(row),
            ModelParams::DecisionTree(p) => p.score_row(row),
            ModelParams::RandomForest(p) => p.score_row(row),
            ModelParams::Gbt(p) => p.score_row(row),
        }
    }
}

/// Shared trainer-side validation.
pub(crate) fn check_training_input(x: &SparseFeatureMatrix, y: &[usize], n_classes: usize) -> Result<()> {
    if x.n_rows() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.n_rows(),
            right: y.len(),
        });
    }
    if y.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if let Some(&bad) = y.iter().find(|&&c| c >= n_classes) {
        return Err(Error::BadHyperparameter(format!(
            "label code {bad} out of range for {n_classes} classes"
        )));
    }
    Ok(())
}

/// Deterministic per-tree RNG stream: splitmix64 over (seed, index).
pub(crate) fn stream_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
