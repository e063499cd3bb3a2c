//! Gradient-boosted regression trees on softmax cross-entropy gradients:
//! one tree per class per round, additive scores, argmax prediction.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseFeatureMatrix;
use crate::models::{
    check_training_input, softmax, tree::{grow_reg_tree, RegNode},
    ClassDistribution, ModelKind, ModelParams, TrainedModel, MODEL_FORMAT_VERSION,
};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct GbtHyper {
    pub n_rounds: usize,
    pub depth: usize,
    pub shrinkage: f64,
    pub min_samples_split: usize,
    pub seed: u64,
}

impl Default for GbtHyper {
    fn default() -> Self {
        GbtHyper {
            n_rounds: 100,
            depth: 3,
            shrinkage: 0.1,
            min_samples_split: 2,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GbtParams {
    /// rounds x classes
    pub trees: Vec<Vec<RegNode>>,
    pub shrinkage: f64,
    pub n_classes: usize,
}

impl GbtParams {
    fn raw_scores(&self, row: &[(usize, f64)]) -> Vec<f64> {
        let mut scores = vec![0.0f64; self.n_classes];
        for round in &self.trees {
            for (k, tree) in round.iter().enumerate() {
                scores[k] += self.shrinkage * tree.predict_row(row);
            }
        }
        scores
    }

    pub fn score_row(&self, row: &[(usize, f64)]) -> ClassDistribution {
        ClassDistribution {
            scores: softmax(&self.raw_scores(row)),
            normalized: true,
        }
    }
}

pub fn train(
    x: &SparseFeatureMatrix,
    y: &[usize],
    n_classes: usize,
    hyper: GbtHyper,
) -> Result<TrainedModel> {
    check_training_input(x, y, n_classes)?;
    if hyper.n_rounds == 0 {
        return Err(Error::BadHyperparameter("n_rounds must be >= 1".into()));
    }
    if !(hyper.shrinkage > 0.0 && hyper.shrinkage <= 1.0) {
        return Err(Error::BadHyperparameter(format!(
            "shrinkage {} outside (0, 1]",
            hyper.shrinkage
        )));
    }
    if hyper.depth == 0 {
        return Err(Error::BadHyperparameter("depth must be >= 1".into()));
    }
    let n = x.n_rows();
    let idx: Vec<usize> = (0..n).collect();
    let mut scores = vec![vec![0.0f64; n_classes]; n];
    let mut all_trees: Vec<Vec<RegNode>> = Vec::with_capacity(hyper.n_rounds);
    let mut loss_curve = Vec::with_capacity(hyper.n_rounds);
    for round in 0..hyper.n_rounds {
        let probs: Vec<Vec<f64>> = scores.iter().map(|s| softmax(s)).collect();
        let mut round_trees = Vec::with_capacity(n_classes);
        for k in 0..n_classes {
            // negative gradient of cross-entropy wrt class-k score
            let residuals: Vec<f64> = (0..n)
                .map(|i| (if y[i] == k { 1.0 } else { 0.0 }) - probs[i][k])
                .collect();
            let tree = grow_reg_tree(
                &x.rows,
                &residuals,
                &idx,
                x.n_columns,
                0,
                hyper.depth,
                hyper.min_samples_split,
            );
            for (i, row) in x.rows.iter().enumerate() {
                scores[i][k] += hyper.shrinkage * tree.predict_row(row);
                if !scores[i][k].is_finite() {
                    return Err(Error::NonFinite {
                        kind: "gbt".into(),
                        what: "scores".into(),
                        step: round,
                    });
                }
            }
            round_trees.push(tree);
        }
        all_trees.push(round_trees);
        let loss = -scores
            .iter()
            .zip(y)
            .map(|(s, &label)| softmax(s)[label].max(1e-300).ln())
            .sum::<f64>()
            / n as f64;
        loss_curve.push(loss);
    }
    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        kind: ModelKind::Gbt,
        hyperparameters: serde_json::to_value(hyper)?,
        vocabulary_fingerprint: x.vocabulary_fingerprint.clone(),
        n_features: x.n_columns,
        n_classes,
        params: ModelParams::Gbt(GbtParams {
            trees: all_trees,
            shrinkage: hyper.shrinkage,
            n_classes,
        }),
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
    fn one_round_depth_one_separates_toy() {
        let rows = vec![
            vec![(0, 1.0)],
            vec![(0, 2.0)],
            vec![(0, 8.0)],
            vec![(0, 9.0)],
        ];
        let y = vec![0, 0, 1, 1];
        let x = matrix(rows, 1);
        let model = train(
            &x,
            &y,
            2,
            GbtHyper {
                n_rounds: 1,
                depth: 1,
                shrinkage: 1.0,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(model.predict(&x).unwrap(), y);
    }

    #[test]
    fn zero_shrinkage_rejected() {
        let x = matrix(vec![vec![(0, 1.0)]], 1);
        assert!(matches!(
            train(&x, &[0], 1, GbtHyper { shrinkage: 0.0, ..Default::default() }),
            Err(Error::BadHyperparameter(_))
        ));
    }

    #[test]
    fn loss_non_increasing_over_rounds() {
        let rows = vec![
            vec![(0, 3.0)],
            vec![(0, 2.0), (1, 1.0)],
            vec![(1, 3.0)],
            vec![(1, 2.0), (2, 1.0)],
            vec![(2, 3.0)],
            vec![(2, 2.0), (0, 1.0)],
        ];
        let y = vec![0, 0, 1, 1, 2, 2];
        let x = matrix(rows, 3);
        let model = train(
            &x,
            &y,
            3,
            GbtHyper {
                n_rounds: 50,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(model.loss_curve.len(), 50);
        for w in model.loss_curve.windows(2) {
            assert!(w[1] <= w[0] + 1e-6, "loss increased: {} -> {}", w[0], w[1]);
        }
    }

    #[test]
    fn deterministic_for_fixed_inputs() {
        let rows = vec![vec![(0, 1.0)], vec![(1, 1.0)], vec![(0, 1.0), (1, 1.0)]];
        let y = vec![0, 1, 0];
        let x = matrix(rows, 2);
        let h = GbtHyper { n_rounds: 5, ..Default::default() };
        let a = train(&x, &y, 2, h).unwrap();
        let b = train(&x, &y, 2, h).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }
}
