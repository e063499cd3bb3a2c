//! Random forest: bootstrapped classification trees with per-split
//! random feature subsets, majority-vote prediction.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::features::SparseFeatureMatrix;
use crate::models::{
    check_training_input, stream_seed, tree::{grow_class_tree, ClassNode, TreeHyper},
    ClassDistribution, ModelKind, ModelParams, TrainedModel, MODEL_FORMAT_VERSION,
};

#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
#[serde(default)]
pub struct ForestHyper {
    pub n_trees: usize,
    pub max_depth: usize,
    pub min_samples_split: usize,
    /// None = sqrt(V)/V, the usual classification default.
    pub feature_fraction: Option<f64>,
    pub bootstrap: bool,
    pub seed: u64,
}

impl Default for ForestHyper {
    fn default() -> Self {
        ForestHyper {
            n_trees: 100,
            max_depth: 20,
            min_samples_split: 2,
            feature_fraction: None,
            bootstrap: true,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ForestParams {
    pub trees: Vec<ClassNode>,
    pub n_classes: usize,
}

impl ForestParams {
    /// Majority vote; ties broken by summed leaf class counts, then
    /// lowest class code. Distribution = vote fractions.
    pub fn score_row(&self, row: &[(usize, f64)]) -> ClassDistribution {
        let n_classes = self.n_classes;
        let mut votes = vec![0.0f64; n_classes];
        let mut summed_counts = vec![0.0f64; n_classes];
        for tree in &self.trees {
            votes[tree.predict_row(row)] += 1.0;
            for (k, &c) in tree.leaf_counts(row).iter().enumerate() {
                summed_counts[k] += c;
            }
        }
        let total: f64 = votes.iter().sum();
        let mut best = 0;
        for k in 1..n_classes {
            if votes[k] > votes[best]
                || (votes[k] == votes[best] && summed_counts[k] > summed_counts[best])
            {
                best = k;
            }
        }
        let mut scores: Vec<f64> = votes.iter().map(|&v| v / total).collect();
        // nudge the tie-break winner so argmax over vote fractions agrees
        // with the counts-based resolution without changing the ranking
        if scores.iter().filter(|&&s| s == scores[best]).count() > 1 {
            let eps = 0.5 / total / self.trees.len().max(1) as f64;
            scores[best] += eps;
            let sum: f64 = scores.iter().sum();
            for s in &mut scores {
                *s /= sum;
            }
        }
        ClassDistribution {
            scores,
            normalized: true,
        }
    }
}

pub fn train(
    x: &SparseFeatureMatrix,
    y: &[usize],
    n_classes: usize,
    hyper: ForestHyper,
) -> Result<TrainedModel> {
    check_training_input(x, y, n_classes)?;
    if hyper.n_trees == 0 {
        return Err(Error::BadHyperparameter("n_trees must be >= 1".into()));
    }
    let n = x.n_rows();
    let v = x.n_columns;
    let fraction = hyper
        .feature_fraction
        .unwrap_or_else(|| (v as f64).sqrt() / v as f64);
    if !(fraction > 0.0 && fraction <= 1.0) {
        return Err(Error::BadHyperparameter(format!(
            "feature_fraction {fraction} outside (0, 1]"
        )));
    }
    let subset_size = (fraction * v as f64).ceil() as usize;
    let feature_subset = (subset_size < v).then_some(subset_size.max(1));
    let tree_hyper = TreeHyper {
        max_depth: hyper.max_depth,
        min_samples_split: hyper.min_samples_split,
    };
    // per-tree RNG streams make the result independent of scheduling
    let trees: Vec<ClassNode> = (0..hyper.n_trees)
        .into_par_iter()
        .map(|t| {
            let mut rng = ChaCha8Rng::seed_from_u64(stream_seed(hyper.seed, t as u64));
            let idx: Vec<usize> = if hyper.bootstrap {
                (0..n).map(|_| rng.gen_range(0..n)).collect()
            } else {
                (0..n).collect()
            };
            grow_class_tree(
                &x.rows,
                y,
                &idx,
                n_classes,
                v,
                0,
                &tree_hyper,
                feature_subset,
                &mut rng,
            )
        })
        .collect();
    Ok(TrainedModel {
        format_version: MODEL_FORMAT_VERSION,
        kind: ModelKind::RandomForest,
        hyperparameters: serde_json::to_value(hyper)?,
        vocabulary_fingerprint: x.vocabulary_fingerprint.clone(),
        n_features: v,
        n_classes,
        params: ModelParams::RandomForest(ForestParams { trees, n_classes }),
        loss_curve: Vec::new(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::features::WeightKind;
    use crate::models::tree;

    fn matrix(rows: Vec<Vec<(usize, f64)>>, n_columns: usize) -> SparseFeatureMatrix {
        SparseFeatureMatrix {
            rows,
            n_columns,
            kind: WeightKind::Count,
            vocabulary_fingerprint: "test".into(),
        }
    }

    fn toy() -> (SparseFeatureMatrix, Vec<usize>) {
        let rows = vec![
            vec![(0, 3.0)],
            vec![(0, 2.0), (1, 1.0)],
            vec![(1, 3.0)],
            vec![(1, 2.0), (2, 1.0)],
            vec![(2, 3.0)],
            vec![(2, 2.0), (0, 1.0)],
        ];
        (matrix(rows, 3), vec![0, 0, 1, 1, 2, 2])
    }

    #[test]
    fn single_tree_no_bootstrap_reduces_to_decision_tree() {
        let (x, y) = toy();
        let forest = train(
            &x,
            &y,
            3,
            ForestHyper {
                n_trees: 1,
                bootstrap: false,
                feature_fraction: Some(1.0),
                ..Default::default()
            },
        )
        .unwrap();
        let dt = tree::train(&x, &y, 3, tree::TreeHyper::default()).unwrap();
        assert_eq!(forest.predict(&x).unwrap(), dt.predict(&x).unwrap());
    }

    #[test]
    fn same_seed_same_forest() {
        let (x, y) = toy();
        let h = ForestHyper {
            n_trees: 10,
            seed: 42,
            ..Default::default()
        };
        let a = train(&x, &y, 3, h).unwrap();
        let b = train(&x, &y, 3, h).unwrap();
        assert_eq!(a.to_json().unwrap(), b.to_json().unwrap());
    }

    #[test]
    fn forest_matches_or_beats_single_tree_on_fixture() {
        let (x, y) = toy();
        let accuracy = |preds: &[usize]| {
            preds.iter().zip(&y).filter(|(a, b)| a == b).count() as f64 / y.len() as f64
        };
        let depth_budget = 4;
        let dt = tree::train(
            &x,
            &y,
            3,
            tree::TreeHyper {
                max_depth: depth_budget,
                min_samples_split: 2,
            },
        )
        .unwrap();
        let rf = train(
            &x,
            &y,
            3,
            ForestHyper {
                n_trees: 25,
                max_depth: depth_budget,
                seed: 7,
                ..Default::default()
            },
        )
        .unwrap();
        assert!(accuracy(&rf.predict(&x).unwrap()) >= accuracy(&dt.predict(&x).unwrap()));
    }

    #[test]
    fn vote_fractions_sum_to_one() {
        let (x, y) = toy();
        let model = train(&x, &y, 3, ForestHyper { n_trees: 7, ..Default::default() }).unwrap();
        for dist in model.predict_dist(&x).unwrap() {
            assert!((dist.scores.iter().sum::<f64>() - 1.0).abs() < 1e-9);
        }
    }
}
