//! Accuracy, precision, recall, F1, confusion matrices, one-vs-rest ROC
//! curves and AUC.

use serde::{Deserialize, Serialize};

use crate::corpus::{SentimentLabel, ALL_LABELS};
use crate::error::{Error, Result};
use crate::models::ClassDistribution;

pub const N_CLASSES: usize = 3;

/// Rows = true label, columns = predicted.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub counts: [[usize; N_CLASSES]; N_CLASSES],
    pub total: usize,
}

pub fn confusion(y_true: &[usize], y_pred: &[usize]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::LengthMismatch {
            left: y_true.len(),
            right: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::EmptyInput("confusion"));
    }
    let mut counts = [[0usize; N_CLASSES]; N_CLASSES];
    for (&t, &p) in y_true.iter().zip(y_pred) {
        counts[t][p] += 1;
    }
    Ok(ConfusionMatrix {
        counts,
        total: y_true.len(),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerClassMetrics {
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Metrics {
    pub accuracy: f64,
    pub per_class: Vec<PerClassMetrics>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub micro_precision: f64,
    pub micro_recall: f64,
    pub micro_f1: f64,
    /// classes with a zero-denominator metric, reported instead of NaN
    pub degenerate_classes: Vec<String>,
}

/// accuracy = trace/total; per-class P = TP/(TP+FP), R = TP/(TP+FN),
/// F1 = 2PR/(P+R); macro = unweighted class mean. Zero denominators
/// yield 0 plus a degenerate-class warning.
pub fn metrics(cm: &ConfusionMatrix) -> Metrics {
    let total = cm.total as f64;
    let trace: usize = (0..N_CLASSES).map(|i| cm.counts[i][i]).sum();
    let accuracy = trace as f64 / total;
    let mut per_class = Vec::with_capacity(N_CLASSES);
    let mut degenerate = Vec::new();
    for k in 0..N_CLASSES {
        let tp = cm.counts[k][k] as f64;
        let fp: f64 = (0..N_CLASSES)
            .filter(|&i| i != k)
            .map(|i| cm.counts[i][k] as f64)
            .sum();
        let fn_: f64 = (0..N_CLASSES)
            .filter(|&j| j != k)
            .map(|j| cm.counts[k][j] as f64)
            .sum();
        let mut degenerate_class = false;
        let precision = if tp + fp > 0.0 {
            tp / (tp + fp)
        } else {
            degenerate_class = true;
            0.0
        };
        let recall = if tp + fn_ > 0.0 {
            tp / (tp + fn_)
        } else {
            degenerate_class = true;
            0.0
        };
        let f1 = if precision + recall > 0.0 {
            2.0 * precision * recall / (precision + recall)
        } else {
            degenerate_class = true;
            0.0
        };
        if degenerate_class {
            degenerate.push(ALL_LABELS[k].name().to_string());
        }
        per_class.push(PerClassMetrics {
            precision,
            recall,
            f1,
        });
    }
    let mean = |f: fn(&PerClassMetrics) -> f64| {
        per_class.iter().map(f).sum::<f64>() / N_CLASSES as f64
    };
    // single-label multiclass: micro P = micro R = accuracy
    Metrics {
        accuracy,
        macro_precision: mean(|m| m.precision),
        macro_recall: mean(|m| m.recall),
        macro_f1: mean(|m| m.f1),
        micro_precision: accuracy,
        micro_recall: accuracy,
        micro_f1: accuracy,
        per_class,
        degenerate_classes: degenerate,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    /// The (0,0) anchor carries threshold = +inf, which JSON cannot
    /// represent directly; it round-trips through null.
    #[serde(with = "nullable_infinity")]
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

mod nullable_infinity {
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &f64, s: S) -> Result<S::Ok, S::Error> {
        if v.is_finite() {
            s.serialize_some(v)
        } else {
            s.serialize_none()
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
        Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
    }
}

/// One-vs-rest ROC: TPR/FPR swept over all distinct score thresholds,
/// endpoints (0,0) and (1,1) included.
pub fn roc_curve_ovr(
    y_true: &[usize],
    score_rows: &[ClassDistribution],
    positive_class: usize,
) -> Result<Vec<RocPoint>> {
    if y_true.len() != score_rows.len() {
        return Err(Error::LengthMismatch {
            left: y_true.len(),
            right: score_rows.len(),
        });
    }
    let positives = y_true.iter().filter(|&&t| t == positive_class).count();
    let negatives = y_true.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::DegenerateClass(
            SentimentLabel::from_code(positive_class).unwrap_or(SentimentLabel::Neutral),
        ));
    }
    let mut scored: Vec<(f64, bool)> = y_true
        .iter()
        .zip(score_rows)
        .map(|(&t, d)| (d.scores[positive_class], t == positive_class))
        .collect();
    if scored.iter().any(|(s, _)| !s.is_finite()) {
        return Err(Error::EmptyInput("non-finite score"));
    }
    scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap());
    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < scored.len() {
        let threshold = scored[i].0;
        // take all samples tied at this score together
        while i < scored.len() && scored[i].0 == threshold {
            if scored[i].1 {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            threshold,
            fpr: fp as f64 / negatives as f64,
            tpr: tp as f64 / positives as f64,
        });
    }
    debug_assert!((points.last().unwrap().fpr - 1.0).abs() < 1e-12);
    debug_assert!((points.last().unwrap().tpr - 1.0).abs() < 1e-12);
    Ok(points)
}

/// Trapezoidal area under one ROC curve.
pub fn auc(points: &[RocPoint]) -> f64 {
    points
        .windows(2)
        .map(|w| (w[1].fpr - w[0].fpr) * (w[0].tpr + w[1].tpr) / 2.0)
        .sum()
}

/// Unweighted mean of per-class trapezoidal AUCs.
pub fn auc_macro(per_class_rocs: &[Vec<RocPoint>]) -> f64 {
    per_class_rocs.iter().map(|r| auc(r)).sum::<f64>() / per_class_rocs.len() as f64
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub model_kind: String,
    pub feature_kind: String,
    pub confusion: ConfusionMatrix,
    pub metrics: Metrics,
    /// per-class ROC points; empty for a class that was degenerate
    pub roc: Vec<Vec<RocPoint>>,
    pub macro_auc: Option<f64>,
    /// identity of the evaluated test set
    pub test_fingerprint: String,
}

pub fn evaluate(
    model_kind: &str,
    feature_kind: &str,
    y_true: &[usize],
    y_pred: &[usize],
    score_rows: &[ClassDistribution],
    test_fingerprint: &str,
) -> Result<EvaluationReport> {
    let cm = confusion(y_true, y_pred)?;
    let m = metrics(&cm);
    let mut rocs = Vec::with_capacity(N_CLASSES);
    let mut aucs = Vec::new();
    for k in 0..N_CLASSES {
        match roc_curve_ovr(y_true, score_rows, k) {
            Ok(points) => {
                aucs.push(auc(&points));
                rocs.push(points);
            }
            Err(Error::DegenerateClass(_)) => rocs.push(Vec::new()),
            Err(e) => return Err(e),
        }
    }
    let macro_auc = (!aucs.is_empty()).then(|| aucs.iter().sum::<f64>() / aucs.len() as f64);
    Ok(EvaluationReport {
        model_kind: model_kind.to_string(),
        feature_kind: feature_kind.to_string(),
        confusion: cm,
        metrics: m,
        roc: rocs,
        macro_auc,
        test_fingerprint: test_fingerprint.to_string(),
    })
}

/// Model leaderboard: sorted by accuracy descending, ties broken
/// by macro F1 then model name.
pub fn compare_models(reports: &[EvaluationReport]) -> Result<Vec<&EvaluationReport>> {
    if let Some(first) = reports.first() {
        for r in reports {
            if r.test_fingerprint != first.test_fingerprint {
                return Err(Error::MixedTestSets(
                    first.test_fingerprint.clone(),
                    r.test_fingerprint.clone(),
                ));
            }
        }
    }
    let mut sorted: Vec<&EvaluationReport> = reports.iter().collect();
    sorted.sort_by(|a, b| {
        b.metrics
            .accuracy
            .partial_cmp(&a.metrics.accuracy)
            .unwrap()
            .then_with(|| b.metrics.macro_f1.partial_cmp(&a.metrics.macro_f1).unwrap())
            .then_with(|| a.model_kind.cmp(&b.model_kind))
    });
    Ok(sorted)
}

/// Markdown comparison table mirroring the feature-extractor x model layout.
pub fn comparison_markdown(reports: &[EvaluationReport]) -> Result<String> {
    let sorted = compare_models(reports)?;
    let mut out = String::new();
    for feature_kind in ["bow", "tfidf"] {
        let rows: Vec<&&EvaluationReport> = sorted
            .iter()
            .filter(|r| r.feature_kind == feature_kind)
            .collect();
        if rows.is_empty() {
            continue;
        }
        out.push_str(&format!("### {feature_kind}\n\n"));
        out.push_str("| Model | Accuracy | Precision | Recall | F1 |\n");
        out.push_str("|---|---|---|---|---|\n");
        for r in rows {
            out.push_str(&format!(
                "| {} | {:.2}% | {:.2}% | {:.2}% | {:.2}% |\n",
                r.model_kind,
                r.metrics.accuracy * 100.0,
                r.metrics.macro_precision * 100.0,
                r.metrics.macro_recall * 100.0,
                r.metrics.macro_f1 * 100.0,
            ));
        }
        out.push('\n');
    }
    Ok(out)
}

/// ROC points as CSV (threshold,fpr,tpr) for external plotting.
pub fn roc_csv(points: &[RocPoint]) -> String {
    let mut out = String::from("threshold,fpr,tpr\n");
    for p in points {
        out.push_str(&format!("{},{},{}\n", p.threshold, p.fpr, p.tpr));
    }
    out
}
