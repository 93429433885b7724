//! Classification metrics: confusion matrix, accuracy / precision /
//! recall / F1, ROC curve, and AUC.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::Label;
use crate::error::{Error, Result};

/// 2×2 contingency counts with dark patterns as the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub true_positives: usize,
    pub false_positives: usize,
    pub true_negatives: usize,
    pub false_negatives: usize,
}

impl ConfusionMatrix {
    pub fn total(&self) -> usize {
        self.true_positives + self.false_positives + self.true_negatives + self.false_negatives
    }

    /// Export in the standard 2×2 layout: predicted classes as
    /// columns, actual classes as rows.
    pub fn export_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::MalformedRow {
            row: 0,
            message: e.to_string(),
        };
        w.write_record(["", "predicted_negative", "predicted_positive"])
            .map_err(err)?;
        w.write_record([
            "actual_negative",
            &self.true_negatives.to_string(),
            &self.false_positives.to_string(),
        ])
        .map_err(err)?;
        w.write_record([
            "actual_positive",
            &self.false_negatives.to_string(),
            &self.true_positives.to_string(),
        ])
        .map_err(err)?;
        w.flush().map_err(|e| Error::MalformedRow {
            row: 0,
            message: e.to_string(),
        })?;
        Ok(())
    }
}

/// Count prediction outcomes against ground truth.
pub fn confusion_matrix(y_true: &[Label], y_pred: &[Label]) -> Result<ConfusionMatrix> {
    if y_true.len() != y_pred.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            got: y_pred.len(),
        });
    }
    if y_true.is_empty() {
        return Err(Error::EmptyDataset);
    }
    let mut cm = ConfusionMatrix {
        true_positives: 0,
        false_positives: 0,
        true_negatives: 0,
        false_negatives: 0,
    };
    for (&truth, &pred) in y_true.iter().zip(y_pred) {
        match (truth.is_positive(), pred.is_positive()) {
            (true, true) => cm.true_positives += 1,
            (false, true) => cm.false_positives += 1,
            (false, false) => cm.true_negatives += 1,
            (true, false) => cm.false_negatives += 1,
        }
    }
    Ok(cm)
}

/// Which zero-denominator conventions fired while scoring.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Degeneracy {
    pub precision: bool,
    pub recall: bool,
    pub f1: bool,
}

impl Degeneracy {
    pub fn any(&self) -> bool {
        self.precision || self.recall || self.f1
    }
}

/// The four headline scores. Zero-denominator cases score 0 and raise
/// the matching degeneracy flag instead of producing NaN.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Scores {
    pub accuracy: f64,
    pub precision: f64,
    pub recall: f64,
    pub f1: f64,
    pub degeneracy: Degeneracy,
}

/// Accuracy, precision, recall, and F1 from a confusion matrix:
/// accuracy = (TP+TN)/total, precision = TP/(TP+FP),
/// recall = TP/(TP+FN), F1 = 2·P·R/(P+R).
pub fn scores(cm: &ConfusionMatrix) -> Scores {
    let total = cm.total();
    debug_assert!(total > 0);
    let mut degeneracy = Degeneracy::default();

    let accuracy = if total > 0 {
        (cm.true_positives + cm.true_negatives) as f64 / total as f64
    } else {
        0.0
    };

    let predicted_positive = cm.true_positives + cm.false_positives;
    let precision = if predicted_positive > 0 {
        cm.true_positives as f64 / predicted_positive as f64
    } else {
        degeneracy.precision = true;
        0.0
    };

    let actual_positive = cm.true_positives + cm.false_negatives;
    let recall = if actual_positive > 0 {
        cm.true_positives as f64 / actual_positive as f64
    } else {
        degeneracy.recall = true;
        0.0
    };

    let f1 = if precision + recall > 0.0 {
        2.0 * precision * recall / (precision + recall)
    } else {
        degeneracy.f1 = true;
        0.0
    };

    Scores {
        accuracy,
        precision,
        recall,
        f1,
        degeneracy,
    }
}

/// One ROC operating point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RocPoint {
    /// Score cutoff: samples scoring ≥ threshold are predicted positive.
    pub threshold: f64,
    pub fpr: f64,
    pub tpr: f64,
}

/// ROC curve: starts at (0,0), ends at (1,1), both coordinates
/// non-decreasing.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RocCurve {
    pub points: Vec<RocPoint>,
}

impl RocCurve {
    /// Export as CSV `threshold,fpr,tpr`.
    pub fn export_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::MalformedRow {
            row: 0,
            message: e.to_string(),
        };
        w.write_record(["threshold", "fpr", "tpr"]).map_err(err)?;
        for p in &self.points {
            w.write_record([
                p.threshold.to_string(),
                p.fpr.to_string(),
                p.tpr.to_string(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| Error::MalformedRow {
            row: 0,
            message: e.to_string(),
        })?;
        Ok(())
    }
}

/// Sweep cutoffs at each distinct score, descending; samples with equal
/// scores enter together (so ties step diagonally). The initial point
/// (0,0) carries threshold +∞; the full sweep necessarily ends at (1,1).
pub fn roc_curve(y_true: &[Label], scores: &[f64]) -> Result<RocCurve> {
    if y_true.len() != scores.len() {
        return Err(Error::DimensionMismatch {
            expected: y_true.len(),
            got: scores.len(),
        });
    }
    if scores.iter().any(|s| !s.is_finite()) {
        return Err(Error::NonFinite("score".into()));
    }
    let positives = y_true.iter().filter(|l| l.is_positive()).count();
    let negatives = y_true.len() - positives;
    if positives == 0 || negatives == 0 {
        return Err(Error::SingleClass);
    }

    let mut order: Vec<usize> = (0..scores.len()).collect();
    order.sort_by(|&a, &b| scores[b].partial_cmp(&scores[a]).expect("finite scores"));

    let mut points = vec![RocPoint {
        threshold: f64::INFINITY,
        fpr: 0.0,
        tpr: 0.0,
    }];
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut i = 0;
    while i < order.len() {
        let cutoff = scores[order[i]];
        while i < order.len() && scores[order[i]] == cutoff {
            if y_true[order[i]].is_positive() {
                tp += 1;
            } else {
                fp += 1;
            }
            i += 1;
        }
        points.push(RocPoint {
            threshold: cutoff,
            fpr: fp as f64 / negatives as f64,
            tpr: tp as f64 / positives as f64,
        });
    }
    Ok(RocCurve { points })
}

/// Area under the ROC curve by trapezoidal integration. For curves from
/// [`roc_curve`] this equals the probability that a random positive
/// outscores a random negative, with ties counted half.
pub fn auc(roc: &RocCurve) -> f64 {
    roc.points
        .windows(2)
        .map(|pair| {
            let dx = pair[1].fpr - pair[0].fpr;
            let avg_y = (pair[0].tpr + pair[1].tpr) / 2.0;
            dx * avg_y
        })
        .sum()
}

/// One row of the per-document prediction table.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PerDocumentPrediction {
    pub id: String,
    pub true_label: Label,
    pub score: f64,
    pub predicted: Label,
}

/// Full evaluation of a scored sample set.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EvaluationReport {
    pub confusion: ConfusionMatrix,
    pub scores: Scores,
    pub auc: f64,
    pub roc: RocCurve,
    pub per_document: Vec<PerDocumentPrediction>,
}

/// Build a complete report from ids, truths, and scores, thresholding
/// at `threshold` for the hard predictions.
pub fn evaluate(
    ids: &[String],
    y_true: &[Label],
    score_values: &[f64],
    threshold: f64,
) -> Result<EvaluationReport> {
    if ids.len() != y_true.len() || y_true.len() != score_values.len() {
        return Err(Error::DimensionMismatch {
            expected: ids.len(),
            got: score_values.len(),
        });
    }
    let y_pred: Vec<Label> = score_values
        .iter()
        .map(|&s| if s >= threshold { Label::Dark } else { Label::NotDark })
        .collect();
    let confusion = confusion_matrix(y_true, &y_pred)?;
    let metric_scores = scores(&confusion);
    let roc = roc_curve(y_true, score_values)?;
    let area = auc(&roc);
    let per_document = ids
        .iter()
        .zip(y_true)
        .zip(score_values)
        .zip(&y_pred)
        .map(|(((id, &truth), &score), &predicted)| PerDocumentPrediction {
            id: id.clone(),
            true_label: truth,
            score,
            predicted,
        })
        .collect();
    Ok(EvaluationReport {
        confusion,
        scores: metric_scores,
        auc: area,
        roc,
        per_document,
    })
}

impl EvaluationReport {
    /// Plain-text summary with scores rounded to 4 decimals (full
    /// precision lives in the CSV exports).
    pub fn summary_text(&self) -> String {
        let cm = &self.confusion;
        format!(
            "samples    {}\n\
             accuracy   {:.4}\n\
             precision  {:.4}\n\
             recall     {:.4}\n\
             f1         {:.4}\n\
             auc        {:.4}\n\
             confusion  tp={} fp={} tn={} fn={}\n",
            cm.total(),
            self.scores.accuracy,
            self.scores.precision,
            self.scores.recall,
            self.scores.f1,
            self.auc,
            cm.true_positives,
            cm.false_positives,
            cm.true_negatives,
            cm.false_negatives,
        )
    }

    /// Export the headline scores as a one-row CSV at full precision.
    pub fn metrics_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::MalformedRow {
            row: 0,
            message: e.to_string(),
        };
        w.write_record(["accuracy", "precision", "recall", "f1", "auc"])
            .map_err(err)?;
        w.write_record([
            self.scores.accuracy.to_string(),
            self.scores.precision.to_string(),
            self.scores.recall.to_string(),
            self.scores.f1.to_string(),
            self.auc.to_string(),
        ])
        .map_err(err)?;
        w.flush().map_err(|e| Error::MalformedRow {
            row: 0,
            message: e.to_string(),
        })?;
        Ok(())
    }

    /// Export per-document predictions as CSV
    /// `id,true_label,score,predicted_label`.
    pub fn predictions_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::MalformedRow {
            row: 0,
            message: e.to_string(),
        };
        w.write_record(["id", "true_label", "score", "predicted_label"])
            .map_err(err)?;
        for p in &self.per_document {
            w.write_record([
                p.id.as_str(),
                p.true_label.token(),
                &p.score.to_string(),
                p.predicted.token(),
            ])
            .map_err(err)?;
        }
        w.flush().map_err(|e| Error::MalformedRow {
            row: 0,
            message: e.to_string(),
        })?;
        Ok(())
    }
}
