//! Parameter optimization and analysis: stratified k-fold
//! cross-validation, grid search, feature importance, misclassification
//! reporting, and one-at-a-time sensitivity sweeps.
//!
//! Folds are fixed once per seed and shared across grid cells and
//! sensitivity points, so cell comparisons carry no fold-assignment
//! noise. Every fold refits its own vocabulary from its training side
//! only; held-out text never reaches fitting.

use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Label, PreprocessOptions};
use crate::error::{Error, Result};
use crate::exec;
use crate::metrics::{evaluate, EvaluationReport};
use crate::model::{train, TrainConfig, TrainedModel};
use crate::rng::{shuffle, SplitMix64};
use crate::vectorizer::{
    fit_vocabulary, transform_corpus, transform_document, VectorizerConfig, Weighting,
};

/// Hyperparameter axes for grid search and sensitivity analysis.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ParamGrid {
    pub lambdas: Vec<f64>,
    pub ngram_ranges: Vec<(usize, usize)>,
    pub max_features_options: Vec<Option<usize>>,
    pub weightings: Vec<Weighting>,
}

impl ParamGrid {
    pub fn validate(&self) -> Result<()> {
        if self.lambdas.is_empty()
            || self.ngram_ranges.is_empty()
            || self.max_features_options.is_empty()
            || self.weightings.is_empty()
        {
            return Err(Error::InvalidConfig("every grid axis must be non-empty".into()));
        }
        if self.lambdas.iter().any(|l| !(l.is_finite() && *l >= 0.0)) {
            return Err(Error::InvalidConfig("grid lambdas must be >= 0".into()));
        }
        Ok(())
    }

    pub fn size(&self) -> usize {
        self.lambdas.len()
            * self.ngram_ranges.len()
            * self.max_features_options.len()
            * self.weightings.len()
    }

    /// Enumerate cells in pinned order: lambda outermost, then n-gram
    /// range, then max_features, weighting innermost.
    pub fn cells(&self, min_df: usize) -> Vec<GridCell> {
        let mut cells = Vec::with_capacity(self.size());
        for &lambda in &self.lambdas {
            for &(ngram_min, ngram_max) in &self.ngram_ranges {
                for &max_features in &self.max_features_options {
                    for &weighting in &self.weightings {
                        cells.push(GridCell {
                            vectorizer_config: VectorizerConfig {
                                ngram_min,
                                ngram_max,
                                max_features,
                                min_df,
                                weighting,
                            },
                            lambda,
                        });
                    }
                }
            }
        }
        cells
    }
}

/// One grid-search cell: a vectorizer configuration plus a penalty.
#[derive(Debug, Clone)]
pub struct GridCell {
    pub vectorizer_config: VectorizerConfig,
    pub lambda: f64,
}

/// Stratified fold assignment, fixed once per (corpus, k, seed).
///
/// Per class (negative first, then positive, one SplitMix64 stream)
/// the document indices are shuffled and dealt into k contiguous
/// blocks; block sizes are `⌊n/k⌋` with the remainder spread starting
/// at a rotating fold offset, so overall fold sizes differ by at most
/// one and per-class counts differ by at most one.
#[derive(Debug, Clone)]
pub struct FoldAssignment {
    test_indices: Vec<Vec<usize>>,
}

impl FoldAssignment {
    pub fn k(&self) -> usize {
        self.test_indices.len()
    }

    pub fn test_indices(&self, fold: usize) -> &[usize] {
        &self.test_indices[fold]
    }

    pub fn fold_sizes(&self) -> Vec<usize> {
        self.test_indices.iter().map(Vec::len).collect()
    }

    /// Materialize (train, test) corpora for one fold; train keeps
    /// original corpus order.
    pub fn split_corpus(&self, corpus: &Corpus, fold: usize) -> (Corpus, Corpus) {
        let test = &self.test_indices[fold];
        let mut is_test = vec![false; corpus.len()];
        for &i in test {
            is_test[i] = true;
        }
        let train_docs: Vec<_> = corpus
            .documents
            .iter()
            .enumerate()
            .filter(|(i, _)| !is_test[*i])
            .map(|(_, d)| d.clone())
            .collect();
        let test_docs: Vec<_> = test.iter().map(|&i| corpus.documents[i].clone()).collect();
        (
            Corpus {
                documents: train_docs,
                provenance: corpus.provenance.clone(),
            },
            Corpus {
                documents: test_docs,
                provenance: corpus.provenance.clone(),
            },
        )
    }
}

/// Build the stratified fold assignment described on [`FoldAssignment`].
pub fn make_folds(corpus: &Corpus, k: usize, seed: u64) -> Result<FoldAssignment> {
    if k < 2 {
        return Err(Error::InvalidConfig(format!("k must be >= 2, got {k}")));
    }
    let mut rng = SplitMix64::new(seed);
    let mut folds: Vec<Vec<usize>> = vec![Vec::new(); k];
    let mut offset = 0usize;

    for class in [Label::NotDark, Label::Dark] {
        let mut indices: Vec<usize> = corpus
            .documents
            .iter()
            .enumerate()
            .filter(|(_, d)| d.label == class)
            .map(|(i, _)| i)
            .collect();
        if indices.len() < k {
            return Err(Error::ClassTooSmall {
                label: class.token(),
                count: indices.len(),
                needed: k,
            });
        }
        shuffle(&mut indices, &mut rng);

        let base = indices.len() / k;
        let remainder = indices.len() % k;
        let mut cursor = 0;
        for (fold, bucket) in folds.iter_mut().enumerate() {
            let extra = usize::from((fold + k - offset % k) % k < remainder);
            let size = base + extra;
            bucket.extend_from_slice(&indices[cursor..cursor + size]);
            cursor += size;
        }
        offset = (offset + remainder) % k;
    }

    for fold in &mut folds {
        fold.sort_unstable();
    }
    Ok(FoldAssignment { test_indices: folds })
}

/// Cross-validation outcome for one configuration.
#[derive(Debug, Clone)]
pub struct CvResult {
    pub per_fold: Vec<EvaluationReport>,
    pub mean_f1: f64,
    pub mean_accuracy: f64,
    /// Population standard deviation of the per-fold F1 values.
    pub std_f1: f64,
    pub vectorizer_config: VectorizerConfig,
    pub train_config: TrainConfig,
}

/// Stratified k-fold cross-validation with freshly built folds.
pub fn k_fold_cv(
    corpus: &Corpus,
    vectorizer_config: &VectorizerConfig,
    train_config: &TrainConfig,
    k: usize,
    seed: u64,
) -> Result<CvResult> {
    let folds = make_folds(corpus, k, seed)?;
    k_fold_cv_with(corpus, vectorizer_config, train_config, &folds)
}

/// Cross-validate on a pre-built fold assignment (shared by grid search
/// and sensitivity analysis). For each fold the vocabulary and idf are
/// fitted on the other k−1 folds only.
pub fn k_fold_cv_with(
    corpus: &Corpus,
    vectorizer_config: &VectorizerConfig,
    train_config: &TrainConfig,
    folds: &FoldAssignment,
) -> Result<CvResult> {
    vectorizer_config.validate()?;
    train_config.validate()?;

    let reports: Vec<Result<EvaluationReport>> = exec::map_indices(folds.k(), |fold| {
        let (train_corpus, test_corpus) = folds.split_corpus(corpus, fold);
        let vocab = fit_vocabulary(&train_corpus, vectorizer_config)?;
        let matrix = transform_corpus(&train_corpus, &vocab, vectorizer_config);
        let model = train(&matrix, &vocab, vectorizer_config, train_config)?;

        let ids: Vec<String> = test_corpus.documents.iter().map(|d| d.id.clone()).collect();
        let truths: Vec<Label> = test_corpus.documents.iter().map(|d| d.label).collect();
        let doc_scores = exec::map_slice(&test_corpus.documents, |doc| {
            let (vector, _) = transform_document(&doc.clean_text, &vocab, vectorizer_config);
            model.predict_proba(&vector)
        })
        .into_iter()
        .collect::<Result<Vec<f64>>>()?;
        evaluate(&ids, &truths, &doc_scores, train_config.threshold)
    });
    let per_fold = reports.into_iter().collect::<Result<Vec<_>>>()?;

    let k = per_fold.len() as f64;
    let mean_f1 = per_fold.iter().map(|r| r.scores.f1).sum::<f64>() / k;
    let mean_accuracy = per_fold.iter().map(|r| r.scores.accuracy).sum::<f64>() / k;
    let std_f1 = (per_fold
        .iter()
        .map(|r| (r.scores.f1 - mean_f1).powi(2))
        .sum::<f64>()
        / k)
        .sqrt();

    Ok(CvResult {
        per_fold,
        mean_f1,
        mean_accuracy,
        std_f1,
        vectorizer_config: vectorizer_config.clone(),
        train_config: train_config.clone(),
    })
}

/// Grid search outcome: every cell's cross-validation result plus the
/// index of the selected cell.
#[derive(Debug, Clone)]
pub struct GridSearchOutcome {
    pub best_index: usize,
    pub results: Vec<CvResult>,
}

impl GridSearchOutcome {
    pub fn best(&self) -> &CvResult {
        &self.results[self.best_index]
    }
}

fn cell_train_config(
    base: &TrainConfig,
    lambda: f64,
    weighting: Weighting,
    auto_lr: bool,
) -> TrainConfig {
    TrainConfig {
        lambda,
        learning_rate: if auto_lr {
            TrainConfig::default_learning_rate(weighting)
        } else {
            base.learning_rate
        },
        ..base.clone()
    }
}

/// Selection key: smaller is preferred when mean F1 ties.
/// Order: λ, then max_features (unlimited last), then n-gram range
/// width, then the range itself, then counts before tf-idf.
fn tie_key(cell_v: &VectorizerConfig, lambda: f64) -> (f64, u64, usize, usize, usize, u8) {
    (
        lambda,
        cell_v.max_features.map_or(u64::MAX, |v| v as u64),
        cell_v.ngram_max - cell_v.ngram_min,
        cell_v.ngram_min,
        cell_v.ngram_max,
        match cell_v.weighting {
            Weighting::Counts => 0,
            Weighting::Tfidf => 1,
        },
    )
}

fn tie_key_less(a: (f64, u64, usize, usize, usize, u8), b: (f64, u64, usize, usize, usize, u8)) -> bool {
    a.0.total_cmp(&b.0)
        .then(a.1.cmp(&b.1))
        .then(a.2.cmp(&b.2))
        .then(a.3.cmp(&b.3))
        .then(a.4.cmp(&b.4))
        .then(a.5.cmp(&b.5))
        .is_lt()
}

/// Evaluate every grid cell with k-fold cross-validation under one
/// shared fold assignment and select the cell with the highest mean F1.
pub fn grid_search(
    corpus: &Corpus,
    grid: &ParamGrid,
    min_df: usize,
    base: &TrainConfig,
    auto_lr: bool,
    k: usize,
    seed: u64,
) -> Result<GridSearchOutcome> {
    grid.validate()?;
    let folds = make_folds(corpus, k, seed)?;
    let cells = grid.cells(min_df);

    let results: Vec<Result<CvResult>> = exec::map_slice(&cells, |cell| {
        let tconfig = cell_train_config(base, cell.lambda, cell.vectorizer_config.weighting, auto_lr);
        k_fold_cv_with(corpus, &cell.vectorizer_config, &tconfig, &folds).map_err(|e| {
            Error::InvalidConfig(format!(
                "grid cell (lambda={}, ngram={}-{}, max_features={}, weighting={}) failed: {e}",
                cell.lambda,
                cell.vectorizer_config.ngram_min,
                cell.vectorizer_config.ngram_max,
                cell.vectorizer_config
                    .max_features
                    .map_or("all".to_string(), |v| v.to_string()),
                cell.vectorizer_config.weighting.name(),
            ))
        })
    });
    let results = results.into_iter().collect::<Result<Vec<CvResult>>>()?;

    let mut best_index = 0;
    for (i, result) in results.iter().enumerate().skip(1) {
        let best = &results[best_index];
        let better = result.mean_f1 > best.mean_f1
            || (result.mean_f1 == best.mean_f1
                && tie_key_less(
                    tie_key(&result.vectorizer_config, result.train_config.lambda),
                    tie_key(&best.vectorizer_config, best.train_config.lambda),
                ));
        if better {
            best_index = i;
        }
    }

    Ok(GridSearchOutcome {
        best_index,
        results,
    })
}

/// A vocabulary term with its learned coefficient.
#[derive(Debug, Clone, PartialEq)]
pub struct ImportanceEntry {
    pub term: String,
    /// Signed weight; positive pushes toward the dark class.
    pub coefficient: f64,
}

/// The `top_k` terms ranked by coefficient magnitude (ties broken by
/// term, ascending). Deterministic; no randomness involved.
pub fn feature_importance(model: &TrainedModel, top_k: usize) -> Vec<ImportanceEntry> {
    let mut entries: Vec<ImportanceEntry> = model
        .vocab()
        .terms()
        .iter()
        .zip(model.weights())
        .map(|(term, &coefficient)| ImportanceEntry {
            term: term.clone(),
            coefficient,
        })
        .collect();
    entries.sort_by(|a, b| {
        b.coefficient
            .abs()
            .total_cmp(&a.coefficient.abs())
            .then_with(|| a.term.cmp(&b.term))
    });
    entries.truncate(top_k);
    entries
}

/// Export feature importances as CSV `term,coefficient`.
pub fn feature_importance_csv<W: Write>(entries: &[ImportanceEntry], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| Error::MalformedRow {
        row: 0,
        message: e.to_string(),
    };
    w.write_record(["term", "coefficient"]).map_err(err)?;
    for entry in entries {
        w.write_record([entry.term.as_str(), &entry.coefficient.to_string()])
            .map_err(err)?;
    }
    w.flush().map_err(|e| Error::MalformedRow {
        row: 0,
        message: e.to_string(),
    })?;
    Ok(())
}

/// One misclassified document with the evidence behind the mistake.
#[derive(Debug, Clone)]
pub struct MisclassifiedDocument {
    pub id: String,
    pub text: String,
    pub true_label: Label,
    pub score: f64,
    pub predicted: Label,
    /// Top feature contributions `weight × coefficient`, strongest
    /// magnitude first, at most five.
    pub contributions: Vec<(String, f64)>,
    /// Distinct out-of-vocabulary n-grams the transform dropped.
    pub oov_terms: usize,
}

/// List every misclassified document of a preprocessed test corpus,
/// most confident mistakes (largest |score − threshold|) first.
pub fn misclassification_report(
    model: &TrainedModel,
    test: &Corpus,
) -> Result<Vec<MisclassifiedDocument>> {
    let threshold = model.train_config().threshold;
    let vconfig = model.vectorizer_config();
    let mut rows = Vec::new();
    for doc in &test.documents {
        let (vector, diag) = transform_document(&doc.clean_text, model.vocab(), vconfig);
        let score = model.predict_proba(&vector)?;
        let predicted = if score >= threshold { Label::Dark } else { Label::NotDark };
        if predicted == doc.label {
            continue;
        }
        let mut contributions: Vec<(String, f64)> = vector
            .entries()
            .iter()
            .map(|&(i, w)| (model.vocab().terms()[i].clone(), w * model.weights()[i]))
            .collect();
        contributions.sort_by(|a, b| b.1.abs().total_cmp(&a.1.abs()).then_with(|| a.0.cmp(&b.0)));
        contributions.truncate(5);
        rows.push(MisclassifiedDocument {
            id: doc.id.clone(),
            text: doc.raw_text.clone(),
            true_label: doc.label,
            score,
            predicted,
            contributions,
            oov_terms: diag.oov_terms,
        });
    }
    rows.sort_by(|a, b| {
        (b.score - threshold)
            .abs()
            .total_cmp(&(a.score - threshold).abs())
    });
    Ok(rows)
}

/// Export the misclassification report as CSV; the `contributions`
/// column holds `term:weight` pairs separated by `;`.
pub fn misclassification_csv<W: Write>(rows: &[MisclassifiedDocument], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| Error::MalformedRow {
        row: 0,
        message: e.to_string(),
    };
    w.write_record([
        "id",
        "text",
        "true_label",
        "score",
        "predicted_label",
        "contributions",
        "oov_terms",
    ])
    .map_err(err)?;
    for row in rows {
        let contributions = row
            .contributions
            .iter()
            .map(|(term, weight)| format!("{term}:{weight}"))
            .collect::<Vec<_>>()
            .join(";");
        w.write_record([
            row.id.as_str(),
            row.text.as_str(),
            row.true_label.token(),
            &row.score.to_string(),
            row.predicted.token(),
            &contributions,
            &row.oov_terms.to_string(),
        ])
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::MalformedRow {
        row: 0,
        message: e.to_string(),
    })?;
    Ok(())
}

/// One evaluated point of a sensitivity sweep.
#[derive(Debug, Clone)]
pub struct SensitivityRow {
    pub axis: &'static str,
    pub value: String,
    pub vectorizer_config: VectorizerConfig,
    pub train_config: TrainConfig,
    pub preprocess: PreprocessOptions,
    pub mean_accuracy: f64,
    pub mean_f1: f64,
    pub std_f1: f64,
}

/// One-at-a-time sensitivity sweeps.
///
/// Each axis of `axes` is varied while everything else stays at the
/// fixed configuration; every point is cross-validated on one shared
/// fold assignment. A fifth pinned axis sweeps the preprocessing
/// toggles (HTML stripping and lowercasing on/off, all four
/// combinations, re-cleaning the corpus from raw text). Output rows are
/// ordered by (axis name, value).
pub fn sensitivity_analysis(
    corpus: &Corpus,
    axes: &ParamGrid,
    fixed_vectorizer: &VectorizerConfig,
    base: &TrainConfig,
    auto_lr: bool,
    k: usize,
    seed: u64,
) -> Result<Vec<SensitivityRow>> {
    axes.validate()?;
    fixed_vectorizer.validate()?;
    let folds = make_folds(corpus, k, seed)?;
    let mut rows = Vec::new();

    let run = |vconfig: &VectorizerConfig,
               lambda: f64,
               working: &Corpus,
               axis: &'static str,
               value: String,
               preprocess: PreprocessOptions|
     -> Result<SensitivityRow> {
        let tconfig = cell_train_config(base, lambda, vconfig.weighting, auto_lr);
        let cv = k_fold_cv_with(working, vconfig, &tconfig, &folds).map_err(|e| {
            Error::InvalidConfig(format!("sensitivity point {axis}={value} failed: {e}"))
        })?;
        Ok(SensitivityRow {
            axis,
            value,
            vectorizer_config: vconfig.clone(),
            train_config: tconfig,
            preprocess,
            mean_accuracy: cv.mean_accuracy,
            mean_f1: cv.mean_f1,
            std_f1: cv.std_f1,
        })
    };
    let defaults = PreprocessOptions::default();

    let mut lambdas = axes.lambdas.clone();
    lambdas.sort_by(f64::total_cmp);
    for lambda in lambdas {
        rows.push(run(
            fixed_vectorizer,
            lambda,
            corpus,
            "lambda",
            lambda.to_string(),
            defaults,
        )?);
    }

    let mut max_features = axes.max_features_options.clone();
    max_features.sort_by_key(|v| v.map_or(u64::MAX, |x| x as u64));
    for option in max_features {
        let vconfig = VectorizerConfig {
            max_features: option,
            ..fixed_vectorizer.clone()
        };
        let value = option.map_or("all".to_string(), |v| v.to_string());
        rows.push(run(&vconfig, base.lambda, corpus, "max_features", value, defaults)?);
    }

    let mut ranges = axes.ngram_ranges.clone();
    ranges.sort_unstable();
    for (ngram_min, ngram_max) in ranges {
        let vconfig = VectorizerConfig {
            ngram_min,
            ngram_max,
            ..fixed_vectorizer.clone()
        };
        let value = format!("{ngram_min}-{ngram_max}");
        rows.push(run(&vconfig, base.lambda, corpus, "ngram", value, defaults)?);
    }

    let mut variants: Vec<PreprocessOptions> = [
        (true, true),
        (true, false),
        (false, true),
        (false, false),
    ]
    .iter()
    .map(|&(strip_html, lowercase)| PreprocessOptions {
        strip_html,
        lowercase,
    })
    .collect();
    variants.sort_by_key(PreprocessOptions::label);
    for options in variants {
        let mut working = corpus.clone();
        working.preprocess_with(&options);
        rows.push(run(
            fixed_vectorizer,
            base.lambda,
            &working,
            "preprocess",
            options.label(),
            options,
        )?);
    }

    let mut weightings = axes.weightings.clone();
    weightings.sort_by_key(|w| w.name());
    weightings.dedup();
    for weighting in weightings {
        let vconfig = VectorizerConfig {
            weighting,
            ..fixed_vectorizer.clone()
        };
        rows.push(run(
            &vconfig,
            base.lambda,
            corpus,
            "weighting",
            weighting.name().to_string(),
            defaults,
        )?);
    }

    Ok(rows)
}

fn results_csv_record(
    axis: &str,
    value: &str,
    vconfig: &VectorizerConfig,
    lambda: f64,
    mean_accuracy: f64,
    mean_f1: f64,
    std_f1: f64,
) -> Vec<String> {
    vec![
        axis.to_string(),
        value.to_string(),
        lambda.to_string(),
        format!("{}-{}", vconfig.ngram_min, vconfig.ngram_max),
        vconfig.max_features.map_or("all".to_string(), |v| v.to_string()),
        vconfig.weighting.name().to_string(),
        mean_accuracy.to_string(),
        mean_f1.to_string(),
        std_f1.to_string(),
    ]
}

const RESULTS_CSV_HEADER: [&str; 9] = [
    "axis",
    "value",
    "lambda",
    "ngram",
    "max_features",
    "weighting",
    "mean_accuracy",
    "mean_f1",
    "std_f1",
];

/// Export grid-search results: one `grid` row per cell in enumeration
/// order, then a `best` row repeating the selected cell.
pub fn grid_results_csv<W: Write>(outcome: &GridSearchOutcome, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| Error::MalformedRow {
        row: 0,
        message: e.to_string(),
    };
    w.write_record(RESULTS_CSV_HEADER).map_err(err)?;
    for (i, result) in outcome.results.iter().enumerate() {
        w.write_record(results_csv_record(
            "grid",
            &i.to_string(),
            &result.vectorizer_config,
            result.train_config.lambda,
            result.mean_accuracy,
            result.mean_f1,
            result.std_f1,
        ))
        .map_err(err)?;
    }
    let best = outcome.best();
    w.write_record(results_csv_record(
        "best",
        &outcome.best_index.to_string(),
        &best.vectorizer_config,
        best.train_config.lambda,
        best.mean_accuracy,
        best.mean_f1,
        best.std_f1,
    ))
    .map_err(err)?;
    w.flush().map_err(|e| Error::MalformedRow {
        row: 0,
        message: e.to_string(),
    })?;
    Ok(())
}

/// Export per-fold metrics plus mean and population-std summary rows:
/// CSV `fold,accuracy,precision,recall,f1,auc`.
pub fn cv_results_csv<W: Write>(cv: &CvResult, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| Error::MalformedRow {
        row: 0,
        message: e.to_string(),
    };
    w.write_record(["fold", "accuracy", "precision", "recall", "f1", "auc"])
        .map_err(err)?;
    let mut columns: Vec<Vec<f64>> = vec![Vec::new(); 5];
    for (i, report) in cv.per_fold.iter().enumerate() {
        let values = [
            report.scores.accuracy,
            report.scores.precision,
            report.scores.recall,
            report.scores.f1,
            report.auc,
        ];
        for (column, value) in columns.iter_mut().zip(values) {
            column.push(value);
        }
        let mut record = vec![i.to_string()];
        record.extend(values.iter().map(|v| v.to_string()));
        w.write_record(&record).map_err(err)?;
    }
    let k = cv.per_fold.len() as f64;
    let means: Vec<f64> = columns.iter().map(|c| c.iter().sum::<f64>() / k).collect();
    let stds: Vec<f64> = columns
        .iter()
        .zip(&means)
        .map(|(c, m)| (c.iter().map(|v| (v - m).powi(2)).sum::<f64>() / k).sqrt())
        .collect();
    let mut record = vec!["mean".to_string()];
    record.extend(means.iter().map(|v| v.to_string()));
    w.write_record(&record).map_err(err)?;
    let mut record = vec!["std".to_string()];
    record.extend(stds.iter().map(|v| v.to_string()));
    w.write_record(&record).map_err(err)?;
    w.flush().map_err(|e| Error::MalformedRow {
        row: 0,
        message: e.to_string(),
    })?;
    Ok(())
}

/// Export sensitivity rows in their (axis, value) order.
pub fn sensitivity_csv<W: Write>(rows: &[SensitivityRow], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let err = |e: csv::Error| Error::MalformedRow {
        row: 0,
        message: e.to_string(),
    };
    w.write_record(RESULTS_CSV_HEADER).map_err(err)?;
    for row in rows {
        w.write_record(results_csv_record(
            row.axis,
            &row.value,
            &row.vectorizer_config,
            row.train_config.lambda,
            row.mean_accuracy,
            row.mean_f1,
            row.std_f1,
        ))
        .map_err(err)?;
    }
    w.flush().map_err(|e| Error::MalformedRow {
        row: 0,
        message: e.to_string(),
    })?;
    Ok(())
}
