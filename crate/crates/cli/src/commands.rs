//! Subcommand definitions and implementations.
//!
//! Exit-code contract: 0 success, 1 pipeline/validation error, 2 I/O or
//! argument error. All output files are UTF-8 with LF line endings;
//! identical inputs, flags, and seed reproduce identical bytes.

use std::io::Read;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use darkdetect::corpus::{load_corpus, split, Corpus, DatasetFormat, SplitSpec};
use darkdetect::experiments::{
    cv_results_csv, feature_importance, feature_importance_csv, grid_results_csv, grid_search,
    k_fold_cv, misclassification_csv, misclassification_report, sensitivity_analysis,
    sensitivity_csv, ParamGrid,
};
use darkdetect::metrics::evaluate;
use darkdetect::model::{train, TrainConfig, TrainedModel};
use darkdetect::vectorizer::{fit_vocabulary, transform_corpus, VectorizerConfig, Weighting};

use crate::error::CliError;
use crate::manifest::ManifestRecorder;

#[derive(Debug, Parser)]
#[command(
    name = "darkdetect",
    version,
    about = "Detect dark-pattern text in user interfaces with a bag-of-words logistic regression"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a model on the train portion of a labeled dataset
    Train(TrainCmd),
    /// Evaluate a saved model and write the report CSVs
    Evaluate(EvaluateCmd),
    /// Score text from an argument or stdin, one `score<TAB>label` per line
    Predict(PredictCmd),
    /// Stratified k-fold cross-validation of one configuration
    Cv(CvCmd),
    /// Exhaustive grid search over hyperparameter axes
    Gridsearch(GridSearchCmd),
    /// Feature importance, misclassification, and sensitivity reports
    Report(ReportCmd),
}

pub fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Train(opts) => run_train(opts),
        Command::Evaluate(opts) => run_evaluate(opts),
        Command::Predict(opts) => run_predict(opts),
        Command::Cv(opts) => run_cv(opts),
        Command::Gridsearch(opts) => run_gridsearch(opts),
        Command::Report(opts) => run_report(opts),
    }
}

fn parse_weighting(s: &str) -> Result<Weighting, String> {
    Weighting::from_name(s).ok_or_else(|| format!("expected `counts` or `tfidf`, got {s:?}"))
}

fn parse_ngram_range(s: &str) -> Result<NgramRange, String> {
    let (lo, hi) = s
        .split_once('-')
        .ok_or_else(|| format!("expected `MIN-MAX`, got {s:?}"))?;
    let lo: usize = lo.trim().parse().map_err(|_| format!("bad n-gram bound {lo:?}"))?;
    let hi: usize = hi.trim().parse().map_err(|_| format!("bad n-gram bound {hi:?}"))?;
    if lo < 1 || hi < lo {
        return Err(format!("invalid n-gram range {s:?}"));
    }
    Ok(NgramRange(lo, hi))
}

fn parse_max_features(s: &str) -> Result<MaxFeaturesArg, String> {
    match s.trim() {
        "all" | "none" => Ok(MaxFeaturesArg(None)),
        v => v
            .parse::<usize>()
            .map(|n| MaxFeaturesArg(Some(n)))
            .map_err(|_| format!("expected a count or `all`, got {s:?}")),
    }
}

#[derive(Debug, Clone, Copy, Serialize)]
pub struct NgramRange(pub usize, pub usize);

#[derive(Debug, Clone, Copy)]
pub struct MaxFeaturesArg(pub Option<usize>);

impl Serialize for MaxFeaturesArg {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(serializer)
    }
}

/// Flags mirroring `VectorizerConfig`.
#[derive(Debug, Clone, Args, Serialize)]
pub struct VectorizerOpts {
    #[arg(long, default_value_t = 1)]
    pub ngram_min: usize,
    #[arg(long, default_value_t = 2)]
    pub ngram_max: usize,
    /// Vocabulary size cap; omit to keep every term
    #[arg(long)]
    pub max_features: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub min_df: usize,
    #[arg(long, default_value = "tfidf", value_parser = parse_weighting)]
    pub weighting: Weighting,
}

impl VectorizerOpts {
    fn to_config(&self) -> VectorizerConfig {
        VectorizerConfig {
            ngram_min: self.ngram_min,
            ngram_max: self.ngram_max,
            max_features: self.max_features,
            min_df: self.min_df,
            weighting: self.weighting,
        }
    }
}

/// Trainer flags shared by every training-like command.
#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainerBaseOpts {
    /// Learning rate; defaults to 0.1 for tf-idf, 0.01 for counts
    #[arg(long = "lr")]
    pub learning_rate: Option<f64>,
    #[arg(long, default_value_t = 5000)]
    pub max_iters: usize,
    #[arg(long, default_value_t = 1e-7)]
    pub tol: f64,
    #[arg(long, default_value_t = 0.5)]
    pub threshold: f64,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct TrainerOpts {
    #[command(flatten)]
    pub base: TrainerBaseOpts,
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,
}

impl TrainerOpts {
    fn to_config(&self, weighting: Weighting, seed: u64) -> TrainConfig {
        TrainConfig {
            lambda: self.lambda,
            learning_rate: self
                .base
                .learning_rate
                .unwrap_or_else(|| TrainConfig::default_learning_rate(weighting)),
            max_iters: self.base.max_iters,
            tol: self.base.tol,
            threshold: self.base.threshold,
            seed,
        }
    }
}

impl TrainerBaseOpts {
    fn to_config(&self, lambda: f64, weighting: Weighting, seed: u64) -> TrainConfig {
        TrainConfig {
            lambda,
            learning_rate: self
                .learning_rate
                .unwrap_or_else(|| TrainConfig::default_learning_rate(weighting)),
            max_iters: self.max_iters,
            tol: self.tol,
            threshold: self.threshold,
            seed,
        }
    }
}

/// Flags mirroring `SplitSpec` (the seed flag is shared separately).
#[derive(Debug, Clone, Args, Serialize)]
pub struct SplitOpts {
    #[arg(long, default_value_t = 0.8)]
    pub train_fraction: f64,
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    pub stratified: bool,
}

impl SplitOpts {
    fn to_spec(&self, seed: u64) -> SplitSpec {
        SplitSpec {
            train_fraction: self.train_fraction,
            seed,
            stratified: self.stratified,
        }
    }
}

/// Which side of the train/test split a command operates on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SplitSide {
    All,
    Train,
    Test,
}

fn select_side(
    corpus: Corpus,
    side: SplitSide,
    split_opts: &SplitOpts,
    seed: u64,
) -> Result<Corpus, CliError> {
    Ok(match side {
        SplitSide::All => corpus,
        SplitSide::Train => split(&corpus, &split_opts.to_spec(seed))?.0,
        SplitSide::Test => split(&corpus, &split_opts.to_spec(seed))?.1,
    })
}

fn load_preprocessed(path: &Path) -> Result<Corpus, CliError> {
    let mut corpus = load_corpus(path, DatasetFormat::Csv)?;
    corpus.preprocess();
    Ok(corpus)
}

fn ensure_outdir(path: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn write_artifact(
    path: &Path,
    emit: impl FnOnce(&mut Vec<u8>) -> darkdetect::Result<()>,
) -> Result<(), CliError> {
    let mut buffer = Vec::new();
    emit(&mut buffer)?;
    std::fs::write(path, &buffer).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })
}

fn config_json<T: Serialize>(opts: &T) -> serde_json::Value {
    serde_json::to_value(opts).expect("options serialize cleanly")
}

// ---------------------------------------------------------------- train

#[derive(Debug, Args, Serialize)]
pub struct TrainCmd {
    /// Labeled dataset CSV (`text,label`)
    #[arg(long)]
    pub data: PathBuf,
    /// Where to write the model JSON
    #[arg(long)]
    pub output: PathBuf,
    #[command(flatten)]
    pub vectorizer: VectorizerOpts,
    #[command(flatten)]
    pub trainer: TrainerOpts,
    #[command(flatten)]
    pub split: SplitOpts,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Manifest path (default: `<output>.manifest.json`)
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Free-form note recorded in the manifest (repeatable)
    #[arg(long)]
    pub note: Vec<String>,
}

pub fn run_train(opts: &TrainCmd) -> Result<(), CliError> {
    let mut recorder = ManifestRecorder::new("train", config_json(opts), opts.seed);
    recorder.record_input(&opts.data)?;
    recorder.add_notes(&opts.note);

    let corpus = load_preprocessed(&opts.data)?;
    let (positive, negative) = corpus.class_counts();
    println!(
        "documents={} positive={positive} negative={negative} avg_words={:.2}",
        corpus.len(),
        corpus.average_word_count()
    );

    let (train_corpus, _held_out) = split(&corpus, &opts.split.to_spec(opts.seed))?;
    let vconfig = opts.vectorizer.to_config();
    let vocab = fit_vocabulary(&train_corpus, &vconfig)?;
    let tconfig = opts.trainer.to_config(vconfig.weighting, opts.seed);
    let matrix = transform_corpus(&train_corpus, &vocab, &vconfig);
    let model = train(&matrix, &vocab, &vconfig, &tconfig)?;
    model.save(&opts.output)?;

    let final_loss = model.training_log().last().copied().unwrap_or(f64::NAN);
    println!(
        "final_loss={final_loss} iterations={} vocabulary={}",
        model.training_log().len(),
        vocab.len()
    );
    println!("model={}", opts.output.display());

    recorder.record_output(&opts.output)?;
    let manifest_path = opts
        .manifest
        .clone()
        .unwrap_or_else(|| PathBuf::from(format!("{}.manifest.json", opts.output.display())));
    recorder.write(Some(&manifest_path))
}

// ------------------------------------------------------------- evaluate

#[derive(Debug, Args, Serialize)]
pub struct EvaluateCmd {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    /// Directory for the report files
    #[arg(long)]
    pub outdir: PathBuf,
    /// Evaluate the whole dataset or one side of the split
    #[arg(long, value_enum, default_value_t = SplitSide::All)]
    pub split: SplitSide,
    #[command(flatten)]
    pub split_opts: SplitOpts,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub note: Vec<String>,
}

pub fn run_evaluate(opts: &EvaluateCmd) -> Result<(), CliError> {
    let mut recorder = ManifestRecorder::new("evaluate", config_json(opts), opts.seed);
    recorder.record_input(&opts.model)?;
    recorder.record_input(&opts.data)?;
    recorder.add_notes(&opts.note);

    let model = TrainedModel::load(&opts.model)?;
    let corpus = load_preprocessed(&opts.data)?;
    let corpus = select_side(corpus, opts.split, &opts.split_opts, opts.seed)?;
    if corpus.is_empty() {
        return Err(darkdetect::Error::EmptyDataset.into());
    }

    let ids: Vec<String> = corpus.documents.iter().map(|d| d.id.clone()).collect();
    let truths: Vec<_> = corpus.documents.iter().map(|d| d.label).collect();
    let doc_scores = model.score_corpus(&corpus)?;
    let report = evaluate(&ids, &truths, &doc_scores, model.train_config().threshold)?;

    ensure_outdir(&opts.outdir)?;
    let summary_path = opts.outdir.join("metrics.txt");
    std::fs::write(&summary_path, report.summary_text()).map_err(|source| CliError::Io {
        path: summary_path.clone(),
        source,
    })?;
    let metrics_path = opts.outdir.join("metrics.csv");
    write_artifact(&metrics_path, |w| report.metrics_csv(w))?;
    let confusion_path = opts.outdir.join("confusion_matrix.csv");
    write_artifact(&confusion_path, |w| report.confusion.export_csv(w))?;
    let roc_path = opts.outdir.join("roc_curve.csv");
    write_artifact(&roc_path, |w| report.roc.export_csv(w))?;
    let predictions_path = opts.outdir.join("predictions.csv");
    write_artifact(&predictions_path, |w| report.predictions_csv(w))?;

    print!("{}", report.summary_text());

    for path in [
        &summary_path,
        &metrics_path,
        &confusion_path,
        &roc_path,
        &predictions_path,
    ] {
        recorder.record_output(path)?;
    }
    let manifest_path = opts
        .manifest
        .clone()
        .unwrap_or_else(|| opts.outdir.join("manifest.json"));
    recorder.write(Some(&manifest_path))
}

// -------------------------------------------------------------- predict

#[derive(Debug, Args, Serialize)]
pub struct PredictCmd {
    #[arg(long)]
    pub model: PathBuf,
    /// Text to score; omit to read newline-delimited text from stdin
    pub text: Option<String>,
    /// Manifest path; without it the manifest goes to stderr
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub note: Vec<String>,
}

pub fn run_predict(opts: &PredictCmd) -> Result<(), CliError> {
    let mut recorder = ManifestRecorder::new("predict", config_json(opts), 0);
    recorder.record_input(&opts.model)?;
    recorder.add_notes(&opts.note);

    let model = TrainedModel::load(&opts.model)?;
    let vconfig = model.vectorizer_config();
    let threshold = model.train_config().threshold;

    let stdin_buffer;
    let lines: Vec<&str> = match &opts.text {
        Some(text) => vec![text.as_str()],
        None => {
            let mut buffer = String::new();
            std::io::stdin()
                .read_to_string(&mut buffer)
                .map_err(|source| CliError::Io {
                    path: PathBuf::from("<stdin>"),
                    source,
                })?;
            stdin_buffer = buffer;
            stdin_buffer.lines().collect()
        }
    };

    for line in lines {
        let clean = darkdetect::corpus::preprocess(line);
        let (vector, _) =
            darkdetect::vectorizer::transform_document(&clean, model.vocab(), vconfig);
        let score = model.predict_proba(&vector)?;
        let label = if score >= threshold {
            darkdetect::corpus::Label::Dark
        } else {
            darkdetect::corpus::Label::NotDark
        };
        println!("{score}\t{}", label.token());
    }

    recorder.write(opts.manifest.as_deref())
}

// ------------------------------------------------------------------- cv

#[derive(Debug, Args, Serialize)]
pub struct CvCmd {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub outdir: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    #[command(flatten)]
    pub vectorizer: VectorizerOpts,
    #[command(flatten)]
    pub trainer: TrainerOpts,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub note: Vec<String>,
}

pub fn run_cv(opts: &CvCmd) -> Result<(), CliError> {
    let mut recorder = ManifestRecorder::new("cv", config_json(opts), opts.seed);
    recorder.record_input(&opts.data)?;
    recorder.add_notes(&opts.note);

    let corpus = load_preprocessed(&opts.data)?;
    let vconfig = opts.vectorizer.to_config();
    let tconfig = opts.trainer.to_config(vconfig.weighting, opts.seed);
    let cv = k_fold_cv(&corpus, &vconfig, &tconfig, opts.folds, opts.seed)?;

    ensure_outdir(&opts.outdir)?;
    let results_path = opts.outdir.join("cv_results.csv");
    write_artifact(&results_path, |w| cv_results_csv(&cv, w))?;

    println!(
        "folds={} mean_accuracy={} mean_f1={} std_f1={}",
        cv.per_fold.len(),
        cv.mean_accuracy,
        cv.mean_f1,
        cv.std_f1
    );

    recorder.record_output(&results_path)?;
    let manifest_path = opts
        .manifest
        .clone()
        .unwrap_or_else(|| opts.outdir.join("manifest.json"));
    recorder.write(Some(&manifest_path))
}

// ----------------------------------------------------------- gridsearch

#[derive(Debug, Args, Serialize)]
pub struct GridSearchCmd {
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub outdir: PathBuf,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Penalty axis, comma-separated
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.1, 1.0, 10.0])]
    pub lambdas: Vec<f64>,
    /// N-gram range axis, e.g. `1-1,1-2`
    #[arg(long, value_delimiter = ',', default_value = "1-2", value_parser = parse_ngram_range)]
    pub ngram_ranges: Vec<NgramRange>,
    /// Vocabulary cap axis; counts or `all`
    #[arg(long, value_delimiter = ',', default_value = "all", value_parser = parse_max_features)]
    pub max_features_options: Vec<MaxFeaturesArg>,
    /// Weighting axis: `counts` and/or `tfidf`
    #[arg(long, value_delimiter = ',', default_value = "tfidf", value_parser = parse_weighting)]
    pub weightings: Vec<Weighting>,
    #[arg(long, default_value_t = 1)]
    pub min_df: usize,
    #[command(flatten)]
    pub trainer: TrainerBaseOpts,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub note: Vec<String>,
}

impl GridSearchCmd {
    fn grid(&self) -> ParamGrid {
        ParamGrid {
            lambdas: self.lambdas.clone(),
            ngram_ranges: self.ngram_ranges.iter().map(|r| (r.0, r.1)).collect(),
            max_features_options: self.max_features_options.iter().map(|m| m.0).collect(),
            weightings: self.weightings.clone(),
        }
    }
}

pub fn run_gridsearch(opts: &GridSearchCmd) -> Result<(), CliError> {
    let mut recorder = ManifestRecorder::new("gridsearch", config_json(opts), opts.seed);
    recorder.record_input(&opts.data)?;
    recorder.add_notes(&opts.note);

    let corpus = load_preprocessed(&opts.data)?;
    let grid = opts.grid();
    // base lambda is irrelevant: every cell overrides it from the axis
    let base = opts.trainer.to_config(1.0, Weighting::Tfidf, opts.seed);
    let auto_lr = opts.trainer.learning_rate.is_none();
    let outcome = grid_search(
        &corpus,
        &grid,
        opts.min_df,
        &base,
        auto_lr,
        opts.folds,
        opts.seed,
    )?;

    ensure_outdir(&opts.outdir)?;
    let results_path = opts.outdir.join("grid_results.csv");
    write_artifact(&results_path, |w| grid_results_csv(&outcome, w))?;

    let best = outcome.best();
    println!(
        "cells={} best_index={} lambda={} ngram={}-{} max_features={} weighting={} mean_f1={}",
        outcome.results.len(),
        outcome.best_index,
        best.train_config.lambda,
        best.vectorizer_config.ngram_min,
        best.vectorizer_config.ngram_max,
        best.vectorizer_config
            .max_features
            .map_or("all".to_string(), |v| v.to_string()),
        best.vectorizer_config.weighting.name(),
        best.mean_f1
    );

    recorder.record_output(&results_path)?;
    let manifest_path = opts
        .manifest
        .clone()
        .unwrap_or_else(|| opts.outdir.join("manifest.json"));
    recorder.write(Some(&manifest_path))
}

// --------------------------------------------------------------- report

#[derive(Debug, Args, Serialize)]
pub struct ReportCmd {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub data: PathBuf,
    #[arg(long)]
    pub outdir: PathBuf,
    /// How many terms the feature-importance table keeps
    #[arg(long, default_value_t = 20)]
    pub top_k: usize,
    /// Which side of the split feeds the misclassification report
    #[arg(long, value_enum, default_value_t = SplitSide::All)]
    pub split: SplitSide,
    #[command(flatten)]
    pub split_opts: SplitOpts,
    #[arg(long, default_value_t = 5)]
    pub folds: usize,
    /// Sensitivity axis: penalties
    #[arg(long, value_delimiter = ',', default_values_t = [0.01, 0.1, 1.0, 10.0])]
    pub lambdas: Vec<f64>,
    /// Sensitivity axis: n-gram ranges
    #[arg(long, value_delimiter = ',', default_value = "1-1,1-2", value_parser = parse_ngram_range)]
    pub ngram_ranges: Vec<NgramRange>,
    /// Sensitivity axis: vocabulary caps
    #[arg(long, value_delimiter = ',', default_value = "100,1000,all", value_parser = parse_max_features)]
    pub max_features_options: Vec<MaxFeaturesArg>,
    /// Sensitivity axis: weightings
    #[arg(long, value_delimiter = ',', default_value = "counts,tfidf", value_parser = parse_weighting)]
    pub weightings: Vec<Weighting>,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    #[arg(long)]
    pub note: Vec<String>,
}

pub fn run_report(opts: &ReportCmd) -> Result<(), CliError> {
    let mut recorder = ManifestRecorder::new("report", config_json(opts), opts.seed);
    recorder.record_input(&opts.model)?;
    recorder.record_input(&opts.data)?;
    recorder.add_notes(&opts.note);

    let model = TrainedModel::load(&opts.model)?;
    let corpus = load_preprocessed(&opts.data)?;
    let side_corpus = select_side(corpus.clone(), opts.split, &opts.split_opts, opts.seed)?;

    ensure_outdir(&opts.outdir)?;

    let importance = feature_importance(&model, opts.top_k);
    let importance_path = opts.outdir.join("feature_importance.csv");
    write_artifact(&importance_path, |w| feature_importance_csv(&importance, w))?;

    let vocabulary_path = opts.outdir.join("vocabulary.csv");
    write_artifact(&vocabulary_path, |w| model.vocab().export_csv(w))?;

    let misclassified = misclassification_report(&model, &side_corpus)?;
    let misclassified_path = opts.outdir.join("misclassifications.csv");
    write_artifact(&misclassified_path, |w| {
        misclassification_csv(&misclassified, w)
    })?;

    let axes = ParamGrid {
        lambdas: opts.lambdas.clone(),
        ngram_ranges: opts.ngram_ranges.iter().map(|r| (r.0, r.1)).collect(),
        max_features_options: opts.max_features_options.iter().map(|m| m.0).collect(),
        weightings: opts.weightings.clone(),
    };
    let rows = sensitivity_analysis(
        &corpus,
        &axes,
        model.vectorizer_config(),
        model.train_config(),
        true,
        opts.folds,
        opts.seed,
    )?;
    let sensitivity_path = opts.outdir.join("sensitivity.csv");
    write_artifact(&sensitivity_path, |w| sensitivity_csv(&rows, w))?;

    println!(
        "feature_importance={} misclassifications={} sensitivity_points={}",
        importance.len(),
        misclassified.len(),
        rows.len()
    );

    for path in [
        &importance_path,
        &vocabulary_path,
        &misclassified_path,
        &sensitivity_path,
    ] {
        recorder.record_output(path)?;
    }
    let manifest_path = opts
        .manifest
        .clone()
        .unwrap_or_else(|| opts.outdir.join("manifest.json"));
    recorder.write(Some(&manifest_path))
}
