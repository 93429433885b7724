//! L2-regularized binary logistic regression.
//!
//! The trainer is full-batch gradient descent with a fixed learning rate
//! and a loss-delta stopping rule, initialized at zero. Row sums run
//! over fixed-size chunks combined in chunk order, so results are
//! bit-identical whether the parallel lane is enabled or not.

use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::corpus::Label;
use crate::error::{Error, Result};
use crate::exec;
use crate::vectorizer::{FeatureMatrix, FeatureVector, VectorizerConfig, Vocabulary, Weighting};

pub const MODEL_FORMAT_VERSION: u64 = 1;

/// Trainer settings.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TrainConfig {
    /// L2 penalty strength; the bias is never penalized.
    pub lambda: f64,
    pub learning_rate: f64,
    pub max_iters: usize,
    /// Stop when the loss improves by less than this between iterations.
    pub tol: f64,
    /// Decision cutoff: predict positive iff probability ≥ threshold.
    pub threshold: f64,
    /// Reserved; training is deterministic and draws no randomness.
    pub seed: u64,
}

impl TrainConfig {
    /// Library defaults. The learning rate depends on the weighting:
    /// 0.1 suits unit-normalized tf-idf rows, 0.01 raw counts.
    pub fn defaults_for(weighting: Weighting) -> TrainConfig {
        TrainConfig {
            lambda: 1.0,
            learning_rate: Self::default_learning_rate(weighting),
            max_iters: 5000,
            tol: 1e-7,
            threshold: 0.5,
            seed: 0,
        }
    }

    pub fn default_learning_rate(weighting: Weighting) -> f64 {
        match weighting {
            Weighting::Tfidf => 0.1,
            Weighting::Counts => 0.01,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.lambda >= 0.0 && self.lambda.is_finite()) {
            return Err(Error::InvalidConfig("lambda must be >= 0".into()));
        }
        if !(self.learning_rate > 0.0 && self.learning_rate.is_finite()) {
            return Err(Error::InvalidConfig("learning_rate must be > 0".into()));
        }
        if self.max_iters < 1 {
            return Err(Error::InvalidConfig("max_iters must be >= 1".into()));
        }
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::InvalidConfig("tol must be > 0".into()));
        }
        if !(self.threshold > 0.0 && self.threshold < 1.0) {
            return Err(Error::InvalidConfig("threshold must be in (0,1)".into()));
        }
        Ok(())
    }
}

/// A fitted classifier: weight vector, bias, the vocabulary it was
/// fitted with, and the full configuration. Immutable; safe to share
/// across threads for prediction.
#[derive(Debug, Clone)]
pub struct TrainedModel {
    weights: Vec<f64>,
    bias: f64,
    vocab: Vocabulary,
    vectorizer_config: VectorizerConfig,
    train_config: TrainConfig,
    training_log: Vec<f64>,
}

/// Numerically stable logistic function: for negative z the
/// `e^z / (1 + e^z)` branch avoids overflow.
pub fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

const LOG_CLAMP: f64 = 1e-12;

fn clamped_ln(p: f64) -> f64 {
    p.clamp(LOG_CLAMP, 1.0 - LOG_CLAMP).ln()
}

struct ChunkPartial {
    loss: f64,
    grad_weights: Vec<f64>,
    grad_bias: f64,
}

/// Mean binary cross-entropy with L2 penalty, and its gradient.
///
/// `J(θ) = −(1/m) Σ [y ln h + (1−y) ln(1−h)] + (λ/2m)‖θ‖²` with
/// `h = sigmoid(θ·x + bias)`; the bias is excluded from the penalty.
/// Gradient: `(1/m) Xᵀ(h−y) + (λ/m)θ` on the weights, `(1/m) Σ(h−y)`
/// on the bias. Log arguments are clamped to `[1e-12, 1−1e-12]`.
pub fn loss_and_gradient(
    weights: &[f64],
    bias: f64,
    data: &FeatureMatrix,
    lambda: f64,
) -> Result<(f64, Vec<f64>, f64)> {
    let labels = data
        .labels()
        .ok_or_else(|| Error::InvalidConfig("feature matrix carries no labels".into()))?;
    let m = data.len();
    if m == 0 {
        return Err(Error::EmptyDataset);
    }
    if data.dimension() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            got: data.dimension(),
        });
    }

    let rows = data.rows();
    let dim = weights.len();
    let n_chunks = m.div_ceil(exec::REDUCE_CHUNK);
    // below ~4 chunks the rayon dispatch costs more than it buys
    let partials = exec::map_indices_min(n_chunks, 4, |c| {
        let start = c * exec::REDUCE_CHUNK;
        let end = ((c + 1) * exec::REDUCE_CHUNK).min(m);
        let mut partial = ChunkPartial {
            loss: 0.0,
            grad_weights: vec![0.0; dim],
            grad_bias: 0.0,
        };
        for i in start..end {
            let row = &rows[i];
            let y = labels[i].as_f64();
            let h = sigmoid(row.dot(weights) + bias);
            partial.loss -= if y == 1.0 {
                clamped_ln(h)
            } else {
                clamped_ln(1.0 - h)
            };
            let diff = h - y;
            for &(j, w) in row.entries() {
                partial.grad_weights[j] += diff * w;
            }
            partial.grad_bias += diff;
        }
        partial
    });

    // Combine partials in chunk order.
    let m_f = m as f64;
    let mut loss = 0.0;
    let mut grad_weights = vec![0.0; dim];
    let mut grad_bias = 0.0;
    for partial in partials {
        loss += partial.loss;
        grad_bias += partial.grad_bias;
        for (acc, g) in grad_weights.iter_mut().zip(partial.grad_weights) {
            *acc += g;
        }
    }
    loss /= m_f;
    grad_bias /= m_f;

    let penalty: f64 = weights.iter().map(|w| w * w).sum();
    loss += lambda / (2.0 * m_f) * penalty;
    for (g, &w) in grad_weights.iter_mut().zip(weights) {
        *g = *g / m_f + lambda / m_f * w;
    }

    Ok((loss, grad_weights, grad_bias))
}

/// Fit a model by full-batch gradient descent from zero.
///
/// Stops when the loss change drops below `tol` or after `max_iters`
/// iterations, recording every iteration's loss. Errors if the data is
/// single-class, contains non-finite features, or the loss becomes
/// non-finite (divergence).
pub fn train(
    data: &FeatureMatrix,
    vocab: &Vocabulary,
    vectorizer_config: &VectorizerConfig,
    train_config: &TrainConfig,
) -> Result<TrainedModel> {
    train_config.validate()?;
    let labels = data
        .labels()
        .ok_or_else(|| Error::InvalidConfig("feature matrix carries no labels".into()))?;
    if data.is_empty() {
        return Err(Error::EmptyDataset);
    }
    if data.dimension() != vocab.len() {
        return Err(Error::DimensionMismatch {
            expected: vocab.len(),
            got: data.dimension(),
        });
    }
    let positives = labels.iter().filter(|l| l.is_positive()).count();
    if positives == 0 || positives == labels.len() {
        return Err(Error::SingleClass);
    }
    for row in data.rows() {
        if row.entries().iter().any(|&(_, w)| !w.is_finite()) {
            return Err(Error::NonFinite("feature weight".into()));
        }
    }

    let mut weights = vec![0.0; vocab.len()];
    let mut bias = 0.0;
    let mut training_log = Vec::new();
    let mut previous: Option<f64> = None;

    for iteration in 1..=train_config.max_iters {
        let (loss, grad_weights, grad_bias) =
            loss_and_gradient(&weights, bias, data, train_config.lambda)?;
        if !loss.is_finite() {
            return Err(Error::Divergence { iteration });
        }
        training_log.push(loss);
        if let Some(prev) = previous {
            if (prev - loss).abs() < train_config.tol {
                break;
            }
        }
        for (w, g) in weights.iter_mut().zip(&grad_weights) {
            *w -= train_config.learning_rate * g;
        }
        bias -= train_config.learning_rate * grad_bias;
        previous = Some(loss);
    }

    Ok(TrainedModel {
        weights,
        bias,
        vocab: vocab.clone(),
        vectorizer_config: vectorizer_config.clone(),
        train_config: train_config.clone(),
        training_log,
    })
}

impl TrainedModel {
    /// Assemble a model from explicit parameters, validating the
    /// weight/vocabulary alignment and finiteness.
    pub fn from_parts(
        weights: Vec<f64>,
        bias: f64,
        vocab: Vocabulary,
        vectorizer_config: VectorizerConfig,
        train_config: TrainConfig,
    ) -> Result<TrainedModel> {
        if weights.len() != vocab.len() {
            return Err(Error::DimensionMismatch {
                expected: vocab.len(),
                got: weights.len(),
            });
        }
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("model parameters".into()));
        }
        train_config.validate()?;
        Ok(TrainedModel {
            weights,
            bias,
            vocab,
            vectorizer_config,
            train_config,
            training_log: Vec::new(),
        })
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn bias(&self) -> f64 {
        self.bias
    }

    pub fn vocab(&self) -> &Vocabulary {
        &self.vocab
    }

    pub fn vectorizer_config(&self) -> &VectorizerConfig {
        &self.vectorizer_config
    }

    pub fn train_config(&self) -> &TrainConfig {
        &self.train_config
    }

    /// Loss recorded at each training iteration. Not persisted by
    /// [`TrainedModel::save`]; empty on a loaded model.
    pub fn training_log(&self) -> &[f64] {
        &self.training_log
    }

    /// Probability that `x` belongs to the positive (dark) class.
    pub fn predict_proba(&self, x: &FeatureVector) -> Result<f64> {
        if x.dimension() != self.weights.len() {
            return Err(Error::DimensionMismatch {
                expected: self.weights.len(),
                got: x.dimension(),
            });
        }
        Ok(sigmoid(x.dot(&self.weights) + self.bias))
    }

    /// Hard decision: positive iff probability ≥ threshold.
    pub fn predict(&self, x: &FeatureVector) -> Result<Label> {
        let proba = self.predict_proba(x)?;
        Ok(if proba >= self.train_config.threshold {
            Label::Dark
        } else {
            Label::NotDark
        })
    }

    /// Score every document of a preprocessed corpus, in corpus order.
    pub fn score_corpus(&self, corpus: &crate::corpus::Corpus) -> Result<Vec<f64>> {
        crate::exec::map_slice(&corpus.documents, |doc| {
            let (vector, _) = crate::vectorizer::transform_document(
                &doc.clean_text,
                &self.vocab,
                &self.vectorizer_config,
            );
            self.predict_proba(&vector)
        })
        .into_iter()
        .collect()
    }

    /// Serialize to the versioned JSON model format.
    ///
    /// All real numbers are written with 17 significant digits so they
    /// round-trip f64 bit-exactly; the checksum is a CRC-32 of the
    /// canonical serialization of `[vocabulary, weights, bias]`.
    pub fn to_json_bytes(&self) -> Result<Vec<u8>> {
        if !self.bias.is_finite() || self.weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::NonFinite("model parameters".into()));
        }

        let vocabulary = vocab_value(&self.vocab)?;
        let weights = Value::Array(
            self.weights
                .iter()
                .map(|&w| json_f64(w))
                .collect::<Result<Vec<_>>>()?,
        );
        let bias = json_f64(self.bias)?;
        let checksum = model_checksum(&vocabulary, &weights, &bias)?;

        let doc = json!({
            "format_version": MODEL_FORMAT_VERSION,
            "vectorizer_config": vectorizer_config_value(&self.vectorizer_config)?,
            "train_config": train_config_value(&self.train_config)?,
            "vocabulary": vocabulary,
            "weights": weights,
            "bias": bias,
            "checksum": checksum,
        });
        serde_json::to_vec(&doc).map_err(|e| Error::ModelFormat(e.to_string()))
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        let bytes = self.to_json_bytes()?;
        std::fs::write(path, bytes).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn from_json_bytes(bytes: &[u8]) -> Result<TrainedModel> {
        let doc: Value =
            serde_json::from_slice(bytes).map_err(|e| Error::ModelFormat(e.to_string()))?;
        let obj = doc
            .as_object()
            .ok_or_else(|| Error::ModelFormat("top level is not an object".into()))?;

        let version = obj
            .get("format_version")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::ModelFormat("missing format_version".into()))?;
        if version != MODEL_FORMAT_VERSION {
            return Err(Error::ModelVersion {
                found: version,
                expected: MODEL_FORMAT_VERSION,
            });
        }

        let vectorizer_config: VectorizerConfig = serde_json::from_value(
            obj.get("vectorizer_config")
                .cloned()
                .ok_or_else(|| Error::ModelFormat("missing vectorizer_config".into()))?,
        )
        .map_err(|e| Error::ModelFormat(format!("vectorizer_config: {e}")))?;
        let train_config: TrainConfig = serde_json::from_value(
            obj.get("train_config")
                .cloned()
                .ok_or_else(|| Error::ModelFormat("missing train_config".into()))?,
        )
        .map_err(|e| Error::ModelFormat(format!("train_config: {e}")))?;

        let vocab_rows = obj
            .get("vocabulary")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::ModelFormat("missing vocabulary".into()))?;
        let mut terms = Vec::with_capacity(vocab_rows.len());
        let mut doc_freq = Vec::with_capacity(vocab_rows.len());
        let mut idf_values = Vec::with_capacity(vocab_rows.len());
        let mut any_idf = false;
        for (i, row) in vocab_rows.iter().enumerate() {
            let triple = row
                .as_array()
                .filter(|a| a.len() == 3)
                .ok_or_else(|| Error::ModelFormat(format!("vocabulary entry {i} malformed")))?;
            let term = triple[0]
                .as_str()
                .ok_or_else(|| Error::ModelFormat(format!("vocabulary term {i} is not a string")))?;
            let df = triple[1]
                .as_u64()
                .ok_or_else(|| Error::ModelFormat(format!("doc_freq {i} is not an integer")))?;
            let idf = match &triple[2] {
                Value::Null => None,
                v => Some(v.as_f64().ok_or_else(|| {
                    Error::ModelFormat(format!("idf {i} is not a number"))
                })?),
            };
            terms.push(term.to_string());
            doc_freq.push(df as usize);
            any_idf |= idf.is_some();
            idf_values.push(idf);
        }

        let idf = if any_idf {
            let collected: Option<Vec<f64>> = idf_values.into_iter().collect();
            Some(collected.ok_or_else(|| {
                Error::ModelIntegrity("idf present for some terms but not all".into())
            })?)
        } else {
            None
        };
        if (vectorizer_config.weighting == Weighting::Tfidf) != idf.is_some() {
            return Err(Error::ModelIntegrity(
                "idf presence disagrees with the weighting mode".into(),
            ));
        }

        let weights: Vec<f64> = obj
            .get("weights")
            .and_then(Value::as_array)
            .ok_or_else(|| Error::ModelFormat("missing weights".into()))?
            .iter()
            .map(|v| v.as_f64())
            .collect::<Option<Vec<f64>>>()
            .ok_or_else(|| Error::ModelFormat("weights contain a non-number".into()))?;
        let bias = obj
            .get("bias")
            .and_then(Value::as_f64)
            .ok_or_else(|| Error::ModelFormat("missing bias".into()))?;
        let stored_checksum = obj
            .get("checksum")
            .and_then(Value::as_u64)
            .ok_or_else(|| Error::ModelFormat("missing checksum".into()))? as u32;

        if weights.len() != terms.len() {
            return Err(Error::ModelIntegrity(format!(
                "weights length {} differs from vocabulary size {}",
                weights.len(),
                terms.len()
            )));
        }
        if !bias.is_finite() || weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::ModelIntegrity("non-finite model parameters".into()));
        }

        // n_docs is recoverable from any idf entry; in counts mode it is
        // not stored and only informs reporting, so fall back to max df.
        let n_docs = match (&idf, doc_freq.iter().max()) {
            (Some(idf), _) if !idf.is_empty() => {
                (((idf[0] - 1.0).exp() * (1.0 + doc_freq[0] as f64)) - 1.0).round() as usize
            }
            (_, Some(&max_df)) => max_df,
            _ => 0,
        };

        let vocab = Vocabulary::from_parts(terms, doc_freq, n_docs, idf)?;

        let vocabulary_value = vocab_value(&vocab)?;
        let weights_value = Value::Array(
            weights
                .iter()
                .map(|&w| json_f64(w))
                .collect::<Result<Vec<_>>>()?,
        );
        let bias_value = json_f64(bias)?;
        let computed = model_checksum(&vocabulary_value, &weights_value, &bias_value)?;
        if computed != stored_checksum {
            return Err(Error::ModelChecksum {
                stored: stored_checksum,
                computed,
            });
        }

        Ok(TrainedModel {
            weights,
            bias,
            vocab,
            vectorizer_config,
            train_config,
            training_log: Vec::new(),
        })
    }

    pub fn load(path: &Path) -> Result<TrainedModel> {
        let bytes = std::fs::read(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json_bytes(&bytes)
    }
}

/// Format a finite f64 with 17 significant digits as a JSON number.
fn json_f64(v: f64) -> Result<Value> {
    if !v.is_finite() {
        return Err(Error::NonFinite(format!("{v}")));
    }
    let formatted = format!("{v:.16e}");
    let number = serde_json::Number::from_str(&formatted)
        .map_err(|e| Error::ModelFormat(format!("number formatting: {e}")))?;
    Ok(Value::Number(number))
}

fn vocab_value(vocab: &Vocabulary) -> Result<Value> {
    let rows = vocab
        .terms()
        .iter()
        .enumerate()
        .map(|(i, term)| {
            let idf = match vocab.idf() {
                Some(idf) => json_f64(idf[i])?,
                None => Value::Null,
            };
            Ok(json!([term, vocab.doc_freq()[i], idf]))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(Value::Array(rows))
}

fn vectorizer_config_value(config: &VectorizerConfig) -> Result<Value> {
    Ok(json!({
        "ngram_min": config.ngram_min,
        "ngram_max": config.ngram_max,
        "max_features": config.max_features,
        "min_df": config.min_df,
        "weighting": config.weighting.name(),
    }))
}

fn train_config_value(config: &TrainConfig) -> Result<Value> {
    Ok(json!({
        "lambda": json_f64(config.lambda)?,
        "learning_rate": json_f64(config.learning_rate)?,
        "max_iters": config.max_iters,
        "tol": json_f64(config.tol)?,
        "threshold": json_f64(config.threshold)?,
        "seed": config.seed,
    }))
}

/// CRC-32 of the canonical serialization of vocabulary + weights + bias.
fn model_checksum(vocabulary: &Value, weights: &Value, bias: &Value) -> Result<u32> {
    let canonical = serde_json::to_vec(&json!([vocabulary, weights, bias]))
        .map_err(|e| Error::ModelFormat(e.to_string()))?;
    Ok(crc32fast::hash(&canonical))
}
