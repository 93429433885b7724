//! N-gram bag-of-words features with optional tf-idf weighting.

use std::collections::{HashMap, HashSet};
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::corpus::{Corpus, Label};
use crate::error::{Error, Result};

/// Feature weighting scheme.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Weighting {
    /// Raw term occurrence counts.
    Counts,
    /// Smoothed tf-idf with unit L2 row normalization.
    Tfidf,
}

impl Weighting {
    pub fn name(self) -> &'static str {
        match self {
            Weighting::Counts => "counts",
            Weighting::Tfidf => "tfidf",
        }
    }

    pub fn from_name(name: &str) -> Option<Weighting> {
        match name {
            "counts" => Some(Weighting::Counts),
            "tfidf" => Some(Weighting::Tfidf),
            _ => None,
        }
    }
}

/// Vectorizer settings. The defaults are the library defaults:
/// unigrams+bigrams, unlimited features, tf-idf weighting.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VectorizerConfig {
    pub ngram_min: usize,
    pub ngram_max: usize,
    pub max_features: Option<usize>,
    /// Minimum document frequency; terms below it are pruned.
    pub min_df: usize,
    pub weighting: Weighting,
}

impl Default for VectorizerConfig {
    fn default() -> Self {
        VectorizerConfig {
            ngram_min: 1,
            ngram_max: 2,
            max_features: None,
            min_df: 1,
            weighting: Weighting::Tfidf,
        }
    }
}

impl VectorizerConfig {
    pub fn validate(&self) -> Result<()> {
        if self.ngram_min < 1 {
            return Err(Error::InvalidConfig("ngram_min must be >= 1".into()));
        }
        if self.ngram_max < self.ngram_min {
            return Err(Error::InvalidConfig(format!(
                "ngram_max {} < ngram_min {}",
                self.ngram_max, self.ngram_min
            )));
        }
        if self.max_features == Some(0) {
            return Err(Error::InvalidConfig("max_features must be >= 1".into()));
        }
        if self.min_df < 1 {
            return Err(Error::InvalidConfig("min_df must be >= 1".into()));
        }
        Ok(())
    }
}

/// Fitted term dictionary: lexicographically sorted terms with dense
/// indices, per-term document frequencies, and idf weights in tf-idf
/// mode. Immutable once fitted; transforms never add terms.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
    doc_freq: Vec<usize>,
    n_docs: usize,
    idf: Option<Vec<f64>>,
}

impl Vocabulary {
    /// Assemble a vocabulary from parallel term/doc-freq lists (terms
    /// must already be sorted). Used by fitting and by model loading.
    pub(crate) fn from_parts(
        terms: Vec<String>,
        doc_freq: Vec<usize>,
        n_docs: usize,
        idf: Option<Vec<f64>>,
    ) -> Result<Vocabulary> {
        if terms.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        if terms.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::ModelIntegrity(
                "vocabulary terms are not strictly sorted".into(),
            ));
        }
        if doc_freq.len() != terms.len() {
            return Err(Error::ModelIntegrity(
                "doc_freq length differs from term count".into(),
            ));
        }
        if let Some(idf) = &idf {
            if idf.len() != terms.len() {
                return Err(Error::ModelIntegrity(
                    "idf length differs from term count".into(),
                ));
            }
        }
        let index = terms
            .iter()
            .enumerate()
            .map(|(i, t)| (t.clone(), i))
            .collect();
        Ok(Vocabulary {
            terms,
            index,
            doc_freq,
            n_docs,
            idf,
        })
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }

    pub fn index_of(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn doc_freq(&self) -> &[usize] {
        &self.doc_freq
    }

    pub fn n_docs(&self) -> usize {
        self.n_docs
    }

    pub fn idf(&self) -> Option<&[f64]> {
        self.idf.as_deref()
    }

    /// Export as CSV `term,index,doc_freq,idf` sorted by index; the idf
    /// column is empty in counts mode.
    pub fn export_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let err = |e: csv::Error| Error::MalformedRow {
            row: 0,
            message: e.to_string(),
        };
        w.write_record(["term", "index", "doc_freq", "idf"]).map_err(err)?;
        for (i, term) in self.terms.iter().enumerate() {
            let idf = match &self.idf {
                Some(v) => v[i].to_string(),
                None => String::new(),
            };
            w.write_record([term.as_str(), &i.to_string(), &self.doc_freq[i].to_string(), &idf])
                .map_err(err)?;
        }
        w.flush().map_err(|e| Error::MalformedRow {
            row: 0,
            message: e.to_string(),
        })?;
        Ok(())
    }
}

/// Sparse feature vector: strictly increasing indices, no stored zeros.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector {
    entries: Vec<(usize, f64)>,
    dimension: usize,
}

impl FeatureVector {
    pub fn new(entries: Vec<(usize, f64)>, dimension: usize) -> Result<FeatureVector> {
        for window in entries.windows(2) {
            if window[0].0 >= window[1].0 {
                return Err(Error::InvalidConfig(
                    "feature indices must be strictly increasing".into(),
                ));
            }
        }
        if let Some(&(last, _)) = entries.last() {
            if last >= dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: last + 1,
                });
            }
        }
        if entries.iter().any(|&(_, w)| w == 0.0) {
            return Err(Error::InvalidConfig(
                "feature vectors must not store zero weights".into(),
            ));
        }
        Ok(FeatureVector { entries, dimension })
    }

    pub fn empty(dimension: usize) -> FeatureVector {
        FeatureVector {
            entries: Vec::new(),
            dimension,
        }
    }

    pub fn entries(&self) -> &[(usize, f64)] {
        &self.entries
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    /// Sparse · dense dot product.
    pub fn dot(&self, dense: &[f64]) -> f64 {
        debug_assert_eq!(dense.len(), self.dimension);
        self.entries.iter().map(|&(i, w)| w * dense[i]).sum()
    }

    pub fn l2_norm(&self) -> f64 {
        self.entries
            .iter()
            .map(|&(_, w)| w * w)
            .sum::<f64>()
            .sqrt()
    }

    /// Sum of stored weights (in counts mode: the number of
    /// in-vocabulary n-grams of the document).
    pub fn weight_sum(&self) -> f64 {
        self.entries.iter().map(|&(_, w)| w).sum()
    }
}

/// Row collection sharing one vocabulary dimension, optionally labeled.
#[derive(Debug, Clone)]
pub struct FeatureMatrix {
    rows: Vec<FeatureVector>,
    labels: Option<Vec<Label>>,
    dimension: usize,
}

impl FeatureMatrix {
    pub fn new(
        rows: Vec<FeatureVector>,
        labels: Option<Vec<Label>>,
        dimension: usize,
    ) -> Result<FeatureMatrix> {
        for row in &rows {
            if row.dimension() != dimension {
                return Err(Error::DimensionMismatch {
                    expected: dimension,
                    got: row.dimension(),
                });
            }
        }
        if let Some(labels) = &labels {
            if labels.len() != rows.len() {
                return Err(Error::DimensionMismatch {
                    expected: rows.len(),
                    got: labels.len(),
                });
            }
        }
        Ok(FeatureMatrix {
            rows,
            labels,
            dimension,
        })
    }

    pub fn rows(&self) -> &[FeatureVector] {
        &self.rows
    }

    pub fn labels(&self) -> Option<&[Label]> {
        self.labels.as_deref()
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }
}

/// Split cleaned text into n-gram terms: unigram tokens are maximal
/// whitespace-separated runs; higher-order n-grams are contiguous token
/// windows joined by single spaces, emitted left to right, all n-grams
/// of order n before order n+1.
pub fn tokenize(clean_text: &str, config: &VectorizerConfig) -> Vec<String> {
    let tokens: Vec<&str> = clean_text.split_whitespace().collect();
    let mut terms = Vec::new();
    for n in config.ngram_min..=config.ngram_max {
        if n == 0 || n > tokens.len() {
            continue;
        }
        for window in tokens.windows(n) {
            terms.push(window.join(" "));
        }
    }
    terms
}

/// Count per-document occurrences of each distinct term.
fn term_counts(clean_text: &str, config: &VectorizerConfig) -> HashMap<String, usize> {
    let mut counts = HashMap::new();
    for term in tokenize(clean_text, config) {
        *counts.entry(term).or_insert(0usize) += 1;
    }
    counts
}

/// Learn a vocabulary from a preprocessed training corpus.
///
/// Candidate terms are every n-gram in the training documents. Terms
/// with document frequency below `min_df` are dropped; when
/// `max_features` is set, the survivors are ranked by document
/// frequency descending with ties broken by term ascending and the top
/// `max_features` kept. The final term list is sorted lexicographically
/// with dense indices. In tf-idf mode each term gets
/// `idf(t) = ln((1 + n_docs) / (1 + doc_freq(t))) + 1`.
pub fn fit_vocabulary(train: &Corpus, config: &VectorizerConfig) -> Result<Vocabulary> {
    config.validate()?;
    let n_docs = train.len();

    let mut doc_freq: HashMap<String, usize> = HashMap::new();
    for doc in &train.documents {
        let mut seen: HashSet<String> = HashSet::new();
        for term in tokenize(&doc.clean_text, config) {
            seen.insert(term);
        }
        for term in seen {
            *doc_freq.entry(term).or_insert(0) += 1;
        }
    }

    let mut candidates: Vec<(String, usize)> = doc_freq
        .into_iter()
        .filter(|&(_, df)| df >= config.min_df)
        .collect();

    if let Some(limit) = config.max_features {
        if candidates.len() > limit {
            candidates.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
            candidates.truncate(limit);
        }
    }

    candidates.sort_by(|a, b| a.0.cmp(&b.0));
    if candidates.is_empty() {
        return Err(Error::EmptyVocabulary);
    }

    let (terms, doc_freq): (Vec<String>, Vec<usize>) = candidates.into_iter().unzip();
    let idf = match config.weighting {
        Weighting::Tfidf => Some(
            doc_freq
                .iter()
                .map(|&df| ((1.0 + n_docs as f64) / (1.0 + df as f64)).ln() + 1.0)
                .collect(),
        ),
        Weighting::Counts => None,
    };

    Vocabulary::from_parts(terms, doc_freq, n_docs, idf)
}

/// Per-document transform bookkeeping for qualitative reports.
#[derive(Debug, Clone, Copy, Default)]
pub struct TransformDiagnostics {
    /// Distinct out-of-vocabulary n-grams silently dropped.
    pub oov_terms: usize,
    /// Total occurrences of dropped n-grams.
    pub oov_occurrences: usize,
}

/// Vectorize one preprocessed document against a fitted vocabulary.
///
/// Counts mode stores raw occurrence counts; tf-idf mode stores
/// `count × idf` scaled to unit Euclidean norm (all-zero vectors stay
/// all-zero). Out-of-vocabulary terms are dropped and tallied in the
/// diagnostics.
pub fn transform_document(
    clean_text: &str,
    vocab: &Vocabulary,
    config: &VectorizerConfig,
) -> (FeatureVector, TransformDiagnostics) {
    let counts = term_counts(clean_text, config);
    let mut diag = TransformDiagnostics::default();
    let mut entries: Vec<(usize, f64)> = Vec::with_capacity(counts.len());
    for (term, count) in &counts {
        match vocab.index_of(term) {
            Some(index) => entries.push((index, *count as f64)),
            None => {
                diag.oov_terms += 1;
                diag.oov_occurrences += count;
            }
        }
    }
    entries.sort_unstable_by_key(|&(i, _)| i);

    if config.weighting == Weighting::Tfidf {
        let idf = vocab.idf().expect("tfidf vocabulary carries idf weights");
        for (i, w) in entries.iter_mut() {
            *w *= idf[*i];
        }
        let norm = entries.iter().map(|&(_, w)| w * w).sum::<f64>().sqrt();
        if norm > 0.0 {
            for (_, w) in entries.iter_mut() {
                *w /= norm;
            }
        }
    }

    let vector = FeatureVector {
        entries,
        dimension: vocab.len(),
    };
    (vector, diag)
}

/// Vectorize a whole corpus; rows keep corpus order and carry labels.
pub fn transform_corpus(
    corpus: &Corpus,
    vocab: &Vocabulary,
    config: &VectorizerConfig,
) -> FeatureMatrix {
    let rows = crate::exec::map_slice(&corpus.documents, |doc| {
        transform_document(&doc.clean_text, vocab, config).0
    });
    let labels = corpus.documents.iter().map(|d| d.label).collect();
    FeatureMatrix {
        rows,
        labels: Some(labels),
        dimension: vocab.len(),
    }
}
