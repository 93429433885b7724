//! Dataset loading, text cleaning, and train/test splitting.

use std::collections::HashSet;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{shuffle, SplitMix64};

/// Binary class of a text sample. `Dark` is the positive class.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Label {
    Dark,
    NotDark,
}

impl Label {
    /// Parse a label token. Accepts `1`/`0` and `dark`/`not_dark`
    /// (case-insensitive); anything else is rejected.
    pub fn from_token(token: &str) -> Option<Label> {
        match token.trim().to_ascii_lowercase().as_str() {
            "1" | "dark" => Some(Label::Dark),
            "0" | "not_dark" => Some(Label::NotDark),
            _ => None,
        }
    }

    pub fn token(self) -> &'static str {
        match self {
            Label::Dark => "dark",
            Label::NotDark => "not_dark",
        }
    }

    /// Numeric encoding used by the loss: positive class is 1.
    pub fn as_f64(self) -> f64 {
        match self {
            Label::Dark => 1.0,
            Label::NotDark => 0.0,
        }
    }

    pub fn is_positive(self) -> bool {
        self == Label::Dark
    }
}

/// One labeled text sample.
///
/// `clean_text` is empty until [`Corpus::preprocess`] runs.
#[derive(Debug, Clone)]
pub struct Document {
    pub id: String,
    pub raw_text: String,
    pub clean_text: String,
    pub label: Label,
}

/// An ordered collection of documents with a source tag.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub documents: Vec<Document>,
    pub provenance: String,
}

impl Corpus {
    pub fn new(documents: Vec<Document>, provenance: impl Into<String>) -> Result<Corpus> {
        let mut seen = HashSet::with_capacity(documents.len());
        for doc in &documents {
            if !seen.insert(doc.id.as_str()) {
                return Err(Error::InvalidConfig(format!(
                    "duplicate document id {:?}",
                    doc.id
                )));
            }
        }
        Ok(Corpus {
            documents,
            provenance: provenance.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }

    /// `(positive, negative)` class counts.
    pub fn class_counts(&self) -> (usize, usize) {
        let pos = self
            .documents
            .iter()
            .filter(|d| d.label.is_positive())
            .count();
        (pos, self.documents.len() - pos)
    }

    /// Mean whitespace-token count per document, measured on the clean
    /// text when present, raw text otherwise. Reported, never asserted.
    pub fn average_word_count(&self) -> f64 {
        if self.documents.is_empty() {
            return 0.0;
        }
        let total: usize = self
            .documents
            .iter()
            .map(|d| {
                let text = if d.clean_text.is_empty() {
                    &d.raw_text
                } else {
                    &d.clean_text
                };
                text.split_whitespace().count()
            })
            .sum();
        total as f64 / self.documents.len() as f64
    }

    /// Fill `clean_text` for every document using the default rules.
    pub fn preprocess(&mut self) {
        self.preprocess_with(&PreprocessOptions::default());
    }

    /// Fill `clean_text` for every document with explicit toggles
    /// (used by the preprocessing axis of the sensitivity analysis).
    pub fn preprocess_with(&mut self, options: &PreprocessOptions) {
        let cleaned = crate::exec::map_slice(&self.documents, |d| {
            preprocess_with(&d.raw_text, options)
        });
        for (doc, clean) in self.documents.iter_mut().zip(cleaned) {
            doc.clean_text = clean;
        }
    }

    fn select(&self, indices: &[usize]) -> Corpus {
        Corpus {
            documents: indices.iter().map(|&i| self.documents[i].clone()).collect(),
            provenance: self.provenance.clone(),
        }
    }
}

/// Toggles for the cleaning steps that the sensitivity analysis varies.
/// Defaults run the full pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PreprocessOptions {
    pub strip_html: bool,
    pub lowercase: bool,
}

impl Default for PreprocessOptions {
    fn default() -> Self {
        PreprocessOptions {
            strip_html: true,
            lowercase: true,
        }
    }
}

impl PreprocessOptions {
    /// Compact label used in sensitivity tables, e.g. `html=on,lower=off`.
    pub fn label(&self) -> String {
        fn onoff(b: bool) -> &'static str {
            if b {
                "on"
            } else {
                "off"
            }
        }
        format!(
            "html={},lower={}",
            onoff(self.strip_html),
            onoff(self.lowercase)
        )
    }
}

/// Clean one raw string. The steps run in this exact order:
///
/// 1. delete every maximal substring starting `<` and ending at the next
///    `>` (a bare `<` with no closing `>` deletes through end of string);
/// 2. replace every character that is not a Unicode letter, digit, or
///    whitespace with a single space;
/// 3. lowercase all letters;
/// 4. collapse whitespace runs to single spaces and trim the ends.
pub fn preprocess(raw_text: &str) -> String {
    preprocess_with(raw_text, &PreprocessOptions::default())
}

/// [`preprocess`] with steps 1 and 3 individually toggleable.
pub fn preprocess_with(raw_text: &str, options: &PreprocessOptions) -> String {
    let stripped: String = if options.strip_html {
        strip_tags(raw_text)
    } else {
        raw_text.to_string()
    };

    // Steps 2 and 3 fused per character; equivalent because replacement
    // decisions do not depend on case and lowercasing never produces a
    // replaced character class.
    let mut filtered = String::with_capacity(stripped.len());
    for c in stripped.chars() {
        if c.is_alphabetic() {
            if options.lowercase {
                filtered.extend(c.to_lowercase());
            } else {
                filtered.push(c);
            }
        } else if c.is_numeric() || c.is_whitespace() {
            filtered.push(c);
        } else {
            filtered.push(' ');
        }
    }

    // Step 4.
    let mut out = String::with_capacity(filtered.len());
    let mut in_space = true; // leading whitespace trimmed
    for c in filtered.chars() {
        if c.is_whitespace() {
            if !in_space {
                out.push(' ');
                in_space = true;
            }
        } else {
            out.push(c);
            in_space = false;
        }
    }
    if out.ends_with(' ') {
        out.pop();
    }
    out
}

fn strip_tags(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut chars = text.chars();
    while let Some(c) = chars.next() {
        if c == '<' {
            // consume through the closing '>', or everything if absent
            for inner in chars.by_ref() {
                if inner == '>' {
                    break;
                }
            }
        } else {
            out.push(c);
        }
    }
    out
}

/// How to divide a corpus into train and test portions.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct SplitSpec {
    /// Fraction of each class (stratified) or of the corpus that goes
    /// to the train side. Strictly between 0 and 1.
    pub train_fraction: f64,
    pub seed: u64,
    pub stratified: bool,
}

impl SplitSpec {
    pub fn validate(&self) -> Result<()> {
        if !(self.train_fraction > 0.0 && self.train_fraction < 1.0) {
            return Err(Error::InvalidConfig(format!(
                "train_fraction must be in (0,1), got {}",
                self.train_fraction
            )));
        }
        Ok(())
    }
}

/// Supported dataset file formats.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DatasetFormat {
    Csv,
}

/// Load a dataset file into a corpus.
///
/// The CSV contract: UTF-8, RFC 4180, header row `text,label`, one
/// document per data row in file order. Document ids are the 1-based
/// data row numbers. `clean_text` stays empty until preprocessing.
pub fn load_corpus(path: &Path, format: DatasetFormat) -> Result<Corpus> {
    let DatasetFormat::Csv = format;
    let file = std::fs::File::open(path).map_err(|source| Error::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .flexible(false)
        .from_reader(file);

    {
        let headers = reader.headers().map_err(|e| Error::MalformedRow {
            row: 0,
            message: e.to_string(),
        })?;
        let fields: Vec<&str> = headers.iter().collect();
        if fields != ["text", "label"] {
            return Err(Error::MalformedRow {
                row: 0,
                message: format!("expected header `text,label`, got {:?}", fields.join(",")),
            });
        }
    }

    let mut documents = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let row = i + 1;
        let record = record.map_err(|e| Error::MalformedRow {
            row,
            message: e.to_string(),
        })?;
        if record.len() != 2 {
            return Err(Error::MalformedRow {
                row,
                message: format!("expected 2 columns, got {}", record.len()),
            });
        }
        let text = record.get(0).unwrap_or_default();
        let token = record.get(1).unwrap_or_default();
        let label = Label::from_token(token).ok_or_else(|| Error::UnknownLabel {
            row,
            token: token.to_string(),
        })?;
        documents.push(Document {
            id: row.to_string(),
            raw_text: text.to_string(),
            clean_text: String::new(),
            label,
        });
    }

    Corpus::new(documents, path.display().to_string())
}

/// Write a corpus back out in the dataset CSV format (`text,label`,
/// labels as `1`/`0`). Inverse of [`load_corpus`] up to ids.
pub fn write_csv<W: Write>(corpus: &Corpus, writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let io_err = |e: csv::Error| Error::MalformedRow {
        row: 0,
        message: e.to_string(),
    };
    w.write_record(["text", "label"]).map_err(io_err)?;
    for doc in &corpus.documents {
        let label = if doc.label.is_positive() { "1" } else { "0" };
        w.write_record([doc.raw_text.as_str(), label]).map_err(io_err)?;
    }
    w.flush().map_err(|e| Error::MalformedRow {
        row: 0,
        message: e.to_string(),
    })?;
    Ok(())
}

/// Deterministically partition a corpus into (train, test).
///
/// Stratified mode shuffles each class's index list (classes processed
/// negative-then-positive from one SplitMix64 stream seeded with
/// `spec.seed`) and takes the first `⌊train_fraction × class_size⌋`
/// indices of each class for train. Non-stratified mode shuffles the
/// global index list the same way. Both sides keep original corpus
/// order.
pub fn split(corpus: &Corpus, spec: &SplitSpec) -> Result<(Corpus, Corpus)> {
    spec.validate()?;
    if corpus.is_empty() {
        return Err(Error::EmptyCorpus);
    }

    let mut rng = SplitMix64::new(spec.seed);
    let mut train_idx: Vec<usize> = Vec::new();
    let mut test_idx: Vec<usize> = Vec::new();

    if spec.stratified {
        for class in [Label::NotDark, Label::Dark] {
            let mut indices: Vec<usize> = corpus
                .documents
                .iter()
                .enumerate()
                .filter(|(_, d)| d.label == class)
                .map(|(i, _)| i)
                .collect();
            if indices.is_empty() {
                return Err(Error::ClassTooSmall {
                    label: class.token(),
                    count: 0,
                    needed: 1,
                });
            }
            shuffle(&mut indices, &mut rng);
            let take = (spec.train_fraction * indices.len() as f64).floor() as usize;
            train_idx.extend_from_slice(&indices[..take]);
            test_idx.extend_from_slice(&indices[take..]);
        }
    } else {
        let mut indices: Vec<usize> = (0..corpus.len()).collect();
        shuffle(&mut indices, &mut rng);
        let take = (spec.train_fraction * indices.len() as f64).floor() as usize;
        train_idx.extend_from_slice(&indices[..take]);
        test_idx.extend_from_slice(&indices[take..]);
    }

    if train_idx.is_empty() || test_idx.is_empty() {
        return Err(Error::DegenerateSplit {
            train: train_idx.len(),
            test: test_idx.len(),
        });
    }

    train_idx.sort_unstable();
    test_idx.sort_unstable();
    Ok((corpus.select(&train_idx), corpus.select(&test_idx)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn corpus_of(labels: &[Label]) -> Corpus {
        let documents = labels
            .iter()
            .enumerate()
            .map(|(i, &label)| Document {
                id: (i + 1).to_string(),
                raw_text: format!("doc {i}"),
                clean_text: format!("doc {i}"),
                label,
            })
            .collect();
        Corpus::new(documents, "test").unwrap()
    }

    #[test]
    fn preprocess_strips_tags() {
        assert_eq!(preprocess("<b>Only 3 left!</b>"), "only 3 left");
    }

    #[test]
    fn preprocess_replaces_punctuation_and_lowercases() {
        assert_eq!(preprocess("Hurry—Sign Up NOW!!!"), "hurry sign up now");
    }

    #[test]
    fn preprocess_empty_is_empty() {
        assert_eq!(preprocess(""), "");
    }

    #[test]
    fn preprocess_bare_angle_brackets() {
        // The tag rule eats from `<` to the next `>`: known cost on
        // bare comparisons.
        assert_eq!(preprocess("a < b and b > c"), "a c");
    }

    #[test]
    fn preprocess_unclosed_tag_deletes_to_end() {
        assert_eq!(preprocess("before <never closed"), "before");
    }

    #[test]
    fn preprocess_keeps_digits() {
        assert_eq!(preprocess("only 3 left"), "only 3 left");
    }

    #[test]
    fn preprocess_options_toggle_steps() {
        let opts = PreprocessOptions {
            strip_html: false,
            lowercase: true,
        };
        assert_eq!(preprocess_with("<B>Hi</B>", &opts), "b hi b");
        let opts = PreprocessOptions {
            strip_html: true,
            lowercase: false,
        };
        assert_eq!(preprocess_with("<b>Hi There</b>", &opts), "Hi There");
    }

    #[test]
    fn preprocess_is_idempotent_on_samples() {
        for s in [
            "Hurry—Sign Up NOW!!!",
            "<a href=x>Click</a> me",
            "a < b and b > c",
            "ünïcode Straße 42",
        ] {
            let once = preprocess(s);
            assert_eq!(preprocess(&once), once);
        }
    }

    #[test]
    fn load_two_row_file() {
        let mut tmp = tempfile::NamedTempFile::new().unwrap();
        writeln!(tmp, "text,label").unwrap();
        writeln!(tmp, "Only 3 left!,1").unwrap();
        writeln!(tmp, "\"Read, the docs\",0").unwrap();
        let corpus = load_corpus(tmp.path(), DatasetFormat::Csv).unwrap();
        assert_eq!(corpus.len(), 2);
        assert_eq!(corpus.class_counts(), (1, 1));
        assert_eq!(corpus.documents[0].id, "1");
        assert_eq!(corpus.documents[1].raw_text, "Read, the docs");
        assert!(corpus.documents[0].clean_text.is_empty());
    }

    #[test]
    fn load_rejects_unknown_label_with_row_number() {
        let mut tmp = tempfile::NamedTempFile::new().unwrap();
        writeln!(tmp, "text,label").unwrap();
        for i in 0..4 {
            writeln!(tmp, "doc {i},1").unwrap();
        }
        writeln!(tmp, "doc four,maybe").unwrap();
        let err = load_corpus(tmp.path(), DatasetFormat::Csv).unwrap_err();
        match err {
            Error::UnknownLabel { row, token } => {
                assert_eq!(row, 5);
                assert_eq!(token, "maybe");
            }
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn load_rejects_wrong_column_count() {
        let mut tmp = tempfile::NamedTempFile::new().unwrap();
        writeln!(tmp, "text,label").unwrap();
        writeln!(tmp, "fine,1").unwrap();
        writeln!(tmp, "bad,1,extra").unwrap();
        let err = load_corpus(tmp.path(), DatasetFormat::Csv).unwrap_err();
        match err {
            Error::MalformedRow { row, .. } => assert_eq!(row, 2),
            other => panic!("unexpected error: {other}"),
        }
    }

    #[test]
    fn load_missing_file_is_io_error() {
        let err = load_corpus(Path::new("/no/such/file.csv"), DatasetFormat::Csv).unwrap_err();
        assert!(err.is_io());
        assert!(err.to_string().contains("/no/such/file.csv"));
    }

    #[test]
    fn load_accepts_crlf_and_label_words() {
        let mut tmp = tempfile::NamedTempFile::new().unwrap();
        write!(tmp, "text,label\r\nHurry!,DARK\r\ncalm,not_dark\r\n").unwrap();
        let corpus = load_corpus(tmp.path(), DatasetFormat::Csv).unwrap();
        assert_eq!(corpus.documents[0].label, Label::Dark);
        assert_eq!(corpus.documents[1].label, Label::NotDark);
    }

    #[test]
    fn csv_roundtrip_preserves_text_and_labels() {
        let mut corpus = corpus_of(&[Label::Dark, Label::NotDark]);
        corpus.documents[0].raw_text = "tricky, \"quoted\"\ntext".to_string();
        let mut buf = Vec::new();
        write_csv(&corpus, &mut buf).unwrap();
        let mut tmp = tempfile::NamedTempFile::new().unwrap();
        tmp.write_all(&buf).unwrap();
        let back = load_corpus(tmp.path(), DatasetFormat::Csv).unwrap();
        assert_eq!(back.documents[0].raw_text, corpus.documents[0].raw_text);
        assert_eq!(back.documents[0].label, Label::Dark);
        assert_eq!(back.documents[1].label, Label::NotDark);
    }

    #[test]
    fn stratified_split_counts() {
        let corpus = corpus_of(&[
            Label::Dark,
            Label::Dark,
            Label::Dark,
            Label::Dark,
            Label::Dark,
            Label::NotDark,
            Label::NotDark,
            Label::NotDark,
            Label::NotDark,
            Label::NotDark,
        ]);
        let spec = SplitSpec {
            train_fraction: 0.8,
            seed: 7,
            stratified: true,
        };
        let (train, test) = split(&corpus, &spec).unwrap();
        assert_eq!(train.len(), 8);
        assert_eq!(test.len(), 2);
        assert_eq!(train.class_counts(), (4, 4));
        assert_eq!(test.class_counts(), (1, 1));
    }

    #[test]
    fn split_is_deterministic() {
        let labels: Vec<Label> = (0..40)
            .map(|i| if i % 2 == 0 { Label::Dark } else { Label::NotDark })
            .collect();
        let corpus = corpus_of(&labels);
        let spec = SplitSpec {
            train_fraction: 0.7,
            seed: 1234,
            stratified: true,
        };
        let (tr1, te1) = split(&corpus, &spec).unwrap();
        let (tr2, te2) = split(&corpus, &spec).unwrap();
        let ids = |c: &Corpus| c.documents.iter().map(|d| d.id.clone()).collect::<Vec<_>>();
        assert_eq!(ids(&tr1), ids(&tr2));
        assert_eq!(ids(&te1), ids(&te2));
        // A different seed moves documents around.
        let other = SplitSpec { seed: 4321, ..spec };
        let (tr3, _) = split(&corpus, &other).unwrap();
        assert_ne!(ids(&tr1), ids(&tr3));
    }

    #[test]
    fn split_partitions_corpus() {
        let labels: Vec<Label> = (0..23)
            .map(|i| if i % 3 == 0 { Label::Dark } else { Label::NotDark })
            .collect();
        let corpus = corpus_of(&labels);
        let spec = SplitSpec {
            train_fraction: 0.6,
            seed: 5,
            stratified: false,
        };
        let (train, test) = split(&corpus, &spec).unwrap();
        assert_eq!(train.len() + test.len(), corpus.len());
        let mut all: Vec<String> = train
            .documents
            .iter()
            .chain(test.documents.iter())
            .map(|d| d.id.clone())
            .collect();
        all.sort();
        let mut expected: Vec<String> = corpus.documents.iter().map(|d| d.id.clone()).collect();
        expected.sort();
        assert_eq!(all, expected);
    }

    #[test]
    fn split_paper_scale_counts() {
        // Table 1 composition: 1,818 per class; 0.8 → 1,454 per class in train.
        let labels: Vec<Label> = (0..3636)
            .map(|i| if i < 1818 { Label::Dark } else { Label::NotDark })
            .collect();
        let corpus = corpus_of(&labels);
        let spec = SplitSpec {
            train_fraction: 0.8,
            seed: 42,
            stratified: true,
        };
        let (train, test) = split(&corpus, &spec).unwrap();
        assert_eq!(train.len(), 2908);
        assert_eq!(test.len(), 728);
        assert_eq!(train.class_counts(), (1454, 1454));
    }

    #[test]
    fn split_degenerate_is_error() {
        let corpus = corpus_of(&[Label::Dark, Label::NotDark]);
        let spec = SplitSpec {
            train_fraction: 0.1,
            seed: 1,
            stratified: true,
        };
        // floor(0.1 * 1) = 0 per class → empty train side.
        match split(&corpus, &spec) {
            Err(Error::DegenerateSplit { .. }) => {}
            other => panic!("expected degenerate split, got {other:?}"),
        }
    }

    #[test]
    fn average_word_count_reported() {
        let corpus = corpus_of(&[Label::Dark, Label::NotDark]);
        assert!((corpus.average_word_count() - 2.0).abs() < 1e-12);
    }
}
