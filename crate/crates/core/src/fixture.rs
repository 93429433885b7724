//! Deterministic synthetic corpus for tests and benchmarks.
//!
//! Generates balanced UI-style text where class-discriminating n-grams
//! are planted with a configurable fidelity: each document draws three
//! marker phrases, and each draw comes from the document's own class
//! list with probability `fidelity`, from the opposite list otherwise.
//! Raw text carries realistic noise (mixed case, punctuation, HTML
//! wrappers) so the full preprocessing pipeline is exercised.

use crate::corpus::{Corpus, Document, Label};
use crate::rng::SplitMix64;

const DARK_MARKERS: [&str; 10] = [
    "hurry",
    "act now",
    "only 3 left",
    "limited time offer",
    "dont miss out",
    "last chance",
    "selling fast",
    "offer expires soon",
    "claim your prize",
    "almost gone",
];

const BENIGN_MARKERS: [&str; 10] = [
    "learn more",
    "contact us",
    "privacy policy",
    "view details",
    "read more",
    "help center",
    "terms of service",
    "product description",
    "customer reviews",
    "shipping information",
];

const FILLER: [&str; 32] = [
    "the", "you", "your", "account", "settings", "page", "click", "view", "item", "price",
    "cart", "order", "shop", "store", "online", "today", "here", "about", "this", "product",
    "free", "new", "our", "with", "from", "browse", "select", "options", "list", "home",
    "email", "profile",
];

/// Parameters of the generated corpus.
#[derive(Debug, Clone, Copy)]
pub struct FixtureSpec {
    pub n_docs: usize,
    /// Probability that each planted marker matches the document class.
    pub fidelity: f64,
    pub seed: u64,
}

impl Default for FixtureSpec {
    fn default() -> Self {
        FixtureSpec {
            n_docs: 1000,
            fidelity: 0.95,
            seed: 20_240_101,
        }
    }
}

fn pick<'a>(rng: &mut SplitMix64, list: &[&'a str]) -> &'a str {
    list[rng.next_below(list.len() as u64) as usize]
}

fn push_filler(rng: &mut SplitMix64, words: &mut Vec<String>, min: u64, max: u64) {
    let count = min + rng.next_below(max - min + 1);
    for _ in 0..count {
        words.push(pick(rng, &FILLER).to_string());
    }
}

fn decorate(rng: &mut SplitMix64, phrase: &str) -> String {
    match rng.next_below(5) {
        0 => format!("<b>{phrase}</b>"),
        1 => format!("{}!", phrase.to_uppercase()),
        2 => {
            let mut chars = phrase.chars();
            match chars.next() {
                Some(first) => format!("{}{}", first.to_uppercase(), chars.as_str()),
                None => String::new(),
            }
        }
        _ => phrase.to_string(),
    }
}

/// Generate the corpus. Pure function of the spec: one SplitMix64
/// stream seeded by `spec.seed` drives every draw.
pub fn synthetic_corpus(spec: &FixtureSpec) -> Corpus {
    let mut rng = SplitMix64::new(spec.seed);
    let mut documents = Vec::with_capacity(spec.n_docs);
    for i in 0..spec.n_docs {
        let label = if i % 2 == 0 { Label::Dark } else { Label::NotDark };
        let (own, other) = match label {
            Label::Dark => (&DARK_MARKERS[..], &BENIGN_MARKERS[..]),
            Label::NotDark => (&BENIGN_MARKERS[..], &DARK_MARKERS[..]),
        };

        let mut words: Vec<String> = Vec::new();
        for _ in 0..3 {
            push_filler(&mut rng, &mut words, 2, 5);
            let consistent = rng.next_f64() < spec.fidelity;
            let marker = if consistent {
                pick(&mut rng, own)
            } else {
                pick(&mut rng, other)
            };
            words.push(decorate(&mut rng, marker));
        }
        push_filler(&mut rng, &mut words, 1, 4);

        documents.push(Document {
            id: (i + 1).to_string(),
            raw_text: words.join(" "),
            clean_text: String::new(),
            label,
        });
    }
    Corpus::new(documents, format!("synthetic(seed={})", spec.seed))
        .expect("generated ids are unique")
}
