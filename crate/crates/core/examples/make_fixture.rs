//! Write the synthetic fixture corpus as a dataset CSV.
//! Usage: make_fixture <path> [n_docs] [seed]

use darkdetect::corpus::write_csv;
use darkdetect::fixture::{synthetic_corpus, FixtureSpec};

fn main() {
    let mut args = std::env::args().skip(1);
    let path = args.next().expect("usage: make_fixture <path> [n_docs] [seed]");
    let n_docs: usize = args.next().map(|s| s.parse().unwrap()).unwrap_or(1000);
    let seed: u64 = args.next().map(|s| s.parse().unwrap()).unwrap_or(FixtureSpec::default().seed);
    let corpus = synthetic_corpus(&FixtureSpec { n_docs, fidelity: 0.95, seed });
    let mut buffer = Vec::new();
    write_csv(&corpus, &mut buffer).expect("serialize corpus");
    std::fs::write(&path, buffer).expect("write fixture");
    println!("wrote {} documents to {}", corpus.len(), path);
}
