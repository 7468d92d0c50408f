//! Shared fixtures for the criterion benchmarks.

use topk_core::workload::{markov_corpus, sample_patterns};
use topk_core::{IndexParams, TopKIndex, Variant};

/// A skewed synthetic collection: 16 symbols, each followed by its
/// preferred successor nine times out of ten.
pub fn collection(total_len: usize, num_docs: usize, seed: u64) -> Vec<Vec<u8>> {
    let alphabet: Vec<u8> = (b'a'..=b'p').collect();
    markov_corpus(num_docs, total_len, &alphabet, 0.9, seed).expect("valid shape")
}

pub fn index(docs: &[Vec<u8>], g_prime: usize, variant: Variant) -> TopKIndex {
    TopKIndex::from_documents(
        docs,
        IndexParams {
            g_prime,
            variant,
            ..IndexParams::default()
        },
    )
    .expect("valid parameters")
}

pub fn patterns(index: &TopKIndex, count: usize, len: usize, seed: u64) -> Vec<Vec<u8>> {
    sample_patterns(index.corpus().text(), count, len, seed).expect("text long enough")
}
