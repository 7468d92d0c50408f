//! Top-k document retrieval: given a collection of documents and a
//! pattern, report the `k` documents in which the pattern occurs most
//! often.
//!
//! The index is a suffix array over the concatenated collection, a wavelet
//! tree over the document array, and a sampled suffix tree that stores
//! precomputed top-k candidates for a sparse set of suffix-array intervals.
//!
//! ```
//! use topk_core::{DocId, IndexParams, QueryOptions, TopKIndex};
//!
//! let index = TopKIndex::from_documents(["abab", "abba", "bab"], IndexParams::default()).unwrap();
//! let hits = index.query(b"ab", 1, QueryOptions::default()).unwrap().hits;
//! assert_eq!(hits, vec![(DocId(1), 2)]);
//! ```

pub mod bits;
pub mod container;
pub mod corpus;
pub mod engine;
pub mod louds;
pub mod sgst;
pub mod suffix;
pub mod wavelet;
pub mod workload;

pub use bits::{BitBuf, BitError, RankBitVector};
pub use container::{load, read_index, save, write_index, ContainerError, SaveOptions};
pub use corpus::{Corpus, CorpusError, DocId, SENTINEL};
pub use engine::{
    kstar, CandidateHeap, IndexError, IndexParams, IndexSummary, QueryError, QueryOptions,
    QueryStats, Strategy, TopKIndex, TopKResult,
};
pub use louds::{LoudsError, LoudsNode, LoudsTree, OrdinalTree};
pub use sgst::{MarkedNode, Sgst, SgstError, SgstParams, Variant};
pub use suffix::{SearchError, SuffixIndex};
pub use wavelet::{CandidateSink, TrackedIntervals, WaveletError, WaveletTree, WtNode};
pub use workload::{BenchConfig, BenchReport, StrategyReport, WorkerReport, WorkloadError};
