//! End-to-end top-k queries.
//!
//! A query finds the pattern's suffix-array interval `[sp, ep]`, looks up
//! its locus in the sampled tree for `k* = next_power_of_two(k)`, seeds a
//! min-heap with the locus' precomputed candidates, and corrects them with
//! the documents found in the uncovered cells `[sp, sp' - 1]` and
//! `[ep' + 1, ep]`. Without a locus the wavelet tree answers directly with
//! a best-first top-k search.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use thiserror::Error;

use crate::bits::{BitError, RankBitVector, DEFAULT_RANK_STEP};
use crate::corpus::{Corpus, CorpusError, DocId};
use crate::sgst::{Sgst, SgstError, SgstParams, Variant};
use crate::suffix::{pattern_interval, SearchError, SuffixIndex};
use crate::wavelet::{CandidateSink, TrackedIntervals, TraversalStats, WaveletError, WaveletTree};

#[derive(Debug, Error)]
pub enum IndexError {
    #[error(transparent)]
    Corpus(#[from] CorpusError),
    #[error(transparent)]
    Sgst(#[from] SgstError),
    #[error(transparent)]
    Wavelet(#[from] WaveletError),
    #[error(transparent)]
    RankStep(#[from] BitError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QueryError {
    #[error("pattern is empty")]
    EmptyPattern,
    #[error("pattern contains the reserved sentinel byte at offset {0}")]
    SentinelInPattern(usize),
    #[error("k must be at least 1")]
    ZeroK,
    #[error("unknown strategy `{0}` (expected greedy, dfs or select)")]
    UnknownStrategy(String),
    #[error(transparent)]
    Wavelet(#[from] WaveletError),
}

impl From<SearchError> for QueryError {
    fn from(e: SearchError) -> Self {
        match e {
            SearchError::EmptyPattern => QueryError::EmptyPattern,
            SearchError::SentinelInPattern(i) => QueryError::SentinelInPattern(i),
        }
    }
}

/// How the uncovered cells around a locus are explored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// Best-first wavelet tree traversal.
    Greedy,
    /// Depth-first wavelet tree traversal.
    Dfs,
    /// Decode and count every uncovered cell.
    Select,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Greedy, Strategy::Dfs, Strategy::Select];
}

impl fmt::Display for Strategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Strategy::Greedy => "greedy",
            Strategy::Dfs => "dfs",
            Strategy::Select => "select",
        })
    }
}

impl FromStr for Strategy {
    type Err = QueryError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "greedy" => Ok(Strategy::Greedy),
            "dfs" => Ok(Strategy::Dfs),
            "select" => Ok(Strategy::Select),
            _ => Err(QueryError::UnknownStrategy(s.to_string())),
        }
    }
}

/// Smallest power of two not below `k` (`k >= 1`).
pub fn kstar(k: usize) -> usize {
    k.max(1).next_power_of_two()
}

/// Min-heap of at most `k` candidates. The top is the current k-th best:
/// lowest frequency, and among equal frequencies the highest document id.
#[derive(Debug, Clone)]
pub struct CandidateHeap {
    capacity: usize,
    slots: Vec<(DocId, usize)>,
    offers: usize,
}

impl CandidateHeap {
    pub fn new(capacity: usize) -> Self {
        Self {
            capacity,
            slots: Vec::with_capacity(capacity.min(1024)),
            offers: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn len(&self) -> usize {
        self.slots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.slots.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.slots.len() >= self.capacity
    }

    /// The current k-th best candidate.
    pub fn top(&self) -> Option<(DocId, usize)> {
        self.slots.first().copied()
    }

    /// Number of `offer` calls so far.
    pub fn offers(&self) -> usize {
        self.offers
    }

    pub fn contains(&self, doc: DocId) -> bool {
        self.slots.iter().any(|&(d, _)| d == doc)
    }

    /// Offers a candidate with its frequency. A present document takes the
    /// new frequency; otherwise it is inserted while there is room, or
    /// replaces the top if strictly more frequent.
    pub fn offer(&mut self, doc: DocId, freq: usize) {
        self.offers += 1;
        // Linear membership scan; k is small in practice.
        if let Some(i) = self.slots.iter().position(|&(d, _)| d == doc) {
            let old = self.slots[i].1;
            self.slots[i].1 = freq;
            if freq >= old {
                self.sift_down(i);
            } else {
                self.sift_up(i);
            }
        } else if self.slots.len() < self.capacity {
            self.slots.push((doc, freq));
            self.sift_up(self.slots.len() - 1);
        } else if let Some(&(_, top)) = self.slots.first() {
            if freq > top {
                self.slots[0] = (doc, freq);
                self.sift_down(0);
            }
        }
    }

    /// Candidates, best first.
    pub fn into_sorted(self) -> Vec<(DocId, usize)> {
        let mut v = self.slots;
        sort_hits(&mut v);
        v
    }

    pub fn as_slice(&self) -> &[(DocId, usize)] {
        &self.slots
    }

    // `a` belongs nearer the top than `b`.
    fn worse(a: (DocId, usize), b: (DocId, usize)) -> bool {
        a.1 < b.1 || (a.1 == b.1 && a.0 > b.0)
    }

    fn sift_up(&mut self, mut i: usize) {
        while i > 0 {
            let parent = (i - 1) / 2;
            if Self::worse(self.slots[i], self.slots[parent]) {
                self.slots.swap(i, parent);
                i = parent;
            } else {
                break;
            }
        }
    }

    fn sift_down(&mut self, mut i: usize) {
        let n = self.slots.len();
        loop {
            let (l, r) = (2 * i + 1, 2 * i + 2);
            let mut m = i;
            if l < n && Self::worse(self.slots[l], self.slots[m]) {
                m = l;
            }
            if r < n && Self::worse(self.slots[r], self.slots[m]) {
                m = r;
            }
            if m == i {
                break;
            }
            self.slots.swap(i, m);
            i = m;
        }
    }
}

impl CandidateSink for CandidateHeap {
    fn threshold(&self) -> usize {
        if self.is_full() {
            self.slots.first().map_or(0, |s| s.1)
        } else {
            0
        }
    }

    fn offer(&mut self, doc: DocId, freq: usize) {
        CandidateHeap::offer(self, doc, freq);
    }
}

/// Sorts by frequency descending, then document id ascending.
pub fn sort_hits(hits: &mut [(DocId, usize)]) {
    hits.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
}

/// Offers every document found in `outer` outside `covered`, with its exact
/// frequency in `outer`. An empty `covered` scans all of `outer`. Returns
/// the number of cells decoded.
pub fn select_scan<S: CandidateSink>(
    wavelet: &WaveletTree,
    outer: Range<usize>,
    covered: Range<usize>,
    sink: &mut S,
) -> Result<usize, WaveletError> {
    if outer.is_empty() {
        return Ok(0);
    }
    if outer.end > wavelet.len() {
        return Err(WaveletError::OutOfRange {
            pos: outer.end - 1,
            len: wavelet.len(),
        });
    }
    let pieces = if covered.is_empty() {
        [outer.clone(), 0..0]
    } else {
        if covered.start < outer.start || covered.end > outer.end {
            return Err(WaveletError::InconsistentIntervals);
        }
        [outer.start..covered.start, covered.end..outer.end]
    };
    let mut scanned = 0;
    for piece in pieces {
        for i in piece {
            let doc = wavelet.access_unchecked(i);
            let freq = wavelet.doc_freq_unchecked(doc, outer.clone());
            sink.offer(doc, freq);
            scanned += 1;
        }
    }
    Ok(scanned)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct IndexParams {
    pub g_prime: usize,
    pub k_max: usize,
    pub variant: Variant,
    /// Rank sample step, in bits, of the wavelet tree bitmaps.
    pub rank_step: usize,
}

impl Default for IndexParams {
    fn default() -> Self {
        let s = SgstParams::default();
        Self {
            g_prime: s.g_prime,
            k_max: s.k_max,
            variant: s.variant,
            rank_step: DEFAULT_RANK_STEP,
        }
    }
}

impl IndexParams {
    pub fn sgst(&self) -> SgstParams {
        SgstParams {
            g_prime: self.g_prime,
            k_max: self.k_max,
            variant: self.variant,
        }
    }

    pub fn validate(&self) -> Result<(), IndexError> {
        self.sgst().validate()?;
        if self.rank_step == 0 || !self.rank_step.is_multiple_of(64) {
            return Err(BitError::BadSampleStep(self.rank_step).into());
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QueryOptions {
    pub strategy: Strategy,
    pub use_sgst: bool,
}

impl Default for QueryOptions {
    fn default() -> Self {
        Self {
            strategy: Strategy::Greedy,
            use_sgst: true,
        }
    }
}

/// Work counters for one query.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct QueryStats {
    /// Suffix-array interval of the pattern.
    pub interval: Range<usize>,
    /// Interval of the locus, when one was found.
    pub locus: Option<Range<usize>>,
    /// Uncovered cells around the locus.
    pub uncovered: usize,
    /// Cells decoded by the select strategy.
    pub positions_scanned: usize,
    /// Documents reported by a restricted traversal.
    pub docs_emitted: usize,
    /// Wavelet tree nodes expanded, including the fallback search.
    pub nodes_visited: usize,
    pub heap_offers: usize,
    /// Leaves reported by the fallback top-k search (no locus).
    pub fallback_leaves: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopKResult {
    pub pattern: Vec<u8>,
    pub k: usize,
    pub options: QueryOptions,
    pub variant: Variant,
    /// Documents with their exact frequencies, best first.
    pub hits: Vec<(DocId, usize)>,
    pub stats: QueryStats,
}

/// Summary figures for a built index.
#[derive(Debug, Clone, PartialEq)]
pub struct IndexSummary {
    pub n: usize,
    pub docs: usize,
    pub sigma: usize,
    pub g_prime: usize,
    pub k_max: usize,
    pub variant: Variant,
    pub rank_step: usize,
    pub tau_nodes: usize,
    pub wavelet_bits: usize,
    pub sgst_bits: usize,
    pub boundary_bits: usize,
}

impl IndexSummary {
    /// Wavelet tree, sampled tree and document boundaries per text symbol.
    pub fn bits_per_symbol(&self) -> f64 {
        (self.wavelet_bits + self.sgst_bits + self.boundary_bits) as f64 / self.n.max(1) as f64
    }
}

/// A complete index: corpus text, suffix array, wavelet tree over the
/// document array, and the sampled suffix tree.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TopKIndex {
    params: IndexParams,
    corpus: Corpus,
    sa: Vec<usize>,
    wavelet: WaveletTree,
    sgst: Sgst,
}

impl TopKIndex {
    pub fn from_documents<I, S>(documents: I, params: IndexParams) -> Result<Self, IndexError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<[u8]>,
    {
        Self::build(Corpus::ingest(documents)?, params)
    }

    pub fn build(corpus: Corpus, params: IndexParams) -> Result<Self, IndexError> {
        params.validate()?;
        let suffixes = SuffixIndex::build(&corpus);
        let wavelet = WaveletTree::with_rank_step(
            suffixes.doc_array(),
            corpus.doc_count() as u32,
            params.rank_step,
        )?;
        let sgst = match Sgst::build(&corpus, &suffixes, &wavelet, params.sgst()) {
            Ok(s) => s,
            Err(SgstError::GPrimeTooLarge { .. }) => Sgst::empty(params.sgst()),
            Err(e) => return Err(e.into()),
        };
        let (sa, _) = suffixes.into_parts();
        Ok(Self {
            params,
            corpus,
            sa,
            wavelet,
            sgst,
        })
    }

    /// Reassembles an index from loaded parts.
    pub(crate) fn from_parts(
        params: IndexParams,
        corpus: Corpus,
        sa: Vec<usize>,
        wavelet: WaveletTree,
        sgst: Sgst,
    ) -> Self {
        Self {
            params,
            corpus,
            sa,
            wavelet,
            sgst,
        }
    }

    pub fn params(&self) -> IndexParams {
        self.params
    }

    pub fn corpus(&self) -> &Corpus {
        &self.corpus
    }

    pub fn suffix_array(&self) -> &[usize] {
        &self.sa
    }

    pub fn wavelet(&self) -> &WaveletTree {
        &self.wavelet
    }

    pub fn sgst(&self) -> &Sgst {
        &self.sgst
    }

    pub fn summary(&self) -> IndexSummary {
        IndexSummary {
            n: self.corpus.len(),
            docs: self.corpus.doc_count(),
            sigma: self.corpus.sigma(),
            g_prime: self.params.g_prime,
            k_max: self.params.k_max,
            variant: self.params.variant,
            rank_step: self.params.rank_step,
            tau_nodes: self.sgst.node_count(),
            wavelet_bits: self.wavelet.size_in_bits(),
            sgst_bits: self.sgst.size_in_bits(),
            boundary_bits: boundary_bits(self.corpus.boundaries()),
        }
    }

    pub fn pattern_interval(&self, pattern: &[u8]) -> Result<Range<usize>, QueryError> {
        Ok(pattern_interval(&self.sa, self.corpus.text(), pattern)?)
    }

    pub fn query(
        &self,
        pattern: &[u8],
        k: usize,
        options: QueryOptions,
    ) -> Result<TopKResult, QueryError> {
        if k == 0 {
            return Err(QueryError::ZeroK);
        }
        let interval = self.pattern_interval(pattern)?;
        let mut stats = QueryStats {
            interval: interval.clone(),
            ..QueryStats::default()
        };
        let hits = if interval.is_empty() {
            Vec::new()
        } else {
            self.top_k_in(interval, k, options, &mut stats)?
        };
        Ok(TopKResult {
            pattern: pattern.to_vec(),
            k,
            options,
            variant: self.params.variant,
            hits,
            stats,
        })
    }

    /// Top-k over an arbitrary non-empty suffix-array interval.
    pub fn top_k_in(
        &self,
        interval: Range<usize>,
        k: usize,
        options: QueryOptions,
        stats: &mut QueryStats,
    ) -> Result<Vec<(DocId, usize)>, QueryError> {
        let k_star = kstar(k);
        let locus = if options.use_sgst && k_star <= self.params.k_max {
            self.sgst
                .find_locus(k_star, interval.clone())
                .expect("k* within the precomputed range")
        } else {
            None
        };
        let Some(node) = locus else {
            let mut t = TraversalStats::default();
            let hits = self.wavelet.greedy_topk_counted(interval, k, &mut t)?;
            stats.nodes_visited += t.nodes_visited;
            stats.fallback_leaves += t.emitted;
            return Ok(hits);
        };

        let mut heap = CandidateHeap::new(k);
        for (doc, freq) in self
            .sgst
            .candidates_of(&node, &self.wavelet)
            .into_iter()
            .take(k)
        {
            heap.offer(doc, freq);
        }
        let left = interval.start..node.interval.start;
        let right = node.interval.end..interval.end;
        stats.uncovered = left.len() + right.len();
        stats.locus = Some(node.interval.clone());
        match options.strategy {
            Strategy::Greedy | Strategy::Dfs => {
                let start =
                    TrackedIntervals::at_root(&self.wavelet, interval.clone(), left, right)?;
                let t = if options.strategy == Strategy::Greedy {
                    self.wavelet.restricted_greedy(start, &mut heap)
                } else {
                    self.wavelet.restricted_dfs(start, &mut heap)
                };
                stats.nodes_visited += t.nodes_visited;
                stats.docs_emitted += t.emitted;
            }
            Strategy::Select => {
                stats.positions_scanned +=
                    select_scan(&self.wavelet, interval.clone(), node.interval, &mut heap)?;
            }
        }
        stats.heap_offers += heap.offers();

        // Seeded frequencies are relative to the locus; report exact ones.
        let mut hits: Vec<(DocId, usize)> = heap
            .as_slice()
            .iter()
            .map(|&(doc, _)| (doc, self.wavelet.doc_freq_unchecked(doc, interval.clone())))
            .collect();
        sort_hits(&mut hits);
        Ok(hits)
    }
}

fn boundary_bits(b: &RankBitVector) -> usize {
    b.size_in_bits()
}
