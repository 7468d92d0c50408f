//! Suffix array, document array, and pattern-interval search.
//!
//! Suffix-array indices are 0-based and pattern intervals are half-open
//! ranges `sp..ep + 1`; an empty range means the pattern does not occur.

use std::ops::Range;

use thiserror::Error;

use crate::corpus::{Corpus, SENTINEL};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SearchError {
    #[error("pattern is empty")]
    EmptyPattern,
    #[error("pattern contains the reserved sentinel byte at offset {0}")]
    SentinelInPattern(usize),
}

/// Suffix array of a corpus text together with its document array.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuffixIndex {
    sa: Vec<usize>,
    docs: Vec<u32>,
}

impl SuffixIndex {
    pub fn build(corpus: &Corpus) -> Self {
        let sa = suffix_array(corpus.text());
        Self::from_suffix_array(corpus, sa)
    }

    /// Wraps an existing suffix array (e.g. one loaded from disk) and derives
    /// the document array from it.
    pub fn from_suffix_array(corpus: &Corpus, sa: Vec<usize>) -> Self {
        let bounds = corpus.boundaries();
        let docs = sa.iter().map(|&p| 1 + bounds.rank1(p) as u32).collect();
        Self { sa, docs }
    }

    pub fn suffix_array(&self) -> &[usize] {
        &self.sa
    }

    /// `D[i]`: the 1-based document containing suffix `sa[i]`.
    pub fn doc_array(&self) -> &[u32] {
        &self.docs
    }

    pub fn into_parts(self) -> (Vec<usize>, Vec<u32>) {
        (self.sa, self.docs)
    }

    pub fn len(&self) -> usize {
        self.sa.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sa.is_empty()
    }

    pub fn pattern_interval(
        &self,
        corpus: &Corpus,
        pattern: &[u8],
    ) -> Result<Range<usize>, SearchError> {
        pattern_interval(&self.sa, corpus.text(), pattern)
    }
}

/// Binary search for the suffixes of `text` prefixed by `pattern`.
pub fn pattern_interval(
    sa: &[usize],
    text: &[u8],
    pattern: &[u8],
) -> Result<Range<usize>, SearchError> {
    if pattern.is_empty() {
        return Err(SearchError::EmptyPattern);
    }
    if let Some(i) = pattern.iter().position(|&b| b == SENTINEL) {
        return Err(SearchError::SentinelInPattern(i));
    }
    let m = pattern.len();
    let head = |s: usize| &text[s..text.len().min(s + m)];
    let sp = sa.partition_point(|&s| head(s) < pattern);
    let ep = sp + sa[sp..].partition_point(|&s| head(s) == pattern);
    Ok(sp..ep)
}

/// Suffix array by prefix doubling with counting sorts, `O(n log n)`.
/// Shorter suffixes sort first when one is a prefix of the other.
pub fn suffix_array(text: &[u8]) -> Vec<usize> {
    let n = text.len();
    if n == 0 {
        return Vec::new();
    }
    // Rank 0 is reserved for "past the end".
    let mut rank: Vec<usize> = text.iter().map(|&c| c as usize + 1).collect();
    let mut sa: Vec<usize> = (0..n).collect();
    sa.sort_by_key(|&i| rank[i]);
    let mut next = vec![0usize; n];
    let mut order = Vec::with_capacity(n);
    let mut counts = Vec::new();
    let mut classes = relabel(&sa, &mut next, |a, b| rank[a] == rank[b]);
    std::mem::swap(&mut rank, &mut next);
    let mut k = 1;
    while classes < n {
        // Order by second key: suffixes shorter than k first, then the rest
        // following the current order shifted by k.
        order.clear();
        order.extend(n - k.min(n)..n);
        order.extend(sa.iter().filter(|&&i| i >= k).map(|&i| i - k));
        // Stable counting sort by first key.
        counts.clear();
        counts.resize(classes + 2, 0usize);
        for &i in &order {
            counts[rank[i]] += 1;
        }
        let mut acc = 0;
        for c in counts.iter_mut() {
            let here = *c;
            *c = acc;
            acc += here;
        }
        for &i in &order {
            sa[counts[rank[i]]] = i;
            counts[rank[i]] += 1;
        }
        let second = |i: usize| if i + k < n { rank[i + k] } else { 0 };
        classes = relabel(&sa, &mut next, |a, b| {
            rank[a] == rank[b] && second(a) == second(b)
        });
        std::mem::swap(&mut rank, &mut next);
        k *= 2;
    }
    sa
}

fn relabel(sa: &[usize], out: &mut [usize], same: impl Fn(usize, usize) -> bool) -> usize {
    let mut class = 1;
    out[sa[0]] = class;
    for w in sa.windows(2) {
        if !same(w[0], w[1]) {
            class += 1;
        }
        out[w[1]] = class;
    }
    class
}

/// Kasai's algorithm: `lcp[i]` is the longest common prefix of the suffixes
/// at `sa[i - 1]` and `sa[i]`; `lcp[0] = 0`.
pub fn lcp_array(text: &[u8], sa: &[usize]) -> Vec<usize> {
    let n = sa.len();
    let mut inverse = vec![0usize; n];
    for (i, &p) in sa.iter().enumerate() {
        inverse[p] = i;
    }
    let mut lcp = vec![0usize; n];
    let mut h = 0usize;
    for p in 0..n {
        let i = inverse[p];
        if i == 0 {
            h = 0;
            continue;
        }
        let q = sa[i - 1];
        while p + h < n && q + h < n && text[p + h] == text[q + h] {
            h += 1;
        }
        lcp[i] = h;
        h = h.saturating_sub(1);
    }
    lcp
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn naive_sa(text: &[u8]) -> Vec<usize> {
        let mut sa: Vec<usize> = (0..text.len()).collect();
        sa.sort_by(|&a, &b| text[a..].cmp(&text[b..]));
        sa
    }

    fn one_based(v: &[usize]) -> Vec<usize> {
        v.iter().map(|x| x + 1).collect()
    }

    #[test]
    fn worked_suffix_array() {
        let c = Corpus::ingest(["abab", "abba", "bab"]).unwrap();
        let s = SuffixIndex::build(&c);
        let expected = naive_sa(c.text());
        assert_eq!(s.suffix_array(), expected.as_slice());
        assert_eq!(
            one_based(s.suffix_array()),
            vec![14, 5, 10, 9, 12, 3, 1, 6, 13, 4, 8, 11, 2, 7]
        );
        assert_eq!(s.doc_array(), &[3, 1, 2, 2, 3, 1, 1, 2, 3, 1, 2, 3, 1, 2]);
    }

    #[test]
    fn tiny_texts() {
        let c = Corpus::ingest(["ab"]).unwrap();
        assert_eq!(one_based(&suffix_array(c.text())), vec![3, 1, 2]);
        let c = Corpus::ingest(["x"]).unwrap();
        let s = SuffixIndex::build(&c);
        assert_eq!(one_based(s.suffix_array()), vec![2, 1]);
        assert_eq!(s.doc_array(), &[1, 1]);
        assert!(suffix_array(b"").is_empty());
    }

    #[test]
    fn worked_intervals() {
        let c = Corpus::ingest(["abab", "abba", "bab"]).unwrap();
        let s = SuffixIndex::build(&c);
        // 1-based [5,8] and [11,13]
        assert_eq!(s.pattern_interval(&c, b"ab"), Ok(4..8));
        assert_eq!(s.pattern_interval(&c, b"ba"), Ok(10..13));
        assert!(s.pattern_interval(&c, b"zz").unwrap().is_empty());
        assert_eq!(s.pattern_interval(&c, b""), Err(SearchError::EmptyPattern));
        assert_eq!(
            s.pattern_interval(&c, b"a\0"),
            Err(SearchError::SentinelInPattern(1))
        );
    }

    #[test]
    fn lcp_matches_definition() {
        let text = b"mississippi\0";
        let sa = suffix_array(text);
        let lcp = lcp_array(text, &sa);
        for i in 1..sa.len() {
            let (a, b) = (&text[sa[i - 1]..], &text[sa[i]..]);
            let l = a.iter().zip(b).take_while(|(x, y)| x == y).count();
            assert_eq!(lcp[i], l);
        }
    }

    proptest! {
        #[test]
        fn doubling_matches_sort(text in proptest::collection::vec(0u8..4, 0..300)) {
            prop_assert_eq!(suffix_array(&text), naive_sa(&text));
        }

        #[test]
        fn interval_counts_occurrences(
            docs in proptest::collection::vec("[abc]{1,40}", 1..10),
            pattern in "[abc]{1,4}",
        ) {
            let c = Corpus::ingest(&docs).unwrap();
            let s = SuffixIndex::build(&c);
            let r = s.pattern_interval(&c, pattern.as_bytes()).unwrap();
            let p = pattern.as_bytes();
            let mut per_doc = vec![0usize; docs.len() + 1];
            for (i, d) in docs.iter().enumerate() {
                per_doc[i + 1] = d.as_bytes().windows(p.len()).filter(|w| *w == p).count();
            }
            prop_assert_eq!(r.len(), per_doc.iter().sum::<usize>());
            let mut seen = vec![0usize; docs.len() + 1];
            for &d in &s.doc_array()[r] {
                seen[d as usize] += 1;
            }
            prop_assert_eq!(seen, per_doc);
        }
    }
}
