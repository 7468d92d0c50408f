//! Enumerating the documents of two uncovered subintervals together with
//! their frequencies in an enclosing interval.
//!
//! Both traversals carry three node-local intervals down the tree: the outer
//! interval `[l, r]` and the uncovered pieces `[l1, r1]`, `[l2, r2]`. A child
//! is explored only if one of the uncovered pieces projects to something
//! non-empty in it. At a leaf the outer interval length is the document's
//! frequency. A node whose outer length is not larger than the caller's
//! current k-th best frequency cannot lead to a competitive document and is
//! dropped.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::ops::Range;

use super::{Frame, WaveletError, WaveletTree, WtNode};
use crate::corpus::DocId;

/// Receiver of candidate documents that also supplies the pruning threshold.
pub trait CandidateSink {
    /// The current k-th best frequency, or 0 while fewer than k are known.
    fn threshold(&self) -> usize;
    fn offer(&mut self, doc: DocId, freq: usize);
}

/// A sink with a frozen threshold that records every offer.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FixedThreshold {
    pub threshold: usize,
    pub offers: Vec<(DocId, usize)>,
}

impl FixedThreshold {
    pub fn new(threshold: usize) -> Self {
        Self {
            threshold,
            offers: Vec::new(),
        }
    }
}

impl CandidateSink for FixedThreshold {
    fn threshold(&self) -> usize {
        self.threshold
    }

    fn offer(&mut self, doc: DocId, freq: usize) {
        self.offers.push((doc, freq));
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct TraversalStats {
    pub nodes_visited: usize,
    pub emitted: usize,
}

/// Outer interval and the two uncovered subintervals, local to `node`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TrackedIntervals {
    pub node: WtNode,
    pub outer: Range<usize>,
    pub left: Range<usize>,
    pub right: Range<usize>,
}

impl TrackedIntervals {
    /// Intervals at the root. Each uncovered piece must lie inside `outer`,
    /// and `left` must end before `right` starts when both are non-empty.
    pub fn at_root(
        tree: &WaveletTree,
        outer: Range<usize>,
        left: Range<usize>,
        right: Range<usize>,
    ) -> Result<Self, WaveletError> {
        let inside =
            |r: &Range<usize>| r.is_empty() || (outer.start <= r.start && r.end <= outer.end);
        if outer.end > tree.len()
            || !inside(&left)
            || !inside(&right)
            || (!left.is_empty() && !right.is_empty() && left.end > right.start)
        {
            return Err(WaveletError::InconsistentIntervals);
        }
        let norm = |r: Range<usize>| if r.is_empty() { 0..0 } else { r };
        Ok(Self {
            node: tree.root(),
            outer: norm(outer),
            left: norm(left),
            right: norm(right),
        })
    }

    fn is_live(&self) -> bool {
        !self.left.is_empty() || !self.right.is_empty()
    }

    fn children(&self, tree: &WaveletTree) -> (Self, Self) {
        let (lnode, rnode) = tree.children(self.node).expect("internal node");
        let (o0, o1) = tree.split(self.node, &self.outer);
        let (a0, a1) = tree.split(self.node, &self.left);
        let (b0, b1) = tree.split(self.node, &self.right);
        (
            Self {
                node: lnode,
                outer: o0,
                left: a0,
                right: b0,
            },
            Self {
                node: rnode,
                outer: o1,
                left: a1,
                right: b1,
            },
        )
    }
}

impl WaveletTree {
    /// Best-first traversal: nodes with longer outer intervals are expanded
    /// first, and the search ends as soon as the longest pending interval is
    /// not larger than the sink's threshold.
    pub fn restricted_greedy<S: CandidateSink>(
        &self,
        start: TrackedIntervals,
        sink: &mut S,
    ) -> TraversalStats {
        let mut stats = TraversalStats::default();
        if !start.is_live() {
            return stats;
        }
        let mut queue = BinaryHeap::new();
        queue.push((
            start.outer.len(),
            Reverse(start.node.lo),
            Frame(start.node, start),
        ));
        while let Some((len, _, Frame(_, t))) = queue.pop() {
            if len <= sink.threshold() {
                break;
            }
            stats.nodes_visited += 1;
            if t.node.is_leaf() {
                sink.offer(DocId(t.node.lo), len);
                stats.emitted += 1;
                continue;
            }
            let (l, r) = t.children(self);
            for child in [l, r] {
                if child.is_live() {
                    queue.push((
                        child.outer.len(),
                        Reverse(child.node.lo),
                        Frame(child.node, child),
                    ));
                }
            }
        }
        stats
    }

    /// Depth-first traversal, left child first, pruning subtrees whose outer
    /// interval is not larger than the sink's threshold.
    pub fn restricted_dfs<S: CandidateSink>(
        &self,
        start: TrackedIntervals,
        sink: &mut S,
    ) -> TraversalStats {
        let mut stats = TraversalStats::default();
        if !start.is_live() {
            return stats;
        }
        let mut stack = vec![start];
        while let Some(t) = stack.pop() {
            let len = t.outer.len();
            if len <= sink.threshold() {
                continue;
            }
            stats.nodes_visited += 1;
            if t.node.is_leaf() {
                sink.offer(DocId(t.node.lo), len);
                stats.emitted += 1;
                continue;
            }
            let (l, r) = t.children(self);
            if r.is_live() {
                stack.push(r);
            }
            if l.is_live() {
                stack.push(l);
            }
        }
        stats
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::collections::BTreeMap;

    const WORKED: [u32; 14] = [3, 1, 2, 2, 3, 1, 1, 2, 3, 1, 2, 3, 1, 2];

    /// Distinct documents in the uncovered pieces with their outer counts.
    fn naive(
        values: &[u32],
        outer: Range<usize>,
        pieces: &[Range<usize>],
    ) -> BTreeMap<DocId, usize> {
        let mut out = BTreeMap::new();
        for p in pieces {
            for &v in &values[p.clone()] {
                let f = values[outer.clone()].iter().filter(|&&x| x == v).count();
                out.insert(DocId(v), f);
            }
        }
        out
    }

    fn as_map(offers: &[(DocId, usize)]) -> BTreeMap<DocId, usize> {
        let map: BTreeMap<_, _> = offers.iter().copied().collect();
        assert_eq!(map.len(), offers.len(), "a document was emitted twice");
        map
    }

    #[test]
    fn nothing_uncovered() {
        let w = WaveletTree::build(&WORKED, 3).unwrap();
        let t = TrackedIntervals::at_root(&w, 2..10, 2..2, 10..10).unwrap();
        let mut sink = FixedThreshold::new(0);
        assert_eq!(w.restricted_greedy(t.clone(), &mut sink).emitted, 0);
        assert_eq!(w.restricted_dfs(t, &mut sink).emitted, 0);
        assert!(sink.offers.is_empty());
    }

    #[test]
    fn whole_range_uncovered_reduces_to_greedy() {
        let w = WaveletTree::build(&WORKED, 3).unwrap();
        let t = TrackedIntervals::at_root(&w, 3..12, 3..12, 12..12).unwrap();
        let mut sink = FixedThreshold::new(0);
        w.restricted_greedy(t, &mut sink);
        let expected: BTreeMap<_, _> = w.greedy_topk(3..12, 3).unwrap().into_iter().collect();
        assert_eq!(as_map(&sink.offers), expected);
    }

    #[test]
    fn figure_like_configuration() {
        // [sp, ep] = [4, 14] and [sp', ep'] = [7, 11], 1-based. The uncovered
        // slots hold documents 1, 2, 5 and 7, whose frequencies over [4, 14]
        // are 2, 2, 1 and 4.
        let values = [4, 3, 8, 1, 7, 2, 7, 2, 7, 3, 6, 5, 7, 1];
        let w = WaveletTree::build(&values, 8).unwrap();
        let (outer, left, right) = (3..14, 3..6, 11..14);
        let expected = naive(&values, outer.clone(), &[left.clone(), right.clone()]);
        let want: BTreeMap<_, _> = [(DocId(1), 2), (DocId(2), 2), (DocId(5), 1), (DocId(7), 4)]
            .into_iter()
            .collect();
        assert_eq!(expected, want);
        for dfs in [false, true] {
            let mut sink = FixedThreshold::new(0);
            let t =
                TrackedIntervals::at_root(&w, outer.clone(), left.clone(), right.clone()).unwrap();
            if dfs {
                w.restricted_dfs(t, &mut sink);
            } else {
                w.restricted_greedy(t, &mut sink);
            }
            assert_eq!(as_map(&sink.offers), want);
        }
    }

    #[test]
    fn rejects_inconsistent_intervals() {
        let w = WaveletTree::build(&WORKED, 3).unwrap();
        assert_eq!(
            TrackedIntervals::at_root(&w, 2..10, 1..3, 10..10),
            Err(WaveletError::InconsistentIntervals)
        );
        assert_eq!(
            TrackedIntervals::at_root(&w, 2..10, 2..6, 5..10),
            Err(WaveletError::InconsistentIntervals)
        );
        assert_eq!(
            TrackedIntervals::at_root(&w, 2..20, 2..3, 4..5),
            Err(WaveletError::InconsistentIntervals)
        );
    }

    #[test]
    fn threshold_prunes() {
        let w = WaveletTree::build(&WORKED, 3).unwrap();
        let t = TrackedIntervals::at_root(&w, 0..14, 0..14, 14..14).unwrap();
        // Every document occurs 4 or 5 times; a threshold of 5 drops them all.
        let mut sink = FixedThreshold::new(5);
        w.restricted_greedy(t.clone(), &mut sink);
        w.restricted_dfs(t, &mut sink);
        assert!(sink.offers.is_empty());
    }

    fn scenario() -> impl Strategy<Value = (Vec<u32>, u32, [usize; 4], usize)> {
        (1u32..20).prop_flat_map(|d| {
            (
                proptest::collection::vec(1..=d, 1..300),
                Just(d),
                any::<[usize; 4]>(),
                0usize..6,
            )
        })
    }

    proptest! {
        #[test]
        fn traversals_agree_with_oracle((values, d, cuts, threshold) in scenario()) {
            let n = values.len();
            let mut c: Vec<usize> = cuts.iter().map(|x| x % (n + 1)).collect();
            c.sort();
            let outer = c[0]..c[3];
            let (left, right) = (c[0]..c[1], c[2]..c[3]);
            let w = WaveletTree::build(&values, d).unwrap();
            let all = naive(&values, outer.clone(), &[left.clone(), right.clone()]);

            let t = TrackedIntervals::at_root(&w, outer.clone(), left.clone(), right.clone()).unwrap();
            let mut unpruned = FixedThreshold::new(0);
            w.restricted_dfs(t.clone(), &mut unpruned);
            prop_assert_eq!(as_map(&unpruned.offers), all.clone());

            let mut g = FixedThreshold::new(threshold);
            let mut f = FixedThreshold::new(threshold);
            let gs = w.restricted_greedy(t.clone(), &mut g);
            let fs = w.restricted_dfs(t, &mut f);
            let (gm, fm) = (as_map(&g.offers), as_map(&f.offers));
            prop_assert_eq!(&gm, &fm);
            prop_assert_eq!(gs.emitted, g.offers.len());
            prop_assert_eq!(fs.emitted, f.offers.len());
            let above: BTreeMap<_, _> = all.iter().filter(|(_, &v)| v > threshold).map(|(&k, &v)| (k, v)).collect();
            prop_assert_eq!(gm, above);
            for (doc, freq) in &g.offers {
                prop_assert_eq!(w.doc_freq(*doc, outer.clone()).unwrap(), *freq);
            }
        }
    }
}
