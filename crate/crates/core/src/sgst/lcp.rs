//! Build-time lcp-interval tree, used only to find lowest common ancestors
//! of suffix-array leaves.

use std::ops::Range;

/// Internal nodes of the suffix tree as lcp-intervals. Every boundary `p`
/// (between leaves `p - 1` and `p`) belongs to exactly one interval: the one
/// whose lcp value is `lcp[p]` and that contains both leaves.
pub(crate) struct LcpIntervals {
    intervals: Vec<Range<usize>>,
    boundary_owner: Vec<usize>,
    lcp: Vec<usize>,
}

impl LcpIntervals {
    pub(crate) fn new(lcp: Vec<usize>) -> Self {
        let n = lcp.len();
        let mut intervals: Vec<Range<usize>> = Vec::new();
        intervals.push(0..n);
        let mut boundary_owner = vec![usize::MAX; n];
        // (lcp value, interval id)
        let mut stack = vec![(0usize, 0usize)];
        for p in 1..n {
            let h = lcp[p];
            let mut lb = p - 1;
            while h < stack.last().unwrap().0 {
                let (_, id) = stack.pop().unwrap();
                intervals[id].end = p;
                lb = intervals[id].start;
            }
            if h > stack.last().unwrap().0 {
                intervals.push(lb..n);
                stack.push((h, intervals.len() - 1));
            }
            boundary_owner[p] = stack.last().unwrap().1;
        }
        Self {
            intervals,
            boundary_owner,
            lcp,
        }
    }

    pub(crate) fn interval(&self, id: usize) -> Range<usize> {
        self.intervals[id].clone()
    }

    /// Id of the lowest common ancestor of leaves `a < b`.
    pub(crate) fn lca(&self, a: usize, b: usize) -> usize {
        debug_assert!(a < b);
        let mut best = a + 1;
        for p in a + 2..=b {
            if self.lcp[p] < self.lcp[best] {
                best = p;
            }
        }
        self.boundary_owner[best]
    }
}
