//! Balanced wavelet tree over the document array.
//!
//! Documents are symbols `1..=d`. A node covering `[lo, hi]` splits at
//! `mid = (lo + hi) / 2`: a 0 bit routes a symbol `<= mid` to the left child,
//! a 1 bit routes it right. Bitmaps are stored one per level, each of length
//! `n`; a node owns the same position range `start..start + len` on every
//! level at or below its own, so no child pointers are stored.

mod traverse;

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::io::{self, Read, Write};
use std::ops::Range;

use byteorder::{LittleEndian, WriteBytesExt};
use thiserror::Error;

use crate::bits::{invalid, read_len, BitBuf, RankBitVector, DEFAULT_RANK_STEP};
use crate::corpus::DocId;

pub use traverse::{CandidateSink, FixedThreshold, TrackedIntervals, TraversalStats};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum WaveletError {
    #[error("document value {value} is outside 1..={d}")]
    ValueOutOfRange { value: u32, d: u32 },
    #[error("index {pos} is out of range for a sequence of length {len}")]
    OutOfRange { pos: usize, len: usize },
    #[error("uncovered intervals are not consistent with the outer interval")]
    InconsistentIntervals,
    #[error("leaf nodes have no children to project into")]
    LeafNode,
    #[error("a wavelet tree needs at least one symbol")]
    EmptyAlphabet,
}

/// Left and right children of a node, each with a projected interval.
pub type Projection = ((WtNode, Range<usize>), (WtNode, Range<usize>));

/// A wavelet tree node: its level, position range and symbol range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WtNode {
    level: usize,
    start: usize,
    len: usize,
    lo: u32,
    hi: u32,
}

impl WtNode {
    pub fn is_leaf(&self) -> bool {
        self.lo == self.hi
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn level(&self) -> usize {
        self.level
    }

    /// Symbol range `[lo, hi]` handled by this node.
    pub fn symbols(&self) -> (u32, u32) {
        (self.lo, self.hi)
    }

    /// The document of a leaf.
    pub fn doc(&self) -> Option<DocId> {
        self.is_leaf().then_some(DocId(self.lo))
    }

    fn mid(&self) -> u32 {
        self.lo + (self.hi - self.lo) / 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WaveletTree {
    levels: Vec<RankBitVector>,
    len: usize,
    d: u32,
}

impl WaveletTree {
    pub fn build(values: &[u32], d: u32) -> Result<Self, WaveletError> {
        Self::with_rank_step(values, d, DEFAULT_RANK_STEP)
    }

    /// Builds the tree with a custom rank sample step (a positive multiple
    /// of 64) for every level bitmap.
    pub fn with_rank_step(values: &[u32], d: u32, step: usize) -> Result<Self, WaveletError> {
        if d == 0 {
            return Err(WaveletError::EmptyAlphabet);
        }
        if let Some(&value) = values.iter().find(|&&v| v == 0 || v > d) {
            return Err(WaveletError::ValueOutOfRange { value, d });
        }
        let n = values.len();
        let height = height_for(d);
        let mut seq = values.to_vec();
        let mut next = vec![0u32; n];
        let mut nodes = vec![(0usize, n, 1u32, d)];
        let mut levels = Vec::with_capacity(height);
        for _ in 0..height {
            let mut bits = BitBuf::zeros(n);
            let mut children = Vec::with_capacity(nodes.len() * 2);
            for &(start, len, lo, hi) in &nodes {
                let segment = &seq[start..start + len];
                if lo == hi {
                    next[start..start + len].copy_from_slice(segment);
                    children.push((start, len, lo, hi));
                    continue;
                }
                let mid = lo + (hi - lo) / 2;
                let mut write = start;
                for (j, &v) in segment.iter().enumerate() {
                    if v > mid {
                        bits.set(start + j, true);
                    } else {
                        next[write] = v;
                        write += 1;
                    }
                }
                let zeros = write - start;
                for &v in segment.iter().filter(|&&v| v > mid) {
                    next[write] = v;
                    write += 1;
                }
                children.push((start, zeros, lo, mid));
                children.push((start + zeros, len - zeros, mid + 1, hi));
            }
            levels.push(
                RankBitVector::with_step(bits, step).map_err(|_| WaveletError::EmptyAlphabet)?,
            );
            std::mem::swap(&mut seq, &mut next);
            nodes = children;
        }
        Ok(Self { levels, len: n, d })
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// Number of distinct symbols (documents) the tree was built for.
    pub fn doc_count(&self) -> u32 {
        self.d
    }

    pub fn height(&self) -> usize {
        self.levels.len()
    }

    pub fn levels(&self) -> &[RankBitVector] {
        &self.levels
    }

    pub fn root(&self) -> WtNode {
        WtNode {
            level: 0,
            start: 0,
            len: self.len,
            lo: 1,
            hi: self.d,
        }
    }

    /// The bitmap of an internal node, as a slice of its level.
    pub fn node_bits(&self, node: WtNode) -> Option<Vec<bool>> {
        if node.is_leaf() {
            return None;
        }
        let level = &self.levels[node.level];
        Some(
            (node.start..node.start + node.len)
                .map(|p| level.get(p))
                .collect(),
        )
    }

    #[inline]
    fn rank0_local(&self, node: WtNode, i: usize) -> usize {
        let bits = &self.levels[node.level];
        bits.rank0(node.start + i) - bits.rank0(node.start)
    }

    #[inline]
    fn rank1_local(&self, node: WtNode, i: usize) -> usize {
        i - self.rank0_local(node, i)
    }

    /// Left and right children of an internal node.
    pub fn children(&self, node: WtNode) -> Option<(WtNode, WtNode)> {
        if node.is_leaf() {
            return None;
        }
        let zeros = self.rank0_local(node, node.len);
        let mid = node.mid();
        let left = WtNode {
            level: node.level + 1,
            start: node.start,
            len: zeros,
            lo: node.lo,
            hi: mid,
        };
        let right = WtNode {
            level: node.level + 1,
            start: node.start + zeros,
            len: node.len - zeros,
            lo: mid + 1,
            hi: node.hi,
        };
        Some((left, right))
    }

    /// Maps a node-local interval to the left and right children.
    #[inline]
    pub(crate) fn split(&self, node: WtNode, r: &Range<usize>) -> (Range<usize>, Range<usize>) {
        if r.is_empty() {
            return (0..0, 0..0);
        }
        let (z0, z1) = (
            self.rank0_local(node, r.start),
            self.rank0_local(node, r.end),
        );
        (z0..z1, (r.start - z0)..(r.end - z1))
    }

    /// Projects a node-local interval into the node's children. Returns the
    /// child nodes paired with the projected intervals; empty intervals come
    /// back as `0..0`.
    pub fn project(&self, node: WtNode, r: Range<usize>) -> Result<Projection, WaveletError> {
        if !r.is_empty() && r.end > node.len {
            return Err(WaveletError::OutOfRange {
                pos: r.end - 1,
                len: node.len,
            });
        }
        let (left, right) = self.children(node).ok_or(WaveletError::LeafNode)?;
        let (l, rr) = self.split(node, &r);
        Ok(((left, l), (right, rr)))
    }

    /// `D[i]`.
    pub fn access(&self, i: usize) -> Result<DocId, WaveletError> {
        if i >= self.len {
            return Err(WaveletError::OutOfRange {
                pos: i,
                len: self.len,
            });
        }
        Ok(self.access_unchecked(i))
    }

    pub(crate) fn access_unchecked(&self, mut i: usize) -> DocId {
        let mut node = self.root();
        while let Some((left, right)) = self.children(node) {
            if self.levels[node.level].get(node.start + i) {
                i = self.rank1_local(node, i);
                node = right;
            } else {
                i = self.rank0_local(node, i);
                node = left;
            }
        }
        DocId(node.lo)
    }

    /// Occurrences of `doc` in `D[0..i)`.
    pub fn rank(&self, doc: DocId, i: usize) -> Result<usize, WaveletError> {
        self.doc_freq(doc, 0..i)
    }

    /// Occurrences of `doc` in `D[range]`. An empty range yields 0.
    pub fn doc_freq(&self, doc: DocId, range: Range<usize>) -> Result<usize, WaveletError> {
        if range.is_empty() {
            return Ok(0);
        }
        if range.end > self.len {
            return Err(WaveletError::OutOfRange {
                pos: range.end - 1,
                len: self.len,
            });
        }
        if doc.0 == 0 || doc.0 > self.d {
            return Ok(0);
        }
        Ok(self.doc_freq_unchecked(doc, range))
    }

    pub(crate) fn doc_freq_unchecked(&self, doc: DocId, mut r: Range<usize>) -> usize {
        let mut node = self.root();
        while !node.is_leaf() && !r.is_empty() {
            let (left, right) = self.children(node).unwrap();
            let (l, rr) = self.split(node, &r);
            if doc.0 <= node.mid() {
                node = left;
                r = l;
            } else {
                node = right;
                r = rr;
            }
        }
        r.len()
    }

    /// The `k` most frequent documents in `D[range]` with exact frequencies,
    /// most frequent first and ties toward lower ids.
    pub fn greedy_topk(
        &self,
        range: Range<usize>,
        k: usize,
    ) -> Result<Vec<(DocId, usize)>, WaveletError> {
        let mut stats = TraversalStats::default();
        self.greedy_topk_counted(range, k, &mut stats)
    }

    pub(crate) fn greedy_topk_counted(
        &self,
        range: Range<usize>,
        k: usize,
        stats: &mut TraversalStats,
    ) -> Result<Vec<(DocId, usize)>, WaveletError> {
        if range.end > self.len {
            return Err(WaveletError::OutOfRange {
                pos: range.end - 1,
                len: self.len,
            });
        }
        let mut out = Vec::with_capacity(k.min(self.d as usize));
        if range.is_empty() || k == 0 {
            return Ok(out);
        }
        // Longest interval first; equal lengths favor the lower symbol range,
        // which yields leaves in (frequency desc, doc asc) order.
        let mut queue = BinaryHeap::new();
        queue.push((range.len(), Reverse(1u32), Frame(self.root(), range)));
        while let Some((_, _, Frame(node, r))) = queue.pop() {
            stats.nodes_visited += 1;
            if node.is_leaf() {
                out.push((DocId(node.lo), r.len()));
                stats.emitted += 1;
                if out.len() == k {
                    break;
                }
                continue;
            }
            let (left, right) = self.children(node).unwrap();
            let (l, rr) = self.split(node, &r);
            if !l.is_empty() {
                queue.push((l.len(), Reverse(left.lo), Frame(left, l)));
            }
            if !rr.is_empty() {
                queue.push((rr.len(), Reverse(right.lo), Frame(right, rr)));
            }
        }
        Ok(out)
    }

    /// Total size of the level bitmaps and their rank directories, in bits.
    pub fn size_in_bits(&self) -> usize {
        self.levels.iter().map(|l| l.size_in_bits()).sum()
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> io::Result<()> {
        out.write_u64::<LittleEndian>(self.len as u64)?;
        out.write_u64::<LittleEndian>(self.d as u64)?;
        out.write_u64::<LittleEndian>(self.levels.len() as u64)?;
        for level in &self.levels {
            level.write_to(out)?;
        }
        Ok(())
    }

    pub fn read_from<R: Read>(input: &mut R) -> io::Result<Self> {
        let len = read_len(input)?;
        let d = u32::try_from(read_len(input)?).map_err(|_| invalid("document count too large"))?;
        if d == 0 {
            return Err(invalid("wavelet tree with no symbols"));
        }
        let height = read_len(input)?;
        if height != height_for(d) {
            return Err(invalid("wavelet tree height does not match its alphabet"));
        }
        let mut levels = Vec::with_capacity(height);
        for _ in 0..height {
            let level = RankBitVector::read_from(input)?;
            if level.len() != len {
                return Err(invalid("wavelet level length mismatch"));
            }
            levels.push(level);
        }
        Ok(Self { levels, len, d })
    }
}

/// Heap payload; ordering is decided entirely by the key fields before it.
#[derive(Debug)]
pub(crate) struct Frame<T>(pub(crate) WtNode, pub(crate) T);

impl<T> PartialEq for Frame<T> {
    fn eq(&self, _: &Self) -> bool {
        true
    }
}
impl<T> Eq for Frame<T> {}
impl<T> PartialOrd for Frame<T> {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl<T> Ord for Frame<T> {
    fn cmp(&self, _: &Self) -> std::cmp::Ordering {
        std::cmp::Ordering::Equal
    }
}

fn height_for(d: u32) -> usize {
    (u32::BITS - (d - 1).leading_zeros()) as usize
}
