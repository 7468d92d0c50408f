//! Level-order unary degree sequence (LOUDS) trees.
//!
//! Nodes are visited in level order and each one with `c` children appends
//! `1^c 0`. The stored sequence is prefixed with a `10` pseudo-root so the
//! navigation formulas need no special case for the real root, which
//! therefore starts at bit position 2. A node handle is the bit position
//! where its run begins; `node_index` turns it into a dense level-order
//! index for side arrays.

use std::collections::VecDeque;
use std::io::{self, Read, Write};

use thiserror::Error;

use crate::bits::{invalid, BitBuf, RankBitVector};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LoudsError {
    #[error("cannot encode an empty tree")]
    EmptyTree,
    #[error("bit position {0} does not start a node")]
    InvalidHandle(usize),
    /// A child list names a missing or twice-parented node, or a raw bit
    /// sequence goes wrong at this position.
    #[error("malformed tree at node or bit position {0}")]
    MalformedTree(usize),
}

/// An explicit ordinal tree rooted at node 0.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct OrdinalTree {
    pub children: Vec<Vec<usize>>,
}

impl OrdinalTree {
    pub fn len(&self) -> usize {
        self.children.len()
    }

    pub fn is_empty(&self) -> bool {
        self.children.is_empty()
    }

    /// Node ids in level order, checking that every node is reached once.
    pub fn level_order(&self) -> Result<Vec<usize>, LoudsError> {
        let n = self.children.len();
        if n == 0 {
            return Err(LoudsError::EmptyTree);
        }
        let mut seen = vec![false; n];
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([0usize]);
        seen[0] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &c in &self.children[v] {
                if c >= n || seen[c] {
                    return Err(LoudsError::MalformedTree(c));
                }
                seen[c] = true;
                queue.push_back(c);
            }
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(LoudsError::MalformedTree(missing));
        }
        Ok(order)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct LoudsNode(usize);

impl LoudsNode {
    pub fn position(self) -> usize {
        self.0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoudsTree {
    bits: RankBitVector,
}

impl LoudsTree {
    pub fn encode(tree: &OrdinalTree) -> Result<Self, LoudsError> {
        Ok(Self::encode_with_order(tree)?.0)
    }

    /// Encodes the tree and also returns its level order, so that
    /// `order[node_index(v)]` is the original id of `v`.
    pub fn encode_with_order(tree: &OrdinalTree) -> Result<(Self, Vec<usize>), LoudsError> {
        let order = tree.level_order()?;
        let mut bits = BitBuf::with_capacity(2 * tree.len() + 1);
        bits.push(true);
        bits.push(false);
        for &v in &order {
            for _ in 0..tree.children[v].len() {
                bits.push(true);
            }
            bits.push(false);
        }
        Ok((
            Self {
                bits: RankBitVector::new(bits),
            },
            order,
        ))
    }

    pub fn from_bits(bits: RankBitVector) -> Result<Self, LoudsError> {
        // Well-formed: starts with the pseudo-root, one more zero than ones
        // overall, and every prefix has no more ones than zeros + 1.
        if bits.len() < 3
            || !bits.get(0)
            || bits.get(1)
            || bits.count_zeros() != bits.count_ones() + 1
        {
            return Err(LoudsError::MalformedTree(0));
        }
        let mut ones = 0usize;
        let mut zeros = 0usize;
        for (p, b) in bits.iter().enumerate() {
            if b {
                ones += 1;
            } else {
                zeros += 1;
                if ones < zeros && p + 1 != bits.len() {
                    return Err(LoudsError::MalformedTree(p));
                }
            }
        }
        Ok(Self { bits })
    }

    pub fn bits(&self) -> &RankBitVector {
        &self.bits
    }

    /// The degree sequence without the pseudo-root prefix.
    pub fn degree_sequence(&self) -> String {
        self.bits
            .iter()
            .skip(2)
            .map(|b| if b { '1' } else { '0' })
            .collect()
    }

    pub fn node_count(&self) -> usize {
        self.bits.count_zeros() - 1
    }

    pub fn root(&self) -> LoudsNode {
        LoudsNode(2)
    }

    /// Validates a raw bit position as a node handle.
    pub fn handle(&self, pos: usize) -> Result<LoudsNode, LoudsError> {
        if pos < 2 || pos >= self.bits.len() || self.bits.get(pos - 1) {
            return Err(LoudsError::InvalidHandle(pos));
        }
        Ok(LoudsNode(pos))
    }

    /// Dense level-order index, `0..node_count`.
    #[inline]
    pub fn node_index(&self, v: LoudsNode) -> usize {
        self.bits.rank0(v.0) - 1
    }

    /// Dense level-order rank, `1..=node_count`.
    pub fn node_rank(&self, v: LoudsNode) -> usize {
        self.node_index(v) + 1
    }

    /// The node with the given level-order index.
    pub fn node_at(&self, index: usize) -> Option<LoudsNode> {
        (index < self.node_count()).then(|| LoudsNode(self.bits.select0(index) + 1))
    }

    pub fn is_leaf(&self, v: LoudsNode) -> bool {
        !self.bits.get(v.0)
    }

    #[inline]
    pub fn child_count(&self, v: LoudsNode) -> usize {
        self.bits.select0(self.bits.rank0(v.0)) - v.0
    }

    /// The `t`-th child (0-based) of `v`.
    #[inline]
    pub fn child(&self, v: LoudsNode, t: usize) -> Option<LoudsNode> {
        if t >= self.child_count(v) {
            return None;
        }
        let p = v.0 + t;
        Some(LoudsNode(self.bits.select0(self.bits.rank1(p)) + 1))
    }

    pub fn children(&self, v: LoudsNode) -> impl Iterator<Item = LoudsNode> + '_ {
        (0..self.child_count(v)).map(move |t| self.child(v, t).unwrap())
    }

    pub fn parent(&self, v: LoudsNode) -> Option<LoudsNode> {
        let index = self.node_index(v);
        if index == 0 {
            return None;
        }
        let one = self.bits.select1(index);
        let zeros_before = self.bits.rank0(one);
        Some(LoudsNode(self.bits.select0(zeros_before - 1) + 1))
    }

    /// Rebuilds the explicit tree, numbering nodes in level order.
    pub fn decode(&self) -> OrdinalTree {
        let n = self.node_count();
        let mut children = vec![Vec::new(); n];
        for (i, slot) in children.iter_mut().enumerate() {
            let v = self.node_at(i).unwrap();
            *slot = self.children(v).map(|c| self.node_index(c)).collect();
        }
        OrdinalTree { children }
    }

    pub fn size_in_bits(&self) -> usize {
        self.bits.size_in_bits()
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> io::Result<()> {
        self.bits.write_to(out)
    }

    pub fn read_from<R: Read>(input: &mut R) -> io::Result<Self> {
        let bits = RankBitVector::read_from(input)?;
        Self::from_bits(bits).map_err(|e| invalid(&e.to_string()))
    }
}
