//! Sparsified generalized suffix tree with precomputed top-k candidates.
//!
//! For every power of two `k <= k_max` the suffix-array leaves
//! `0, g, 2g, ...` with `g = k * g_prime` are sampled, and the lowest common
//! ancestor of each consecutive pair is marked; those nodes form `tau_k`.
//! Since the samples for `2k` are a subset of those for `k`, `tau_2k` is a
//! subset of `tau_k`, so only `tau = tau_1` carries node data: the interval,
//! the class (largest `k` whose tree holds the node) and the top-class
//! candidate table. Each `tau_k`, `k >= 2`, is a bare LOUDS topology whose
//! nodes refer back into `tau`.

mod lcp;

use std::collections::BTreeMap;
use std::fmt;
use std::io::{self, Read, Write};
use std::ops::Range;
use std::str::FromStr;

use byteorder::{LittleEndian, ReadBytesExt, WriteBytesExt};
use thiserror::Error;

use crate::bits::{invalid, read_len, read_u64s};
use crate::corpus::{Corpus, DocId};
use crate::louds::{LoudsNode, LoudsTree, OrdinalTree};
use crate::suffix::{lcp_array, SuffixIndex};
use crate::wavelet::WaveletTree;

use self::lcp::LcpIntervals;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SgstError {
    #[error("g' = {g_prime} leaves fewer than two sampled leaves in a suffix array of {n} cells")]
    GPrimeTooLarge { g_prime: usize, n: usize },
    #[error("g' must be at least 1")]
    ZeroGPrime,
    #[error("k_max must be a power of two, got {0}")]
    BadKMax(usize),
    #[error("no tree was precomputed for k* = {0}")]
    KStarNotPrecomputed(usize),
    #[error("unknown variant `{0}` (expected light or xlight)")]
    UnknownVariant(String),
}

/// Storage layout of the candidate tables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Variant {
    /// Candidate documents and their frequencies.
    #[default]
    Light,
    /// Candidate documents only; frequencies are recomputed on the wavelet tree.
    Xlight,
}

impl Variant {
    pub fn tag(self) -> u64 {
        match self {
            Variant::Light => 0,
            Variant::Xlight => 1,
        }
    }

    pub fn from_tag(tag: u64) -> Option<Self> {
        match tag {
            0 => Some(Variant::Light),
            1 => Some(Variant::Xlight),
            _ => None,
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Variant::Light => "light",
            Variant::Xlight => "xlight",
        })
    }
}

impl FromStr for Variant {
    type Err = SgstError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "light" => Ok(Variant::Light),
            "xlight" => Ok(Variant::Xlight),
            _ => Err(SgstError::UnknownVariant(s.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SgstParams {
    pub g_prime: usize,
    pub k_max: usize,
    pub variant: Variant,
}

impl Default for SgstParams {
    fn default() -> Self {
        Self {
            g_prime: 400,
            k_max: 16,
            variant: Variant::Light,
        }
    }
}

impl SgstParams {
    pub fn validate(&self) -> Result<(), SgstError> {
        if self.g_prime == 0 {
            return Err(SgstError::ZeroGPrime);
        }
        if !self.k_max.is_power_of_two() || self.k_max > 1 << 31 {
            return Err(SgstError::BadKMax(self.k_max));
        }
        Ok(())
    }

    /// Precomputed `k` values: `1, 2, 4, ..., k_max`.
    pub fn levels(&self) -> impl Iterator<Item = usize> {
        let k_max = self.k_max;
        (0..).map(|e| 1usize << e).take_while(move |&k| k <= k_max)
    }
}

/// A node of `tau`: its suffix-array interval, class and table position.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MarkedNode {
    /// Level-order index in `tau`.
    pub index: usize,
    pub interval: Range<usize>,
    pub class: usize,
}

/// One `tau_k` topology. `refs` is empty for `tau` itself.
#[derive(Debug, Clone, PartialEq, Eq)]
struct Skeleton {
    tree: Option<LoudsTree>,
    refs: Vec<u32>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sgst {
    params: SgstParams,
    // skeletons[j] is tau_{2^j}; skeletons[0] is tau.
    skeletons: Vec<Skeleton>,
    starts: Vec<usize>,
    ends: Vec<usize>,
    classes: Vec<u32>,
    // Candidate tables stored back to back; table i is offsets[i]..offsets[i+1].
    offsets: Vec<usize>,
    cand_docs: Vec<u32>,
    cand_freqs: Vec<usize>,
}

impl Sgst {
    /// An SGST with no marked nodes; every query falls back.
    pub fn empty(params: SgstParams) -> Self {
        let levels = params.levels().count();
        Self {
            params,
            skeletons: vec![
                Skeleton {
                    tree: None,
                    refs: Vec::new()
                };
                levels
            ],
            starts: Vec::new(),
            ends: Vec::new(),
            classes: Vec::new(),
            offsets: vec![0],
            cand_docs: Vec::new(),
            cand_freqs: Vec::new(),
        }
    }

    pub fn build(
        corpus: &Corpus,
        suffixes: &SuffixIndex,
        wavelet: &WaveletTree,
        params: SgstParams,
    ) -> Result<Self, SgstError> {
        params.validate()?;
        let n = suffixes.len();
        if n <= params.g_prime {
            return Err(SgstError::GPrimeTooLarge {
                g_prime: params.g_prime,
                n,
            });
        }
        let tree = LcpIntervals::new(lcp_array(corpus.text(), suffixes.suffix_array()));

        // Lowest common ancestors of consecutive samples, per level.
        let mut marks: BTreeMap<(usize, std::cmp::Reverse<usize>), u64> = BTreeMap::new();
        let mut per_level: Vec<Vec<Range<usize>>> = Vec::new();
        for (j, k) in params.levels().enumerate() {
            let g = k.saturating_mul(params.g_prime);
            let mut level = Vec::new();
            let mut a = 0usize;
            while let Some(b) = a.checked_add(g).filter(|&b| b < n) {
                let iv = tree.interval(tree.lca(a, b));
                let key = (iv.start, std::cmp::Reverse(iv.end));
                let class = marks.entry(key).or_insert(0);
                if *class & (1 << j) == 0 {
                    *class |= 1 << j;
                    level.push(iv);
                }
                a = b;
            }
            per_level.push(level);
        }

        // tau: every marked node (the nodes of tau_1), with classes.
        let tau_nodes: Vec<Range<usize>> = marks.keys().map(|&(s, e)| s..e.0).collect();
        let tau_tree = nest(&tau_nodes);
        let (tau_louds, order) = LoudsTree::encode_with_order(&tau_tree).expect("tau is non-empty");
        let mut starts = Vec::with_capacity(order.len());
        let mut ends = Vec::with_capacity(order.len());
        let mut classes = Vec::with_capacity(order.len());
        let mut index_of = BTreeMap::new();
        for (index, &t) in order.iter().enumerate() {
            let iv = &tau_nodes[t];
            let bitsets = marks[&(iv.start, std::cmp::Reverse(iv.end))];
            // Nested sampling makes membership a prefix of the levels.
            debug_assert!(
                (bitsets + 1).is_power_of_two(),
                "tau_2k must be a subset of tau_k"
            );
            let class = 1u32 << (u64::BITS - 1 - bitsets.leading_zeros());
            starts.push(iv.start);
            ends.push(iv.end);
            classes.push(class);
            index_of.insert((iv.start, iv.end), index as u32);
        }

        let mut skeletons = vec![Skeleton {
            tree: Some(tau_louds),
            refs: Vec::new(),
        }];
        for level in per_level.iter().skip(1) {
            if level.is_empty() {
                skeletons.push(Skeleton {
                    tree: None,
                    refs: Vec::new(),
                });
                continue;
            }
            let mut sorted = level.clone();
            sorted.sort_by_key(|iv| (iv.start, std::cmp::Reverse(iv.end)));
            let t = nest(&sorted);
            let (louds, order) = LoudsTree::encode_with_order(&t).expect("non-empty level");
            let refs = order
                .iter()
                .map(|&v| {
                    let iv = &sorted[v];
                    index_of[&(iv.start, iv.end)]
                })
                .collect();
            skeletons.push(Skeleton {
                tree: Some(louds),
                refs,
            });
        }

        let mut offsets = Vec::with_capacity(starts.len() + 1);
        let mut cand_docs = Vec::new();
        let mut cand_freqs = Vec::new();
        offsets.push(0);
        for i in 0..starts.len() {
            let table = wavelet
                .greedy_topk(starts[i]..ends[i], classes[i] as usize)
                .expect("marked intervals lie inside the document array");
            for (doc, freq) in table {
                cand_docs.push(doc.0);
                if params.variant == Variant::Light {
                    cand_freqs.push(freq);
                }
            }
            offsets.push(cand_docs.len());
        }

        Ok(Self {
            params,
            skeletons,
            starts,
            ends,
            classes,
            offsets,
            cand_docs,
            cand_freqs,
        })
    }

    pub fn params(&self) -> SgstParams {
        self.params
    }

    pub fn variant(&self) -> Variant {
        self.params.variant
    }

    /// Number of nodes in `tau`.
    pub fn node_count(&self) -> usize {
        self.starts.len()
    }

    /// Number of nodes in `tau_k`.
    pub fn level_node_count(&self, k: usize) -> Result<usize, SgstError> {
        let s = self.skeleton(k)?;
        Ok(s.tree.as_ref().map_or(0, |t| t.node_count()))
    }

    pub fn node(&self, index: usize) -> Option<MarkedNode> {
        (index < self.starts.len()).then(|| MarkedNode {
            index,
            interval: self.starts[index]..self.ends[index],
            class: self.classes[index] as usize,
        })
    }

    pub fn nodes(&self) -> impl Iterator<Item = MarkedNode> + '_ {
        (0..self.node_count()).map(|i| self.node(i).unwrap())
    }

    /// Intervals of the nodes of `tau_k`, in level order.
    pub fn level_intervals(&self, k: usize) -> Result<Vec<Range<usize>>, SgstError> {
        let s = self.skeleton(k)?;
        let Some(tree) = &s.tree else {
            return Ok(Vec::new());
        };
        Ok((0..tree.node_count())
            .map(|i| {
                let t = if s.refs.is_empty() {
                    i
                } else {
                    s.refs[i] as usize
                };
                self.starts[t]..self.ends[t]
            })
            .collect())
    }

    /// Parent links of `tau_k` as level-order indices.
    pub fn level_parents(&self, k: usize) -> Result<Vec<Option<usize>>, SgstError> {
        let s = self.skeleton(k)?;
        let Some(tree) = &s.tree else {
            return Ok(Vec::new());
        };
        Ok((0..tree.node_count())
            .map(|i| {
                tree.parent(tree.node_at(i).unwrap())
                    .map(|p| tree.node_index(p))
            })
            .collect())
    }

    fn skeleton(&self, k: usize) -> Result<&Skeleton, SgstError> {
        if !k.is_power_of_two() || k > self.params.k_max {
            return Err(SgstError::KStarNotPrecomputed(k));
        }
        Ok(&self.skeletons[k.trailing_zeros() as usize])
    }

    /// Walks down `tau_{k_star}` from the root and returns the first node
    /// whose interval lies inside `query`, or `None` if the walk leaves the
    /// tree without finding one.
    pub fn find_locus(
        &self,
        k_star: usize,
        query: Range<usize>,
    ) -> Result<Option<MarkedNode>, SgstError> {
        let s = self.skeleton(k_star)?;
        let Some(tree) = &s.tree else {
            return Ok(None);
        };
        if query.is_empty() {
            return Ok(None);
        }
        let tau_index = |v: LoudsNode| {
            let i = tree.node_index(v);
            if s.refs.is_empty() {
                i
            } else {
                s.refs[i] as usize
            }
        };
        let within = |t: usize| query.start <= self.starts[t] && self.ends[t] <= query.end;
        let covers = |t: usize| self.starts[t] <= query.start && query.end <= self.ends[t];

        let mut v = tree.root();
        loop {
            let t = tau_index(v);
            if within(t) {
                return Ok(self.node(t));
            }
            if !covers(t) {
                return Ok(None);
            }
            // Children are ordered and disjoint: find the first one ending
            // after the query starts.
            let count = tree.child_count(v);
            let (mut lo, mut hi) = (0, count);
            while lo < hi {
                let mid = (lo + hi) / 2;
                let c = tau_index(tree.child(v, mid).unwrap());
                if self.ends[c] <= query.start {
                    lo = mid + 1;
                } else {
                    hi = mid;
                }
            }
            if lo == count {
                return Ok(None);
            }
            let child = tree.child(v, lo).unwrap();
            if self.starts[tau_index(child)] >= query.end {
                return Ok(None);
            }
            v = child;
        }
    }

    /// Candidate table of a node with frequencies relative to its interval.
    /// Without stored frequencies they are recomputed on the wavelet tree.
    pub fn candidates_of(&self, node: &MarkedNode, wavelet: &WaveletTree) -> Vec<(DocId, usize)> {
        let table = self.offsets[node.index]..self.offsets[node.index + 1];
        let docs = &self.cand_docs[table.clone()];
        match self.params.variant {
            Variant::Light => docs
                .iter()
                .zip(&self.cand_freqs[table])
                .map(|(&d, &f)| (DocId(d), f))
                .collect(),
            Variant::Xlight => docs
                .iter()
                .map(|&d| {
                    let doc = DocId(d);
                    (doc, wavelet.doc_freq_unchecked(doc, node.interval.clone()))
                })
                .collect(),
        }
    }

    /// Approximate size: topologies, intervals, classes, table pointers and
    /// candidate tables, in bits, counting integers at their natural widths.
    pub fn size_in_bits(&self) -> usize {
        let n = self.node_count().max(1);
        let width = |max: usize| (usize::BITS - max.leading_zeros()).max(1) as usize;
        let pos_bits = width(self.ends.iter().copied().max().unwrap_or(1));
        let doc_bits = width(self.cand_docs.iter().copied().max().unwrap_or(1) as usize);
        let topo: usize = self
            .skeletons
            .iter()
            .map(|s| s.tree.as_ref().map_or(0, |t| t.size_in_bits()) + s.refs.len() * width(n))
            .sum();
        topo + self.starts.len() * 2 * pos_bits
            + self.classes.len() * width(self.params.k_max.trailing_zeros() as usize + 1)
            + self.offsets.len() * width(self.cand_docs.len().max(1))
            + self.cand_docs.len() * doc_bits
            + self.cand_freqs.len() * pos_bits
    }

    pub fn write_to<W: Write>(&self, out: &mut W) -> io::Result<()> {
        let p = &self.params;
        out.write_u64::<LittleEndian>(p.g_prime as u64)?;
        out.write_u64::<LittleEndian>(p.k_max as u64)?;
        out.write_u64::<LittleEndian>(p.variant.tag())?;
        out.write_u64::<LittleEndian>(self.skeletons.len() as u64)?;
        for s in &self.skeletons {
            match &s.tree {
                None => out.write_u64::<LittleEndian>(0)?,
                Some(t) => {
                    out.write_u64::<LittleEndian>(1)?;
                    t.write_to(out)?;
                }
            }
            write_usizes(out, s.refs.iter().map(|&r| r as usize), s.refs.len())?;
        }
        write_usizes(out, self.starts.iter().copied(), self.starts.len())?;
        write_usizes(out, self.ends.iter().copied(), self.ends.len())?;
        write_usizes(
            out,
            self.classes.iter().map(|&c| c as usize),
            self.classes.len(),
        )?;
        write_usizes(out, self.offsets.iter().copied(), self.offsets.len())?;
        write_usizes(
            out,
            self.cand_docs.iter().map(|&d| d as usize),
            self.cand_docs.len(),
        )?;
        write_usizes(out, self.cand_freqs.iter().copied(), self.cand_freqs.len())?;
        Ok(())
    }

    pub fn read_from<R: Read>(input: &mut R) -> io::Result<Self> {
        let g_prime = read_len(input)?;
        let k_max = read_len(input)?;
        let variant = Variant::from_tag(input.read_u64::<LittleEndian>()?)
            .ok_or_else(|| invalid("unknown variant tag"))?;
        let params = SgstParams {
            g_prime,
            k_max,
            variant,
        };
        params.validate().map_err(|e| invalid(&e.to_string()))?;
        let levels = read_len(input)?;
        if levels != params.levels().count() {
            return Err(invalid("level count does not match k_max"));
        }
        let mut skeletons = Vec::with_capacity(levels);
        for _ in 0..levels {
            let tree = match input.read_u64::<LittleEndian>()? {
                0 => None,
                1 => Some(LoudsTree::read_from(input)?),
                _ => return Err(invalid("bad topology flag")),
            };
            let refs = read_usizes(input)?.into_iter().map(|r| r as u32).collect();
            skeletons.push(Skeleton { tree, refs });
        }
        let starts = read_usizes(input)?;
        let ends = read_usizes(input)?;
        let classes: Vec<u32> = read_usizes(input)?.into_iter().map(|c| c as u32).collect();
        let offsets = read_usizes(input)?;
        let cand_docs: Vec<u32> = read_usizes(input)?.into_iter().map(|d| d as u32).collect();
        let cand_freqs = read_usizes(input)?;
        let sgst = Self {
            params,
            skeletons,
            starts,
            ends,
            classes,
            offsets,
            cand_docs,
            cand_freqs,
        };
        sgst.check_shape()?;
        Ok(sgst)
    }

    fn check_shape(&self) -> io::Result<()> {
        let n = self.starts.len();
        let tau_nodes = self.skeletons[0]
            .tree
            .as_ref()
            .map_or(0, |t| t.node_count());
        let ok = self.ends.len() == n
            && self.classes.len() == n
            && tau_nodes == n
            && self.offsets.len() == n + 1
            && self.offsets.windows(2).all(|w| w[0] <= w[1])
            && *self.offsets.last().unwrap() == self.cand_docs.len()
            && match self.params.variant {
                Variant::Light => self.cand_freqs.len() == self.cand_docs.len(),
                Variant::Xlight => self.cand_freqs.is_empty(),
            }
            && self.skeletons.iter().skip(1).all(|s| {
                s.tree.as_ref().map_or(0, |t| t.node_count()) == s.refs.len()
                    && s.refs.iter().all(|&r| (r as usize) < n)
            })
            && self.starts.iter().zip(&self.ends).all(|(s, e)| s < e);
        if ok {
            Ok(())
        } else {
            Err(invalid("inconsistent sampled suffix tree section"))
        }
    }
}

fn write_usizes<W: Write>(
    out: &mut W,
    values: impl Iterator<Item = usize>,
    len: usize,
) -> io::Result<()> {
    out.write_u64::<LittleEndian>(len as u64)?;
    for v in values {
        out.write_u64::<LittleEndian>(v as u64)?;
    }
    Ok(())
}

fn read_usizes<R: Read>(input: &mut R) -> io::Result<Vec<usize>> {
    let len = read_len(input)?;
    read_u64s(input, len)?
        .into_iter()
        .map(|v| usize::try_from(v).map_err(|_| invalid("value does not fit in memory")))
        .collect()
}

/// Builds the containment tree of a laminar family of intervals sorted by
/// `(start asc, end desc)`; node `i` is `sorted[i]` and the first interval
/// is the root.
fn nest(sorted: &[Range<usize>]) -> OrdinalTree {
    let mut children = vec![Vec::new(); sorted.len()];
    let mut stack: Vec<usize> = Vec::new();
    for (i, iv) in sorted.iter().enumerate() {
        while let Some(&top) = stack.last() {
            if sorted[top].end >= iv.end && sorted[top].start <= iv.start {
                break;
            }
            stack.pop();
        }
        match stack.last() {
            Some(&parent) => children[parent].push(i),
            None => assert_eq!(i, 0, "marked nodes must share one root"),
        }
        stack.push(i);
    }
    OrdinalTree { children }
}
