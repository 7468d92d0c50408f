//! Brute-force reference implementations shared by the integration tests.
//! Nothing here calls into the index structures.

#![allow(dead_code)]

use std::collections::{BTreeSet, HashMap};

use rand::Rng;

/// Documents joined with a zero byte after each one.
pub fn concat(docs: &[Vec<u8>]) -> Vec<u8> {
    let mut t = Vec::new();
    for d in docs {
        t.extend_from_slice(d);
        t.push(0);
    }
    t
}

/// Suffix array by sorting all suffixes.
pub fn suffix_array(text: &[u8]) -> Vec<usize> {
    let mut sa: Vec<usize> = (0..text.len()).collect();
    sa.sort_by(|&a, &b| text[a..].cmp(&text[b..]));
    sa
}

/// 1-based document of every text position.
pub fn owners(text: &[u8]) -> Vec<u32> {
    let mut doc = 1;
    text.iter()
        .map(|&c| {
            let d = doc;
            if c == 0 {
                doc += 1;
            }
            d
        })
        .collect()
}

/// Range of suffix-array slots whose suffix starts with `p`, by scanning.
pub fn occurrence_range(text: &[u8], sa: &[usize], p: &[u8]) -> std::ops::Range<usize> {
    let hits: Vec<usize> = (0..sa.len())
        .filter(|&i| text[sa[i]..].starts_with(p))
        .collect();
    match (hits.first(), hits.last()) {
        (Some(&a), Some(&b)) => a..b + 1,
        _ => 0..0,
    }
}

pub fn count(doc: &[u8], p: &[u8]) -> usize {
    if p.len() > doc.len() {
        return 0;
    }
    doc.windows(p.len()).filter(|w| *w == p).count()
}

/// Per-document occurrence counts of `p`, keyed by 1-based id.
pub fn frequencies(docs: &[Vec<u8>], p: &[u8]) -> HashMap<u32, usize> {
    docs.iter()
        .enumerate()
        .map(|(i, d)| (i as u32 + 1, count(d, p)))
        .filter(|&(_, c)| c > 0)
        .collect()
}

/// The `k` largest frequencies, descending.
pub fn topk_frequencies(docs: &[Vec<u8>], p: &[u8], k: usize) -> Vec<usize> {
    let mut f: Vec<usize> = frequencies(docs, p).into_values().collect();
    f.sort_unstable_by(|a, b| b.cmp(a));
    f.truncate(k);
    f
}

/// Top-k pairs, frequency descending then id ascending.
pub fn topk(docs: &[Vec<u8>], p: &[u8], k: usize) -> Vec<(u32, usize)> {
    let mut v: Vec<(u32, usize)> = frequencies(docs, p).into_iter().collect();
    v.sort_unstable_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    v.truncate(k);
    v
}

/// Every distinct substring of length `lo..=hi` that occurs in some document.
pub fn substrings(docs: &[Vec<u8>], lo: usize, hi: usize) -> Vec<Vec<u8>> {
    let mut set = BTreeSet::new();
    for d in docs {
        for m in lo..=hi {
            for w in d.windows(m) {
                set.insert(w.to_vec());
            }
        }
    }
    set.into_iter().collect()
}

/// Between 1 and `max_docs` non-empty documents, `max_total` symbols at
/// most, drawn uniformly from `alphabet`.
pub fn random_docs<R: Rng>(
    rng: &mut R,
    max_docs: usize,
    max_total: usize,
    alphabet: &[u8],
) -> Vec<Vec<u8>> {
    let d = rng.gen_range(1..=max_docs);
    let total = rng.gen_range(d..=max_total);
    let mut lens = vec![1usize; d];
    for _ in d..total {
        lens[rng.gen_range(0..d)] += 1;
    }
    lens.into_iter()
        .map(|l| {
            (0..l)
                .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                .collect()
        })
        .collect()
}

pub fn rank(bits: &[bool], bit: bool, i: usize) -> usize {
    bits[..i].iter().filter(|&&b| b == bit).count()
}

/// Position of the `k`-th (0-based) occurrence of `bit`.
pub fn select(bits: &[bool], bit: bool, k: usize) -> Option<usize> {
    bits.iter()
        .enumerate()
        .filter(|(_, &b)| b == bit)
        .nth(k)
        .map(|(i, _)| i)
}

/// Random tree of `n` nodes rooted at 0; each later node hangs from an
/// earlier one, so child lists come out in increasing id order.
pub fn random_tree<R: Rng>(rng: &mut R, n: usize) -> Vec<Vec<usize>> {
    let mut children = vec![Vec::new(); n];
    for v in 1..n {
        // Bias toward recent parents now and then for deep trees.
        let p = if rng.gen_bool(0.3) {
            rng.gen_range(v.saturating_sub(3)..v)
        } else {
            rng.gen_range(0..v)
        };
        children[p].push(v);
    }
    children
}

/// Breadth-first order of an explicit tree.
pub fn bfs(children: &[Vec<usize>]) -> Vec<usize> {
    let mut order = vec![0];
    let mut i = 0;
    while i < order.len() {
        order.extend(children[order[i]].iter().copied());
        i += 1;
    }
    order
}

/// `1^c 0` for every node in breadth-first order.
pub fn degree_sequence(children: &[Vec<usize>]) -> String {
    bfs(children)
        .into_iter()
        .map(|v| "1".repeat(children[v].len()) + "0")
        .collect()
}
