mod common;

use std::collections::BTreeSet;
use std::ops::Range;

use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use topk_core::{DocId, IndexParams, QueryOptions, Strategy, TopKIndex, Variant};

fn common_prefix<'a>(a: &'a [u8], b: &[u8]) -> &'a [u8] {
    let l = a.iter().zip(b).take_while(|(x, y)| x == y).count();
    &a[..l]
}

/// Intervals that sampling every `g`-th suffix-array slot should mark:
/// for each consecutive pair of samples, the slots sharing their longest
/// common prefix.
fn expected_level(text: &[u8], sa: &[usize], g: usize) -> BTreeSet<(usize, usize)> {
    let mut out = BTreeSet::new();
    let mut a = 0;
    while a + g < sa.len() {
        let b = a + g;
        let p = common_prefix(&text[sa[a]..], &text[sa[b]..]);
        let r = if p.is_empty() {
            0..sa.len()
        } else {
            common::occurrence_range(text, sa, p)
        };
        out.insert((r.start, r.end));
        a = b;
    }
    out
}

fn naive_table(d: &[u32], iv: Range<usize>, k: usize) -> Vec<(DocId, usize)> {
    let mut counts = std::collections::BTreeMap::new();
    for &v in &d[iv] {
        *counts.entry(v).or_insert(0usize) += 1;
    }
    let mut v: Vec<(DocId, usize)> = counts.into_iter().map(|(d, c)| (DocId(d), c)).collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    v.truncate(k);
    v
}

fn set(v: &[Range<usize>]) -> BTreeSet<(usize, usize)> {
    v.iter().map(|r| (r.start, r.end)).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn sampled_tree_matches_oracle(seed in any::<u64>(), g_prime in 1usize..6, log_k in 0u32..4, sigma in 2usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let docs = common::random_docs(&mut rng, 8, 300, &b"abcd"[..sigma]);
        let k_max = 1usize << log_k;
        let build = |variant| TopKIndex::from_documents(&docs, IndexParams {
            g_prime, k_max, variant, ..IndexParams::default()
        }).unwrap();
        let light = build(Variant::Light);
        let xlight = build(Variant::Xlight);
        let text = light.corpus().text();
        let sa = common::suffix_array(text);
        prop_assert_eq!(light.suffix_array(), sa.as_slice());
        let owner = common::owners(text);
        let d: Vec<u32> = sa.iter().map(|&p| owner[p]).collect();
        let sg = light.sgst();

        let mut previous: Option<BTreeSet<(usize, usize)>> = None;
        let mut k = 1;
        while k <= k_max {
            let got = sg.level_intervals(k).unwrap();
            let got_set = set(&got);
            prop_assert_eq!(got.len(), got_set.len(), "duplicate node in tau_{}", k);
            let want = if sa.len() > g_prime { expected_level(text, &sa, k * g_prime) } else { BTreeSet::new() };
            prop_assert_eq!(&got_set, &want, "tau_{}", k);
            if let Some(prev) = &previous {
                prop_assert!(got_set.is_subset(prev), "tau_{} not inside tau_{}", k, k / 2);
            }
            // Parents are the smallest strictly enclosing node of the level.
            for (i, p) in sg.level_parents(k).unwrap().into_iter().enumerate() {
                let smallest = got.iter().enumerate()
                    .filter(|(j, r)| *j != i && r.start <= got[i].start && got[i].end <= r.end)
                    .min_by_key(|(_, r)| r.len())
                    .map(|(j, _)| j);
                prop_assert_eq!(p, smallest);
            }
            previous = Some(got_set);
            k *= 2;
        }

        prop_assert_eq!(sg.node_count(), xlight.sgst().node_count());
        for node in sg.nodes() {
            let mut highest = 0;
            let mut k = 1;
            while k <= k_max {
                if sg.level_intervals(k).unwrap().contains(&node.interval) {
                    highest = k;
                }
                k *= 2;
            }
            prop_assert_eq!(node.class, highest);
            let want = naive_table(&d, node.interval.clone(), node.class);
            prop_assert_eq!(sg.candidates_of(&node, light.wavelet()), want.clone());
            let xnode = xlight.sgst().node(node.index).unwrap();
            prop_assert_eq!(&xnode, &node);
            prop_assert_eq!(xlight.sgst().candidates_of(&xnode, xlight.wavelet()), want);
        }
        prop_assert!(xlight.sgst().size_in_bits() <= sg.size_in_bits());
    }

    #[test]
    fn reported_frequencies_are_exact(seed in any::<u64>(), g_prime in 1usize..4, k in 1usize..12) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let docs = common::random_docs(&mut rng, 12, 400, b"ab");
        let idx = TopKIndex::from_documents(&docs, IndexParams { g_prime, ..IndexParams::default() }).unwrap();
        for p in common::substrings(&docs, 1, 5) {
            let freqs = common::frequencies(&docs, &p);
            for strategy in Strategy::ALL {
                let r = idx.query(&p, k, QueryOptions { strategy, use_sgst: true }).unwrap();
                prop_assert_eq!(r.hits.len(), k.min(freqs.len()));
                for w in r.hits.windows(2) {
                    prop_assert!(w[0].1 > w[1].1 || (w[0].1 == w[1].1 && w[0].0 < w[1].0));
                }
                for (doc, f) in &r.hits {
                    prop_assert_eq!(freqs.get(&doc.0), Some(f));
                }
                if let Some(locus) = &r.stats.locus {
                    prop_assert_eq!(r.stats.uncovered, r.stats.interval.len() - locus.len());
                    if strategy == Strategy::Select {
                        prop_assert_eq!(r.stats.positions_scanned, r.stats.uncovered);
                    }
                }
            }
        }
    }
}
