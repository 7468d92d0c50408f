//! Synthetic corpora, query sampling and the benchmark driver.

use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::corpus::SENTINEL;
use crate::engine::{QueryError, QueryOptions, Strategy, TopKIndex};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum WorkloadError {
    #[error("pattern length must be at least 1")]
    ZeroPatternLength,
    #[error("could not find a sentinel-free substring of length {0}")]
    NoValidPattern(usize),
    #[error("need at least one document and one symbol per document")]
    BadShape,
    #[error(transparent)]
    Query(#[from] QueryError),
}

/// `num_docs` random documents over `alphabet` with `total_len` symbols in
/// all, split at random cut points (every document non-empty).
pub fn synthetic_corpus(
    num_docs: usize,
    total_len: usize,
    alphabet: &[u8],
    seed: u64,
) -> Result<Vec<Vec<u8>>, WorkloadError> {
    if num_docs == 0 || total_len < num_docs || alphabet.is_empty() || alphabet.contains(&SENTINEL)
    {
        return Err(WorkloadError::BadShape);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut cuts: Vec<usize> = rand::seq::index::sample(&mut rng, total_len - 1, num_docs - 1)
        .into_iter()
        .map(|c| c + 1)
        .collect();
    cuts.sort_unstable();
    cuts.push(total_len);
    let mut prev = 0;
    Ok(cuts
        .into_iter()
        .map(|end| {
            let doc = (prev..end)
                .map(|_| alphabet[rng.gen_range(0..alphabet.len())])
                .collect();
            prev = end;
            doc
        })
        .collect())
}

/// Like [`synthetic_corpus`], but each symbol is followed by a fixed
/// preferred successor with probability `stickiness` and by a uniform
/// symbol otherwise. Frequent patterns then have one dominant extension,
/// which is what leaves cells uncovered around a locus; uniform text almost
/// never does.
pub fn markov_corpus(
    num_docs: usize,
    total_len: usize,
    alphabet: &[u8],
    stickiness: f64,
    seed: u64,
) -> Result<Vec<Vec<u8>>, WorkloadError> {
    if !(0.0..=1.0).contains(&stickiness) {
        return Err(WorkloadError::BadShape);
    }
    let mut docs = synthetic_corpus(num_docs, total_len, alphabet, seed)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9_7f4a_7c15);
    let mut successor: Vec<usize> = (0..alphabet.len()).collect();
    successor.shuffle(&mut rng);
    for doc in &mut docs {
        let mut prev = alphabet.iter().position(|&c| c == doc[0]).unwrap();
        for c in doc.iter_mut().skip(1) {
            prev = if rng.gen_bool(stickiness) {
                successor[prev]
            } else {
                rng.gen_range(0..alphabet.len())
            };
            *c = alphabet[prev];
        }
    }
    Ok(docs)
}

/// `count` substrings of length `len` taken at uniformly random text
/// positions. Draws that would cross a document boundary are redrawn.
pub fn sample_patterns(
    text: &[u8],
    count: usize,
    len: usize,
    seed: u64,
) -> Result<Vec<Vec<u8>>, WorkloadError> {
    if len == 0 {
        return Err(WorkloadError::ZeroPatternLength);
    }
    if count == 0 {
        return Ok(Vec::new());
    }
    if text.len() < len {
        return Err(WorkloadError::NoValidPattern(len));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let limit = 1000 * count.max(100);
    let mut out = Vec::with_capacity(count);
    for _ in 0..limit {
        let start = rng.gen_range(0..=text.len() - len);
        let w = &text[start..start + len];
        if !w.contains(&SENTINEL) {
            out.push(w.to_vec());
            if out.len() == count {
                return Ok(out);
            }
        }
    }
    Err(WorkloadError::NoValidPattern(len))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchConfig {
    pub num_queries: usize,
    pub pattern_len: usize,
    pub k: usize,
    pub strategies: Vec<Strategy>,
    pub use_sgst: bool,
    pub seed: u64,
    /// Worker threads; queries are dealt round-robin.
    pub workers: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            num_queries: 1000,
            pattern_len: 3,
            k: 10,
            strategies: Strategy::ALL.to_vec(),
            use_sgst: true,
            seed: 0,
            workers: 1,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct WorkerReport {
    pub queries: usize,
    pub seconds: f64,
}

impl WorkerReport {
    pub fn queries_per_second(&self) -> f64 {
        if self.seconds > 0.0 {
            self.queries as f64 / self.seconds
        } else {
            0.0
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StrategyReport {
    pub strategy: Strategy,
    pub queries: usize,
    pub mean_micros: f64,
    pub mean_positions_scanned: f64,
    pub mean_docs_emitted: f64,
    pub mean_heap_offers: f64,
    /// Fraction of queries answered from a locus.
    pub locus_rate: f64,
    pub workers: Vec<WorkerReport>,
    /// Wall time across all workers.
    pub wall_seconds: f64,
    /// Counters only; timings are left out so that equal seeds give equal
    /// fingerprints.
    pub counters: Vec<(usize, usize, usize)>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchReport {
    pub config: BenchConfig,
    pub patterns: Vec<Vec<u8>>,
    pub bits_per_symbol: f64,
    pub strategies: Vec<StrategyReport>,
}

impl BenchReport {
    pub fn strategy(&self, s: Strategy) -> Option<&StrategyReport> {
        self.strategies.iter().find(|r| r.strategy == s)
    }
}

// Samples tagged with their query position, plus the worker's totals.
type WorkerOutput = (Vec<(usize, Sample)>, WorkerReport);

#[derive(Default, Clone, Copy)]
struct Sample {
    micros: f64,
    scanned: usize,
    emitted: usize,
    offers: usize,
    locus: bool,
}

pub fn run_bench(index: &TopKIndex, config: &BenchConfig) -> Result<BenchReport, WorkloadError> {
    if config.k == 0 {
        return Err(QueryError::ZeroK.into());
    }
    let patterns = sample_patterns(
        index.corpus().text(),
        config.num_queries,
        config.pattern_len,
        config.seed,
    )?;
    let workers = config.workers.max(1);
    let mut strategies = Vec::new();
    for &strategy in &config.strategies {
        let options = QueryOptions {
            strategy,
            use_sgst: config.use_sgst,
        };
        let wall = Instant::now();
        let per_worker: Vec<Result<WorkerOutput, QueryError>> = std::thread::scope(|scope| {
            let handles: Vec<_> = (0..workers)
                .map(|w| {
                    let patterns = &patterns;
                    scope.spawn(move || {
                        let start = Instant::now();
                        let mut out = Vec::new();
                        for (i, p) in patterns.iter().enumerate().skip(w).step_by(workers) {
                            let t = Instant::now();
                            let r = index.query(p, config.k, options)?;
                            out.push((
                                i,
                                Sample {
                                    micros: t.elapsed().as_secs_f64() * 1e6,
                                    scanned: r.stats.positions_scanned,
                                    emitted: r.stats.docs_emitted,
                                    offers: r.stats.heap_offers,
                                    locus: r.stats.locus.is_some(),
                                },
                            ));
                        }
                        let report = WorkerReport {
                            queries: out.len(),
                            seconds: start.elapsed().as_secs_f64(),
                        };
                        Ok((out, report))
                    })
                })
                .collect();
            handles
                .into_iter()
                .map(|h| h.join().expect("bench worker panicked"))
                .collect()
        });
        let wall_seconds = wall.elapsed().as_secs_f64();

        let mut samples = vec![Sample::default(); patterns.len()];
        let mut worker_reports = Vec::with_capacity(workers);
        for r in per_worker {
            let (s, w) = r?;
            for (i, sample) in s {
                samples[i] = sample;
            }
            worker_reports.push(w);
        }
        let q = samples.len();
        let mean = |f: &dyn Fn(&Sample) -> f64| {
            if q == 0 {
                0.0
            } else {
                samples.iter().map(f).sum::<f64>() / q as f64
            }
        };
        strategies.push(StrategyReport {
            strategy,
            queries: q,
            mean_micros: mean(&|s| s.micros),
            mean_positions_scanned: mean(&|s| s.scanned as f64),
            mean_docs_emitted: mean(&|s| s.emitted as f64),
            mean_heap_offers: mean(&|s| s.offers as f64),
            locus_rate: mean(&|s| if s.locus { 1.0 } else { 0.0 }),
            workers: worker_reports,
            wall_seconds,
            counters: samples
                .iter()
                .map(|s| (s.scanned, s.emitted, s.offers))
                .collect(),
        });
    }
    Ok(BenchReport {
        config: config.clone(),
        patterns,
        bits_per_symbol: index.summary().bits_per_symbol(),
        strategies,
    })
}
