use std::fs;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use topk_core::container::{self, SaveOptions};
use topk_core::workload::{markov_corpus, run_bench, synthetic_corpus, BenchConfig};
use topk_core::{IndexParams, QueryOptions, Strategy, TopKIndex, Variant};

/// Top-k document retrieval: report the documents where a pattern occurs
/// most often.
#[derive(Parser)]
#[command(name = "topk", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build an index from a directory (one document per file) or a file
    /// with one document per line.
    Build(BuildArgs),
    /// Report the k documents where a pattern occurs most often.
    Query(QueryArgs),
    /// Time random substring queries against an index.
    Bench(BenchArgs),
    /// Write a synthetic collection, one document per line.
    Synth(SynthArgs),
}

#[derive(Args)]
struct BuildArgs {
    input: PathBuf,
    output: PathBuf,
    /// Sampling step factor; tau_k samples every k*g' suffix-array slots.
    #[arg(long = "gprime", default_value_t = 400)]
    g_prime: usize,
    /// Largest precomputed k (a power of two).
    #[arg(long = "kmax", default_value_t = 16)]
    k_max: usize,
    #[arg(long, default_value = "light")]
    variant: Variant,
    /// Bits per rank sample in the wavelet tree bitmaps (multiple of 64).
    #[arg(long, default_value_t = 64)]
    rank_step: usize,
    /// Treat the input as a file with one document per line.
    #[arg(long)]
    line_docs: bool,
    /// Store the suffix array instead of rebuilding it on load.
    #[arg(long)]
    store_sa: bool,
}

#[derive(Args)]
struct QueryArgs {
    index: PathBuf,
    pattern: String,
    k: usize,
    #[arg(long, default_value = "greedy")]
    strategy: Strategy,
    /// Ignore the sampled suffix tree and search the wavelet tree directly.
    #[arg(long)]
    no_sgst: bool,
    /// Print work counters to stderr.
    #[arg(long)]
    stats: bool,
}

#[derive(Args)]
struct BenchArgs {
    index: PathBuf,
    #[arg(long, default_value_t = 1000)]
    num_queries: usize,
    #[arg(long, default_value_t = 3)]
    pattern_len: usize,
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, value_delimiter = ',', default_value = "greedy,dfs,select")]
    strategies: Vec<Strategy>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1)]
    workers: usize,
    #[arg(long)]
    no_sgst: bool,
    /// Also print the sampled patterns.
    #[arg(long)]
    list_patterns: bool,
}

#[derive(Args)]
struct SynthArgs {
    output: PathBuf,
    #[arg(long, default_value_t = 1000)]
    docs: usize,
    /// Total symbols over all documents.
    #[arg(long, default_value_t = 1_000_000)]
    len: usize,
    #[arg(long, default_value = "acgt")]
    alphabet: String,
    /// Probability of following each symbol's preferred successor; 0 gives
    /// uniform text.
    #[arg(long, default_value_t = 0.0)]
    stickiness: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::FAILURE
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let result = match cli.command {
        Command::Build(a) => cmd_build(a),
        Command::Query(a) => cmd_query(a),
        Command::Bench(a) => cmd_bench(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn read_documents(input: &Path, line_docs: bool) -> Result<Vec<Vec<u8>>> {
    if line_docs {
        let data = fs::read(input).with_context(|| format!("reading {}", input.display()))?;
        let mut lines: Vec<&[u8]> = data.split(|&b| b == b'\n').collect();
        if lines.last().is_some_and(|l| l.is_empty()) {
            lines.pop();
        }
        return lines
            .into_iter()
            .enumerate()
            .map(|(i, l)| {
                let l = l.strip_suffix(b"\r").unwrap_or(l);
                if l.is_empty() {
                    bail!("{}: line {} is empty", input.display(), i + 1);
                }
                Ok(l.to_vec())
            })
            .collect();
    }
    let mut paths: Vec<PathBuf> = fs::read_dir(input)
        .with_context(|| format!("listing {}", input.display()))?
        .map(|e| e.map(|e| e.path()))
        .collect::<io::Result<_>>()?;
    paths.retain(|p| p.is_file());
    paths.sort();
    paths
        .into_iter()
        .map(|p| {
            let doc = fs::read(&p).with_context(|| format!("reading {}", p.display()))?;
            if doc.is_empty() {
                bail!("{} is empty", p.display());
            }
            Ok(doc)
        })
        .collect()
}

fn cmd_build(a: BuildArgs) -> Result<()> {
    let params = IndexParams {
        g_prime: a.g_prime,
        k_max: a.k_max,
        variant: a.variant,
        rank_step: a.rank_step,
    };
    params.validate()?;
    let docs = read_documents(&a.input, a.line_docs)?;
    let index = TopKIndex::from_documents(&docs, params)?;
    container::save(
        &index,
        &a.output,
        SaveOptions {
            include_suffix_array: a.store_sa,
        },
    )
    .with_context(|| format!("writing {}", a.output.display()))?;

    let s = index.summary();
    let size = fs::metadata(&a.output)?.len();
    println!("documents    {}", s.docs);
    println!("symbols      {}", s.n);
    println!("alphabet     {}", s.sigma);
    println!("g'           {}", s.g_prime);
    println!("K_max        {}", s.k_max);
    println!("variant      {}", s.variant);
    println!("rank step    {}", s.rank_step);
    println!("tau nodes    {}", s.tau_nodes);
    println!("bits/symbol  {:.3}", s.bits_per_symbol());
    println!("file bytes   {size}");
    Ok(())
}

fn cmd_query(a: QueryArgs) -> Result<()> {
    let index =
        container::load(&a.index).with_context(|| format!("loading {}", a.index.display()))?;
    let options = QueryOptions {
        strategy: a.strategy,
        use_sgst: !a.no_sgst,
    };
    let r = index.query(a.pattern.as_bytes(), a.k, options)?;
    let mut out = BufWriter::new(io::stdout().lock());
    for (doc, freq) in &r.hits {
        writeln!(out, "{doc}\t{freq}")?;
    }
    out.flush()?;
    if a.stats {
        eprintln!("{:?}", r.stats);
    }
    Ok(())
}

fn cmd_bench(a: BenchArgs) -> Result<()> {
    let index =
        container::load(&a.index).with_context(|| format!("loading {}", a.index.display()))?;
    if a.workers == 0 {
        bail!("--workers must be at least 1");
    }
    let config = BenchConfig {
        num_queries: a.num_queries,
        pattern_len: a.pattern_len,
        k: a.k,
        strategies: a.strategies,
        use_sgst: !a.no_sgst,
        seed: a.seed,
        workers: a.workers,
    };
    let report = run_bench(&index, &config)?;
    let mut out = BufWriter::new(io::stdout().lock());
    writeln!(
        out,
        "queries {}  pattern length {}  k {}  seed {}  workers {}",
        report.patterns.len(),
        config.pattern_len,
        config.k,
        config.seed,
        config.workers
    )?;
    writeln!(out, "bits/symbol {:.3}", report.bits_per_symbol)?;
    if report.patterns.is_empty() {
        out.flush()?;
        return Ok(());
    }
    writeln!(
        out,
        "{:<8} {:>10} {:>10} {:>12} {:>10} {:>8} {:>12}",
        "strategy", "scanned", "emitted", "offers", "locus rate", "us/query", "queries/s"
    )?;
    for s in &report.strategies {
        let qps = if s.wall_seconds > 0.0 {
            s.queries as f64 / s.wall_seconds
        } else {
            0.0
        };
        writeln!(
            out,
            "{:<8} {:>10.2} {:>10.2} {:>12.2} {:>10.3} {:>8.2} {:>12.0}",
            s.strategy.to_string(),
            s.mean_positions_scanned,
            s.mean_docs_emitted,
            s.mean_heap_offers,
            s.locus_rate,
            s.mean_micros,
            qps
        )?;
        if s.workers.len() > 1 {
            for (i, w) in s.workers.iter().enumerate() {
                writeln!(
                    out,
                    "  worker {i}: {} queries, {:.0} queries/s",
                    w.queries,
                    w.queries_per_second()
                )?;
            }
        }
    }
    if a.list_patterns {
        for p in &report.patterns {
            writeln!(out, "pattern\t{}", String::from_utf8_lossy(p))?;
        }
    }
    out.flush()?;
    Ok(())
}

fn cmd_synth(a: SynthArgs) -> Result<()> {
    let alphabet = a.alphabet.as_bytes();
    if alphabet.contains(&b'\n') || alphabet.contains(&b'\r') {
        bail!("the alphabet cannot contain line breaks");
    }
    let docs = if a.stickiness > 0.0 {
        markov_corpus(a.docs, a.len, alphabet, a.stickiness, a.seed)?
    } else {
        synthetic_corpus(a.docs, a.len, alphabet, a.seed)?
    };
    let mut out = BufWriter::new(
        fs::File::create(&a.output).with_context(|| format!("creating {}", a.output.display()))?,
    );
    for d in &docs {
        out.write_all(d)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(())
}
