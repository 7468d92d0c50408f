use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn topk(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_topk"))
        .args(args)
        .output()
        .expect("run topk")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn path(p: &Path) -> &str {
    p.to_str().unwrap()
}

/// The three-document example as a line file, plus a built index.
fn worked(extra: &[&str]) -> (TempDir, PathBuf) {
    let dir = TempDir::new().unwrap();
    let docs = dir.path().join("docs.txt");
    fs::write(&docs, "abab\nabba\nbab\n").unwrap();
    let index = dir.path().join("worked.idx");
    let mut args = vec!["build", path(&docs), path(&index), "--line-docs"];
    args.extend_from_slice(extra);
    let o = topk(&args);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    (dir, index)
}

fn summary_value(out: &str, key: &str) -> String {
    out.lines()
        .find(|l| l.starts_with(key))
        .unwrap_or_else(|| panic!("no `{key}` in {out}"))[key.len()..]
        .trim()
        .to_string()
}

#[test]
fn query_answers() {
    let (_dir, index) = worked(&[]);
    let idx = path(&index);
    for strategy in ["greedy", "dfs", "select"] {
        for sgst in [true, false] {
            let mut args = vec!["query", idx, "ab", "1", "--strategy", strategy];
            if !sgst {
                args.push("--no-sgst");
            }
            let o = topk(&args);
            assert!(o.status.success());
            assert_eq!(stdout(&o), "1\t2\n");
        }
    }
    let o = topk(&["query", idx, "b", "2"]);
    assert_eq!(stdout(&o), "1\t2\n2\t2\n");
    let o = topk(&["query", idx, "zz", "5"]);
    assert!(o.status.success());
    assert_eq!(stdout(&o), "");
}

#[test]
fn build_summary() {
    let dir = TempDir::new().unwrap();
    let docs = dir.path().join("docs.txt");
    fs::write(&docs, "abab\nabba\nbab\n").unwrap();
    let index = dir.path().join("i.idx");

    let o = topk(&[
        "build",
        path(&docs),
        path(&index),
        "--line-docs",
        "--gprime",
        "7",
        "--kmax",
        "1",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert_eq!(summary_value(&out, "tau nodes"), "1");
    assert_eq!(summary_value(&out, "symbols"), "14");
    assert_eq!(summary_value(&out, "documents"), "3");

    let o = topk(&[
        "build",
        path(&docs),
        path(&index),
        "--line-docs",
        "--gprime",
        "400",
        "--variant",
        "light",
    ]);
    assert!(o.status.success());
    assert_eq!(summary_value(&stdout(&o), "K_max"), "16");
}

#[test]
fn build_from_directory() {
    let dir = TempDir::new().unwrap();
    let corpus = dir.path().join("corpus");
    fs::create_dir(&corpus).unwrap();
    // File order, not creation order, decides document ids.
    fs::write(corpus.join("b.txt"), "abba").unwrap();
    fs::write(corpus.join("c.txt"), "bab").unwrap();
    fs::write(corpus.join("a.txt"), "abab").unwrap();
    let index = dir.path().join("d.idx");
    let o = topk(&[
        "build",
        path(&corpus),
        path(&index),
        "--gprime",
        "2",
        "--store-sa",
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(stdout(&topk(&["query", path(&index), "ab", "1"])), "1\t2\n");
    assert_eq!(stdout(&topk(&["query", path(&index), "bb", "3"])), "2\t1\n");
}

#[test]
fn validation_errors_exit_nonzero() {
    let dir = TempDir::new().unwrap();
    let docs = dir.path().join("docs.txt");
    fs::write(&docs, "abab\nabba\nbab\n").unwrap();
    let out = dir.path().join("x.idx");
    for bad in [
        vec!["--gprime", "0"],
        vec!["--kmax", "3"],
        vec!["--rank-step", "100"],
        vec!["--variant", "heavy"],
    ] {
        let mut args = vec!["build", path(&docs), path(&out), "--line-docs"];
        args.extend(bad.iter().copied());
        let o = topk(&args);
        assert_eq!(o.status.code(), Some(1), "{bad:?}");
        assert!(!o.stderr.is_empty());
    }

    fs::write(&docs, "abab\n\nbab\n").unwrap();
    let o = topk(&["build", path(&docs), path(&out), "--line-docs"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2 is empty"));

    let o = topk(&["query", path(&dir.path().join("missing.idx")), "a", "1"]);
    assert_eq!(o.status.code(), Some(1));
    fs::write(&out, b"not an index").unwrap();
    let o = topk(&["query", path(&out), "a", "1"]);
    assert_eq!(o.status.code(), Some(1));

    let (_d, index) = worked(&[]);
    for args in [
        vec!["query", path(&index), "ab", "0"],
        vec!["query", path(&index), "ab", "1", "--strategy", "best"],
        vec!["query", path(&index), "", "1"],
    ] {
        assert_eq!(topk(&args).status.code(), Some(1), "{args:?}");
    }
}

#[test]
fn bench_reports() {
    let dir = TempDir::new().unwrap();
    let docs = dir.path().join("synth.txt");
    let o = topk(&[
        "synth",
        path(&docs),
        "--docs",
        "50",
        "--len",
        "20000",
        "--alphabet",
        "abcdefgh",
        "--stickiness",
        "0.9",
    ]);
    assert!(o.status.success());
    assert_eq!(fs::read_to_string(&docs).unwrap().lines().count(), 50);
    let index = dir.path().join("s.idx");
    assert!(topk(&[
        "build",
        path(&docs),
        path(&index),
        "--line-docs",
        "--gprime",
        "20"
    ])
    .status
    .success());
    let idx = path(&index);

    let o = topk(&["bench", idx, "--num-queries", "0"]);
    assert!(o.status.success());
    assert!(stdout(&o).starts_with("queries 0"));
    assert!(!stdout(&o).contains("greedy"));

    let o = topk(&[
        "bench",
        idx,
        "--num-queries",
        "1000",
        "--pattern-len",
        "3",
        "--k",
        "1",
    ]);
    assert!(o.status.success());
    let out = stdout(&o);
    assert!(out.starts_with("queries 1000"));
    for s in ["greedy", "dfs", "select"] {
        assert!(out.lines().any(|l| l.starts_with(s)), "{out}");
    }

    // Same seed: same patterns and counters. Timing columns differ.
    let counters = |seed: &str| {
        let o = topk(&[
            "bench",
            idx,
            "--num-queries",
            "200",
            "--seed",
            seed,
            "--list-patterns",
            "--workers",
            "3",
        ]);
        assert!(o.status.success());
        stdout(&o)
            .lines()
            .filter(|l| !l.starts_with("  worker"))
            .map(|l| l.split_whitespace().take(5).collect::<Vec<_>>().join(" "))
            .collect::<Vec<_>>()
    };
    let a = counters("11");
    assert_eq!(a, counters("11"));
    assert!(a.iter().filter(|l| l.starts_with("pattern")).count() == 200);
    assert_ne!(a, counters("12"));
}
