//! End-to-end checks of the compiled binary: a happy path through every
//! subcommand on a small corpus, plus the error paths that must exit nonzero
//! with a useful message.

use std::path::Path;
use std::process::{Command, Output};

use rand::prelude::*;
use rand_chacha::ChaCha20Rng;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_veclogic"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn run_ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "command {:?} failed: {}",
        args,
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn run_err(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        !out.status.success(),
        "command {:?} unexpectedly succeeded: {}",
        args,
        String::from_utf8_lossy(&out.stdout)
    );
    String::from_utf8(out.stderr).unwrap()
}

/// Zipf-weighted draws over twelve words, enough structure for every command.
fn write_corpus(path: &Path, tokens: usize, seed: u64) {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let weights: Vec<f64> = (0..12).map(|i| 1.0 / (i + 1) as f64).collect();
    let total: f64 = weights.iter().sum();
    let mut cum = Vec::new();
    let mut acc = 0.0;
    for w in &weights {
        acc += w / total;
        cum.push(acc);
    }
    let text: Vec<String> = (0..tokens)
        .map(|_| {
            let r: f64 = rng.random();
            format!("v{:02}", cum.partition_point(|&x| x < r).min(11))
        })
        .collect();
    std::fs::write(path, text.join(" ")).unwrap();
}

fn json(s: &str) -> serde_json::Value {
    serde_json::from_str(s).unwrap_or_else(|e| panic!("bad JSON ({e}): {s}"))
}

#[test]
fn sgns_pipeline_center_query_eval() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let corpus = root.join("corpus.txt");
    write_corpus(&corpus, 12_000, 1);
    let corpus = corpus.to_str().unwrap();
    let counts = root.join("counts");
    let counts_s = counts.to_str().unwrap();
    run_ok(&[
        "count", "--corpus", corpus, "--out-dir", counts_s, "--window", "3", "--min-count",
        "5", "--deterministic",
    ]);
    for file in ["vocab.tsv", "cooc.tsv", "count_report.json"] {
        assert!(counts.join(file).exists(), "count did not write {file}");
    }
    let train = root.join("sgns");
    let train_s = train.to_str().unwrap();
    run_ok(&[
        "train", "--mode", "sgns", "--corpus", corpus, "--out-dir", train_s, "--dim", "8",
        "--epochs", "1", "--min-count", "5", "--deterministic",
    ]);
    let embeddings = train.join("embeddings.txt");
    let embeddings_s = embeddings.to_str().unwrap();
    let vocab = train.join("vocab.tsv");
    let vocab_s = vocab.to_str().unwrap();
    assert!(embeddings.exists() && vocab.exists());

    for mode in ["freq", "unif", "abtt"] {
        let out = root.join(format!("{mode}.txt"));
        let mut args = vec![
            "center", "--embeddings", embeddings_s, "--vocab", vocab_s, "--mode", mode,
            "--out", out.to_str().unwrap(), "--deterministic",
        ];
        if mode == "abtt" {
            args.extend(["--components", "1"]);
        }
        run_ok(&args);
        assert!(out.exists(), "center {mode} wrote no output");
    }

    let centered = root.join("freq.txt");
    let centered_s = centered.to_str().unwrap();
    for expression in ["OR(v00, v01)", "AND(v02, v03)", "NOT(v00 | v00, v01, v02)"] {
        let stdout = run_ok(&[
            "query", "--embeddings", centered_s, "--vocab", vocab_s, "--expression",
            expression, "--top-n", "3", "--weighting", "uniform", "--exclude-members",
        ]);
        let report = json(&stdout);
        let neighbors = report["neighbors"].as_array().expect("neighbors array");
        assert_eq!(neighbors.len(), 3, "query {expression} returned {neighbors:?}");
    }

    let eval_out = root.join("pmi.json");
    run_ok(&[
        "eval", "--task", "pmi-error", "--embeddings", centered_s, "--vocab", vocab_s,
        "--counts", counts.join("cooc.tsv").to_str().unwrap(), "--window", "3", "--out",
        eval_out.to_str().unwrap(), "--deterministic",
    ]);
    let report = json(&std::fs::read_to_string(&eval_out).unwrap());
    assert!(
        report["report"]["value_summary"]["median_abs"].is_number(),
        "pmi-error report missing summary: {report}"
    );
}

#[test]
fn glove_trains_from_counts() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let corpus = root.join("corpus.txt");
    write_corpus(&corpus, 12_000, 2);
    let counts = root.join("counts");
    let counts_s = counts.to_str().unwrap();
    run_ok(&[
        "count", "--corpus", corpus.to_str().unwrap(), "--out-dir", counts_s, "--window",
        "3", "--min-count", "5", "--deterministic",
    ]);
    let train = root.join("glove");
    run_ok(&[
        "train", "--mode", "glove", "--counts", counts.join("cooc.tsv").to_str().unwrap(),
        "--vocab", counts.join("vocab.tsv").to_str().unwrap(), "--out-dir",
        train.to_str().unwrap(), "--dim", "8", "--epochs", "50", "--deterministic",
    ]);
    assert!(train.join("embeddings.txt").exists());
    let report = json(&std::fs::read_to_string(train.join("train_report.json")).unwrap());
    assert_eq!(report["config"]["mode"], "glove");
}

#[test]
fn synth_or_rewrites_corpus() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let corpus = root.join("corpus.txt");
    write_corpus(&corpus, 12_000, 3);
    let out = root.join("merged.txt");
    let specs = root.join("specs.tsv");
    run_ok(&[
        "synth-or", "--corpus", corpus.to_str().unwrap(), "--out", out.to_str().unwrap(),
        "--specs", specs.to_str().unwrap(), "--num-sets", "2", "--set-size", "2",
        "--min-count", "5", "--seed", "9",
    ]);
    let rewritten = std::fs::read_to_string(&out).unwrap();
    assert!(rewritten.contains("__or0__") && rewritten.contains("__or1__"));
    let spec_text = std::fs::read_to_string(&specs).unwrap();
    assert_eq!(spec_text.lines().count(), 2, "expected two spec lines: {spec_text}");
}

#[test]
fn verify_checks_pass_and_report_verdicts() {
    for args in [
        vec!["verify", "t1", "--V", "10", "--d", "5", "--seeds", "2"],
        vec!["verify", "prop1", "--V", "20", "--d", "8", "--seeds", "3"],
        vec!["verify", "or", "--set-size", "2", "--seeds", "2"],
        vec!["verify", "not", "--trials", "50"],
    ] {
        let stdout = run_ok(&args);
        let verdict = json(&stdout);
        assert_eq!(verdict["pass"], true, "{args:?} reported {verdict}");
    }
}

#[test]
fn verify_unreachable_tolerance_exits_nonzero() {
    let out = run(&["verify", "t1", "--V", "10", "--d", "5", "--seeds", "1", "--tol", "1e-30"]);
    assert!(!out.status.success(), "impossible tolerance still exited 0");
    let verdict = json(&String::from_utf8(out.stdout).unwrap());
    assert_eq!(verdict["pass"], false);
}

#[test]
fn missing_corpus_error_names_the_path() {
    let stderr = run_err(&[
        "count", "--corpus", "/no/such/corpus.txt", "--out-dir", "/tmp/unused-out",
    ]);
    assert!(
        stderr.contains("corpus.txt"),
        "error does not name the missing file: {stderr}"
    );
}

#[test]
fn min_count_filtering_everything_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("corpus.txt");
    write_corpus(&corpus, 500, 4);
    let stderr = run_err(&[
        "count", "--corpus", corpus.to_str().unwrap(), "--out-dir",
        dir.path().join("counts").to_str().unwrap(), "--min-count", "999999",
    ]);
    assert!(
        stderr.contains("min-count") || stderr.contains("min_count") || stderr.contains("empty"),
        "unhelpful error: {stderr}"
    );
}

#[test]
fn malformed_dataset_line_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let corpus = root.join("corpus.txt");
    write_corpus(&corpus, 12_000, 5);
    let train = root.join("sgns");
    run_ok(&[
        "train", "--mode", "sgns", "--corpus", corpus.to_str().unwrap(), "--out-dir",
        train.to_str().unwrap(), "--dim", "4", "--epochs", "1", "--min-count", "5",
        "--deterministic",
    ]);
    let dataset = root.join("triples.tsv");
    std::fs::write(&dataset, "v00\tv01\n").unwrap();
    let stderr = run_err(&[
        "eval", "--task", "word2word", "--embeddings",
        train.join("embeddings.txt").to_str().unwrap(), "--vocab",
        train.join("vocab.tsv").to_str().unwrap(), "--dataset", dataset.to_str().unwrap(),
    ]);
    assert!(
        stderr.contains("line") || stderr.contains("field") || stderr.contains("column"),
        "unhelpful parse error: {stderr}"
    );
}

#[test]
fn deterministic_training_reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let root = dir.path();
    let corpus = root.join("corpus.txt");
    write_corpus(&corpus, 12_000, 6);
    let mut outputs = Vec::new();
    for name in ["a", "b"] {
        let train = root.join(name);
        run_ok(&[
            "train", "--mode", "sgns", "--corpus", corpus.to_str().unwrap(), "--out-dir",
            train.to_str().unwrap(), "--dim", "8", "--epochs", "1", "--min-count", "5",
            "--seed", "7", "--deterministic", "--threads", "1",
        ]);
        outputs.push(std::fs::read(train.join("embeddings.txt")).unwrap());
    }
    assert_eq!(outputs[0], outputs[1], "same seed produced different embeddings");
}
