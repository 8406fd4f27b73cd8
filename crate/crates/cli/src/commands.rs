//! The pipeline subcommands: count, train, center, query, synth-or.

use std::fs;
use std::io::Write as _;
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use veclogic::{
    abtt, abtt_default_components, build_vocab, center_freq, center_uniform,
    count_cooccurrences, load_embeddings, make_or_corpus, nearest_neighbors, parse_expression,
    save_embeddings, tokenize, train_glove, train_sgns, write_or_specs, CenteringReport,
    CooccurrenceCounts, EmbeddingSet, Neighbor, OrWordSpec, SetWeighting, TrainConfig, Vocabulary,
    Weighting,
};

use crate::args::{CenterArgs, CountArgs, QueryArgs, SynthOrArgs, TrainArgs};
use crate::report::{print_json, resolve_input, resolve_output, write_json, Report};

fn read_corpus(path: &PathBuf) -> Result<Vec<String>> {
    let text =
        fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    Ok(tokenize(&text))
}

fn parse_window_weighting(s: &str) -> Result<Weighting> {
    Ok(s.parse::<Weighting>()?)
}

pub fn parse_set_weighting(s: &str) -> Result<SetWeighting> {
    Ok(s.parse::<SetWeighting>()?)
}

/// Per-row unigram probabilities for an embedding set, looked up by word so
/// the embedding file and vocabulary file may order rows differently.
pub fn probs_for(set: &EmbeddingSet, vocab: &Vocabulary) -> Result<Vec<f64>> {
    set.words()
        .iter()
        .map(|w| {
            vocab
                .id(w)
                .map(|i| vocab.prob(i))
                .with_context(|| format!("embedding word {w:?} missing from the vocabulary"))
        })
        .collect()
}

/// Reorders embedding rows into vocabulary id order so they can be indexed
/// by the ids used in counts and joints.
pub fn align_to_vocab(set: &EmbeddingSet, vocab: &Vocabulary) -> Result<EmbeddingSet> {
    let d = set.dim();
    let mut v = ndarray::Array2::zeros((vocab.len(), d));
    let mut u = ndarray::Array2::zeros((vocab.len(), d));
    for (row, word) in vocab.words().iter().enumerate() {
        let id = set
            .id(word)
            .with_context(|| format!("vocabulary word {word:?} missing from the embeddings"))?;
        v.row_mut(row).assign(&set.v_row(id));
        u.row_mut(row).assign(&set.u_row(id));
    }
    Ok(EmbeddingSet::new(vocab.words().to_vec(), v, u)?)
}

#[derive(Serialize)]
struct CountBody {
    tokens: usize,
    vocab_size: usize,
    cooc_entries: usize,
    total_weight: f64,
    vocab_file: PathBuf,
    cooc_file: PathBuf,
}

pub fn cmd_count(mut args: CountArgs) -> Result<()> {
    if let Some(preset) = args.preset.as_deref() {
        match preset {
            "desk" => args.min_count = args.min_count.min(5),
            "full" => {}
            other => bail!("unknown preset {other:?} (expected desk or full)"),
        }
    }
    args.corpus = resolve_input(&args.corpus)?;
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    args.out_dir = resolve_input(&args.out_dir)?;

    let tokens = read_corpus(&args.corpus)?;
    let vocab = build_vocab(&tokens, args.min_count)?;
    let weighting = parse_window_weighting(&args.weighting)?;
    let counts = count_cooccurrences(&tokens, &vocab, args.window, weighting)?;

    let vocab_file = args.out_dir.join("vocab.tsv");
    let cooc_file = args.out_dir.join("cooc.tsv");
    vocab.save(&vocab_file)?;
    counts.save(&cooc_file)?;
    let report = Report {
        command: "count",
        body: CountBody {
            tokens: tokens.len(),
            vocab_size: vocab.len(),
            cooc_entries: counts.len(),
            total_weight: counts.total_weight(),
            vocab_file,
            cooc_file,
        },
        config: &args,
    };
    write_json(&args.out_dir.join("count_report.json"), &report)?;
    print_json(&report)
}

#[derive(Serialize)]
struct TrainBody {
    vocab_size: usize,
    dim: usize,
    /// final weighted least-squares objective (glove only)
    #[serde(skip_serializing_if = "Option::is_none")]
    objective: Option<f64>,
    embeddings_file: PathBuf,
}

pub fn cmd_train(mut args: TrainArgs) -> Result<()> {
    if let Some(preset) = args.preset.as_deref() {
        match preset {
            "desk" => args.min_count = args.min_count.min(5),
            "full" => {}
            other => bail!("unknown preset {other:?} (expected desk or full)"),
        }
    }
    for p in [&mut args.corpus, &mut args.vocab, &mut args.counts]
        .into_iter()
        .flatten()
    {
        *p = resolve_input(p)?;
    }
    fs::create_dir_all(&args.out_dir)
        .with_context(|| format!("cannot create {}", args.out_dir.display()))?;
    args.out_dir = resolve_input(&args.out_dir)?;

    let sgns = match args.mode.as_str() {
        "sgns" => true,
        "glove" => false,
        other => bail!("unknown training mode {other:?} (expected sgns or glove)"),
    };
    let config = TrainConfig {
        dim: args.dim,
        window: args.window,
        epochs: args.epochs.unwrap_or(if sgns { 5 } else { 50 }),
        learning_rate: args.learning_rate.unwrap_or(if sgns { 0.025 } else { 0.05 }),
        negatives: args.negatives,
        alpha: args.alpha,
        x_max: args.x_max,
        weighting_power: args.weighting_power,
        seed: args.common.seed,
        deterministic: args.common.deterministic,
        full_batch: args.full_batch,
    };

    let (set, vocab, objective) = if sgns {
        let corpus = args
            .corpus
            .as_ref()
            .context("sgns training needs --corpus")?;
        let tokens = read_corpus(corpus)?;
        let vocab = match &args.vocab {
            Some(path) => Vocabulary::load(path)?,
            None => build_vocab(&tokens, args.min_count)?,
        };
        let set = train_sgns(&tokens, &vocab, &config)?;
        (set, vocab, None)
    } else {
        let vocab_path = args.vocab.as_ref().context("glove training needs --vocab")?;
        let counts_path = args
            .counts
            .as_ref()
            .context("glove training needs --counts")?;
        let vocab = Vocabulary::load(vocab_path)?;
        let counts = CooccurrenceCounts::load(
            counts_path,
            args.window,
            parse_window_weighting(&args.weighting)?,
            vocab.len(),
        )?;
        let set = train_glove(&counts, &vocab, &config)?;
        let objective = veclogic::glove_objective(&set, &counts, &config)?;
        (set, vocab, Some(objective))
    };

    let embeddings_file = args.out_dir.join("embeddings.txt");
    save_embeddings(&set, &embeddings_file)?;
    vocab.save(args.out_dir.join("vocab.tsv"))?;
    let report = Report {
        command: "train",
        body: TrainBody {
            vocab_size: vocab.len(),
            dim: set.dim(),
            objective,
            embeddings_file,
        },
        config: &args,
    };
    write_json(&args.out_dir.join("train_report.json"), &report)?;
    print_json(&report)
}

#[derive(Serialize)]
struct CenterBody {
    centering: CenteringReport,
    out_file: PathBuf,
}

pub fn cmd_center(mut args: CenterArgs) -> Result<()> {
    args.embeddings = resolve_input(&args.embeddings)?;
    if let Some(v) = &mut args.vocab {
        *v = resolve_input(v)?;
    }
    args.out = resolve_output(&args.out)?;
    let set = load_embeddings(&args.embeddings)?;
    let (centered, centering) = match args.mode.as_str() {
        "freq" => {
            let vocab_path = args.vocab.as_ref().context("freq centering needs --vocab")?;
            let vocab = Vocabulary::load(vocab_path)?;
            let aligned = align_to_vocab(&set, &vocab)?;
            center_freq(&aligned, &vocab)?
        }
        "unif" => center_uniform(&set)?,
        "abtt" => {
            let components = args
                .components
                .unwrap_or_else(|| abtt_default_components(set.dim()));
            abtt(&set, components)?
        }
        other => bail!("unknown centering mode {other:?} (expected freq, unif, abtt)"),
    };
    save_embeddings(&centered, &args.out)?;
    let report_path = args
        .report
        .clone()
        .unwrap_or_else(|| args.out.with_extension("report.json"));
    let report = Report {
        command: "center",
        body: CenterBody {
            centering,
            out_file: args.out.clone(),
        },
        config: &args,
    };
    write_json(&report_path, &report)?;
    print_json(&report)
}

#[derive(Serialize)]
struct QueryBody {
    expression: String,
    weighting: String,
    excluded: Vec<String>,
    neighbors: Vec<Neighbor>,
}

pub fn cmd_query(mut args: QueryArgs) -> Result<()> {
    args.embeddings = resolve_input(&args.embeddings)?;
    args.vocab = resolve_input(&args.vocab)?;
    let set = load_embeddings(&args.embeddings)?;
    let vocab = Vocabulary::load(&args.vocab)?;
    let probs = probs_for(&set, &vocab)?;
    let weighting = parse_set_weighting(&args.weighting)?;
    let expr = parse_expression(&args.expression)?;
    let query = expr.evaluate(&set, &probs, weighting)?;
    let excluded: Vec<String> = if args.exclude_members {
        expr.words().iter().map(|w| w.to_string()).collect()
    } else {
        Vec::new()
    };
    let exclude_ids: Vec<usize> = excluded
        .iter()
        .filter_map(|w| set.id(w))
        .collect();
    let neighbors = nearest_neighbors(
        query.as_slice().context("query vector not contiguous")?,
        &set,
        args.top_n,
        &exclude_ids,
    )?;
    let report = Report {
        command: "query",
        body: QueryBody {
            expression: args.expression.clone(),
            weighting: args.weighting.clone(),
            excluded,
            neighbors,
        },
        config: &args,
    };
    if let Some(out) = &args.out {
        write_json(out, &report)?;
    }
    print_json(&report)
}

#[derive(Serialize)]
struct SynthOrBody {
    sets: usize,
    set_size: usize,
    tokens_in: usize,
    tokens_out: usize,
    corpus_file: PathBuf,
    specs_file: PathBuf,
}

pub fn cmd_synth_or(mut args: SynthOrArgs) -> Result<()> {
    args.corpus = resolve_input(&args.corpus)?;
    args.out = resolve_output(&args.out)?;
    args.specs = resolve_output(&args.specs)?;
    if args.set_size < 2 {
        bail!("--set-size must be at least 2");
    }
    let tokens = read_corpus(&args.corpus)?;
    let vocab = build_vocab(&tokens, args.min_count)?;
    let needed = args.num_sets * args.set_size;
    if vocab.len() < needed {
        bail!(
            "need {needed} distinct member words but only {} meet --min-count {}",
            vocab.len(),
            args.min_count
        );
    }
    let mut ids: Vec<usize> = (0..vocab.len()).collect();
    let mut rng = ChaCha20Rng::seed_from_u64(args.common.seed);
    ids.shuffle(&mut rng);
    let specs: Vec<OrWordSpec> = (0..args.num_sets)
        .map(|i| {
            let members = ids[i * args.set_size..(i + 1) * args.set_size]
                .iter()
                .map(|&id| vocab.word(id).to_string())
                .collect();
            OrWordSpec::new(format!("__or{i}__"), members)
        })
        .collect::<veclogic::Result<_>>()?;
    let out_tokens = make_or_corpus(&tokens, &specs)?;
    write_corpus(&args.out, &out_tokens)?;
    write_or_specs(&specs, &args.specs)?;
    let report = Report {
        command: "synth-or",
        body: SynthOrBody {
            sets: specs.len(),
            set_size: args.set_size,
            tokens_in: tokens.len(),
            tokens_out: out_tokens.len(),
            corpus_file: args.out.clone(),
            specs_file: args.specs.clone(),
        },
        config: &args,
    };
    print_json(&report)
}

/// Writes tokens space-separated, wrapped to keep lines readable.
pub fn write_corpus(path: &PathBuf, tokens: &[String]) -> Result<()> {
    let file =
        fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    let mut out = std::io::BufWriter::new(file);
    for chunk in tokens.chunks(1000) {
        writeln!(out, "{}", chunk.join(" "))
            .with_context(|| format!("cannot write {}", path.display()))?;
    }
    Ok(())
}
