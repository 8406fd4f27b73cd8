//! The `eval` subcommand: dataset-driven measurements producing JSON
//! reports, plus an optional histogram CSV for the residual task.

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use veclogic::{
    histogram, joint_from_counts, mrr, pca_project, pmi_error_samples, rank_of, read_or_specs,
    read_phrases, read_sts, read_triples, sts_eval, CooccurrenceCounts, EmbeddingSet, EvalReport,
    OriginSpec, PcaProjection, SetWeighting, Vocabulary, WordSet,
};

use crate::args::EvalArgs;
use crate::commands::{align_to_vocab, parse_set_weighting, probs_for};
use crate::report::{print_json, resolve_input, write_json, Report};

#[derive(Serialize)]
struct RankTaskBody {
    report: EvalReport,
    /// items whose words were missing from the embeddings
    skipped_items: usize,
    /// MRR of random-word queries against the same targets
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline_mrr: Option<f64>,
}

#[derive(Serialize)]
struct ValueTaskBody {
    report: EvalReport,
    samples: usize,
}

#[derive(Serialize)]
struct StsBody {
    correlation: f64,
    pairs: usize,
}

#[derive(Serialize)]
struct PcaBody {
    projection: PcaProjection,
}

pub fn cmd_eval(mut args: EvalArgs) -> Result<()> {
    args.embeddings = resolve_input(&args.embeddings)?;
    for p in [&mut args.vocab, &mut args.counts, &mut args.dataset]
        .into_iter()
        .flatten()
    {
        *p = resolve_input(p)?;
    }
    let set = veclogic::load_embeddings(&args.embeddings)?;
    match args.task.as_str() {
        "pmi-error" => eval_pmi_error(&args, &set),
        "phrase" => eval_phrase(&args, &set),
        "word2word" => eval_word2word(&args, &set),
        "or" => eval_or(&args, &set),
        "sts" => eval_sts(&args, &set),
        "pca" => eval_pca(&args, &set),
        other => bail!(
            "unknown task {other:?} (expected pmi-error, phrase, word2word, or, sts, pca)"
        ),
    }
}

fn emit<B: Serialize>(args: &EvalArgs, body: B) -> Result<()> {
    let report = Report {
        command: "eval",
        config: args.clone(),
        body,
    };
    if let Some(out) = &args.out {
        write_json(out, &report)?;
    }
    print_json(&report)
}

fn load_vocab(args: &EvalArgs) -> Result<Vocabulary> {
    let path = args
        .vocab
        .as_ref()
        .with_context(|| format!("task {} needs --vocab", args.task))?;
    Ok(Vocabulary::load(path)?)
}

fn dataset_path<'a>(args: &'a EvalArgs) -> Result<&'a Path> {
    args.dataset
        .as_deref()
        .with_context(|| format!("task {} needs --dataset", args.task))
}

fn parse_range(s: &str) -> Result<(f64, f64)> {
    let (lo, hi) = s
        .split_once(',')
        .with_context(|| format!("bad range {s:?}, expected lo,hi"))?;
    Ok((
        lo.trim().parse().with_context(|| format!("bad range low {lo:?}"))?,
        hi.trim().parse().with_context(|| format!("bad range high {hi:?}"))?,
    ))
}

fn eval_pmi_error(args: &EvalArgs, set: &EmbeddingSet) -> Result<()> {
    let vocab = load_vocab(args)?;
    let counts_path = args.counts.as_ref().context("task pmi-error needs --counts")?;
    let counts = CooccurrenceCounts::load(
        counts_path,
        args.window,
        args.count_weighting.parse::<veclogic::Weighting>()?,
        vocab.len(),
    )?;
    let joint = joint_from_counts(&counts)?;
    let aligned = align_to_vocab(set, &vocab)?;
    let samples = pmi_error_samples(&aligned, &joint, args.min_cooc)?;
    if let Some(hist_path) = &args.histogram_out {
        let range = parse_range(&args.hist_range)?;
        let bins = histogram(&samples, args.bin_width, range)?;
        let mut out = String::from("bin_lo,bin_hi,count\n");
        for (lo, hi, count) in bins {
            out.push_str(&format!("{lo},{hi},{count}\n"));
        }
        fs::write(hist_path, out)
            .with_context(|| format!("cannot write {}", hist_path.display()))?;
    }
    emit(
        args,
        ValueTaskBody {
            samples: samples.len(),
            report: EvalReport::from_values("pmi-error", &samples)?,
        },
    )
}

/// Runs the shared rank loop: each item contributes a query vector, a target
/// word and an exclusion list; ranks are computed against the whole set.
fn rank_items(
    args: &EvalArgs,
    set: &EmbeddingSet,
    metric: &str,
    items: Vec<(String, Vec<f64>, String, Vec<usize>)>,
    skipped: usize,
) -> Result<()> {
    if items.is_empty() {
        bail!("no usable items: every dataset entry had words missing from the embeddings");
    }
    if items.iter().any(|(_, _, _, e)| e.len() + 1 >= set.len()) {
        bail!("an exclusion list covers the whole vocabulary");
    }
    let mut results = Vec::with_capacity(items.len());
    let mut rng = ChaCha20Rng::seed_from_u64(args.common.seed);
    let mut baseline_ranks = Vec::new();
    for (label, query, target, exclude) in &items {
        let mut r = rank_of(query, target, set, exclude)?;
        r.query = label.clone();
        results.push(r);
        for _ in 0..args.random_baseline_samples {
            let id = loop {
                let id = rng.random_range(0..set.len());
                if !exclude.contains(&id) {
                    break id;
                }
            };
            let baseline = rank_of(set.v_slice(id), target, set, exclude)?;
            baseline_ranks.push(baseline.rank);
        }
    }
    let report = EvalReport::from_ranks(metric, results, &[1, args.top_n])?;
    let baseline_mrr = if baseline_ranks.is_empty() {
        None
    } else {
        Some(mrr(&baseline_ranks)?)
    };
    emit(
        args,
        RankTaskBody {
            report,
            skipped_items: skipped,
            baseline_mrr,
        },
    )
}

fn eval_phrase(args: &EvalArgs, set: &EmbeddingSet) -> Result<()> {
    let items = read_phrases(dataset_path(args)?)?;
    let mut usable = Vec::new();
    let mut skipped = 0usize;
    for item in items {
        let (Some(a), Some(b), Some(_)) = (
            set.id(&item.word1),
            set.id(&item.word2),
            set.id(&item.merged),
        ) else {
            skipped += 1;
            continue;
        };
        let query: Vec<f64> = set
            .v_slice(a)
            .iter()
            .zip(set.v_slice(b))
            .map(|(x, y)| x + y)
            .collect();
        let exclude = if args.exclude_members { vec![a, b] } else { Vec::new() };
        usable.push((
            format!("{}+{}", item.word1, item.word2),
            query,
            item.merged,
            exclude,
        ));
    }
    rank_items(args, set, "phrase", usable, skipped)
}

fn eval_word2word(args: &EvalArgs, set: &EmbeddingSet) -> Result<()> {
    let items = read_triples(dataset_path(args)?)?;
    let mut usable = Vec::new();
    let mut skipped = 0usize;
    for item in items {
        let (Some(x), Some(y), Some(_)) =
            (set.id(&item.x), set.id(&item.y), set.id(&item.z))
        else {
            skipped += 1;
            continue;
        };
        let query: Vec<f64> = set
            .v_slice(x)
            .iter()
            .zip(set.v_slice(y))
            .map(|(a, b)| a + b)
            .collect();
        let exclude = if args.exclude_members { vec![x, y] } else { Vec::new() };
        usable.push((format!("{}+{}", item.x, item.y), query, item.z, exclude));
    }
    rank_items(args, set, "word2word", usable, skipped)
}

fn eval_or(args: &EvalArgs, set: &EmbeddingSet) -> Result<()> {
    let specs = read_or_specs(dataset_path(args)?)?;
    let weighting = parse_set_weighting(&args.weighting)?;
    let probs = match weighting {
        SetWeighting::Freq => Some(probs_for(set, &load_vocab(args)?)?),
        SetWeighting::Uniform => None,
    };
    let mut usable = Vec::new();
    let mut skipped = 0usize;
    for spec in specs {
        let ids: Option<Vec<usize>> =
            spec.members.iter().map(|w| set.id(w)).collect();
        let (Some(ids), Some(_)) = (ids, set.id(&spec.merged_token)) else {
            skipped += 1;
            continue;
        };
        let member_probs: Vec<f64> = match &probs {
            Some(p) => ids.iter().map(|&id| p[id]).collect(),
            // weights are ignored under uniform weighting; any positive
            // values satisfy the set invariant
            None => vec![1.0 / ids.len() as f64; ids.len()],
        };
        let word_set = WordSet::new(ids.clone(), member_probs)?;
        let query = veclogic::set_vector(&word_set, set, weighting)?;
        let exclude = if args.exclude_members { ids } else { Vec::new() };
        usable.push((
            format!("OR({})", spec.members.join(",")),
            query.to_vec(),
            spec.merged_token,
            exclude,
        ));
    }
    rank_items(args, set, "or", usable, skipped)
}

fn eval_sts(args: &EvalArgs, set: &EmbeddingSet) -> Result<()> {
    let items = read_sts(dataset_path(args)?)?;
    let correlation = sts_eval(&items, set)?;
    emit(
        args,
        StsBody {
            correlation,
            pairs: items.len(),
        },
    )
}

fn eval_pca(args: &EvalArgs, set: &EmbeddingSet) -> Result<()> {
    let words: Vec<String> = args
        .words
        .as_ref()
        .context("task pca needs --words")?
        .split(',')
        .map(|w| w.trim().to_string())
        .filter(|w| !w.is_empty())
        .collect();
    let weighting = parse_set_weighting(&args.weighting)?;
    let probs = match (weighting, &args.vocab) {
        (SetWeighting::Freq, Some(_)) => Some(probs_for(set, &load_vocab(args)?)?),
        _ => None,
    };
    let mut origins = Vec::new();
    for spec in &args.origin {
        let (label, member_list) = spec
            .split_once('=')
            .with_context(|| format!("bad origin {spec:?}, expected label=w1,w2,..."))?;
        let ids: Vec<usize> = member_list
            .split(',')
            .map(|w| {
                set.id(w.trim())
                    .with_context(|| format!("origin word {w:?} missing from the embeddings"))
            })
            .collect::<Result<_>>()?;
        let member_probs: Vec<f64> = match &probs {
            Some(p) => ids.iter().map(|&id| p[id]).collect(),
            None => vec![1.0 / ids.len() as f64; ids.len()],
        };
        origins.push(OriginSpec {
            label: label.trim().to_string(),
            set: WordSet::new(ids, member_probs)?,
            weighting,
        });
    }
    let projection = pca_project(&words, set, args.dims, &origins)?;
    emit(args, PcaBody { projection })
}
