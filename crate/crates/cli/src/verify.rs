//! The `verify` subcommand: runs a named identity or scaling check against
//! synthetic closed-form models and reports pass/fail with residual details.
//!
//! - `t1`: the exact PMI factorization identity for frequency-centered
//!   embeddings, max residual over a batch of seeded models.
//! - `prop1`: the log-log slope of the mean KL error term against max |PMI|.
//! - `or`: the merged-word approximation error of the weighted set average,
//!   which should shrink quadratically as the model scale shrinks.
//! - `not`: the exact complement identity for set negation on random
//!   embeddings and sets.

use anyhow::{bail, Context, Result};
use ndarray::{Array1, Array2};
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;
use serde::Serialize;
use veclogic::{
    center_freq_weighted, epsilon_scaling_probe, factorization_identity_residual, kl_error_terms,
    not_compose, or_compose, pmi_delta, set_vector, synth_glove_model, EmbeddingSet, SetWeighting,
    WordSet,
};

use crate::args::VerifyArgs;
use crate::report::{print_json, write_json};

#[derive(Serialize)]
struct Verdict<D: Serialize> {
    command: &'static str,
    check: String,
    pass: bool,
    config: VerifyArgs,
    #[serde(flatten)]
    details: D,
}

fn parse_scales(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .with_context(|| format!("bad scale {tok:?}"))
        })
        .collect()
}

fn emit<D: Serialize>(args: &VerifyArgs, pass: bool, details: D) -> Result<bool> {
    let verdict = Verdict {
        command: "verify",
        check: args.check.clone(),
        pass,
        config: args.clone(),
        details,
    };
    if let Some(path) = &args.json {
        write_json(path, &verdict)?;
    }
    print_json(&verdict)?;
    Ok(pass)
}

pub fn cmd_verify(args: VerifyArgs) -> Result<bool> {
    match args.check.as_str() {
        "t1" => verify_t1(args),
        "prop1" => verify_prop1(args),
        "or" => verify_or(args),
        "not" => verify_not(args),
        other => bail!("unknown check {other:?} (expected t1, prop1, or, not)"),
    }
}

#[derive(Serialize)]
struct T1Details {
    tol: f64,
    max_residual: f64,
    models: u64,
}

/// Frequency-centered embeddings of an exact model reproduce every PMI cell
/// once the per-word KL error terms are added back.
fn verify_t1(args: VerifyArgs) -> Result<bool> {
    let tol = args.tol.unwrap_or(1e-9);
    let mut max_residual = 0.0f64;
    for seed in args.common.seed..args.common.seed + args.seeds {
        let model = synth_glove_model(args.v_size, args.d, args.scale, seed)?;
        let terms = kl_error_terms(&model.induced)?;
        let (centered, _) = center_freq_weighted(
            &model.to_embedding_set(),
            model.induced.p_target(),
            model.induced.p_context(),
        )?;
        let r = factorization_identity_residual(&model.induced, &centered, &terms);
        max_residual = max_residual.max(r);
    }
    emit(
        &args,
        max_residual <= tol,
        T1Details {
            tol,
            max_residual,
            models: args.seeds,
        },
    )
}

#[derive(Serialize)]
struct Prop1Details {
    slope: f64,
    slope_range: (f64, f64),
    points: Vec<(f64, f64)>,
    excluded_scales: Vec<f64>,
}

/// Mean KL error shrinks quadratically with max |PMI|: log-log slope near 2.
fn verify_prop1(args: VerifyArgs) -> Result<bool> {
    let scales = parse_scales(&args.scales)?;
    let probe = epsilon_scaling_probe(&scales, args.v_size, args.d, args.common.seed)?;
    let range = (1.7, 2.3);
    emit(
        &args,
        probe.slope >= range.0 && probe.slope <= range.1,
        Prop1Details {
            slope: probe.slope,
            slope_range: range,
            points: probe.points,
            excluded_scales: probe.excluded,
        },
    )
}

#[derive(Serialize)]
struct OrDetails {
    slope: f64,
    slope_range: (f64, f64),
    /// (max |PMI|, mean row error) per scale
    points: Vec<(f64, f64)>,
    trials_per_scale: usize,
    /// worst gap between the composed vector's predicted row and the
    /// weighted average of member rows, at the largest scale
    max_vector_row_gap: f64,
}

/// A merged word that stands for "any member of A" has the mixture
/// conditional p(c|A) = Σ (p_i/p_A) p(c|w_i), so its PMI row is the log of a
/// mixture. To first order that is the probability-weighted average of the
/// member rows, which is exactly the row the or-composed vector predicts;
/// the gap is second-order, so the log-log slope against max |PMI| is near 2.
fn verify_or(args: VerifyArgs) -> Result<bool> {
    let scales = parse_scales(&args.scales)?;
    if scales.len() < 2 {
        bail!("the or check needs at least 2 scales to fit a slope");
    }
    if args.set_size < 2 || args.set_size > args.v_size / 2 {
        bail!("--set-size must be in [2, V/2]");
    }
    let trials = args.trials.min(100).max(1);
    let mut points = Vec::new();
    let mut max_vector_row_gap = 0.0f64;
    for &scale in &scales {
        let model = synth_glove_model(args.v_size, args.d, scale, args.common.seed)?;
        let joint = &model.induced;
        let (centered, _) =
            center_freq_weighted(&model.to_embedding_set(), joint.p_target(), joint.p_context())?;
        let terms = kl_error_terms(joint)?;
        let mut rng = ChaCha20Rng::seed_from_u64(args.common.seed ^ 0x0f0f0f0f);
        let mut errs = Vec::with_capacity(trials);
        for _ in 0..trials {
            let mut ids: Vec<usize> = (0..args.v_size).collect();
            ids.shuffle(&mut rng);
            ids.truncate(args.set_size);
            let member_probs: Vec<f64> = ids.iter().map(|&w| joint.p_target()[w]).collect();
            let p_a: f64 = member_probs.iter().sum();
            let weights: Vec<f64> = member_probs.iter().map(|p| p / p_a).collect();
            let pmi_rows: Vec<Vec<f64>> = ids
                .iter()
                .map(|&w| {
                    (0..args.v_size)
                        .map(|c| joint.pmi(w, c).expect("dense synthetic support"))
                        .collect()
                })
                .collect();
            let mixture_row = Array1::from_iter((0..args.v_size).map(|c| {
                let p_c_given_a: f64 = ids
                    .iter()
                    .zip(&weights)
                    .map(|(&w, &lam)| lam * joint.prob(w, c).unwrap_or(0.0) / joint.p_target()[w])
                    .sum();
                p_c_given_a.ln() - joint.p_context()[c].ln()
            }));
            let averaged_row = Array1::from_iter((0..args.v_size).map(|c| {
                pmi_rows
                    .iter()
                    .zip(&weights)
                    .map(|(row, &lam)| lam * row[c])
                    .sum::<f64>()
            }));
            let err = (&mixture_row - &averaged_row)
                .iter()
                .fold(0.0f64, |acc, x| acc.max(x.abs()));
            errs.push(err);

            // the averaged row is exactly what the composed vector predicts,
            // up to each member's own factorization error terms
            let rows: Vec<&[f64]> = ids.iter().map(|&w| centered.v_slice(w)).collect();
            let composed = or_compose(&rows, &member_probs)?;
            for c in 0..args.v_size {
                let predicted = composed.dot(&centered.u_row(c))
                    + terms.eps_bar
                    - ids
                        .iter()
                        .zip(&weights)
                        .map(|(&w, &lam)| lam * terms.eps_w[w])
                        .sum::<f64>()
                    - terms.eps_c[c];
                max_vector_row_gap = max_vector_row_gap.max((predicted - averaged_row[c]).abs());
            }
        }
        let mean_err = errs.iter().sum::<f64>() / errs.len() as f64;
        points.push((pmi_delta(joint), mean_err));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    if sxx == 0.0 {
        bail!("all scales produced the same max |PMI|; cannot fit a slope");
    }
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let range = (1.7, 2.3);
    let pass = slope >= range.0 && slope <= range.1 && max_vector_row_gap <= 1e-9;
    emit(
        &args,
        pass,
        OrDetails {
            slope,
            slope_range: range,
            points,
            trials_per_scale: trials,
            max_vector_row_gap,
        },
    )
}

#[derive(Serialize)]
struct NotDetails {
    tol: f64,
    max_residual: f64,
    trials: usize,
}

/// not_compose agrees exactly with "average of the rest minus the average of
/// the whole", under both weightings.
fn verify_not(args: VerifyArgs) -> Result<bool> {
    let tol = args.tol.unwrap_or(1e-12);
    let mut rng = ChaCha20Rng::seed_from_u64(args.common.seed);
    let mut max_residual = 0.0f64;
    for trial in 0..args.trials {
        let n = rng.random_range(6..=args.v_size.max(8));
        let d = rng.random_range(3..=args.d.max(4));
        let words = (0..n).map(|i| format!("w{i}")).collect();
        let v = Array2::from_shape_fn((n, d), |_| rng.random_range(-1.0..1.0));
        let u = Array2::from_shape_fn((n, d), |_| rng.random_range(-1.0..1.0));
        let emb = EmbeddingSet::new(words, v, u)?;
        let size = rng.random_range(2..=4usize.min(n));
        let mut ids: Vec<usize> = (0..n).collect();
        ids.shuffle(&mut rng);
        ids.truncate(size);
        let total: f64 = rng.random_range(0.1..0.9);
        let raw: Vec<f64> = (0..size).map(|_| rng.random_range(0.05..1.0)).collect();
        let raw_sum: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|p| p / raw_sum * total).collect();
        let set = WordSet::new(ids.clone(), probs)?;
        let w = ids[rng.random_range(0..size)];
        let weighting = if trial % 2 == 0 {
            SetWeighting::Freq
        } else {
            SetWeighting::Uniform
        };
        let lhs = not_compose(w, &set, &emb, weighting)?;
        let rest = set.without(w)?;
        let rhs = &set_vector(&rest, &emb, weighting)? - &set_vector(&set, &emb, weighting)?;
        let residual = (&lhs - &rhs)
            .iter()
            .fold(0.0f64, |acc, x| acc.max(x.abs()));
        max_residual = max_residual.max(residual);
    }
    emit(
        &args,
        max_residual <= tol,
        NotDetails {
            tol,
            max_residual,
            trials: args.trials,
        },
    )
}
