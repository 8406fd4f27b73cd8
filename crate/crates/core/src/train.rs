//! Desk-scale trainers: skip-gram with negative sampling over a token
//! stream, and GloVe-style weighted least squares over co-occurrence counts.
//!
//! Both trainers are single-threaded; with a fixed seed they are bitwise
//! reproducible. The `deterministic` flag is part of the interface contract
//! (non-deterministic parallel updates are a permitted implementation, not a
//! required one), so both settings currently run the same code path.
//!
//! Initialization is uniform in [-0.5/d, 0.5/d], seeded per word rather than
//! per row index: re-ordering vocabulary ids then training full-batch yields
//! the same word vectors up to row permutation.

use ndarray::Array2;
use rand::prelude::*;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::corpus::{CooccurrenceCounts, Vocabulary};
use crate::embedding::EmbeddingSet;
use crate::error::{Error, Result};
use crate::stats::NegativeSamplingDist;

/// Shared knobs for both trainers.
#[derive(Debug, Clone, Serialize)]
pub struct TrainConfig {
    pub dim: usize,
    pub window: usize,
    pub epochs: usize,
    pub learning_rate: f64,
    /// negative samples per positive pair
    pub negatives: usize,
    /// negative-sampling exponent: q(w) ∝ count(w)^alpha
    pub alpha: f64,
    /// count cap in the least-squares weight (x/x_max)^power
    pub x_max: f64,
    pub weighting_power: f64,
    pub seed: u64,
    pub deterministic: bool,
    /// GloVe only: deterministic full-batch descent with a line search
    /// instead of per-entry adaptive updates
    pub full_batch: bool,
}

impl Default for TrainConfig {
    fn default() -> TrainConfig {
        TrainConfig {
            dim: 100,
            window: 5,
            epochs: 5,
            learning_rate: 0.025,
            negatives: 15,
            alpha: 0.75,
            x_max: 100.0,
            weighting_power: 0.75,
            seed: 42,
            deterministic: true,
            full_batch: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if self.dim < 1 {
            return Err(Error::InvalidParam("dim must be >= 1".into()));
        }
        if self.window < 1 {
            return Err(Error::InvalidParam("window must be >= 1".into()));
        }
        if self.negatives < 1 {
            return Err(Error::InvalidParam("negatives must be >= 1".into()));
        }
        if !(self.x_max > 0.0) {
            return Err(Error::InvalidParam("x_max must be > 0".into()));
        }
        if !(self.learning_rate > 0.0) {
            return Err(Error::InvalidParam("learning rate must be > 0".into()));
        }
        Ok(())
    }
}

fn fnv1a(bytes: &[u8]) -> u64 {
    let mut h = 0xcbf29ce484222325u64;
    for &b in bytes {
        h ^= b as u64;
        h = h.wrapping_mul(0x100000001b3);
    }
    h
}

/// Fresh embeddings, uniform in [-0.5/d, 0.5/d], seeded per word.
pub fn init_embeddings(words: Vec<String>, dim: usize, seed: u64) -> Result<EmbeddingSet> {
    let n = words.len();
    let half = 0.5 / dim as f64;
    let mut v = Array2::zeros((n, dim));
    let mut u = Array2::zeros((n, dim));
    for (i, word) in words.iter().enumerate() {
        let h = fnv1a(word.as_bytes());
        let mut rng_v = ChaCha8Rng::seed_from_u64(seed ^ h);
        let mut rng_u = ChaCha8Rng::seed_from_u64(seed.wrapping_add(0x9e3779b97f4a7c15) ^ h);
        for k in 0..dim {
            v[[i, k]] = rng_v.random_range(-half..half);
            u[[i, k]] = rng_u.random_range(-half..half);
        }
    }
    EmbeddingSet::new(words, v, u)
}

const SIGMOID_TABLE_SIZE: usize = 4096;
const SIGMOID_MAX: f64 = 6.0;

struct SigmoidTable {
    sig: Vec<f64>,
    log_sig: Vec<f64>,
}

impl SigmoidTable {
    fn build() -> SigmoidTable {
        let mut sig = Vec::with_capacity(SIGMOID_TABLE_SIZE);
        let mut log_sig = Vec::with_capacity(SIGMOID_TABLE_SIZE);
        for i in 0..SIGMOID_TABLE_SIZE {
            let x = (i as f64 + 0.5) / SIGMOID_TABLE_SIZE as f64 * 2.0 * SIGMOID_MAX - SIGMOID_MAX;
            let s = 1.0 / (1.0 + (-x).exp());
            sig.push(s);
            log_sig.push(s.ln());
        }
        SigmoidTable { sig, log_sig }
    }

    #[inline]
    fn index(x: f64) -> usize {
        let t = (x + SIGMOID_MAX) / (2.0 * SIGMOID_MAX) * SIGMOID_TABLE_SIZE as f64;
        (t as isize).clamp(0, SIGMOID_TABLE_SIZE as isize - 1) as usize
    }

    #[inline]
    fn sigmoid(&self, x: f64) -> f64 {
        self.sig[Self::index(x)]
    }

    #[inline]
    fn log_sigmoid(&self, x: f64) -> f64 {
        self.log_sig[Self::index(x)]
    }
}

/// Skip-gram with negative sampling over the token stream.
pub fn train_sgns(
    tokens: &[String],
    vocab: &Vocabulary,
    config: &TrainConfig,
) -> Result<EmbeddingSet> {
    config.validate()?;
    if vocab.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let set = init_embeddings(vocab.words().to_vec(), config.dim, config.seed)?;
    if config.epochs == 0 {
        return Ok(set);
    }
    let ids = vocab.encode(tokens);
    if ids.len() < 2 {
        return Ok(set);
    }
    let dist = NegativeSamplingDist::from_vocab(vocab, config.alpha, config.negatives)?;
    let table = SigmoidTable::build();
    let d = config.dim;
    let mut v = set.v().to_owned().into_raw_vec_and_offset().0;
    let mut u = set.u().to_owned().into_raw_vec_and_offset().0;
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_mul(0x2545f4914f6cdd1d));
    let mut neu1e = vec![0.0f64; d];
    let total_positions = (ids.len() * config.epochs) as f64;
    let lr0 = config.learning_rate;
    let mut bad_numbers = false;

    for epoch in 0..config.epochs {
        let mut loss = 0.0f64;
        for i in 0..ids.len() {
            let done = (epoch * ids.len() + i) as f64;
            let lr = lr0 * (1.0 - done / total_positions).max(1e-4);
            for off in 1..=config.window {
                let Some(&far) = ids.get(i + off) else { break };
                // the scan emits each ordered pair once per occurrence
                for (w, c) in [(ids[i], far), (far, ids[i])] {
                    let (w, c) = (w as usize, c as usize);
                    let vw = w * d;
                    let mut x = 0.0;
                    for k in 0..d {
                        x += v[vw + k] * u[c * d + k];
                    }
                    if !x.is_finite() {
                        bad_numbers = true;
                    }
                    let g = lr * (1.0 - table.sigmoid(x));
                    loss -= table.log_sigmoid(x);
                    for k in 0..d {
                        neu1e[k] = g * u[c * d + k];
                        u[c * d + k] += g * v[vw + k];
                    }
                    for _ in 0..config.negatives {
                        let t = dist.sample(&mut rng);
                        if t == c {
                            continue;
                        }
                        let td = t * d;
                        let mut x = 0.0;
                        for k in 0..d {
                            x += v[vw + k] * u[td + k];
                        }
                        let g = -lr * table.sigmoid(x);
                        loss -= table.log_sigmoid(-x);
                        for k in 0..d {
                            neu1e[k] += g * u[td + k];
                            u[td + k] += g * v[vw + k];
                        }
                    }
                    for k in 0..d {
                        v[vw + k] += neu1e[k];
                    }
                }
            }
        }
        if bad_numbers || !loss.is_finite() {
            return Err(Error::Divergence { epoch, value: loss });
        }
    }
    let n = vocab.len();
    let v = Array2::from_shape_vec((n, d), v).expect("shape preserved");
    let u = Array2::from_shape_vec((n, d), u).expect("shape preserved");
    set.with_matrices(v, u)
}

fn glove_weight(x: f64, x_max: f64, power: f64) -> f64 {
    if x < x_max {
        (x / x_max).powf(power)
    } else {
        1.0
    }
}

/// Weighted least-squares objective Σ f(X)·(v·u + a_w + b_c − log X)².
pub fn glove_objective(
    set: &EmbeddingSet,
    counts: &CooccurrenceCounts,
    config: &TrainConfig,
) -> Result<f64> {
    let Some((a, b)) = set.biases() else {
        return Err(Error::InvalidParam(
            "objective needs an embedding set with biases".into(),
        ));
    };
    let mut total = 0.0;
    for (w, c, x) in counts.iter() {
        let diff = crate::linalg::dot(set.v_slice(w), set.u_slice(c)) + a[w] + b[c] - x.ln();
        total += glove_weight(x, config.x_max, config.weighting_power) * diff * diff;
    }
    Ok(total)
}

struct GloveParams {
    v: Vec<f64>,
    u: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

fn glove_objective_flat(
    p: &GloveParams,
    entries: &[(usize, usize, f64, f64)],
    d: usize,
) -> f64 {
    let mut total = 0.0;
    for &(w, c, f, target) in entries {
        let mut dot = 0.0;
        for k in 0..d {
            dot += p.v[w * d + k] * p.u[c * d + k];
        }
        let diff = dot + p.a[w] + p.b[c] - target;
        total += f * diff * diff;
    }
    total
}

/// GloVe-style factorization of log co-occurrence counts, with biases.
pub fn train_glove(
    counts: &CooccurrenceCounts,
    vocab: &Vocabulary,
    config: &TrainConfig,
) -> Result<EmbeddingSet> {
    config.validate()?;
    if counts.is_empty() {
        return Err(Error::EmptyCounts);
    }
    if vocab.len() != counts.vocab_size() {
        return Err(Error::WeightMismatch(format!(
            "vocabulary of {} for counts over {}",
            vocab.len(),
            counts.vocab_size()
        )));
    }
    let d = config.dim;
    let n = vocab.len();
    let set = init_embeddings(vocab.words().to_vec(), d, config.seed)?;
    let half = 0.5 / d as f64;
    // biases seeded per word like the matrices, so id permutations only
    // permute parameters
    let mut a = Vec::with_capacity(n);
    let mut b = Vec::with_capacity(n);
    for word in vocab.words() {
        let h = fnv1a(word.as_bytes());
        let mut rng =
            ChaCha8Rng::seed_from_u64(config.seed.wrapping_mul(0xff51afd7ed558ccd) ^ h);
        a.push(rng.random_range(-half..half));
        b.push(rng.random_range(-half..half));
    }
    let mut p = GloveParams {
        v: set.v().to_owned().into_raw_vec_and_offset().0,
        u: set.u().to_owned().into_raw_vec_and_offset().0,
        a,
        b,
    };
    let entries: Vec<(usize, usize, f64, f64)> = counts
        .iter()
        .map(|(w, c, x)| {
            (
                w,
                c,
                glove_weight(x, config.x_max, config.weighting_power),
                x.ln(),
            )
        })
        .collect();

    if config.epochs > 0 {
        if config.full_batch {
            train_glove_full_batch(&mut p, &entries, d, n, config)?;
        } else {
            train_glove_adagrad(&mut p, &entries, d, n, config)?;
        }
    }
    let v = Array2::from_shape_vec((n, d), p.v).expect("shape preserved");
    let u = Array2::from_shape_vec((n, d), p.u).expect("shape preserved");
    set.with_matrices(v, u)?.with_biases(p.a, p.b)
}

fn train_glove_adagrad(
    p: &mut GloveParams,
    entries: &[(usize, usize, f64, f64)],
    d: usize,
    n: usize,
    config: &TrainConfig,
) -> Result<()> {
    let lr = config.learning_rate;
    let mut gsq_v = vec![1.0f64; n * d];
    let mut gsq_u = vec![1.0f64; n * d];
    let mut gsq_a = vec![1.0f64; n];
    let mut gsq_b = vec![1.0f64; n];
    let mut order: Vec<usize> = (0..entries.len()).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed.wrapping_mul(0x5851f42d4c957f2d));
    for epoch in 0..config.epochs {
        order.shuffle(&mut rng);
        let mut objective = 0.0;
        for &idx in &order {
            let (w, c, f, target) = entries[idx];
            let (wd, cd) = (w * d, c * d);
            let mut dot = 0.0;
            for k in 0..d {
                dot += p.v[wd + k] * p.u[cd + k];
            }
            let diff = dot + p.a[w] + p.b[c] - target;
            let fdiff = f * diff;
            objective += fdiff * diff;
            for k in 0..d {
                let gv = fdiff * p.u[cd + k];
                let gu = fdiff * p.v[wd + k];
                p.v[wd + k] -= lr * gv / gsq_v[wd + k].sqrt();
                p.u[cd + k] -= lr * gu / gsq_u[cd + k].sqrt();
                gsq_v[wd + k] += gv * gv;
                gsq_u[cd + k] += gu * gu;
            }
            p.a[w] -= lr * fdiff / gsq_a[w].sqrt();
            p.b[c] -= lr * fdiff / gsq_b[c].sqrt();
            gsq_a[w] += fdiff * fdiff;
            gsq_b[c] += fdiff * fdiff;
        }
        if !objective.is_finite() {
            return Err(Error::Divergence {
                epoch,
                value: objective,
            });
        }
    }
    Ok(())
}

fn train_glove_full_batch(
    p: &mut GloveParams,
    entries: &[(usize, usize, f64, f64)],
    d: usize,
    n: usize,
    config: &TrainConfig,
) -> Result<()> {
    let mut step = config.learning_rate;
    let mut grad = GloveParams {
        v: vec![0.0; n * d],
        u: vec![0.0; n * d],
        a: vec![0.0; n],
        b: vec![0.0; n],
    };
    let mut current = glove_objective_flat(p, entries, d);
    for epoch in 0..config.epochs {
        if !current.is_finite() {
            return Err(Error::Divergence {
                epoch,
                value: current,
            });
        }
        grad.v.iter_mut().for_each(|g| *g = 0.0);
        grad.u.iter_mut().for_each(|g| *g = 0.0);
        grad.a.iter_mut().for_each(|g| *g = 0.0);
        grad.b.iter_mut().for_each(|g| *g = 0.0);
        for &(w, c, f, target) in entries {
            let (wd, cd) = (w * d, c * d);
            let mut dot = 0.0;
            for k in 0..d {
                dot += p.v[wd + k] * p.u[cd + k];
            }
            let fdiff = 2.0 * f * (dot + p.a[w] + p.b[c] - target);
            for k in 0..d {
                grad.v[wd + k] += fdiff * p.u[cd + k];
                grad.u[cd + k] += fdiff * p.v[wd + k];
            }
            grad.a[w] += fdiff;
            grad.b[c] += fdiff;
        }
        // backtracking line search keeps the objective non-increasing
        step *= 2.0;
        let mut accepted = false;
        for _ in 0..60 {
            let trial = GloveParams {
                v: moved(&p.v, &grad.v, step),
                u: moved(&p.u, &grad.u, step),
                a: moved(&p.a, &grad.a, step),
                b: moved(&p.b, &grad.b, step),
            };
            let value = glove_objective_flat(&trial, entries, d);
            if value.is_finite() && value <= current {
                *p = trial;
                current = value;
                accepted = true;
                break;
            }
            step /= 2.0;
        }
        if !accepted {
            break; // gradient too flat to improve; already at a minimum
        }
    }
    Ok(())
}

fn moved(x: &[f64], g: &[f64], step: f64) -> Vec<f64> {
    x.iter().zip(g).map(|(xi, gi)| xi - step * gi).collect()
}
