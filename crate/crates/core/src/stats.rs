//! Distributions and oracles: joint/marginal probabilities from counts, PMI,
//! KL error terms, and synthetic models whose induced joints satisfy the
//! log-bilinear factorization exactly.
//!
//! The synthetic model is the workhorse for identity checks: it samples
//! (v, u, a, b), normalizes with a log-partition constant, and exposes the
//! induced joint. PMI of that joint then decomposes exactly into the centered
//! bilinear term plus KL error terms, which is what `factorization_identity_residual`
//! measures.

use ndarray::{Array1, Array2, ArrayView2};
use rand::prelude::*;
use rand_chacha::ChaCha20Rng;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use crate::corpus::{CooccurrenceCounts, Vocabulary};
use crate::embedding::EmbeddingSet;
use crate::error::{Error, Result};
use crate::linalg;

/// Sparse (CSR) joint distribution p(w, c) with both marginals.
#[derive(Debug, Clone)]
pub struct JointDistribution {
    vocab_size: usize,
    row_offsets: Vec<usize>,
    cols: Vec<u32>,
    probs: Vec<f64>,
    p_target: Vec<f64>,
    p_context: Vec<f64>,
    /// total raw weight when built from counts; `None` for synthetic joints
    count_scale: Option<f64>,
}

impl JointDistribution {
    fn from_entries(
        vocab_size: usize,
        entries: impl Iterator<Item = (usize, usize, f64)>,
        count_scale: Option<f64>,
    ) -> Result<JointDistribution> {
        let mut sorted: Vec<(u32, u32, f64)> = entries
            .filter(|&(_, _, p)| p != 0.0)
            .map(|(w, c, p)| (w as u32, c as u32, p))
            .collect();
        if sorted.is_empty() {
            return Err(Error::EmptyCounts);
        }
        sorted.sort_by(|a, b| (a.0, a.1).cmp(&(b.0, b.1)));
        let mut row_offsets = vec![0usize; vocab_size + 1];
        let mut cols = Vec::with_capacity(sorted.len());
        let mut probs = Vec::with_capacity(sorted.len());
        let mut p_target = vec![0.0; vocab_size];
        let mut p_context = vec![0.0; vocab_size];
        for &(w, c, p) in &sorted {
            if w as usize >= vocab_size || c as usize >= vocab_size {
                return Err(Error::InvalidParam(format!(
                    "entry ({w}, {c}) outside vocabulary of {vocab_size}"
                )));
            }
            if p < 0.0 {
                return Err(Error::InvalidParam("negative probability entry".into()));
            }
            row_offsets[w as usize + 1] += 1;
            cols.push(c);
            probs.push(p);
            p_target[w as usize] += p;
            p_context[c as usize] += p;
        }
        for i in 0..vocab_size {
            row_offsets[i + 1] += row_offsets[i];
        }
        Ok(JointDistribution {
            vocab_size,
            row_offsets,
            cols,
            probs,
            p_target,
            p_context,
            count_scale,
        })
    }

    /// Dense matrix constructor; zero cells are excluded from the support.
    pub fn from_dense(m: ArrayView2<f64>) -> Result<JointDistribution> {
        if m.nrows() != m.ncols() {
            return Err(Error::DimensionMismatch {
                expected: m.nrows(),
                got: m.ncols(),
            });
        }
        let mass: f64 = m.iter().sum();
        if (mass - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidParam(format!(
                "joint mass {mass} is not 1"
            )));
        }
        let n = m.nrows();
        JointDistribution::from_entries(
            n,
            m.indexed_iter().map(|((w, c), &p)| (w, c, p)),
            None,
        )
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn support_len(&self) -> usize {
        self.probs.len()
    }

    pub fn p_target(&self) -> &[f64] {
        &self.p_target
    }

    pub fn p_context(&self) -> &[f64] {
        &self.p_context
    }

    pub fn count_scale(&self) -> Option<f64> {
        self.count_scale
    }

    /// Row support of target word w: (context ids, probabilities).
    pub fn row(&self, w: usize) -> (&[u32], &[f64]) {
        let lo = self.row_offsets[w];
        let hi = self.row_offsets[w + 1];
        (&self.cols[lo..hi], &self.probs[lo..hi])
    }

    pub fn prob(&self, w: usize, c: usize) -> Option<f64> {
        let (cols, probs) = self.row(w);
        cols.binary_search(&(c as u32)).ok().map(|i| probs[i])
    }

    /// Raw co-occurrence weight of a pair, when this joint came from counts.
    pub fn weight(&self, w: usize, c: usize) -> Option<f64> {
        let p = self.prob(w, c)?;
        Some(p * self.count_scale.unwrap_or(1.0))
    }

    pub fn pmi(&self, w: usize, c: usize) -> Result<f64> {
        match self.prob(w, c) {
            Some(p) if p > 0.0 => {
                Ok(p.ln() - self.p_target[w].ln() - self.p_context[c].ln())
            }
            _ => Err(Error::UnsupportedPair { w, c }),
        }
    }

    pub fn support_iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..self.vocab_size).flat_map(move |w| {
            let (cols, probs) = self.row(w);
            cols.iter()
                .zip(probs)
                .map(move |(&c, &p)| (w, c as usize, p))
        })
    }

    pub fn total_mass(&self) -> f64 {
        self.probs.iter().sum()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let ctx = || path.display().to_string();
        let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(ctx(), e))?);
        writeln!(out, "w_id\tc_id\tprob").map_err(|e| Error::io(ctx(), e))?;
        for (w, c, p) in self.support_iter() {
            writeln!(out, "{w}\t{c}\t{p}").map_err(|e| Error::io(ctx(), e))?;
        }
        out.flush().map_err(|e| Error::io(ctx(), e))
    }
}

/// Negative-sampling distribution q(w) ∝ count(w)^α with k draws per pair.
#[derive(Debug, Clone)]
pub struct NegativeSamplingDist {
    q: Vec<f64>,
    alpha: f64,
    k: usize,
    cumulative: Vec<f64>,
}

impl NegativeSamplingDist {
    pub fn from_vocab(vocab: &Vocabulary, alpha: f64, k: usize) -> Result<NegativeSamplingDist> {
        if k < 1 {
            return Err(Error::InvalidParam("k must be >= 1".into()));
        }
        if !alpha.is_finite() || alpha < 0.0 {
            return Err(Error::InvalidParam("alpha must be finite and >= 0".into()));
        }
        let mut q: Vec<f64> = (0..vocab.len())
            .map(|i| (vocab.count(i) as f64).powf(alpha))
            .collect();
        let z: f64 = q.iter().sum();
        if z <= 0.0 {
            return Err(Error::EmptyVocabulary);
        }
        q.iter_mut().for_each(|x| *x /= z);
        let mut cumulative = Vec::with_capacity(q.len());
        let mut acc = 0.0;
        for &x in &q {
            acc += x;
            cumulative.push(acc);
        }
        *cumulative.last_mut().unwrap() = 1.0;
        Ok(NegativeSamplingDist {
            q,
            alpha,
            k,
            cumulative,
        })
    }

    pub fn q(&self) -> &[f64] {
        &self.q
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn sample(&self, rng: &mut impl Rng) -> usize {
        let x: f64 = rng.random();
        self.cumulative.partition_point(|&c| c <= x)
    }
}

/// Per-word KL error terms. Infinite values mark conditional distributions
/// whose support misses part of the marginal's support.
#[derive(Debug, Clone)]
pub struct ErrorTerms {
    pub eps_w: Vec<f64>,
    pub eps_c: Vec<f64>,
    pub eps_bar: f64,
}

impl ErrorTerms {
    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let ctx = || path.display().to_string();
        let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(ctx(), e))?);
        writeln!(out, "eps_bar\t{}", self.eps_bar).map_err(|e| Error::io(ctx(), e))?;
        for (i, (ew, ec)) in self.eps_w.iter().zip(&self.eps_c).enumerate() {
            writeln!(out, "{i}\t{ew}\t{ec}").map_err(|e| Error::io(ctx(), e))?;
        }
        out.flush().map_err(|e| Error::io(ctx(), e))
    }
}

/// How the synthetic model's target-side bias is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SynthMode {
    /// Free a_w bias (GloVe-form model).
    Glove,
    /// a_w pinned to log p(w) by fixed-point iteration, so the target-side
    /// shift in the PMI decomposition vanishes (SGNS-form model).
    Sgns,
}

/// An exact log-bilinear model: induced p(w,c) = exp(v·u + a_w + b_c − logZ).
#[derive(Debug, Clone)]
pub struct SyntheticModel {
    pub v: Array2<f64>,
    pub u: Array2<f64>,
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub log_z: f64,
    pub induced: JointDistribution,
}

impl SyntheticModel {
    /// Embedding set over synthetic words `w0..w{V-1}`, with (a, b) attached.
    pub fn to_embedding_set(&self) -> EmbeddingSet {
        let words = (0..self.v.nrows()).map(|i| format!("w{i}")).collect();
        EmbeddingSet::new(words, self.v.clone(), self.u.clone())
            .expect("synthetic matrices are consistent")
            .with_biases(self.a.clone(), self.b.clone())
            .expect("synthetic biases are consistent")
    }
}

/// Normalizes counts into a joint distribution with row/column marginals.
pub fn joint_from_counts(counts: &CooccurrenceCounts) -> Result<JointDistribution> {
    if counts.is_empty() || counts.total_weight() <= 0.0 {
        return Err(Error::EmptyCounts);
    }
    let total = counts.total_weight();
    JointDistribution::from_entries(
        counts.vocab_size(),
        counts.iter().map(|(w, c, x)| (w, c, x / total)),
        Some(total),
    )
}

/// log(p(w,c) / (p(w)·p(c))); errors off the support.
pub fn pmi(joint: &JointDistribution, w: usize, c: usize) -> Result<f64> {
    joint.pmi(w, c)
}

/// Maximum |PMI| over the support.
pub fn pmi_delta(joint: &JointDistribution) -> f64 {
    let mut max = 0.0f64;
    for (w, c, p) in joint.support_iter() {
        let x = (p.ln() - joint.p_target()[w].ln() - joint.p_context()[c].ln()).abs();
        if x > max {
            max = x;
        }
    }
    max
}

/// KL error terms of the factorization identity:
/// eps_w = KL(p(·) ‖ p(·|w)) over contexts, eps_c the mirror over targets,
/// eps_bar = Σ_w p(w)·eps_w. Values within rounding of zero clamp to zero.
pub fn kl_error_terms(joint: &JointDistribution) -> Result<ErrorTerms> {
    let n = joint.vocab_size();
    if joint.p_target().iter().any(|&p| p <= 0.0) || joint.p_context().iter().any(|&p| p <= 0.0) {
        return Err(Error::InvalidParam(
            "kl_error_terms requires strictly positive marginals".into(),
        ));
    }
    let mut eps_w = vec![0.0f64; n];
    for w in 0..n {
        let (cols, probs) = joint.row(w);
        if cols.len() < n {
            eps_w[w] = f64::INFINITY;
            continue;
        }
        let pw = joint.p_target()[w];
        let mut acc = 0.0;
        for (&c, &p) in cols.iter().zip(probs) {
            let pc = joint.p_context()[c as usize];
            let cond = p / pw;
            acc += pc * (pc / cond).ln();
        }
        eps_w[w] = acc.max(0.0);
    }
    // mirror side needs column access; accumulate transposed rows
    let mut col_mass: Vec<usize> = vec![0; n];
    for (_, c, _) in joint.support_iter() {
        col_mass[c] += 1;
    }
    let mut eps_c = vec![0.0f64; n];
    for c in 0..n {
        if col_mass[c] < n {
            eps_c[c] = f64::INFINITY;
        }
    }
    for (w, c, p) in joint.support_iter() {
        if eps_c[c].is_infinite() {
            continue;
        }
        let pw = joint.p_target()[w];
        let cond = p / joint.p_context()[c];
        eps_c[c] += pw * (pw / cond).ln();
    }
    for e in eps_c.iter_mut() {
        if e.is_finite() {
            *e = e.max(0.0);
        }
    }
    let eps_bar = joint
        .p_target()
        .iter()
        .zip(&eps_w)
        .map(|(&p, &e)| p * e)
        .sum();
    Ok(ErrorTerms {
        eps_w,
        eps_c,
        eps_bar,
    })
}

/// Samples an exact log-bilinear model with entries uniform in
/// (−scale, scale) and the log-partition constant chosen so the induced
/// joint sums to 1.
pub fn synth_glove_model(v_size: usize, d: usize, scale: f64, seed: u64) -> Result<SyntheticModel> {
    synth_model_with_mode(v_size, d, scale, seed, SynthMode::Glove)
}

pub fn synth_model_with_mode(
    v_size: usize,
    d: usize,
    scale: f64,
    seed: u64,
    mode: SynthMode,
) -> Result<SyntheticModel> {
    if v_size < 2 || d < 1 {
        return Err(Error::InvalidParam("need V >= 2 and d >= 1".into()));
    }
    if !(scale > 0.0) {
        return Err(Error::InvalidParam("scale must be > 0".into()));
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let v = Array2::from_shape_fn((v_size, d), |_| rng.random_range(-scale..scale));
    let u = Array2::from_shape_fn((v_size, d), |_| rng.random_range(-scale..scale));
    let mut a: Vec<f64> = (0..v_size).map(|_| rng.random_range(-scale..scale)).collect();
    let b: Vec<f64> = (0..v_size).map(|_| rng.random_range(-scale..scale)).collect();
    if mode == SynthMode::Sgns {
        // post-hoc: pin a to the log marginal of a first build, then
        // rebuild; the residual gap a_w - log p(w) is O(delta^2)
        let first = synth_model_from_params(v.clone(), u.clone(), a, b.clone())?;
        a = first.induced.p_target().iter().map(|&p| p.ln()).collect();
    }
    synth_model_from_params(v, u, a, b)
}

/// Builds the exact model induced by explicit parameters.
pub fn synth_model_from_params(
    v: Array2<f64>,
    u: Array2<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
) -> Result<SyntheticModel> {
    let v_size = v.nrows();
    if u.nrows() != v_size || u.ncols() != v.ncols() {
        return Err(Error::DimensionMismatch {
            expected: v_size * v.ncols(),
            got: u.nrows() * u.ncols(),
        });
    }
    if a.len() != v_size || b.len() != v_size {
        return Err(Error::WeightMismatch(format!(
            "bias lengths {} / {} do not match vocabulary {v_size}",
            a.len(),
            b.len()
        )));
    }
    let bilinear = v.dot(&u.t());
    let mut exps = Array2::zeros((v_size, v_size));
    let mut flat = Vec::with_capacity(v_size * v_size);
    for w in 0..v_size {
        for c in 0..v_size {
            let e = bilinear[[w, c]] + a[w] + b[c];
            exps[[w, c]] = e;
            flat.push(e);
        }
    }
    let log_z = linalg::log_sum_exp(&flat);
    let probs = exps.mapv(|e| (e - log_z).exp());
    let induced = JointDistribution::from_entries(
        v_size,
        probs.indexed_iter().map(|((w, c), &p)| (w, c, p)),
        None,
    )?;
    Ok(SyntheticModel {
        v,
        u,
        a,
        b,
        log_z,
        induced,
    })
}

/// Max over the support of |PMI(w,c) − v_w·u_c − eps_bar + eps_w + eps_c|,
/// evaluated with the embedding set as given (center it first).
pub fn factorization_identity_residual(
    joint: &JointDistribution,
    embeddings: &EmbeddingSet,
    terms: &ErrorTerms,
) -> f64 {
    let mut max = 0.0f64;
    for (w, c, p) in joint.support_iter() {
        let pmi = p.ln() - joint.p_target()[w].ln() - joint.p_context()[c].ln();
        let dot = linalg::dot(embeddings.v_slice(w), embeddings.u_slice(c));
        let r = (pmi - dot - terms.eps_bar + terms.eps_w[w] + terms.eps_c[c]).abs();
        if r > max {
            max = r;
        }
    }
    max
}

/// Summed PMI row for a virtual composed word, restricted to contexts
/// supported by every part. Contexts dropped for lack of shared support are
/// reported in `skipped`.
#[derive(Debug, Clone)]
pub struct AndRow {
    pub contexts: Vec<(usize, f64)>,
    pub skipped: Vec<usize>,
}

pub fn synth_and_row(joint: &JointDistribution, parts: &[usize]) -> Result<AndRow> {
    if parts.is_empty() {
        return Err(Error::InvalidParam("need at least one part".into()));
    }
    for &w in parts {
        if w >= joint.vocab_size() {
            return Err(Error::InvalidParam(format!("part {w} out of range")));
        }
    }
    let mut sums: Vec<(usize, f64, usize)> = Vec::new(); // (context, sum, hits)
    let mut seen: std::collections::HashMap<usize, usize> = std::collections::HashMap::new();
    for &w in parts {
        let (cols, probs) = joint.row(w);
        for (&c, &p) in cols.iter().zip(probs) {
            let c = c as usize;
            let pmi = p.ln() - joint.p_target()[w].ln() - joint.p_context()[c].ln();
            match seen.get(&c) {
                Some(&idx) => {
                    sums[idx].1 += pmi;
                    sums[idx].2 += 1;
                }
                None => {
                    seen.insert(c, sums.len());
                    sums.push((c, pmi, 1));
                }
            }
        }
    }
    let mut contexts = Vec::new();
    let mut skipped = Vec::new();
    sums.sort_by_key(|&(c, _, _)| c);
    for (c, sum, hits) in sums {
        if hits == parts.len() {
            contexts.push((c, sum));
        } else {
            skipped.push(c);
        }
    }
    Ok(AndRow { contexts, skipped })
}

/// Same summation over an explicit dense PMI matrix (the AND oracle's input
/// when no distribution is involved).
pub fn synth_and_row_from_matrix(pmi: ArrayView2<f64>, parts: &[usize]) -> Result<Array1<f64>> {
    if parts.is_empty() {
        return Err(Error::InvalidParam("need at least one part".into()));
    }
    let mut row = Array1::zeros(pmi.ncols());
    for &w in parts {
        if w >= pmi.nrows() {
            return Err(Error::InvalidParam(format!("part {w} out of range")));
        }
        row += &pmi.row(w);
    }
    Ok(row)
}
