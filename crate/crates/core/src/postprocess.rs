//! Centering and related post-processing of embedding sets.
//!
//! Frequency-weighted centering subtracts the probability-weighted mean from
//! every row; it is what turns an exact log-bilinear factorization into the
//! PMI identity checked by `stats::factorization_identity_residual`. Uniform centering and
//! all-but-the-top are the baselines it is compared against.

use ndarray::{Array1, Array2};
use serde::Serialize;

use crate::corpus::Vocabulary;
use crate::embedding::EmbeddingSet;
use crate::error::{Error, Result};
use crate::linalg;

/// Which transform produced a centered set.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CenteringMode {
    Freq,
    Unif,
    Abtt,
}

/// Record of what a centering pass removed.
#[derive(Debug, Clone, Serialize)]
pub struct CenteringReport {
    pub mode: CenteringMode,
    pub v_mean: Vec<f64>,
    pub u_mean: Vec<f64>,
    pub abtt_components: usize,
    /// unit directions stripped by abtt; empty for the other modes
    pub abtt_directions: Vec<Vec<f64>>,
}

/// Probability-weighted mean row: Σ_w p(w)·row_w.
pub fn freq_mean(matrix: &Array2<f64>, probs: &[f64]) -> Result<Array1<f64>> {
    if probs.len() != matrix.nrows() {
        return Err(Error::WeightMismatch(format!(
            "{} probabilities for {} rows",
            probs.len(),
            matrix.nrows()
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > 1e-9 {
        return Err(Error::WeightMismatch(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    let mut mean = Array1::zeros(matrix.ncols());
    for (row, &p) in matrix.rows().into_iter().zip(probs) {
        for (m, &x) in mean.iter_mut().zip(row) {
            *m += p * x;
        }
    }
    Ok(mean)
}

fn subtract_mean(matrix: &Array2<f64>, mean: &Array1<f64>) -> Array2<f64> {
    let mut out = matrix.clone();
    for mut row in out.rows_mut() {
        row -= mean;
    }
    out
}

/// Frequency-weighted centering with separate target/context marginals.
pub fn center_freq_weighted(
    set: &EmbeddingSet,
    p_target: &[f64],
    p_context: &[f64],
) -> Result<(EmbeddingSet, CenteringReport)> {
    let v_mean = freq_mean(&set.v().to_owned(), p_target)?;
    let u_mean = freq_mean(&set.u().to_owned(), p_context)?;
    let v = subtract_mean(&set.v().to_owned(), &v_mean);
    let u = subtract_mean(&set.u().to_owned(), &u_mean);
    let out = set.with_matrices(v, u)?;
    let report = CenteringReport {
        mode: CenteringMode::Freq,
        v_mean: v_mean.to_vec(),
        u_mean: u_mean.to_vec(),
        abtt_components: 0,
        abtt_directions: Vec::new(),
    };
    Ok((out, report))
}

/// Frequency-weighted centering with corpus unigram probabilities serving as
/// both marginals; words must line up with vocabulary ids.
pub fn center_freq(
    set: &EmbeddingSet,
    vocab: &Vocabulary,
) -> Result<(EmbeddingSet, CenteringReport)> {
    if vocab.len() != set.len() {
        return Err(Error::WeightMismatch(format!(
            "vocabulary of {} for embedding set of {}",
            vocab.len(),
            set.len()
        )));
    }
    let probs = vocab.probs();
    center_freq_weighted(set, &probs, &probs)
}

/// Subtracts the unweighted mean row from both matrices.
pub fn center_uniform(set: &EmbeddingSet) -> Result<(EmbeddingSet, CenteringReport)> {
    let n = set.len();
    let uniform = vec![1.0 / n as f64; n];
    let v_mean = freq_mean(&set.v().to_owned(), &uniform)?;
    let u_mean = freq_mean(&set.u().to_owned(), &uniform)?;
    let v = subtract_mean(&set.v().to_owned(), &v_mean);
    let u = subtract_mean(&set.u().to_owned(), &u_mean);
    let out = set.with_matrices(v, u)?;
    let report = CenteringReport {
        mode: CenteringMode::Unif,
        v_mean: v_mean.to_vec(),
        u_mean: u_mean.to_vec(),
        abtt_components: 0,
        abtt_directions: Vec::new(),
    };
    Ok((out, report))
}

/// Conventional default for the number of stripped directions.
pub fn abtt_default_components(d: usize) -> usize {
    d / 100
}

/// All-but-the-top: uniform centering, then removal of projections onto the
/// top-D principal directions of the centered target matrix. The context
/// matrix is centered but never component-stripped.
pub fn abtt(set: &EmbeddingSet, components: usize) -> Result<(EmbeddingSet, CenteringReport)> {
    if components >= set.dim() {
        return Err(Error::InvalidParam(format!(
            "cannot remove {components} directions from dimension {}",
            set.dim()
        )));
    }
    let (centered, base) = center_uniform(set)?;
    let directions = linalg::principal_directions(centered.v(), components, 1e-8);
    let mut v = centered.v().to_owned();
    for (_, dir) in &directions {
        for mut row in v.rows_mut() {
            let coef = row.dot(dir);
            row.scaled_add(-coef, dir);
        }
    }
    let out = centered.with_matrices(v, centered.u().to_owned())?;
    let report = CenteringReport {
        mode: CenteringMode::Abtt,
        v_mean: base.v_mean,
        u_mean: base.u_mean,
        abtt_components: components,
        abtt_directions: directions.iter().map(|(_, d)| d.to_vec()).collect(),
    };
    Ok((out, report))
}
