//! Measurement harness: PMI-residual sampling, rank metrics for composed
//! queries, sentence-similarity correlation, the error-scaling probe, and
//! PCA plot data.

use ndarray::Array1;
use rayon::prelude::*;
use serde::Serialize;

use crate::embedding::EmbeddingSet;
use crate::error::{Error, Result};
use crate::linalg;
use crate::logic::{set_vector, SetWeighting, WordSet};
use crate::stats::{self, JointDistribution};

/// Rank of a target word among all candidates for one query.
#[derive(Debug, Clone, Serialize)]
pub struct RankResult {
    pub query: String,
    pub target: String,
    /// number of candidates with cosine ≥ the target's; the target itself
    /// always counts, so ranks start at 1
    pub rank: usize,
    pub cosine: f64,
}

/// Order statistics over a sample of values.
#[derive(Debug, Clone, Serialize)]
pub struct Aggregates {
    pub count: usize,
    pub mean: f64,
    pub median: f64,
    pub mean_abs: f64,
    pub median_abs: f64,
    pub p05: f64,
    pub p95: f64,
    pub min: f64,
    pub max: f64,
}

pub fn aggregates(values: &[f64]) -> Result<Aggregates> {
    if values.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    let mut sorted: Vec<f64> = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let mut abs: Vec<f64> = values.iter().map(|v| v.abs()).collect();
    abs.sort_by(f64::total_cmp);
    let q = |s: &[f64], f: f64| s[((s.len() - 1) as f64 * f).round() as usize];
    Ok(Aggregates {
        count: values.len(),
        mean: values.iter().sum::<f64>() / values.len() as f64,
        median: q(&sorted, 0.5),
        mean_abs: abs.iter().sum::<f64>() / abs.len() as f64,
        median_abs: q(&abs, 0.5),
        p05: q(&sorted, 0.05),
        p95: q(&sorted, 0.95),
        min: sorted[0],
        max: *sorted.last().unwrap(),
    })
}

/// One row of the top-n accuracy table.
#[derive(Debug, Clone, Serialize)]
pub struct TopNEntry {
    pub n: usize,
    pub accuracy: f64,
}

/// A metric run: per-item records plus the aggregates computed from them.
#[derive(Debug, Clone, Serialize)]
pub struct EvalReport {
    pub metric: String,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub rank_items: Vec<RankResult>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_rank: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mean_cosine: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub mrr: Option<f64>,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub topn_table: Vec<TopNEntry>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value_summary: Option<Aggregates>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correlation: Option<f64>,
}

impl EvalReport {
    pub fn from_ranks(metric: &str, items: Vec<RankResult>, ns: &[usize]) -> Result<EvalReport> {
        let ranks: Vec<usize> = items.iter().map(|r| r.rank).collect();
        let mean_rank = ranks.iter().sum::<usize>() as f64 / ranks.len().max(1) as f64;
        let mean_cosine =
            items.iter().map(|r| r.cosine).sum::<f64>() / items.len().max(1) as f64;
        let topn_table = ns
            .iter()
            .map(|&n| {
                Ok(TopNEntry {
                    n,
                    accuracy: topn_accuracy(&ranks, n)?,
                })
            })
            .collect::<Result<_>>()?;
        Ok(EvalReport {
            metric: metric.to_string(),
            mrr: Some(mrr(&ranks)?),
            mean_rank: Some(mean_rank),
            mean_cosine: Some(mean_cosine),
            rank_items: items,
            topn_table,
            value_summary: None,
            correlation: None,
        })
    }

    pub fn from_values(metric: &str, values: &[f64]) -> Result<EvalReport> {
        Ok(EvalReport {
            metric: metric.to_string(),
            rank_items: Vec::new(),
            mean_rank: None,
            mean_cosine: None,
            mrr: None,
            topn_table: Vec::new(),
            value_summary: Some(aggregates(values)?),
            correlation: None,
        })
    }
}

/// Factorization residuals e_wc = PMI(w,c) − v_w·u_c over the joint support.
/// For count-backed joints, pairs below the raw co-occurrence threshold are
/// dropped; synthetic joints carry no counts and ignore the threshold.
pub fn pmi_error_samples(
    set: &EmbeddingSet,
    joint: &JointDistribution,
    min_cooc: f64,
) -> Result<Vec<f64>> {
    let entries: Vec<(usize, usize)> = joint
        .support_iter()
        .filter(|&(_, _, p)| match joint.count_scale() {
            Some(total) => p * total >= min_cooc,
            None => true,
        })
        .map(|(w, c, _)| (w, c))
        .collect();
    if entries.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    Ok(entries
        .into_par_iter()
        .map(|(w, c)| {
            let pmi = joint.pmi(w, c).expect("support entry");
            pmi - linalg::dot(set.v_slice(w), set.u_slice(c))
        })
        .collect())
}

/// Fixed-width histogram with half-open bins [lo, hi); values at an interior
/// edge land in the right-hand bin, values outside the range are dropped.
pub fn histogram(values: &[f64], bin_width: f64, range: (f64, f64)) -> Result<Vec<(f64, f64, usize)>> {
    if !(bin_width > 0.0) {
        return Err(Error::InvalidParam("bin width must be > 0".into()));
    }
    let (lo, hi) = range;
    if !(hi > lo) {
        return Err(Error::InvalidParam("empty histogram range".into()));
    }
    let bins = ((hi - lo) / bin_width).ceil() as usize;
    let mut counts = vec![0usize; bins];
    for &v in values {
        if v < lo || v >= hi {
            continue;
        }
        let idx = (((v - lo) / bin_width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    Ok(counts
        .into_iter()
        .enumerate()
        .map(|(i, count)| {
            let bin_lo = lo + i as f64 * bin_width;
            (bin_lo, (bin_lo + bin_width).min(hi), count)
        })
        .collect())
}

/// Rank of `target` among non-excluded words by cosine to the query.
pub fn rank_of(
    query: &[f64],
    target: &str,
    set: &EmbeddingSet,
    exclude: &[usize],
) -> Result<RankResult> {
    if query.len() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: query.len(),
        });
    }
    if linalg::norm(query) == 0.0 {
        return Err(Error::ZeroQueryVector);
    }
    let target_id = set
        .id(target)
        .ok_or_else(|| Error::WordNotFound(target.to_string()))?;
    if exclude.contains(&target_id) {
        return Err(Error::InvalidParam(format!(
            "target {target:?} is in the exclusion set"
        )));
    }
    let target_cos = linalg::cosine(query, set.v_slice(target_id));
    let excluded: std::collections::HashSet<usize> = exclude.iter().copied().collect();
    let rank = (0..set.len())
        .filter(|id| !excluded.contains(id))
        .filter(|&id| linalg::cosine(query, set.v_slice(id)) >= target_cos)
        .count();
    Ok(RankResult {
        query: String::new(),
        target: target.to_string(),
        rank,
        cosine: target_cos,
    })
}

/// Fraction of ranks ≤ n.
pub fn topn_accuracy(ranks: &[usize], n: usize) -> Result<f64> {
    if ranks.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    if n < 1 {
        return Err(Error::InvalidParam("n must be >= 1".into()));
    }
    Ok(ranks.iter().filter(|&&r| r <= n).count() as f64 / ranks.len() as f64)
}

/// Mean reciprocal rank.
pub fn mrr(ranks: &[usize]) -> Result<f64> {
    if ranks.is_empty() {
        return Err(Error::EmptyEvaluation);
    }
    if ranks.iter().any(|&r| r < 1) {
        return Err(Error::InvalidParam("ranks start at 1".into()));
    }
    Ok(ranks.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / ranks.len() as f64)
}

/// What to do with sentences whose tokens are all out of vocabulary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OovPolicy {
    /// unknown tokens are skipped; an all-unknown sentence becomes the zero
    /// vector
    Skip,
    /// unknown tokens are skipped, but an all-unknown sentence is an error
    Strict,
}

/// Sum of the member word vectors.
pub fn sentence_vector(
    tokens: &[String],
    set: &EmbeddingSet,
    policy: OovPolicy,
) -> Result<Array1<f64>> {
    let mut out = Array1::zeros(set.dim());
    let mut hits = 0usize;
    for token in tokens {
        if let Some(id) = set.id(token) {
            for (o, &x) in out.iter_mut().zip(set.v_slice(id)) {
                *o += x;
            }
            hits += 1;
        }
    }
    if hits == 0 && policy == OovPolicy::Strict {
        return Err(Error::EmptyEvaluation);
    }
    Ok(out)
}

/// Pearson correlation; errors when either side is constant.
pub fn pearson(x: &[f64], y: &[f64], x_label: &'static str, y_label: &'static str) -> Result<f64> {
    if x.len() != y.len() || x.len() < 2 {
        return Err(Error::InvalidParam(
            "correlation needs two equal-length samples of size >= 2".into(),
        ));
    }
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for (&a, &b) in x.iter().zip(y) {
        sxx += (a - mx) * (a - mx);
        syy += (b - my) * (b - my);
        sxy += (a - mx) * (b - my);
    }
    if sxx == 0.0 {
        return Err(Error::ConstantScores(x_label));
    }
    if syy == 0.0 {
        return Err(Error::ConstantScores(y_label));
    }
    Ok(sxy / (sxx * syy).sqrt())
}

/// A sentence pair with a gold similarity score.
#[derive(Debug, Clone)]
pub struct StsItem {
    pub s1: Vec<String>,
    pub s2: Vec<String>,
    pub score: f64,
}

/// Pearson correlation between gold scores and sentence-vector cosines.
/// Pairs where either sentence vector is zero are skipped.
pub fn sts_eval(items: &[StsItem], set: &EmbeddingSet) -> Result<f64> {
    let mut gold = Vec::new();
    let mut predicted = Vec::new();
    for item in items {
        let a = sentence_vector(&item.s1, set, OovPolicy::Skip)?;
        let b = sentence_vector(&item.s2, set, OovPolicy::Skip)?;
        let (a, b) = (a.as_slice().unwrap(), b.as_slice().unwrap());
        if linalg::norm(a) == 0.0 || linalg::norm(b) == 0.0 {
            continue;
        }
        gold.push(item.score);
        predicted.push(linalg::cosine(a, b));
    }
    if gold.len() < 2 {
        return Err(Error::EmptyEvaluation);
    }
    pearson(&gold, &predicted, "gold", "predicted")
}

/// Outcome of the error-scaling probe.
#[derive(Debug, Clone, Serialize)]
pub struct ScalingProbe {
    /// (delta, mean eps) per usable scale
    pub points: Vec<(f64, f64)>,
    /// scales excluded because their model came out exactly independent
    pub excluded: Vec<f64>,
    /// least-squares slope of log(mean eps) against log(delta)
    pub slope: f64,
}

/// Builds a synthetic model per scale and regresses log mean per-word KL
/// error against log max-|PMI|.
pub fn epsilon_scaling_probe(
    scales: &[f64],
    v_size: usize,
    d: usize,
    seed: u64,
) -> Result<ScalingProbe> {
    let mut distinct: Vec<f64> = scales.to_vec();
    distinct.sort_by(f64::total_cmp);
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::DegenerateRegression(format!(
            "need at least 3 distinct scales, got {}",
            distinct.len()
        )));
    }
    let mut points = Vec::new();
    let mut excluded = Vec::new();
    for &scale in scales {
        if scale == 0.0 {
            // an exactly-independent model has delta 0, which the log-log
            // regression cannot use
            excluded.push(scale);
            continue;
        }
        let model = stats::synth_glove_model(v_size, d, scale, seed)?;
        let delta = stats::pmi_delta(&model.induced);
        if delta == 0.0 {
            excluded.push(scale);
            continue;
        }
        if delta >= 0.5 {
            return Err(Error::InvalidParam(format!(
                "scale {scale} yields max |PMI| {delta:.3} >= 0.5; probe regime violated"
            )));
        }
        let terms = stats::kl_error_terms(&model.induced)?;
        let mean_eps = terms.eps_w.iter().sum::<f64>() / terms.eps_w.len() as f64;
        points.push((delta, mean_eps));
    }
    let xs: Vec<f64> = points.iter().map(|p| p.0.ln()).collect();
    let mut unique_x = xs.clone();
    unique_x.sort_by(f64::total_cmp);
    unique_x.dedup();
    if unique_x.len() < 2 {
        return Err(Error::DegenerateRegression(
            "fewer than 2 distinct delta values after exclusions".into(),
        ));
    }
    let ys: Vec<f64> = points.iter().map(|p| p.1.ln()).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(ScalingProbe {
        points,
        excluded,
        slope: sxy / sxx,
    })
}

/// An extra marker to project alongside the words: a set average.
#[derive(Debug, Clone)]
pub struct OriginSpec {
    pub label: String,
    pub set: WordSet,
    pub weighting: SetWeighting,
}

/// PCA plot data for a selection of words.
#[derive(Debug, Clone, Serialize)]
pub struct PcaProjection {
    pub words: Vec<String>,
    pub coords: Vec<Vec<f64>>,
    pub origins: Vec<(String, Vec<f64>)>,
    pub eigenvalues: Vec<f64>,
}

/// Projects the selected rows onto their top principal directions
/// (unweighted centering); origin markers are set averages computed with the
/// caller's weighting and projected into the same plane.
pub fn pca_project(
    words: &[String],
    set: &EmbeddingSet,
    dims: usize,
    origins: &[OriginSpec],
) -> Result<PcaProjection> {
    if words.len() <= dims {
        return Err(Error::InvalidParam(format!(
            "need more than {dims} words for a {dims}-dim projection, got {}",
            words.len()
        )));
    }
    let ids: Vec<usize> = words
        .iter()
        .map(|w| set.id(w).ok_or_else(|| Error::WordNotFound(w.clone())))
        .collect::<Result<_>>()?;
    let d = set.dim();
    let mut rows = ndarray::Array2::zeros((ids.len(), d));
    for (i, &id) in ids.iter().enumerate() {
        rows.row_mut(i).assign(&set.v_row(id));
    }
    let mean = rows.mean_axis(ndarray::Axis(0)).expect("non-empty");
    for mut row in rows.rows_mut() {
        row -= &mean;
    }
    let directions = linalg::principal_directions(rows.view(), dims, 1e-8);
    let project = |vector: &Array1<f64>| -> Vec<f64> {
        let centered = vector - &mean;
        directions.iter().map(|(_, dir)| centered.dot(dir)).collect()
    };
    let coords = ids
        .iter()
        .map(|&id| project(&set.v_row(id).to_owned()))
        .collect();
    let origin_coords = origins
        .iter()
        .map(|o| {
            let v_a = set_vector(&o.set, set, o.weighting)?;
            Ok((o.label.clone(), project(&v_a)))
        })
        .collect::<Result<_>>()?;
    Ok(PcaProjection {
        words: words.to_vec(),
        coords,
        origins: origin_coords,
        eigenvalues: directions.iter().map(|(l, _)| *l).collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::corpus::{build_vocab, count_cooccurrences, tokenize, Weighting};
    use crate::postprocess::center_freq_weighted;
    use crate::stats::{joint_from_counts, kl_error_terms, synth_glove_model};
    use approx::assert_abs_diff_eq;
    use ndarray::Array2;
    use rand::prelude::*;
    use rand_chacha::ChaCha20Rng;

    fn set_of(rows: Vec<Vec<f64>>) -> EmbeddingSet {
        let n = rows.len();
        let d = rows[0].len();
        let flat: Vec<f64> = rows.into_iter().flatten().collect();
        let v = Array2::from_shape_vec((n, d), flat).unwrap();
        let words = (0..n).map(|i| format!("w{i}")).collect();
        EmbeddingSet::new(words, v.clone(), v).unwrap()
    }

    #[test]
    fn centered_samples_reduce_to_kl_terms() {
        let model = synth_glove_model(20, 8, 0.1, 31).unwrap();
        let set = model.to_embedding_set();
        let (centered, _) =
            center_freq_weighted(&set, model.induced.p_target(), model.induced.p_context())
                .unwrap();
        let terms = kl_error_terms(&model.induced).unwrap();
        let samples = pmi_error_samples(&centered, &model.induced, 1.0).unwrap();
        for ((w, c, _), e) in model.induced.support_iter().zip(&samples) {
            let back = e - (terms.eps_bar - terms.eps_w[w] - terms.eps_c[c]);
            assert!(back.abs() <= 1e-9, "pair ({w},{c}): {back}");
        }
    }

    #[test]
    fn zero_embeddings_give_raw_pmi_samples() {
        let tokens = tokenize("a b a b b a a b");
        let vocab = build_vocab(&tokens, 1).unwrap();
        let counts = count_cooccurrences(&tokens, &vocab, 2, Weighting::Uniform).unwrap();
        let joint = joint_from_counts(&counts).unwrap();
        let words = vocab.words().to_vec();
        let zeros =
            EmbeddingSet::new(words, Array2::zeros((2, 3)), Array2::zeros((2, 3))).unwrap();
        let samples = pmi_error_samples(&zeros, &joint, 0.0).unwrap();
        for ((w, c, _), e) in joint.support_iter().zip(&samples) {
            assert_abs_diff_eq!(*e, joint.pmi(w, c).unwrap(), epsilon = 1e-15);
        }
        let independent = JointDistribution::from_dense(
            ndarray::Array2::from_elem((3, 3), 1.0 / 9.0).view(),
        )
        .unwrap();
        let words3 = vec!["x".into(), "y".into(), "z".into()];
        let zeros3 =
            EmbeddingSet::new(words3, Array2::zeros((3, 2)), Array2::zeros((3, 2))).unwrap();
        for e in pmi_error_samples(&zeros3, &independent, 1.0).unwrap() {
            assert!(e.abs() <= 1e-12);
        }
    }

    #[test]
    fn min_cooc_threshold_filters_and_can_empty_the_set() {
        let tokens = tokenize("a b a b a c");
        let vocab = build_vocab(&tokens, 1).unwrap();
        let counts = count_cooccurrences(&tokens, &vocab, 1, Weighting::Uniform).unwrap();
        let joint = joint_from_counts(&counts).unwrap();
        let words = vocab.words().to_vec();
        let zeros =
            EmbeddingSet::new(words, Array2::zeros((3, 2)), Array2::zeros((3, 2))).unwrap();
        let all = pmi_error_samples(&zeros, &joint, 1.0).unwrap();
        let frequent = pmi_error_samples(&zeros, &joint, 3.0).unwrap();
        assert!(frequent.len() < all.len());
        assert!(matches!(
            pmi_error_samples(&zeros, &joint, 1e9),
            Err(Error::EmptyEvaluation)
        ));
    }

    #[test]
    fn histogram_conventions() {
        let bins = histogram(&[0.0, 0.0, 0.0], 1.0, (-1.0, 1.0)).unwrap();
        assert_eq!(bins.len(), 2);
        assert_eq!(bins[1], (0.0, 1.0, 3));
        let empty = histogram(&[], 0.5, (0.0, 1.0)).unwrap();
        assert!(empty.iter().all(|b| b.2 == 0));
        // interior edges belong to the right-hand bin
        let edges = histogram(&[0.5], 0.5, (0.0, 1.0)).unwrap();
        assert_eq!(edges[0].2, 0);
        assert_eq!(edges[1].2, 1);
        // outside the range: dropped, including the top edge
        let dropped = histogram(&[-0.1, 1.0, 2.0], 0.5, (0.0, 1.0)).unwrap();
        assert_eq!(dropped.iter().map(|b| b.2).sum::<usize>(), 0);
        assert!(histogram(&[1.0], 0.0, (0.0, 1.0)).is_err());
    }

    #[test]
    fn rank_counts_ties_and_respects_exclusions() {
        let emb = set_of(vec![
            vec![1.0, 0.0],
            vec![2.0, 0.0],  // same direction as w0: cosine ties
            vec![0.0, 1.0],
        ]);
        let unique = rank_of(&[0.0, 1.0], "w2", &emb, &[]).unwrap();
        assert_eq!(unique.rank, 1);
        let tied = rank_of(&[1.0, 0.0], "w0", &emb, &[]).unwrap();
        assert_eq!(tied.rank, 2);
        let after_exclusion = rank_of(&[1.0, 0.0], "w0", &emb, &[1]).unwrap();
        assert_eq!(after_exclusion.rank, 1);
        assert!(rank_of(&[0.0, 0.0], "w0", &emb, &[]).is_err());
        assert!(rank_of(&[1.0, 0.0], "w0", &emb, &[0]).is_err());
    }

    #[test]
    fn rank_is_invariant_under_query_scaling() {
        let mut rng = ChaCha20Rng::seed_from_u64(3);
        let rows: Vec<Vec<f64>> = (0..12)
            .map(|_| (0..4).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let emb = set_of(rows);
        let query = [0.3, -0.8, 0.2, 0.5];
        let scaled: Vec<f64> = query.iter().map(|x| x * 37.5).collect();
        for target in ["w0", "w5", "w11"] {
            let a = rank_of(&query, target, &emb, &[]).unwrap();
            let b = rank_of(&scaled, target, &emb, &[]).unwrap();
            assert_eq!(a.rank, b.rank);
        }
    }

    #[test]
    fn topn_and_mrr_hand_values() {
        assert_abs_diff_eq!(
            topn_accuracy(&[1, 5, 200], 10).unwrap(),
            2.0 / 3.0,
            epsilon = 0.0
        );
        assert_abs_diff_eq!(topn_accuracy(&[1, 5, 200], 200).unwrap(), 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(topn_accuracy(&[1, 1, 1], 1).unwrap(), 1.0, epsilon = 0.0);
        assert!(topn_accuracy(&[], 5).is_err());

        assert_abs_diff_eq!(mrr(&[1, 2, 4]).unwrap(), 0.583333, epsilon = 1e-6);
        assert_abs_diff_eq!(mrr(&[1, 2, 4]).unwrap(), 1.75 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(mrr(&[1, 1]).unwrap(), 1.0, epsilon = 0.0);
        assert_abs_diff_eq!(mrr(&[8]).unwrap(), 0.125, epsilon = 0.0);
        assert!(mrr(&[]).is_err());
        assert!(mrr(&[0]).is_err());
    }

    #[test]
    fn rank_metrics_are_permutation_invariant() {
        let a = [3usize, 1, 7, 2, 2];
        let b = [2usize, 2, 1, 7, 3];
        assert_eq!(mrr(&a).unwrap(), mrr(&b).unwrap());
        assert_eq!(
            topn_accuracy(&a, 2).unwrap(),
            topn_accuracy(&b, 2).unwrap()
        );
    }

    #[test]
    fn sentence_vectors_sum_and_skip() {
        let emb = set_of(vec![vec![1.0, 0.0], vec![0.0, 2.0]]);
        let single = sentence_vector(&tokenize("w0"), &emb, OovPolicy::Strict).unwrap();
        assert_eq!(single.as_slice().unwrap(), &[1.0, 0.0]);
        let pair = sentence_vector(&tokenize("w0 w1"), &emb, OovPolicy::Strict).unwrap();
        assert_eq!(pair.as_slice().unwrap(), &[1.0, 2.0]);
        let with_oov = sentence_vector(&tokenize("w0 zzz w1"), &emb, OovPolicy::Strict).unwrap();
        assert_eq!(with_oov.as_slice().unwrap(), &[1.0, 2.0]);
        let all_oov = sentence_vector(&tokenize("xx yy"), &emb, OovPolicy::Skip).unwrap();
        assert_eq!(all_oov.as_slice().unwrap(), &[0.0, 0.0]);
        assert!(sentence_vector(&tokenize("xx yy"), &emb, OovPolicy::Strict).is_err());
    }

    #[test]
    fn pearson_affine_invariance_and_errors() {
        let gold = [1.0, 2.0, 3.0, 4.0];
        let scaled: Vec<f64> = gold.iter().map(|x| 3.0 * x + 7.0).collect();
        assert_abs_diff_eq!(
            pearson(&gold, &scaled, "x", "y").unwrap(),
            1.0,
            epsilon = 1e-12
        );
        let negated: Vec<f64> = gold.iter().map(|x| -x).collect();
        assert_abs_diff_eq!(
            pearson(&gold, &negated, "x", "y").unwrap(),
            -1.0,
            epsilon = 1e-12
        );
        assert!(matches!(
            pearson(&[1.0, 1.0, 1.0], &gold[..3], "gold", "pred"),
            Err(Error::ConstantScores("gold"))
        ));
    }

    #[test]
    fn sts_eval_correlates_and_scales() {
        let emb = set_of(vec![
            vec![1.0, 0.0],
            vec![0.9, 0.1],
            vec![0.0, 1.0],
            vec![0.5, 0.5],
        ]);
        let items = vec![
            StsItem { s1: tokenize("w0"), s2: tokenize("w1"), score: 5.0 },
            StsItem { s1: tokenize("w0"), s2: tokenize("w3"), score: 3.0 },
            StsItem { s1: tokenize("w0"), s2: tokenize("w2"), score: 0.0 },
        ];
        let r = sts_eval(&items, &emb).unwrap();
        assert!(r > 0.9, "correlation {r}");
        let mut scaled_rows = Vec::new();
        for i in 0..4 {
            scaled_rows.push(emb.v_slice(i).iter().map(|x| x * 4.2).collect());
        }
        let scaled = set_of(scaled_rows);
        let r2 = sts_eval(&items, &scaled).unwrap();
        assert_abs_diff_eq!(r, r2, epsilon = 1e-12);
        let constant = vec![
            StsItem { s1: tokenize("w0"), s2: tokenize("w1"), score: 1.0 },
            StsItem { s1: tokenize("w0"), s2: tokenize("w2"), score: 1.0 },
        ];
        assert!(matches!(
            sts_eval(&constant, &emb),
            Err(Error::ConstantScores("gold"))
        ));
    }

    #[test]
    fn scaling_probe_slope_is_near_two() {
        let probe =
            epsilon_scaling_probe(&[0.02, 0.04, 0.08, 0.16], 30, 10, 1).unwrap();
        assert!(probe.excluded.is_empty());
        assert!(
            (1.7..=2.3).contains(&probe.slope),
            "slope {}",
            probe.slope
        );
    }

    #[test]
    fn scaling_probe_rejects_degenerate_inputs() {
        assert!(matches!(
            epsilon_scaling_probe(&[0.04, 0.04], 10, 4, 1),
            Err(Error::DegenerateRegression(_))
        ));
        let with_zero = epsilon_scaling_probe(&[0.0, 0.02, 0.04, 0.08], 10, 4, 1).unwrap();
        assert_eq!(with_zero.excluded, vec![0.0]);
        assert_eq!(with_zero.points.len(), 3);
    }

    #[test]
    fn pca_preserves_planar_geometry() {
        // rows live in a 2-plane inside 5-dim space
        let mut rng = ChaCha20Rng::seed_from_u64(9);
        let basis = Array2::from_shape_fn((2, 5), |_| rng.random_range(-1.0..1.0));
        let coefs = Array2::from_shape_fn((8, 2), |_| rng.random_range(-1.0..1.0));
        let rows = coefs.dot(&basis);
        let emb_rows: Vec<Vec<f64>> = rows.rows().into_iter().map(|r| r.to_vec()).collect();
        let emb = set_of(emb_rows);
        let words: Vec<String> = (0..8).map(|i| format!("w{i}")).collect();
        let proj = pca_project(&words, &emb, 2, &[]).unwrap();
        for i in 0..8 {
            for j in (i + 1)..8 {
                let orig = linalg::norm(
                    &rows
                        .row(i)
                        .iter()
                        .zip(rows.row(j))
                        .map(|(a, b)| a - b)
                        .collect::<Vec<f64>>(),
                );
                let low = linalg::norm(
                    &proj.coords[i]
                        .iter()
                        .zip(&proj.coords[j])
                        .map(|(a, b)| a - b)
                        .collect::<Vec<f64>>(),
                );
                assert_abs_diff_eq!(orig, low, epsilon = 1e-8);
            }
        }
    }

    #[test]
    fn pca_variance_shrinks_and_duplicates_coincide() {
        let mut rng = ChaCha20Rng::seed_from_u64(10);
        let emb_rows: Vec<Vec<f64>> = (0..10)
            .map(|_| (0..6).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let emb = set_of(emb_rows.clone());
        let mut words: Vec<String> = (0..10).map(|i| format!("w{i}")).collect();
        words.push("w3".to_string());
        let proj = pca_project(&words, &emb, 2, &[]).unwrap();
        assert_eq!(proj.coords[3], proj.coords[10]);
        // total variance comparison on the unique-word selection
        let unique: Vec<String> = (0..10).map(|i| format!("w{i}")).collect();
        let proj_u = pca_project(&unique, &emb, 2, &[]).unwrap();
        let mean: Vec<f64> = (0..6)
            .map(|k| emb_rows.iter().map(|r| r[k]).sum::<f64>() / 10.0)
            .collect();
        let var_in: f64 = emb_rows
            .iter()
            .map(|r| r.iter().zip(&mean).map(|(x, m)| (x - m) * (x - m)).sum::<f64>())
            .sum();
        let cmean: Vec<f64> = (0..2)
            .map(|k| proj_u.coords.iter().map(|c| c[k]).sum::<f64>() / 10.0)
            .collect();
        let var_out: f64 = proj_u
            .coords
            .iter()
            .map(|c| c.iter().zip(&cmean).map(|(x, m)| (x - m) * (x - m)).sum::<f64>())
            .sum();
        assert!(var_out <= var_in + 1e-9);
        assert!(pca_project(&unique[..2].to_vec(), &emb, 2, &[]).is_err());
    }

    #[test]
    fn pca_origin_markers_project_with_the_words() {
        let emb = set_of(vec![
            vec![1.0, 0.0, 0.0],
            vec![0.0, 1.0, 0.0],
            vec![0.0, 0.0, 1.0],
            vec![1.0, 1.0, 0.0],
        ]);
        let words: Vec<String> = (0..4).map(|i| format!("w{i}")).collect();
        let singleton = OriginSpec {
            label: "just-w1".into(),
            set: WordSet::new(vec![1], vec![0.2]).unwrap(),
            weighting: SetWeighting::Uniform,
        };
        let proj = pca_project(&words, &emb, 2, &[singleton]).unwrap();
        let (label, coords) = &proj.origins[0];
        assert_eq!(label, "just-w1");
        for (a, b) in coords.iter().zip(&proj.coords[1]) {
            assert_abs_diff_eq!(*a, *b, epsilon = 1e-10);
        }
    }

    #[test]
    fn report_aggregates_match_their_items() {
        let items = vec![
            RankResult { query: "q1".into(), target: "a".into(), rank: 1, cosine: 0.9 },
            RankResult { query: "q2".into(), target: "b".into(), rank: 2, cosine: 0.7 },
            RankResult { query: "q3".into(), target: "c".into(), rank: 4, cosine: 0.5 },
        ];
        let report = EvalReport::from_ranks("test", items, &[1, 10]).unwrap();
        let ranks: Vec<usize> = report.rank_items.iter().map(|r| r.rank).collect();
        assert!((report.mrr.unwrap() - mrr(&ranks).unwrap()).abs() <= 1e-9);
        assert!(
            (report.mean_rank.unwrap()
                - ranks.iter().sum::<usize>() as f64 / ranks.len() as f64)
                .abs()
                <= 1e-9
        );
        assert_abs_diff_eq!(report.topn_table[0].accuracy, 1.0 / 3.0, epsilon = 1e-12);
        assert_abs_diff_eq!(report.topn_table[1].accuracy, 1.0, epsilon = 1e-12);

        let values = [0.5, -0.25, 1.0, 0.0];
        let vr = EvalReport::from_values("residuals", &values).unwrap();
        let agg = vr.value_summary.unwrap();
        assert_eq!(agg.count, 4);
        assert_abs_diff_eq!(agg.mean, 0.3125, epsilon = 1e-12);
        assert_abs_diff_eq!(agg.min, -0.25, epsilon = 0.0);
        assert_abs_diff_eq!(agg.max, 1.0, epsilon = 0.0);
    }
}
