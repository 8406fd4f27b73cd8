//! Set-logic composition of word vectors: AND (sum), OR (probability-weighted
//! average), conditional embedding relative to a word set, and NOT (negated,
//! rescaled conditional), plus the nearest-neighbor retrieval used to read
//! the results back as words.
//!
//! All operations act on centered vectors; none of them renormalize.

use ndarray::Array1;
use serde::Serialize;

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use crate::embedding::EmbeddingSet;
use crate::error::{Error, Result};
use crate::linalg;

/// How set averages (and the conditional probability inside NOT) weight
/// members: by their probabilities, or uniformly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum SetWeighting {
    Freq,
    Uniform,
}

impl FromStr for SetWeighting {
    type Err = Error;
    fn from_str(s: &str) -> Result<SetWeighting> {
        match s {
            "freq" => Ok(SetWeighting::Freq),
            "uniform" => Ok(SetWeighting::Uniform),
            other => Err(Error::InvalidParam(format!(
                "unknown weighting {other:?}, expected freq or uniform"
            ))),
        }
    }
}

impl fmt::Display for SetWeighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SetWeighting::Freq => write!(f, "freq"),
            SetWeighting::Uniform => write!(f, "uniform"),
        }
    }
}

/// A set of word ids with their occurrence probabilities.
#[derive(Debug, Clone)]
pub struct WordSet {
    members: Vec<usize>,
    probs: Vec<f64>,
    total: f64,
}

impl WordSet {
    pub fn new(members: Vec<usize>, probs: Vec<f64>) -> Result<WordSet> {
        if members.is_empty() {
            return Err(Error::InvalidParam("empty word set".into()));
        }
        if members.len() != probs.len() {
            return Err(Error::WeightMismatch(format!(
                "{} probabilities for {} members",
                probs.len(),
                members.len()
            )));
        }
        let mut seen = HashSet::new();
        for &m in &members {
            if !seen.insert(m) {
                return Err(Error::InvalidParam(format!("duplicate member id {m}")));
            }
        }
        if probs.iter().any(|&p| !(p > 0.0)) {
            return Err(Error::InvalidParam(
                "member probabilities must be > 0".into(),
            ));
        }
        let total: f64 = probs.iter().sum();
        if total > 1.0 + 1e-12 {
            return Err(Error::InvalidParam(format!(
                "set probability {total} exceeds 1"
            )));
        }
        Ok(WordSet {
            members,
            probs,
            total,
        })
    }

    pub fn members(&self) -> &[usize] {
        &self.members
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// p(A)
    pub fn total(&self) -> f64 {
        self.total
    }

    pub fn contains(&self, w: usize) -> bool {
        self.members.contains(&w)
    }

    pub fn prob_of(&self, w: usize) -> Option<f64> {
        self.members
            .iter()
            .position(|&m| m == w)
            .map(|i| self.probs[i])
    }

    /// The set with one member removed, keeping the others' probabilities.
    pub fn without(&self, w: usize) -> Result<WordSet> {
        let mut members = Vec::with_capacity(self.members.len().saturating_sub(1));
        let mut probs = Vec::with_capacity(members.capacity());
        for (&m, &p) in self.members.iter().zip(&self.probs) {
            if m != w {
                members.push(m);
                probs.push(p);
            }
        }
        if members.len() == self.members.len() {
            return Err(Error::InvalidParam(format!("id {w} is not a member")));
        }
        WordSet::new(members, probs)
    }
}

/// A word's vector re-expressed relative to its set's average.
#[derive(Debug, Clone)]
pub struct ConditionalEmbedding {
    pub base: usize,
    pub set: WordSet,
    pub vector: Array1<f64>,
    pub weighting: SetWeighting,
}

/// Intersection of concepts: the elementwise sum.
pub fn and_compose(vectors: &[&[f64]]) -> Result<Array1<f64>> {
    let first = vectors
        .first()
        .ok_or_else(|| Error::InvalidParam("empty vector list".into()))?;
    let d = first.len();
    let mut out = Array1::zeros(d);
    for v in vectors {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: v.len(),
            });
        }
        for (o, &x) in out.iter_mut().zip(*v) {
            *o += x;
        }
    }
    Ok(out)
}

/// Union of words: the probability-weighted average Σᵢ (pᵢ/Σp)·vᵢ.
pub fn or_compose(vectors: &[&[f64]], probs: &[f64]) -> Result<Array1<f64>> {
    if vectors.is_empty() {
        return Err(Error::InvalidParam("empty vector list".into()));
    }
    if vectors.len() != probs.len() {
        return Err(Error::WeightMismatch(format!(
            "{} probabilities for {} vectors",
            probs.len(),
            vectors.len()
        )));
    }
    if probs.iter().any(|&p| !(p > 0.0)) {
        return Err(Error::InvalidParam("probabilities must be > 0".into()));
    }
    let d = vectors[0].len();
    let total: f64 = probs.iter().sum();
    let mut out = Array1::zeros(d);
    for (v, &p) in vectors.iter().zip(probs) {
        if v.len() != d {
            return Err(Error::DimensionMismatch {
                expected: d,
                got: v.len(),
            });
        }
        let w = p / total;
        for (o, &x) in out.iter_mut().zip(*v) {
            *o += w * x;
        }
    }
    Ok(out)
}

/// The set average v_A under the chosen weighting.
pub fn set_vector(
    set: &WordSet,
    embeddings: &EmbeddingSet,
    weighting: SetWeighting,
) -> Result<Array1<f64>> {
    let rows: Vec<&[f64]> = set
        .members()
        .iter()
        .map(|&m| {
            if m >= embeddings.len() {
                Err(Error::InvalidParam(format!("member id {m} out of range")))
            } else {
                Ok(embeddings.v_slice(m))
            }
        })
        .collect::<Result<_>>()?;
    match weighting {
        SetWeighting::Freq => or_compose(&rows, set.probs()),
        SetWeighting::Uniform => {
            let uniform = vec![1.0; rows.len()];
            or_compose(&rows, &uniform)
        }
    }
}

/// v_{w|A} = v_w − v_A.
pub fn conditional_embed(
    w: usize,
    set: &WordSet,
    embeddings: &EmbeddingSet,
    weighting: SetWeighting,
) -> Result<ConditionalEmbedding> {
    if !set.contains(w) {
        return Err(Error::InvalidParam(format!(
            "word id {w} is not in the conditioning set"
        )));
    }
    let v_a = set_vector(set, embeddings, weighting)?;
    let mut vector = Array1::from_iter(embeddings.v_slice(w).iter().copied());
    vector -= &v_a;
    Ok(ConditionalEmbedding {
        base: w,
        set: set.clone(),
        vector,
        weighting,
    })
}

/// Everything in A except w: −(p(w|A)/(1 − p(w|A)))·v_{w|A}.
pub fn not_compose(
    w: usize,
    set: &WordSet,
    embeddings: &EmbeddingSet,
    weighting: SetWeighting,
) -> Result<Array1<f64>> {
    if set.members().len() < 2 {
        return Err(Error::InvalidParam(
            "NOT needs a conditioning set of at least two words".into(),
        ));
    }
    let cond = conditional_embed(w, set, embeddings, weighting)?;
    let p_given = match weighting {
        SetWeighting::Freq => set.prob_of(w).expect("membership checked") / set.total(),
        SetWeighting::Uniform => 1.0 / set.members().len() as f64,
    };
    let coef = -p_given / (1.0 - p_given);
    Ok(cond.vector * coef)
}

/// One retrieved neighbor.
#[derive(Debug, Clone, Serialize)]
pub struct Neighbor {
    pub id: usize,
    pub word: String,
    pub cosine: f64,
}

/// Words ranked by descending cosine to the query; ties break toward the
/// smaller word id.
pub fn nearest_neighbors(
    query: &[f64],
    embeddings: &EmbeddingSet,
    top_n: usize,
    exclude: &[usize],
) -> Result<Vec<Neighbor>> {
    if linalg::norm(query) == 0.0 {
        return Err(Error::ZeroQueryVector);
    }
    let excluded: HashSet<usize> = exclude.iter().copied().collect();
    let mut scored: Vec<(usize, f64)> = (0..embeddings.len())
        .filter(|id| !excluded.contains(id))
        .map(|id| (id, linalg::cosine(query, embeddings.v_slice(id))))
        .collect();
    scored.sort_by(|a, b| b.1.total_cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(top_n);
    Ok(scored
        .into_iter()
        .map(|(id, cosine)| Neighbor {
            id,
            word: embeddings.word(id).to_string(),
            cosine,
        })
        .collect())
}

/// A single-level query: `AND(w1,w2,...)`, `OR(w1,w2,...)`, or
/// `NOT(w | a1,a2,...)`. The NOT base word joins the conditioning set if it
/// is not listed.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Expression {
    And(Vec<String>),
    Or(Vec<String>),
    Not { word: String, set: Vec<String> },
}

pub fn parse_expression(input: &str) -> Result<Expression> {
    let s = input.trim();
    let bad = |msg: &str| Error::InvalidParam(format!("cannot parse {s:?}: {msg}"));
    let (op, rest) = s
        .split_once('(')
        .ok_or_else(|| bad("expected OP(...) form"))?;
    let body = rest
        .strip_suffix(')')
        .ok_or_else(|| bad("missing closing parenthesis"))?;
    if body.contains(['(', ')']) {
        return Err(bad("nested expressions are not supported"));
    }
    let words = |part: &str| -> Result<Vec<String>> {
        let list: Vec<String> = part
            .split(',')
            .map(str::trim)
            .filter(|w| !w.is_empty())
            .map(str::to_string)
            .collect();
        if list.is_empty() {
            return Err(bad("empty word list"));
        }
        Ok(list)
    };
    match op.trim() {
        "AND" => Ok(Expression::And(words(body)?)),
        "OR" => Ok(Expression::Or(words(body)?)),
        "NOT" => {
            let (word, set_part) = body
                .split_once('|')
                .ok_or_else(|| bad("NOT needs the form NOT(w | a1,a2,...)"))?;
            let word = word.trim();
            if word.is_empty() || word.contains(',') {
                return Err(bad("NOT takes exactly one base word before |"));
            }
            let mut set = words(set_part)?;
            if !set.iter().any(|m| m == word) {
                set.push(word.to_string());
            }
            Ok(Expression::Not {
                word: word.to_string(),
                set,
            })
        }
        other => Err(bad(&format!("unknown operation {other:?}"))),
    }
}

impl Expression {
    /// All words the expression mentions, in syntax order.
    pub fn words(&self) -> Vec<&str> {
        match self {
            Expression::And(ws) | Expression::Or(ws) => ws.iter().map(String::as_str).collect(),
            Expression::Not { word, set } => {
                let mut all = vec![word.as_str()];
                all.extend(set.iter().map(String::as_str).filter(|m| *m != word));
                all
            }
        }
    }

    /// Evaluates against an embedding set; `probs` are per-id occurrence
    /// probabilities (used by OR and by freq-weighted NOT).
    pub fn evaluate(
        &self,
        embeddings: &EmbeddingSet,
        probs: &[f64],
        weighting: SetWeighting,
    ) -> Result<Array1<f64>> {
        if probs.len() != embeddings.len() {
            return Err(Error::WeightMismatch(format!(
                "{} probabilities for {} words",
                probs.len(),
                embeddings.len()
            )));
        }
        let id_of = |word: &str| {
            embeddings
                .id(word)
                .ok_or_else(|| Error::WordNotFound(word.to_string()))
        };
        match self {
            Expression::And(ws) => {
                let rows: Vec<&[f64]> = ws
                    .iter()
                    .map(|w| id_of(w).map(|id| embeddings.v_slice(id)))
                    .collect::<Result<_>>()?;
                and_compose(&rows)
            }
            Expression::Or(ws) => {
                let ids: Vec<usize> = ws.iter().map(|w| id_of(w)).collect::<Result<_>>()?;
                let rows: Vec<&[f64]> = ids.iter().map(|&id| embeddings.v_slice(id)).collect();
                let ps: Vec<f64> = ids.iter().map(|&id| probs[id]).collect();
                match weighting {
                    SetWeighting::Freq => or_compose(&rows, &ps),
                    SetWeighting::Uniform => or_compose(&rows, &vec![1.0; rows.len()]),
                }
            }
            Expression::Not { word, set } => {
                let base = id_of(word)?;
                let ids: Vec<usize> = set.iter().map(|w| id_of(w)).collect::<Result<_>>()?;
                let ps: Vec<f64> = ids.iter().map(|&id| probs[id]).collect();
                let word_set = WordSet::new(ids, ps)?;
                not_compose(base, &word_set, embeddings, weighting)
            }
        }
    }
}
