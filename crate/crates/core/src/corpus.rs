//! Corpus ingestion: tokenization, vocabulary construction, sliding-window
//! co-occurrence counting, and the artificial OR-word corpus transform.
//!
//! Tokenization is whitespace splitting with lowercasing. Out-of-vocabulary
//! tokens are deleted before windowing, so windows close over the gap; counts
//! are reproducible bit-for-bit from the same corpus and parameters.

use std::collections::{HashMap, HashSet};
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};

/// Window weighting for co-occurrence accumulation: every position in the
/// window counts 1 (`Uniform`, SGNS convention) or 1/distance (`Harmonic`,
/// GloVe convention).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Weighting {
    Uniform,
    Harmonic,
}

impl FromStr for Weighting {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "uniform" => Ok(Weighting::Uniform),
            "harmonic" => Ok(Weighting::Harmonic),
            other => Err(Error::InvalidParam(format!(
                "unknown weighting {other:?}; expected uniform or harmonic"
            ))),
        }
    }
}

impl fmt::Display for Weighting {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Weighting::Uniform => write!(f, "uniform"),
            Weighting::Harmonic => write!(f, "harmonic"),
        }
    }
}

/// Word ↔ dense-id map with token counts and unigram probabilities.
/// Ids are assigned in order of first occurrence among retained words.
#[derive(Debug, Clone)]
pub struct Vocabulary {
    words: Vec<String>,
    index: HashMap<String, usize>,
    counts: Vec<u64>,
    total: u64,
    min_count: u64,
}

impl Vocabulary {
    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn word(&self, id: usize) -> &str {
        &self.words[id]
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn count(&self, id: usize) -> u64 {
        self.counts[id]
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn min_count(&self) -> u64 {
        self.min_count
    }

    /// Unigram probability p(w) = count(w) / total.
    pub fn prob(&self, id: usize) -> f64 {
        self.counts[id] as f64 / self.total as f64
    }

    pub fn probs(&self) -> Vec<f64> {
        self.counts
            .iter()
            .map(|&c| c as f64 / self.total as f64)
            .collect()
    }

    /// Maps tokens to ids, dropping out-of-vocabulary tokens.
    pub fn encode(&self, tokens: &[String]) -> Vec<u32> {
        tokens
            .iter()
            .filter_map(|t| self.index.get(t.as_str()).map(|&id| id as u32))
            .collect()
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let ctx = || path.display().to_string();
        let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(ctx(), e))?);
        for (word, count) in self.words.iter().zip(&self.counts) {
            writeln!(out, "{word}\t{count}").map_err(|e| Error::io(ctx(), e))?;
        }
        out.flush().map_err(|e| Error::io(ctx(), e))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Vocabulary> {
        let path = path.as_ref();
        let ctx = || path.display().to_string();
        let file = File::open(path).map_err(|e| Error::io(ctx(), e))?;
        let mut words = Vec::new();
        let mut counts = Vec::new();
        let mut index = HashMap::new();
        for (lineno, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| Error::io(ctx(), e))?;
            if line.is_empty() {
                continue;
            }
            let (word, count) = line
                .split_once('\t')
                .ok_or_else(|| Error::malformed(ctx(), lineno + 1, "expected word<TAB>count"))?;
            let count: u64 = count.parse().map_err(|_| {
                Error::malformed(ctx(), lineno + 1, format!("bad count {count:?}"))
            })?;
            if index.insert(word.to_string(), words.len()).is_some() {
                return Err(Error::DuplicateWord(word.to_string()));
            }
            words.push(word.to_string());
            counts.push(count);
        }
        if words.is_empty() {
            return Err(Error::EmptyVocabulary);
        }
        let total = counts.iter().sum();
        let min_count = counts.iter().copied().min().unwrap_or(1);
        Ok(Vocabulary {
            words,
            index,
            counts,
            total,
            min_count,
        })
    }
}

/// Sparse symmetric-window co-occurrence counts over vocabulary ids.
#[derive(Debug, Clone)]
pub struct CooccurrenceCounts {
    window: usize,
    weighting: Weighting,
    vocab_size: usize,
    /// sorted by (target id, context id)
    entries: Vec<((u32, u32), f64)>,
    total_weight: f64,
}

impl CooccurrenceCounts {
    pub fn window(&self) -> usize {
        self.window
    }

    pub fn weighting(&self) -> Weighting {
        self.weighting
    }

    pub fn vocab_size(&self) -> usize {
        self.vocab_size
    }

    pub fn total_weight(&self) -> f64 {
        self.total_weight
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, w: usize, c: usize) -> Option<f64> {
        let key = (w as u32, c as u32);
        self.entries
            .binary_search_by(|(k, _)| k.cmp(&key))
            .ok()
            .map(|i| self.entries[i].1)
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        self.entries
            .iter()
            .map(|&((w, c), x)| (w as usize, c as usize, x))
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        let path = path.as_ref();
        let ctx = || path.display().to_string();
        let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(ctx(), e))?);
        writeln!(out, "w_id\tc_id\tweight").map_err(|e| Error::io(ctx(), e))?;
        for ((w, c), x) in &self.entries {
            writeln!(out, "{w}\t{c}\t{x}").map_err(|e| Error::io(ctx(), e))?;
        }
        out.flush().map_err(|e| Error::io(ctx(), e))
    }

    /// Reads a counts file written by [`CooccurrenceCounts::save`]. The TSV
    /// carries no metadata, so window, weighting and vocabulary size are
    /// supplied by the caller.
    pub fn load(
        path: impl AsRef<Path>,
        window: usize,
        weighting: Weighting,
        vocab_size: usize,
    ) -> Result<CooccurrenceCounts> {
        let path = path.as_ref();
        let ctx = || path.display().to_string();
        let file = File::open(path).map_err(|e| Error::io(ctx(), e))?;
        let mut lines = BufReader::new(file).lines().enumerate();
        match lines.next() {
            Some((_, Ok(header))) if header == "w_id\tc_id\tweight" => {}
            Some((_, Ok(other))) => {
                return Err(Error::malformed(
                    ctx(),
                    1,
                    format!("bad header {other:?}, expected w_id\\tc_id\\tweight"),
                ))
            }
            Some((_, Err(e))) => return Err(Error::io(ctx(), e)),
            None => return Err(Error::EmptyCounts),
        }
        let mut entries = Vec::new();
        for (lineno, line) in lines {
            let line = line.map_err(|e| Error::io(ctx(), e))?;
            if line.is_empty() {
                continue;
            }
            let mut fields = line.split('\t');
            let mut next_field = |what: &str| {
                fields
                    .next()
                    .ok_or_else(|| Error::malformed(ctx(), lineno + 1, format!("missing {what}")))
                    .map(str::to_owned)
            };
            let w: u32 = next_field("target id")?
                .parse()
                .map_err(|_| Error::malformed(ctx(), lineno + 1, "bad target id"))?;
            let c: u32 = next_field("context id")?
                .parse()
                .map_err(|_| Error::malformed(ctx(), lineno + 1, "bad context id"))?;
            let x: f64 = next_field("weight")?
                .parse()
                .map_err(|_| Error::malformed(ctx(), lineno + 1, "bad weight"))?;
            if (w as usize) >= vocab_size || (c as usize) >= vocab_size {
                return Err(Error::malformed(
                    ctx(),
                    lineno + 1,
                    format!("id out of range for vocabulary of {vocab_size}"),
                ));
            }
            entries.push(((w, c), x));
        }
        if entries.is_empty() {
            return Err(Error::EmptyCounts);
        }
        entries.sort_by(|(a, _), (b, _)| a.cmp(b));
        let total_weight = entries.iter().map(|(_, x)| x).sum();
        Ok(CooccurrenceCounts {
            window,
            weighting,
            vocab_size,
            entries,
            total_weight,
        })
    }
}

/// An artificial OR word: occurrences of any member get rewritten to
/// `merged_token` in the appended corpus copy.
#[derive(Debug, Clone, Serialize)]
pub struct OrWordSpec {
    pub merged_token: String,
    pub members: Vec<String>,
}

impl OrWordSpec {
    pub fn new(merged_token: impl Into<String>, members: Vec<String>) -> Result<OrWordSpec> {
        let merged_token = merged_token.into();
        if members.len() < 2 {
            return Err(Error::InvalidParam(format!(
                "OR spec {merged_token:?} needs at least 2 members"
            )));
        }
        let mut seen = HashSet::new();
        for m in &members {
            if !seen.insert(m.as_str()) {
                return Err(Error::InvalidParam(format!(
                    "OR spec {merged_token:?} lists member {m:?} twice"
                )));
            }
            if *m == merged_token {
                return Err(Error::InvalidParam(format!(
                    "OR spec {merged_token:?} lists itself as a member"
                )));
            }
        }
        Ok(OrWordSpec {
            merged_token,
            members,
        })
    }
}

pub fn tokenize(text: &str) -> Vec<String> {
    text.split_whitespace().map(|t| t.to_lowercase()).collect()
}

/// Builds a vocabulary of all words occurring at least `min_count` times.
/// Ids follow first occurrence order in the stream.
pub fn build_vocab(tokens: &[String], min_count: u64) -> Result<Vocabulary> {
    if min_count < 1 {
        return Err(Error::InvalidParam("min_count must be >= 1".into()));
    }
    let mut raw: HashMap<&str, u64> = HashMap::new();
    for t in tokens {
        *raw.entry(t.as_str()).or_insert(0) += 1;
    }
    let mut words = Vec::new();
    let mut counts = Vec::new();
    let mut index = HashMap::new();
    for t in tokens {
        if index.contains_key(t.as_str()) {
            continue;
        }
        let c = raw[t.as_str()];
        if c >= min_count {
            index.insert(t.clone(), words.len());
            words.push(t.clone());
            counts.push(c);
        }
    }
    if words.is_empty() {
        return Err(Error::EmptyVocabulary);
    }
    let total = counts.iter().sum();
    Ok(Vocabulary {
        words,
        index,
        counts,
        total,
        min_count,
    })
}

/// Symmetric sliding-window co-occurrence counting over the retained stream.
/// For position i and offset d in 1..=window, the ordered pairs
/// (token[i], token[i±d]) each accumulate weight 1 (uniform) or 1/d
/// (harmonic).
pub fn count_cooccurrences(
    tokens: &[String],
    vocab: &Vocabulary,
    window: usize,
    weighting: Weighting,
) -> Result<CooccurrenceCounts> {
    if window < 1 {
        return Err(Error::InvalidParam("window must be >= 1".into()));
    }
    let ids = vocab.encode(tokens);
    let mut map: HashMap<(u32, u32), f64> = HashMap::new();
    for i in 0..ids.len() {
        for d in 1..=window {
            let j = i + d;
            if j >= ids.len() {
                break;
            }
            let x = match weighting {
                Weighting::Uniform => 1.0,
                Weighting::Harmonic => 1.0 / d as f64,
            };
            *map.entry((ids[i], ids[j])).or_insert(0.0) += x;
            *map.entry((ids[j], ids[i])).or_insert(0.0) += x;
        }
    }
    let mut entries: Vec<_> = map.into_iter().collect();
    entries.sort_by(|(a, _), (b, _)| a.cmp(b));
    let total_weight = entries.iter().map(|(_, x)| x).sum();
    Ok(CooccurrenceCounts {
        window,
        weighting,
        vocab_size: vocab.len(),
        entries,
        total_weight,
    })
}

/// Appends to the corpus a copy in which every member occurrence is replaced
/// by its spec's merged token.
pub fn make_or_corpus(tokens: &[String], specs: &[OrWordSpec]) -> Result<Vec<String>> {
    let mut member_of: HashMap<&str, &str> = HashMap::new();
    let mut merged_seen: HashSet<&str> = HashSet::new();
    for spec in specs {
        if !merged_seen.insert(&spec.merged_token) {
            return Err(Error::DuplicateWord(spec.merged_token.clone()));
        }
        for m in &spec.members {
            if member_of.insert(m, &spec.merged_token).is_some() {
                return Err(Error::OverlappingOrMembers(m.clone()));
            }
        }
    }
    let present: HashSet<&str> = tokens.iter().map(|t| t.as_str()).collect();
    for spec in specs {
        if present.contains(spec.merged_token.as_str()) {
            return Err(Error::MergedTokenExists(spec.merged_token.clone()));
        }
    }
    let mut out = Vec::with_capacity(tokens.len() * 2);
    out.extend_from_slice(tokens);
    for t in tokens {
        match member_of.get(t.as_str()) {
            Some(&merged) => out.push(merged.to_string()),
            None => out.push(t.clone()),
        }
    }
    Ok(out)
}

/// Writes OR specs as TSV `merged<TAB>member1,member2,...`, the same shape
/// the OR evaluation dataset uses.
pub fn write_or_specs(specs: &[OrWordSpec], path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let ctx = || path.display().to_string();
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(ctx(), e))?);
    for spec in specs {
        writeln!(out, "{}\t{}", spec.merged_token, spec.members.join(","))
            .map_err(|e| Error::io(ctx(), e))?;
    }
    out.flush().map_err(|e| Error::io(ctx(), e))
}

pub fn read_or_specs(path: impl AsRef<Path>) -> Result<Vec<OrWordSpec>> {
    let path = path.as_ref();
    let ctx = || path.display().to_string();
    let file = File::open(path).map_err(|e| Error::io(ctx(), e))?;
    let mut specs = Vec::new();
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(ctx(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        let (merged, members) = line.split_once('\t').ok_or_else(|| {
            Error::malformed(ctx(), lineno + 1, "expected merged<TAB>member,member,...")
        })?;
        let members: Vec<String> = members
            .split(',')
            .map(|m| m.trim().to_string())
            .filter(|m| !m.is_empty())
            .collect();
        specs.push(OrWordSpec::new(merged.trim(), members).map_err(|e| {
            Error::malformed(ctx(), lineno + 1, e.to_string())
        })?);
    }
    if specs.is_empty() {
        return Err(Error::malformed(ctx(), 0, "no OR specs in file"));
    }
    Ok(specs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn toks(s: &str) -> Vec<String> {
        tokenize(s)
    }

    #[test]
    fn build_vocab_counts_and_total() {
        let v = build_vocab(&toks("a b a"), 1).unwrap();
        assert_eq!(v.len(), 2);
        assert_eq!(v.id("a"), Some(0));
        assert_eq!(v.id("b"), Some(1));
        assert_eq!(v.count(0), 2);
        assert_eq!(v.count(1), 1);
        assert_eq!(v.total(), 3);
    }

    #[test]
    fn build_vocab_applies_min_count() {
        let v = build_vocab(&toks("a b a"), 2).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v.id("a"), Some(0));
        assert_eq!(v.id("b"), None);
        assert_eq!(v.total(), 2);
    }

    #[test]
    fn build_vocab_empty_is_error() {
        assert!(matches!(
            build_vocab(&[], 1),
            Err(Error::EmptyVocabulary)
        ));
        // nothing survives the threshold
        assert!(matches!(
            build_vocab(&toks("a b c"), 5),
            Err(Error::EmptyVocabulary)
        ));
    }

    #[test]
    fn unigram_probs_sum_to_one() {
        let v = build_vocab(&toks("a b a c c c b"), 1).unwrap();
        let sum: f64 = v.probs().iter().sum();
        assert!((sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tokenize_lowercases_and_splits() {
        assert_eq!(toks("The  cat\nSAT"), vec!["the", "cat", "sat"]);
    }

    #[test]
    fn count_window1_uniform() {
        let t = toks("a b a");
        let v = build_vocab(&t, 1).unwrap();
        let c = count_cooccurrences(&t, &v, 1, Weighting::Uniform).unwrap();
        assert_eq!(c.get(0, 1), Some(2.0)); // (a,b)
        assert_eq!(c.get(1, 0), Some(2.0)); // (b,a)
        assert_eq!(c.get(0, 0), None);
        assert!((c.total_weight() - 4.0).abs() < 1e-12);
    }

    #[test]
    fn count_window2_harmonic() {
        let t = toks("a b a");
        let v = build_vocab(&t, 1).unwrap();
        let c = count_cooccurrences(&t, &v, 2, Weighting::Harmonic).unwrap();
        assert_eq!(c.get(0, 1), Some(2.0));
        assert_eq!(c.get(1, 0), Some(2.0));
        assert_eq!(c.get(0, 0), Some(1.0)); // two offset-2 events at weight 1/2
    }

    #[test]
    fn count_single_token_is_empty() {
        let t = toks("a");
        let v = build_vocab(&t, 1).unwrap();
        let c = count_cooccurrences(&t, &v, 3, Weighting::Uniform).unwrap();
        assert!(c.is_empty());
        assert_eq!(c.total_weight(), 0.0);
    }

    #[test]
    fn oov_tokens_close_the_window_gap() {
        let t = toks("a x b");
        let mut retained = toks("a b b a a b");
        retained.extend(toks("a x b"));
        let v = build_vocab(&retained, 2).unwrap();
        assert_eq!(v.id("x"), None);
        let c = count_cooccurrences(&t, &v, 1, Weighting::Uniform).unwrap();
        // x is deleted, so a and b become adjacent
        assert_eq!(c.get(v.id("a").unwrap(), v.id("b").unwrap()), Some(1.0));
    }

    #[test]
    fn or_transform_appends_replaced_copy() {
        let t = toks("x a y b");
        let spec = OrWordSpec::new("a_or_b", vec!["a".into(), "b".into()]).unwrap();
        let out = make_or_corpus(&t, &[spec]).unwrap();
        assert_eq!(
            out,
            vec!["x", "a", "y", "b", "x", "a_or_b", "y", "a_or_b"]
        );
    }

    #[test]
    fn or_transform_without_member_occurrences() {
        let t = toks("x y");
        let spec = OrWordSpec::new("a_or_b", vec!["a".into(), "b".into()]).unwrap();
        assert_eq!(make_or_corpus(&t, &[spec]).unwrap(), vec!["x", "y", "x", "y"]);
    }

    #[test]
    fn overlapping_member_sets_rejected() {
        let t = toks("a b c");
        let s1 = OrWordSpec::new("m1", vec!["a".into(), "b".into()]).unwrap();
        let s2 = OrWordSpec::new("m2", vec!["b".into(), "c".into()]).unwrap();
        assert!(matches!(
            make_or_corpus(&t, &[s1, s2]),
            Err(Error::OverlappingOrMembers(w)) if w == "b"
        ));
    }

    #[test]
    fn merged_token_clash_rejected() {
        let t = toks("a b m");
        let spec = OrWordSpec::new("m", vec!["a".into(), "b".into()]).unwrap();
        assert!(matches!(
            make_or_corpus(&t, &[spec]),
            Err(Error::MergedTokenExists(_))
        ));
    }

    #[test]
    fn or_spec_needs_two_distinct_members() {
        assert!(OrWordSpec::new("m", vec!["a".into()]).is_err());
        assert!(OrWordSpec::new("m", vec!["a".into(), "a".into()]).is_err());
    }

    #[test]
    fn vocab_roundtrip_through_tsv() {
        let v = build_vocab(&toks("a b a c c c b"), 1).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("vocab.tsv");
        v.save(&path).unwrap();
        let v2 = Vocabulary::load(&path).unwrap();
        assert_eq!(v2.words(), v.words());
        assert_eq!(v2.total(), v.total());
        assert_eq!((0..v.len()).map(|i| v2.count(i)).collect::<Vec<_>>(),
                   (0..v.len()).map(|i| v.count(i)).collect::<Vec<_>>());
    }

    #[test]
    fn cooc_roundtrip_through_tsv() {
        let t = toks("a b a b b a c a");
        let v = build_vocab(&t, 1).unwrap();
        let c = count_cooccurrences(&t, &v, 2, Weighting::Harmonic).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cooc.tsv");
        c.save(&path).unwrap();
        let c2 = CooccurrenceCounts::load(&path, 2, Weighting::Harmonic, v.len()).unwrap();
        assert_eq!(c2.len(), c.len());
        for (w, ctx, x) in c.iter() {
            assert_eq!(c2.get(w, ctx), Some(x));
        }
        assert_eq!(c2.total_weight(), c.total_weight());
    }

    #[test]
    fn cooc_load_rejects_bad_header() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("cooc.tsv");
        std::fs::write(&path, "w\tc\tx\n0\t1\t2\n").unwrap();
        assert!(matches!(
            CooccurrenceCounts::load(&path, 1, Weighting::Uniform, 2),
            Err(Error::MalformedFile { .. })
        ));
    }

    fn small_corpus() -> impl Strategy<Value = Vec<String>> {
        proptest::collection::vec(
            prop_oneof![Just("a"), Just("b"), Just("c")].prop_map(str::to_string),
            40..200,
        )
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn doubling_corpus_preserves_unigram_probs(tokens in small_corpus()) {
            let v1 = build_vocab(&tokens, 1).unwrap();
            let mut doubled = tokens.clone();
            doubled.extend(tokens.iter().cloned());
            let v2 = build_vocab(&doubled, 1).unwrap();
            for (id, word) in v1.words().iter().enumerate() {
                let id2 = v2.id(word).unwrap();
                prop_assert!((v1.prob(id) - v2.prob(id2)).abs() < 1e-12);
            }
        }

        #[test]
        fn doubling_corpus_nearly_doubles_cooccurrence_counts(
            tokens in small_corpus(),
            window in 2usize..4,
        ) {
            prop_assume!(tokens.len() > 10 * window);
            let v = build_vocab(&tokens, 1).unwrap();
            let single = count_cooccurrences(&tokens, &v, window, Weighting::Uniform).unwrap();
            let mut doubled = tokens.clone();
            doubled.extend(tokens.iter().cloned());
            let both = count_cooccurrences(&doubled, &v, window, Weighting::Uniform).unwrap();
            // per-entry: the seam can add at most the window weights that fit
            // across the copy boundary
            let seam = (window * (window + 1)) as f64;
            for (w, c, x) in single.iter() {
                let x2 = both.get(w, c).unwrap_or(0.0);
                prop_assert!(
                    x2 - 2.0 * x >= -1e-9 && x2 - 2.0 * x <= seam + 1e-9,
                    "entry ({w},{c}): {x2} vs 2*{x}"
                );
            }
            // aggregate: total weight doubles within 2W/|S| relative
            let rel = (both.total_weight() - 2.0 * single.total_weight()).abs()
                / (2.0 * single.total_weight());
            prop_assert!(rel <= 2.0 * window as f64 / tokens.len() as f64);
        }

        #[test]
        fn or_transform_count_identity(
            tokens in small_corpus(),
        ) {
            let spec = OrWordSpec::new("a_or_b", vec!["a".into(), "b".into()]).unwrap();
            let merged = make_or_corpus(&tokens, &[spec]).unwrap();
            let copy = &merged[tokens.len()..];
            let merged_count = copy.iter().filter(|t| t.as_str() == "a_or_b").count();
            let member_count = tokens
                .iter()
                .filter(|t| t.as_str() == "a" || t.as_str() == "b")
                .count();
            prop_assert_eq!(merged_count, member_count);
        }

        #[test]
        fn uniform_counting_is_symmetric(tokens in small_corpus(), window in 1usize..4) {
            let v = build_vocab(&tokens, 1).unwrap();
            let c = count_cooccurrences(&tokens, &v, window, Weighting::Uniform).unwrap();
            for (w, ctx, x) in c.iter() {
                prop_assert_eq!(c.get(ctx, w), Some(x));
            }
        }
    }
}
