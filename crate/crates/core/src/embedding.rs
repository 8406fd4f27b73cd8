//! Paired target/context embedding matrices and their on-disk text format.
//!
//! A set is stored as up to three files sharing one base path: the target
//! matrix at `<path>` (header line `V d`, then `word val1 ... vald` per
//! word), the context matrix at `<path>.ctx` in the same format, and GloVe
//! biases at `<path>.bias` as TSV `word<TAB>a<TAB>b`. Values are written
//! with shortest round-trip formatting, so save → load reproduces every
//! float bitwise. Loading a bare single-matrix file (no `.ctx`) sets u = v.

use std::collections::HashMap;
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use ndarray::{Array2, ArrayView1, ArrayView2};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct EmbeddingSet {
    words: Vec<String>,
    index: HashMap<String, usize>,
    v: Array2<f64>,
    u: Array2<f64>,
    /// (a, b) per-word biases, present iff trained by GloVe or loaded with a
    /// bias sidecar
    biases: Option<(Vec<f64>, Vec<f64>)>,
}

impl EmbeddingSet {
    pub fn new(words: Vec<String>, v: Array2<f64>, u: Array2<f64>) -> Result<EmbeddingSet> {
        if v.nrows() != words.len() || u.nrows() != words.len() {
            return Err(Error::DimensionMismatch {
                expected: words.len(),
                got: v.nrows().max(u.nrows()),
            });
        }
        if v.ncols() != u.ncols() {
            return Err(Error::DimensionMismatch {
                expected: v.ncols(),
                got: u.ncols(),
            });
        }
        let mut index = HashMap::with_capacity(words.len());
        for (i, w) in words.iter().enumerate() {
            if index.insert(w.clone(), i).is_some() {
                return Err(Error::DuplicateWord(w.clone()));
            }
        }
        Ok(EmbeddingSet {
            words,
            index,
            v,
            u,
            biases: None,
        })
    }

    pub fn with_biases(mut self, a: Vec<f64>, b: Vec<f64>) -> Result<EmbeddingSet> {
        if a.len() != self.len() || b.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: a.len().max(b.len()),
            });
        }
        self.biases = Some((a, b));
        Ok(self)
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.v.ncols()
    }

    pub fn words(&self) -> &[String] {
        &self.words
    }

    pub fn word(&self, id: usize) -> &str {
        &self.words[id]
    }

    pub fn id(&self, word: &str) -> Option<usize> {
        self.index.get(word).copied()
    }

    pub fn v(&self) -> ArrayView2<'_, f64> {
        self.v.view()
    }

    pub fn u(&self) -> ArrayView2<'_, f64> {
        self.u.view()
    }

    pub fn v_row(&self, id: usize) -> ArrayView1<'_, f64> {
        self.v.row(id)
    }

    pub fn u_row(&self, id: usize) -> ArrayView1<'_, f64> {
        self.u.row(id)
    }

    pub fn v_slice(&self, id: usize) -> &[f64] {
        self.v.row(id).to_slice().expect("row-major matrix")
    }

    pub fn u_slice(&self, id: usize) -> &[f64] {
        self.u.row(id).to_slice().expect("row-major matrix")
    }

    pub fn biases(&self) -> Option<(&[f64], &[f64])> {
        self.biases.as_ref().map(|(a, b)| (a.as_slice(), b.as_slice()))
    }

    /// Replaces both matrices, keeping words and biases.
    pub fn with_matrices(&self, v: Array2<f64>, u: Array2<f64>) -> Result<EmbeddingSet> {
        let mut out = EmbeddingSet::new(self.words.clone(), v, u)?;
        out.biases = self.biases.clone();
        Ok(out)
    }
}

pub fn save_embeddings(set: &EmbeddingSet, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    write_matrix(&set.words, set.v.view(), path)?;
    write_matrix(&set.words, set.u.view(), &sibling(path, "ctx"))?;
    if let Some((a, b)) = &set.biases {
        let bias_path = sibling(path, "bias");
        let ctx = || bias_path.display().to_string();
        let mut out =
            BufWriter::new(File::create(&bias_path).map_err(|e| Error::io(ctx(), e))?);
        for i in 0..set.len() {
            writeln!(out, "{}\t{}\t{}", set.words[i], a[i], b[i])
                .map_err(|e| Error::io(ctx(), e))?;
        }
        out.flush().map_err(|e| Error::io(ctx(), e))?;
    }
    Ok(())
}

pub fn load_embeddings(path: impl AsRef<Path>) -> Result<EmbeddingSet> {
    let path = path.as_ref();
    let (words, v) = read_matrix(path)?;
    let ctx_path = sibling(path, "ctx");
    let u = if ctx_path.exists() {
        let (ctx_words, u) = read_matrix(&ctx_path)?;
        if ctx_words != words {
            return Err(Error::malformed(
                ctx_path.display().to_string(),
                0,
                "context matrix words differ from target matrix",
            ));
        }
        u
    } else {
        v.clone()
    };
    let set = EmbeddingSet::new(words, v, u)?;
    let bias_path = sibling(path, "bias");
    if bias_path.exists() {
        let (a, b) = read_biases(&bias_path, &set)?;
        return set.with_biases(a, b);
    }
    Ok(set)
}

fn sibling(path: &Path, suffix: &str) -> std::path::PathBuf {
    let mut s = path.as_os_str().to_os_string();
    s.push(".");
    s.push(suffix);
    s.into()
}

fn write_matrix(words: &[String], m: ArrayView2<f64>, path: &Path) -> Result<()> {
    let ctx = || path.display().to_string();
    let mut out = BufWriter::new(File::create(path).map_err(|e| Error::io(ctx(), e))?);
    writeln!(out, "{} {}", m.nrows(), m.ncols()).map_err(|e| Error::io(ctx(), e))?;
    let mut line = String::new();
    for (word, row) in words.iter().zip(m.rows()) {
        line.clear();
        line.push_str(word);
        for x in row {
            line.push(' ');
            line.push_str(&x.to_string());
        }
        writeln!(out, "{line}").map_err(|e| Error::io(ctx(), e))?;
    }
    out.flush().map_err(|e| Error::io(ctx(), e))
}

fn read_matrix(path: &Path) -> Result<(Vec<String>, Array2<f64>)> {
    let ctx = || path.display().to_string();
    let file = File::open(path).map_err(|e| Error::io(ctx(), e))?;
    let mut lines = BufReader::new(file).lines().enumerate();
    let header = match lines.next() {
        Some((_, Ok(h))) => h,
        Some((_, Err(e))) => return Err(Error::io(ctx(), e)),
        None => return Err(Error::malformed(ctx(), 1, "missing `V d` header")),
    };
    let mut parts = header.split_whitespace();
    let rows: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::malformed(ctx(), 1, format!("bad header {header:?}")))?;
    let cols: usize = parts
        .next()
        .and_then(|s| s.parse().ok())
        .ok_or_else(|| Error::malformed(ctx(), 1, format!("bad header {header:?}")))?;
    if parts.next().is_some() {
        return Err(Error::malformed(ctx(), 1, format!("bad header {header:?}")));
    }
    let mut words = Vec::with_capacity(rows);
    let mut seen = HashMap::new();
    let mut data = Vec::with_capacity(rows * cols);
    for (lineno, line) in lines {
        let line = line.map_err(|e| Error::io(ctx(), e))?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split(' ');
        let word = fields
            .next()
            .ok_or_else(|| Error::malformed(ctx(), lineno + 1, "empty row"))?;
        if seen.insert(word.to_string(), ()).is_some() {
            return Err(Error::DuplicateWord(word.to_string()));
        }
        let before = data.len();
        for f in fields {
            let x: f64 = f.parse().map_err(|_| {
                Error::malformed(ctx(), lineno + 1, format!("bad value {f:?}"))
            })?;
            data.push(x);
        }
        if data.len() - before != cols {
            return Err(Error::DimensionMismatch {
                expected: cols,
                got: data.len() - before,
            });
        }
        words.push(word.to_string());
    }
    if words.len() != rows {
        return Err(Error::DimensionMismatch {
            expected: rows,
            got: words.len(),
        });
    }
    let m = Array2::from_shape_vec((rows, cols), data).expect("shape checked");
    Ok((words, m))
}

fn read_biases(path: &Path, set: &EmbeddingSet) -> Result<(Vec<f64>, Vec<f64>)> {
    let ctx = || path.display().to_string();
    let file = File::open(path).map_err(|e| Error::io(ctx(), e))?;
    let mut a = vec![f64::NAN; set.len()];
    let mut b = vec![f64::NAN; set.len()];
    let mut filled = 0usize;
    for (lineno, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(ctx(), e))?;
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split('\t');
        let word = fields
            .next()
            .ok_or_else(|| Error::malformed(ctx(), lineno + 1, "empty row"))?;
        let id = set
            .id(word)
            .ok_or_else(|| Error::WordNotFound(word.to_string()))?;
        let mut parse_val = || -> Result<f64> {
            let f = fields
                .next()
                .ok_or_else(|| Error::malformed(ctx(), lineno + 1, "expected word<TAB>a<TAB>b"))?;
            f.parse()
                .map_err(|_| Error::malformed(ctx(), lineno + 1, format!("bad value {f:?}")))
        };
        a[id] = parse_val()?;
        b[id] = parse_val()?;
        filled += 1;
    }
    if filled != set.len() {
        return Err(Error::DimensionMismatch {
            expected: set.len(),
            got: filled,
        });
    }
    Ok((a, b))
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;
    use rand::prelude::*;
    use rand_chacha::ChaCha20Rng;

    fn random_set(v_words: usize, d: usize, biases: bool, seed: u64) -> EmbeddingSet {
        let mut rng = ChaCha20Rng::seed_from_u64(seed);
        let words: Vec<String> = (0..v_words).map(|i| format!("w{i}")).collect();
        let v = Array2::from_shape_fn((v_words, d), |_| rng.random_range(-2.0..2.0));
        let u = Array2::from_shape_fn((v_words, d), |_| rng.random_range(-2.0..2.0));
        let set = EmbeddingSet::new(words, v, u).unwrap();
        if biases {
            let a = (0..v_words).map(|_| rng.random_range(-3.0..3.0)).collect();
            let b = (0..v_words).map(|_| rng.random_range(-3.0..3.0)).collect();
            set.with_biases(a, b).unwrap()
        } else {
            set
        }
    }

    #[test]
    fn save_load_roundtrip_is_bitwise() {
        let set = random_set(7, 5, true, 42);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.txt");
        save_embeddings(&set, &path).unwrap();
        let loaded = load_embeddings(&path).unwrap();
        assert_eq!(loaded.words(), set.words());
        assert_eq!(loaded.v(), set.v());
        assert_eq!(loaded.u(), set.u());
        let (a0, b0) = set.biases().unwrap();
        let (a1, b1) = loaded.biases().unwrap();
        assert_eq!(a0, a1);
        assert_eq!(b0, b1);
    }

    #[test]
    fn load_without_ctx_file_uses_v_for_u() {
        let set = random_set(3, 4, false, 7);
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.txt");
        save_embeddings(&set, &path).unwrap();
        std::fs::remove_file(dir.path().join("emb.txt.ctx")).unwrap();
        let loaded = load_embeddings(&path).unwrap();
        assert_eq!(loaded.u(), loaded.v());
    }

    #[test]
    fn row_with_wrong_width_is_dimension_mismatch() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.txt");
        std::fs::write(&path, "2 3\na 1 2 3\nb 1 2 3 4\n").unwrap();
        assert!(matches!(
            load_embeddings(&path),
            Err(Error::DimensionMismatch { expected: 3, got: 4 })
        ));
    }

    #[test]
    fn duplicate_word_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.txt");
        std::fs::write(&path, "2 2\na 1 2\na 3 4\n").unwrap();
        assert!(matches!(load_embeddings(&path), Err(Error::DuplicateWord(_))));
    }

    #[test]
    fn malformed_header_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("emb.txt");
        std::fs::write(&path, "two three\na 1 2 3\n").unwrap();
        assert!(matches!(load_embeddings(&path), Err(Error::MalformedFile { .. })));
    }

    #[test]
    fn new_rejects_mismatched_matrices() {
        let words = vec!["a".to_string(), "b".to_string()];
        let v = array![[1.0, 0.0], [0.0, 1.0]];
        let u = array![[1.0], [0.0]];
        assert!(EmbeddingSet::new(words, v, u).is_err());
    }
}
