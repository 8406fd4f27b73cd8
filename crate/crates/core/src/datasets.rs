//! Readers for the tab-separated evaluation datasets. Blank lines are
//! skipped; anything else that does not parse is an error naming the file
//! and line.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;

use crate::corpus::tokenize;
use crate::error::{Error, Result};
use crate::eval::StsItem;

/// A word-arithmetic item: the first two words should add up to the third.
#[derive(Debug, Clone)]
pub struct TripleItem {
    pub x: String,
    pub y: String,
    pub z: String,
}

/// A two-word phrase paired with the merged token it was trained as.
#[derive(Debug, Clone)]
pub struct PhraseItem {
    pub word1: String,
    pub word2: String,
    pub merged: String,
}

fn read_lines(path: &Path) -> Result<Vec<(usize, String)>> {
    let ctx = || path.display().to_string();
    let file = File::open(path).map_err(|e| Error::io(ctx(), e))?;
    let mut out = Vec::new();
    for (i, line) in BufReader::new(file).lines().enumerate() {
        let line = line.map_err(|e| Error::io(ctx(), e))?;
        if line.trim().is_empty() {
            continue;
        }
        out.push((i + 1, line));
    }
    Ok(out)
}

fn fields(line: &str, n: usize, path: &Path, lineno: usize) -> Result<Vec<String>> {
    let parts: Vec<String> = line.split('\t').map(|s| s.trim().to_string()).collect();
    if parts.len() != n || parts.iter().any(String::is_empty) {
        return Err(Error::malformed(
            path.display().to_string(),
            lineno,
            format!("expected {n} non-empty tab-separated fields"),
        ));
    }
    Ok(parts)
}

/// Reads `x<TAB>y<TAB>z` word triples.
pub fn read_triples(path: impl AsRef<Path>) -> Result<Vec<TripleItem>> {
    let path = path.as_ref();
    read_lines(path)?
        .into_iter()
        .map(|(lineno, line)| {
            let mut f = fields(&line, 3, path, lineno)?.into_iter();
            Ok(TripleItem {
                x: f.next().unwrap(),
                y: f.next().unwrap(),
                z: f.next().unwrap(),
            })
        })
        .collect()
}

/// Reads `word1<TAB>word2<TAB>merged` phrase records.
pub fn read_phrases(path: impl AsRef<Path>) -> Result<Vec<PhraseItem>> {
    let path = path.as_ref();
    read_lines(path)?
        .into_iter()
        .map(|(lineno, line)| {
            let mut f = fields(&line, 3, path, lineno)?.into_iter();
            Ok(PhraseItem {
                word1: f.next().unwrap(),
                word2: f.next().unwrap(),
                merged: f.next().unwrap(),
            })
        })
        .collect()
}

/// Reads `sentence1<TAB>sentence2<TAB>score` similarity records; sentences
/// are tokenized the same way as corpora.
pub fn read_sts(path: impl AsRef<Path>) -> Result<Vec<StsItem>> {
    let path = path.as_ref();
    read_lines(path)?
        .into_iter()
        .map(|(lineno, line)| {
            let f = fields(&line, 3, path, lineno)?;
            let score: f64 = f[2].parse().map_err(|_| {
                Error::malformed(
                    path.display().to_string(),
                    lineno,
                    format!("bad similarity score {:?}", f[2]),
                )
            })?;
            if !score.is_finite() {
                return Err(Error::malformed(
                    path.display().to_string(),
                    lineno,
                    "similarity score must be finite",
                ));
            }
            Ok(StsItem {
                s1: tokenize(&f[0]),
                s2: tokenize(&f[1]),
                score,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::io::Write;

    fn write_tmp(content: &str) -> tempfile::NamedTempFile {
        let mut f = tempfile::NamedTempFile::new().unwrap();
        f.write_all(content.as_bytes()).unwrap();
        f
    }

    #[test]
    fn triples_roundtrip_and_blank_lines() {
        let f = write_tmp("man\troyal\tking\n\nparis\tcapital\tfrance\n");
        let items = read_triples(f.path()).unwrap();
        assert_eq!(items.len(), 2);
        assert_eq!(items[0].x, "man");
        assert_eq!(items[1].z, "france");
    }

    #[test]
    fn phrases_parse() {
        let f = write_tmp("new\tyork\tnew_york\n");
        let items = read_phrases(f.path()).unwrap();
        assert_eq!(items[0].merged, "new_york");
    }

    #[test]
    fn sts_parses_scores_and_tokenizes() {
        let f = write_tmp("The Cat sat\ta dog ran\t2.5\n");
        let items = read_sts(f.path()).unwrap();
        assert_eq!(items[0].s1, vec!["the", "cat", "sat"]);
        assert_eq!(items[0].score, 2.5);
    }

    #[test]
    fn malformed_lines_name_the_location() {
        let f = write_tmp("good\tline\there\nonly two\tfields\n");
        let err = read_triples(f.path()).unwrap_err();
        match err {
            Error::MalformedFile { line, .. } => assert_eq!(line, 2),
            other => panic!("unexpected error {other:?}"),
        }
        let g = write_tmp("a\tb\tnot_a_number\n");
        assert!(read_sts(g.path()).is_err());
        let h = write_tmp("a\tb\tinf\n");
        assert!(read_sts(h.path()).is_err());
    }
}
