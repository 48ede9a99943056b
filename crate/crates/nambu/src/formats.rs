//! Text formats: encoding files, formula dumps and coordinate vectors.
//!
//! Matrices use the triplet format of [`SparseMatQ::to_triplets`]; vectors
//! use the same `index value` lines with a `len N` header.

use std::fs;
use std::path::Path;

use nambu_core::{GraphEncoding, Rational, SparseVecQ, Superfunction};

use crate::error::{io, Error, Result};

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(n, l)| (n + 1, l.split('#').next().unwrap_or("").trim()))
        .filter(|(_, l)| !l.is_empty())
}

/// One encoding per line, labels separated by commas, semicolons or spaces;
/// `#` starts a comment.
pub fn parse_encodings(text: &str, dim: usize, origin: &str) -> Result<Vec<GraphEncoding>> {
    content_lines(text)
        .map(|(line, l)| {
            GraphEncoding::parse_infer(dim, l).map_err(|e| Error::Format { path: origin.into(), line, message: e.to_string() })
        })
        .collect()
}

pub fn read_encodings(path: &Path, dim: usize) -> Result<Vec<GraphEncoding>> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    parse_encodings(&text, dim, &path.display().to_string())
}

pub fn write_encodings(encodings: &[GraphEncoding]) -> String {
    encodings.iter().map(|e| format!("{e}\n")).collect()
}

/// One superfunction per line in canonical text form.
pub fn dump_formulas(formulas: &[Superfunction]) -> String {
    formulas.iter().map(|f| format!("{f}\n")).collect()
}

pub fn parse_formulas(text: &str, dim: usize, origin: &str) -> Result<Vec<Superfunction>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty() && !l.starts_with('#'))
        .map(|(n, l)| {
            Superfunction::parse(dim, l.trim()).map_err(|e| Error::Format { path: origin.into(), line: n + 1, message: e.to_string() })
        })
        .collect()
}

pub fn dump_vector(v: &SparseVecQ) -> String {
    let mut s = format!("len {}\n", v.len());
    for (i, c) in v.iter() {
        s.push_str(&format!("{i} {}\n", c.to_pq_string()));
    }
    s
}

pub fn parse_vector(text: &str, origin: &str) -> Result<SparseVecQ> {
    let bad = |line: usize, message: String| Error::Format { path: origin.into(), line, message };
    let mut lines = content_lines(text);
    let (n, header) = lines.next().ok_or_else(|| bad(1, "missing `len` header".into()))?;
    let len: usize = header
        .strip_prefix("len ")
        .and_then(|x| x.trim().parse().ok())
        .ok_or_else(|| bad(n, format!("bad header `{header}`")))?;
    let mut entries = Vec::new();
    for (n, l) in lines {
        let (i, c) = l.split_once(' ').ok_or_else(|| bad(n, format!("bad entry `{l}`")))?;
        let i: usize = i.parse().map_err(|_| bad(n, format!("bad index `{i}`")))?;
        let c: Rational = c.trim().parse().map_err(|e: nambu_core::ParseError| bad(n, e.to_string()))?;
        entries.push((i, c));
    }
    SparseVecQ::from_entries(len, entries).map_err(|e| bad(n, e.to_string()))
}

/// Vectors separated by `---` lines.
pub fn dump_vectors(vs: &[SparseVecQ]) -> String {
    vs.iter().map(dump_vector).collect::<Vec<_>>().join("---\n")
}

pub fn parse_vectors(text: &str, origin: &str) -> Result<Vec<SparseVecQ>> {
    if text.trim().is_empty() {
        return Ok(Vec::new());
    }
    text.split("---\n").map(|chunk| parse_vector(chunk, origin)).collect()
}

/// Dense `p/q` strings.
pub fn pq_strings(v: &SparseVecQ) -> Vec<String> {
    v.to_dense().iter().map(Rational::to_pq_string).collect()
}
