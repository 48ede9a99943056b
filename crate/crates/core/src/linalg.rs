//! Sparse exact linear algebra over ℚ.
//!
//! Matrices are stored column-major because every consumer in this crate
//! assembles them one column (one formula) at a time. All elimination is a
//! single left-to-right sweep over the columns ([`ColumnEchelon`]); pivots,
//! particular solutions and kernel bases are read off the same sweep.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt::Write;

use crate::error::{Error, ParseError, Result};
use crate::rational::Rational;

/// A sparse vector: strictly increasing indices, no stored zeros.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct SparseVecQ {
    len: usize,
    entries: Vec<(usize, Rational)>,
}

impl SparseVecQ {
    pub fn zeros(len: usize) -> Self {
        SparseVecQ { len, entries: Vec::new() }
    }

    /// Builds a vector from arbitrary `(index, value)` pairs; duplicates are summed.
    pub fn from_entries(len: usize, entries: impl IntoIterator<Item = (usize, Rational)>) -> Result<Self> {
        let mut map: BTreeMap<usize, Rational> = BTreeMap::new();
        for (i, v) in entries {
            if i >= len {
                return Err(Error::DimensionMismatch(format!("index {i} out of range for length {len}")));
            }
            *map.entry(i).or_default() += v;
        }
        Ok(SparseVecQ { len, entries: map.into_iter().filter(|(_, v)| !v.is_zero()).collect() })
    }

    pub fn from_dense(values: &[Rational]) -> Self {
        SparseVecQ {
            len: values.len(),
            entries: values.iter().enumerate().filter(|(_, v)| !v.is_zero()).map(|(i, v)| (i, v.clone())).collect(),
        }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        assert!(i < len);
        SparseVecQ { len, entries: alloc::vec![(i, Rational::one())] }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, &Rational)> {
        self.entries.iter().map(|(i, v)| (*i, v))
    }

    pub fn get(&self, i: usize) -> Rational {
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(k) => self.entries[k].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn set(&mut self, i: usize, v: Rational) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        match self.entries.binary_search_by_key(&i, |e| e.0) {
            Ok(k) if v.is_zero() => {
                self.entries.remove(k);
            }
            Ok(k) => self.entries[k].1 = v,
            Err(_) if v.is_zero() => {}
            Err(k) => self.entries.insert(k, (i, v)),
        }
    }

    /// First nonzero entry.
    pub fn leading(&self) -> Option<(usize, &Rational)> {
        self.entries.first().map(|(i, v)| (*i, v))
    }

    pub fn to_dense(&self) -> Vec<Rational> {
        let mut out = alloc::vec![Rational::zero(); self.len];
        for (i, v) in &self.entries {
            out[*i] = v.clone();
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return SparseVecQ::zeros(self.len);
        }
        SparseVecQ { len: self.len, entries: self.entries.iter().map(|(i, v)| (*i, v * c)).collect() }
    }

    /// `self + c * other`.
    pub fn axpy(&self, c: &Rational, other: &SparseVecQ) -> Self {
        debug_assert_eq!(self.len, other.len);
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.entries.len() + other.entries.len());
        let (mut a, mut b) = (self.entries.iter().peekable(), other.entries.iter().peekable());
        loop {
            match (a.peek(), b.peek()) {
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        out.push((*i, x.clone()));
                        a.next();
                    } else if j < i {
                        out.push((*j, c * y));
                        b.next();
                    } else {
                        let s = x + &(c * y);
                        if !s.is_zero() {
                            out.push((*i, s));
                        }
                        a.next();
                        b.next();
                    }
                }
                (Some((i, x)), None) => {
                    out.push((*i, x.clone()));
                    a.next();
                }
                (None, Some((j, y))) => {
                    out.push((*j, c * y));
                    b.next();
                }
                (None, None) => break,
            }
        }
        SparseVecQ { len: self.len, entries: out }
    }

    pub fn neg(&self) -> Self {
        SparseVecQ { len: self.len, entries: self.entries.iter().map(|(i, v)| (*i, -v)).collect() }
    }

    /// Concatenation `self ++ other`.
    pub fn concat(&self, other: &SparseVecQ) -> Self {
        let mut entries = self.entries.clone();
        entries.extend(other.entries.iter().map(|(i, v)| (i + self.len, v.clone())));
        SparseVecQ { len: self.len + other.len, entries }
    }
}

/// A column-major sparse matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseMatQ {
    rows: usize,
    columns: Vec<SparseVecQ>,
}

impl SparseMatQ {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        SparseMatQ { rows, columns: (0..cols).map(|_| SparseVecQ::zeros(rows)).collect() }
    }

    pub fn from_columns(rows: usize, columns: Vec<SparseVecQ>) -> Result<Self> {
        if let Some(c) = columns.iter().find(|c| c.len() != rows) {
            return Err(Error::DimensionMismatch(format!("column of length {} in a {rows}-row matrix", c.len())));
        }
        Ok(SparseMatQ { rows, columns })
    }

    /// Row-major dense input, mostly for tests and small literals.
    pub fn from_rows(rows: &[Vec<Rational>]) -> Result<Self> {
        let cols = rows.first().map_or(0, |r| r.len());
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::DimensionMismatch(String::from("ragged rows")));
        }
        let mut m = SparseMatQ::zeros(rows.len(), cols);
        for (i, row) in rows.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                if !v.is_zero() {
                    m.columns[j].set(i, v.clone());
                }
            }
        }
        Ok(m)
    }

    pub fn from_i64_rows(rows: &[&[i64]]) -> Self {
        let rows: Vec<Vec<Rational>> = rows.iter().map(|r| r.iter().map(|&x| Rational::from_i64(x)).collect()).collect();
        Self::from_rows(&rows).expect("rectangular literal")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn column(&self, j: usize) -> &SparseVecQ {
        &self.columns[j]
    }

    pub fn columns(&self) -> &[SparseVecQ] {
        &self.columns
    }

    pub fn set_column(&mut self, j: usize, v: SparseVecQ) -> Result<()> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch(format!("column length {} != {} rows", v.len(), self.rows)));
        }
        self.columns[j] = v;
        Ok(())
    }

    pub fn push_column(&mut self, v: SparseVecQ) -> Result<()> {
        if v.len() != self.rows {
            return Err(Error::DimensionMismatch(format!("column length {} != {} rows", v.len(), self.rows)));
        }
        self.columns.push(v);
        Ok(())
    }

    pub fn get(&self, i: usize, j: usize) -> Rational {
        self.columns[j].get(i)
    }

    pub fn nnz(&self) -> usize {
        self.columns.iter().map(SparseVecQ::nnz).sum()
    }

    pub fn to_dense(&self) -> Vec<Vec<Rational>> {
        let mut out = alloc::vec![alloc::vec![Rational::zero(); self.cols()]; self.rows];
        for (j, c) in self.columns.iter().enumerate() {
            for (i, v) in c.iter() {
                out[i][j] = v.clone();
            }
        }
        out
    }

    /// `M · x`.
    pub fn mul_vec(&self, x: &SparseVecQ) -> Result<SparseVecQ> {
        if x.len() != self.cols() {
            return Err(Error::DimensionMismatch(format!("vector of length {} for {} columns", x.len(), self.cols())));
        }
        let mut acc = SparseVecQ::zeros(self.rows);
        for (j, c) in x.iter() {
            acc = acc.axpy(c, &self.columns[j]);
        }
        Ok(acc)
    }

    /// Permutes rows: row `i` of the result is row `perm[i]` of `self`.
    pub fn permute_rows(&self, perm: &[usize]) -> Result<SparseMatQ> {
        if perm.len() != self.rows {
            return Err(Error::DimensionMismatch(String::from("row permutation length")));
        }
        let mut inverse = alloc::vec![usize::MAX; self.rows];
        for (new, &old) in perm.iter().enumerate() {
            if old >= self.rows || inverse[old] != usize::MAX {
                return Err(Error::DimensionMismatch(String::from("not a permutation")));
            }
            inverse[old] = new;
        }
        let columns = self
            .columns
            .iter()
            .map(|c| SparseVecQ::from_entries(self.rows, c.iter().map(|(i, v)| (inverse[i], v.clone()))))
            .collect::<Result<Vec<_>>>()?;
        Ok(SparseMatQ { rows: self.rows, columns })
    }

    /// Coordinate triplets `row col value`, one per line, sorted by row then column.
    pub fn to_triplets(&self) -> String {
        let mut cells: Vec<(usize, usize, &Rational)> = Vec::with_capacity(self.nnz());
        for (j, c) in self.columns.iter().enumerate() {
            for (i, v) in c.iter() {
                cells.push((i, j, v));
            }
        }
        cells.sort_by_key(|&(i, j, _)| (i, j));
        let mut out = String::new();
        let _ = writeln!(out, "% {} {}", self.rows, self.cols());
        for (i, j, v) in cells {
            let _ = writeln!(out, "{i} {j} {}", v.to_pq_string());
        }
        out
    }

    /// Parses the output of [`SparseMatQ::to_triplets`]. The `% rows cols`
    /// header line is required so that empty trailing rows/columns survive.
    pub fn from_triplets(text: &str) -> core::result::Result<SparseMatQ, ParseError> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| ParseError::new("empty triplet file"))?;
        let dims: Vec<usize> = header
            .strip_prefix('%')
            .ok_or_else(|| ParseError::new("missing `% rows cols` header"))?
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| ParseError::new(format!("bad header `{header}`"))))
            .collect::<core::result::Result<_, _>>()?;
        let [rows, cols] = dims[..] else {
            return Err(ParseError::new(format!("bad header `{header}`")));
        };
        let mut cells: Vec<Vec<(usize, Rational)>> = alloc::vec![Vec::new(); cols];
        for line in lines {
            let mut parts = line.split_whitespace();
            let (Some(i), Some(j), Some(v), None) = (parts.next(), parts.next(), parts.next(), parts.next()) else {
                return Err(ParseError::new(format!("bad triplet `{line}`")));
            };
            let i: usize = i.parse().map_err(|_| ParseError::new(format!("bad row in `{line}`")))?;
            let j: usize = j.parse().map_err(|_| ParseError::new(format!("bad column in `{line}`")))?;
            if i >= rows || j >= cols {
                return Err(ParseError::new(format!("triplet `{line}` out of range")));
            }
            cells[j].push((i, v.parse()?));
        }
        let columns = cells
            .into_iter()
            .map(|c| SparseVecQ::from_entries(rows, c).map_err(|e| ParseError::new(format!("{e}"))))
            .collect::<core::result::Result<Vec<_>, _>>()?;
        Ok(SparseMatQ { rows, columns })
    }
}

/// Result of one left-to-right elimination sweep over the columns of a matrix.
///
/// Each stored basis vector is a reduced column with leading entry 1 at its
/// pivot row, together with the combination of original columns producing it.
#[derive(Clone, Debug)]
pub struct ColumnEchelon {
    rows: usize,
    cols: usize,
    basis: Vec<EchelonVector>,
    by_pivot_row: BTreeMap<usize, usize>,
    pivots: Vec<usize>,
    kernel: Vec<SparseVecQ>,
}

#[derive(Clone, Debug)]
struct EchelonVector {
    reduced: SparseVecQ,
    combination: SparseVecQ,
}

impl ColumnEchelon {
    pub fn new(m: &SparseMatQ) -> Self {
        let mut ech = ColumnEchelon {
            rows: m.rows(),
            cols: m.cols(),
            basis: Vec::new(),
            by_pivot_row: BTreeMap::new(),
            pivots: Vec::new(),
            kernel: Vec::new(),
        };
        for (j, col) in m.columns().iter().enumerate() {
            let (rem, combo) = ech.reduce(col.clone(), SparseVecQ::unit(ech.cols, j));
            match rem.leading() {
                None => ech.kernel.push(combo),
                Some((row, lead)) => {
                    let inv = lead.recip().expect("nonzero leading entry");
                    ech.by_pivot_row.insert(row, ech.basis.len());
                    ech.basis.push(EchelonVector { reduced: rem.scale(&inv), combination: combo.scale(&inv) });
                    ech.pivots.push(j);
                }
            }
        }
        ech
    }

    /// Eliminates against the stored basis; returns `(remainder, combination)`
    /// with the invariant `remainder = v - M · (start_combo - combination)`
    /// folded so that `remainder == M · combination` when `v == M · start_combo`.
    fn reduce(&self, mut v: SparseVecQ, mut combo: SparseVecQ) -> (SparseVecQ, SparseVecQ) {
        loop {
            let Some((row, lead)) = v.leading() else { break };
            let Some(&k) = self.by_pivot_row.get(&row) else { break };
            let c = -lead;
            let b = &self.basis[k];
            v = v.axpy(&c, &b.reduced);
            combo = combo.axpy(&c, &b.combination);
        }
        (v, combo)
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// One kernel vector per non-pivot column, each with entry 1 at that column.
    pub fn kernel_basis(&self) -> &[SparseVecQ] {
        &self.kernel
    }

    /// Some `x` with `M · x = b`, or `None` when `b` is outside the column space.
    pub fn solve(&self, b: &SparseVecQ) -> Result<Option<SparseVecQ>> {
        if b.len() != self.rows {
            return Err(Error::DimensionMismatch(format!("right-hand side of length {} for {} rows", b.len(), self.rows)));
        }
        let (rem, combo) = self.reduce(b.clone(), SparseVecQ::zeros(self.cols));
        // rem = b - M·(-combo)
        Ok(if rem.is_zero() { Some(combo.neg()) } else { None })
    }
}

/// Indices of the lexicographically-first maximal set of independent columns.
pub fn pivots(m: &SparseMatQ) -> Vec<usize> {
    ColumnEchelon::new(m).pivots
}

/// Some `x` with `M · x = b`; `Ok(None)` when the system is inconsistent.
pub fn solve_right(m: &SparseMatQ, b: &SparseVecQ) -> Result<Option<SparseVecQ>> {
    ColumnEchelon::new(m).solve(b)
}

pub fn right_kernel_basis(m: &SparseMatQ) -> Vec<SparseVecQ> {
    ColumnEchelon::new(m).kernel
}

/// Vertical concatenation in argument order.
pub fn stack(ms: &[&SparseMatQ]) -> Result<SparseMatQ> {
    let Some(first) = ms.first() else {
        return Ok(SparseMatQ::zeros(0, 0));
    };
    let cols = first.cols();
    if let Some(m) = ms.iter().find(|m| m.cols() != cols) {
        return Err(Error::DimensionMismatch(format!("stacking {} columns onto {cols}", m.cols())));
    }
    let columns = (0..cols)
        .map(|j| ms.iter().fold(SparseVecQ::zeros(0), |acc, m| acc.concat(m.column(j))))
        .collect::<Vec<_>>();
    let rows = ms.iter().map(|m| m.rows()).sum();
    SparseMatQ::from_columns(rows, columns)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    fn worked() -> SparseMatQ {
        SparseMatQ::from_i64_rows(&[&[1, 0, 1], &[3, 1, 1], &[0, 1, -2], &[1, 2, -3], &[-1, 0, -1], &[2, 1, 0]])
    }

    #[test]
    fn pivots_examples() {
        assert_eq!(pivots(&SparseMatQ::from_i64_rows(&[&[1, 0], &[0, 1]])), vec![0, 1]);
        assert!(pivots(&SparseMatQ::zeros(3, 4)).is_empty());
        assert!(pivots(&SparseMatQ::zeros(0, 0)).is_empty());
        // column 2 = column 0 - 2 * column 1
        let m = worked();
        for i in 0..6 {
            assert_eq!(m.get(i, 2), m.get(i, 0) - q(2) * m.get(i, 1));
        }
        assert_eq!(pivots(&m), vec![0, 1]);
    }

    #[test]
    fn solve_examples() {
        let id = SparseMatQ::from_i64_rows(&[&[1, 0], &[0, 1]]);
        let b = SparseVecQ::from_dense(&[q(3), Rational::new(-1, 2)]);
        assert_eq!(solve_right(&id, &b).unwrap().unwrap(), b);

        let m = SparseMatQ::from_i64_rows(&[&[1], &[2]]);
        assert_eq!(solve_right(&m, &SparseVecQ::from_dense(&[q(1), q(3)])).unwrap(), None);

        let m = worked();
        let b = m.column(2).clone();
        let x = solve_right(&m, &b).unwrap().unwrap();
        assert_eq!(m.mul_vec(&x).unwrap(), b);

        assert!(solve_right(&m, &SparseVecQ::zeros(2)).is_err());
    }

    #[test]
    fn kernel_examples() {
        assert!(right_kernel_basis(&SparseMatQ::from_i64_rows(&[&[1, 0], &[0, 1]])).is_empty());
        let k = right_kernel_basis(&SparseMatQ::from_i64_rows(&[&[1, 1]]));
        assert_eq!(k.len(), 1);
        assert_eq!(k[0].to_dense(), vec![q(-1), q(1)]);
        let k = right_kernel_basis(&worked());
        assert_eq!(k.len(), 1);
        // proportional to (1, -2, -1)
        assert_eq!(k[0].to_dense(), vec![q(-1), q(2), q(1)]);
    }

    #[test]
    fn stack_examples() {
        let id = SparseMatQ::from_i64_rows(&[&[1, 0], &[0, 1]]);
        let s = stack(&[&id, &id]).unwrap();
        assert_eq!((s.rows(), s.cols()), (4, 2));
        assert_eq!(stack(&[&id]).unwrap(), id);
        let a = SparseMatQ::from_i64_rows(&[&[1, 2]]);
        let b = SparseMatQ::from_i64_rows(&[&[3, 4]]);
        assert_eq!(stack(&[&a, &b]).unwrap(), SparseMatQ::from_i64_rows(&[&[1, 2], &[3, 4]]));
        assert!(stack(&[&a, &SparseMatQ::zeros(1, 3)]).is_err());
    }

    #[test]
    fn triplet_round_trip() {
        let mut m = worked();
        m.set_column(1, SparseVecQ::from_dense(&[Rational::new(1, 3), q(0), q(0), q(0), q(0), q(0)])).unwrap();
        let text = m.to_triplets();
        assert!(text.contains("0 1 1/3"));
        assert_eq!(SparseMatQ::from_triplets(&text).unwrap(), m);
        let empty = SparseMatQ::zeros(4, 2);
        assert_eq!(SparseMatQ::from_triplets(&empty.to_triplets()).unwrap(), empty);
        assert!(SparseMatQ::from_triplets("0 0 1").is_err());
    }

    #[test]
    fn set_removes_zero() {
        let mut v = SparseVecQ::zeros(3);
        v.set(1, q(2));
        v.set(1, q(0));
        assert!(v.is_zero());
    }
}
