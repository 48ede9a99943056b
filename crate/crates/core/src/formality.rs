//! Micro-graph encodings, Formality graphs, descendant expansion of the
//! sunflower, isomorphism reduction and Casimir relabeling.
//!
//! Vertex labels follow one fixed layout: `0` is the sink, `1..=p` are the
//! Levi-Civita (Nambu) vertices carrying ρ, and Casimir `a^k` of Levi-Civita
//! vertex `j` is labeled `k·p + j`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::error::{Error, ParseError, Result};
use crate::perm::permutations;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum VertexRole {
    Sink,
    LeviCivita,
    /// Content `a^k`, `k ≥ 1`.
    Casimir(usize),
}

/// Roles of all `1 + p(d−1)` vertices in the standard layout.
pub fn vertex_roles(dim: usize, p: usize) -> Vec<VertexRole> {
    let mut roles = alloc::vec![VertexRole::Sink];
    roles.extend((0..p).map(|_| VertexRole::LeviCivita));
    for k in 1..dim - 1 {
        roles.extend((0..p).map(|_| VertexRole::Casimir(k)));
    }
    roles
}

/// Flat target list: slice `j` (length `d`) holds the targets of Levi-Civita vertex `j + 1`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphEncoding {
    dim: usize,
    p: usize,
    targets: Vec<u8>,
}

impl GraphEncoding {
    pub fn new(dim: usize, p: usize, targets: Vec<u8>) -> Result<Self> {
        if dim < 2 || p == 0 {
            return Err(Error::MalformedEncoding(format!("dimension {dim}, {p} Levi-Civita vertices")));
        }
        if targets.len() != p * dim {
            return Err(Error::MalformedEncoding(format!(
                "{} targets for {p} Levi-Civita vertices in dimension {dim}",
                targets.len()
            )));
        }
        let vertices = 1 + p * (dim - 1);
        if let Some(t) = targets.iter().find(|&&t| t as usize >= vertices) {
            return Err(Error::MalformedEncoding(format!("label {t} outside 0..{vertices}")));
        }
        Ok(GraphEncoding { dim, p, targets })
    }

    /// Parses comma-separated labels; semicolons and whitespace are separators too.
    pub fn parse(dim: usize, p: usize, text: &str) -> Result<Self> {
        let targets = text
            .split(|c: char| c == ',' || c == ';' || c.is_whitespace())
            .filter(|t| !t.is_empty())
            .map(|t| t.parse::<u8>().map_err(|_| Error::MalformedEncoding(format!("bad label `{t}` in `{text}`"))))
            .collect::<Result<Vec<_>>>()?;
        Self::new(dim, p, targets)
    }

    /// Like [`GraphEncoding::parse`] with `p` inferred from the length.
    pub fn parse_infer(dim: usize, text: &str) -> Result<Self> {
        let n = text.split(|c: char| c == ',' || c == ';' || c.is_whitespace()).filter(|t| !t.is_empty()).count();
        if dim < 2 || n == 0 || n % dim != 0 {
            return Err(Error::MalformedEncoding(format!("{n} labels is not a multiple of {dim}")));
        }
        Self::parse(dim, n / dim, text)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn levi_civita_count(&self) -> usize {
        self.p
    }

    pub fn targets(&self) -> &[u8] {
        &self.targets
    }

    pub fn vertex_count(&self) -> usize {
        1 + self.p * (self.dim - 1)
    }

    /// Targets of Levi-Civita vertex `j + 1`.
    pub fn slice(&self, j: usize) -> &[u8] {
        &self.targets[j * self.dim..(j + 1) * self.dim]
    }

    /// True when some Levi-Civita vertex sends two edges to one target; the
    /// formula of such a graph vanishes identically.
    pub fn has_repeated_target(&self) -> bool {
        (0..self.p).any(|j| {
            let s = self.slice(j);
            (0..s.len()).any(|a| s[a + 1..].contains(&s[a]))
        })
    }

    /// Applies a role-preserving relabeling: Levi-Civita vertex `j` (0-based)
    /// goes to `lc[j]`, Casimir `a^k` of vertex `j` goes to that of `cas[k−1][j]`.
    pub fn relabel(&self, lc: &[usize], cas: &[&[usize]]) -> GraphEncoding {
        let (p, d) = (self.p, self.dim);
        let map = |v: u8| -> u8 {
            let v = v as usize;
            if v == 0 {
                0
            } else if v <= p {
                (lc[v - 1] + 1) as u8
            } else {
                let k = (v - 1) / p;
                let j = (v - 1) % p;
                (k * p + cas[k - 1][j] + 1) as u8
            }
        };
        let mut targets = alloc::vec![0u8; p * d];
        for j in 0..p {
            let dst = lc[j];
            for (n, &t) in self.slice(j).iter().enumerate() {
                targets[dst * d + n] = map(t);
            }
        }
        GraphEncoding { dim: d, p, targets }
    }
}

impl fmt::Display for GraphEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (n, t) in self.targets.iter().enumerate() {
            if n > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for GraphEncoding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for j in 0..self.p {
            if j > 0 {
                f.write_str(";")?;
            }
            for (n, t) in self.slice(j).iter().enumerate() {
                if n > 0 {
                    f.write_str(",")?;
                }
                write!(f, "{t}")?;
            }
        }
        f.write_str(")")
    }
}

/// A directed graph with `sinks` ground vertices followed by `aerial` vertices.
/// Edge order is significant.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FormalityGraph {
    sinks: usize,
    aerial: usize,
    edges: Vec<(u8, u8)>,
}

impl FormalityGraph {
    pub fn new(sinks: usize, aerial: usize, edges: Vec<(u8, u8)>) -> Result<Self> {
        let n = sinks + aerial;
        for &(s, t) in &edges {
            if (s as usize) < sinks || s as usize >= n || t as usize >= n {
                return Err(Error::MalformedGraph(format!("edge ({s},{t}) in a graph with {sinks} sinks and {aerial} aerial vertices")));
            }
        }
        Ok(FormalityGraph { sinks, aerial, edges })
    }

    pub fn sinks(&self) -> usize {
        self.sinks
    }

    pub fn aerial(&self) -> usize {
        self.aerial
    }

    pub fn vertex_count(&self) -> usize {
        self.sinks + self.aerial
    }

    pub fn edges(&self) -> &[(u8, u8)] {
        &self.edges
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 as usize == v).count()
    }
}

/// Edges `(j+1, v)` for each target `v` of slice `j`, in slice order.
pub fn encoding_to_graph(e: &GraphEncoding) -> FormalityGraph {
    let edges = (0..e.p).flat_map(|j| e.slice(j).iter().map(move |&v| ((j + 1) as u8, v))).collect();
    FormalityGraph { sinks: 1, aerial: e.p * (e.dim - 1), edges }
}

/// Inverse of [`encoding_to_graph`] for graphs in the standard layout.
pub fn graph_to_encoding(g: &FormalityGraph, dim: usize) -> Result<GraphEncoding> {
    if g.sinks != 1 || dim < 2 || g.aerial % (dim - 1) != 0 {
        return Err(Error::MalformedGraph(format!("{} sinks, {} aerial vertices in dimension {dim}", g.sinks, g.aerial)));
    }
    let p = g.aerial / (dim - 1);
    if g.edges.len() != p * dim {
        return Err(Error::MalformedGraph(format!("{} edges for {p} Levi-Civita vertices", g.edges.len())));
    }
    for (n, &(s, _)) in g.edges.iter().enumerate() {
        if s as usize != n / dim + 1 {
            return Err(Error::MalformedGraph(format!("edge {n} leaves vertex {s}, expected {}", n / dim + 1)));
        }
    }
    GraphEncoding::new(dim, p, g.edges.iter().map(|e| e.1).collect())
}

/// Minimal encoding over all role-preserving relabelings: permutations of the
/// Levi-Civita vertices combined with independent permutations of each
/// Casimir kind. In-slice target order is kept, so equal canonical forms
/// give identical formulas.
pub fn canonical_form(e: &GraphEncoding) -> GraphEncoding {
    let perms = permutations(e.p);
    let kinds = e.dim - 2;
    let mut best = e.clone();
    let mut choice = alloc::vec![0usize; kinds];
    loop {
        let cas: Vec<&[usize]> = choice.iter().map(|&c| perms[c].as_slice()).collect();
        for lc in &perms {
            let r = e.relabel(lc, &cas);
            if r.targets < best.targets {
                best = r;
            }
        }
        // odometer over the Casimir permutations
        let mut k = 0;
        loop {
            if k == kinds {
                return best;
            }
            choice[k] += 1;
            if choice[k] < perms.len() {
                break;
            }
            choice[k] = 0;
            k += 1;
        }
    }
}

/// Canonical form of a graph in the standard layout.
pub fn canonical_form_graph(g: &FormalityGraph, roles: &[VertexRole], dim: usize) -> Result<GraphEncoding> {
    let e = graph_to_encoding(g, dim)?;
    if roles != vertex_roles(dim, e.p).as_slice() {
        return Err(Error::MalformedGraph(String::from("vertex roles do not follow the standard layout")));
    }
    Ok(canonical_form(&e))
}

/// Keeps the first encoding of every isomorphism class, in input order.
pub fn dedupe(encodings: &[GraphEncoding]) -> Vec<GraphEncoding> {
    let mut seen = BTreeSet::new();
    encodings.iter().filter(|e| seen.insert(canonical_form(e))).cloned().collect()
}

/// Relabels Casimir kinds: every `a^k` vertex becomes the matching `a^{σ(k)}`
/// vertex of the same Levi-Civita owner. `sigma[k−1] = σ(k)`, values in `1..=d−2`.
pub fn permute_casimirs(e: &GraphEncoding, sigma: &[usize]) -> Result<GraphEncoding> {
    let kinds = e.dim - 2;
    let mut seen = alloc::vec![false; kinds + 1];
    if sigma.len() != kinds || sigma.iter().any(|&s| s == 0 || s > kinds || core::mem::replace(&mut seen[s], true)) {
        return Err(Error::MalformedEncoding(format!("{sigma:?} is not a permutation of 1..={kinds}")));
    }
    let p = e.p;
    let targets = e
        .targets
        .iter()
        .map(|&v| {
            let v = v as usize;
            if v <= p {
                v as u8
            } else {
                let (k, j) = ((v - 1) / p, (v - 1) % p);
                (sigma[k - 1] * p + j + 1) as u8
            }
        })
        .collect();
    Ok(GraphEncoding { dim: e.dim, p, targets })
}

/// The three Leibniz terms of the sunflower in two dimensions: the outer
/// arrow of vertex 1 lands on vertex 1, 2 or 3.
pub fn sunflower_2d() -> Vec<GraphEncoding> {
    (1..=3).map(|l| GraphEncoding::new(2, 3, alloc::vec![0, l, 1, 3, 1, 2]).expect("valid")).collect()
}

/// Expected descendant counts of the sunflower.
pub const SUNFLOWER_COUNTS: [(usize, usize); 3] = [(2, 3), (3, 48), (4, 324)];

/// The `d`-dimensional descendants of a two-dimensional encoding: every
/// aerial target `v` is replaced by each vertex of its cluster
/// `{v, v+p, …, v+(d−2)p}` (Leibniz rule over the Nambu vertex content),
/// each Levi-Civita vertex gets edges to its own Casimirs appended, and
/// terms where one vertex hits the same target twice (identically zero) are dropped.
pub fn expand_descendants(base: &GraphEncoding, dim: usize) -> Result<Vec<GraphEncoding>> {
    if base.dim != 2 {
        return Err(Error::Unsupported(format!("expansion from dimension {}", base.dim)));
    }
    if dim < 2 {
        return Err(Error::Unsupported(format!("dimension {dim}")));
    }
    let p = base.p;
    if 1 + p * (dim - 1) > 256 {
        return Err(Error::Unsupported(format!("{} vertices", 1 + p * (dim - 1))));
    }
    // per slot of the descendant encoding: the list of admissible labels
    let mut slots: Vec<Vec<u8>> = Vec::with_capacity(p * dim);
    for j in 0..p {
        for &v in base.slice(j) {
            if v == 0 {
                slots.push(alloc::vec![0]);
            } else {
                slots.push((0..dim - 1).map(|k| (v as usize + k * p) as u8).collect());
            }
        }
        for k in 1..dim - 1 {
            slots.push(alloc::vec![(k * p + j + 1) as u8]);
        }
    }
    let mut out = Vec::new();
    let mut idx = alloc::vec![0usize; slots.len()];
    loop {
        let targets: Vec<u8> = idx.iter().zip(&slots).map(|(&i, s)| s[i]).collect();
        let e = GraphEncoding { dim, p, targets };
        if !e.has_repeated_target() {
            out.push(e);
        }
        // odometer, last slot fastest
        let mut n = slots.len();
        loop {
            if n == 0 {
                return Ok(out);
            }
            n -= 1;
            idx[n] += 1;
            if idx[n] < slots[n].len() {
                break;
            }
            idx[n] = 0;
        }
    }
}

/// All sunflower descendants in dimension `d` (no isomorphism reduction).
///
/// In two dimensions these are the three Leibniz terms; above, the descendants
/// of the first two (the third is isomorphic to the second). Fails when the
/// total disagrees with [`SUNFLOWER_COUNTS`].
pub fn expand_sunflower(dim: usize) -> Result<Vec<GraphEncoding>> {
    let Some(&(_, expected)) = SUNFLOWER_COUNTS.iter().find(|(d, _)| *d == dim) else {
        return Err(Error::Unsupported(format!("sunflower expansion in dimension {dim}")));
    };
    let base = sunflower_2d();
    let out = if dim == 2 {
        base
    } else {
        let mut out = expand_descendants(&base[0], dim)?;
        out.extend(expand_descendants(&base[1], dim)?);
        out
    };
    if out.len() != expected {
        return Err(Error::BasisInconsistency(format!(
            "sunflower expansion in dimension {dim} produced {} encodings, expected {expected}",
            out.len()
        )));
    }
    Ok(out)
}

impl FromStr for GraphEncoding {
    type Err = ParseError;

    /// `d:labels` form, e.g. `3:0,1,4,1,3,5,1,2,6`.
    fn from_str(s: &str) -> core::result::Result<Self, ParseError> {
        let (d, rest) = s.split_once(':').ok_or_else(|| ParseError::new(format!("missing `d:` prefix in `{s}`")))?;
        let d: usize = d.trim().parse().map_err(|_| ParseError::new(format!("bad dimension in `{s}`")))?;
        GraphEncoding::parse_infer(d, rest).map_err(|e| ParseError::new(format!("{e}")))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn enc(d: usize, t: &[u8]) -> GraphEncoding {
        GraphEncoding::new(d, 3, t.to_vec()).unwrap()
    }

    #[test]
    fn encoding_to_graph_examples() {
        let g = encoding_to_graph(&enc(2, &[0, 1, 1, 3, 1, 2]));
        assert_eq!(g.edges(), &[(1, 0), (1, 1), (2, 1), (2, 3), (3, 1), (3, 2)]);
        assert_eq!((g.sinks(), g.aerial()), (1, 3));
        let g = encoding_to_graph(&enc(3, &[0, 1, 4, 1, 3, 5, 1, 2, 6]));
        assert_eq!(g.edges(), &[(1, 0), (1, 1), (1, 4), (2, 1), (2, 3), (2, 5), (3, 1), (3, 2), (3, 6)]);
        assert_eq!((g.sinks(), g.aerial()), (1, 6));
        let e4 = enc(4, &[0, 1, 4, 7, 1, 3, 5, 8, 1, 2, 6, 9]);
        let g = encoding_to_graph(&e4);
        assert_eq!((g.edges().len(), g.aerial()), (12, 9));
        assert_eq!(graph_to_encoding(&g, 4).unwrap(), e4);
    }

    #[test]
    fn malformed() {
        assert!(GraphEncoding::new(2, 3, vec![0, 1, 1]).is_err());
        assert!(GraphEncoding::new(2, 3, vec![0, 1, 1, 3, 1, 4]).is_err());
        assert!(FormalityGraph::new(1, 3, vec![(0, 1)]).is_err());
    }

    #[test]
    fn parse_accepts_semicolons() {
        let a = GraphEncoding::parse(3, 3, "0,1,4;1,3,5;1,2,6").unwrap();
        let b = GraphEncoding::parse(3, 3, "0, 1, 4, 1, 3, 5, 1, 2, 6").unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_string(), "0,1,4,1,3,5,1,2,6");
        assert_eq!(format!("{a:?}"), "(0,1,4;1,3,5;1,2,6)");
        assert_eq!("3:0,1,4,1,3,5,1,2,6".parse::<GraphEncoding>().unwrap(), a);
    }

    #[test]
    fn sunflower_counts() {
        for (d, n) in SUNFLOWER_COUNTS {
            assert_eq!(expand_sunflower(d).unwrap().len(), n);
        }
        assert!(expand_sunflower(5).is_err());
        let d2 = expand_sunflower(2).unwrap();
        assert_eq!(d2[0].targets(), &[0, 1, 1, 3, 1, 2]);
        assert_eq!(d2[1].targets(), &[0, 2, 1, 3, 1, 2]);
    }

    #[test]
    fn first_pattern_matches_explicit_loops() {
        let mut expected3 = BTreeSet::new();
        for i2 in [2, 5] {
            for j1 in [1, 4] {
                for j2 in [1, 4] {
                    for k in [3, 6] {
                        expected3.insert(vec![0, 1, 4, j1, k, 5, j2, i2, 6]);
                    }
                }
            }
        }
        let got3: BTreeSet<Vec<u8>> =
            expand_descendants(&sunflower_2d()[0], 3).unwrap().iter().map(|e| e.targets().to_vec()).collect();
        assert_eq!(got3, expected3);

        let mut expected4 = BTreeSet::new();
        for i2 in [2, 5, 8] {
            for j1 in [1, 4, 7] {
                for j2 in [1, 4, 7] {
                    for k in [3, 6, 9] {
                        expected4.insert(vec![0, 1, 4, 7, j1, k, 5, 8, j2, i2, 6, 9]);
                    }
                }
            }
        }
        let got4: BTreeSet<Vec<u8>> =
            expand_descendants(&sunflower_2d()[0], 4).unwrap().iter().map(|e| e.targets().to_vec()).collect();
        assert_eq!(got4, expected4);
    }

    #[test]
    fn canonical_form_examples() {
        let d2 = sunflower_2d();
        assert_eq!(canonical_form(&d2[1]), canonical_form(&d2[2]));
        assert_ne!(canonical_form(&d2[0]), canonical_form(&d2[1]));
        let e = enc(3, &[0, 1, 4, 1, 3, 5, 1, 2, 6]);
        let c = canonical_form(&e);
        assert_eq!(canonical_form(&c), c);
        // swap Levi-Civita vertices 2 and 3 together with their Casimirs 5 and 6
        let e = enc(3, &[0, 2, 4, 1, 3, 5, 1, 2, 6]);
        let swapped = e.relabel(&[0, 2, 1], &[&[0, 2, 1]]);
        assert_eq!(swapped.targets(), &[0, 3, 4, 1, 3, 5, 1, 2, 6]);
        assert_eq!(canonical_form(&swapped), canonical_form(&e));
    }

    #[test]
    fn permute_casimirs_examples() {
        let e = enc(4, &[0, 1, 4, 7, 1, 3, 5, 8, 1, 2, 6, 9]);
        let s = permute_casimirs(&e, &[2, 1]).unwrap();
        assert_eq!(s.targets(), &[0, 1, 7, 4, 1, 3, 8, 5, 1, 2, 9, 6]);
        assert_eq!(permute_casimirs(&e, &[1, 2]).unwrap(), e);
        assert_eq!(permute_casimirs(&s, &[2, 1]).unwrap(), e);
        assert!(permute_casimirs(&e, &[1, 1]).is_err());
        assert!(permute_casimirs(&e, &[1]).is_err());
    }
}
