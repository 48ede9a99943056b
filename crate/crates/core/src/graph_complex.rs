//! Kontsevich graph complexes with odd edges: canonical graphs, the
//! vertex-splitting differential, cohomology, orientation and out-degree filtering.
//!
//! A graph with ordered edges stands for an oriented generator; relabeling
//! vertices permutes the edge list and contributes the sign of that
//! permutation. Graphs with an automorphism inducing an odd edge permutation
//! are zero.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::fmt::Write;

use crate::error::{Error, ParseError, Result};
use crate::linalg::{ColumnEchelon, SparseMatQ, SparseVecQ};
use crate::perm::permutations;
use crate::rational::Rational;

/// Vertex and edge operations shared by undirected and directed graphs.
pub trait Graph: Clone + Ord + fmt::Debug {
    const DIRECTED: bool;

    fn vertex_count(&self) -> usize;
    fn edges(&self) -> &[(u8, u8)];
    fn from_parts(vertices: usize, edges: Vec<(u8, u8)>) -> Self;

    /// Invariant used to restrict relabelings: vertices may only be mapped
    /// onto vertices of equal class.
    fn vertex_class(&self, v: usize) -> (usize, usize) {
        let out = self.edges().iter().filter(|e| e.0 as usize == v).count();
        let inc = self.edges().iter().filter(|e| e.1 as usize == v).count();
        if Self::DIRECTED {
            (out, inc)
        } else {
            (out + inc, 0)
        }
    }

    /// Canonical representative and the sign relating `self` to it
    /// (`self = ±canonical`); `None` when the graph has an odd automorphism.
    fn canonicalize(&self) -> Option<(Self, bool)> {
        canonicalize_edges::<Self>(self.vertex_count(), self.edges(), |v| self.vertex_class(v))
    }
}

/// Sorted edge list minimal over class-preserving relabelings; `bool` is the
/// parity of the edge permutation from the input order to that list.
fn canonicalize_edges<G: Graph>(
    n: usize,
    edges: &[(u8, u8)],
    class: impl Fn(usize) -> (usize, usize),
) -> Option<(G, bool)> {
    // new labels are handed out class by class, larger classes first
    let mut order: Vec<usize> = (0..n).collect();
    let classes: Vec<(usize, usize)> = (0..n).map(&class).collect();
    order.sort_by(|&a, &b| classes[b].cmp(&classes[a]).then(a.cmp(&b)));
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for &v in &order {
        match groups.last_mut() {
            Some(g) if classes[g[0]] == classes[v] => g.push(v),
            _ => groups.push(alloc::vec![v]),
        }
    }
    let group_perms: Vec<Vec<Vec<usize>>> = groups.iter().map(|g| permutations(g.len())).collect();
    let mut choice = alloc::vec![0usize; groups.len()];
    let mut best: Option<(Vec<(u8, u8)>, bool)> = None;
    let mut odd_auto = false;
    let mut label = alloc::vec![0u8; n];
    let mut mapped: Vec<((u8, u8), usize)> = Vec::with_capacity(edges.len());
    loop {
        let mut next = 0usize;
        for (g, members) in groups.iter().enumerate() {
            for (k, &v) in members.iter().enumerate() {
                label[v] = (next + group_perms[g][choice[g]][k]) as u8;
            }
            next += members.len();
        }
        mapped.clear();
        for (i, &(a, b)) in edges.iter().enumerate() {
            let (x, y) = (label[a as usize], label[b as usize]);
            let e = if G::DIRECTED || x < y { (x, y) } else { (y, x) };
            mapped.push((e, i));
        }
        mapped.sort_unstable();
        let parity = permutation_parity(mapped.iter().map(|m| m.1));
        let key: Vec<(u8, u8)> = mapped.iter().map(|m| m.0).collect();
        match &best {
            Some((b, p)) if *b == key => {
                if *p != parity {
                    odd_auto = true;
                }
            }
            Some((b, _)) if *b < key => {}
            _ => {
                best = Some((key, parity));
                odd_auto = false;
            }
        }
        let mut g = 0;
        loop {
            if g == groups.len() {
                let (key, parity) = best.expect("at least one labeling");
                return (!odd_auto).then(|| (G::from_parts(n, key), parity));
            }
            choice[g] += 1;
            if choice[g] < group_perms[g].len() {
                break;
            }
            choice[g] = 0;
            g += 1;
        }
    }
}

/// Parity of a permutation given as a sequence; `true` when odd.
fn permutation_parity(seq: impl Iterator<Item = usize>) -> bool {
    let v: Vec<usize> = seq.collect();
    let mut seen = alloc::vec![false; v.len()];
    let mut odd = false;
    for s in 0..v.len() {
        if seen[s] {
            continue;
        }
        let mut len = 0;
        let mut j = s;
        while !seen[j] {
            seen[j] = true;
            j = v[j];
            len += 1;
        }
        if len % 2 == 0 {
            odd = !odd;
        }
    }
    odd
}

/// A simple undirected graph; edges stored as `(min, max)`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct UndirectedGraph {
    vertices: usize,
    edges: Vec<(u8, u8)>,
}

impl UndirectedGraph {
    pub fn new(vertices: usize, edges: Vec<(u8, u8)>) -> Result<Self> {
        let mut norm = Vec::with_capacity(edges.len());
        for (a, b) in edges {
            if a == b || a as usize >= vertices || b as usize >= vertices {
                return Err(Error::MalformedGraph(format!("edge ({a},{b}) on {vertices} vertices")));
            }
            let e = (a.min(b), a.max(b));
            if norm.contains(&e) {
                return Err(Error::MalformedGraph(format!("multi-edge ({a},{b})")));
            }
            norm.push(e);
        }
        Ok(UndirectedGraph { vertices, edges: norm })
    }

    pub fn degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 as usize == v || e.1 as usize == v).count()
    }

    pub fn is_connected(&self) -> bool {
        connected(self.vertices, &self.edges)
    }
}

impl Graph for UndirectedGraph {
    const DIRECTED: bool = false;

    fn vertex_count(&self) -> usize {
        self.vertices
    }

    fn edges(&self) -> &[(u8, u8)] {
        &self.edges
    }

    fn from_parts(vertices: usize, edges: Vec<(u8, u8)>) -> Self {
        UndirectedGraph { vertices, edges }
    }
}

/// A directed graph without self-loops.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct DirectedGraph {
    vertices: usize,
    edges: Vec<(u8, u8)>,
}

impl DirectedGraph {
    pub fn new(vertices: usize, edges: Vec<(u8, u8)>) -> Result<Self> {
        for &(a, b) in &edges {
            if a == b || a as usize >= vertices || b as usize >= vertices {
                return Err(Error::MalformedGraph(format!("edge ({a},{b}) on {vertices} vertices")));
            }
        }
        Ok(DirectedGraph { vertices, edges })
    }

    pub fn out_degree(&self, v: usize) -> usize {
        self.edges.iter().filter(|e| e.0 as usize == v).count()
    }

    pub fn max_out_degree(&self) -> usize {
        (0..self.vertices).map(|v| self.out_degree(v)).max().unwrap_or(0)
    }
}

impl Graph for DirectedGraph {
    const DIRECTED: bool = true;

    fn vertex_count(&self) -> usize {
        self.vertices
    }

    fn edges(&self) -> &[(u8, u8)] {
        &self.edges
    }

    fn from_parts(vertices: usize, edges: Vec<(u8, u8)>) -> Self {
        DirectedGraph { vertices, edges }
    }
}

fn connected(n: usize, edges: &[(u8, u8)]) -> bool {
    if n == 0 {
        return true;
    }
    let mut seen = alloc::vec![false; n];
    let mut stack = alloc::vec![0usize];
    seen[0] = true;
    while let Some(v) = stack.pop() {
        for &(a, b) in edges {
            let (a, b) = (a as usize, b as usize);
            let w = if a == v {
                b
            } else if b == v {
                a
            } else {
                continue;
            };
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen.into_iter().all(|s| s)
}

/// A ℚ-linear combination of canonical graphs.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct GraphVector<G: Graph> {
    terms: BTreeMap<G, Rational>,
}

impl<G: Graph> Default for GraphVector<G> {
    fn default() -> Self {
        GraphVector { terms: BTreeMap::new() }
    }
}

impl<G: Graph> GraphVector<G> {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds `c · g`, canonicalizing `g` first.
    pub fn add_graph(&mut self, g: &G, c: &Rational) {
        if c.is_zero() {
            return;
        }
        let Some((canon, neg)) = g.canonicalize() else { return };
        let c = if neg { -c } else { c.clone() };
        match self.terms.get_mut(&canon) {
            Some(e) => {
                *e += c;
                if e.is_zero() {
                    self.terms.remove(&canon);
                }
            }
            None => {
                self.terms.insert(canon, c);
            }
        }
    }

    pub fn from_graph(g: &G) -> Self {
        let mut v = Self::new();
        v.add_graph(g, &Rational::one());
        v
    }

    pub fn terms(&self) -> impl Iterator<Item = (&G, &Rational)> {
        self.terms.iter()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, g: &G) -> Rational {
        self.terms.get(g).cloned().unwrap_or_default()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        if c.is_zero() {
            return Self::new();
        }
        GraphVector { terms: self.terms.iter().map(|(g, x)| (g.clone(), x * c)).collect() }
    }

    /// `(V, E)` of the terms when they share one bigrading.
    pub fn bigrading(&self) -> Option<(usize, usize)> {
        let mut it = self.terms.keys().map(|g| (g.vertex_count(), g.edges().len()));
        let first = it.next()?;
        it.all(|b| b == first).then_some(first)
    }

    /// One line per term: `p/q V E  a b  a b …`.
    pub fn dump(&self) -> String {
        let mut out = String::new();
        for (g, c) in &self.terms {
            let _ = writeln!(out, "{} {}", c.to_pq_string(), dump_graph(g));
        }
        out
    }

    pub fn parse_dump(text: &str) -> core::result::Result<Self, ParseError> {
        let mut v = Self::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty() && !l.starts_with('#')) {
            let (c, rest) = line.split_once(' ').ok_or_else(|| ParseError::new(format!("bad line `{line}`")))?;
            let g: G = parse_graph(rest)?;
            v.add_graph(&g, &c.parse()?);
        }
        Ok(v)
    }
}

/// `V E  a b  a b …`.
pub fn dump_graph<G: Graph>(g: &G) -> String {
    let mut s = format!("{} {}", g.vertex_count(), g.edges().len());
    for (a, b) in g.edges() {
        let _ = write!(s, "  {a} {b}");
    }
    s
}

pub fn parse_graph<G: Graph>(text: &str) -> core::result::Result<G, ParseError> {
    let nums = text
        .split_whitespace()
        .map(|t| t.parse::<usize>().map_err(|_| ParseError::new(format!("bad integer `{t}` in `{text}`"))))
        .collect::<core::result::Result<Vec<_>, _>>()?;
    if nums.len() < 2 || nums.len() != 2 + 2 * nums[1] {
        return Err(ParseError::new(format!("bad graph `{text}`")));
    }
    let v = nums[0];
    let edges: Vec<(u8, u8)> = nums[2..].chunks(2).map(|c| (c[0] as u8, c[1] as u8)).collect();
    if edges.iter().any(|&(a, b)| a == b || a as usize >= v || b as usize >= v) {
        return Err(ParseError::new(format!("bad edge in `{text}`")));
    }
    let edges = if G::DIRECTED { edges } else { edges.into_iter().map(|(a, b)| (a.min(b), a.max(b))).collect() };
    Ok(G::from_parts(v, edges))
}

/// Connected simple graphs on `V` vertices with `E` edges, all degrees ≥ 3,
/// one canonical representative per class, graphs with an odd automorphism excluded.
pub fn undirected_basis(v: usize, e: usize) -> Vec<UndirectedGraph> {
    if v == 0 || v > 12 || e > v * (v - 1) / 2 || 2 * e < 3 * v {
        return Vec::new();
    }
    let all: Vec<(u8, u8)> =
        (0..v).flat_map(|a| (a + 1..v).map(move |b| (a as u8, b as u8))).collect();
    let mut out = alloc::collections::BTreeSet::new();
    let mut rejected = alloc::collections::BTreeSet::new();
    for_each_subset(all.len(), e, |sel| {
        let edges: Vec<(u8, u8)> = sel.iter().map(|&i| all[i]).collect();
        let mut deg = alloc::vec![0usize; v];
        for &(a, b) in &edges {
            deg[a as usize] += 1;
            deg[b as usize] += 1;
        }
        if deg.iter().any(|&d| d < 3) || !connected(v, &edges) {
            return;
        }
        let g = UndirectedGraph { vertices: v, edges };
        if out.contains(&g) || rejected.contains(&g) {
            return;
        }
        match g.canonicalize() {
            Some((c, _)) => {
                out.insert(c);
            }
            None => {
                // remember the class so its other labelings are skipped quickly
                let sorted = {
                    let mut s = g.edges.clone();
                    s.sort_unstable();
                    UndirectedGraph { vertices: v, edges: s }
                };
                rejected.insert(sorted);
            }
        }
    });
    out.into_iter().collect()
}

/// Calls `f` with every `k`-subset of `0..n` in lexicographic order.
fn for_each_subset(n: usize, k: usize, mut f: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        f(&idx);
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else { return };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// The differential of one graph: every vertex is split into an edge whose
/// endpoints each keep at least two of the old incident edges (so all
/// vertices stay at least trivalent); the new edge comes first in the edge
/// order, and each unordered split is counted once.
pub fn differential_of(g: &UndirectedGraph) -> GraphVector<UndirectedGraph> {
    let mut out = GraphVector::new();
    let n = g.vertices;
    let w = n as u8;
    let half = Rational::new(1, 2);
    for v in 0..n {
        let incident: Vec<usize> =
            (0..g.edges.len()).filter(|&i| g.edges[i].0 as usize == v || g.edges[i].1 as usize == v).collect();
        let k = incident.len();
        if k < 4 {
            continue;
        }
        for mask in 0u32..(1 << k) {
            let moved = mask.count_ones() as usize;
            if moved < 2 || k - moved < 2 {
                continue;
            }
            let mut edges = Vec::with_capacity(g.edges.len() + 1);
            edges.push((v as u8, w));
            for (i, &(a, b)) in g.edges.iter().enumerate() {
                let pos = incident.iter().position(|&j| j == i);
                match pos {
                    Some(p) if mask & (1 << p) != 0 => {
                        let other = if a as usize == v { b } else { a };
                        edges.push((other.min(w), other.max(w)));
                    }
                    _ => edges.push((a, b)),
                }
            }
            out.add_graph(&UndirectedGraph { vertices: n + 1, edges }, &half);
        }
    }
    out
}

/// `d` applied to a graph vector.
pub fn differential(x: &GraphVector<UndirectedGraph>) -> GraphVector<UndirectedGraph> {
    let mut out = GraphVector::new();
    for (g, c) in x.terms() {
        for (h, x) in differential_of(g).terms() {
            out.add_graph(h, &(c * x));
        }
    }
    out
}

/// Matrix of `d: (V,E) → (V+1,E+1)`; columns follow `undirected_basis(V,E)`,
/// rows follow `undirected_basis(V+1,E+1)`.
pub fn gc_differential(v: usize, e: usize) -> Result<SparseMatQ> {
    let src = undirected_basis(v, e);
    let dst = undirected_basis(v + 1, e + 1);
    differential_matrix(&src, &dst)
}

fn differential_matrix(src: &[UndirectedGraph], dst: &[UndirectedGraph]) -> Result<SparseMatQ> {
    let index: BTreeMap<&UndirectedGraph, usize> = dst.iter().enumerate().map(|(i, g)| (g, i)).collect();
    let mut cols = Vec::with_capacity(src.len());
    for g in src {
        let mut entries = Vec::new();
        for (h, c) in differential_of(g).terms() {
            let Some(&row) = index.get(h) else {
                return Err(Error::BasisInconsistency(format!("differential produced {} outside the target basis", dump_graph(h))));
            };
            entries.push((row, c.clone()));
        }
        cols.push(SparseVecQ::from_entries(dst.len(), entries)?);
    }
    SparseMatQ::from_columns(dst.len(), cols)
}

/// Representatives of `ker d / im d` at `(V, E)`, each an exact cocycle.
pub fn cohomology_basis(v: usize, e: usize) -> Result<Vec<GraphVector<UndirectedGraph>>> {
    let basis = undirected_basis(v, e);
    let d_out = gc_differential(v, e)?;
    let kernel = ColumnEchelon::new(&d_out).kernel_basis().to_vec();
    let image: Vec<SparseVecQ> = if v >= 2 && e >= 1 {
        let prev = undirected_basis(v - 1, e - 1);
        differential_matrix(&prev, &basis)?.columns().to_vec()
    } else {
        Vec::new()
    };
    let n_im = image.len();
    let mut cols = image;
    cols.extend(kernel.iter().cloned());
    let m = SparseMatQ::from_columns(basis.len(), cols)?;
    let ech = ColumnEchelon::new(&m);
    let mut out = Vec::new();
    for &p in ech.pivots() {
        if p < n_im {
            continue;
        }
        let mut x = GraphVector::new();
        for (i, c) in kernel[p - n_im].iter() {
            x.add_graph(&basis[i], c);
        }
        out.push(x);
    }
    Ok(out)
}

/// K₄ with coefficient 1.
pub fn tetrahedron() -> GraphVector<UndirectedGraph> {
    let g = UndirectedGraph { vertices: 4, edges: alloc::vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)] };
    GraphVector::from_graph(&g)
}

/// Every edge of every term directed both ways (`2^E` directings per term,
/// edge order kept), before merging isomorphic terms.
pub fn orient_terms(x: &GraphVector<UndirectedGraph>) -> Vec<(DirectedGraph, Rational)> {
    let mut out = Vec::new();
    for (g, c) in x.terms() {
        let m = g.edges.len();
        for mask in 0u64..(1 << m) {
            let edges = g
                .edges
                .iter()
                .enumerate()
                .map(|(i, &(a, b))| if mask & (1 << i) != 0 { (b, a) } else { (a, b) })
                .collect();
            out.push((DirectedGraph { vertices: g.vertices, edges }, c.clone()));
        }
    }
    out
}

/// The orientation map Or, with isomorphic terms merged.
pub fn orient(x: &GraphVector<UndirectedGraph>) -> GraphVector<DirectedGraph> {
    merge(&orient_terms(x))
}

pub fn merge(terms: &[(DirectedGraph, Rational)]) -> GraphVector<DirectedGraph> {
    let mut v = GraphVector::new();
    for (g, c) in terms {
        v.add_graph(g, c);
    }
    v
}

/// Drops terms with a vertex of out-degree above `k`.
pub fn filter_out_degree_terms(terms: &[(DirectedGraph, Rational)], k: usize) -> Vec<(DirectedGraph, Rational)> {
    terms.iter().filter(|(g, _)| g.max_out_degree() <= k).cloned().collect()
}

pub fn filter_out_degree(x: &GraphVector<DirectedGraph>, k: usize) -> GraphVector<DirectedGraph> {
    GraphVector { terms: x.terms.iter().filter(|(g, _)| g.max_out_degree() <= k).map(|(g, c)| (g.clone(), c.clone())).collect() }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn triangle_has_odd_automorphism() {
        let t = UndirectedGraph::new(3, alloc::vec![(0, 1), (1, 2), (0, 2)]).unwrap();
        assert!(t.canonicalize().is_none());
        let mut v = GraphVector::new();
        v.add_graph(&t, &Rational::one());
        assert!(v.is_empty());
    }

    #[test]
    fn small_bases() {
        assert_eq!(undirected_basis(4, 6).len(), 1);
        assert!(undirected_basis(2, 1).is_empty());
        assert!(undirected_basis(3, 3).is_empty());
        assert!(undirected_basis(3, 5).is_empty());
        assert!(undirected_basis(4, 5).is_empty());
    }

    #[test]
    fn tetrahedron_is_the_cohomology_at_4_6() {
        let h = cohomology_basis(4, 6).unwrap();
        assert_eq!(h, alloc::vec![tetrahedron()]);
        assert!(differential(&tetrahedron()).is_empty());
        assert!(cohomology_basis(4, 5).unwrap().is_empty());
    }

    #[test]
    fn relabeled_edge_order_sign() {
        let k4 = tetrahedron();
        let (g, _) = k4.terms().next().unwrap();
        let mut swapped = g.edges.clone();
        swapped.swap(0, 1);
        let h = UndirectedGraph::new(4, swapped).unwrap();
        let (c, neg) = h.canonicalize().unwrap();
        assert_eq!(&c, g);
        assert!(neg);
    }

    #[test]
    fn orientation_counts() {
        let terms = orient_terms(&tetrahedron());
        assert_eq!(terms.len(), 64);
        assert_eq!(filter_out_degree_terms(&terms, 2).len(), 32);
        assert_eq!(filter_out_degree_terms(&terms, 3).len(), 64);
        let edge = UndirectedGraph::new(2, alloc::vec![(0, 1)]).unwrap();
        let mut x = GraphVector::new();
        x.terms.insert(edge, Rational::one());
        assert_eq!(orient_terms(&x).len(), 2);
        assert!(filter_out_degree(&GraphVector::new(), 2).is_empty());
    }

    #[test]
    fn dump_round_trip() {
        let v = orient(&tetrahedron());
        let text = v.dump();
        assert_eq!(GraphVector::<DirectedGraph>::parse_dump(&text).unwrap(), v);
        let t = tetrahedron();
        assert_eq!(t.dump(), "1/1 4 6  0 1  0 2  0 3  1 2  1 3  2 3\n");
    }
}
