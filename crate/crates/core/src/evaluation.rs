//! Graphs to formulas: the Levi-Civita micro-graph evaluator, the generic
//! directed-graph operation on superfunctions, and monomial bases with
//! their evaluation matrices.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::diffpoly::{DiffPoly, FastMap, Monomial, Var};
use crate::error::{Error, Result};
use crate::formality::{FormalityGraph, VertexRole};
use crate::graph_complex::{DirectedGraph, Graph, GraphVector};
use crate::linalg::{SparseMatQ, SparseVecQ};
use crate::perm::{factorial, permutations};
use crate::rational::Rational;
use crate::superfunction::{Accumulator, OddSet, Superfunction};

pub use crate::perm::levi_civita_sign;

/// `φ(Γ)` for a micro-graph; see [`evaluate_micro_graph_counted`].
pub fn evaluate_micro_graph(g: &FormalityGraph, roles: &[VertexRole], dim: usize) -> Result<Superfunction> {
    evaluate_micro_graph_counted(g, roles, dim).map(|(f, _)| f)
}

/// Sums over all index choices `(σ₁,…,σ_p) ∈ S_d^p` the signed product of
/// vertex contents `[E, ρ…, a¹…, …]`, each differentiated by its incoming
/// edges. Edge `n` of the graph gets index `σ_{n/d}(n mod d)`.
///
/// Returns the formula together with the number of index choices
/// enumerated, which must equal `(d!)^p`.
pub fn evaluate_micro_graph_counted(
    g: &FormalityGraph,
    roles: &[VertexRole],
    dim: usize,
) -> Result<(Superfunction, u64)> {
    let n = g.vertex_count();
    if roles.len() != n {
        return Err(Error::MalformedGraph(format!("{} roles for {n} vertices", roles.len())));
    }
    let lc: Vec<usize> = (0..n).filter(|&v| roles[v] == VertexRole::LeviCivita).collect();
    let p = lc.len();
    let edges = g.edges();
    if edges.len() != p * dim {
        return Err(Error::MalformedGraph(format!("{} edges for {p} Levi-Civita vertices in dimension {dim}", edges.len())));
    }
    for (k, &(s, _)) in edges.iter().enumerate() {
        if s as usize != lc[k / dim] {
            return Err(Error::MalformedGraph(format!("edge {k} leaves vertex {s}, expected {}", lc[k / dim])));
        }
    }
    let fibre: Vec<Option<u8>> = roles
        .iter()
        .map(|r| match r {
            VertexRole::Sink => Ok(None),
            VertexRole::LeviCivita => Ok(Some(0)),
            VertexRole::Casimir(k) if *k >= 1 && *k + 1 < dim => Ok(Some(*k as u8)),
            VertexRole::Casimir(k) => Err(Error::MalformedGraph(format!("Casimir a{k} in dimension {dim}"))),
        })
        .collect::<Result<_>>()?;

    let perms = permutations(dim);
    let signs: Vec<i64> = perms.iter().map(|s| levi_civita_sign(s) as i64).collect();
    let mut acc: FastMap<(u8, Monomial), i64> = FastMap::default();
    let mut choice = vec![0usize; p];
    let mut count = 0u64;
    let mut flat = vec![0u8; p * dim];
    'choices: loop {
        count += 1;
        let mut sign = 1i64;
        for (j, &c) in choice.iter().enumerate() {
            sign *= signs[c];
            for (i, &x) in perms[c].iter().enumerate() {
                flat[j * dim + i] = x as u8;
            }
        }
        micro_term(edges, &fibre, &flat, dim, sign, &mut acc)?;
        // odometer, last factor fastest
        for j in (0..p).rev() {
            choice[j] += 1;
            if choice[j] < perms.len() {
                continue 'choices;
            }
            choice[j] = 0;
        }
        break;
    }
    let expected = factorial(dim).pow(p as u32);
    if count != expected {
        return Err(Error::IndexGuard { expected, got: count });
    }
    let mut out = Accumulator::new(dim);
    for ((i, m), c) in acc {
        if c != 0 {
            out.add_term(OddSet::singleton(i as usize), m, &Rational::from_i64(c));
        }
    }
    Ok((out.finish(), count))
}

/// One product of differentiated contents. Every aerial content is a single
/// jet variable; the sink holds the Euler field, so one incoming derivative
/// `∂/∂x^i` leaves `ξ_i` and two or more give zero.
fn micro_term(
    edges: &[(u8, u8)],
    fibre: &[Option<u8>],
    flat: &[u8],
    dim: usize,
    sign: i64,
    acc: &mut FastMap<(u8, Monomial), i64>,
) -> Result<()> {
    let mut vars: Vec<Option<Var>> = fibre.iter().map(|f| f.map(Var::fibre)).collect();
    let mut sink_hits: Vec<u8> = Vec::new();
    for (&(_, t), &i) in edges.iter().zip(flat) {
        match &mut vars[t as usize] {
            Some(v) => {
                *v = v
                    .differentiated(i)
                    .ok_or_else(|| Error::Unsupported(format!("jet order limit reached at {v}")))?;
            }
            None => sink_hits.push(i),
        }
    }
    let sinks = fibre.iter().filter(|f| f.is_none()).count();
    if sinks != 1 {
        return Err(Error::MalformedGraph(format!("{sinks} sinks")));
    }
    let m = Monomial::from_vars(vars.into_iter().flatten());
    match sink_hits.len() {
        0 => {
            for i in 0..dim {
                *acc.entry((i as u8, m.mul(&Monomial::from_vars([Var::base(i as u8)])))).or_default() += sign;
            }
        }
        1 => *acc.entry((sink_hits[0], m)).or_default() += sign,
        _ => {}
    }
    Ok(())
}

/// The operation of a linear combination of directed graphs on superfunction
/// arguments placed at its vertices, see [`graph_operation_term`].
pub fn graph_operation(
    x: &GraphVector<DirectedGraph>,
    args: &[Superfunction],
    keep: Option<&[OddSet]>,
) -> Result<Superfunction> {
    let dim = check_args(args)?;
    let mut total = Superfunction::zero(dim);
    for (g, c) in x.terms() {
        total = total.add(&graph_operation_term(g, c, args, keep)?)?;
    }
    Ok(total)
}

fn check_args(args: &[Superfunction]) -> Result<usize> {
    let dim = args.first().map(Superfunction::dim).ok_or_else(|| Error::DimensionMismatch("no arguments".into()))?;
    if let Some(a) = args.iter().find(|a| a.dim() != dim) {
        return Err(Error::DimensionMismatch(format!("arguments of dimension {dim} and {}", a.dim())));
    }
    Ok(dim)
}

/// `c · Γ(args)`: every edge `(s,t)` acts as `Σ_a ∂/∂ξ_a ⊗ ∂/∂x^a` on
/// the contents of `s` and `t`. Edges act in stored order, first edge
/// first, on the wedge product `f_0 ∧ … ∧ f_{n−1}`; the odd derivative is the
/// left one, signed by the current degrees of the slots before `s`.
///
/// With `keep`, only the listed output components are produced.
pub fn graph_operation_term(
    g: &DirectedGraph,
    c: &Rational,
    args: &[Superfunction],
    keep: Option<&[OddSet]>,
) -> Result<Superfunction> {
    let dim = check_args(args)?;
    let n = g.vertex_count();
    if args.len() != n {
        return Err(Error::DimensionMismatch(format!("{} arguments for a graph on {n} vertices", args.len())));
    }
    let mut acc = Accumulator::new(dim);
    // multilinear split into homogeneous parts
    let parts: Vec<Vec<(usize, Superfunction)>> = args
        .iter()
        .map(|a| {
            let mut degs: Vec<usize> = a.components().map(|(s, _)| s.len()).collect();
            degs.sort_unstable();
            degs.dedup();
            degs.into_iter().map(|k| (k, a.homogeneous_part(k))).collect()
        })
        .collect();
    if parts.iter().any(Vec::is_empty) {
        return Ok(Superfunction::zero(dim));
    }
    let mut pick = vec![0usize; n];
    loop {
        let homo: Vec<(usize, &Superfunction)> = (0..n).map(|v| (parts[v][pick[v]].0, &parts[v][pick[v]].1)).collect();
        homogeneous_term(g, c, &homo, dim, keep, &mut acc);
        let mut v = n;
        loop {
            if v == 0 {
                return Ok(acc.finish());
            }
            v -= 1;
            pick[v] += 1;
            if pick[v] < parts[v].len() {
                break;
            }
            pick[v] = 0;
        }
    }
}

type ContentKey = (Vec<u8>, Vec<u8>);

fn homogeneous_term(
    g: &DirectedGraph,
    c: &Rational,
    args: &[(usize, &Superfunction)],
    dim: usize,
    keep: Option<&[OddSet]>,
    acc: &mut Accumulator,
) {
    let n = args.len();
    let edges = g.edges();
    if (0..n).any(|v| g.out_degree(v) > args[v].0) {
        return;
    }
    let out_degree: usize = args.iter().map(|a| a.0).sum::<usize>() - edges.len();
    if let Some(k) = keep {
        if !k.iter().any(|s| s.len() == out_degree) {
            return;
        }
    }
    // Koszul sign of passing each odd derivative over earlier slots; it
    // depends on the degrees only, not on the indices
    let mut cur: Vec<usize> = args.iter().map(|a| a.0).collect();
    let mut neg = false;
    for &(s, _) in edges {
        let before: usize = cur[..s as usize].iter().sum();
        neg ^= before % 2 == 1;
        cur[s as usize] -= 1;
    }
    // Sum out the edge indices vertex by vertex: after vertex v the state maps
    // the indices of edges with exactly one processed end to the partial wedge.
    let lo = |e: &(u8, u8)| e.0.min(e.1) as usize;
    let hi = |e: &(u8, u8)| e.0.max(e.1) as usize;
    let mut open: Vec<usize> = Vec::new();
    let mut state: BTreeMap<Vec<u8>, Superfunction> = BTreeMap::new();
    state.insert(Vec::new(), Superfunction::scalar(dim, crate::diffpoly::DiffPoly::one()));
    for v in 0..n {
        let fresh: Vec<usize> = (0..edges.len()).filter(|&k| lo(&edges[k]) == v).collect();
        let next_open: Vec<usize> = (0..edges.len()).filter(|&k| lo(&edges[k]) <= v && hi(&edges[k]) > v).collect();
        let mut cache: BTreeMap<ContentKey, Superfunction> = BTreeMap::new();
        let mut next: BTreeMap<Vec<u8>, Accumulator> = BTreeMap::new();
        let mut index = vec![0u8; edges.len()];
        for (key, partial) in &state {
            for (&k, &i) in open.iter().zip(key) {
                index[k] = i;
            }
            let mut choice = vec![0u8; fresh.len()];
            'choices: loop {
                for (&k, &i) in fresh.iter().zip(&choice) {
                    index[k] = i;
                }
                let odd: Vec<u8> = (0..edges.len()).filter(|&k| edges[k].0 as usize == v).map(|k| index[k]).collect();
                let distinct = odd.iter().enumerate().all(|(a, x)| !odd[..a].contains(x));
                if distinct {
                    let mut even: Vec<u8> = (0..edges.len()).filter(|&k| edges[k].1 as usize == v).map(|k| index[k]).collect();
                    even.sort_unstable();
                    let content = cache.entry((odd, even)).or_insert_with_key(|(odd, even)| derive(args[v].1, odd, even));
                    if !content.is_zero() {
                        let out: Vec<u8> = next_open.iter().map(|&k| index[k]).collect();
                        let slot = next.entry(out).or_insert_with(|| Accumulator::new(dim));
                        wedge_into(slot, partial, content, keep);
                    }
                }
                let mut r = choice.len();
                loop {
                    if r == 0 {
                        break 'choices;
                    }
                    r -= 1;
                    choice[r] += 1;
                    if (choice[r] as usize) < dim {
                        break;
                    }
                    choice[r] = 0;
                }
            }
        }
        state = next.into_iter().map(|(k, a)| (k, a.finish())).filter(|(_, f)| !f.is_zero()).collect();
        if state.is_empty() {
            return;
        }
        open = next_open;
    }
    let coeff = if neg { -c.clone() } else { c.clone() };
    for (_, p) in state {
        for (s, q) in p.components() {
            if keep.is_none_or(|k| k.contains(&s)) {
                acc.add_scaled(s, &coeff, q);
            }
        }
    }
}

/// `∂_{x^even} ∂_{ξ_{odd[r−1]}} ⋯ ∂_{ξ_{odd[0]}} f`.
fn derive(f: &Superfunction, odd: &[u8], even: &[u8]) -> Superfunction {
    let mut r = f.clone();
    for &i in odd {
        r = r.odd_derivative(i as usize);
        if r.is_zero() {
            return r;
        }
    }
    for &i in even {
        r = r.even_derivative(i as usize);
        if r.is_zero() {
            return r;
        }
    }
    r
}

/// `+= a ∧ b`, dropping components that cannot grow into a kept set.
fn wedge_into(acc: &mut Accumulator, a: &Superfunction, b: &Superfunction, keep: Option<&[OddSet]>) {
    for (x, p) in a.components() {
        for (y, q) in b.components() {
            if let Some((xy, neg)) = x.wedge(y) {
                if keep.is_none_or(|k| k.iter().any(|s| s.bits() & xy.bits() == xy.bits())) {
                    let sign = if neg { -Rational::one() } else { Rational::one() };
                    acc.add_product(xy, &sign, p, q);
                }
            }
        }
    }
}

/// Per-block monomial lists: block `b` collects the monomials of the
/// component `blocks[b]` of every formula. Lists are kept in the ring's
/// monomial order (leading first), so the row layout is reproducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MonomialBasis {
    blocks: Vec<OddSet>,
    lists: Vec<Vec<Monomial>>,
    index: Vec<BTreeMap<Monomial, usize>>,
}

impl MonomialBasis {
    /// Blocks `ξ_0, …, ξ_{d−1}` for 1-vector formulas.
    pub fn for_vectors(formulas: &[Superfunction], dim: usize) -> Result<Self> {
        let blocks: Vec<OddSet> = (0..dim).map(OddSet::singleton).collect();
        for f in formulas {
            if !f.is_zero() && f.degree() != Some(1) {
                return Err(Error::Degree { expected: 1, found: f.degree() });
            }
        }
        Self::collect(blocks, formulas.iter(), dim)
    }

    /// One block for the component `key` of each formula, seeded with `seed`.
    pub fn single(key: OddSet, seed: &[&DiffPoly], formulas: &[Superfunction]) -> Result<Self> {
        let mut b = MonomialBasis { blocks: vec![key], lists: vec![Vec::new()], index: vec![BTreeMap::new()] };
        let mut sets = vec![alloc::collections::BTreeSet::new()];
        for p in seed {
            sets[0].extend(p.monomials());
        }
        for f in formulas {
            check_components(f, &b.blocks)?;
            if let Some(p) = f.component_ref(key) {
                sets[0].extend(p.monomials());
            }
        }
        b.fill(sets);
        Ok(b)
    }

    /// Blocks given explicitly; every formula may only have those components.
    pub fn collect<'a>(blocks: Vec<OddSet>, formulas: impl Iterator<Item = &'a Superfunction>, dim: usize) -> Result<Self> {
        if let Some(s) = blocks.iter().find(|s| s.max_index().is_some_and(|m| m >= dim)) {
            return Err(Error::DimensionMismatch(format!("block {s:?} in dimension {dim}")));
        }
        let mut sets = vec![alloc::collections::BTreeSet::new(); blocks.len()];
        for f in formulas {
            check_components(f, &blocks)?;
            for (b, key) in blocks.iter().enumerate() {
                if let Some(p) = f.component_ref(*key) {
                    sets[b].extend(p.monomials());
                }
            }
        }
        let mut out = MonomialBasis { blocks, lists: Vec::new(), index: Vec::new() };
        out.fill(sets);
        Ok(out)
    }

    fn fill(&mut self, sets: Vec<alloc::collections::BTreeSet<Monomial>>) {
        self.lists = sets.into_iter().map(|s| s.into_iter().rev().collect()).collect();
        self.index = self.lists.iter().map(|l| l.iter().cloned().enumerate().map(|(k, m)| (m, k)).collect()).collect();
    }

    pub fn blocks(&self) -> &[OddSet] {
        &self.blocks
    }

    pub fn block(&self, b: usize) -> &[Monomial] {
        &self.lists[b]
    }

    pub fn block_sizes(&self) -> Vec<usize> {
        self.lists.iter().map(Vec::len).collect()
    }

    /// Total number of rows.
    pub fn count(&self) -> usize {
        self.lists.iter().map(Vec::len).sum()
    }

    /// Position of `m` inside block `b`.
    pub fn position(&self, b: usize, m: &Monomial) -> Option<usize> {
        self.index[b].get(m).copied()
    }

    /// Row of `m` in block `b`, counting the blocks before it.
    pub fn row(&self, b: usize, m: &Monomial) -> Option<usize> {
        let shift: usize = self.lists[..b].iter().map(Vec::len).sum();
        self.position(b, m).map(|k| shift + k)
    }

    /// `(block, monomial)` of each row in order.
    pub fn rows(&self) -> impl Iterator<Item = (OddSet, &Monomial)> {
        self.blocks.iter().zip(&self.lists).flat_map(|(s, l)| l.iter().map(move |m| (*s, m)))
    }

    /// Coefficient vector of `f`.
    pub fn vector(&self, f: &Superfunction) -> Result<SparseVecQ> {
        check_components(f, &self.blocks)?;
        let mut entries = Vec::new();
        let mut shift = 0;
        for (b, key) in self.blocks.iter().enumerate() {
            if let Some(p) = f.component_ref(*key) {
                for (m, c) in p.terms() {
                    let k = self.index[b].get(m).ok_or_else(|| {
                        Error::BasisInconsistency(format!("monomial {m} near {key} missing from the basis"))
                    })?;
                    entries.push((shift + k, c.clone()));
                }
            }
            shift += self.lists[b].len();
        }
        SparseVecQ::from_entries(self.count(), entries)
    }

    /// Coefficient vector of a polynomial placed in block `b`.
    pub fn poly_vector(&self, b: usize, p: &DiffPoly) -> Result<SparseVecQ> {
        let shift: usize = self.lists[..b].iter().map(Vec::len).sum();
        let entries = p
            .terms()
            .iter()
            .map(|(m, c)| {
                self.index[b]
                    .get(m)
                    .map(|k| (shift + k, c.clone()))
                    .ok_or_else(|| Error::BasisInconsistency(format!("monomial {m} missing from the basis")))
            })
            .collect::<Result<Vec<_>>>()?;
        SparseVecQ::from_entries(self.count(), entries)
    }
}

fn check_components(f: &Superfunction, blocks: &[OddSet]) -> Result<()> {
    if let Some((s, _)) = f.components().find(|(s, _)| !blocks.contains(s)) {
        return Err(Error::BasisInconsistency(format!("component {s:?} outside the blocks {blocks:?}")));
    }
    Ok(())
}

/// Column `j` holds the coefficients of formula `j` in `basis`.
pub fn evaluation_matrix(formulas: &[Superfunction], basis: &MonomialBasis) -> Result<SparseMatQ> {
    let columns = formulas.iter().map(|f| basis.vector(f)).collect::<Result<Vec<_>>>()?;
    SparseMatQ::from_columns(basis.count(), columns)
}

/// Single-block basis and matrix for the component `key` of each formula,
/// with the monomials of `seed` included in the basis.
pub fn scalar_monomial_matrix(
    key: OddSet,
    seed: &[&DiffPoly],
    formulas: &[Superfunction],
) -> Result<(MonomialBasis, SparseMatQ)> {
    let basis = MonomialBasis::single(key, seed, formulas)?;
    let m = evaluation_matrix(formulas, &basis)?;
    Ok((basis, m))
}

/// Builds a basis and matrix one formula at a time, keeping only interned
/// monomials and sparse columns.
#[derive(Clone, Debug)]
pub struct StreamingEvaluation {
    dim: usize,
    blocks: Vec<OddSet>,
    interned: Vec<FastMap<Monomial, u32>>,
    columns: Vec<Vec<(u16, u32, Rational)>>,
}

impl StreamingEvaluation {
    pub fn new(dim: usize, blocks: Vec<OddSet>) -> Self {
        let interned = blocks.iter().map(|_| FastMap::default()).collect();
        StreamingEvaluation { dim, blocks, interned, columns: Vec::new() }
    }

    pub fn for_vectors(dim: usize) -> Self {
        Self::new(dim, (0..dim).map(OddSet::singleton).collect())
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    /// Folds `f` in as the next column and drops it.
    pub fn push(&mut self, f: Superfunction) -> Result<()> {
        if f.dim() != self.dim {
            return Err(Error::DimensionMismatch(format!("formula of dimension {} in dimension {}", f.dim(), self.dim)));
        }
        check_components(&f, &self.blocks)?;
        let mut col = Vec::new();
        for (key, p) in f.into_components() {
            let b = self.blocks.iter().position(|s| *s == key).expect("checked");
            for (m, c) in p.into_terms() {
                let map = &mut self.interned[b];
                let next = map.len() as u32;
                let id = *map.entry(m).or_insert(next);
                col.push((b as u16, id, c));
            }
        }
        self.columns.push(col);
        Ok(())
    }

    pub fn finish(self) -> Result<(MonomialBasis, SparseMatQ)> {
        let sets = self.interned.iter().map(|m| m.keys().cloned().collect()).collect();
        let mut basis = MonomialBasis { blocks: self.blocks, lists: Vec::new(), index: Vec::new() };
        basis.fill(sets);
        let shifts: Vec<usize> = basis
            .lists
            .iter()
            .scan(0, |acc, l| {
                let s = *acc;
                *acc += l.len();
                Some(s)
            })
            .collect();
        // interned id → row
        let remap: Vec<Vec<usize>> = self
            .interned
            .iter()
            .enumerate()
            .map(|(b, map)| {
                let mut r = vec![0; map.len()];
                for (m, &id) in map {
                    r[id as usize] = shifts[b] + basis.index[b][m];
                }
                r
            })
            .collect();
        let rows = basis.count();
        let columns = self
            .columns
            .into_iter()
            .map(|col| SparseVecQ::from_entries(rows, col.into_iter().map(|(b, id, c)| (remap[b as usize][id as usize], c))))
            .collect::<Result<Vec<_>>>()?;
        Ok((basis, SparseMatQ::from_columns(rows, columns)?))
    }
}
