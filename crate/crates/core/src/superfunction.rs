//! Superfunctions: polynomials in the odd variables ξ₀, …, ξ_{d−1} with
//! differential-polynomial coefficients. A degree-k part is a k-vector field.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::fmt::Write;

use crate::diffpoly::{parse_term, DiffPoly, PolyAccumulator, RingSpec, Var};
use crate::error::{Error, ParseError, Result};
use crate::rational::Rational;

/// A strictly increasing set of odd indices, as a bitmask.
///
/// Ordered by size, then lexicographically by the sorted index tuple.
#[derive(Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct OddSet(u32);

impl OddSet {
    pub const EMPTY: OddSet = OddSet(0);

    pub fn from_indices(indices: &[usize]) -> Result<OddSet> {
        let mut bits = 0u32;
        for w in indices.windows(2) {
            if w[0] >= w[1] {
                return Err(Error::DimensionMismatch(format!("odd indices {indices:?} not strictly increasing")));
            }
        }
        for &i in indices {
            if i >= 32 {
                return Err(Error::DimensionMismatch(format!("odd index {i}")));
            }
            bits |= 1 << i;
        }
        Ok(OddSet(bits))
    }

    pub fn singleton(i: usize) -> OddSet {
        OddSet(1 << i)
    }

    /// `{0, …, d−1}`.
    pub fn full(d: usize) -> OddSet {
        OddSet(((1u64 << d) - 1) as u32)
    }

    pub fn bits(self) -> u32 {
        self.0
    }

    pub fn len(self) -> usize {
        self.0.count_ones() as usize
    }

    pub fn is_empty(self) -> bool {
        self.0 == 0
    }

    pub fn contains(self, i: usize) -> bool {
        self.0 & (1 << i) != 0
    }

    pub fn indices(self) -> impl Iterator<Item = usize> {
        let mut b = self.0;
        core::iter::from_fn(move || {
            if b == 0 {
                return None;
            }
            let i = b.trailing_zeros() as usize;
            b &= b - 1;
            Some(i)
        })
    }

    pub fn max_index(self) -> Option<usize> {
        (self.0 != 0).then(|| 31 - self.0.leading_zeros() as usize)
    }

    /// `ξ_A ∧ ξ_B = sign · ξ_{A∪B}`; `None` when the sets overlap.
    pub fn wedge(self, other: OddSet) -> Option<(OddSet, bool)> {
        if self.0 & other.0 != 0 {
            return None;
        }
        let mut swaps = 0u32;
        for b in other.indices() {
            swaps += (self.0 >> b).count_ones();
        }
        Some((OddSet(self.0 | other.0), swaps % 2 == 1))
    }

    /// Left derivative ∂/∂ξ_i: `(A∖{i}, negative)` with the sign of moving ξ_i to the front.
    pub fn left_derivative(self, i: usize) -> Option<(OddSet, bool)> {
        if !self.contains(i) {
            return None;
        }
        let before = (self.0 & ((1 << i) - 1)).count_ones();
        Some((OddSet(self.0 & !(1 << i)), before % 2 == 1))
    }

    /// Right derivative: the sign of moving ξ_i to the back.
    pub fn right_derivative(self, i: usize) -> Option<(OddSet, bool)> {
        if !self.contains(i) {
            return None;
        }
        let after = (self.0 >> (i + 1)).count_ones();
        Some((OddSet(self.0 & !(1 << i)), after % 2 == 1))
    }
}

impl Ord for OddSet {
    fn cmp(&self, other: &Self) -> Ordering {
        self.len().cmp(&other.len()).then_with(|| {
            // lexicographic on sorted tuples: the lowest differing index decides,
            // and the set containing it is smaller
            let diff = self.0 ^ other.0;
            if diff == 0 {
                return Ordering::Equal;
            }
            let low = diff & diff.wrapping_neg();
            if self.0 & low != 0 {
                Ordering::Less
            } else {
                Ordering::Greater
            }
        })
    }
}

impl PartialOrd for OddSet {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for OddSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in self.indices() {
            write!(f, "xi[{i}]")?;
        }
        Ok(())
    }
}

impl fmt::Debug for OddSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_char('{')?;
        for (n, i) in self.indices().enumerate() {
            if n > 0 {
                f.write_char(',')?;
            }
            write!(f, "{i}")?;
        }
        f.write_char('}')
    }
}

/// Sparse map from odd sets to nonzero coefficients.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Superfunction {
    dim: usize,
    components: BTreeMap<OddSet, DiffPoly>,
}

/// Per-component accumulator for long sums.
pub(crate) struct Accumulator {
    dim: usize,
    parts: BTreeMap<OddSet, PolyAccumulator>,
}

impl Accumulator {
    pub(crate) fn new(dim: usize) -> Self {
        Accumulator { dim, parts: BTreeMap::new() }
    }

    pub(crate) fn add_scaled(&mut self, key: OddSet, c: &Rational, p: &DiffPoly) {
        self.parts.entry(key).or_default().add_scaled(c, p);
    }

    pub(crate) fn add_product(&mut self, key: OddSet, c: &Rational, p: &DiffPoly, q: &DiffPoly) {
        self.parts.entry(key).or_default().add_product(c, p, q);
    }

    pub(crate) fn add_term(&mut self, key: OddSet, m: crate::diffpoly::Monomial, c: &Rational) {
        self.parts.entry(key).or_default().add_term(m, c);
    }

    pub(crate) fn finish(self) -> Superfunction {
        let components = self.parts.into_iter().map(|(k, a)| (k, a.finish())).filter(|(_, p)| !p.is_zero()).collect();
        Superfunction { dim: self.dim, components }
    }
}

fn sign(neg: bool) -> Rational {
    if neg {
        -Rational::one()
    } else {
        Rational::one()
    }
}

impl Superfunction {
    pub fn zero(dim: usize) -> Self {
        Superfunction { dim, components: BTreeMap::new() }
    }

    /// The degree-0 superfunction `p`.
    pub fn scalar(dim: usize, p: DiffPoly) -> Self {
        Self::monomial(dim, OddSet::EMPTY, p)
    }

    /// `p · ξ_A`.
    pub fn monomial(dim: usize, set: OddSet, p: DiffPoly) -> Self {
        assert!(set.max_index().map_or(true, |m| m < dim), "odd set {set:?} outside dimension {dim}");
        let mut components = BTreeMap::new();
        if !p.is_zero() {
            components.insert(set, p);
        }
        Superfunction { dim, components }
    }

    pub fn xi(dim: usize, i: usize) -> Self {
        Self::monomial(dim, OddSet::singleton(i), DiffPoly::one())
    }

    /// ε = ξ₀ξ₁…ξ_{d−1}.
    pub fn epsilon(dim: usize) -> Self {
        Self::monomial(dim, OddSet::full(dim), DiffPoly::one())
    }

    /// E = Σ x^i ξ_i.
    pub fn euler_field(dim: usize) -> Self {
        let components =
            (0..dim).map(|i| (OddSet::singleton(i), DiffPoly::var(Var::base(i as u8)))).collect();
        Superfunction { dim, components }
    }

    pub fn from_components(dim: usize, parts: impl IntoIterator<Item = (OddSet, DiffPoly)>) -> Result<Self> {
        let mut acc = Accumulator::new(dim);
        for (k, p) in parts {
            if k.max_index().is_some_and(|m| m >= dim) {
                return Err(Error::DimensionMismatch(format!("odd set {k:?} in dimension {dim}")));
            }
            acc.add_scaled(k, &Rational::one(), &p);
        }
        Ok(acc.finish())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_zero(&self) -> bool {
        self.components.is_empty()
    }

    pub fn components(&self) -> impl Iterator<Item = (OddSet, &DiffPoly)> {
        self.components.iter().map(|(k, p)| (*k, p))
    }

    pub fn into_components(self) -> BTreeMap<OddSet, DiffPoly> {
        self.components
    }

    /// Coefficient of ξ_A (zero when absent).
    pub fn component(&self, set: OddSet) -> DiffPoly {
        self.components.get(&set).cloned().unwrap_or_default()
    }

    pub fn component_ref(&self, set: OddSet) -> Option<&DiffPoly> {
        self.components.get(&set)
    }

    /// Coefficient of ξ_{i1}…ξ_{ik} for a strictly increasing index list.
    pub fn get(&self, indices: &[usize]) -> DiffPoly {
        OddSet::from_indices(indices).map(|s| self.component(s)).unwrap_or_default()
    }

    /// The degree when homogeneous and nonzero.
    pub fn degree(&self) -> Option<usize> {
        let mut it = self.components.keys().map(|k| k.len());
        let first = it.next()?;
        it.all(|d| d == first).then_some(first)
    }

    pub fn homogeneous_part(&self, k: usize) -> Superfunction {
        Superfunction {
            dim: self.dim,
            components: self.components.iter().filter(|(s, _)| s.len() == k).map(|(s, p)| (*s, p.clone())).collect(),
        }
    }

    /// Keeps only the listed components.
    pub fn restrict(&self, keep: &[OddSet]) -> Superfunction {
        Superfunction {
            dim: self.dim,
            components: self.components.iter().filter(|(s, _)| keep.contains(s)).map(|(s, p)| (*s, p.clone())).collect(),
        }
    }

    /// Total number of (odd set, monomial) terms.
    pub fn term_count(&self) -> usize {
        self.components.values().map(DiffPoly::len).sum()
    }

    fn check_dim(&self, other: &Superfunction) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimensionMismatch(format!("superfunctions of dimension {} and {}", self.dim, other.dim)));
        }
        Ok(())
    }

    /// `self + c · other`.
    pub fn add_scaled(&self, c: &Rational, other: &Superfunction) -> Result<Superfunction> {
        self.check_dim(other)?;
        let mut components = self.components.clone();
        for (k, p) in &other.components {
            let sum = match components.get(k) {
                Some(q) => q.add_scaled(c, p),
                None => p.scale(c),
            };
            if sum.is_zero() {
                components.remove(k);
            } else {
                components.insert(*k, sum);
            }
        }
        Ok(Superfunction { dim: self.dim, components })
    }

    pub fn add(&self, other: &Superfunction) -> Result<Superfunction> {
        self.add_scaled(&Rational::one(), other)
    }

    pub fn sub(&self, other: &Superfunction) -> Result<Superfunction> {
        self.add_scaled(&-Rational::one(), other)
    }

    pub fn neg(&self) -> Superfunction {
        self.scale(&-Rational::one())
    }

    pub fn scale(&self, c: &Rational) -> Superfunction {
        if c.is_zero() {
            return Self::zero(self.dim);
        }
        Superfunction { dim: self.dim, components: self.components.iter().map(|(k, p)| (*k, p.scale(c))).collect() }
    }

    /// Multiplication by an even coefficient.
    pub fn mul_poly(&self, q: &DiffPoly) -> Superfunction {
        let components =
            self.components.iter().map(|(k, p)| (*k, p.mul(q))).filter(|(_, p)| !p.is_zero()).collect();
        Superfunction { dim: self.dim, components }
    }

    /// Sum of `c_j · F_j`.
    pub fn linear_combination<'a>(
        dim: usize,
        items: impl IntoIterator<Item = (&'a Rational, &'a Superfunction)>,
    ) -> Result<Superfunction> {
        let mut acc = Accumulator::new(dim);
        for (c, f) in items {
            if f.dim != dim {
                return Err(Error::DimensionMismatch(format!("superfunction of dimension {} in a {dim}-dimensional sum", f.dim)));
            }
            for (k, p) in &f.components {
                acc.add_scaled(*k, c, p);
            }
        }
        Ok(acc.finish())
    }

    /// The graded-commutative product.
    pub fn wedge(&self, other: &Superfunction) -> Result<Superfunction> {
        self.check_dim(other)?;
        let mut acc = Accumulator::new(self.dim);
        for (a, p) in &self.components {
            for (b, q) in &other.components {
                if let Some((ab, neg)) = a.wedge(*b) {
                    acc.add_product(ab, &sign(neg), p, q);
                }
            }
        }
        Ok(acc.finish())
    }

    /// Left derivative ∂/∂ξ_i.
    pub fn odd_derivative(&self, i: usize) -> Superfunction {
        self.odd_derivative_with(i, OddSet::left_derivative)
    }

    /// Right derivative F ∂⃖/∂ξ_i.
    pub fn odd_derivative_right(&self, i: usize) -> Superfunction {
        self.odd_derivative_with(i, OddSet::right_derivative)
    }

    fn odd_derivative_with(&self, i: usize, f: fn(OddSet, usize) -> Option<(OddSet, bool)>) -> Superfunction {
        let components = self
            .components
            .iter()
            .filter_map(|(k, p)| f(*k, i).map(|(r, neg)| (r, if neg { p.neg() } else { p.clone() })))
            .collect();
        Superfunction { dim: self.dim, components }
    }

    /// ∂/∂x^i applied to every coefficient.
    pub fn even_derivative(&self, i: usize) -> Superfunction {
        let components = self
            .components
            .iter()
            .map(|(k, p)| (*k, p.derivative(i)))
            .filter(|(_, p)| !p.is_zero())
            .collect();
        Superfunction { dim: self.dim, components }
    }

    /// The Schouten bracket
    /// `[[F,G]] = Σ_i (F∂⃖_{ξ_i})·∂_{x^i}G − (−1)^{(|F|−1)(|G|−1)} Σ_i (G∂⃖_{ξ_i})·∂_{x^i}F`
    /// on homogeneous parts, extended bilinearly.
    pub fn schouten(&self, other: &Superfunction) -> Result<Superfunction> {
        self.schouten_with(other, None)
    }

    /// Only the listed components of `[[self, other]]`.
    pub fn schouten_restricted(&self, other: &Superfunction, keep: &[OddSet]) -> Result<Superfunction> {
        self.schouten_with(other, Some(keep))
    }

    fn schouten_with(&self, other: &Superfunction, keep: Option<&[OddSet]>) -> Result<Superfunction> {
        self.check_dim(other)?;
        let d = self.dim;
        let mut acc = Accumulator::new(d);
        // a half vanishes when its odd side is a pure function
        if self.components.keys().any(|k| !k.is_empty()) {
            let dg: Vec<Superfunction> = (0..d).map(|i| other.even_derivative(i)).collect();
            half_bracket(&mut acc, &self.components, &dg, false, keep);
        }
        if other.components.keys().any(|k| !k.is_empty()) {
            let df: Vec<Superfunction> = (0..d).map(|i| self.even_derivative(i)).collect();
            half_bracket(&mut acc, &other.components, &df, true, keep);
        }
        Ok(acc.finish())
    }

    /// `[[…[[self, args₀]], args₁]] …]]`.
    pub fn nested_bracket(&self, args: &[Superfunction]) -> Result<Superfunction> {
        args.iter().try_fold(self.clone(), |acc, a| acc.schouten(a))
    }

    /// Relabels fibre variables in every coefficient (see [`DiffPoly::permute_fibres`]).
    pub fn permute_fibres(&self, perm: &[u8]) -> Superfunction {
        let components = self.components.iter().map(|(k, p)| (*k, p.permute_fibres(perm))).collect();
        Superfunction { dim: self.dim, components }
    }

    /// Parses the canonical text form produced by `Display`.
    pub fn parse(dim: usize, text: &str) -> core::result::Result<Superfunction, ParseError> {
        let text = text.trim();
        let mut parts: Vec<(OddSet, DiffPoly)> = Vec::new();
        if text != "0" {
            for t in text.split(" + ") {
                let (head, set) = match t.rfind(" * xi[") {
                    Some(pos) => (&t[..pos], parse_odd(&t[pos + 3..])?),
                    None if t.trim_start().starts_with("xi[") => ("1", parse_odd(t.trim())?),
                    None => (t, OddSet::EMPTY),
                };
                if set.max_index().is_some_and(|m| m >= dim) {
                    return Err(ParseError::new(format!("odd index out of range in `{t}`")));
                }
                let (m, c) = parse_term(head)?;
                parts.push((set, DiffPoly::term(m, c)));
            }
        }
        Superfunction::from_components(dim, parts).map_err(|e| ParseError::new(format!("{e}")))
    }
}

/// Adds `Σ_i (F∂⃖_{ξ_i})·(∂_i G)` for the components of `f` against the
/// precomputed derivatives `dg[i] = ∂_i G`. For the second half of the
/// bracket (`swapped`) each pair carries `−(−1)^{(|G|−1)(|F|−1)}`.
fn half_bracket(acc: &mut Accumulator, f: &BTreeMap<OddSet, DiffPoly>, dg: &[Superfunction], swapped: bool, keep: Option<&[OddSet]>) {
    for (a, p) in f {
        for i in a.indices() {
            let (a_i, neg_d) = a.right_derivative(i).expect("index in set");
            for (b, q) in &dg[i].components {
                let Some((ab, neg_w)) = a_i.wedge(*b) else { continue };
                if keep.is_some_and(|k| !k.contains(&ab)) {
                    continue;
                }
                let mut neg = neg_d ^ neg_w;
                if swapped {
                    neg ^= (a.len() + 1) * (b.len() + 1) % 2 == 0;
                }
                acc.add_product(ab, &sign(neg), p, q);
            }
        }
    }
}

fn parse_odd(s: &str) -> core::result::Result<OddSet, ParseError> {
    let mut idx = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let r = rest.strip_prefix("xi[").ok_or_else(|| ParseError::new(format!("bad odd monomial `{s}`")))?;
        let end = r.find(']').ok_or_else(|| ParseError::new(format!("bad odd monomial `{s}`")))?;
        idx.push(r[..end].parse::<usize>().map_err(|_| ParseError::new(format!("bad odd index in `{s}`")))?);
        rest = &r[end + 1..];
    }
    OddSet::from_indices(&idx).map_err(|e| ParseError::new(format!("{e}")))
}

impl fmt::Display for Superfunction {
    /// `coeff * monomial * xi[i]xi[j]` terms joined by ` + `, components in
    /// odd-set order, terms in monomial order; `0` for zero.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (k, p) in &self.components {
            for (m, c) in p.terms() {
                if !first {
                    f.write_str(" + ")?;
                }
                first = false;
                write!(f, "{c}")?;
                if !m.is_one() {
                    write!(f, " * {m}")?;
                }
                if !k.is_empty() {
                    write!(f, " * {k}")?;
                }
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Superfunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

/// The Nambu–Poisson bi-vector `[[…[[ρ ε, a¹]], …]], a^{d−2}]]`.
pub fn nambu_p(spec: &RingSpec) -> Superfunction {
    let d = spec.dim();
    Superfunction::monomial(d, OddSet::full(d), spec.rho())
        .nested_bracket(&casimirs(spec))
        .expect("same dimension")
}

/// `[[…[[ε, a¹]], …]], a^{d−2}]]`, the bi-vector with ρ divided out.
pub fn p_without_rho(spec: &RingSpec) -> Superfunction {
    Superfunction::epsilon(spec.dim()).nested_bracket(&casimirs(spec)).expect("same dimension")
}

/// The Casimirs `a¹, …, a^{d−2}` as degree-0 superfunctions.
pub fn casimirs(spec: &RingSpec) -> Vec<Superfunction> {
    (1..spec.dim() - 1).map(|k| Superfunction::scalar(spec.dim(), spec.casimir(k))).collect()
}

/// The bracket chain with `args` in place of the Casimirs.
pub fn nambu_with(spec: &RingSpec, rho: &DiffPoly, args: &[Superfunction]) -> Result<Superfunction> {
    let d = spec.dim();
    if args.len() + 2 != d {
        return Err(Error::DimensionMismatch(format!("{} Casimir slots in dimension {d}", args.len())));
    }
    Superfunction::monomial(d, OddSet::full(d), rho.clone()).nested_bracket(args)
}

/// Only the `set` component of [`nambu_with`]; components that cannot
/// reach `set` are dropped after every bracket.
pub fn nambu_with_component(spec: &RingSpec, rho: &DiffPoly, args: &[Superfunction], set: OddSet) -> Result<DiffPoly> {
    let d = spec.dim();
    if args.len() + 2 != d {
        return Err(Error::DimensionMismatch(format!("{} Casimir slots in dimension {d}", args.len())));
    }
    let mut f = Superfunction::monomial(d, OddSet::full(d), rho.clone());
    for a in args {
        let mut g = f.schouten(a)?;
        g.components.retain(|s, _| s.bits() & set.bits() == set.bits());
        f = g;
    }
    Ok(f.component(set))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;

    fn jet(k: u8, idx: &[u8]) -> DiffPoly {
        DiffPoly::var(Var::jet(k, idx))
    }

    fn set(ix: &[usize]) -> OddSet {
        OddSet::from_indices(ix).unwrap()
    }

    #[test]
    fn odd_set_order() {
        assert!(set(&[]) < set(&[2]));
        assert!(set(&[0]) < set(&[1]));
        assert!(set(&[0, 3]) < set(&[1, 2]));
        assert!(set(&[0, 1]) < set(&[0, 2]));
        assert!(set(&[2]) < set(&[0, 1]));
        assert!(OddSet::from_indices(&[1, 1]).is_err());
    }

    #[test]
    fn wedge_examples() {
        let x0 = Superfunction::xi(3, 0);
        let x1 = Superfunction::xi(3, 1);
        assert_eq!(x0.wedge(&x1).unwrap(), Superfunction::monomial(3, set(&[0, 1]), DiffPoly::one()));
        assert_eq!(x1.wedge(&x0).unwrap(), Superfunction::monomial(3, set(&[0, 1]), DiffPoly::one().neg()));
        assert!(x0.wedge(&x0).unwrap().is_zero());
        let a = Superfunction::monomial(3, set(&[0]), jet(0, &[]));
        let b = Superfunction::monomial(3, set(&[1, 2]), jet(1, &[2]));
        assert_eq!(a.wedge(&b).unwrap(), Superfunction::monomial(3, set(&[0, 1, 2]), jet(0, &[]).mul(&jet(1, &[2]))));
    }

    #[test]
    fn odd_derivative_examples() {
        let e = Superfunction::epsilon(3);
        assert_eq!(e.odd_derivative(1), Superfunction::monomial(3, set(&[0, 2]), DiffPoly::one().neg()));
        assert_eq!(e.odd_derivative(0), Superfunction::monomial(3, set(&[1, 2]), DiffPoly::one()));
        let eu = Superfunction::euler_field(4);
        for j in 0..4 {
            assert_eq!(eu.even_derivative(j), Superfunction::xi(4, j));
        }
        assert_eq!(eu.to_string(), "1 * x0 * xi[0] + 1 * x1 * xi[1] + 1 * x2 * xi[2] + 1 * x3 * xi[3]");
    }

    #[test]
    fn schouten_examples() {
        let spec = RingSpec::new(3).unwrap();
        let p = nambu_p(&spec);
        let r = jet(0, &[]);
        let expected = Superfunction::from_components(
            3,
            [
                (set(&[1, 2]), r.mul(&jet(1, &[0]))),
                (set(&[0, 2]), r.mul(&jet(1, &[1])).neg()),
                (set(&[0, 1]), r.mul(&jet(1, &[2]))),
            ],
        )
        .unwrap();
        assert_eq!(p, expected);
        let c = Superfunction::scalar(3, DiffPoly::constant(Rational::from_i64(5)));
        assert!(p.schouten(&c).unwrap().is_zero());
        let p2 = nambu_p(&RingSpec::new(2).unwrap());
        assert_eq!(p2, Superfunction::monomial(2, set(&[0, 1]), r.clone()));
        assert!(p2.schouten(&p2).unwrap().is_zero());
    }

    #[test]
    fn vector_field_on_function() {
        let f = Superfunction::scalar(2, jet(1, &[]));
        let x = Superfunction::monomial(2, set(&[0]), jet(0, &[]));
        let fx = f.schouten(&x).unwrap();
        let xf = x.schouten(&f).unwrap();
        assert_eq!(xf, Superfunction::scalar(2, jet(0, &[]).mul(&jet(1, &[0]))));
        assert_eq!(fx, xf.neg());
    }

    #[test]
    fn text_round_trip() {
        let spec = RingSpec::new(4).unwrap();
        let p = nambu_p(&spec).add(&Superfunction::scalar(4, DiffPoly::constant(Rational::new(-2, 3)))).unwrap();
        let s = p.to_string();
        assert_eq!(Superfunction::parse(4, &s).unwrap(), p);
        assert_eq!(Superfunction::parse(4, "0").unwrap(), Superfunction::zero(4));
        assert!(Superfunction::parse(2, "1 * xi[3]").is_err());
    }
}
