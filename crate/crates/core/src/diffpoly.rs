//! The differential polynomial ring over ℚ in the fibre variables
//! ρ, a¹, …, a^{d−2}, their jets, and the base coordinates x⁰, …, x^{d−1}.

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;
use core::fmt;
use core::fmt::Write;
use core::hash::BuildHasherDefault;
use core::str::FromStr;

use hashbrown::HashMap;
use smallvec::SmallVec;

use crate::error::{Error, ParseError, Result};
use crate::rational::Rational;

/// Letters used for base-coordinate indices in jet names.
pub const COORD_LETTERS: &[u8; 16] = b"xyzwvutsrqponmlk";

/// Longest multi-index a jet variable can carry.
pub const MAX_JET_ORDER: usize = 12;

const BASE_KIND: u64 = 0x80;
const KIND_SHIFT: u32 = 56;
const ORDER_SHIFT: u32 = 48;
const COORD_MASK: u64 = (1 << 48) - 1;

/// The shape of the ring: base dimension and optional derivative-order caps.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RingSpec {
    dim: usize,
    caps: Option<Vec<usize>>,
}

impl RingSpec {
    pub fn new(dim: usize) -> Result<Self> {
        if !(2..=COORD_LETTERS.len()).contains(&dim) {
            return Err(Error::Unsupported(format!("dimension {dim}")));
        }
        Ok(RingSpec { dim, caps: None })
    }

    /// Caps `d` on ρ and `d + 1` on every Casimir.
    pub fn with_default_caps(dim: usize) -> Result<Self> {
        let mut s = Self::new(dim)?;
        let mut caps = alloc::vec![dim + 1; dim - 1];
        caps[0] = dim;
        s.caps = Some(caps);
        Ok(s)
    }

    pub fn with_caps(dim: usize, caps: Vec<usize>) -> Result<Self> {
        let mut s = Self::new(dim)?;
        if caps.len() != dim - 1 {
            return Err(Error::DimensionMismatch(format!("{} caps for {} fibre variables", caps.len(), dim - 1)));
        }
        s.caps = Some(caps);
        Ok(s)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of fibre variables: ρ plus `d − 2` Casimirs.
    pub fn fibre_count(&self) -> usize {
        self.dim - 1
    }

    pub fn caps(&self) -> Option<&[usize]> {
        self.caps.as_deref()
    }

    pub fn rho(&self) -> DiffPoly {
        DiffPoly::var(Var::fibre(0))
    }

    /// The Casimir `a^k`, `1 ≤ k ≤ d − 2`.
    pub fn casimir(&self, k: usize) -> DiffPoly {
        assert!(k >= 1 && k + 1 < self.dim, "no Casimir a{k} in dimension {}", self.dim);
        DiffPoly::var(Var::fibre(k as u8))
    }

    pub fn coordinate(&self, i: usize) -> DiffPoly {
        assert!(i < self.dim);
        DiffPoly::var(Var::base(i as u8))
    }

    /// Total derivative with the order caps enforced, if any.
    pub fn derivative(&self, p: &DiffPoly, coord: usize) -> Result<DiffPoly> {
        if coord >= self.dim {
            return Err(Error::DimensionMismatch(format!("coordinate {coord} in dimension {}", self.dim)));
        }
        let r = p.derivative(coord);
        if let Some(caps) = &self.caps {
            for (m, _) in r.terms() {
                for v in m.vars() {
                    if let Some(k) = v.fibre_index() {
                        let cap = caps.get(k as usize).copied().unwrap_or(0);
                        if v.order() > cap {
                            return Err(Error::OrderCap { var: format!("{v}"), cap });
                        }
                    }
                }
            }
        }
        Ok(r)
    }
}

/// A ring generator: a jet of a fibre variable or a base coordinate.
///
/// Packed so that the integer order is the ring's variable order:
/// fibre index, then total derivative order, then the sorted multi-index;
/// base coordinates sort after every jet.
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Var(u64);

impl Var {
    pub fn fibre(k: u8) -> Var {
        assert!((k as u64) < BASE_KIND);
        Var((k as u64) << KIND_SHIFT)
    }

    pub fn base(i: u8) -> Var {
        assert!((i as usize) < COORD_LETTERS.len());
        Var((BASE_KIND | i as u64) << KIND_SHIFT)
    }

    /// Jet of fibre `k` with the given multi-index (any order).
    pub fn jet(k: u8, multi_index: &[u8]) -> Var {
        let mut v = Var::fibre(k);
        for &c in multi_index {
            v = v.differentiated(c).expect("jet order within bounds");
        }
        v
    }

    pub fn is_base(self) -> bool {
        self.kind() & BASE_KIND != 0
    }

    fn kind(self) -> u64 {
        self.0 >> KIND_SHIFT
    }

    pub fn fibre_index(self) -> Option<u8> {
        (!self.is_base()).then_some(self.kind() as u8)
    }

    pub fn base_index(self) -> Option<u8> {
        self.is_base().then_some((self.kind() & !BASE_KIND) as u8)
    }

    pub fn order(self) -> usize {
        ((self.0 >> ORDER_SHIFT) & 0xff) as usize
    }

    /// Sorted multi-index of the jet.
    pub fn multi_index(self) -> SmallVec<[u8; MAX_JET_ORDER]> {
        let n = self.order();
        (0..n).map(|k| ((self.0 >> (44 - 4 * k)) & 0xf) as u8).collect()
    }

    fn with_multi_index(self, idx: &[u8]) -> Var {
        let mut coords = 0u64;
        for (k, &c) in idx.iter().enumerate() {
            coords |= (c as u64) << (44 - 4 * k);
        }
        Var((self.kind() << KIND_SHIFT) | ((idx.len() as u64) << ORDER_SHIFT) | coords)
    }

    /// The jet with `coord` added to the multi-index; `None` for base
    /// coordinates (whose derivatives are constants) or when the order limit is hit.
    pub fn differentiated(self, coord: u8) -> Option<Var> {
        if self.is_base() || self.order() >= MAX_JET_ORDER {
            return None;
        }
        debug_assert!((coord as usize) < COORD_LETTERS.len());
        let mut idx = self.multi_index();
        let pos = idx.iter().position(|&c| c > coord).unwrap_or(idx.len());
        idx.insert(pos, coord);
        Some(self.with_multi_index(&idx))
    }

    /// The same jet of fibre `k` (base coordinates unchanged).
    pub fn with_fibre(self, k: u8) -> Var {
        debug_assert!(!self.is_base());
        Var((self.0 & ((0xff << ORDER_SHIFT) | COORD_MASK)) | ((k as u64) << KIND_SHIFT))
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if let Some(i) = self.base_index() {
            return write!(f, "x{i}");
        }
        match self.fibre_index() {
            Some(0) => f.write_str("rho")?,
            Some(k) => write!(f, "a{k}")?,
            None => unreachable!(),
        }
        if self.order() > 0 {
            f.write_char('_')?;
            for c in self.multi_index() {
                f.write_char(COORD_LETTERS[c as usize] as char)?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Var {
    type Err = ParseError;

    fn from_str(s: &str) -> core::result::Result<Var, ParseError> {
        let bad = || ParseError::new(format!("bad variable `{s}`"));
        if let Some(rest) = s.strip_prefix('x') {
            let i: u8 = rest.parse().map_err(|_| bad())?;
            if i as usize >= COORD_LETTERS.len() {
                return Err(bad());
            }
            return Ok(Var::base(i));
        }
        let (head, jet) = match s.split_once('_') {
            Some((h, j)) => (h, Some(j)),
            None => (s, None),
        };
        let k: u8 = if head == "rho" {
            0
        } else {
            let n: u8 = head.strip_prefix('a').ok_or_else(bad)?.parse().map_err(|_| bad())?;
            if n == 0 || n as u64 >= BASE_KIND {
                return Err(bad());
            }
            n
        };
        let mut idx: SmallVec<[u8; MAX_JET_ORDER]> = SmallVec::new();
        if let Some(j) = jet {
            if j.is_empty() || j.len() > MAX_JET_ORDER {
                return Err(bad());
            }
            for ch in j.bytes() {
                idx.push(COORD_LETTERS.iter().position(|&l| l == ch).ok_or_else(bad)? as u8);
            }
        }
        Ok(Var::jet(k, &idx))
    }
}

/// A product of ring generators, stored as a sorted multiset.
///
/// `Ord` is graded lexicographic: higher total degree is greater; between
/// equal degrees the monomial with more copies of the smallest differing
/// variable is greater. Greater monomials lead.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Monomial(SmallVec<[Var; 12]>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(SmallVec::new())
    }

    pub fn from_vars(vars: impl IntoIterator<Item = Var>) -> Self {
        let mut v: SmallVec<[Var; 12]> = vars.into_iter().collect();
        v.sort_unstable();
        Monomial(v)
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    /// Generators with multiplicity, ascending.
    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    /// `(generator, exponent)` pairs, ascending by generator.
    pub fn factors(&self) -> impl Iterator<Item = (Var, usize)> + '_ {
        let v = &self.0;
        let mut i = 0;
        core::iter::from_fn(move || {
            if i >= v.len() {
                return None;
            }
            let mut j = i + 1;
            while j < v.len() && v[j] == v[i] {
                j += 1;
            }
            let out = (v[i], j - i);
            i = j;
            Some(out)
        })
    }

    pub fn mul(&self, other: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &other.0);
        let mut out: SmallVec<[Var; 12]> = SmallVec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            if a[i] <= b[j] {
                out.push(a[i]);
                i += 1;
            } else {
                out.push(b[j]);
                j += 1;
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    /// `self / other` when `other` divides `self`.
    pub fn divide(&self, other: &Monomial) -> Option<Monomial> {
        let (a, b) = (&self.0, &other.0);
        let mut out: SmallVec<[Var; 12]> = SmallVec::new();
        let mut j = 0;
        for &v in a.iter() {
            if j < b.len() && b[j] == v {
                j += 1;
            } else if j < b.len() && b[j] < v {
                return None;
            } else {
                out.push(v);
            }
        }
        (j == b.len()).then_some(Monomial(out))
    }

    fn map_fibres(&self, perm: &[u8]) -> Monomial {
        Monomial::from_vars(self.0.iter().map(|&v| match v.fibre_index() {
            Some(k) => v.with_fibre(perm.get(k as usize).copied().unwrap_or(k)),
            None => v,
        }))
    }
}

impl Ord for Monomial {
    fn cmp(&self, other: &Self) -> Ordering {
        self.0.len().cmp(&other.0.len()).then_with(|| {
            for (a, b) in self.0.iter().zip(other.0.iter()) {
                if a != b {
                    return b.cmp(a);
                }
            }
            Ordering::Equal
        })
    }
}

impl PartialOrd for Monomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            return f.write_str("1");
        }
        for (n, (v, e)) in self.factors().enumerate() {
            if n > 0 {
                f.write_str(" * ")?;
            }
            write!(f, "{v}")?;
            if e > 1 {
                write!(f, "^{e}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Monomial {
    type Err = ParseError;

    /// Inverse of `Display`: factors joined by `*`, powers as `^n`.
    fn from_str(s: &str) -> core::result::Result<Monomial, ParseError> {
        let s = s.trim();
        if s == "1" {
            return Ok(Monomial::one());
        }
        let mut vars = SmallVec::<[Var; 12]>::new();
        for factor in s.split('*').map(str::trim) {
            let (name, exp) = match factor.split_once('^') {
                Some((n, e)) => (n, e.parse::<usize>().map_err(|_| ParseError::new(format!("bad exponent in `{factor}`")))?),
                None => (factor, 1),
            };
            let v: Var = name.parse()?;
            vars.extend(core::iter::repeat(v).take(exp));
        }
        Ok(Monomial::from_vars(vars))
    }
}

pub(crate) type FastMap<K, V> = HashMap<K, V, BuildHasherDefault<FxLikeHasher>>;

/// Small multiplicative hasher for monomial keys; deterministic across runs.
#[derive(Default, Clone, Copy)]
pub struct FxLikeHasher(u64);

impl core::hash::Hasher for FxLikeHasher {
    fn finish(&self) -> u64 {
        self.0
    }

    fn write(&mut self, bytes: &[u8]) {
        for chunk in bytes.chunks(8) {
            let mut buf = [0u8; 8];
            buf[..chunk.len()].copy_from_slice(chunk);
            self.write_u64(u64::from_le_bytes(buf));
        }
    }

    fn write_u64(&mut self, x: u64) {
        self.0 = (self.0.rotate_left(5) ^ x).wrapping_mul(0x51_7c_c1_b7_27_22_0a_95);
    }

    fn write_usize(&mut self, x: usize) {
        self.write_u64(x as u64);
    }
}

/// An element of the differential polynomial ring.
///
/// Terms are kept in strictly decreasing monomial order (leading term
/// first) with no zero coefficients; the empty list is zero.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct DiffPoly {
    terms: Vec<(Monomial, Rational)>,
}

impl DiffPoly {
    pub fn zero() -> Self {
        DiffPoly { terms: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::from_vars([v]), Rational::one())
    }

    pub fn term(m: Monomial, c: Rational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        DiffPoly { terms: alloc::vec![(m, c)] }
    }

    /// Builds a polynomial from unordered terms; like monomials are merged.
    pub fn from_terms(terms: impl IntoIterator<Item = (Monomial, Rational)>) -> Self {
        let mut acc: FastMap<Monomial, Rational> = FastMap::default();
        for (m, c) in terms {
            *acc.entry(m).or_default() += c;
        }
        Self::from_map(acc)
    }

    fn from_map(acc: FastMap<Monomial, Rational>) -> Self {
        let mut terms: Vec<_> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
        terms.sort_unstable_by(|a, b| b.0.cmp(&a.0));
        DiffPoly { terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[(Monomial, Rational)] {
        &self.terms
    }

    pub fn into_terms(self) -> Vec<(Monomial, Rational)> {
        self.terms
    }

    /// Distinct monomials, leading first.
    pub fn monomials(&self) -> Vec<Monomial> {
        self.terms.iter().map(|(m, _)| m.clone()).collect()
    }

    /// Coefficients parallel to [`DiffPoly::monomials`].
    pub fn coefficients(&self) -> Vec<Rational> {
        self.terms.iter().map(|(_, c)| c.clone()).collect()
    }

    pub fn coefficient(&self, m: &Monomial) -> Rational {
        match self.terms.binary_search_by(|(t, _)| m.cmp(t)) {
            Ok(k) => self.terms[k].1.clone(),
            Err(_) => Rational::zero(),
        }
    }

    pub fn leading(&self) -> Option<&(Monomial, Rational)> {
        self.terms.first()
    }

    pub fn scale(&self, c: &Rational) -> DiffPoly {
        if c.is_zero() {
            return Self::zero();
        }
        DiffPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), x * c)).collect() }
    }

    pub fn neg(&self) -> DiffPoly {
        DiffPoly { terms: self.terms.iter().map(|(m, x)| (m.clone(), -x)).collect() }
    }

    /// `self + c · other`, merging the two sorted term lists.
    pub fn add_scaled(&self, c: &Rational, other: &DiffPoly) -> DiffPoly {
        if c.is_zero() || other.is_zero() {
            return self.clone();
        }
        let mut out = Vec::with_capacity(self.terms.len() + other.terms.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                Ordering::Greater => {
                    out.push(a[i].clone());
                    i += 1;
                }
                Ordering::Less => {
                    out.push((b[j].0.clone(), c * &b[j].1));
                    j += 1;
                }
                Ordering::Equal => {
                    let s = &a[i].1 + &(c * &b[j].1);
                    if !s.is_zero() {
                        out.push((a[i].0.clone(), s));
                    }
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend(b[j..].iter().map(|(m, x)| (m.clone(), c * x)));
        DiffPoly { terms: out }
    }

    pub fn add(&self, other: &DiffPoly) -> DiffPoly {
        self.add_scaled(&Rational::one(), other)
    }

    pub fn sub(&self, other: &DiffPoly) -> DiffPoly {
        self.add_scaled(&-Rational::one(), other)
    }

    pub fn mul(&self, other: &DiffPoly) -> DiffPoly {
        if self.is_zero() || other.is_zero() {
            return Self::zero();
        }
        if self.terms.len() == 1 && self.terms[0].0.is_one() {
            return other.scale(&self.terms[0].1);
        }
        if other.terms.len() == 1 && other.terms[0].0.is_one() {
            return self.scale(&other.terms[0].1);
        }
        let mut acc: FastMap<Monomial, Rational> = FastMap::default();
        acc.reserve(self.terms.len() * other.terms.len());
        for (m1, c1) in &self.terms {
            for (m2, c2) in &other.terms {
                *acc.entry(m1.mul(m2)).or_default() += c1 * c2;
            }
        }
        Self::from_map(acc)
    }

    pub fn pow(&self, n: u32) -> DiffPoly {
        (0..n).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Total derivative by the base coordinate `coord` (no order caps; see
    /// [`RingSpec::derivative`] for the checked variant).
    pub fn derivative(&self, coord: usize) -> DiffPoly {
        let c = coord as u8;
        let mut acc: FastMap<Monomial, Rational> = FastMap::default();
        for (m, x) in &self.terms {
            for (v, e) in m.factors() {
                let pos = m.0.iter().position(|&w| w == v).expect("factor present");
                let mut rest = m.0.clone();
                rest.remove(pos);
                let coeff = x * &Rational::from_i64(e as i64);
                match v.base_index() {
                    Some(i) if i == c => {
                        *acc.entry(Monomial(rest)).or_default() += coeff;
                    }
                    Some(_) => {}
                    None => {
                        let dv = v.differentiated(c).expect("jet order limit exceeded");
                        let mut vars = rest;
                        let p = vars.iter().position(|&w| w > dv).unwrap_or(vars.len());
                        vars.insert(p, dv);
                        *acc.entry(Monomial(vars)).or_default() += coeff;
                    }
                }
            }
        }
        Self::from_map(acc)
    }

    /// Repeated derivative by every coordinate in `coords`.
    pub fn derivative_multi(&self, coords: &[usize]) -> DiffPoly {
        coords.iter().fold(self.clone(), |p, &c| p.derivative(c))
    }

    /// Exact multivariate division treating all generators as independent.
    pub fn exact_divide(&self, q: &DiffPoly) -> Result<DiffPoly> {
        let Some((lq, lc)) = q.leading().cloned() else {
            return Err(Error::NotDivisible(String::from("division by zero polynomial")));
        };
        let inv = lc.recip().expect("nonzero leading coefficient");
        let mut rem: BTreeMap<core::cmp::Reverse<Monomial>, Rational> =
            self.terms.iter().map(|(m, c)| (core::cmp::Reverse(m.clone()), c.clone())).collect();
        let mut quotient = Vec::new();
        while let Some((core::cmp::Reverse(m), c)) = rem.pop_first() {
            let Some(t) = m.divide(&lq) else {
                return Err(Error::NotDivisible(format!("leading monomial {m} not divisible by {lq}")));
            };
            let tc = &c * &inv;
            for (qm, qc) in q.terms.iter().skip(1) {
                let key = core::cmp::Reverse(t.mul(qm));
                let e = rem.entry(key).or_default();
                *e -= &tc * qc;
                if e.is_zero() {
                    let key = core::cmp::Reverse(t.mul(qm));
                    rem.remove(&key);
                }
            }
            quotient.push((t, tc));
        }
        Ok(DiffPoly { terms: quotient })
    }

    /// Relabels fibre variables: fibre `k` becomes `perm[k]`.
    pub fn permute_fibres(&self, perm: &[u8]) -> DiffPoly {
        Self::from_terms(self.terms.iter().map(|(m, c)| (m.map_fibres(perm), c.clone())))
    }

    /// Highest fibre index occurring, if any fibre variable occurs.
    pub fn max_fibre(&self) -> Option<u8> {
        self.terms.iter().flat_map(|(m, _)| m.vars().iter().filter_map(|v| v.fibre_index())).max()
    }
}

/// Hash-based sum of many polynomials and products, sorted once at the end.
#[derive(Default, Clone)]
pub struct PolyAccumulator {
    map: FastMap<Monomial, Rational>,
}

impl PolyAccumulator {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn add_term(&mut self, m: Monomial, c: &Rational) {
        *self.map.entry(m).or_default() += c;
    }

    /// `+= c · p`.
    pub fn add_scaled(&mut self, c: &Rational, p: &DiffPoly) {
        if c.is_zero() {
            return;
        }
        for (m, x) in &p.terms {
            match self.map.get_mut(m) {
                Some(e) => *e += &(c * x),
                None => {
                    self.map.insert(m.clone(), c * x);
                }
            }
        }
    }

    /// `+= c · p · q`.
    pub fn add_product(&mut self, c: &Rational, p: &DiffPoly, q: &DiffPoly) {
        if c.is_zero() {
            return;
        }
        for (m1, c1) in &p.terms {
            let c1 = c * c1;
            for (m2, c2) in &q.terms {
                *self.map.entry(m1.mul(m2)).or_default() += &c1 * c2;
            }
        }
    }

    pub fn finish(self) -> DiffPoly {
        DiffPoly::from_map(self.map)
    }
}

impl fmt::Display for DiffPoly {
    /// Terms `coeff * monomial` joined by ` + `; a unit monomial prints its coefficient alone.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (n, (m, c)) in self.terms.iter().enumerate() {
            if n > 0 {
                f.write_str(" + ")?;
            }
            if m.is_one() {
                write!(f, "{c}")?;
            } else {
                write!(f, "{c} * {m}")?;
            }
        }
        Ok(())
    }
}

impl fmt::Debug for DiffPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for DiffPoly {
    type Err = ParseError;

    fn from_str(s: &str) -> core::result::Result<DiffPoly, ParseError> {
        let s = s.trim();
        if s == "0" {
            return Ok(Self::zero());
        }
        let mut terms = Vec::new();
        for t in s.split(" + ") {
            terms.push(parse_term(t)?);
        }
        Ok(Self::from_terms(terms))
    }
}

/// Parses `coeff`, `coeff * monomial` or a bare monomial.
pub(crate) fn parse_term(t: &str) -> core::result::Result<(Monomial, Rational), ParseError> {
    let t = t.trim();
    match t.split_once('*') {
        Some((head, rest)) => match head.trim().parse::<Rational>() {
            Ok(c) => Ok((rest.parse()?, c)),
            Err(_) => Ok((t.parse()?, Rational::one())),
        },
        None => match t.parse::<Rational>() {
            Ok(c) => Ok((Monomial::one(), c)),
            Err(_) => Ok((t.parse()?, Rational::one())),
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::string::ToString;
    use alloc::vec;

    fn rho() -> DiffPoly {
        DiffPoly::var(Var::fibre(0))
    }

    fn j(k: u8, idx: &[u8]) -> DiffPoly {
        DiffPoly::var(Var::jet(k, idx))
    }

    fn q(n: i64) -> Rational {
        Rational::from_i64(n)
    }

    #[test]
    fn names() {
        assert_eq!(Var::jet(0, &[1, 0]).to_string(), "rho_xy");
        assert_eq!(Var::jet(1, &[2, 2]).to_string(), "a1_zz");
        assert_eq!(Var::base(3).to_string(), "x3");
        for s in ["rho", "rho_xyz", "a2_ww", "x0"] {
            assert_eq!(s.parse::<Var>().unwrap().to_string(), s);
        }
        assert!("b1".parse::<Var>().is_err());
        assert!("a0".parse::<Var>().is_err());
    }

    #[test]
    fn var_order() {
        assert!(Var::fibre(0) < Var::jet(0, &[0]));
        assert!(Var::jet(0, &[2]) < Var::jet(0, &[0, 0]));
        assert!(Var::jet(0, &[0, 1]) < Var::jet(0, &[0, 2]));
        assert!(Var::jet(0, &[5, 5]) < Var::fibre(1));
        assert!(Var::jet(3, &[0; 12]) < Var::base(0));
    }

    #[test]
    fn arithmetic_examples() {
        let rx = j(0, &[0]);
        let az = j(1, &[2]);
        assert_eq!(rx.mul(&DiffPoly::one()), rx);
        let sq = rx.mul(&rx);
        assert_eq!(sq.terms().len(), 1);
        assert_eq!(sq.terms()[0].0.factors().collect::<Vec<_>>(), vec![(Var::jet(0, &[0]), 2)]);
        assert_eq!(rx.add(&az).mul(&rx.sub(&az)), sq.sub(&az.mul(&az)));
    }

    #[test]
    fn derivative_examples() {
        assert_eq!(rho().derivative(0), j(0, &[0]));
        assert!(DiffPoly::constant(q(5)).derivative(1).is_zero());
        let p = j(0, &[0]).mul(&j(1, &[1]));
        let expected = j(0, &[0, 1]).mul(&j(1, &[1])).add(&j(0, &[0]).mul(&j(1, &[1, 1])));
        assert_eq!(p.derivative(1), expected);
        let x = DiffPoly::var(Var::base(2));
        assert_eq!(x.derivative(2), DiffPoly::one());
        assert!(x.derivative(1).is_zero());
        assert_eq!(x.mul(&x).derivative(2), x.scale(&q(2)));
    }

    #[test]
    fn monomials_and_coefficients() {
        let p = j(0, &[0]).mul(&j(1, &[2])).scale(&q(2)).add(&j(1, &[2]).scale(&q(4)));
        assert_eq!(p.monomials(), vec![Monomial::from_vars([Var::jet(0, &[0]), Var::jet(1, &[2])]), Monomial::from_vars([Var::jet(1, &[2])])]);
        assert_eq!(p.coefficients(), vec![q(2), q(4)]);
        assert!(DiffPoly::zero().monomials().is_empty());
        assert_eq!(DiffPoly::one().monomials(), vec![Monomial::one()]);
    }

    #[test]
    fn exact_divide_examples() {
        let rx = j(0, &[0]);
        let az = j(1, &[2]);
        let p = rx.mul(&rx).mul(&az).add(&rx.mul(&az).mul(&az));
        assert_eq!(p.exact_divide(&p).unwrap(), DiffPoly::one());
        assert_eq!(p.exact_divide(&rx.mul(&az)).unwrap(), rx.add(&az));
        assert!(matches!(rx.exact_divide(&az), Err(Error::NotDivisible(_))));
        assert!(rx.exact_divide(&DiffPoly::zero()).is_err());
        assert!(rx.add(&DiffPoly::one()).exact_divide(&rx).is_err());
    }

    #[test]
    fn caps() {
        let s = RingSpec::with_default_caps(3).unwrap();
        let r = s.derivative(&j(0, &[0, 1]), 2).unwrap();
        assert!(s.derivative(&r, 2).is_err());
        assert!(s.derivative(&j(1, &[0, 1, 2]), 2).is_ok());
        assert!(RingSpec::with_caps(4, vec![1, 2]).is_err());
    }

    #[test]
    fn text_round_trip() {
        let p = j(0, &[0, 1]).mul(&j(1, &[1])).scale(&Rational::new(-3, 2))
            .add(&j(1, &[2]).pow(2))
            .add(&DiffPoly::constant(q(7)))
            .add(&DiffPoly::var(Var::base(1)));
        let s = p.to_string();
        assert_eq!(s.parse::<DiffPoly>().unwrap(), p);
        assert_eq!(DiffPoly::zero().to_string(), "0");
        assert_eq!("0".parse::<DiffPoly>().unwrap(), DiffPoly::zero());
    }

    #[test]
    fn permute_fibres_swaps() {
        let p = j(1, &[0]).mul(&j(2, &[1]));
        let s = p.permute_fibres(&[0, 2, 1]);
        assert_eq!(s, j(2, &[0]).mul(&j(1, &[1])));
        assert_eq!(s.permute_fibres(&[0, 2, 1]), p);
    }
}
