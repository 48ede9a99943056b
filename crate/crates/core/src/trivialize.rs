//! The trivialization steps: independent formulas, Casimir skew-symmetrization,
//! the flows `ȧ` and `Q`, the extraction of `ρ̇`, the `(ȧ, ρ̇)` linear system,
//! and the verification of `[[P, X]] = ±Q`.

use alloc::format;
use alloc::vec::Vec;

use crate::diffpoly::{DiffPoly, RingSpec};
use crate::error::{Error, Result};
use crate::evaluation::{evaluate_micro_graph, evaluation_matrix, graph_operation, MonomialBasis};
use crate::formality::{encoding_to_graph, permute_casimirs, vertex_roles, GraphEncoding};
use crate::graph_complex::{filter_out_degree, orient, DirectedGraph, GraphVector, UndirectedGraph};
use crate::linalg::{pivots, stack, ColumnEchelon, SparseMatQ, SparseVecQ};
use crate::perm::{factorial, levi_civita_sign, permutations};
use crate::rational::Rational;
use crate::superfunction::{casimirs, nambu_with, nambu_with_component, p_without_rho, OddSet, Superfunction};

/// Scalar in `ȧ_i = c · Or(γ)(P, …, P, a_i)`. With the edge convention of
/// [`graph_operation`] this is the unique value for which `a_i + t ȧ_i`
/// stays a Casimir of `P + t Q` to first order.
pub const CASIMIR_FLOW_FACTOR: i64 = 1;

/// `φ(Γ(e))` in the standard vertex layout.
pub fn evaluate_encoding(e: &GraphEncoding) -> Result<Superfunction> {
    let d = e.dim();
    evaluate_micro_graph(&encoding_to_graph(e), &vertex_roles(d, e.levi_civita_count()), d)
}

/// Pivot columns of the 1-vector evaluation matrix of `formulas`.
pub fn independent_subset(formulas: &[Superfunction], dim: usize) -> Result<Vec<usize>> {
    let basis = MonomialBasis::for_vectors(formulas, dim)?;
    Ok(pivots(&evaluation_matrix(formulas, &basis)?))
}

/// `items[k]` for every `k` in `indices`, order preserved.
pub fn select<T: Clone>(items: &[T], indices: &[usize]) -> Vec<T> {
    indices.iter().map(|&k| items[k].clone()).collect()
}

/// `(1/(d−2)!) Σ_{σ ∈ S_{d−2}} sgn σ · φ(Γ(σ·e))`, antisymmetric under every
/// transposition of Casimir kinds. For `d = 4` this is the pair
/// `½(φ(Γ(a¹,a²)) − φ(Γ(a²,a¹)))`.
pub fn skew_formula(e: &GraphEncoding) -> Result<Superfunction> {
    let d = e.dim();
    if d < 4 {
        return Err(Error::Unsupported(format!("skew-symmetrization needs two Casimirs, dimension {d}")));
    }
    let mut parts = Vec::new();
    for perm in permutations(d - 2) {
        let sigma: Vec<usize> = perm.iter().map(|&k| k + 1).collect();
        let sign = Rational::from_i64(levi_civita_sign(&perm) as i64);
        parts.push((sign, evaluate_encoding(&permute_casimirs(e, &sigma)?)?));
    }
    let scale = Rational::new(1, factorial(d - 2) as i64);
    let sum = Superfunction::linear_combination(d, parts.iter().map(|(c, f)| (c, f)))?;
    Ok(sum.scale(&scale))
}

/// The fibre substitution `a^i ⇄ a^j` as a permutation of fibre labels.
pub fn casimir_swap(dim: usize, i: usize, j: usize) -> Vec<u8> {
    let mut perm: Vec<u8> = (0..dim as u8 - 1).collect();
    perm.swap(i, j);
    perm
}

/// `Or(γ)` restricted to graphs with out-degree at most 2 everywhere.
pub fn oriented_operation(cocycle: &GraphVector<UndirectedGraph>) -> GraphVector<DirectedGraph> {
    filter_out_degree(&orient(cocycle), 2)
}

fn arity(op: &GraphVector<DirectedGraph>) -> Result<usize> {
    use crate::graph_complex::Graph;
    let mut n = op.terms().map(|(g, _)| g.vertex_count());
    let first = n.next().ok_or_else(|| Error::Unsupported("empty graph operation".into()))?;
    if n.any(|k| k != first) {
        return Err(Error::Unsupported("graph operation of mixed arity".into()));
    }
    Ok(first)
}

/// `ȧ = c · Or(γ)(P, …, P, a)`.
pub fn casimir_flow(a: &Superfunction, p: &Superfunction, op: &GraphVector<DirectedGraph>) -> Result<Superfunction> {
    if !a.is_zero() && a.degree() != Some(0) {
        return Err(Error::Degree { expected: 0, found: a.degree() });
    }
    let n = arity(op)?;
    let mut args: Vec<Superfunction> = (1..n).map(|_| p.clone()).collect();
    args.push(a.clone());
    Ok(graph_operation(op, &args, None)?.scale(&Rational::from_i64(CASIMIR_FLOW_FACTOR)))
}

/// `Q = Or(γ)(P, …, P)`, optionally only the listed components.
pub fn q_flow(p: &Superfunction, op: &GraphVector<DirectedGraph>, keep: Option<&[OddSet]>) -> Result<Superfunction> {
    let n = arity(op)?;
    let args: Vec<Superfunction> = (0..n).map(|_| p.clone()).collect();
    graph_operation(op, &args, keep)
}

/// `P(ρ, a¹, …, ȧ_i, …, a^{d−2})` for each `i`.
pub fn nambu_variations(spec: &RingSpec, adot: &[Superfunction]) -> Result<Vec<Superfunction>> {
    let a = casimirs(spec);
    if adot.len() != a.len() {
        return Err(Error::DimensionMismatch(format!("{} Casimir flows for {} Casimirs", adot.len(), a.len())));
    }
    (0..a.len())
        .map(|i| {
            let mut args = a.clone();
            args[i] = adot[i].clone();
            nambu_with(spec, &spec.rho(), &args)
        })
        .collect()
}

/// The odd pair whose coefficients are divided to get `ρ̇`: `ξ₀ξ₁` unless
/// that coefficient of `P_withoutrho` vanishes, then the first nonzero one.
pub fn division_pair(p_without_rho: &Superfunction) -> Result<OddSet> {
    let first = OddSet::from_indices(&[0, 1])?;
    if p_without_rho.component_ref(first).is_some() {
        return Ok(first);
    }
    p_without_rho
        .components()
        .find(|(s, _)| s.len() == 2)
        .map(|(s, _)| s)
        .ok_or_else(|| Error::NotDivisible("P without ρ vanishes".into()))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RhoDot {
    pub rhodot: DiffPoly,
    pub pair: OddSet,
    /// `Some(true)` when `Q == ρ̇·P_withoutrho + Σ P_i` was checked on all
    /// components, `None` when only the division pair of `Q` was available.
    pub reconstructed: Option<bool>,
}

/// Extracts `ρ̇` from `Q − Σ_i P_i = ρ̇ · P_withoutrho`. With `q_complete`
/// the full identity is checked and a mismatch is an error.
pub fn rho_dot(q: &Superfunction, adot: &[Superfunction], spec: &RingSpec, q_complete: bool) -> Result<RhoDot> {
    let pw = p_without_rho(spec);
    let pair = division_pair(&pw)?;
    if !q_complete {
        let a = casimirs(spec);
        if adot.len() != a.len() {
            return Err(Error::DimensionMismatch(format!("{} Casimir flows for {} Casimirs", adot.len(), a.len())));
        }
        let mut remainder = q.component(pair);
        for i in 0..a.len() {
            let mut args = a.clone();
            args[i] = adot[i].clone();
            remainder = remainder.sub(&nambu_with_component(spec, &spec.rho(), &args, pair)?);
        }
        let rhodot = remainder.exact_divide(&pw.component(pair))?;
        return Ok(RhoDot { rhodot, pair, reconstructed: None });
    }
    let variations = nambu_variations(spec, adot)?;
    let mut remainder = q.clone();
    for v in &variations {
        remainder = remainder.sub(v)?;
    }
    let rhodot = remainder.component(pair).exact_divide(&pw.component(pair))?;
    let reconstructed = {
        let rebuilt = variations.iter().try_fold(pw.mul_poly(&rhodot), |acc, v| acc.add(v))?;
        if &rebuilt != q {
            return Err(Error::Reconstruction(format!(
                "Q differs from ρ̇·P_withoutrho + ΣP_i in {} terms",
                rebuilt.sub(q)?.term_count()
            )));
        }
        Some(true)
    };
    Ok(RhoDot { rhodot, pair, reconstructed })
}

/// [`rho_dot`] with `Q` supplied one odd pair at a time by `q_part`. Only
/// the division pair is requested unless `check_all`, in which case every
/// pair of `Q == ρ̇·P_withoutrho + Σ P_i` is checked and a mismatch is an error.
pub fn rho_dot_by_parts(
    spec: &RingSpec,
    adot: &[Superfunction],
    mut q_part: impl FnMut(OddSet) -> Result<DiffPoly>,
    check_all: bool,
) -> Result<RhoDot> {
    let a = casimirs(spec);
    if adot.len() != a.len() {
        return Err(Error::DimensionMismatch(format!("{} Casimir flows for {} Casimirs", adot.len(), a.len())));
    }
    let pw = p_without_rho(spec);
    let pair = division_pair(&pw)?;
    let variation = |s: OddSet| -> Result<DiffPoly> {
        let mut total = DiffPoly::zero();
        for i in 0..a.len() {
            let mut args = a.clone();
            args[i] = adot[i].clone();
            total = total.add(&nambu_with_component(spec, &spec.rho(), &args, s)?);
        }
        Ok(total)
    };
    let rhodot = q_part(pair)?.sub(&variation(pair)?).exact_divide(&pw.component(pair))?;
    if !check_all {
        return Ok(RhoDot { rhodot, pair, reconstructed: None });
    }
    for s in odd_pairs(spec.dim()).into_iter().filter(|&s| s != pair) {
        let rebuilt = pw.component(s).mul(&rhodot).add(&variation(s)?);
        let q = q_part(s)?;
        if rebuilt != q {
            return Err(Error::Reconstruction(format!(
                "Q differs from ρ̇·P_withoutrho + ΣP_i near {s} in {} terms",
                rebuilt.sub(&q).len()
            )));
        }
    }
    Ok(RhoDot { rhodot, pair, reconstructed: Some(true) })
}

/// The stacked `(ȧ, ρ̇)` system: one block per Casimir with the scalars
/// `[[X_j, a_i]]`, then the top component of `[[X_j, ρε]]`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrivializationSystem {
    pub matrix: SparseMatQ,
    pub rhs: SparseVecQ,
    pub bases: Vec<MonomialBasis>,
}

impl TrivializationSystem {
    pub fn block_rows(&self) -> Vec<usize> {
        self.bases.iter().map(MonomialBasis::count).collect()
    }
}

/// Since `[[X, f]] = −[[f, X]]` for a vector field `X`, the right-hand
/// side is `(−ȧ_1, …, −ȧ_{d−2}, −ρ̇)`.
pub fn build_system(
    x_formulas: &[Superfunction],
    adot: &[Superfunction],
    rhodot: &DiffPoly,
    spec: &RingSpec,
) -> Result<TrivializationSystem> {
    let d = spec.dim();
    let a = casimirs(spec);
    if adot.len() != a.len() {
        return Err(Error::DimensionMismatch(format!("{} Casimir flows for {} Casimirs", adot.len(), a.len())));
    }
    let mut blocks = Vec::new();
    let mut rhs_parts = Vec::new();
    let mut bases = Vec::new();
    for (ai, adi) in a.iter().zip(adot) {
        let xa: Vec<Superfunction> = x_formulas.iter().map(|x| x.schouten(ai)).collect::<Result<_>>()?;
        let seed = adi.component(OddSet::EMPTY);
        if adi.components().any(|(s, _)| !s.is_empty()) {
            return Err(Error::Degree { expected: 0, found: adi.degree() });
        }
        let basis = MonomialBasis::single(OddSet::EMPTY, &[&seed], &xa)?;
        blocks.push(evaluation_matrix(&xa, &basis)?);
        rhs_parts.push(basis.poly_vector(0, &seed.neg())?);
        bases.push(basis);
    }
    let top = OddSet::full(d);
    let rho_eps = Superfunction::monomial(d, top, spec.rho());
    let xr: Vec<Superfunction> = x_formulas.iter().map(|x| x.schouten(&rho_eps)).collect::<Result<_>>()?;
    let basis = MonomialBasis::single(top, &[rhodot], &xr)?;
    blocks.push(evaluation_matrix(&xr, &basis)?);
    rhs_parts.push(basis.poly_vector(0, &rhodot.neg())?);
    bases.push(basis);

    let matrix = if x_formulas.is_empty() {
        SparseMatQ::zeros(bases.iter().map(MonomialBasis::count).sum(), 0)
    } else {
        stack(&blocks.iter().collect::<Vec<_>>())?
    };
    let rhs = rhs_parts.iter().skip(1).fold(rhs_parts[0].clone(), |acc, v| acc.concat(v));
    Ok(TrivializationSystem { matrix, rhs, bases })
}

/// A particular solution and the kernel of the system matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemSolution {
    pub coefficients: Option<SparseVecQ>,
    pub kernel: Vec<SparseVecQ>,
}

pub fn solve_system(sys: &TrivializationSystem) -> Result<SystemSolution> {
    let ech = ColumnEchelon::new(&sys.matrix);
    Ok(SystemSolution { coefficients: ech.solve(&sys.rhs)?, kernel: ech.kernel_basis().to_vec() })
}

/// `Σ c_j f_j`.
pub fn combine(coefficients: &SparseVecQ, formulas: &[Superfunction], dim: usize) -> Result<Superfunction> {
    if coefficients.len() != formulas.len() {
        return Err(Error::DimensionMismatch(format!("{} coefficients for {} formulas", coefficients.len(), formulas.len())));
    }
    Superfunction::linear_combination(dim, coefficients.iter().map(|(j, c)| (c, &formulas[j])))
}

/// `Some(±1)` when `[[P, X]] == ±Q`, `None` otherwise.
pub fn coboundary_sign(p: &Superfunction, x: &Superfunction, q: &Superfunction) -> Result<Option<i8>> {
    let px = p.schouten(x)?;
    if &px == q {
        Ok(Some(1))
    } else if px == q.neg() {
        Ok(Some(-1))
    } else {
        Ok(None)
    }
}

/// The odd pairs `{i, j}`, `i < j < dim`.
pub fn odd_pairs(dim: usize) -> Vec<OddSet> {
    (0..dim).flat_map(|i| (i + 1..dim).map(move |j| OddSet::from_indices(&[i, j]).expect("distinct"))).collect()
}

/// [`coboundary_sign`] for a bi-vector `Q` checked one odd pair at a time,
/// so neither side is ever held in full; `q_part(S)` returns `Q_S`.
pub fn coboundary_sign_by_parts(
    p: &Superfunction,
    x: &Superfunction,
    mut q_part: impl FnMut(OddSet) -> Result<DiffPoly>,
) -> Result<Option<i8>> {
    if !x.is_zero() && x.degree() != Some(1) {
        return Err(Error::Degree { expected: 1, found: x.degree() });
    }
    let mut sign = None;
    for s in odd_pairs(p.dim()) {
        let px = p.schouten_restricted(x, &[s])?.component(s);
        let q = q_part(s)?;
        let here = if px == q && q.is_zero() {
            continue;
        } else if px == q {
            1
        } else if px == q.neg() {
            -1
        } else {
            return Ok(None);
        };
        if sign.is_some_and(|k| k != here) {
            return Ok(None);
        }
        sign = Some(here);
    }
    Ok(Some(sign.unwrap_or(1)))
}

/// A kernel direction `ΔX = Σ k_j f_j` and whether `[[P, ΔX]] = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Shift {
    pub coefficients: SparseVecQ,
    pub field: Superfunction,
    pub poisson_closed: bool,
}

pub fn homogeneous_shifts(p: &Superfunction, kernel: &[SparseVecQ], formulas: &[Superfunction]) -> Result<Vec<Shift>> {
    kernel
        .iter()
        .map(|k| {
            let field = combine(k, formulas, p.dim())?;
            let mut poisson_closed = true;
            for s in odd_pairs(p.dim()) {
                if !p.schouten_restricted(&field, &[s])?.is_zero() {
                    poisson_closed = false;
                    break;
                }
            }
            Ok(Shift { coefficients: k.clone(), field, poisson_closed })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::formality::sunflower_2d;
    use crate::graph_complex::tetrahedron;
    use crate::superfunction::nambu_p;

    #[test]
    fn independent_subset_example() {
        let x = Superfunction::xi(3, 0);
        let y = Superfunction::xi(3, 1);
        let fs = [x.clone(), x.scale(&Rational::from_i64(2)), y.clone(), x.add(&y).unwrap(), Superfunction::xi(3, 2), y];
        assert_eq!(independent_subset(&fs, 3).unwrap(), [0, 2, 4]);
        assert_eq!(select(&["a", "b", "c", "d", "e", "f"], &[0, 2, 4]), ["a", "c", "e"]);
        assert!(independent_subset(&[Superfunction::zero(3)], 3).unwrap().is_empty());
    }

    #[test]
    fn skew_needs_four_dimensions() {
        let e = &sunflower_2d()[0];
        assert!(matches!(skew_formula(e), Err(Error::Unsupported(_))));
    }

    #[test]
    fn d2_flow_pieces() {
        let spec = RingSpec::new(2).unwrap();
        let p = nambu_p(&spec);
        let op = oriented_operation(&tetrahedron());
        let q = q_flow(&p, &op, None).unwrap();
        assert_eq!(q.degree(), Some(2));
        assert!(p.schouten(&q).unwrap().is_zero());
        let r = rho_dot(&q, &[], &spec, true).unwrap();
        assert_eq!(r.rhodot, q.get(&[0, 1]));
        assert_eq!(r.reconstructed, Some(true));
        let zero = rho_dot(&Superfunction::zero(2), &[], &spec, true).unwrap();
        assert!(zero.rhodot.is_zero());
    }

    #[test]
    fn sign_by_parts_matches_whole() {
        let spec = RingSpec::new(3).unwrap();
        let p = nambu_p(&spec);
        let x = Superfunction::parse(3, "1 * rho_x * a1_y * xi[0] + -2 * rho_z * xi[2]").unwrap();
        let q = p.schouten(&x).unwrap();
        for target in [q.clone(), q.neg(), q.scale(&Rational::from_i64(2))] {
            let parts = coboundary_sign_by_parts(&p, &x, |s| Ok(target.component(s))).unwrap();
            assert_eq!(parts, coboundary_sign(&p, &x, &target).unwrap());
        }
        let zero = Superfunction::zero(3);
        assert_eq!(coboundary_sign_by_parts(&p, &zero, |_| Ok(DiffPoly::zero())).unwrap(), Some(1));
        assert_eq!(odd_pairs(4).len(), 6);
    }

    #[test]
    fn rho_dot_routes_agree() {
        for d in 2..=3 {
            let spec = RingSpec::new(d).unwrap();
            let p = nambu_p(&spec);
            let op = oriented_operation(&tetrahedron());
            let q = q_flow(&p, &op, None).unwrap();
            let adot: Vec<Superfunction> = casimirs(&spec).iter().map(|a| casimir_flow(a, &p, &op).unwrap()).collect();
            let whole = rho_dot(&q, &adot, &spec, true).unwrap();
            let mut asked = 0;
            let parts = rho_dot_by_parts(&spec, &adot, |s| { asked += 1; Ok(q.component(s)) }, true).unwrap();
            assert_eq!(parts, whole);
            assert_eq!(asked, odd_pairs(d).len());
            let pair_only = rho_dot_by_parts(&spec, &adot, |s| Ok(q.component(s)), false).unwrap();
            assert_eq!(pair_only.rhodot, whole.rhodot);
            assert_eq!(pair_only.reconstructed, None);
            if d == 3 {
                let off_pair = OddSet::from_indices(&[1, 2]).unwrap();
                let bad = q.add(&Superfunction::monomial(d, off_pair, spec.rho())).unwrap();
                assert!(matches!(
                    rho_dot_by_parts(&spec, &adot, |s| Ok(bad.component(s)), true),
                    Err(Error::Reconstruction(_))
                ));
            }
        }
    }

    #[test]
    fn empty_candidate_list() {
        let spec = RingSpec::new(2).unwrap();
        let rd = DiffPoly::var(crate::diffpoly::Var::jet(0, &[0]));
        let sys = build_system(&[], &[], &rd, &spec).unwrap();
        assert_eq!(sys.matrix.cols(), 0);
        assert_eq!(sys.bases.len(), 1);
        assert!(solve_system(&sys).unwrap().coefficients.is_none());
        let sys = build_system(&[], &[], &DiffPoly::zero(), &spec).unwrap();
        assert!(solve_system(&sys).unwrap().coefficients.is_some());
    }
}
