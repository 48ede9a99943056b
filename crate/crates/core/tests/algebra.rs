use nambu_core::diffpoly::Var;
use nambu_core::superfunction::{casimirs, OddSet};
use nambu_core::*;
use proptest::prelude::*;

const D: usize = 3;

fn var() -> impl Strategy<Value = Var> {
    prop_oneof![
        4 => (0u8..2, proptest::collection::vec(0u8..D as u8, 0..=2)).prop_map(|(k, idx)| Var::jet(k, &idx)),
        1 => (0u8..D as u8).prop_map(Var::base),
    ]
}

fn poly(max_terms: usize) -> impl Strategy<Value = DiffPoly> {
    proptest::collection::vec((proptest::collection::vec(var(), 0..=2), -3i64..=3), 0..=max_terms).prop_map(|terms| {
        DiffPoly::from_terms(terms.into_iter().map(|(vs, c)| (Monomial::from_vars(vs), Rational::from_i64(c))))
    })
}

/// Homogeneous of the given degree, at most two components.
fn homogeneous(deg: usize) -> impl Strategy<Value = Superfunction> {
    let sets: Vec<OddSet> = (0u32..1 << D)
        .map(|b| OddSet::from_indices(&(0..D).filter(|i| b & (1 << i) != 0).collect::<Vec<_>>()).unwrap())
        .filter(|s| s.len() == deg)
        .collect();
    proptest::collection::vec((proptest::sample::select(sets), poly(2)), 1..=2)
        .prop_map(|parts| Superfunction::from_components(D, parts).unwrap())
}

fn any_homogeneous() -> impl Strategy<Value = (usize, Superfunction)> {
    (0..=D).prop_flat_map(|k| homogeneous(k).prop_map(move |f| (k, f)))
}

fn sign(odd: bool) -> Rational {
    if odd {
        -Rational::one()
    } else {
        Rational::one()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn schouten_graded_antisymmetry((k, f) in any_homogeneous(), (l, g) in any_homogeneous()) {
        let fg = f.schouten(&g).unwrap();
        let gf = g.schouten(&f).unwrap();
        let s = -sign(((k + 1) * (l + 1)) % 2 == 1);
        prop_assert_eq!(fg, gf.scale(&s));
    }

    #[test]
    fn schouten_graded_jacobi((k, f) in any_homogeneous(), (l, g) in any_homogeneous(), (m, h) in any_homogeneous()) {
        let term = |a: &Superfunction, b: &Superfunction, c: &Superfunction, x: usize, z: usize| {
            a.schouten(&b.schouten(c).unwrap()).unwrap().scale(&sign(((x + 1) * (z + 1)) % 2 == 1))
        };
        let total = term(&f, &g, &h, k, m)
            .add(&term(&g, &h, &f, l, k)).unwrap()
            .add(&term(&h, &f, &g, m, l)).unwrap();
        prop_assert!(total.is_zero(), "{}", total);
    }

    #[test]
    fn schouten_is_a_graded_derivation_of_the_wedge((k, f) in any_homogeneous(), (l, g) in any_homogeneous(), h in homogeneous(1)) {
        // [[F, G∧H]] = [[F,G]]∧H + (−1)^{(|F|−1)|G|} G∧[[F,H]]
        let lhs = f.schouten(&g.wedge(&h).unwrap()).unwrap();
        let rhs = f.schouten(&g).unwrap().wedge(&h).unwrap()
            .add(&g.wedge(&f.schouten(&h).unwrap()).unwrap().scale(&sign(((k + 1) * l) % 2 == 1))).unwrap();
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn restricted_bracket_is_a_projection((_, f) in any_homogeneous(), (_, g) in any_homogeneous(), k in 0usize..8) {
        let keep = [OddSet::from_indices(&(0..D).filter(|i| k & (1 << i) != 0).collect::<Vec<_>>()).unwrap()];
        prop_assert_eq!(f.schouten_restricted(&g, &keep).unwrap(), f.schouten(&g).unwrap().restrict(&keep));
    }

    #[test]
    fn superfunction_text_round_trip((_, f) in any_homogeneous()) {
        prop_assert_eq!(Superfunction::parse(D, &f.to_string()).unwrap(), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1000))]

    #[test]
    fn derivative_leibniz(p in poly(3), q in poly(3), i in 0..D) {
        let lhs = p.mul(&q).derivative(i);
        let rhs = p.derivative(i).mul(&q).add(&p.mul(&q.derivative(i)));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn derivatives_commute(p in poly(4), i in 0..D, j in 0..D) {
        prop_assert_eq!(p.derivative(i).derivative(j), p.derivative(j).derivative(i));
    }

    #[test]
    fn ring_laws(p in poly(3), q in poly(3), r in poly(2)) {
        prop_assert_eq!(p.mul(&q), q.mul(&p));
        prop_assert_eq!(p.mul(&q.add(&r)), p.mul(&q).add(&p.mul(&r)));
        prop_assert_eq!(p.mul(&q).mul(&r), p.mul(&q.mul(&r)));
        prop_assert!(p.sub(&p).is_zero());
    }

    #[test]
    fn exact_division_recovers_factor(p in poly(3), q in poly(2)) {
        prop_assume!(!q.is_zero());
        prop_assert_eq!(p.mul(&q).exact_divide(&q).unwrap(), p);
    }

    #[test]
    fn poly_text_round_trip(p in poly(4)) {
        prop_assert_eq!(p.to_string().parse::<DiffPoly>().unwrap(), p);
    }
}

#[test]
fn nambu_bracket_is_poisson() {
    for d in 2..=4 {
        let spec = RingSpec::new(d).unwrap();
        let p = nambu_p(&spec);
        assert_eq!(p.degree(), Some(2), "d={d}");
        assert!(p.schouten(&p).unwrap().is_zero(), "[[P,P]] ≠ 0 at d={d}");
        for a in casimirs(&spec) {
            assert!(p.schouten(&a).unwrap().is_zero(), "Casimir fails at d={d}");
        }
    }
}

#[test]
fn nambu_bracket_with_rho_factored() {
    for d in 2..=4 {
        let spec = RingSpec::new(d).unwrap();
        assert_eq!(nambu_p(&spec), p_without_rho(&spec).mul_poly(&spec.rho()));
    }
}
