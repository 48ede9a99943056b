use std::collections::BTreeMap;

use nambu_core::evaluation::*;
use nambu_core::formality::*;
use nambu_core::graph_complex::*;
use nambu_core::perm::levi_civita_sign;
use nambu_core::superfunction::casimirs;
use nambu_core::trivialize::{casimir_flow, oriented_operation, q_flow};
use nambu_core::*;

/// Direct ε-indexed sum over all `d^{pd}` raw index tuples, with generic
/// superfunction contents.
fn raw_epsilon_sum(e: &GraphEncoding) -> Superfunction {
    let d = e.dim();
    let p = e.levi_civita_count();
    let g = encoding_to_graph(e);
    let roles = vertex_roles(d, p);
    let spec = RingSpec::new(d).unwrap();
    let content: Vec<Superfunction> = roles
        .iter()
        .map(|r| match r {
            VertexRole::Sink => Superfunction::euler_field(d),
            VertexRole::LeviCivita => Superfunction::scalar(d, spec.rho()),
            VertexRole::Casimir(k) => Superfunction::scalar(d, spec.casimir(*k)),
        })
        .collect();
    let m = p * d;
    let mut total = Superfunction::zero(d);
    let mut tuple = vec![0usize; m];
    loop {
        let sign: i64 = (0..p).map(|j| levi_civita_sign(&tuple[j * d..(j + 1) * d]) as i64).product();
        if sign != 0 {
            let mut c = content.clone();
            for (&(_, t), &i) in g.edges().iter().zip(&tuple) {
                c[t as usize] = c[t as usize].even_derivative(i);
            }
            let prod = c.iter().skip(1).fold(c[0].clone(), |acc, x| acc.wedge(x).unwrap());
            total = total.add(&prod.scale(&Rational::from_i64(sign))).unwrap();
        }
        let mut k = m;
        loop {
            if k == 0 {
                return total;
            }
            k -= 1;
            tuple[k] += 1;
            if tuple[k] < d {
                break;
            }
            tuple[k] = 0;
        }
    }
}

#[test]
fn permutation_sum_matches_raw_epsilon_sum() {
    let fixed = ["0,2,4;1,3,5;1,2,6", "0,1,4;1,3,5;1,2,6", "0,5,4;2,3,6;1,4,5"];
    for text in fixed {
        let e = GraphEncoding::parse(3, 3, text).unwrap();
        let fast = evaluate_micro_graph(&encoding_to_graph(&e), &vertex_roles(3, 3), 3).unwrap();
        assert_eq!(fast, raw_epsilon_sum(&e), "{text}");
        assert!(!fast.is_zero() || text == "0,5,4;2,3,6;1,4,5");
    }
    let e = GraphEncoding::parse(3, 3, fixed[0]).unwrap();
    assert!(!raw_epsilon_sum(&e).is_zero());
}

#[test]
fn two_dimensional_sunflower_matches_raw_sum() {
    for e in sunflower_2d() {
        assert_eq!(trivialize::evaluate_encoding(&e).unwrap(), raw_epsilon_sum(&e));
    }
}

#[test]
fn isomorphic_descendants_give_equal_formulas() {
    let all = expand_sunflower(3).unwrap();
    let mut classes: BTreeMap<GraphEncoding, Superfunction> = BTreeMap::new();
    let mut repeats = 0;
    for e in &all {
        let f = trivialize::evaluate_encoding(e).unwrap();
        let c = canonical_form(e);
        assert_eq!(trivialize::evaluate_encoding(&c).unwrap(), f, "{e:?} vs canonical {c:?}");
        match classes.get(&c) {
            Some(g) => {
                assert_eq!(g, &f);
                repeats += 1;
            }
            None => {
                classes.insert(c, f.clone());
            }
        }
        // relabel the Levi-Civita vertices cyclically
        let r = e.relabel(&[1, 2, 0], &[&[1, 2, 0]]);
        assert_eq!(trivialize::evaluate_encoding(&r).unwrap(), f);
    }
    assert_eq!(all.len(), 48);
    assert!(repeats > 0);
}

#[test]
fn repeated_casimir_target_cancels() {
    // vertex 1 sends two edges to its own a¹: ε antisymmetry kills every term
    let e = GraphEncoding::parse(3, 3, "0,4,4;1,3,5;1,2,6").unwrap();
    assert!(trivialize::evaluate_encoding(&e).unwrap().is_zero());
}

#[test]
fn graph_operation_is_linear_in_terms() {
    let spec = RingSpec::new(2).unwrap();
    let p = nambu_p(&spec);
    let terms = orient_terms(&tetrahedron());
    let (g1, _) = &terms[5];
    let (g2, _) = &terms[17];
    let mut x = GraphVector::new();
    x.add_graph(g1, &Rational::from_i64(3));
    x.add_graph(g2, &Rational::new(-1, 2));
    let args = [p.clone(), p.clone(), p.clone(), p.clone()];
    let combined = graph_operation(&x, &args, None).unwrap();
    let mut separate = Superfunction::zero(2);
    for (g, c) in x.terms() {
        separate = separate.add(&graph_operation_term(g, c, &args, None).unwrap()).unwrap();
    }
    assert_eq!(combined, separate);
}

#[test]
fn graph_operation_degree_law() {
    let spec = RingSpec::new(3).unwrap();
    let p = nambu_p(&spec);
    let a = casimirs(&spec)[0].clone();
    let op = oriented_operation(&tetrahedron());
    let q = graph_operation(&op, &[p.clone(), p.clone(), p.clone(), p.clone()], None).unwrap();
    assert_eq!(q.degree(), Some(2));
    let adot = graph_operation(&op, &[p.clone(), p.clone(), p.clone(), a], None).unwrap();
    assert_eq!(adot.degree(), Some(0));
    let x = Superfunction::parse(3, "1 * rho_x * xi[0] + 2 * a1 * xi[2]").unwrap();
    let r = graph_operation(&op, &[p.clone(), p.clone(), x, p], None).unwrap();
    assert!(r.is_zero() || r.degree() == Some(1));
}

#[test]
fn flows_match_unfiltered_orientation() {
    // out-degree three at a bi-vector vertex kills the term, so the full
    // 64-term orientation must give the same flows
    let spec = RingSpec::new(3).unwrap();
    let p = nambu_p(&spec);
    let a = casimirs(&spec)[0].clone();
    let filtered = oriented_operation(&tetrahedron());
    let full = orient(&tetrahedron());
    assert!(full.len() > filtered.len());
    let adot = casimir_flow(&a, &p, &filtered).unwrap();
    assert!(!adot.is_zero());
    assert_eq!(adot, casimir_flow(&a, &p, &full).unwrap());
    assert_eq!(q_flow(&p, &filtered, None).unwrap(), q_flow(&p, &full, None).unwrap());
}

#[test]
fn tetrahedral_flow_is_a_cocycle_and_preserves_casimirs() {
    for d in 2..=3 {
        let spec = RingSpec::new(d).unwrap();
        let p = nambu_p(&spec);
        let op = oriented_operation(&tetrahedron());
        let q = q_flow(&p, &op, None).unwrap();
        assert!(!q.is_zero());
        assert!(p.schouten(&q).unwrap().is_zero(), "[[P,Q]] ≠ 0 at d={d}");
        for a in casimirs(&spec) {
            let adot = casimir_flow(&a, &p, &op).unwrap();
            let drift = q.schouten(&a).unwrap().add(&p.schouten(&adot).unwrap()).unwrap();
            assert!(drift.is_zero(), "Casimir drifts at d={d}");
        }
    }
}

#[test]
fn restricted_flow_is_a_projection() {
    let spec = RingSpec::new(3).unwrap();
    let p = nambu_p(&spec);
    let op = oriented_operation(&tetrahedron());
    let keep = [superfunction::OddSet::from_indices(&[0, 1]).unwrap()];
    assert_eq!(q_flow(&p, &op, Some(&keep)).unwrap(), q_flow(&p, &op, None).unwrap().restrict(&keep));
}

#[test]
fn index_choice_guard_counts() {
    for (d, expected) in [(2usize, 8u64), (3, 216), (4, 13824)] {
        let e = &expand_sunflower(d).unwrap()[0];
        let (_, n) = evaluate_micro_graph_counted(&encoding_to_graph(e), &vertex_roles(d, 3), d).unwrap();
        assert_eq!(n, expected);
    }
}
