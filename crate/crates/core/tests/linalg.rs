use nambu_core::linalg::*;
use nambu_core::Rational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Dense reduced row echelon form; returns the pivot columns.
fn dense_rref(m: &mut [Vec<Rational>]) -> Vec<usize> {
    let rows = m.len();
    let cols = m.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..rows).find(|&k| !m[k][c].is_zero()) else { continue };
        m.swap(r, k);
        let inv = m[r][c].recip().unwrap();
        for x in m[r].iter_mut() {
            *x = &*x * &inv;
        }
        for k in 0..rows {
            if k != r && !m[k][c].is_zero() {
                let f = m[k][c].clone();
                for j in 0..cols {
                    let delta = &f * &m[r][j];
                    m[k][j] = &m[k][j] - &delta;
                }
            }
        }
        pivots.push(c);
        r += 1;
        if r == rows {
            break;
        }
    }
    pivots
}

fn random_matrix(rng: &mut ChaCha8Rng) -> Vec<Vec<Rational>> {
    let rows = rng.gen_range(1..=8);
    let cols = rng.gen_range(1..=8);
    let density = rng.gen_range(0.2..0.9);
    let mut m: Vec<Vec<Rational>> = (0..rows)
        .map(|_| {
            (0..cols)
                .map(|_| {
                    if rng.gen_bool(density) {
                        Rational::new(rng.gen_range(-5..=5), rng.gen_range(1..=3))
                    } else {
                        Rational::zero()
                    }
                })
                .collect()
        })
        .collect();
    // force some column dependencies
    if cols >= 3 && rng.gen_bool(0.5) {
        let (a, b, t) = (rng.gen_range(0..cols), rng.gen_range(0..cols), rng.gen_range(0..cols));
        let k = Rational::from_i64(rng.gen_range(-2..=2));
        for row in m.iter_mut() {
            row[t] = &row[a] + &(&k * &row[b]);
        }
    }
    m
}

#[test]
fn sparse_elimination_matches_dense_oracle() {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..200 {
        let dense = random_matrix(&mut rng);
        let (rows, cols) = (dense.len(), dense[0].len());
        let m = SparseMatQ::from_rows(&dense).unwrap();
        let ech = ColumnEchelon::new(&m);
        let mut work = dense.clone();
        let expected = dense_rref(&mut work);
        assert_eq!(ech.pivots(), &expected[..]);
        assert_eq!(ech.rank(), expected.len());

        let kernel = ech.kernel_basis();
        assert_eq!(kernel.len(), cols - expected.len());
        for k in kernel {
            assert!(m.mul_vec(k).unwrap().is_zero());
        }
        // kernel vectors are independent: each has entry 1 at its own free column
        let free: Vec<usize> = (0..cols).filter(|c| !expected.contains(c)).collect();
        for (k, &c) in kernel.iter().zip(&free) {
            assert_eq!(k.get(c), Rational::one());
            for &other in &free {
                if other != c {
                    assert!(k.get(other).is_zero());
                }
            }
        }

        // a consistent right-hand side is solved exactly
        let x: Vec<Rational> = (0..cols).map(|_| Rational::from_i64(rng.gen_range(-3..=3))).collect();
        let b = m.mul_vec(&SparseVecQ::from_dense(&x)).unwrap();
        let sol = ech.solve(&b).unwrap().expect("consistent system");
        assert_eq!(m.mul_vec(&sol).unwrap(), b);

        // an arbitrary right-hand side is solvable iff the rank does not grow
        let c: Vec<Rational> = (0..rows).map(|_| Rational::from_i64(rng.gen_range(-3..=3))).collect();
        let mut aug: Vec<Vec<Rational>> = dense.iter().zip(&c).map(|(r, x)| r.iter().cloned().chain([x.clone()]).collect()).collect();
        let aug_rank = dense_rref(&mut aug).len();
        let cv = SparseVecQ::from_dense(&c);
        match ech.solve(&cv).unwrap() {
            Some(s) => {
                assert_eq!(aug_rank, expected.len());
                assert_eq!(m.mul_vec(&s).unwrap(), cv);
            }
            None => assert_eq!(aug_rank, expected.len() + 1),
        }
    }
}

#[test]
fn triplet_round_trip_on_random_matrices() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..50 {
        let m = SparseMatQ::from_rows(&random_matrix(&mut rng)).unwrap();
        assert_eq!(SparseMatQ::from_triplets(&m.to_triplets()).unwrap(), m);
    }
}

#[test]
fn stacking_preserves_solutions() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..50 {
        let a = random_matrix(&mut rng);
        let cols = a[0].len();
        let b: Vec<Vec<Rational>> = (0..3).map(|_| (0..cols).map(|_| Rational::from_i64(rng.gen_range(-2..=2))).collect()).collect();
        let (ma, mb) = (SparseMatQ::from_rows(&a).unwrap(), SparseMatQ::from_rows(&b).unwrap());
        let s = stack(&[&ma, &mb]).unwrap();
        assert_eq!(s.rows(), ma.rows() + mb.rows());
        for k in right_kernel_basis(&s) {
            assert!(ma.mul_vec(&k).unwrap().is_zero());
            assert!(mb.mul_vec(&k).unwrap().is_zero());
        }
    }
}
