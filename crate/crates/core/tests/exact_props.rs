use flatfold::exact::{hermite_normal_form, smith_normal_form, solve_mod_lattice, torus_fixed_point_exists};
use flatfold::{Int, IntMatrix, Lattice, Matrix, Rational};
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

fn int_matrix(rows: usize, cols: usize, data: &[i64]) -> IntMatrix {
    Matrix::from_vec(rows, cols, data.iter().map(|&x| Int::from(x)).collect())
}

/// A product of random elementary row operations.
fn random_unimodular(rng: &mut StdRng, n: usize, steps: usize) -> IntMatrix {
    let mut u = IntMatrix::identity(n);
    for _ in 0..steps {
        let (i, j) = (rng.gen_range(0..n), rng.gen_range(0..n));
        match rng.gen_range(0..3) {
            0 if i != j => {
                let q = Int::from(rng.gen_range(-2i64..=2));
                for k in 0..n {
                    let v = u[(i, k)].clone() + q.clone() * u[(j, k)].clone();
                    u[(i, k)] = v;
                }
            }
            1 => u.swap_rows(i, j),
            _ => {
                for k in 0..n {
                    let v = -u[(i, k)].clone();
                    u[(i, k)] = v;
                }
            }
        }
    }
    u
}

fn check_snf(a: &IntMatrix) {
    let s = smith_normal_form(a);
    assert_eq!(s.u.mul(a).mul(&s.v), s.d);
    assert!(s.u.det().abs().is_one() && s.v.det().abs().is_one());
    for i in 0..s.d.rows() {
        for j in 0..s.d.cols() {
            if i != j {
                assert!(s.d[(i, j)].is_zero());
            }
        }
    }
    let diag = s.diagonal();
    assert!(diag.iter().all(|x| !x.is_negative()));
    for w in diag.windows(2) {
        if w[0].is_zero() {
            assert!(w[1].is_zero());
        } else {
            assert!((w[1].clone() % w[0].clone()).is_zero(), "{} does not divide {}", w[0], w[1]);
        }
    }
}

#[test]
fn smith_form_on_a_thousand_random_matrices() {
    let mut rng = StdRng::seed_from_u64(7);
    for _ in 0..1000 {
        let data: Vec<i64> = (0..16).map(|_| rng.gen_range(-9..=9)).collect();
        check_snf(&int_matrix(4, 4, &data));
    }
}

#[test]
fn smith_form_of_rank_deficient_and_rectangular_matrices() {
    check_snf(&int_matrix(3, 3, &[2, 4, 6, 1, 2, 3, 0, 0, 0]));
    check_snf(&int_matrix(2, 4, &[2, 0, 4, 6, 0, 3, 0, 9]));
    check_snf(&int_matrix(4, 2, &[1, 1, 1, -1, 2, 0, 0, 2]));
    let s = smith_normal_form(&int_matrix(2, 2, &[2, 0, 0, 3]));
    assert_eq!(s.diagonal(), vec![Int::from(1), Int::from(6)]);
}

proptest! {
    #[test]
    fn snf_diagonal_is_unimodular_invariant(data in prop::collection::vec(-6i64..=6, 12), seed in any::<u64>()) {
        let a = int_matrix(3, 4, &data);
        let mut rng = StdRng::seed_from_u64(seed);
        let (u, v) = (random_unimodular(&mut rng, 3, 8), random_unimodular(&mut rng, 4, 8));
        let b = u.mul(&a).mul(&v);
        prop_assert_eq!(smith_normal_form(&a).diagonal(), smith_normal_form(&b).diagonal());
    }

    #[test]
    fn hnf_is_a_left_unimodular_invariant(data in prop::collection::vec(-6i64..=6, 12), seed in any::<u64>()) {
        let a = int_matrix(4, 3, &data);
        let mut rng = StdRng::seed_from_u64(seed);
        let u = random_unimodular(&mut rng, 4, 10);
        let (h, w) = hermite_normal_form(&a);
        prop_assert_eq!(&w.mul(&a), &h);
        prop_assert!(w.det().abs().is_one());
        prop_assert_eq!(hermite_normal_form(&u.mul(&a)).0, h);
    }

    #[test]
    fn solve_mod_lattice_finds_planted_solutions(
        m in prop::collection::vec(-4i64..=4, 6),
        s in prop::collection::vec(-8i64..=8, 2),
        l in prop::collection::vec(-3i64..=3, 3),
        q in 1i64..=6,
    ) {
        let lattice = Lattice::<Int>::from_vectors(3, &[
            vec![Rational::from_integer(2.into()), Rational::zero(), Rational::zero()],
            vec![Rational::one(), Rational::from_integer(3.into()), Rational::zero()],
            vec![Rational::zero(), Rational::zero(), Rational::one()],
        ]);
        let mm = int_matrix(3, 2, &m).to_rational();
        let s0: Vec<Rational> = s.iter().map(|&x| Rational::new(x.into(), q.into())).collect();
        let lv = lattice.from_coords(&l.iter().map(|&x| Rational::from_integer(x.into())).collect::<Vec<_>>());
        let c: Vec<Rational> = mm.mul_vec(&s0).iter().zip(&lv).map(|(a, b)| a - b).collect();
        let sol = solve_mod_lattice(&mm, &c, &lattice);
        prop_assert!(sol.is_some());
        let r: Vec<Rational> = mm.mul_vec(&sol.unwrap()).iter().zip(&c).map(|(a, b)| a - b).collect();
        prop_assert!(lattice.contains(&r));
    }

    #[test]
    fn solve_mod_lattice_answers_are_solutions(
        m in prop::collection::vec(-4i64..=4, 4),
        c in prop::collection::vec(-7i64..=7, 2),
        q in 1i64..=6,
    ) {
        let lattice = Lattice::<Int>::standard(2);
        let mm = int_matrix(2, 2, &m).to_rational();
        let c: Vec<Rational> = c.iter().map(|&x| Rational::new(x.into(), q.into())).collect();
        if let Some(s) = solve_mod_lattice(&mm, &c, &lattice) {
            let r: Vec<Rational> = mm.mul_vec(&s).iter().zip(&c).map(|(a, b)| a - b).collect();
            prop_assert!(lattice.contains(&r));
        } else {
            // with an integer square matrix, solvable over Q means solvable mod Z unless it is singular
            prop_assert!(int_matrix(2, 2, &m).det().is_zero());
        }
    }
}

/// Finite-order matrices of GL(2,ℤ) with entries in {−1, 0, 1}.
fn finite_order_2x2() -> Vec<IntMatrix> {
    let mut out = Vec::new();
    for code in 0..81 {
        let d: Vec<i64> = (0..4).map(|k| (code / 3i64.pow(k)) % 3 - 1).collect();
        let a = int_matrix(2, 2, &d);
        if a.det().abs().is_one() && (1..=6).any(|k| a.pow(k).is_identity()) {
            out.push(a);
        }
    }
    out
}

/// Searches the grid `(1/48)ℤ² mod ℤ²`, which holds a solution whenever one exists for these inputs.
fn brute_force_fixed_point(c_mat: &IntMatrix, c: &[Rational]) -> bool {
    let n = 48;
    (0..n * n).any(|k| {
        let x = [Rational::new((k % n).into(), n.into()), Rational::new((k / n).into(), n.into())];
        let cx = c_mat.to_rational().mul_vec(&x);
        (0..2).all(|i| (&cx[i] - &x[i] + &c[i]).is_integer())
    })
}

#[test]
fn torus_fixed_points_agree_with_brute_force() {
    let lattice = Lattice::<Int>::standard(2);
    for a in finite_order_2x2() {
        for c0 in 0..4 {
            for c1 in 0..4 {
                let c = vec![Rational::new(c0.into(), 4.into()), Rational::new(c1.into(), 4.into())];
                let fast = torus_fixed_point_exists(&a, &c, &lattice).unwrap();
                assert_eq!(fast, brute_force_fixed_point(&a, &c), "C = {a:?}, c = {c:?}");
            }
        }
    }
}
