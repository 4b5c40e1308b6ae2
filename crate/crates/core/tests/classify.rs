use std::collections::BTreeSet;

use flatfold::atlas::{Atlas, Base};
use flatfold::classify::{
    circle_fiberings_equivalent, classify_glnz, finite_order_elements, fiberings_equivalent, interval_pairs_equivalent,
    normalizer_sample, order2_fixed_point_free_classes, verify_witness, EquivalenceVerdict, FiberContext, Fibering,
    SearchBounds,
};
use flatfold::spacegroup::parse_affine;
use flatfold::{AffineMap, Int, Matrix};
use num_traits::{One, Signed, Zero};
use rand::rngs::StdRng;
use rand::seq::SliceRandom;
use rand::SeedableRng;

fn atlas() -> Atlas {
    Atlas::embedded().unwrap()
}

fn context(atlas: &Atlas, name: &str) -> FiberContext {
    FiberContext::new(atlas.load_group(name).unwrap())
}

fn m(n: usize, data: &[i64]) -> Matrix<i64> {
    Matrix::from_vec(n, n, data.to_vec())
}

fn to_i64(a: &Matrix<Int>) -> Matrix<i64> {
    a.map(|x| i64::try_from(x).unwrap())
}

#[test]
fn finite_order_elements_are_closed_under_inverse_and_permutations() {
    for n in 1..=3 {
        let bounds = SearchBounds { entry_bound: 1, ..SearchBounds::default() };
        let elements = finite_order_elements(n, &bounds);
        let set: BTreeSet<Matrix<i64>> = elements.iter().cloned().collect();
        let perms: Vec<Matrix<i64>> = match n {
            1 => vec![m(1, &[1])],
            2 => vec![m(2, &[0, 1, 1, 0])],
            _ => vec![m(3, &[0, 1, 0, 1, 0, 0, 0, 0, 1]), m(3, &[0, 0, 1, 1, 0, 0, 0, 1, 0])],
        };
        for a in &elements {
            // the box is not closed under inversion, so only inverses inside it are required
            let inv = to_i64(&a.convert::<Int>().inverse_unimodular().unwrap());
            assert_eq!(set.contains(&inv), inv.max_abs() <= bounds.entry_bound, "inverse of {a:?}");
            for p in &perms {
                let pt = p.transpose();
                assert!(set.contains(&p.mul(a).mul(&pt)), "{a:?} conjugated by {p:?}");
            }
        }
    }
}

#[test]
fn published_representatives_are_found_and_distinct() {
    let atlas = atlas();
    let bounds = SearchBounds { entry_bound: 1, ..SearchBounds::default() };
    for (n, tables) in [(2usize, vec![6u32]), (3, vec![10, 11])] {
        let classes = classify_glnz(n, &SearchBounds::default());
        let small: BTreeSet<Matrix<i64>> = finite_order_elements(n, &bounds).into_iter().collect();
        let mut seen = BTreeSet::new();
        for id in tables {
            for row in atlas.load_table(id).unwrap() {
                let a = to_i64(row.beta.linear());
                assert!(small.contains(&a), "table {id} row {}", row.no);
                assert!(seen.insert(classes.class_of(&a).unwrap()), "table {id} row {} shares a class", row.no);
            }
        }
    }
}

#[test]
fn inverse_rotation_shares_a_class() {
    let classes = classify_glnz(2, &SearchBounds::default());
    let a = m(2, &[0, -1, 1, -1]);
    let inv = m(2, &[-1, 1, -1, 0]);
    assert_eq!(a.mul(&inv), Matrix::identity(2));
    assert_eq!(classes.class_of(&a), classes.class_of(&inv));
    let id = classes.class_of(&Matrix::identity(2)).unwrap();
    assert_eq!(classes.inverse_pairs[id].len(), 1);
}

#[test]
fn torus_normalizer_contains_every_bounded_unimodular_matrix() {
    let atlas = atlas();
    let ctx = context(&atlas, "O3_1");
    let bounds = SearchBounds { entry_bound: 1, denom_bound: 2, ..SearchBounds::default() };
    let linear: BTreeSet<Matrix<Int>> = normalizer_sample(&ctx, &bounds).iter().map(|a| a.linear().clone()).collect();
    let mut count = 0;
    for code in 0..3i64.pow(9) {
        let d: Vec<i64> = (0..9).map(|k| (code / 3i64.pow(k)) % 3 - 1).collect();
        let a = m(3, &d).convert::<Int>();
        if a.det().abs().is_one() {
            count += 1;
            assert!(linear.contains(&a));
        }
    }
    assert_eq!(linear.len(), count);
}

#[test]
fn klein_bottle_normalizer_shape() {
    let atlas = atlas();
    let ctx = context(&atlas, "K2");
    let sample = normalizer_sample(&ctx, &SearchBounds::default());
    assert!(!sample.is_empty());
    let allowed: Vec<Matrix<Int>> = [[1, 1], [1, -1], [-1, 1], [-1, -1]]
        .iter()
        .map(|d| Matrix::diag(&[Int::from(d[0]), Int::from(d[1])]))
        .collect();
    let mut found = BTreeSet::new();
    for phi in &sample {
        assert!(allowed.contains(phi.linear()), "{:?}", phi.linear());
        assert!((phi.translation()[1].clone() * Int::from(2)).is_integer(), "{phi:?}");
        // the sample is reduced modulo M, so multiply back by the point group
        for p in ctx.fiber().point_group() {
            found.insert(p.mul(phi.linear()));
        }
    }
    assert_eq!(found.len(), 4);
}

#[test]
fn tricosm_normalizer_matrices_form_a_group_of_order_twelve() {
    let atlas = atlas();
    let ctx = context(&atlas, "O3_3");
    let sample = normalizer_sample(&ctx, &SearchBounds::default());
    let point_group = ctx.fiber().point_group();
    let mats: BTreeSet<Matrix<Int>> =
        sample.iter().flat_map(|a| point_group.iter().map(move |p| p.mul(a.linear()))).collect();
    let planar: BTreeSet<Matrix<Int>> = mats.iter().map(|a| a.block(0, 2, 0, 2)).collect();
    for a in &mats {
        assert!(a[(0, 2)].is_zero() && a[(1, 2)].is_zero() && a[(2, 0)].is_zero() && a[(2, 1)].is_zero());
    }
    assert_eq!(planar.len(), 12);
    for a in &planar {
        for b in &planar {
            assert!(planar.contains(&a.mul(b)));
        }
    }
    let rot = planar.iter().filter(|a| a.det().is_one()).count();
    assert_eq!(rot, 6);
}

#[test]
fn order_two_classes_merge_as_bounds_grow() {
    let atlas = atlas();
    for name in ["T2", "K2"] {
        let ctx = context(&atlas, name);
        let small = SearchBounds { entry_bound: 1, denom_bound: 4, ..SearchBounds::default() };
        let large = SearchBounds { entry_bound: 2, denom_bound: 8, ..SearchBounds::default() };
        let a = order2_fixed_point_free_classes(&ctx, &small).unwrap();
        let b = order2_fixed_point_free_classes(&ctx, &large).unwrap();
        assert!(b.len() <= a.len(), "{name}: {} then {}", a.len(), b.len());
    }
}

#[test]
fn order_two_classes_of_small_fibers() {
    let atlas = atlas();
    let bounds = SearchBounds::default();
    let k = order2_fixed_point_free_classes(&context(&atlas, "K2"), &bounds).unwrap();
    assert_eq!(k.len(), 1);
    let half_e2 = parse_affine("0 1/2 | 1 0 0 1").unwrap();
    assert!(context(&atlas, "K2").congruent(&k[0].representative, &half_e2));
    let n = order2_fixed_point_free_classes(&context(&atlas, "N3_2"), &bounds).unwrap();
    assert_eq!(n.len(), 1);
    let quotient = atlas.identify(&n[0].quotient, None).unwrap();
    assert_eq!(quotient, vec!["N3_1".to_string()]);
    assert!(order2_fixed_point_free_classes(&context(&atlas, "O3_5"), &bounds).unwrap().is_empty());
}

#[test]
fn circle_examples() {
    let atlas = atlas();
    let ctx = context(&atlas, "T2");
    let rows = atlas.load_table(6).unwrap();
    let bounds = SearchBounds::default();
    let same = circle_fiberings_equivalent(&ctx, &rows[1].fibering(), &rows[1].fibering(), &bounds).unwrap();
    assert!(same.is_equivalent());
    let v = circle_fiberings_equivalent(&ctx, &rows[1].fibering(), &rows[5].fibering(), &bounds).unwrap();
    assert!(matches!(v, EquivalenceVerdict::InequivalentByInvariant(_)), "{v}");
    let a = rows[2].fibering();
    let b = Fibering::circle(a.beta.inverse(), a.order);
    let v = circle_fiberings_equivalent(&ctx, &a, &b, &bounds).unwrap();
    match &v {
        EquivalenceVerdict::Equivalent(w) => assert!(verify_witness(&ctx, &a, &b, w)),
        other => panic!("{other}"),
    }
    assert!(interval_pairs_equivalent(&ctx, &a, &b, &bounds).is_err());
}

#[test]
fn interval_examples() {
    let atlas = atlas();
    let bounds = SearchBounds::default();
    let ctx = context(&atlas, "T2");
    let t7 = atlas.load_table(7).unwrap();
    let v = interval_pairs_equivalent(&ctx, &t7[0].fibering(), &t7[1].fibering(), &bounds).unwrap();
    match &v {
        EquivalenceVerdict::InequivalentByInvariant(why) => assert!(why.contains("structure") || why.contains("total"), "{why}"),
        other => panic!("{other}"),
    }
    let ctx = context(&atlas, "O3_2");
    let t18 = atlas.load_table(18).unwrap();
    let row = |no| t18.iter().find(|r| r.no == no).unwrap().fibering();
    let v = interval_pairs_equivalent(&ctx, &row(24), &row(25), &bounds).unwrap();
    assert!(matches!(v, EquivalenceVerdict::InequivalentByInvariant(_)), "{v}");
    let f = row(24);
    let v = interval_pairs_equivalent(&ctx, &f, &f.swapped(), &bounds).unwrap();
    match &v {
        EquivalenceVerdict::Equivalent(w) => assert!(verify_witness(&ctx, &f, &f.swapped(), w)),
        other => panic!("{other}"),
    }
}

/// Rows transported by random sampled normalizer elements must come back Equivalent.
#[test]
fn positive_controls() {
    let atlas = atlas();
    let bounds = SearchBounds::default();
    let mut rng = StdRng::seed_from_u64(2024);
    let rows = atlas.all_rows();
    let picked: Vec<_> = rows.choose_multiple(&mut rng, 20).copied().collect();
    for row in picked {
        let ctx = context(&atlas, &row.fiber);
        let sample = normalizer_sample(&ctx, &SearchBounds { entry_bound: 1, denom_bound: 4, ..bounds });
        let nontrivial: Vec<&AffineMap> = sample.iter().filter(|a| !a.linear().is_identity()).collect();
        let psi = nontrivial.choose(&mut rng).copied().unwrap_or(&sample[0]);
        let a = row.fibering();
        let mut b = a.conjugated(psi);
        if row.base == Base::Interval {
            b = b.swapped();
        }
        let v = fiberings_equivalent(&ctx, &a, &b, &bounds).unwrap();
        match &v {
            EquivalenceVerdict::Equivalent(w) => assert!(verify_witness(&ctx, &a, &b, w)),
            other => panic!("table {} row {}: {other}", row.table, row.no),
        }
    }
}

#[test]
fn witnesses_are_rejected_for_unrelated_data() {
    let atlas = atlas();
    let ctx = context(&atlas, "T2");
    let rows = atlas.load_table(6).unwrap();
    let (a, b) = (rows[2].fibering(), rows[3].fibering());
    let v = circle_fiberings_equivalent(&ctx, &a, &a, &SearchBounds::default()).unwrap();
    let EquivalenceVerdict::Equivalent(w) = v else { panic!("{v}") };
    assert!(verify_witness(&ctx, &a, &a, &w));
    assert!(!verify_witness(&ctx, &a, &b, &w));
}
