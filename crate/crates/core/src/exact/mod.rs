//! Exact integer and rational linear algebra.
//!
//! Everything here is generic over [`Scalar`], an arbitrary signed integer type. The crate
//! uses `BigInt` for verification and `i64` for bounded enumeration.

mod lattice;
mod matrix;
mod normal_form;

use std::fmt::{Debug, Display};
use std::hash::Hash;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::{FromPrimitive, Signed, ToPrimitive};

pub use lattice::{
    annihilator, dot, orthogonal_complement, same_subspace, solve_mod_lattice, span_basis,
    torus_fixed_point_exists, Lattice,
};
pub(crate) use matrix::convert_int;
pub use matrix::{denominator_lcm, Matrix};
pub use normal_form::{hermite_normal_form, integer_kernel, smith_normal_form, solve_integer, SnfResult};

pub trait Scalar:
    Integer + Signed + Clone + Hash + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

impl<T> Scalar for T where
    T: Integer + Signed + Clone + Hash + Debug + Display + FromPrimitive + ToPrimitive + Send + Sync + 'static
{
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ExactError {
    #[error("matrix does not stabilize the lattice")]
    NotStabilizing,
    #[error("lattice is not of full rank")]
    RankDeficient,
}

pub fn int<T: Scalar>(x: i64) -> T {
    T::from_i64(x).expect("small integer fits every scalar")
}

pub fn rat<T: Scalar>(p: i64, q: i64) -> Ratio<T> {
    Ratio::new(int(p), int(q))
}

pub fn convert_ratio<T: Scalar, U: Scalar>(x: &Ratio<T>) -> Ratio<U> {
    Ratio::new(convert_int(x.numer()), convert_int(x.denom()))
}

pub fn zero_vec<T: Scalar>(n: usize) -> Vec<Ratio<T>> {
    vec![Ratio::from_integer(T::zero()); n]
}

pub fn unit_vec<T: Scalar>(n: usize, i: usize) -> Vec<Ratio<T>> {
    let mut v = zero_vec(n);
    v[i] = Ratio::from_integer(T::one());
    v
}

pub fn vec_add<T: Scalar>(a: &[Ratio<T>], b: &[Ratio<T>]) -> Vec<Ratio<T>> {
    a.iter().zip(b).map(|(x, y)| x + y).collect()
}

pub fn vec_sub<T: Scalar>(a: &[Ratio<T>], b: &[Ratio<T>]) -> Vec<Ratio<T>> {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

pub fn vec_neg<T: Scalar>(a: &[Ratio<T>]) -> Vec<Ratio<T>> {
    a.iter().map(|x| -x).collect()
}

/// Reduced vector with all entries in `[0,1)`.
pub fn frac_vec<T: Scalar>(a: &[Ratio<T>]) -> Vec<Ratio<T>> {
    a.iter().map(|x| x - x.floor()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_bigint::BigInt;

    type M = Matrix<BigInt>;

    fn m(rows: usize, cols: usize, d: &[i64]) -> M {
        Matrix::from_i64(rows, cols, d)
    }

    fn q(p: i64, d: i64) -> Ratio<BigInt> {
        rat(p, d)
    }

    #[test]
    fn snf_zero_one_by_one() {
        let s = smith_normal_form(&m(1, 1, &[0]));
        assert_eq!(s.d, m(1, 1, &[0]));
        assert_eq!(s.u, m(1, 1, &[1]));
        assert_eq!(s.v, m(1, 1, &[1]));
    }

    #[test]
    fn snf_identity() {
        let s = smith_normal_form(&M::identity(3));
        assert!(s.d.is_identity() && s.u.is_identity() && s.v.is_identity());
    }

    #[test]
    fn snf_two_by_two() {
        let a = m(2, 2, &[2, 4, 6, 8]);
        let s = smith_normal_form(&a);
        assert_eq!(s.diagonal(), vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(s.u.mul(&a).mul(&s.v), s.d);
    }

    #[test]
    fn snf_zero_columns_sorted_last() {
        let s = smith_normal_form(&m(2, 3, &[0, 0, 3, 0, 0, 6]));
        assert_eq!(s.diagonal(), vec![BigInt::from(3), BigInt::from(0)]);
    }

    #[test]
    fn hnf_examples() {
        let (h, _) = hermite_normal_form(&M::identity(2));
        assert!(h.is_identity());
        assert_eq!(hermite_normal_form(&m(2, 2, &[2, 0, 0, 3])).0, m(2, 2, &[2, 0, 0, 3]));
        let a = m(2, 2, &[1, 2, 3, 4]);
        let (h, u) = hermite_normal_form(&a);
        assert_eq!(u.mul(&a), h);
        assert_eq!(h[(0, 0)], BigInt::from(1));
        assert_eq!(h.det().abs(), BigInt::from(2));
    }

    #[test]
    fn torus_fixed_points() {
        let z2 = Lattice::<BigInt>::standard(2);
        let half = vec![q(1, 2), q(0, 1)];
        assert!(!torus_fixed_point_exists(&M::identity(2), &half, &z2).unwrap());
        assert!(torus_fixed_point_exists(&m(2, 2, &[-1, 0, 0, -1]), &zero_vec(2), &z2).unwrap());
        assert!(!torus_fixed_point_exists(&m(2, 2, &[1, 0, 0, -1]), &half, &z2).unwrap());
        let coarse = Lattice::from_vectors(2, &[vec![q(2, 1), q(0, 1)], vec![q(0, 1), q(1, 1)]]);
        assert_eq!(
            torus_fixed_point_exists(&m(2, 2, &[0, 1, 1, 0]), &zero_vec(2), &coarse),
            Err(ExactError::NotStabilizing)
        );
    }

    #[test]
    fn lattice_intersections() {
        let z3 = Lattice::<BigInt>::standard(3);
        let l = z3.intersect_subspace(&[vec![q(1, 1), q(0, 1), q(0, 1)]]);
        assert_eq!(l.basis(), vec![vec![q(1, 1), q(0, 1), q(0, 1)]]);
        let z2 = Lattice::<BigInt>::standard(2);
        let l = z2.intersect_subspace(&[vec![q(1, 1), q(1, 1)]]);
        assert_eq!(l.basis(), vec![vec![q(1, 1), q(1, 1)]]);
        let l = z2.intersect_subspace(&[vec![q(1, 1), q(1, 2)]]);
        assert_eq!(l.basis(), vec![vec![q(2, 1), q(1, 1)]]);
    }

    #[test]
    fn lattice_normalises_denominators() {
        let a = Lattice::<BigInt>::from_vectors(1, &[vec![q(2, 4)]]);
        let b = Lattice::<BigInt>::from_vectors(1, &[vec![q(1, 2)], vec![q(1, 1)]]);
        assert_eq!(a, b);
        assert!(a.contains(&[q(3, 2)]));
        assert!(!a.contains(&[q(1, 4)]));
        assert_eq!(a.reduce(&[q(7, 4)]), vec![q(1, 4)]);
    }

    #[test]
    fn partial_rank_reduction_is_canonical() {
        let l = Lattice::<BigInt>::from_vectors(2, &[vec![q(2, 1), q(1, 1)]]);
        let a = l.reduce(&[q(5, 2), q(1, 3)]);
        let b = l.reduce(&[q(1, 2), q(-2, 3)]);
        assert_eq!(a, b);
    }

    #[test]
    fn congruence_solver() {
        // (C - I) s + c ∈ Z² for C = diag(1,-1), c = (0, 1/2): s2 = 1/4 works
        let mm = m(2, 2, &[0, 0, 0, -2]).to_rational();
        let s = solve_mod_lattice(&mm, &[q(0, 1), q(-1, 2)], &Lattice::standard(2)).unwrap();
        let r = vec_sub(&mm.mul_vec(&s), &[q(0, 1), q(-1, 2)]);
        assert!(Lattice::standard(2).contains(&r));
        assert!(solve_mod_lattice(&mm, &[q(1, 2), q(0, 1)], &Lattice::standard(2)).is_none());
    }

    #[test]
    fn integer_systems() {
        let a = m(1, 2, &[2, 4]);
        assert!(solve_integer(&a, &[BigInt::from(3)]).is_none());
        let z = solve_integer(&a, &[BigInt::from(6)]).unwrap();
        assert_eq!(a.mul_vec(&z), vec![BigInt::from(6)]);
        let k = integer_kernel(&a);
        assert_eq!(k.len(), 1);
        assert_eq!(a.mul_vec(&k[0]), vec![BigInt::from(0)]);
    }

    #[test]
    fn determinant_and_inverse() {
        let a = m(3, 3, &[0, 1, 0, 0, 1, -1, -1, 1, 0]);
        assert_eq!(a.det().abs(), BigInt::from(1));
        let inv = a.inverse_unimodular().unwrap();
        assert!(a.mul(&inv).is_identity());
        assert!(m(2, 2, &[2, 0, 0, 1]).inverse_unimodular().is_none());
    }
}
