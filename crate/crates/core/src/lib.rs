//! Exact computations with crystallographic groups and co-Seifert fibrations of flat manifolds.

pub mod exact;
pub mod spacegroup;
pub mod fibration;
pub mod classify;
pub mod atlas;

pub use exact::{Lattice, Matrix, Scalar};
pub use spacegroup::{AffineMap, GroupLabel, InvariantRecord, SpaceGroup, SpaceGroupError};

pub type Int = num_bigint::BigInt;
pub type Rational = num_rational::Ratio<Int>;
pub type IntMatrix = Matrix<Int>;
pub type RatMatrix = Matrix<Rational>;
pub type RatVector = Vec<Rational>;
