//! Crystallographic groups stored as lattice + point group + coset representatives.

mod finite;
mod io;

use std::collections::{HashMap, VecDeque};
use std::fmt;

use num_rational::Ratio;
use num_traits::Zero;

use crate::exact::{
    convert_ratio, smith_normal_form, torus_fixed_point_exists, vec_add, vec_sub, zero_vec, Lattice, Matrix,
    Scalar,
};
use crate::Int;

pub use finite::{invariant_factors, lcm_all, FiniteGroup, GroupLabel, UnrecognizedGroup};
pub use io::{format_group, parse_affine, parse_group};

/// Default limit on the number of point-group elements produced by [`SpaceGroup::close`].
pub const DEFAULT_CLOSURE_CAP: usize = 1024;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SpaceGroupError {
    #[error("point group exceeds the closure cap of {0} elements")]
    CapExceeded(usize),
    #[error("translation lattice has rank {rank}, expected {dim}")]
    NotCocompact { rank: usize, dim: usize },
    #[error("matrix part is not unimodular")]
    NotUnimodular,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error(transparent)]
    UnrecognizedGroup(#[from] UnrecognizedGroup),
    #[error("group is already orientable")]
    AlreadyOrientable,
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

/// The affinity `x ↦ a + A x`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AffineMap<T: Scalar = Int> {
    linear: Matrix<T>,
    translation: Vec<Ratio<T>>,
}

impl<T: Scalar> AffineMap<T> {
    pub fn new(translation: Vec<Ratio<T>>, linear: Matrix<T>) -> Result<Self, SpaceGroupError> {
        if !linear.is_square() {
            return Err(SpaceGroupError::DimensionMismatch { expected: linear.rows(), found: linear.cols() });
        }
        if translation.len() != linear.rows() {
            return Err(SpaceGroupError::DimensionMismatch { expected: linear.rows(), found: translation.len() });
        }
        if !linear.is_unimodular() {
            return Err(SpaceGroupError::NotUnimodular);
        }
        Ok(AffineMap { linear, translation })
    }

    pub fn identity(dim: usize) -> Self {
        AffineMap { linear: Matrix::identity(dim), translation: zero_vec(dim) }
    }

    pub fn translation_by(v: Vec<Ratio<T>>) -> Self {
        let n = v.len();
        AffineMap { linear: Matrix::identity(n), translation: v }
    }

    pub fn linear_map(a: Matrix<T>) -> Self {
        let n = a.rows();
        AffineMap { linear: a, translation: zero_vec(n) }
    }

    pub fn dim(&self) -> usize {
        self.translation.len()
    }

    pub fn translation(&self) -> &[Ratio<T>] {
        &self.translation
    }

    pub fn linear(&self) -> &Matrix<T> {
        &self.linear
    }

    pub fn is_translation(&self) -> bool {
        self.linear.is_identity()
    }

    pub fn is_identity(&self) -> bool {
        self.is_translation() && self.translation.iter().all(Zero::is_zero)
    }

    pub fn apply(&self, x: &[Ratio<T>]) -> Vec<Ratio<T>> {
        vec_add(&self.translation, &self.linear.to_rational().mul_vec(x))
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AffineMap<T>) -> AffineMap<T> {
        AffineMap { linear: self.linear.mul(&other.linear), translation: self.apply(&other.translation) }
    }

    pub fn inverse(&self) -> AffineMap<T> {
        let inv = self.linear.inverse_unimodular().expect("affinities have unimodular matrix parts");
        let t = inv.to_rational().mul_vec(&self.translation).iter().map(|x| -x).collect();
        AffineMap { linear: inv, translation: t }
    }

    pub fn pow(&self, k: u32) -> AffineMap<T> {
        (0..k).fold(AffineMap::identity(self.dim()), |acc, _| acc.compose(self))
    }

    /// `self ∘ g ∘ self⁻¹`.
    pub fn conjugate(&self, g: &AffineMap<T>) -> AffineMap<T> {
        self.compose(g).compose(&self.inverse())
    }

    /// The map `x ⊕ y ↦ self(x) ⊕ (c + C y)` on the direct sum.
    pub fn direct_sum(&self, other: &AffineMap<T>) -> AffineMap<T> {
        let mut t = self.translation.clone();
        t.extend(other.translation.iter().cloned());
        AffineMap { linear: self.linear.direct_sum(&other.linear), translation: t }
    }

    pub fn convert<U: Scalar>(&self) -> AffineMap<U> {
        AffineMap { linear: self.linear.convert(), translation: self.translation.iter().map(convert_ratio).collect() }
    }
}

impl<T: Scalar> fmt::Display for AffineMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let t: Vec<String> = self.translation.iter().map(ToString::to_string).collect();
        let a: Vec<String> = self.linear.entries().iter().map(ToString::to_string).collect();
        write!(f, "{} | {}", t.join(" "), a.join(" "))
    }
}

impl<T: Scalar> fmt::Debug for AffineMap<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "AffineMap({self})")
    }
}

/// Invariants used to recognise a flat manifold.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct InvariantRecord {
    pub dim: usize,
    pub orientable: bool,
    pub betti: usize,
    /// Elementary divisors of the torsion of H1, all > 1.
    pub torsion: Vec<u64>,
    pub holonomy: GroupLabel,
    pub holonomy_order: usize,
}

impl fmt::Display for InvariantRecord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let tors: Vec<String> = self.torsion.iter().map(u64::to_string).collect();
        write!(
            f,
            "dim={} orientable={} betti={} torsion=[{}] holonomy={} |P|={}",
            self.dim,
            self.orientable,
            self.betti,
            tors.join(","),
            self.holonomy,
            self.holonomy_order
        )
    }
}

/// A group of affinities with integral matrix parts, closed into lattice, point group, and
/// one translation representative per point-group element (reduced modulo the lattice).
#[derive(Clone)]
pub struct SpaceGroup<T: Scalar = Int> {
    dim: usize,
    generators: Vec<AffineMap<T>>,
    lattice: Lattice<T>,
    point_group: Vec<Matrix<T>>,
    reps: Vec<Vec<Ratio<T>>>,
    index: HashMap<Matrix<T>, usize>,
}

impl<T: Scalar> PartialEq for SpaceGroup<T> {
    fn eq(&self, other: &Self) -> bool {
        self.dim == other.dim
            && self.lattice == other.lattice
            && self.point_group == other.point_group
            && self.reps == other.reps
    }
}

impl<T: Scalar> Eq for SpaceGroup<T> {}

impl<T: Scalar> fmt::Debug for SpaceGroup<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("SpaceGroup")
            .field("dim", &self.dim)
            .field("lattice", &self.lattice)
            .field("point_group_order", &self.point_group.len())
            .finish()
    }
}

impl<T: Scalar> SpaceGroup<T> {
    /// Closes a generating set into a space group; the translations must span `Rⁿ`.
    pub fn close(dim: usize, gens: &[AffineMap<T>], cap: usize) -> Result<Self, SpaceGroupError> {
        let g = Self::close_subgroup(dim, gens, cap)?;
        if !g.lattice.is_full_rank() {
            return Err(SpaceGroupError::NotCocompact { rank: g.lattice.rank(), dim });
        }
        Ok(g)
    }

    /// Closure without the cocompactness requirement, for subgroups of space groups.
    pub fn close_subgroup(dim: usize, gens: &[AffineMap<T>], cap: usize) -> Result<Self, SpaceGroupError> {
        for g in gens {
            if g.dim() != dim {
                return Err(SpaceGroupError::DimensionMismatch { expected: dim, found: g.dim() });
            }
            if !g.linear.is_unimodular() {
                return Err(SpaceGroupError::NotUnimodular);
            }
        }
        let mut found: HashMap<Matrix<T>, Vec<Ratio<T>>> = HashMap::new();
        found.insert(Matrix::identity(dim), zero_vec(dim));
        let mut queue = VecDeque::from([Matrix::identity(dim)]);
        let mut schreier: Vec<Vec<Ratio<T>>> = Vec::new();
        while let Some(a) = queue.pop_front() {
            let ra = AffineMap { linear: a.clone(), translation: found[&a].clone() };
            for g in gens {
                let prod = g.compose(&ra);
                match found.get(&prod.linear) {
                    Some(rep) => {
                        // r⁻¹·g·r_A is the translation by (BA)⁻¹(b + B a − r)
                        let inv = prod.linear.inverse_unimodular().expect("unimodular");
                        let v = inv.to_rational().mul_vec(&vec_sub(&prod.translation, rep));
                        if v.iter().any(|x| !x.is_zero()) {
                            schreier.push(v);
                        }
                    }
                    None => {
                        if found.len() >= cap {
                            return Err(SpaceGroupError::CapExceeded(cap));
                        }
                        found.insert(prod.linear.clone(), prod.translation.clone());
                        queue.push_back(prod.linear);
                    }
                }
            }
        }
        let lattice = Lattice::from_vectors(dim, &schreier);
        Ok(Self::assemble(dim, gens.to_vec(), lattice, found))
    }

    fn assemble(
        dim: usize,
        generators: Vec<AffineMap<T>>,
        lattice: Lattice<T>,
        found: HashMap<Matrix<T>, Vec<Ratio<T>>>,
    ) -> Self {
        let id = Matrix::identity(dim);
        let mut point_group: Vec<Matrix<T>> = found.keys().filter(|a| **a != id).cloned().collect();
        point_group.sort();
        point_group.insert(0, id);
        let reps: Vec<Vec<Ratio<T>>> = point_group.iter().map(|a| lattice.reduce(&found[a])).collect();
        let index = point_group.iter().enumerate().map(|(i, a)| (a.clone(), i)).collect();
        SpaceGroup { dim, generators, lattice, point_group, reps, index }
    }

    /// Group with the given lattice and point group, with zero coset representatives.
    pub fn split(lattice: Lattice<T>, point_group: &[Matrix<T>], cap: usize) -> Result<Self, SpaceGroupError> {
        let dim = lattice.dim();
        let mut gens: Vec<AffineMap<T>> = lattice.basis().into_iter().map(AffineMap::translation_by).collect();
        gens.extend(point_group.iter().cloned().map(AffineMap::linear_map));
        Self::close(dim, &gens, cap)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn generators(&self) -> &[AffineMap<T>] {
        &self.generators
    }

    pub fn lattice(&self) -> &Lattice<T> {
        &self.lattice
    }

    /// Point-group matrices, identity first.
    pub fn point_group(&self) -> &[Matrix<T>] {
        &self.point_group
    }

    pub fn point_group_order(&self) -> usize {
        self.point_group.len()
    }

    pub fn point_group_index(&self, a: &Matrix<T>) -> Option<usize> {
        self.index.get(a).copied()
    }

    pub fn coset_rep(&self, i: usize) -> AffineMap<T> {
        AffineMap { linear: self.point_group[i].clone(), translation: self.reps[i].clone() }
    }

    pub fn coset_reps(&self) -> Vec<AffineMap<T>> {
        (0..self.point_group.len()).map(|i| self.coset_rep(i)).collect()
    }

    /// Lattice basis translations followed by the non-identity coset representatives.
    pub fn canonical_generators(&self) -> Vec<AffineMap<T>> {
        let mut gens: Vec<AffineMap<T>> = self.lattice.basis().into_iter().map(AffineMap::translation_by).collect();
        gens.extend((1..self.point_group.len()).map(|i| self.coset_rep(i)));
        gens
    }

    /// Canonical form of `g` modulo the lattice: point-group index and reduced translation.
    pub fn normal_form(&self, g: &AffineMap<T>) -> Option<(usize, Vec<Ratio<T>>)> {
        if g.dim() != self.dim {
            return None;
        }
        let i = self.point_group_index(&g.linear)?;
        Some((i, self.lattice.reduce(&g.translation)))
    }

    pub fn contains(&self, g: &AffineMap<T>) -> bool {
        match self.normal_form(g) {
            Some((i, t)) => t == self.reps[i],
            None => false,
        }
    }

    /// Lattice translation `t` with `rᵢ ∘ rⱼ = t ∘ r_k`, together with `k`.
    fn cocycle(&self, i: usize, j: usize) -> (usize, Vec<Ratio<T>>) {
        let p = self.coset_rep(i).compose(&self.coset_rep(j));
        let k = self.index[&p.linear];
        (k, vec_sub(&p.translation, &self.reps[k]))
    }

    pub fn is_orientable(&self) -> bool {
        self.point_group.iter().all(|a| a.det().is_one())
    }

    pub fn is_torsion_free(&self) -> bool {
        (1..self.point_group.len()).all(|i| {
            !torus_fixed_point_exists(&self.point_group[i], &self.reps[i], &self.lattice)
                .expect("point group stabilises a full-rank lattice")
        })
    }

    /// Relation rows of the abelianised presentation of `H1` and the number of generators:
    /// lattice coordinates first, then one symbol per non-identity point-group element.
    pub fn homology_relations(&self) -> (Vec<Vec<T>>, usize) {
        let n = self.lattice.rank();
        let k = self.point_group.len();
        let cols = n + k - 1;
        let mut rows: Vec<Vec<T>> = Vec::new();
        let basis = self.lattice.basis();
        for a in &self.point_group[1..] {
            let ar = a.to_rational();
            for b in &basis {
                let img = ar.mul_vec(b);
                let mut row = self.lattice.coords(&vec_sub(&img, b)).expect("lattice is point-group stable");
                row.resize(cols, T::zero());
                rows.push(row);
            }
        }
        for i in 1..k {
            for j in 1..k {
                let (l, t) = self.cocycle(i, j);
                let mut row: Vec<T> = self.lattice.coords(&t).expect("cocycle is a lattice vector");
                for x in row.iter_mut() {
                    *x = -x.clone();
                }
                row.resize(cols, T::zero());
                row[n + i - 1] = row[n + i - 1].clone() + T::one();
                row[n + j - 1] = row[n + j - 1].clone() + T::one();
                if l > 0 {
                    row[n + l - 1] = row[n + l - 1].clone() - T::one();
                }
                rows.push(row);
            }
        }
        rows.retain(|r| r.iter().any(|x| !x.is_zero()));
        rows.sort();
        rows.dedup();
        (rows, cols)
    }

    /// Elementary divisors of `H1` as `(betti, torsion)`.
    pub fn first_homology(&self) -> (usize, Vec<T>) {
        let (rows, cols) = self.homology_relations();
        if rows.is_empty() {
            return (cols, Vec::new());
        }
        let snf = smith_normal_form(&Matrix::from_rows(&rows));
        let rank = snf.rank();
        let torsion = snf.diagonal().into_iter().filter(|d| !d.is_zero() && !d.is_one()).collect();
        (cols - rank, torsion)
    }

    /// Nonzero homomorphisms `Γ → ℤ/2`, as values on the generators of [`Self::homology_relations`].
    pub fn mod_two_characters(&self) -> Vec<Vec<u8>> {
        let (rows, cols) = self.homology_relations();
        let two = T::from_i64(2).expect("small");
        let mut m: Vec<Vec<u8>> =
            rows.iter().map(|r| r.iter().map(|x| u8::from(!x.mod_floor(&two).is_zero())).collect()).collect();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..cols {
            let Some(p) = (r..m.len()).find(|&i| m[i][c] == 1) else { continue };
            m.swap(r, p);
            for i in 0..m.len() {
                if i != r && m[i][c] == 1 {
                    let pivot_row = m[r].clone();
                    m[i].iter_mut().zip(pivot_row).for_each(|(x, y)| *x ^= y);
                }
            }
            pivots.push(c);
            r += 1;
        }
        let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
        let basis: Vec<Vec<u8>> = free
            .iter()
            .map(|&f| {
                let mut v = vec![0u8; cols];
                v[f] = 1;
                for (row, &pc) in pivots.iter().enumerate() {
                    v[pc] = m[row][f];
                }
                v
            })
            .collect();
        (1u64..1 << basis.len())
            .map(|mask| {
                let mut v = vec![0u8; cols];
                for (k, b) in basis.iter().enumerate() {
                    if mask >> k & 1 == 1 {
                        v.iter_mut().zip(b).for_each(|(x, y)| *x ^= y);
                    }
                }
                v
            })
            .collect()
    }

    /// Value of a character from [`Self::mod_two_characters`] on an element of the group.
    pub fn character_value(&self, chi: &[u8], g: &AffineMap<T>) -> u8 {
        let (i, _) = self.normal_form(g).expect("element of the group");
        let l = vec_sub(&g.translation, &self.reps[i]);
        let two = T::from_i64(2).expect("small");
        let coords = self.lattice.coords(&l).expect("lattice vector");
        let mut v = coords.iter().zip(chi).filter(|(c, &x)| x == 1 && !c.mod_floor(&two).is_zero()).count() as u8 & 1;
        if i > 0 {
            v ^= chi[self.lattice.rank() + i - 1];
        }
        v
    }

    /// Kernels of all homomorphisms onto `ℤ/2`.
    pub fn index_two_subgroups(&self, cap: usize) -> Result<Vec<SpaceGroup<T>>, SpaceGroupError> {
        let gens = self.canonical_generators();
        self.mod_two_characters()
            .iter()
            .map(|chi| {
                let values: Vec<u8> = gens.iter().map(|g| self.character_value(chi, g)).collect();
                let s0 = gens[values.iter().position(|&v| v == 1).expect("nonzero character")].clone();
                let s0_inv = s0.inverse();
                let mut kernel = Vec::new();
                for (g, &v) in gens.iter().zip(&values) {
                    if v == 0 {
                        kernel.push(g.clone());
                        kernel.push(s0.conjugate(g));
                    } else {
                        kernel.push(g.compose(&s0_inv));
                        kernel.push(s0.compose(g));
                    }
                }
                SpaceGroup::close(self.dim, &kernel, cap)
            })
            .collect()
    }

    /// Dimension of the subspace fixed by the whole point group.
    pub fn betti_via_fixed_space(&self) -> usize {
        self.fixed_space().len()
    }

    /// Basis of `Fix(P) = ⋂ ker(A − I)`.
    pub fn fixed_space(&self) -> Vec<Vec<Ratio<T>>> {
        let n = self.dim;
        let id = Matrix::identity(n);
        let blocks: Vec<Matrix<Ratio<T>>> = self.point_group.iter().map(|a| a.sub(&id).to_rational()).collect();
        Matrix::stack(&blocks).kernel()
    }

    /// Gram matrix `Σ AᵀA` of a point-group invariant inner product.
    pub fn invariant_form(&self) -> Matrix<Ratio<T>> {
        let n = self.dim;
        self.point_group
            .iter()
            .fold(Matrix::zeros(n, n), |acc, a| acc.add(&a.transpose().mul(a)))
            .to_rational()
    }

    pub fn holonomy_group(&self) -> FiniteGroup {
        FiniteGroup::from_elements(&self.point_group, |a, b| a.mul(b), |a| self.point_group_index(a))
    }

    pub fn holonomy_label(&self) -> Result<GroupLabel, SpaceGroupError> {
        Ok(self.holonomy_group().label()?)
    }

    pub fn invariant_record(&self) -> Result<InvariantRecord, SpaceGroupError> {
        let (betti, torsion) = self.first_homology();
        Ok(InvariantRecord {
            dim: self.dim,
            orientable: self.is_orientable(),
            betti,
            torsion: torsion.iter().map(|d| d.to_u64().expect("torsion coefficient fits u64")).collect(),
            holonomy: self.holonomy_label()?,
            holonomy_order: self.point_group.len(),
        })
    }

    /// The index-2 subgroup of orientation-preserving elements.
    pub fn orientation_double_cover(&self) -> Result<SpaceGroup<T>, SpaceGroupError> {
        if self.is_orientable() {
            return Err(SpaceGroupError::AlreadyOrientable);
        }
        let mut gens: Vec<AffineMap<T>> = self.lattice.basis().into_iter().map(AffineMap::translation_by).collect();
        gens.extend((1..self.point_group.len()).filter(|&i| self.point_group[i].det().is_one()).map(|i| self.coset_rep(i)));
        // products of two orientation-reversing reps reach the rest
        let rev: Vec<usize> = (1..self.point_group.len()).filter(|&i| !self.point_group[i].det().is_one()).collect();
        if let Some(&r) = rev.first() {
            gens.extend(rev.iter().map(|&i| self.coset_rep(r).compose(&self.coset_rep(i))));
        }
        SpaceGroup::close(self.dim, &gens, self.point_group.len())
    }

    pub fn normalizes(&self, phi: &AffineMap<T>) -> bool {
        if phi.dim() != self.dim {
            return false;
        }
        let inv = phi.inverse();
        self.canonical_generators()
            .iter()
            .all(|g| self.contains(&phi.conjugate(g)) && self.contains(&inv.conjugate(g)))
    }

    /// Least `m ≥ 1` with `φ^m ∈ self`, or `None` if there is none up to `cap`.
    pub fn affinity_order(&self, phi: &AffineMap<T>, cap: usize) -> Option<usize> {
        let mut p = phi.clone();
        for m in 1..=cap {
            if self.contains(&p) {
                return Some(m);
            }
            p = p.compose(phi);
        }
        None
    }

    /// Whether the induced map of `φ` on the orbit space has no fixed point.
    pub fn manifold_fixed_point_free(&self, phi: &AffineMap<T>) -> bool {
        (0..self.point_group.len()).all(|i| {
            let g = self.coset_rep(i).compose(phi);
            !torus_fixed_point_exists(&g.linear, &g.translation, &self.lattice)
                .expect("normalizing maps stabilise the lattice")
        })
    }

    /// Direct search for finite-order elements `τ·rᵢ` with lattice coordinates of `τ` in `[−r, r]`.
    pub fn has_small_torsion(&self, r: i64) -> bool {
        let basis = self.lattice.basis();
        let n = basis.len();
        let span = (2 * r + 1) as usize;
        let total = span.pow(n as u32);
        let order = self.point_group.len() as u32;
        for i in 1..self.point_group.len() {
            for code in 0..total {
                let mut c = code;
                let mut t = self.reps[i].clone();
                for b in &basis {
                    let k = Ratio::from_integer(T::from_i64((c % span) as i64 - r).expect("small"));
                    c /= span;
                    t = vec_add(&t, &b.iter().map(|x| x * &k).collect::<Vec<_>>());
                }
                let g = AffineMap { linear: self.point_group[i].clone(), translation: t };
                let e = self.point_group[i].clone();
                let k = (1..=order).find(|&k| e.pow(k).is_identity()).expect("finite point group");
                if g.pow(k).is_identity() {
                    return true;
                }
            }
        }
        false
    }
}
