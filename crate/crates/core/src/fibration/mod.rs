//! Complete normal subgroups, generalized and original Calabi data, and the builders that turn a
//! fiber group with monodromy into the total space group.

use num_rational::Ratio;
use num_traits::Zero;

use crate::exact::{
    annihilator, dot, integer_kernel, orthogonal_complement, same_subspace, smith_normal_form, solve_integer,
    span_basis, Lattice, Matrix, Scalar,
};
use crate::spacegroup::{AffineMap, FiniteGroup, SpaceGroup, SpaceGroupError, DEFAULT_CLOSURE_CAP};
use crate::Int;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum FibrationError {
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    #[error("built group has torsion")]
    TorsionDetected,
    #[error("structure group is infinite: the action kernel does not span the orthogonal complement")]
    InfiniteStructureGroup,
    #[error("quotient has more than {0} cosets")]
    CapExceeded(usize),
    #[error(transparent)]
    SpaceGroup(#[from] SpaceGroupError),
}

/// A normal subgroup of a space group together with its span and the complement of the span.
#[derive(Clone, Debug)]
pub struct NormalSubgroupData<T: Scalar = Int> {
    pub parent: SpaceGroup<T>,
    pub sub: SpaceGroup<T>,
    pub v: Vec<Vec<Ratio<T>>>,
    pub v_perp: Vec<Vec<Ratio<T>>>,
}

impl<T: Scalar> NormalSubgroupData<T> {
    pub fn new(parent: &SpaceGroup<T>, sub: SpaceGroup<T>) -> Self {
        let n = parent.dim();
        let v = span_basis(n, &sub.lattice().basis());
        let v_perp = complement(parent, &v);
        NormalSubgroupData { parent: parent.clone(), sub, v, v_perp }
    }

    pub fn is_complete(&self) -> bool {
        complete_on(&self.parent, &self.v).map_or(false, |c| c == self.sub)
    }

    /// The fiber as a space group on `V`, in coordinates of a basis of the sub-lattice.
    pub fn fiber(&self) -> Result<SpaceGroup<T>, SpaceGroupError> {
        restrict_to_span(&self.sub, &self.v)
    }
}

/// Complement of `span` orthogonal for the point-group invariant form of `g`.
pub fn complement<T: Scalar>(g: &SpaceGroup<T>, span: &[Vec<Ratio<T>>]) -> Vec<Vec<Ratio<T>>> {
    let n = g.dim();
    if span.is_empty() {
        return span_basis(n, &(0..n).map(|i| crate::exact::unit_vec(n, i)).collect::<Vec<_>>());
    }
    span_basis(n, &orthogonal_complement(n, span, &g.invariant_form()))
}

/// Basis of the span of the translations in the subgroup generated by `gens`.
pub fn span_of<T: Scalar>(g: &SpaceGroup<T>, gens: &[AffineMap<T>]) -> Result<Vec<Vec<Ratio<T>>>, SpaceGroupError> {
    let h = SpaceGroup::close_subgroup(g.dim(), gens, g.point_group_order())?;
    Ok(span_basis(g.dim(), &h.lattice().basis()))
}

pub fn is_normal<T: Scalar>(g: &SpaceGroup<T>, gens: &[AffineMap<T>]) -> Result<bool, SpaceGroupError> {
    let h = SpaceGroup::close_subgroup(g.dim(), gens, g.point_group_order())?;
    let hg = h.canonical_generators();
    Ok(g.canonical_generators().iter().all(|x| {
        let xi = x.inverse();
        hg.iter().all(|y| h.contains(&x.conjugate(y)) && h.contains(&xi.conjugate(y)))
    }))
}

/// `{a + A ∈ G : a ∈ W, W^⊥ ⊆ Fix(A)}` for a point-group invariant subspace `W`.
pub fn complete_on<T: Scalar>(g: &SpaceGroup<T>, w: &[Vec<Ratio<T>>]) -> Result<SpaceGroup<T>, SpaceGroupError> {
    let n = g.dim();
    let w = span_basis(n, w);
    let w_perp = complement(g, &w);
    let ann = annihilator(n, &w);
    let lat = g.lattice();
    let basis = lat.basis();
    let mut gens: Vec<AffineMap<T>> = lat.intersect_subspace(&w).basis().into_iter().map(AffineMap::translation_by).collect();
    for i in 1..g.point_group_order() {
        let a = &g.point_group()[i];
        let ar = a.to_rational();
        if !w_perp.iter().all(|u| ar.mul_vec(u) == *u) {
            continue;
        }
        let rep = g.coset_rep(i);
        if let Some(z) = lattice_shift_into(&ann, &basis, rep.translation()) {
            let t: Vec<Ratio<T>> = rep
                .translation()
                .iter()
                .enumerate()
                .map(|(k, x)| {
                    basis.iter().zip(&z).fold(x.clone(), |acc, (b, zi)| acc + &b[k] * Ratio::from_integer(zi.clone()))
                })
                .collect();
            gens.push(AffineMap::new(t, a.clone())?);
        }
    }
    SpaceGroup::close_subgroup(n, &gens, g.point_group_order())
}

/// Integer `z` with `f·(x + Σ zᵢ bᵢ) = 0` for every functional `f`.
fn lattice_shift_into<T: Scalar>(
    functionals: &[Vec<Ratio<T>>],
    basis: &[Vec<Ratio<T>>],
    x: &[Ratio<T>],
) -> Option<Vec<T>> {
    if functionals.is_empty() {
        return Some(vec![T::zero(); basis.len()]);
    }
    let rows: Vec<Vec<Ratio<T>>> = functionals
        .iter()
        .map(|f| {
            let mut r: Vec<Ratio<T>> = basis.iter().map(|b| dot(f, b)).collect();
            r.push(-dot(f, x));
            r
        })
        .collect();
    let m = Matrix::from_rows(&rows);
    let den = m.denominator_lcm();
    let mi = m.scale(&Ratio::from_integer(den)).to_integer().expect("cleared denominators");
    let k = basis.len();
    let lhs = mi.block(0, mi.rows(), 0, k);
    let rhs = mi.col(k);
    solve_integer(&lhs, &rhs)
}

pub fn completion<T: Scalar>(g: &SpaceGroup<T>, gens: &[AffineMap<T>]) -> Result<NormalSubgroupData<T>, SpaceGroupError> {
    let v = span_of(g, gens)?;
    Ok(NormalSubgroupData::new(g, complete_on(g, &v)?))
}

pub fn is_complete<T: Scalar>(g: &SpaceGroup<T>, gens: &[AffineMap<T>]) -> Result<bool, SpaceGroupError> {
    let h = SpaceGroup::close_subgroup(g.dim(), gens, g.point_group_order())?;
    Ok(NormalSubgroupData::new(g, h).is_complete())
}

/// `K = {b + B ∈ G : b ∈ V^⊥, V ⊆ Fix(B)}`.
pub fn action_kernel<T: Scalar>(g: &SpaceGroup<T>, v: &[Vec<Ratio<T>>]) -> Result<SpaceGroup<T>, SpaceGroupError> {
    complete_on(g, &complement(g, v))
}

/// A finite quotient `G/H` with one representative per coset.
#[derive(Clone, Debug)]
pub struct QuotientGroup<T: Scalar = Int> {
    pub group: FiniteGroup,
    pub reps: Vec<AffineMap<T>>,
}

impl<T: Scalar> QuotientGroup<T> {
    pub fn order(&self) -> usize {
        self.group.order()
    }
}

/// Enumerates the cosets of a normal subgroup `h` of `g`.
pub fn quotient<T: Scalar>(g: &SpaceGroup<T>, h: &SpaceGroup<T>, cap: usize) -> Result<QuotientGroup<T>, FibrationError> {
    let gens = g.canonical_generators();
    let mut reps = vec![AffineMap::identity(g.dim())];
    let find = |reps: &[AffineMap<T>], x: &AffineMap<T>| {
        let xi = x.inverse();
        reps.iter().position(|r| h.contains(&xi.compose(r)))
    };
    let mut i = 0;
    while i < reps.len() {
        for s in &gens {
            let x = s.compose(&reps[i]);
            if find(&reps, &x).is_none() {
                if reps.len() >= cap {
                    return Err(FibrationError::CapExceeded(cap));
                }
                reps.push(x);
            }
        }
        i += 1;
    }
    let table = reps
        .iter()
        .map(|a| reps.iter().map(|b| find(&reps, &a.compose(b)).expect("cosets are closed")).collect())
        .collect();
    Ok(QuotientGroup { group: FiniteGroup::from_table(table), reps })
}

/// The structure group `G/NK`; finite exactly when `K` spans `V^⊥`.
pub fn structure_group<T: Scalar>(
    g: &SpaceGroup<T>,
    n: &SpaceGroup<T>,
    k: &SpaceGroup<T>,
) -> Result<QuotientGroup<T>, FibrationError> {
    let mut gens = n.canonical_generators();
    gens.extend(k.canonical_generators());
    let nk = SpaceGroup::close_subgroup(g.dim(), &gens, g.point_group_order())?;
    if !nk.lattice().is_full_rank() {
        return Err(FibrationError::InfiniteStructureGroup);
    }
    quotient(g, &nk, DEFAULT_CLOSURE_CAP)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum OrbifoldType {
    InfiniteCyclic,
    InfiniteDihedral,
    Other,
}

/// How `G/N` acts on the line `V^⊥` when `N` spans a hyperplane.
pub fn quotient_1orbifold_type<T: Scalar>(data: &NormalSubgroupData<T>) -> OrbifoldType {
    if data.v.len() + 1 != data.parent.dim() {
        return OrbifoldType::Other;
    }
    let u = &data.v_perp[0];
    let neg: Vec<Ratio<T>> = u.iter().map(|x| -x).collect();
    let mut dihedral = false;
    for a in data.parent.point_group() {
        let au = a.to_rational().mul_vec(u);
        if au == neg {
            dihedral = true;
        } else if au != *u {
            return OrbifoldType::Other;
        }
    }
    if dihedral {
        OrbifoldType::InfiniteDihedral
    } else {
        OrbifoldType::InfiniteCyclic
    }
}

fn embed<T: Scalar>(g: &AffineMap<T>, last: i64, offset: Ratio<T>) -> AffineMap<T> {
    let tail = AffineMap::new(vec![offset], Matrix::from_i64(1, 1, &[last])).expect("±1 is unimodular");
    g.direct_sum(&tail)
}

fn embedded_fiber<T: Scalar>(m: &SpaceGroup<T>) -> Vec<AffineMap<T>> {
    m.canonical_generators().iter().map(|g| embed(g, 1, Ratio::zero())).collect()
}

fn last_unit<T: Scalar>(n: usize) -> AffineMap<T> {
    AffineMap::translation_by(crate::exact::unit_vec(n, n - 1))
}

/// Mapping-torus group `⟨M, tₙ, β̂⟩` with `β̂ = b + eₙ/m + B̂`.
pub fn build_circle_total<T: Scalar>(
    m: &SpaceGroup<T>,
    beta: &AffineMap<T>,
    order: usize,
    cap: usize,
) -> Result<(SpaceGroup<T>, NormalSubgroupData<T>), FibrationError> {
    if !m.normalizes(beta) {
        return Err(FibrationError::PreconditionViolated("β does not normalize the fiber group".into()));
    }
    let actual = m.affinity_order(beta, cap);
    if actual != Some(order) {
        return Err(FibrationError::PreconditionViolated(format!("β has order {actual:?}, expected {order}")));
    }
    let n = m.dim() + 1;
    let fiber = embedded_fiber(m);
    let mut gens = fiber.clone();
    gens.push(last_unit(n));
    gens.push(embed(beta, 1, Ratio::new(T::one(), T::from_usize(order).expect("small"))));
    let g = SpaceGroup::close(n, &gens, cap)?;
    let sub = SpaceGroup::close_subgroup(n, &fiber, cap)?;
    Ok((g.clone(), NormalSubgroupData::new(&g, sub)))
}

/// Amalgam `⟨M, tₙ, β̂, γ̂⟩` with reflections `β̂ = b + B̂` and `γ̂ = c + eₙ/m + Ĉ`.
pub fn build_interval_total<T: Scalar>(
    m: &SpaceGroup<T>,
    beta: &AffineMap<T>,
    gamma: &AffineMap<T>,
    order: usize,
    cap: usize,
) -> Result<(SpaceGroup<T>, NormalSubgroupData<T>), FibrationError> {
    for (name, x) in [("β", beta), ("γ", gamma)] {
        if !m.normalizes(x) {
            return Err(FibrationError::PreconditionViolated(format!("{name} does not normalize the fiber group")));
        }
        if m.affinity_order(x, cap) != Some(2) {
            return Err(FibrationError::PreconditionViolated(format!("{name} does not induce an order 2 affinity")));
        }
        if !m.manifold_fixed_point_free(x) {
            return Err(FibrationError::PreconditionViolated(format!("{name} fixes a point of the fiber")));
        }
    }
    let actual = m.affinity_order(&gamma.compose(beta), cap);
    if actual != Some(order) {
        return Err(FibrationError::PreconditionViolated(format!("γβ has order {actual:?}, expected {order}")));
    }
    let n = m.dim() + 1;
    let fiber = embedded_fiber(m);
    let mut gens = fiber.clone();
    gens.push(last_unit(n));
    gens.push(embed(beta, -1, Ratio::zero()));
    gens.push(embed(gamma, -1, Ratio::new(T::one(), T::from_usize(order).expect("small"))));
    let g = SpaceGroup::close(n, &gens, cap)?;
    if !g.is_torsion_free() {
        return Err(FibrationError::TorsionDetected);
    }
    let sub = SpaceGroup::close_subgroup(n, &fiber, cap)?;
    Ok((g.clone(), NormalSubgroupData::new(&g, sub)))
}

/// The groups `⟨M, β⟩` and `⟨M, γ⟩`, whose orbit spaces are the two singular fibers.
pub fn singular_fibers<T: Scalar>(
    m: &SpaceGroup<T>,
    beta: &AffineMap<T>,
    gamma: &AffineMap<T>,
    cap: usize,
) -> Result<(SpaceGroup<T>, SpaceGroup<T>), SpaceGroupError> {
    let close_with = |x: &AffineMap<T>| {
        let mut gens = m.canonical_generators();
        gens.push(x.clone());
        SpaceGroup::close(m.dim(), &gens, cap)
    };
    Ok((close_with(beta)?, close_with(gamma)?))
}

/// Coordinates on `span(basis)` for vectors lying in it.
struct SubspaceCoords<T: Scalar> {
    basis: Matrix<Ratio<T>>,
    left_inverse: Matrix<Ratio<T>>,
}

impl<T: Scalar> SubspaceCoords<T> {
    fn new(basis: &[Vec<Ratio<T>>]) -> Self {
        let b = Matrix::from_rows(basis).transpose();
        let bt = b.transpose();
        let gram = bt.mul(&b).inverse().expect("basis vectors are independent");
        SubspaceCoords { left_inverse: gram.mul(&bt), basis: b }
    }

    fn coords(&self, v: &[Ratio<T>]) -> Vec<Ratio<T>> {
        self.left_inverse.mul_vec(v)
    }

    /// Matrix of `A` restricted to the subspace, in the basis.
    fn restrict(&self, a: &Matrix<Ratio<T>>) -> Option<Matrix<T>> {
        self.left_inverse.mul(a).mul(&self.basis).to_integer()
    }
}

/// A subgroup whose translations span `v` and whose elements preserve `v`, as a space group on `v`.
pub fn restrict_to_span<T: Scalar>(h: &SpaceGroup<T>, v: &[Vec<Ratio<T>>]) -> Result<SpaceGroup<T>, SpaceGroupError> {
    let basis = h.lattice().intersect_subspace(v).basis();
    let k = basis.len();
    if k == 0 {
        return SpaceGroup::close(0, &[], 1);
    }
    let c = SubspaceCoords::new(&basis);
    let gens = h
        .canonical_generators()
        .iter()
        .map(|g| {
            let a = c.restrict(&g.linear().to_rational()).ok_or(SpaceGroupError::NotUnimodular)?;
            AffineMap::new(c.coords(g.translation()), a)
        })
        .collect::<Result<Vec<_>, _>>()?;
    SpaceGroup::close(k, &gens, h.point_group_order())
}

/// `G` acting on `v` through the projection along the complement `w`.
pub fn project_onto<T: Scalar>(
    g: &SpaceGroup<T>,
    v: &[Vec<Ratio<T>>],
    w: &[Vec<Ratio<T>>],
) -> Result<SpaceGroup<T>, SpaceGroupError> {
    let n = g.dim();
    let k = v.len();
    if k == 0 {
        return SpaceGroup::close(0, &[], 1);
    }
    let mut cols = v.to_vec();
    cols.extend(w.iter().cloned());
    let full = Matrix::from_rows(&cols).transpose();
    let finv = full.inverse().expect("v and w are complementary");
    let project = |x: &[Ratio<T>]| {
        let c = finv.mul_vec(x);
        (0..n).map(|r| (0..k).fold(Ratio::zero(), |acc, j| acc + &full[(r, j)] * &c[j])).collect::<Vec<_>>()
    };
    let images: Vec<Vec<Ratio<T>>> = g.lattice().basis().iter().map(|b| project(b)).collect();
    let plat = Lattice::from_vectors(n, &images);
    let c = SubspaceCoords::new(&plat.basis());
    let gens = g
        .canonical_generators()
        .iter()
        .map(|x| {
            let a = c.restrict(&x.linear().to_rational()).ok_or(SpaceGroupError::NotUnimodular)?;
            AffineMap::new(c.coords(&project(x.translation())), a)
        })
        .collect::<Result<Vec<_>, _>>()?;
    SpaceGroup::close(k, &gens, g.point_group_order())
}

/// The original Calabi decomposition of a Bieberbach group.
#[derive(Clone, Debug)]
pub struct CalabiData<T: Scalar = Int> {
    /// `I(Γ)` as a subgroup of `Γ`.
    pub i_gamma: NormalSubgroupData<T>,
    /// Translations fixed by the point group.
    pub z_gamma: Lattice<T>,
    pub betti: usize,
    pub structure_group: QuotientGroup<T>,
    /// `I(Γ)` as a space group on its span.
    pub i_group: SpaceGroup<T>,
    /// `J(Γ) = Γ/Z(Γ)` as a space group on `Span I(Γ)`.
    pub j_group: SpaceGroup<T>,
    /// Whether the span found from homology agrees with the complement of the fixed space.
    pub spans_agree: bool,
}

/// `I(Γ)`, `Z(Γ)`, the structure group `Γ/I(Γ)Z(Γ)` and `J(Γ)`.
pub fn calabi_data<T: Scalar>(g: &SpaceGroup<T>) -> Result<CalabiData<T>, FibrationError> {
    if !g.is_torsion_free() {
        return Err(FibrationError::PreconditionViolated("group has torsion".into()));
    }
    let n = g.dim();
    let v = torsion_translation_span(g);
    let fixed = g.fixed_space();
    let spans_agree = same_subspace(n, &v, &complement(g, &fixed));
    let i_sub = complete_on(g, &v)?;
    let z_gamma = g.lattice().intersect_subspace(&fixed);
    let mut gens = i_sub.canonical_generators();
    gens.extend(z_gamma.basis().into_iter().map(AffineMap::translation_by));
    let iz = SpaceGroup::close_subgroup(n, &gens, g.point_group_order())?;
    if !iz.lattice().is_full_rank() {
        return Err(FibrationError::InfiniteStructureGroup);
    }
    let structure_group = quotient(g, &iz, DEFAULT_CLOSURE_CAP)?;
    let i_gamma = NormalSubgroupData::new(g, i_sub);
    let i_group = i_gamma.fiber()?;
    let j_group = project_onto(g, &v, &fixed)?;
    Ok(CalabiData { i_gamma, z_gamma, betti: fixed.len(), structure_group, i_group, j_group, spans_agree })
}

/// Span of the lattice vectors whose classes in `H1` have finite order.
fn torsion_translation_span<T: Scalar>(g: &SpaceGroup<T>) -> Vec<Vec<Ratio<T>>> {
    let n = g.dim();
    let (rows, cols) = g.homology_relations();
    let basis = g.lattice().basis();
    let free: Matrix<T> = if rows.is_empty() {
        Matrix::identity(cols).block(0, n, 0, cols)
    } else {
        let snf = smith_normal_form(&Matrix::from_rows(&rows));
        let r = snf.rank();
        snf.v.block(0, n, r, cols)
    };
    if free.cols() == 0 {
        return span_basis(n, &basis);
    }
    let vecs: Vec<Vec<Ratio<T>>> = integer_kernel(&free.transpose())
        .iter()
        .map(|z| {
            (0..n)
                .map(|k| basis.iter().zip(z).fold(Ratio::zero(), |acc, (b, zi)| acc + &b[k] * Ratio::from_integer(zi.clone())))
                .collect()
        })
        .collect();
    span_basis(n, &vecs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::rat;
    use crate::spacegroup::{parse_affine, parse_group, GroupLabel};

    fn aff(s: &str) -> AffineMap {
        parse_affine(s).unwrap()
    }

    fn group(text: &str) -> SpaceGroup {
        let (n, gens) = parse_group(text).unwrap();
        SpaceGroup::close(n, &gens, 1024).unwrap()
    }

    fn klein() -> SpaceGroup {
        group(include_str!("../../atlas/groups/K2.grp"))
    }

    fn torus(n: usize) -> SpaceGroup {
        SpaceGroup::split(Lattice::standard(n), &[], 1).unwrap()
    }

    fn example2() -> SpaceGroup {
        group(include_str!("../../atlas/groups/example2.grp"))
    }

    #[test]
    fn klein_bottle_fibrations() {
        let k = klein();
        let t2 = aff("0 1 | 1 0 0 1");
        assert_eq!(span_of(&k, &[t2.clone()]).unwrap(), vec![vec![rat(0, 1), rat(1, 1)]]);
        assert!(is_normal(&k, &[t2.clone()]).unwrap());
        assert!(!is_normal(&k, &[aff("1/2 0 | 1 0 0 -1")]).unwrap());
        let n = completion(&k, &[t2]).unwrap();
        assert!(n.is_complete());
        assert_eq!(quotient_1orbifold_type(&n), OrbifoldType::InfiniteCyclic);
        let kern = action_kernel(&k, &n.v).unwrap();
        assert_eq!(kern.lattice().basis(), vec![vec![rat(1, 1), rat(0, 1)]]);
        assert_eq!(kern.point_group_order(), 1);
        assert_eq!(structure_group(&k, &n.sub, &kern).unwrap().order(), 2);
        let n1 = completion(&k, &[aff("1 0 | 1 0 0 1")]).unwrap();
        assert_eq!(quotient_1orbifold_type(&n1), OrbifoldType::InfiniteDihedral);
    }

    #[test]
    fn hantzsche_wendt_fibration() {
        let g = example2();
        let gens = [aff("1 0 0 | 1 0 0 0 1 0 0 0 1"), aff("0 1 0 | 1 0 0 0 1 0 0 0 1")];
        assert!(is_normal(&g, &gens).unwrap());
        assert!(is_complete(&g, &gens).unwrap());
        let n = completion(&g, &gens).unwrap();
        assert_eq!(quotient_1orbifold_type(&n), OrbifoldType::InfiniteDihedral);
        let kern = action_kernel(&g, &n.v).unwrap();
        assert_eq!(kern.lattice().basis(), vec![vec![rat(0, 1), rat(0, 1), rat(1, 1)]]);
        let s = structure_group(&g, &n.sub, &kern).unwrap();
        assert_eq!(s.group.label().unwrap(), GroupLabel::Abelian(vec![2, 2]));
    }

    #[test]
    fn completion_of_sublattice() {
        let t = torus(2);
        let twice = [aff("2 0 | 1 0 0 1")];
        assert!(!is_complete(&t, &twice).unwrap());
        let c = completion(&t, &twice).unwrap();
        assert_eq!(c.sub.lattice().basis(), vec![vec![rat(1, 1), rat(0, 1)]]);
        let again = completion(&t, &c.sub.canonical_generators()).unwrap();
        assert_eq!(again.sub, c.sub);
        assert!(is_complete(&t, &t.canonical_generators()).unwrap());
        assert!(span_of(&t, &[]).unwrap().is_empty());
    }

    #[test]
    fn builders() {
        let t2 = torus(2);
        let (g, n) = build_circle_total(&t2, &aff("0 0 | -1 0 0 -1"), 2, 1024).unwrap();
        assert!(g.is_torsion_free());
        assert_eq!(g.first_homology(), (1, vec![Int::from(2), Int::from(2)]));
        assert!(n.is_complete());
        assert_eq!(quotient_1orbifold_type(&n), OrbifoldType::InfiniteCyclic);
        let (p, _) = build_circle_total(&t2, &AffineMap::identity(2), 1, 1024).unwrap();
        assert_eq!(p.first_homology(), (3, vec![]));
        let beta = aff("1/2 0 | 1 0 0 -1");
        let gamma = aff("0 1/2 | -1 0 0 1");
        let (h, n) = build_interval_total(&t2, &beta, &gamma, 2, 1024).unwrap();
        assert_eq!(h.first_homology(), (0, vec![Int::from(4), Int::from(4)]));
        assert_eq!(quotient_1orbifold_type(&n), OrbifoldType::InfiniteDihedral);
        let (a, b) = singular_fibers(&t2, &beta, &gamma, 1024).unwrap();
        assert_eq!(a.first_homology(), (1, vec![Int::from(2)]));
        assert_eq!(b.first_homology(), (1, vec![Int::from(2)]));
        assert!(matches!(
            build_circle_total(&t2, &aff("0 0 | -1 0 0 -1"), 3, 1024),
            Err(FibrationError::PreconditionViolated(_))
        ));
    }

    #[test]
    fn calabi_examples() {
        let k = calabi_data(&klein()).unwrap();
        assert!(k.spans_agree);
        assert_eq!(k.betti, 1);
        assert_eq!(k.z_gamma.basis(), vec![vec![rat(1, 1), rat(0, 1)]]);
        assert_eq!(k.i_gamma.sub.lattice().basis(), vec![vec![rat(0, 1), rat(1, 1)]]);
        assert_eq!(k.structure_group.order(), 2);
        assert_eq!(k.j_group.betti_via_fixed_space(), 0);
        let t = calabi_data(&torus(3)).unwrap();
        assert_eq!((t.betti, t.structure_group.order(), t.i_group.dim()), (3, 1, 0));
        let hw = calabi_data(&example2()).unwrap();
        assert_eq!((hw.betti, hw.structure_group.order(), hw.i_group.dim()), (0, 1, 3));
    }
}
