//! Bounded searches behind the classification: finite-order classes in GL(n,ℤ), order-2
//! affinities of a fiber, and equivalence of fiberings with the same fiber.
//!
//! Searches are over matrices with bounded entries. A translation part is never sampled when it
//! can be solved for: given the matrix part, the conditions on the translation are congruences
//! modulo a lattice and are solved exactly. A negative answer from a search is therefore only
//! `UnknownWithinBounds`, while a positive answer carries a checked witness.

mod glnz;

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::sync::{Arc, Mutex};

use rayon::prelude::*;

use num_traits::{One, ToPrimitive, Zero};

use crate::exact::{vec_add, Lattice, Matrix};
use crate::fibration::{build_circle_total, calabi_data, build_interval_total, singular_fibers, FibrationError};
use crate::spacegroup::{AffineMap, GroupLabel, InvariantRecord, SpaceGroup, SpaceGroupError, DEFAULT_CLOSURE_CAP};
use crate::{Int, IntMatrix, RatMatrix, RatVector, Rational};

pub use glnz::{classify_glnz, conjugacy_classes, finite_order_elements, inverse_pair_classes, GlnzClasses};

use glnz::{Partition, M3};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SearchBounds {
    /// Bound on the entries of searched matrices.
    pub entry_bound: i64,
    /// Denominator of sampled translations, in lattice coordinates.
    pub denom_bound: i64,
    /// Largest order of a finite-order matrix.
    pub order_cap: u32,
    /// Bound on the entries of conjugating matrices in GL(n,ℤ).
    pub conj_bound: i64,
}

impl Default for SearchBounds {
    fn default() -> Self {
        SearchBounds { entry_bound: 2, denom_bound: 12, order_cap: 12, conj_bound: 3 }
    }
}

/// Entry bound used for a second attempt when the first one is inconclusive.
pub const ESCALATED_ENTRY_BOUND: i64 = 3;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// `ψ` normalizing the fiber group.
    pub conjugator: AffineMap,
    /// Whether the first datum was matched against the inverse (circle) or the swapped pair (interval).
    pub flipped: bool,
    /// Correction `w`: a translation along the fixed space (circle) or a twist `u` (interval).
    pub correction: RatVector,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum EquivalenceVerdict {
    Equivalent(Witness),
    InequivalentByInvariant(String),
    UnknownWithinBounds,
}

impl EquivalenceVerdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, EquivalenceVerdict::Equivalent(_))
    }

    pub fn is_unknown(&self) -> bool {
        matches!(self, EquivalenceVerdict::UnknownWithinBounds)
    }
}

impl fmt::Display for EquivalenceVerdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EquivalenceVerdict::Equivalent(w) => write!(f, "equivalent via {}", w.conjugator),
            EquivalenceVerdict::InequivalentByInvariant(why) => write!(f, "inequivalent: {why}"),
            EquivalenceVerdict::UnknownWithinBounds => write!(f, "unknown within bounds"),
        }
    }
}

/// Monodromy data of a fibering over the circle (`gamma` absent) or the interval.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fibering {
    pub beta: AffineMap,
    pub gamma: Option<AffineMap>,
    /// Order of the structure group's cyclic part.
    pub order: usize,
}

impl Fibering {
    pub fn circle(beta: AffineMap, order: usize) -> Self {
        Fibering { beta, gamma: None, order }
    }

    pub fn interval(beta: AffineMap, gamma: AffineMap, order: usize) -> Self {
        Fibering { beta, gamma: Some(gamma), order }
    }

    /// The same fibering transported by `ψ`.
    pub fn conjugated(&self, psi: &AffineMap) -> Self {
        Fibering {
            beta: psi.conjugate(&self.beta),
            gamma: self.gamma.as_ref().map(|g| psi.conjugate(g)),
            order: self.order,
        }
    }

    /// Interval data with the two reflections exchanged.
    pub fn swapped(&self) -> Self {
        match &self.gamma {
            Some(g) => Fibering { beta: g.clone(), gamma: Some(self.beta.clone()), order: self.order },
            None => self.clone(),
        }
    }
}

/// Invariants of a fibering that any equivalence preserves.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiberingInvariants {
    pub total: InvariantRecord,
    pub structure_order: usize,
    pub singular: Option<(InvariantRecord, InvariantRecord)>,
    /// Records of `I(Γ)` and `J(Γ)` with the Calabi structure group, when these are computable.
    pub calabi: Option<(InvariantRecord, GroupLabel, InvariantRecord)>,
    pub double_cover: Option<InvariantRecord>,
    /// For each index-2 subgroup of the total group: orientable, betti, torsion, point-group order,
    /// and whether it contains the fiber group. Sorted.
    pub index_two: Vec<(bool, usize, Vec<u64>, usize, bool)>,
}

impl FiberingInvariants {
    fn difference(&self, other: &FiberingInvariants) -> Option<String> {
        if self.total != other.total {
            return Some(format!("total spaces differ ({} vs {})", self.total, other.total));
        }
        if self.calabi != other.calabi {
            return Some("Calabi data of the total spaces differ".into());
        }
        if self.double_cover != other.double_cover {
            return Some("orientation double covers differ".into());
        }
        if self.index_two != other.index_two {
            return Some("index-2 subgroups differ".into());
        }
        if self.structure_order != other.structure_order {
            return Some(format!("structure groups of order {} vs {}", self.structure_order, other.structure_order));
        }
        match (&self.singular, &other.singular) {
            (Some((a, b)), Some((c, d))) if !((a == c && b == d) || (a == d && b == c)) => {
                Some(format!("singular fibers differ ({a}; {b} vs {c}; {d})"))
            }
            _ => None,
        }
    }
}

/// A congruence `lhs · x − rhs ∈ L` on the unknowns `x = (s, extra)`.
struct Block {
    lhs: RatMatrix,
    rhs: RatVector,
}

/// Bounded normalizer of a fiber group, with matrices cached per entry bound.
pub struct FiberContext {
    fiber: SpaceGroup,
    fixed: Vec<RatVector>,
    point_group: Vec<M3>,
    standard_lattice: bool,
    cache: Mutex<BTreeMap<i64, Arc<Vec<M3>>>>,
}

fn int_to_m3(a: &IntMatrix) -> M3 {
    glnz::to_m3(&a.map(|x| x.to_i64().expect("small matrix entry")))
}

fn m3_to_int(n: usize, m: &M3) -> IntMatrix {
    glnz::from_m3(n, m).convert()
}

fn zero_cols(rows: usize, cols: usize) -> RatMatrix {
    Matrix::zeros(rows, cols)
}

fn hstack(a: &RatMatrix, b: &RatMatrix) -> RatMatrix {
    let rows: Vec<RatVector> = (0..a.rows()).map(|i| [a.row(i), b.row(i)].concat()).collect();
    if rows.is_empty() {
        return Matrix::zeros(0, a.cols() + b.cols());
    }
    Matrix::from_rows(&rows)
}

fn columns(vectors: &[RatVector], n: usize) -> RatMatrix {
    if vectors.is_empty() {
        return Matrix::zeros(n, 0);
    }
    Matrix::from_rows(vectors).transpose()
}

impl FiberContext {
    pub fn new(fiber: SpaceGroup) -> Self {
        let n = fiber.dim();
        assert!((1..=3).contains(&n), "fiber dimension must be 1, 2 or 3");
        let point_group = fiber.point_group().iter().map(int_to_m3).collect();
        let standard_lattice = *fiber.lattice() == Lattice::standard(n);
        FiberContext { fixed: fiber.fixed_space(), point_group, standard_lattice, fiber, cache: Mutex::new(BTreeMap::new()) }
    }

    pub fn fiber(&self) -> &SpaceGroup {
        &self.fiber
    }

    fn dim(&self) -> usize {
        self.fiber.dim()
    }

    fn in_point_group(&self, a: &M3) -> bool {
        self.point_group.contains(a)
    }

    /// Unimodular `S` with entries in `[−b, b]` such that `S L = L` and `S P S⁻¹ = P`.
    fn matrices(&self, bound: i64) -> Arc<Vec<M3>> {
        if let Some(m) = self.cache.lock().expect("cache lock").get(&bound) {
            return m.clone();
        }
        let n = self.dim();
        let mut out = Vec::new();
        glnz::for_each_matrix(n, bound, |s| {
            let d = glnz::det(s);
            if d != 1 && d != -1 {
                return;
            }
            let sinv = glnz::inverse(s);
            if !self.point_group.iter().all(|a| self.in_point_group(&glnz::conj(s, &sinv, a))) {
                return;
            }
            if self.standard_lattice || self.fiber.lattice().is_stabilized_by(&m3_to_int(n, s)) {
                out.push(*s);
            }
        });
        let out = Arc::new(out);
        self.cache.lock().expect("cache lock").insert(bound, out.clone());
        out
    }

    /// Normalizing matrices of `M` with entries in `[−b, b]`.
    pub fn normalizer_matrices(&self, bound: i64) -> Vec<IntMatrix> {
        self.matrices(bound).iter().map(|s| m3_to_int(self.dim(), s)).collect()
    }

    /// Conditions on `s` for `s + S` to normalize `M`, padded with `extra` zero columns.
    fn normalizer_blocks(&self, s: &IntMatrix, extra: usize) -> Vec<Block> {
        let n = self.dim();
        let sinv = s.inverse_unimodular().expect("unimodular");
        let sr = s.to_rational();
        (1..self.fiber.point_group_order())
            .map(|i| {
                let g = self.fiber.coset_rep(i);
                let x = s.mul(g.linear()).mul(&sinv);
                let k = self.fiber.point_group_index(&x).expect("S normalizes the point group");
                let rep = self.fiber.coset_rep(k);
                let lhs = Matrix::identity(n).sub(&x).to_rational();
                let rhs: RatVector = rep.translation().iter().zip(sr.mul_vec(g.translation())).map(|(r, t)| r - t).collect();
                Block { lhs: hstack(&lhs, &zero_cols(n, extra)), rhs }
            })
            .collect()
    }

    /// Condition `ψ x ψ⁻¹ ∈ (w + I) y M` with `w = corr · extra`, or `None` if the matrix parts
    /// already disagree.
    fn conjugacy_block(&self, s: &IntMatrix, x: &AffineMap, y: &AffineMap, corr: &RatMatrix) -> Option<Block> {
        let n = self.dim();
        let sinv = s.inverse_unimodular().expect("unimodular");
        let xm = s.mul(x.linear()).mul(&sinv);
        let ym_inv = y.linear().inverse_unimodular().expect("unimodular");
        let k = self.fiber.point_group_index(&ym_inv.mul(&xm))?;
        let r = self.fiber.coset_rep(k);
        let lhs = hstack(&Matrix::identity(n).sub(&xm).to_rational(), &corr.scale(&-Rational::one()));
        let target = vec_add(y.translation(), &y.linear().to_rational().mul_vec(r.translation()));
        let moved = s.to_rational().mul_vec(x.translation());
        let rhs = target.iter().zip(moved).map(|(t, m)| t - m).collect();
        Some(Block { lhs, rhs })
    }

    fn solve(&self, blocks: &[Block]) -> Option<RatVector> {
        let mats: Vec<RatMatrix> = blocks.iter().map(|b| b.lhs.clone()).collect();
        let lhs = Matrix::stack(&mats);
        let rhs: RatVector = blocks.iter().flat_map(|b| b.rhs.iter().cloned()).collect();
        let lattice = (1..blocks.len()).fold(self.fiber.lattice().clone(), |acc, _| acc.direct_sum(self.fiber.lattice()));
        crate::exact::solve_mod_lattice(&lhs, &rhs, &lattice)
    }

    fn affinity(&self, s: &IntMatrix, x: &[Rational]) -> AffineMap {
        AffineMap::new(x[..self.dim()].to_vec(), s.clone()).expect("unimodular")
    }

    /// Candidate matrices for conjugating `x` into `y·M` up to the bounds.
    fn candidates(&self, pairs: &[(&AffineMap, &AffineMap)], bound: i64) -> Vec<IntMatrix> {
        let pairs: Vec<(M3, M3)> =
            pairs.iter().map(|(x, y)| (int_to_m3(x.linear()), glnz::inverse(&int_to_m3(y.linear())))).collect();
        self.matrices(bound)
            .iter()
            .filter(|s| {
                let sinv = glnz::inverse(s);
                pairs.iter().all(|(xm, ym_inv)| self.in_point_group(&glnz::mul(ym_inv, &glnz::conj(s, &sinv, xm))))
            })
            .map(|s| m3_to_int(self.dim(), s))
            .collect()
    }

    /// Some `ψ` in the bounded normalizer with `ψ x ψ⁻¹ ≡ y` modulo `M`.
    pub fn conjugator(&self, x: &AffineMap, y: &AffineMap, bound: i64) -> Option<AffineMap> {
        let none = Matrix::zeros(self.dim(), 0);
        for s in self.candidates(&[(x, y)], bound) {
            let mut blocks = self.normalizer_blocks(&s, 0);
            blocks.push(self.conjugacy_block(&s, x, y, &none)?);
            if let Some(sol) = self.solve(&blocks) {
                let psi = self.affinity(&s, &sol);
                debug_assert!(self.fiber.normalizes(&psi));
                return Some(psi);
            }
        }
        None
    }

    /// Whether `a ≡ b` modulo `M`.
    pub fn congruent(&self, a: &AffineMap, b: &AffineMap) -> bool {
        self.fiber.contains(&b.inverse().compose(a))
    }

    /// Representative of `φ M` with lexicographically least matrix, translation reduced mod `L`.
    pub fn canonical(&self, phi: &AffineMap) -> AffineMap {
        self.fiber
            .coset_reps()
            .iter()
            .map(|r| {
                let p = r.compose(phi);
                AffineMap::new(self.fiber.lattice().reduce(p.translation()), p.linear().clone()).expect("unimodular")
            })
            .min()
            .expect("point group is nonempty")
    }

    /// Whether `s + S` normalizes `M` (with `S` already normalizing `L` and `P`).
    fn translation_normalizes(&self, s: &IntMatrix, t: &[Rational]) -> bool {
        self.normalizer_blocks(s, 0)
            .iter()
            .all(|b| self.fiber.lattice().contains(&b.lhs.mul_vec(t).iter().zip(&b.rhs).map(|(x, y)| x - y).collect::<Vec<_>>()))
    }

    /// Translations `Σ (kᵢ/D) bᵢ`, `0 ≤ kᵢ < D`, over the lattice basis `bᵢ`.
    fn translation_grid(&self, denom: i64) -> Vec<RatVector> {
        let n = self.dim();
        let basis = self.fiber.lattice().basis();
        let mut out = Vec::new();
        let total = (denom as usize).pow(n as u32);
        for idx in 0..total {
            let mut t = vec![Rational::zero(); n];
            let mut rest = idx;
            for b in &basis {
                let k = (rest % denom as usize) as i64;
                rest /= denom as usize;
                let c = Rational::new(Int::from(k), Int::from(denom));
                for (ti, bi) in t.iter_mut().zip(b) {
                    *ti += &c * bi;
                }
            }
            out.push(t);
        }
        out
    }
}

/// Normalizing affinities `s + S` with `S` in the bounded normalizer matrices and `s` on the grid
/// `(k/D)·basis`, one per coset of `M`, sorted.
pub fn normalizer_sample(ctx: &FiberContext, bounds: &SearchBounds) -> Vec<AffineMap> {
    let grid = ctx.translation_grid(bounds.denom_bound);
    let mut seen = HashSet::new();
    for s in ctx.normalizer_matrices(bounds.entry_bound) {
        for t in &grid {
            if ctx.translation_normalizes(&s, t) {
                seen.insert(ctx.canonical(&AffineMap::new(t.clone(), s.clone()).expect("unimodular")));
            }
        }
    }
    let mut out: Vec<AffineMap> = seen.into_iter().collect();
    out.sort();
    out
}

/// One conjugacy class of fixed-point-free order-2 affinities of the fiber.
#[derive(Clone, Debug)]
pub struct Order2Class {
    pub representative: AffineMap,
    pub members: Vec<AffineMap>,
    /// Invariants of `⟨M, φ⟩`, the group of the quotient manifold.
    pub quotient: InvariantRecord,
    pub quotient_group: SpaceGroup,
}

/// Fixed-point-free affinities of order 2 found in the sample, partitioned by bounded
/// conjugacy in the normalizer.
pub fn order2_fixed_point_free_classes(
    ctx: &FiberContext,
    bounds: &SearchBounds,
) -> Result<Vec<Order2Class>, SpaceGroupError> {
    let n = ctx.dim();
    let grid = ctx.translation_grid(bounds.denom_bound);
    let mut found = HashSet::new();
    for s in ctx.matrices(bounds.entry_bound).iter() {
        if !ctx.in_point_group(&glnz::mul(s, s)) {
            continue;
        }
        let s = m3_to_int(n, s);
        for t in &grid {
            if !ctx.translation_normalizes(&s, t) {
                continue;
            }
            let phi = AffineMap::new(t.clone(), s.clone()).expect("unimodular");
            if ctx.fiber.affinity_order(&phi, 2) == Some(2) && ctx.fiber.manifold_fixed_point_free(&phi) {
                found.insert(ctx.canonical(&phi));
            }
        }
    }
    let mut elems: Vec<AffineMap> = found.into_iter().collect();
    elems.sort();
    let mut part = Partition::with_len(elems.len());
    for i in 0..elems.len() {
        for j in i + 1..elems.len() {
            if part.root(i) != part.root(j) && ctx.conjugator(&elems[i], &elems[j], bounds.entry_bound).is_some() {
                part.join(i, j);
            }
        }
    }
    part.into_classes()
        .into_iter()
        .map(|class| {
            let members: Vec<AffineMap> = class.iter().map(|&i| elems[i].clone()).collect();
            let mut gens = ctx.fiber.canonical_generators();
            gens.push(members[0].clone());
            let group = SpaceGroup::close(n, &gens, DEFAULT_CLOSURE_CAP)?;
            Ok(Order2Class { representative: members[0].clone(), quotient: group.invariant_record()?, quotient_group: group, members })
        })
        .collect()
}

/// Invariants of the fibering, computed from its total group.
pub fn fibering_invariants(ctx: &FiberContext, f: &Fibering) -> Result<FiberingInvariants, FibrationError> {
    let cap = DEFAULT_CLOSURE_CAP;
    let ((total, data), singular, structure_order) = match &f.gamma {
        None => (build_circle_total(&ctx.fiber, &f.beta, f.order, cap)?, None, f.order),
        Some(g) => {
            let built = build_interval_total(&ctx.fiber, &f.beta, g, f.order, cap)?;
            let (p, q) = singular_fibers(&ctx.fiber, &f.beta, g, cap)?;
            (built, Some((p.invariant_record()?, q.invariant_record()?)), 2 * f.order)
        }
    };
    let fiber_gens = data.sub.canonical_generators();
    let mut index_two = total
        .index_two_subgroups(cap)?
        .iter()
        .map(|h| {
            let (betti, torsion) = h.first_homology();
            let torsion = torsion.iter().map(|d| d.to_u64().expect("small torsion")).collect();
            let contains_fiber = fiber_gens.iter().all(|g| h.contains(g));
            (h.is_orientable(), betti, torsion, h.point_group_order(), contains_fiber)
        })
        .collect::<Vec<_>>();
    index_two.sort();
    let calabi = calabi_data(&total).ok().and_then(|c| {
        let label = c.structure_group.group.label().ok()?;
        Some((c.i_group.invariant_record().ok()?, label, c.j_group.invariant_record().ok()?))
    });
    let double_cover = total.orientation_double_cover().ok().and_then(|d| d.invariant_record().ok());
    Ok(FiberingInvariants { total: total.invariant_record()?, structure_order, singular, calabi, double_cover, index_two })
}

/// Checks a witness independently of the search that produced it.
pub fn verify_witness(ctx: &FiberContext, a: &Fibering, b: &Fibering, w: &Witness) -> bool {
    let m = &ctx.fiber;
    if !m.normalizes(&w.conjugator) {
        return false;
    }
    let psi = &w.conjugator;
    let corr = AffineMap::translation_by(w.correction.clone());
    match (&a.gamma, &b.gamma) {
        (None, None) => {
            let target = if w.flipped { b.beta.inverse() } else { b.beta.clone() };
            let moved = corr.inverse().compose(&psi.conjugate(&a.beta));
            let fixed = m.fixed_space();
            let along_fixed = w.correction.iter().all(Zero::is_zero)
                || crate::exact::same_subspace(m.dim(), &fixed, &[fixed.clone(), vec![w.correction.clone()]].concat());
            along_fixed && ctx.congruent(&moved, &target)
        }
        (Some(ga), Some(gb)) => {
            let (x1, x2) = if w.flipped { (ga, &a.beta) } else { (&a.beta, ga) };
            let u_ok = gb.linear().to_rational().mul_vec(&w.correction) == crate::exact::vec_neg(&w.correction)
                && b.beta.linear().to_rational().mul_vec(&w.correction) == crate::exact::vec_neg(&w.correction)
                && m.point_group().iter().all(|p| p.to_rational().mul_vec(&w.correction) == w.correction);
            let one = ctx.congruent(&psi.conjugate(x1), &b.beta) && ctx.congruent(&psi.conjugate(x2), &corr.compose(gb));
            let other = ctx.congruent(&psi.conjugate(x1), &corr.compose(&b.beta)) && ctx.congruent(&psi.conjugate(x2), gb);
            u_ok && (one || other)
        }
        _ => false,
    }
}

fn circle_search(ctx: &FiberContext, a: &Fibering, b: &Fibering, bound: i64) -> Option<Witness> {
    let n = ctx.dim();
    let fixed = columns(&ctx.fixed, n);
    for flipped in [false, true] {
        let target = if flipped { b.beta.inverse() } else { b.beta.clone() };
        for s in ctx.candidates(&[(&a.beta, &target)], bound) {
            let mut blocks = ctx.normalizer_blocks(&s, fixed.cols());
            blocks.extend(ctx.conjugacy_block(&s, &a.beta, &target, &fixed));
            if let Some(sol) = ctx.solve(&blocks) {
                let correction = fixed.mul_vec(&sol[n..]);
                return Some(Witness { conjugator: ctx.affinity(&s, &sol), flipped, correction });
            }
        }
    }
    None
}

/// Basis of the twists: `u ∈ Fix(P)` with `Au = Bu = −u`.
fn twist_space(ctx: &FiberContext, a: &IntMatrix, b: &IntMatrix) -> Vec<RatVector> {
    let n = ctx.dim();
    let id = Matrix::identity(n);
    let mut blocks: Vec<RatMatrix> = ctx.fiber.point_group().iter().map(|p| p.sub(&id).to_rational()).collect();
    blocks.push(a.add(&id).to_rational());
    blocks.push(b.add(&id).to_rational());
    Matrix::stack(&blocks).kernel()
}

fn interval_search(ctx: &FiberContext, a: &Fibering, b: &Fibering, bound: i64) -> Option<Witness> {
    let n = ctx.dim();
    let (ga, gb) = (a.gamma.as_ref()?, b.gamma.as_ref()?);
    let twist = columns(&twist_space(ctx, b.beta.linear(), gb.linear()), n);
    let none = zero_cols(n, twist.cols());
    for flipped in [false, true] {
        let (x1, x2) = if flipped { (ga, &a.beta) } else { (&a.beta, ga) };
        for twist_second in [true, false] {
            let (c1, c2) = if twist_second { (&none, &twist) } else { (&twist, &none) };
            for s in ctx.candidates(&[(x1, &b.beta), (x2, gb)], bound) {
                let mut blocks = ctx.normalizer_blocks(&s, twist.cols());
                let (Some(k1), Some(k2)) =
                    (ctx.conjugacy_block(&s, x1, &b.beta, c1), ctx.conjugacy_block(&s, x2, gb, c2))
                else {
                    continue;
                };
                blocks.push(k1);
                blocks.push(k2);
                if let Some(sol) = ctx.solve(&blocks) {
                    let correction = twist.mul_vec(&sol[n..]);
                    return Some(Witness { conjugator: ctx.affinity(&s, &sol), flipped, correction });
                }
            }
        }
    }
    None
}

/// Decides equivalence of two fiberings with fiber `M`: first by invariants, then by searching
/// the bounded normalizer, escalating the entry bound once.
pub fn fiberings_equivalent(
    ctx: &FiberContext,
    a: &Fibering,
    b: &Fibering,
    bounds: &SearchBounds,
) -> Result<EquivalenceVerdict, FibrationError> {
    if a.gamma.is_some() != b.gamma.is_some() {
        return Ok(EquivalenceVerdict::InequivalentByInvariant("different bases".into()));
    }
    let (ia, ib) = (fibering_invariants(ctx, a)?, fibering_invariants(ctx, b)?);
    Ok(decide(ctx, (a, &ia), (b, &ib), bounds))
}

/// Verdicts for all pairs `i < j` of fiberings with the common fiber, in lexicographic order.
pub fn pairwise_verdicts(
    ctx: &FiberContext,
    fiberings: &[Fibering],
    bounds: &SearchBounds,
) -> Result<Vec<(usize, usize, EquivalenceVerdict)>, FibrationError> {
    let invariants: Vec<FiberingInvariants> =
        fiberings.par_iter().map(|f| fibering_invariants(ctx, f)).collect::<Result<_, _>>()?;
    let pairs: Vec<(usize, usize)> =
        (0..fiberings.len()).flat_map(|i| (i + 1..fiberings.len()).map(move |j| (i, j))).collect();
    Ok(pairs
        .into_par_iter()
        .map(|(i, j)| {
            let v = decide(ctx, (&fiberings[i], &invariants[i]), (&fiberings[j], &invariants[j]), bounds);
            (i, j, v)
        })
        .collect())
}

fn decide(
    ctx: &FiberContext,
    (a, ia): (&Fibering, &FiberingInvariants),
    (b, ib): (&Fibering, &FiberingInvariants),
    bounds: &SearchBounds,
) -> EquivalenceVerdict {
    if a.gamma.is_some() != b.gamma.is_some() {
        return EquivalenceVerdict::InequivalentByInvariant("different bases".into());
    }
    if let Some(why) = ia.difference(ib) {
        return EquivalenceVerdict::InequivalentByInvariant(why);
    }
    let search = |bound| match a.gamma {
        None => circle_search(ctx, a, b, bound),
        Some(_) => interval_search(ctx, a, b, bound),
    };
    let mut bound_list = vec![bounds.entry_bound];
    if bounds.entry_bound < ESCALATED_ENTRY_BOUND {
        bound_list.push(ESCALATED_ENTRY_BOUND);
    }
    for bound in bound_list {
        if let Some(w) = search(bound) {
            assert!(verify_witness(ctx, a, b, &w), "search produced an invalid witness");
            return EquivalenceVerdict::Equivalent(w);
        }
    }
    EquivalenceVerdict::UnknownWithinBounds
}

pub fn circle_fiberings_equivalent(
    ctx: &FiberContext,
    a: &Fibering,
    b: &Fibering,
    bounds: &SearchBounds,
) -> Result<EquivalenceVerdict, FibrationError> {
    if a.gamma.is_some() || b.gamma.is_some() {
        return Err(FibrationError::PreconditionViolated("circle data expected".into()));
    }
    fiberings_equivalent(ctx, a, b, bounds)
}

pub fn interval_pairs_equivalent(
    ctx: &FiberContext,
    a: &Fibering,
    b: &Fibering,
    bounds: &SearchBounds,
) -> Result<EquivalenceVerdict, FibrationError> {
    if a.gamma.is_none() || b.gamma.is_none() {
        return Err(FibrationError::PreconditionViolated("interval data expected".into()));
    }
    fiberings_equivalent(ctx, a, b, bounds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spacegroup::parse_affine;

    fn klein() -> SpaceGroup {
        let gens: Vec<AffineMap> =
            ["1 0 | 1 0 0 1", "0 1 | 1 0 0 1", "1/2 0 | 1 0 0 -1"].iter().map(|s| parse_affine(s).unwrap()).collect();
        SpaceGroup::close(2, &gens, 64).unwrap()
    }

    fn torus(n: usize) -> SpaceGroup {
        let gens: Vec<AffineMap> = (0..n).map(|i| AffineMap::translation_by(crate::exact::unit_vec(n, i))).collect();
        SpaceGroup::close(n, &gens, 1).unwrap()
    }

    #[test]
    fn torus_normalizer_is_all_bounded_unimodular() {
        let ctx = FiberContext::new(torus(2));
        let mats = ctx.normalizer_matrices(1);
        let mut count = 0;
        glnz::for_each_matrix(2, 1, |m| {
            if glnz::det(m).abs() == 1 {
                count += 1;
            }
        });
        assert_eq!(mats.len(), count);
    }

    #[test]
    fn klein_order_two_classes() {
        let ctx = FiberContext::new(klein());
        let b = SearchBounds { entry_bound: 1, denom_bound: 4, ..SearchBounds::default() };
        let classes = order2_fixed_point_free_classes(&ctx, &b).unwrap();
        assert_eq!(classes.len(), 1);
    }

    #[test]
    fn conjugated_circle_datum_is_equivalent() {
        let ctx = FiberContext::new(torus(2));
        let beta = parse_affine("0 0 | 0 -1 1 0").unwrap();
        let a = Fibering::circle(beta, 4);
        let psi = parse_affine("1/3 1/5 | 1 1 0 1").unwrap();
        let b = a.conjugated(&psi);
        let v = circle_fiberings_equivalent(&ctx, &a, &b, &SearchBounds::default()).unwrap();
        assert!(v.is_equivalent(), "{v}");
    }
}
