//! Finite-order elements of GL(n,ℤ), n ≤ 3, and their conjugacy classes.

use std::collections::{BTreeMap, HashMap};

use crate::exact::Matrix;

use super::SearchBounds;

/// A matrix of size ≤ 3, padded with the identity.
pub(crate) type M3 = [[i64; 3]; 3];

pub(crate) const ID3: M3 = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];

pub(crate) fn mul(a: &M3, b: &M3) -> M3 {
    let mut c = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
        }
    }
    c
}

pub(crate) fn det(a: &M3) -> i64 {
    a[0][0] * (a[1][1] * a[2][2] - a[1][2] * a[2][1]) - a[0][1] * (a[1][0] * a[2][2] - a[1][2] * a[2][0])
        + a[0][2] * (a[1][0] * a[2][1] - a[1][1] * a[2][0])
}

/// Inverse of a matrix with determinant ±1.
pub(crate) fn inverse(a: &M3) -> M3 {
    let d = det(a);
    debug_assert!(d == 1 || d == -1);
    let mut r = [[0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let (i1, i2) = ((j + 1) % 3, (j + 2) % 3);
            let (j1, j2) = ((i + 1) % 3, (i + 2) % 3);
            r[i][j] = d * (a[i1][j1] * a[i2][j2] - a[i1][j2] * a[i2][j1]);
        }
    }
    r
}

pub(crate) fn conj(p: &M3, pinv: &M3, g: &M3) -> M3 {
    mul(&mul(p, g), pinv)
}

pub(crate) fn to_m3(a: &Matrix<i64>) -> M3 {
    let mut m = ID3;
    for i in 0..a.rows() {
        for j in 0..a.cols() {
            m[i][j] = a[(i, j)];
        }
    }
    m
}

pub(crate) fn from_m3(n: usize, m: &M3) -> Matrix<i64> {
    Matrix::from_vec(n, n, (0..n).flat_map(|i| (0..n).map(move |j| m[i][j])).collect())
}

/// Calls `f` on every n×n matrix with entries in `[−b, b]`, padded to 3×3.
pub(crate) fn for_each_matrix(n: usize, b: i64, mut f: impl FnMut(&M3)) {
    let cells = n * n;
    let span = 2 * b + 1;
    let mut digits = vec![0i64; cells];
    let mut m = ID3;
    for i in 0..n {
        for j in 0..n {
            m[i][j] = -b;
        }
    }
    loop {
        f(&m);
        let mut k = 0;
        loop {
            if k == cells {
                return;
            }
            digits[k] += 1;
            if digits[k] < span {
                m[k / n][k % n] = digits[k] - b;
                break;
            }
            digits[k] = 0;
            m[k / n][k % n] = -b;
            k += 1;
        }
    }
}

fn order(a: &M3, cap: u32) -> Option<u32> {
    let mut p = *a;
    for k in 1..=cap {
        if p == ID3 {
            return Some(k);
        }
        p = mul(&p, a);
    }
    None
}

/// Unimodular matrices of finite order ≤ `order_cap` with entries bounded by `entry_bound`, sorted.
pub fn finite_order_elements(n: usize, bounds: &SearchBounds) -> Vec<Matrix<i64>> {
    assert!((1..=3).contains(&n), "dimension must be 1, 2 or 3");
    let mut out = Vec::new();
    for_each_matrix(n, bounds.entry_bound, |m| {
        let d = det(m);
        if (d == 1 || d == -1) && order(m, bounds.order_cap).is_some() {
            out.push(from_m3(n, m));
        }
    });
    out.sort();
    out
}

pub(crate) struct UnionFind(Vec<usize>);

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind((0..n).collect())
    }

    fn find(&mut self, x: usize) -> usize {
        let mut r = x;
        while self.0[r] != r {
            r = self.0[r];
        }
        let mut y = x;
        while self.0[y] != r {
            let next = self.0[y];
            self.0[y] = r;
            y = next;
        }
        r
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
        self.0[hi] = lo;
        true
    }

    fn classes(&mut self) -> Vec<Vec<usize>> {
        let mut by_root: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for i in 0..self.0.len() {
            let r = self.find(i);
            by_root.entry(r).or_default().push(i);
        }
        by_root.into_values().collect()
    }
}

pub(crate) use UnionFind as Partition;

impl UnionFind {
    pub(crate) fn with_len(n: usize) -> Self {
        Self::new(n)
    }

    pub(crate) fn join(&mut self, a: usize, b: usize) -> bool {
        self.union(a, b)
    }

    pub(crate) fn root(&mut self, x: usize) -> usize {
        self.find(x)
    }

    pub(crate) fn into_classes(mut self) -> Vec<Vec<usize>> {
        self.classes()
    }
}

/// Generators of GL(n,ℤ): transvections, a sign change, and transpositions.
fn glnz_generators(n: usize) -> Vec<M3> {
    let mut gens = Vec::new();
    for i in 0..n {
        for j in 0..n {
            if i != j {
                for s in [1, -1] {
                    let mut t = ID3;
                    t[i][j] = s;
                    gens.push(t);
                }
                let mut p = ID3;
                p[i][i] = 0;
                p[j][j] = 0;
                p[i][j] = 1;
                p[j][i] = 1;
                gens.push(p);
            }
        }
        let mut d = ID3;
        d[i][i] = -1;
        gens.push(d);
    }
    gens
}

/// Partition of `elements` into GL(n,ℤ)-conjugacy classes, found by conjugating within the set by
/// the standard generators, then by every unimodular matrix with entries up to `conj_bound`.
/// Classes may be split if the bounds are too small, never wrongly merged.
pub fn conjugacy_classes(n: usize, elements: &[Matrix<i64>], bounds: &SearchBounds) -> Vec<Vec<usize>> {
    let ms: Vec<M3> = elements.iter().map(to_m3).collect();
    let index: HashMap<M3, usize> = ms.iter().enumerate().map(|(i, m)| (*m, i)).collect();
    let mut uf = UnionFind::new(ms.len());
    for p in glnz_generators(n) {
        let pinv = inverse(&p);
        for (i, g) in ms.iter().enumerate() {
            if let Some(&j) = index.get(&conj(&p, &pinv, g)) {
                uf.union(i, j);
            }
        }
    }
    // classes sharing (order, trace, det) may still be conjugate
    let mut buckets: BTreeMap<(u32, i64, i64), Vec<usize>> = BTreeMap::new();
    for class in uf.classes() {
        let g = &ms[class[0]];
        let key = (order(g, bounds.order_cap).unwrap_or(0), g[0][0] + g[1][1] + g[2][2], det(g));
        buckets.entry(key).or_default().push(class[0]);
    }
    let reps: Vec<usize> = buckets.values().filter(|b| b.len() > 1).flatten().copied().collect();
    if !reps.is_empty() {
        for_each_matrix(n, bounds.conj_bound, |p| {
            let d = det(p);
            if d != 1 && d != -1 {
                return;
            }
            let pinv = inverse(p);
            for &r in &reps {
                if let Some(&j) = index.get(&conj(p, &pinv, &ms[r])) {
                    uf.union(r, j);
                }
            }
        });
    }
    uf.classes()
}

/// Merges the class of each element with the class of its inverse.
pub fn inverse_pair_classes(elements: &[Matrix<i64>], classes: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let index: HashMap<M3, usize> = elements.iter().enumerate().map(|(i, m)| (to_m3(m), i)).collect();
    let mut uf = UnionFind::new(elements.len());
    for class in classes {
        for w in class.windows(2) {
            uf.union(w[0], w[1]);
        }
    }
    for (i, m) in elements.iter().enumerate() {
        if let Some(&j) = index.get(&inverse(&to_m3(m))) {
            uf.union(i, j);
        }
    }
    uf.classes()
}

/// Inverse-pair classes of finite-order elements of GL(n,ℤ) within the bounds.
#[derive(Clone, Debug)]
pub struct GlnzClasses {
    pub n: usize,
    pub elements: Vec<Matrix<i64>>,
    pub conjugacy: Vec<Vec<usize>>,
    pub inverse_pairs: Vec<Vec<usize>>,
}

impl GlnzClasses {
    /// The member of a class with the smallest entries and fewest nonzeros.
    pub fn representative(&self, class: usize) -> &Matrix<i64> {
        self.inverse_pairs[class]
            .iter()
            .map(|&i| &self.elements[i])
            .min_by_key(|m| (m.max_abs(), m.entries().iter().filter(|x| **x != 0).count(), (*m).clone()))
            .expect("classes are nonempty")
    }

    pub fn representatives(&self) -> Vec<&Matrix<i64>> {
        (0..self.inverse_pairs.len()).map(|c| self.representative(c)).collect()
    }

    pub fn class_of(&self, a: &Matrix<i64>) -> Option<usize> {
        let i = self.elements.binary_search(a).ok()?;
        self.inverse_pairs.iter().position(|c| c.contains(&i))
    }

    pub fn element_order(&self, a: &Matrix<i64>) -> Option<u32> {
        order(&to_m3(a), 12)
    }
}

pub fn classify_glnz(n: usize, bounds: &SearchBounds) -> GlnzClasses {
    let elements = finite_order_elements(n, bounds);
    let conjugacy = conjugacy_classes(n, &elements, bounds);
    let inverse_pairs = inverse_pair_classes(&elements, &conjugacy);
    GlnzClasses { n, elements, conjugacy, inverse_pairs }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_matrix_arithmetic() {
        let a = [[0, -1, 0], [1, -1, 0], [0, 0, 1]];
        assert_eq!(det(&a), 1);
        assert_eq!(mul(&a, &inverse(&a)), ID3);
        assert_eq!(order(&a, 12), Some(3));
        let mut count = 0;
        for_each_matrix(2, 1, |_| count += 1);
        assert_eq!(count, 81);
    }

    #[test]
    fn dimension_one() {
        let c = classify_glnz(1, &SearchBounds::default());
        assert_eq!(c.elements, vec![Matrix::from_vec(1, 1, vec![-1]), Matrix::from_vec(1, 1, vec![1])]);
        assert_eq!(c.inverse_pairs.len(), 2);
    }
}
