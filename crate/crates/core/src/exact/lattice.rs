use num_rational::Ratio;
use num_traits::{One, Zero};

use super::normal_form::{hermite_normal_form, integer_kernel, smith_normal_form};
use super::{denominator_lcm, ExactError, Matrix, Scalar};

/// A lattice in Qⁿ, stored as `basis / denom` with `basis` an integral row-style HNF whose rows
/// are the basis vectors. The pair is normalised so equal lattices compare equal.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice<T: Scalar> {
    dim: usize,
    denom: T,
    basis: Matrix<T>,
    // inverse transpose of the basis for full-rank lattices, used for coordinates
    coord_map: Option<Matrix<Ratio<T>>>,
}

impl<T: Scalar> std::fmt::Debug for Lattice<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Lattice({:?} / {})", self.basis, self.denom)
    }
}

impl<T: Scalar> Lattice<T> {
    pub fn standard(dim: usize) -> Self {
        Self::from_integer_rows(dim, T::one(), Matrix::identity(dim))
    }

    pub fn zero(dim: usize) -> Self {
        Self::from_integer_rows(dim, T::one(), Matrix::zeros(0, dim))
    }

    pub fn from_vectors(dim: usize, vectors: &[Vec<Ratio<T>>]) -> Self {
        let den = vectors.iter().fold(T::one(), |acc, v| acc.lcm(&denominator_lcm(v)));
        let rows: Vec<Vec<T>> = vectors
            .iter()
            .map(|v| {
                assert_eq!(v.len(), dim, "vector dimension mismatch");
                v.iter().map(|x| (x * Ratio::from_integer(den.clone())).to_integer()).collect()
            })
            .collect();
        let m = if rows.is_empty() { Matrix::zeros(0, dim) } else { Matrix::from_rows(&rows) };
        Self::from_integer_rows(dim, den, m)
    }

    fn from_integer_rows(dim: usize, denom: T, rows: Matrix<T>) -> Self {
        let (h, _) = hermite_normal_form(&rows);
        let r = (0..h.rows()).take_while(|&i| h.row(i).iter().any(|x| !x.is_zero())).count();
        let mut basis = h.block(0, r, 0, dim);
        let g = basis.entries().iter().fold(denom.clone(), |acc, x| acc.gcd(x));
        let denom = denom / g.clone();
        if !g.is_one() {
            basis = basis.map(|x| x.clone() / g.clone());
        }
        let coord_map = (r == dim).then(|| {
            let b = basis.to_rational().scale(&Ratio::new(T::one(), denom.clone()));
            b.transpose().inverse().expect("full-rank lattice basis is invertible")
        });
        Lattice { dim, denom, basis, coord_map }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn rank(&self) -> usize {
        self.basis.rows()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.dim
    }

    pub fn basis(&self) -> Vec<Vec<Ratio<T>>> {
        (0..self.rank())
            .map(|i| self.basis.row(i).iter().map(|x| Ratio::new(x.clone(), self.denom.clone())).collect())
            .collect()
    }

    /// Basis vectors as the columns of an n×r matrix.
    pub fn basis_columns(&self) -> Matrix<Ratio<T>> {
        let b = self.basis();
        if b.is_empty() {
            return Matrix::zeros(self.dim, 0);
        }
        Matrix::from_rows(&b).transpose()
    }

    /// Integer coordinates of `v` in the HNF basis, if `v` lies in the lattice.
    pub fn coords(&self, v: &[Ratio<T>]) -> Option<Vec<T>> {
        let den = Ratio::from_integer(self.denom.clone());
        let mut w: Vec<Ratio<T>> = v.iter().map(|x| x * &den).collect();
        if !w.iter().all(Ratio::is_integer) {
            return None;
        }
        let mut out = Vec::with_capacity(self.rank());
        for i in 0..self.rank() {
            let row = self.basis.row(i);
            let p = row.iter().position(|x| !x.is_zero()).expect("HNF rows are nonzero");
            let q = w[p].clone() / Ratio::from_integer(row[p].clone());
            if !q.is_integer() {
                return None;
            }
            for (wj, bj) in w.iter_mut().zip(row) {
                *wj = wj.clone() - q.clone() * Ratio::from_integer(bj.clone());
            }
            out.push(q.to_integer());
        }
        w.iter().all(Zero::is_zero).then_some(out)
    }

    pub fn contains(&self, v: &[Ratio<T>]) -> bool {
        self.coords(v).is_some()
    }

    /// Rational coordinates in the basis; full-rank lattices only.
    pub fn rational_coords(&self, v: &[Ratio<T>]) -> Vec<Ratio<T>> {
        self.coord_map.as_ref().expect("rational coordinates need a full-rank lattice").mul_vec(v)
    }

    pub fn from_coords(&self, c: &[Ratio<T>]) -> Vec<Ratio<T>> {
        self.basis_columns().mul_vec(c)
    }

    /// Canonical representative of `v + L`. Full-rank lattices reduce lattice coordinates into
    /// `[0,1)`; lower-rank lattices reduce the pivot coordinates of the HNF.
    pub fn reduce(&self, v: &[Ratio<T>]) -> Vec<Ratio<T>> {
        if self.is_full_rank() {
            let c: Vec<Ratio<T>> = self.rational_coords(v).iter().map(|x| x - x.floor()).collect();
            return self.from_coords(&c);
        }
        let den = Ratio::from_integer(self.denom.clone());
        let mut w: Vec<Ratio<T>> = v.iter().map(|x| x * &den).collect();
        for i in 0..self.rank() {
            let row = self.basis.row(i);
            let p = row.iter().position(|x| !x.is_zero()).expect("HNF rows are nonzero");
            let q = (w[p].clone() / Ratio::from_integer(row[p].clone())).floor();
            for (wj, bj) in w.iter_mut().zip(row) {
                *wj = wj.clone() - q.clone() * Ratio::from_integer(bj.clone());
            }
        }
        w.iter().map(|x| x / &den).collect()
    }

    pub fn is_stabilized_by(&self, a: &Matrix<T>) -> bool {
        let ar = a.to_rational();
        self.basis().iter().all(|b| self.contains(&ar.mul_vec(b)))
    }

    pub fn contains_lattice(&self, other: &Lattice<T>) -> bool {
        other.basis().iter().all(|b| self.contains(b))
    }

    pub fn sum(&self, other: &Lattice<T>) -> Lattice<T> {
        let mut v = self.basis();
        v.extend(other.basis());
        Lattice::from_vectors(self.dim, &v)
    }

    /// Lattice of `L ⊕ L'` in `Q^{n+n'}`.
    pub fn direct_sum(&self, other: &Lattice<T>) -> Lattice<T> {
        let n = self.dim + other.dim;
        let mut v: Vec<Vec<Ratio<T>>> = self
            .basis()
            .into_iter()
            .map(|mut b| {
                b.resize(n, Ratio::zero());
                b
            })
            .collect();
        for b in other.basis() {
            let mut w = vec![Ratio::zero(); self.dim];
            w.extend(b);
            v.push(w);
        }
        Lattice::from_vectors(n, &v)
    }

    /// `V ∩ L` for a rational subspace `V` given by spanning vectors.
    pub fn intersect_subspace(&self, span: &[Vec<Ratio<T>>]) -> Lattice<T> {
        let ann = annihilator(self.dim, span);
        if ann.is_empty() {
            return self.clone();
        }
        let basis = self.basis();
        if basis.is_empty() {
            return self.clone();
        }
        // rows: annihilator functionals evaluated on basis vectors
        let rows: Vec<Vec<Ratio<T>>> =
            ann.iter().map(|w| basis.iter().map(|b| dot(w, b)).collect()).collect();
        let m = Matrix::from_rows(&rows);
        let den = m.denominator_lcm();
        let mi = m.scale(&Ratio::from_integer(den)).to_integer().expect("cleared denominators");
        let vecs: Vec<Vec<Ratio<T>>> = integer_kernel(&mi)
            .iter()
            .map(|z| {
                let mut v = vec![Ratio::zero(); self.dim];
                for (zi, b) in z.iter().zip(&basis) {
                    for (vj, bj) in v.iter_mut().zip(b) {
                        *vj = vj.clone() + bj * Ratio::from_integer(zi.clone());
                    }
                }
                v
            })
            .collect();
        Lattice::from_vectors(self.dim, &vecs)
    }
}

pub fn dot<T: Scalar>(a: &[Ratio<T>], b: &[Ratio<T>]) -> Ratio<T> {
    a.iter().zip(b).fold(Ratio::zero(), |acc, (x, y)| acc + x * y)
}

/// Basis of the row space of the given vectors (reduced echelon rows).
pub fn span_basis<T: Scalar>(dim: usize, vectors: &[Vec<Ratio<T>>]) -> Vec<Vec<Ratio<T>>> {
    if vectors.is_empty() {
        return Vec::new();
    }
    let (r, piv) = Matrix::from_rows(vectors).rref();
    debug_assert_eq!(r.cols(), dim);
    (0..piv.len()).map(|i| r.row(i).to_vec()).collect()
}

/// Linear functionals vanishing on the span, as rows.
pub fn annihilator<T: Scalar>(dim: usize, span: &[Vec<Ratio<T>>]) -> Vec<Vec<Ratio<T>>> {
    if span.is_empty() {
        return (0..dim)
            .map(|i| (0..dim).map(|j| if i == j { Ratio::one() } else { Ratio::zero() }).collect())
            .collect();
    }
    Matrix::from_rows(span).kernel()
}

/// Complement of `span` orthogonal with respect to the symmetric form `q`.
pub fn orthogonal_complement<T: Scalar>(
    dim: usize,
    span: &[Vec<Ratio<T>>],
    q: &Matrix<Ratio<T>>,
) -> Vec<Vec<Ratio<T>>> {
    let functionals: Vec<Vec<Ratio<T>>> = span.iter().map(|v| q.transpose().mul_vec(v)).collect();
    annihilator(dim, &functionals)
}

pub fn same_subspace<T: Scalar>(dim: usize, a: &[Vec<Ratio<T>>], b: &[Vec<Ratio<T>>]) -> bool {
    span_basis(dim, a) == span_basis(dim, b)
}

/// Decides whether `x ↦ c + Cx` fixes a point of the torus `Rⁿ/L`, i.e. whether
/// `(C − I)x + c ∈ L` has a real solution `x`.
pub fn torus_fixed_point_exists<T: Scalar>(
    c_mat: &Matrix<T>,
    c: &[Ratio<T>],
    lattice: &Lattice<T>,
) -> Result<bool, ExactError> {
    let n = lattice.dim();
    if !lattice.is_full_rank() {
        return Err(ExactError::RankDeficient);
    }
    let b = lattice.basis_columns();
    let binv = b.inverse().expect("full rank");
    let local = binv.mul(&c_mat.to_rational()).mul(&b);
    let local = local.to_integer().ok_or(ExactError::NotStabilizing)?;
    let shifted = local.sub(&Matrix::identity(n));
    let snf = smith_normal_form(&shifted);
    let uc = snf.u.to_rational().mul_vec(&binv.mul_vec(c));
    let r = snf.rank();
    Ok(uc[r..].iter().all(Ratio::is_integer))
}

/// Some `s` with `M s − c ∈ L`, where `L` is a full-rank lattice in the target space.
pub fn solve_mod_lattice<T: Scalar>(
    m: &Matrix<Ratio<T>>,
    c: &[Ratio<T>],
    lattice: &Lattice<T>,
) -> Option<Vec<Ratio<T>>> {
    assert!(lattice.is_full_rank());
    let g = lattice.coord_map.as_ref().expect("full rank").mul(m);
    let c = lattice.rational_coords(c);
    let delta = g.denominator_lcm();
    let gi = g.scale(&Ratio::from_integer(delta.clone())).to_integer().expect("cleared denominators");
    let snf = smith_normal_form(&gi);
    let w = snf.u.to_rational().mul_vec(&c);
    let diag = snf.diagonal();
    let mut y = vec![Ratio::zero(); m.cols()];
    for (i, wi) in w.iter().enumerate() {
        match diag.get(i) {
            Some(d) if !d.is_zero() => y[i] = wi / Ratio::from_integer(d.clone()),
            _ if !wi.is_integer() => return None,
            _ => {}
        }
    }
    let s = snf.v.to_rational().mul_vec(&y);
    Some(s.iter().map(|x| x * Ratio::from_integer(delta.clone())).collect())
}
