
use super::{Matrix, Scalar};

/// Smith normal form `U·A·V = D`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SnfResult<T: Scalar> {
    pub u: Matrix<T>,
    pub d: Matrix<T>,
    pub v: Matrix<T>,
}

impl<T: Scalar> SnfResult<T> {
    pub fn diagonal(&self) -> Vec<T> {
        (0..self.d.rows().min(self.d.cols())).map(|i| self.d[(i, i)].clone()).collect()
    }

    pub fn rank(&self) -> usize {
        self.diagonal().iter().filter(|x| !x.is_zero()).count()
    }
}

fn row_axpy<T: Scalar>(m: &mut Matrix<T>, dst: usize, src: usize, q: &T) {
    for j in 0..m.cols() {
        let v = m[(dst, j)].clone() - q.clone() * m[(src, j)].clone();
        m[(dst, j)] = v;
    }
}

fn col_axpy<T: Scalar>(m: &mut Matrix<T>, dst: usize, src: usize, q: &T) {
    for i in 0..m.rows() {
        let v = m[(i, dst)].clone() - q.clone() * m[(i, src)].clone();
        m[(i, dst)] = v;
    }
}

fn negate_row<T: Scalar>(m: &mut Matrix<T>, i: usize) {
    for j in 0..m.cols() {
        m[(i, j)] = -m[(i, j)].clone();
    }
}

pub fn smith_normal_form<T: Scalar>(a: &Matrix<T>) -> SnfResult<T> {
    let (m, n) = (a.rows(), a.cols());
    let mut d = a.clone();
    let mut u = Matrix::identity(m);
    let mut v = Matrix::identity(n);
    for t in 0..m.min(n) {
        loop {
            // pivot: smallest nonzero absolute value, first in row-major order
            let mut best: Option<(usize, usize, T)> = None;
            for i in t..m {
                for j in t..n {
                    let x = d[(i, j)].abs();
                    if !x.is_zero() && best.as_ref().map_or(true, |b| x < b.2) {
                        best = Some((i, j, x));
                    }
                }
            }
            let Some((pi, pj, _)) = best else {
                return SnfResult { u, d, v };
            };
            d.swap_rows(t, pi);
            u.swap_rows(t, pi);
            d.swap_cols(t, pj);
            v.swap_cols(t, pj);

            let mut dirty = false;
            for i in t + 1..m {
                if !d[(i, t)].is_zero() {
                    let q = d[(i, t)].clone() / d[(t, t)].clone();
                    row_axpy(&mut d, i, t, &q);
                    row_axpy(&mut u, i, t, &q);
                    dirty |= !d[(i, t)].is_zero();
                }
            }
            for j in t + 1..n {
                if !d[(t, j)].is_zero() {
                    let q = d[(t, j)].clone() / d[(t, t)].clone();
                    col_axpy(&mut d, j, t, &q);
                    col_axpy(&mut v, j, t, &q);
                    dirty |= !d[(t, j)].is_zero();
                }
            }
            if dirty {
                continue;
            }
            let p = d[(t, t)].clone();
            let bad = (t + 1..m).find(|&i| (t + 1..n).any(|j| !(d[(i, j)].clone() % p.clone()).is_zero()));
            match bad {
                Some(i) => {
                    let minus_one = -T::one();
                    row_axpy(&mut d, t, i, &minus_one);
                    row_axpy(&mut u, t, i, &minus_one);
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            negate_row(&mut d, t);
            negate_row(&mut u, t);
        }
    }
    SnfResult { u, d, v }
}

/// Row-style Hermite normal form: `U·A = H`, `H` in row echelon form with positive pivots and
/// entries above each pivot reduced into `[0, pivot)`. Zero rows sit at the bottom.
pub fn hermite_normal_form<T: Scalar>(a: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
    let (m, n) = (a.rows(), a.cols());
    let mut h = a.clone();
    let mut u = Matrix::identity(m);
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        loop {
            let best = (r..m)
                .filter(|&i| !h[(i, c)].is_zero())
                .min_by(|&i, &j| h[(i, c)].abs().cmp(&h[(j, c)].abs()).then(i.cmp(&j)));
            let Some(p) = best else { break };
            h.swap_rows(r, p);
            u.swap_rows(r, p);
            let mut done = true;
            for i in r + 1..m {
                if !h[(i, c)].is_zero() {
                    let q = h[(i, c)].div_floor(&h[(r, c)]);
                    row_axpy(&mut h, i, r, &q);
                    row_axpy(&mut u, i, r, &q);
                    done &= h[(i, c)].is_zero();
                }
            }
            if done {
                break;
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            negate_row(&mut h, r);
            negate_row(&mut u, r);
        }
        for i in 0..r {
            let q = h[(i, c)].div_floor(&h[(r, c)]);
            if !q.is_zero() {
                row_axpy(&mut h, i, r, &q);
                row_axpy(&mut u, i, r, &q);
            }
        }
        r += 1;
    }
    (h, u)
}

/// Z-basis (as rows) of the integer kernel {z ∈ Zⁿ : A z = 0}.
pub fn integer_kernel<T: Scalar>(a: &Matrix<T>) -> Vec<Vec<T>> {
    let snf = smith_normal_form(a);
    let r = snf.rank();
    (r..a.cols()).map(|j| snf.v.col(j)).collect()
}

/// Some z ∈ Zⁿ with A z = y, if one exists.
pub fn solve_integer<T: Scalar>(a: &Matrix<T>, y: &[T]) -> Option<Vec<T>> {
    let snf = smith_normal_form(a);
    let w = snf.u.mul_vec(y);
    let diag = snf.diagonal();
    let mut sol = vec![T::zero(); a.cols()];
    for (i, wi) in w.iter().enumerate() {
        match diag.get(i) {
            Some(d) if !d.is_zero() => {
                if !(wi.clone() % d.clone()).is_zero() {
                    return None;
                }
                sol[i] = wi.clone() / d.clone();
            }
            _ => {
                if !wi.is_zero() {
                    return None;
                }
            }
        }
    }
    Some(snf.v.mul_vec(&sol))
}
