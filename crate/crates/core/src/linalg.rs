//! Exact linear algebra over the rationals (fraction-free elimination) and a
//! thin floating-point rank helper.

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use crate::scalar::Scalar;

/// Clears denominators of a rational vector, returning a primitive integer
/// vector spanning the same line.
pub fn primitive_integer_vector(v: &[Scalar]) -> Vec<BigInt> {
    let mut lcm = BigInt::one();
    for x in v {
        if !x.is_zero() {
            lcm = lcm.lcm(x.denom());
        }
    }
    let mut out: Vec<BigInt> = v
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    make_primitive(&mut out);
    out
}

fn make_primitive(v: &mut [BigInt]) {
    let mut g = BigInt::zero();
    for x in v.iter() {
        if !x.is_zero() {
            g = g.gcd(x);
            if g.is_one() {
                return;
            }
        }
    }
    if g.is_zero() || g.is_one() {
        return;
    }
    for x in v.iter_mut() {
        *x = &*x / &g;
    }
}

/// Incremental row echelon form over the integers. Pivots are taken at the
/// first nonzero column of each reduced vector, so the result depends only
/// on insertion order.
#[derive(Clone, Debug)]
pub struct EchelonBasis {
    ncols: usize,
    rows: Vec<(usize, Vec<BigInt>)>,
}

impl EchelonBasis {
    pub fn new(ncols: usize) -> Self {
        Self {
            ncols,
            rows: Vec::new(),
        }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn ncols(&self) -> usize {
        self.ncols
    }

    pub fn is_full(&self) -> bool {
        self.rows.len() == self.ncols
    }

    fn reduce(&self, mut w: Vec<BigInt>) -> Vec<BigInt> {
        for (col, row) in &self.rows {
            if w[*col].is_zero() {
                continue;
            }
            let a = &row[*col];
            let b = w[*col].clone();
            let g = a.gcd(&b);
            let fa = a / &g;
            let fb = &b / &g;
            for (wi, ri) in w.iter_mut().zip(row) {
                *wi = &*wi * &fa - ri * &fb;
            }
            make_primitive(&mut w);
        }
        w
    }

    /// Inserts `v`; returns true if it was independent of the current rows.
    pub fn insert(&mut self, v: &[Scalar]) -> bool {
        assert_eq!(v.len(), self.ncols, "vector length mismatch");
        let w = self.reduce(primitive_integer_vector(v));
        match w.iter().position(|x| !x.is_zero()) {
            Some(col) => {
                let pos = self.rows.partition_point(|(c, _)| *c < col);
                self.rows.insert(pos, (col, w));
                true
            }
            None => false,
        }
    }

    pub fn contains(&self, v: &[Scalar]) -> bool {
        let w = self.reduce(primitive_integer_vector(v));
        w.iter().all(|x| x.is_zero())
    }
}

/// Rank of the span of `rows`.
pub fn rank(rows: &[Vec<Scalar>], ncols: usize) -> usize {
    let mut e = EchelonBasis::new(ncols);
    for r in rows {
        e.insert(r);
        if e.is_full() {
            break;
        }
    }
    e.rank()
}

/// Selects, in order, the rows that are independent of the earlier ones.
/// Returns their indices.
pub fn independent_rows(rows: &[Vec<Scalar>], ncols: usize) -> Vec<usize> {
    let mut e = EchelonBasis::new(ncols);
    let mut picked = Vec::new();
    for (i, r) in rows.iter().enumerate() {
        if e.insert(r) {
            picked.push(i);
            if e.is_full() {
                break;
            }
        }
    }
    picked
}

/// Reduced row echelon form in place; returns pivot columns.
pub fn rref(m: &mut [Vec<Scalar>], ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..ncols {
        if r == m.len() {
            break;
        }
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else {
            continue;
        };
        m.swap(r, p);
        let inv = m[r][c].recip();
        for x in m[r].iter_mut() {
            *x *= &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                let (pivot_row, other) = if i < r {
                    let (a, b) = m.split_at_mut(r);
                    (&b[0], &mut a[i])
                } else {
                    let (a, b) = m.split_at_mut(i);
                    (&a[r], &mut b[0])
                };
                for (x, y) in other.iter_mut().zip(pivot_row.iter()) {
                    if !y.is_zero() {
                        *x -= &f * y;
                    }
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{x : rows · x = 0}`, each vector scaled to primitive integers
/// with a positive leading entry.
pub fn nullspace(rows: &[Vec<Scalar>], ncols: usize) -> Vec<Vec<Scalar>> {
    let mut m: Vec<Vec<Scalar>> = rows.to_vec();
    let pivots = rref(&mut m, ncols);
    let free: Vec<usize> = (0..ncols).filter(|c| !pivots.contains(c)).collect();
    free.iter()
        .map(|&f| {
            let mut x = vec![Scalar::zero(); ncols];
            x[f] = Scalar::one();
            for (r, &pc) in pivots.iter().enumerate() {
                x[pc] = -m[r][f].clone();
            }
            normalize_direction(&x)
        })
        .collect()
}

/// Rescales a nonzero vector to primitive integer entries with a positive
/// first nonzero entry.
pub fn normalize_direction(v: &[Scalar]) -> Vec<Scalar> {
    let mut ints = primitive_integer_vector(v);
    if let Some(first) = ints.iter().find(|x| !x.is_zero()) {
        if first.is_negative() {
            for x in ints.iter_mut() {
                *x = -&*x;
            }
        }
    }
    ints.into_iter().map(BigRational::from_integer).collect()
}

/// Solves `A x = b` for square invertible `A` (given by rows). Returns None
/// if `A` is singular.
pub fn solve(a: &[Vec<Scalar>], b: &[Scalar]) -> Option<Vec<Scalar>> {
    let n = a.len();
    let mut m: Vec<Vec<Scalar>> = a
        .iter()
        .zip(b)
        .map(|(row, bi)| {
            let mut r = row.clone();
            r.push(bi.clone());
            r
        })
        .collect();
    let pivots = rref(&mut m, n);
    if pivots.len() < n {
        return None;
    }
    Some(m.into_iter().map(|r| r[n].clone()).collect())
}

/// Expresses `v` as a combination of `basis` (which must be independent).
pub fn coordinates_in(basis: &[Vec<Scalar>], v: &[Scalar]) -> Option<Vec<Scalar>> {
    let ncols = v.len();
    let k = basis.len();
    // Solve sum_j x_j basis_j = v  as  (basis^T) x = v, overdetermined.
    let mut m: Vec<Vec<Scalar>> = (0..ncols)
        .map(|i| {
            let mut r: Vec<Scalar> = basis.iter().map(|b| b[i].clone()).collect();
            r.push(v[i].clone());
            r
        })
        .collect();
    let pivots = rref(&mut m, k + 1);
    if pivots.contains(&k) {
        return None;
    }
    let mut x = vec![Scalar::zero(); k];
    for (r, &pc) in pivots.iter().enumerate() {
        x[pc] = m[r][k].clone();
    }
    Some(x)
}

pub fn identity(n: usize) -> Vec<Vec<Scalar>> {
    (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { Scalar::one() } else { Scalar::zero() })
                .collect()
        })
        .collect()
}

pub fn mat_mul(a: &[Vec<Scalar>], b: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    let inner = b.len();
    let ncols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..ncols)
                .map(|j| {
                    let mut acc = Scalar::zero();
                    for k in 0..inner {
                        if !row[k].is_zero() && !b[k][j].is_zero() {
                            acc += &row[k] * &b[k][j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_vec(a: &[Vec<Scalar>], x: &[Scalar]) -> Vec<Scalar> {
    a.iter()
        .map(|row| {
            let mut acc = Scalar::zero();
            for (r, v) in row.iter().zip(x) {
                if !r.is_zero() && !v.is_zero() {
                    acc += r * v;
                }
            }
            acc
        })
        .collect()
}

pub fn transpose<T: Clone>(a: &[Vec<T>]) -> Vec<Vec<T>> {
    let ncols = a.first().map_or(0, |r| r.len());
    (0..ncols)
        .map(|j| a.iter().map(|row| row[j].clone()).collect())
        .collect()
}

pub fn dot(a: &[Scalar], b: &[Scalar]) -> Scalar {
    let mut acc = Scalar::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            acc += x * y;
        }
    }
    acc
}

/// Exact determinant by fraction-free (Bareiss) elimination.
pub fn determinant(a: &[Vec<Scalar>]) -> Scalar {
    let n = a.len();
    if n == 0 {
        return Scalar::one();
    }
    let mut lcm = BigInt::one();
    for row in a {
        for x in row {
            lcm = lcm.lcm(x.denom());
        }
    }
    let mut m: Vec<Vec<BigInt>> = a
        .iter()
        .map(|row| row.iter().map(|x| x.numer() * (&lcm / x.denom())).collect())
        .collect();
    let mut sign = BigInt::one();
    let mut prev = BigInt::one();
    for k in 0..n {
        if m[k][k].is_zero() {
            match (k + 1..n).find(|&i| !m[i][k].is_zero()) {
                Some(p) => {
                    m.swap(k, p);
                    sign = -sign;
                }
                None => return Scalar::zero(),
            }
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let v = (&m[i][j] * &m[k][k] - &m[i][k] * &m[k][j]) / &prev;
                m[i][j] = v;
            }
        }
        prev = m[k][k].clone();
    }
    let det = sign * &m[n - 1][n - 1];
    BigRational::new(det, num_traits::pow(lcm, n))
}

/// Singular values of a dense double matrix given by rows.
pub fn singular_values(rows: &[Vec<f64>]) -> Vec<f64> {
    let nrows = rows.len();
    let ncols = rows.first().map_or(0, |r| r.len());
    if nrows == 0 || ncols == 0 {
        return Vec::new();
    }
    let m = DMatrix::from_fn(nrows, ncols, |i, j| rows[i][j]);
    let mut sv: Vec<f64> = m.singular_values().iter().copied().collect();
    sv.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    sv
}

/// Numerical rank: number of singular values above `tol` times the largest
/// (absolute `tol` when the largest is below one).
pub fn numeric_rank(rows: &[Vec<f64>], tol: f64) -> usize {
    let sv = singular_values(rows);
    let Some(&top) = sv.first() else { return 0 };
    let threshold = tol * top.max(1.0);
    sv.iter().filter(|&&s| s > threshold).count()
}
