use num_traits::{One, Zero};

use super::algebra::{AlgebraId, CarnotAlgebra};
use super::element::LieElement;
use super::hall::HallWord;
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{int, Scalar};

/// A strata-preserving derivation, stored as a `dim × dim` matrix whose
/// column `j` is `D e_j`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Derivation {
    algebra: AlgebraId,
    matrix: Vec<Vec<Scalar>>,
}

impl Derivation {
    pub fn algebra(&self) -> AlgebraId {
        self.algebra
    }

    /// Rows of the matrix.
    pub fn matrix(&self) -> &[Vec<Scalar>] {
        &self.matrix
    }

    pub fn apply(&self, x: &LieElement) -> Result<LieElement> {
        if x.algebra() != self.algebra {
            return Err(Error::AlgebraMismatch);
        }
        Ok(LieElement::new(self.algebra, self.apply_vec(x.coeffs())))
    }

    pub fn apply_vec(&self, x: &[Scalar]) -> Vec<Scalar> {
        linalg::mat_vec(&self.matrix, x)
    }
}

fn columns_to_rows(cols: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
    linalg::transpose(cols)
}

impl CarnotAlgebra {
    /// Extends a linear map on the first layer (an `r × r` matrix, rows
    /// indexed by output) to a derivation of the whole algebra.
    pub fn extend_derivation(&self, d: &[Vec<Scalar>]) -> Result<Derivation> {
        let r = self.rank();
        if d.len() != r || d.iter().any(|row| row.len() != r) {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: d.len(),
            });
        }
        let cols = self.formal_extension(d);
        let matrix = columns_to_rows(&cols);
        if !self.is_free() {
            self.check_leibniz(&matrix)?;
        }
        Ok(Derivation {
            algebra: self.id(),
            matrix,
        })
    }

    /// `E_ij` (0-based): sends `e_j` to `e_i` and kills the other generators.
    pub fn elementary_derivation(&self, i: usize, j: usize) -> Result<Derivation> {
        let r = self.rank();
        if i >= r || j >= r {
            return Err(Error::InvalidArgument(format!(
                "E_{}{} is outside gl({r})",
                i + 1,
                j + 1
            )));
        }
        let mut d = vec![vec![Scalar::zero(); r]; r];
        d[i][j] = Scalar::one();
        self.extend_derivation(&d)
    }

    /// The derivation acting on layer `i` as multiplication by `i`.
    pub fn grading_derivation(&self) -> Derivation {
        let n = self.dim();
        let mut matrix = vec![vec![Scalar::zero(); n]; n];
        for (k, row) in matrix.iter_mut().enumerate() {
            row[k] = int(self.layer(k) as i64);
        }
        Derivation {
            algebra: self.id(),
            matrix,
        }
    }

    /// Wraps a full matrix after checking that it is a strata-preserving
    /// derivation.
    pub fn derivation_from_matrix(&self, matrix: Vec<Vec<Scalar>>) -> Result<Derivation> {
        let n = self.dim();
        if matrix.len() != n || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: matrix.len(),
            });
        }
        for (k, row) in matrix.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() && self.layer(k) != self.layer(j) {
                    return Err(Error::InvalidArgument(format!(
                        "matrix maps e{} outside its layer",
                        j + 1
                    )));
                }
            }
        }
        self.check_leibniz(&matrix)?;
        Ok(Derivation {
            algebra: self.id(),
            matrix,
        })
    }

    /// Basis of the strata-preserving derivations determined by their
    /// action on the first layer. For free algebras this is the image of
    /// `gl(V_1)`, listed as `E_11, E_12, …, E_rr`.
    pub fn derivation_space(&self) -> Vec<Derivation> {
        let r = self.rank();
        let elementary = |i: usize, j: usize| {
            let mut d = vec![vec![Scalar::zero(); r]; r];
            d[i][j] = Scalar::one();
            d
        };
        let formal: Vec<Vec<Vec<Scalar>>> = (0..r)
            .flat_map(|i| (0..r).map(move |j| (i, j)))
            .map(|(i, j)| columns_to_rows(&self.formal_extension(&elementary(i, j))))
            .collect();
        if self.is_free() {
            return formal
                .into_iter()
                .map(|matrix| Derivation {
                    algebra: self.id(),
                    matrix,
                })
                .collect();
        }
        // The Leibniz defect is linear in the first-layer data; keep the
        // combinations on which it vanishes.
        let defects: Vec<Vec<Scalar>> = formal.iter().map(|m| self.leibniz_defect(m)).collect();
        let rows = linalg::transpose(&defects);
        let kernel = linalg::nullspace(&rows, formal.len());
        kernel
            .into_iter()
            .map(|coeffs| {
                let n = self.dim();
                let mut matrix = vec![vec![Scalar::zero(); n]; n];
                for (c, m) in coeffs.iter().zip(&formal) {
                    if c.is_zero() {
                        continue;
                    }
                    for (row, mrow) in matrix.iter_mut().zip(m) {
                        for (x, y) in row.iter_mut().zip(mrow) {
                            *x += c * y;
                        }
                    }
                }
                Derivation {
                    algebra: self.id(),
                    matrix,
                }
            })
            .collect()
    }

    /// Columns `D e_k` obtained by pushing `d` up the layers through the
    /// Leibniz rule, without checking consistency.
    fn formal_extension(&self, d: &[Vec<Scalar>]) -> Vec<Vec<Scalar>> {
        let n = self.dim();
        let r = self.rank();
        let mut cols: Vec<Vec<Scalar>> = vec![vec![Scalar::zero(); n]; n];
        for (j, col) in cols.iter_mut().enumerate().take(r) {
            for (i, row) in d.iter().enumerate() {
                col[i] = row[j].clone();
            }
        }
        let basis = |k: usize| {
            let mut v = vec![Scalar::zero(); n];
            v[k] = Scalar::one();
            v
        };
        if let Some(words) = self.hall_words() {
            for k in r..n {
                let HallWord::Bracket(u, v) = words[k] else {
                    unreachable!()
                };
                let mut col = self.bracket_vec(&cols[u], &basis(v));
                let right = self.bracket_vec(&basis(u), &cols[v]);
                for (x, y) in col.iter_mut().zip(right) {
                    *x += y;
                }
                cols[k] = col;
            }
            return cols;
        }
        for l in 1..self.step() {
            let target = self.layer_range(l + 1);
            let mut products: Vec<(usize, usize)> = Vec::new();
            let mut rows: Vec<Vec<Scalar>> = Vec::new();
            for a in self.layer_range(1) {
                for b in self.layer_range(l) {
                    products.push((a, b));
                    rows.push(self.bracket_vec(&basis(a), &basis(b))[target.clone()].to_vec());
                }
            }
            let picked = linalg::independent_rows(&rows, target.len());
            // prod_p = Σ_k P[p][k] e_k, hence e_k = Σ_p (P^{-1})[k][p] prod_p.
            let p: Vec<Vec<Scalar>> = picked.iter().map(|&i| rows[i].clone()).collect();
            let pt = linalg::transpose(&p);
            let images: Vec<Vec<Scalar>> = picked
                .iter()
                .map(|&i| {
                    let (a, b) = products[i];
                    let mut v = self.bracket_vec(&cols[a], &basis(b));
                    let w = self.bracket_vec(&basis(a), &cols[b]);
                    for (x, y) in v.iter_mut().zip(w) {
                        *x += y;
                    }
                    v
                })
                .collect();
            for (local, k) in target.clone().enumerate() {
                // Row `local` of P^{-1}: solve P^T y = e_local.
                let mut rhs = vec![Scalar::zero(); target.len()];
                rhs[local] = Scalar::one();
                let y = linalg::solve(&pt, &rhs).expect("stratified layer is spanned");
                let mut col = vec![Scalar::zero(); n];
                for (c, img) in y.iter().zip(&images) {
                    if c.is_zero() {
                        continue;
                    }
                    for (x, z) in col.iter_mut().zip(img) {
                        *x += c * z;
                    }
                }
                cols[k] = col;
            }
        }
        cols
    }

    /// Flattened `D[e_i,e_j] − [De_i,e_j] − [e_i,De_j]` over pairs `i < j`.
    fn leibniz_defect(&self, matrix: &[Vec<Scalar>]) -> Vec<Scalar> {
        let n = self.dim();
        let cols = linalg::transpose(matrix);
        let basis = |k: usize| {
            let mut v = vec![Scalar::zero(); n];
            v[k] = Scalar::one();
            v
        };
        let mut out = Vec::new();
        for i in 0..n {
            for j in i + 1..n {
                let br = self.bracket_vec(&basis(i), &basis(j));
                let mut v = linalg::mat_vec(matrix, &br);
                let a = self.bracket_vec(&cols[i], &basis(j));
                let b = self.bracket_vec(&basis(i), &cols[j]);
                for ((x, y), z) in v.iter_mut().zip(a).zip(b) {
                    *x -= y + z;
                }
                out.extend(v);
            }
        }
        out
    }

    fn check_leibniz(&self, matrix: &[Vec<Scalar>]) -> Result<()> {
        let n = self.dim();
        let defect = self.leibniz_defect(matrix);
        let mut chunks = defect.chunks(n);
        for i in 0..n {
            for j in i + 1..n {
                let chunk = chunks.next().expect("one chunk per pair");
                if chunk.iter().any(|c| !c.is_zero()) {
                    return Err(Error::InconsistentDerivation { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(())
    }

    /// Checks the Leibniz rule on every basis pair.
    pub fn is_derivation(&self, d: &Derivation) -> bool {
        d.algebra() == self.id() && self.check_leibniz(d.matrix()).is_ok()
    }
}
