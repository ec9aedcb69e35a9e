//! Homomorphisms, direct products and quotients by graded ideals.

use num_traits::{One, Zero};

use super::algebra::{AlgebraId, CarnotAlgebra};
use super::element::{GroupElement, LieElement};
use crate::error::{Error, Result};
use crate::linalg::{self, EchelonBasis};
use crate::scalar::Scalar;

/// Graded Lie algebra homomorphism, stored as a `target_dim × source_dim`
/// matrix. Being graded it commutes with `exp`, so it acts on exponential
/// coordinates by the same matrix.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Homomorphism {
    source: AlgebraId,
    target: AlgebraId,
    matrix: Vec<Vec<Scalar>>,
}

impl Homomorphism {
    /// Checks `π[e_i, e_j] = [π e_i, π e_j]` on every basis pair and that
    /// layers map into layers.
    pub fn new(
        source: &CarnotAlgebra,
        target: &CarnotAlgebra,
        matrix: Vec<Vec<Scalar>>,
    ) -> Result<Self> {
        let (m, n) = (target.dim(), source.dim());
        if matrix.len() != m || matrix.iter().any(|r| r.len() != n) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: matrix.len(),
            });
        }
        for (k, row) in matrix.iter().enumerate() {
            for (j, c) in row.iter().enumerate() {
                if !c.is_zero() && target.layer(k) != source.layer(j) {
                    return Err(Error::InvalidArgument(format!(
                        "map sends e{} of layer {} into layer {}",
                        j + 1,
                        source.layer(j),
                        target.layer(k)
                    )));
                }
            }
        }
        let cols = linalg::transpose(&matrix);
        let basis = |k: usize| {
            let mut v = vec![Scalar::zero(); n];
            v[k] = Scalar::one();
            v
        };
        for i in 0..n {
            for j in i + 1..n {
                let lhs = linalg::mat_vec(&matrix, &source.bracket_vec(&basis(i), &basis(j)));
                let rhs = target.bracket_vec(&cols[i], &cols[j]);
                if lhs != rhs {
                    return Err(Error::NotHomomorphism { i: i + 1, j: j + 1 });
                }
            }
        }
        Ok(Self {
            source: source.id(),
            target: target.id(),
            matrix,
        })
    }

    pub fn identity(algebra: &CarnotAlgebra) -> Self {
        Self {
            source: algebra.id(),
            target: algebra.id(),
            matrix: linalg::identity(algebra.dim()),
        }
    }

    pub fn source(&self) -> AlgebraId {
        self.source
    }

    pub fn target(&self) -> AlgebraId {
        self.target
    }

    pub fn matrix(&self) -> &[Vec<Scalar>] {
        &self.matrix
    }

    pub fn apply_vec(&self, x: &[Scalar]) -> Vec<Scalar> {
        linalg::mat_vec(&self.matrix, x)
    }

    pub fn apply(&self, x: &LieElement) -> Result<LieElement> {
        if x.algebra() != self.source {
            return Err(Error::AlgebraMismatch);
        }
        Ok(LieElement::new(self.target, self.apply_vec(x.coeffs())))
    }

    pub fn apply_group(&self, g: &GroupElement) -> Result<GroupElement> {
        if g.algebra() != self.source {
            return Err(Error::AlgebraMismatch);
        }
        Ok(GroupElement::new(self.target, self.apply_vec(g.coeffs())))
    }

    pub fn is_surjective(&self) -> bool {
        let ncols = self.matrix.first().map_or(0, |r| r.len());
        linalg::rank(&self.matrix, ncols) == self.matrix.len()
    }
}

/// `g1 × g2` with its two projections. The basis interleaves the factors
/// layer by layer so that it stays graded.
#[derive(Clone, Debug)]
pub struct ProductAlgebra {
    pub algebra: CarnotAlgebra,
    /// Position in the product of each basis vector of the first factor.
    pub first: Vec<usize>,
    pub second: Vec<usize>,
    pub project_first: Homomorphism,
    pub project_second: Homomorphism,
}

impl CarnotAlgebra {
    /// Direct product. Labels default to `e1..en`.
    pub fn direct_product(
        &self,
        other: &CarnotAlgebra,
        labels: Option<Vec<String>>,
    ) -> Result<ProductAlgebra> {
        let step = self.step().max(other.step());
        let mut layer_dims = Vec::with_capacity(step);
        let mut first = vec![0; self.dim()];
        let mut second = vec![0; other.dim()];
        let mut pos = 0;
        for l in 1..=step {
            let mut d = 0;
            if l <= self.step() {
                for i in self.layer_range(l) {
                    first[i] = pos;
                    pos += 1;
                    d += 1;
                }
            }
            if l <= other.step() {
                for i in other.layer_range(l) {
                    second[i] = pos;
                    pos += 1;
                    d += 1;
                }
            }
            layer_dims.push(d);
        }
        let mut brackets = Vec::new();
        for (alg, map) in [(self, &first), (other, &second)] {
            for i in 0..alg.dim() {
                for j in i + 1..alg.dim() {
                    let terms: Vec<(usize, Scalar)> = alg
                        .structure_constants(i, j)
                        .into_iter()
                        .map(|(k, c)| (map[k], c))
                        .collect();
                    if !terms.is_empty() {
                        brackets.push((map[i], map[j], terms));
                    }
                }
            }
        }
        let algebra = CarnotAlgebra::from_layers(layer_dims, labels, brackets)?;
        let projection = |factor: &CarnotAlgebra, map: &[usize]| {
            let mut m = vec![vec![Scalar::zero(); algebra.dim()]; factor.dim()];
            for (i, &p) in map.iter().enumerate() {
                m[i][p] = Scalar::one();
            }
            Homomorphism::new(&algebra, factor, m)
        };
        let project_first = projection(self, &first)?;
        let project_second = projection(other, &second)?;
        Ok(ProductAlgebra {
            algebra,
            first,
            second,
            project_first,
            project_second,
        })
    }

    /// Smallest ideal containing `generators` (each must be homogeneous),
    /// returned as a basis.
    pub fn ideal_closure(&self, generators: &[Vec<Scalar>]) -> Result<Vec<Vec<Scalar>>> {
        let n = self.dim();
        let mut span = EchelonBasis::new(n);
        let mut basis = Vec::new();
        let mut queue: Vec<Vec<Scalar>> = Vec::new();
        for g in generators {
            self.check_len(g.len())?;
            let layers: std::collections::BTreeSet<usize> = g
                .iter()
                .enumerate()
                .filter(|(_, c)| !c.is_zero())
                .map(|(i, _)| self.layer(i))
                .collect();
            if layers.len() > 1 {
                return Err(Error::InvalidArgument(
                    "ideal generators must be homogeneous".into(),
                ));
            }
            queue.push(g.clone());
        }
        while let Some(v) = queue.pop() {
            if !span.insert(&v) {
                continue;
            }
            for a in self.layer_range(1) {
                let mut e = vec![Scalar::zero(); n];
                e[a] = Scalar::one();
                let w = self.bracket_vec(&e, &v);
                if w.iter().any(|c| !c.is_zero()) {
                    queue.push(w);
                }
            }
            basis.push(v);
        }
        Ok(basis)
    }

    /// Quotient by the graded ideal generated by `generators`. The quotient
    /// basis is the subset of the original basis complementary to the ideal,
    /// chosen greedily in basis order, keeping the original labels.
    pub fn quotient(&self, generators: &[Vec<Scalar>]) -> Result<(CarnotAlgebra, Homomorphism)> {
        let n = self.dim();
        let ideal = self.ideal_closure(generators)?;
        let mut span = EchelonBasis::new(n);
        for v in &ideal {
            span.insert(v);
        }
        let mut kept = Vec::new();
        let mut layer_dims = Vec::new();
        for l in 1..=self.step() {
            let mut d = 0;
            for k in self.layer_range(l) {
                let mut e = vec![Scalar::zero(); n];
                e[k] = Scalar::one();
                if span.insert(&e) {
                    kept.push(k);
                    d += 1;
                }
            }
            if d == 0 {
                break;
            }
            layer_dims.push(d);
        }
        if kept.is_empty() {
            return Err(Error::InvalidArgument("quotient is trivial".into()));
        }
        // Coordinates of every original basis vector in the basis
        // (kept vectors, ideal basis).
        let mut full_basis: Vec<Vec<Scalar>> = kept
            .iter()
            .map(|&k| {
                let mut e = vec![Scalar::zero(); n];
                e[k] = Scalar::one();
                e
            })
            .collect();
        full_basis.extend(ideal.iter().cloned());
        let m = kept.len();
        let mut projection = vec![vec![Scalar::zero(); n]; m];
        for j in 0..n {
            let mut e = vec![Scalar::zero(); n];
            e[j] = Scalar::one();
            let c = linalg::coordinates_in(&full_basis, &e).expect("basis spans the algebra");
            for (row, ci) in projection.iter_mut().zip(&c[..m]) {
                row[j] = ci.clone();
            }
        }
        let mut brackets = Vec::new();
        for (a, &i) in kept.iter().enumerate() {
            for (b, &j) in kept.iter().enumerate().skip(a + 1) {
                let mut ei = vec![Scalar::zero(); n];
                ei[i] = Scalar::one();
                let mut ej = vec![Scalar::zero(); n];
                ej[j] = Scalar::one();
                let image = linalg::mat_vec(&projection, &self.bracket_vec(&ei, &ej));
                let terms: Vec<(usize, Scalar)> = image
                    .into_iter()
                    .enumerate()
                    .filter(|(_, c)| !c.is_zero())
                    .collect();
                if !terms.is_empty() {
                    brackets.push((a, b, terms));
                }
            }
        }
        let labels = kept.iter().map(|&k| self.label(k).to_string()).collect();
        let quotient = CarnotAlgebra::from_layers(layer_dims, Some(labels), brackets)?;
        let pi = Homomorphism::new(self, &quotient, projection)?;
        Ok((quotient, pi))
    }
}
