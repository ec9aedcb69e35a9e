use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::ops::Range;

use num_traits::{One, Signed, Zero};

use super::element::{Covector, GroupElement, LieElement};
use super::hall::{witt_dimension, HallSet, HallWord};
use crate::error::{Error, Result};
use crate::linalg;
use crate::scalar::{fmt_scalar, Coeff, Constant, Scalar};

/// Default cap on the dimension of constructed algebras.
pub const DEFAULT_DIM_CAP: usize = 200;

/// Fingerprint of an algebra's basis and structure constants. Elements carry
/// it so that mixing elements of different algebras is detected.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AlgebraId(u64);

impl fmt::Display for AlgebraId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:016x}", self.0)
    }
}

/// Sparse structure-constant tensor: `[e_i, e_j] = Σ_k c_ij^k e_k`.
#[derive(Clone, Debug, PartialEq)]
pub struct Brackets {
    dim: usize,
    table: Vec<Vec<(usize, Constant)>>,
}

impl Brackets {
    /// `table[i * dim + j]` lists the nonzero `(k, c_ij^k)`.
    pub fn from_table(dim: usize, table: Vec<Vec<(usize, Scalar)>>) -> Self {
        assert_eq!(table.len(), dim * dim);
        let table = table
            .into_iter()
            .map(|terms| {
                let mut t: Vec<(usize, Constant)> = terms
                    .into_iter()
                    .filter(|(_, c)| !c.is_zero())
                    .map(|(k, c)| (k, Constant::new(c)))
                    .collect();
                t.sort_by_key(|(k, _)| *k);
                t
            })
            .collect();
        Self { dim, table }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn terms(&self, i: usize, j: usize) -> &[(usize, Constant)] {
        &self.table[i * self.dim + j]
    }

    pub fn bracket<C: Coeff>(&self, x: &[C], y: &[C]) -> Vec<C> {
        let mut out = vec![C::zero_value(); self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.vanishes() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.vanishes() {
                    continue;
                }
                let terms = self.terms(i, j);
                if terms.is_empty() {
                    continue;
                }
                let p = xi.mul_ref(yj);
                for (k, c) in terms {
                    out[*k].add_product(&C::from_constant(c), &p);
                }
            }
        }
        out
    }

    /// Matrix of `ad_x`, as rows: entry `[k][j]` is the `e_k` coefficient
    /// of `[x, e_j]`.
    pub fn ad<C: Coeff>(&self, x: &[C]) -> Vec<Vec<C>> {
        let mut m = vec![vec![C::zero_value(); self.dim]; self.dim];
        for (i, xi) in x.iter().enumerate() {
            if xi.vanishes() {
                continue;
            }
            for j in 0..self.dim {
                for (k, c) in self.terms(i, j) {
                    m[*k][j].add_product(&C::from_constant(c), xi);
                }
            }
        }
        m
    }

    pub fn antisymmetry_violation(&self) -> Option<(usize, usize)> {
        for i in 0..self.dim {
            if !self.terms(i, i).is_empty() {
                return Some((i, i));
            }
            for j in i + 1..self.dim {
                let a = self.terms(i, j);
                let b = self.terms(j, i);
                let ok = a.len() == b.len()
                    && a.iter()
                        .zip(b)
                        .all(|((ka, ca), (kb, cb))| ka == kb && ca.exact == -cb.exact.clone());
                if !ok {
                    return Some((i, j));
                }
            }
        }
        None
    }

    fn basis_bracket_vec(&self, i: usize, y: &[(usize, Scalar)], acc: &mut HashMap<usize, Scalar>) {
        for (j, yj) in y {
            for (k, c) in self.terms(i, *j) {
                *acc.entry(*k).or_insert_with(Scalar::zero) -= &c.exact * yj;
            }
        }
    }

    /// First basis triple `i < j < k` on which the Jacobi identity fails.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let exact = |i: usize, j: usize| -> Vec<(usize, Scalar)> {
            self.terms(i, j)
                .iter()
                .map(|(k, c)| (*k, c.exact.clone()))
                .collect()
        };
        for i in 0..self.dim {
            for j in i + 1..self.dim {
                let ij = exact(i, j);
                for k in j + 1..self.dim {
                    // [[ei,ej],ek] + [[ej,ek],ei] + [[ek,ei],ej], written as
                    // -( [ek,[ei,ej]] + [ei,[ej,ek]] + [ej,[ek,ei]] ).
                    let mut acc = HashMap::new();
                    self.basis_bracket_vec(k, &ij, &mut acc);
                    self.basis_bracket_vec(i, &exact(j, k), &mut acc);
                    self.basis_bracket_vec(j, &exact(k, i), &mut acc);
                    if acc.values().any(|c| !c.is_zero()) {
                        return Some((i, j, k));
                    }
                }
            }
        }
        None
    }
}

/// A stratified nilpotent Lie algebra `V_1 ⊕ … ⊕ V_s` with a graded basis.
#[derive(Clone, Debug)]
pub struct CarnotAlgebra {
    id: AlgebraId,
    rank: usize,
    layer_dims: Vec<usize>,
    layer_of: Vec<usize>,
    labels: Vec<String>,
    label_index: HashMap<String, usize>,
    brackets: Brackets,
    hall: Option<Vec<HallWord>>,
}

impl PartialEq for CarnotAlgebra {
    fn eq(&self, other: &Self) -> bool {
        self.layer_dims == other.layer_dims
            && self.labels == other.labels
            && self.brackets == other.brackets
    }
}

/// `[e_i, e_j] = Σ c_k e_k` as `(i, j, [(k, c_k)])`, 0-based.
pub type BracketEntry = (usize, usize, Vec<(usize, Scalar)>);

impl CarnotAlgebra {
    /// Free nilpotent algebra of rank `r` and step `s` in the Hall basis.
    pub fn free(rank: usize, step: usize) -> Result<Self> {
        Self::free_with_cap(rank, step, DEFAULT_DIM_CAP)
    }

    pub fn free_with_cap(rank: usize, step: usize, cap: usize) -> Result<Self> {
        if rank == 0 || step == 0 {
            return Err(Error::InvalidArgument(
                "rank and step must be positive".into(),
            ));
        }
        let mut layer_dims = Vec::with_capacity(step);
        let mut total: u128 = 0;
        for n in 1..=step {
            let d = witt_dimension(rank, n).unwrap_or(u128::MAX);
            total = total.saturating_add(d);
            if total > cap as u128 {
                return Err(Error::ResourceLimit {
                    dim: usize::try_from(total).unwrap_or(usize::MAX),
                    cap,
                });
            }
            layer_dims.push(d as usize);
        }
        if layer_dims.contains(&0) {
            // Rank one: everything above the first layer vanishes.
            layer_dims.truncate(1);
        }
        let step = layer_dims.len();
        let set = HallSet::enumerate(rank, step);
        let labels = set.labels(rank);
        let table = set.structure_table(step);
        let dim = set.len();
        let mut alg = Self::assemble(rank, layer_dims, labels, Brackets::from_table(dim, table));
        alg.hall = Some(set.words);
        Ok(alg)
    }

    /// Three-dimensional Heisenberg algebra `[X1, X2] = Z`.
    pub fn heisenberg() -> Self {
        let labels = vec!["X1".to_string(), "X2".to_string(), "Z".to_string()];
        Self::from_structure(
            2,
            vec![1],
            Some(labels),
            vec![(0, 1, vec![(2, Scalar::one())])],
        )
        .expect("Heisenberg structure constants are valid")
    }

    /// Builds and validates an algebra from 0-based structure constants.
    /// `rank` is the dimension of the first layer and `upper_layers` the
    /// dimensions of layers 2..s. Only one of `[e_i, e_j]`, `[e_j, e_i]`
    /// needs to be given; if both are present they must be negatives.
    pub fn from_structure(
        rank: usize,
        upper_layers: Vec<usize>,
        labels: Option<Vec<String>>,
        brackets: Vec<BracketEntry>,
    ) -> Result<Self> {
        let mut layer_dims = vec![rank];
        layer_dims.extend(upper_layers);
        Self::from_layers(layer_dims, labels, brackets)
    }

    pub fn from_layers(
        layer_dims: Vec<usize>,
        labels: Option<Vec<String>>,
        brackets: Vec<BracketEntry>,
    ) -> Result<Self> {
        if layer_dims.is_empty() || layer_dims.contains(&0) {
            return Err(Error::InvalidArgument(
                "layer dimensions must be positive".into(),
            ));
        }
        let dim: usize = layer_dims.iter().sum();
        let labels = match labels {
            Some(l) => {
                if l.len() != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: l.len(),
                    });
                }
                l
            }
            None => (1..=dim).map(|i| format!("e{i}")).collect(),
        };
        let mut seen = HashMap::new();
        for (i, l) in labels.iter().enumerate() {
            if l.is_empty() || seen.insert(l.clone(), i).is_some() {
                return Err(Error::InvalidArgument(format!(
                    "basis labels must be nonempty and distinct (`{l}`)"
                )));
            }
        }

        let mut table: Vec<Option<Vec<(usize, Scalar)>>> = vec![None; dim * dim];
        for (i, j, terms) in brackets {
            if i >= dim || j >= dim || terms.iter().any(|(k, _)| *k >= dim) {
                return Err(Error::InvalidArgument(format!(
                    "bracket index out of range in [e{}, e{}]",
                    i + 1,
                    j + 1
                )));
            }
            let mut acc: HashMap<usize, Scalar> = HashMap::new();
            for (k, c) in terms {
                *acc.entry(k).or_insert_with(Scalar::zero) += c;
            }
            let mut t: Vec<(usize, Scalar)> =
                acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
            t.sort_by_key(|(k, _)| *k);
            let slot = &mut table[i * dim + j];
            if slot.is_some() {
                return Err(Error::InvalidArgument(format!(
                    "bracket [e{}, e{}] given twice",
                    i + 1,
                    j + 1
                )));
            }
            if i == j && !t.is_empty() {
                return Err(Error::AntisymmetryViolation { i: i + 1, j: j + 1 });
            }
            *slot = Some(t);
        }
        let mut full = vec![Vec::new(); dim * dim];
        for i in 0..dim {
            for j in 0..dim {
                let a = &table[i * dim + j];
                let b = &table[j * dim + i];
                full[i * dim + j] = match (a, b) {
                    (Some(a), Some(b)) => {
                        let neg: Vec<(usize, Scalar)> =
                            b.iter().map(|(k, c)| (*k, -c.clone())).collect();
                        if *a != neg {
                            let (p, q) = (i.min(j), i.max(j));
                            return Err(Error::AntisymmetryViolation { i: p + 1, j: q + 1 });
                        }
                        a.clone()
                    }
                    (Some(a), None) => a.clone(),
                    (None, Some(b)) => b.iter().map(|(k, c)| (*k, -c.clone())).collect(),
                    (None, None) => Vec::new(),
                };
            }
        }
        let brackets = Brackets::from_table(dim, full);
        let layer_of = layer_map(&layer_dims);
        for i in 0..dim {
            for j in 0..dim {
                for (k, _) in brackets.terms(i, j) {
                    let expected = layer_of[i] + layer_of[j];
                    if layer_of[*k] != expected {
                        return Err(Error::GradingViolation {
                            i: i + 1,
                            j: j + 1,
                            k: k + 1,
                            expected_layer: expected,
                        });
                    }
                }
            }
        }
        if let Some((i, j, k)) = brackets.jacobi_violation() {
            return Err(Error::JacobiViolation {
                i: i + 1,
                j: j + 1,
                k: k + 1,
            });
        }
        let rank = layer_dims[0];
        let alg = Self::assemble(rank, layer_dims, labels, brackets);
        alg.check_stratified()?;
        Ok(alg)
    }

    fn assemble(
        rank: usize,
        layer_dims: Vec<usize>,
        labels: Vec<String>,
        brackets: Brackets,
    ) -> Self {
        let layer_of = layer_map(&layer_dims);
        let label_index = labels
            .iter()
            .enumerate()
            .map(|(i, l)| (l.clone(), i))
            .collect();
        let id = fingerprint(&layer_dims, &labels, &brackets);
        Self {
            id,
            rank,
            layer_dims,
            layer_of,
            labels,
            label_index,
            brackets,
            hall: None,
        }
    }

    fn check_stratified(&self) -> Result<()> {
        for l in 1..self.step() {
            let mut rows = Vec::new();
            for a in self.layer_range(1) {
                for b in self.layer_range(l) {
                    let v: Vec<Scalar> = {
                        let mut v = vec![Scalar::zero(); self.dim()];
                        for (k, c) in self.brackets.terms(a, b) {
                            v[*k] = c.exact.clone();
                        }
                        v
                    };
                    rows.push(v);
                }
            }
            if linalg::rank(&rows, self.dim()) != self.layer_dims[l] {
                return Err(Error::NotStratified { layer: l });
            }
        }
        Ok(())
    }

    pub fn id(&self) -> AlgebraId {
        self.id
    }

    pub fn dim(&self) -> usize {
        self.layer_of.len()
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn step(&self) -> usize {
        self.layer_dims.len()
    }

    pub fn layer_dims(&self) -> &[usize] {
        &self.layer_dims
    }

    /// Layer (1-based) of basis vector `i`.
    pub fn layer(&self, i: usize) -> usize {
        self.layer_of[i]
    }

    /// Basis indices of layer `l` (1-based).
    pub fn layer_range(&self, l: usize) -> Range<usize> {
        let start: usize = self.layer_dims[..l - 1].iter().sum();
        start..start + self.layer_dims[l - 1]
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label(&self, i: usize) -> &str {
        &self.labels[i]
    }

    pub fn index_of(&self, label: &str) -> Option<usize> {
        self.label_index.get(label).copied()
    }

    /// Hall words, for algebras built by [`CarnotAlgebra::free`].
    pub fn hall_words(&self) -> Option<&[HallWord]> {
        self.hall.as_deref()
    }

    pub fn is_free(&self) -> bool {
        self.hall.is_some()
    }

    pub fn brackets(&self) -> &Brackets {
        &self.brackets
    }

    /// Exact structure constants `c_ij^k` for the pair `(i, j)`.
    pub fn structure_constants(&self, i: usize, j: usize) -> Vec<(usize, Scalar)> {
        self.brackets
            .terms(i, j)
            .iter()
            .map(|(k, c)| (*k, c.exact.clone()))
            .collect()
    }

    pub fn check_len(&self, len: usize) -> Result<()> {
        if len != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: len,
            });
        }
        Ok(())
    }

    pub(crate) fn check_id(&self, id: AlgebraId) -> Result<()> {
        if id != self.id {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }

    pub fn element(&self, coeffs: Vec<Scalar>) -> Result<LieElement> {
        self.check_len(coeffs.len())?;
        Ok(LieElement::new(self.id, coeffs))
    }

    pub fn zero(&self) -> LieElement {
        LieElement::new(self.id, vec![Scalar::zero(); self.dim()])
    }

    pub fn basis(&self, i: usize) -> LieElement {
        let mut v = vec![Scalar::zero(); self.dim()];
        v[i] = Scalar::one();
        LieElement::new(self.id, v)
    }

    pub fn identity(&self) -> GroupElement {
        GroupElement::new(self.id, vec![Scalar::zero(); self.dim()])
    }

    pub fn group_element(&self, coords: Vec<Scalar>) -> Result<GroupElement> {
        self.check_len(coords.len())?;
        Ok(GroupElement::new(self.id, coords))
    }

    /// `exp(x)` read in exponential coordinates.
    pub fn exp(&self, x: &LieElement) -> Result<GroupElement> {
        self.check_id(x.algebra())?;
        Ok(GroupElement::new(self.id, x.coeffs().to_vec()))
    }

    pub fn covector(&self, coeffs: Vec<Scalar>) -> Result<Covector> {
        self.check_len(coeffs.len())?;
        Ok(Covector::new(self.id, coeffs))
    }

    /// Dual basis covector `e_i^*`.
    pub fn dual_basis(&self, i: usize) -> Covector {
        let mut v = vec![Scalar::zero(); self.dim()];
        v[i] = Scalar::one();
        Covector::new(self.id, v)
    }

    pub fn bracket(&self, x: &LieElement, y: &LieElement) -> Result<LieElement> {
        self.check_id(x.algebra())?;
        self.check_id(y.algebra())?;
        Ok(LieElement::new(
            self.id,
            self.brackets.bracket(x.coeffs(), y.coeffs()),
        ))
    }

    pub fn bracket_vec<C: Coeff>(&self, x: &[C], y: &[C]) -> Vec<C> {
        self.brackets.bracket(x, y)
    }

    /// Matrix of `ad_x` as rows; column `j` is `[x, e_j]`.
    pub fn ad_matrix(&self, x: &LieElement) -> Result<Vec<Vec<Scalar>>> {
        self.check_id(x.algebra())?;
        Ok(self.brackets.ad(x.coeffs()))
    }

    pub fn ad_matrix_vec<C: Coeff>(&self, x: &[C]) -> Vec<Vec<C>> {
        self.brackets.ad(x)
    }

    /// Zeroes every component outside layer 1.
    pub fn project_to_first_layer(&self, x: &[Scalar]) -> Vec<Scalar> {
        x.iter()
            .enumerate()
            .map(|(i, c)| if self.layer_of[i] == 1 { c.clone() } else { Scalar::zero() })
            .collect()
    }

    /// Renders coefficients as `X1 + 2*X21 - 1/2*X211`.
    pub fn format_vec(&self, x: &[Scalar]) -> String {
        format_terms(x, &self.labels)
    }

    pub fn format(&self, x: &LieElement) -> String {
        self.format_vec(x.coeffs())
    }

    /// Parses an expression such as `X2 + X212 - 3/2*X2111`.
    pub fn parse_element(&self, text: &str) -> Result<LieElement> {
        let coeffs = super::expr::parse_linear_combination(text, self.dim(), |l| self.index_of(l))?;
        Ok(LieElement::new(self.id, coeffs))
    }
}

pub(crate) fn format_terms(x: &[Scalar], labels: &[String]) -> String {
    let mut out = String::new();
    for (c, label) in x.iter().zip(labels) {
        if c.is_zero() {
            continue;
        }
        let neg = c.is_negative();
        if out.is_empty() {
            if neg {
                out.push('-');
            }
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        let mag = c.abs();
        if !mag.is_one() {
            out.push_str(&fmt_scalar(&mag));
            out.push('*');
        }
        out.push_str(label);
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn layer_map(layer_dims: &[usize]) -> Vec<usize> {
    layer_dims
        .iter()
        .enumerate()
        .flat_map(|(l, &d)| std::iter::repeat_n(l + 1, d))
        .collect()
}

fn fingerprint(layer_dims: &[usize], labels: &[String], brackets: &Brackets) -> AlgebraId {
    let mut h = DefaultHasher::new();
    layer_dims.hash(&mut h);
    labels.hash(&mut h);
    for (n, terms) in brackets.table.iter().enumerate() {
        if terms.is_empty() {
            continue;
        }
        n.hash(&mut h);
        for (k, c) in terms {
            k.hash(&mut h);
            c.exact.hash(&mut h);
        }
    }
    AlgebraId(h.finish())
}
