//! Abnormal set of free step-two Carnot groups `V ⊕ Λ²V`, with bracket
//! `[(v, ξ), (w, η)] = (0, v ∧ w)`.

use std::collections::{BTreeMap, HashMap};

use num_traits::{One, Signed, Zero};
use rand::Rng;

use crate::abnormal::w_kernel;
use crate::endpoint::PiecewiseControl;
use crate::error::{Error, Result};
use crate::lie::{expr, CarnotAlgebra, Covector, GroupElement, HallWord, LieElement};
use crate::linalg::{self, EchelonBasis};
use crate::scalar::{fmt_scalar, int, to_f64, Scalar};

/// Element of `Λ²V`, stored as the antisymmetric matrix `m[a][b] = ξ_ab`
/// so that `ξ = Σ_{a<b} ξ_ab e_a ∧ e_b`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bivector {
    m: Vec<Vec<Scalar>>,
}

impl Bivector {
    pub fn zero(r: usize) -> Self {
        Self {
            m: vec![vec![Scalar::zero(); r]; r],
        }
    }

    /// `e_a ∧ e_b` (0-based indices).
    pub fn basic(r: usize, a: usize, b: usize) -> Self {
        let mut x = Self::zero(r);
        if a != b {
            x.m[a][b] = Scalar::one();
            x.m[b][a] = -Scalar::one();
        }
        x
    }

    /// `p ∧ q`.
    pub fn wedge_vectors(p: &[Scalar], q: &[Scalar]) -> Self {
        let r = p.len();
        let m = (0..r)
            .map(|a| (0..r).map(|b| &p[a] * &q[b] - &p[b] * &q[a]).collect())
            .collect();
        Self { m }
    }

    pub fn from_matrix(m: Vec<Vec<Scalar>>) -> Result<Self> {
        let r = m.len();
        for (a, row) in m.iter().enumerate() {
            if row.len() != r {
                return Err(Error::DimensionMismatch {
                    expected: r,
                    got: row.len(),
                });
            }
            for b in 0..r {
                if row[b] != -m[b][a].clone() {
                    return Err(Error::AntisymmetryViolation { i: a + 1, j: b + 1 });
                }
            }
        }
        Ok(Self { m })
    }

    /// From the components `ξ_ab`, `a < b`, in lexicographic order.
    pub fn from_components(r: usize, comps: &[Scalar]) -> Result<Self> {
        if comps.len() != r * (r.saturating_sub(1)) / 2 {
            return Err(Error::DimensionMismatch {
                expected: r * (r.saturating_sub(1)) / 2,
                got: comps.len(),
            });
        }
        let mut x = Self::zero(r);
        let mut it = comps.iter();
        for a in 0..r {
            for b in a + 1..r {
                let c = it.next().expect("length checked").clone();
                x.m[b][a] = -c.clone();
                x.m[a][b] = c;
            }
        }
        Ok(x)
    }

    pub fn components(&self) -> Vec<Scalar> {
        let r = self.dim();
        let mut out = Vec::with_capacity(r * r.saturating_sub(1) / 2);
        for a in 0..r {
            for b in a + 1..r {
                out.push(self.m[a][b].clone());
            }
        }
        out
    }

    pub fn dim(&self) -> usize {
        self.m.len()
    }

    pub fn matrix(&self) -> &[Vec<Scalar>] {
        &self.m
    }

    pub fn coeff(&self, a: usize, b: usize) -> &Scalar {
        &self.m[a][b]
    }

    pub fn add(&self, other: &Self) -> Self {
        let m = self
            .m
            .iter()
            .zip(&other.m)
            .map(|(x, y)| x.iter().zip(y).map(|(a, b)| a + b).collect())
            .collect();
        Self { m }
    }

    pub fn scale(&self, s: &Scalar) -> Self {
        Self {
            m: self
                .m
                .iter()
                .map(|row| row.iter().map(|c| c * s).collect())
                .collect(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.m.iter().flatten().all(|c| c.is_zero())
    }

    /// Skew rank (always even).
    pub fn rank(&self) -> usize {
        linalg::rank(&self.m, self.dim())
    }

    fn to_multivector(&self) -> Multivector {
        let mut terms = BTreeMap::new();
        for a in 0..self.dim() {
            for b in a + 1..self.dim() {
                if !self.m[a][b].is_zero() {
                    terms.insert(vec![a, b], self.m[a][b].clone());
                }
            }
        }
        Multivector {
            r: self.dim(),
            terms,
        }
    }

    pub fn format(&self) -> String {
        let mut out = String::new();
        for a in 0..self.dim() {
            for b in a + 1..self.dim() {
                let c = &self.m[a][b];
                if c.is_zero() {
                    continue;
                }
                push_term(&mut out, c, &format!("e{}^e{}", a + 1, b + 1));
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        out
    }
}

fn push_term(out: &mut String, c: &Scalar, label: &str) {
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

/// Element of the exterior algebra of `V`, keyed by sorted index sets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Multivector {
    r: usize,
    terms: BTreeMap<Vec<usize>, Scalar>,
}

impl Multivector {
    pub fn one(r: usize) -> Self {
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), Scalar::one());
        Self { r, terms }
    }

    pub fn vector(v: &[Scalar]) -> Self {
        let terms = v
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(i, c)| (vec![i], c.clone()))
            .collect();
        Self { r: v.len(), terms }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<usize>, &Scalar)> {
        self.terms.iter()
    }

    /// Coefficient of `e_{i1} ∧ … ∧ e_{ik}` for a sorted index list.
    pub fn coeff(&self, indices: &[usize]) -> Scalar {
        self.terms.get(indices).cloned().unwrap_or_else(Scalar::zero)
    }

    pub fn wedge(&self, other: &Self) -> Self {
        let mut terms: BTreeMap<Vec<usize>, Scalar> = BTreeMap::new();
        for (a, ca) in &self.terms {
            for (b, cb) in &other.terms {
                let Some((sign, merged)) = merge_sorted(a, b) else {
                    continue;
                };
                let c = ca * cb;
                let entry = terms.entry(merged).or_insert_with(Scalar::zero);
                if sign {
                    *entry -= c;
                } else {
                    *entry += c;
                }
            }
        }
        terms.retain(|_, c| !c.is_zero());
        Self { r: self.r, terms }
    }
}

/// Concatenates two sorted index lists into a sorted one, returning whether
/// the sorting permutation is odd. `None` if an index repeats.
fn merge_sorted(a: &[usize], b: &[usize]) -> Option<(bool, Vec<usize>)> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let mut inversions = 0usize;
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            std::cmp::Ordering::Less => {
                out.push(a[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                // b[j] jumps over the remaining elements of a.
                inversions += a.len() - i;
                out.push(b[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => return None,
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    Some((inversions % 2 == 1, out))
}

/// `ξ^k = ξ ∧ … ∧ ξ`. `k = 0` gives the unit.
pub fn wedge_power(xi: &Bivector, k: usize) -> Result<Multivector> {
    let r = xi.dim();
    if 2 * k > r {
        return Err(Error::DegreeTooHigh { degree: 2 * k, rank: r });
    }
    let base = xi.to_multivector();
    let mut acc = Multivector::one(r);
    for _ in 0..k {
        acc = acc.wedge(&base);
    }
    Ok(acc)
}

/// A point `(v, ξ)` of `V ⊕ Λ²V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step2Point {
    pub v: Vec<Scalar>,
    pub xi: Bivector,
}

impl Step2Point {
    pub fn new(v: Vec<Scalar>, xi: Bivector) -> Result<Self> {
        if v.len() != xi.dim() {
            return Err(Error::DimensionMismatch {
                expected: xi.dim(),
                got: v.len(),
            });
        }
        Ok(Self { v, xi })
    }

    pub fn rank(&self) -> usize {
        self.v.len()
    }

    /// Parses `"v;ξ"`, e.g. `"e1 + 2*e3; e1^e2 - 1/2*e3^e4"` or `"0;e1^e2"`.
    pub fn parse(r: usize, text: &str) -> Result<Self> {
        let (vt, xt) = text
            .split_once(';')
            .ok_or_else(|| Error::Parse(format!("expected `v;xi`, got `{text}`")))?;
        if xt.contains(';') {
            return Err(Error::Parse("more than one `;` in point".into()));
        }
        let v = expr::parse_linear_combination(vt, r, |l| vector_label(l, r))?;
        let compact: String = xt
            .split('^')
            .map(str::trim)
            .collect::<Vec<_>>()
            .join("^");
        let flat = expr::parse_linear_combination(&compact, r * r, |l| wedge_label(l, r))?;
        let mut m = vec![vec![Scalar::zero(); r]; r];
        for a in 0..r {
            for b in 0..r {
                m[a][b] = &flat[a * r + b] - &flat[b * r + a];
            }
        }
        Self::new(v, Bivector::from_matrix(m)?)
    }

    pub fn format(&self) -> String {
        format!("{}; {}", format_vector(&self.v), self.xi.format())
    }
}

/// `c1*e1 + c2*e2 + …`, or `0`.
pub fn format_vector(v: &[Scalar]) -> String {
    let mut out = String::new();
    for (i, c) in v.iter().enumerate() {
        if !c.is_zero() {
            push_term(&mut out, c, &format!("e{}", i + 1));
        }
    }
    if out.is_empty() {
        out.push('0');
    }
    out
}

fn vector_label(label: &str, r: usize) -> Option<usize> {
    let i: usize = label.strip_prefix('e')?.parse().ok()?;
    (1..=r).contains(&i).then(|| i - 1)
}

fn wedge_label(label: &str, r: usize) -> Option<usize> {
    let (a, b) = label.split_once('^')?;
    let a = vector_label(a, r)?;
    let b = vector_label(b, r)?;
    (a != b).then_some(a * r + b)
}

/// Image of the contraction matrix of `ξ`, as an exact basis.
pub fn support(xi: &Bivector) -> Vec<Vec<Scalar>> {
    let rows = xi.matrix();
    linalg::independent_rows(rows, xi.dim())
        .into_iter()
        .map(|i| rows[i].clone())
        .collect()
}

/// `span{v} + supp(ξ)`, as an exact basis.
pub fn support_of_point(p: &Step2Point) -> Vec<Vec<Scalar>> {
    let mut rows = vec![p.v.clone()];
    rows.extend(support(&p.xi));
    linalg::independent_rows(&rows, p.rank())
        .into_iter()
        .map(|i| rows[i].clone())
        .collect()
}

/// `dim(ℝv + supp(ξ))`.
pub fn rank2(p: &Step2Point) -> usize {
    support_of_point(p).len()
}

/// Rank test: `(v, ξ)` is abnormal iff `rank(v, ξ) ≤ r − 2`.
pub fn is_abnormal_point(p: &Step2Point) -> bool {
    let r = p.rank();
    r >= 2 && rank2(p) <= r - 2
}

/// Wedge-power test: `ξ^s = 0` and `v ∧ ξ^{s-1} = 0` for `r = 2s`, and
/// `ξ^s = 0` for `r = 2s + 1`.
pub fn pfaffian_membership(p: &Step2Point) -> bool {
    let r = p.rank();
    let s = r / 2;
    let top = wedge_power(&p.xi, s).expect("2s <= r");
    if !top.is_zero() {
        return false;
    }
    if r % 2 == 1 {
        return true;
    }
    if s == 0 {
        return false;
    }
    let lower = wedge_power(&p.xi, s - 1).expect("2(s-1) <= r");
    Multivector::vector(&p.v).wedge(&lower).is_zero()
}

/// Strata of the abnormal set for even rank.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stratum {
    /// `rank ξ = r − 2` and `v ∈ supp ξ`.
    Y,
    /// `rank ξ < r − 2`.
    Y1,
    NotAbnormal,
}

impl std::fmt::Display for Stratum {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Stratum::Y => "Y",
            Stratum::Y1 => "Y1",
            Stratum::NotAbnormal => "NotAbnormal",
        })
    }
}

pub fn stratum(p: &Step2Point) -> Result<Stratum> {
    let r = p.rank();
    if r % 2 == 1 {
        return Err(Error::OddRank(r));
    }
    let supp = support(&p.xi);
    let k = supp.len();
    if k + 2 < r {
        return Ok(Stratum::Y1);
    }
    if k + 2 == r {
        let mut e = EchelonBasis::new(r);
        for s in &supp {
            e.insert(s);
        }
        if e.contains(&p.v) {
            return Ok(Stratum::Y);
        }
    }
    Ok(Stratum::NotAbnormal)
}

/// Minimal `W ⊂ V` with `(v, ξ) ∈ W ⊕ Λ²W`, for abnormal points.
pub fn subgroup_descent(p: &Step2Point) -> Result<Vec<Vec<Scalar>>> {
    if !is_abnormal_point(p) {
        return Err(Error::NotAbnormal);
    }
    Ok(support_of_point(p))
}

/// `𝔥^λ = ker w(λ) ⊕ [ker w(λ), ker w(λ)]` for `λ` on the second layer of
/// a step-two algebra.
pub fn h_lambda(algebra: &CarnotAlgebra, lambda: &Covector) -> Result<Vec<LieElement>> {
    if algebra.step() > 2 {
        return Err(Error::InvalidArgument("algebra must have step at most 2".into()));
    }
    algebra.check_len(lambda.len())?;
    let mut restricted = vec![Scalar::zero(); algebra.dim()];
    if algebra.step() == 2 {
        for k in algebra.layer_range(2) {
            restricted[k] = lambda.coeffs()[k].clone();
        }
    }
    if restricted.iter().all(|c| c.is_zero()) {
        return Err(Error::ZeroCovector);
    }
    let lambda2 = algebra.covector(restricted)?;
    let kernel = w_kernel(algebra, &lambda2)?;
    let mut rows: Vec<Vec<Scalar>> = kernel.iter().map(|k| k.coeffs().to_vec()).collect();
    for (a, x) in kernel.iter().enumerate() {
        for y in &kernel[a + 1..] {
            rows.push(algebra.bracket(x, y)?.into_coeffs());
        }
    }
    linalg::independent_rows(&rows, algebra.dim())
        .into_iter()
        .map(|i| algebra.element(rows[i].clone()))
        .collect()
}

/// Jacobian rank at a sample of `Y` of the equations `Pf(ξ) = 0` and
/// `v ∧ ξ^{s-1} = 0`, computed in double precision with singular-value
/// tolerance `1e-9`.
pub fn codim_certificate(p: &Step2Point) -> Result<usize> {
    let r = p.rank();
    if stratum(p)? != Stratum::Y {
        return Err(Error::SampleNotInY);
    }
    let s = r / 2;
    let equations = |q: &Step2Point| -> Vec<Scalar> {
        let top = wedge_power(&q.xi, s).expect("2s <= r");
        let all: Vec<usize> = (0..r).collect();
        let mut out = vec![top.coeff(&all)];
        let lower = wedge_power(&q.xi, s - 1).expect("2(s-1) <= r");
        let w = Multivector::vector(&q.v).wedge(&lower);
        for skip in 0..r {
            let idx: Vec<usize> = (0..r).filter(|&i| i != skip).collect();
            out.push(w.coeff(&idx));
        }
        out
    };
    let base = equations(p);
    let comps = p.xi.components();
    let nvars = r + comps.len();
    // Every equation is affine in each single coordinate, so a unit
    // difference is the exact partial derivative.
    let mut columns = Vec::with_capacity(nvars);
    for x in 0..nvars {
        let mut v = p.v.clone();
        let mut c = comps.clone();
        if x < r {
            v[x] += Scalar::one();
        } else {
            c[x - r] += Scalar::one();
        }
        let q = Step2Point::new(v, Bivector::from_components(r, &c)?)?;
        let shifted = equations(&q);
        columns.push(
            shifted
                .iter()
                .zip(&base)
                .map(|(a, b)| to_f64(&(a - b)))
                .collect::<Vec<f64>>(),
        );
    }
    let rows = linalg::transpose(&columns);
    Ok(linalg::numeric_rank(&rows, 1e-9))
}

/// Random point of `Y`: `ξ` of skew rank `r − 2` built from random rational
/// vectors and `v` a random combination of them. Entries are integers in
/// `[-bound, bound]`.
pub fn random_y_sample<R: Rng>(r: usize, bound: i64, rng: &mut R) -> Result<Step2Point> {
    if r % 2 == 1 {
        return Err(Error::OddRank(r));
    }
    if r < 2 {
        return Err(Error::InvalidArgument("rank must be at least 2".into()));
    }
    loop {
        let mut rand_vec = || -> Vec<Scalar> { (0..r).map(|_| int(rng.gen_range(-bound..=bound))).collect() };
        let mut xi = Bivector::zero(r);
        let mut spanning = Vec::new();
        for _ in 0..(r - 2) / 2 {
            let p = rand_vec();
            let q = rand_vec();
            xi = xi.add(&Bivector::wedge_vectors(&p, &q));
            spanning.push(p);
            spanning.push(q);
        }
        let mut v = vec![Scalar::zero(); r];
        for w in &spanning {
            let c = int(rng.gen_range(-bound..=bound));
            for (x, y) in v.iter_mut().zip(w) {
                *x += &c * y;
            }
        }
        let p = Step2Point::new(v, xi)?;
        if stratum(&p)? == Stratum::Y {
            return Ok(p);
        }
    }
}

/// Writes `ξ = Σ p_m ∧ q_m` with `2 × (number of terms) = rank ξ`, all
/// vectors in `supp ξ`.
pub fn darboux_decomposition(xi: &Bivector) -> Vec<(Vec<Scalar>, Vec<Scalar>)> {
    let r = xi.dim();
    let mut rest = xi.clone();
    let mut out = Vec::new();
    loop {
        let pivot = (0..r)
            .flat_map(|a| (a + 1..r).map(move |b| (a, b)))
            .find(|&(a, b)| !rest.m[a][b].is_zero());
        let Some((a, b)) = pivot else { break };
        let mab = rest.m[a][b].clone();
        let p: Vec<Scalar> = rest.m[a].iter().map(|c| c / &mab).collect();
        let q = rest.m[b].clone();
        let term = Bivector::wedge_vectors(&p, &q);
        rest = rest.add(&term.scale(&-Scalar::one()));
        out.push((p, q));
    }
    out
}

/// Hall-basis index of `[X_b, X_a]` (`b > a`) in a free step-two algebra.
fn pair_indices(algebra: &CarnotAlgebra) -> Result<HashMap<(usize, usize), usize>> {
    let words = algebra
        .hall_words()
        .ok_or_else(|| Error::InvalidArgument("expected a free step-two algebra".into()))?;
    if algebra.step() != 2 {
        return Err(Error::InvalidArgument("expected a free step-two algebra".into()));
    }
    Ok(words
        .iter()
        .enumerate()
        .filter_map(|(k, w)| match *w {
            HallWord::Bracket(b, a) => Some(((b, a), k)),
            HallWord::Generator(_) => None,
        })
        .collect())
}

/// `(v, ξ)` in exponential coordinates of the free algebra. Since
/// `X_ba = [X_b, X_a] = e_b ∧ e_a`, the coordinate on `X_ba` is `-ξ_ab`.
pub fn point_to_group(algebra: &CarnotAlgebra, p: &Step2Point) -> Result<GroupElement> {
    let idx = pair_indices(algebra)?;
    let r = algebra.rank();
    if p.rank() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: p.rank(),
        });
    }
    let mut coords = vec![Scalar::zero(); algebra.dim()];
    coords[..r].clone_from_slice(&p.v);
    for a in 0..r {
        for b in a + 1..r {
            coords[idx[&(b, a)]] = -p.xi.m[a][b].clone();
        }
    }
    algebra.group_element(coords)
}

pub fn group_to_point(algebra: &CarnotAlgebra, g: &GroupElement) -> Result<Step2Point> {
    let idx = pair_indices(algebra)?;
    let r = algebra.rank();
    let mut xi = Bivector::zero(r);
    for a in 0..r {
        for b in a + 1..r {
            let c = -g.coeffs()[idx[&(b, a)]].clone();
            xi.m[b][a] = -c.clone();
            xi.m[a][b] = c;
        }
    }
    Step2Point::new(g.coeffs()[..r].to_vec(), xi)
}

/// Piecewise-constant control in the free step-two algebra ending at `p`.
/// A decomposable `ξ = p₁ ∧ q₁` is reached by three segments with
/// displacements `A = v + 2p₁ + q₁`, `B = q₁ − v`, `C = v − A − B`; every
/// further Darboux term `p_m ∧ q_m` is produced by a commutator loop
/// `p_m, q_m, −p_m, −q_m` placed in front. All values lie in
/// `span{v} + supp ξ`.
pub fn reaching_control(algebra: &CarnotAlgebra, p: &Step2Point) -> Result<PiecewiseControl> {
    pair_indices(algebra)?;
    let r = algebra.rank();
    if p.rank() != r {
        return Err(Error::DimensionMismatch {
            expected: r,
            got: p.rank(),
        });
    }
    let terms = darboux_decomposition(&p.xi);
    let (p1, q1) = terms
        .first()
        .cloned()
        .unwrap_or_else(|| (vec![Scalar::zero(); r], vec![Scalar::zero(); r]));
    let mut displacements: Vec<Vec<Scalar>> = Vec::new();
    for (pm, qm) in terms.iter().skip(1) {
        displacements.push(pm.clone());
        displacements.push(qm.clone());
        displacements.push(pm.iter().map(|c| -c).collect());
        displacements.push(qm.iter().map(|c| -c).collect());
    }
    let v = &p.v;
    let a: Vec<Scalar> = (0..r).map(|i| &v[i] + int(2) * &p1[i] + &q1[i]).collect();
    let b: Vec<Scalar> = (0..r).map(|i| &q1[i] - &v[i]).collect();
    let c: Vec<Scalar> = (0..r).map(|i| &v[i] - &a[i] - &b[i]).collect();
    displacements.extend([a, b, c]);
    let k = int(displacements.len() as i64);
    let values = displacements
        .into_iter()
        .map(|d| d.into_iter().map(|x| x * &k).collect())
        .collect();
    PiecewiseControl::uniform(algebra, values)
}
