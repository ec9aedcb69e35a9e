//! Rank criteria for the algebraic Sard property on the prolongation
//! `𝔤̃ = 𝔥 ⊕ 𝔤`, where `𝔥` is a space of strata-preserving derivations.
//!
//! Elements of `𝔤̃` are coefficient vectors with the `𝔥` coordinates first.

use num_traits::{One, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{adjoint_vec, exp_nilpotent};
use crate::lie::{expr, CarnotAlgebra, Derivation, GroupElement, LieElement};
use crate::linalg::{self, EchelonBasis};
use crate::scalar::{int, Scalar};

/// Coefficient box used by [`generic_sampler`].
pub const SAMPLE_BOUND: i64 = 9;

#[derive(Clone, Debug)]
pub struct Prolongation {
    base: CarnotAlgebra,
    h: Vec<Derivation>,
    h_labels: Vec<String>,
    /// `[D_a, D_b]` in the basis of `𝔥`.
    h_brackets: Vec<Vec<Vec<Scalar>>>,
}

impl Prolongation {
    /// `𝔥` = all strata-preserving derivations determined by their action
    /// on `V_1`; for free algebras this is `gl(V_1)` with basis `E_ij`.
    pub fn with_gl(base: CarnotAlgebra) -> Result<Self> {
        let h = base.derivation_space();
        let r = base.rank();
        let labels = if base.is_free() {
            (0..r)
                .flat_map(|i| (0..r).map(move |j| (i, j)))
                .map(|(i, j)| {
                    if r <= 9 {
                        format!("E{}{}", i + 1, j + 1)
                    } else {
                        format!("E{},{}", i + 1, j + 1)
                    }
                })
                .collect()
        } else {
            (1..=h.len()).map(|k| format!("D{k}")).collect()
        };
        Self::new(base, h, labels)
    }

    /// `h` must be linearly independent and closed under commutators.
    pub fn new(base: CarnotAlgebra, h: Vec<Derivation>, labels: Vec<String>) -> Result<Self> {
        if labels.len() != h.len() {
            return Err(Error::DimensionMismatch {
                expected: h.len(),
                got: labels.len(),
            });
        }
        for d in &h {
            base.check_id(d.algebra())?;
        }
        let n = base.dim();
        let flat: Vec<Vec<Scalar>> = h.iter().map(|d| d.matrix().concat()).collect();
        if linalg::rank(&flat, n * n) != h.len() {
            return Err(Error::InvalidArgument("derivations are linearly dependent".into()));
        }
        let mut h_brackets = vec![vec![Vec::new(); h.len()]; h.len()];
        for a in 0..h.len() {
            for b in 0..h.len() {
                let ab = linalg::mat_mul(h[a].matrix(), h[b].matrix());
                let ba = linalg::mat_mul(h[b].matrix(), h[a].matrix());
                let comm: Vec<Scalar> = ab
                    .concat()
                    .into_iter()
                    .zip(ba.concat())
                    .map(|(x, y)| x - y)
                    .collect();
                h_brackets[a][b] = linalg::coordinates_in(&flat, &comm).ok_or_else(|| {
                    Error::InvalidArgument("derivation space is not closed under commutators".into())
                })?;
            }
        }
        Ok(Self {
            base,
            h,
            h_labels: labels,
            h_brackets,
        })
    }

    pub fn base(&self) -> &CarnotAlgebra {
        &self.base
    }

    pub fn derivations(&self) -> &[Derivation] {
        &self.h
    }

    pub fn h_dim(&self) -> usize {
        self.h.len()
    }

    pub fn dim(&self) -> usize {
        self.h.len() + self.base.dim()
    }

    /// Degree of basis vector `k`: 0 on `𝔥`, the layer index on `𝔤`.
    pub fn degree(&self, k: usize) -> usize {
        if k < self.h_dim() {
            0
        } else {
            self.base.layer(k - self.h_dim())
        }
    }

    pub fn label(&self, k: usize) -> &str {
        if k < self.h_dim() {
            &self.h_labels[k]
        } else {
            self.base.label(k - self.h_dim())
        }
    }

    /// Embeds an element of `𝔤`.
    pub fn embed(&self, x: &LieElement) -> Result<Vec<Scalar>> {
        self.base.check_id(x.algebra())?;
        let mut out = vec![Scalar::zero(); self.h_dim()];
        out.extend_from_slice(x.coeffs());
        Ok(out)
    }

    pub fn project(&self, x: &[Scalar]) -> Result<LieElement> {
        self.base.element(x[self.h_dim()..].to_vec())
    }

    pub fn unit(&self, k: usize) -> Vec<Scalar> {
        let mut e = vec![Scalar::zero(); self.dim()];
        e[k] = Scalar::one();
        e
    }

    fn derivation_matrix(&self, alpha: &[Scalar]) -> Vec<Vec<Scalar>> {
        let n = self.base.dim();
        let mut m = vec![vec![Scalar::zero(); n]; n];
        for (a, d) in alpha.iter().zip(&self.h) {
            if a.is_zero() {
                continue;
            }
            for (row, drow) in m.iter_mut().zip(d.matrix()) {
                for (x, y) in row.iter_mut().zip(drow) {
                    *x += a * y;
                }
            }
        }
        m
    }

    /// `[(α, a), (β, b)] = ([D_α, D_β], D_α b − D_β a + [a, b])`.
    pub fn bracket(&self, x: &[Scalar], y: &[Scalar]) -> Vec<Scalar> {
        let m = self.h_dim();
        let (alpha, a) = x.split_at(m);
        let (beta, b) = y.split_at(m);
        let mut out = vec![Scalar::zero(); self.dim()];
        for (i, ai) in alpha.iter().enumerate() {
            if ai.is_zero() {
                continue;
            }
            for (j, bj) in beta.iter().enumerate() {
                if bj.is_zero() {
                    continue;
                }
                let c = ai * bj;
                for (o, v) in out[..m].iter_mut().zip(&self.h_brackets[i][j]) {
                    *o += &c * v;
                }
            }
        }
        let da = linalg::mat_vec(&self.derivation_matrix(alpha), b);
        let db = linalg::mat_vec(&self.derivation_matrix(beta), a);
        let ab = self.base.bracket_vec(a, b);
        for (k, o) in out[m..].iter_mut().enumerate() {
            *o = &da[k] - &db[k] + &ab[k];
        }
        out
    }

    /// Matrix of `ad_x`, as rows.
    pub fn ad_matrix(&self, x: &[Scalar]) -> Vec<Vec<Scalar>> {
        let cols: Vec<Vec<Scalar>> = (0..self.dim())
            .map(|j| self.bracket(x, &self.unit(j)))
            .collect();
        linalg::transpose(&cols)
    }

    /// `Ad_{exp(-x)} = e^{-ad_x}` when `ad_x` is nilpotent.
    pub fn adjoint_inverse(&self, x: &[Scalar]) -> Result<Vec<Vec<Scalar>>> {
        let neg: Vec<Scalar> = x.iter().map(|c| -c).collect();
        exp_nilpotent(&self.ad_matrix(&neg)).ok_or(Error::NonNilpotentProlongation)
    }

    /// First basis triple (1-based) violating Jacobi, if any.
    pub fn jacobi_violation(&self) -> Option<(usize, usize, usize)> {
        let d = self.dim();
        let e: Vec<Vec<Scalar>> = (0..d).map(|k| self.unit(k)).collect();
        for i in 0..d {
            for j in i + 1..d {
                let ij = self.bracket(&e[i], &e[j]);
                for k in j + 1..d {
                    let a = self.bracket(&ij, &e[k]);
                    let b = self.bracket(&self.bracket(&e[j], &e[k]), &e[i]);
                    let c = self.bracket(&self.bracket(&e[k], &e[i]), &e[j]);
                    if a.iter().zip(&b).zip(&c).any(|((x, y), z)| !(x + y + z).is_zero()) {
                        return Some((i + 1, j + 1, k + 1));
                    }
                }
            }
        }
        None
    }

    /// Grading check `[𝔤̃_i, 𝔤̃_j] ⊆ 𝔤̃_{i+j}` on basis pairs.
    pub fn is_graded(&self) -> bool {
        let d = self.dim();
        (0..d).all(|i| {
            (0..d).all(|j| {
                let target = self.degree(i) + self.degree(j);
                self.bracket(&self.unit(i), &self.unit(j))
                    .iter()
                    .enumerate()
                    .all(|(k, c)| c.is_zero() || self.degree(k) == target)
            })
        })
    }

    /// Parses a linear combination over the labels of `𝔥` and `𝔤`.
    pub fn parse_element(&self, text: &str) -> Result<Vec<Scalar>> {
        let m = self.h_dim();
        expr::parse_linear_combination(text, self.dim(), |l| {
            self.h_labels
                .iter()
                .position(|x| x == l)
                .or_else(|| self.base.index_of(l).map(|k| k + m))
        })
    }

    pub fn format(&self, x: &[Scalar]) -> String {
        let labels: Vec<String> = (0..self.dim()).map(|k| self.label(k).to_string()).collect();
        crate::lie::format_terms(x, &labels)
    }

    /// Basis of `𝔥 ⊕ V_1`.
    fn h_plus_v1(&self) -> Vec<Vec<Scalar>> {
        let m = self.h_dim();
        (0..m)
            .chain(self.base.layer_range(1).map(|k| k + m))
            .map(|k| self.unit(k))
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CriterionResult {
    pub holds: bool,
    pub rank: usize,
    pub dim: usize,
}

fn span_rank(rows: impl IntoIterator<Item = Vec<Scalar>>, dim: usize) -> CriterionResult {
    let mut e = EchelonBasis::new(dim);
    for r in rows {
        e.insert(&r);
        if e.is_full() {
            break;
        }
    }
    CriterionResult {
        holds: e.is_full(),
        rank: e.rank(),
        dim,
    }
}

/// `𝔥 + V_1 + ad_ξ(𝔥 + V_1) = 𝔤̃`.
pub fn criterion_infinitesimal(p: &Prolongation, xi: &[Scalar]) -> Result<CriterionResult> {
    check_len(p, xi)?;
    let base = p.h_plus_v1();
    let images: Vec<Vec<Scalar>> = base.iter().map(|b| p.bracket(xi, b)).collect();
    Ok(span_rank(base.into_iter().chain(images), p.dim()))
}

/// `𝔥 + V_1 + Ad_{p⁻¹}(𝔥 + V_1) = 𝔤̃` for `p = exp(x)`.
pub fn criterion_group(p: &Prolongation, x: &[Scalar]) -> Result<CriterionResult> {
    check_len(p, x)?;
    let ad = p.adjoint_inverse(x)?;
    let base = p.h_plus_v1();
    let images: Vec<Vec<Scalar>> = base.iter().map(|b| linalg::mat_vec(&ad, b)).collect();
    Ok(span_rank(base.into_iter().chain(images), p.dim()))
}

fn check_len(p: &Prolongation, x: &[Scalar]) -> Result<()> {
    if x.len() != p.dim() {
        return Err(Error::DimensionMismatch {
            expected: p.dim(),
            got: x.len(),
        });
    }
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SamplerReport {
    pub trials: usize,
    pub seed: u64,
    pub successes: usize,
}

/// Random element of `𝔤̃` for trial `trial`: integer coefficients uniform
/// in `[-SAMPLE_BOUND, SAMPLE_BOUND]`, drawn from the ChaCha8 stream
/// `trial` seeded by `seed`.
pub fn sample_element(p: &Prolongation, seed: u64, trial: u64) -> Vec<Scalar> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    (0..p.dim())
        .map(|_| int(rng.gen_range(-SAMPLE_BOUND..=SAMPLE_BOUND)))
        .collect()
}

/// Counts random `ξ` satisfying [`criterion_infinitesimal`]. The criterion
/// set is Zariski open, so one success proves it non-empty, while zero
/// successes is only evidence of emptiness.
pub fn generic_sampler(p: &Prolongation, trials: usize, seed: u64) -> Result<SamplerReport> {
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be at least 1".into()));
    }
    let successes = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            let xi = sample_element(p, seed, t);
            criterion_infinitesimal(p, &xi).map(|r| usize::from(r.holds))
        })
        .collect::<Result<Vec<usize>>>()?
        .into_iter()
        .sum();
    Ok(SamplerReport {
        trials,
        seed,
        successes,
    })
}

fn group_log(p: &Prolongation, g: &GroupElement) -> Result<Vec<Scalar>> {
    p.base.check_id(g.algebra())?;
    let mut x = vec![Scalar::zero(); p.h_dim()];
    x.extend_from_slice(g.coeffs());
    Ok(x)
}

/// Left-trivialized contact field `π_𝔤(Ad_{g⁻¹} X)` at `g`.
pub fn contact_field_eval(p: &Prolongation, x: &[Scalar], g: &GroupElement) -> Result<LieElement> {
    check_len(p, x)?;
    let ad = p.adjoint_inverse(&group_log(p, g)?)?;
    p.project(&linalg::mat_vec(&ad, x))
}

/// `Ad_{g⁻¹}V_1 + V_1 + π_𝔤(Ad_{g⁻¹}𝔥) = 𝔤`.
pub fn sard_set_membership(p: &Prolongation, g: &GroupElement) -> Result<bool> {
    let ad = p.adjoint_inverse(&group_log(p, g)?)?;
    let m = p.h_dim();
    let n = p.base.dim();
    let inv: Vec<Scalar> = g.coeffs().iter().map(|c| -c).collect();
    let base_ad = adjoint_vec(&p.base, &inv);
    let v1 = p.base.layer_range(1);
    let mut rows = Vec::new();
    for k in v1.clone() {
        let mut e = vec![Scalar::zero(); n];
        e[k] = Scalar::one();
        rows.push(linalg::mat_vec(&base_ad, &e));
        rows.push(e);
    }
    for a in 0..m {
        rows.push(linalg::mat_vec(&ad, &p.unit(a))[m..].to_vec());
    }
    Ok(span_rank(rows, n).holds)
}
