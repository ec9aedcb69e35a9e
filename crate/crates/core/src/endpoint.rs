//! Endpoint map of horizontal controls, the image of its differential,
//! abnormality certificates and the adjoint-equation integrator.

use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::group::{adjoint_apply_vec, bch_vec};
use crate::lie::{AlgebraId, CarnotAlgebra, Covector, GroupElement, Homomorphism, LieElement};
use crate::linalg::{self, EchelonBasis};
use crate::scalar::{to_f64, Scalar};

/// Piecewise-constant control with values in the first layer. Segment `k`
/// runs over `[t_k, t_{k+1}]` with constant value `values[k]`, given as
/// coordinates over the first-layer basis.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PiecewiseControl {
    algebra: AlgebraId,
    breakpoints: Vec<Scalar>,
    values: Vec<Vec<Scalar>>,
}

impl PiecewiseControl {
    pub fn new(
        algebra: &CarnotAlgebra,
        breakpoints: Vec<Scalar>,
        values: Vec<Vec<Scalar>>,
    ) -> Result<Self> {
        if breakpoints.len() < 2 || values.len() + 1 != breakpoints.len() {
            return Err(Error::InvalidArgument(format!(
                "{} breakpoints need {} values, got {}",
                breakpoints.len(),
                breakpoints.len().saturating_sub(1),
                values.len()
            )));
        }
        if !breakpoints[0].is_zero() || !breakpoints[breakpoints.len() - 1].is_one() {
            return Err(Error::InvalidArgument(
                "breakpoints must start at 0 and end at 1".into(),
            ));
        }
        if breakpoints.windows(2).any(|w| w[0] >= w[1]) {
            return Err(Error::InvalidArgument(
                "breakpoints must be strictly increasing".into(),
            ));
        }
        for v in &values {
            if v.len() != algebra.rank() {
                return Err(Error::DimensionMismatch {
                    expected: algebra.rank(),
                    got: v.len(),
                });
            }
        }
        Ok(Self {
            algebra: algebra.id(),
            breakpoints,
            values,
        })
    }

    /// Control with equally spaced breakpoints.
    pub fn uniform(algebra: &CarnotAlgebra, values: Vec<Vec<Scalar>>) -> Result<Self> {
        let k = values.len().max(1) as i64;
        let breakpoints = (0..=k).map(|i| Scalar::new(i.into(), k.into())).collect();
        Self::new(algebra, breakpoints, values)
    }

    /// Builds a control from Lie algebra elements, which must lie in `V_1`.
    pub fn from_elements(
        algebra: &CarnotAlgebra,
        breakpoints: Vec<Scalar>,
        values: &[LieElement],
    ) -> Result<Self> {
        let mut vs = Vec::with_capacity(values.len());
        for v in values {
            if v.algebra() != algebra.id() {
                return Err(Error::AlgebraMismatch);
            }
            if v.coeffs()[algebra.rank()..].iter().any(|c| !c.is_zero()) {
                return Err(Error::InvalidArgument(
                    "control values must lie in the first layer".into(),
                ));
            }
            vs.push(v.coeffs()[..algebra.rank()].to_vec());
        }
        Self::new(algebra, breakpoints, vs)
    }

    pub fn zero(algebra: &CarnotAlgebra) -> Self {
        Self {
            algebra: algebra.id(),
            breakpoints: vec![Scalar::zero(), Scalar::one()],
            values: vec![vec![Scalar::zero(); algebra.rank()]],
        }
    }

    pub fn algebra(&self) -> AlgebraId {
        self.algebra
    }

    pub fn breakpoints(&self) -> &[Scalar] {
        &self.breakpoints
    }

    pub fn values(&self) -> &[Vec<Scalar>] {
        &self.values
    }

    pub fn segments(&self) -> usize {
        self.values.len()
    }

    pub fn is_zero(&self) -> bool {
        self.values.iter().flatten().all(|c| c.is_zero())
    }

    /// Splits at `t` into two controls on `[0, 1]` whose endpoints are
    /// `γ(t)` and `γ(t)^{-1} γ(1)`.
    pub fn split_at(&self, t: &Scalar) -> Result<(Self, Self)> {
        if *t <= Scalar::zero() || *t >= Scalar::one() {
            return Err(Error::InvalidArgument("split point must lie in (0, 1)".into()));
        }
        let mut left: Vec<(Scalar, Scalar, Vec<Scalar>)> = Vec::new();
        let mut right: Vec<(Scalar, Scalar, Vec<Scalar>)> = Vec::new();
        for (k, v) in self.values.iter().enumerate() {
            let (a, b) = (&self.breakpoints[k], &self.breakpoints[k + 1]);
            if b <= t {
                left.push((a.clone(), b.clone(), v.clone()));
            } else if a >= t {
                right.push((a.clone(), b.clone(), v.clone()));
            } else {
                left.push((a.clone(), t.clone(), v.clone()));
                right.push((t.clone(), b.clone(), v.clone()));
            }
        }
        let rescale = |pieces: Vec<(Scalar, Scalar, Vec<Scalar>)>, start: &Scalar, len: &Scalar| {
            let mut bps = vec![Scalar::zero()];
            let mut vals = Vec::new();
            for (_, b, v) in pieces {
                bps.push((b - start) / len);
                vals.push(v.iter().map(|c| c * len).collect());
            }
            Self {
                algebra: self.algebra,
                breakpoints: bps,
                values: vals,
            }
        };
        let one = Scalar::one();
        Ok((
            rescale(left, &Scalar::zero(), t),
            rescale(right, t, &(&one - t)),
        ))
    }

    fn check(&self, algebra: &CarnotAlgebra) -> Result<()> {
        if self.algebra != algebra.id() {
            return Err(Error::AlgebraMismatch);
        }
        Ok(())
    }

    fn full_value(&self, algebra: &CarnotAlgebra, k: usize) -> Vec<Scalar> {
        let mut v = vec![Scalar::zero(); algebra.dim()];
        v[..algebra.rank()].clone_from_slice(&self.values[k]);
        v
    }
}

/// `γ(t_0), γ(t_1), …, γ(t_k)` at the breakpoints.
pub fn breakpoint_trajectory(
    algebra: &CarnotAlgebra,
    u: &PiecewiseControl,
) -> Result<Vec<GroupElement>> {
    u.check(algebra)?;
    let mut points = Vec::with_capacity(u.segments() + 1);
    let mut current = vec![Scalar::zero(); algebra.dim()];
    points.push(algebra.group_element(current.clone())?);
    for k in 0..u.segments() {
        let dt = &u.breakpoints[k + 1] - &u.breakpoints[k];
        let step: Vec<Scalar> = u.full_value(algebra, k).iter().map(|c| c * &dt).collect();
        current = bch_vec(algebra, &current, &step);
        points.push(algebra.group_element(current.clone())?);
    }
    Ok(points)
}

/// `γ_u(1)`.
pub fn endpoint(algebra: &CarnotAlgebra, u: &PiecewiseControl) -> Result<GroupElement> {
    Ok(breakpoint_trajectory(algebra, u)?
        .pop()
        .expect("trajectory includes the start point"))
}

/// Image of the differential of the endpoint map, right-trivialized.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ImageSpan {
    /// Independent generators, in the deterministic order they were found.
    pub basis: Vec<LieElement>,
    pub rank: usize,
    pub dim: usize,
}

fn image_generators(algebra: &CarnotAlgebra, u: &PiecewiseControl) -> Result<Vec<Vec<Scalar>>> {
    let starts = breakpoint_trajectory(algebra, u)?;
    let r = algebra.rank();
    let s = algebra.step();
    let per_segment: Vec<Vec<Vec<Scalar>>> = (0..u.segments())
        .into_par_iter()
        .map(|k| {
            let value = u.full_value(algebra, k);
            let start = starts[k].coeffs();
            let mut out = Vec::with_capacity(r * s);
            for i in 0..r {
                let mut w = vec![Scalar::zero(); algebra.dim()];
                w[i] = Scalar::one();
                for j in 0..s {
                    if j > 0 {
                        w = algebra.bracket_vec(&value, &w);
                        if w.iter().all(|c| c.is_zero()) {
                            break;
                        }
                    }
                    out.push(adjoint_apply_vec(algebra, start, &w));
                }
            }
            out
        })
        .collect();
    Ok(per_segment.into_iter().flatten().collect())
}

/// Exact basis of `span{Ad_{γ(t)} V_1 : t ∈ [0, 1]}`. On each segment
/// `Ad_{γ(t)} = Ad_{γ(t_k)} e^{(t - t_k) ad_u}`, a polynomial in `t` of
/// degree below the step, so the vectors `Ad_{γ(t_k)} ad_u^j e_i` span it.
pub fn d_end_image(algebra: &CarnotAlgebra, u: &PiecewiseControl) -> Result<ImageSpan> {
    let gens = image_generators(algebra, u)?;
    let picked = linalg::independent_rows(&gens, algebra.dim());
    let basis = picked
        .iter()
        .map(|&i| algebra.element(gens[i].clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(ImageSpan {
        rank: basis.len(),
        dim: algebra.dim(),
        basis,
    })
}

/// Outcome of the abnormality test for a control.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbnormalityCertificate {
    pub abnormal: bool,
    pub image_rank: usize,
    pub dim: usize,
    /// Basis of the covectors annihilating the image.
    pub annihilators: Vec<Covector>,
}

/// Decides whether `u` is a critical point of the endpoint map and, if so,
/// returns every covector killing `Ad_{γ(t)} V_1` for all `t`.
pub fn is_abnormal(algebra: &CarnotAlgebra, u: &PiecewiseControl) -> Result<AbnormalityCertificate> {
    let gens = image_generators(algebra, u)?;
    let n = algebra.dim();
    let mut span = EchelonBasis::new(n);
    for g in &gens {
        span.insert(g);
        if span.is_full() {
            break;
        }
    }
    let rank = span.rank();
    let annihilators = if rank == n {
        Vec::new()
    } else {
        linalg::nullspace(&gens, n)
    };
    // Independent check at the breakpoints themselves.
    let points = breakpoint_trajectory(algebra, u)?;
    for lambda in &annihilators {
        for g in &points {
            for i in 0..algebra.rank() {
                let mut e = vec![Scalar::zero(); n];
                e[i] = Scalar::one();
                let v = adjoint_apply_vec(algebra, g.coeffs(), &e);
                assert!(
                    linalg::dot(lambda, &v).is_zero(),
                    "annihilator fails at a breakpoint"
                );
            }
        }
    }
    let annihilators = annihilators
        .into_iter()
        .map(|c| algebra.covector(c))
        .collect::<Result<Vec<_>>>()?;
    Ok(AbnormalityCertificate {
        abnormal: rank < n,
        image_rank: rank,
        dim: n,
        annihilators,
    })
}

/// Pushes a control forward along a graded homomorphism.
pub fn project_control(
    pi: &Homomorphism,
    source: &CarnotAlgebra,
    target: &CarnotAlgebra,
    u: &PiecewiseControl,
) -> Result<PiecewiseControl> {
    u.check(source)?;
    if pi.source() != source.id() || pi.target() != target.id() {
        return Err(Error::AlgebraMismatch);
    }
    let values = (0..u.segments())
        .map(|k| pi.apply_vec(&u.full_value(source, k))[..target.rank()].to_vec())
        .collect();
    PiecewiseControl::new(target, u.breakpoints.clone(), values)
}

/// A control sampled from a function of time, in double precision.
pub struct SmoothControl<'a> {
    f: Box<dyn Fn(f64) -> Vec<f64> + Send + Sync + 'a>,
}

impl<'a> SmoothControl<'a> {
    pub fn new<F>(f: F) -> Self
    where
        F: Fn(f64) -> Vec<f64> + Send + Sync + 'a,
    {
        Self { f: Box::new(f) }
    }

    pub fn at(&self, t: f64) -> Vec<f64> {
        (self.f)(t)
    }

    /// Constant control.
    pub fn constant(value: Vec<f64>) -> Self {
        Self::new(move |_| value.clone())
    }
}

/// Covector trajectory from [`adjoint_integrate`].
#[derive(Clone, Debug, PartialEq)]
pub struct AdjointTrajectory {
    pub times: Vec<f64>,
    pub covectors: Vec<Vec<f64>>,
    /// `max_t max_{i ≤ r} |Σ_{j,k} c_ij^k u_j(t) η_k(t)|`.
    pub residual: f64,
}

/// Integrates `dη_i/dt = -Σ_{j,k} c_ij^k u_j η_k` for `i` above the first
/// layer with classical RK4 on `[0, 1]`, keeping the first-layer components
/// at zero, and reports how far the constraint
/// `Σ_{j,k} c_ij^k u_j η_k = 0` (`i` in the first layer) is from holding.
pub fn adjoint_integrate(
    algebra: &CarnotAlgebra,
    u: &SmoothControl<'_>,
    eta0: &[f64],
    step: f64,
) -> Result<AdjointTrajectory> {
    let n = algebra.dim();
    let r = algebra.rank();
    if eta0.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: eta0.len(),
        });
    }
    if !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument("step must be positive".into()));
    }
    if eta0[..r].iter().any(|&x| x != 0.0) {
        return Err(Error::InvalidArgument(
            "initial covector must vanish on the first layer".into(),
        ));
    }
    // coupling[i] lists (j, k, c_ij^k) for j in the first layer.
    let coupling: Vec<Vec<(usize, usize, f64)>> = (0..n)
        .map(|i| {
            let mut out = Vec::new();
            for j in 0..r {
                for (k, c) in algebra.brackets().terms(i, j) {
                    out.push((j, *k, c.approx));
                }
            }
            out
        })
        .collect();
    let contract = |i: usize, uv: &[f64], eta: &[f64]| -> f64 {
        coupling[i].iter().map(|&(j, k, c)| c * uv[j] * eta[k]).sum()
    };
    let rhs = |t: f64, eta: &[f64]| -> Vec<f64> {
        let uv = u.at(t);
        (0..n)
            .map(|i| if i < r { 0.0 } else { -contract(i, &uv, eta) })
            .collect()
    };
    let residual_at = |t: f64, eta: &[f64]| -> f64 {
        let uv = u.at(t);
        (0..r).map(|i| contract(i, &uv, eta).abs()).fold(0.0, f64::max)
    };
    let steps = (1.0 / step).ceil().max(1.0) as usize;
    let h = 1.0 / steps as f64;
    let mut eta = eta0.to_vec();
    let mut times = Vec::with_capacity(steps + 1);
    let mut covectors = Vec::with_capacity(steps + 1);
    let mut residual = residual_at(0.0, &eta);
    times.push(0.0);
    covectors.push(eta.clone());
    let axpy = |a: &[f64], s: f64, b: &[f64]| -> Vec<f64> {
        a.iter().zip(b).map(|(x, y)| x + s * y).collect()
    };
    for m in 0..steps {
        let t = m as f64 * h;
        let k1 = rhs(t, &eta);
        let k2 = rhs(t + h / 2.0, &axpy(&eta, h / 2.0, &k1));
        let k3 = rhs(t + h / 2.0, &axpy(&eta, h / 2.0, &k2));
        let k4 = rhs(t + h, &axpy(&eta, h, &k3));
        for i in 0..n {
            eta[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
        }
        let tn = (m + 1) as f64 * h;
        residual = residual.max(residual_at(tn, &eta));
        times.push(tn);
        covectors.push(eta.clone());
    }
    Ok(AdjointTrajectory {
        times,
        covectors,
        residual,
    })
}

/// CSV with header `t,<prefix>1,…,<prefix>n`.
pub fn trajectory_csv(prefix: &str, times: &[f64], rows: &[Vec<f64>]) -> String {
    let n = rows.first().map_or(0, |r| r.len());
    let mut out = String::from("t");
    for i in 1..=n {
        out.push_str(&format!(",{prefix}{i}"));
    }
    out.push('\n');
    for (t, row) in times.iter().zip(rows) {
        out.push_str(&format!("{t}"));
        for x in row {
            out.push_str(&format!(",{x:e}"));
        }
        out.push('\n');
    }
    out
}

/// Exact breakpoint trajectory converted to doubles.
pub fn breakpoint_trajectory_f64(
    algebra: &CarnotAlgebra,
    u: &PiecewiseControl,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    let pts = breakpoint_trajectory(algebra, u)?;
    Ok((
        u.breakpoints.iter().map(to_f64).collect(),
        pts.iter().map(|g| g.to_f64()).collect(),
    ))
}
