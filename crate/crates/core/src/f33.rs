//! Regular abnormal extremals of the free group of rank 3 and step 3.
//!
//! The dual of the second layer is identified with `ℝ³` through
//! `λ₂ = (P₂₃, P₃₁, P₁₂)` and the dual of the third layer with traceless
//! `3 × 3` matrices through the table in [`regular_covector`]. Along a
//! regular abnormal extremal the control equals `λ₂(t)` and evolves by
//! `u̇ = A u`.

use nalgebra::Matrix3;
use num_traits::Zero;

use crate::endpoint::{adjoint_integrate, SmoothControl};
use crate::error::{Error, Result};
use crate::group::{adjoint_vec, bch_vec, coadjoint_with};
use crate::lie::{CarnotAlgebra, Covector};
use crate::linalg;
use crate::scalar::{to_f64, Scalar};

/// Default number of piecewise-constant segments on `[0, 1]`.
pub const DEFAULT_SEGMENTS: usize = 2000;
/// Step used for the adjoint integration.
pub const ADJOINT_STEP: f64 = 1e-3;

pub fn algebra() -> CarnotAlgebra {
    CarnotAlgebra::free(3, 3).expect("f(3,3) is small")
}

/// `λ₂ = u₀` and `λ₃ = A`, with `λ₁ = 0`.
#[derive(Clone, Debug, PartialEq)]
pub struct ExtremalDatum {
    pub u0: [f64; 3],
    pub a: [[f64; 3]; 3],
}

impl ExtremalDatum {
    pub fn new(u0: [f64; 3], a: [[f64; 3]; 3]) -> Result<Self> {
        let trace = a[0][0] + a[1][1] + a[2][2];
        let scale = a.iter().flatten().fold(1.0f64, |m, x| m.max(x.abs()));
        if trace.abs() > 1e-12 * scale {
            return Err(Error::InvalidArgument(format!("trace of A is {trace}, expected 0")));
        }
        Ok(Self { u0, a })
    }

    pub fn diagonal(u0: [f64; 3], a: f64, b: f64) -> Self {
        let c = -a - b;
        Self {
            u0,
            a: [[a, 0.0, 0.0], [0.0, b, 0.0], [0.0, 0.0, c]],
        }
    }

    fn is_diagonal(&self) -> bool {
        (0..3).all(|i| (0..3).all(|j| i == j || self.a[i][j] == 0.0))
    }
}

/// Spanning vector `(P₂₃, P₃₁, P₁₂)` of the kernel of a nonzero `3 × 3`
/// skew matrix.
pub fn control_kernel(p: &[Vec<Scalar>]) -> Result<[Scalar; 3]> {
    if p.len() != 3 || p.iter().any(|r| r.len() != 3) {
        return Err(Error::DimensionMismatch {
            expected: 3,
            got: p.len(),
        });
    }
    for i in 0..3 {
        for j in 0..3 {
            if p[i][j] != -p[j][i].clone() {
                return Err(Error::AntisymmetryViolation { i: i + 1, j: j + 1 });
            }
        }
    }
    if p.iter().flatten().all(|c| c.is_zero()) {
        return Err(Error::ZeroMatrix);
    }
    Ok([p[1][2].clone(), p[2][0].clone(), p[0][1].clone()])
}

/// `u(t) = e^{tA} u₀`, in closed form when `A` is diagonal and through the
/// matrix exponential otherwise.
pub fn extremal_controls(d: &ExtremalDatum, t: f64) -> [f64; 3] {
    if d.is_diagonal() {
        return [0, 1, 2].map(|i| d.u0[i] * (d.a[i][i] * t).exp());
    }
    let m = Matrix3::from_fn(|i, j| d.a[i][j] * t);
    let u = m.exp() * nalgebra::Vector3::from_row_slice(&d.u0);
    [u[0], u[1], u[2]]
}

fn slot(alg: &CarnotAlgebra, label: &str) -> usize {
    alg.index_of(label).expect("Hall label of f(3,3)")
}

/// Entries `(label, sign, source)` of the covector: `source` is `0..3` for
/// `u₀[source]` and `3 + 3i + j` for `A[i][j]`.
const TABLE: [(&str, i8, usize); 11] = [
    ("X21", -1, 2),
    ("X31", 1, 1),
    ("X32", -1, 0),
    ("X211", 1, 3 + 6),
    ("X212", 1, 3 + 7),
    ("X213", 1, 3 + 8),
    ("X311", -1, 3 + 3),
    ("X312", -1, 3 + 4),
    ("X313", -1, 3 + 5),
    ("X322", 1, 3 + 1),
    ("X323", 1, 3 + 2),
];

/// Covector with `λ₁ = 0`, `(P₂₃, P₃₁, P₁₂) = u₀` and third-layer part
/// given by `A`. For `u₀ = (1, 1, 1)` and `A = diag(a, b, c)` its negative is
/// `e₂₁* − e₃₁* + e₃₂* − c e₂₁₃* + b e₃₁₂*`.
pub fn regular_covector(alg: &CarnotAlgebra, u0: &[Scalar; 3], a: &[[Scalar; 3]; 3]) -> Result<Covector> {
    let mut eta = vec![Scalar::zero(); alg.dim()];
    for (label, sign, src) in TABLE {
        let v = if src < 3 {
            u0[src].clone()
        } else {
            a[(src - 3) / 3][(src - 3) % 3].clone()
        };
        eta[slot(alg, label)] = if sign < 0 { -v } else { v };
    }
    alg.covector(eta)
}

/// Double-precision version of [`regular_covector`].
pub fn regular_covector_f64(alg: &CarnotAlgebra, d: &ExtremalDatum) -> Vec<f64> {
    let mut eta = vec![0.0; alg.dim()];
    for (label, sign, src) in TABLE {
        let v = if src < 3 {
            d.u0[src]
        } else {
            d.a[(src - 3) / 3][(src - 3) % 3]
        };
        eta[slot(alg, label)] = f64::from(sign) * v;
    }
    eta
}

/// `e₂₁* − e₃₁* + e₃₂* − c e₂₁₃* + b e₃₁₂*`.
pub fn abc_covector(alg: &CarnotAlgebra, b: &Scalar, c: &Scalar) -> Result<Covector> {
    let mut eta = vec![Scalar::zero(); alg.dim()];
    eta[slot(alg, "X21")] = Scalar::from_integer(1.into());
    eta[slot(alg, "X31")] = Scalar::from_integer((-1).into());
    eta[slot(alg, "X32")] = Scalar::from_integer(1.into());
    eta[slot(alg, "X213")] = -c.clone();
    eta[slot(alg, "X312")] = b.clone();
    alg.covector(eta)
}

/// Piecewise-constant approximation of the curve driven by `u` on
/// `[0, 1]`: `n` equal segments, each using the control value at its
/// midpoint. Returns the breakpoint times and exponential coordinates.
pub fn approximate_trajectory(
    alg: &CarnotAlgebra,
    u: &SmoothControl<'_>,
    n: usize,
) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if n == 0 {
        return Err(Error::InvalidArgument("need at least one segment".into()));
    }
    let dim = alg.dim();
    let r = alg.rank();
    let h = 1.0 / n as f64;
    let mut current = vec![0.0; dim];
    let mut times = Vec::with_capacity(n + 1);
    let mut points = Vec::with_capacity(n + 1);
    times.push(0.0);
    points.push(current.clone());
    for k in 0..n {
        let value = u.at((k as f64 + 0.5) * h);
        if value.len() != r {
            return Err(Error::DimensionMismatch {
                expected: r,
                got: value.len(),
            });
        }
        let mut step = vec![0.0; dim];
        for i in 0..r {
            step[i] = value[i] * h;
        }
        current = bch_vec(alg, &current, &step);
        times.push((k + 1) as f64 * h);
        points.push(current.clone());
    }
    Ok((times, points))
}

/// `max_t max_{i ≤ r} |λ(Ad_{γ(t)} e_i)|`.
pub fn extremal_residual(alg: &CarnotAlgebra, lambda: &[f64], trajectory: &[Vec<f64>]) -> f64 {
    let r = alg.rank();
    trajectory
        .iter()
        .map(|g| {
            let pulled = coadjoint_with(&adjoint_vec(alg, g), lambda);
            pulled[..r].iter().fold(0.0f64, |m, x| m.max(x.abs()))
        })
        .fold(0.0, f64::max)
}

/// Smallest singular value of the matrix whose columns are
/// `Ad_{γ(t_k)} e_i` over the samples, together with `‖λ M‖ / ‖λ‖`, which
/// bounds it from above when `λ ≠ 0`.
pub fn endpoint_cross_check(alg: &CarnotAlgebra, lambda: &[f64], trajectory: &[Vec<f64>]) -> (f64, f64) {
    let r = alg.rank();
    let mut rows = Vec::with_capacity(trajectory.len() * r);
    for g in trajectory {
        let ad = adjoint_vec(alg, g);
        for i in 0..r {
            rows.push(ad.iter().map(|row| row[i]).collect::<Vec<f64>>());
        }
    }
    let sv = linalg::singular_values(&rows);
    let smallest = if rows.len() >= alg.dim() {
        sv.last().copied().unwrap_or(0.0)
    } else {
        0.0
    };
    let norm = lambda.iter().map(|x| x * x).sum::<f64>().sqrt();
    let pairing = rows
        .iter()
        .map(|row| row.iter().zip(lambda).map(|(a, b)| a * b).sum::<f64>().powi(2))
        .sum::<f64>()
        .sqrt();
    (smallest, if norm > 0.0 { pairing / norm } else { f64::INFINITY })
}

/// Whether the first-layer projections of the samples span `V_1`
/// (numeric rank, tolerance `1e-9`).
pub fn not_in_subgroup_check(rank: usize, trajectory: &[Vec<f64>]) -> Result<bool> {
    if trajectory.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let rows: Vec<Vec<f64>> = trajectory.iter().map(|g| g[..rank].to_vec()).collect();
    Ok(linalg::numeric_rank(&rows, 1e-9) == rank)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AbcReport {
    pub a: Scalar,
    pub b: Scalar,
    pub c: Scalar,
    pub amplitudes: [Scalar; 3],
    pub segments: usize,
    /// `max |P^λ_i(γ(t))|` over the breakpoints.
    pub extremal_residual: f64,
    /// Constraint residual of [`adjoint_integrate`] started at `λ`.
    pub adjoint_residual: f64,
    pub not_in_subgroup: bool,
    pub tol: f64,
    pub pass: bool,
    pub times: Vec<f64>,
    pub trajectory: Vec<Vec<f64>>,
}

/// Control `u(t) = (A e^{at}, B e^{bt}, C e^{ct})`, `c = -a - b`.
pub fn abc_control(a: f64, b: f64, amplitudes: [f64; 3]) -> SmoothControl<'static> {
    let d = ExtremalDatum::diagonal(amplitudes, a, b);
    SmoothControl::new(move |t| extremal_controls(&d, t).to_vec())
}

/// Checks numerically that the control `(A e^{at}, B e^{bt}, C e^{ct})` is
/// abnormal with covector `-λ(amplitudes, diag(a, b, c))`, both along a
/// piecewise-constant approximation with `segments` pieces and through the
/// adjoint equation.
pub fn verify_abnormal_abc(
    a: &Scalar,
    b: &Scalar,
    amplitudes: &[Scalar; 3],
    segments: usize,
    tol: f64,
) -> Result<AbcReport> {
    let alg = algebra();
    let c = -(a + b);
    let (af, bf) = (to_f64(a), to_f64(b));
    let amps = [0, 1, 2].map(|i| to_f64(&amplitudes[i]));
    let datum = ExtremalDatum::diagonal(amps, af, bf);
    let lambda: Vec<f64> = regular_covector_f64(&alg, &datum).iter().map(|x| -x).collect();
    let u = abc_control(af, bf, amps);
    let (times, trajectory) = approximate_trajectory(&alg, &u, segments)?;
    let extremal = extremal_residual(&alg, &lambda, &trajectory);
    let adjoint = adjoint_integrate(&alg, &u, &lambda, ADJOINT_STEP)?.residual;
    let not_in_subgroup = not_in_subgroup_check(alg.rank(), &trajectory)?;
    Ok(AbcReport {
        a: a.clone(),
        b: b.clone(),
        c,
        amplitudes: amplitudes.clone(),
        segments,
        extremal_residual: extremal,
        adjoint_residual: adjoint,
        not_in_subgroup,
        tol,
        pass: extremal <= tol && adjoint <= tol,
        times,
        trajectory,
    })
}

/// Largest `|λ₂(t) − u(t)|` and `|P(t) u(t)|` along the adjoint flow started
/// at `λ(u₀, A)`, where `P(t)` is the skew matrix rebuilt from `λ₂(t)`.
pub fn hamiltonian_consistency(d: &ExtremalDatum, step: f64) -> Result<(f64, f64)> {
    let alg = algebra();
    let eta0 = regular_covector_f64(&alg, d);
    let datum = d.clone();
    let u = SmoothControl::new(move |t| extremal_controls(&datum, t).to_vec());
    let traj = adjoint_integrate(&alg, &u, &eta0, step)?;
    let (i21, i31, i32) = (slot(&alg, "X21"), slot(&alg, "X31"), slot(&alg, "X32"));
    let mut drift = 0.0f64;
    let mut kernel = 0.0f64;
    for (t, eta) in traj.times.iter().zip(&traj.covectors) {
        let (p21, p31, p32) = (eta[i21], eta[i31], eta[i32]);
        let lambda2 = [-p32, p31, -p21];
        let ut = extremal_controls(d, *t);
        for i in 0..3 {
            drift = drift.max((lambda2[i] - ut[i]).abs());
        }
        let p = [[0.0, -p21, -p31], [p21, 0.0, -p32], [p31, p32, 0.0]];
        for row in &p {
            let v: f64 = row.iter().zip(&ut).map(|(x, y)| x * y).sum();
            kernel = kernel.max(v.abs());
        }
    }
    Ok((drift, kernel))
}
