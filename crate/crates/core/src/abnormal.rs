//! Extremal polynomials `P^λ_i(g) = ((Ad_g)^* λ)(e_i)`, the abnormal
//! varieties `Z^λ` and `W^λ`, the skew form `w(λ)` and Goh residuals.

use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::group::{adjoint_apply_vec, adjoint_vec, bch_vec, coadjoint_with};
use crate::lie::{CarnotAlgebra, Covector, GroupElement, LieElement};
use crate::linalg;
use crate::scalar::{Coeff, Polynomial, Scalar};

/// Largest dimension for which symbolic expansions are attempted.
pub const EXPANSION_DIM_CAP: usize = 20;

fn check(algebra: &CarnotAlgebra, lambda: &Covector, g: &GroupElement) -> Result<()> {
    algebra.check_len(lambda.len())?;
    if lambda.algebra() != algebra.id() || g.algebra() != algebra.id() {
        return Err(Error::AlgebraMismatch);
    }
    Ok(())
}

/// `P^λ_i(g)`.
pub fn eval_extremal_poly(
    algebra: &CarnotAlgebra,
    lambda: &Covector,
    i: usize,
    g: &GroupElement,
) -> Result<Scalar> {
    check(algebra, lambda, g)?;
    if i >= algebra.dim() {
        return Err(Error::InvalidArgument(format!("basis index {i} out of range")));
    }
    let mut e = vec![Scalar::zero(); algebra.dim()];
    e[i] = num_traits::One::one();
    Ok(lambda.pair_coeffs(&adjoint_apply_vec(algebra, g.coeffs(), &e)))
}

/// `(P^λ_1(g), …, P^λ_r(g))`, the values on the first layer.
pub fn extremal_values(
    algebra: &CarnotAlgebra,
    lambda: &Covector,
    g: &GroupElement,
) -> Result<Vec<Scalar>> {
    check(algebra, lambda, g)?;
    let ad = adjoint_vec(algebra, g.coeffs());
    let pulled = coadjoint_with(&ad, lambda.coeffs());
    Ok(pulled[algebra.layer_range(1)].to_vec())
}

/// Membership in `Z^λ`, the common zero set of `P^λ_1, …, P^λ_r`.
pub fn in_abnormal_variety(
    algebra: &CarnotAlgebra,
    lambda: &Covector,
    g: &GroupElement,
) -> Result<bool> {
    if lambda.is_zero() {
        return Err(Error::ZeroCovector);
    }
    Ok(extremal_values(algebra, lambda, g)?
        .iter()
        .all(|v| v.is_zero()))
}

/// `P^λ_i` as a polynomial in the exponential coordinates `x_1..x_n` of `g`.
pub fn expand_extremal_poly(
    algebra: &CarnotAlgebra,
    lambda: &Covector,
    i: usize,
) -> Result<Polynomial> {
    let n = algebra.dim();
    if n > EXPANSION_DIM_CAP {
        return Err(Error::ResourceLimit {
            dim: n,
            cap: EXPANSION_DIM_CAP,
        });
    }
    algebra.check_len(lambda.len())?;
    let vars: Vec<Polynomial> = (0..n as u32).map(Polynomial::var).collect();
    let ad = adjoint_vec(algebra, &vars);
    let mut acc = Polynomial::zero_value();
    for (k, lk) in lambda.coeffs().iter().enumerate() {
        if !lk.is_zero() {
            acc.add_assign_ref(&ad[k][i].scale(lk));
        }
    }
    Ok(acc)
}

/// `t ↦ P^λ_j(g · exp(t x))` as a polynomial in `t` (variable 0).
pub fn extremal_poly_along(
    algebra: &CarnotAlgebra,
    lambda: &Covector,
    g: &GroupElement,
    x: &LieElement,
    j: usize,
) -> Result<Polynomial> {
    check(algebra, lambda, g)?;
    algebra.exp(x)?;
    let gp: Vec<Polynomial> = g.coeffs().iter().cloned().map(Polynomial::constant).collect();
    let t = Polynomial::var(0);
    let xp: Vec<Polynomial> = x.coeffs().iter().map(|c| t.scale(c)).collect();
    let moved = bch_vec(algebra, &gp, &xp);
    let mut e = vec![Polynomial::zero_value(); algebra.dim()];
    e[j] = Polynomial::one_value();
    let image = adjoint_apply_vec(algebra, &moved, &e);
    let mut acc = Polynomial::zero_value();
    for (lk, v) in lambda.coeffs().iter().zip(&image) {
        if !lk.is_zero() {
            acc.add_assign_ref(&v.scale(lk));
        }
    }
    Ok(acc)
}

/// `w(λ)(e_i, e_j) = λ([e_i, e_j])` on the first layer.
pub fn w_form(algebra: &CarnotAlgebra, lambda: &Covector) -> Result<Vec<Vec<Scalar>>> {
    algebra.check_len(lambda.len())?;
    let r = algebra.rank();
    let mut m = vec![vec![Scalar::zero(); r]; r];
    for (i, row) in m.iter_mut().enumerate() {
        for (j, entry) in row.iter_mut().enumerate() {
            for (k, c) in algebra.structure_constants(i, j) {
                *entry += &lambda.coeffs()[k] * c;
            }
        }
    }
    Ok(m)
}

/// Basis of the kernel of `w(λ)` inside the first layer.
pub fn w_kernel(algebra: &CarnotAlgebra, lambda: &Covector) -> Result<Vec<LieElement>> {
    let w = w_form(algebra, lambda)?;
    let r = algebra.rank();
    linalg::nullspace(&w, r)
        .into_iter()
        .map(|v| {
            let mut full = vec![Scalar::zero(); algebra.dim()];
            full[..r].clone_from_slice(&v);
            algebra.element(full)
        })
        .collect()
}

/// Membership in `W^λ = {g : ((Ad_g)^* λ)|_{V_{s-1}} = 0}`. For step one
/// the condition is empty.
pub fn w_lambda_contains(
    algebra: &CarnotAlgebra,
    lambda: &Covector,
    g: &GroupElement,
) -> Result<bool> {
    check(algebra, lambda, g)?;
    let s = algebra.step();
    if s < 2 {
        return Ok(true);
    }
    let ad = adjoint_vec(algebra, g.coeffs());
    let pulled = coadjoint_with(&ad, lambda.coeffs());
    Ok(pulled[algebra.layer_range(s - 1)].iter().all(|c| c.is_zero()))
}

/// `max_t max_b |((Ad_{γ(t)})^* λ)(b)|` over the basis of `V_1 ⊕ V_2`.
pub fn goh_residual(
    algebra: &CarnotAlgebra,
    lambda: &Covector,
    trajectory: &[GroupElement],
) -> Result<Scalar> {
    if trajectory.is_empty() {
        return Err(Error::EmptyTrajectory);
    }
    let upto = if algebra.step() >= 2 {
        algebra.layer_range(2).end
    } else {
        algebra.dim()
    };
    let mut worst = Scalar::zero();
    for g in trajectory {
        check(algebra, lambda, g)?;
        let ad = adjoint_vec(algebra, g.coeffs());
        let pulled = coadjoint_with(&ad, lambda.coeffs());
        for v in &pulled[..upto] {
            let a = v.abs();
            if a > worst {
                worst = a;
            }
        }
    }
    Ok(worst)
}

/// Left-invariant field `X_i` at `g`, i.e. `d/dt (g · exp(t e_i))` at 0.
pub fn left_invariant_field(algebra: &CarnotAlgebra, g: &GroupElement, i: usize) -> Vec<Scalar> {
    invariant_field(algebra, g, i, false)
}

/// Right-invariant field `Y_i` at `g`, i.e. `d/dt (exp(t e_i) · g)` at 0.
pub fn right_invariant_field(algebra: &CarnotAlgebra, g: &GroupElement, i: usize) -> Vec<Scalar> {
    invariant_field(algebra, g, i, true)
}

fn invariant_field(algebra: &CarnotAlgebra, g: &GroupElement, i: usize, right: bool) -> Vec<Scalar> {
    let gp: Vec<Polynomial> = g.coeffs().iter().cloned().map(Polynomial::constant).collect();
    let mut tp = vec![Polynomial::zero_value(); algebra.dim()];
    tp[i] = Polynomial::var(0);
    let moved = if right {
        bch_vec(algebra, &tp, &gp)
    } else {
        bch_vec(algebra, &gp, &tp)
    };
    moved.iter().map(|p| p.coefficient_of_power(0, 1)).collect()
}
