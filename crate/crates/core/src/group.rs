//! Group law in exponential coordinates: truncated BCH products, adjoint and
//! coadjoint actions.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use num_traits::{One, Zero};

use crate::error::Result;
use crate::lie::{CarnotAlgebra, Covector, GroupElement, LieElement};
use crate::scalar::{int, Coeff, Scalar};

/// A right-nested bracket word over the letters `X` (false) and `Y` (true)
/// with its total Dynkin coefficient.
type BchTerm = (Vec<bool>, Scalar);

fn factorial(n: usize) -> Scalar {
    (1..=n as i64).fold(Scalar::one(), |acc, k| acc * int(k))
}

/// Dynkin's series for `log(e^X e^Y)`, truncated at total degree `max_degree`.
/// Terms of the form `[X^{r1} Y^{s1} … X^{rn} Y^{sn}]` are expanded into
/// right-nested bracket words and coefficients are merged per word.
fn dynkin_terms(max_degree: usize) -> Vec<BchTerm> {
    let mut acc: HashMap<Vec<bool>, Scalar> = HashMap::new();
    // (letters so far, number of pairs, Π r_i! s_i!)
    fn walk(
        letters: &mut Vec<bool>,
        pairs: usize,
        denom: Scalar,
        max_degree: usize,
        acc: &mut HashMap<Vec<bool>, Scalar>,
    ) {
        let n = letters.len();
        if pairs > 0 {
            let sign = if pairs % 2 == 1 { int(1) } else { int(-1) };
            let coeff = sign / (int(pairs as i64) * int(n as i64) * &denom);
            let keep = n == 1 || letters[n - 1] != letters[n - 2];
            if keep {
                *acc.entry(letters.clone()).or_insert_with(Scalar::zero) += coeff;
            }
        }
        for m in 1..=max_degree - n {
            for r in 0..=m {
                let s = m - r;
                letters.extend(std::iter::repeat_n(false, r));
                letters.extend(std::iter::repeat_n(true, s));
                let d = &denom * factorial(r) * factorial(s);
                walk(letters, pairs + 1, d, max_degree, acc);
                letters.truncate(n);
            }
        }
    }
    walk(&mut Vec::new(), 0, Scalar::one(), max_degree, &mut acc);
    let mut terms: Vec<BchTerm> = acc.into_iter().filter(|(_, c)| !c.is_zero()).collect();
    terms.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.0.cmp(&b.0)));
    terms
}

fn bch_table(step: usize) -> Arc<Vec<BchTerm>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<BchTerm>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    let mut guard = cache.lock().unwrap_or_else(|e| e.into_inner());
    guard
        .entry(step)
        .or_insert_with(|| Arc::new(dynkin_terms(step)))
        .clone()
}

/// `log(exp x · exp y)` on raw coefficient vectors.
pub fn bch_vec<C: Coeff>(algebra: &CarnotAlgebra, x: &[C], y: &[C]) -> Vec<C> {
    let table = bch_table(algebra.step());
    // Suffix memo: value of the right-nested bracket of each word suffix.
    let mut memo: HashMap<Vec<bool>, Vec<C>> = HashMap::new();
    let mut out = vec![C::zero_value(); algebra.dim()];
    for (word, coeff) in table.iter() {
        let v = nested(algebra, word, x, y, &mut memo);
        let c = C::from_scalar(coeff);
        for (o, vi) in out.iter_mut().zip(&v) {
            o.add_product(&c, vi);
        }
    }
    out
}

fn nested<C: Coeff>(
    algebra: &CarnotAlgebra,
    word: &[bool],
    x: &[C],
    y: &[C],
    memo: &mut HashMap<Vec<bool>, Vec<C>>,
) -> Vec<C> {
    let letter = |b: bool| if b { y } else { x };
    if word.len() == 1 {
        return letter(word[0]).to_vec();
    }
    if let Some(v) = memo.get(word) {
        return v.clone();
    }
    let inner = nested(algebra, &word[1..], x, y, memo);
    let v = if inner.iter().all(Coeff::vanishes) {
        inner
    } else {
        algebra.bracket_vec(letter(word[0]), &inner)
    };
    memo.insert(word.to_vec(), v.clone());
    v
}

/// Group product `g · h` in exponential coordinates.
pub fn bch(algebra: &CarnotAlgebra, g: &GroupElement, h: &GroupElement) -> Result<GroupElement> {
    let gx = algebra.exp(&g.log())?;
    let hx = algebra.exp(&h.log())?;
    algebra.group_element(bch_vec(algebra, gx.coeffs(), hx.coeffs()))
}

/// Left-to-right product of several group elements.
pub fn product<'a, I>(algebra: &CarnotAlgebra, items: I) -> Result<GroupElement>
where
    I: IntoIterator<Item = &'a GroupElement>,
{
    let mut acc = algebra.identity();
    for g in items {
        acc = bch(algebra, &acc, g)?;
    }
    Ok(acc)
}

/// `e^M = Σ M^k / k!` for a nilpotent matrix, or `None` if `M^n ≠ 0`.
pub fn exp_nilpotent<C: Coeff>(m: &[Vec<C>]) -> Option<Vec<Vec<C>>> {
    let n = m.len();
    let mut result: Vec<Vec<C>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { C::one_value() } else { C::zero_value() })
                .collect()
        })
        .collect();
    let mut power = result.clone();
    for k in 1..=n {
        power = mat_mul_generic(&power, m);
        if power.iter().flatten().all(Coeff::vanishes) {
            return Some(result);
        }
        let inv = Scalar::one() / factorial(k);
        for (r, p) in result.iter_mut().zip(&power) {
            for (x, y) in r.iter_mut().zip(p) {
                x.add_assign_ref(&y.scale(&inv));
            }
        }
    }
    if power.iter().flatten().all(Coeff::vanishes) {
        Some(result)
    } else {
        None
    }
}

pub(crate) fn mat_mul_generic<C: Coeff>(a: &[Vec<C>], b: &[Vec<C>]) -> Vec<Vec<C>> {
    let inner = b.len();
    let ncols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            let mut out = vec![C::zero_value(); ncols];
            for k in 0..inner {
                if row[k].vanishes() {
                    continue;
                }
                for (o, bkj) in out.iter_mut().zip(&b[k]) {
                    o.add_product(&row[k], bkj);
                }
            }
            out
        })
        .collect()
}

/// `Ad_{exp x} = Σ_{k<s} ad_x^k / k!` on raw coefficients, as rows.
pub fn adjoint_vec<C: Coeff>(algebra: &CarnotAlgebra, x: &[C]) -> Vec<Vec<C>> {
    let n = algebra.dim();
    let ad = algebra.ad_matrix_vec(x);
    let mut result: Vec<Vec<C>> = (0..n)
        .map(|i| {
            (0..n)
                .map(|j| if i == j { C::one_value() } else { C::zero_value() })
                .collect()
        })
        .collect();
    let mut power = result.clone();
    for k in 1..algebra.step() {
        power = mat_mul_generic(&ad, &power);
        let inv = Scalar::one() / factorial(k);
        for (r, p) in result.iter_mut().zip(&power) {
            for (x, y) in r.iter_mut().zip(p) {
                x.add_assign_ref(&y.scale(&inv));
            }
        }
    }
    result
}

/// `Ad_{exp x} y` without forming the matrix.
pub fn adjoint_apply_vec<C: Coeff>(algebra: &CarnotAlgebra, x: &[C], y: &[C]) -> Vec<C> {
    let mut out = y.to_vec();
    let mut term = y.to_vec();
    for k in 1..algebra.step() {
        term = algebra.bracket_vec(x, &term);
        if term.iter().all(Coeff::vanishes) {
            break;
        }
        let inv = Scalar::one() / int(k as i64);
        term = term.iter().map(|t| t.scale(&inv)).collect();
        for (o, t) in out.iter_mut().zip(&term) {
            o.add_assign_ref(t);
        }
    }
    out
}

/// Matrix of `Ad_g`, as rows.
pub fn adjoint(algebra: &CarnotAlgebra, g: &GroupElement) -> Result<Vec<Vec<Scalar>>> {
    let x = algebra.exp(&g.log())?;
    Ok(adjoint_vec(algebra, x.coeffs()))
}

pub fn adjoint_apply(
    algebra: &CarnotAlgebra,
    g: &GroupElement,
    y: &LieElement,
) -> Result<LieElement> {
    algebra.exp(&g.log())?;
    algebra.element(adjoint_apply_vec(algebra, g.coeffs(), y.coeffs()))
}

/// `(Ad_g)^* λ = λ ∘ Ad_g`.
pub fn coadjoint(algebra: &CarnotAlgebra, g: &GroupElement, lambda: &Covector) -> Result<Covector> {
    let ad = adjoint(algebra, g)?;
    algebra.covector(coadjoint_with(&ad, lambda.coeffs()))
}

/// `λ ∘ M` for a matrix given by rows.
pub fn coadjoint_with<C: Coeff>(ad: &[Vec<C>], lambda: &[C]) -> Vec<C> {
    let n = ad.first().map_or(0, |r| r.len());
    let mut out = vec![C::zero_value(); n];
    for (lk, row) in lambda.iter().zip(ad) {
        if lk.vanishes() {
            continue;
        }
        for (o, a) in out.iter_mut().zip(row) {
            o.add_product(lk, a);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::rat;

    #[test]
    fn third_order_terms_in_free_algebra() {
        let f = CarnotAlgebra::free(2, 3).unwrap();
        let x = f.basis(0);
        let y = f.basis(1);
        let p = bch_vec(&f, x.coeffs(), y.coeffs());
        let xy = f.bracket(&x, &y).unwrap();
        let xxy = f.bracket(&x, &xy).unwrap();
        let yxy = f.bracket(&y, &xy).unwrap();
        let expected = x
            .add(&y)
            .unwrap()
            .add(&xy.scale(&rat(1, 2)))
            .unwrap()
            .add(&xxy.scale(&rat(1, 12)))
            .unwrap()
            .sub(&yxy.scale(&rat(1, 12)))
            .unwrap();
        assert_eq!(p, expected.into_coeffs());
    }

    #[test]
    fn heisenberg_product() {
        let h = CarnotAlgebra::heisenberg();
        let g = h.group_element(vec![int(1), int(0), int(0)]).unwrap();
        let k = h.group_element(vec![int(0), int(1), int(0)]).unwrap();
        let p = bch(&h, &g, &k).unwrap();
        assert_eq!(p.coeffs(), &[int(1), int(1), rat(1, 2)]);
    }

    #[test]
    fn nilpotent_exponential_detects_non_nilpotent() {
        let m = vec![vec![int(0), int(1)], vec![int(0), int(0)]];
        let e = exp_nilpotent(&m).unwrap();
        assert_eq!(e[0][1], int(1));
        let id = vec![vec![int(1), int(0)], vec![int(0), int(1)]];
        assert!(exp_nilpotent(&id).is_none());
    }
}
