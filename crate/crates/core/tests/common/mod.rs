//! Oracles and generators shared by the integration test targets.
#![allow(dead_code)]

use carnot_core::scalar::{int, rat, Scalar};
use carnot_core::step2::{Bivector, Step2Point};
use num_traits::Zero;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Numerator in `[-3, 3]`, denominator in `[1, 3]`.
pub fn small_rational<R: Rng>(rng: &mut R) -> Scalar {
    rat(rng.gen_range(-3..=3), rng.gen_range(1..=3))
}

pub fn random_vector<R: Rng>(r: usize, rng: &mut R) -> Vec<Scalar> {
    (0..r).map(|_| small_rational(rng)).collect()
}

/// Mixture of fully random points and points with prescribed low skew rank,
/// with `v` either random or inside the support.
pub fn random_point<R: Rng>(r: usize, rng: &mut R) -> Step2Point {
    let mode = rng.gen_range(0..3);
    if mode == 0 {
        let comps: Vec<Scalar> = (0..r * (r - 1) / 2).map(|_| small_rational(rng)).collect();
        let xi = Bivector::from_components(r, &comps).unwrap();
        return Step2Point::new(random_vector(r, rng), xi).unwrap();
    }
    let terms = rng.gen_range(0..=r / 2);
    let mut xi = Bivector::zero(r);
    let mut span = Vec::new();
    for _ in 0..terms {
        let p = random_vector(r, rng);
        let q = random_vector(r, rng);
        xi = xi.add(&Bivector::wedge_vectors(&p, &q));
        span.push(p);
        span.push(q);
    }
    let v = if mode == 1 || span.is_empty() {
        random_vector(r, rng)
    } else {
        let mut v = vec![Scalar::zero(); r];
        for w in &span {
            let c = small_rational(rng);
            for (x, y) in v.iter_mut().zip(w) {
                *x += &c * y;
            }
        }
        v
    };
    Step2Point::new(v, xi).unwrap()
}

/// Every point with coordinates in `{-1, 0, 1}`. For `r = 5` the vector
/// part is restricted to a few representatives to keep the grid small.
pub fn for_each_grid_point(r: usize, mut f: impl FnMut(&Step2Point)) {
    let m = r * (r - 1) / 2;
    let vs: Vec<Vec<Scalar>> = if r <= 4 {
        (0..3usize.pow(r as u32)).map(|code| ternary(code, r)).collect()
    } else {
        let mut out = vec![vec![int(0); r], vec![int(1); r]];
        let mut e1 = vec![int(0); r];
        e1[0] = int(1);
        out.push(e1);
        let mut last = vec![int(0); r];
        last[r - 1] = int(-1);
        out.push(last);
        out
    };
    for code in 0..3usize.pow(m as u32) {
        let xi = Bivector::from_components(r, &ternary(code, m)).unwrap();
        for v in &vs {
            f(&Step2Point::new(v.clone(), xi.clone()).unwrap());
        }
    }
}

fn ternary(mut code: usize, len: usize) -> Vec<Scalar> {
    (0..len)
        .map(|_| {
            let d = (code % 3) as i64 - 1;
            code /= 3;
            int(d)
        })
        .collect()
}

/// Pfaffian by expansion along the first row.
pub fn pfaffian(m: &[Vec<Scalar>]) -> Scalar {
    let n = m.len();
    if n == 0 {
        return int(1);
    }
    if n % 2 == 1 {
        return Scalar::zero();
    }
    let mut acc = Scalar::zero();
    for j in 1..n {
        if m[0][j].is_zero() {
            continue;
        }
        let keep: Vec<usize> = (1..n).filter(|&k| k != j).collect();
        let minor: Vec<Vec<Scalar>> = keep
            .iter()
            .map(|&a| keep.iter().map(|&b| m[a][b].clone()).collect())
            .collect();
        let term = &m[0][j] * pfaffian(&minor);
        if j % 2 == 1 {
            acc += term;
        } else {
            acc -= term;
        }
    }
    acc
}

pub fn factorial(n: usize) -> Scalar {
    (1..=n as i64).fold(int(1), |a, k| a * int(k))
}
