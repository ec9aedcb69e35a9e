mod common;

use carnot_core::endpoint::{endpoint, is_abnormal, PiecewiseControl};
use carnot_core::sard::*;
use carnot_core::scalar::{int, rat, Scalar};
use carnot_core::{CarnotAlgebra, Error};
use rand::Rng;

fn prolong(r: usize, s: usize) -> Prolongation {
    Prolongation::with_gl(CarnotAlgebra::free(r, s).unwrap()).unwrap()
}

fn scaled(x: &[Scalar], t: &Scalar) -> Vec<Scalar> {
    x.iter().map(|c| c * t).collect()
}

const F24_XI: &str = "X2 + X212 + X2111";
const F33_XI: &str = "X21 + X31 + X32 + X312 + X213";

#[test]
fn prolongations_satisfy_jacobi_and_grading() {
    for p in [
        Prolongation::with_gl(CarnotAlgebra::heisenberg()).unwrap(),
        prolong(2, 3),
        prolong(2, 4),
        prolong(3, 3),
    ] {
        assert_eq!(p.jacobi_violation(), None);
        assert!(p.is_graded());
    }
}

#[test]
fn infinitesimal_criterion_on_witnesses() {
    for (p, xi) in [(prolong(2, 4), F24_XI), (prolong(3, 3), F33_XI)] {
        let x = p.parse_element(xi).unwrap();
        let res = criterion_infinitesimal(&p, &x).unwrap();
        assert!(res.holds);
        assert_eq!(res.rank, p.dim());
        let zero = vec![int(0); p.dim()];
        let res = criterion_infinitesimal(&p, &zero).unwrap();
        assert!(!res.holds);
        assert_eq!(res.rank, p.h_dim() + p.base().rank());
    }
}

#[test]
fn group_criterion() {
    let p = prolong(2, 4);
    let zero = vec![int(0); p.dim()];
    assert!(!criterion_group(&p, &zero).unwrap().holds);
    let xi = p.parse_element(F24_XI).unwrap();
    assert!(criterion_group(&p, &scaled(&xi, &rat(1, 8))).unwrap().holds);
    let q = prolong(3, 3);
    let xi = q.parse_element(F33_XI).unwrap();
    assert!(criterion_group(&q, &xi).unwrap().holds);
    let grading = q.parse_element("E11 + E22 + E33").unwrap();
    assert_eq!(criterion_group(&q, &grading), Err(Error::NonNilpotentProlongation));
}

#[test]
fn sampler_counts() {
    let good = [prolong(2, 4), prolong(3, 3)];
    for p in &good {
        assert!(generic_sampler(p, 100, 1).unwrap().successes >= 95);
    }
    for (r, s) in [(2, 5), (3, 4), (4, 3)] {
        assert_eq!(generic_sampler(&prolong(r, s), 100, 1).unwrap().successes, 0);
    }
    assert!(generic_sampler(&good[0], 0, 1).is_err());
}

#[test]
fn sampler_is_reproducible() {
    let p = prolong(2, 4);
    assert_eq!(sample_element(&p, 3, 9), sample_element(&p, 3, 9));
    assert_ne!(sample_element(&p, 3, 9), sample_element(&p, 3, 10));
    assert_eq!(generic_sampler(&p, 30, 4).unwrap(), generic_sampler(&p, 30, 4).unwrap());
}

#[test]
fn criterion_is_open() {
    let mut rng = common::rng(31);
    for (p, xi) in [(prolong(2, 4), F24_XI), (prolong(3, 3), F33_XI)] {
        let x = p.parse_element(xi).unwrap();
        for _ in 0..20 {
            let eta: Vec<Scalar> = (0..p.dim()).map(|_| common::small_rational(&mut rng)).collect();
            let moved: Vec<Scalar> = x.iter().zip(&eta).map(|(a, b)| a + b * rat(1, 1000)).collect();
            assert!(criterion_infinitesimal(&p, &moved).unwrap().holds);
        }
    }
}

#[test]
fn infinitesimal_criterion_implies_group_criterion() {
    let p = prolong(2, 4);
    let mut rng = common::rng(8);
    let mut checked = 0;
    for _ in 0..20 {
        let mut xi = vec![int(0); p.dim()];
        for c in xi[p.h_dim()..].iter_mut() {
            *c = int(rng.gen_range(-9..=9));
        }
        if !criterion_infinitesimal(&p, &xi).unwrap().holds {
            continue;
        }
        checked += 1;
        let found = (0..=10).any(|k| {
            let t = rat(1, 1 << k);
            criterion_group(&p, &scaled(&xi, &t)).unwrap().holds
        });
        assert!(found);
    }
    assert!(checked > 10);
}

#[test]
fn contact_fields() {
    let p = prolong(2, 3);
    let alg = p.base().clone();
    let e = alg.identity();
    let d = p.parse_element("E12").unwrap();
    assert!(contact_field_eval(&p, &d, &e).unwrap().is_zero());
    let x = alg.parse_element("X1 - 2*X21").unwrap();
    assert_eq!(contact_field_eval(&p, &p.embed(&x).unwrap(), &e).unwrap(), x);

    // Grading derivation at exp(y): sum over k >= 1 of
    // (-1)^(k+1)/k! ad_y^(k-1)(D y), with D y = v1 + 2 v2 + 3 v3.
    let y = alg.parse_element("2*X1 - X2 + 3*X21 + 1/2*X211 - X212").unwrap();
    let g = alg.exp(&y).unwrap();
    let grading = p.parse_element("E11 + E22").unwrap();
    let dy = alg.grading_derivation().apply(&y).unwrap();
    let mut term = dy.clone();
    let mut expected = dy;
    let mut fact = int(1);
    for k in 2..=alg.step() + 1 {
        term = alg.bracket(&y, &term).unwrap();
        fact *= int(k as i64);
        let sign = if k % 2 == 0 { int(-1) } else { int(1) };
        expected = expected.add(&term.scale(&(sign / &fact))).unwrap();
    }
    assert_eq!(contact_field_eval(&p, &grading, &g).unwrap(), expected);
}

#[test]
fn sard_set_examples() {
    for alg in [CarnotAlgebra::heisenberg(), CarnotAlgebra::free(2, 3).unwrap(), CarnotAlgebra::free(3, 2).unwrap()] {
        let p = Prolongation::with_gl(alg.clone()).unwrap();
        assert!(!sard_set_membership(&p, &alg.identity()).unwrap());
    }
    let h = CarnotAlgebra::heisenberg();
    let p = Prolongation::with_gl(h.clone()).unwrap();
    assert!(sard_set_membership(&p, &h.exp(&h.basis(0)).unwrap()).unwrap());

    let p = prolong(2, 4);
    let alg = p.base().clone();
    let xi = alg.parse_element(F24_XI).unwrap();
    let g = alg.exp(&xi.scale(&rat(1, 8))).unwrap();
    assert!(sard_set_membership(&p, &g).unwrap());
}

#[test]
fn sard_points_are_regular_values() {
    let mut rng = common::rng(12);
    for alg in [CarnotAlgebra::heisenberg(), CarnotAlgebra::free(2, 3).unwrap(), CarnotAlgebra::free(2, 4).unwrap()] {
        let p = Prolongation::with_gl(alg.clone()).unwrap();
        let mut hits = 0;
        for _ in 0..30 {
            let segments = rng.gen_range(1..=3);
            let values = (0..segments).map(|_| common::random_vector(alg.rank(), &mut rng)).collect();
            let u = PiecewiseControl::uniform(&alg, values).unwrap();
            let g = endpoint(&alg, &u).unwrap();
            if sard_set_membership(&p, &g).unwrap() {
                hits += 1;
                assert!(!is_abnormal(&alg, &u).unwrap().abnormal);
            }
        }
        assert!(hits > 0);
    }
}
