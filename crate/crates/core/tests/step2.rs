mod common;

use carnot_core::abnormal::w_kernel;
use carnot_core::control_format::hxh;
use carnot_core::endpoint::{endpoint, is_abnormal};
use carnot_core::linalg::{rank, EchelonBasis};
use carnot_core::scalar::{int, Scalar};
use carnot_core::step2::*;
use carnot_core::{CarnotAlgebra, Error};
use proptest::prelude::*;

fn pt(r: usize, s: &str) -> Step2Point {
    Step2Point::parse(r, s).unwrap()
}

fn e(r: usize, i: usize) -> Vec<Scalar> {
    let mut v = vec![int(0); r];
    v[i - 1] = int(1);
    v
}

fn same_span(a: &[Vec<Scalar>], b: &[Vec<Scalar>], r: usize) -> bool {
    let both: Vec<Vec<Scalar>> = a.iter().chain(b).cloned().collect();
    rank(a, r) == rank(b, r) && rank(&both, r) == rank(a, r)
}

#[test]
fn supports() {
    assert!(same_span(&support(&pt(4, "0;e1^e2").xi), &[e(4, 1), e(4, 2)], 4));
    assert!(support(&Bivector::zero(4)).is_empty());
    assert_eq!(support(&pt(4, "0;e1^e2+e3^e4").xi).len(), 4);
}

#[test]
fn ranks_and_tests() {
    assert_eq!(rank2(&pt(4, "e1;e1^e2")), 2);
    assert_eq!(rank2(&pt(3, "e3;e1^e2")), 3);
    assert_eq!(rank2(&pt(4, "0;0")), 0);
    assert!(is_abnormal_point(&pt(4, "0;e1^e2")));
    assert!(!is_abnormal_point(&pt(4, "e3;e1^e2")));
    assert!(is_abnormal_point(&pt(3, "e1;0")));
    assert!(!pfaffian_membership(&pt(4, "0;e1^e2+e3^e4")));
    assert!(pfaffian_membership(&pt(4, "e1;e1^e2")));
    assert!(!pfaffian_membership(&pt(4, "e3;e1^e2")));
}

#[test]
fn wedge_powers() {
    assert!(wedge_power(&pt(4, "0;e1^e2").xi, 2).unwrap().is_zero());
    let xi = pt(4, "0;e1^e2+e3^e4").xi;
    assert_eq!(wedge_power(&xi, 2).unwrap().coeff(&[0, 1, 2, 3]), int(2));
    let one = wedge_power(&xi, 1).unwrap();
    assert_eq!(one.coeff(&[0, 1]), int(1));
    assert_eq!(one.coeff(&[2, 3]), int(1));
    assert_eq!(one.terms().count(), 2);
    assert!(matches!(wedge_power(&xi, 3), Err(Error::DegreeTooHigh { .. })));
}

#[test]
fn strata() {
    assert_eq!(stratum(&pt(4, "e1;e1^e2")).unwrap(), Stratum::Y);
    assert_eq!(stratum(&pt(4, "e1;0")).unwrap(), Stratum::Y1);
    assert_eq!(stratum(&pt(4, "0;e1^e2+e3^e4")).unwrap(), Stratum::NotAbnormal);
    assert_eq!(stratum(&pt(4, "0;e1^e2")).unwrap(), Stratum::Y);
    assert_eq!(stratum(&pt(3, "0;0")), Err(Error::OddRank(3)));
}

#[test]
fn descent() {
    assert!(same_span(&subgroup_descent(&pt(4, "0;e1^e2")).unwrap(), &[e(4, 1), e(4, 2)], 4));
    assert!(same_span(&subgroup_descent(&pt(4, "e1+e2;e1^e2")).unwrap(), &[e(4, 1), e(4, 2)], 4));
    assert!(same_span(&subgroup_descent(&pt(4, "e3;0")).unwrap(), &[e(4, 3)], 4));
    assert_eq!(subgroup_descent(&pt(4, "e3;e1^e2")), Err(Error::NotAbnormal));
}

fn closed_under_bracket(alg: &CarnotAlgebra, basis: &[carnot_core::LieElement]) -> bool {
    let mut span = EchelonBasis::new(alg.dim());
    for b in basis {
        span.insert(b.coeffs());
    }
    basis.iter().all(|x| {
        basis
            .iter()
            .all(|y| span.contains(alg.bracket(x, y).unwrap().coeffs()))
    })
}

#[test]
fn h_lambda_examples() {
    let hh = hxh().unwrap();
    let lambda = hh.dual_basis(hh.index_of("Z1").unwrap());
    let h = h_lambda(&hh, &lambda).unwrap();
    let expected: Vec<Vec<Scalar>> = ["X3", "X4", "Z2"]
        .iter()
        .map(|l| hh.basis(hh.index_of(l).unwrap()).into_coeffs())
        .collect();
    let got: Vec<Vec<Scalar>> = h.iter().map(|x| x.coeffs().to_vec()).collect();
    assert!(same_span(&got, &expected, hh.dim()));

    let heis = CarnotAlgebra::heisenberg();
    assert!(h_lambda(&heis, &heis.dual_basis(2)).unwrap().is_empty());
    let zero = heis.covector(vec![int(0); 3]).unwrap();
    assert_eq!(h_lambda(&heis, &zero), Err(Error::ZeroCovector));

    let f = CarnotAlgebra::free(4, 2).unwrap();
    let lambda = f.dual_basis(f.index_of("X21").unwrap());
    let h = h_lambda(&f, &lambda).unwrap();
    let got: Vec<Vec<Scalar>> = h.iter().map(|x| x.coeffs().to_vec()).collect();
    let expected: Vec<Vec<Scalar>> = ["X3", "X4", "X43"]
        .iter()
        .map(|l| f.basis(f.index_of(l).unwrap()).into_coeffs())
        .collect();
    assert!(same_span(&got, &expected, f.dim()));
    assert!(closed_under_bracket(&f, &h));
}

#[test]
fn codimension_at_y_samples() {
    assert_eq!(codim_certificate(&pt(4, "e1;e1^e2")).unwrap(), 3);
    let mut rng = common::rng(5);
    for r in [4, 6] {
        for _ in 0..5 {
            let p = random_y_sample(r, 9, &mut rng).unwrap();
            assert_eq!(codim_certificate(&p).unwrap(), 3);
        }
    }
    assert_eq!(codim_certificate(&pt(4, "e1;0")), Err(Error::SampleNotInY));
}

#[test]
fn rank_test_matches_wedge_equations_on_random_points() {
    let mut rng = common::rng(2024);
    for r in 2..=5 {
        for _ in 0..1000 {
            let p = common::random_point(r, &mut rng);
            assert_eq!(is_abnormal_point(&p), pfaffian_membership(&p), "{}", p.format());
        }
    }
}

#[test]
fn rank_test_matches_wedge_equations_on_grid() {
    for r in 2..=5 {
        common::for_each_grid_point(r, |p| {
            assert_eq!(is_abnormal_point(p), pfaffian_membership(p), "{}", p.format());
        });
    }
}

#[test]
fn reaching_controls_certify_abnormality() {
    let mut rng = common::rng(77);
    for r in [3, 4] {
        let f = CarnotAlgebra::free(r, 2).unwrap();
        for _ in 0..40 {
            let p = common::random_point(r, &mut rng);
            let u = reaching_control(&f, &p).unwrap();
            assert_eq!(group_to_point(&f, &endpoint(&f, &u).unwrap()).unwrap(), p);
            let cert = is_abnormal(&f, &u).unwrap();
            if is_abnormal_point(&p) {
                let mut w = EchelonBasis::new(r);
                for b in subgroup_descent(&p).unwrap() {
                    w.insert(&b);
                }
                assert!(u.values().iter().all(|v| w.contains(v)));
                assert!(cert.abnormal, "{}", p.format());
            } else {
                assert!(!cert.abnormal, "{}", p.format());
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn support_has_even_dimension(seed in any::<u64>(), r in 2usize..=6) {
        let mut rng = common::rng(seed);
        let p = common::random_point(r, &mut rng);
        prop_assert_eq!(support(&p.xi).len() % 2, 0);
        prop_assert_eq!(support(&p.xi).len(), p.xi.rank());
    }

    #[test]
    fn top_wedge_power_is_pfaffian(seed in any::<u64>(), s in 1usize..=3) {
        let mut rng = common::rng(seed);
        let r = 2 * s;
        let p = common::random_point(r, &mut rng);
        let top = wedge_power(&p.xi, s).unwrap();
        let all: Vec<usize> = (0..r).collect();
        prop_assert_eq!(top.coeff(&all), common::factorial(s) * common::pfaffian(p.xi.matrix()));
    }

    #[test]
    fn h_lambda_is_a_subalgebra(seed in any::<u64>(), r in 2usize..=5) {
        let mut rng = common::rng(seed);
        let f = CarnotAlgebra::free(r, 2).unwrap();
        let mut coeffs = vec![int(0); f.dim()];
        for c in coeffs[r..].iter_mut() {
            *c = common::small_rational(&mut rng);
        }
        prop_assume!(coeffs.iter().any(|c| *c != int(0)));
        let lambda = f.covector(coeffs).unwrap();
        let h = h_lambda(&f, &lambda).unwrap();
        prop_assert!(closed_under_bracket(&f, &h));
        prop_assert!(h.len() >= w_kernel(&f, &lambda).unwrap().len());
    }
}
