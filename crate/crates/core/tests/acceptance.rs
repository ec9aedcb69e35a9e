//! Acceptance checks. Prints one `PASS`/`FAIL` line per criterion and exits
//! non-zero if any fails.

mod common;

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use carnot_core::abnormal::{eval_extremal_poly, extremal_poly_along, goh_residual, left_invariant_field, right_invariant_field};
use carnot_core::control_format::hxh;
use carnot_core::endpoint::{breakpoint_trajectory, is_abnormal, project_control, PiecewiseControl};
use carnot_core::f33::{self, endpoint_cross_check, verify_abnormal_abc, ExtremalDatum, DEFAULT_SEGMENTS};
use carnot_core::group::{adjoint, bch};
use carnot_core::linalg::{mat_mul, mat_vec, rank, EchelonBasis};
use carnot_core::sard::{criterion_infinitesimal, generic_sampler, Prolongation};
use carnot_core::scalar::{int, Scalar};
use carnot_core::step2::{codim_certificate, is_abnormal_point, pfaffian_membership, random_y_sample};
use carnot_core::{CarnotAlgebra, GroupElement, LieElement};
use num_traits::Zero;
use rand::Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(elapsed: Duration, budget: Duration) -> Result<(), String> {
    ensure(elapsed <= budget, || format!("took {elapsed:.2?}, budget {budget:.0?}"))
}

fn dimensions() -> Outcome {
    for (r, s, dim, layers) in [
        (2, 4, 8, vec![2, 1, 2, 3]),
        (3, 3, 14, vec![3, 3, 8]),
        (2, 5, 14, vec![2, 1, 2, 3, 6]),
        (4, 3, 30, vec![4, 6, 20]),
    ] {
        let start = Instant::now();
        let alg = CarnotAlgebra::free(r, s).map_err(|e| e.to_string())?;
        within(start.elapsed(), Duration::from_secs(1))?;
        ensure(alg.dim() == dim && alg.layer_dims() == layers.as_slice(), || {
            format!("f{r},{s}: dim {} layers {:?}", alg.dim(), alg.layer_dims())
        })?;
    }
    Ok("8, 14 (3/3/8), 14, 30".into())
}

fn golden_brackets() -> Outcome {
    let mut count = 0;
    let mut defs = 0;
    let mut check = |alg: &CarnotAlgebra, xi: &str, table: &[(usize, usize, &str)], extra: &[(&str, &str)]| -> Result<(), String> {
        let p = Prolongation::with_gl(alg.clone()).map_err(|e| e.to_string())?;
        let x = alg.parse_element(xi).unwrap();
        for &(i, j, expected) in table {
            let d = alg.elementary_derivation(i - 1, j - 1).unwrap();
            let direct = d.apply(&x).unwrap();
            let e = p.parse_element(&format!("E{i}{j}")).unwrap();
            let via = p.project(&p.bracket(&e, &p.embed(&x).unwrap())).unwrap();
            let want = alg.parse_element(expected).unwrap();
            ensure(direct == want && via == want, || format!("E{i}{j}"))?;
            count += 1;
        }
        for &(y, expected) in extra {
            let got = alg.bracket(&x, &alg.parse_element(y).unwrap()).unwrap();
            ensure(got == alg.parse_element(expected).unwrap(), || format!("[xi, {y}]"))?;
            count += 1;
        }
        Ok(())
    };
    let f24 = CarnotAlgebra::free(2, 4).unwrap();
    check(
        &f24,
        "X2 + X212 + X2111",
        &[(1, 1, "X212 + 3*X2111"), (1, 2, "X1 + X211"), (2, 2, "X2 + 2*X212 + X2111"), (2, 1, "2*X2112")],
        &[("X1", "X21 + X2112"), ("X2", "X2122")],
    )?;
    for (x, y, z) in [
        ("X2", "X1", "X21"),
        ("X21", "X1", "X211"),
        ("X21", "X2", "X212"),
        ("X211", "X1", "X2111"),
        ("X211", "X2", "X2112"),
        ("X212", "X1", "X2112"),
        ("X212", "X2", "X2122"),
    ] {
        let got = f24.bracket(&f24.parse_element(x).unwrap(), &f24.parse_element(y).unwrap()).unwrap();
        ensure(got == f24.parse_element(z).unwrap(), || format!("[{x}, {y}]"))?;
        defs += 1;
    }
    let xi24 = f24.parse_element("X2 + X212 + X2111").unwrap();
    let mut rows: Vec<Vec<Scalar>> = (0..2).map(|i| f24.basis(i).into_coeffs()).collect();
    rows.extend((0..2).map(|i| f24.bracket(&xi24, &f24.basis(i)).unwrap().into_coeffs()));
    for i in 0..2 {
        for j in 0..2 {
            rows.push(f24.elementary_derivation(i, j).unwrap().apply(&xi24).unwrap().into_coeffs());
        }
    }
    ensure(rank(&rows, f24.dim()) == f24.dim(), || "f2,4 span".into())?;

    let f33 = CarnotAlgebra::free(3, 3).unwrap();
    let xi33 = f33.parse_element("X21 + X31 + X32 + X312 + X213").unwrap();
    let mut rows: Vec<Vec<Scalar>> = (1..3).map(|i| f33.bracket(&xi33, &f33.basis(i)).unwrap().into_coeffs()).collect();
    for i in 0..3 {
        for j in 0..3 {
            rows.push(f33.elementary_derivation(i, j).unwrap().apply(&xi33).unwrap().into_coeffs());
        }
    }
    ensure(rank(&rows, f33.dim()) == 11, || "f3,3 rank".into())?;
    check(
        &f33,
        "X21 + X31 + X32 + X312 + X213",
        &[
            (1, 2, "X31 + X311"),
            (1, 3, "-X21 + X211"),
            (2, 3, "X21 + 2*X212"),
            (2, 1, "X32 + X322"),
            (3, 1, "-X32 - X323"),
            (3, 2, "X31 + 2*X313"),
            (1, 1, "X21 + X31 + X213 + X312"),
            (2, 2, "X21 + X32 + X213 + X312"),
            (3, 3, "X31 + X32 + X213 + X312"),
        ],
        &[("X2", "X212 + X312 + X322"), ("X3", "X213 + X313 + X323")],
    )?;
    let b = f33.bracket(&f33.parse_element("X32").unwrap(), &f33.parse_element("X1").unwrap()).unwrap();
    ensure(b == f33.parse_element("X312 - X213").unwrap(), || "[X32, X1]".into())?;
    Ok(format!("{} identities, [X32, X1] = X312 - X213, both spans full", count + defs))
}

fn sard_criterion() -> Outcome {
    let start = Instant::now();
    let prolong = |r, s| Prolongation::with_gl(CarnotAlgebra::free(r, s).unwrap()).unwrap();
    for (p, xi) in [(prolong(2, 4), "X2 + X212 + X2111"), (prolong(3, 3), "X21 + X31 + X32 + X312 + X213")] {
        let x = p.parse_element(xi).unwrap();
        ensure(criterion_infinitesimal(&p, &x).unwrap().holds, || format!("witness {xi} rejected"))?;
        let zero = vec![int(0); p.dim()];
        ensure(!criterion_infinitesimal(&p, &zero).unwrap().holds, || "xi = 0 accepted".into())?;
    }
    let mut counts = Vec::new();
    for (r, s, at_least, exact) in [(2, 4, 95, None), (3, 3, 95, None), (2, 5, 0, Some(0)), (3, 4, 0, Some(0)), (4, 3, 0, Some(0))] {
        let n = generic_sampler(&prolong(r, s), 100, 0).unwrap().successes;
        ensure(n >= at_least && exact.is_none_or(|e| n == e), || format!("f{r},{s}: {n} successes"))?;
        counts.push(format!("f{r},{s}={n}"));
    }
    within(start.elapsed(), Duration::from_secs(120))?;
    Ok(format!("witnesses hold, xi = 0 fails, successes {}", counts.join(" ")))
}

fn step2_equivalence() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(2024);
    let mut checked = 0usize;
    for r in 2..=5 {
        for _ in 0..1000 {
            let p = common::random_point(r, &mut rng);
            ensure(is_abnormal_point(&p) == pfaffian_membership(&p), || p.format())?;
            checked += 1;
        }
        let mut bad = None;
        common::for_each_grid_point(r, |p| {
            checked += 1;
            if bad.is_none() && is_abnormal_point(p) != pfaffian_membership(p) {
                bad = Some(p.format());
            }
        });
        if let Some(p) = bad {
            return Err(p);
        }
    }
    within(start.elapsed(), Duration::from_secs(60))?;
    for r in [4, 6] {
        for _ in 0..5 {
            let p = random_y_sample(r, 9, &mut rng).unwrap();
            let c = codim_certificate(&p).map_err(|e| e.to_string())?;
            ensure(c == 3, || format!("codim {c} at {}", p.format()))?;
        }
    }
    Ok(format!("{checked} points agree, codim 3 at r = 4, 6"))
}

fn endpoint_certificates() -> Outcome {
    let start = Instant::now();
    let mut rng = common::rng(11);
    let h = CarnotAlgebra::heisenberg();
    for _ in 0..200 {
        let u = random_control(&h, &mut rng, false);
        ensure(!is_abnormal(&h, &u).unwrap().abnormal, || format!("{:?}", u.values()))?;
    }
    let hh = hxh().unwrap();
    let z2 = hh.dual_basis(hh.index_of("Z2").unwrap());
    for _ in 0..50 {
        let values = (0..rng.gen_range(1..4))
            .map(|_| loop {
                let mut v = common::random_vector(2, &mut rng);
                if v.iter().any(|c| !c.is_zero()) {
                    v.extend([int(0), int(0)]);
                    break v;
                }
            })
            .collect();
        let cert = is_abnormal(&hh, &PiecewiseControl::uniform(&hh, values).unwrap()).unwrap();
        let mut ann = EchelonBasis::new(hh.dim());
        for l in &cert.annihilators {
            ann.insert(l.coeffs());
        }
        ensure(cert.abnormal && cert.image_rank == 5 && ann.contains(z2.coeffs()), || {
            format!("H x H: rank {}", cert.image_rank)
        })?;
    }
    for alg in [h.clone(), hh.clone(), CarnotAlgebra::free(3, 3).unwrap()] {
        let cert = is_abnormal(&alg, &PiecewiseControl::zero(&alg)).unwrap();
        ensure(cert.abnormal && cert.image_rank == alg.rank(), || "zero control".into())?;
    }
    within(start.elapsed(), Duration::from_secs(1))?;
    Ok("Heisenberg regular, H x H rank 5 of 6 with Z2*, zero control abnormal".into())
}

fn random_element<R: Rng>(alg: &CarnotAlgebra, rng: &mut R) -> LieElement {
    alg.element(common::random_vector(alg.dim(), rng)).unwrap()
}

fn random_group<R: Rng>(alg: &CarnotAlgebra, rng: &mut R) -> GroupElement {
    alg.exp(&random_element(alg, rng)).unwrap()
}

fn random_control<R: Rng>(alg: &CarnotAlgebra, rng: &mut R, allow_zero_segments: bool) -> PiecewiseControl {
    let values = (0..rng.gen_range(1..=3))
        .map(|_| loop {
            let v = common::random_vector(alg.rank(), rng);
            if allow_zero_segments || v.iter().any(|c| !c.is_zero()) {
                break v;
            }
        })
        .collect();
    PiecewiseControl::uniform(alg, values).unwrap()
}

const CASES: usize = 200;

fn identity_suites() -> Outcome {
    let algs = vec![
        CarnotAlgebra::heisenberg(),
        hxh().unwrap(),
        CarnotAlgebra::free(2, 3).unwrap(),
        CarnotAlgebra::free(2, 4).unwrap(),
        CarnotAlgebra::free(2, 5).unwrap(),
        CarnotAlgebra::free(3, 3).unwrap(),
        CarnotAlgebra::free(4, 3).unwrap(),
    ];
    let mut rng = common::rng(6);
    for alg in &algs {
        ensure(alg.brackets().jacobi_violation().is_none(), || format!("Jacobi, dim {}", alg.dim()))?;
    }
    for case in 0..CASES {
        let alg = &algs[case % algs.len()];
        let (x, y, z) = (random_element(alg, &mut rng), random_element(alg, &mut rng), random_element(alg, &mut rng));
        let b = |a: &LieElement, c: &LieElement| alg.bracket(a, c).unwrap();
        let sum = b(&b(&x, &y), &z).add(&b(&b(&y, &z), &x)).unwrap().add(&b(&b(&z, &x), &y)).unwrap();
        ensure(sum.is_zero(), || "Jacobi on random elements".into())?;

        let (g, h, k) = (random_group(alg, &mut rng), random_group(alg, &mut rng), random_group(alg, &mut rng));
        let gh = bch(alg, &g, &h).unwrap();
        ensure(bch(alg, &gh, &k).unwrap() == bch(alg, &g, &bch(alg, &h, &k).unwrap()).unwrap(), || "BCH associativity".into())?;

        let ag = adjoint(alg, &g).unwrap();
        ensure(adjoint(alg, &gh).unwrap() == mat_mul(&ag, &adjoint(alg, &h).unwrap()), || "Ad_gh".into())?;
        let ad = |v: &LieElement| alg.element(mat_vec(&ag, v.coeffs())).unwrap();
        ensure(ad(&b(&x, &y)) == b(&ad(&x), &ad(&y)), || "Ad of bracket".into())?;
    }
    let small = &algs[..4];
    for case in 0..CASES {
        let alg = &small[case % small.len()];
        let g = random_group(alg, &mut rng);
        let lambda = alg.covector(common::random_vector(alg.dim(), &mut rng)).unwrap();
        let (i, j) = (rng.gen_range(0..alg.dim()), rng.gen_range(0..alg.dim()));
        let along = extremal_poly_along(alg, &lambda, &g, &alg.basis(i), j).unwrap();
        let mut expected = Scalar::zero();
        for (k, c) in alg.structure_constants(i, j) {
            expected += c * eval_extremal_poly(alg, &lambda, k, &g).unwrap();
        }
        ensure(along.coefficient_of_power(0, 1) == expected, || "extremal polynomial recursion".into())?;

        let mut combo = vec![Scalar::zero(); alg.dim()];
        for m in 0..alg.dim() {
            let p = eval_extremal_poly(alg, &alg.dual_basis(m), i, &g).unwrap();
            for (c, y) in combo.iter_mut().zip(right_invariant_field(alg, &g, m)) {
                *c += &p * y;
            }
        }
        ensure(left_invariant_field(alg, &g, i) == combo, || "frame identity".into())?;
    }
    let rank2 = [CarnotAlgebra::heisenberg(), CarnotAlgebra::free(2, 3).unwrap(), CarnotAlgebra::free(2, 4).unwrap()];
    let mut goh = 0;
    for case in 0..CASES {
        let alg = &rank2[case % 3];
        let u = random_control(alg, &mut rng, false);
        let traj = breakpoint_trajectory(alg, &u).unwrap();
        for l in &is_abnormal(alg, &u).unwrap().annihilators {
            goh += 1;
            ensure(goh_residual(alg, l, &traj).unwrap().is_zero(), || "Goh residual".into())?;
        }
    }
    let f = &rank2[2];
    let top: Vec<Vec<Scalar>> = f.layer_range(4).map(|k| f.basis(k).into_coeffs()).collect();
    let x211 = vec![f.basis(f.index_of("X211").unwrap()).into_coeffs()];
    let quotients = [f.quotient(&top).unwrap(), f.quotient(&x211).unwrap()];
    let mut lifted = 0;
    for case in 0..CASES {
        let (q, pi) = &quotients[case % 2];
        let u = random_control(f, &mut rng, false);
        if is_abnormal(q, &project_control(pi, f, q, &u).unwrap()).unwrap().abnormal {
            lifted += 1;
            ensure(is_abnormal(f, &u).unwrap().abnormal, || "lift of abnormal".into())?;
        }
    }
    ensure(goh > 0 && lifted > 0, || "suites not exercised".into())?;
    Ok(format!("{CASES} cases per suite, {goh} Goh certificates, {lifted} lifts"))
}

fn f33_verification() -> Outcome {
    let start = Instant::now();
    let report = verify_abnormal_abc(&int(1), &int(2), &[int(1), int(1), int(1)], DEFAULT_SEGMENTS, 1e-6)
        .map_err(|e| e.to_string())?;
    ensure(report.extremal_residual <= 1e-6, || format!("extremal residual {:.3e}", report.extremal_residual))?;
    ensure(report.adjoint_residual <= 1e-8, || format!("constraint residual {:.3e}", report.adjoint_residual))?;
    ensure(report.not_in_subgroup, || "trajectory in a proper subgroup".into())?;
    let alg = f33::algebra();
    let lambda: Vec<f64> = f33::regular_covector_f64(&alg, &ExtremalDatum::diagonal([1.0; 3], 1.0, 2.0))
        .iter()
        .map(|x| -x)
        .collect();
    let (smallest, _) = endpoint_cross_check(&alg, &lambda, &report.trajectory);
    ensure(smallest <= 1e-6, || format!("smallest singular value {smallest:.3e}"))?;
    let equal = verify_abnormal_abc(&int(1), &int(1), &[int(1), int(1), int(1)], DEFAULT_SEGMENTS, 1e-6)
        .map_err(|e| e.to_string())?;
    ensure(!equal.not_in_subgroup, || "a = b passed the subgroup check".into())?;
    within(start.elapsed(), Duration::from_secs(30))?;
    Ok(format!(
        "extremal {:.2e}, constraint {:.2e}, singular value {:.2e}",
        report.extremal_residual, report.adjoint_residual, smallest
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 7] = [
        ("dimensions", dimensions),
        ("golden brackets", golden_brackets),
        ("Sard criterion", sard_criterion),
        ("step-2 equivalence", step2_equivalence),
        ("endpoint certificates", endpoint_certificates),
        ("identity suites", identity_suites),
        ("F33 extremal", f33_verification),
    ];
    let mut failed = 0;
    for (n, (name, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(run)).unwrap_or_else(|_| Err("panicked".into()));
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("PASS criterion {}: {name}: {detail} ({secs:.2}s)", n + 1),
            Err(why) => {
                failed += 1;
                println!("FAIL criterion {}: {name}: {why} ({secs:.2}s)", n + 1);
            }
        }
    }
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
