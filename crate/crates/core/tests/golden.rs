//! Printed bracket and derivation tables for the free algebras of rank 2,
//! step 4 and rank 3, step 3.

use carnot_core::lie::witt_dimension;
use carnot_core::sard::Prolongation;
use carnot_core::CarnotAlgebra;

fn elt(alg: &CarnotAlgebra, text: &str) -> carnot_core::LieElement {
    alg.parse_element(text).unwrap()
}

fn bracket(alg: &CarnotAlgebra, x: &str, y: &str) -> carnot_core::LieElement {
    alg.bracket(&elt(alg, x), &elt(alg, y)).unwrap()
}

/// `E_ij ξ` computed twice: through the derivation extension and through the
/// prolongation bracket `[E_ij, ξ]`.
fn e_ij(alg: &CarnotAlgebra, i: usize, j: usize, xi: &str) -> carnot_core::LieElement {
    let d = alg.elementary_derivation(i - 1, j - 1).unwrap();
    let direct = d.apply(&elt(alg, xi)).unwrap();
    let p = Prolongation::with_gl(alg.clone()).unwrap();
    let e = p.parse_element(&format!("E{i}{j}")).unwrap();
    let via_bracket = p.bracket(&e, &p.embed(&elt(alg, xi)).unwrap());
    assert!(via_bracket[..p.h_dim()].iter().all(|c| *c == carnot_core::scalar::int(0)));
    assert_eq!(p.project(&via_bracket).unwrap(), direct);
    direct
}

#[test]
fn dimensions_follow_witt() {
    for (r, s, dim, layers) in [
        (2, 4, 8, vec![2, 1, 2, 3]),
        (3, 3, 14, vec![3, 3, 8]),
        (2, 5, 14, vec![2, 1, 2, 3, 6]),
        (4, 3, 30, vec![4, 6, 20]),
    ] {
        let alg = CarnotAlgebra::free(r, s).unwrap();
        assert_eq!(alg.dim(), dim);
        assert_eq!(alg.layer_dims(), layers.as_slice());
        for (n, d) in layers.iter().enumerate() {
            assert_eq!(witt_dimension(r, n + 1), Some(*d as u128));
        }
    }
}

#[test]
fn rank_two_step_four_basis() {
    let alg = CarnotAlgebra::free(2, 4).unwrap();
    assert_eq!(
        alg.labels(),
        ["X1", "X2", "X21", "X211", "X212", "X2111", "X2112", "X2122"]
    );
    let defs = [
        ("X2", "X1", "X21"),
        ("X21", "X1", "X211"),
        ("X21", "X2", "X212"),
        ("X211", "X1", "X2111"),
        ("X211", "X2", "X2112"),
        ("X212", "X1", "X2112"),
        ("X212", "X2", "X2122"),
    ];
    for (x, y, z) in defs {
        assert_eq!(bracket(&alg, x, y), elt(&alg, z), "[{x}, {y}]");
    }
}

#[test]
fn rank_two_step_four_derivation_table() {
    let alg = CarnotAlgebra::free(2, 4).unwrap();
    let xi = "X2 + X212 + X2111";
    let table = [
        (1, 1, "X212 + 3*X2111"),
        (1, 2, "X1 + X211"),
        (2, 2, "X2 + 2*X212 + X2111"),
        (2, 1, "2*X2112"),
    ];
    for (i, j, expected) in table {
        assert_eq!(e_ij(&alg, i, j, xi), elt(&alg, expected), "E{i}{j}");
    }
    assert_eq!(bracket(&alg, xi, "X1"), elt(&alg, "X21 + X2112"));
    assert_eq!(bracket(&alg, xi, "X2"), elt(&alg, "X2122"));
}

#[test]
fn rank_three_step_three_basis() {
    let alg = CarnotAlgebra::free(3, 3).unwrap();
    assert_eq!(
        alg.labels(),
        [
            "X1", "X2", "X3", "X21", "X31", "X32", "X211", "X212", "X213", "X311", "X312",
            "X313", "X322", "X323"
        ]
    );
    assert_eq!(bracket(&alg, "X32", "X1"), elt(&alg, "X312 - X213"));
}

#[test]
fn rank_three_step_three_derivation_table() {
    let alg = CarnotAlgebra::free(3, 3).unwrap();
    let xi = "X21 + X31 + X32 + X312 + X213";
    let table = [
        (1, 2, "X31 + X311"),
        (1, 3, "-X21 + X211"),
        (2, 3, "X21 + 2*X212"),
        (2, 1, "X32 + X322"),
        (3, 1, "-X32 - X323"),
        (3, 2, "X31 + 2*X313"),
        (1, 1, "X21 + X31 + X213 + X312"),
        (2, 2, "X21 + X32 + X213 + X312"),
        (3, 3, "X31 + X32 + X213 + X312"),
    ];
    let mut rows = Vec::new();
    for (i, j, expected) in table {
        let got = e_ij(&alg, i, j, xi);
        assert_eq!(got, elt(&alg, expected), "E{i}{j}");
        rows.push(got.into_coeffs());
    }
    let v = bracket(&alg, xi, "X2");
    let w = bracket(&alg, xi, "X3");
    assert_eq!(v, elt(&alg, "X212 + X312 + X322"));
    assert_eq!(w, elt(&alg, "X213 + X313 + X323"));
    rows.push(v.into_coeffs());
    rows.push(w.into_coeffs());
    assert_eq!(carnot_core::linalg::rank(&rows, alg.dim()), 11);
}
