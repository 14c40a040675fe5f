use std::f64::consts::PI;

use coarse_core::groups::{
    make_cyclic, make_dihedral, make_product, make_sl2, make_symmetric, parse_group, FiniteGroup, GroupFamily,
};
use coarse_core::spectral::{
    averaging_operator, expander_check, is_bipartite, spectral_report, tensor_gap_check, two_sided_gap,
};
use proptest::prelude::*;

const CAP: usize = 5000;

fn assert_group_axioms(g: &FiniteGroup) {
    let n = g.order();
    let e = g.identity();
    for a in 0..n {
        assert_eq!(g.mul(e, a), a);
        assert_eq!(g.mul(a, g.inv(a)), e);
        for b in 0..n {
            for c in 0..n {
                assert_eq!(g.mul(g.mul(a, b), c), g.mul(a, g.mul(b, c)));
            }
        }
    }
}

#[test]
fn constructed_groups_are_groups() {
    for g in [
        make_cyclic(7).unwrap(),
        make_dihedral(5).unwrap(),
        make_symmetric(4).unwrap(),
        make_sl2(3).unwrap(),
        make_product(&make_cyclic(2).unwrap(), &make_cyclic(3).unwrap(), CAP).unwrap(),
    ] {
        assert_group_axioms(&g);
        assert!(g.generates(), "{}", g.label());
    }
    assert_eq!(make_sl2(5).unwrap().order(), 120);
    assert_eq!(make_symmetric(4).unwrap().order(), 24);
}

#[test]
fn averaging_operator_is_symmetric_and_stochastic() {
    for g in [make_dihedral(6).unwrap(), make_sl2(5).unwrap()] {
        let m = averaging_operator(&g);
        assert!((&m - m.transpose()).amax() < 1e-15);
        for i in 0..m.nrows() {
            assert!((m.row(i).sum() - 1.0).abs() < 1e-12);
        }
    }
}

#[test]
fn odd_generators_give_bipartite_cayley_graph() {
    let g = make_symmetric(4).unwrap();
    let r = spectral_report(&g, CAP).unwrap();
    assert!(is_bipartite(&g));
    assert_eq!(r.h_gap, 0.0);
    assert!((r.eigenvalues[0] + 1.0).abs() < 1e-9);
    assert!(r.gamma > 0.0 && r.kazhdan_lower > 0.0);
    assert_eq!(r.eigenvalues.len(), 24);
}

#[test]
fn tensor_spectrum_is_pairwise_products() {
    let g1 = make_cyclic(5).unwrap();
    let g2 = make_dihedral(3).unwrap();
    let t = tensor_gap_check(&g1, &g2, CAP).unwrap();
    assert_eq!(t.spectrum.len(), g1.order() * g2.order());
    assert!(t.contained);
}

#[test]
fn caps_and_bad_specs_are_errors() {
    assert!(parse_group("sl2:4", CAP).is_err());
    assert!(parse_group("cyclic:0", CAP).is_err());
    assert!(parse_group("sl2:31", 100).is_err());
    assert!(GroupFamily::parse("nonsense:3", CAP).is_err());
}

#[test]
fn family_parsing_and_verdict() {
    let fam = GroupFamily::parse("cyclic:10..40:10", CAP).unwrap();
    assert_eq!(fam.len(), 4);
    let r = expander_check(&fam, 0.05, CAP).unwrap();
    assert!(!r.expander);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn cyclic_spectrum_matches_cosines(n in 3usize..60) {
        let r = spectral_report(&make_cyclic(n).unwrap(), CAP).unwrap();
        let mut expected: Vec<f64> = (0..n).map(|k| (2.0 * PI * k as f64 / n as f64).cos()).collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in r.eigenvalues.iter().zip(&expected) {
            prop_assert!((a - b).abs() < 1e-9, "{} vs {}", a, b);
        }
        prop_assert!((r.h_gap - two_sided_gap(&r.eigenvalues)).abs() < 1e-15);
    }

    #[test]
    fn product_orders_multiply(a in 2usize..8, b in 3usize..8) {
        let g = make_product(&make_cyclic(a).unwrap(), &make_dihedral(b).unwrap(), CAP).unwrap();
        prop_assert_eq!(g.order(), a * 2 * b);
        assert_group_axioms(&g);
    }
}
