use coarse_core::centres::{BoundedSet, Isometry};
use coarse_core::metric::{Point, SpaceSpec};
use nalgebra::DVector;
use proptest::prelude::*;

fn point_set(dim: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    proptest::collection::vec(proptest::collection::vec(-5.0f64..5.0, dim), 1..9)
}

fn space(p: Option<f64>, dim: usize) -> SpaceSpec {
    match p {
        Some(p) => SpaceSpec::lp(p, dim).unwrap(),
        None => SpaceSpec::hilbert(dim).unwrap(),
    }
}

fn exponent() -> impl Strategy<Value = Option<f64>> {
    prop_oneof![Just(None), Just(Some(1.5)), Just(Some(3.0)), Just(Some(4.0))]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn triangle_inequality(p in exponent(), x in point_set(3), y in point_set(3)) {
        let s = space(p, 3);
        let a = Point::new(x[0].clone());
        let b = Point::new(y[0].clone());
        let c = Point::new(x[x.len() - 1].clone());
        let ab = s.distance(&a, &b).unwrap();
        let bc = s.distance(&b, &c).unwrap();
        let ac = s.distance(&a, &c).unwrap();
        prop_assert!(ac <= ab + bc + 1e-12);
        prop_assert!((ab - s.distance(&b, &a).unwrap()).abs() < 1e-12);
    }

    #[test]
    fn centre_minimises_radius(p in exponent(), pts in point_set(2), probe in proptest::collection::vec(-5.0f64..5.0, 2)) {
        let set = BoundedSet::from_rows(space(p, 2), &pts).unwrap();
        let z = set.chebyshev_centre(1e-12).unwrap();
        prop_assert!((set.radius_at(&z.centre).unwrap() - z.rho).abs() < 1e-12);
        prop_assert!(z.rho <= set.radius_at(&Point::new(probe)).unwrap() + 1e-9);
        prop_assert!(z.residual <= 1e-8, "residual {}", z.residual);
    }

    #[test]
    fn hilbert_centre_lies_in_hull(pts in point_set(4)) {
        let set = BoundedSet::from_rows(space(None, 4), &pts).unwrap();
        let z = set.chebyshev_centre(1e-12).unwrap();
        prop_assert!(set.hull_distance(&z.centre).unwrap() < 1e-8);
    }

    #[test]
    fn centre_commutes_with_translation(p in exponent(), pts in point_set(3), t in proptest::collection::vec(-20.0f64..20.0, 3)) {
        let set = BoundedSet::from_rows(space(p, 3), &pts).unwrap();
        let iso = Isometry::translation(DVector::from_vec(t));
        prop_assert!(set.centre_equivariance_defect(&iso, 1e-12).unwrap() < 1e-6);
    }

    #[test]
    fn nested_sets_satisfy_stability_bound(
        p in exponent(),
        pts in point_set(3),
        keep in 1usize..9,
        eps in 0.05f64..1.95,
    ) {
        let s = space(p, 3);
        let sub: Vec<Vec<f64>> = pts.iter().take(keep).cloned().collect();
        let a = BoundedSet::from_rows(s, &pts).unwrap();
        let b = BoundedSet::from_rows(s, &sub).unwrap();
        prop_assert!(a.contains_all(&b));
        prop_assert!(a.stability_bound_check(&b, eps).unwrap().holds);
        if p.is_none() {
            prop_assert!(a.hilbert_nested_bound_check(&b).unwrap());
        }
    }

    #[test]
    fn kappa_is_positive_and_monotone(p in exponent(), e1 in 0.01f64..1.0, e2 in 1.0f64..1.99) {
        let s = space(p, 2);
        let k1 = s.kappa(e1).unwrap();
        let k2 = s.kappa(e2).unwrap();
        prop_assert!(k1 > 0.0 && k2 > 0.0);
        prop_assert!(s.modulus_delta(e1).unwrap() <= s.modulus_delta(e2).unwrap() + 1e-15);
    }
}

#[test]
fn midpoint_is_equidistant() {
    let s = space(Some(3.0), 2);
    let a = Point::new(vec![0.0, 0.0]);
    let b = Point::new(vec![2.0, -1.0]);
    let m = s.midpoint(&a, &b).unwrap();
    let d = s.distance(&a, &b).unwrap();
    assert!((s.distance(&a, &m).unwrap() - d / 2.0).abs() < 1e-12);
    assert!((s.distance(&m, &b).unwrap() - d / 2.0).abs() < 1e-12);
}

#[test]
fn bad_inputs_are_rejected() {
    assert!(SpaceSpec::lp(1.0, 2).is_err());
    assert!(SpaceSpec::hilbert(0).is_err());
    assert!(BoundedSet::from_rows(space(None, 2), &[vec![1.0]]).is_err());
    assert!(BoundedSet::from_rows(space(None, 2), &[vec![1.0, f64::NAN]]).is_err());
}
