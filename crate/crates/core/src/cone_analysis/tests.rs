use super::*;
use crate::catalog;
use crate::torus_map::{IntegerMatrix, TorusMap};
use proptest::prelude::*;
use std::f64::consts::{FRAC_PI_2, FRAC_PI_8};

fn e1_lambda() -> f64 {
    (9.0 * FRAC_PI_8.cos().powi(2) + FRAC_PI_8.sin().powi(2)).sqrt()
}

#[test]
fn e1_report() {
    let r = classify(&catalog::e1(), &catalog::e1_cones(), 64, 60, 1e-10);
    assert_eq!(r.classification, Classification::Absolute);
    assert!(r.invariant);
    let margin = FRAC_PI_8 - (FRAC_PI_8.tan() / 3.0).atan();
    assert!((r.margin - margin).abs() < 1e-12);
    assert!((r.lambda_abs - e1_lambda()).abs() < 1e-12);
    assert!((r.lambda_max - 3.0).abs() < 1e-12);
    assert!((r.mu_abs - 1.0).abs() < 1e-12);
    assert!((r.delta_abs - 1.0 / e1_lambda()).abs() < 1e-12);
    assert!(r.max_center_width < 1e-10);
    let c = r.center.as_ref().unwrap();
    assert!(c.angle.iter().all(|a| proj_dist(*a, FRAC_PI_2) < 1e-10));
}

#[test]
fn vertical_expansion_breaks_horizontal_cones() {
    let map = TorusMap::linear(IntegerMatrix::new(1, 0, 0, 3));
    let r = classify(&map, &catalog::e1_cones(), 32, 60, 1e-10);
    assert!(!r.invariant);
    assert!(r.margin < 0.0);
    assert_eq!(r.classification, Classification::NotPh);
    let err = compute_center_field(&map, &catalog::e1_cones(), 32, 60, 1e-10).unwrap_err();
    assert!(matches!(err, crate::Error::Precondition(_)));
}

#[test]
fn e2_is_absolute_with_consistent_center() {
    let (map, cones) = (catalog::e2(), catalog::e2_cones());
    let r = classify(&map, &cones, 128, 60, 1e-10);
    assert_eq!(r.classification, Classification::Absolute);
    assert!(r.margin > 0.1);
    assert!(r.delta_pointwise <= r.delta_abs && r.delta_abs < 1.0);
    let res = center_invariance_residual(&map, &cones, r.center.as_ref().unwrap());
    assert!(res.within_bound, "{res:?}");
    assert!(res.max_residual < 1e-6);
}

#[test]
fn pointwise_only_map() {
    let r = classify(
        &catalog::pointwise_only(),
        &catalog::pointwise_only_cones(),
        128,
        60,
        1e-10,
    );
    assert!(r.invariant);
    assert_eq!(r.classification, Classification::PointwiseOnly);
    assert!(r.delta_pointwise < 1.0 && r.delta_abs >= 1.0);
    // Both scalars straight from the grids.
    let lam = r
        .lambda_pointwise
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min);
    let mu = r.mu_pointwise.iter().copied().fold(0.0, f64::max);
    assert_eq!(lam, r.lambda_abs);
    assert!(mu > lam);
    assert!(r
        .mu_pointwise
        .iter()
        .zip(&r.lambda_pointwise)
        .all(|(m, l)| m < l));
}

#[test]
fn cat_center_is_contracting_eigendirection() {
    let (map, cones) = (catalog::cat(), catalog::cat_cones());
    // (A − λ_s)v = 0 gives v = (1, λ_s − 2).
    let ls = (3.0 - 5f64.sqrt()) / 2.0;
    let contracting = (ls - 2.0).atan2(1.0);
    for p in [[0.0, 0.0], [0.3, 0.7], [0.91, 0.12]] {
        let s = center_direction(&map, &cones, p, 40, 1e-10);
        assert!(proj_dist(s.angle, contracting) < 1e-10, "{}", s.angle);
    }
}

#[test]
fn widths_shrink_with_depth() {
    let (map, cones) = (catalog::e2(), catalog::e2_cones());
    let mut prev = vec![f64::INFINITY; 16 * 16];
    for depth in [1, 2, 4, 8, 16, 32] {
        let f = compute_center_field(&map, &cones, 16, depth, 0.0).unwrap();
        for (w, p) in f.width.iter().zip(&prev) {
            assert!(w <= p);
        }
        prev = f.width;
    }
}

#[test]
fn classification_rule() {
    use Classification::*;
    assert_eq!(classify_scalars(false, 3.0, 0.1, 0.1), NotPh);
    assert_eq!(classify_scalars(true, 1.0, 0.1, 0.1), NotPh);
    assert_eq!(classify_scalars(true, 2.0, 0.5, 0.4), Absolute);
    assert_eq!(classify_scalars(true, 2.0, 1.2, 0.9), PointwiseOnly);
    assert_eq!(classify_scalars(true, 2.0, 1.0, 1.0), NotPh);
    assert_eq!(classify_scalars(true, 2.0, 1.2, 1.0), NotPh);
}

#[test]
fn reports_are_consistent_across_catalog() {
    let cases = [
        (catalog::e1(), catalog::e1_cones()),
        (catalog::e2(), catalog::e2_cones()),
        (catalog::pointwise_only(), catalog::pointwise_only_cones()),
        (catalog::degree3_circle(), catalog::degree3_cones()),
    ];
    for (map, cones) in cases {
        let r = classify(&map, &cones, 64, 60, 1e-10);
        assert_eq!(
            r.classification,
            classify_scalars(r.invariant, r.lambda_abs, r.delta_abs, r.delta_pointwise)
        );
        if r.classification == Classification::Absolute {
            assert!(r.delta_pointwise <= r.delta_abs && r.delta_abs < 1.0);
        }
        let lam_min = r
            .lambda_pointwise
            .iter()
            .copied()
            .fold(f64::INFINITY, f64::min);
        assert!(r.lambda_abs <= lam_min);
        assert_eq!(r.lambda_pointwise.len(), 64 * 64);
    }
}

#[test]
fn csv_has_one_row_per_node() {
    let r = classify(&catalog::e1(), &catalog::e1_cones(), 8, 20, 1e-10);
    let mut buf = Vec::new();
    r.write_csv(&mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert_eq!(text.lines().count(), 65);
    assert_eq!(text.lines().next(), Some("x,y,angle,width,lambda,mu"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn expansion_is_submultiplicative(x in 0.0f64..1.0, y in 0.0f64..1.0, which in 0usize..3) {
        let (map, cones) = match which {
            0 => (catalog::e1(), catalog::e1_cones()),
            1 => (catalog::e2(), catalog::e2_cones()),
            _ => (catalog::degree3_circle(), catalog::degree3_cones()),
        };
        let p = [x, y];
        let fp = map.lift(p);
        let two = map.jacobian(fp).mul(&map.jacobian(p));
        let (lo2, _) = expansion_range(&two, &cones.cone_at(p));
        let (l0, _) = expansion_range(&map.jacobian(p), &cones.cone_at(p));
        let (l1, _) = expansion_range(&map.jacobian(fp), &cones.cone_at(fp));
        prop_assert!(lo2 >= l0 * l1 - 1e-9);
    }
}
