use super::*;
use crate::catalog;
use crate::cone_analysis::{classify, compute_center_field, ConeField};
use crate::torus_map::{is_eigenvector, parallel, IntegerMatrix, TorusMap};
use proptest::prelude::*;
use std::f64::consts::PI;

fn field_of(map: &TorusMap, cones: &ConeField) -> crate::cone_analysis::CenterField {
    compute_center_field(map, cones, 64, 60, 1e-10).unwrap()
}

fn hunt(map: &TorusMap, cones: &ConeField) -> HuntReport {
    hunt_invariant_circles(map, &field_of(map, cones), &HuntOptions::default()).unwrap()
}

fn assert_eigen_classes(map: &TorusMap, r: &HuntReport) {
    for c in &r.circles {
        let cls = c.curve.homotopy_class.unwrap();
        assert_ne!(cls, [0, 0]);
        assert!(parallel(map.linear.apply(cls), cls));
        assert!(is_eigenvector(&map.linear, cls).is_some());
    }
}

fn assert_degree_identities(r: &HuntReport) {
    for c in &r.circles {
        let rep = &c.report;
        let d = rep.degree.unsigned_abs() as f64;
        assert!(
            (rep.jacobian_integral - d * rep.arc_length).abs() < 1e-5,
            "{rep:?}"
        );
        assert!(rep.max_jacobian >= d - 1e-9, "{rep:?}");
    }
}

#[test]
fn e1_hunt_finds_two_vertical_circles() {
    let r = hunt(&catalog::e1(), &catalog::e1_cones());
    let xs: Vec<f64> = r.circles.iter().map(|c| c.curve.points[0][0]).collect();
    assert_eq!(r.circles.len(), 2, "{xs:?}");
    assert!(
        xs.iter().any(|x| x.abs() < 1e-9) && xs.iter().any(|x| (x - 0.5).abs() < 1e-9),
        "{xs:?}"
    );
    for c in &r.circles {
        assert_eq!(c.curve.homotopy_class, Some([0, 1]));
        assert_eq!(c.report.degree, 1);
        assert_eq!(c.report.period, 1);
        assert!((c.report.jacobian_integral - 1.0).abs() < 1e-9);
        assert!((c.report.max_jacobian - 1.0).abs() < 1e-9);
    }
    assert_eigen_classes(&catalog::e1(), &r);
}

#[test]
fn degree_three_circles() {
    let map = catalog::degree3_circle();
    let r = hunt(&map, &catalog::degree3_cones());
    let mut ys: Vec<f64> = r
        .circles
        .iter()
        .map(|c| crate::torus_map::wrap_unit(c.curve.points[0][1]))
        .collect();
    ys.sort_by(f64::total_cmp);
    assert_eq!(ys.len(), 4, "{ys:?}");
    for (y, want) in ys.iter().zip([0.0, 0.25, 0.5, 0.75]) {
        assert!((y - want).abs() < 1e-6, "{ys:?}");
    }
    for c in &r.circles {
        assert_eq!(c.report.degree, 3);
        assert!(c.report.max_jacobian >= 3.0);
    }
    assert_degree_identities(&r);
    assert_eigen_classes(&map, &r);
    // A circle of degree d under an absolutely dominated map needs λ_abs > |d|.
    let ph = classify(&map, &catalog::degree3_cones(), 64, 60, 1e-10);
    assert!(ph.lambda_abs > 3.0);
}

#[test]
fn period_two_circles_are_found_by_refinement() {
    let map = catalog::degree3_circle();
    let opts = HuntOptions {
        period_max: 2,
        ..Default::default()
    };
    let r =
        hunt_invariant_circles(&map, &field_of(&map, &catalog::degree3_cones()), &opts).unwrap();
    // y ↦ 5y has its period-2 points at m/24; every lattice window of width 1/8 holds some.
    assert!(r.circles.iter().any(|c| c.report.period == 2));
    for c in &r.circles {
        let y = crate::torus_map::wrap_unit(c.curve.points[0][1]);
        let m = y * 24.0;
        assert!((m - m.round()).abs() < 1e-6, "y = {y}");
        assert_eq!(c.report.degree, 3i64.pow(c.report.period as u32));
    }
    assert_degree_identities(&r);
}

#[test]
fn irrational_spectrum_hunts_are_empty() {
    let cat = hunt_invariant_circles(
        &catalog::cat(),
        &compute_center_field(&catalog::cat(), &catalog::cat_cones(), 64, 40, 1e-10).unwrap(),
        &HuntOptions::default(),
    )
    .unwrap();
    assert!(cat.circles.is_empty());
    assert_eq!(cat.closed_leaves, 0);
    let e2 = hunt(&catalog::e2(), &catalog::e2_cones());
    assert!(e2.circles.is_empty());
}

#[test]
fn e2_closed_leaves_have_eigen_classes() {
    let map = catalog::e2();
    let field = field_of(&map, &catalog::e2_cones());
    let opts = IntegrationOptions {
        max_len: 10.0,
        ..Default::default()
    };
    for k in 0..10 {
        let seed = [0.1 * k as f64, (0.37 * k as f64).fract()];
        let c = integrate_center_curve(&field, seed, &opts).unwrap();
        if let Some(cls) = c.homotopy_class {
            assert!(is_eigenvector(&map.linear, cls).is_some());
        }
    }
}

#[test]
fn restriction_report_on_isometric_circle() {
    let field = crate::cone_analysis::CenterField::uniform(16, PI / 2.0);
    let c = integrate_center_curve(&field, [0.0, 0.2], &IntegrationOptions::default()).unwrap();
    let r = circle_restriction_report(&catalog::e1(), &c, 1e-3).unwrap();
    assert_eq!(r.degree, 1);
    assert!((r.arc_length - 1.0).abs() < 1e-9);
    assert!((r.jacobian_integral - 1.0).abs() < 1e-9);
    assert!((r.max_jacobian - 1.0).abs() < 1e-12);
    assert!(r.invariance_hausdorff < 1e-12);

    // {0.1} × S¹ maps to {0.3} × S¹.
    let off = integrate_center_curve(&field, [0.1, 0.0], &IntegrationOptions::default()).unwrap();
    let err = circle_restriction_report(&catalog::e1(), &off, 1e-3).unwrap_err();
    assert!(matches!(err, crate::Error::Precondition(_)));
}

#[test]
fn horizontal_circle_under_swapped_roles() {
    let map = TorusMap::linear(IntegerMatrix::new(1, 0, 0, 3));
    let field = crate::cone_analysis::CenterField::uniform(16, 0.0);
    let c = integrate_center_curve(&field, [0.3, 0.0], &IntegrationOptions::default()).unwrap();
    assert_eq!(c.homotopy_class, Some([1, 0]));
    let r = circle_restriction_report(&map, &c, 1e-3).unwrap();
    assert_eq!(r.degree, 1);
    assert!((r.jacobian_integral - r.arc_length).abs() < 1e-12);
}

#[test]
fn embedded_degree_three_map_quadrature() {
    let map = catalog::degree3_circle();
    let field = crate::cone_analysis::CenterField::uniform(16, 0.0);
    let c = integrate_center_curve(&field, [0.0, 0.0], &IntegrationOptions::default()).unwrap();
    let r = circle_restriction_report(&map, &c, 1e-3).unwrap();
    assert_eq!(r.degree, 3);
    assert!((r.jacobian_integral - 3.0 * r.arc_length).abs() < 1e-6);
    assert!((r.max_jacobian - (3.0 + 0.2 * PI)).abs() < 1e-4);
}

#[test]
fn degree_one_diameter_grows_at_most_linearly() {
    // x = 0 is invariant with degree-one restriction for both maps.
    for map in [catalog::e1(), catalog::pointwise_only()] {
        let pts: Vec<_> = (0..=100).map(|k| [0.0, 0.1 + 0.003 * k as f64]).collect();
        let d = lifted_diameter_growth(&map, &pts, 20);
        for (n, v) in d.iter().enumerate().skip(1) {
            assert!(v / (n as f64) < 2.0, "n={n} diam={v}");
        }
    }
}

#[test]
fn e1_growth_is_exactly_geometric() {
    let opts = GrowthOptions {
        n_max: 6,
        ..Default::default()
    };
    let g = grow_unstable_curve(
        &catalog::e1(),
        &catalog::e1_cones(),
        [[0.0, 0.5], [1.0, 0.5]],
        &opts,
    )
    .unwrap();
    for (n, l) in g.curve_length.iter().enumerate() {
        let want = 3f64.powi(n as i32);
        assert!((l - want).abs() < 1e-9 * want);
    }
    assert!((g.lambda_fit - 3.0).abs() < 1e-9);
    // Stadium: area(n) ≈ 2·3ⁿ + π.
    let r4 = g.tube_area[4] / g.curve_length[4];
    assert!((r4 - (2.0 + PI / 81.0)).abs() < 0.02, "{r4}");
    assert!(g.k_estimate > 1.9 && g.k_estimate < 2.1);
    for (a, l) in g.tube_area.iter().zip(&g.curve_length) {
        assert!(*a >= g.k_estimate * l * (1.0 - 1e-12));
    }
}

#[test]
fn e2_growth_rate_within_cone_bounds() {
    let map = catalog::e2();
    let cones = catalog::e2_cones();
    let ph = classify(&map, &cones, 128, 60, 1e-10);
    let dir = [(PI / 8.0).cos(), (PI / 8.0).sin()];
    let seg = |len: f64| [[0.3, 0.6], [0.3 + len * dir[0], 0.6 + len * dir[1]]];
    let opts = GrowthOptions {
        n_max: 8,
        ..Default::default()
    };
    let g = grow_unstable_curve(&map, &cones, seg(0.1), &opts).unwrap();
    assert!(
        g.lambda_fit >= 0.98 * ph.lambda_abs && g.lambda_fit <= 1.02 * ph.lambda_max,
        "{} {:?}",
        g.lambda_fit,
        ph
    );
    assert!(g.k_estimate > 0.5);
    for w in g.curve_length.windows(2) {
        assert!(w[1] >= w[0]);
    }
}

#[test]
fn e2_growth_rate_is_scale_free_at_default_horizon() {
    let map = catalog::e2();
    let cones = catalog::e2_cones();
    let dir = [(PI / 8.0).cos(), (PI / 8.0).sin()];
    let seg = |len: f64| [[0.3, 0.6], [0.3 + len * dir[0], 0.6 + len * dir[1]]];
    let opts = GrowthOptions {
        resample_step: 0.1,
        cell: 0.05,
        ..Default::default()
    };
    assert_eq!(opts.n_max, 12);
    let a = grow_unstable_curve(&map, &cones, seg(1e-3), &opts).unwrap();
    let b = grow_unstable_curve(&map, &cones, seg(1e-2), &opts).unwrap();
    assert!(
        (a.lambda_fit / b.lambda_fit - 1.0).abs() < 0.01,
        "{} {}",
        a.lambda_fit,
        b.lambda_fit
    );
}

#[test]
fn growth_detects_lost_tangency() {
    let map = TorusMap::linear(IntegerMatrix::new(1, 0, 0, 3));
    let cones = ConeField::constant(0.0, PI / 8.0).unwrap();
    let j0 = [[0.0, 0.0], [0.3f64.cos() * 0.1, 0.3f64.sin() * 0.1]];
    let err = grow_unstable_curve(
        &map,
        &cones,
        j0,
        &GrowthOptions {
            n_max: 3,
            ..Default::default()
        },
    )
    .unwrap_err();
    assert!(matches!(err, crate::Error::TangencyLost { n: 1, .. }));
}

#[test]
fn bound_sequences_follow_closed_forms() {
    let b = bound_sequences(2, 3.0, 2.0, 1.0, 1.0, 1.0, 0.1, 12);
    for n in 0..=12 {
        let lower = 2.0 * 3f64.powi(n);
        let upper = (2f64.powi(n) + 2.2) * 2.2;
        assert!((b.lower_bound[n as usize] - lower).abs() < 1e-9 * lower);
        assert!((b.rectangle_bound[n as usize] - upper).abs() < 1e-9 * upper);
    }
    assert_eq!(b.crossover_n, Some(2));
    assert!(b.contradiction);
    let tail = b.ratio[12] / b.ratio[11];
    assert!((tail / 1.5 - 1.0).abs() < 0.05, "{tail}");

    let control = bound_sequences(2, 2.0, 2.0, 1.0, 1.0, 1.0, 0.1, 40);
    assert_eq!(control.crossover_n, None);
    assert!(!control.contradiction);
    assert!(control.ratio.iter().all(|r| *r < 2.0));
}

#[test]
fn crossover_shift_under_larger_u_sup() {
    for &(lambda, u) in &[(3.0, 0.1), (2.5, 0.4), (4.0, 1.0)] {
        let k = 0.6;
        let a = bound_sequences(2, lambda, k, 1.0, 1.0, 1.0, u, 200)
            .crossover_n
            .unwrap() as f64;
        let b = bound_sequences(2, lambda, k, 1.0, 1.0, 1.0, 2.0 * u, 200)
            .crossover_n
            .unwrap() as f64;
        let scale = ((2.0 * (2.0 * u) + 2.0) / (2.0 * u + 2.0)).powi(2);
        assert!(b >= a);
        assert!(
            b - a <= scale.ln() / (lambda / 2.0f64).ln() + 1.0,
            "λ={lambda} u={u}: {a} → {b}"
        );
    }
}

#[test]
fn contradiction_bounds_use_the_semiconjugacy() {
    let strip = catalog::linear_strip(2);
    let semi = crate::semiconjugacy::solve(
        &strip,
        &crate::semiconjugacy::SolveOptions {
            grid: (64, 9),
            ..Default::default()
        },
    )
    .unwrap();
    let g = grow_unstable_curve(
        &catalog::e1(),
        &catalog::e1_cones(),
        [[0.0, 0.5], [1.0, 0.5]],
        &GrowthOptions {
            n_max: 6,
            ..Default::default()
        },
    )
    .unwrap();
    let done = contradiction_bounds(&strip, &semi, &g, &BoundInputs::default()).unwrap();
    let b = done.bounds.unwrap();
    assert!((b.h_length - 1.0).abs() < 1e-12);
    assert_eq!(b.u_sup, 0.0);
    assert!(b.contradiction);
    assert!(b.crossover_n.is_some());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn tube_area_between_disc_and_stadium(
        pts in prop::collection::vec((-3.0f64..3.0, -3.0f64..3.0), 1..6)
    ) {
        let pts: Vec<_> = pts.into_iter().map(|(x, y)| [x, y]).collect();
        let len: f64 = pts.windows(2).map(|w| crate::torus_map::dist(w[0], w[1])).sum();
        let a = tube_area(&pts, 0.02);
        prop_assert!(a >= PI * 0.97);
        prop_assert!(a <= (2.0 * len + PI) * 1.03);
    }
}
