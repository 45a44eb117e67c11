use std::f64::consts::{PI, TAU};

use alexandrov::comparison::{
    budget, hinge_angle, quadruple_check, Hinge, Verdict, BASE_TOLERANCE,
};
use alexandrov::constructions::{
    cats_cradle, key_lemma_check, radial_curve, CradleOptions, KeyLemmaOptions, KeyLemmaVerdict,
    RadialOptions,
};
use alexandrov::globalization::{segment_chain, ChainOptions};
use alexandrov::space::{completion, geodesic};
use alexandrov::{
    generate_space, model_angle, model_diameter, model_side, Location, MetricSpaceSample,
    SpaceKind, SpaceSpec, Variant,
};
use proptest::prelude::*;

fn sph(colat: f64, lon: f64) -> Location {
    Location::Sphere([
        colat.sin() * lon.cos(),
        colat.sin() * lon.sin(),
        colat.cos(),
    ])
}

fn spec(kind: SpaceKind) -> SpaceSpec {
    match kind {
        SpaceKind::Cone => SpaceSpec::new(kind).with_total_angle(1.5 * PI),
        _ => SpaceSpec::new(kind),
    }
}

fn sphere() -> MetricSpaceSample {
    generate_space(&SpaceSpec::new(SpaceKind::Sphere).with_n(30).with_seed(5)).unwrap()
}

fn plane() -> MetricSpaceSample {
    generate_space(&SpaceSpec::new(SpaceKind::Euclidean).with_n(20).with_seed(5)).unwrap()
}

/// Largest admissible side for the round-trip property at curvature `kappa`.
fn side_cap(kappa: f64) -> f64 {
    1.0f64.min(model_diameter(kappa) / 2.0)
}

fn planar_distances(pts: &[[f64; 2]; 4]) -> ([f64; 3], [f64; 3]) {
    let d = |i: usize, j: usize| (pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]);
    ([d(0, 1), d(0, 2), d(0, 3)], [d(1, 2), d(2, 3), d(3, 1)])
}

fn point() -> impl Strategy<Value = [f64; 2]> {
    [-2.0..2.0f64, -2.0..2.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn side_then_angle_round_trips(
        kappa in -4.0..4.0f64,
        fa in 1e-3..1.0f64,
        fb in 1e-3..1.0f64,
        gamma in 0.0..PI,
    ) {
        let (a, b) = (fa * side_cap(kappa), fb * side_cap(kappa));
        let c = model_side(kappa, a, b, gamma).unwrap();
        let back = model_angle(kappa, a, b, c).unwrap();
        prop_assert!((back - gamma).abs() <= 1e-9, "{kappa} {a} {b} {gamma}: {back}");
    }

    #[test]
    fn angle_is_nondecreasing_in_the_opposite_side(
        kappa in -4.0..4.0f64,
        fa in 1e-3..1.0f64,
        fb in 1e-3..1.0f64,
        g1 in 0.0..PI,
        g2 in 0.0..PI,
    ) {
        let (a, b) = (fa * side_cap(kappa), fb * side_cap(kappa));
        let (c1, c2) = (
            model_side(kappa, a, b, g1.min(g2)).unwrap(),
            model_side(kappa, a, b, g1.max(g2)).unwrap(),
        );
        let (x, y) = (model_angle(kappa, a, b, c1).unwrap(), model_angle(kappa, a, b, c2).unwrap());
        prop_assert!(x <= y + 1e-12);
    }

    #[test]
    fn angle_is_nondecreasing_in_kappa(
        k1 in -4.0..4.0f64,
        k2 in -4.0..4.0f64,
        pts in [point(), point(), point()],
    ) {
        // a Euclidean triangle scaled into the domain of both curvatures
        let (lo, hi) = (k1.min(k2), k1.max(k2));
        let d = |i: usize, j: usize| (pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]);
        let (a, b, c) = (d(0, 1), d(0, 2), d(1, 2));
        let scale = 0.9 * model_diameter(hi) / (a + b + c).max(1e-9);
        let scale = scale.min(1.0);
        let (a, b, c) = (a * scale, b * scale, c * scale);
        if let (Some(x), Some(y)) = (model_angle(lo, a, b, c), model_angle(hi, a, b, c)) {
            prop_assert!(x <= y + 1e-9, "{lo} {hi}: {x} > {y}");
        }
    }

    #[test]
    fn small_curvature_is_nearly_flat(
        kappa in -1e-6..1e-6f64,
        a in 0.0..1.0f64,
        b in 0.0..1.0f64,
        gamma in 0.0..PI,
    ) {
        let d = model_side(kappa, a, b, gamma).unwrap() - model_side(0.0, a, b, gamma).unwrap();
        prop_assert!(d.abs() <= 1e-4);
    }

    #[test]
    fn comparison_ignores_the_order_of_the_triple(
        kappa in -2.0..0.5f64,
        pts in [point(), point(), point(), point()],
    ) {
        let (px, xx) = planar_distances(&pts);
        let v = quadruple_check(kappa, px, xx, BASE_TOLERANCE).unwrap();
        // (x2, x1, x3) and (x2, x3, x1)
        let swapped = quadruple_check(kappa, [px[1], px[0], px[2]], [xx[0], xx[2], xx[1]], BASE_TOLERANCE).unwrap();
        let rotated = quadruple_check(kappa, [px[1], px[2], px[0]], [xx[1], xx[2], xx[0]], BASE_TOLERANCE).unwrap();
        for w in [swapped, rotated] {
            prop_assert_eq!(w.verdict, v.verdict);
            match (w.angle_sum, v.angle_sum) {
                (Some(x), Some(y)) => prop_assert!((x - y).abs() < 1e-9, "{x} vs {y}"),
                (x, y) => prop_assert_eq!(x, y),
            }
        }
    }

    #[test]
    fn verdicts_are_a_trichotomy(
        kappa in -4.0..4.0f64,
        pts in [point(), point(), point(), point()],
    ) {
        let (px, xx) = planar_distances(&pts);
        let v = quadruple_check(kappa, px, xx, BASE_TOLERANCE).unwrap();
        let defined = v.angles.iter().all(Option::is_some);
        match v.verdict {
            Verdict::Holds => prop_assert!(defined && v.angle_sum.unwrap() <= TAU + BASE_TOLERANCE),
            Verdict::HoldsUndefined => prop_assert!(!defined && v.angle_sum.is_none()),
            Verdict::Fails => prop_assert!(defined && v.excess > BASE_TOLERANCE),
        }
    }

    #[test]
    fn failures_persist_as_kappa_grows(
        k1 in -2.0..2.0f64,
        dk in 0.0..2.0f64,
        pts in [point(), point(), point(), point()],
        hub in any::<bool>(),
    ) {
        // a tripod-like star when `hub` is set, to get failures at all
        let (mut px, mut xx) = planar_distances(&pts);
        if hub {
            px = px.map(|d| 0.5 * d);
            xx = [px[0] + px[1], px[1] + px[2], px[2] + px[0]];
        }
        let v1 = quadruple_check(k1, px, xx, BASE_TOLERANCE).unwrap();
        let v2 = quadruple_check(k1 + dk, px, xx, BASE_TOLERANCE).unwrap();
        if v1.verdict == Verdict::Fails && v2.angles.iter().all(Option::is_some) {
            prop_assert_eq!(v2.verdict, Verdict::Fails);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn generated_samples_validate(kind in 0usize..6, n in 4usize..30, seed in 0u64..1000) {
        let kinds = [
            SpaceKind::Sphere,
            SpaceKind::Hemisphere,
            SpaceKind::Hyperbolic,
            SpaceKind::Cone,
            SpaceKind::Euclidean,
            SpaceKind::Disk,
        ];
        let s = generate_space(&spec(kinds[kind]).with_n(n).with_seed(seed)).unwrap();
        prop_assert!(s.validate().is_ok());
        let t = generate_space(&SpaceSpec::new(SpaceKind::Tripod)).unwrap();
        prop_assert!(t.validate().is_ok());
    }

    #[test]
    fn geodesics_reverse_to_the_same_vertices(kind in 0usize..4, i in 0usize..12, j in 0usize..12) {
        let spec = match kind {
            0 => SpaceSpec::new(SpaceKind::Sphere).with_n(12),
            1 => SpaceSpec::new(SpaceKind::Hyperbolic).with_n(12),
            2 => SpaceSpec::new(SpaceKind::Cone).with_total_angle(1.5 * PI).with_n(12),
            _ => SpaceSpec::new(SpaceKind::Tripod),
        };
        let s = generate_space(&spec.with_seed(2)).unwrap();
        prop_assume!(i != j && j < s.len());
        let (x, y) = (s.location(i), s.location(j));
        let Ok(g) = geodesic(&s, x, y, 0.05) else { return Ok(()) };
        let h = geodesic(&s, y, x, 0.05).unwrap();
        prop_assert_eq!(&g.vertices, &h.reversed().vertices);
        prop_assert!((g.length - h.length).abs() < 1e-12);
    }

    #[test]
    fn sub_geodesics_are_geodesics(i in 0usize..12, j in 0usize..12, t0 in 0.0..1.0f64, t1 in 0.0..1.0f64) {
        let s = generate_space(&SpaceSpec::new(SpaceKind::Hyperbolic).with_n(12).with_seed(3)).unwrap();
        prop_assume!(i != j);
        let g = geodesic(&s, s.location(i), s.location(j), 0.05).unwrap();
        let (a, b) = (t0.min(t1) * g.length, t0.max(t1) * g.length);
        let r = g.restrict(&s, a, b);
        prop_assert!((r.length - (b - a)).abs() <= r.error_bound + 1e-9);
        prop_assert!((r.polyline_length(&s) - r.length).abs() <= r.error_bound + 1e-9);
        prop_assert_eq!(r.error_bound, g.error_bound);
        prop_assert!(s.dist(r.start(), &g.point_at(&s, a)) < 1e-9);
    }

    #[test]
    fn completion_is_idempotent(kind in 0usize..3, n in 5usize..25, seed in 0u64..100) {
        let kind = [SpaceKind::Hemisphere, SpaceKind::Cone, SpaceKind::Disk][kind];
        let spec = spec(kind).with_n(n).with_seed(seed).with_variant(Variant::Incomplete);
        let once = completion(&generate_space(&spec).unwrap()).unwrap();
        let twice = completion(&once).unwrap();
        prop_assert_eq!(
            once.points.iter().map(|p| &p.id).collect::<Vec<_>>(),
            twice.points.iter().map(|p| &p.id).collect::<Vec<_>>()
        );
        prop_assert_eq!(once.distance_matrix(), twice.distance_matrix());
    }

    #[test]
    fn three_hinges_in_a_domain_sum_to_at_most_two_pi(
        lons in [0.0..TAU, 0.0..TAU, 0.0..TAU],
        colats in [0.2..0.5f64, 0.2..0.5f64, 0.2..0.5f64],
        hyperbolic in any::<bool>(),
    ) {
        let (s, kappa, p, ends): (_, _, _, Vec<Location>) = if hyperbolic {
            let s = generate_space(&SpaceSpec::new(SpaceKind::Hyperbolic).with_n(8)).unwrap();
            let ends = (0..3)
                .map(|k| {
                    let (r, f) = (colats[k], lons[k]);
                    Location::Hyperboloid([r.cosh(), r.sinh() * f.cos(), r.sinh() * f.sin()])
                })
                .collect();
            (s, -1.0, Location::Hyperboloid([1.0, 0.0, 0.0]), ends)
        } else {
            let ends = (0..3).map(|k| sph(colats[k], lons[k])).collect();
            (sphere(), 1.0, sph(0.0, 0.0), ends)
        };
        let mut total = 0.0;
        let mut slack = 0.0;
        for k in 0..3 {
            let h = Hinge::between(&s, &p, &ends[k], &ends[(k + 1) % 3], None, 0.02).unwrap();
            let est = hinge_angle(&s, &h, kappa).unwrap();
            prop_assert!(est.monotone, "{est:?}");
            total += est.angle;
            slack += budget(h.error_bound());
        }
        prop_assert!(total <= TAU + slack, "{total}");
    }

    #[test]
    fn radial_curves_are_parametrized_by_distance(
        colat in 0.05..0.3f64,
        lon in 0.0..TAU,
        big_r in 0.4..1.5f64,
        step in 0.02..0.1f64,
    ) {
        let s = sphere();
        let w = sph(0.0, 0.0);
        let opts = RadialOptions::new(1.0, step).without_domain_check();
        let c = radial_curve(&s, &w, &sph(colat, lon), big_r, &opts).unwrap();
        prop_assert!(c.parametrization_error(&s) <= 2.0 * step);
    }

    #[test]
    fn cradle_sequences_recompute_and_steps_have_length_epsilon(
        pts in [point(), point(), point()],
        epsilon in 0.05..0.3f64,
        on_sphere in any::<bool>(),
    ) {
        let (s, [p, q, w]) = if on_sphere {
            let loc = |x: [f64; 2]| sph(0.3 * x[0].abs(), x[1]);
            (sphere(), pts.map(loc))
        } else {
            (plane(), pts.map(Location::Plane))
        };
        let trace = cats_cradle(&s, &p, &q, &w, epsilon, &CradleOptions::new(60)).unwrap();
        let (ell, sums) = trace.recompute(&s);
        prop_assert_eq!(ell.len(), trace.ell.len());
        for (x, y) in ell.iter().zip(&trace.ell).chain(sums.iter().zip(&trace.s)) {
            prop_assert!((x - y).abs() <= 1e-12);
        }
        for pair in trace.vertices.windows(2) {
            let d = s.dist(&pair[0], &pair[1]);
            // the last step may stop at its target
            prop_assert!(d <= epsilon + 1e-9, "{d}");
        }
        let full = trace.vertices.windows(2).filter(|v| (s.dist(&v[0], &v[1]) - epsilon).abs() > 1e-9).count();
        prop_assert!(full <= 1);
    }

    #[test]
    fn key_lemma_with_zero_radius_is_the_triangle_inequality(a in 0.1..1.0f64, b in 0.1..1.0f64, y in -1.0..1.0f64) {
        // w on the segment [p q]: the model side is at distance 0 from w
        let s = plane();
        let (p, q, w) = (Location::Plane([-a, y]), Location::Plane([b, y]), Location::Plane([0.0, y]));
        let r = key_lemma_check(&s, &p, &q, &w, 0.0, &KeyLemmaOptions::default()).unwrap();
        prop_assert!(r.big_r.unwrap() < 1e-9, "{r:?}");
        prop_assert_eq!(r.verdict, KeyLemmaVerdict::Verified);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn chains_advance_and_tolerate_smaller_epsilon(lon in 0.0..TAU, len in 0.5..1.2f64, shrink in 0.1..0.9f64) {
        let s = sphere();
        let (p, q) = (sph(0.1, lon), sph(0.1 + len, lon));
        let g = geodesic(&s, &p, &q, 0.02).unwrap();
        let opts = ChainOptions::new(0.3);
        let eps = 0.2;
        for e in [eps, eps * shrink] {
            let chain = segment_chain(&s, &g, 1.0, e, &opts).unwrap();
            let d: Vec<f64> = chain.points.iter().map(|x| s.dist(&p, x)).collect();
            prop_assert!(d.windows(2).all(|w| w[1] > w[0]), "{d:?}");
            prop_assert!(d[1] < e);
            prop_assert!(chain.cover.recheck(&s).unwrap());
        }
    }
}
