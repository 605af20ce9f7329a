use monotone_core::catalog::{self, regular_catalog};
use monotone_core::enlargements::{enlargement_membership, EnlargementKind, EnlargementQuery, GraphSource};
use monotone_core::geometry::{direction_grid, polyhedron_is_empty_lp};
use monotone_core::operators::{monotone_related, validate_monotone};
use monotone_core::slope::{image_distance, slope_enlarged, slope_estimate, slope_exact};
use monotone_core::{rng, ConvexSet, ExtReal, GraphPoint, GraphSample, Halfspace, Matrix, OperatorSpec, Vector};
use proptest::prelude::*;

fn v(c: &[f64]) -> Vector {
    Vector::new(c).unwrap()
}

fn coord() -> impl Strategy<Value = f64> {
    -3.0..3.0f64
}

fn vec2() -> impl Strategy<Value = Vector> {
    (coord(), coord()).prop_map(|(a, b)| v(&[a, b]))
}

fn test_sets() -> impl Strategy<Value = ConvexSet> {
    prop_oneof![
        (vec2(), 0.1..2.0f64).prop_map(|(c, r)| ConvexSet::ball(c, r).unwrap()),
        (vec2(), 0.1..2.0f64, 0.1..2.0f64)
            .prop_map(|(lo, a, b)| ConvexSet::cuboid(lo, lo + v(&[a, b])).unwrap()),
        prop::collection::vec(vec2(), 1..6).prop_map(|pts| ConvexSet::polytope(pts).unwrap()),
    ]
}

/// A finite monotone graph: the graph of `x -> A x` on a few points,
/// `A` positive semidefinite plus a skew part.
fn monotone_graph() -> impl Strategy<Value = GraphSample> {
    (0.0..2.0f64, 0.0..2.0f64, -2.0..2.0f64, prop::collection::vec(vec2(), 1..8)).prop_map(|(a, d, s, ys)| {
        let m = Matrix::from_rows(&[vec![a, s], vec![-s, d]]).unwrap();
        let points = ys
            .into_iter()
            .map(|y| GraphPoint::new(y, m.apply(&y)).unwrap())
            .collect();
        GraphSample::finite(points).unwrap()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn contains_iff_distance_is_zero(set in test_sets(), p in vec2()) {
        let d = set.distance(&p).unwrap();
        let inside = set.contains(&p, 0.0).unwrap();
        if inside {
            prop_assert!(d.le(1e-9), "{d:?}");
        } else {
            prop_assert!(!d.le(0.0), "{d:?}");
        }
    }

    #[test]
    fn projection_is_nearest_member(set in test_sets(), p in vec2()) {
        let q = set.project(&p).unwrap().unwrap();
        prop_assert!(set.contains(&q, 1e-7).unwrap());
        let ExtReal::Finite(d) = set.distance(&p).unwrap() else {
            return Err(TestCaseError::fail("infinite distance to a nonempty set"));
        };
        prop_assert!((d - p.dist(&q)).abs() < 1e-7);
    }

    #[test]
    fn ball_sum_support_grows_by_radius(set in test_sets(), r in 0.0..2.0f64, k in 0usize..16) {
        let u = direction_grid(2, 16)[k];
        let base = set.support(&u).unwrap();
        let grown = set.minkowski_ball(r).unwrap().support(&u).unwrap();
        match (base, grown) {
            (ExtReal::Finite(a), ExtReal::Finite(b)) => prop_assert!((b - a - r).abs() < 1e-9),
            other => prop_assert!(false, "unexpected {other:?}"),
        }
    }

    #[test]
    fn ball_sum_is_monotone_in_radius(set in test_sets(), r in 0.0..1.0f64, extra in 0.0..1.0f64, p in vec2()) {
        let small = set.minkowski_ball(r).unwrap();
        let large = set.minkowski_ball(r + extra).unwrap();
        if small.contains(&p, 0.0).unwrap() {
            prop_assert!(large.contains(&p, 1e-12).unwrap());
        }
    }

    #[test]
    fn elimination_agrees_with_linear_programming(
        rows in prop::collection::vec((vec2(), -2.0..2.0f64), 1..7)
    ) {
        // Bounded to [-4, 4]^2 so a grid can witness nonemptiness.
        let mut cs: Vec<Halfspace> = rows.iter().map(|(n, b)| Halfspace::new(*n, *b)).collect();
        for (n, b) in [([1.0, 0.0], -4.0), ([-1.0, 0.0], -4.0), ([0.0, 1.0], -4.0), ([0.0, -1.0], -4.0)] {
            cs.push(Halfspace::new(v(&n), b));
        }
        let fm = ConvexSet::halfspaces(2, cs.clone()).unwrap().is_empty().unwrap();
        let lp = polyhedron_is_empty_lp(2, &cs).unwrap();
        let grid_hit = (0..=80).any(|i| (0..=80).any(|j| {
            let w = v(&[-4.0 + 0.1 * i as f64, -4.0 + 0.1 * j as f64]);
            cs.iter().all(|h| h.satisfied_by(&w))
        }));
        if grid_hit {
            prop_assert!(!fm && !lp);
        }
        // A gross disagreement would show on a strictly feasible system.
        let slack: Vec<Halfspace> = cs.iter().map(|h| Halfspace::new(h.normal, h.offset + 1e-6)).collect();
        let strict = !polyhedron_is_empty_lp(2, &slack).unwrap();
        if strict {
            prop_assert!(!fm);
        }
    }

    #[test]
    fn resolvent_is_firmly_nonexpansive(k in 0usize..7, a in vec2(), b in vec2()) {
        let e = &regular_catalog()[k];
        let (a, b) = if e.dim == 1 { (v(&[a.as_slice()[0]]), v(&[b.as_slice()[0]])) } else { (a, b) };
        let pa = e.operator.resolvent_point(&a).unwrap();
        let pb = e.operator.resolvent_point(&b).unwrap();
        prop_assert!((pa.y + pa.ystar).dist(&a) < 1e-9);
        prop_assert!(e.operator.evaluate(&pa.y).unwrap().contains(&pa.ystar, 1e-7).unwrap());
        let dy = pa.y - pb.y;
        prop_assert!(dy.dot(&dy) <= dy.dot(&(a - b)) + 1e-9);
    }

    #[test]
    fn slope_never_exceeds_distance(k in 0usize..7, seed in any::<u64>()) {
        let e = &regular_catalog()[k];
        let mut r = rng::stream(seed, 0);
        let (x, xs) = catalog::random_query(&e.operator, e.dim, &mut r).unwrap();
        let l = slope_estimate(&e.operator, &x, &xs, 1e-4).unwrap().value;
        let d = image_distance(&e.operator, &x, &xs).unwrap();
        if let ExtReal::Finite(dv) = d {
            prop_assert!(l.le(dv + 1e-9), "L {l:?} > d {d:?}");
        }
    }

    #[test]
    fn zero_slope_iff_monotonically_related(g in monotone_graph(), x in vec2(), xs in vec2()) {
        let l = slope_exact(&g, &x, &xs).unwrap().value;
        let (related, _) = monotone_related(&x, &xs, &g, 0.0).unwrap();
        match l {
            ExtReal::Finite(lv) => prop_assert_eq!(lv == 0.0, related),
            ExtReal::PosInf => prop_assert!(!related),
        }
    }

    #[test]
    fn finite_graph_slope_matches_exact(g in monotone_graph(), x in vec2(), xs in vec2()) {
        let t = OperatorSpec::finite_graph(g.clone()).unwrap();
        prop_assert_eq!(slope_estimate(&t, &x, &xs, 1e-6).unwrap().value, slope_exact(&g, &x, &xs).unwrap().value);
    }

    #[test]
    fn sampled_graphs_are_monotone(k in 0usize..7, r in 0.5..4.0f64) {
        let e = &regular_catalog()[k];
        let h = if e.dim == 1 { r / 50.0 } else { r / 8.0 };
        let sample = e.operator.sample_graph(e.dim, r, h).unwrap();
        let verdict = validate_monotone(&sample);
        prop_assert!(verdict.holds, "{verdict:?}");
    }

    #[test]
    fn enlargements_are_nested(
        g in monotone_graph(), x in vec2(), xs in vec2(), eps in 0.0..2.0f64, extra in 0.0..2.0f64
    ) {
        for kind in [EnlargementKind::NormWeighted, EnlargementKind::Constant] {
            let q = EnlargementQuery::new(kind, eps, x, 1.0, 1.0).unwrap();
            let wider = EnlargementQuery::new(kind, eps + extra, x, 1.0, 1.0).unwrap();
            let (inner, _) = enlargement_membership(GraphSource::Sample(&g), &q, &xs).unwrap();
            let (outer, _) = enlargement_membership(GraphSource::Sample(&g), &wider, &xs).unwrap();
            prop_assert!(!inner || outer);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn enlarged_slope_is_shifted_distance(k in 0usize..7, eps in 0.0..1.5f64, seed in any::<u64>()) {
        let e = &regular_catalog()[k];
        let mut r = rng::stream(seed, 1);
        let (x, xs) = catalog::domain_query(&e.operator, e.dim, &mut r).unwrap();
        let l = slope_enlarged(&e.operator, eps, &x, &xs, 1e-4).unwrap().value;
        match image_distance(&e.operator, &x, &xs).unwrap() {
            ExtReal::Finite(d) => {
                let ExtReal::Finite(lv) = l else { return Err(TestCaseError::fail("infinite slope on the domain")) };
                prop_assert!((lv - (d - eps).max(0.0)).abs() <= 1e-3, "L {lv} d {d} eps {eps}");
            }
            ExtReal::PosInf => prop_assert_eq!(l, ExtReal::PosInf),
        }
    }
}
