mod common;

use std::f64::consts::TAU;

use harmap::cat0::{
    hyperbolic, GeodesicSegment, TargetPoint, TargetSpace, TreeEdge, TreePoint, TreeShape,
    WeightVector,
};
use proptest::prelude::*;

use common::{hyperbolic_coords, hyperbolic_grid_barycenter, tree_barycenter_scan};

fn tree() -> TreeShape {
    let e = |u, v, length| TreeEdge { u, v, length };
    TreeShape::new(
        6,
        vec![
            e(0, 1, 1.0),
            e(1, 2, 0.5),
            e(1, 3, 2.0),
            e(0, 4, 0.8),
            e(4, 5, 1.2),
        ],
    )
    .unwrap()
}

fn spaces() -> Vec<TargetSpace> {
    vec![
        TargetSpace::euclidean(3).unwrap(),
        TargetSpace::hyperbolic(),
        TargetSpace::tree(tree()),
    ]
}

/// A point of `space` from three uniform numbers in `[0, 1)`.
fn point(space: &TargetSpace, u: [f64; 3]) -> TargetPoint {
    match space.kind_name() {
        "hyperbolic" => TargetPoint::Hyperbolic(hyperbolic::from_polar(2.0 * u[0], TAU * u[1])),
        "tree" => {
            let t = space.tree_shape().unwrap();
            let edge = ((u[0] * t.edges().len() as f64) as usize).min(t.edges().len() - 1);
            TargetPoint::Tree(TreePoint {
                edge,
                offset: u[1] * t.edges()[edge].length,
            })
        }
        _ => TargetPoint::euclidean(&[4.0 * u[0] - 2.0, 4.0 * u[1] - 2.0, 4.0 * u[2] - 2.0]),
    }
}

fn unit3() -> impl Strategy<Value = [f64; 3]> {
    [0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(96))]

    #[test]
    fn metric_axioms(k in 0usize..3, a in unit3(), b in unit3(), c in unit3()) {
        let s = &spaces()[k];
        let (p, q, r) = (point(s, a), point(s, b), point(s, c));
        let pq = s.distance(&p, &q).unwrap();
        prop_assert!(pq >= 0.0);
        prop_assert!(s.distance(&p, &p).unwrap() < 1e-12);
        prop_assert!((pq - s.distance(&q, &p).unwrap()).abs() < 1e-12);
        prop_assert!(pq <= s.distance(&p, &r).unwrap() + s.distance(&r, &q).unwrap() + 1e-12);
    }

    #[test]
    fn geodesics_are_constant_speed(k in 0usize..3, a in unit3(), b in unit3(), t in 0.0..1.0f64) {
        let s = &spaces()[k];
        let (p, q) = (point(s, a), point(s, b));
        let seg = GeodesicSegment::new(s, p.clone(), q.clone()).unwrap();
        let m = seg.point(s, t).unwrap();
        let d = s.distance(&p, &q).unwrap();
        prop_assert!((s.distance(&p, &m).unwrap() - t * d).abs() < 1e-9);
        prop_assert!((s.distance(&m, &q).unwrap() - (1.0 - t) * d).abs() < 1e-9);
        // reversing the segment gives the same point
        let back = s.geodesic_point(&q, &p, 1.0 - t).unwrap();
        prop_assert!(s.distance(&m, &back).unwrap() < 1e-9);
    }

    #[test]
    fn comparison_inequality(
        k in 0usize..3, a in unit3(), b in unit3(), c in unit3(), s1 in 0.0..1.0f64, t1 in 0.0..1.0f64,
    ) {
        let s = &spaces()[k];
        let check = s.cat0_comparison_check(&point(s, a), &point(s, b), &point(s, c), s1, t1).unwrap();
        prop_assert!(check.holds, "slack {}", check.slack);
    }

    #[test]
    fn distance_to_a_point_is_convex_along_geodesics(
        k in 0usize..3, a in unit3(), b in unit3(), c in unit3(), t in 0.0..1.0f64,
    ) {
        let s = &spaces()[k];
        let (p, q, y) = (point(s, a), point(s, b), point(s, c));
        let m = s.geodesic_point(&p, &q, t).unwrap();
        let lhs = s.distance(&y, &m).unwrap();
        let rhs = (1.0 - t) * s.distance(&y, &p).unwrap() + t * s.distance(&y, &q).unwrap();
        prop_assert!(lhs <= rhs + 1e-9);
    }

    #[test]
    fn barycenter_is_lipschitz_in_the_points(
        k in 0usize..3,
        pts in prop::collection::vec(unit3(), 4),
        moved in prop::collection::vec(unit3(), 4),
        raw in prop::collection::vec(0.05..1.0f64, 4),
    ) {
        let s = &spaces()[k];
        let mu = WeightVector::normalized(&raw).unwrap();
        let p: Vec<_> = pts.iter().map(|u| point(s, *u)).collect();
        let q: Vec<_> = moved.iter().map(|u| point(s, *u)).collect();
        let (bp, bq) = (s.barycenter(&p, &mu).unwrap(), s.barycenter(&q, &mu).unwrap());
        let bound: f64 = p.iter().zip(&q).zip(mu.as_slice())
            .map(|((x, y), w)| w * s.distance(x, y).unwrap())
            .sum();
        prop_assert!(s.distance(&bp, &bq).unwrap() <= bound + 1e-7);
    }

    #[test]
    fn barycenter_satisfies_jensen_for_distance_functions(
        k in 0usize..3,
        pts in prop::collection::vec(unit3(), 5),
        raw in prop::collection::vec(0.05..1.0f64, 5),
        y in unit3(),
    ) {
        let s = &spaces()[k];
        let mu = WeightVector::normalized(&raw).unwrap();
        let p: Vec<_> = pts.iter().map(|u| point(s, *u)).collect();
        let y = point(s, y);
        let b = s.barycenter(&p, &mu).unwrap();
        let mean: f64 = p.iter().zip(mu.as_slice()).map(|(x, w)| w * s.distance(&y, x).unwrap()).sum();
        prop_assert!(s.distance(&y, &b).unwrap() <= mean + 1e-7);
    }

    #[test]
    fn tree_barycenter_matches_edge_scan(
        pts in prop::collection::vec(unit3(), 1..7),
        raw in prop::collection::vec(0.05..1.0f64, 7),
    ) {
        let s = TargetSpace::tree(tree());
        let shape = s.tree_shape().unwrap();
        let mu = WeightVector::normalized(&raw[..pts.len()]).unwrap();
        let p: Vec<_> = pts.iter().map(|u| point(&s, *u)).collect();
        let tp: Vec<TreePoint> = p.iter().map(|x| match x { TargetPoint::Tree(t) => *t, _ => unreachable!() }).collect();
        let (oracle, psi) = tree_barycenter_scan(shape, &tp, mu.as_slice());
        let b = s.barycenter(&p, &mu).unwrap();
        prop_assert!(s.distance(&b, &TargetPoint::Tree(oracle)).unwrap() < 1e-9);
        prop_assert!((s.weighted_sq_distance(&p, &mu, &b).unwrap() - psi).abs() < 1e-12);
    }

    #[test]
    fn lip1_embedding_is_isometric_on_probe_sets_containing_the_pair(
        k in 0usize..3, a in unit3(), b in unit3(), c in unit3(),
    ) {
        let s = &spaces()[k];
        let (p, q) = (point(s, a), point(s, b));
        let probes = vec![point(s, c), p.clone(), q.clone()];
        prop_assert!(s.lip1_embedding_gap(&probes, &p, &q).unwrap() < 1e-12);
    }
}

#[test]
fn hyperbolic_barycenter_matches_grid_search() {
    let h = TargetSpace::hyperbolic();
    let cases: [(&[(f64, f64)], &[f64]); 3] = [
        (&[(1.0, 0.0), (1.0, 2.0), (1.0, 4.0)], &[1.0, 1.0, 1.0]),
        (
            &[(2.4, 0.3), (0.2, 1.0), (1.9, 3.5), (2.2, 5.0)],
            &[0.1, 0.2, 0.3, 0.4],
        ),
        (&[(0.5, 0.0), (2.5, 3.1)], &[0.8, 0.2]),
    ];
    for (polar, raw) in cases {
        let pts: Vec<TargetPoint> = polar
            .iter()
            .map(|&(r, t)| TargetPoint::Hyperbolic(hyperbolic::from_polar(r, t)))
            .collect();
        let mu = WeightVector::normalized(raw).unwrap();
        let b = h.barycenter(&pts, &mu).unwrap();
        let coords: Vec<[f64; 3]> = pts.iter().map(hyperbolic_coords).collect();
        let oracle = hyperbolic_grid_barycenter(&coords, mu.as_slice());
        assert!(hyperbolic::distance(&hyperbolic_coords(&b), &oracle) < 1e-4);
    }
}

#[test]
fn two_point_barycenter_lies_on_the_geodesic() {
    for s in spaces() {
        let p = point(&s, [0.1, 0.2, 0.3]);
        let q = point(&s, [0.8, 0.7, 0.9]);
        let mu = WeightVector::new(vec![0.25, 0.75]).unwrap();
        let b = s.barycenter(&[p.clone(), q.clone()], &mu).unwrap();
        let expected = s.geodesic_point(&p, &q, 0.75).unwrap();
        assert!(
            s.distance(&b, &expected).unwrap() < 1e-9,
            "{}",
            s.kind_name()
        );
    }
}

#[test]
fn mismatched_points_are_rejected() {
    let e = TargetSpace::euclidean(2).unwrap();
    let h = TargetPoint::Hyperbolic(hyperbolic::from_polar(0.5, 0.0));
    assert!(e
        .distance(&TargetPoint::euclidean(&[0.0, 0.0]), &h)
        .is_err());
    assert!(e.validate(&TargetPoint::euclidean(&[0.0])).is_err());
    let t = TargetSpace::tree(tree());
    assert!(t
        .validate(&TargetPoint::Tree(TreePoint {
            edge: 9,
            offset: 0.0
        }))
        .is_err());
    assert!(WeightVector::new(vec![0.5, 0.6]).is_err());
    assert!(WeightVector::new(vec![-0.5, 1.5]).is_err());
}
