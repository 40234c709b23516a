mod common;

use std::f64::consts::TAU;

use harmap::boundary::{
    lipschitz_approximate, mollify_step, probability_distance, BoundaryMap, BoundaryRepr,
};
use harmap::cat0::{hyperbolic, TargetPoint, TargetSpace};
use harmap::disk::{angular_distance, CircleMeasure};
use proptest::prelude::*;

use common::probability_distance_scan;

fn e1() -> TargetSpace {
    TargetSpace::euclidean(1).unwrap()
}

fn steps(cuts: &[f64], values: &[f64]) -> BoundaryMap {
    let mut cuts = cuts.to_vec();
    cuts.sort_by(f64::total_cmp);
    let values = values
        .iter()
        .map(|v| TargetPoint::euclidean(&[*v]))
        .collect();
    BoundaryMap::steps(e1(), &cuts, values).unwrap()
}

/// Step maps with one to five arcs, each at least 0.15 long.
fn step_map() -> impl Strategy<Value = BoundaryMap> {
    (1usize..6)
        .prop_flat_map(|n| {
            (
                0.0..TAU,
                prop::collection::vec(0.01..1.0f64, n),
                prop::collection::vec(-1.5..1.5f64, n),
            )
        })
        .prop_map(|(start, raw, v)| {
            let n = raw.len() as f64;
            let total: f64 = raw.iter().sum();
            let mut cuts = Vec::with_capacity(raw.len());
            let mut at = start;
            for r in &raw {
                cuts.push(at.rem_euclid(TAU));
                at += 0.15 + (TAU - 0.15 * n) * r / total;
            }
            steps(&cuts, &v)
        })
}

/// Pieces `(length, distance)` between consecutive breakpoints of two step maps.
fn pieces(a: &BoundaryMap, b: &BoundaryMap) -> Vec<(f64, f64)> {
    let mut cuts: Vec<f64> = a.jumps().into_iter().chain(b.jumps()).collect();
    if cuts.is_empty() {
        cuts.push(0.0);
    }
    cuts.sort_by(f64::total_cmp);
    (0..cuts.len())
        .map(|k| {
            let end = if k + 1 < cuts.len() {
                cuts[k + 1]
            } else {
                cuts[0] + TAU
            };
            let mid = 0.5 * (cuts[k] + end);
            (
                end - cuts[k],
                e1().distance(&a.eval(mid), &b.eval(mid)).unwrap(),
            )
        })
        .collect()
}

fn sigma0() -> CircleMeasure {
    CircleMeasure::uniform(256)
}

fn smooth_h2(level: u32) -> BoundaryMap {
    let n = 1 << level;
    let knots = (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            (
                t,
                TargetPoint::Hyperbolic(hyperbolic::from_polar(1.0 + 0.4 * (2.0 * t).cos(), t)),
            )
        })
        .collect();
    BoundaryMap::new(
        TargetSpace::hyperbolic(),
        BoundaryRepr::PiecewiseGeodesic(knots),
    )
    .unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn probability_distance_matches_level_scan(a in step_map(), b in step_map()) {
        let exact = probability_distance(&a, &b, &sigma0()).unwrap();
        prop_assert!((exact - probability_distance_scan(&pieces(&a, &b), 10_000)).abs() < 1e-12);
    }

    #[test]
    fn probability_distance_is_a_metric(a in step_map(), b in step_map(), c in step_map()) {
        let m = sigma0();
        let ab = probability_distance(&a, &b, &m).unwrap();
        prop_assert!((0.0..=1.0).contains(&ab));
        prop_assert!(probability_distance(&a, &a, &m).unwrap() == 0.0);
        prop_assert!((ab - probability_distance(&b, &a, &m).unwrap()).abs() < 1e-12);
        let via = probability_distance(&a, &c, &m).unwrap() + probability_distance(&c, &b, &m).unwrap();
        prop_assert!(ab <= via + 1e-12);
    }

    #[test]
    fn probability_distance_is_rotation_invariant(a in step_map(), b in step_map(), rot in 0.0..TAU) {
        let m = sigma0();
        let before = probability_distance(&a, &b, &m).unwrap();
        let after = probability_distance(&a.rotated(rot).unwrap(), &b.rotated(rot).unwrap(), &m).unwrap();
        prop_assert!((before - after).abs() < 1e-9);
    }

    #[test]
    fn mollification_only_changes_the_windows(
        a in step_map(), w in 1e-3..0.05f64, t in 0.0..TAU,
    ) {
        let m = mollify_step(&a, w).unwrap();
        let jumps = a.jumps();
        if jumps.iter().all(|&j| angular_distance(t, j) > w + 1e-9) {
            prop_assert!(e1().distance(&m.eval(t), &a.eval(t)).unwrap() < 1e-12);
        }
        // the windows carry all of the difference
        let bound = jumps.len() as f64 * 2.0 * w / TAU;
        prop_assert!(probability_distance(&a, &m, &sigma0()).unwrap() <= bound + 1e-12);
    }

    #[test]
    fn mollified_values_stay_between_the_arc_values(a in step_map(), w in 1e-3..0.05f64, t in 0.0..TAU) {
        let m = mollify_step(&a, w).unwrap();
        let vals: Vec<f64> = a.values().iter().map(|p| match p { TargetPoint::Euclidean(c) => c[0], _ => unreachable!() }).collect();
        let TargetPoint::Euclidean(c) = m.eval(t) else { unreachable!() };
        let lo = vals.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = vals.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        prop_assert!(c[0] >= lo - 1e-12 && c[0] <= hi + 1e-12);
    }

    #[test]
    fn geodesic_pieces_lie_on_geodesics(t in 0.0..TAU) {
        let phi = smooth_h2(3);
        let h = TargetSpace::hyperbolic();
        let BoundaryRepr::PiecewiseGeodesic(knots) = phi.repr() else { unreachable!() };
        let k = knots.iter().rposition(|k| k.0 <= t).unwrap();
        let (a, b) = (&knots[k].1, &knots[(k + 1) % knots.len()].1);
        let y = phi.eval(t);
        let sum = h.distance(a, &y).unwrap() + h.distance(&y, b).unwrap();
        prop_assert!((sum - h.distance(a, b).unwrap()).abs() < 1e-9);
    }
}

#[test]
fn lipschitz_approximations_converge() {
    let fine = smooth_h2(12);
    let h = TargetSpace::hyperbolic();
    let sup = |level| {
        let approx = lipschitz_approximate(&fine, level).unwrap();
        (0..2000)
            .map(|i| {
                let t = TAU * (i as f64 + 0.37) / 2000.0;
                h.distance(&approx.eval(t), &fine.eval(t)).unwrap()
            })
            .fold(0.0, f64::max)
    };
    let errs: Vec<f64> = (3..8).map(sup).collect();
    assert!(errs.windows(2).all(|w| w[1] < w[0]), "{errs:?}");
    // second-order interpolation error: roughly a factor 4 per level
    assert!(errs[4] < errs[0] / 50.0, "{errs:?}");
}

#[test]
fn lipschitz_approximation_rejects_jumps() {
    assert!(lipschitz_approximate(&steps(&[0.0, 1.0], &[0.0, 1.0]), 4).is_err());
    assert!(lipschitz_approximate(&steps(&[0.0], &[0.5]), 4).is_ok());
}

#[test]
fn mollifying_a_constant_map_changes_nothing() {
    let c = steps(&[1.0], &[0.5]);
    assert_eq!(mollify_step(&c, 0.1).unwrap(), c);
    assert!(mollify_step(&c, 0.0).is_err());
}

#[test]
fn distance_of_two_constants() {
    let m = sigma0();
    // pointwise distance 0.3 everywhere: σ{d ≥ δ} = 1 for δ ≤ 0.3, so the infimum is 0.3
    let d = probability_distance(&steps(&[0.0], &[0.0]), &steps(&[0.0], &[0.3]), &m).unwrap();
    assert!((d - 0.3).abs() < 1e-12);
    // pointwise distance 2 everywhere: capped by the total mass
    let d = probability_distance(&steps(&[0.0], &[0.0]), &steps(&[0.0], &[2.0]), &m).unwrap();
    assert!((d - 1.0).abs() < 1e-12);
}

#[test]
fn json_roundtrip_and_validation() {
    let phi = smooth_h2(3);
    let text = serde_json::to_string(&phi).unwrap();
    let back: BoundaryMap = serde_json::from_str(&text).unwrap();
    assert_eq!(back, phi);
    let bad = r#"{"target":{"kind":"euclidean","dim":1},"kind":"arcs","data":[[0.0,1.0,{"space":"euclidean","coords":[0.0]}],[2.0,0.0,{"space":"euclidean","coords":[1.0]}]]}"#;
    assert!(serde_json::from_str::<BoundaryMap>(bad).is_err());
    let wrong_dim = r#"{"target":{"kind":"euclidean","dim":2},"kind":"samples","data":[{"space":"euclidean","coords":[0.0]}]}"#;
    assert!(serde_json::from_str::<BoundaryMap>(wrong_dim).is_err());
}
