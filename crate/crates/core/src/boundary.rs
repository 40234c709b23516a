//! Boundary maps from the circle into a target space.
//!
//! Three representations: piecewise constant on half-open arcs `[start, end)`, piecewise
//! geodesic through knots, and uniform samples with geodesic interpolation between grid
//! angles. Also the convergence-in-probability distance between two maps, Lipschitz
//! approximation by uniform knots, and mollification of step data near its jumps.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::cat0::{TargetPoint, TargetSpace};
use crate::disk::{arc_length, validate_partition, wrap_angle, CircleMeasure, ScalarBoundary};
use crate::error::{Error, Result};
use crate::mesh::DiskMesh;

/// Bisection tolerance on `δ` in [`probability_distance`].
pub const PROBABILITY_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq)]
pub enum BoundaryRepr {
    /// `(θ_start, θ_end, value)`, counter-clockwise, tiling the circle in order.
    PiecewiseConstant(Vec<(f64, f64, TargetPoint)>),
    /// `(θ, value)` with strictly increasing angles in `[0, 2π)`; wraps around.
    PiecewiseGeodesic(Vec<(f64, TargetPoint)>),
    /// Values at `θ_j = 2πj/n`.
    Sampled(Vec<TargetPoint>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MapJson", into = "MapJson")]
pub struct BoundaryMap {
    target: TargetSpace,
    repr: BoundaryRepr,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum KindJson {
    Arcs,
    Geodesic,
    Samples,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapJson {
    target: TargetSpace,
    kind: KindJson,
    data: serde_json::Value,
}

impl TryFrom<MapJson> for BoundaryMap {
    type Error = Error;

    fn try_from(raw: MapJson) -> Result<Self> {
        let repr = match raw.kind {
            KindJson::Arcs => BoundaryRepr::PiecewiseConstant(serde_json::from_value(raw.data)?),
            KindJson::Geodesic => {
                BoundaryRepr::PiecewiseGeodesic(serde_json::from_value(raw.data)?)
            }
            KindJson::Samples => BoundaryRepr::Sampled(serde_json::from_value(raw.data)?),
        };
        BoundaryMap::new(raw.target, repr)
    }
}

impl From<BoundaryMap> for MapJson {
    fn from(m: BoundaryMap) -> Self {
        let (kind, data) = match m.repr {
            BoundaryRepr::PiecewiseConstant(a) => (KindJson::Arcs, serde_json::to_value(a)),
            BoundaryRepr::PiecewiseGeodesic(k) => (KindJson::Geodesic, serde_json::to_value(k)),
            BoundaryRepr::Sampled(s) => (KindJson::Samples, serde_json::to_value(s)),
        };
        MapJson {
            target: m.target,
            kind,
            data: data.expect("target points serialize"),
        }
    }
}

impl BoundaryMap {
    pub fn new(target: TargetSpace, repr: BoundaryRepr) -> Result<Self> {
        let values: Vec<&TargetPoint> = match &repr {
            BoundaryRepr::PiecewiseConstant(arcs) => {
                validate_partition(&arcs.iter().map(|a| (a.0, a.1)).collect::<Vec<_>>())?;
                arcs.iter().map(|a| &a.2).collect()
            }
            BoundaryRepr::PiecewiseGeodesic(knots) => {
                if knots.is_empty() {
                    return Err(Error::invalid(
                        "piecewise-geodesic map needs at least one knot",
                    ));
                }
                for w in knots.windows(2) {
                    if !(w[0].0 < w[1].0) {
                        return Err(Error::invalid("knot angles must be strictly increasing"));
                    }
                }
                if knots.iter().any(|k| !(0.0..TAU).contains(&k.0)) {
                    return Err(Error::invalid("knot angles must lie in [0, 2π)"));
                }
                knots.iter().map(|k| &k.1).collect()
            }
            BoundaryRepr::Sampled(s) => {
                if s.is_empty() {
                    return Err(Error::invalid("sampled map needs at least one sample"));
                }
                s.iter().collect()
            }
        };
        for v in values {
            target.validate(v)?;
        }
        Ok(BoundaryMap { target, repr })
    }

    pub fn constant(target: TargetSpace, value: TargetPoint) -> Result<Self> {
        BoundaryMap::new(
            target,
            BoundaryRepr::PiecewiseConstant(vec![(0.0, 0.0, value)]),
        )
    }

    /// Step map taking `values[i]` on `[cuts[i], cuts[i+1])`, cyclically.
    pub fn steps(target: TargetSpace, cuts: &[f64], values: Vec<TargetPoint>) -> Result<Self> {
        if cuts.len() != values.len() || cuts.is_empty() {
            return Err(Error::invalid("need one value per cut"));
        }
        let n = cuts.len();
        let arcs = values
            .into_iter()
            .enumerate()
            .map(|(i, v)| (cuts[i], cuts[(i + 1) % n], v))
            .collect();
        BoundaryMap::new(target, BoundaryRepr::PiecewiseConstant(arcs))
    }

    pub fn target(&self) -> &TargetSpace {
        &self.target
    }

    pub fn repr(&self) -> &BoundaryRepr {
        &self.repr
    }

    pub fn kind_name(&self) -> &'static str {
        match self.repr {
            BoundaryRepr::PiecewiseConstant(_) => "arcs",
            BoundaryRepr::PiecewiseGeodesic(_) => "geodesic",
            BoundaryRepr::Sampled(_) => "samples",
        }
    }

    pub fn is_continuous(&self) -> bool {
        !matches!(self.repr, BoundaryRepr::PiecewiseConstant(_)) || self.jumps().is_empty()
    }

    /// The values that define the map: arc values, knot values or samples.
    pub fn values(&self) -> Vec<TargetPoint> {
        match &self.repr {
            BoundaryRepr::PiecewiseConstant(a) => a.iter().map(|x| x.2.clone()).collect(),
            BoundaryRepr::PiecewiseGeodesic(k) => k.iter().map(|x| x.1.clone()).collect(),
            BoundaryRepr::Sampled(s) => s.clone(),
        }
    }

    /// Diameter of [`values`](Self::values); bounds the diameter of the image.
    pub fn diameter(&self) -> Result<f64> {
        self.target.diameter_of(&self.values())
    }

    /// Angles where a step map changes value.
    pub fn jumps(&self) -> Vec<f64> {
        match &self.repr {
            BoundaryRepr::PiecewiseConstant(arcs) if arcs.len() > 1 => (0..arcs.len())
                .filter(|&i| arcs[i].2 != arcs[(i + arcs.len() - 1) % arcs.len()].2)
                .map(|i| wrap_angle(arcs[i].0))
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn eval(&self, theta: f64) -> TargetPoint {
        let t = wrap_angle(theta);
        match &self.repr {
            BoundaryRepr::PiecewiseConstant(arcs) => arcs
                .iter()
                .find(|a| wrap_angle(t - a.0) < arc_length(a.0, a.1))
                // rounding can leave t just outside every arc; take the closest start
                .unwrap_or_else(|| {
                    arcs.iter()
                        .min_by(|a, b| wrap_angle(t - a.0).total_cmp(&wrap_angle(t - b.0)))
                        .expect("validated nonempty")
                })
                .2
                .clone(),
            BoundaryRepr::PiecewiseGeodesic(knots) => {
                let n = knots.len();
                if n == 1 {
                    return knots[0].1.clone();
                }
                let k = match knots.iter().rposition(|k| k.0 <= t) {
                    Some(k) => k,
                    None => n - 1,
                };
                let (a, b) = (&knots[k], &knots[(k + 1) % n]);
                let span = wrap_angle(b.0 - a.0);
                let s = (wrap_angle(t - a.0) / span).clamp(0.0, 1.0);
                self.target
                    .geodesic_point(&a.1, &b.1, s)
                    .expect("validated knot values")
            }
            BoundaryRepr::Sampled(v) => {
                let n = v.len();
                let u = t / TAU * n as f64;
                let j = (u.floor() as usize).min(n - 1);
                let s = (u - j as f64).clamp(0.0, 1.0);
                self.target
                    .geodesic_point(&v[j], &v[(j + 1) % n], s)
                    .expect("validated samples")
            }
        }
    }

    /// Values at the boundary ring of `mesh`.
    pub fn boundary_values(&self, mesh: &DiskMesh) -> Vec<TargetPoint> {
        mesh.boundary_angles()
            .iter()
            .map(|&t| self.eval(t))
            .collect()
    }

    /// Angles where the representation changes piece, sorted in `[0, 2π)`.
    fn breakpoints(&self) -> Vec<f64> {
        match &self.repr {
            BoundaryRepr::PiecewiseConstant(a) if a.len() > 1 => {
                a.iter().map(|x| wrap_angle(x.0)).collect()
            }
            BoundaryRepr::PiecewiseGeodesic(k) if k.len() > 1 => k.iter().map(|x| x.0).collect(),
            BoundaryRepr::Sampled(s) if s.len() > 1 => (0..s.len())
                .map(|j| TAU * j as f64 / s.len() as f64)
                .collect(),
            _ => Vec::new(),
        }
    }

    /// Scalar view of a step or sampled map into one-dimensional Euclidean space.
    pub fn to_scalar(&self) -> Result<ScalarBoundary> {
        let coord = |p: &TargetPoint| match p {
            TargetPoint::Euclidean(c) if c.len() == 1 => Ok(c[0]),
            _ => Err(Error::invalid(
                "scalar view needs a one-dimensional euclidean target",
            )),
        };
        match &self.repr {
            BoundaryRepr::PiecewiseConstant(a) => Ok(ScalarBoundary::Arcs(
                a.iter()
                    .map(|x| Ok((x.0, x.1, coord(&x.2)?)))
                    .collect::<Result<_>>()?,
            )),
            BoundaryRepr::Sampled(s) => Ok(ScalarBoundary::Samples(
                s.iter().map(coord).collect::<Result<_>>()?,
            )),
            BoundaryRepr::PiecewiseGeodesic(_) => Err(Error::invalid(
                "scalar view of piecewise-geodesic data is not supported",
            )),
        }
    }

    /// Rotate the data: the result at `θ` is `self` at `θ − angle`.
    pub fn rotated(&self, angle: f64) -> Result<Self> {
        let repr = match &self.repr {
            BoundaryRepr::PiecewiseConstant(a) => BoundaryRepr::PiecewiseConstant(
                a.iter()
                    .map(|x| {
                        (
                            wrap_angle(x.0 + angle),
                            wrap_angle(x.1 + angle),
                            x.2.clone(),
                        )
                    })
                    .collect(),
            ),
            BoundaryRepr::PiecewiseGeodesic(k) => {
                let mut k: Vec<_> = k
                    .iter()
                    .map(|x| (wrap_angle(x.0 + angle), x.1.clone()))
                    .collect();
                k.sort_by(|a, b| a.0.total_cmp(&b.0));
                BoundaryRepr::PiecewiseGeodesic(k)
            }
            BoundaryRepr::Sampled(_) => {
                return Err(Error::invalid(
                    "sampled maps can only be rotated by resampling",
                ));
            }
        };
        BoundaryMap::new(self.target.clone(), repr)
    }
}

/// One piece of the common refinement, on which the pointwise distance is convex.
struct Piece {
    start: f64,
    len: f64,
    /// `ψ` at the start, at the minimizer, and at the end
    at_start: f64,
    at_min: f64,
    argmin: f64,
    at_end: f64,
    constant: bool,
}

fn golden_min(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> (f64, f64) {
    let g = 0.5 * (5f64.sqrt() - 1.0);
    let mut c = b - g * (b - a);
    let mut d = a + g * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..90 {
        if b - a < 1e-15 * (1.0 + a.abs()) {
            break;
        }
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - g * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + g * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Crossing of `f = level` in `[a, b]` for monotone `f`, `f(a) ≥ level > f(b)` when
/// `decreasing`, or the mirror case.
fn crossing(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, level: f64, decreasing: bool) -> f64 {
    for _ in 0..100 {
        let m = 0.5 * (a + b);
        if m <= a || m >= b {
            break;
        }
        let above = f(m) >= level;
        if above == decreasing {
            a = m;
        } else {
            b = m;
        }
    }
    0.5 * (a + b)
}

/// `inf{δ ≥ 0 : σ(d(φ, φ′) ≥ δ) ≤ δ}`.
///
/// The circle is cut at the breakpoints of both maps; on each piece both maps are
/// geodesics with linear parameters, so the pointwise distance is convex there and every
/// level set is found by a minimum search plus two bisections. The outer bisection on `δ`
/// stops at [`PROBABILITY_TOL`].
pub fn probability_distance(
    phi: &BoundaryMap,
    phi_prime: &BoundaryMap,
    measure: &CircleMeasure,
) -> Result<f64> {
    if phi.target != phi_prime.target {
        return Err(Error::invalid("boundary maps have different targets"));
    }
    let space = &phi.target;
    let mut cuts: Vec<f64> = phi.breakpoints();
    cuts.extend(phi_prime.breakpoints());
    cuts.sort_by(f64::total_cmp);
    cuts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
    if cuts.is_empty() {
        cuts.push(0.0);
    }
    let psi = |t: f64| {
        space
            .distance(&phi.eval(t), &phi_prime.eval(t))
            .expect("same target")
    };
    let both_steps = matches!(phi.repr, BoundaryRepr::PiecewiseConstant(_))
        && matches!(phi_prime.repr, BoundaryRepr::PiecewiseConstant(_));

    let mut pieces = Vec::with_capacity(cuts.len());
    for (i, &a) in cuts.iter().enumerate() {
        let b = if i + 1 < cuts.len() {
            cuts[i + 1]
        } else {
            cuts[0] + TAU
        };
        let len = b - a;
        if len <= 0.0 {
            continue;
        }
        if both_steps {
            let v = psi(a + 0.5 * len);
            pieces.push(Piece {
                start: a,
                len,
                at_start: v,
                at_min: v,
                argmin: a,
                at_end: v,
                constant: true,
            });
        } else {
            // endpoint values as one-sided limits from inside the piece
            let eps = 1e-13 * len.max(1.0);
            let (fa, fb) = (psi(a + eps.min(0.5 * len)), psi(b - eps.min(0.5 * len)));
            let (argmin, at_min) = golden_min(&psi, a, b);
            let (argmin, at_min) = [(a, fa), (b, fb), (argmin, at_min)]
                .into_iter()
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .expect("three candidates");
            pieces.push(Piece {
                start: a,
                len,
                at_start: fa,
                at_min,
                argmin,
                at_end: fb,
                constant: false,
            });
        }
    }

    let level_mass = |delta: f64| -> f64 {
        let mut mass = 0.0;
        for p in &pieces {
            if p.at_min >= delta {
                mass += measure.arc_mass(p.start, p.len);
            } else if !p.constant {
                if p.at_start >= delta {
                    let x = crossing(&psi, p.start, p.argmin, delta, true);
                    mass += measure.arc_mass(p.start, x - p.start);
                }
                if p.at_end >= delta {
                    let x = crossing(&psi, p.argmin, p.start + p.len, delta, false);
                    mass += measure.arc_mass(x, p.start + p.len - x);
                }
            }
        }
        mass
    };

    let max_psi = pieces
        .iter()
        .map(|p| p.at_start.max(p.at_end).max(p.at_min))
        .fold(0.0, f64::max);
    if max_psi == 0.0 {
        return Ok(0.0);
    }
    let mut lo = 0.0;
    let mut hi = max_psi.min(measure.total_mass());
    while hi - lo > PROBABILITY_TOL {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if level_mass(mid) <= mid {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Ok(hi)
}

/// Piecewise-geodesic interpolation of `phi` on `2^level` uniform knots.
pub fn lipschitz_approximate(phi: &BoundaryMap, level: u32) -> Result<BoundaryMap> {
    if matches!(phi.repr, BoundaryRepr::PiecewiseConstant(_)) && !phi.is_continuous() {
        return Err(Error::invalid(
            "lipschitz approximation needs a continuous map",
        ));
    }
    if level > 24 {
        return Err(Error::invalid(format!("level {level} is too fine")));
    }
    let n = 1usize << level;
    let knots = (0..n)
        .map(|i| {
            let t = TAU * i as f64 / n as f64;
            (t, phi.eval(t))
        })
        .collect();
    BoundaryMap::new(phi.target.clone(), BoundaryRepr::PiecewiseGeodesic(knots))
}

/// Replace each jump of a step map by the geodesic between the adjacent arc values,
/// traversed over `[θ_J − w, θ_J + w]`. Maps without jumps are returned unchanged.
pub fn mollify_step(phi: &BoundaryMap, w: f64) -> Result<BoundaryMap> {
    let BoundaryRepr::PiecewiseConstant(_) = &phi.repr else {
        return Err(Error::invalid(
            "mollification needs a piecewise-constant map",
        ));
    };
    if !(w > 0.0) || !w.is_finite() {
        return Err(Error::invalid("window must be positive"));
    }
    let jumps = phi.jumps();
    if jumps.is_empty() {
        return Ok(phi.clone());
    }
    let mut sorted = jumps.clone();
    sorted.sort_by(f64::total_cmp);
    let shortest = (0..sorted.len())
        .map(|i| {
            let next = sorted[(i + 1) % sorted.len()];
            let gap = wrap_angle(next - sorted[i]);
            if gap == 0.0 {
                TAU
            } else {
                gap
            }
        })
        .fold(f64::INFINITY, f64::min);
    if w >= 0.5 * shortest {
        return Err(Error::invalid(format!(
            "window {w} is not below half the shortest arc ({})",
            0.5 * shortest
        )));
    }
    let mut knots = Vec::with_capacity(2 * sorted.len());
    for &j in &sorted {
        knots.push((wrap_angle(j - w), phi.eval(j - w)));
        knots.push((wrap_angle(j + w), phi.eval(j)));
    }
    knots.sort_by(|a, b| a.0.total_cmp(&b.0));
    BoundaryMap::new(phi.target.clone(), BoundaryRepr::PiecewiseGeodesic(knots))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::cat0::TreeShape;

    fn e1(x: f64) -> TargetPoint {
        TargetPoint::euclidean(&[x])
    }

    fn two_arc(d: f64) -> BoundaryMap {
        BoundaryMap::steps(
            TargetSpace::euclidean(1).unwrap(),
            &[0.0, PI],
            vec![e1(0.0), e1(d)],
        )
        .unwrap()
    }

    #[test]
    fn eval_examples() {
        let sp = TargetSpace::euclidean(2).unwrap();
        let c = BoundaryMap::constant(sp.clone(), TargetPoint::euclidean(&[1.0, 2.0])).unwrap();
        assert_eq!(c.eval(4.0), TargetPoint::euclidean(&[1.0, 2.0]));

        let g = BoundaryMap::new(
            sp.clone(),
            BoundaryRepr::PiecewiseGeodesic(vec![
                (0.0, TargetPoint::euclidean(&[0.0, 0.0])),
                (PI, TargetPoint::euclidean(&[2.0, 0.0])),
            ]),
        )
        .unwrap();
        assert_eq!(g.eval(PI / 2.0), TargetPoint::euclidean(&[1.0, 0.0]));

        let s = two_arc(1.0);
        assert_eq!(s.eval(1.0), e1(0.0));
        assert_eq!(s.eval(PI), e1(1.0));
        assert_eq!(s.jumps(), vec![0.0, PI]);
    }

    #[test]
    fn rejects_bad_maps() {
        let sp = TargetSpace::euclidean(1).unwrap();
        assert!(BoundaryMap::steps(sp.clone(), &[0.0, 1.0], vec![e1(0.0), e1(1.0)]).is_ok());
        assert!(BoundaryMap::new(
            sp.clone(),
            BoundaryRepr::PiecewiseConstant(vec![(0.0, 1.0, e1(0.0))])
        )
        .is_err());
        assert!(BoundaryMap::new(sp.clone(), BoundaryRepr::Sampled(vec![])).is_err());
        assert!(BoundaryMap::new(
            sp,
            BoundaryRepr::Sampled(vec![TargetPoint::euclidean(&[1.0, 2.0])])
        )
        .is_err());
    }

    #[test]
    fn json_roundtrip() {
        let m = two_arc(3.0);
        let s = serde_json::to_string(&m).unwrap();
        assert!(s.contains("\"kind\":\"arcs\""));
        let back: BoundaryMap = serde_json::from_str(&s).unwrap();
        assert_eq!(back, m);
        let bad = s.replace("\"kind\"", "\"extra\":1,\"kind\"");
        assert!(serde_json::from_str::<BoundaryMap>(&bad).is_err());
    }

    #[test]
    fn probability_distance_examples() {
        let sig = CircleMeasure::uniform(4096);
        let a = two_arc(1.0);
        assert_eq!(probability_distance(&a, &a, &sig).unwrap(), 0.0);

        let sp = TargetSpace::euclidean(1).unwrap();
        let c0 = BoundaryMap::constant(sp.clone(), e1(0.0)).unwrap();
        let c1 = BoundaryMap::constant(sp.clone(), e1(0.3)).unwrap();
        assert!((probability_distance(&c0, &c1, &sig).unwrap() - 0.3).abs() < 1e-12);

        // differ by 1 on an arc of measure 0.1
        let f = BoundaryMap::steps(sp.clone(), &[0.0, 0.2 * PI], vec![e1(1.0), e1(0.0)]).unwrap();
        assert!((probability_distance(&c0, &f, &sig).unwrap() - 0.1).abs() < 1e-12);

        let other = TargetSpace::euclidean(2).unwrap();
        let c2 = BoundaryMap::constant(other, TargetPoint::euclidean(&[0.0, 0.0])).unwrap();
        assert!(probability_distance(&c0, &c2, &sig).is_err());
    }

    #[test]
    fn mollified_distance_matches_closed_form() {
        let sig = CircleMeasure::uniform(1 << 12);
        let d = 1.0;
        let phi = two_arc(d);
        for w in [0.2, 0.05, 0.01] {
            let m = mollify_step(&phi, w).unwrap();
            let mass = 2.0 * w / PI;
            let expected = mass / (1.0 + 2.0 * mass / d);
            assert!((probability_distance(&phi, &m, &sig).unwrap() - expected).abs() < 1e-12);
        }
        assert!(mollify_step(&phi, 2.0).is_err());
    }

    #[test]
    fn mollify_in_tree_follows_path() {
        let shape = TreeShape::star(3, 1.0).unwrap();
        let sp = TargetSpace::tree(shape.clone());
        let leaf = |i: usize| TargetPoint::Tree(shape.vertex_point(i + 1));
        let phi = BoundaryMap::steps(
            sp.clone(),
            &[0.0, 2.0, 4.0],
            vec![leaf(0), leaf(1), leaf(2)],
        )
        .unwrap();
        let m = mollify_step(&phi, 0.1).unwrap();
        // at the jump the value is the midpoint of the path between two leaves: the hub
        let mid = m.eval(2.0);
        assert!(
            sp.distance(&mid, &TargetPoint::Tree(shape.vertex_point(0)))
                .unwrap()
                < 1e-12
        );
    }

    #[test]
    fn lipschitz_approximation_examples() {
        let sp = TargetSpace::euclidean(2).unwrap();
        let circle = BoundaryMap::new(
            sp.clone(),
            BoundaryRepr::Sampled(
                (0..4096)
                    .map(|j| {
                        let t = TAU * j as f64 / 4096.0;
                        TargetPoint::euclidean(&[t.cos(), t.sin()])
                    })
                    .collect(),
            ),
        )
        .unwrap();
        let approx = lipschitz_approximate(&circle, 6).unwrap();
        let again = lipschitz_approximate(&approx, 6).unwrap();
        assert_eq!(approx, again);
        assert!(lipschitz_approximate(&two_arc(1.0), 3).is_err());
    }
}
