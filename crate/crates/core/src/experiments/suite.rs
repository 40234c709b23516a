//! Randomized barycenter checks: first-order optimality of the computed barycenter.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::SuiteConfig;
use crate::cat0::{hyperbolic, SpaceKind, TargetPoint, TargetSpace, TreePoint, WeightVector};
use crate::error::Result;

/// Finite-difference step along each test direction.
const FD_STEP: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteInstance {
    pub psi: f64,
    /// smallest one-sided difference quotient of `ψ_μ` over the tested directions
    pub min_derivative: f64,
}

fn random_point(space: &TargetSpace, rng: &mut ChaCha8Rng) -> TargetPoint {
    match &space.kind {
        SpaceKind::Euclidean { dim } => {
            TargetPoint::Euclidean((0..*dim).map(|_| rng.gen_range(-1.0..1.0)).collect())
        }
        SpaceKind::HyperbolicPlane => TargetPoint::Hyperbolic(hyperbolic::from_polar(
            rng.gen_range(0.0..2.5),
            rng.gen_range(0.0..std::f64::consts::TAU),
        )),
        SpaceKind::MetricTree(tree) => {
            let edge = rng.gen_range(0..tree.edges().len());
            let offset = rng.gen_range(0.0..=tree.edges()[edge].length);
            TargetPoint::Tree(tree.canonical(TreePoint { edge, offset }))
        }
    }
}

/// Points at distance `eps` from `at` in `count` random directions; on a tree, every
/// direction out of `at` (there are finitely many).
fn nearby(
    space: &TargetSpace,
    at: &TargetPoint,
    count: usize,
    eps: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<TargetPoint> {
    match (&space.kind, at) {
        (SpaceKind::Euclidean { dim }, TargetPoint::Euclidean(c)) => (0..count)
            .map(|_| {
                let v: Vec<f64> = (0..*dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
                let n = v.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
                TargetPoint::Euclidean(c.iter().zip(&v).map(|(a, b)| a + eps * b / n).collect())
            })
            .collect(),
        (SpaceKind::HyperbolicPlane, TargetPoint::Hyperbolic(y)) => (0..count)
            .map(|_| {
                let w = [
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                    rng.gen_range(-1.0..1.0),
                ];
                let m = hyperbolic::minkowski(&w, y);
                let v = [w[0] + m * y[0], w[1] + m * y[1], w[2] + m * y[2]];
                let n = hyperbolic::tangent_norm(&v).max(1e-300);
                TargetPoint::Hyperbolic(hyperbolic::exp(
                    y,
                    &[eps * v[0] / n, eps * v[1] / n, eps * v[2] / n],
                ))
            })
            .collect(),
        (SpaceKind::MetricTree(tree), TargetPoint::Tree(p)) => {
            let e = &tree.edges()[p.edge];
            let at_vertex = if p.offset <= 0.0 {
                Some(e.u)
            } else if p.offset >= e.length {
                Some(e.v)
            } else {
                None
            };
            match at_vertex {
                Some(x) => tree
                    .incident(x)
                    .iter()
                    .map(|&f| {
                        let ef = &tree.edges()[f];
                        let offset = if ef.u == x {
                            eps.min(ef.length)
                        } else {
                            (ef.length - eps).max(0.0)
                        };
                        TargetPoint::Tree(TreePoint { edge: f, offset })
                    })
                    .collect(),
                None => [p.offset - eps, p.offset + eps]
                    .iter()
                    .map(|&o| {
                        TargetPoint::Tree(TreePoint {
                            edge: p.edge,
                            offset: o.clamp(0.0, e.length),
                        })
                    })
                    .collect(),
            }
        }
        _ => Vec::new(),
    }
}

/// Draw random weighted point sets, compute their barycenters and record `ψ_μ` there and
/// the smallest difference quotient of `ψ_μ` out of the barycenter.
pub fn barycenter_suite(
    space: &TargetSpace,
    cfg: &SuiteConfig,
    seed: u64,
) -> Result<Vec<SuiteInstance>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(cfg.instances);
    for _ in 0..cfg.instances {
        let points: Vec<TargetPoint> = (0..cfg.points)
            .map(|_| random_point(space, &mut rng))
            .collect();
        let raw: Vec<f64> = (0..cfg.points).map(|_| rng.gen_range(0.05..1.0)).collect();
        let mu = WeightVector::normalized(&raw)?;
        let b = space.barycenter(&points, &mu)?;
        let psi = space.weighted_sq_distance(&points, &mu, &b)?;
        let mut min_derivative = f64::INFINITY;
        for q in nearby(space, &b, cfg.directions, FD_STEP, &mut rng) {
            let step = space.distance(&b, &q)?;
            if step > 0.0 {
                let d = (space.weighted_sq_distance(&points, &mu, &q)? - psi) / step;
                min_derivative = min_derivative.min(d);
            }
        }
        out.push(SuiteInstance {
            psi,
            min_derivative,
        });
    }
    Ok(out)
}
