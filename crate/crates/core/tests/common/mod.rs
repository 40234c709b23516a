//! Oracles shared by the integration tests. Each one is written independently of the
//! library routine it checks.
#![allow(dead_code)]

use std::f64::consts::{PI, TAU};

use harmap::cat0::{hyperbolic, TargetPoint, TargetSpace, TreePoint, TreeShape};
use harmap::mesh::DiskMesh;

/// Conjugate gradients on the interior block of the weighted graph Laplacian, with the
/// boundary values moved to the right-hand side. Built from the edge list only.
pub fn laplace_cg(mesh: &DiskMesh, boundary: &[f64]) -> Vec<f64> {
    let nv = mesh.n_vertices();
    let b0 = mesh.boundary().start;
    let n = b0;
    let mut full = vec![0.0; nv];
    full[b0..].copy_from_slice(boundary);
    let mut diag = vec![0.0; n];
    let mut rhs = vec![0.0; n];
    for &(a, b, w) in mesh.edges() {
        for (i, j) in [(a, b), (b, a)] {
            if i < n {
                diag[i] += w;
                if j >= n {
                    rhs[i] += w * full[j];
                }
            }
        }
    }
    let apply = |x: &[f64], out: &mut [f64]| {
        for i in 0..n {
            out[i] = diag[i] * x[i];
        }
        for &(a, b, w) in mesh.edges() {
            if a < n && b < n {
                out[a] -= w * x[b];
                out[b] -= w * x[a];
            }
        }
    };
    let mut x = vec![0.0; n];
    let mut r = rhs.clone();
    // Jacobi preconditioner
    let mut z: Vec<f64> = r.iter().zip(&diag).map(|(r, d)| r / d).collect();
    let mut p = z.clone();
    let mut rz: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
    let norm0 = rhs.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-300);
    let mut ap = vec![0.0; n];
    for _ in 0..20 * n {
        apply(&p, &mut ap);
        let alpha = rz / p.iter().zip(&ap).map(|(a, b)| a * b).sum::<f64>();
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        if r.iter().map(|v| v * v).sum::<f64>().sqrt() < 1e-15 * norm0 {
            break;
        }
        for i in 0..n {
            z[i] = r[i] / diag[i];
        }
        let rz_new: f64 = r.iter().zip(&z).map(|(a, b)| a * b).sum();
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    full[..n].copy_from_slice(&x);
    full
}

/// Harmonic measure of the counter-clockwise arc `[a, a + len]` seen from `(x1, x2)`, by
/// the inscribed-angle identity `ω = (θ − len/2)/π`, where `θ` is the angle the arc's
/// endpoints subtend at `x`.
pub fn arc_measure_inscribed(x1: f64, x2: f64, a: f64, len: f64) -> f64 {
    if len >= TAU {
        return 1.0;
    }
    let (p, q) = ((a.cos(), a.sin()), ((a + len).cos(), (a + len).sin()));
    let u = (p.0 - x1, p.1 - x2);
    let v = (q.0 - x1, q.1 - x2);
    // counter-clockwise angle from u to v in (0, 2π): the angle the arc subtends at x
    let mut theta = (u.0 * v.1 - u.1 * v.0).atan2(u.0 * v.0 + u.1 * v.1);
    if theta <= 0.0 {
        theta += TAU;
    }
    (theta - len / 2.0) / PI
}

/// Brute-force minimization of `ψ_μ` in the Poincaré disk: a coarse grid, then repeated
/// local grids shrinking by a factor 4.
pub fn hyperbolic_grid_barycenter(points: &[[f64; 3]], mu: &[f64]) -> [f64; 3] {
    let psi = |z: [f64; 2]| -> f64 {
        if z[0] * z[0] + z[1] * z[1] >= 1.0 {
            return f64::INFINITY;
        }
        let y = hyperbolic::from_poincare(z);
        points
            .iter()
            .zip(mu)
            .map(|(p, w)| {
                let d = hyperbolic::distance(p, &y);
                w * d * d
            })
            .sum()
    };
    let mut best = [0.0, 0.0];
    let mut best_val = psi(best);
    let mut half = 0.99;
    let steps = 40;
    for _ in 0..14 {
        let c = best;
        for i in 0..=steps {
            for j in 0..=steps {
                let z = [
                    c[0] - half + 2.0 * half * i as f64 / steps as f64,
                    c[1] - half + 2.0 * half * j as f64 / steps as f64,
                ];
                let v = psi(z);
                if v < best_val {
                    best_val = v;
                    best = z;
                }
            }
        }
        half /= 4.0;
    }
    hyperbolic::from_poincare(best)
}

/// Exact tree barycenter by scanning every edge: on an edge of length `L` the distance to
/// a point off the edge is `s + d_u` or `L − s + d_v`, to a point on it `|s − s_i|`, so
/// `ψ` is a quadratic between consecutive breakpoints and is minimized in closed form.
pub fn tree_barycenter_scan(
    tree: &TreeShape,
    points: &[TreePoint],
    mu: &[f64],
) -> (TreePoint, f64) {
    let mut best = (
        TreePoint {
            edge: 0,
            offset: 0.0,
        },
        f64::INFINITY,
    );
    for (eid, e) in tree.edges().iter().enumerate() {
        let l = e.length;
        let u = TreePoint {
            edge: eid,
            offset: 0.0,
        };
        let v = TreePoint {
            edge: eid,
            offset: l,
        };
        // per point: Some(s_i) when on this edge, else distances to both ends
        let terms: Vec<(Option<f64>, f64, f64)> = points
            .iter()
            .map(|p| {
                if p.edge == eid {
                    (Some(p.offset), 0.0, 0.0)
                } else {
                    (None, tree.distance(p, &u), tree.distance(p, &v))
                }
            })
            .collect();
        let mut cuts = vec![0.0, l];
        for t in &terms {
            match t.0 {
                Some(s) => cuts.push(s),
                None => {
                    let s = (l + t.2 - t.1) / 2.0;
                    if s > 0.0 && s < l {
                        cuts.push(s);
                    }
                }
            }
        }
        cuts.sort_by(f64::total_cmp);
        let psi = |s: f64| -> f64 {
            terms
                .iter()
                .zip(mu)
                .map(|(t, w)| {
                    let d = match t.0 {
                        Some(si) => (s - si).abs(),
                        None => (s + t.1).min(l - s + t.2),
                    };
                    w * d * d
                })
                .sum()
        };
        for win in cuts.windows(2) {
            let (lo, hi) = (win[0], win[1]);
            if hi <= lo {
                continue;
            }
            // quadratic a s² + b s + c on the piece, from the branch at the midpoint
            let mid = 0.5 * (lo + hi);
            let (mut a, mut b) = (0.0, 0.0);
            for (t, w) in terms.iter().zip(mu) {
                // d = σ s + κ on this piece
                let (sigma, kappa) = match t.0 {
                    Some(si) => {
                        if mid >= si {
                            (1.0, -si)
                        } else {
                            (-1.0, si)
                        }
                    }
                    None => {
                        if mid + t.1 <= l - mid + t.2 {
                            (1.0, t.1)
                        } else {
                            (-1.0, l + t.2)
                        }
                    }
                };
                a += w * sigma * sigma;
                b += 2.0 * w * sigma * kappa;
            }
            let s = (-b / (2.0 * a)).clamp(lo, hi);
            for cand in [s, lo, hi] {
                let val = psi(cand);
                if val < best.1 {
                    best = (
                        TreePoint {
                            edge: eid,
                            offset: cand,
                        },
                        val,
                    );
                }
            }
        }
    }
    best
}

/// `inf{δ ≥ 0 : σ_0({d ≥ δ}) ≤ δ}` for a pointwise distance that is constant on the
/// pieces `(length, distance)`. A scan over `levels` uniform δ-levels brackets the
/// answer. The level-set measure is a step function, so inside the bracket the infimum
/// is either a distance value or a plateau value of the measure; those are checked with
/// the closure test `σ_0({d > c}) ≤ c`.
pub fn probability_distance_scan(pieces: &[(f64, f64)], levels: usize) -> f64 {
    let above =
        |c: f64| -> f64 { pieces.iter().filter(|p| p.1 > c).map(|p| p.0).sum::<f64>() / TAU };
    // a probability measure never exceeds 1, whatever the rounding of the sum
    let in_closure = |c: f64| c >= 1.0 || above(c) <= c;
    if in_closure(0.0) {
        return 0.0;
    }
    let span = pieces.iter().map(|p| p.1).fold(0.0, f64::max).min(1.0);
    let mut lo = 0.0;
    let mut hi = span;
    for k in 1..=levels {
        let d = span * k as f64 / levels as f64;
        if in_closure(d) {
            lo = span * (k - 1) as f64 / levels as f64;
            hi = d;
            break;
        }
    }
    let mut cands = vec![hi];
    for p in pieces {
        cands.push(p.1);
        cands.push(above(p.1));
    }
    cands
        .into_iter()
        .filter(|&c| c >= lo && c <= hi && in_closure(c))
        .fold(f64::INFINITY, f64::min)
}

pub fn hyperbolic_coords(p: &TargetPoint) -> [f64; 3] {
    match p {
        TargetPoint::Hyperbolic(h) => *h,
        _ => panic!("not a hyperbolic point"),
    }
}

pub fn tree_of(space: &TargetSpace) -> &TreeShape {
    space.tree_shape().expect("tree target")
}
