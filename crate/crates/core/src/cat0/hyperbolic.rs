//! Hyperbolic plane in the hyperboloid model.
//!
//! Points are `[x0, x1, x2]` with `x0² − x1² − x2² = 1`, `x0 > 0`. Tangent vectors at `y`
//! are Minkowski-orthogonal to `y`. Every constructor and map here renormalizes its
//! output back onto the sheet by recomputing `x0` from the spatial part.

pub type Hyperboloid = [f64; 3];

/// Tolerance on the hyperboloid constraint, scaled by `x0²` for far-away points.
pub const CONSTRAINT_TOL: f64 = 1e-10;

const KARCHER_MAX_ITER: usize = 500;
const KARCHER_STEP_TOL: f64 = 1e-12;

pub const ORIGIN: Hyperboloid = [1.0, 0.0, 0.0];

#[inline]
pub fn minkowski(a: &Hyperboloid, b: &Hyperboloid) -> f64 {
    -a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

#[inline]
pub fn renormalize(p: Hyperboloid) -> Hyperboloid {
    [(1.0 + p[1] * p[1] + p[2] * p[2]).sqrt(), p[1], p[2]]
}

pub fn constraint_residual(p: &Hyperboloid) -> f64 {
    (p[0] * p[0] - p[1] * p[1] - p[2] * p[2] - 1.0).abs()
}

pub fn is_valid(p: &Hyperboloid) -> bool {
    p.iter().all(|c| c.is_finite())
        && p[0] > 0.0
        && constraint_residual(p) <= CONSTRAINT_TOL * p[0].max(1.0).powi(2)
}

/// Point at distance `r` from the origin in direction `angle`.
pub fn from_polar(r: f64, angle: f64) -> Hyperboloid {
    renormalize([r.cosh(), r.sinh() * angle.cos(), r.sinh() * angle.sin()])
}

/// Hyperboloid to Poincaré disk: `(x1, x2) / (1 + x0)`.
pub fn to_poincare(p: &Hyperboloid) -> [f64; 2] {
    [p[1] / (1.0 + p[0]), p[2] / (1.0 + p[0])]
}

pub fn from_poincare(z: [f64; 2]) -> Hyperboloid {
    let n2 = z[0] * z[0] + z[1] * z[1];
    let s = 1.0 - n2;
    renormalize([(1.0 + n2) / s, 2.0 * z[0] / s, 2.0 * z[1] / s])
}

/// Hyperboloid to Klein disk: `(x1, x2) / x0`. Geodesics are straight chords there.
pub fn to_klein(p: &Hyperboloid) -> [f64; 2] {
    [p[1] / p[0], p[2] / p[0]]
}

/// Squared Minkowski norm of `p − q`, which equals `4 sinh²(d/2)`.
#[inline]
fn chord_sq(p: &Hyperboloid, q: &Hyperboloid) -> f64 {
    let d = [p[0] - q[0], p[1] - q[1], p[2] - q[2]];
    minkowski(&d, &d).max(0.0)
}

/// Distance `arccosh(−⟨p, q⟩)`, evaluated as `2 asinh(|p − q|/2)` to keep small distances accurate.
#[inline]
pub fn distance(p: &Hyperboloid, q: &Hyperboloid) -> f64 {
    2.0 * (0.5 * chord_sq(p, q).sqrt()).asinh()
}

/// Logarithm map at `y`: the tangent vector at `y` pointing to `p` with length `d(y, p)`.
#[inline]
pub fn log(y: &Hyperboloid, p: &Hyperboloid) -> [f64; 3] {
    log_and_curvature(y, p).0
}

/// `log_y(p)` together with `d coth d`, the largest eigenvalue of the Hessian of
/// `½ d(·, p)²` at `y`.
#[inline]
fn log_and_curvature(y: &Hyperboloid, p: &Hyperboloid) -> ([f64; 3], f64) {
    let c2 = chord_sq(p, y);
    if c2 == 0.0 {
        return ([0.0; 3], 1.0);
    }
    let half = 0.5 * c2.sqrt();
    let d = 2.0 * half.asinh();
    // cosh d − 1 = c2 / 2, so p + ⟨y,p⟩ y = (p − y) − (c2/2) y
    let k = 0.5 * c2;
    let u = [
        p[0] - y[0] - k * y[0],
        p[1] - y[1] - k * y[1],
        p[2] - y[2] - k * y[2],
    ];
    // |u| = sinh d = 2 sinh(d/2) cosh(d/2)
    let sinh_d = 2.0 * half * (1.0 + half * half).sqrt();
    let f = d / sinh_d;
    ([f * u[0], f * u[1], f * u[2]], f * (1.0 + k))
}

#[inline]
pub fn tangent_norm(v: &[f64; 3]) -> f64 {
    minkowski(v, v).max(0.0).sqrt()
}

/// Exponential map at `y` applied to tangent vector `v`.
#[inline]
pub fn exp(y: &Hyperboloid, v: &[f64; 3]) -> Hyperboloid {
    let n = tangent_norm(v);
    if n == 0.0 {
        return *y;
    }
    let c = n.cosh();
    let s = n.sinh() / n;
    renormalize([
        c * y[0] + s * v[0],
        c * y[1] + s * v[1],
        c * y[2] + s * v[2],
    ])
}

pub fn geodesic_point(a: &Hyperboloid, b: &Hyperboloid, t: f64) -> Hyperboloid {
    if t == 0.0 {
        return *a;
    }
    if t == 1.0 {
        return *b;
    }
    let v = log(a, b);
    exp(a, &[t * v[0], t * v[1], t * v[2]])
}

fn weighted_sq_sum(pool: &[Hyperboloid], items: &[(usize, f64)], y: &Hyperboloid) -> f64 {
    items
        .iter()
        .map(|&(i, w)| {
            let d = distance(&pool[i], y);
            w * d * d
        })
        .sum()
}

/// Extrinsic starting guess: the Minkowski-normalized ambient mean.
fn ambient_mean(pool: &[Hyperboloid], items: &[(usize, f64)]) -> Hyperboloid {
    let mut m = [0.0; 3];
    for &(i, w) in items {
        for k in 0..3 {
            m[k] += w * pool[i][k];
        }
    }
    let n = (-minkowski(&m, &m)).max(f64::MIN_POSITIVE).sqrt();
    renormalize([m[0] / n, m[1] / n, m[2] / n])
}

/// Weighted barycenter by Karcher iteration `y ← exp_y(t Σ μ_i log_y(y_i))`.
///
/// The step is `t = 1/L` with `L = Σ μ_i d_i coth d_i`, a bound on the Hessian of `½ψ` at
/// `y` for `ψ(y) = Σ μ_i d(y_i, y)²`. Far from the minimizer a step that would increase `ψ`
/// is halved as well. `items` are `(index into pool, weight)` with weights summing to 1.
pub fn barycenter(
    pool: &[Hyperboloid],
    items: &[(usize, f64)],
    start: Option<&Hyperboloid>,
) -> Hyperboloid {
    let mut y = match start {
        Some(s) => *s,
        None => ambient_mean(pool, items),
    };
    let mut psi = f64::NAN;
    for _ in 0..KARCHER_MAX_ITER {
        let mut v = [0.0; 3];
        let mut lip = 0.0;
        for &(i, w) in items {
            if w == 0.0 {
                continue;
            }
            let (l, c) = log_and_curvature(&y, &pool[i]);
            v[0] += w * l[0];
            v[1] += w * l[1];
            v[2] += w * l[2];
            lip += w * c;
        }
        let len = tangent_norm(&v);
        if len < KARCHER_STEP_TOL {
            break;
        }
        let mut t = 1.0 / lip.max(1.0);
        // near the fixed point the objective check is below rounding; the step is safe there
        if len < 1e-6 {
            y = exp(&y, &[t * v[0], t * v[1], t * v[2]]);
            psi = f64::NAN;
            continue;
        }
        if psi.is_nan() {
            psi = weighted_sq_sum(pool, items, &y);
        }
        loop {
            let cand = exp(&y, &[t * v[0], t * v[1], t * v[2]]);
            let psi_c = weighted_sq_sum(pool, items, &cand);
            if psi_c <= psi || t * len < KARCHER_STEP_TOL {
                y = cand;
                psi = psi_c;
                break;
            }
            t *= 0.5;
        }
    }
    y
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn distance_matches_arccosh_form() {
        let p = from_polar(0.7, 0.3);
        let q = from_polar(1.9, 2.5);
        let direct = (-minkowski(&p, &q)).acosh();
        assert!((distance(&p, &q) - direct).abs() < 1e-12);
        assert_eq!(distance(&ORIGIN, &ORIGIN), 0.0);
    }

    #[test]
    fn exp_inverts_log() {
        let p = from_polar(1.2, -0.4);
        let q = from_polar(0.3, 2.0);
        let back = exp(&p, &log(&p, &q));
        assert!(distance(&back, &q) < 1e-12);
        assert!((tangent_norm(&log(&p, &q)) - distance(&p, &q)).abs() < 1e-12);
    }

    #[test]
    fn poincare_roundtrip() {
        let p = from_polar(2.0, 1.0);
        let z = to_poincare(&p);
        assert!(distance(&from_poincare(z), &p) < 1e-12);
        // origin distance r maps to Poincaré radius tanh(r/2)
        let rz = (z[0] * z[0] + z[1] * z[1]).sqrt();
        assert!((rz - 1.0f64.tanh()).abs() < 1e-12);
    }

    #[test]
    fn barycenter_of_two_is_midpoint() {
        let pool = [from_polar(1.0, 0.0), from_polar(1.0, 2.0)];
        let b = barycenter(&pool, &[(0, 0.5), (1, 0.5)], None);
        let m = geodesic_point(&pool[0], &pool[1], 0.5);
        assert!(distance(&b, &m) < 1e-10);
    }

    #[test]
    fn renormalize_restores_constraint() {
        let p = renormalize([3.0, 0.5, -0.2]);
        assert!(constraint_residual(&p) < 1e-14);
        assert!(is_valid(&p));
        assert!(!is_valid(&[0.5, 0.0, 0.0]));
    }
}
