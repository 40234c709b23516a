//! Scalar potential theory on the unit disk.
//!
//! Poisson kernel and Poisson integral, harmonic measure as a [`CircleMeasure`], the chordal
//! quasi-distance on the circle, doubling ratios, Lebesgue density points, and sampling
//! along non-tangential approach paths.
//!
//! Angles are radians. Circle measures are normalized so that the rotation invariant
//! probability `σ_0` has density 1.

use std::f64::consts::{PI, TAU};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::DiskMesh;

/// Default node count for trapezoid quadrature on the circle.
pub const QUADRATURE_NODES: usize = 4096;

/// A density point at scale ε has `σ(B ∩ F) / σ(B) ≥ 1 − DENSITY_EPS`.
pub const DENSITY_EPS: f64 = 1e-3;

/// Representative of `theta` in `[0, 2π)`.
pub fn wrap_angle(theta: f64) -> f64 {
    let w = theta.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// Angular distance on the circle, in `[0, π]`.
pub fn angular_distance(a: f64, b: f64) -> f64 {
    let d = wrap_angle(a - b);
    d.min(TAU - d)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BoundaryPoint(f64);

impl BoundaryPoint {
    pub fn new(theta: f64) -> Self {
        BoundaryPoint(wrap_angle(theta))
    }

    pub fn angle(self) -> f64 {
        self.0
    }

    pub fn xy(self) -> [f64; 2] {
        [self.0.cos(), self.0.sin()]
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiskPoint {
    x1: f64,
    x2: f64,
}

impl DiskPoint {
    pub fn new(x1: f64, x2: f64) -> Result<Self> {
        let n2 = x1 * x1 + x2 * x2;
        if !(n2 < 1.0) {
            return Err(Error::domain(format!(
                "({x1}, {x2}) is not inside the unit disk"
            )));
        }
        Ok(DiskPoint { x1, x2 })
    }

    pub fn from_polar(r: f64, theta: f64) -> Result<Self> {
        if !(0.0..1.0).contains(&r) {
            return Err(Error::domain(format!("radius {r} is not in [0, 1)")));
        }
        DiskPoint::new(r * theta.cos(), r * theta.sin())
    }

    pub const ORIGIN: DiskPoint = DiskPoint { x1: 0.0, x2: 0.0 };

    pub fn x1(&self) -> f64 {
        self.x1
    }

    pub fn x2(&self) -> f64 {
        self.x2
    }

    pub fn radius(&self) -> f64 {
        self.x1.hypot(self.x2)
    }

    pub fn angle(&self) -> f64 {
        wrap_angle(self.x2.atan2(self.x1))
    }
}

/// `P_ξ(x) = (1 − |x|²) / |x − ξ|^k`.
pub fn poisson_kernel(x: &DiskPoint, xi: BoundaryPoint, k: u32) -> f64 {
    let [c, s] = xi.xy();
    let (dx, dy) = (x.x1 - c, x.x2 - s);
    let den = (dx * dx + dy * dy).sqrt().powi(k as i32);
    (1.0 - (x.x1 * x.x1 + x.x2 * x.x2)) / den
}

/// Checked variant taking raw coordinates, for callers that have not built a [`DiskPoint`].
pub fn poisson_kernel_at(x1: f64, x2: f64, xi: BoundaryPoint, k: u32) -> Result<f64> {
    Ok(poisson_kernel(&DiskPoint::new(x1, x2)?, xi, k))
}

/// `σ_x` of the arc `[start, start + len]`, from the closed-form antiderivative
/// `2 atan(k tan(s/2))` of the planar kernel, `k = (1 + r)/(1 − r)`.
pub fn harmonic_measure_of_arc(x: &DiskPoint, start: f64, len: f64) -> f64 {
    if len <= 0.0 {
        return 0.0;
    }
    if len >= TAU {
        return 1.0;
    }
    let r = x.radius();
    if r == 0.0 {
        return len / TAU;
    }
    let k = (1.0 + r) / (1.0 - r);
    // s1 in [−2π, 0), s2 = s1 + len in [−2π, 2π): the antiderivative below is continuous there
    let s1 = wrap_angle(start - x.angle()) - TAU;
    let s2 = s1 + len;
    let f = |s: f64| 2.0 * (k * (0.5 * s).sin()).atan2((0.5 * s).cos());
    ((f(s2) - f(s1)) / TAU).clamp(0.0, 1.0)
}

/// Scalar boundary data: `{"arcs": [[θ_start, θ_end, value], ...]}` or `{"samples": [...]}`
/// on the uniform grid `θ_j = 2πj/n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScalarBoundary {
    Arcs(Vec<(f64, f64, f64)>),
    Samples(Vec<f64>),
}

/// Length of the counter-clockwise arc from `start` to `end`; equal ends mean the full circle.
pub fn arc_length(start: f64, end: f64) -> f64 {
    let l = wrap_angle(end - start);
    if l == 0.0 {
        TAU
    } else {
        l
    }
}

/// Check that arcs given as `(start, end)` tile the circle in counter-clockwise order.
pub fn validate_partition(arcs: &[(f64, f64)]) -> Result<()> {
    if arcs.is_empty() {
        return Err(Error::invalid("no arcs given"));
    }
    let total: f64 = arcs.iter().map(|&(s, e)| arc_length(s, e)).sum();
    if arcs.len() > 1 {
        for (i, &(_, e)) in arcs.iter().enumerate() {
            let next = arcs[(i + 1) % arcs.len()].0;
            if angular_distance(e, next) > 1e-9 {
                return Err(Error::invalid(format!(
                    "arc {i} ends at {e} but the next arc starts at {next}"
                )));
            }
        }
    }
    if (total - TAU).abs() > 1e-9 {
        return Err(Error::invalid(format!(
            "arcs cover {total} radians, expected 2π"
        )));
    }
    Ok(())
}

impl ScalarBoundary {
    /// Indicator of the counter-clockwise arc `[start, end)`.
    pub fn indicator(start: f64, end: f64) -> Self {
        ScalarBoundary::Arcs(vec![(start, end, 1.0), (end, start, 0.0)])
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ScalarBoundary::Arcs(a) => {
                validate_partition(&a.iter().map(|&(s, e, _)| (s, e)).collect::<Vec<_>>())?;
                if a.iter().any(|x| !x.2.is_finite()) {
                    return Err(Error::invalid("arc values must be finite"));
                }
                Ok(())
            }
            ScalarBoundary::Samples(s) if s.is_empty() => Err(Error::invalid("no samples given")),
            ScalarBoundary::Samples(s) if s.iter().any(|v| !v.is_finite()) => {
                Err(Error::invalid("samples must be finite"))
            }
            ScalarBoundary::Samples(_) => Ok(()),
        }
    }

    /// Value at `theta`; arcs are half-open `[start, end)`, samples interpolate linearly.
    pub fn eval(&self, theta: f64) -> f64 {
        let t = wrap_angle(theta);
        match self {
            ScalarBoundary::Arcs(arcs) => arcs
                .iter()
                .find(|&&(s, e, _)| wrap_angle(t - s) < arc_length(s, e))
                .map(|a| a.2)
                .unwrap_or(f64::NAN),
            ScalarBoundary::Samples(v) => {
                let n = v.len();
                let u = t / TAU * n as f64;
                let j = (u.floor() as usize).min(n - 1);
                let f = u - j as f64;
                v[j] * (1.0 - f) + v[(j + 1) % n] * f
            }
        }
    }

    pub fn range(&self) -> (f64, f64) {
        let vals: Vec<f64> = match self {
            ScalarBoundary::Arcs(a) => a.iter().map(|x| x.2).collect(),
            ScalarBoundary::Samples(v) => v.clone(),
        };
        vals.iter()
            .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| {
                (lo.min(v), hi.max(v))
            })
    }
}

/// `P_0 φ(x) = ∫ φ(ξ) P_ξ(x) dσ_0(ξ)`.
///
/// Arc data is integrated exactly per arc; samples use the composite trapezoid rule on at
/// least [`QUADRATURE_NODES`] nodes, refining the sample grid by linear interpolation.
pub fn poisson_integral(phi: &ScalarBoundary, x: &DiskPoint) -> Result<f64> {
    phi.validate()?;
    Ok(match phi {
        ScalarBoundary::Arcs(arcs) => arcs
            .iter()
            .map(|&(s, e, v)| v * harmonic_measure_of_arc(x, s, arc_length(s, e)))
            .sum(),
        ScalarBoundary::Samples(v) => {
            let refine = QUADRATURE_NODES.div_ceil(v.len());
            let n = v.len() * refine;
            let mut acc = 0.0;
            for j in 0..n {
                let theta = TAU * j as f64 / n as f64;
                let phi_j = if refine == 1 { v[j] } else { phi.eval(theta) };
                acc += phi_j * poisson_kernel(x, BoundaryPoint::new(theta), 2);
            }
            acc / n as f64
        }
    })
}

/// Trapezoid Poisson integral of an arbitrary boundary function on `nodes` nodes.
pub fn poisson_integral_fn(phi: impl Fn(f64) -> f64, x: &DiskPoint, nodes: usize) -> f64 {
    let mut acc = 0.0;
    for j in 0..nodes {
        let theta = TAU * j as f64 / nodes as f64;
        acc += phi(theta) * poisson_kernel(x, BoundaryPoint::new(theta), 2);
    }
    acc / nodes as f64
}

/// Measure on the circle with piecewise-constant density on `n` cells centred at
/// `θ_j = 2πj/n`. Density 1 everywhere is `σ_0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircleMeasure {
    density: Vec<f64>,
    total_mass: f64,
    #[serde(skip)]
    prefix: Vec<f64>,
}

impl CircleMeasure {
    pub fn from_density(density: Vec<f64>) -> Result<Self> {
        if density.is_empty() {
            return Err(Error::invalid("measure needs at least one cell"));
        }
        if density.iter().any(|d| !(*d >= 0.0) || !d.is_finite()) {
            return Err(Error::invalid("density must be finite and nonnegative"));
        }
        let n = density.len() as f64;
        let mut prefix = Vec::with_capacity(density.len() + 1);
        prefix.push(0.0);
        let mut acc = 0.0;
        for d in &density {
            acc += d / n;
            prefix.push(acc);
        }
        Ok(CircleMeasure {
            density,
            total_mass: acc,
            prefix,
        })
    }

    /// `σ_0`, the uniform probability measure.
    pub fn uniform(n: usize) -> Self {
        CircleMeasure::from_density(vec![1.0; n.max(1)]).expect("uniform density is valid")
    }

    /// Density given by `f` at the cell centres.
    pub fn from_fn(n: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        CircleMeasure::from_density((0..n).map(|j| f(TAU * j as f64 / n as f64)).collect())
    }

    pub fn density(&self) -> &[f64] {
        &self.density
    }

    pub fn total_mass(&self) -> f64 {
        self.total_mass
    }

    pub fn cells(&self) -> usize {
        self.density.len()
    }

    pub fn cell_width(&self) -> f64 {
        TAU / self.density.len() as f64
    }

    /// Mass of `[−Δ/2, θ)` for `θ ∈ [−Δ/2, 2π − Δ/2]`.
    fn cdf(&self, theta: f64) -> f64 {
        let n = self.density.len();
        let w = self.cell_width();
        let u = (theta + 0.5 * w) / w;
        if u <= 0.0 {
            return 0.0;
        }
        let j = u.floor() as usize;
        if j >= n {
            return self.total_mass;
        }
        self.prefix[j] + self.density[j] * (u - j as f64) / n as f64
    }

    /// Mass of the counter-clockwise arc `[start, start + len]`, `0 ≤ len ≤ 2π`.
    pub fn arc_mass(&self, start: f64, len: f64) -> f64 {
        if len <= 0.0 {
            return 0.0;
        }
        if len >= TAU {
            return self.total_mass;
        }
        let w = self.cell_width();
        let lo = -0.5 * w;
        let hi = TAU - 0.5 * w;
        let mut a = wrap_angle(start);
        if a >= hi {
            a -= TAU;
        }
        let b = a + len;
        if b <= hi {
            self.cdf(b) - self.cdf(a)
        } else {
            (self.total_mass - self.cdf(a)) + self.cdf(b - TAU).max(self.cdf(lo))
        }
    }

    /// Mass of the closed angular ball of radius `r` around `xi`.
    pub fn ball_mass(&self, xi: f64, r: f64) -> f64 {
        self.arc_mass(xi - r, 2.0 * r)
    }
}

/// Harmonic measure `σ_x` seen from `x`, stored as exact cell averages of the kernel.
pub fn harmonic_measure_density(x: &DiskPoint, cells: usize) -> Result<CircleMeasure> {
    let n = cells.max(1);
    let w = TAU / n as f64;
    CircleMeasure::from_density(
        (0..n)
            .map(|j| harmonic_measure_of_arc(x, (j as f64 - 0.5) * w, w) * n as f64)
            .collect(),
    )
}

/// Chordal distance `|ξ − η|`, comparable to the exponential of minus the Gromov product
/// seen from the origin.
pub fn quasi_distance(xi: BoundaryPoint, eta: BoundaryPoint) -> f64 {
    2.0 * (0.5 * (xi.angle() - eta.angle())).sin().abs()
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoublingReport {
    pub max_ratio: f64,
    pub at_center: f64,
    pub at_radius: f64,
}

/// Radii `π/4 · 2^{−k}` down to one cell width, so `2r < π` always.
pub fn doubling_scales(measure: &CircleMeasure) -> Vec<f64> {
    let mut out = Vec::new();
    let mut r = PI / 4.0;
    while r >= measure.cell_width() {
        out.push(r);
        r *= 0.5;
    }
    out
}

/// Largest `σ(B(ξ, 2r)) / σ(B(ξ, r))` over `samples` centres and [`doubling_scales`].
/// A zero-mass ball under a positive-mass double ball gives an infinite ratio.
pub fn doubling_report(measure: &CircleMeasure, samples: usize) -> DoublingReport {
    let mut best = DoublingReport {
        max_ratio: 0.0,
        at_center: 0.0,
        at_radius: 0.0,
    };
    for i in 0..samples.max(1) {
        let xi = TAU * i as f64 / samples.max(1) as f64;
        for r in doubling_scales(measure) {
            let small = measure.ball_mass(xi, r);
            let big = measure.ball_mass(xi, 2.0 * r);
            let ratio = if small > 0.0 {
                big / small
            } else if big > 0.0 {
                f64::INFINITY
            } else {
                continue;
            };
            if ratio > best.max_ratio {
                best = DoublingReport {
                    max_ratio: ratio,
                    at_center: xi,
                    at_radius: r,
                };
            }
        }
    }
    best
}

/// Finite union of counter-clockwise arcs `(start, length)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ArcSet {
    arcs: Vec<(f64, f64)>,
}

impl ArcSet {
    /// Arcs given as `(start, end)` pairs; they must be pairwise disjoint.
    pub fn new(arcs: &[(f64, f64)]) -> Result<Self> {
        if arcs.is_empty() {
            return Err(Error::invalid("empty arc set"));
        }
        let arcs: Vec<(f64, f64)> = arcs
            .iter()
            .map(|&(s, e)| (wrap_angle(s), arc_length(s, e)))
            .collect();
        let total: f64 = arcs.iter().map(|a| a.1).sum();
        // two arcs overlap when one starts strictly inside the other, or both start together
        let starts_inside = |a: &(f64, f64), b: &(f64, f64)| {
            let off = wrap_angle(b.0 - a.0);
            (off > 0.0 && off < a.1) || (off == 0.0 && a.1 > 0.0 && b.1 > 0.0)
        };
        let overlapping = arcs.iter().enumerate().any(|(i, a)| {
            arcs[i + 1..]
                .iter()
                .any(|b| starts_inside(a, b) || starts_inside(b, a))
        });
        if total > TAU + 1e-9 || overlapping {
            return Err(Error::invalid("arcs overlap"));
        }
        Ok(ArcSet { arcs })
    }

    /// The circle minus the open `radius`-neighbourhoods of `points`.
    pub fn excluding(points: &[f64], radius: f64) -> Result<Self> {
        if points.is_empty() {
            return Ok(ArcSet::full_circle());
        }
        let mut pts: Vec<f64> = points.iter().map(|&p| wrap_angle(p)).collect();
        pts.sort_by(f64::total_cmp);
        let n = pts.len();
        let mut arcs = Vec::with_capacity(n);
        for i in 0..n {
            let gap = if n == 1 {
                TAU
            } else {
                wrap_angle(pts[(i + 1) % n] - pts[i])
            };
            if gap > 2.0 * radius {
                arcs.push((pts[i] + radius, pts[i] + gap - radius));
            }
        }
        if arcs.is_empty() {
            return Err(Error::invalid("exclusion radius swallows the whole circle"));
        }
        ArcSet::new(&arcs)
    }

    pub fn full_circle() -> Self {
        ArcSet {
            arcs: vec![(0.0, TAU)],
        }
    }

    pub fn arcs(&self) -> &[(f64, f64)] {
        &self.arcs
    }

    pub fn total_length(&self) -> f64 {
        self.arcs.iter().map(|a| a.1).sum()
    }

    pub fn contains(&self, theta: f64) -> bool {
        self.arcs
            .iter()
            .any(|&(s, l)| wrap_angle(theta - s) < l || l >= TAU)
    }

    /// Measure of the complement.
    pub fn complement_mass(&self, measure: &CircleMeasure) -> f64 {
        measure.total_mass()
            - self
                .arcs
                .iter()
                .map(|&(s, l)| measure.arc_mass(s, l))
                .sum::<f64>()
    }

    /// `σ(F ∩ [start, start + len])`.
    pub fn intersection_mass(&self, measure: &CircleMeasure, start: f64, len: f64) -> f64 {
        let mut mass = 0.0;
        for &(s, l) in &self.arcs {
            // unwrap the query arc relative to s, then intersect on the line with shifts
            let a = s;
            let b = s + l;
            let c0 = s + wrap_angle(start - s);
            for shift in [-TAU, 0.0] {
                let c = c0 + shift;
                let d = c + len;
                let lo = a.max(c);
                let hi = b.min(d);
                if hi > lo {
                    mass += measure.arc_mass(lo, hi - lo);
                }
            }
        }
        mass
    }

    /// `n` points spread uniformly by arc length over the set (cell midpoints).
    pub fn sample_points(&self, n: usize) -> Vec<f64> {
        let total = self.total_length();
        let step = total / n as f64;
        (0..n)
            .map(|i| {
                let mut u = (i as f64 + 0.5) * step;
                for &(s, l) in &self.arcs {
                    if u < l {
                        return wrap_angle(s + u);
                    }
                    u -= l;
                }
                let &(s, l) = self.arcs.last().expect("nonempty");
                wrap_angle(s + l)
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DensityReport {
    /// `(ε, fraction of sampled points of F with σ(B(ξ,ε) ∩ F)/σ(B(ξ,ε)) ≥ 1 − DENSITY_EPS)`
    pub per_scale: Vec<(f64, f64)>,
}

impl DensityReport {
    pub fn finest(&self) -> f64 {
        self.per_scale
            .iter()
            .min_by(|a, b| a.0.total_cmp(&b.0))
            .map(|x| x.1)
            .unwrap_or(f64::NAN)
    }
}

pub fn density_point_fraction(
    set: &ArcSet,
    measure: &CircleMeasure,
    eps_scales: &[f64],
    samples: usize,
) -> Result<DensityReport> {
    if set.total_length() <= 0.0 {
        return Err(Error::invalid("empty boundary set"));
    }
    if samples == 0 || eps_scales.is_empty() {
        return Err(Error::invalid("need at least one sample and one scale"));
    }
    let points = set.sample_points(samples);
    let per_scale = eps_scales
        .iter()
        .map(|&eps| {
            let good = points
                .iter()
                .filter(|&&xi| {
                    let ball = measure.ball_mass(xi, eps);
                    ball > 0.0
                        && set.intersection_mass(measure, xi - eps, 2.0 * eps) / ball
                            >= 1.0 - DENSITY_EPS
                })
                .count();
            (eps, good as f64 / points.len() as f64)
        })
        .collect();
    Ok(DensityReport { per_scale })
}

/// Non-tangential approach path to `xi`: radii `1 − 2^{−m}`, `m = 1..=depth`, with angular
/// offsets `±aperture·(1 − r_m)` alternating in sign.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NtPath {
    pub xi: BoundaryPoint,
    pub aperture: f64,
    pub depth: usize,
}

impl NtPath {
    pub fn new(xi: BoundaryPoint, aperture: f64, depth: usize) -> Result<Self> {
        if !(aperture >= 0.0) || !aperture.is_finite() {
            return Err(Error::invalid("aperture must be finite and nonnegative"));
        }
        if !(2..=50).contains(&depth) {
            return Err(Error::invalid(format!("depth {depth} outside 2..=50")));
        }
        Ok(NtPath {
            xi,
            aperture,
            depth,
        })
    }

    pub fn radius(m: usize) -> f64 {
        1.0 - 0.5f64.powi(m as i32)
    }

    pub fn point(&self, m: usize) -> DiskPoint {
        let r = Self::radius(m);
        let sign = if m % 2 == 1 { 1.0 } else { -1.0 };
        let theta = self.xi.angle() + sign * self.aperture * (1.0 - r);
        DiskPoint {
            x1: r * theta.cos(),
            x2: r * theta.sin(),
        }
    }

    pub fn points(&self) -> Vec<DiskPoint> {
        (1..=self.depth).map(|m| self.point(m)).collect()
    }

    /// Bound on `|x_m − ξ| / (1 − |x_m|)` along the path.
    pub fn cone_bound(&self) -> f64 {
        1.0 + self.aperture
    }

    pub fn cone_ratio(&self) -> f64 {
        let [c, s] = self.xi.xy();
        self.points()
            .iter()
            .map(|p| (p.x1 - c).hypot(p.x2 - s) / (1.0 - p.radius()))
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NtEstimate<T> {
    /// field value at the deepest point
    pub estimate: T,
    /// distance between the values at the last two depths
    pub gap: f64,
}

/// Evaluate `field` along `path`; the deepest value is the limit estimate.
pub fn nt_sample<T>(
    path: &NtPath,
    mut field: impl FnMut(&DiskPoint) -> Result<T>,
    dist: impl Fn(&T, &T) -> f64,
) -> Result<NtEstimate<T>> {
    let prev = field(&path.point(path.depth - 1))?;
    let last = field(&path.point(path.depth))?;
    Ok(NtEstimate {
        gap: dist(&prev, &last),
        estimate: last,
    })
}

pub fn nt_sample_scalar(
    path: &NtPath,
    field: impl Fn(&DiskPoint) -> Result<f64>,
) -> Result<NtEstimate<f64>> {
    nt_sample(path, field, |a, b| (a - b).abs())
}

/// Largest `u_i − (Σ_j w_ij u_j / Σ_j w_ij)` over interior vertices. Non-positive values
/// certify discrete subharmonicity.
pub fn discrete_subharmonic_check(mesh: &DiskMesh, u: &[f64]) -> Result<f64> {
    if u.len() != mesh.n_vertices() {
        return Err(Error::invalid(format!(
            "field has {} values for {} vertices",
            u.len(),
            mesh.n_vertices()
        )));
    }
    let mut worst = f64::NEG_INFINITY;
    for i in mesh.interior() {
        let (nbrs, wsum) = (mesh.neighbors(i), mesh.weight_sum(i));
        let mean: f64 = nbrs.iter().map(|&(j, w)| w * u[j]).sum::<f64>() / wsum;
        worst = worst.max(u[i] - mean);
    }
    Ok(worst)
}
