//! CAT(0) target spaces: Euclidean space, the hyperbolic plane and finite metric trees.
//!
//! [`TargetSpace`] and [`TargetPoint`] are the public, serializable face. The solver works
//! through the crate-internal [`Geometry`] trait, which each concrete space implements on
//! an unboxed point type so the relaxation loops do not pay for enum dispatch per vertex.

pub mod hyperbolic;
pub mod tree;

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
pub use hyperbolic::Hyperboloid;
pub use tree::{TreeEdge, TreePoint, TreeShape};

/// Run `$body` with `$g` bound to the concrete [`Geometry`] of `$space`.
macro_rules! with_geometry {
    ($space:expr, $g:ident => $body:expr) => {
        match &$space.kind {
            $crate::cat0::SpaceKind::Euclidean { dim } => {
                let $g = $crate::cat0::EuclideanGeometry { dim: *dim };
                $body
            }
            $crate::cat0::SpaceKind::HyperbolicPlane => {
                let $g = $crate::cat0::HyperbolicGeometry;
                $body
            }
            $crate::cat0::SpaceKind::MetricTree(shape) => {
                let $g = $crate::cat0::TreeGeometry { shape: &**shape };
                $body
            }
        }
    };
}
pub(crate) use with_geometry;

#[derive(Debug, Clone, PartialEq)]
pub enum SpaceKind {
    Euclidean { dim: usize },
    HyperbolicPlane,
    MetricTree(Arc<TreeShape>),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "SpaceJson", into = "SpaceJson")]
pub struct TargetSpace {
    pub kind: SpaceKind,
    /// Bound on the diameter of the region in use; `None` means unbounded.
    pub diameter_hint: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum SpaceJson {
    Euclidean {
        dim: usize,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        diameter_hint: Option<f64>,
    },
    Hyperbolic {
        #[serde(default, skip_serializing_if = "Option::is_none")]
        diameter_hint: Option<f64>,
    },
    Tree {
        tree: TreeShape,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        diameter_hint: Option<f64>,
    },
}

impl TryFrom<SpaceJson> for TargetSpace {
    type Error = Error;

    fn try_from(raw: SpaceJson) -> Result<Self> {
        let (space, hint) = match raw {
            SpaceJson::Euclidean { dim, diameter_hint } => {
                (TargetSpace::euclidean(dim)?, diameter_hint)
            }
            SpaceJson::Hyperbolic { diameter_hint } => (TargetSpace::hyperbolic(), diameter_hint),
            SpaceJson::Tree {
                tree,
                diameter_hint,
            } => (TargetSpace::tree(tree), diameter_hint),
        };
        space.with_diameter_hint(hint)
    }
}

impl From<TargetSpace> for SpaceJson {
    fn from(s: TargetSpace) -> Self {
        let diameter_hint = s.diameter_hint;
        match s.kind {
            SpaceKind::Euclidean { dim } => SpaceJson::Euclidean { dim, diameter_hint },
            SpaceKind::HyperbolicPlane => SpaceJson::Hyperbolic { diameter_hint },
            SpaceKind::MetricTree(tree) => SpaceJson::Tree {
                tree: (*tree).clone(),
                diameter_hint,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PointJson", into = "PointJson")]
pub enum TargetPoint {
    Euclidean(Vec<f64>),
    Hyperbolic(Hyperboloid),
    Tree(TreePoint),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "space", rename_all = "lowercase", deny_unknown_fields)]
enum PointJson {
    Euclidean { coords: Vec<f64> },
    Hyperbolic { coords: [f64; 3] },
    Tree { edge: usize, offset: f64 },
}

impl TryFrom<PointJson> for TargetPoint {
    type Error = Error;

    fn try_from(raw: PointJson) -> Result<Self> {
        Ok(match raw {
            PointJson::Euclidean { coords } => TargetPoint::Euclidean(coords),
            PointJson::Hyperbolic { coords } => {
                if !hyperbolic::is_valid(&coords) {
                    return Err(Error::invalid(format!(
                        "hyperbolic point {coords:?} is off the hyperboloid"
                    )));
                }
                TargetPoint::Hyperbolic(coords)
            }
            PointJson::Tree { edge, offset } => TargetPoint::Tree(TreePoint { edge, offset }),
        })
    }
}

impl From<TargetPoint> for PointJson {
    fn from(p: TargetPoint) -> Self {
        match p {
            TargetPoint::Euclidean(coords) => PointJson::Euclidean { coords },
            TargetPoint::Hyperbolic(coords) => PointJson::Hyperbolic { coords },
            TargetPoint::Tree(TreePoint { edge, offset }) => PointJson::Tree { edge, offset },
        }
    }
}

impl TargetPoint {
    pub fn euclidean(coords: &[f64]) -> Self {
        TargetPoint::Euclidean(coords.to_vec())
    }

    pub fn kind_name(&self) -> &'static str {
        match self {
            TargetPoint::Euclidean(_) => "euclidean",
            TargetPoint::Hyperbolic(_) => "hyperbolic",
            TargetPoint::Tree(_) => "tree",
        }
    }
}

/// Point of the standard simplex with the ℓ¹ distance.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector(Vec<f64>);

impl WeightVector {
    pub const SUM_TOL: f64 = 1e-12;

    pub fn new(weights: Vec<f64>) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::invalid("weight vector is empty"));
        }
        if weights.iter().any(|w| !(*w >= 0.0) || !w.is_finite()) {
            return Err(Error::invalid("weights must be finite and nonnegative"));
        }
        let sum: f64 = weights.iter().sum();
        if (sum - 1.0).abs() > Self::SUM_TOL {
            return Err(Error::invalid(format!("weights sum to {sum}, expected 1")));
        }
        Ok(WeightVector(weights))
    }

    /// Scale nonnegative weights onto the simplex.
    pub fn normalized(raw: &[f64]) -> Result<Self> {
        let sum: f64 = raw.iter().sum();
        if raw.iter().any(|w| !(*w >= 0.0)) || !(sum > 0.0) || !sum.is_finite() {
            return Err(Error::invalid(
                "weights must be nonnegative with positive sum",
            ));
        }
        WeightVector::new(raw.iter().map(|w| w / sum).collect())
    }

    pub fn uniform(n: usize) -> Result<Self> {
        WeightVector::normalized(&vec![1.0; n])
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn l1_distance(&self, other: &WeightVector) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b).abs())
            .sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct GeodesicSegment {
    pub a: TargetPoint,
    pub b: TargetPoint,
    pub length: f64,
}

impl GeodesicSegment {
    pub fn new(space: &TargetSpace, a: TargetPoint, b: TargetPoint) -> Result<Self> {
        let length = space.distance(&a, &b)?;
        Ok(GeodesicSegment { a, b, length })
    }

    pub fn point(&self, space: &TargetSpace, t: f64) -> Result<TargetPoint> {
        space.geodesic_point(&self.a, &self.b, t)
    }
}

/// Result of comparing a geodesic triangle with its Euclidean comparison triangle.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComparisonCheck {
    pub holds: bool,
    /// comparison distance minus actual distance; negative means the CAT(0) inequality failed
    pub slack: f64,
}

pub const COMPARISON_TOL: f64 = 1e-9;

impl TargetSpace {
    pub fn euclidean(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::invalid("euclidean dimension must be at least 1"));
        }
        Ok(TargetSpace {
            kind: SpaceKind::Euclidean { dim },
            diameter_hint: None,
        })
    }

    pub fn hyperbolic() -> Self {
        TargetSpace {
            kind: SpaceKind::HyperbolicPlane,
            diameter_hint: None,
        }
    }

    pub fn tree(shape: TreeShape) -> Self {
        let diam = shape.diameter();
        TargetSpace {
            kind: SpaceKind::MetricTree(Arc::new(shape)),
            diameter_hint: Some(diam),
        }
    }

    pub fn with_diameter_hint(mut self, hint: Option<f64>) -> Result<Self> {
        if let Some(h) = hint {
            if !(h >= 0.0) {
                return Err(Error::invalid("diameter hint must be nonnegative"));
            }
            self.diameter_hint = Some(h);
        }
        Ok(self)
    }

    pub fn kind_name(&self) -> &'static str {
        match self.kind {
            SpaceKind::Euclidean { .. } => "euclidean",
            SpaceKind::HyperbolicPlane => "hyperbolic",
            SpaceKind::MetricTree(_) => "tree",
        }
    }

    pub fn tree_shape(&self) -> Option<&TreeShape> {
        match &self.kind {
            SpaceKind::MetricTree(t) => Some(t),
            _ => None,
        }
    }

    pub fn validate(&self, p: &TargetPoint) -> Result<()> {
        let ok = match (&self.kind, p) {
            (SpaceKind::Euclidean { dim }, TargetPoint::Euclidean(c)) => {
                c.len() == *dim && c.iter().all(|x| x.is_finite())
            }
            (SpaceKind::HyperbolicPlane, TargetPoint::Hyperbolic(c)) => hyperbolic::is_valid(c),
            (SpaceKind::MetricTree(t), TargetPoint::Tree(q)) => t.is_valid(q),
            _ => {
                return Err(Error::invalid(format!(
                    "{} point given for a {} space",
                    p.kind_name(),
                    self.kind_name()
                )))
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!(
                "point {p:?} is not valid in the {} space",
                self.kind_name()
            )))
        }
    }

    pub fn distance(&self, p: &TargetPoint, q: &TargetPoint) -> Result<f64> {
        with_geometry!(self, g => {
            let (a, b) = (g.lift(p)?, g.lift(q)?);
            Ok(g.dist(&a, &b))
        })
    }

    pub fn geodesic_point(&self, a: &TargetPoint, b: &TargetPoint, t: f64) -> Result<TargetPoint> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::invalid(format!(
                "geodesic parameter {t} outside [0, 1]"
            )));
        }
        with_geometry!(self, g => {
            let (pa, pb) = (g.lift(a)?, g.lift(b)?);
            Ok(g.lower(g.geodesic(&pa, &pb, t)))
        })
    }

    /// Weighted barycenter: the unique minimizer of `ψ_μ(y) = Σ μ_i d(y_i, y)²`.
    pub fn barycenter(&self, points: &[TargetPoint], mu: &WeightVector) -> Result<TargetPoint> {
        if points.is_empty() {
            return Err(Error::invalid("barycenter of an empty point set"));
        }
        if points.len() != mu.len() {
            return Err(Error::invalid(format!(
                "{} points but {} weights",
                points.len(),
                mu.len()
            )));
        }
        with_geometry!(self, g => {
            let pool = points.iter().map(|p| g.lift(p)).collect::<Result<Vec<_>>>()?;
            let items: Vec<(usize, f64)> = mu.as_slice().iter().cloned().enumerate().collect();
            Ok(g.lower(g.barycenter(&pool, &items, None)))
        })
    }

    /// `ψ_μ(y) = Σ μ_i d(y_i, y)²`.
    pub fn weighted_sq_distance(
        &self,
        points: &[TargetPoint],
        mu: &WeightVector,
        y: &TargetPoint,
    ) -> Result<f64> {
        let mut s = 0.0;
        for (p, w) in points.iter().zip(mu.as_slice()) {
            let d = self.distance(p, y)?;
            s += w * d * d;
        }
        Ok(s)
    }

    /// CAT(0) comparison: `d(γ_ab(s), γ_ac(t))` against the same quantity in the Euclidean
    /// comparison triangle with the same side lengths.
    pub fn cat0_comparison_check(
        &self,
        a: &TargetPoint,
        b: &TargetPoint,
        c: &TargetPoint,
        s: f64,
        t: f64,
    ) -> Result<ComparisonCheck> {
        let ab = self.distance(a, b)?;
        let ac = self.distance(a, c)?;
        let bc = self.distance(b, c)?;
        // comparison triangle: ā = 0, b̄ = (ab, 0), c̄ from the law of cosines
        let cx = if ab > 0.0 {
            ((ab * ab + ac * ac - bc * bc) / (2.0 * ab)).clamp(-ac, ac)
        } else {
            ac
        };
        let cy = (ac * ac - cx * cx).max(0.0).sqrt();
        let (px, qx, qy) = (s * ab, t * cx, t * cy);
        let comparison = ((px - qx).powi(2) + qy * qy).sqrt();
        let p = self.geodesic_point(a, b, s)?;
        let q = self.geodesic_point(a, c, t)?;
        let actual = self.distance(&p, &q)?;
        let slack = comparison - actual;
        Ok(ComparisonCheck {
            holds: actual <= comparison + COMPARISON_TOL,
            slack,
        })
    }

    /// `| sup_probe |d(probe,p) − d(probe,q)| − d(p,q) |`: how far the distance functions to
    /// the probes are from realising `d(p, q)` in the sup-norm embedding.
    pub fn lip1_embedding_gap(
        &self,
        probes: &[TargetPoint],
        p: &TargetPoint,
        q: &TargetPoint,
    ) -> Result<f64> {
        if probes.is_empty() {
            return Err(Error::invalid("no probes"));
        }
        let mut sup = 0.0f64;
        for z in probes {
            sup = sup.max((self.distance(z, p)? - self.distance(z, q)?).abs());
        }
        Ok((sup - self.distance(p, q)?).abs())
    }

    /// Diameter of a finite point set.
    pub fn diameter_of(&self, points: &[TargetPoint]) -> Result<f64> {
        let mut diam = 0.0f64;
        for (i, p) in points.iter().enumerate() {
            for q in &points[i + 1..] {
                diam = diam.max(self.distance(p, q)?);
            }
        }
        Ok(diam)
    }
}

/// Internal per-space geometry on unboxed point types.
pub(crate) trait Geometry: Sync {
    type Point: Clone + Send + Sync + PartialEq + std::fmt::Debug;

    fn dist(&self, a: &Self::Point, b: &Self::Point) -> f64;

    fn geodesic(&self, a: &Self::Point, b: &Self::Point, t: f64) -> Self::Point;

    /// Barycenter of `pool[i]` with weights `w` for `(i, w)` in `items`; weights sum to 1.
    fn barycenter(
        &self,
        pool: &[Self::Point],
        items: &[(usize, f64)],
        start: Option<&Self::Point>,
    ) -> Self::Point;

    /// Point at parameter `omega ≥ 1` on the geodesic from `a` through `b`, when that
    /// extension is unique.
    fn extrapolate(&self, a: &Self::Point, b: &Self::Point, omega: f64) -> Option<Self::Point>;

    fn lift(&self, p: &TargetPoint) -> Result<Self::Point>;

    fn lower(&self, p: Self::Point) -> TargetPoint;

    /// Dimension of the ambient vector space used for tangent vectors, or 0 when the space
    /// has no smooth tangent structure.
    fn ambient_dim(&self) -> usize {
        0
    }

    /// Tangent vector at `at` pointing to `to` with length `d(at, to)`, in ambient
    /// coordinates.
    fn log_ambient(&self, _at: &Self::Point, _to: &Self::Point, _out: &mut [f64]) {
        unreachable!("no tangent structure")
    }

    /// Exponential map at `at` of the tangent projection of the ambient vector `v`.
    fn exp_ambient(&self, _at: &Self::Point, _v: &[f64]) -> Self::Point {
        unreachable!("no tangent structure")
    }

    /// Over-relaxed update of `old` towards the barycenter of `items`. Never raises
    /// `Σ w d(pool_i, ·)²` above its value at `old`.
    fn sor_step(
        &self,
        pool: &[Self::Point],
        items: &[(usize, f64)],
        old: &Self::Point,
        omega: f64,
    ) -> Self::Point {
        let bary = self.barycenter(pool, items, Some(old));
        if omega == 1.0 {
            return bary;
        }
        let psi = |y: &Self::Point| -> f64 {
            items
                .iter()
                .map(|&(i, w)| {
                    let d = self.dist(&pool[i], y);
                    w * d * d
                })
                .sum()
        };
        match self.extrapolate(old, &bary, omega) {
            Some(cand) if psi(&cand) <= psi(old) => cand,
            _ => bary,
        }
    }
}

pub(crate) struct EuclideanGeometry {
    pub dim: usize,
}

pub(crate) struct HyperbolicGeometry;

pub(crate) struct TreeGeometry<'a> {
    pub shape: &'a TreeShape,
}

impl Geometry for EuclideanGeometry {
    type Point = Vec<f64>;

    fn dist(&self, a: &Vec<f64>, b: &Vec<f64>) -> f64 {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y) * (x - y))
            .sum::<f64>()
            .sqrt()
    }

    fn geodesic(&self, a: &Vec<f64>, b: &Vec<f64>, t: f64) -> Vec<f64> {
        if t == 0.0 {
            return a.clone();
        }
        if t == 1.0 {
            return b.clone();
        }
        a.iter().zip(b).map(|(x, y)| x + t * (y - x)).collect()
    }

    fn barycenter(
        &self,
        pool: &[Vec<f64>],
        items: &[(usize, f64)],
        _start: Option<&Vec<f64>>,
    ) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for &(i, w) in items {
            for (o, x) in out.iter_mut().zip(&pool[i]) {
                *o += w * x;
            }
        }
        out
    }

    fn extrapolate(&self, a: &Vec<f64>, b: &Vec<f64>, omega: f64) -> Option<Vec<f64>> {
        Some(a.iter().zip(b).map(|(x, y)| x + omega * (y - x)).collect())
    }

    fn lift(&self, p: &TargetPoint) -> Result<Vec<f64>> {
        match p {
            TargetPoint::Euclidean(c) if c.len() == self.dim => Ok(c.clone()),
            TargetPoint::Euclidean(c) => Err(Error::invalid(format!(
                "point has dimension {}, space has {}",
                c.len(),
                self.dim
            ))),
            other => Err(Error::invalid(format!(
                "{} point given for a euclidean space",
                other.kind_name()
            ))),
        }
    }

    fn lower(&self, p: Vec<f64>) -> TargetPoint {
        TargetPoint::Euclidean(p)
    }

    fn ambient_dim(&self) -> usize {
        self.dim
    }

    fn log_ambient(&self, at: &Vec<f64>, to: &Vec<f64>, out: &mut [f64]) {
        for ((o, a), b) in out.iter_mut().zip(at).zip(to) {
            *o = b - a;
        }
    }

    fn exp_ambient(&self, at: &Vec<f64>, v: &[f64]) -> Vec<f64> {
        at.iter().zip(v).map(|(a, b)| a + b).collect()
    }

    // the local energy is an isotropic quadratic, so any omega in (0, 2) decreases it
    fn sor_step(
        &self,
        pool: &[Vec<f64>],
        items: &[(usize, f64)],
        old: &Vec<f64>,
        omega: f64,
    ) -> Vec<f64> {
        let mut out: Vec<f64> = old.iter().map(|x| (1.0 - omega) * x).collect();
        for &(i, w) in items {
            for (o, x) in out.iter_mut().zip(&pool[i]) {
                *o += omega * w * x;
            }
        }
        out
    }
}

impl Geometry for HyperbolicGeometry {
    type Point = Hyperboloid;

    fn dist(&self, a: &Hyperboloid, b: &Hyperboloid) -> f64 {
        hyperbolic::distance(a, b)
    }

    fn geodesic(&self, a: &Hyperboloid, b: &Hyperboloid, t: f64) -> Hyperboloid {
        hyperbolic::geodesic_point(a, b, t)
    }

    fn barycenter(
        &self,
        pool: &[Hyperboloid],
        items: &[(usize, f64)],
        start: Option<&Hyperboloid>,
    ) -> Hyperboloid {
        hyperbolic::barycenter(pool, items, start)
    }

    fn extrapolate(&self, a: &Hyperboloid, b: &Hyperboloid, omega: f64) -> Option<Hyperboloid> {
        let v = hyperbolic::log(a, b);
        Some(hyperbolic::exp(
            a,
            &[omega * v[0], omega * v[1], omega * v[2]],
        ))
    }

    fn lift(&self, p: &TargetPoint) -> Result<Hyperboloid> {
        match p {
            TargetPoint::Hyperbolic(c) if hyperbolic::is_valid(c) => {
                Ok(hyperbolic::renormalize(*c))
            }
            TargetPoint::Hyperbolic(c) => {
                Err(Error::invalid(format!("{c:?} is off the hyperboloid")))
            }
            other => Err(Error::invalid(format!(
                "{} point given for a hyperbolic space",
                other.kind_name()
            ))),
        }
    }

    fn lower(&self, p: Hyperboloid) -> TargetPoint {
        TargetPoint::Hyperbolic(p)
    }

    fn ambient_dim(&self) -> usize {
        3
    }

    fn log_ambient(&self, at: &Hyperboloid, to: &Hyperboloid, out: &mut [f64]) {
        out.copy_from_slice(&hyperbolic::log(at, to));
    }

    fn exp_ambient(&self, at: &Hyperboloid, v: &[f64]) -> Hyperboloid {
        // project onto the tangent plane: v + ⟨v, at⟩ at
        let v = [v[0], v[1], v[2]];
        let k = hyperbolic::minkowski(&v, at);
        hyperbolic::exp(at, &[v[0] + k * at[0], v[1] + k * at[1], v[2] + k * at[2]])
    }

    /// A single tangent step `exp_old(ω Σ w log_old(y_i))`, falling back to the exact
    /// barycenter when the step would raise the local energy.
    fn sor_step(
        &self,
        pool: &[Hyperboloid],
        items: &[(usize, f64)],
        old: &Hyperboloid,
        omega: f64,
    ) -> Hyperboloid {
        let mut v = [0.0; 3];
        let mut psi_old = 0.0;
        let mut d_max = 0.0f64;
        for &(i, w) in items {
            let l = hyperbolic::log(old, &pool[i]);
            let d2 = hyperbolic::tangent_norm(&l).powi(2);
            psi_old += w * d2;
            d_max = d_max.max(d2);
            v[0] += w * l[0];
            v[1] += w * l[1];
            v[2] += w * l[2];
        }
        let cand = hyperbolic::exp(old, &[omega * v[0], omega * v[1], omega * v[2]]);
        // Along the step the Hessian of ψ is at most 2 d coth d ≤ 2 (1 + d²/3) times the
        // metric, with d bounded by the starting distances plus the step length. The step
        // then provably lowers ψ when ω (1 + d²/3) < 2.
        let reach = d_max.sqrt() + omega * hyperbolic::tangent_norm(&v);
        if omega * (1.0 + reach * reach / 3.0) < 2.0 {
            return cand;
        }
        let psi_c: f64 = items
            .iter()
            .map(|&(i, w)| w * hyperbolic::distance(&pool[i], &cand).powi(2))
            .sum();
        if psi_c <= psi_old {
            return cand;
        }
        let bary = hyperbolic::barycenter(pool, items, Some(old));
        if omega == 1.0 {
            return bary;
        }
        let ext = self
            .extrapolate(old, &bary, omega)
            .expect("hyperbolic geodesics extend");
        let psi_e: f64 = items
            .iter()
            .map(|&(i, w)| w * hyperbolic::distance(&pool[i], &ext).powi(2))
            .sum();
        if psi_e <= psi_old {
            ext
        } else {
            bary
        }
    }
}

impl Geometry for TreeGeometry<'_> {
    type Point = TreePoint;

    fn dist(&self, a: &TreePoint, b: &TreePoint) -> f64 {
        self.shape.distance(a, b)
    }

    fn geodesic(&self, a: &TreePoint, b: &TreePoint, t: f64) -> TreePoint {
        self.shape.geodesic_point(a, b, t)
    }

    fn barycenter(
        &self,
        pool: &[TreePoint],
        items: &[(usize, f64)],
        _start: Option<&TreePoint>,
    ) -> TreePoint {
        self.shape.barycenter(pool, items)
    }

    fn extrapolate(&self, a: &TreePoint, b: &TreePoint, omega: f64) -> Option<TreePoint> {
        // geodesics branch at vertices, so only extensions inside one edge are used
        self.shape.extend(a, b, omega)
    }

    fn lift(&self, p: &TargetPoint) -> Result<TreePoint> {
        match p {
            TargetPoint::Tree(q) if self.shape.is_valid(q) => Ok(self.shape.canonical(*q)),
            TargetPoint::Tree(q) => Err(Error::invalid(format!("{q:?} is not on the tree"))),
            other => Err(Error::invalid(format!(
                "{} point given for a tree space",
                other.kind_name()
            ))),
        }
    }

    fn lower(&self, p: TreePoint) -> TargetPoint {
        TargetPoint::Tree(p)
    }
}
