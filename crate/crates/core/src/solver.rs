//! Discrete Dirichlet problem for maps from the meshed disk into a target space.
//!
//! The discrete energy is `E(h) = Σ_edges w_ij d(h_i, h_j)²`. Relaxation visits interior
//! vertices in index order (hub, then rings from the inside out, each ring by angle) and
//! moves each one to the weighted barycenter of its neighbours, which exactly minimizes
//! the energy in that vertex. [`solve_dirichlet`] over-relaxes along the geodesic from the
//! old value through the barycenter when the target has unique geodesic extensions, and
//! keeps the plain barycenter whenever the extrapolated point would raise the local energy,
//! so the energy trace never increases.

use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::boundary::{mollify_step, probability_distance, BoundaryMap, BoundaryRepr};
use crate::cat0::{with_geometry, Geometry, TargetPoint, TargetSpace};
use crate::disk::{CircleMeasure, DiskPoint};
use crate::error::{Error, Result};
use crate::mesh::{DiskMesh, MeshParams};

pub const DEFAULT_REL_TOL: f64 = 1e-9;
pub const DEFAULT_MAX_ITER: usize = 100_000;

/// One target point per mesh vertex.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "FieldJson", into = "FieldJson")]
pub struct MapField {
    mesh: MeshParams,
    target: TargetSpace,
    values: Vec<TargetPoint>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct FieldJson {
    mesh: MeshParams,
    target: TargetSpace,
    values: Vec<TargetPoint>,
}

impl TryFrom<FieldJson> for MapField {
    type Error = Error;

    fn try_from(raw: FieldJson) -> Result<Self> {
        MapField::new(raw.mesh, raw.target, raw.values)
    }
}

impl From<MapField> for FieldJson {
    fn from(f: MapField) -> Self {
        FieldJson {
            mesh: f.mesh,
            target: f.target,
            values: f.values,
        }
    }
}

impl MapField {
    pub fn new(mesh: MeshParams, target: TargetSpace, values: Vec<TargetPoint>) -> Result<Self> {
        let expected = 1 + mesh.n_r * mesh.n_theta;
        if values.len() != expected {
            return Err(Error::invalid(format!(
                "field has {} values, mesh {}x{} has {expected} vertices",
                values.len(),
                mesh.n_r,
                mesh.n_theta
            )));
        }
        for v in &values {
            target.validate(v)?;
        }
        Ok(MapField {
            mesh,
            target,
            values,
        })
    }

    pub fn constant(mesh: &DiskMesh, target: TargetSpace, value: TargetPoint) -> Result<Self> {
        MapField::new(mesh.params(), target, vec![value; mesh.n_vertices()])
    }

    pub fn mesh_params(&self) -> MeshParams {
        self.mesh
    }

    pub fn target(&self) -> &TargetSpace {
        &self.target
    }

    pub fn values(&self) -> &[TargetPoint] {
        &self.values
    }

    pub fn value(&self, v: usize) -> &TargetPoint {
        &self.values[v]
    }

    fn check_mesh(&self, mesh: &DiskMesh) -> Result<()> {
        if self.mesh != mesh.params() {
            return Err(Error::invalid("field and mesh parameters differ"));
        }
        Ok(())
    }

    /// Value at a disk point by polar tensor interpolation with geodesic operations: along
    /// the two bounding rings first, then radially.
    pub fn eval(&self, mesh: &DiskMesh, x: &DiskPoint) -> Result<TargetPoint> {
        self.check_mesh(mesh)?;
        let s = mesh.stencil(x);
        let sp = &self.target;
        let a = sp.geodesic_point(&self.values[s.inner.0], &self.values[s.inner.1], s.g)?;
        let b = sp.geodesic_point(&self.values[s.outer.0], &self.values[s.outer.1], s.g)?;
        sp.geodesic_point(&a, &b, s.f)
    }

    /// Largest vertexwise distance to another field on the same mesh, optionally restricted
    /// to vertices with `|x| ≤ radius`.
    pub fn max_distance(
        &self,
        mesh: &DiskMesh,
        other: &MapField,
        radius: Option<f64>,
    ) -> Result<f64> {
        self.check_mesh(mesh)?;
        other.check_mesh(mesh)?;
        let mut sup = 0.0f64;
        for v in 0..mesh.n_vertices() {
            if radius.is_some_and(|r| mesh.radius(v) > r + 1e-12) {
                continue;
            }
            sup = sup.max(self.target.distance(&self.values[v], &other.values[v])?);
        }
        Ok(sup)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    pub final_displacement: f64,
    /// energy before the first sweep and after each sweep
    pub energy_trace: Vec<f64>,
    pub displacement_trace: Vec<f64>,
    pub omega: f64,
    pub tolerance: f64,
    /// leading entries of the traces that come from preconditioned tension steps
    pub tension_steps: usize,
    pub wall_time: f64,
}

impl SolveReport {
    /// CSV with columns `iteration,max_displacement,energy`; wall time is left out so the
    /// output is reproducible.
    pub fn to_csv(&self) -> String {
        let mut s = String::from("iteration,max_displacement,energy\n");
        for (i, (d, e)) in self
            .displacement_trace
            .iter()
            .zip(&self.energy_trace[1..])
            .enumerate()
        {
            s.push_str(&format!("{},{:e},{:e}\n", i + 1, d, e));
        }
        s
    }
}

#[derive(Debug)]
pub struct NonConvergence {
    pub report: SolveReport,
    pub field: MapField,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Omega {
    /// estimated from the spectrum of the scalar mesh Laplacian
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Init {
    /// every interior vertex at the uniform barycenter of the boundary values
    BoundaryBarycenter,
    /// random points in the convex hull of the boundary values
    Random(u64),
    /// start from a given field, interpolated when it lives on another mesh; its boundary
    /// values are replaced
    Field(MapField),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveOptions {
    /// absolute stopping tolerance on the max displacement per sweep; `None` means
    /// `rel_tol` times the diameter of the boundary values
    pub tol: Option<f64>,
    pub rel_tol: f64,
    pub max_iter: usize,
    pub omega: Omega,
    pub init: Init,
    /// run preconditioned tension steps before the relaxation sweeps, on targets with a
    /// tangent structure
    pub accelerate: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        SolveOptions {
            tol: None,
            rel_tol: DEFAULT_REL_TOL,
            max_iter: DEFAULT_MAX_ITER,
            omega: Omega::Auto,
            init: Init::BoundaryBarycenter,
            accelerate: true,
        }
    }
}

/// Normalized neighbour weights per vertex.
fn stencils(mesh: &DiskMesh) -> Vec<Vec<(usize, f64)>> {
    (0..mesh.n_interior())
        .map(|v| {
            let s = mesh.weight_sum(v);
            mesh.neighbors(v).iter().map(|&(u, w)| (u, w / s)).collect()
        })
        .collect()
}

fn energy_generic<G: Geometry>(g: &G, mesh: &DiskMesh, vals: &[G::Point]) -> f64 {
    mesh.edges()
        .iter()
        .map(|&(a, b, w)| {
            let d = g.dist(&vals[a], &vals[b]);
            w * d * d
        })
        .sum()
}

/// Cap on preconditioned tension steps per solve.
const MAX_TENSION_STEPS: usize = 60;

/// Preconditioned tension steps. The tension `τ_v = Σ_u w_vu log_{h_v}(h_u)` is mapped
/// through the inverse scalar Dirichlet Laplacian, one ambient coordinate at a time, and
/// each vertex moves along the exponential of the tangent projection of the result. For a
/// Euclidean target this is one exact linear solve; for curved targets it converges
/// linearly. Steps are halved until the energy does not increase, so the trace stays
/// monotone. Returns the number of steps taken.
fn tension_phase<G: Geometry>(
    g: &G,
    mesh: &DiskMesh,
    vals: &mut Vec<G::Point>,
    tol: f64,
    max_steps: usize,
    energy_trace: &mut Vec<f64>,
    displacement_trace: &mut Vec<f64>,
) -> usize {
    let k = g.ambient_dim();
    if k == 0 || max_steps == 0 {
        return 0;
    }
    let solver = mesh.dirichlet_solver();
    let n = mesh.n_interior();
    let mut e = *energy_trace.last().expect("initial energy recorded");
    let mut buf = vec![0.0; k];
    let mut steps = 0;
    let mut rhs = vec![vec![0.0; n]; k];
    let mut delta = vec![0.0; k];
    while steps < max_steps {
        for r in rhs.iter_mut() {
            r.iter_mut().for_each(|x| *x = 0.0);
        }
        for v in 0..n {
            for &(u, w) in mesh.neighbors(v) {
                g.log_ambient(&vals[v], &vals[u], &mut buf);
                for c in 0..k {
                    rhs[c][v] += w * buf[c];
                }
            }
        }
        for r in rhs.iter_mut() {
            solver.solve_homogeneous(r);
        }
        let mut t = 1.0;
        let mut accepted = None;
        for _ in 0..6 {
            let mut cand = vals.clone();
            for v in 0..n {
                for c in 0..k {
                    delta[c] = t * rhs[c][v];
                }
                cand[v] = g.exp_ambient(&vals[v], &delta);
            }
            let e_c = energy_generic(g, mesh, &cand);
            if e_c <= e {
                accepted = Some((cand, e_c));
                break;
            }
            t *= 0.5;
        }
        let Some((cand, e_c)) = accepted else { break };
        let disp = (0..n)
            .map(|v| g.dist(&vals[v], &cand[v]))
            .fold(0.0, f64::max);
        *vals = cand;
        e = e_c;
        steps += 1;
        energy_trace.push(e);
        displacement_trace.push(disp);
        if disp < tol {
            break;
        }
    }
    steps
}

/// One ordered sweep; returns the max displacement.
fn sweep_generic<G: Geometry>(
    g: &G,
    stencils: &[Vec<(usize, f64)>],
    vals: &mut [G::Point],
    omega: f64,
) -> f64 {
    let mut max_disp = 0.0f64;
    for (v, items) in stencils.iter().enumerate() {
        let old = vals[v].clone();
        let new = if omega == 1.0 {
            g.barycenter(vals, items, Some(&old))
        } else {
            g.sor_step(vals, items, &old, omega)
        };
        max_disp = max_disp.max(g.dist(&old, &new));
        vals[v] = new;
    }
    max_disp
}

pub fn energy(mesh: &DiskMesh, h: &MapField) -> Result<f64> {
    h.check_mesh(mesh)?;
    with_geometry!(h.target, g => {
        let vals = h.values.iter().map(|p| g.lift(p)).collect::<Result<Vec<_>>>()?;
        Ok(energy_generic(&g, mesh, &vals))
    })
}

/// One Gauss–Seidel barycenter sweep over the interior; boundary vertices are not touched.
/// Returns the max displacement.
pub fn relax_sweep(mesh: &DiskMesh, h: &mut MapField) -> Result<f64> {
    h.check_mesh(mesh)?;
    let st = stencils(mesh);
    let target = h.target.clone();
    with_geometry!(target, g => {
        let mut vals = h.values.iter().map(|p| g.lift(p)).collect::<Result<Vec<_>>>()?;
        let d = sweep_generic(&g, &st, &mut vals, 1.0);
        h.values = vals.into_iter().map(|p| g.lower(p)).collect();
        Ok(d)
    })
}

/// Over-relaxation factor `2 / (1 + sqrt(1 − ρ²))` from the Jacobi radius `ρ` of the
/// scalar Dirichlet Laplacian.
pub fn auto_omega(mesh: &DiskMesh) -> f64 {
    let rho = mesh.jacobi_radius();
    2.0 / (1.0 + (1.0 - rho * rho).max(0.0).sqrt())
}

fn initial_values<G: Geometry>(
    g: &G,
    mesh: &DiskMesh,
    boundary: &[G::Point],
    init: &Init,
) -> Result<Vec<G::Point>> {
    let n_int = mesh.n_interior();
    let mut vals: Vec<G::Point> = match init {
        Init::BoundaryBarycenter => {
            let w = 1.0 / boundary.len() as f64;
            let items: Vec<(usize, f64)> = (0..boundary.len()).map(|i| (i, w)).collect();
            vec![g.barycenter(boundary, &items, None); n_int]
        }
        Init::Random(seed) => {
            let mut rng = ChaCha8Rng::seed_from_u64(*seed);
            let n = boundary.len();
            (0..n_int)
                .map(|_| {
                    let a = &boundary[rng.gen_range(0..n)];
                    let b = &boundary[rng.gen_range(0..n)];
                    let c = &boundary[rng.gen_range(0..n)];
                    let ab = g.geodesic(a, b, rng.gen::<f64>());
                    g.geodesic(&ab, c, rng.gen::<f64>())
                })
                .collect()
        }
        Init::Field(f) if f.mesh == mesh.params() => f.values[..n_int]
            .iter()
            .map(|p| g.lift(p))
            .collect::<Result<_>>()?,
        Init::Field(f) => {
            // a field on another mesh is interpolated onto this one
            let other = DiskMesh::from_params(f.mesh)?;
            (0..n_int)
                .map(|v| {
                    let [x1, x2] = mesh.position(v);
                    g.lift(&f.eval(&other, &DiskPoint::new(x1, x2)?)?)
                })
                .collect::<Result<_>>()?
        }
    };
    vals.extend_from_slice(boundary);
    Ok(vals)
}

/// Solve the discrete Dirichlet problem with the given boundary ring values.
pub fn solve_dirichlet_values(
    mesh: &DiskMesh,
    target: &TargetSpace,
    boundary: &[TargetPoint],
    opts: &SolveOptions,
) -> Result<(MapField, SolveReport)> {
    if boundary.len() != mesh.n_theta() {
        return Err(Error::invalid(format!(
            "{} boundary values for {} boundary vertices",
            boundary.len(),
            mesh.n_theta()
        )));
    }
    let started = Instant::now();
    with_geometry!(target, g => {
        let bvals = boundary.iter().map(|p| g.lift(p)).collect::<Result<Vec<_>>>()?;
        let mut diam = 0.0f64;
        for (i, a) in bvals.iter().enumerate() {
            for b in &bvals[i + 1..] {
                diam = diam.max(g.dist(a, b));
            }
        }
        let tol = opts.tol.unwrap_or(opts.rel_tol * diam);
        if !(tol > 0.0) && diam > 0.0 {
            return Err(Error::invalid("tolerance must be positive"));
        }
        if diam == 0.0 {
            let field = MapField::constant(mesh, target.clone(), g.lower(bvals[0].clone()))?;
            let report = SolveReport {
                iterations: 0,
                final_displacement: 0.0,
                energy_trace: vec![0.0],
                displacement_trace: Vec::new(),
                omega: 1.0,
                tolerance: tol,
                tension_steps: 0,
                wall_time: started.elapsed().as_secs_f64(),
            };
            return Ok((field, report));
        }
        let omega = match opts.omega {
            Omega::Fixed(w) if !(w > 0.0 && w < 2.0) => {
                return Err(Error::invalid(format!("relaxation factor {w} outside (0, 2)")));
            }
            Omega::Fixed(w) => w,
            Omega::Auto => auto_omega(mesh),
        };
        let mut vals = initial_values(&g, mesh, &bvals, &opts.init)?;
        let st = stencils(mesh);
        let mut energy_trace = vec![energy_generic(&g, mesh, &vals)];
        let mut displacement_trace = Vec::new();
        let mut converged = false;
        let tension_steps = if opts.accelerate {
            tension_phase(
                &g,
                mesh,
                &mut vals,
                tol,
                MAX_TENSION_STEPS.min(opts.max_iter / 2),
                &mut energy_trace,
                &mut displacement_trace,
            )
        } else {
            0
        };
        for _ in tension_steps..opts.max_iter {
            let d = sweep_generic(&g, &st, &mut vals, omega);
            displacement_trace.push(d);
            energy_trace.push(energy_generic(&g, mesh, &vals));
            if d < tol {
                converged = true;
                break;
            }
        }
        let report = SolveReport {
            iterations: displacement_trace.len(),
            final_displacement: displacement_trace.last().copied().unwrap_or(0.0),
            energy_trace,
            displacement_trace,
            omega,
            tolerance: tol,
            tension_steps,
            wall_time: started.elapsed().as_secs_f64(),
        };
        let field = MapField {
            mesh: mesh.params(),
            target: target.clone(),
            values: vals.into_iter().map(|p| g.lower(p)).collect(),
        };
        if converged {
            Ok((field, report))
        } else {
            Err(Error::NotConverged(Box::new(NonConvergence { report, field })))
        }
    })
}

pub fn solve_dirichlet(
    mesh: &DiskMesh,
    phi: &BoundaryMap,
    opts: &SolveOptions,
) -> Result<(MapField, SolveReport)> {
    solve_dirichlet_values(mesh, phi.target(), &phi.boundary_values(mesh), opts)
}

/// Largest `d(h_i, barycenter of neighbours)` over interior vertices.
pub fn harmonicity_defect(mesh: &DiskMesh, h: &MapField) -> Result<f64> {
    h.check_mesh(mesh)?;
    let st = stencils(mesh);
    with_geometry!(h.target, g => {
        let vals = h.values.iter().map(|p| g.lift(p)).collect::<Result<Vec<_>>>()?;
        Ok(st
            .iter()
            .enumerate()
            .map(|(v, items)| g.dist(&vals[v], &g.barycenter(&vals, items, Some(&vals[v]))))
            .fold(0.0, f64::max))
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LinfStatus {
    Converged,
    /// the Cauchy trace stopped decreasing: the mesh cannot resolve the smallest windows
    DiscretizationLimit,
}

#[derive(Debug, Clone)]
pub struct LinfSolve {
    /// solution for the smallest window
    pub field: MapField,
    /// every window's solution, in schedule order
    pub fields: Vec<MapField>,
    /// `sup_{|x| ≤ ρ} d(h_n, h_{n+1})` over mesh vertices
    pub trace: Vec<f64>,
    /// `d(φ_n, φ_{n+1})` in probability, under `σ_0`
    pub boundary_distances: Vec<f64>,
    pub reports: Vec<SolveReport>,
    pub status: LinfStatus,
}

/// Solve for step data through a sequence of mollified problems with windows `w_n`, each
/// warm-started from the previous solution.
pub fn solve_linf(
    mesh: &DiskMesh,
    phi: &BoundaryMap,
    windows: &[f64],
    rho: f64,
    opts: &SolveOptions,
) -> Result<LinfSolve> {
    if !matches!(phi.repr(), BoundaryRepr::PiecewiseConstant(_)) {
        return Err(Error::invalid("solve_linf needs piecewise-constant data"));
    }
    if windows.is_empty() {
        return Err(Error::invalid("empty window schedule"));
    }
    if windows.windows(2).any(|w| !(w[1] < w[0])) || !(windows[windows.len() - 1] > 0.0) {
        return Err(Error::invalid(
            "windows must be positive and strictly decreasing",
        ));
    }
    if !(0.0..1.0).contains(&rho) {
        return Err(Error::invalid("inner radius must lie in [0, 1)"));
    }
    let sigma0 = CircleMeasure::uniform(1 << 12);
    let mut fields: Vec<MapField> = Vec::with_capacity(windows.len());
    let mut reports = Vec::with_capacity(windows.len());
    let mut maps: Vec<BoundaryMap> = Vec::with_capacity(windows.len());
    for &w in windows {
        let phi_n = mollify_step(phi, w)?;
        let mut o = opts.clone();
        if let Some(prev) = fields.last() {
            o.init = Init::Field(prev.clone());
        }
        let (f, r) = solve_dirichlet(mesh, &phi_n, &o)?;
        fields.push(f);
        reports.push(r);
        maps.push(phi_n);
    }
    let mut trace = Vec::with_capacity(windows.len().saturating_sub(1));
    let mut boundary_distances = Vec::with_capacity(trace.capacity());
    for n in 1..fields.len() {
        trace.push(fields[n - 1].max_distance(mesh, &fields[n], Some(rho))?);
        boundary_distances.push(probability_distance(&maps[n - 1], &maps[n], &sigma0)?);
    }
    let status = if trace.windows(2).all(|t| t[1] < t[0]) {
        LinfStatus::Converged
    } else {
        LinfStatus::DiscretizationLimit
    };
    Ok(LinfSolve {
        field: fields.last().expect("nonempty schedule").clone(),
        fields,
        trace,
        boundary_distances,
        reports,
        status,
    })
}

/// Largest `d(h_i, h_j) / |x_i − x_j|` over edges with both ends in `|x| ≤ 1 − r`.
pub fn interior_lipschitz_report(mesh: &DiskMesh, h: &MapField, r: f64) -> Result<f64> {
    h.check_mesh(mesh)?;
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::invalid("radius must lie in [0, 1]"));
    }
    let limit = 1.0 - r + 1e-12;
    let mut sup = 0.0f64;
    for &(a, b, _) in mesh.edges() {
        if mesh.radius(a) <= limit && mesh.radius(b) <= limit {
            let d = h.target.distance(&h.values[a], &h.values[b])?;
            sup = sup.max(d / mesh.edge_length(a, b));
        }
    }
    Ok(sup)
}

/// Random scalar field helper for tests and experiments: values `g(x)` at every vertex.
pub fn field_from_fn(
    mesh: &DiskMesh,
    target: &TargetSpace,
    f: impl Fn([f64; 2]) -> TargetPoint,
) -> Result<MapField> {
    MapField::new(
        mesh.params(),
        target.clone(),
        (0..mesh.n_vertices())
            .map(|v| f(mesh.position(v)))
            .collect(),
    )
}

/// Random field with interior values in the hull of the boundary values; boundary kept.
pub fn randomize_interior(mesh: &DiskMesh, h: &MapField, seed: u64) -> Result<MapField> {
    h.check_mesh(mesh)?;
    with_geometry!(h.target, g => {
        let b = h.values[mesh.boundary()].iter().map(|p| g.lift(p)).collect::<Result<Vec<_>>>()?;
        let vals = initial_values(&g, mesh, &b, &Init::Random(seed))?;
        Ok(MapField {
            mesh: h.mesh,
            target: h.target.clone(),
            values: vals.into_iter().map(|p| g.lower(p)).collect(),
        })
    })
}
