//! Boundary transform, Poisson transform and the experiments built from them.
//!
//! The Poisson transform solves the discrete Dirichlet problem (through a mollification
//! schedule for step data). The boundary transform samples a solved field along
//! non-tangential paths. Their composition should return the boundary data away from its
//! jumps.

use serde::{Deserialize, Serialize};

use crate::boundary::{probability_distance, BoundaryMap, BoundaryRepr};
use crate::cat0::TargetPoint;
use crate::disk::{angular_distance, nt_sample, ArcSet, BoundaryPoint, CircleMeasure, NtPath};
use crate::error::{Error, Result};
use crate::mesh::DiskMesh;
use crate::solver::{
    solve_dirichlet, solve_linf, Init, LinfSolve, LinfStatus, MapField, SolveOptions, SolveReport,
};

/// Default half-width of the excluded neighbourhood of each jump, in radians (2°).
pub const DEFAULT_EXCLUSION: f64 = 2.0 * std::f64::consts::PI / 180.0;

/// Deepest path index the mesh resolves: the largest `m` with `1 − r_m = 2^{−m} ≥ Δr/2`,
/// so the last interior ring keeps at least half the interpolation weight.
pub fn resolved_depth(mesh: &DiskMesh) -> usize {
    let mut m = 1;
    while 0.5f64.powi(m as i32 + 1) >= 0.5 * mesh.dr() {
        m += 1;
    }
    m
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RecoveryStatus {
    Ok,
    /// the requested depth went past the mesh resolution and was cut back
    DepthTruncated,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryRecovery {
    pub angles: Vec<f64>,
    pub recovered: Vec<TargetPoint>,
    pub gaps: Vec<f64>,
    pub depth_requested: usize,
    pub depth_used: usize,
    pub aperture: f64,
    pub status: RecoveryStatus,
}

/// `β h` at each angle: the field value at the deepest resolved point of the cone path,
/// plus the distance to the value one level up.
pub fn boundary_transform(
    mesh: &DiskMesh,
    h: &MapField,
    angles: &[f64],
    depth: usize,
    aperture: f64,
) -> Result<BoundaryRecovery> {
    let limit = resolved_depth(mesh);
    let depth_used = depth.min(limit).max(2);
    let status = if depth > limit {
        RecoveryStatus::DepthTruncated
    } else {
        RecoveryStatus::Ok
    };
    let space = h.target();
    let mut recovered = Vec::with_capacity(angles.len());
    let mut gaps = Vec::with_capacity(angles.len());
    for &t in angles {
        let path = NtPath::new(BoundaryPoint::new(t), aperture, depth_used)?;
        let est = nt_sample(
            &path,
            |x| h.eval(mesh, x),
            |a, b| space.distance(a, b).unwrap_or(f64::NAN),
        )?;
        recovered.push(est.estimate);
        gaps.push(est.gap);
    }
    Ok(BoundaryRecovery {
        angles: angles.to_vec(),
        recovered,
        gaps,
        depth_requested: depth,
        depth_used,
        aperture,
        status,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformOptions {
    pub solve: SolveOptions,
    /// mollification windows for step data, strictly decreasing
    pub windows: Vec<f64>,
    /// radius of the compact set for Cauchy traces
    pub rho: f64,
}

impl Default for TransformOptions {
    fn default() -> Self {
        TransformOptions {
            solve: SolveOptions::default(),
            windows: vec![0.08, 0.04, 0.02],
            rho: 0.5,
        }
    }
}

#[derive(Debug, Clone)]
pub struct PoissonResult {
    pub field: MapField,
    pub reports: Vec<SolveReport>,
    pub linf: Option<LinfSolve>,
}

/// `P φ`: a direct Dirichlet solve for continuous data, the mollification schedule for
/// step data.
pub fn poisson_transform(
    mesh: &DiskMesh,
    phi: &BoundaryMap,
    opts: &TransformOptions,
) -> Result<PoissonResult> {
    match phi.repr() {
        BoundaryRepr::PiecewiseConstant(_) if !phi.jumps().is_empty() => {
            let windows: Vec<f64> = opts.windows.clone();
            let linf = solve_linf(mesh, phi, &windows, opts.rho, &opts.solve)?;
            Ok(PoissonResult {
                field: linf.field.clone(),
                reports: linf.reports.clone(),
                linf: Some(linf),
            })
        }
        _ => {
            let (field, report) = solve_dirichlet(mesh, phi, &opts.solve)?;
            Ok(PoissonResult {
                field,
                reports: vec![report],
                linf: None,
            })
        }
    }
}

/// Angles in `samples` uniform positions, offset by half a step, that are at least
/// `exclusion` away from every jump of `phi`.
pub fn sample_angles(phi: &BoundaryMap, samples: usize, exclusion: f64) -> Vec<f64> {
    let jumps = phi.jumps();
    (0..samples)
        .map(|i| std::f64::consts::TAU * (i as f64 + 0.5) / samples as f64)
        .filter(|&t| jumps.iter().all(|&j| angular_distance(t, j) >= exclusion))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripReport {
    pub sup_error: f64,
    pub errors: Vec<f64>,
    /// σ_0 measure of the excluded neighbourhoods of the jumps
    pub excluded_measure: f64,
    pub recovery: BoundaryRecovery,
}

impl RoundtripReport {
    /// CSV with columns `angle_deg, recovered coordinates..., gap, error`.
    pub fn to_csv(&self) -> String {
        let mut s = String::new();
        let coords = |p: &TargetPoint| -> Vec<f64> {
            match p {
                TargetPoint::Euclidean(c) => c.clone(),
                TargetPoint::Hyperbolic(c) => c.to_vec(),
                TargetPoint::Tree(t) => vec![t.edge as f64, t.offset],
            }
        };
        let header: Vec<String> = match self.recovery.recovered.first() {
            Some(TargetPoint::Tree(_)) => vec!["edge".into(), "offset".into()],
            Some(TargetPoint::Hyperbolic(_)) => vec!["x0".into(), "x1".into(), "x2".into()],
            Some(p) => (0..coords(p).len()).map(|i| format!("y{i}")).collect(),
            None => Vec::new(),
        };
        s.push_str("angle_deg,");
        for h in &header {
            s.push_str(h);
            s.push(',');
        }
        s.push_str("gap,error\n");
        for i in 0..self.errors.len() {
            s.push_str(&format!("{:.6}", self.recovery.angles[i].to_degrees()));
            for c in coords(&self.recovery.recovered[i]) {
                s.push_str(&format!(",{c:.12e}"));
            }
            s.push_str(&format!(
                ",{:.6e},{:.6e}\n",
                self.recovery.gaps[i], self.errors[i]
            ));
        }
        s
    }
}

/// `d(φ(θ), (βPφ)(θ))` at the recovery angles.
pub fn roundtrip_error(
    phi: &BoundaryMap,
    recovery: &BoundaryRecovery,
    exclusion: f64,
) -> Result<RoundtripReport> {
    let mut errors = Vec::with_capacity(recovery.angles.len());
    for (t, y) in recovery.angles.iter().zip(&recovery.recovered) {
        errors.push(phi.target().distance(&phi.eval(*t), y)?);
    }
    let n_jumps = phi.jumps().len() as f64;
    let excluded = (n_jumps * 2.0 * exclusion / std::f64::consts::TAU).min(1.0);
    Ok(RoundtripReport {
        sup_error: errors.iter().cloned().fold(0.0, f64::max),
        errors,
        excluded_measure: excluded,
        recovery: recovery.clone(),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoundtripParams {
    pub transform: TransformOptions,
    pub samples: usize,
    pub depth: usize,
    pub aperture: f64,
    pub exclusion: f64,
}

impl Default for RoundtripParams {
    fn default() -> Self {
        RoundtripParams {
            transform: TransformOptions::default(),
            samples: 360,
            depth: 12,
            aperture: 1.0,
            exclusion: DEFAULT_EXCLUSION,
        }
    }
}

/// Full pipeline `φ ↦ d(φ, βPφ)` on one mesh.
pub fn roundtrip(
    mesh: &DiskMesh,
    phi: &BoundaryMap,
    params: &RoundtripParams,
) -> Result<(RoundtripReport, PoissonResult)> {
    let solved = poisson_transform(mesh, phi, &params.transform)?;
    let angles = sample_angles(phi, params.samples, params.exclusion);
    let rec = boundary_transform(mesh, &solved.field, &angles, params.depth, params.aperture)?;
    Ok((roundtrip_error(phi, &rec, params.exclusion)?, solved))
}

/// Compact boundary set `F` with the cone aperture and the path depths defining the tube.
#[derive(Debug, Clone, PartialEq)]
pub struct TubeSet {
    pub set: ArcSet,
    pub aperture: f64,
    pub depth: usize,
    pub samples: usize,
}

impl TubeSet {
    pub fn complement_measure(&self) -> f64 {
        self.set.complement_mass(&CircleMeasure::uniform(1))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TubeReport {
    /// `sup` over tube sample points of `d(h_n, h_last)`, one per map but the last
    pub tube_sup: Vec<f64>,
    /// the same over mesh vertices with `|x| ≤ ρ`
    pub compact_sup: Vec<f64>,
    pub complement_measure: f64,
    pub depth_used: usize,
}

impl TubeReport {
    pub fn strictly_decreasing(&self) -> bool {
        self.tube_sup.windows(2).all(|w| w[1] < w[0])
    }
}

/// Solve each map of the sequence (warm-starting from the previous solution) and compare
/// every solution with the last one on the tube over `tube.set`.
pub fn tube_convergence_report(
    mesh: &DiskMesh,
    phis: &[BoundaryMap],
    tube: &TubeSet,
    rho: f64,
    opts: &SolveOptions,
) -> Result<TubeReport> {
    if phis.len() < 2 {
        return Err(Error::invalid("need at least two maps in the sequence"));
    }
    let mut fields: Vec<MapField> = Vec::with_capacity(phis.len());
    for phi in phis {
        let mut o = opts.clone();
        if let Some(prev) = fields.last() {
            o.init = Init::Field(prev.clone());
        }
        fields.push(solve_dirichlet(mesh, phi, &o)?.0);
    }
    let depth_used = tube.depth.min(resolved_depth(mesh));
    let mut points = Vec::new();
    for xi in tube.set.sample_points(tube.samples) {
        let path = NtPath::new(BoundaryPoint::new(xi), tube.aperture, depth_used.max(2))?;
        points.extend(path.points());
    }
    let last = fields.last().expect("at least two fields");
    let space = last.target();
    let mut tube_sup = Vec::with_capacity(phis.len() - 1);
    let mut compact_sup = Vec::with_capacity(phis.len() - 1);
    let last_vals: Vec<TargetPoint> = points
        .iter()
        .map(|x| last.eval(mesh, x))
        .collect::<Result<_>>()?;
    for f in &fields[..fields.len() - 1] {
        let mut sup = 0.0f64;
        for (x, y) in points.iter().zip(&last_vals) {
            sup = sup.max(space.distance(&f.eval(mesh, x)?, y)?);
        }
        tube_sup.push(sup);
        compact_sup.push(f.max_distance(mesh, last, Some(rho))?);
    }
    Ok(TubeReport {
        tube_sup,
        compact_sup,
        complement_measure: tube.complement_measure(),
        depth_used,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct InjectivityReport {
    pub boundary_distance: f64,
    pub interior_sup: f64,
    /// `sup P` over `|x| ≤ ρ`, that is `(1 + ρ)/(1 − ρ)`
    pub c_k: f64,
    pub delta_y: f64,
    /// `(1 + C_K δ_Y) · boundary_distance`
    pub bound: f64,
}

/// Compare two boundary maps in probability with their harmonic extensions on `|x| ≤ ρ`.
pub fn injectivity_check(
    mesh: &DiskMesh,
    phi1: &BoundaryMap,
    phi2: &BoundaryMap,
    rho: f64,
    opts: &TransformOptions,
) -> Result<InjectivityReport> {
    if phi1.target() != phi2.target() {
        return Err(Error::invalid("boundary maps have different targets"));
    }
    let boundary_distance = probability_distance(phi1, phi2, &CircleMeasure::uniform(1 << 12))?;
    let h1 = poisson_transform(mesh, phi1, opts)?.field;
    let h2 = poisson_transform(mesh, phi2, opts)?.field;
    let interior_sup = h1.max_distance(mesh, &h2, Some(rho))?;
    let mut all = phi1.values();
    all.extend(phi2.values());
    let delta_y = match phi1.target().diameter_hint {
        Some(d) => d,
        None => phi1.target().diameter_of(&all)?,
    };
    let c_k = (1.0 + rho) / (1.0 - rho);
    Ok(InjectivityReport {
        boundary_distance,
        interior_sup,
        c_k,
        delta_y,
        bound: (1.0 + c_k * delta_y) * boundary_distance,
    })
}

/// Status of a step-data solve for reports.
pub fn linf_status(result: &PoissonResult) -> Option<LinfStatus> {
    result.linf.as_ref().map(|l| l.status)
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::cat0::{hyperbolic, TargetSpace};

    #[test]
    fn resolved_depth_examples() {
        assert_eq!(resolved_depth(&DiskMesh::new(32, 64).unwrap()), 6);
        assert_eq!(resolved_depth(&DiskMesh::new(128, 256).unwrap()), 8);
        assert_eq!(resolved_depth(&DiskMesh::new(40, 64).unwrap()), 6);
    }

    #[test]
    fn constant_roundtrip_is_exact() {
        let mesh = DiskMesh::new(8, 16).unwrap();
        let y = TargetPoint::Hyperbolic(hyperbolic::from_polar(0.7, 0.2));
        let phi = BoundaryMap::constant(TargetSpace::hyperbolic(), y.clone()).unwrap();
        let (rep, _) = roundtrip(&mesh, &phi, &RoundtripParams::default()).unwrap();
        assert_eq!(rep.sup_error, 0.0);
        assert!(rep.recovery.gaps.iter().all(|g| *g == 0.0));
        assert_eq!(rep.recovery.status, RecoveryStatus::DepthTruncated);
    }

    #[test]
    fn sample_angles_skip_jumps() {
        let sp = TargetSpace::euclidean(1).unwrap();
        let phi = BoundaryMap::steps(
            sp,
            &[0.0, PI],
            vec![
                TargetPoint::euclidean(&[0.0]),
                TargetPoint::euclidean(&[1.0]),
            ],
        )
        .unwrap();
        let a = sample_angles(&phi, 360, DEFAULT_EXCLUSION);
        assert!(a
            .iter()
            .all(|&t| angular_distance(t, 0.0) >= DEFAULT_EXCLUSION));
        assert_eq!(a.len(), 360 - 8);
    }
}
