//! JSON-configured experiment runs.
//!
//! A config names one experiment kind, a target space, boundary data (inline or a path
//! relative to the config file), a mesh with refinement levels, tolerances, an output
//! directory and a seed. [`run_config`] validates it, runs the experiment and writes CSV,
//! JSON and SVG artifacts. Outputs contain no timings, so equal configs give equal bytes.
//!
//! Relative output directories are resolved against `$HARMAP_OUTPUT_ROOT` when it is set.

mod presets;
pub mod render;
mod suite;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::boundary::{mollify_step, BoundaryMap, BoundaryRepr};
use crate::cat0::{SpaceKind, TargetSpace};
use crate::disk::{poisson_integral, ArcSet, BoundaryPoint, NtPath};
use crate::error::{Error, Result};
use crate::fatou::{
    boundary_transform, poisson_transform, roundtrip_error, sample_angles, tube_convergence_report,
    TransformOptions, TubeSet,
};
use crate::mesh::DiskMesh;
use crate::solver::{harmonicity_defect, Init, MapField, Omega, SolveOptions, SolveReport};

pub use presets::{preset, PRESETS};
pub use suite::{barycenter_suite, SuiteInstance};

/// Environment variable holding the root for relative output directories.
pub const OUTPUT_ROOT_ENV: &str = "HARMAP_OUTPUT_ROOT";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    FatouScalar,
    Dirichlet,
    Roundtrip,
    Tube,
    BarycenterSuite,
}

impl ExperimentKind {
    pub fn name(self) -> &'static str {
        match self {
            ExperimentKind::FatouScalar => "fatou_scalar",
            ExperimentKind::Dirichlet => "dirichlet",
            ExperimentKind::Roundtrip => "roundtrip",
            ExperimentKind::Tube => "tube",
            ExperimentKind::BarycenterSuite => "barycenter_suite",
        }
    }
}

/// Boundary data: inline, or a path to a JSON file (relative to the config).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BoundarySource {
    Path(String),
    Inline(BoundaryMap),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MeshConfig {
    pub n_r: usize,
    pub n_theta: usize,
    /// number of meshes; level `l` doubles both counts `l` times
    #[serde(default = "one")]
    pub levels: usize,
}

impl MeshConfig {
    pub fn meshes(&self) -> Result<Vec<DiskMesh>> {
        if self.levels == 0 {
            return Err(Error::invalid("mesh.levels must be at least 1"));
        }
        (0..self.levels)
            .map(|l| {
                let f = 1usize
                    .checked_shl(l as u32)
                    .filter(|&f| f <= 1 << 12)
                    .ok_or_else(|| Error::invalid("too many mesh levels"))?;
                DiskMesh::new(self.n_r * f, self.n_theta * f)
            })
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    #[default]
    BoundaryBarycenter,
    /// random interior values drawn with the config seed
    Random,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Tolerances {
    #[serde(default = "default_rel_tol")]
    pub rel_tol: f64,
    #[serde(default)]
    pub abs_tol: Option<f64>,
    #[serde(default = "default_max_iter")]
    pub max_iter: usize,
    /// fixed relaxation factor in `(0, 2)`; estimated from the mesh when absent
    #[serde(default)]
    pub omega: Option<f64>,
    #[serde(default = "yes")]
    pub accelerate: bool,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            rel_tol: default_rel_tol(),
            abs_tol: None,
            max_iter: default_max_iter(),
            omega: None,
            accelerate: true,
        }
    }
}

/// Non-tangential sampling of boundary values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sampling {
    #[serde(default = "default_samples")]
    pub samples: usize,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "one_f")]
    pub aperture: f64,
    #[serde(default = "default_exclusion_deg")]
    pub exclusion_deg: f64,
    /// radius of the compact disk used in interior comparisons
    #[serde(default = "default_rho")]
    pub rho: f64,
}

impl Default for Sampling {
    fn default() -> Self {
        Sampling {
            samples: default_samples(),
            depth: default_depth(),
            aperture: 1.0,
            exclusion_deg: default_exclusion_deg(),
            rho: default_rho(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TubeConfig {
    /// windows `2^{−n}` for `n` in this inclusive range
    pub exponents: (u32, u32),
    pub exclusion_deg: f64,
    #[serde(default = "one_f")]
    pub aperture: f64,
    #[serde(default = "default_depth")]
    pub depth: usize,
    #[serde(default = "default_tube_samples")]
    pub samples: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteConfig {
    pub instances: usize,
    pub points: usize,
    pub directions: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            instances: 200,
            points: 5,
            directions: 20,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub experiment: ExperimentKind,
    pub target: TargetSpace,
    #[serde(default)]
    pub boundary: Option<BoundarySource>,
    #[serde(default)]
    pub mesh: Option<MeshConfig>,
    #[serde(default)]
    pub tolerances: Tolerances,
    #[serde(default)]
    pub init: InitKind,
    /// mollification windows for step data, strictly decreasing
    #[serde(default)]
    pub windows: Option<Vec<f64>>,
    #[serde(default)]
    pub sampling: Sampling,
    #[serde(default)]
    pub tube: Option<TubeConfig>,
    #[serde(default)]
    pub suite: Option<SuiteConfig>,
    pub output: String,
    pub seed: u64,
}

fn one() -> usize {
    1
}
fn one_f() -> f64 {
    1.0
}
fn yes() -> bool {
    true
}
fn default_rel_tol() -> f64 {
    crate::solver::DEFAULT_REL_TOL
}
fn default_max_iter() -> usize {
    crate::solver::DEFAULT_MAX_ITER
}
fn default_samples() -> usize {
    360
}
fn default_tube_samples() -> usize {
    90
}
fn default_depth() -> usize {
    12
}
fn default_exclusion_deg() -> f64 {
    2.0
}
fn default_rho() -> f64 {
    0.5
}

impl ExperimentConfig {
    /// Parse a config file and inline a boundary given by path.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::invalid(format!("cannot read config {}: {e}", path.display())))?;
        let mut cfg = ExperimentConfig::from_json(&text)?;
        if let Some(BoundarySource::Path(p)) = &cfg.boundary {
            let base = path.parent().unwrap_or(Path::new("."));
            let file = base.join(p);
            let text = std::fs::read_to_string(&file).map_err(|e| {
                Error::invalid(format!("cannot read boundary file {}: {e}", file.display()))
            })?;
            cfg.boundary = Some(BoundarySource::Inline(serde_json::from_str(&text)?));
        }
        Ok(cfg)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn solve_options(&self) -> SolveOptions {
        let t = &self.tolerances;
        SolveOptions {
            tol: t.abs_tol,
            rel_tol: t.rel_tol,
            max_iter: t.max_iter,
            omega: t.omega.map_or(Omega::Auto, Omega::Fixed),
            init: match self.init {
                InitKind::BoundaryBarycenter => Init::BoundaryBarycenter,
                InitKind::Random => Init::Random(self.seed),
            },
            accelerate: t.accelerate,
        }
    }

    pub fn transform_options(&self) -> TransformOptions {
        let mut o = TransformOptions {
            solve: self.solve_options(),
            rho: self.sampling.rho,
            ..TransformOptions::default()
        };
        if let Some(w) = &self.windows {
            o.windows = w.clone();
        }
        o
    }

    /// The boundary map; fails for a path that was not resolved by [`ExperimentConfig::load`].
    pub fn boundary_map(&self) -> Result<&BoundaryMap> {
        match &self.boundary {
            Some(BoundarySource::Inline(m)) => Ok(m),
            Some(BoundarySource::Path(p)) => {
                Err(Error::invalid(format!("boundary file {p} was not loaded")))
            }
            None => Err(Error::invalid(format!(
                "experiment {} needs a boundary",
                self.experiment.name()
            ))),
        }
    }

    fn meshes(&self) -> Result<Vec<DiskMesh>> {
        match &self.mesh {
            Some(m) => m.meshes(),
            None => Err(Error::invalid(format!(
                "experiment {} needs a mesh",
                self.experiment.name()
            ))),
        }
    }

    pub fn exclusion(&self) -> f64 {
        self.sampling.exclusion_deg.to_radians()
    }

    /// Checks everything that can be checked without solving.
    pub fn validate(&self) -> Result<()> {
        let t = &self.tolerances;
        if !(t.rel_tol > 0.0 && t.rel_tol.is_finite()) {
            return Err(Error::invalid("tolerances.rel_tol must be positive"));
        }
        if let Some(a) = t.abs_tol {
            if !(a > 0.0 && a.is_finite()) {
                return Err(Error::invalid("tolerances.abs_tol must be positive"));
            }
        }
        if t.max_iter == 0 {
            return Err(Error::invalid("tolerances.max_iter must be positive"));
        }
        if let Some(w) = t.omega {
            if !(w > 0.0 && w < 2.0) {
                return Err(Error::invalid("tolerances.omega must lie in (0, 2)"));
            }
        }
        let s = &self.sampling;
        if s.samples == 0 {
            return Err(Error::invalid("sampling.samples must be positive"));
        }
        if !(2..=50).contains(&s.depth) {
            return Err(Error::invalid("sampling.depth must lie in 2..=50"));
        }
        if !(s.aperture > 0.0 && s.aperture.is_finite()) {
            return Err(Error::invalid("sampling.aperture must be positive"));
        }
        if !(s.exclusion_deg >= 0.0 && s.exclusion_deg < 90.0) {
            return Err(Error::invalid("sampling.exclusion_deg must lie in [0, 90)"));
        }
        if !(0.0..1.0).contains(&s.rho) {
            return Err(Error::invalid("sampling.rho must lie in [0, 1)"));
        }
        if let Some(w) = &self.windows {
            if w.is_empty() || w.windows(2).any(|p| !(p[1] < p[0])) || !(w[w.len() - 1] > 0.0) {
                return Err(Error::invalid(
                    "windows must be positive and strictly decreasing",
                ));
            }
        }
        if let Some(b) = &self.boundary {
            let BoundarySource::Inline(m) = b else {
                return Err(Error::invalid("boundary file was not loaded"));
            };
            if m.target() != &self.target {
                return Err(Error::invalid(
                    "boundary target differs from the config target",
                ));
            }
        }
        if self.mesh.is_some() {
            self.meshes()?;
        }
        match self.experiment {
            ExperimentKind::FatouScalar => {
                if self.target.kind != (SpaceKind::Euclidean { dim: 1 }) {
                    return Err(Error::invalid(
                        "fatou_scalar needs a euclidean target of dimension 1",
                    ));
                }
                self.boundary_map()?.to_scalar()?;
            }
            ExperimentKind::Dirichlet | ExperimentKind::Roundtrip => {
                self.boundary_map()?;
                self.meshes()?;
            }
            ExperimentKind::Tube => {
                let phi = self.boundary_map()?;
                self.meshes()?;
                let tube = self
                    .tube
                    .as_ref()
                    .ok_or_else(|| Error::invalid("tube experiment needs a tube section"))?;
                if !matches!(phi.repr(), BoundaryRepr::PiecewiseConstant(_))
                    || phi.jumps().is_empty()
                {
                    return Err(Error::invalid("tube experiment needs step data with jumps"));
                }
                let (a, b) = tube.exponents;
                if !(1..=30).contains(&a) || b <= a || b > 30 {
                    return Err(Error::invalid(
                        "tube.exponents must be increasing within 1..=30",
                    ));
                }
                if !(2..=50).contains(&tube.depth) || tube.samples == 0 || !(tube.aperture > 0.0) {
                    return Err(Error::invalid(
                        "tube depth, samples and aperture must be positive",
                    ));
                }
                ArcSet::excluding(&phi.jumps(), tube.exclusion_deg.to_radians())?;
            }
            ExperimentKind::BarycenterSuite => {
                let s = self.suite.clone().unwrap_or_default();
                if s.instances == 0 || s.points == 0 || s.directions == 0 {
                    return Err(Error::invalid("suite counts must be positive"));
                }
            }
        }
        Ok(())
    }
}

/// Resolve an output directory against `$HARMAP_OUTPUT_ROOT`.
pub fn output_dir(output: &str) -> PathBuf {
    let p = PathBuf::from(output);
    match std::env::var_os(OUTPUT_ROOT_ENV) {
        Some(root) if p.is_relative() => PathBuf::from(root).join(p),
        _ => p,
    }
}

/// Files produced by one run, keyed by file name.
#[derive(Debug, Clone, PartialEq)]
pub struct Artifacts {
    pub files: BTreeMap<String, String>,
}

impl Artifacts {
    fn new() -> Self {
        Artifacts {
            files: BTreeMap::new(),
        }
    }

    fn add(&mut self, name: impl Into<String>, contents: String) {
        self.files.insert(name.into(), contents);
    }

    fn add_json(&mut self, name: &str, value: &impl Serialize) -> Result<()> {
        let mut s = serde_json::to_string_pretty(value)?;
        s.push('\n');
        self.add(name, s);
        Ok(())
    }

    pub fn summary(&self) -> Option<serde_json::Value> {
        self.files
            .get("summary.json")
            .and_then(|s| serde_json::from_str(s).ok())
    }

    pub fn write(&self, dir: &Path) -> Result<Vec<PathBuf>> {
        std::fs::create_dir_all(dir)?;
        let mut out = Vec::with_capacity(self.files.len());
        for (name, contents) in &self.files {
            let p = dir.join(name);
            std::fs::write(&p, contents)?;
            out.push(p);
        }
        Ok(out)
    }
}

/// Validate, run and write the artifacts of a config file; returns the written paths.
pub fn run_config(path: &Path) -> Result<Vec<PathBuf>> {
    let cfg = ExperimentConfig::load(path)?;
    run_and_write(&cfg)
}

pub fn run_and_write(cfg: &ExperimentConfig) -> Result<Vec<PathBuf>> {
    let art = run(cfg)?;
    art.write(&output_dir(&cfg.output))
}

/// Validate and run without touching the file system.
pub fn run(cfg: &ExperimentConfig) -> Result<Artifacts> {
    cfg.validate()?;
    let mut art = Artifacts::new();
    match cfg.experiment {
        ExperimentKind::FatouScalar => run_fatou_scalar(cfg, &mut art)?,
        ExperimentKind::Dirichlet => run_dirichlet(cfg, &mut art)?,
        ExperimentKind::Roundtrip => run_roundtrip(cfg, &mut art)?,
        ExperimentKind::Tube => run_tube(cfg, &mut art)?,
        ExperimentKind::BarycenterSuite => run_suite(cfg, &mut art)?,
    }
    art.add_json("config.json", cfg)?;
    Ok(art)
}

/// Exit status for a failed run: 3 for solver non-convergence, 2 otherwise.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::NotConverged(_) => 3,
        _ => 2,
    }
}

/// Machine-readable description of a failed run.
pub fn error_json(err: &Error) -> serde_json::Value {
    let kind = match err {
        Error::NotConverged(_) => "not_converged",
        Error::InvalidArgument(_) => "invalid_argument",
        Error::Domain(_) => "domain",
        Error::Json(_) => "config_parse",
        Error::Io(_) => "io",
    };
    let mut v = json!({
        "status": "error",
        "kind": kind,
        "exit_code": exit_code(err),
        "message": err.to_string(),
    });
    if let Error::NotConverged(nc) = err {
        v["iterations"] = json!(nc.report.iterations);
        v["final_displacement"] = json!(nc.report.final_displacement);
        v["tolerance"] = json!(nc.report.tolerance);
    }
    v
}

fn level_name(mesh: &DiskMesh) -> String {
    format!("{}x{}", mesh.n_r(), mesh.n_theta())
}

fn mesh_json(mesh: &DiskMesh) -> serde_json::Value {
    json!({"n_r": mesh.n_r(), "n_theta": mesh.n_theta()})
}

fn reports_csv(reports: &[SolveReport]) -> String {
    let mut s = String::from("stage,iteration,max_displacement,energy\n");
    for (k, r) in reports.iter().enumerate() {
        for line in r.to_csv().lines().skip(1) {
            s.push_str(&format!("{k},{line}\n"));
        }
    }
    s
}

fn report_json(r: &SolveReport) -> serde_json::Value {
    json!({
        "iterations": r.iterations,
        "tension_steps": r.tension_steps,
        "final_displacement": r.final_displacement,
        "tolerance": r.tolerance,
        "omega": r.omega,
        "energy": r.energy_trace.last(),
        "energy_monotone": r.energy_trace.windows(2).all(|w| w[1] <= w[0] * (1.0 + 1e-12) + 1e-15),
    })
}

/// Render when the target supports it; other targets simply get no picture.
fn maybe_render(
    art: &mut Artifacts,
    mesh: &DiskMesh,
    field: &MapField,
    phi: &BoundaryMap,
) -> Result<()> {
    if render::supports(field.target()) {
        art.add("render.svg", render::render_svg(mesh, field, phi)?);
    }
    Ok(())
}

fn run_fatou_scalar(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<()> {
    let phi = cfg.boundary_map()?;
    let scalar = phi.to_scalar()?;
    let s = &cfg.sampling;
    let set = ArcSet::excluding(&phi.jumps(), cfg.exclusion())?;
    let depths = [s.depth.saturating_sub(2).max(1), s.depth - 1, s.depth];
    let mut csv = format!(
        "theta,estimate,gap,phi,u_{},u_{},gap_prev,ratio,error\n",
        depths[0], depths[1]
    );
    let mut max_error = 0.0f64;
    let mut max_ratio = 0.0f64;
    let angles = set.sample_points(s.samples);
    for &t in &angles {
        let path = NtPath::new(BoundaryPoint::new(t), s.aperture, s.depth)?;
        let u: Vec<f64> = depths
            .iter()
            .map(|&m| poisson_integral(&scalar, &path.point(m)))
            .collect::<Result<_>>()?;
        let target = scalar.eval(t);
        let g1 = (u[1] - u[0]).abs();
        let g2 = (u[2] - u[1]).abs();
        let ratio = if g1 > 0.0 { g2 / g1 } else { 0.0 };
        let err = (u[2] - target).abs();
        max_error = max_error.max(err);
        max_ratio = max_ratio.max(ratio);
        csv.push_str(&format!(
            "{:.12},{:.12e},{:.6e},{},{:.12e},{:.12e},{:.6e},{:.6},{:.6e}\n",
            t, u[2], g2, target, u[0], u[1], g1, ratio, err
        ));
    }
    art.add("fatou_scalar.csv", csv);
    art.add_json(
        "summary.json",
        &json!({
            "experiment": "fatou_scalar",
            "samples": angles.len(),
            "depths": depths,
            "max_error": max_error,
            "max_gap_ratio": max_ratio,
        }),
    )
}

fn run_dirichlet(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<()> {
    let phi = cfg.boundary_map()?;
    let meshes = cfg.meshes()?;
    let mut levels = Vec::new();
    let mut prev: Option<MapField> = None;
    for mesh in &meshes {
        let mut opts = cfg.transform_options();
        if let (Some(p), InitKind::BoundaryBarycenter) = (&prev, cfg.init) {
            opts.solve.init = Init::Field(p.clone());
        }
        let res = poisson_transform(mesh, phi, &opts)?;
        let name = level_name(mesh);
        art.add(format!("solve_{name}.csv"), reports_csv(&res.reports));
        levels.push(json!({
            "mesh": mesh_json(mesh),
            "reports": res.reports.iter().map(report_json).collect::<Vec<_>>(),
            "energy": crate::solver::energy(mesh, &res.field)?,
            "harmonicity_defect": harmonicity_defect(mesh, &res.field)?,
            "linf_status": res.linf.as_ref().map(|l| l.status),
            "linf_trace": res.linf.as_ref().map(|l| l.trace.clone()),
        }));
        prev = Some(res.field);
    }
    let field = prev.expect("at least one level");
    let mesh = meshes.last().expect("at least one level");
    art.add("field.json", serde_json::to_string(&field)? + "\n");
    maybe_render(art, mesh, &field, phi)?;
    art.add_json(
        "summary.json",
        &json!({
            "experiment": "dirichlet",
            "target": cfg.target.kind_name(),
            "levels": levels,
        }),
    )
}

fn run_roundtrip(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<()> {
    let phi = cfg.boundary_map()?;
    let meshes = cfg.meshes()?;
    let s = &cfg.sampling;
    let angles = sample_angles(phi, s.samples, cfg.exclusion());
    let mut levels = Vec::new();
    let mut sups = Vec::new();
    let mut prev: Option<MapField> = None;
    for mesh in &meshes {
        let mut opts = cfg.transform_options();
        if let (Some(p), InitKind::BoundaryBarycenter) = (&prev, cfg.init) {
            opts.solve.init = Init::Field(p.clone());
        }
        let res = poisson_transform(mesh, phi, &opts)?;
        let rec = boundary_transform(mesh, &res.field, &angles, s.depth, s.aperture)?;
        let rep = roundtrip_error(phi, &rec, cfg.exclusion())?;
        let name = level_name(mesh);
        art.add(format!("roundtrip_{name}.csv"), rep.to_csv());
        art.add(format!("solve_{name}.csv"), reports_csv(&res.reports));
        sups.push(rep.sup_error);
        levels.push(json!({
            "mesh": mesh_json(mesh),
            "sup_error": rep.sup_error,
            "excluded_measure": rep.excluded_measure,
            "depth_requested": rec.depth_requested,
            "depth_used": rec.depth_used,
            "recovery_status": rec.status,
            "reports": res.reports.iter().map(report_json).collect::<Vec<_>>(),
            "linf_status": res.linf.as_ref().map(|l| l.status),
            "linf_trace": res.linf.as_ref().map(|l| l.trace.clone()),
        }));
        prev = Some(res.field);
    }
    let field = prev.expect("at least one level");
    let mesh = meshes.last().expect("at least one level");
    art.add("field.json", serde_json::to_string(&field)? + "\n");
    maybe_render(art, mesh, &field, phi)?;
    art.add_json(
        "summary.json",
        &json!({
            "experiment": "roundtrip",
            "target": cfg.target.kind_name(),
            "samples": angles.len(),
            "sup_errors": sups,
            "monotone": sups.windows(2).all(|w| w[1] < w[0]),
            "levels": levels,
        }),
    )
}

fn run_tube(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<()> {
    let phi = cfg.boundary_map()?;
    let tube_cfg = cfg.tube.as_ref().expect("validated");
    let (a, b) = tube_cfg.exponents;
    let windows: Vec<f64> = (a..=b).map(|n| 0.5f64.powi(n as i32)).collect();
    let phis: Vec<BoundaryMap> = windows
        .iter()
        .map(|&w| mollify_step(phi, w))
        .collect::<Result<_>>()?;
    let set = ArcSet::excluding(&phi.jumps(), tube_cfg.exclusion_deg.to_radians())?;
    let tube = TubeSet {
        set,
        aperture: tube_cfg.aperture,
        depth: tube_cfg.depth,
        samples: tube_cfg.samples,
    };
    let mut levels = Vec::new();
    for mesh in &cfg.meshes()? {
        let rep =
            tube_convergence_report(mesh, &phis, &tube, cfg.sampling.rho, &cfg.solve_options())?;
        let name = level_name(mesh);
        let mut csv = String::from("n,window,tube_sup,compact_sup\n");
        for (i, (t, c)) in rep.tube_sup.iter().zip(&rep.compact_sup).enumerate() {
            csv.push_str(&format!(
                "{},{:e},{:.12e},{:.12e}\n",
                a as usize + i,
                windows[i],
                t,
                c
            ));
        }
        art.add(format!("tube_{name}.csv"), csv);
        levels.push(json!({
            "mesh": mesh_json(mesh),
            "tube_sup": rep.tube_sup,
            "compact_sup": rep.compact_sup,
            "strictly_decreasing": rep.strictly_decreasing(),
            "depth_used": rep.depth_used,
            "complement_measure": rep.complement_measure,
        }));
    }
    art.add_json(
        "summary.json",
        &json!({
            "experiment": "tube",
            "exponents": [a, b],
            "complement_measure": tube.complement_measure(),
            "levels": levels,
        }),
    )
}

fn run_suite(cfg: &ExperimentConfig, art: &mut Artifacts) -> Result<()> {
    let s = cfg.suite.clone().unwrap_or_default();
    let rows = barycenter_suite(&cfg.target, &s, cfg.seed)?;
    let mut csv = String::from("instance,psi,min_directional_derivative\n");
    for (i, r) in rows.iter().enumerate() {
        csv.push_str(&format!("{i},{:.12e},{:.6e}\n", r.psi, r.min_derivative));
    }
    art.add("barycenter.csv", csv);
    let worst = rows
        .iter()
        .map(|r| r.min_derivative)
        .fold(f64::INFINITY, f64::min);
    art.add_json(
        "summary.json",
        &json!({
            "experiment": "barycenter_suite",
            "target": cfg.target.kind_name(),
            "instances": rows.len(),
            "min_directional_derivative": worst,
        }),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let bad = r#"{"experiment":"dirichlet","target":{"kind":"hyperbolic"},"output":"x","seed":1,"rel_tol":1e-9}"#;
        assert!(ExperimentConfig::from_json(bad).is_err());
        let bad = r#"{"experiment":"dirichlet","target":{"kind":"hyperbolic"},"output":"x","seed":1,"tolerances":{"reltol":1e-9}}"#;
        assert!(ExperimentConfig::from_json(bad).is_err());
    }

    #[test]
    fn small_mesh_fails_validation() {
        let mut cfg = ExperimentConfig::from_json(preset("dirichlet_disk_e2").unwrap()).unwrap();
        cfg.mesh = Some(MeshConfig {
            n_r: 8,
            n_theta: 4,
            levels: 1,
        });
        let err = cfg.validate().unwrap_err();
        assert_eq!(exit_code(&err), 2);
    }

    #[test]
    fn every_preset_validates() {
        for (name, text) in PRESETS {
            let cfg = ExperimentConfig::from_json(text).unwrap_or_else(|e| panic!("{name}: {e}"));
            cfg.validate().unwrap_or_else(|e| panic!("{name}: {e}"));
            assert_eq!(&cfg.output, name);
        }
    }

    #[test]
    fn output_root_applies_to_relative_paths() {
        assert_eq!(output_dir("/abs/dir"), PathBuf::from("/abs/dir"));
    }
}
