//! SVG rendering of a solved field.
//!
//! Left panel: the source disk, mesh vertices coloured by their target position. Right
//! panel: the target, with the images of the mesh rings and the boundary values coloured
//! by the arc they belong to. The hyperbolic plane is drawn in the Poincaré disk, `E²`
//! as is, and a metric tree through a radial planar layout.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use crate::boundary::{BoundaryMap, BoundaryRepr};
use crate::cat0::{hyperbolic, SpaceKind, TargetPoint, TargetSpace, TreeShape};
use crate::disk::wrap_angle;
use crate::error::{Error, Result};
use crate::mesh::DiskMesh;
use crate::solver::MapField;

const PANEL: f64 = 400.0;
const MARGIN: f64 = 20.0;
/// Radius of a panel's unit disk in pixels.
const SCALE: f64 = PANEL / 2.0 - MARGIN;
const MAX_RINGS: usize = 32;
const MAX_SECTORS: usize = 128;

const ARC_COLORS: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf",
];

pub fn supports(target: &TargetSpace) -> bool {
    matches!(
        target.kind,
        SpaceKind::Euclidean { dim: 2 } | SpaceKind::HyperbolicPlane | SpaceKind::MetricTree(_)
    )
}

/// Planar positions of tree vertices: vertex 0 at the origin, each subtree in its own
/// angular wedge, edges drawn with their metric length.
pub fn tree_layout(tree: &TreeShape) -> Vec<[f64; 2]> {
    let n = tree.n_vertices();
    let mut pos = vec![[0.0; 2]; n];
    let mut seen = vec![false; n];
    // (vertex, wedge start, wedge width)
    let mut stack = vec![(0usize, 0.0f64, TAU)];
    seen[0] = true;
    while let Some((x, a0, width)) = stack.pop() {
        let children: Vec<(usize, f64)> = tree
            .incident(x)
            .iter()
            .filter_map(|&e| {
                let ed = &tree.edges()[e];
                let y = if ed.u == x { ed.v } else { ed.u };
                (!seen[y]).then_some((y, ed.length))
            })
            .collect();
        let k = children.len().max(1) as f64;
        for (i, (y, len)) in children.into_iter().enumerate() {
            seen[y] = true;
            let start = a0 + width * i as f64 / k;
            let mid = start + width / (2.0 * k);
            pos[y] = [pos[x][0] + len * mid.cos(), pos[x][1] + len * mid.sin()];
            stack.push((y, start, width / k));
        }
    }
    pos
}

/// Planar coordinates of a target point: Poincaré disk, `E²` itself, or the tree layout.
pub fn project(target: &TargetSpace, p: &TargetPoint, layout: &[[f64; 2]]) -> Result<[f64; 2]> {
    match (&target.kind, p) {
        (SpaceKind::HyperbolicPlane, TargetPoint::Hyperbolic(h)) => Ok(hyperbolic::to_poincare(h)),
        (SpaceKind::Euclidean { dim: 2 }, TargetPoint::Euclidean(c)) => Ok([c[0], c[1]]),
        (SpaceKind::MetricTree(tree), TargetPoint::Tree(t)) => {
            let e = &tree.edges()[t.edge];
            let s = if e.length > 0.0 {
                t.offset / e.length
            } else {
                0.0
            };
            let (a, b) = (layout[e.u], layout[e.v]);
            Ok([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])])
        }
        _ => Err(Error::invalid(format!(
            "cannot render target {} (supported: euclidean of dimension 2, hyperbolic, tree)",
            target.kind_name()
        ))),
    }
}

/// Planar coordinates of every vertex value of `field`.
pub fn project_field(field: &MapField) -> Result<Vec<[f64; 2]>> {
    let layout = match &field.target().kind {
        SpaceKind::MetricTree(t) => tree_layout(t),
        _ => Vec::new(),
    };
    field
        .values()
        .iter()
        .map(|p| project(field.target(), p, &layout))
        .collect()
}

fn color_of(p: [f64; 2], scale: f64) -> String {
    let hue = (wrap_angle(p[1].atan2(p[0])) / TAU * 360.0).round();
    let r = ((p[0] * p[0] + p[1] * p[1]).sqrt() / scale).min(1.0);
    format!("hsl({hue:.0},70%,{:.0}%)", 85.0 - 50.0 * r)
}

fn arc_index(phi: &BoundaryMap, theta: f64) -> usize {
    match phi.repr() {
        BoundaryRepr::PiecewiseConstant(arcs) => arcs
            .iter()
            .position(|&(s, e, _)| {
                let len = crate::disk::arc_length(s, e);
                len >= TAU || wrap_angle(theta - s) < len
            })
            .unwrap_or(0),
        _ => ((wrap_angle(theta) / TAU) * 6.0).floor() as usize,
    }
}

/// Write the two-panel SVG for `field` with boundary data `phi`.
pub fn render_svg(mesh: &DiskMesh, field: &MapField, phi: &BoundaryMap) -> Result<String> {
    if field.mesh_params() != mesh.params() {
        return Err(Error::invalid("field was computed on a different mesh"));
    }
    if !supports(field.target()) {
        project(field.target(), &field.values()[0], &[])?;
    }
    let pts = project_field(field)?;
    // target panel scale: the Poincaré disk is already the unit disk; other targets are
    // scaled so the whole image fits
    let extent = match field.target().kind {
        SpaceKind::HyperbolicPlane => 1.0,
        SpaceKind::MetricTree(ref t) => tree_layout(t)
            .iter()
            .map(|p| p[0].hypot(p[1]))
            .fold(0.0, f64::max)
            .max(1e-12),
        _ => pts.iter().map(|p| p[0].hypot(p[1])).fold(1.0, f64::max),
    };
    let ring_step = mesh.n_r().div_ceil(MAX_RINGS);
    let sector_step = mesh.n_theta().div_ceil(MAX_SECTORS);

    let mut s = String::new();
    let w = 2.0 * PANEL;
    writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{w:.0}" height="{PANEL:.0}" viewBox="0 0 {w:.0} {PANEL:.0}">"#
    )
    .ok();
    writeln!(
        s,
        r#"<rect width="{w:.0}" height="{PANEL:.0}" fill="white"/>"#
    )
    .ok();

    // source panel
    let (cx, cy) = (PANEL / 2.0, PANEL / 2.0);
    writeln!(s, r#"<g id="source">"#).ok();
    writeln!(
        s,
        r#"<circle cx="{cx:.2}" cy="{cy:.2}" r="{SCALE:.2}" fill="none" stroke="black" stroke-width="1"/>"#
    )
    .ok();
    let mut verts = vec![0usize];
    for ring in (ring_step..=mesh.n_r()).step_by(ring_step) {
        for j in (0..mesh.n_theta()).step_by(sector_step) {
            verts.push(mesh.index(ring, j));
        }
    }
    if mesh.n_r() % ring_step != 0 {
        for j in (0..mesh.n_theta()).step_by(sector_step) {
            verts.push(mesh.index(mesh.n_r(), j));
        }
    }
    for &v in &verts {
        let [x, y] = mesh.position(v);
        writeln!(
            s,
            r#"<circle cx="{:.2}" cy="{:.2}" r="2" fill="{}"/>"#,
            cx + SCALE * x,
            cy - SCALE * y,
            color_of(pts[v], extent)
        )
        .ok();
    }
    writeln!(s, "</g>").ok();

    // target panel
    let (tx, ty) = (PANEL + PANEL / 2.0, PANEL / 2.0);
    let k = SCALE / extent;
    let map = |p: [f64; 2]| (tx + k * p[0], ty - k * p[1]);
    writeln!(s, r#"<g id="target">"#).ok();
    match &field.target().kind {
        SpaceKind::HyperbolicPlane => {
            writeln!(
                s,
                r#"<circle cx="{tx:.2}" cy="{ty:.2}" r="{SCALE:.2}" fill="none" stroke="black" stroke-width="1"/>"#
            )
            .ok();
        }
        SpaceKind::MetricTree(t) => {
            let layout = tree_layout(t);
            for e in t.edges() {
                let (a, b) = (map(layout[e.u]), map(layout[e.v]));
                writeln!(
                    s,
                    r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#bbbbbb" stroke-width="3"/>"##,
                    a.0, a.1, b.0, b.1
                )
                .ok();
            }
        }
        _ => {}
    }
    writeln!(s, r#"<g id="image">"#).ok();
    let spread = pts
        .iter()
        .map(|p| (p[0] - pts[0][0]).hypot(p[1] - pts[0][1]))
        .fold(0.0, f64::max);
    if spread <= 1e-12 * extent {
        let (x, y) = map(pts[0]);
        writeln!(
            s,
            r#"<circle class="constant" cx="{x:.2}" cy="{y:.2}" r="4" fill="black"/>"#
        )
        .ok();
    } else {
        for ring in (ring_step..mesh.n_r()).step_by(ring_step) {
            let mut line = String::new();
            for j in 0..=mesh.n_theta() {
                let (x, y) = map(pts[mesh.index(ring, j % mesh.n_theta())]);
                write!(line, "{x:.2},{y:.2} ").ok();
            }
            writeln!(
                s,
                r#"<polyline points="{}" fill="none" stroke="black" stroke-width="0.6"/>"#,
                line.trim_end()
            )
            .ok();
        }
    }
    writeln!(s, "</g>").ok();
    writeln!(s, r#"<g id="boundary">"#).ok();
    let b0 = mesh.boundary().start;
    for (j, theta) in mesh.boundary_angles().into_iter().enumerate() {
        let (x, y) = map(pts[b0 + j]);
        let c = ARC_COLORS[arc_index(phi, theta) % ARC_COLORS.len()];
        writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3" fill="{c}"/>"#).ok();
        // matching marks on the source circle
        let (sx, sy) = (
            cx + (SCALE + 6.0) * theta.cos(),
            cy - (SCALE + 6.0) * theta.sin(),
        );
        writeln!(s, r#"<circle cx="{sx:.2}" cy="{sy:.2}" r="2" fill="{c}"/>"#).ok();
    }
    writeln!(s, "</g>").ok();
    writeln!(s, "</g>").ok();
    writeln!(s, "</svg>").ok();
    Ok(s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cat0::TargetSpace;

    #[test]
    fn constant_field_is_one_dot() {
        let mesh = DiskMesh::new(4, 16).unwrap();
        let sp = TargetSpace::hyperbolic();
        let y = TargetPoint::Hyperbolic(hyperbolic::from_polar(0.3, 1.0));
        let f = MapField::constant(&mesh, sp.clone(), y.clone()).unwrap();
        let phi = BoundaryMap::constant(sp, y).unwrap();
        let svg = render_svg(&mesh, &f, &phi).unwrap();
        assert_eq!(svg.matches("class=\"constant\"").count(), 1);
        assert!(!svg.contains("<polyline"));
    }

    #[test]
    fn euclidean_three_is_unsupported() {
        let mesh = DiskMesh::new(4, 16).unwrap();
        let sp = TargetSpace::euclidean(3).unwrap();
        let y = TargetPoint::euclidean(&[0.0, 0.0, 0.0]);
        let f = MapField::constant(&mesh, sp.clone(), y.clone()).unwrap();
        let phi = BoundaryMap::constant(sp, y).unwrap();
        assert!(matches!(
            render_svg(&mesh, &f, &phi),
            Err(Error::InvalidArgument(_))
        ));
    }

    #[test]
    fn star_layout_has_arm_lengths() {
        let t = TreeShape::star(3, 2.0).unwrap();
        let pos = tree_layout(&t);
        for v in 1..4 {
            assert!((pos[v][0].hypot(pos[v][1]) - 2.0).abs() < 1e-12);
        }
    }
}
