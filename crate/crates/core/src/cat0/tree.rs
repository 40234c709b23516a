//! Finite metric trees.
//!
//! A point is an `(edge, offset)` pair with the offset measured from the edge's first
//! endpoint. All-pairs vertex distances and next-hop tables are computed once when the
//! shape is built, so distances, geodesics and barycenters are table lookups plus a walk.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Offsets this close to an edge end are snapped onto the vertex.
const SNAP_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TreeEdge {
    pub u: usize,
    pub v: usize,
    pub length: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TreePoint {
    pub edge: usize,
    pub offset: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
struct TreeShapeJson {
    vertices: usize,
    edges: Vec<(usize, usize, f64)>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "TreeShapeJson", into = "TreeShapeJson")]
pub struct TreeShape {
    n_vertices: usize,
    edges: Vec<TreeEdge>,
    incident: Vec<Vec<usize>>,
    /// row-major `n × n` vertex distances
    dist: Vec<f64>,
    /// row-major `n × n` first step `(vertex, edge)` on the path from row to column
    next: Vec<(usize, usize)>,
}

impl TryFrom<TreeShapeJson> for TreeShape {
    type Error = Error;

    fn try_from(raw: TreeShapeJson) -> Result<Self> {
        let edges = raw
            .edges
            .into_iter()
            .map(|(u, v, length)| TreeEdge { u, v, length })
            .collect();
        TreeShape::new(raw.vertices, edges)
    }
}

impl From<TreeShape> for TreeShapeJson {
    fn from(t: TreeShape) -> Self {
        TreeShapeJson {
            vertices: t.n_vertices,
            edges: t.edges.iter().map(|e| (e.u, e.v, e.length)).collect(),
        }
    }
}

impl TreeShape {
    pub fn new(n_vertices: usize, edges: Vec<TreeEdge>) -> Result<Self> {
        if n_vertices < 2 {
            return Err(Error::invalid("a tree needs at least two vertices"));
        }
        if edges.len() != n_vertices - 1 {
            return Err(Error::invalid(format!(
                "a tree on {n_vertices} vertices has {} edges, got {}",
                n_vertices - 1,
                edges.len()
            )));
        }
        let mut incident = vec![Vec::new(); n_vertices];
        for (id, e) in edges.iter().enumerate() {
            if e.u >= n_vertices || e.v >= n_vertices || e.u == e.v {
                return Err(Error::invalid(format!("edge {id} has invalid endpoints")));
            }
            if !(e.length > 0.0 && e.length.is_finite()) {
                return Err(Error::invalid(format!("edge {id} length must be positive")));
            }
            incident[e.u].push(id);
            incident[e.v].push(id);
        }

        let n = n_vertices;
        let mut dist = vec![f64::INFINITY; n * n];
        let mut next = vec![(usize::MAX, usize::MAX); n * n];
        let mut stack = Vec::new();
        for src in 0..n {
            // depth-first from src; `first` records the first hop out of src
            dist[src * n + src] = 0.0;
            stack.push((src, usize::MAX, (usize::MAX, usize::MAX)));
            while let Some((x, parent_edge, first)) = stack.pop() {
                for &eid in &incident[x] {
                    if eid == parent_edge {
                        continue;
                    }
                    let e = &edges[eid];
                    let y = if e.u == x { e.v } else { e.u };
                    if dist[src * n + y].is_finite() {
                        return Err(Error::invalid("edge list contains a cycle"));
                    }
                    dist[src * n + y] = dist[src * n + x] + e.length;
                    let hop = if x == src { (y, eid) } else { first };
                    next[src * n + y] = hop;
                    stack.push((y, eid, hop));
                }
            }
            if dist[src * n..(src + 1) * n].iter().any(|d| d.is_infinite()) {
                return Err(Error::invalid("tree is not connected"));
            }
        }
        Ok(TreeShape {
            n_vertices,
            edges,
            incident,
            dist,
            next,
        })
    }

    /// Star with `arms` edges of equal length around vertex 0; leaf `i` is vertex `i + 1`.
    pub fn star(arms: usize, length: f64) -> Result<Self> {
        let edges = (0..arms)
            .map(|i| TreeEdge {
                u: 0,
                v: i + 1,
                length,
            })
            .collect();
        TreeShape::new(arms + 1, edges)
    }

    pub fn n_vertices(&self) -> usize {
        self.n_vertices
    }

    pub fn edges(&self) -> &[TreeEdge] {
        &self.edges
    }

    pub fn incident(&self, v: usize) -> &[usize] {
        &self.incident[v]
    }

    pub fn vertex_distance(&self, a: usize, b: usize) -> f64 {
        self.dist[a * self.n_vertices + b]
    }

    pub fn diameter(&self) -> f64 {
        self.dist.iter().cloned().fold(0.0, f64::max)
    }

    pub fn is_valid(&self, p: &TreePoint) -> bool {
        p.edge < self.edges.len()
            && p.offset.is_finite()
            && p.offset >= 0.0
            && p.offset <= self.edges[p.edge].length
    }

    /// Canonical point for vertex `v`: lowest incident edge id, at the end touching `v`.
    pub fn vertex_point(&self, v: usize) -> TreePoint {
        let eid = self.incident[v][0];
        let e = &self.edges[eid];
        TreePoint {
            edge: eid,
            offset: if e.u == v { 0.0 } else { e.length },
        }
    }

    /// Clamp onto the edge and snap vertex positions to their canonical representation.
    pub fn canonical(&self, p: TreePoint) -> TreePoint {
        let e = &self.edges[p.edge];
        let snap = SNAP_TOL * e.length.max(1.0);
        if p.offset <= snap {
            self.vertex_point(e.u)
        } else if p.offset >= e.length - snap {
            self.vertex_point(e.v)
        } else {
            p
        }
    }

    pub fn point(&self, edge: usize, offset: f64) -> Result<TreePoint> {
        let p = TreePoint { edge, offset };
        if !self.is_valid(&p) {
            return Err(Error::invalid(format!(
                "tree point (edge {edge}, offset {offset}) is not on the tree"
            )));
        }
        Ok(self.canonical(p))
    }

    #[inline]
    fn ends(&self, p: &TreePoint) -> [(usize, f64); 2] {
        let e = &self.edges[p.edge];
        [(e.u, p.offset), (e.v, e.length - p.offset)]
    }

    /// Distance from `p` to vertex `x`.
    #[inline]
    pub fn distance_to_vertex(&self, p: &TreePoint, x: usize) -> f64 {
        let n = self.n_vertices;
        let [(a, da), (b, db)] = self.ends(p);
        (da + self.dist[a * n + x]).min(db + self.dist[b * n + x])
    }

    /// Exit vertex of `p`, entry vertex of `q` and the total length of the path between them.
    fn route(&self, p: &TreePoint, q: &TreePoint) -> (usize, f64, usize, f64, f64) {
        let n = self.n_vertices;
        let mut best = (0, 0.0, 0, 0.0, f64::INFINITY);
        for (x, dx) in self.ends(p) {
            for (y, dy) in self.ends(q) {
                let total = dx + self.dist[x * n + y] + dy;
                if total < best.4 {
                    best = (x, dx, y, dy, total);
                }
            }
        }
        best
    }

    pub fn distance(&self, p: &TreePoint, q: &TreePoint) -> f64 {
        if p.edge == q.edge {
            return (p.offset - q.offset).abs();
        }
        self.route(p, q).4
    }

    /// Point at parameter `omega ≥ 1` on the geodesic from `p` through `q`, when the extension
    /// past `q` stays inside the edge of `q` and so is unique.
    pub fn extend(&self, p: &TreePoint, q: &TreePoint, omega: f64) -> Option<TreePoint> {
        let e = &self.edges[q.edge];
        let offset = if p.edge == q.edge {
            p.offset + omega * (q.offset - p.offset)
        } else {
            if q.offset <= 0.0 || q.offset >= e.length {
                return None;
            }
            let (_, _, y, _, total) = self.route(p, q);
            let extra = (omega - 1.0) * total;
            if y == e.u {
                q.offset + extra
            } else {
                q.offset - extra
            }
        };
        (0.0..=e.length).contains(&offset).then(|| {
            self.canonical(TreePoint {
                edge: q.edge,
                offset,
            })
        })
    }

    /// Point at distance `s` from vertex `x` when walking from `x` along edge `eid`.
    fn along_edge(&self, eid: usize, from: usize, s: f64) -> TreePoint {
        let e = &self.edges[eid];
        let offset = if e.u == from { s } else { e.length - s };
        self.canonical(TreePoint {
            edge: eid,
            offset: offset.clamp(0.0, e.length),
        })
    }

    pub fn geodesic_point(&self, p: &TreePoint, q: &TreePoint, t: f64) -> TreePoint {
        if t == 0.0 {
            return *p;
        }
        if t == 1.0 {
            return *q;
        }
        if p.edge == q.edge {
            let e = &self.edges[p.edge];
            let offset = p.offset + t * (q.offset - p.offset);
            return self.canonical(TreePoint {
                edge: p.edge,
                offset: offset.clamp(0.0, e.length),
            });
        }
        let (x, dx, y, _, total) = self.route(p, q);
        let target = t * total;
        if target <= dx {
            let e = &self.edges[p.edge];
            let offset = if x == e.u {
                p.offset - target
            } else {
                p.offset + target
            };
            return self.canonical(TreePoint {
                edge: p.edge,
                offset: offset.clamp(0.0, e.length),
            });
        }
        let n = self.n_vertices;
        let mut rest = target - dx;
        let mut cur = x;
        while cur != y {
            let (nxt, eid) = self.next[cur * n + y];
            let len = self.edges[eid].length;
            if rest <= len {
                return self.along_edge(eid, cur, rest);
            }
            rest -= len;
            cur = nxt;
        }
        let f = &self.edges[q.edge];
        let room = if y == f.u {
            q.offset
        } else {
            f.length - q.offset
        };
        self.along_edge(q.edge, y, rest.min(room))
    }

    /// Exact weighted barycenter.
    ///
    /// Restricted to one edge, every squared distance `d(y_i, x(s))²` is `(s − c_i)²` for a
    /// constant `c_i` (points beyond either end contribute a shifted linear distance, points
    /// on the edge contribute `|s − s_i|`). So `ψ` is one quadratic per edge, minimized in
    /// closed form at the clamped weighted mean of the `c_i`; the best edge wins.
    pub fn barycenter(&self, pool: &[TreePoint], items: &[(usize, f64)]) -> TreePoint {
        let mut best: Option<(f64, TreePoint)> = None;
        for (eid, e) in self.edges.iter().enumerate() {
            let mut mean = 0.0;
            let mut wsum = 0.0;
            for &(i, w) in items {
                mean += w * self.edge_coordinate(eid, e, &pool[i]);
                wsum += w;
            }
            let s = (mean / wsum).clamp(0.0, e.length);
            let psi: f64 = items
                .iter()
                .map(|&(i, w)| {
                    let c = self.edge_coordinate(eid, e, &pool[i]);
                    w * (s - c) * (s - c)
                })
                .sum();
            if best.map_or(true, |(b, _)| psi < b) {
                best = Some((
                    psi,
                    TreePoint {
                        edge: eid,
                        offset: s,
                    },
                ));
            }
        }
        let (_, p) = best.expect("tree has at least one edge");
        self.canonical(p)
    }

    /// The constant `c` with `d(p, x(s)) = |s − c|` for points `x(s)` on edge `eid`.
    #[inline]
    fn edge_coordinate(&self, eid: usize, e: &TreeEdge, p: &TreePoint) -> f64 {
        if p.edge == eid {
            return p.offset;
        }
        let a = self.distance_to_vertex(p, e.u);
        let b = self.distance_to_vertex(p, e.v);
        if a <= b {
            -a
        } else {
            e.length + b
        }
    }

    /// Per-edge closed form `ψ` value at offset `s`; exposed for oracle checks.
    pub fn psi_on_edge(
        &self,
        eid: usize,
        s: f64,
        pool: &[TreePoint],
        items: &[(usize, f64)],
    ) -> f64 {
        let e = &self.edges[eid];
        items
            .iter()
            .map(|&(i, w)| {
                let c = self.edge_coordinate(eid, e, &pool[i]);
                w * (s - c) * (s - c)
            })
            .sum()
    }
}
