//! Polar grid on the closed unit disk.
//!
//! Vertex 0 is the hub at the origin. Ring `i = 1..=n_r` sits at radius `i/n_r` and carries
//! `n_θ` vertices at angles `2πj/n_θ`; ring `n_r` is the boundary. Vertex `(i, j)` has index
//! `1 + (i − 1)·n_θ + j`, so interior vertices come first and the boundary ring last.
//!
//! Edge weights are the finite-volume Laplacian on the polar tensor grid: a radial edge
//! crossing the circle of radius `ρ` gets `ρΔθ/Δr`, an angular edge on ring `r` gets
//! `Δr/(rΔθ)`, and a hub edge gets `Δθ/2`.

use std::f64::consts::TAU;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::disk::DiskPoint;
use crate::error::{Error, Result};

pub const MIN_RINGS: usize = 2;
pub const MIN_SECTORS: usize = 8;
const MAX_VERTICES: usize = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeshParams {
    pub n_r: usize,
    pub n_theta: usize,
}

#[derive(Debug, Clone)]
pub struct DiskMesh {
    n_r: usize,
    n_theta: usize,
    edges: Vec<(usize, usize, f64)>,
    adjacency: Vec<Vec<(usize, f64)>>,
    weight_sums: Vec<f64>,
    jacobi: OnceLock<f64>,
    chol: OnceLock<BandedCholesky>,
}

/// Where a disk point falls in the grid, for tensor interpolation.
///
/// The value is `geo(geo(inner.0, inner.1, g), geo(outer.0, outer.1, g), f)`. In the hub
/// cell both inner vertices are the hub.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stencil {
    pub inner: (usize, usize),
    pub outer: (usize, usize),
    pub g: f64,
    pub f: f64,
    /// ring index of the outer vertices
    pub ring: usize,
}

impl DiskMesh {
    pub fn new(n_r: usize, n_theta: usize) -> Result<Self> {
        if n_r < MIN_RINGS {
            return Err(Error::invalid(format!(
                "n_r = {n_r} is below the minimum {MIN_RINGS}"
            )));
        }
        if n_theta < MIN_SECTORS {
            return Err(Error::invalid(format!(
                "n_theta = {n_theta} is below the minimum {MIN_SECTORS}"
            )));
        }
        let nv = n_r
            .checked_mul(n_theta)
            .and_then(|x| x.checked_add(1))
            .filter(|&x| x <= MAX_VERTICES)
            .ok_or_else(|| Error::invalid("mesh too large"))?;

        let dr = 1.0 / n_r as f64;
        let dth = TAU / n_theta as f64;
        let idx = |i: usize, j: usize| 1 + (i - 1) * n_theta + (j % n_theta);
        let mut edges = Vec::with_capacity(2 * nv);
        for j in 0..n_theta {
            edges.push((0, idx(1, j), 0.5 * dth));
        }
        for i in 1..=n_r {
            let r = i as f64 * dr;
            for j in 0..n_theta {
                edges.push((idx(i, j), idx(i, j + 1), dr / (r * dth)));
                if i < n_r {
                    let face = (i as f64 + 0.5) * dr;
                    edges.push((idx(i, j), idx(i + 1, j), face * dth / dr));
                }
            }
        }
        let mut adjacency = vec![Vec::new(); nv];
        for &(u, v, w) in &edges {
            adjacency[u].push((v, w));
            adjacency[v].push((u, w));
        }
        for a in &mut adjacency {
            a.sort_by_key(|x| x.0);
        }
        let weight_sums = adjacency
            .iter()
            .map(|a| a.iter().map(|x| x.1).sum())
            .collect();
        Ok(DiskMesh {
            n_r,
            n_theta,
            edges,
            adjacency,
            weight_sums,
            jacobi: OnceLock::new(),
            chol: OnceLock::new(),
        })
    }

    pub fn from_params(p: MeshParams) -> Result<Self> {
        DiskMesh::new(p.n_r, p.n_theta)
    }

    pub fn params(&self) -> MeshParams {
        MeshParams {
            n_r: self.n_r,
            n_theta: self.n_theta,
        }
    }

    pub fn n_r(&self) -> usize {
        self.n_r
    }

    pub fn n_theta(&self) -> usize {
        self.n_theta
    }

    pub fn n_vertices(&self) -> usize {
        1 + self.n_r * self.n_theta
    }

    pub fn n_interior(&self) -> usize {
        1 + (self.n_r - 1) * self.n_theta
    }

    pub fn dr(&self) -> f64 {
        1.0 / self.n_r as f64
    }

    pub fn dtheta(&self) -> f64 {
        TAU / self.n_theta as f64
    }

    /// Index of vertex `j` on ring `i ≥ 1`; `j` wraps.
    pub fn index(&self, ring: usize, j: usize) -> usize {
        debug_assert!((1..=self.n_r).contains(&ring));
        1 + (ring - 1) * self.n_theta + (j % self.n_theta)
    }

    /// `(ring, sector)`; the hub is `(0, 0)`.
    pub fn ring_sector(&self, v: usize) -> (usize, usize) {
        if v == 0 {
            (0, 0)
        } else {
            (1 + (v - 1) / self.n_theta, (v - 1) % self.n_theta)
        }
    }

    pub fn radius(&self, v: usize) -> f64 {
        self.ring_sector(v).0 as f64 * self.dr()
    }

    pub fn angle(&self, v: usize) -> f64 {
        self.ring_sector(v).1 as f64 * self.dtheta()
    }

    pub fn position(&self, v: usize) -> [f64; 2] {
        let (r, t) = (self.radius(v), self.angle(v));
        [r * t.cos(), r * t.sin()]
    }

    pub fn is_boundary(&self, v: usize) -> bool {
        v >= self.n_interior()
    }

    pub fn interior(&self) -> std::ops::Range<usize> {
        0..self.n_interior()
    }

    pub fn boundary(&self) -> std::ops::Range<usize> {
        self.n_interior()..self.n_vertices()
    }

    /// Angles `2πj/n_θ` of the boundary ring, in vertex order.
    pub fn boundary_angles(&self) -> Vec<f64> {
        (0..self.n_theta)
            .map(|j| j as f64 * self.dtheta())
            .collect()
    }

    pub fn edges(&self) -> &[(usize, usize, f64)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[(usize, f64)] {
        &self.adjacency[v]
    }

    pub fn weight_sum(&self, v: usize) -> f64 {
        self.weight_sums[v]
    }

    /// Euclidean length of an edge in the source disk.
    pub fn edge_length(&self, u: usize, v: usize) -> f64 {
        let (a, b) = (self.position(u), self.position(v));
        (a[0] - b[0]).hypot(a[1] - b[1])
    }

    pub fn stencil(&self, x: &DiskPoint) -> Stencil {
        let rho = (x.radius() * self.n_r as f64).min(self.n_r as f64);
        let i = (rho.floor() as usize).min(self.n_r - 1);
        let f = rho - i as f64;
        let u = x.angle() / self.dtheta();
        let j = (u.floor() as usize).min(self.n_theta - 1);
        let g = (u - j as f64).clamp(0.0, 1.0);
        let inner = if i == 0 {
            (0, 0)
        } else {
            (self.index(i, j), self.index(i, j + 1))
        };
        Stencil {
            inner,
            outer: (self.index(i + 1, j), self.index(i + 1, j + 1)),
            g,
            f,
            ring: i + 1,
        }
    }

    /// The scalar Dirichlet Laplacian, factored on first use and cached.
    pub fn dirichlet_solver(&self) -> ScalarDirichlet<'_> {
        let chol = self.chol.get_or_init(|| {
            let n = self.n_interior();
            let mut m = BandedCholesky::zeros(n, self.n_theta);
            for v in 0..n {
                m.set(v, v, self.weight_sums[v]);
                for &(u, w) in &self.adjacency[v] {
                    if u < v {
                        m.set(v, u, -w);
                    }
                }
            }
            m.factor()
                .expect("Dirichlet Laplacian with positive weights is positive definite");
            m
        });
        ScalarDirichlet { mesh: self, chol }
    }

    /// Spectral radius of the Jacobi iteration for the scalar Dirichlet problem: `1 − λ_min`
    /// for the generalized problem `L v = λ D v`. The lowest mode is rotation invariant, so
    /// it is found by inverse iteration on the radial reduction, a tridiagonal problem in
    /// the hub and ring values. Cached.
    pub fn jacobi_radius(&self) -> f64 {
        *self.jacobi.get_or_init(|| {
            let n = self.n_r; // hub + rings 1..n_r-1
            let dth = self.dtheta();
            let nt = self.n_theta as f64;
            // per-vertex inner and outer radial weights, and the diagonal D
            let mut lower = vec![0.0; n];
            let mut upper = vec![0.0; n];
            let mut diag = vec![0.0; n];
            lower[0] = 0.0;
            upper[0] = 0.5 * dth * nt;
            diag[0] = upper[0];
            for i in 1..n {
                let w_in = if i == 1 {
                    0.5 * dth
                } else {
                    (i as f64 - 0.5) * dth
                };
                let w_out = (i as f64 + 0.5) * dth;
                let w_ang = 1.0 / (i as f64 * dth);
                lower[i] = w_in;
                upper[i] = w_out;
                diag[i] = w_in + w_out + 2.0 * w_ang;
            }
            // L v: row i is (w_in + w_out) v_i − w_in v_{i−1} − w_out v_{i+1}; angular edges cancel
            let solve = |rhs: &[f64]| -> Vec<f64> {
                let a: Vec<f64> = (0..n).map(|i| lower[i] + upper[i]).collect();
                let mut c = vec![0.0; n];
                let mut d = vec![0.0; n];
                c[0] = -upper[0] / a[0];
                d[0] = rhs[0] / a[0];
                for i in 1..n {
                    let m = a[i] + lower[i] * c[i - 1];
                    c[i] = -upper[i] / m;
                    d[i] = (rhs[i] + lower[i] * d[i - 1]) / m;
                }
                let mut x = vec![0.0; n];
                x[n - 1] = d[n - 1];
                for i in (0..n - 1).rev() {
                    x[i] = d[i] - c[i] * x[i + 1];
                }
                x
            };
            let mut v = vec![1.0; n];
            let mut lambda = 0.0;
            for _ in 0..200 {
                let rhs: Vec<f64> = v.iter().zip(&diag).map(|(a, b)| a * b).collect();
                let y = solve(&rhs);
                let k = (0..n)
                    .max_by(|&a, &b| y[a].abs().total_cmp(&y[b].abs()))
                    .expect("n ≥ 2");
                let next = v[k] / y[k];
                v = y.iter().map(|x| x / y[k]).collect();
                let done = (next - lambda).abs() <= 1e-15 * next.abs();
                lambda = next;
                if done {
                    break;
                }
            }
            (1.0 - lambda).clamp(0.0, 1.0)
        })
    }

    /// Linear Dirichlet solve for one scalar field with given boundary ring values.
    pub fn solve_scalar(&self, boundary: &[f64]) -> Result<Vec<f64>> {
        self.dirichlet_solver().solve(boundary)
    }

    /// `Σ_edges w_ij (u_i − u_j)²`.
    pub fn scalar_energy(&self, u: &[f64]) -> f64 {
        self.edges
            .iter()
            .map(|&(a, b, w)| w * (u[a] - u[b]).powi(2))
            .sum()
    }
}

pub struct ScalarDirichlet<'a> {
    mesh: &'a DiskMesh,
    chol: &'a BandedCholesky,
}

impl ScalarDirichlet<'_> {
    /// Solve `L x = rhs` over the interior with zero boundary values, in place.
    pub fn solve_homogeneous(&self, rhs: &mut [f64]) {
        assert_eq!(
            rhs.len(),
            self.mesh.n_interior(),
            "one value per interior vertex"
        );
        self.chol.solve_in_place(rhs);
    }

    pub fn solve(&self, boundary: &[f64]) -> Result<Vec<f64>> {
        let mesh = self.mesh;
        if boundary.len() != mesh.n_theta {
            return Err(Error::invalid(format!(
                "{} boundary values for {} boundary vertices",
                boundary.len(),
                mesh.n_theta
            )));
        }
        let n = mesh.n_interior();
        let mut rhs = vec![0.0; n];
        for (v, r) in rhs.iter_mut().enumerate() {
            for &(u, w) in &mesh.adjacency[v] {
                if u >= n {
                    *r += w * boundary[u - n];
                }
            }
        }
        self.chol.solve_in_place(&mut rhs);
        rhs.extend_from_slice(boundary);
        Ok(rhs)
    }
}

/// Symmetric positive definite band matrix, lower triangle stored row-wise, factored in place.
#[derive(Debug, Clone)]
struct BandedCholesky {
    n: usize,
    band: usize,
    data: Vec<f64>,
}

impl BandedCholesky {
    fn zeros(n: usize, band: usize) -> Self {
        BandedCholesky {
            n,
            band,
            data: vec![0.0; n * (band + 1)],
        }
    }

    #[inline]
    fn at(&self, row: usize, col: usize) -> usize {
        row * (self.band + 1) + (self.band - (row - col))
    }

    fn set(&mut self, row: usize, col: usize, v: f64) {
        assert!(col <= row && row - col <= self.band, "entry outside band");
        let k = self.at(row, col);
        self.data[k] = v;
    }

    fn factor(&mut self) -> Result<()> {
        for k in 0..self.n {
            let k0 = k.saturating_sub(self.band);
            for c in k0..=k {
                let c0 = k0.max(c.saturating_sub(self.band));
                let mut s = self.data[self.at(k, c)];
                for m in c0..c {
                    s -= self.data[self.at(k, m)] * self.data[self.at(c, m)];
                }
                let idx = self.at(k, c);
                if c < k {
                    self.data[idx] = s / self.data[self.at(c, c)];
                } else {
                    if !(s > 0.0) {
                        return Err(Error::domain("matrix is not positive definite"));
                    }
                    self.data[idx] = s.sqrt();
                }
            }
        }
        Ok(())
    }

    fn solve_in_place(&self, b: &mut [f64]) {
        for k in 0..self.n {
            let mut s = b[k];
            for m in k.saturating_sub(self.band)..k {
                s -= self.data[self.at(k, m)] * b[m];
            }
            b[k] = s / self.data[self.at(k, k)];
        }
        for k in (0..self.n).rev() {
            let mut s = b[k];
            for m in k + 1..(k + self.band + 1).min(self.n) {
                s -= self.data[self.at(m, k)] * b[m];
            }
            b[k] = s / self.data[self.at(k, k)];
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn counts_and_weights() {
        let m = DiskMesh::new(2, 8).unwrap();
        assert_eq!(m.n_vertices(), 17);
        assert!(m.edges().iter().all(|e| e.2 > 0.0));
        for v in m.interior() {
            assert!(m.neighbors(v).len() >= 3);
        }
        assert_eq!(m.boundary_angles()[2], TAU * 2.0 / 8.0);
        assert!(DiskMesh::new(1, 8).is_err());
        assert!(DiskMesh::new(4, 4).is_err());
    }

    #[test]
    fn index_roundtrip() {
        let m = DiskMesh::new(5, 12).unwrap();
        for v in 1..m.n_vertices() {
            let (i, j) = m.ring_sector(v);
            assert_eq!(m.index(i, j), v);
        }
        assert!(m.is_boundary(m.index(5, 0)));
        assert!(!m.is_boundary(m.index(4, 11)));
    }

    #[test]
    fn cholesky_matches_dense_solve() {
        // small SPD band system checked against Gaussian elimination on the dense matrix
        let n = 7;
        let band = 2;
        let mut dense = vec![vec![0.0; n]; n];
        let mut b = BandedCholesky::zeros(n, band);
        for i in 0..n {
            dense[i][i] = 4.0 + i as f64;
            b.set(i, i, dense[i][i]);
            for d in 1..=band {
                if i >= d {
                    let v = -1.0 / d as f64;
                    dense[i][i - d] = v;
                    dense[i - d][i] = v;
                    b.set(i, i - d, v);
                }
            }
        }
        let rhs: Vec<f64> = (0..n).map(|i| (i as f64).sin()).collect();
        b.factor().unwrap();
        let mut x = rhs.clone();
        b.solve_in_place(&mut x);
        for i in 0..n {
            let ax: f64 = (0..n).map(|j| dense[i][j] * x[j]).sum();
            assert!((ax - rhs[i]).abs() < 1e-13);
        }
    }

    #[test]
    fn scalar_solve_is_discrete_harmonic() {
        let m = DiskMesh::new(6, 16).unwrap();
        let g: Vec<f64> = m
            .boundary_angles()
            .iter()
            .map(|t| (2.0 * t).sin() + t.cos())
            .collect();
        let u = m.solve_scalar(&g).unwrap();
        for v in m.interior() {
            let mean: f64 =
                m.neighbors(v).iter().map(|&(j, w)| w * u[j]).sum::<f64>() / m.weight_sum(v);
            assert!((u[v] - mean).abs() < 1e-12);
        }
    }

    #[test]
    fn cos_boundary_converges_to_linear_function() {
        let mut prev = f64::INFINITY;
        for n_r in [8, 16, 32] {
            let m = DiskMesh::new(n_r, 4 * n_r).unwrap();
            let g: Vec<f64> = m.boundary_angles().iter().map(|t| t.cos()).collect();
            let u = m.solve_scalar(&g).unwrap();
            let err = (0..m.n_vertices())
                .map(|v| (u[v] - m.position(v)[0]).abs())
                .fold(0.0, f64::max);
            assert!(err < prev);
            prev = err;
        }
        assert!(prev < 1e-2);
    }

    #[test]
    fn radial_jacobi_radius_matches_full_inverse_iteration() {
        for (n_r, n_t) in [(4, 8), (8, 16), (16, 48)] {
            let m = DiskMesh::new(n_r, n_t).unwrap();
            let solver = m.dirichlet_solver();
            let n = m.n_interior();
            let d = &m.weight_sums[..n];
            let mut v = vec![1.0; n];
            let mut lambda = 0.0;
            for _ in 0..300 {
                let mut y: Vec<f64> = v.iter().zip(d).map(|(a, b)| a * b).collect();
                solver.chol.solve_in_place(&mut y);
                let norm = y.iter().zip(d).map(|(a, b)| a * a * b).sum::<f64>().sqrt();
                v = y.into_iter().map(|a| a / norm).collect();
                lambda = 0.0;
                for i in 0..n {
                    let mut lv = d[i] * v[i];
                    for &(j, w) in m.neighbors(i) {
                        if j < n {
                            lv -= w * v[j];
                        }
                    }
                    lambda += v[i] * lv;
                }
            }
            assert!(
                ((1.0 - lambda) - m.jacobi_radius()).abs() < 1e-10,
                "{n_r}x{n_t}"
            );
        }
    }

    #[test]
    fn stencil_reproduces_vertices() {
        let m = DiskMesh::new(4, 8).unwrap();
        let x = DiskPoint::from_polar(0.5, TAU * 3.0 / 8.0).unwrap();
        let s = m.stencil(&x);
        // scalar tensor interpolation of a vertex-index field recovers that vertex
        let lerp = |a: f64, b: f64, t: f64| a + (b - a) * t;
        let val = |v: usize| v as f64;
        let a = lerp(val(s.inner.0), val(s.inner.1), s.g);
        let b = lerp(val(s.outer.0), val(s.outer.1), s.g);
        assert!((lerp(a, b, s.f) - m.index(2, 3) as f64).abs() < 1e-9);
        let hub = m.stencil(&DiskPoint::from_polar(0.1, 0.2).unwrap());
        assert_eq!(hub.inner, (0, 0));
    }
}
