//! Bounded harmonic maps from the unit disk into CAT(0) spaces.
//!
//! The crate computes discrete harmonic extensions of boundary maps into Euclidean space,
//! the hyperbolic plane and metric trees, recovers boundary values along non-tangential
//! paths, and checks that the two transforms invert each other.
//!
//! - [`cat0`]: target spaces, geodesics, barycenters, comparison triangles
//! - [`disk`]: Poisson kernel, harmonic measure and non-tangential sampling on the disk
//! - [`boundary`]: boundary maps and the convergence-in-probability distance
//! - [`mesh`] and [`solver`]: polar meshes and the barycentric Dirichlet solver
//! - [`fatou`]: boundary transform, Poisson transform, roundtrip and tube experiments
//! - [`experiments`]: JSON-configured runs, CSV/JSON reports and SVG rendering

pub mod boundary;
pub mod cat0;
pub mod disk;
pub mod error;
pub mod experiments;
pub mod fatou;
pub mod mesh;
pub mod solver;

pub use error::{Error, Result};
