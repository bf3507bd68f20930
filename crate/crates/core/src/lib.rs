//! Directed random geometric graphs (DRGG) on the unit d-torus.
//!
//! Every vertex sits at a uniform point of `[0,1)^d` with periodic boundaries and
//! carries a Pareto-distributed radius `r_v ∈ [r0, 1/2]`. An edge `u ↝ v` exists
//! when `u` lies inside `v`'s ball. The crate generates such graphs, measures
//! their directed statistics, evaluates the closed-form predictions for them and
//! fits model parameters back from degree data.

pub mod error;
pub mod experiment;
pub mod fit;
pub mod generator;
pub mod geometry;
pub mod graph;
pub mod io;
pub mod quad;
pub mod stats;
pub mod theory;

pub use error::{DrggError, Result};
pub use generator::{
    build_edges_grid, build_edges_naive, generate, sample_points, ModelParams, RadiusMode, TorusPointSet,
};
pub use geometry::{RadiusLaw, TorusPoint};
pub use graph::DiGraph;
