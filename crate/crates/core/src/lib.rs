//! Multi-row cut generation: tableau rows, cut-generating LPs, exact facet
//! enumeration, intersection cuts from lattice-free bodies, strengthening
//! and a separation-round harness.

#![allow(clippy::needless_range_loop, clippy::type_complexity)]

pub mod cglp;
pub mod harness;
pub mod instance;
pub mod linalg;
pub mod octahedron;
pub mod par;
pub mod rowsystem;
pub mod scalar;
pub mod shapes;
pub mod simplex;
pub mod strengthen;
