//! Adaptive simplicial complex reconstruction from mobile laser scanning
//! pulse grids.
//!
//! A mobile laser scanner fires pulses on a regular (rotation step, scanline)
//! lattice. That lattice gives every pulse six neighbours, and every echo is a
//! candidate neighbour of every echo on the adjacent pulses. This crate keeps
//! all echoes as vertices and decides which of those candidate edges and
//! lattice triangles survive:
//!
//! - [`edgefilter`] scores each candidate edge by its angle to the beam and by
//!   its collinearity with the continuation edges along the same lattice line;
//! - [`trifilter`] builds triangles from surviving edges and keeps the ones
//!   whose wedge (cell-pair) is coplanar with neighbours in both lattice
//!   directions;
//! - [`complex`] closes the result into a simplicial complex and classifies
//!   every simplex as part of a triangle, a free edge or a free vertex.
//!
//! [`synth`] ray-casts labelled parametric scenes to produce grids with ground
//! truth and [`metrics`] scores reconstructions against those labels.
//!
//! The crate is `no_std` and only needs `alloc`. Parallel execution is
//! abstracted by [`exec::Executor`]; the default [`exec::Sequential`]
//! executor runs everything on the calling thread.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod complex;
pub mod edgefilter;
pub mod exec;
pub mod geom;
pub mod grid;
pub mod metrics;
pub mod pipeline;
pub mod synth;
pub mod trifilter;

pub use complex::{Census, SimplexClass, SimplicialComplex};
pub use edgefilter::{EdgeKey, EdgeSet, FilterParams, ScoredEdge, Variant};
pub use exec::{Executor, Sequential};
pub use geom::Vec3;
pub use grid::{CandidateEdge, Echo, EchoRef, GridError, LatticeDirection, Pulse, PulseGrid};
pub use metrics::{evaluate, sweep, EvalReport, LabelKinds, ParamGrid};
pub use pipeline::{reconstruct, reconstruct_with, Reconstruction};
pub use trifilter::{Triangle, TriangleVariant, Wedge};
