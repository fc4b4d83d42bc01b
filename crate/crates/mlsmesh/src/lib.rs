//! File formats, parallel execution and the command-line front end for
//! [`mlsmesh_core`].
//!
//! - [`pgrid`]: the PGRID pulse-grid text format;
//! - [`export`]: ASCII PLY and OBJ writers for simplicial complexes;
//! - [`scene`]: TOML scene files for the simulator;
//! - [`report`]: TOML reports and CSV tables;
//! - [`exec::Parallel`]: a rayon executor whose results match sequential
//!   execution exactly.

pub mod cli;
pub mod exec;
pub mod export;
pub mod pgrid;
pub mod report;
pub mod scene;

pub use exec::Parallel;
