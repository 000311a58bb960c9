//! IO, file formats, and pipeline orchestration around `ipcmap-core`.
//!
//! The core crate holds the pure algorithms (parsing, graph construction,
//! metrics, layout); this crate adds everything that touches the outside
//! world: corpus loading, export serialization, the pipeline configuration,
//! and the comparison harness used to check a run against published
//! reference figures.

pub mod export;
pub mod ingest;
pub mod pipeline;
pub mod replicate;

pub use ipcmap_core as core;
