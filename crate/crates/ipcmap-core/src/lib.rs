//! Core algorithms for IPC code co-occurrence mapping.
//!
//! Everything in this crate is pure and deterministic: IPC symbol parsing,
//! corpus filtering, Jaccard-weighted co-occurrence graphs, network metrics
//! (components, betweenness, Louvain communities, minimum spanning forests),
//! and a ForceAtlas2 layout. No I/O happens here; the `ipcmap` crate layers
//! file formats and the CLI on top.
//!
//! The crate is `no_std` (with `alloc`) so the algorithmic core stays free of
//! platform dependencies. All collections are ordered (`BTreeMap`/`BTreeSet`),
//! which is what makes byte-identical outputs cheap to guarantee downstream.

#![no_std]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod corpus;
pub mod graph;
pub mod ipc;
pub mod layout;
pub mod metrics;

pub use corpus::{Corpus, Date, PatentRecord};
pub use graph::{CooccurrenceGraph, DistanceGraph};
pub use ipc::{IpcCode, IpcLevel};
