//! Node importance in directed attributed graphs.
//!
//! The crate is `no_std` + `alloc`. It holds every algorithmic piece of the
//! pipeline: compressed graph storage, classical centralities, attribute-aware
//! diffusion models with a Monte Carlo spread estimator, a single-head graph
//! attention network trained on link prediction, attention-derived importance
//! scores, and ranking metrics. File formats, configuration and the CLI live in
//! the `pine` companion crate.
//!
//! Features:
//! - `std` (default): use the platform float routines and `std::error::Error`.
//! - `parallel` (default, implies `std`): run Monte Carlo runs, all-pairs
//!   centralities and per-type training on the rayon pool. Results are
//!   bit-identical to the sequential build.

#![cfg_attr(not(feature = "std"), no_std)]

extern crate alloc;

pub mod centrality;
pub mod diffusion;
pub mod error;
pub mod gat;
pub mod graph;
pub mod metrics;
pub mod pine;
pub mod seeds;
pub mod synthetic;

mod linalg;
mod par;

pub use error::{Error, Result};
pub use graph::{AttributedGraph, BuildStats, EdgeType, FeatureMatrix, GraphBuilder, NodeId, ScoreVector};
