//! Local estimators for s–t effective resistance on undirected graphs.
//!
//! The estimators in [`estimators`] read the graph only through the
//! adjacency-list query model ([`graph::AdjacencyList`]): degree queries,
//! i-th neighbor queries and uniform vertex sampling. Their cost depends on
//! the accuracy target and the mixing behaviour of the graph rather than on
//! its size. [`exact`] provides a dense ground-truth oracle for graphs small
//! enough to factorize.

pub mod estimators;
pub mod exact;
pub mod graph;
pub mod rng;
pub mod walker;

pub use estimators::{Estimate, EstimateError, EstimatorParams};
pub use graph::{AccessStats, AdjacencyList, Graph, GraphError, LoadOptions};
