//! Transitive-triangle tilings of oriented graphs.

pub mod exact;
pub mod extremal;
pub mod format;
pub mod generators;
pub mod harness;
pub mod graph;
pub mod matching;
pub mod nonextremal;
pub mod par;
pub mod seed;

pub use graph::{OrientedGraph, Tiling, TransitiveTriangle, VertexSetPartition};
