//! Fast dimension reduction of graph-structured signals by feature
//! clustering.
//!
//! The central pieces are recursive nearest-neighbor agglomeration
//! ([`rena::rena`]) and the feature-grouping operator
//! ([`grouping::FeatureGroupingOperator`]), surrounded by baseline reducers,
//! synthetic data generation, quality metrics, and bit-exact file formats.

#![forbid(unsafe_code)]

pub mod baselines;
pub mod error;
pub mod graph;
pub mod grouping;
pub mod io;
pub mod matrix;
pub mod metrics;
pub mod rena;
pub mod synthdata;

pub use error::{Error, Result};
pub use graph::{Partition, StructureGraph, WeightedGraph};
pub use grouping::FeatureGroupingOperator;
pub use matrix::DataMatrix;
