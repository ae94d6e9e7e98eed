//! Competing reducers under one interface: connectivity-constrained
//! single-linkage and Ward clustering, the Nystrom feature mapping, sparse
//! random projections, and lattice block downsampling.

mod downsample;
mod linkage;
mod nystrom;
mod projection;

pub use downsample::downsampling_operator;
pub use linkage::{single_linkage, ward_linkage, WARD_FEATURE_LIMIT};
pub use nystrom::{nystrom_fit, NystromMap, NYSTROM_SV_TOLERANCE};
pub use projection::{sparse_random_projection, SparseRandomProjection};

use crate::error::{Error, Result};
use crate::grouping::FeatureGroupingOperator;
use crate::matrix::DataMatrix;

/// A fitted reducer mapping signals in `R^p` to `R^k`.
#[derive(Debug, Clone)]
pub enum ReducerModel {
    FeatureGrouping(FeatureGroupingOperator),
    Downsampling {
        op: FeatureGroupingOperator,
        dims: Vec<usize>,
    },
    Nystrom(NystromMap),
    RandomProjection(SparseRandomProjection),
}

impl ReducerModel {
    /// Output dimension.
    pub fn k(&self) -> usize {
        match self {
            ReducerModel::FeatureGrouping(op) => op.k(),
            ReducerModel::Downsampling { op, .. } => op.k(),
            ReducerModel::Nystrom(map) => map.k(),
            ReducerModel::RandomProjection(proj) => proj.k(),
        }
    }

    /// Input dimension the model was fitted for.
    pub fn p(&self) -> usize {
        match self {
            ReducerModel::FeatureGrouping(op) => op.p(),
            ReducerModel::Downsampling { op, .. } => op.p(),
            ReducerModel::Nystrom(map) => map.p(),
            ReducerModel::RandomProjection(proj) => proj.p(),
        }
    }

    pub fn variant_name(&self) -> &'static str {
        match self {
            ReducerModel::FeatureGrouping(_) => "feature_grouping",
            ReducerModel::Downsampling { .. } => "downsampling",
            ReducerModel::Nystrom(_) => "nystrom",
            ReducerModel::RandomProjection(_) => "random_projection",
        }
    }

    /// Reduce every column of `x` to `R^k`.
    pub fn reduce(&self, x: &DataMatrix) -> Result<DataMatrix> {
        if x.p() != self.p() {
            return Err(Error::DimensionMismatch(format!(
                "data has p={} but reducer was fitted for p={}",
                x.p(),
                self.p()
            )));
        }
        match self {
            ReducerModel::FeatureGrouping(op) | ReducerModel::Downsampling { op, .. } => {
                op.reduce(x)
            }
            ReducerModel::Nystrom(map) => map.reduce(x),
            ReducerModel::RandomProjection(proj) => proj.reduce(x),
        }
    }
}
