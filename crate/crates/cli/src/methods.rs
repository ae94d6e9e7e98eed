//! Method selection shared by the cluster and bench commands.

use rena_core::baselines::{
    downsampling_operator, nystrom_fit, single_linkage, sparse_random_projection, ward_linkage,
    ReducerModel,
};
use rena_core::graph::{Partition, StructureGraph};
use rena_core::grouping::FeatureGroupingOperator;
use rena_core::matrix::DataMatrix;
use rena_core::rena::rena;

use crate::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    Rena,
    Single,
    Ward,
    Downsample,
    Nystrom,
    RandomProjection,
}

impl Method {
    pub fn parse(s: &str) -> Result<Method, String> {
        match s.trim() {
            "rena" => Ok(Method::Rena),
            "single" => Ok(Method::Single),
            "ward" => Ok(Method::Ward),
            "downsample" => Ok(Method::Downsample),
            "nystrom" => Ok(Method::Nystrom),
            "rp" | "random_projection" => Ok(Method::RandomProjection),
            other => Err(format!(
                "unknown method `{other}` (expected rena, single, ward, downsample, nystrom, rp)"
            )),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Method::Rena => "rena",
            Method::Single => "single",
            Method::Ward => "ward",
            Method::Downsample => "downsample",
            Method::Nystrom => "nystrom",
            Method::RandomProjection => "rp",
        }
    }

    /// Methods that produce a feature partition.
    pub fn is_clustering(&self) -> bool {
        matches!(
            self,
            Method::Rena | Method::Single | Method::Ward | Method::Downsample
        )
    }

    /// Output dimension for a "fraction of the signal": `k/p` for feature
    /// reducers, `k/n` for the sample-based Nystrom map.
    pub fn k_from_fraction(&self, frac: f64, p: usize, n_train: usize) -> usize {
        let base = if *self == Method::Nystrom { n_train } else { p };
        ((frac * base as f64).floor() as usize).clamp(1, base)
    }
}

pub fn parse_methods(s: &str) -> Result<Vec<Method>, String> {
    let methods: Result<Vec<Method>, String> = s.split(',').map(Method::parse).collect();
    let methods = methods?;
    if methods.is_empty() {
        return Err("empty method list".into());
    }
    Ok(methods)
}

/// Fit a partition with a clustering method. `dims` is required only for
/// downsampling.
pub fn fit_partition(
    method: Method,
    x: &DataMatrix,
    g: &StructureGraph,
    dims: Option<&[usize]>,
    k: usize,
) -> CliResult<Partition> {
    match method {
        Method::Rena => Ok(rena(x, g, k)?.0),
        Method::Single => Ok(single_linkage(x, g, k)?),
        Method::Ward => Ok(ward_linkage(x, g, k)?),
        Method::Downsample => {
            let dims = dims.ok_or_else(|| {
                CliError::Usage("downsample needs --dims (lattice geometry)".into())
            })?;
            Ok(downsampling_operator(dims, k)?.partition().clone())
        }
        other => Err(CliError::Usage(format!(
            "{} does not produce a partition",
            other.name()
        ))),
    }
}

/// Fit any reducer.
pub fn fit_reducer(
    method: Method,
    x: &DataMatrix,
    g: &StructureGraph,
    dims: Option<&[usize]>,
    k: usize,
    seed: u64,
) -> CliResult<ReducerModel> {
    match method {
        Method::Rena | Method::Single | Method::Ward => {
            let part = fit_partition(method, x, g, dims, k)?;
            Ok(ReducerModel::FeatureGrouping(FeatureGroupingOperator::new(
                part,
            )))
        }
        Method::Downsample => {
            let dims = dims.ok_or_else(|| {
                CliError::Usage("downsample needs --dims (lattice geometry)".into())
            })?;
            Ok(ReducerModel::Downsampling {
                op: downsampling_operator(dims, k)?,
                dims: dims.to_vec(),
            })
        }
        Method::Nystrom => Ok(ReducerModel::Nystrom(nystrom_fit(x, k, seed)?)),
        Method::RandomProjection => Ok(ReducerModel::RandomProjection(
            sparse_random_projection(x.p(), k, seed)?,
        )),
    }
}
