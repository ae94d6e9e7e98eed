//! Bit-exact readers and writers for matrices, graphs, partitions, and
//! reducer models.
//!
//! Formats:
//! - matrix (binary): magic `FGM1`, `u64` p, `u64` n (little-endian), then
//!   `p * n` little-endian `f64` values in column-major order;
//! - matrix (CSV): header line `p,n`, then `p` rows of `n` comma-separated
//!   values (one sample per column);
//! - graph (text): first line `p m`, then `m` lines `i j` with `i < j`,
//!   each undirected edge once;
//! - partition (text): first line `p k`, second line `p` space-separated
//!   dense cluster ids;
//! - reducer (JSON): envelope `{variant, k, p, payload}`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::baselines::{sparse_random_projection, NystromMap, ReducerModel};
use crate::error::{ParseError, Result};
use crate::graph::{Partition, StructureGraph};
use crate::grouping::FeatureGroupingOperator;
use crate::matrix::DataMatrix;

pub const MATRIX_MAGIC: &[u8; 4] = b"FGM1";
const MATRIX_HEADER_LEN: usize = 20;

// ---------------------------------------------------------------- matrices

pub fn encode_matrix(x: &DataMatrix) -> Vec<u8> {
    let mut out = Vec::with_capacity(MATRIX_HEADER_LEN + 8 * x.values().len());
    out.extend_from_slice(MATRIX_MAGIC);
    out.extend_from_slice(&(x.p() as u64).to_le_bytes());
    out.extend_from_slice(&(x.n() as u64).to_le_bytes());
    for v in x.values() {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_matrix(bytes: &[u8]) -> Result<DataMatrix> {
    if bytes.len() < MATRIX_HEADER_LEN {
        return Err(ParseError::at_byte(
            "matrix",
            bytes.len() as u64,
            format!(
                "truncated header: {} bytes, need {MATRIX_HEADER_LEN}",
                bytes.len()
            ),
        )
        .into());
    }
    if &bytes[0..4] != MATRIX_MAGIC {
        return Err(ParseError::at_byte(
            "matrix",
            0,
            format!("bad magic {:?}, expected {MATRIX_MAGIC:?}", &bytes[0..4]),
        )
        .into());
    }
    let p = u64::from_le_bytes(bytes[4..12].try_into().unwrap());
    let n = u64::from_le_bytes(bytes[12..20].try_into().unwrap());
    if p == 0 || n == 0 {
        return Err(ParseError::at_byte("matrix", 4, format!("zero dimension: p={p}, n={n}")).into());
    }
    let count = p
        .checked_mul(n)
        .and_then(|c| c.checked_mul(8))
        .and_then(|c| c.checked_add(MATRIX_HEADER_LEN as u64))
        .ok_or_else(|| ParseError::at_byte("matrix", 4, format!("size overflow: p={p}, n={n}")))?;
    if bytes.len() as u64 != count {
        return Err(ParseError::at_byte(
            "matrix",
            MATRIX_HEADER_LEN as u64,
            format!(
                "expected {count} bytes total for p={p}, n={n}, found {}",
                bytes.len()
            ),
        )
        .into());
    }
    let mut values = Vec::with_capacity((p * n) as usize);
    for chunk in bytes[MATRIX_HEADER_LEN..].chunks_exact(8) {
        values.push(f64::from_le_bytes(chunk.try_into().unwrap()));
    }
    DataMatrix::from_vec(p as usize, n as usize, values)
}

pub fn write_matrix(x: &DataMatrix, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_matrix(x))?;
    Ok(())
}

pub fn read_matrix(path: impl AsRef<Path>) -> Result<DataMatrix> {
    decode_matrix(&fs::read(path)?)
}

pub fn encode_matrix_csv(x: &DataMatrix) -> String {
    let mut out = format!("{},{}\n", x.p(), x.n());
    for i in 0..x.p() {
        for s in 0..x.n() {
            if s > 0 {
                out.push(',');
            }
            out.push_str(&format!("{:?}", x.get(i, s)));
        }
        out.push('\n');
    }
    out
}

pub fn decode_matrix_csv(text: &str) -> Result<DataMatrix> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| ParseError::at_line("matrix csv", 1, "empty input"))?;
    let dims: Vec<&str> = header.split(',').collect();
    if dims.len() != 2 {
        return Err(ParseError::at_line("matrix csv", 1, "header must be `p,n`").into());
    }
    let p: usize = dims[0]
        .trim()
        .parse()
        .map_err(|_| ParseError::at_line("matrix csv", 1, format!("bad p `{}`", dims[0])))?;
    let n: usize = dims[1]
        .trim()
        .parse()
        .map_err(|_| ParseError::at_line("matrix csv", 1, format!("bad n `{}`", dims[1])))?;
    let mut x = DataMatrix::zeros(p, n)?;
    let mut rows = 0usize;
    for (idx, line) in lines {
        if line.is_empty() && rows == p {
            continue;
        }
        if rows >= p {
            return Err(ParseError::at_line("matrix csv", idx + 1, "unexpected extra row").into());
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != n {
            return Err(ParseError::at_line(
                "matrix csv",
                idx + 1,
                format!("expected {n} values, found {}", fields.len()),
            )
            .into());
        }
        for (s, f) in fields.iter().enumerate() {
            let v: f64 = f.trim().parse().map_err(|_| {
                ParseError::at_line("matrix csv", idx + 1, format!("bad value `{f}`"))
            })?;
            x.set(rows, s, v);
        }
        rows += 1;
    }
    if rows != p {
        return Err(
            ParseError::at_line("matrix csv", rows + 1, format!("expected {p} rows, found {rows}"))
                .into(),
        );
    }
    Ok(x)
}

pub fn write_matrix_csv(x: &DataMatrix, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_matrix_csv(x))?;
    Ok(())
}

pub fn read_matrix_csv(path: impl AsRef<Path>) -> Result<DataMatrix> {
    decode_matrix_csv(&fs::read_to_string(path)?)
}

// ------------------------------------------------------------------ graphs

pub fn encode_graph(g: &StructureGraph) -> String {
    let mut out = format!("{} {}\n", g.p(), g.edge_count());
    for &(i, j) in g.edges() {
        out.push_str(&format!("{i} {j}\n"));
    }
    out
}

fn parse_two(what: &'static str, line_no: usize, line: &str) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace();
    let a = it
        .next()
        .ok_or_else(|| ParseError::at_line(what, line_no, "expected two fields"))?;
    let b = it
        .next()
        .ok_or_else(|| ParseError::at_line(what, line_no, "expected two fields"))?;
    if it.next().is_some() {
        return Err(ParseError::at_line(what, line_no, "expected exactly two fields").into());
    }
    let a: usize = a
        .parse()
        .map_err(|_| ParseError::at_line(what, line_no, format!("bad integer `{a}`")))?;
    let b: usize = b
        .parse()
        .map_err(|_| ParseError::at_line(what, line_no, format!("bad integer `{b}`")))?;
    Ok((a, b))
}

pub fn decode_graph(text: &str) -> Result<StructureGraph> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| ParseError::at_line("graph", 1, "empty input"))?;
    let (p, m) = parse_two("graph", 1, header)?;
    if p == 0 {
        return Err(ParseError::at_line("graph", 1, "p must be positive").into());
    }
    let mut edges = Vec::with_capacity(m);
    let mut seen = std::collections::HashSet::with_capacity(m);
    for (idx, line) in lines {
        let line_no = idx + 1;
        if edges.len() >= m {
            if line.trim().is_empty() {
                continue;
            }
            return Err(ParseError::at_line("graph", line_no, "unexpected trailing line").into());
        }
        let (i, j) = parse_two("graph", line_no, line)?;
        if i == j {
            return Err(ParseError::at_line("graph", line_no, format!("self-loop {i} {j}")).into());
        }
        if i > j {
            return Err(ParseError::at_line(
                "graph",
                line_no,
                format!("edge {i} {j} must be written ascending (i < j)"),
            )
            .into());
        }
        if j >= p {
            return Err(ParseError::at_line(
                "graph",
                line_no,
                format!("vertex {j} out of range for p={p}"),
            )
            .into());
        }
        if !seen.insert((i, j)) {
            return Err(
                ParseError::at_line("graph", line_no, format!("duplicate edge {i} {j}")).into(),
            );
        }
        edges.push((i, j));
    }
    if edges.len() != m {
        return Err(ParseError::at_line(
            "graph",
            edges.len() + 1,
            format!("expected {m} edges, found {}", edges.len()),
        )
        .into());
    }
    StructureGraph::from_edges(p, edges)
}

pub fn write_graph(g: &StructureGraph, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_graph(g))?;
    Ok(())
}

pub fn read_graph(path: impl AsRef<Path>) -> Result<StructureGraph> {
    decode_graph(&fs::read_to_string(path)?)
}

// -------------------------------------------------------------- partitions

pub fn encode_partition(part: &Partition) -> String {
    let ids: Vec<String> = part.assignment().iter().map(|c| c.to_string()).collect();
    format!("{} {}\n{}\n", part.p(), part.k(), ids.join(" "))
}

pub fn decode_partition(text: &str) -> Result<Partition> {
    let mut lines = text.lines().enumerate();
    let (_, header) = lines
        .next()
        .ok_or_else(|| ParseError::at_line("partition", 1, "empty input"))?;
    let (p, k) = parse_two("partition", 1, header)?;
    let (_, body) = lines
        .next()
        .ok_or_else(|| ParseError::at_line("partition", 2, "missing assignment line"))?;
    for (idx, line) in lines {
        if !line.trim().is_empty() {
            return Err(ParseError::at_line("partition", idx + 1, "unexpected trailing line").into());
        }
    }
    let mut assignment = Vec::with_capacity(p);
    for tok in body.split_whitespace() {
        let c: usize = tok
            .parse()
            .map_err(|_| ParseError::at_line("partition", 2, format!("bad cluster id `{tok}`")))?;
        assignment.push(c);
    }
    if assignment.len() != p {
        return Err(ParseError::at_line(
            "partition",
            2,
            format!("expected {p} ids, found {}", assignment.len()),
        )
        .into());
    }
    Partition::new(assignment, k).map_err(|e| {
        ParseError::at_line("partition", 2, format!("invalid partition: {e}")).into()
    })
}

pub fn write_partition(part: &Partition, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, encode_partition(part))?;
    Ok(())
}

pub fn read_partition(path: impl AsRef<Path>) -> Result<Partition> {
    decode_partition(&fs::read_to_string(path)?)
}

// ---------------------------------------------------------------- reducers

#[derive(Serialize, Deserialize)]
struct Envelope {
    variant: String,
    k: usize,
    p: usize,
    payload: serde_json::Value,
}

#[derive(Serialize, Deserialize)]
struct GroupingPayload {
    partition: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    dims: Option<Vec<usize>>,
}

#[derive(Serialize, Deserialize)]
struct ProjectionPayload {
    seed: u64,
    density: f64,
}

#[derive(Serialize, Deserialize)]
struct NystromPayload {
    selected: Vec<usize>,
    weights: Vec<f64>,
}

pub fn reducer_to_json(model: &ReducerModel) -> String {
    let payload = match model {
        ReducerModel::FeatureGrouping(op) => serde_json::to_value(GroupingPayload {
            partition: encode_partition(op.partition()),
            dims: None,
        }),
        ReducerModel::Downsampling { op, dims } => serde_json::to_value(GroupingPayload {
            partition: encode_partition(op.partition()),
            dims: Some(dims.clone()),
        }),
        ReducerModel::Nystrom(map) => serde_json::to_value(NystromPayload {
            selected: map.selected().to_vec(),
            weights: map.weights().to_vec(),
        }),
        ReducerModel::RandomProjection(proj) => serde_json::to_value(ProjectionPayload {
            seed: proj.seed(),
            density: proj.density(),
        }),
    }
    .expect("payload serialization cannot fail");
    let envelope = Envelope {
        variant: model.variant_name().to_string(),
        k: model.k(),
        p: model.p(),
        payload,
    };
    serde_json::to_string_pretty(&envelope).expect("envelope serialization cannot fail")
}

pub fn reducer_from_json(text: &str) -> Result<ReducerModel> {
    let envelope: Envelope = serde_json::from_str(text)
        .map_err(|e| ParseError::whole("reducer", format!("invalid JSON envelope: {e}")))?;
    let model = match envelope.variant.as_str() {
        "feature_grouping" | "downsampling" => {
            let payload: GroupingPayload = serde_json::from_value(envelope.payload)
                .map_err(|e| ParseError::whole("reducer", format!("bad payload: {e}")))?;
            let part = decode_partition(&payload.partition)?;
            let op = FeatureGroupingOperator::new(part);
            if envelope.variant == "downsampling" {
                ReducerModel::Downsampling {
                    op,
                    dims: payload.dims.unwrap_or_default(),
                }
            } else {
                ReducerModel::FeatureGrouping(op)
            }
        }
        "nystrom" => {
            let payload: NystromPayload = serde_json::from_value(envelope.payload)
                .map_err(|e| ParseError::whole("reducer", format!("bad payload: {e}")))?;
            ReducerModel::Nystrom(NystromMap::from_parts(
                payload.selected,
                payload.weights,
                envelope.k,
                envelope.p,
            )?)
        }
        "random_projection" => {
            let payload: ProjectionPayload = serde_json::from_value(envelope.payload)
                .map_err(|e| ParseError::whole("reducer", format!("bad payload: {e}")))?;
            let proj = sparse_random_projection(envelope.p, envelope.k, payload.seed)?;
            if (proj.density() - payload.density).abs() > 1e-12 {
                return Err(ParseError::whole(
                    "reducer",
                    format!(
                        "stored density {} does not match regenerated {}",
                        payload.density,
                        proj.density()
                    ),
                )
                .into());
            }
            ReducerModel::RandomProjection(proj)
        }
        other => {
            return Err(ParseError::whole("reducer", format!("unknown variant `{other}`")).into())
        }
    };
    if model.k() != envelope.k || model.p() != envelope.p {
        return Err(ParseError::whole(
            "reducer",
            format!(
                "envelope says k={}, p={} but payload yields k={}, p={}",
                envelope.k,
                envelope.p,
                model.k(),
                model.p()
            ),
        )
        .into());
    }
    Ok(model)
}

pub fn write_reducer(model: &ReducerModel, path: impl AsRef<Path>) -> Result<()> {
    fs::write(path, reducer_to_json(model))?;
    Ok(())
}

pub fn read_reducer(path: impl AsRef<Path>) -> Result<ReducerModel> {
    reducer_from_json(&fs::read_to_string(path)?)
}
