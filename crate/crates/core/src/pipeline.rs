//! Instance files, the end-to-end bounds pipeline and free-space export.
//!
//! An instance is a JSON document:
//!
//! ```json
//! {
//!   "norm": "linf",
//!   "pipe1": [{"time": 0.0, "halfspaces": {"a": [[1.0], [-1.0]], "b": [1.0, 0.0]}}],
//!   "pipe2": [{"time": 0.0, "halfspaces": {"a": [[1.0], [-1.0]], "b": [2.0, -1.0]}}],
//!   "window": 4,
//!   "k": 64,
//!   "bits": 20
//! }
//! ```
//!
//! `window`, `k` and `bits` are optional.

use std::fs;
use std::io::{BufRead, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::distance::{compute_bounds, BoundsOptions, DistanceBounds, DEFAULT_BITS, DEFAULT_K};
use crate::error::{Error, Result};
use crate::freespace::{build_boundary, EdgeInterval, FreeSpaceBoundary, PhiKind};
use crate::geometry::{lift_time_explicit, validate_polytope, NormKind, NormName, Polytope, Ppr, SampledPipe};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Halfspaces {
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SampleRecord {
    pub time: f64,
    pub halfspaces: Halfspaces,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub norm: NormName,
    pub pipe1: Vec<SampleRecord>,
    pub pipe2: Vec<SampleRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub window: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub bits: Option<u32>,
}

impl InstanceFile {
    pub fn from_pipes(sp1: &SampledPipe, sp2: &SampledPipe, opts: &PipelineOptions) -> Self {
        let records = |sp: &SampledPipe| {
            sp.entries()
                .iter()
                .map(|(t, p)| SampleRecord {
                    time: *t,
                    halfspaces: Halfspaces { a: p.a().to_vec(), b: p.b().to_vec() },
                })
                .collect()
        };
        Self {
            norm: opts.norm,
            pipe1: records(sp1),
            pipe2: records(sp2),
            window: opts.window,
            k: Some(opts.k),
            bits: Some(opts.bits),
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("instance serializes")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PipelineOptions {
    pub norm: NormName,
    pub k: usize,
    pub bits: u32,
    pub window: Option<usize>,
}

impl Default for PipelineOptions {
    fn default() -> Self {
        Self { norm: NormName::LInf, k: DEFAULT_K, bits: DEFAULT_BITS, window: None }
    }
}

impl PipelineOptions {
    pub fn bounds(&self) -> BoundsOptions {
        BoundsOptions { k: self.k, bits: self.bits, window: self.window }
    }
}

fn convert_pipe(name: &str, records: &[SampleRecord]) -> Result<SampledPipe> {
    if records.is_empty() {
        return Err(Error::Validation {
            location: name.to_string(),
            source: Box::new(Error::InvalidPipe("no samples".into())),
        });
    }
    let mut entries = Vec::with_capacity(records.len());
    for (k, r) in records.iter().enumerate() {
        let location = format!("{name} sample {k}");
        let p = Polytope::new(r.halfspaces.a.clone(), r.halfspaces.b.clone())
            .map_err(|e| Error::Parse(format!("{location}: {e}")))?;
        let p = validate_polytope(p).map_err(|e| Error::Validation { location: location.clone(), source: Box::new(e) })?;
        entries.push((r.time, p));
    }
    SampledPipe::new(entries).map_err(|e| Error::Validation { location: name.to_string(), source: Box::new(e) })
}

/// Parses and validates an instance document.
pub fn parse_instance(text: &str) -> Result<(SampledPipe, SampledPipe, PipelineOptions)> {
    let file: InstanceFile = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    instance_pipes(&file)
}

pub fn instance_pipes(file: &InstanceFile) -> Result<(SampledPipe, SampledPipe, PipelineOptions)> {
    let sp1 = convert_pipe("pipe1", &file.pipe1)?;
    let sp2 = convert_pipe("pipe2", &file.pipe2)?;
    if sp1.dim() != sp2.dim() {
        return Err(Error::Validation {
            location: "pipe2".into(),
            source: Box::new(Error::DimensionMismatch { expected: sp1.dim(), actual: sp2.dim() }),
        });
    }
    let opts = PipelineOptions {
        norm: file.norm,
        k: file.k.unwrap_or(DEFAULT_K),
        bits: file.bits.unwrap_or(DEFAULT_BITS),
        window: file.window,
    };
    Ok((sp1, sp2, opts))
}

pub fn load_instance(path: &Path) -> Result<(SampledPipe, SampledPipe, PipelineOptions)> {
    parse_instance(&fs::read_to_string(path)?)
}

/// Time-explicit reachpipes and the matching norm on `ℝ^{d+1}`.
pub fn lifted_pair(sp1: &SampledPipe, sp2: &SampledPipe, norm: NormName) -> Result<(Ppr, Ppr, NormKind)> {
    if sp1.dim() != sp2.dim() {
        return Err(Error::DimensionMismatch { expected: sp1.dim(), actual: sp2.dim() });
    }
    let nk = NormKind::for_lifted(norm, sp1.dim());
    Ok((lift_time_explicit(sp1), lift_time_explicit(sp2), nk))
}

pub fn run_pipeline(sp1: &SampledPipe, sp2: &SampledPipe, opts: &PipelineOptions) -> Result<DistanceBounds> {
    let (r1, r2, nk) = lifted_pair(sp1, sp2, opts.norm)?;
    compute_bounds(&r1, &r2, nk, &opts.bounds())
}

/// One line of the free-space export.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum FreeSpaceRecord {
    Edge {
        i: usize,
        j: usize,
        edge: EdgeSide,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        lo: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        hi: Option<f64>,
        #[serde(default, skip_serializing_if = "std::ops::Not::not")]
        empty: bool,
    },
    Corner {
        i: usize,
        j: usize,
        free: bool,
    },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EdgeSide {
    Bottom,
    Left,
}

fn edge_record(i: usize, j: usize, edge: EdgeSide, e: &EdgeInterval) -> FreeSpaceRecord {
    match e.bounds() {
        Some((lo, hi)) => FreeSpaceRecord::Edge { i, j, edge, lo: Some(lo), hi: Some(hi), empty: false },
        None => FreeSpaceRecord::Edge { i, j, edge, lo: None, hi: None, empty: true },
    }
}

/// Records in export order: edges row-major over `(i, j)` with the bottom
/// edge before the left edge, then all corners row-major.
pub fn freespace_records(fsb: &FreeSpaceBoundary) -> Vec<FreeSpaceRecord> {
    let mut out = Vec::with_capacity(fsb.num_edges() + (fsb.m1 + 1) * (fsb.m2 + 1));
    for i in 0..=fsb.m1 {
        for j in 0..=fsb.m2 {
            if i < fsb.m1 {
                out.push(edge_record(i, j, EdgeSide::Bottom, fsb.bottom.get(i, j)));
            }
            if j < fsb.m2 {
                out.push(edge_record(i, j, EdgeSide::Left, fsb.left.get(i, j)));
            }
        }
    }
    for i in 0..=fsb.m1 {
        for j in 0..=fsb.m2 {
            out.push(FreeSpaceRecord::Corner { i, j, free: *fsb.corners.get(i, j) });
        }
    }
    out
}

pub fn write_freespace<W: Write>(fsb: &FreeSpaceBoundary, mut out: W) -> Result<usize> {
    let records = freespace_records(fsb);
    for r in &records {
        serde_json::to_writer(&mut out, r).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    out.flush()?;
    Ok(records.len())
}

/// Rebuilds a boundary from exported lines (window information is not
/// exported; excluded edges are already empty).
pub fn read_freespace<R: BufRead>(input: R) -> Result<FreeSpaceBoundary> {
    let mut records = Vec::new();
    for line in input.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        records.push(serde_json::from_str::<FreeSpaceRecord>(&line).map_err(|e| Error::Parse(e.to_string()))?);
    }
    let (mut m1, mut m2) = (0, 0);
    for r in &records {
        if let FreeSpaceRecord::Corner { i, j, .. } = r {
            m1 = m1.max(*i);
            m2 = m2.max(*j);
        }
    }
    let mut fsb = FreeSpaceBoundary::empty(m1, m2);
    for r in records {
        match r {
            FreeSpaceRecord::Corner { i, j, free } => fsb.corners.set(i, j, free),
            FreeSpaceRecord::Edge { i, j, edge, lo, hi, .. } => {
                let e = match (lo, hi) {
                    (Some(lo), Some(hi)) => EdgeInterval::new(lo, hi).unwrap_or(EdgeInterval::Empty),
                    _ => EdgeInterval::Empty,
                };
                let in_range = match edge {
                    EdgeSide::Bottom => i < m1 && j <= m2,
                    EdgeSide::Left => i <= m1 && j < m2,
                };
                if !in_range {
                    return Err(Error::Parse(format!("edge ({i}, {j}) outside the corner grid")));
                }
                match edge {
                    EdgeSide::Bottom => fsb.bottom.set(i, j, e),
                    EdgeSide::Left => fsb.left.set(i, j, e),
                }
            }
        }
    }
    Ok(fsb)
}

/// Free-space boundary of the lifted pipes at `delta`.
pub fn freespace_boundary(
    sp1: &SampledPipe,
    sp2: &SampledPipe,
    delta: f64,
    phi: PhiKind,
    opts: &PipelineOptions,
) -> Result<FreeSpaceBoundary> {
    let (r1, r2, nk) = lifted_pair(sp1, sp2, opts.norm)?;
    build_boundary(&r1, &r2, delta, phi, nk, opts.k, opts.window)
}

/// Writes the free space as line-delimited JSON; returns the record count.
pub fn export_freespace(
    sp1: &SampledPipe,
    sp2: &SampledPipe,
    delta: f64,
    phi: PhiKind,
    opts: &PipelineOptions,
    out_path: &Path,
) -> Result<usize> {
    let fsb = freespace_boundary(sp1, sp2, delta, phi, opts)?;
    let file = fs::File::create(out_path)?;
    write_freespace(&fsb, std::io::BufWriter::new(file))
}
