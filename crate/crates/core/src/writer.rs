//! On-disk dataset layout.
//!
//! ```text
//! <out>/manifest.json
//! <out>/stats.json
//! <out>/nodes/<type>/mapping.csv              node_id,iri
//! <out>/nodes/<type>/features_content.csv     node_id,f0,f1,...
//! <out>/nodes/<type>/features_topology.csv    node_id,f0,f1,...
//! <out>/edges/<type>/edges.csv                src_id,dst_id
//! <out>/edges/<type>/features.csv             edge_id,f0,f1,...
//! <out>/embeddings/checkpoint.bin             (optional)
//! ```
//!
//! `manifest.json` is written last and removed first, so a directory
//! without it holds an incomplete run.

use std::collections::BTreeMap;
use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::Serialize;
use thiserror::Error;

use crate::edges::{EdgeStats, EdgeTable};
use crate::matrix::{ColumnBlock, FeatureMatrix};
use crate::nodes::NodeTable;

#[derive(Debug, Error)]
pub enum WriteError {
    #[error("cannot write {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("shape mismatch: {0}")]
    Shape(String),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> WriteError + '_ {
    move |source| WriteError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn csv_err(path: &Path) -> impl FnOnce(csv::Error) -> WriteError + '_ {
    move |e| WriteError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    }
}

/// Formats like C's `%.9g`: 9 significant digits, trailing zeros removed,
/// exponent notation below `1e-4` and from `1e9` on. Negative zero prints
/// as `0`.
pub fn format_g9(v: f64) -> String {
    if v == 0.0 {
        return "0".into();
    }
    if !v.is_finite() {
        return v.to_string();
    }
    let sci = format!("{v:.8e}");
    let (mantissa, exp) = sci.split_once('e').expect("exponent present");
    let exp: i32 = exp.parse().expect("integer exponent");
    let trim = |s: &str| -> String {
        if s.contains('.') {
            s.trim_end_matches('0').trim_end_matches('.').to_string()
        } else {
            s.to_string()
        }
    };
    if !(-4..9).contains(&exp) {
        let sign = if exp < 0 { '-' } else { '+' };
        format!("{}e{sign}{:02}", trim(mantissa), exp.abs())
    } else {
        trim(&format!("{v:.*}", (8 - exp) as usize))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MatrixKind {
    Content = 0,
    Topology = 1,
    Edge = 2,
}

pub const MATRIX_MAGIC: &[u8; 8] = b"R2GMAT01";

/// Binary sidecar: magic `R2GMAT01`, kind `u8` plus 3 zero bytes,
/// `cols: u32`, `rows: u64`, `seed: u64`, then row-major `f32` values, all
/// little-endian.
pub fn write_matrix_bin<W: Write>(mut w: W, m: &FeatureMatrix, kind: MatrixKind, seed: u64) -> io::Result<()> {
    w.write_all(MATRIX_MAGIC)?;
    w.write_all(&[kind as u8, 0, 0, 0])?;
    w.write_all(&(m.cols() as u32).to_le_bytes())?;
    w.write_all(&(m.rows() as u64).to_le_bytes())?;
    w.write_all(&seed.to_le_bytes())?;
    for v in m.data() {
        w.write_all(&(*v as f32).to_le_bytes())?;
    }
    w.flush()
}

fn write_matrix_csv(path: &Path, id_column: &str, m: &FeatureMatrix) -> Result<(), WriteError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    let mut header = vec![id_column.to_string()];
    header.extend((0..m.cols()).map(|c| format!("f{c}")));
    w.write_record(&header).map_err(csv_err(path))?;
    let mut record = Vec::with_capacity(m.cols() + 1);
    for r in 0..m.rows() {
        record.clear();
        record.push(r.to_string());
        record.extend(m.row(r).iter().map(|v| format_g9(*v)));
        w.write_record(&record).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_pairs_csv(path: &Path, pairs: &[(usize, usize)]) -> Result<(), WriteError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["src_id", "dst_id"]).map_err(csv_err(path))?;
    for (a, b) in pairs {
        w.write_record([a.to_string(), b.to_string()]).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

fn write_mapping_csv(path: &Path, table: &NodeTable) -> Result<(), WriteError> {
    let mut w = csv::Writer::from_path(path).map_err(csv_err(path))?;
    w.write_record(["node_id", "iri"]).map_err(csv_err(path))?;
    for (i, iri) in table.entries().iter().enumerate() {
        w.write_record([i.to_string().as_str(), iri]).map_err(csv_err(path))?;
    }
    w.flush().map_err(io_err(path))
}

/// Pretty JSON with a trailing newline.
pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), WriteError> {
    let file = File::create(path).map_err(io_err(path))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, value).map_err(|e| WriteError::Io {
        path: path.to_path_buf(),
        source: e.into(),
    })?;
    w.write_all(b"\n").map_err(io_err(path))?;
    w.flush().map_err(io_err(path))
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct NodeManifest {
    pub class_iri: String,
    pub count: usize,
    pub content_dim: usize,
    pub content_blocks: Vec<ColumnBlock>,
    pub topology_dim: usize,
    pub properties: Vec<crate::content::profile::PropertyProfile>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct EdgeManifest {
    pub kind: String,
    pub src_node_type: String,
    pub dst_node_type: String,
    pub count: usize,
    pub feature_dim: usize,
    pub feature_blocks: Vec<ColumnBlock>,
    pub stats: EdgeStats,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct TopologyManifest {
    pub model: String,
    pub dim: usize,
    pub entities: usize,
    pub relations: usize,
    pub triples: usize,
    pub train: usize,
    pub valid: usize,
    pub test: usize,
    pub epochs: usize,
    pub final_loss: Option<f64>,
    pub metrics: Option<crate::topology::eval::LinkMetrics>,
}

#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct DatasetManifest {
    pub tool_version: String,
    pub config_hash: String,
    pub seed: u64,
    pub generated_at: String,
    pub feature_mode: String,
    pub nodes: BTreeMap<String, NodeManifest>,
    pub edges: BTreeMap<String, EdgeManifest>,
    pub topology: Option<TopologyManifest>,
    pub warnings: Vec<String>,
}

pub struct NodeOutput<'a> {
    pub table: &'a NodeTable,
    pub content: Option<&'a FeatureMatrix>,
    pub topology: Option<&'a FeatureMatrix>,
}

#[derive(Debug, Clone, Copy, Default)]
pub struct WriteOptions {
    pub binary_sidecar: bool,
    pub seed: u64,
}

pub const MANIFEST: &str = "manifest.json";

/// Removes the manifest and every directory a previous run wrote, then
/// creates `out`.
pub fn prepare_output_dir(out: &Path) -> Result<(), WriteError> {
    let manifest = out.join(MANIFEST);
    match fs::remove_file(&manifest) {
        Err(e) if e.kind() != io::ErrorKind::NotFound => return Err(io_err(&manifest)(e)),
        _ => {}
    }
    for sub in ["nodes", "edges", "embeddings"] {
        let dir = out.join(sub);
        if dir.is_dir() {
            fs::remove_dir_all(&dir).map_err(io_err(&dir))?;
        }
    }
    fs::create_dir_all(out).map_err(io_err(out))
}

fn check_rows(what: &str, m: &FeatureMatrix, rows: usize) -> Result<(), WriteError> {
    if m.rows() != rows {
        return Err(WriteError::Shape(format!("{what} has {} rows, expected {rows}", m.rows())));
    }
    Ok(())
}

fn write_sidecar(path: &Path, m: &FeatureMatrix, kind: MatrixKind, seed: u64) -> Result<(), WriteError> {
    let f = File::create(path).map_err(io_err(path))?;
    write_matrix_bin(BufWriter::new(f), m, kind, seed).map_err(io_err(path))
}

/// Writes node and edge files. The manifest is written separately by
/// [`commit_manifest`].
pub fn write_dataset(out: &Path, nodes: &[NodeOutput<'_>], edges: &[EdgeTable], opts: WriteOptions) -> Result<(), WriteError> {
    for n in nodes {
        let dir = out.join("nodes").join(n.table.node_type());
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        write_mapping_csv(&dir.join("mapping.csv"), n.table)?;
        for (m, file, kind) in [
            (n.content, "features_content", MatrixKind::Content),
            (n.topology, "features_topology", MatrixKind::Topology),
        ] {
            let Some(m) = m else { continue };
            check_rows(&format!("{file} of '{}'", n.table.node_type()), m, n.table.len())?;
            write_matrix_csv(&dir.join(format!("{file}.csv")), "node_id", m)?;
            if opts.binary_sidecar {
                write_sidecar(&dir.join(format!("{file}.bin")), m, kind, opts.seed)?;
            }
        }
    }
    for e in edges {
        let dir = out.join("edges").join(&e.edge_type);
        fs::create_dir_all(&dir).map_err(io_err(&dir))?;
        write_pairs_csv(&dir.join("edges.csv"), &e.pairs)?;
        if let Some(f) = &e.features {
            check_rows(&format!("features of edge type '{}'", e.edge_type), f, e.pairs.len())?;
            write_matrix_csv(&dir.join("features.csv"), "edge_id", f)?;
            if opts.binary_sidecar {
                write_sidecar(&dir.join("features.bin"), f, MatrixKind::Edge, opts.seed)?;
            }
        }
    }
    Ok(())
}

pub fn commit_manifest(out: &Path, manifest: &DatasetManifest) -> Result<(), WriteError> {
    write_json(&out.join(MANIFEST), manifest)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::BlockEncoding;

    #[test]
    fn g9_matches_printf() {
        let cases = [
            (0.0, "0"),
            (-0.0, "0"),
            (1.0, "1"),
            (0.5, "0.5"),
            (1.0 / 3.0, "0.333333333"),
            (2.0 / 3.0, "0.666666667"),
            (-1.5, "-1.5"),
            (123456789.0, "123456789"),
            (1234567890.0, "1.23456789e+09"),
            (0.0001, "0.0001"),
            (0.00001, "1e-05"),
            (1.5e-7, "1.5e-07"),
            (999999999.5, "1e+09"),
            (0.1, "0.1"),
            (1e100, "1e+100"),
            (86400.0, "86400"),
        ];
        for (v, want) in cases {
            assert_eq!(format_g9(v), want, "{v}");
        }
    }

    #[test]
    fn g9_round_trips_f32() {
        for bits in (0u32..u32::MAX).step_by(7_919_981) {
            let f = f32::from_bits(bits);
            if f.is_finite() {
                let s = format_g9(f64::from(f));
                assert_eq!(s.parse::<f32>().unwrap(), f, "{s}");
            }
        }
    }

    #[test]
    fn layout_and_empty_cases() {
        let dir = tempfile::tempdir().unwrap();
        let table = NodeTable::from_members("work", vec![("http://ex/a,b".into(), 0), ("http://ex/c".into(), 1)]);
        let empty = FeatureMatrix::empty(2);
        let topo = FeatureMatrix::from_rows(2, 1, vec![0.25, -1.0], BlockEncoding::Embedding, "embedding").unwrap();
        let edges = EdgeTable {
            edge_type: "cites".into(),
            src_node_type: "work".into(),
            dst_node_type: "work".into(),
            pairs: vec![],
            features: None,
        };
        prepare_output_dir(dir.path()).unwrap();
        write_dataset(
            dir.path(),
            &[NodeOutput {
                table: &table,
                content: Some(&empty),
                topology: Some(&topo),
            }],
            &[edges],
            WriteOptions {
                binary_sidecar: true,
                seed: 3,
            },
        )
        .unwrap();
        let read = |p: &str| fs::read_to_string(dir.path().join(p)).unwrap();
        assert_eq!(read("nodes/work/mapping.csv"), "node_id,iri\n0,\"http://ex/a,b\"\n1,http://ex/c\n");
        assert_eq!(read("nodes/work/features_content.csv"), "node_id\n0\n1\n");
        assert_eq!(read("nodes/work/features_topology.csv"), "node_id,f0\n0,0.25\n1,-1\n");
        assert_eq!(read("edges/cites/edges.csv"), "src_id,dst_id\n");
        let bin = fs::read(dir.path().join("nodes/work/features_topology.bin")).unwrap();
        assert_eq!(&bin[..8], MATRIX_MAGIC);
        assert_eq!(bin.len(), 32 + 2 * 4);
    }
}
