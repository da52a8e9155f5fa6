//! End-to-end run: ingest, node extraction, content features, topology
//! features, edges, write.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::PathBuf;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::Serialize;
use thiserror::Error;

use crate::config::{Config, FeatureMode, TextEncoderKind, ValidatedConfig};
use crate::content::{build_content_features, make_text_encoder};
use crate::edges::{build_edges, EdgeStats};
use crate::matrix::FeatureMatrix;
use crate::nodes::{extract_nodes, NodeTable};
use crate::rdf::{parse_dump, ParseOptions};
use crate::topology::checkpoint::write_checkpoint;
use crate::topology::eval::LinkMetrics;
use crate::topology::{export_node_embeddings, run_topology};
use crate::writer::{
    commit_manifest, prepare_output_dir, write_dataset, write_json, DatasetManifest, EdgeManifest, NodeManifest,
    NodeOutput, TopologyManifest, WriteOptions,
};

pub const TOOL_VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Error)]
#[error("{stage}: {source}")]
pub struct PipelineError {
    pub stage: &'static str,
    #[source]
    pub source: Box<dyn std::error::Error + Send + Sync>,
}

fn stage<E: std::error::Error + Send + Sync + 'static>(stage: &'static str) -> impl FnOnce(E) -> PipelineError {
    move |e| PipelineError {
        stage,
        source: Box::new(e),
    }
}

/// Command-line overrides applied on top of the config file.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub out_dir: Option<PathBuf>,
    pub mode: Option<FeatureMode>,
    pub seed: Option<u64>,
    pub lenient: bool,
    /// Worker threads; `None` uses all cores.
    pub threads: Option<usize>,
}

#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct NodeStats {
    pub count: usize,
    pub selected_properties: usize,
    pub dropped_properties: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct EdgeTypeStats {
    pub count: usize,
    #[serde(flatten)]
    pub stats: EdgeStats,
}

#[derive(Debug, Clone, Default, Serialize, PartialEq)]
pub struct PipelineStats {
    pub triples_parsed: usize,
    pub statements: usize,
    pub syntax_errors: usize,
    /// Wall-clock seconds per stage.
    pub stage_seconds: BTreeMap<String, f64>,
    pub nodes: BTreeMap<String, NodeStats>,
    pub edges: BTreeMap<String, EdgeTypeStats>,
    pub embedding: Option<LinkMetrics>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub out_dir: PathBuf,
    pub stats: PipelineStats,
    pub manifest: DatasetManifest,
}

pub fn apply_overrides(cfg: &Config, opts: &RunOptions) -> Config {
    let mut cfg = cfg.clone();
    if let Some(out) = &opts.out_dir {
        cfg.output.dir = out.clone();
    }
    if let Some(mode) = opts.mode {
        cfg.features.mode = mode;
    }
    if let Some(seed) = opts.seed {
        cfg.features.seed = seed;
    }
    cfg.input.lenient |= opts.lenient;
    cfg
}

/// Human-readable plan for `--dry-run`.
pub fn describe_plan(cfg: &Config) -> String {
    let mut s = String::new();
    let f = &cfg.features;
    let _ = writeln!(s, "input:  {} ({}{})", cfg.input.path.display(), cfg.input.format, if cfg.input.lenient { ", lenient" } else { "" });
    let _ = writeln!(s, "output: {}", cfg.output.dir.display());
    let _ = writeln!(s, "features: {} (seed {})", f.mode, f.seed);
    if f.mode.content() {
        let encoder = match f.text_encoder {
            TextEncoderKind::Hashing => "hashing",
            TextEncoderKind::External => "external",
        };
        let _ = writeln!(s, "  content: text encoder {encoder}, text dim {}", f.text_dim);
    }
    if f.mode.topology() {
        let _ = writeln!(
            s,
            "  topology: {} dim {}, {} epochs, lr {}, batch {}",
            f.embedding_model, f.embedding_dim, f.epochs, f.learning_rate, f.batch_size
        );
    }
    for n in &cfg.nodes {
        let _ = writeln!(s, "node {}: <{}>", n.name, n.class_iri);
    }
    for e in &cfg.edges {
        let _ = writeln!(s, "edge {}: {} {} -> {}", e.name, e.spec.kind_name(), e.subject_node, e.object_node);
    }
    s
}

fn timestamp() -> String {
    let now = SystemTime::now().duration_since(UNIX_EPOCH).unwrap_or_default();
    chrono::DateTime::from_timestamp(now.as_secs() as i64, now.subsec_nanos())
        .map(|d| d.to_rfc3339_opts(chrono::SecondsFormat::Secs, true))
        .unwrap_or_default()
}

/// Runs the pipeline, optionally inside a dedicated thread pool.
pub fn run(validated: &ValidatedConfig, opts: &RunOptions) -> Result<RunOutcome, PipelineError> {
    match opts.threads {
        Some(n) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(n.max(1))
                .build()
                .map_err(stage("threads"))?;
            pool.install(|| run_inner(validated, opts))
        }
        None => run_inner(validated, opts),
    }
}

fn run_inner(validated: &ValidatedConfig, opts: &RunOptions) -> Result<RunOutcome, PipelineError> {
    let cfg = apply_overrides(&validated.config, opts);
    let features = &cfg.features;
    let mut stats = PipelineStats::default();
    let mut warnings = Vec::new();
    let mut clock = Instant::now();
    let mut lap = |stats: &mut PipelineStats, name: &str| {
        stats.stage_seconds.insert(name.to_string(), clock.elapsed().as_secs_f64());
        clock = Instant::now();
    };

    log::info!("parsing {}", cfg.input.path.display());
    let dump = parse_dump(&cfg.input.path, cfg.input.format, ParseOptions { lenient: cfg.input.lenient }).map_err(stage("ingest"))?;
    stats.triples_parsed = dump.store.len();
    stats.statements = dump.statements;
    stats.syntax_errors = dump.errors.len();
    for issue in &dump.errors {
        log::warn!("{}:{}: {}", cfg.input.path.display(), issue.line, issue.message);
    }
    if !dump.errors.is_empty() {
        warnings.push(format!("{} malformed statement(s) skipped", dump.errors.len()));
    }
    let store = dump.store;
    log::info!("{} distinct triples", store.len());
    lap(&mut stats, "ingest");

    let tables: Vec<NodeTable> = cfg.nodes.iter().map(|n| extract_nodes(&store, n)).collect();
    for (t, n) in tables.iter().zip(&cfg.nodes) {
        if t.is_empty() {
            warnings.push(format!("node type '{}': class <{}> has no members", n.name, n.class_iri));
        }
        log::info!("node type '{}': {} nodes", n.name, t.len());
    }
    lap(&mut stats, "nodes");

    let mut node_manifests: BTreeMap<String, NodeManifest> = cfg
        .nodes
        .iter()
        .zip(&tables)
        .map(|(n, t)| {
            (
                n.name.clone(),
                NodeManifest {
                    class_iri: n.class_iri.clone(),
                    count: t.len(),
                    content_dim: 0,
                    content_blocks: Vec::new(),
                    topology_dim: 0,
                    properties: Vec::new(),
                },
            )
        })
        .collect();

    let mut content: Vec<Option<FeatureMatrix>> = vec![None; tables.len()];
    if features.mode.content() {
        let mut encoder = make_text_encoder(features).map_err(stage("content features"))?;
        for (i, (n, t)) in cfg.nodes.iter().zip(&tables).enumerate() {
            let c = build_content_features(&store, t, n, features, encoder.as_mut()).map_err(stage("content features"))?;
            warnings.extend(c.warnings.iter().map(|w| format!("node type '{}': {w}", n.name)));
            let s = stats.nodes.entry(n.name.clone()).or_default();
            s.count = t.len();
            for p in &c.profiles {
                match p.dropped {
                    Some(reason) => {
                        let key = serde_json::to_value(reason).ok().and_then(|v| v.as_str().map(str::to_string)).unwrap_or_default();
                        *s.dropped_properties.entry(key).or_default() += 1;
                    }
                    None => s.selected_properties += 1,
                }
            }
            let m = node_manifests.get_mut(&n.name).expect("node manifest");
            m.content_dim = c.matrix.cols();
            m.content_blocks = c.matrix.blocks().to_vec();
            m.properties = c.profiles;
            content[i] = Some(c.matrix);
        }
    }
    for (n, t) in cfg.nodes.iter().zip(&tables) {
        stats.nodes.entry(n.name.clone()).or_default().count = t.len();
    }
    lap(&mut stats, "content");

    let mut topology: Vec<Option<FeatureMatrix>> = vec![None; tables.len()];
    let mut topology_manifest = None;
    let mut trained = None;
    if features.mode.topology() {
        let result = run_topology(&store, features).map_err(stage("topology features"))?;
        for (i, (n, t)) in cfg.nodes.iter().zip(&tables).enumerate() {
            let (m, missing) = export_node_embeddings(&result.model, &result.ids, t);
            if missing > 0 {
                warnings.push(format!(
                    "node type '{}': {missing} node(s) without object-property triples get zero embeddings",
                    n.name
                ));
            }
            node_manifests.get_mut(&n.name).expect("node manifest").topology_dim = m.cols();
            topology[i] = Some(m);
        }
        if let Some(m) = &result.metrics {
            log::info!("link prediction: MRR {:.4}, Hits@1 {:.4}, Hits@10 {:.4}", m.mrr, m.hits_at_1, m.hits_at_10);
        }
        stats.embedding = result.metrics;
        topology_manifest = Some(TopologyManifest {
            model: features.embedding_model.to_string(),
            dim: features.embedding_dim,
            entities: result.ids.entity_count(),
            relations: result.ids.relation_count(),
            triples: result.ids.triples.len(),
            train: result.ids.train.len(),
            valid: result.ids.valid.len(),
            test: result.ids.test.len(),
            epochs: features.epochs,
            final_loss: result.report.epoch_losses.last().copied(),
            metrics: result.metrics,
        });
        trained = Some(result);
    }
    lap(&mut stats, "topology");

    let table_of = |name: &str| {
        let i = cfg.nodes.iter().position(|n| n.name == name).expect("validated node reference");
        &tables[i]
    };
    let mut edge_tables = Vec::new();
    let mut edge_manifests = BTreeMap::new();
    for e in &cfg.edges {
        let (table, s, w) =
            build_edges(&store, e, table_of(&e.subject_node), table_of(&e.object_node), features).map_err(stage("edges"))?;
        log::info!("edge type '{}': {} edges", e.name, table.len());
        warnings.extend(w);
        edge_manifests.insert(
            e.name.clone(),
            EdgeManifest {
                kind: e.spec.kind_name().to_string(),
                src_node_type: e.subject_node.clone(),
                dst_node_type: e.object_node.clone(),
                count: table.len(),
                feature_dim: table.features.as_ref().map_or(0, |f| f.cols()),
                feature_blocks: table.features.as_ref().map(|f| f.blocks().to_vec()).unwrap_or_default(),
                stats: s.clone(),
            },
        );
        stats.edges.insert(
            e.name.clone(),
            EdgeTypeStats {
                count: table.len(),
                stats: s,
            },
        );
        edge_tables.push(table);
    }
    lap(&mut stats, "edges");

    let out = cfg.output.dir.clone();
    prepare_output_dir(&out).map_err(stage("write"))?;
    let node_outputs: Vec<NodeOutput<'_>> = tables
        .iter()
        .enumerate()
        .map(|(i, t)| NodeOutput {
            table: t,
            content: content[i].as_ref(),
            topology: topology[i].as_ref(),
        })
        .collect();
    write_dataset(
        &out,
        &node_outputs,
        &edge_tables,
        WriteOptions {
            binary_sidecar: cfg.output.binary_sidecar,
            seed: features.seed,
        },
    )
    .map_err(stage("write"))?;
    if let (true, Some(result)) = (cfg.output.write_checkpoint, &trained) {
        let dir = out.join("embeddings");
        fs::create_dir_all(&dir).map_err(stage("write"))?;
        let f = File::create(dir.join("checkpoint.bin")).map_err(stage("write"))?;
        let mut w = BufWriter::new(f);
        write_checkpoint(&mut w, &result.model, features.seed).map_err(stage("write"))?;
        w.flush().map_err(stage("write"))?;
        for (file, names) in [("entities.txt", result.ids.entities()), ("relations.txt", result.ids.relations())] {
            let mut text = names.join("\n");
            text.push('\n');
            fs::write(dir.join(file), text).map_err(stage("write"))?;
        }
    }
    lap(&mut stats, "write");

    let manifest = DatasetManifest {
        tool_version: TOOL_VERSION.to_string(),
        config_hash: validated.content_hash.clone(),
        seed: features.seed,
        generated_at: timestamp(),
        feature_mode: features.mode.to_string(),
        nodes: node_manifests,
        edges: edge_manifests,
        topology: topology_manifest,
        warnings,
    };
    for w in &manifest.warnings {
        log::warn!("{w}");
    }
    write_json(&out.join("stats.json"), &stats).map_err(stage("write"))?;
    commit_manifest(&out, &manifest).map_err(stage("write"))?;
    Ok(RunOutcome {
        out_dir: out,
        stats,
        manifest,
    })
}
