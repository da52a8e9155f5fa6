//! Single-file pipeline configuration.
//!
//! The file is TOML with the sections `[input]`, `[output]`, `[features]`,
//! `[node.<name>]` and `[edge.<name>]`. Loading fills every default and
//! reports all validation problems at once. See `docs/config.md` for an
//! annotated example.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::edges::query::PatternQuery;
use crate::rdf::RdfFormat;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read config {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse config: {0}")]
    Parse(#[from] toml::de::Error),
    #[error("invalid config:\n  - {}", .0.join("\n  - "))]
    Validation(Vec<String>),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EmbeddingModelKind {
    TransE,
    DistMult,
    ComplEx,
    RotatE,
}

impl EmbeddingModelKind {
    pub fn name(self) -> &'static str {
        match self {
            EmbeddingModelKind::TransE => "transe",
            EmbeddingModelKind::DistMult => "distmult",
            EmbeddingModelKind::ComplEx => "complex",
            EmbeddingModelKind::RotatE => "rotate",
        }
    }

    /// ComplEx and RotatE store `dim / 2` complex numbers per entity.
    pub fn is_complex(self) -> bool {
        matches!(self, EmbeddingModelKind::ComplEx | EmbeddingModelKind::RotatE)
    }
}

impl fmt::Display for EmbeddingModelKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextEncoderKind {
    Hashing,
    External,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FeatureMode {
    Content,
    Topology,
    Both,
}

impl fmt::Display for FeatureMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FeatureMode::Content => "content",
            FeatureMode::Topology => "topology",
            FeatureMode::Both => "both",
        })
    }
}

impl FeatureMode {
    pub fn content(self) -> bool {
        matches!(self, FeatureMode::Content | FeatureMode::Both)
    }

    pub fn topology(self) -> bool {
        matches!(self, FeatureMode::Topology | FeatureMode::Both)
    }
}

impl FromStr for FeatureMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "content" => Ok(FeatureMode::Content),
            "topology" => Ok(FeatureMode::Topology),
            "both" => Ok(FeatureMode::Both),
            other => Err(format!("unknown feature mode '{other}' (content, topology or both)")),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct InputConfig {
    pub path: PathBuf,
    pub format: RdfFormat,
    pub lenient: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct OutputConfig {
    pub dir: PathBuf,
    /// Also write `embeddings/checkpoint.bin` when topology features are
    /// computed.
    pub write_checkpoint: bool,
    /// Also write `.bin` sidecars next to every feature CSV.
    pub binary_sidecar: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct FeatureConfig {
    pub mode: FeatureMode,
    pub embedding_dim: usize,
    pub sparsity_threshold: f64,
    pub identical_threshold: f64,
    pub unique_threshold: f64,
    pub correlation_threshold: f64,
    pub one_hot_max_cardinality: usize,
    pub nld_min_avg_tokens: f64,
    pub text_encoder: TextEncoderKind,
    pub text_dim: usize,
    pub text_encoder_sidecar: Option<PathBuf>,
    pub text_encoder_command: Option<Vec<String>>,
    pub embedding_model: EmbeddingModelKind,
    pub seed: u64,
    pub epochs: usize,
    pub learning_rate: f64,
    pub margin: f64,
    pub batch_size: usize,
    pub negatives: usize,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            mode: FeatureMode::Both,
            embedding_dim: 128,
            sparsity_threshold: 0.5,
            identical_threshold: 0.99,
            unique_threshold: 0.95,
            correlation_threshold: 0.95,
            one_hot_max_cardinality: 10,
            nld_min_avg_tokens: 5.0,
            text_encoder: TextEncoderKind::Hashing,
            text_dim: 64,
            text_encoder_sidecar: None,
            text_encoder_command: None,
            embedding_model: EmbeddingModelKind::TransE,
            seed: 42,
            epochs: 100,
            learning_rate: 0.01,
            margin: 1.0,
            batch_size: 512,
            negatives: 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct NodeTypeConfig {
    pub name: String,
    pub class_iri: String,
    /// Properties always encoded as natural-language text, in concatenation
    /// order.
    pub nld_properties: Vec<String>,
    pub excluded_properties: Vec<String>,
    /// Admit blank-node subjects as members (keyed `_:b<n>`).
    pub include_blank_nodes: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub enum EdgeSpec {
    /// Object properties merged into one edge type.
    Binary { properties: Vec<String> },
    /// Reified relation through an auxiliary class.
    Nary {
        aux_class_iri: String,
        subject_to_aux_property: String,
        aux_to_object_property: String,
        feature_properties: Vec<String>,
    },
    Multihop { path: Vec<String> },
    Custom { query: String, select: [String; 2] },
}

impl EdgeSpec {
    pub fn kind_name(&self) -> &'static str {
        match self {
            EdgeSpec::Binary { .. } => "binary",
            EdgeSpec::Nary { .. } => "nary",
            EdgeSpec::Multihop { .. } => "multihop",
            EdgeSpec::Custom { .. } => "custom",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EdgeTypeConfig {
    pub name: String,
    pub subject_node: String,
    pub object_node: String,
    pub spec: EdgeSpec,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Config {
    pub input: InputConfig,
    pub output: OutputConfig,
    pub features: FeatureConfig,
    /// Sorted by name.
    pub nodes: Vec<NodeTypeConfig>,
    /// Sorted by name.
    pub edges: Vec<EdgeTypeConfig>,
}

#[derive(Clone, Debug)]
pub struct ValidatedConfig {
    pub config: Config,
    /// `sha256:<hex>` of the raw config bytes.
    pub content_hash: String,
}

impl Config {
    pub fn node(&self, name: &str) -> Option<&NodeTypeConfig> {
        self.nodes.iter().find(|n| n.name == name)
    }

    /// Normalized TOML with every default spelled out.
    pub fn to_toml(&self) -> String {
        toml::to_string(&RawConfig::from(self)).expect("config serializes")
    }
}

// ---- raw file model ----

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    input: Option<RawInput>,
    output: Option<RawOutput>,
    #[serde(default)]
    features: RawFeatures,
    #[serde(default)]
    node: BTreeMap<String, RawNode>,
    #[serde(default)]
    edge: BTreeMap<String, RawEdge>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawInput {
    path: PathBuf,
    format: Option<String>,
    lenient: Option<bool>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawOutput {
    dir: PathBuf,
    write_checkpoint: Option<bool>,
    binary_sidecar: Option<bool>,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawFeatures {
    mode: Option<FeatureMode>,
    embedding_dim: Option<i64>,
    sparsity_threshold: Option<f64>,
    identical_threshold: Option<f64>,
    unique_threshold: Option<f64>,
    correlation_threshold: Option<f64>,
    one_hot_max_cardinality: Option<i64>,
    nld_min_avg_tokens: Option<f64>,
    text_encoder: Option<TextEncoderKind>,
    text_dim: Option<i64>,
    text_encoder_sidecar: Option<PathBuf>,
    text_encoder_command: Option<Vec<String>>,
    embedding_model: Option<EmbeddingModelKind>,
    seed: Option<u64>,
    epochs: Option<i64>,
    learning_rate: Option<f64>,
    margin: Option<f64>,
    batch_size: Option<i64>,
    negatives: Option<i64>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawNode {
    class_iri: String,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    nld_properties: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    excluded_properties: Vec<String>,
    #[serde(default, skip_serializing_if = "std::ops::Not::not")]
    include_blank_nodes: bool,
}

#[derive(Debug, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEdge {
    kind: String,
    subject_node: String,
    object_node: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    properties: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    aux_class_iri: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    subject_to_aux_property: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    aux_to_object_property: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    feature_properties: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    path: Option<Vec<String>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    query: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    select: Option<Vec<String>>,
}

impl From<&Config> for RawConfig {
    fn from(c: &Config) -> Self {
        let f = &c.features;
        RawConfig {
            input: Some(RawInput {
                path: c.input.path.clone(),
                format: Some(c.input.format.to_string()),
                lenient: Some(c.input.lenient),
            }),
            output: Some(RawOutput {
                dir: c.output.dir.clone(),
                write_checkpoint: Some(c.output.write_checkpoint),
                binary_sidecar: Some(c.output.binary_sidecar),
            }),
            features: RawFeatures {
                mode: Some(f.mode),
                embedding_dim: Some(f.embedding_dim as i64),
                sparsity_threshold: Some(f.sparsity_threshold),
                identical_threshold: Some(f.identical_threshold),
                unique_threshold: Some(f.unique_threshold),
                correlation_threshold: Some(f.correlation_threshold),
                one_hot_max_cardinality: Some(f.one_hot_max_cardinality as i64),
                nld_min_avg_tokens: Some(f.nld_min_avg_tokens),
                text_encoder: Some(f.text_encoder),
                text_dim: Some(f.text_dim as i64),
                text_encoder_sidecar: f.text_encoder_sidecar.clone(),
                text_encoder_command: f.text_encoder_command.clone(),
                embedding_model: Some(f.embedding_model),
                seed: Some(f.seed),
                epochs: Some(f.epochs as i64),
                learning_rate: Some(f.learning_rate),
                margin: Some(f.margin),
                batch_size: Some(f.batch_size as i64),
                negatives: Some(f.negatives as i64),
            },
            node: c
                .nodes
                .iter()
                .map(|n| {
                    (
                        n.name.clone(),
                        RawNode {
                            class_iri: n.class_iri.clone(),
                            nld_properties: n.nld_properties.clone(),
                            excluded_properties: n.excluded_properties.clone(),
                            include_blank_nodes: n.include_blank_nodes,
                        },
                    )
                })
                .collect(),
            edge: c
                .edges
                .iter()
                .map(|e| {
                    let mut raw = RawEdge {
                        kind: e.spec.kind_name().to_string(),
                        subject_node: e.subject_node.clone(),
                        object_node: e.object_node.clone(),
                        ..RawEdge::default()
                    };
                    match &e.spec {
                        EdgeSpec::Binary { properties } => raw.properties = Some(properties.clone()),
                        EdgeSpec::Nary {
                            aux_class_iri,
                            subject_to_aux_property,
                            aux_to_object_property,
                            feature_properties,
                        } => {
                            raw.aux_class_iri = Some(aux_class_iri.clone());
                            raw.subject_to_aux_property = Some(subject_to_aux_property.clone());
                            raw.aux_to_object_property = Some(aux_to_object_property.clone());
                            raw.feature_properties = Some(feature_properties.clone());
                        }
                        EdgeSpec::Multihop { path } => raw.path = Some(path.clone()),
                        EdgeSpec::Custom { query, select } => {
                            raw.query = Some(query.clone());
                            raw.select = Some(select.to_vec());
                        }
                    }
                    (e.name.clone(), raw)
                })
                .collect(),
        }
    }
}

// ---- validation ----

fn valid_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

fn valid_iri(iri: &str) -> bool {
    crate::rdf::ntriples::is_absolute_iri(iri) && !iri.chars().any(|c| c.is_whitespace() || c == '<' || c == '>')
}

struct Validator {
    problems: Vec<String>,
}

impl Validator {
    fn fraction(&mut self, key: &str, value: f64) -> f64 {
        if !(0.0..=1.0).contains(&value) {
            self.problems.push(format!("features.{key} = {value} is outside [0, 1]"));
        }
        value
    }

    fn positive(&mut self, key: &str, value: i64) -> usize {
        if value <= 0 {
            self.problems.push(format!("features.{key} must be positive, got {value}"));
            return 1;
        }
        value as usize
    }

    fn iri(&mut self, context: &str, iri: &str) {
        if !valid_iri(iri) {
            self.problems.push(format!("{context}: '{iri}' is not an absolute IRI"));
        }
    }

    fn features(&mut self, raw: RawFeatures, base: &Path) -> FeatureConfig {
        let d = FeatureConfig::default();
        let embedding_model = raw.embedding_model.unwrap_or(d.embedding_model);
        let embedding_dim = self.positive("embedding_dim", raw.embedding_dim.unwrap_or(d.embedding_dim as i64));
        if embedding_model.is_complex() && !embedding_dim.is_multiple_of(2) {
            self.problems.push(format!(
                "features.embedding_dim = {embedding_dim} must be even for embedding_model = \"{embedding_model}\""
            ));
        }
        let nld_min_avg_tokens = raw.nld_min_avg_tokens.unwrap_or(d.nld_min_avg_tokens);
        if !(nld_min_avg_tokens > 0.0 && nld_min_avg_tokens.is_finite()) {
            self.problems
                .push(format!("features.nld_min_avg_tokens must be positive, got {nld_min_avg_tokens}"));
        }
        let learning_rate = raw.learning_rate.unwrap_or(d.learning_rate);
        if !(learning_rate > 0.0 && learning_rate.is_finite()) {
            self.problems.push(format!("features.learning_rate must be positive, got {learning_rate}"));
        }
        let margin = raw.margin.unwrap_or(d.margin);
        if !(margin >= 0.0 && margin.is_finite()) {
            self.problems.push(format!("features.margin must be non-negative, got {margin}"));
        }
        let epochs = raw.epochs.unwrap_or(d.epochs as i64);
        if epochs < 0 {
            self.problems.push(format!("features.epochs must be non-negative, got {epochs}"));
        }
        let text_encoder = raw.text_encoder.unwrap_or(d.text_encoder);
        let text_encoder_sidecar = raw.text_encoder_sidecar.map(|p| base.join(p));
        let text_encoder_command = raw.text_encoder_command;
        if text_encoder == TextEncoderKind::External {
            match (&text_encoder_sidecar, &text_encoder_command) {
                (Some(_), None) | (None, Some(_)) => {}
                _ => self.problems.push(
                    "features.text_encoder = \"external\" needs exactly one of text_encoder_sidecar or text_encoder_command"
                        .into(),
                ),
            }
            if text_encoder_command.as_ref().is_some_and(|c| c.is_empty()) {
                self.problems.push("features.text_encoder_command is empty".into());
            }
        }
        FeatureConfig {
            mode: raw.mode.unwrap_or(d.mode),
            embedding_dim,
            sparsity_threshold: self.fraction("sparsity_threshold", raw.sparsity_threshold.unwrap_or(d.sparsity_threshold)),
            identical_threshold: self
                .fraction("identical_threshold", raw.identical_threshold.unwrap_or(d.identical_threshold)),
            unique_threshold: self.fraction("unique_threshold", raw.unique_threshold.unwrap_or(d.unique_threshold)),
            correlation_threshold: self
                .fraction("correlation_threshold", raw.correlation_threshold.unwrap_or(d.correlation_threshold)),
            one_hot_max_cardinality: self.positive(
                "one_hot_max_cardinality",
                raw.one_hot_max_cardinality.unwrap_or(d.one_hot_max_cardinality as i64),
            ),
            nld_min_avg_tokens,
            text_encoder,
            text_dim: self.positive("text_dim", raw.text_dim.unwrap_or(d.text_dim as i64)),
            text_encoder_sidecar,
            text_encoder_command,
            embedding_model,
            seed: raw.seed.unwrap_or(d.seed),
            epochs: epochs.max(0) as usize,
            learning_rate,
            margin,
            batch_size: self.positive("batch_size", raw.batch_size.unwrap_or(d.batch_size as i64)),
            negatives: self.positive("negatives", raw.negatives.unwrap_or(d.negatives as i64)),
        }
    }

    fn node(&mut self, name: String, raw: RawNode) -> NodeTypeConfig {
        if !valid_name(&name) {
            self.problems.push(format!("node type name '{name}' must match [A-Za-z0-9_-]+"));
        }
        self.iri(&format!("node.{name}.class_iri"), &raw.class_iri);
        for p in raw.nld_properties.iter().chain(&raw.excluded_properties) {
            self.iri(&format!("node.{name}"), p);
        }
        NodeTypeConfig {
            name,
            class_iri: raw.class_iri,
            nld_properties: raw.nld_properties,
            excluded_properties: raw.excluded_properties,
            include_blank_nodes: raw.include_blank_nodes,
        }
    }

    fn edge(&mut self, name: String, raw: RawEdge, nodes: &[NodeTypeConfig]) -> Option<EdgeTypeConfig> {
        let ctx = format!("edge.{name}");
        if !valid_name(&name) {
            self.problems.push(format!("edge type name '{name}' must match [A-Za-z0-9_-]+"));
        }
        for (key, node) in [("subject_node", &raw.subject_node), ("object_node", &raw.object_node)] {
            if !nodes.iter().any(|n| &n.name == node) {
                self.problems.push(format!("{ctx}.{key} references undeclared node type '{node}'"));
            }
        }
        let present: [(&str, bool); 8] = [
            ("properties", raw.properties.is_some()),
            ("aux_class_iri", raw.aux_class_iri.is_some()),
            ("subject_to_aux_property", raw.subject_to_aux_property.is_some()),
            ("aux_to_object_property", raw.aux_to_object_property.is_some()),
            ("feature_properties", raw.feature_properties.is_some()),
            ("path", raw.path.is_some()),
            ("query", raw.query.is_some()),
            ("select", raw.select.is_some()),
        ];
        let (required, optional): (&[&str], &[&str]) = match raw.kind.as_str() {
            "binary" => (&["properties"], &[]),
            "nary" => (
                &["aux_class_iri", "subject_to_aux_property", "aux_to_object_property"],
                &["feature_properties"],
            ),
            "multihop" => (&["path"], &[]),
            "custom" => (&["query", "select"], &[]),
            other => {
                self.problems.push(format!(
                    "{ctx}.kind = \"{other}\" is not one of binary, nary, multihop, custom"
                ));
                return None;
            }
        };
        let before = self.problems.len();
        for (key, is_set) in present {
            let allowed = required.contains(&key) || optional.contains(&key);
            if is_set && !allowed {
                self.problems
                    .push(format!("{ctx}.{key} is not allowed for kind = \"{}\"", raw.kind));
            }
            if !is_set && required.contains(&key) {
                self.problems
                    .push(format!("{ctx}.{key} is required for kind = \"{}\"", raw.kind));
            }
        }
        if self.problems.len() > before {
            return None;
        }
        let spec = match raw.kind.as_str() {
            "binary" => {
                let properties = raw.properties.unwrap_or_default();
                if properties.is_empty() {
                    self.problems.push(format!("{ctx}.properties must not be empty"));
                }
                for p in &properties {
                    self.iri(&format!("{ctx}.properties"), p);
                }
                EdgeSpec::Binary { properties }
            }
            "nary" => {
                let spec = EdgeSpec::Nary {
                    aux_class_iri: raw.aux_class_iri.unwrap_or_default(),
                    subject_to_aux_property: raw.subject_to_aux_property.unwrap_or_default(),
                    aux_to_object_property: raw.aux_to_object_property.unwrap_or_default(),
                    feature_properties: raw.feature_properties.unwrap_or_default(),
                };
                if let EdgeSpec::Nary {
                    aux_class_iri,
                    subject_to_aux_property,
                    aux_to_object_property,
                    feature_properties,
                } = &spec
                {
                    self.iri(&format!("{ctx}.aux_class_iri"), aux_class_iri);
                    self.iri(&format!("{ctx}.subject_to_aux_property"), subject_to_aux_property);
                    self.iri(&format!("{ctx}.aux_to_object_property"), aux_to_object_property);
                    for p in feature_properties {
                        self.iri(&format!("{ctx}.feature_properties"), p);
                    }
                }
                spec
            }
            "multihop" => {
                let path = raw.path.unwrap_or_default();
                if path.len() < 2 {
                    self.problems
                        .push(format!("{ctx}.path needs at least 2 properties, got {}", path.len()));
                }
                for p in &path {
                    self.iri(&format!("{ctx}.path"), p);
                }
                EdgeSpec::Multihop { path }
            }
            _ => {
                let query = raw.query.unwrap_or_default();
                let select = raw.select.unwrap_or_default();
                if select.len() != 2 {
                    self.problems
                        .push(format!("{ctx}.select must name exactly 2 variables, got {}", select.len()));
                    return None;
                }
                let select = [select[0].clone(), select[1].clone()];
                if let Err(e) = PatternQuery::parse(&query, (&select[0], &select[1])) {
                    self.problems.push(format!("{ctx}.query: {e}"));
                }
                EdgeSpec::Custom { query, select }
            }
        };
        Some(EdgeTypeConfig {
            name,
            subject_node: raw.subject_node,
            object_node: raw.object_node,
            spec,
        })
    }
}

/// Parses and validates config text. Relative paths resolve against
/// `base_dir`.
pub fn parse_config(text: &str, base_dir: &Path) -> Result<ValidatedConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text)?;
    let mut v = Validator { problems: Vec::new() };

    let input = match raw.input {
        Some(input) => {
            let path = base_dir.join(&input.path);
            let format = match &input.format {
                Some(f) => f.parse::<RdfFormat>(),
                None => RdfFormat::from_path(&path),
            };
            let format = format.unwrap_or_else(|e| {
                v.problems.push(format!("input.format: {e}"));
                RdfFormat::NTriples
            });
            Some(InputConfig {
                path,
                format,
                lenient: input.lenient.unwrap_or(false),
            })
        }
        None => {
            v.problems.push("missing [input] section".into());
            None
        }
    };
    let output = match raw.output {
        Some(o) => Some(OutputConfig {
            dir: base_dir.join(o.dir),
            write_checkpoint: o.write_checkpoint.unwrap_or(false),
            binary_sidecar: o.binary_sidecar.unwrap_or(false),
        }),
        None => {
            v.problems.push("missing [output] section".into());
            None
        }
    };
    let features = v.features(raw.features, base_dir);
    if raw.node.is_empty() {
        v.problems.push("at least one [node.<name>] section is required".into());
    }
    let nodes: Vec<NodeTypeConfig> = raw.node.into_iter().map(|(name, n)| v.node(name, n)).collect();
    let edges: Vec<EdgeTypeConfig> = raw
        .edge
        .into_iter()
        .filter_map(|(name, e)| v.edge(name, e, &nodes))
        .collect();

    if !v.problems.is_empty() {
        return Err(ConfigError::Validation(v.problems));
    }
    let mut hasher = Sha256::new();
    hasher.update(text.as_bytes());
    let content_hash = format!("sha256:{:x}", hasher.finalize());
    Ok(ValidatedConfig {
        config: Config {
            input: input.expect("validated"),
            output: output.expect("validated"),
            features,
            nodes,
            edges,
        },
        content_hash,
    })
}

pub fn load_config(path: &Path) -> Result<ValidatedConfig, ConfigError> {
    let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().unwrap_or_else(|| Path::new("."));
    parse_config(&text, base)
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
[input]
path = "data.nt"

[output]
dir = "out"

[node.work]
class_iri = "http://ex/Work"

[edge.cites]
kind = "binary"
subject_node = "work"
object_node = "work"
properties = ["http://ex/cites"]
"#;

    #[test]
    fn minimal_config_gets_defaults() {
        let cfg = parse_config(MINIMAL, Path::new("/base")).unwrap().config;
        assert_eq!(cfg.features, FeatureConfig::default());
        assert_eq!(cfg.input.path, PathBuf::from("/base/data.nt"));
        assert_eq!(cfg.input.format, RdfFormat::NTriples);
        assert_eq!(cfg.nodes.len(), 1);
        assert_eq!(
            cfg.edges[0].spec,
            EdgeSpec::Binary {
                properties: vec!["http://ex/cites".into()]
            }
        );
    }

    #[test]
    fn embedding_dim_is_read() {
        let text = format!("{MINIMAL}\n[features]\nembedding_dim = 128\nembedding_model = \"transe\"\n");
        let cfg = parse_config(&text, Path::new(".")).unwrap().config;
        assert_eq!(cfg.features.embedding_dim, 128);
        assert_eq!(cfg.features.embedding_model, EmbeddingModelKind::TransE);
    }

    #[test]
    fn undeclared_node_reference() {
        let text = MINIMAL.replace("object_node = \"work\"", "object_node = \"papr\"");
        match parse_config(&text, Path::new(".")) {
            Err(ConfigError::Validation(problems)) => {
                assert_eq!(problems.len(), 1);
                assert!(problems[0].contains("'papr'"), "{problems:?}");
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn problems_are_aggregated() {
        let text = format!(
            "{}\n[features]\nsparsity_threshold = 1.5\nembedding_model = \"rotate\"\nembedding_dim = 5\n\n[edge.hop]\nkind = \"multihop\"\nsubject_node = \"work\"\nobject_node = \"work\"\npath = [\"http://ex/a\"]\nproperties = [\"http://ex/b\"]\n",
            MINIMAL
        );
        match parse_config(&text, Path::new(".")) {
            Err(ConfigError::Validation(problems)) => {
                assert!(problems.iter().any(|p| p.contains("sparsity_threshold")));
                assert!(problems.iter().any(|p| p.contains("must be even")));
                assert!(problems.iter().any(|p| p.contains("edge.hop.properties is not allowed")));
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn multihop_path_too_short() {
        let text = format!(
            "{MINIMAL}\n[edge.hop]\nkind = \"multihop\"\nsubject_node = \"work\"\nobject_node = \"work\"\npath = [\"http://ex/a\"]\n"
        );
        assert!(matches!(parse_config(&text, Path::new(".")), Err(ConfigError::Validation(_))));
    }

    #[test]
    fn bad_custom_query_is_reported() {
        let text = format!(
            "{MINIMAL}\n[edge.co]\nkind = \"custom\"\nsubject_node = \"work\"\nobject_node = \"work\"\nquery = \"?a <http://ex/p> ?b .\"\nselect = [\"?a\", \"?zz\"]\n"
        );
        match parse_config(&text, Path::new(".")) {
            Err(ConfigError::Validation(problems)) => assert!(problems[0].contains("?zz"), "{problems:?}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn unknown_keys_rejected() {
        let text = MINIMAL.replace("[node.work]", "[node.work]\nclass = \"x\"");
        assert!(matches!(parse_config(&text, Path::new(".")), Err(ConfigError::Parse(_))));
    }

    #[test]
    fn normalization_is_idempotent() {
        let first = parse_config(MINIMAL, Path::new("/base")).unwrap().config;
        let second = parse_config(&first.to_toml(), Path::new("/elsewhere")).unwrap().config;
        assert_eq!(first, second);
        assert_eq!(first.to_toml(), second.to_toml());
    }

    #[test]
    fn hash_depends_on_bytes() {
        let a = parse_config(MINIMAL, Path::new(".")).unwrap().content_hash;
        let b = parse_config(MINIMAL, Path::new(".")).unwrap().content_hash;
        let c = parse_config(&format!("{MINIMAL}\n"), Path::new(".")).unwrap().content_hash;
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert!(a.starts_with("sha256:"));
    }
}
