//! Content-based node features: profiling, selection, type inference,
//! transformation and assembly into a [`FeatureMatrix`].

pub mod infer;
pub mod profile;
pub mod select;
pub mod stats;
pub mod text;
pub mod transform;

use rayon::prelude::*;
use thiserror::Error;

use crate::config::{FeatureConfig, NodeTypeConfig, TextEncoderKind};
use crate::matrix::{Block, BlockEncoding, FeatureMatrix, ShapeMismatch};
use crate::nodes::NodeTable;
use crate::rdf::TripleStore;
use infer::{InferOptions, LiteralType};
use profile::{collect_columns, profile_column, PropertyColumn, PropertyProfile};
use select::{prune_correlated, select_properties, DropReason, SelectionThresholds};
use text::{encode_nld, CommandEncoder, EncoderError, HashingEncoder, SidecarEncoder, TextEncoder};
use transform::{transform_column, TransformOptions, TransformedColumn};

pub use select::CorrelationDrop;

/// Name of the text block in the column layout.
pub const NLD_BLOCK: &str = "nld";

#[derive(Debug, Error)]
pub enum ContentError {
    #[error(transparent)]
    Encoder(#[from] EncoderError),
    #[error(transparent)]
    Shape(#[from] ShapeMismatch),
}

#[derive(Debug, Clone)]
pub struct ContentFeatures {
    pub matrix: FeatureMatrix,
    pub profiles: Vec<PropertyProfile>,
    pub correlation_drops: Vec<CorrelationDrop>,
    pub warnings: Vec<String>,
}

pub fn make_text_encoder(cfg: &FeatureConfig) -> Result<Box<dyn TextEncoder>, EncoderError> {
    match cfg.text_encoder {
        TextEncoderKind::Hashing => Ok(Box::new(HashingEncoder::new(cfg.text_dim))),
        TextEncoderKind::External => match (&cfg.text_encoder_sidecar, &cfg.text_encoder_command) {
            (Some(path), _) => Ok(Box::new(SidecarEncoder::load(path, cfg.text_dim)?)),
            (None, Some(cmd)) => Ok(Box::new(CommandEncoder::new(cmd, cfg.text_dim)?)),
            (None, None) => Err(EncoderError::Failure("external text encoder is not configured".into())),
        },
    }
}

fn thresholds(cfg: &FeatureConfig) -> SelectionThresholds {
    SelectionThresholds {
        sparsity: cfg.sparsity_threshold,
        identical: cfg.identical_threshold,
        unique: cfg.unique_threshold,
    }
}

fn transform_options(cfg: &FeatureConfig) -> TransformOptions {
    TransformOptions {
        one_hot_max_cardinality: cfg.one_hot_max_cardinality,
    }
}

/// Runs the full content pipeline for one node table.
pub fn build_content_features(
    store: &TripleStore,
    table: &NodeTable,
    node_cfg: &NodeTypeConfig,
    cfg: &FeatureConfig,
    encoder: &mut dyn TextEncoder,
) -> Result<ContentFeatures, ContentError> {
    let n = table.len();
    let mut warnings = Vec::new();
    let columns = collect_columns(store, table, &node_cfg.excluded_properties);
    let mut profiles: Vec<PropertyProfile> = columns
        .par_iter()
        .map(|c| {
            let opts = InferOptions {
                nld_min_avg_tokens: cfg.nld_min_avg_tokens,
                forced_nld: node_cfg.nld_properties.contains(&c.property),
                allow_nld: true,
            };
            profile_column(c, &opts)
        })
        .collect();
    let selected = select_properties(&mut profiles, &thresholds(cfg));

    let mut nld: Vec<usize> = selected
        .iter()
        .copied()
        .filter(|&i| profiles[i].inferred_type == LiteralType::Nld)
        .collect();
    let allow_rank = |i: &usize| {
        node_cfg
            .nld_properties
            .iter()
            .position(|p| *p == columns[*i].property)
            .unwrap_or(usize::MAX)
    };
    nld.sort_by_key(|i| (allow_rank(i), columns[*i].property.clone()));

    let topts = transform_options(cfg);
    let transformed: Vec<(usize, TransformedColumn)> = selected
        .par_iter()
        .filter(|&&i| profiles[i].inferred_type != LiteralType::Nld)
        .filter_map(|&i| {
            let reps = columns[i].representatives();
            transform_column(&columns[i].property, profiles[i].inferred_type, &reps, &topts).map(|t| (i, t))
        })
        .collect();
    for (_, t) in &transformed {
        warnings.extend(t.warnings.iter().cloned());
    }

    let only_columns: Vec<TransformedColumn> = transformed.iter().map(|(_, t)| t.clone()).collect();
    let pruned = prune_correlated(&only_columns, cfg.correlation_threshold);
    warnings.extend(pruned.warnings);
    for d in &pruned.drops {
        if let Some(p) = profiles.iter_mut().find(|p| p.property == d.dropped) {
            p.dropped = Some(DropReason::Correlated);
        }
    }

    let mut blocks = Vec::new();
    if !nld.is_empty() {
        let texts: Vec<Option<String>> = (0..n)
            .map(|row| {
                let parts: Vec<String> = nld.iter().filter_map(|&i| columns[i].joined_text(row)).collect();
                (!parts.is_empty()).then(|| parts.join(" "))
            })
            .collect();
        let (values, missing) = encode_nld(table.entries(), &texts, encoder)?;
        if missing > 0 {
            warnings.push(format!(
                "{}: text encoder had no vector for {missing} node(s); zero rows used",
                table.node_type()
            ));
        }
        blocks.push(Block {
            name: NLD_BLOCK.to_string(),
            encoding: BlockEncoding::Text,
            sources: nld.iter().map(|&i| columns[i].property.clone()).collect(),
            width: encoder.dim(),
            values,
        });
    }
    for (i, t) in transformed {
        if profiles[i].dropped.is_none() {
            blocks.push(t.block);
        }
    }
    let matrix = FeatureMatrix::hstack(n, blocks)?;
    if matrix.cols() == 0 {
        warnings.push(format!("{}: no content features selected", table.node_type()));
    }
    Ok(ContentFeatures {
        matrix,
        profiles,
        correlation_drops: pruned.drops,
        warnings,
    })
}

/// Encodes literal columns without selection and without NLD detection
/// (free text becomes categorical). Used for edge features.
pub fn encode_columns(columns: &[PropertyColumn], cfg: &FeatureConfig) -> (Vec<Block>, Vec<String>) {
    let opts = InferOptions {
        nld_min_avg_tokens: cfg.nld_min_avg_tokens,
        forced_nld: false,
        allow_nld: false,
    };
    let topts = transform_options(cfg);
    let mut warnings = Vec::new();
    let mut blocks = Vec::new();
    for c in columns {
        let ty = infer::infer_literal_type(&c.all_values(), &opts);
        if let Some(t) = transform_column(&c.property, ty, &c.representatives(), &topts) {
            warnings.extend(t.warnings);
            blocks.push(t.block);
        }
    }
    (blocks, warnings)
}
