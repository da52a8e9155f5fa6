//! Typed edge lists from binary, n-ary, multi-hop and custom relations.

pub mod binary;
pub mod multihop;
pub mod nary;
pub mod query;

use serde::Serialize;
use thiserror::Error;

use crate::config::{EdgeSpec, EdgeTypeConfig, FeatureConfig};
use crate::content::encode_columns;
use crate::content::profile::PropertyColumn;
use crate::matrix::{FeatureMatrix, ShapeMismatch};
use crate::nodes::{NodeId, NodeTable};
use crate::rdf::{Term, TripleStore};
use query::{PatternQuery, QueryError};

#[derive(Debug, Error)]
pub enum EdgeError {
    #[error("edge type '{edge}': {source}")]
    Query { edge: String, source: QueryError },
    #[error("edge type '{edge}': {source}")]
    Shape { edge: String, source: ShapeMismatch },
}

#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct EdgeStats {
    /// Matches whose endpoints are not both members of the node tables.
    pub skipped_endpoints: usize,
    /// Aux instances missing the subject or object side.
    pub dangling_aux: usize,
    /// Repeated `(src, dst)` pairs removed.
    pub duplicates: usize,
    /// Custom-query bindings with src = dst.
    pub self_pairs: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeTable {
    pub edge_type: String,
    pub src_node_type: String,
    pub dst_node_type: String,
    /// Sorted and distinct.
    pub pairs: Vec<(NodeId, NodeId)>,
    /// One row per pair.
    pub features: Option<FeatureMatrix>,
}

impl EdgeTable {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

/// Sorts and deduplicates, returning the number of duplicates removed.
fn normalize(pairs: &mut Vec<(NodeId, NodeId)>) -> usize {
    let before = pairs.len();
    pairs.sort_unstable();
    pairs.dedup();
    before - pairs.len()
}

/// Literal values of `predicate` on `subject`, sorted.
fn literal_values(store: &TripleStore, subject: u32, predicate: Option<u32>) -> Vec<crate::rdf::Literal> {
    let Some(p) = predicate else { return Vec::new() };
    let mut v: Vec<_> = store
        .object_ids(subject, p)
        .filter_map(|o| match store.term(o) {
            Term::Literal(l) => Some(l.clone()),
            _ => None,
        })
        .collect();
    v.sort_by(|a, b| (a.lexical(), a.datatype(), a.language()).cmp(&(b.lexical(), b.datatype(), b.language())));
    v
}

/// Builds the edge table for one configured edge type.
pub fn build_edges(
    store: &TripleStore,
    cfg: &EdgeTypeConfig,
    src: &NodeTable,
    dst: &NodeTable,
    features: &FeatureConfig,
) -> Result<(EdgeTable, EdgeStats, Vec<String>), EdgeError> {
    let mut stats = EdgeStats::default();
    let mut warnings = Vec::new();
    let mut edge_features = None;
    let pairs = match &cfg.spec {
        EdgeSpec::Binary { properties } => {
            let (mut pairs, skipped) = binary::binary_pairs(store, properties, src, dst);
            stats.skipped_endpoints = skipped;
            stats.duplicates = normalize(&mut pairs);
            pairs
        }
        EdgeSpec::Multihop { path } => {
            let (mut pairs, skipped) = multihop::multihop_pairs(store, path, src, dst);
            stats.skipped_endpoints = skipped;
            normalize(&mut pairs);
            pairs
        }
        EdgeSpec::Custom { query, select } => {
            let q = PatternQuery::parse(query, (&select[0], &select[1])).map_err(|source| EdgeError::Query {
                edge: cfg.name.clone(),
                source,
            })?;
            let mut pairs = Vec::new();
            for (a, b) in q.evaluate(store) {
                if a == b {
                    stats.self_pairs += 1;
                    continue;
                }
                match (src.id_of_term(a), dst.id_of_term(b)) {
                    (Some(x), Some(y)) => pairs.push((x, y)),
                    _ => stats.skipped_endpoints += 1,
                }
            }
            stats.duplicates = normalize(&mut pairs);
            pairs
        }
        EdgeSpec::Nary {
            aux_class_iri,
            subject_to_aux_property,
            aux_to_object_property,
            feature_properties,
        } => {
            let found = nary::nary_pairs(
                store,
                aux_class_iri,
                subject_to_aux_property,
                aux_to_object_property,
                src,
                dst,
            );
            stats.dangling_aux = found.dangling_aux;
            stats.skipped_endpoints = found.skipped;
            stats.duplicates = found.duplicates;
            if found.dangling_aux > 0 {
                warnings.push(format!(
                    "edge type '{}': {} dangling aux instance(s) skipped",
                    cfg.name, found.dangling_aux
                ));
            }
            if !feature_properties.is_empty() {
                let columns: Vec<PropertyColumn> = feature_properties
                    .iter()
                    .map(|f| {
                        let p = store.iri_id(f);
                        PropertyColumn {
                            property: f.clone(),
                            values: found.edges.iter().map(|&(_, x)| literal_values(store, x, p)).collect(),
                        }
                    })
                    .collect();
                let (blocks, w) = encode_columns(&columns, features);
                warnings.extend(w.into_iter().map(|w| format!("edge type '{}': {w}", cfg.name)));
                let m = FeatureMatrix::hstack(found.edges.len(), blocks).map_err(|source| EdgeError::Shape {
                    edge: cfg.name.clone(),
                    source,
                })?;
                edge_features = Some(m);
            }
            found.edges.into_iter().map(|(pair, _)| pair).collect()
        }
    };
    if stats.skipped_endpoints > 0 {
        log::debug!(
            "edge type '{}': {} match(es) outside the node tables",
            cfg.name,
            stats.skipped_endpoints
        );
    }
    Ok((
        EdgeTable {
            edge_type: cfg.name.clone(),
            src_node_type: src.node_type().to_string(),
            dst_node_type: dst.node_type().to_string(),
            pairs,
            features: edge_features,
        },
        stats,
        warnings,
    ))
}
