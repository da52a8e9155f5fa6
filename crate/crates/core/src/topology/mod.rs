//! Topology-based node features from knowledge-graph embeddings trained on
//! every object-property triple of the dump.

pub mod checkpoint;
pub mod eval;
pub mod model;
pub mod train;
pub mod triples;

use thiserror::Error;

use crate::config::FeatureConfig;
use crate::matrix::{BlockEncoding, FeatureMatrix};
use crate::nodes::NodeTable;
use crate::rdf::TripleStore;
use eval::{evaluate, LinkMetrics};
use model::EmbeddingModel;
use train::{train, TrainConfig, TrainReport};
use triples::{build_triple_ids, SplitFractions, TripleIdSet};

/// Name of the embedding block in the column layout.
pub const EMBEDDING_BLOCK: &str = "embedding";

#[derive(Debug, Error)]
pub enum TopologyError {
    #[error("the graph has no object-property triples")]
    EmptyGraph,
    #[error("the training split is empty")]
    EmptyTrainSplit,
    #[error("training diverged at epoch {epoch}, batch {batch}: {detail}")]
    Divergence { epoch: usize, batch: usize, detail: String },
}

#[derive(Debug, Clone)]
pub struct TopologyResult {
    pub ids: TripleIdSet,
    pub model: EmbeddingModel,
    pub report: TrainReport,
    /// Present when the test split is non-empty.
    pub metrics: Option<LinkMetrics>,
}

pub fn train_config(cfg: &FeatureConfig) -> TrainConfig {
    TrainConfig {
        epochs: cfg.epochs,
        learning_rate: cfg.learning_rate,
        margin: cfg.margin,
        batch_size: cfg.batch_size,
        negatives: cfg.negatives,
        seed: cfg.seed,
    }
}

/// Builds ids, trains on the training split and evaluates on the test
/// split.
pub fn run_topology(store: &TripleStore, cfg: &FeatureConfig) -> Result<TopologyResult, TopologyError> {
    let ids = build_triple_ids(store, cfg.seed, SplitFractions::default())?;
    let mut model = EmbeddingModel::init(
        cfg.embedding_model,
        cfg.embedding_dim,
        ids.entity_count(),
        ids.relation_count(),
        cfg.seed,
    );
    let report = train(&mut model, &ids.train, &train_config(cfg))?;
    let metrics = (!ids.test.is_empty()).then(|| evaluate(&model, &ids.test));
    Ok(TopologyResult {
        ids,
        model,
        report,
        metrics,
    })
}

/// Row `i` is the entity embedding of `table.entries()[i]`. Nodes absent
/// from the embedding graph get zero rows; their count is returned.
pub fn export_node_embeddings(model: &EmbeddingModel, ids: &TripleIdSet, table: &NodeTable) -> (FeatureMatrix, usize) {
    let dim = model.dim();
    let mut data = Vec::with_capacity(table.len() * dim);
    let mut missing = 0;
    for key in table.entries() {
        match ids.entity_id(key) {
            Some(e) => data.extend(model.entity(e).iter().copied()),
            None => {
                missing += 1;
                data.extend(std::iter::repeat_n(0.0, dim));
            }
        }
    }
    let m = FeatureMatrix::from_rows(table.len(), dim, data, BlockEncoding::Embedding, EMBEDDING_BLOCK)
        .expect("embedding rows have the model width");
    (m, missing)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EmbeddingModelKind;

    #[test]
    fn export_follows_table_order() {
        let labeled = [("http://b", "http://r", "http://a")];
        let ids = TripleIdSet::from_labeled(&labeled, 0, SplitFractions::default()).unwrap();
        let model = EmbeddingModel::from_parts(EmbeddingModelKind::TransE, 2, vec![1.0, 2.0, 3.0, 4.0], vec![0.0, 0.0]);
        let table = NodeTable::from_members("t", vec![("http://b".into(), 0), ("http://z".into(), 1), ("http://a".into(), 2)]);
        let (m, missing) = export_node_embeddings(&model, &ids, &table);
        assert_eq!(missing, 1);
        assert_eq!(m.data(), [1.0, 2.0, 3.0, 4.0, 0.0, 0.0]);
    }
}
