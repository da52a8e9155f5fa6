//! Node tables: one per configured node type, holding the members of an RDF
//! class under dense ids assigned in lexicographic IRI order.

use std::collections::HashMap;

use crate::config::NodeTypeConfig;
use crate::rdf::{Term, TermId, TripleStore, RDF_TYPE};

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NodeTable {
    node_type: String,
    entries: Vec<String>,
    terms: Vec<TermId>,
    by_iri: HashMap<String, NodeId>,
    by_term: HashMap<TermId, NodeId>,
}

impl NodeTable {
    /// Builds a table from `(key, term id)` members; ids follow the sorted
    /// key order.
    pub fn from_members(node_type: impl Into<String>, mut members: Vec<(String, TermId)>) -> Self {
        members.sort();
        members.dedup();
        let by_iri = members.iter().enumerate().map(|(i, (k, _))| (k.clone(), i)).collect();
        let by_term = members.iter().enumerate().map(|(i, &(_, t))| (t, i)).collect();
        let (entries, terms) = members.into_iter().unzip();
        NodeTable {
            node_type: node_type.into(),
            entries,
            terms,
            by_iri,
            by_term,
        }
    }

    pub fn node_type(&self) -> &str {
        &self.node_type
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Member IRIs (or `_:b<n>` keys) in id order.
    pub fn entries(&self) -> &[String] {
        &self.entries
    }

    /// Store term ids in node-id order.
    pub fn term_ids(&self) -> &[TermId] {
        &self.terms
    }

    pub fn id_of(&self, iri: &str) -> Option<NodeId> {
        self.by_iri.get(iri).copied()
    }

    pub fn id_of_term(&self, term: TermId) -> Option<NodeId> {
        self.by_term.get(&term).copied()
    }
}

/// Collects every distinct subject `s` with `(s, rdf:type, class)`. Exact
/// class match only; no subclass closure.
pub fn extract_nodes(store: &TripleStore, cfg: &NodeTypeConfig) -> NodeTable {
    let members = match (store.iri_id(RDF_TYPE), store.iri_id(&cfg.class_iri)) {
        (Some(rdf_type), Some(class)) => store
            .subject_ids(rdf_type, class)
            .filter_map(|s| match store.term(s) {
                Term::Iri(iri) => Some((iri.clone(), s)),
                t @ Term::BlankNode(_) if cfg.include_blank_nodes => t.entity_key().map(|k| (k, s)),
                _ => None,
            })
            .collect(),
        _ => Vec::new(),
    };
    NodeTable::from_members(cfg.name.clone(), members)
}
