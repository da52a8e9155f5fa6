use std::collections::BTreeSet;

use crate::nodes::{NodeId, NodeTable};
use crate::rdf::{TermId, TripleStore};

/// Joins the property chain `path` hop by hop, starting from subjects in
/// `src`. Intermediate nodes are unrestricted. Returns distinct pairs and
/// the number of chain ends outside `dst`.
pub fn multihop_pairs(
    store: &TripleStore,
    path: &[String],
    src: &NodeTable,
    dst: &NodeTable,
) -> (Vec<(NodeId, NodeId)>, usize) {
    let Some(ids) = path.iter().map(|p| store.iri_id(p)).collect::<Option<Vec<TermId>>>() else {
        return (Vec::new(), 0);
    };
    let Some((&first, rest)) = ids.split_first() else {
        return (Vec::new(), 0);
    };
    let mut frontier: BTreeSet<(NodeId, TermId)> = store
        .match_ids(None, Some(first), None)
        .filter_map(|[s, _, o]| src.id_of_term(s).map(|a| (a, o)))
        .collect();
    for &p in rest {
        frontier = frontier
            .iter()
            .flat_map(|&(a, x)| store.object_ids(x, p).map(move |o| (a, o)))
            .collect();
    }
    let mut skipped = 0;
    let mut pairs = Vec::new();
    for (a, o) in frontier {
        match dst.id_of_term(o) {
            Some(b) => pairs.push((a, b)),
            None => skipped += 1,
        }
    }
    pairs.sort_unstable();
    pairs.dedup();
    (pairs, skipped)
}
