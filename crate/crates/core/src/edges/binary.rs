use crate::nodes::{NodeId, NodeTable};
use crate::rdf::TripleStore;

/// Raw `(src, dst)` pairs for the union of `properties`, plus the number of
/// triples whose endpoints are not both in the node tables.
pub fn binary_pairs(
    store: &TripleStore,
    properties: &[String],
    src: &NodeTable,
    dst: &NodeTable,
) -> (Vec<(NodeId, NodeId)>, usize) {
    let mut pairs = Vec::new();
    let mut skipped = 0;
    for p in properties {
        let Some(p) = store.iri_id(p) else { continue };
        for [s, _, o] in store.match_ids(None, Some(p), None) {
            match (src.id_of_term(s), dst.id_of_term(o)) {
                (Some(a), Some(b)) => pairs.push((a, b)),
                _ => skipped += 1,
            }
        }
    }
    (pairs, skipped)
}
