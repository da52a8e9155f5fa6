use std::collections::btree_map::Entry;
use std::collections::BTreeMap;

use crate::nodes::{NodeId, NodeTable};
use crate::rdf::{TermId, TripleStore, RDF_TYPE};

#[derive(Debug, Clone, Default, PartialEq)]
pub struct NaryPairs {
    /// Distinct pairs in `(src, dst)` order with the aux instance that
    /// produced each.
    pub edges: Vec<((NodeId, NodeId), TermId)>,
    pub dangling_aux: usize,
    pub skipped: usize,
    pub duplicates: usize,
}

/// Follows `s -subject_to_aux-> x -aux_to_object-> o` for every instance
/// `x` of `aux_class`. Aux instances are visited in lexicographic key order
/// and the first one to produce a pair keeps it.
pub fn nary_pairs(
    store: &TripleStore,
    aux_class: &str,
    subject_to_aux: &str,
    aux_to_object: &str,
    src: &NodeTable,
    dst: &NodeTable,
) -> NaryPairs {
    let mut out = NaryPairs::default();
    let (Some(rdf_type), Some(class)) = (store.iri_id(RDF_TYPE), store.iri_id(aux_class)) else {
        return out;
    };
    let s2a = store.iri_id(subject_to_aux);
    let a2o = store.iri_id(aux_to_object);
    let mut aux: Vec<(String, TermId)> = store
        .subject_ids(rdf_type, class)
        .filter_map(|x| store.term(x).entity_key().map(|k| (k, x)))
        .collect();
    aux.sort();
    let mut chosen: BTreeMap<(NodeId, NodeId), TermId> = BTreeMap::new();
    for (_, x) in aux {
        let subjects: Vec<TermId> = s2a.map(|p| store.subject_ids(p, x).collect()).unwrap_or_default();
        let objects: Vec<TermId> = a2o.map(|p| store.object_ids(x, p).collect()).unwrap_or_default();
        if subjects.is_empty() || objects.is_empty() {
            out.dangling_aux += 1;
            continue;
        }
        for &s in &subjects {
            for &o in &objects {
                match (src.id_of_term(s), dst.id_of_term(o)) {
                    (Some(a), Some(b)) => match chosen.entry((a, b)) {
                        Entry::Occupied(_) => out.duplicates += 1,
                        Entry::Vacant(e) => {
                            e.insert(x);
                        }
                    },
                    _ => out.skipped += 1,
                }
            }
        }
    }
    out.edges = chosen.into_iter().collect();
    out
}
