//! Dense entity/relation ids over the object-property part of the graph.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::TopologyError;
use crate::rdf::{Term, TripleStore};

/// `[head, relation, tail]`.
pub type KgTriple = [u32; 3];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitFractions {
    pub valid: f64,
    pub test: f64,
}

impl Default for SplitFractions {
    fn default() -> Self {
        SplitFractions { valid: 0.05, test: 0.05 }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TripleIdSet {
    entities: Vec<String>,
    relations: Vec<String>,
    pub triples: Vec<KgTriple>,
    pub train: Vec<KgTriple>,
    pub valid: Vec<KgTriple>,
    pub test: Vec<KgTriple>,
}

const SPLIT_STREAM: u64 = 2;

impl TripleIdSet {
    /// Builds ids from labelled triples. Entity and relation ids follow
    /// lexicographic label order; triples are deduplicated, sorted and
    /// split by a seeded shuffle.
    pub fn from_labeled<S: AsRef<str>>(
        labeled: &[(S, S, S)],
        seed: u64,
        fractions: SplitFractions,
    ) -> Result<Self, TopologyError> {
        if labeled.is_empty() {
            return Err(TopologyError::EmptyGraph);
        }
        let entities: Vec<String> = labeled
            .iter()
            .flat_map(|(h, _, t)| [h.as_ref(), t.as_ref()])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(str::to_string)
            .collect();
        let relations: Vec<String> = labeled
            .iter()
            .map(|(_, r, _)| r.as_ref())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .map(str::to_string)
            .collect();
        let find = |v: &[String], k: &str| v.binary_search_by(|e| e.as_str().cmp(k)).expect("label present") as u32;
        let triples: Vec<KgTriple> = labeled
            .iter()
            .map(|(h, r, t)| [find(&entities, h.as_ref()), find(&relations, r.as_ref()), find(&entities, t.as_ref())])
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        Ok(Self::with_split(entities, relations, triples, seed, fractions))
    }

    fn with_split(
        entities: Vec<String>,
        relations: Vec<String>,
        triples: Vec<KgTriple>,
        seed: u64,
        fractions: SplitFractions,
    ) -> Self {
        let n = triples.len();
        let n_test = (n as f64 * fractions.test).floor() as usize;
        let n_valid = (n as f64 * fractions.valid).floor() as usize;
        let mut shuffled = triples.clone();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(SPLIT_STREAM);
        shuffled.shuffle(&mut rng);
        let mut test = shuffled[..n_test].to_vec();
        let mut valid = shuffled[n_test..n_test + n_valid].to_vec();
        let mut train = shuffled[n_test + n_valid..].to_vec();
        test.sort_unstable();
        valid.sort_unstable();
        train.sort_unstable();
        TripleIdSet {
            entities,
            relations,
            triples,
            train,
            valid,
            test,
        }
    }

    pub fn entity_count(&self) -> usize {
        self.entities.len()
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    /// Entity keys (IRIs or `_:label`) in id order.
    pub fn entities(&self) -> &[String] {
        &self.entities
    }

    pub fn relations(&self) -> &[String] {
        &self.relations
    }

    pub fn entity_id(&self, key: &str) -> Option<u32> {
        self.entities.binary_search_by(|e| e.as_str().cmp(key)).ok().map(|i| i as u32)
    }
}

/// Every triple whose object is an IRI or blank node, `rdf:type` included.
pub fn build_triple_ids(store: &TripleStore, seed: u64, fractions: SplitFractions) -> Result<TripleIdSet, TopologyError> {
    let key = |t: &Term| t.entity_key();
    let labeled: Vec<(String, String, String)> = store
        .triples()
        .filter_map(|t| Some((key(&t.subject)?, t.predicate.as_iri()?.to_string(), key(&t.object)?)))
        .collect();
    TripleIdSet::from_labeled(&labeled, seed, fractions)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::{Literal, Triple};

    #[test]
    fn literal_objects_excluded() {
        let store: TripleStore = [
            Triple::new(Term::iri("http://b"), Term::iri("http://p"), Term::iri("http://a")),
            Triple::new(Term::iri("http://a"), Term::iri("http://p"), Term::Literal(Literal::plain("x"))),
        ]
        .into_iter()
        .collect();
        let ids = build_triple_ids(&store, 1, SplitFractions::default()).unwrap();
        assert_eq!(ids.triples, [[1, 0, 0]]);
        assert_eq!(ids.entities(), ["http://a", "http://b"]);
        let literal_only: TripleStore = [Triple::new(Term::iri("http://a"), Term::iri("http://p"), Term::Literal(Literal::plain("x")))]
            .into_iter()
            .collect();
        assert!(matches!(
            build_triple_ids(&literal_only, 1, SplitFractions::default()),
            Err(TopologyError::EmptyGraph)
        ));
    }

    #[test]
    fn splits_are_disjoint_and_seeded() {
        let labeled: Vec<(String, String, String)> =
            (0..100).map(|i| (format!("e{i}"), "r".to_string(), format!("e{}", (i + 1) % 100))).collect();
        let a = TripleIdSet::from_labeled(&labeled, 7, SplitFractions::default()).unwrap();
        let b = TripleIdSet::from_labeled(&labeled, 7, SplitFractions::default()).unwrap();
        assert_eq!(a, b);
        assert_eq!((a.train.len(), a.valid.len(), a.test.len()), (90, 5, 5));
        let all: BTreeSet<KgTriple> = a.train.iter().chain(&a.valid).chain(&a.test).copied().collect();
        assert_eq!(all.len(), 100);
        let c = TripleIdSet::from_labeled(&labeled, 8, SplitFractions::default()).unwrap();
        assert_ne!(a.test, c.test);
    }
}
