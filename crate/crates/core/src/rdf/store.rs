//! In-memory triple store with a dense term dictionary and SPO/POS/OSP
//! indexes.
//!
//! Terms are interned in first-seen order. Each index is a sorted vector of
//! id triples; lookups are binary-searched prefix ranges, so results come
//! back in ascending id order of whichever index served the query.

use std::collections::{HashMap, HashSet};
use std::io::{self, Write};

use super::term::{Term, Triple};

pub type TermId = u32;

/// Ids in subject, predicate, object order.
pub type IdTriple = [TermId; 3];

#[derive(Default)]
pub struct TripleStoreBuilder {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
    seen: HashSet<IdTriple>,
    triples: Vec<IdTriple>,
}

impl TripleStoreBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    fn intern(&mut self, term: Term) -> TermId {
        if let Some(&id) = self.ids.get(&term) {
            return id;
        }
        let id = TermId::try_from(self.terms.len()).expect("term dictionary overflow");
        self.terms.push(term.clone());
        self.ids.insert(term, id);
        id
    }

    /// Returns false when the triple was already present.
    pub fn insert(&mut self, triple: Triple) -> bool {
        let s = self.intern(triple.subject);
        let p = self.intern(triple.predicate);
        let o = self.intern(triple.object);
        let key = [s, p, o];
        if self.seen.insert(key) {
            self.triples.push(key);
            true
        } else {
            false
        }
    }

    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn finish(self) -> TripleStore {
        let mut spo = self.triples.clone();
        spo.sort_unstable();
        let mut pos: Vec<IdTriple> = self.triples.iter().map(|&[s, p, o]| [p, o, s]).collect();
        pos.sort_unstable();
        let mut osp: Vec<IdTriple> = self.triples.iter().map(|&[s, p, o]| [o, s, p]).collect();
        osp.sort_unstable();
        TripleStore {
            terms: self.terms,
            ids: self.ids,
            triples: self.triples,
            spo,
            pos,
            osp,
        }
    }
}

impl FromIterator<Triple> for TripleStore {
    fn from_iter<I: IntoIterator<Item = Triple>>(iter: I) -> Self {
        let mut builder = TripleStoreBuilder::new();
        for t in iter {
            builder.insert(t);
        }
        builder.finish()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum IndexOrder {
    Spo,
    Pos,
    Osp,
}

/// Immutable after construction; safe to share across reader threads.
#[derive(Debug, Clone)]
pub struct TripleStore {
    terms: Vec<Term>,
    ids: HashMap<Term, TermId>,
    triples: Vec<IdTriple>,
    spo: Vec<IdTriple>,
    pos: Vec<IdTriple>,
    osp: Vec<IdTriple>,
}

fn prefix_range(index: &[IdTriple], key: &[TermId]) -> std::ops::Range<usize> {
    let k = key.len();
    let lo = index.partition_point(|t| &t[..k] < key);
    let hi = lo + index[lo..].partition_point(|t| &t[..k] <= key);
    lo..hi
}

impl TripleStore {
    pub fn len(&self) -> usize {
        self.triples.len()
    }

    pub fn is_empty(&self) -> bool {
        self.triples.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    pub fn term(&self, id: TermId) -> &Term {
        &self.terms[id as usize]
    }

    pub fn id_of(&self, term: &Term) -> Option<TermId> {
        self.ids.get(term).copied()
    }

    pub fn iri_id(&self, iri: &str) -> Option<TermId> {
        self.ids.get(&Term::Iri(iri.to_string())).copied()
    }

    /// Distinct triples in insertion order.
    pub fn id_triples(&self) -> &[IdTriple] {
        &self.triples
    }

    pub fn triples(&self) -> impl Iterator<Item = Triple> + '_ {
        self.triples.iter().map(|&t| self.resolve(t))
    }

    pub fn resolve(&self, [s, p, o]: IdTriple) -> Triple {
        Triple {
            subject: self.term(s).clone(),
            predicate: self.term(p).clone(),
            object: self.term(o).clone(),
        }
    }

    pub fn index_sizes(&self) -> [usize; 3] {
        [self.spo.len(), self.pos.len(), self.osp.len()]
    }

    /// Index that serves a pattern with the given bound positions.
    pub fn index_for(s: bool, p: bool, o: bool) -> IndexOrder {
        match (s, p, o) {
            (true, _, false) | (true, true, true) | (false, false, false) => IndexOrder::Spo,
            (false, true, _) => IndexOrder::Pos,
            (_, false, true) => IndexOrder::Osp,
        }
    }

    /// Id-level pattern lookup. Results are `[s, p, o]` in the ascending
    /// order of the index chosen by [`TripleStore::index_for`].
    pub fn match_ids(
        &self,
        s: Option<TermId>,
        p: Option<TermId>,
        o: Option<TermId>,
    ) -> Box<dyn Iterator<Item = IdTriple> + '_> {
        match Self::index_for(s.is_some(), p.is_some(), o.is_some()) {
            IndexOrder::Spo => {
                let key: Vec<TermId> = [s, p, o].into_iter().map_while(|x| x).collect();
                let r = prefix_range(&self.spo, &key);
                Box::new(self.spo[r].iter().copied())
            }
            IndexOrder::Pos => {
                let key: Vec<TermId> = [p, o].into_iter().map_while(|x| x).collect();
                let r = prefix_range(&self.pos, &key);
                Box::new(self.pos[r].iter().map(|&[p, o, s]| [s, p, o]))
            }
            IndexOrder::Osp => {
                let key: Vec<TermId> = [o, s].into_iter().map_while(|x| x).collect();
                let r = prefix_range(&self.osp, &key);
                Box::new(self.osp[r].iter().map(|&[o, s, p]| [s, p, o]))
            }
        }
    }

    /// Term-level pattern lookup. A bound term that is not in the
    /// dictionary matches nothing.
    pub fn match_pattern(
        &self,
        s: Option<&Term>,
        p: Option<&Term>,
        o: Option<&Term>,
    ) -> Vec<Triple> {
        let lookup = |t: Option<&Term>| match t {
            None => Ok(None),
            Some(t) => self.id_of(t).map(Some).ok_or(()),
        };
        let (Ok(s), Ok(p), Ok(o)) = (lookup(s), lookup(p), lookup(o)) else {
            return Vec::new();
        };
        self.match_ids(s, p, o).map(|t| self.resolve(t)).collect()
    }

    pub fn objects_of(&self, subject: &Term, predicate: &Term) -> Vec<Term> {
        match (self.id_of(subject), self.id_of(predicate)) {
            (Some(s), Some(p)) => self
                .match_ids(Some(s), Some(p), None)
                .map(|[_, _, o]| self.term(o).clone())
                .collect(),
            _ => Vec::new(),
        }
    }

    pub fn object_ids(&self, subject: TermId, predicate: TermId) -> impl Iterator<Item = TermId> + '_ {
        self.match_ids(Some(subject), Some(predicate), None).map(|t| t[2])
    }

    pub fn subject_ids(&self, predicate: TermId, object: TermId) -> impl Iterator<Item = TermId> + '_ {
        self.match_ids(None, Some(predicate), Some(object)).map(|t| t[0])
    }

    /// Writes every triple as N-Triples in insertion order.
    pub fn write_ntriples<W: Write>(&self, mut out: W) -> io::Result<()> {
        for t in self.triples() {
            writeln!(out, "{t}")?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rdf::term::Literal;
    use proptest::prelude::*;

    fn iri(s: &str) -> Term {
        Term::iri(format!("http://ex/{s}"))
    }

    #[test]
    fn duplicates_are_stored_once() {
        let mut b = TripleStoreBuilder::new();
        assert!(b.insert(Triple::new(iri("a"), iri("p"), iri("b"))));
        assert!(!b.insert(Triple::new(iri("a"), iri("p"), iri("b"))));
        let store = b.finish();
        assert_eq!(store.len(), 1);
        assert_eq!(store.index_sizes(), [1, 1, 1]);
    }

    #[test]
    fn unknown_terms_match_nothing() {
        let store: TripleStore = [Triple::new(iri("a"), iri("p"), iri("b"))].into_iter().collect();
        assert!(store.match_pattern(Some(&iri("zz")), None, None).is_empty());
        assert!(store.objects_of(&iri("zz"), &iri("p")).is_empty());
        assert_eq!(store.objects_of(&iri("a"), &iri("p")), vec![iri("b")]);
        assert_eq!(store.match_pattern(None, None, None).len(), 1);
    }

    #[test]
    fn index_choice() {
        use IndexOrder::*;
        assert_eq!(TripleStore::index_for(true, true, false), Spo);
        assert_eq!(TripleStore::index_for(false, true, true), Pos);
        assert_eq!(TripleStore::index_for(true, false, true), Osp);
        assert_eq!(TripleStore::index_for(false, false, true), Osp);
        assert_eq!(TripleStore::index_for(false, true, false), Pos);
        assert_eq!(TripleStore::index_for(false, false, false), Spo);
    }

    fn small_term(kind: u8, n: u8) -> Term {
        match kind % 3 {
            0 => iri(&format!("e{n}")),
            1 => Term::BlankNode(format!("b{n}")),
            _ => Term::Literal(Literal::plain(format!("v{n}"))),
        }
    }

    proptest! {
        #[test]
        fn match_equals_linear_scan(
            raw in proptest::collection::vec((0u8..2, 0u8..8, 0u8..4, 0u8..3, 0u8..8), 0..500),
            probe in (0u8..8, 0u8..4, 0u8..3, 0u8..8),
        ) {
            let triples: Vec<Triple> = raw
                .iter()
                .map(|&(sk, s, p, ok, o)| Triple::new(small_term(sk, s), iri(&format!("p{p}")), small_term(ok, o)))
                .collect();
            let store: TripleStore = triples.iter().cloned().collect();
            let distinct: std::collections::BTreeSet<Triple> = triples.iter().cloned().collect();
            prop_assert_eq!(store.len(), distinct.len());
            prop_assert_eq!(store.index_sizes(), [distinct.len(); 3]);

            let ps = small_term(0, probe.0);
            let pp = iri(&format!("p{}", probe.1));
            let po = small_term(probe.2, probe.3);
            for mask in 0..8u8 {
                let s = (mask & 1 != 0).then_some(&ps);
                let p = (mask & 2 != 0).then_some(&pp);
                let o = (mask & 4 != 0).then_some(&po);
                let got: std::collections::BTreeSet<Triple> =
                    store.match_pattern(s, p, o).into_iter().collect();
                let want: std::collections::BTreeSet<Triple> = distinct
                    .iter()
                    .filter(|t| s.is_none_or(|x| &t.subject == x)
                        && p.is_none_or(|x| &t.predicate == x)
                        && o.is_none_or(|x| &t.object == x))
                    .cloned()
                    .collect();
                prop_assert_eq!(got, want);
            }
        }
    }
}
