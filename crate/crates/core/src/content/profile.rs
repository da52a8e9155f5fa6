//! Per-property statistics over the members of one node table.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use super::infer::{infer_literal_type, InferOptions, LiteralType};
use super::select::DropReason;
use crate::nodes::NodeTable;
use crate::rdf::{Literal, Term, TripleStore};

/// All literal values of one datatype property, per node, sorted by lexical
/// form (then datatype and language).
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyColumn {
    pub property: String,
    pub values: Vec<Vec<Literal>>,
}

fn literal_key(l: &Literal) -> (&str, Option<&str>, Option<&str>) {
    (l.lexical(), l.datatype(), l.language())
}

impl PropertyColumn {
    /// The lexicographically smallest value of node `i`.
    pub fn representative(&self, i: usize) -> Option<&Literal> {
        self.values[i].first()
    }

    pub fn representatives(&self) -> Vec<Option<&str>> {
        (0..self.values.len()).map(|i| self.representative(i).map(Literal::lexical)).collect()
    }

    /// All values of node `i` joined by a single space.
    pub fn joined_text(&self, i: usize) -> Option<String> {
        let v = &self.values[i];
        if v.is_empty() {
            return None;
        }
        Some(v.iter().map(Literal::lexical).collect::<Vec<_>>().join(" "))
    }

    pub fn all_values(&self) -> Vec<&Literal> {
        self.values.iter().flatten().collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PropertyProfile {
    pub property: String,
    pub fill_degree: f64,
    pub distinct_ratio: f64,
    pub top_value_ratio: f64,
    pub inferred_type: LiteralType,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dropped: Option<DropReason>,
}

/// Gathers every literal-valued property used by at least one member of the
/// table, skipping `excluded`. Columns come back in IRI order.
pub fn collect_columns(store: &TripleStore, table: &NodeTable, excluded: &[String]) -> Vec<PropertyColumn> {
    let n = table.len();
    let mut by_predicate: BTreeMap<String, Vec<Vec<Literal>>> = BTreeMap::new();
    let mut names: HashMap<u32, String> = HashMap::new();
    for (row, &s) in table.term_ids().iter().enumerate() {
        for [_, p, o] in store.match_ids(Some(s), None, None) {
            let Term::Literal(lit) = store.term(o) else { continue };
            let name = names
                .entry(p)
                .or_insert_with(|| store.term(p).as_iri().unwrap_or_default().to_string());
            if excluded.iter().any(|e| e == name) {
                continue;
            }
            by_predicate
                .entry(name.clone())
                .or_insert_with(|| vec![Vec::new(); n])[row]
                .push(lit.clone());
        }
    }
    by_predicate
        .into_iter()
        .map(|(property, mut values)| {
            for v in &mut values {
                v.sort_by(|a, b| literal_key(a).cmp(&literal_key(b)));
                v.dedup();
            }
            PropertyColumn { property, values }
        })
        .collect()
}

/// Fill, distinct and modal ratios over the representative values, plus the
/// inferred literal type over all values.
pub fn profile_column(column: &PropertyColumn, opts: &InferOptions) -> PropertyProfile {
    let n = column.values.len();
    let reps: Vec<&str> = column.representatives().into_iter().flatten().collect();
    let filled = reps.len();
    let mut counts: HashMap<&str, usize> = HashMap::new();
    for r in &reps {
        *counts.entry(r).or_default() += 1;
    }
    let top = counts.values().copied().max().unwrap_or(0);
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    PropertyProfile {
        property: column.property.clone(),
        fill_degree: ratio(filled, n),
        distinct_ratio: ratio(counts.len(), filled),
        top_value_ratio: ratio(top, filled),
        inferred_type: infer_literal_type(&column.all_values(), opts),
        dropped: None,
    }
}
