//! Restricted basic-graph-pattern queries for custom relations.
//!
//! Syntax: triple patterns separated by `.`, each position an `<IRI>` or a
//! `?variable`; `a` abbreviates `rdf:type` in predicate position. Literals,
//! prefixes, OPTIONAL, FILTER and property paths are not supported.

use std::collections::{BTreeSet, HashMap};
use std::fmt;

use thiserror::Error;

use crate::rdf::{TermId, TripleStore, RDF_TYPE};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum QueryError {
    #[error("query syntax error: {0}")]
    Syntax(String),
    #[error("query has no triple patterns")]
    Empty,
    #[error("select variable {0} is not bound by any pattern")]
    UnboundSelect(String),
    #[error("query patterns do not form one connected component")]
    DisconnectedPattern,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Slot {
    Var(usize),
    Iri(String),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PatternQuery {
    variables: Vec<String>,
    patterns: Vec<[Slot; 3]>,
    select: (usize, usize),
}

#[derive(Debug, PartialEq)]
enum Token {
    Iri(String),
    Var(String),
    Dot,
}

fn tokenize(query: &str) -> Result<Vec<Token>, QueryError> {
    let mut tokens = Vec::new();
    let mut chars = query.char_indices().peekable();
    let word_end = |c: char| c.is_whitespace() || c == '.';
    while let Some(&(start, c)) = chars.peek() {
        if c.is_whitespace() {
            chars.next();
        } else if c == '.' {
            chars.next();
            tokens.push(Token::Dot);
        } else if c == '<' {
            chars.next();
            let mut iri = String::new();
            loop {
                match chars.next() {
                    Some((_, '>')) => break,
                    Some((_, c)) if c.is_whitespace() || c == '<' => {
                        return Err(QueryError::Syntax(format!("invalid character in IRI at byte {start}")))
                    }
                    Some((_, c)) => iri.push(c),
                    None => return Err(QueryError::Syntax(format!("unterminated IRI at byte {start}"))),
                }
            }
            if iri.is_empty() {
                return Err(QueryError::Syntax(format!("empty IRI at byte {start}")));
            }
            tokens.push(Token::Iri(iri));
        } else if c == '?' || c == '$' {
            chars.next();
            let mut name = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if c.is_alphanumeric() || c == '_' {
                    name.push(c);
                    chars.next();
                } else {
                    break;
                }
            }
            if name.is_empty() {
                return Err(QueryError::Syntax(format!("empty variable name at byte {start}")));
            }
            tokens.push(Token::Var(name));
        } else {
            let mut word = String::new();
            while let Some(&(_, c)) = chars.peek() {
                if word_end(c) {
                    break;
                }
                word.push(c);
                chars.next();
            }
            if word == "a" {
                tokens.push(Token::Iri(RDF_TYPE.to_string()));
            } else {
                return Err(QueryError::Syntax(format!("unexpected '{word}' at byte {start}")));
            }
        }
    }
    Ok(tokens)
}

fn var_name(v: &str) -> &str {
    v.strip_prefix(['?', '$']).unwrap_or(v)
}

impl PatternQuery {
    /// Parses `query` and checks that both select variables occur in it and
    /// that the patterns are connected through shared variables.
    pub fn parse(query: &str, select: (&str, &str)) -> Result<Self, QueryError> {
        let mut variables: Vec<String> = Vec::new();
        let mut index: HashMap<String, usize> = HashMap::new();
        let mut patterns = Vec::new();
        let mut current: Vec<Slot> = Vec::new();
        for token in tokenize(query)? {
            match token {
                Token::Dot => {
                    if current.len() != 3 {
                        return Err(QueryError::Syntax(format!(
                            "pattern {} has {} terms, expected 3",
                            patterns.len() + 1,
                            current.len()
                        )));
                    }
                    let [s, p, o]: [Slot; 3] = std::mem::take(&mut current).try_into().expect("three slots");
                    patterns.push([s, p, o]);
                }
                Token::Iri(iri) => current.push(Slot::Iri(iri)),
                Token::Var(name) => {
                    let id = *index.entry(name.clone()).or_insert_with(|| {
                        variables.push(name);
                        variables.len() - 1
                    });
                    current.push(Slot::Var(id));
                }
            }
            if current.len() > 3 {
                return Err(QueryError::Syntax(format!(
                    "pattern {} has more than 3 terms; missing '.'",
                    patterns.len() + 1
                )));
            }
        }
        match current.len() {
            0 => {}
            3 => {
                let [s, p, o]: [Slot; 3] = current.try_into().expect("three slots");
                patterns.push([s, p, o]);
            }
            n => {
                return Err(QueryError::Syntax(format!(
                    "pattern {} has {n} terms, expected 3",
                    patterns.len() + 1
                )))
            }
        }
        if patterns.is_empty() {
            return Err(QueryError::Empty);
        }
        let lookup = |v: &str| {
            index
                .get(var_name(v))
                .copied()
                .ok_or_else(|| QueryError::UnboundSelect(format!("?{}", var_name(v))))
        };
        let select = (lookup(select.0)?, lookup(select.1)?);
        let q = PatternQuery {
            variables,
            patterns,
            select,
        };
        if !q.is_connected() {
            return Err(QueryError::DisconnectedPattern);
        }
        Ok(q)
    }

    fn pattern_vars(p: &[Slot; 3]) -> impl Iterator<Item = usize> + '_ {
        p.iter().filter_map(|s| match s {
            Slot::Var(v) => Some(*v),
            Slot::Iri(_) => None,
        })
    }

    fn is_connected(&self) -> bool {
        let mut reached = vec![false; self.patterns.len()];
        let mut vars: BTreeSet<usize> = BTreeSet::new();
        reached[0] = true;
        vars.extend(Self::pattern_vars(&self.patterns[0]));
        let mut changed = true;
        while changed {
            changed = false;
            for (i, p) in self.patterns.iter().enumerate() {
                if !reached[i] && Self::pattern_vars(p).any(|v| vars.contains(&v)) {
                    reached[i] = true;
                    vars.extend(Self::pattern_vars(p));
                    changed = true;
                }
            }
        }
        reached.iter().all(|r| *r)
    }

    pub fn patterns(&self) -> &[[Slot; 3]] {
        &self.patterns
    }

    pub fn variables(&self) -> &[String] {
        &self.variables
    }

    /// Distinct `(src, dst)` term-id bindings, sorted. Patterns are joined in
    /// the order written; each lookup binds whatever is already known.
    pub fn evaluate(&self, store: &TripleStore) -> Vec<(TermId, TermId)> {
        let mut constants = Vec::with_capacity(self.patterns.len());
        for p in &self.patterns {
            let mut ids = [None; 3];
            for (k, slot) in p.iter().enumerate() {
                if let Slot::Iri(iri) = slot {
                    match store.iri_id(iri) {
                        Some(id) => ids[k] = Some(id),
                        None => return Vec::new(),
                    }
                }
            }
            constants.push(ids);
        }
        let mut bindings = vec![None; self.variables.len()];
        let mut out = BTreeSet::new();
        self.join(store, &constants, 0, &mut bindings, &mut out);
        out.into_iter().collect()
    }

    fn join(
        &self,
        store: &TripleStore,
        constants: &[[Option<TermId>; 3]],
        depth: usize,
        bindings: &mut Vec<Option<TermId>>,
        out: &mut BTreeSet<(TermId, TermId)>,
    ) {
        if depth == self.patterns.len() {
            if let (Some(a), Some(b)) = (bindings[self.select.0], bindings[self.select.1]) {
                out.insert((a, b));
            }
            return;
        }
        let pattern = &self.patterns[depth];
        let mut key = constants[depth];
        for (k, slot) in pattern.iter().enumerate() {
            if let Slot::Var(v) = slot {
                key[k] = bindings[*v];
            }
        }
        for triple in store.match_ids(key[0], key[1], key[2]) {
            let saved = bindings.clone();
            let mut consistent = true;
            for (k, slot) in pattern.iter().enumerate() {
                if let Slot::Var(v) = slot {
                    match bindings[*v] {
                        Some(b) if b != triple[k] => {
                            consistent = false;
                            break;
                        }
                        _ => bindings[*v] = Some(triple[k]),
                    }
                }
            }
            if consistent {
                self.join(store, constants, depth + 1, bindings, out);
            }
            *bindings = saved;
        }
    }
}

impl fmt::Display for PatternQuery {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, p) in self.patterns.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            for slot in p {
                match slot {
                    Slot::Var(v) => write!(f, "?{} ", self.variables[*v])?,
                    Slot::Iri(iri) => write!(f, "<{iri}> ")?,
                }
            }
            f.write_str(".")?;
        }
        Ok(())
    }
}
