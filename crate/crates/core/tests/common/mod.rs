//! Shared helpers for the integration tests: fixture paths, tree
//! comparison and brute-force reference implementations.

#![allow(dead_code)]

use std::collections::{BTreeMap, BTreeSet};
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use rand::Rng;
use rdf2gml::rdf::{Literal, Term, Triple, TripleStore, RDF_TYPE};

pub const EX: &str = "http://example.org/";
pub const XSD_BOOLEAN: &str = "http://www.w3.org/2001/XMLSchema#boolean";

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

fn files_under(root: &Path) -> BTreeSet<PathBuf> {
    fn walk(dir: &Path, root: &Path, out: &mut BTreeSet<PathBuf>) {
        for entry in fs::read_dir(dir).unwrap() {
            let path = entry.unwrap().path();
            if path.is_dir() {
                walk(&path, root, out);
            } else {
                out.insert(path.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    let mut out = BTreeSet::new();
    walk(root, root, &mut out);
    out
}

/// JSON with wall-clock fields removed.
fn stable_json(path: &Path) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_slice(&fs::read(path).unwrap()).unwrap();
    if let Some(o) = v.as_object_mut() {
        o.remove("generated_at");
        o.remove("stage_seconds");
    }
    v
}

/// Compares two dataset trees file by file. `manifest.json` and
/// `stats.json` are compared as JSON without their timing fields; every
/// other file byte for byte.
pub fn compare_trees(actual: &Path, expected: &Path) -> Result<(), String> {
    let a = files_under(actual);
    let e = files_under(expected);
    if a != e {
        return Err(format!(
            "file sets differ: extra {:?}, missing {:?}",
            a.difference(&e).collect::<Vec<_>>(),
            e.difference(&a).collect::<Vec<_>>()
        ));
    }
    for rel in &a {
        let (pa, pe) = (actual.join(rel), expected.join(rel));
        let name = rel.file_name().and_then(|n| n.to_str()).unwrap_or_default();
        let same = if name == "manifest.json" || name == "stats.json" {
            stable_json(&pa) == stable_json(&pe)
        } else {
            fs::read(&pa).unwrap() == fs::read(&pe).unwrap()
        };
        if !same {
            return Err(format!("{} differs", rel.display()));
        }
    }
    Ok(())
}

pub fn iri(local: &str) -> Term {
    Term::iri(format!("{EX}{local}"))
}

/// A small random graph over entity IRIs, with class memberships, four
/// object properties and reified aux instances carrying a boolean flag.
#[derive(Debug, Clone)]
pub struct RandomGraph {
    /// `(s, p, o)` IRIs; object-valued only.
    pub links: Vec<(String, String, String)>,
    /// Aux flag values.
    pub flags: BTreeMap<String, bool>,
}

pub const CLASSES: [&str; 3] = ["C0", "C1", "C2"];
pub const PROPS: [&str; 4] = ["p0", "p1", "p2", "p3"];

impl RandomGraph {
    pub fn generate<R: Rng>(rng: &mut R) -> Self {
        let n = rng.gen_range(3..30);
        let entity = |i: usize| format!("{EX}e{i:02}");
        let mut links = BTreeSet::new();
        for i in 0..n {
            for c in CLASSES {
                if rng.gen_bool(0.45) {
                    links.insert((entity(i), RDF_TYPE.to_string(), format!("{EX}{c}")));
                }
            }
        }
        let edges = rng.gen_range(0..(n * 4).min(300));
        for _ in 0..edges {
            let p = PROPS.choose(rng).unwrap();
            // occasional outsider endpoints
            let o = if rng.gen_bool(0.05) {
                format!("{EX}outside{}", rng.gen_range(0..3))
            } else {
                entity(rng.gen_range(0..n))
            };
            links.insert((entity(rng.gen_range(0..n)), format!("{EX}{p}"), o));
        }
        let mut flags = BTreeMap::new();
        for x in 0..rng.gen_range(0..12) {
            let aux = format!("{EX}x{x:02}");
            links.insert((aux.clone(), RDF_TYPE.to_string(), format!("{EX}Aux")));
            for _ in 0..rng.gen_range(0..3) {
                links.insert((entity(rng.gen_range(0..n)), format!("{EX}s2a"), aux.clone()));
            }
            for _ in 0..rng.gen_range(0..3) {
                links.insert((aux.clone(), format!("{EX}a2o"), entity(rng.gen_range(0..n))));
            }
            if rng.gen_bool(0.8) {
                flags.insert(aux, rng.gen_bool(0.5));
            }
        }
        RandomGraph {
            links: links.into_iter().collect(),
            flags,
        }
    }

    pub fn store(&self) -> TripleStore {
        let mut triples: Vec<Triple> = self
            .links
            .iter()
            .map(|(s, p, o)| Triple::new(Term::iri(s.clone()), Term::iri(p.clone()), Term::iri(o.clone())))
            .collect();
        for (x, f) in &self.flags {
            triples.push(Triple::new(
                Term::iri(x.clone()),
                iri("flag"),
                Term::Literal(Literal::typed(f.to_string(), XSD_BOOLEAN)),
            ));
        }
        triples.into_iter().collect()
    }

    pub fn triple_count(&self) -> usize {
        self.links.len() + self.flags.len()
    }

    /// Sorted members of `class` (full IRI).
    pub fn members(&self, class: &str) -> Vec<String> {
        let set: BTreeSet<&String> = self
            .links
            .iter()
            .filter(|(_, p, o)| p == RDF_TYPE && o == class)
            .map(|(s, _, _)| s)
            .collect();
        set.into_iter().cloned().collect()
    }

    pub fn has(&self, s: &str, p: &str, o: &str) -> bool {
        self.links.binary_search(&(s.to_string(), p.to_string(), o.to_string())).is_ok()
    }

    pub fn objects(&self, s: &str, p: &str) -> Vec<String> {
        self.links.iter().filter(|(a, b, _)| a == s && b == p).map(|(_, _, o)| o.clone()).collect()
    }

    /// Every IRI in subject or object position.
    pub fn nodes(&self) -> Vec<String> {
        let set: BTreeSet<&String> = self.links.iter().flat_map(|(s, _, o)| [s, o]).collect();
        set.into_iter().cloned().collect()
    }
}

fn index(members: &[String]) -> BTreeMap<&str, usize> {
    members.iter().enumerate().map(|(i, m)| (m.as_str(), i)).collect()
}

pub fn oracle_binary(g: &RandomGraph, props: &[String], src: &[String], dst: &[String]) -> BTreeSet<(usize, usize)> {
    let (si, di) = (index(src), index(dst));
    let mut out = BTreeSet::new();
    for (s, p, o) in &g.links {
        if props.contains(p) {
            if let (Some(&a), Some(&b)) = (si.get(s.as_str()), di.get(o.as_str())) {
                out.insert((a, b));
            }
        }
    }
    out
}

/// Nested-loop join of the property chain.
pub fn oracle_multihop(g: &RandomGraph, path: &[String], src: &[String], dst: &[String]) -> BTreeSet<(usize, usize)> {
    let (si, di) = (index(src), index(dst));
    let mut out = BTreeSet::new();
    for s in src {
        let mut reach: BTreeSet<String> = BTreeSet::from([s.clone()]);
        for p in path {
            let mut next = BTreeSet::new();
            for x in &reach {
                for (a, b, o) in &g.links {
                    if a == x && b == p {
                        next.insert(o.clone());
                    }
                }
            }
            reach = next;
        }
        for o in reach {
            if let Some(&b) = di.get(o.as_str()) {
                out.insert((si[s.as_str()], b));
            }
        }
    }
    out
}

/// Pairs with the aux instance that produced each (first in IRI order),
/// plus the number of aux instances missing a side.
pub fn oracle_nary(g: &RandomGraph, src: &[String], dst: &[String]) -> (BTreeMap<(usize, usize), String>, usize) {
    let (si, di) = (index(src), index(dst));
    let mut chosen = BTreeMap::new();
    let mut dangling = 0;
    for x in g.members(&format!("{EX}Aux")) {
        let subjects: Vec<&String> = g
            .links
            .iter()
            .filter(|(_, p, o)| *p == format!("{EX}s2a") && *o == x)
            .map(|(s, _, _)| s)
            .collect();
        let objects = g.objects(&x, &format!("{EX}a2o"));
        if subjects.is_empty() || objects.is_empty() {
            dangling += 1;
            continue;
        }
        for s in &subjects {
            for o in &objects {
                if let (Some(&a), Some(&b)) = (si.get(s.as_str()), di.get(o.as_str())) {
                    chosen.entry((a, b)).or_insert_with(|| x.clone());
                }
            }
        }
    }
    (chosen, dangling)
}

/// A triple pattern over variable indices or constant IRIs.
#[derive(Debug, Clone)]
pub enum Slot {
    Var(usize),
    Iri(String),
}

/// Enumerates every assignment of graph nodes to the variables and keeps
/// those satisfying all patterns; returns distinct `(select.0, select.1)`
/// bindings.
pub fn oracle_bgp(g: &RandomGraph, patterns: &[(Slot, String, Slot)], vars: usize, select: (usize, usize)) -> BTreeSet<(String, String)> {
    let domain = g.nodes();
    let mut out = BTreeSet::new();
    let mut assignment = vec![0usize; vars];
    if domain.is_empty() {
        return out;
    }
    loop {
        let value = |s: &Slot| match s {
            Slot::Var(v) => domain[assignment[*v]].clone(),
            Slot::Iri(i) => i.clone(),
        };
        if patterns.iter().all(|(s, p, o)| g.has(&value(s), p, &value(o))) {
            out.insert((domain[assignment[select.0]].clone(), domain[assignment[select.1]].clone()));
        }
        let mut k = 0;
        loop {
            if k == vars {
                return out;
            }
            assignment[k] += 1;
            if assignment[k] < domain.len() {
                break;
            }
            assignment[k] = 0;
            k += 1;
        }
    }
}

/// Days since 1970-01-01 for a proleptic Gregorian date, counted day by
/// day through month lengths.
pub fn civil_days(year: i64, month: u32, day: u32) -> i64 {
    let leap = |y: i64| (y % 4 == 0 && y % 100 != 0) || y % 400 == 0;
    let month_len = |y: i64, m: u32| match m {
        1 | 3 | 5 | 7 | 8 | 10 | 12 => 31,
        4 | 6 | 9 | 11 => 30,
        _ if leap(y) => 29,
        _ => 28,
    };
    let mut days = 0i64;
    if year >= 1970 {
        for y in 1970..year {
            days += if leap(y) { 366 } else { 365 };
        }
    } else {
        for y in year..1970 {
            days -= if leap(y) { 366 } else { 365 };
        }
    }
    for m in 1..month {
        days += month_len(year, m);
    }
    days + i64::from(day) - 1
}
