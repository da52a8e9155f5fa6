//! Module behaviour on the small hand-written library fixture: four works,
//! two authors, six `ex:wrote` links.

mod common;

use common::{fixture, EX};
use rdf2gml::config::{EdgeSpec, EdgeTypeConfig, EmbeddingModelKind, FeatureConfig, NodeTypeConfig};
use rdf2gml::content::build_content_features;
use rdf2gml::content::infer::{InferOptions, LiteralType};
use rdf2gml::content::profile::{collect_columns, profile_column};
use rdf2gml::content::text::HashingEncoder;
use rdf2gml::edges::build_edges;
use rdf2gml::nodes::{extract_nodes, NodeTable};
use rdf2gml::rdf::{parse_dump, ParseOptions, RdfFormat, Term, TripleStore, RDF_TYPE};
use rdf2gml::topology::model::EmbeddingModel;
use rdf2gml::topology::triples::{build_triple_ids, SplitFractions};
use rdf2gml::topology::export_node_embeddings;

fn store() -> TripleStore {
    parse_dump(&fixture("library.nt"), RdfFormat::NTriples, ParseOptions::default())
        .unwrap()
        .store
}

fn node_cfg(name: &str, class: &str) -> NodeTypeConfig {
    NodeTypeConfig {
        name: name.into(),
        class_iri: format!("{EX}{class}"),
        nld_properties: vec![],
        excluded_properties: vec![],
        include_blank_nodes: false,
    }
}

fn works(store: &TripleStore) -> NodeTable {
    extract_nodes(store, &node_cfg("work", "Work"))
}

fn authors(store: &TripleStore) -> NodeTable {
    extract_nodes(store, &node_cfg("author", "Author"))
}

fn work(i: u8) -> String {
    format!("{EX}work/w{i}")
}

#[test]
fn duplicates_are_stored_once() {
    let dump = parse_dump(&fixture("library.nt"), RdfFormat::NTriples, ParseOptions::default()).unwrap();
    assert_eq!(dump.statements, 30);
    assert_eq!(dump.store.len(), 28);
    let [a, b, c] = dump.store.index_sizes();
    assert!(a == 28 && b == 28 && c == 28);
}

#[test]
fn pattern_matches() {
    let s = store();
    let rdf_type = Term::iri(RDF_TYPE);
    let typed: Vec<String> = s
        .match_pattern(None, Some(&rdf_type), Some(&Term::iri(format!("{EX}Work"))))
        .into_iter()
        .map(|t| t.subject.as_iri().unwrap().to_string())
        .collect();
    assert_eq!(typed, (1..=4).map(work).collect::<Vec<_>>());
    assert_eq!(s.match_pattern(None, None, None).len(), 28);
    let pages = s.match_pattern(Some(&Term::iri(work(1))), Some(&Term::iri(format!("{EX}pages"))), None);
    assert_eq!(pages.len(), 1);
}

#[test]
fn objects_of_author() {
    let s = store();
    let wrote = Term::iri(format!("{EX}wrote"));
    let mut a: Vec<String> = s
        .objects_of(&Term::iri(format!("{EX}author/A")), &wrote)
        .into_iter()
        .map(|t| t.as_iri().unwrap().to_string())
        .collect();
    a.sort();
    assert_eq!(a, [work(1), work(2), work(3)]);
    assert!(s.objects_of(&Term::iri(format!("{EX}nobody")), &wrote).is_empty());
    let pages = s.objects_of(&Term::iri(work(1)), &Term::iri(format!("{EX}pages")));
    assert_eq!(pages.len(), 1);
}

#[test]
fn node_table_in_iri_order() {
    let s = store();
    let t = works(&s);
    assert_eq!(t.len(), 4);
    for i in 0..4 {
        assert_eq!(t.entries()[i], work(i as u8 + 1));
        assert_eq!(t.id_of(&work(i as u8 + 1)), Some(i));
    }
    assert!(extract_nodes(&s, &node_cfg("dataset", "Dataset")).is_empty());
}

#[test]
fn citation_profile() {
    let s = store();
    let t = works(&s);
    let cols = collect_columns(&s, &t, &[]);
    let opts = InferOptions {
        nld_min_avg_tokens: 5.0,
        forced_nld: false,
        allow_nld: true,
    };
    let by_name = |p: &str| cols.iter().find(|c| c.property == format!("{EX}{p}")).unwrap();
    let citations = profile_column(by_name("citationCount"), &opts);
    assert_eq!(citations.fill_degree, 1.0);
    assert_eq!(citations.top_value_ratio, 0.5);
    assert_eq!(citations.distinct_ratio, 0.75);
    let titles = profile_column(by_name("title"), &opts);
    assert_eq!((titles.fill_degree, titles.distinct_ratio), (1.0, 1.0));
    let pages = profile_column(by_name("pages"), &opts);
    assert_eq!(pages.fill_degree, 0.25);
    assert_eq!(profile_column(by_name("year"), &opts).inferred_type, LiteralType::Year);
}

#[test]
fn content_matrix_drops_and_widths() {
    let s = store();
    let t = works(&s);
    let cfg = FeatureConfig::default();
    let mut enc = HashingEncoder::new(8);
    let c = build_content_features(&s, &t, &node_cfg("work", "Work"), &cfg, &mut enc).unwrap();
    let reason = |p: &str| {
        c.profiles
            .iter()
            .find(|x| x.property == format!("{EX}{p}"))
            .unwrap()
            .dropped
            .map(|d| serde_json::to_value(d).unwrap().as_str().unwrap().to_string())
    };
    assert_eq!(reason("pages").as_deref(), Some("sparse"));
    assert_eq!(reason("title").as_deref(), Some("unique_nominal"));
    assert_eq!(reason("citationCount"), None);
    // citations and year are both single-width and below the correlation threshold
    assert_eq!(c.matrix.rows(), 4);
    assert_eq!(c.matrix.cols(), 2);

    let mut forced = node_cfg("work", "Work");
    forced.nld_properties = vec![format!("{EX}title")];
    let c = build_content_features(&s, &t, &forced, &cfg, &mut enc).unwrap();
    assert_eq!(c.matrix.cols(), 8 + 2);
    assert_eq!(c.matrix.blocks()[0].name, "nld");
}

#[test]
fn object_property_triples() {
    let s = store();
    let ids = build_triple_ids(&s, 1, SplitFractions::default()).unwrap();
    assert_eq!(ids.triples.len(), 12);
    assert_eq!(ids.train.len() + ids.valid.len() + ids.test.len(), 12);
    let again = build_triple_ids(&s, 1, SplitFractions::default()).unwrap();
    assert_eq!((ids.train, ids.valid, ids.test), (again.train, again.valid, again.test));
}

#[test]
fn exported_rows_follow_mapping() {
    let s = store();
    let ids = build_triple_ids(&s, 1, SplitFractions::default()).unwrap();
    let model = EmbeddingModel::init(EmbeddingModelKind::TransE, 4, ids.entity_count(), ids.relation_count(), 1);
    let t = works(&s);
    let (m, missing) = export_node_embeddings(&model, &ids, &t);
    assert_eq!(missing, 0);
    for (row, iri) in t.entries().iter().enumerate() {
        let e = ids.entity_id(iri).unwrap();
        assert_eq!(m.row(row), model.entity(e));
    }
}

#[test]
fn wrote_edges() {
    let s = store();
    let (a, w) = (authors(&s), works(&s));
    let cfg = EdgeTypeConfig {
        name: "wrote".into(),
        subject_node: "author".into(),
        object_node: "work".into(),
        spec: EdgeSpec::Binary {
            properties: vec![format!("{EX}wrote")],
        },
    };
    let (table, stats, _) = build_edges(&s, &cfg, &a, &w, &FeatureConfig::default()).unwrap();
    assert_eq!(table.pairs, [(0, 0), (0, 1), (0, 2), (1, 0), (1, 2), (1, 3)]);
    assert_eq!(stats.skipped_endpoints, 0);

    let absent = EdgeTypeConfig {
        spec: EdgeSpec::Binary {
            properties: vec![format!("{EX}reviewed")],
        },
        ..cfg
    };
    assert!(build_edges(&s, &absent, &a, &w, &FeatureConfig::default()).unwrap().0.is_empty());
}

#[test]
fn co_author_query() {
    let s = store();
    let a = authors(&s);
    let cfg = EdgeTypeConfig {
        name: "co_author".into(),
        subject_node: "author".into(),
        object_node: "author".into(),
        spec: EdgeSpec::Custom {
            query: format!("?a1 <{EX}wrote> ?w . ?a2 <{EX}wrote> ?w ."),
            select: ["a1".into(), "a2".into()],
        },
    };
    let (table, stats, _) = build_edges(&s, &cfg, &a, &a, &FeatureConfig::default()).unwrap();
    assert_eq!(table.pairs, [(0, 1), (1, 0)]);
    assert_eq!(stats.self_pairs, 2);

    let nothing = EdgeTypeConfig {
        spec: EdgeSpec::Custom {
            query: format!("?a1 <{EX}edited> ?w . ?a2 <{EX}wrote> ?w"),
            select: ["a1".into(), "a2".into()],
        },
        ..cfg
    };
    assert!(build_edges(&s, &nothing, &a, &a, &FeatureConfig::default()).unwrap().0.is_empty());
}
