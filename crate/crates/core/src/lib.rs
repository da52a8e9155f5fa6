//! Compiles RDF dumps into heterogeneous graph machine-learning datasets.

pub mod config;
pub mod content;
pub mod edges;
pub mod matrix;
pub mod nodes;
pub mod rdf;
pub mod topology;
pub mod writer;
pub mod pipeline;
