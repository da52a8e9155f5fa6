//! RDF ingestion: terms, the indexed triple store and dump parsers.
//!
//! N-Triples is the canonical input path. Turtle is supported for the
//! common subset (see [`turtle`]). RDF/XML and JSON-LD are not parsed; a new
//! format plugs in by producing [`Triple`]s into a [`TripleStoreBuilder`].

pub mod ntriples;
pub mod store;
pub mod term;
pub mod turtle;

use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use flate2::read::MultiGzDecoder;
use thiserror::Error;

pub use store::{IdTriple, TermId, TripleStore, TripleStoreBuilder};
pub use term::{Literal, Term, TermKind, Triple, RDF_TYPE};

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RdfFormat {
    NTriples,
    Turtle,
}

impl RdfFormat {
    /// Guesses the format from the file extension, looking through a
    /// trailing `.gz`.
    pub fn from_path(path: &Path) -> Result<Self, IngestError> {
        let name = path
            .file_name()
            .map(|n| n.to_string_lossy().to_ascii_lowercase())
            .unwrap_or_default();
        let name = name.strip_suffix(".gz").unwrap_or(&name);
        let ext = name.rsplit_once('.').map(|(_, e)| e).unwrap_or("");
        ext.parse()
    }
}

impl FromStr for RdfFormat {
    type Err = IngestError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "nt" | "ntriples" | "n-triples" => Ok(RdfFormat::NTriples),
            "ttl" | "turtle" => Ok(RdfFormat::Turtle),
            other => Err(IngestError::UnsupportedFormat(other.to_string())),
        }
    }
}

impl fmt::Display for RdfFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RdfFormat::NTriples => "ntriples",
            RdfFormat::Turtle => "turtle",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SyntaxIssue {
    pub line: usize,
    pub message: String,
}

impl fmt::Display for SyntaxIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("syntax error in {path} at {issue}")]
    Syntax { path: PathBuf, issue: SyntaxIssue },
    #[error("unsupported RDF format '{0}' (expected ntriples or turtle)")]
    UnsupportedFormat(String),
}

#[derive(Debug, Clone, Copy, Default)]
pub struct ParseOptions {
    /// Skip and log malformed statements instead of failing on the first.
    pub lenient: bool,
}

#[derive(Debug)]
pub struct ParsedDump {
    pub store: TripleStore,
    /// Statements read, including duplicates.
    pub statements: usize,
    /// Malformed statements skipped in lenient mode.
    pub errors: Vec<SyntaxIssue>,
}

fn open(path: &Path) -> Result<Box<dyn BufRead>, IngestError> {
    let file = File::open(path).map_err(|source| IngestError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let gz = path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("gz"));
    Ok(if gz {
        Box::new(BufReader::new(MultiGzDecoder::new(file)))
    } else {
        Box::new(BufReader::new(file))
    })
}

/// Reads an RDF dump into a finalized store. `.gz` files are decompressed
/// transparently.
pub fn parse_dump(path: &Path, format: RdfFormat, options: ParseOptions) -> Result<ParsedDump, IngestError> {
    let reader = open(path)?;
    parse_reader(reader, format, options).map_err(|e| match e {
        ReaderError::Io(source) => IngestError::Io {
            path: path.to_path_buf(),
            source,
        },
        ReaderError::Syntax(issue) => IngestError::Syntax {
            path: path.to_path_buf(),
            issue,
        },
    })
}

#[derive(Debug)]
pub enum ReaderError {
    Io(std::io::Error),
    Syntax(SyntaxIssue),
}

pub fn parse_reader<R: BufRead>(
    reader: R,
    format: RdfFormat,
    options: ParseOptions,
) -> Result<ParsedDump, ReaderError> {
    let mut builder = TripleStoreBuilder::new();
    let mut errors = Vec::new();
    let mut statements = 0usize;
    let report = |issue: SyntaxIssue, errors: &mut Vec<SyntaxIssue>| {
        if options.lenient {
            log::warn!("skipping malformed statement at {issue}");
            errors.push(issue);
            Ok(())
        } else {
            Err(ReaderError::Syntax(issue))
        }
    };
    match format {
        RdfFormat::NTriples => {
            let mut blanks = ntriples::BlankNodes::default();
            for (idx, line) in reader.lines().enumerate() {
                let line = line.map_err(ReaderError::Io)?;
                match ntriples::parse_line(&line, &mut blanks) {
                    Ok(Some(t)) => {
                        statements += 1;
                        builder.insert(t);
                    }
                    Ok(None) => {}
                    Err(message) => report(SyntaxIssue { line: idx + 1, message }, &mut errors)?,
                }
            }
        }
        RdfFormat::Turtle => {
            let mut parser = turtle::TurtleParser::new(reader);
            let mut batch = Vec::new();
            loop {
                match parser.next_statement(&mut batch) {
                    Ok(more) => {
                        statements += batch.len();
                        for t in batch.drain(..) {
                            builder.insert(t);
                        }
                        if !more {
                            break;
                        }
                    }
                    Err(turtle::TurtleError::Io(e)) => return Err(ReaderError::Io(e)),
                    Err(turtle::TurtleError::Syntax { line, message }) => {
                        report(SyntaxIssue { line, message }, &mut errors)?;
                        match parser.recover() {
                            Ok(()) => {}
                            Err(turtle::TurtleError::Io(e)) => return Err(ReaderError::Io(e)),
                            Err(turtle::TurtleError::Syntax { .. }) => unreachable!(),
                        }
                    }
                }
            }
        }
    }
    Ok(ParsedDump {
        store: builder.finish(),
        statements,
        errors,
    })
}
