//! Text encoders for natural-language description (NLD) properties.
//!
//! The default [`HashingEncoder`] is self-contained: text is lowercased and
//! split into maximal runs of alphanumeric characters; each token is hashed
//! with 64-bit FNV-1a, lands in bucket `hash % dim` and adds `+1` when bit 63
//! of the hash is clear or `-1` when it is set. The count vector is then
//! L2-normalized.
//!
//! External models plug in through a sidecar file of precomputed vectors
//! (`<node IRI>\t<v0> <v1> ...`) or a subprocess that reads one text per
//! stdin line and answers with one line of space-separated floats per text.

use std::collections::HashMap;
use std::io::{BufRead, BufReader, Write};
use std::path::{Path, PathBuf};
use std::process::{Command, Stdio};

use thiserror::Error;

#[derive(Debug, Error)]
pub enum EncoderError {
    #[error("text encoder failure: {0}")]
    Failure(String),
    #[error("text encoder returned width {got}, expected {expected}")]
    WrongWidth { expected: usize, got: usize },
}

#[derive(Debug, Clone, Copy)]
pub struct NldInput<'a> {
    pub iri: &'a str,
    pub text: &'a str,
}

pub trait TextEncoder {
    fn dim(&self) -> usize;

    /// One vector per input, or `None` when the encoder has nothing for that
    /// input (the caller substitutes a zero vector).
    fn encode(&mut self, inputs: &[NldInput<'_>]) -> Result<Vec<Option<Vec<f64>>>, EncoderError>;
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    for &b in bytes {
        hash ^= u64::from(b);
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
    }
    hash
}

pub fn tokenize(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|t| !t.is_empty())
        .map(str::to_lowercase)
}

#[derive(Debug, Clone)]
pub struct HashingEncoder {
    dim: usize,
}

impl HashingEncoder {
    pub fn new(dim: usize) -> Self {
        assert!(dim > 0, "hashing dimension must be positive");
        HashingEncoder { dim }
    }

    pub fn encode_text(&self, text: &str) -> Vec<f64> {
        let mut v = vec![0.0; self.dim];
        for token in tokenize(text) {
            let h = fnv1a64(token.as_bytes());
            let sign = if h >> 63 == 0 { 1.0 } else { -1.0 };
            v[(h % self.dim as u64) as usize] += sign;
        }
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm > 0.0 {
            v.iter_mut().for_each(|x| *x /= norm);
        }
        v
    }
}

impl TextEncoder for HashingEncoder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn encode(&mut self, inputs: &[NldInput<'_>]) -> Result<Vec<Option<Vec<f64>>>, EncoderError> {
        Ok(inputs.iter().map(|i| Some(self.encode_text(i.text))).collect())
    }
}

fn parse_vector(text: &str, dim: usize) -> Result<Vec<f64>, EncoderError> {
    let v = text
        .split_whitespace()
        .map(|t| {
            t.parse::<f64>()
                .ok()
                .filter(|x| x.is_finite())
                .ok_or_else(|| EncoderError::Failure(format!("bad vector component '{t}'")))
        })
        .collect::<Result<Vec<f64>, _>>()?;
    if v.len() != dim {
        return Err(EncoderError::WrongWidth {
            expected: dim,
            got: v.len(),
        });
    }
    Ok(v)
}

/// Precomputed vectors keyed by node IRI.
#[derive(Debug, Clone)]
pub struct SidecarEncoder {
    dim: usize,
    vectors: HashMap<String, Vec<f64>>,
}

impl SidecarEncoder {
    pub fn load(path: &Path, dim: usize) -> Result<Self, EncoderError> {
        let file = std::fs::File::open(path)
            .map_err(|e| EncoderError::Failure(format!("cannot open sidecar {}: {e}", path.display())))?;
        let mut vectors = HashMap::new();
        for (n, line) in BufReader::new(file).lines().enumerate() {
            let line = line.map_err(|e| EncoderError::Failure(e.to_string()))?;
            if line.trim().is_empty() {
                continue;
            }
            let (iri, vec) = line
                .split_once('\t')
                .ok_or_else(|| EncoderError::Failure(format!("sidecar line {}: missing tab", n + 1)))?;
            vectors.insert(iri.to_string(), parse_vector(vec, dim)?);
        }
        Ok(SidecarEncoder { dim, vectors })
    }
}

impl TextEncoder for SidecarEncoder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn encode(&mut self, inputs: &[NldInput<'_>]) -> Result<Vec<Option<Vec<f64>>>, EncoderError> {
        Ok(inputs.iter().map(|i| self.vectors.get(i.iri).cloned()).collect())
    }
}

/// Runs an external program once per batch: one text per stdin line in,
/// one vector per stdout line out.
#[derive(Debug, Clone)]
pub struct CommandEncoder {
    dim: usize,
    program: PathBuf,
    args: Vec<String>,
}

impl CommandEncoder {
    pub fn new(command: &[String], dim: usize) -> Result<Self, EncoderError> {
        let (program, args) = command
            .split_first()
            .ok_or_else(|| EncoderError::Failure("empty encoder command".into()))?;
        Ok(CommandEncoder {
            dim,
            program: PathBuf::from(program),
            args: args.to_vec(),
        })
    }
}

impl TextEncoder for CommandEncoder {
    fn dim(&self) -> usize {
        self.dim
    }

    fn encode(&mut self, inputs: &[NldInput<'_>]) -> Result<Vec<Option<Vec<f64>>>, EncoderError> {
        let fail = |what: &str, e: std::io::Error| EncoderError::Failure(format!("{what} {}: {e}", self.program.display()));
        let mut child = Command::new(&self.program)
            .args(&self.args)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| fail("cannot start", e))?;
        let payload: String = inputs
            .iter()
            .map(|i| {
                let line: String = i.text.chars().map(|c| if c == '\n' || c == '\r' { ' ' } else { c }).collect();
                line + "\n"
            })
            .collect();
        let mut stdin = child.stdin.take().expect("piped stdin");
        let writer = std::thread::spawn(move || stdin.write_all(payload.as_bytes()));
        let output = child.wait_with_output().map_err(|e| fail("failed waiting for", e))?;
        writer
            .join()
            .map_err(|_| EncoderError::Failure("stdin writer panicked".into()))?
            .map_err(|e| fail("cannot write to", e))?;
        if !output.status.success() {
            return Err(EncoderError::Failure(format!(
                "{} exited with {}",
                self.program.display(),
                output.status
            )));
        }
        let text = String::from_utf8_lossy(&output.stdout);
        let lines: Vec<&str> = text.lines().collect();
        if lines.len() != inputs.len() {
            return Err(EncoderError::Failure(format!(
                "expected {} vectors, got {}",
                inputs.len(),
                lines.len()
            )));
        }
        lines.into_iter().map(|l| parse_vector(l, self.dim).map(Some)).collect()
    }
}

/// Encodes one optional text per node into an `n x dim` row-major block.
/// Missing or blank texts give zero rows. Returns the block and the number
/// of nodes the encoder had no vector for.
pub fn encode_nld(
    iris: &[String],
    texts: &[Option<String>],
    encoder: &mut dyn TextEncoder,
) -> Result<(Vec<f64>, usize), EncoderError> {
    assert_eq!(iris.len(), texts.len());
    let dim = encoder.dim();
    let present: Vec<usize> = (0..texts.len())
        .filter(|&i| texts[i].as_deref().is_some_and(|t| !t.trim().is_empty()))
        .collect();
    let inputs: Vec<NldInput<'_>> = present
        .iter()
        .map(|&i| NldInput {
            iri: &iris[i],
            text: texts[i].as_deref().unwrap_or(""),
        })
        .collect();
    let vectors = if inputs.is_empty() { Vec::new() } else { encoder.encode(&inputs)? };
    if vectors.len() != inputs.len() {
        return Err(EncoderError::Failure(format!(
            "expected {} vectors, got {}",
            inputs.len(),
            vectors.len()
        )));
    }
    let mut out = vec![0.0; texts.len() * dim];
    let mut missing = 0;
    for (&row, v) in present.iter().zip(vectors) {
        match v {
            Some(v) if v.len() == dim => out[row * dim..(row + 1) * dim].copy_from_slice(&v),
            Some(v) => {
                return Err(EncoderError::WrongWidth {
                    expected: dim,
                    got: v.len(),
                })
            }
            None => missing += 1,
        }
    }
    Ok((out, missing))
}
