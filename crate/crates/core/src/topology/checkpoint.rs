//! Binary embedding checkpoint.
//!
//! Layout (little-endian): magic `R2GEMB01`, model code `u8` plus 3 zero
//! bytes, `dim: u32`, `entity_count: u64`, `relation_count: u64`,
//! `relation_width: u32`, `seed: u64`, then entity rows and relation rows
//! as `f32`.

use std::io::{self, Read, Write};

use crate::config::EmbeddingModelKind;

use super::model::EmbeddingModel;

pub const MAGIC: &[u8; 8] = b"R2GEMB01";

pub fn model_code(kind: EmbeddingModelKind) -> u8 {
    match kind {
        EmbeddingModelKind::TransE => 0,
        EmbeddingModelKind::DistMult => 1,
        EmbeddingModelKind::ComplEx => 2,
        EmbeddingModelKind::RotatE => 3,
    }
}

fn kind_of(code: u8) -> Option<EmbeddingModelKind> {
    Some(match code {
        0 => EmbeddingModelKind::TransE,
        1 => EmbeddingModelKind::DistMult,
        2 => EmbeddingModelKind::ComplEx,
        3 => EmbeddingModelKind::RotatE,
        _ => return None,
    })
}

pub fn write_checkpoint<W: Write>(mut w: W, model: &EmbeddingModel, seed: u64) -> io::Result<()> {
    w.write_all(MAGIC)?;
    w.write_all(&[model_code(model.kind()), 0, 0, 0])?;
    w.write_all(&(model.dim() as u32).to_le_bytes())?;
    w.write_all(&(model.entity_count() as u64).to_le_bytes())?;
    w.write_all(&(model.relation_count() as u64).to_le_bytes())?;
    w.write_all(&(model.relation_width() as u32).to_le_bytes())?;
    w.write_all(&seed.to_le_bytes())?;
    for v in model.entities().iter().chain(model.relations()) {
        w.write_all(&(*v as f32).to_le_bytes())?;
    }
    Ok(())
}

fn invalid(msg: &str) -> io::Error {
    io::Error::new(io::ErrorKind::InvalidData, msg.to_string())
}

/// Reads a checkpoint back; values are the stored `f32`s widened to `f64`.
pub fn read_checkpoint<R: Read>(mut r: R) -> io::Result<(EmbeddingModel, u64)> {
    let mut head = [0u8; 44];
    r.read_exact(&mut head)?;
    if &head[..8] != MAGIC {
        return Err(invalid("not an embedding checkpoint"));
    }
    let kind = kind_of(head[8]).ok_or_else(|| invalid("unknown model code"))?;
    let u32_at = |o: usize| u32::from_le_bytes(head[o..o + 4].try_into().expect("4 bytes")) as usize;
    let u64_at = |o: usize| u64::from_le_bytes(head[o..o + 8].try_into().expect("8 bytes"));
    let dim = u32_at(12);
    let entities = u64_at(16) as usize;
    let relations = u64_at(24) as usize;
    let width = u32_at(32);
    let seed = u64_at(36);
    if dim == 0 || width != super::model::relation_width(kind, dim) {
        return Err(invalid("inconsistent dimensions"));
    }
    let mut read = |n: usize| -> io::Result<Vec<f64>> {
        let mut buf = vec![0u8; n * 4];
        r.read_exact(&mut buf)?;
        Ok(buf
            .chunks_exact(4)
            .map(|b| f64::from(f32::from_le_bytes(b.try_into().expect("4 bytes"))))
            .collect())
    };
    let e = read(entities * dim)?;
    let rel = read(relations * width)?;
    Ok((EmbeddingModel::from_parts(kind, dim, e, rel), seed))
}
