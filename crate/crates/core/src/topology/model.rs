//! Scoring functions, their gradients and the embedding parameter store.
//!
//! Complex-valued models (ComplEx, RotatE) store entity vectors interleaved
//! as `(re, im)` pairs, so `dim` real numbers hold `dim / 2` complex entries.
//! RotatE relations are `dim / 2` phases `theta` with `r = exp(i theta)`.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::EmbeddingModelKind;

const INIT_STREAM: u64 = 0;

#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel {
    kind: EmbeddingModelKind,
    dim: usize,
    entity_count: usize,
    relation_count: usize,
    entities: Vec<f64>,
    relations: Vec<f64>,
}

pub fn relation_width(kind: EmbeddingModelKind, dim: usize) -> usize {
    match kind {
        EmbeddingModelKind::RotatE => dim / 2,
        _ => dim,
    }
}

impl EmbeddingModel {
    /// Seeded initialization: uniform in `±6/sqrt(dim)`; RotatE phases
    /// uniform in `[-pi, pi]`.
    pub fn init(kind: EmbeddingModelKind, dim: usize, entity_count: usize, relation_count: usize, seed: u64) -> Self {
        assert!(dim > 0);
        assert!(!kind.is_complex() || dim.is_multiple_of(2), "complex models need an even dimension");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(INIT_STREAM);
        let bound = 6.0 / (dim as f64).sqrt();
        let entities = (0..entity_count * dim).map(|_| rng.gen_range(-bound..=bound)).collect();
        let width = relation_width(kind, dim);
        let relations = (0..relation_count * width)
            .map(|_| match kind {
                EmbeddingModelKind::RotatE => rng.gen_range(-std::f64::consts::PI..=std::f64::consts::PI),
                _ => rng.gen_range(-bound..=bound),
            })
            .collect();
        EmbeddingModel {
            kind,
            dim,
            entity_count,
            relation_count,
            entities,
            relations,
        }
    }

    pub fn from_parts(kind: EmbeddingModelKind, dim: usize, entities: Vec<f64>, relations: Vec<f64>) -> Self {
        let width = relation_width(kind, dim);
        assert_eq!(entities.len() % dim, 0);
        assert_eq!(relations.len() % width, 0);
        EmbeddingModel {
            kind,
            dim,
            entity_count: entities.len() / dim,
            relation_count: relations.len() / width,
            entities,
            relations,
        }
    }

    pub fn kind(&self) -> EmbeddingModelKind {
        self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn relation_width(&self) -> usize {
        relation_width(self.kind, self.dim)
    }

    pub fn entity_count(&self) -> usize {
        self.entity_count
    }

    pub fn relation_count(&self) -> usize {
        self.relation_count
    }

    pub fn entity(&self, e: u32) -> &[f64] {
        let e = e as usize;
        &self.entities[e * self.dim..(e + 1) * self.dim]
    }

    pub fn relation(&self, r: u32) -> &[f64] {
        let w = self.relation_width();
        let r = r as usize;
        &self.relations[r * w..(r + 1) * w]
    }

    pub fn entity_mut(&mut self, e: u32) -> &mut [f64] {
        let e = e as usize;
        &mut self.entities[e * self.dim..(e + 1) * self.dim]
    }

    pub fn relation_mut(&mut self, r: u32) -> &mut [f64] {
        let w = self.relation_width();
        let r = r as usize;
        &mut self.relations[r * w..(r + 1) * w]
    }

    pub fn entities(&self) -> &[f64] {
        &self.entities
    }

    pub fn relations(&self) -> &[f64] {
        &self.relations
    }

    pub fn score(&self, h: u32, r: u32, t: u32) -> f64 {
        score(self.kind, self.entity(h), self.relation(r), self.entity(t))
    }

    pub fn is_finite(&self) -> bool {
        self.entities.iter().chain(&self.relations).all(|v| v.is_finite())
    }
}

/// Plausibility score; higher is better.
pub fn score(kind: EmbeddingModelKind, h: &[f64], r: &[f64], t: &[f64]) -> f64 {
    match kind {
        EmbeddingModelKind::TransE => -h
            .iter()
            .zip(r)
            .zip(t)
            .map(|((h, r), t)| (h + r - t).powi(2))
            .sum::<f64>()
            .sqrt(),
        EmbeddingModelKind::DistMult => h.iter().zip(r).zip(t).map(|((h, r), t)| h * r * t).sum(),
        EmbeddingModelKind::ComplEx => {
            let mut s = 0.0;
            for k in 0..h.len() / 2 {
                let (a, b) = (h[2 * k], h[2 * k + 1]);
                let (c, d) = (r[2 * k], r[2 * k + 1]);
                let (e, f) = (t[2 * k], t[2 * k + 1]);
                s += (a * c - b * d) * e + (a * d + b * c) * f;
            }
            s
        }
        EmbeddingModelKind::RotatE => {
            let mut sq = 0.0;
            for (k, theta) in r.iter().enumerate() {
                let (cos, sin) = (theta.cos(), theta.sin());
                let (a, b) = (h[2 * k], h[2 * k + 1]);
                let x = a * cos - b * sin - t[2 * k];
                let y = a * sin + b * cos - t[2 * k + 1];
                sq += x * x + y * y;
            }
            -sq.sqrt()
        }
    }
}

/// Adds `scale * d score / d param` into `gh`, `gr`, `gt`.
#[allow(clippy::too_many_arguments)]
pub fn score_grad(
    kind: EmbeddingModelKind,
    h: &[f64],
    r: &[f64],
    t: &[f64],
    scale: f64,
    gh: &mut [f64],
    gr: &mut [f64],
    gt: &mut [f64],
) {
    match kind {
        EmbeddingModelKind::TransE => {
            let norm = -score(kind, h, r, t);
            if norm == 0.0 {
                return;
            }
            for k in 0..h.len() {
                let g = -(h[k] + r[k] - t[k]) / norm * scale;
                gh[k] += g;
                gr[k] += g;
                gt[k] -= g;
            }
        }
        EmbeddingModelKind::DistMult => {
            for k in 0..h.len() {
                gh[k] += scale * r[k] * t[k];
                gr[k] += scale * h[k] * t[k];
                gt[k] += scale * h[k] * r[k];
            }
        }
        EmbeddingModelKind::ComplEx => {
            for k in 0..h.len() / 2 {
                let (i, j) = (2 * k, 2 * k + 1);
                let (a, b, c, d, e, f) = (h[i], h[j], r[i], r[j], t[i], t[j]);
                gh[i] += scale * (c * e + d * f);
                gh[j] += scale * (c * f - d * e);
                gr[i] += scale * (a * e + b * f);
                gr[j] += scale * (a * f - b * e);
                gt[i] += scale * (a * c - b * d);
                gt[j] += scale * (a * d + b * c);
            }
        }
        EmbeddingModelKind::RotatE => {
            let norm = -score(kind, h, r, t);
            if norm == 0.0 {
                return;
            }
            for (k, theta) in r.iter().enumerate() {
                let (i, j) = (2 * k, 2 * k + 1);
                let (cos, sin) = (theta.cos(), theta.sin());
                let (a, b) = (h[i], h[j]);
                let x = a * cos - b * sin - t[i];
                let y = a * sin + b * cos - t[j];
                let gx = -x / norm * scale;
                let gy = -y / norm * scale;
                gh[i] += gx * cos + gy * sin;
                gh[j] += -gx * sin + gy * cos;
                gr[k] += gx * (-a * sin - b * cos) + gy * (a * cos - b * sin);
                gt[i] -= gx;
                gt[j] -= gy;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_scores() {
        use EmbeddingModelKind::*;
        assert_eq!(score(TransE, &[0.0, 0.0], &[1.0, 0.0], &[1.0, 0.0]), 0.0);
        assert_eq!(score(TransE, &[0.0, 0.0], &[1.0, 0.0], &[0.0, 1.0]), -(2f64.sqrt()));
        assert_eq!(score(DistMult, &[0.0; 3], &[0.0; 3], &[0.0; 3]), 0.0);
        assert_eq!(score(DistMult, &[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]), 63.0);
        // (1 + 2i)(3 + 4i) conj(5 + 6i) = (-5 + 10i)(5 - 6i) = 35 + 80i
        assert_eq!(score(ComplEx, &[1.0, 2.0], &[3.0, 4.0], &[5.0, 6.0]), 35.0);
        // rotating (1, 0) by pi/2 lands on (0, 1)
        let s = score(RotatE, &[1.0, 0.0], &[std::f64::consts::FRAC_PI_2], &[0.0, 1.0]);
        assert!(s.abs() < 1e-15);
    }

    #[test]
    fn init_is_seeded_and_bounded() {
        let a = EmbeddingModel::init(EmbeddingModelKind::TransE, 16, 10, 2, 3);
        assert_eq!(a, EmbeddingModel::init(EmbeddingModelKind::TransE, 16, 10, 2, 3));
        assert_ne!(a, EmbeddingModel::init(EmbeddingModelKind::TransE, 16, 10, 2, 4));
        assert!(a.entities().iter().all(|v| v.abs() <= 6.0 / 4.0));
        let r = EmbeddingModel::init(EmbeddingModelKind::RotatE, 8, 3, 2, 3);
        assert_eq!(r.relations().len(), 8);
    }
}
