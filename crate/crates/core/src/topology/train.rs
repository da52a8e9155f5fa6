//! Minibatch SGD with uniform negative sampling.
//!
//! Each batch is evaluated at the parameters from the start of the batch.
//! Gradients are accumulated over fixed chunks of examples that may run on
//! several threads; chunk results are merged in chunk order, so the
//! outcome does not depend on the number of threads.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::model::{score, score_grad, EmbeddingModel};
use super::triples::KgTriple;
use super::TopologyError;
use crate::config::EmbeddingModelKind;

const TRAIN_STREAM: u64 = 1;
const CHUNK: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrainConfig {
    pub epochs: usize,
    pub learning_rate: f64,
    pub margin: f64,
    pub batch_size: usize,
    pub negatives: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Loss {
    /// `sum max(0, margin - s(pos) + s(neg))`
    MarginRanking,
    /// `softplus(-s(pos)) + sum softplus(s(neg))`
    Logistic,
}

pub fn loss_for(kind: EmbeddingModelKind) -> Loss {
    match kind {
        EmbeddingModelKind::TransE | EmbeddingModelKind::RotatE => Loss::MarginRanking,
        EmbeddingModelKind::DistMult | EmbeddingModelKind::ComplEx => Loss::Logistic,
    }
}

fn softplus(x: f64) -> f64 {
    if x > 0.0 {
        x + (-x).exp().ln_1p()
    } else {
        x.exp().ln_1p()
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

/// Sparse gradient keyed by entity and relation row.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct SparseGrad {
    pub entities: BTreeMap<u32, Vec<f64>>,
    pub relations: BTreeMap<u32, Vec<f64>>,
}

impl SparseGrad {
    fn merge(&mut self, other: SparseGrad) {
        for (dst, src) in [(&mut self.entities, other.entities), (&mut self.relations, other.relations)] {
            for (k, v) in src {
                match dst.get_mut(&k) {
                    Some(acc) => acc.iter_mut().zip(&v).for_each(|(a, b)| *a += b),
                    None => {
                        dst.insert(k, v);
                    }
                }
            }
        }
    }
}

fn accumulate_score(model: &EmbeddingModel, [h, r, t]: KgTriple, scale: f64, grad: &mut SparseGrad) {
    let dim = model.dim();
    let width = model.relation_width();
    let mut gh = vec![0.0; dim];
    let mut gr = vec![0.0; width];
    let mut gt = vec![0.0; dim];
    score_grad(model.kind(), model.entity(h), model.relation(r), model.entity(t), scale, &mut gh, &mut gr, &mut gt);
    for (row, g) in [(h, gh), (t, gt)] {
        let acc = grad.entities.entry(row).or_insert_with(|| vec![0.0; dim]);
        acc.iter_mut().zip(&g).for_each(|(a, b)| *a += b);
    }
    let acc = grad.relations.entry(r).or_insert_with(|| vec![0.0; width]);
    acc.iter_mut().zip(&gr).for_each(|(a, b)| *a += b);
}

/// Loss of one positive against its negatives; adds the loss gradient
/// into `grad`.
pub fn example_loss_grad(
    model: &EmbeddingModel,
    pos: KgTriple,
    negs: &[KgTriple],
    margin: f64,
    grad: &mut SparseGrad,
) -> f64 {
    let kind = model.kind();
    let s = |[h, r, t]: KgTriple| score(kind, model.entity(h), model.relation(r), model.entity(t));
    let sp = s(pos);
    match loss_for(kind) {
        Loss::MarginRanking => {
            let mut loss = 0.0;
            for &neg in negs {
                let term = margin - sp + s(neg);
                if term > 0.0 {
                    loss += term;
                    accumulate_score(model, pos, -1.0, grad);
                    accumulate_score(model, neg, 1.0, grad);
                }
            }
            loss
        }
        Loss::Logistic => {
            let mut loss = softplus(-sp);
            accumulate_score(model, pos, -sigmoid(-sp), grad);
            for &neg in negs {
                let sn = s(neg);
                loss += softplus(sn);
                accumulate_score(model, neg, sigmoid(sn), grad);
            }
            loss
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrainReport {
    /// Mean loss per positive example, one entry per epoch.
    pub epoch_losses: Vec<f64>,
}

fn corrupt(rng: &mut ChaCha8Rng, [h, r, t]: KgTriple, entity_count: u32) -> KgTriple {
    let e = rng.gen_range(0..entity_count);
    if rng.gen_bool(0.5) {
        [e, r, t]
    } else {
        [h, r, e]
    }
}

fn renormalize(row: &mut [f64]) {
    let norm = row.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm > 1.0 {
        row.iter_mut().for_each(|v| *v /= norm);
    }
}

fn wrap_phase(theta: f64) -> f64 {
    use std::f64::consts::PI;
    (theta + PI).rem_euclid(2.0 * PI) - PI
}

pub fn train(model: &mut EmbeddingModel, triples: &[KgTriple], cfg: &TrainConfig) -> Result<TrainReport, TopologyError> {
    if triples.is_empty() {
        return Err(TopologyError::EmptyTrainSplit);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    rng.set_stream(TRAIN_STREAM);
    let entity_count = model.entity_count() as u32;
    let batch_size = cfg.batch_size.max(1);
    let mut order: Vec<usize> = (0..triples.len()).collect();
    let mut report = TrainReport::default();
    for epoch in 0..cfg.epochs {
        order.shuffle(&mut rng);
        let mut epoch_loss = 0.0;
        for (batch_no, batch) in order.chunks(batch_size).enumerate() {
            let examples: Vec<(KgTriple, Vec<KgTriple>)> = batch
                .iter()
                .map(|&i| {
                    let pos = triples[i];
                    let negs = (0..cfg.negatives).map(|_| corrupt(&mut rng, pos, entity_count)).collect();
                    (pos, negs)
                })
                .collect();
            let snapshot: &EmbeddingModel = model;
            let parts: Vec<(f64, SparseGrad)> = examples
                .par_chunks(CHUNK)
                .map(|chunk| {
                    let mut grad = SparseGrad::default();
                    let loss = chunk
                        .iter()
                        .map(|(pos, negs)| example_loss_grad(snapshot, *pos, negs, cfg.margin, &mut grad))
                        .sum::<f64>();
                    (loss, grad)
                })
                .collect();
            let mut grad = SparseGrad::default();
            for (loss, g) in parts {
                epoch_loss += loss;
                grad.merge(g);
            }
            if !epoch_loss.is_finite() {
                return Err(TopologyError::Divergence {
                    epoch,
                    batch: batch_no,
                    detail: format!("loss is {epoch_loss}"),
                });
            }
            apply(model, grad, cfg.learning_rate);
            if !model.is_finite() {
                return Err(TopologyError::Divergence {
                    epoch,
                    batch: batch_no,
                    detail: "non-finite parameter after update".into(),
                });
            }
        }
        report.epoch_losses.push(epoch_loss / triples.len() as f64);
    }
    Ok(report)
}

fn apply(model: &mut EmbeddingModel, grad: SparseGrad, lr: f64) {
    let kind = model.kind();
    for (e, g) in grad.entities {
        let row = model.entity_mut(e);
        row.iter_mut().zip(&g).for_each(|(p, d)| *p -= lr * d);
        if kind == EmbeddingModelKind::TransE {
            renormalize(row);
        }
    }
    for (r, g) in grad.relations {
        let row = model.relation_mut(r);
        row.iter_mut().zip(&g).for_each(|(p, d)| *p -= lr * d);
        if kind == EmbeddingModelKind::RotatE {
            row.iter_mut().for_each(|p| *p = wrap_phase(*p));
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(epochs: usize) -> TrainConfig {
        TrainConfig {
            epochs,
            learning_rate: 0.01,
            margin: 1.0,
            batch_size: 8,
            negatives: 2,
            seed: 5,
        }
    }

    fn chain() -> Vec<KgTriple> {
        (0..20).map(|i| [i, 0, i + 1]).collect()
    }

    #[test]
    fn zero_epochs_keeps_init() {
        let init = EmbeddingModel::init(EmbeddingModelKind::DistMult, 8, 21, 1, 5);
        let mut m = init.clone();
        let r = train(&mut m, &chain(), &cfg(0)).unwrap();
        assert!(r.epoch_losses.is_empty());
        assert_eq!(m, init);
    }

    #[test]
    fn thread_count_does_not_matter() {
        let run = |threads| {
            let pool = rayon::ThreadPoolBuilder::new().num_threads(threads).build().unwrap();
            pool.install(|| {
                let mut m = EmbeddingModel::init(EmbeddingModelKind::ComplEx, 8, 21, 1, 5);
                let c = TrainConfig { batch_size: 512, ..cfg(3) };
                let many: Vec<KgTriple> = (0..200).map(|i| [i % 21, 0, (i * 7) % 21]).collect();
                train(&mut m, &many, &c).unwrap();
                m
            })
        };
        assert_eq!(run(1), run(4));
    }

    #[test]
    fn transe_rows_stay_in_unit_ball() {
        let mut m = EmbeddingModel::init(EmbeddingModelKind::TransE, 8, 21, 1, 5);
        train(&mut m, &chain(), &cfg(5)).unwrap();
        for e in 0..21 {
            let n: f64 = m.entity(e).iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!(n <= 1.0 + 1e-9);
        }
    }

    #[test]
    fn loss_decreases() {
        for kind in [
            EmbeddingModelKind::TransE,
            EmbeddingModelKind::DistMult,
            EmbeddingModelKind::ComplEx,
            EmbeddingModelKind::RotatE,
        ] {
            let mut m = EmbeddingModel::init(kind, 8, 21, 1, 5);
            let r = train(&mut m, &chain(), &TrainConfig { learning_rate: 0.05, ..cfg(60) }).unwrap();
            let first: f64 = r.epoch_losses[..10].iter().sum();
            let last: f64 = r.epoch_losses[50..].iter().sum();
            assert!(last < first, "{kind:?}: {first} -> {last}");
        }
    }
}
