//! Raw link-prediction ranking.

use rayon::prelude::*;
use serde::Serialize;

use super::model::EmbeddingModel;
use super::triples::KgTriple;

#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize)]
pub struct LinkMetrics {
    pub mrr: f64,
    pub hits_at_1: f64,
    pub hits_at_10: f64,
    /// Number of rankings (two per test triple).
    pub rankings: usize,
}

/// Rank of `truth` among all candidates: one plus the candidates scoring
/// strictly higher plus the tied candidates with a smaller id.
pub fn rank_of(scores: &[f64], truth: usize) -> usize {
    let s = scores[truth];
    1 + scores
        .iter()
        .enumerate()
        .filter(|&(i, &x)| x > s || (x == s && i < truth))
        .count()
}

/// Ranks the true tail against every entity as tail and the true head
/// against every entity as head; metrics average both directions.
pub fn evaluate(model: &EmbeddingModel, test: &[KgTriple]) -> LinkMetrics {
    let n = model.entity_count() as u32;
    let ranks: Vec<[usize; 2]> = test
        .par_iter()
        .map(|&[h, r, t]| {
            let tails: Vec<f64> = (0..n).map(|e| model.score(h, r, e)).collect();
            let heads: Vec<f64> = (0..n).map(|e| model.score(e, r, t)).collect();
            [rank_of(&tails, t as usize), rank_of(&heads, h as usize)]
        })
        .collect();
    let all: Vec<usize> = ranks.into_iter().flatten().collect();
    if all.is_empty() {
        return LinkMetrics::default();
    }
    let k = all.len() as f64;
    LinkMetrics {
        mrr: all.iter().map(|&r| 1.0 / r as f64).sum::<f64>() / k,
        hits_at_1: all.iter().filter(|&&r| r <= 1).count() as f64 / k,
        hits_at_10: all.iter().filter(|&&r| r <= 10).count() as f64 / k,
        rankings: all.len(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::EmbeddingModelKind;

    #[test]
    fn ties_break_by_id() {
        assert_eq!(rank_of(&[0.5, 0.5, 0.5], 0), 1);
        assert_eq!(rank_of(&[0.5, 0.5, 0.5], 2), 3);
        assert_eq!(rank_of(&[0.1, 0.9, 0.5], 2), 2);
    }

    #[test]
    fn perfect_single_triple() {
        // e0 + r = e1 exactly; every other candidate is farther away
        let m = EmbeddingModel::from_parts(
            EmbeddingModelKind::TransE,
            1,
            vec![0.0, 1.0, 5.0],
            vec![1.0],
        );
        let metrics = evaluate(&m, &[[0, 0, 1]]);
        assert_eq!(metrics.mrr, 1.0);
        assert_eq!(metrics.hits_at_1, 1.0);
        assert_eq!(metrics.rankings, 2);
    }
}
