//! Automatic feature selection.

use serde::Serialize;

use super::infer::LiteralType;
use super::profile::PropertyProfile;
use super::stats::{pearson, PearsonError};
use super::transform::TransformedColumn;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DropReason {
    Sparse,
    Identical,
    UniqueNominal,
    Correlated,
}

#[derive(Debug, Clone, Copy)]
pub struct SelectionThresholds {
    pub sparsity: f64,
    pub identical: f64,
    pub unique: f64,
}

/// Threshold rules, checked in order: sparse, identical, unique nominal.
pub fn drop_reason(profile: &PropertyProfile, t: &SelectionThresholds) -> Option<DropReason> {
    if profile.fill_degree < t.sparsity {
        Some(DropReason::Sparse)
    } else if profile.top_value_ratio >= t.identical {
        Some(DropReason::Identical)
    } else if profile.inferred_type == LiteralType::Categorical && profile.distinct_ratio >= t.unique {
        Some(DropReason::UniqueNominal)
    } else {
        None
    }
}

/// Marks dropped profiles in place and returns the indices of the selected
/// ones, in input order.
pub fn select_properties(profiles: &mut [PropertyProfile], t: &SelectionThresholds) -> Vec<usize> {
    let mut selected = Vec::new();
    for (i, p) in profiles.iter_mut().enumerate() {
        p.dropped = drop_reason(p, t);
        if p.dropped.is_none() {
            selected.push(i);
        }
    }
    selected
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationDrop {
    pub dropped: String,
    pub kept: String,
    pub r: f64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct PruneOutcome {
    pub drops: Vec<CorrelationDrop>,
    pub warnings: Vec<String>,
}

/// Pairwise Pearson pruning over the single-width numeric-like columns.
///
/// Pairs are visited in lexicographic property order (`i < j`); when
/// `|r| >= threshold` and neither column is already dropped, the later
/// property goes. Constant columns count as uncorrelated.
pub fn prune_correlated(columns: &[TransformedColumn], threshold: f64) -> PruneOutcome {
    let mut candidates: Vec<&TransformedColumn> = columns.iter().filter(|c| c.correlation_candidate()).collect();
    candidates.sort_by(|a, b| a.property.cmp(&b.property));
    let mut out = PruneOutcome::default();
    let mut dropped = vec![false; candidates.len()];
    let mut constant = vec![false; candidates.len()];
    for i in 0..candidates.len() {
        for j in i + 1..candidates.len() {
            if dropped[i] || dropped[j] {
                continue;
            }
            let r = match pearson(&candidates[i].block.values, &candidates[j].block.values) {
                Ok(r) => r,
                Err(PearsonError::ConstantInput) => {
                    for k in [i, j] {
                        let values = &candidates[k].block.values;
                        if !constant[k] && values.iter().all(|v| *v == values[0]) {
                            constant[k] = true;
                            out.warnings.push(format!(
                                "{}: constant column treated as uncorrelated",
                                candidates[k].property
                            ));
                        }
                    }
                    0.0
                }
                Err(_) => 0.0,
            };
            if r.abs() >= threshold {
                dropped[j] = true;
                out.drops.push(CorrelationDrop {
                    dropped: candidates[j].property.clone(),
                    kept: candidates[i].property.clone(),
                    r,
                });
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::content::transform::{transform_column, TransformOptions};

    fn profile(fill: f64, distinct: f64, top: f64, ty: LiteralType) -> PropertyProfile {
        PropertyProfile {
            property: "p".into(),
            fill_degree: fill,
            distinct_ratio: distinct,
            top_value_ratio: top,
            inferred_type: ty,
            dropped: None,
        }
    }

    const T: SelectionThresholds = SelectionThresholds {
        sparsity: 0.5,
        identical: 0.99,
        unique: 0.95,
    };

    #[test]
    fn threshold_rules() {
        assert_eq!(drop_reason(&profile(0.25, 1.0, 1.0, LiteralType::Numeric), &T), Some(DropReason::Sparse));
        assert_eq!(drop_reason(&profile(1.0, 0.25, 1.0, LiteralType::Numeric), &T), Some(DropReason::Identical));
        assert_eq!(
            drop_reason(&profile(1.0, 1.0, 0.25, LiteralType::Categorical), &T),
            Some(DropReason::UniqueNominal)
        );
        assert_eq!(drop_reason(&profile(1.0, 1.0, 0.25, LiteralType::Nld), &T), None);
        assert_eq!(drop_reason(&profile(1.0, 1.0, 0.25, LiteralType::Numeric), &T), None);
    }

    fn numeric(name: &str, values: &[&str]) -> TransformedColumn {
        let raw: Vec<Option<&str>> = values.iter().map(|v| Some(*v)).collect();
        transform_column(
            name,
            LiteralType::Numeric,
            &raw,
            &TransformOptions {
                one_hot_max_cardinality: 10,
            },
        )
        .unwrap()
    }

    #[test]
    fn later_iri_is_dropped() {
        let cols = [numeric("b", &["1", "2", "3"]), numeric("a", &["2", "4", "6"])];
        let out = prune_correlated(&cols, 0.95);
        assert_eq!(out.drops.len(), 1);
        assert_eq!((out.drops[0].kept.as_str(), out.drops[0].dropped.as_str()), ("a", "b"));
        let cols = [numeric("a", &["1", "2", "3"]), numeric("b", &["1", "3", "2"])];
        assert!(prune_correlated(&cols, 0.95).drops.is_empty());
    }

    #[test]
    fn mutual_correlation_keeps_first() {
        let cols = [
            numeric("c", &["3", "2", "1"]),
            numeric("a", &["1", "2", "3"]),
            numeric("b", &["10", "20", "30"]),
        ];
        let out = prune_correlated(&cols, 0.95);
        let dropped: Vec<&str> = out.drops.iter().map(|d| d.dropped.as_str()).collect();
        assert_eq!(dropped, ["b", "c"]);
    }

    #[test]
    fn constant_column_warns() {
        let cols = [numeric("a", &["1", "1", "1"]), numeric("b", &["1", "2", "3"])];
        let out = prune_correlated(&cols, 0.95);
        assert!(out.drops.is_empty());
        assert_eq!(out.warnings.len(), 1);
    }
}
