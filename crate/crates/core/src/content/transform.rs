//! Column transformations: min-max scaling, label and one-hot encoding, and
//! mean imputation of missing values.

use std::collections::BTreeSet;

use super::infer::{parse_boolean, parse_number, parse_timestamp, parse_year, LiteralType};
use crate::matrix::{Block, BlockEncoding};

#[derive(Debug, Clone, Copy)]
pub struct TransformOptions {
    pub one_hot_max_cardinality: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TransformedColumn {
    pub property: String,
    pub literal_type: LiteralType,
    pub block: Block,
    pub warnings: Vec<String>,
}

impl TransformedColumn {
    /// Single-width numeric-like columns take part in correlation pruning;
    /// one-hot and text blocks do not.
    pub fn correlation_candidate(&self) -> bool {
        self.block.width == 1
            && matches!(
                self.block.encoding,
                BlockEncoding::MinMax | BlockEncoding::Boolean | BlockEncoding::Label { .. }
            )
    }
}

/// Scales observed values to [0, 1] and fills missing entries with the
/// mean of the scaled observed values. A constant column maps to 0.5; an
/// all-missing column to 0.
pub fn min_max_fill(values: &[Option<f64>]) -> (Vec<f64>, Option<&'static str>) {
    let observed = || values.iter().flatten().copied();
    let Some(min) = observed().reduce(f64::min) else {
        return (vec![0.0; values.len()], Some("all values missing; column set to 0"));
    };
    let max = observed().fold(min, f64::max);
    if min == max {
        return (vec![0.5; values.len()], Some("constant column; normalized to 0.5"));
    }
    let range = max - min;
    let scaled: Vec<Option<f64>> = values.iter().map(|v| v.map(|x| (x - min) / range)).collect();
    (mean_fill(&scaled), None)
}

/// Replaces missing entries with the mean of the observed ones (0 when
/// nothing is observed).
pub fn mean_fill(values: &[Option<f64>]) -> Vec<f64> {
    let (sum, n) = values.iter().flatten().fold((0.0, 0usize), |(s, n), v| (s + v, n + 1));
    let mean = if n == 0 { 0.0 } else { sum / n as f64 };
    values.iter().map(|v| v.unwrap_or(mean)).collect()
}

/// Encodes a categorical column: one-hot when the number of distinct values
/// is at most `max_one_hot`, otherwise a normalized lexicographic label
/// code. Rows without a value get the column mean.
pub fn encode_categorical(raw: &[Option<&str>], max_one_hot: usize) -> (usize, BlockEncoding, Vec<f64>) {
    let categories: Vec<&str> = raw.iter().flatten().copied().collect::<BTreeSet<_>>().into_iter().collect();
    let k = categories.len();
    let code = |v: &str| categories.binary_search(&v).expect("category present");
    if k <= max_one_hot {
        let observed = raw.iter().filter(|v| v.is_some()).count();
        let mut mean = vec![0.0; k];
        for v in raw.iter().flatten() {
            mean[code(v)] += 1.0;
        }
        if observed > 0 {
            mean.iter_mut().for_each(|m| *m /= observed as f64);
        }
        let mut values = Vec::with_capacity(raw.len() * k);
        for v in raw {
            match v {
                Some(v) => {
                    let c = code(v);
                    values.extend((0..k).map(|j| if j == c { 1.0 } else { 0.0 }));
                }
                None => values.extend_from_slice(&mean),
            }
        }
        let categories = categories.iter().map(|s| s.to_string()).collect();
        (k, BlockEncoding::OneHot { categories }, values)
    } else {
        let denom = (k - 1) as f64;
        let codes: Vec<Option<f64>> = raw.iter().map(|v| v.map(|v| code(v) as f64 / denom)).collect();
        (1, BlockEncoding::Label { categories: k }, mean_fill(&codes))
    }
}

/// Transforms one raw column (one optional lexical value per node) into a
/// numeric block. Returns `None` for NLD columns, which go through the text
/// encoder instead.
pub fn transform_column(
    property: &str,
    literal_type: LiteralType,
    raw: &[Option<&str>],
    opts: &TransformOptions,
) -> Option<TransformedColumn> {
    let mut warnings = Vec::new();
    let parse_with = |f: fn(&str) -> Option<f64>| raw.iter().map(|v| v.and_then(f)).collect::<Vec<_>>();
    let (width, encoding, values) = match literal_type {
        LiteralType::Nld => return None,
        LiteralType::Numeric | LiteralType::Year | LiteralType::Date => {
            let parsed = match literal_type {
                LiteralType::Numeric => parse_with(parse_number),
                LiteralType::Year => parse_with(parse_year),
                _ => parse_with(parse_timestamp),
            };
            let (values, warning) = min_max_fill(&parsed);
            if let Some(w) = warning {
                warnings.push(format!("{property}: {w}"));
            }
            (1, BlockEncoding::MinMax, values)
        }
        LiteralType::Boolean => (1, BlockEncoding::Boolean, mean_fill(&parse_with(parse_boolean))),
        LiteralType::Categorical => {
            let (width, encoding, values) = encode_categorical(raw, opts.one_hot_max_cardinality);
            if width == 0 {
                warnings.push(format!("{property}: all values missing; column has width 0"));
            }
            (width, encoding, values)
        }
    };
    Some(TransformedColumn {
        property: property.to_string(),
        literal_type,
        block: Block {
            name: property.to_string(),
            encoding,
            sources: Vec::new(),
            width,
            values,
        },
        warnings,
    })
}
