use serde::Serialize;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("shape mismatch: {0}")]
pub struct ShapeMismatch(pub String);

/// How a block of columns was produced.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockEncoding {
    /// Text encoder output.
    Text,
    /// Min-max normalized scalar (numeric, year, date timestamp).
    MinMax,
    /// 0/1 label.
    Boolean,
    /// One column per category, in lexicographic category order.
    OneHot { categories: Vec<String> },
    /// Lexicographic category code, min-max normalized.
    Label { categories: usize },
    /// Knowledge-graph embedding.
    Embedding,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ColumnBlock {
    /// Property IRI, or a synthetic name for blocks with several sources.
    pub name: String,
    pub offset: usize,
    pub width: usize,
    pub encoding: BlockEncoding,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub sources: Vec<String>,
}

/// Dense row-major `rows x cols` matrix of finite values with a column
/// block layout.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
    blocks: Vec<ColumnBlock>,
}

/// One block before assembly: `rows x width` row-major values.
#[derive(Debug, Clone, PartialEq)]
pub struct Block {
    pub name: String,
    pub encoding: BlockEncoding,
    pub sources: Vec<String>,
    pub width: usize,
    pub values: Vec<f64>,
}

impl FeatureMatrix {
    pub fn empty(rows: usize) -> Self {
        FeatureMatrix {
            rows,
            cols: 0,
            data: Vec::new(),
            blocks: Vec::new(),
        }
    }

    pub fn from_rows(rows: usize, cols: usize, data: Vec<f64>, encoding: BlockEncoding, name: &str) -> Result<Self, ShapeMismatch> {
        Self::hstack(
            rows,
            vec![Block {
                name: name.to_string(),
                encoding,
                sources: Vec::new(),
                width: cols,
                values: data,
            }],
        )
    }

    /// Concatenates blocks horizontally in the given order.
    pub fn hstack(rows: usize, blocks: Vec<Block>) -> Result<Self, ShapeMismatch> {
        for b in &blocks {
            if b.values.len() != rows * b.width {
                return Err(ShapeMismatch(format!(
                    "block '{}' has {} values, expected {} x {}",
                    b.name,
                    b.values.len(),
                    rows,
                    b.width
                )));
            }
            if let Some(v) = b.values.iter().find(|v| !v.is_finite()) {
                return Err(ShapeMismatch(format!("block '{}' contains non-finite value {v}", b.name)));
            }
        }
        let cols: usize = blocks.iter().map(|b| b.width).sum();
        let mut data = Vec::with_capacity(rows * cols);
        for r in 0..rows {
            for b in &blocks {
                data.extend_from_slice(&b.values[r * b.width..(r + 1) * b.width]);
            }
        }
        let mut offset = 0;
        let layout = blocks
            .into_iter()
            .filter(|b| b.width > 0)
            .map(|b| {
                let block = ColumnBlock {
                    name: b.name,
                    offset,
                    width: b.width,
                    encoding: b.encoding,
                    sources: b.sources,
                };
                offset += b.width;
                block
            })
            .collect();
        Ok(FeatureMatrix {
            rows,
            cols,
            data,
            blocks: layout,
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, r: usize) -> &[f64] {
        &self.data[r * self.cols..(r + 1) * self.cols]
    }

    pub fn get(&self, r: usize, c: usize) -> f64 {
        self.data[r * self.cols + c]
    }

    pub fn column(&self, c: usize) -> Vec<f64> {
        (0..self.rows).map(|r| self.get(r, c)).collect()
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn blocks(&self) -> &[ColumnBlock] {
        &self.blocks
    }

    pub fn block(&self, name: &str) -> Option<&ColumnBlock> {
        self.blocks.iter().find(|b| b.name == name)
    }
}
