//! The JSON matrix format:
//!
//! ```json
//! { "partition": [1, 1],
//!   "blocks": { "1,1": [[[-1, 0]]], "2,1": [[[1, 0]]], "2,2": [[[1, 0]]] } }
//! ```
//!
//! Block keys are 1-based `"i,j"` with `i ≥ j`; entries are row-major
//! `[re, im]` pairs. Absent blocks are zero.

use std::collections::BTreeMap;

use greenblocks_core::{BlockLowerTriangular, BlockPartition, CMatrix, C64};
use serde::{Deserialize, Serialize};

use crate::error::FormatError;

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MatrixFile {
    pub partition: Vec<usize>,
    #[serde(default)]
    pub blocks: BTreeMap<String, Vec<Vec<[f64; 2]>>>,
}

/// Line of the first occurrence of `needle` in `text`, or 1.
fn line_of(text: &str, needle: &str) -> usize {
    text.find(needle).map_or(1, |at| text[..at].matches('\n').count() + 1)
}

fn parse_key(key: &str) -> Option<(usize, usize)> {
    let (i, j) = key.split_once(',')?;
    Some((i.trim().parse().ok()?, j.trim().parse().ok()?))
}

pub fn parse_matrix(text: &str) -> Result<BlockLowerTriangular, FormatError> {
    let raw: MatrixFile = serde_json::from_str(text).map_err(|e| FormatError::Syntax {
        line: e.line(),
        column: e.column(),
        message: e.to_string().split(" at line").next().unwrap_or_default().to_string(),
    })?;
    let field_err = |field: String, needle: &str, message: String| FormatError::Field {
        line: line_of(text, needle),
        field,
        message,
    };
    let partition = BlockPartition::new(raw.partition.clone())
        .map_err(|e| field_err("partition".into(), "\"partition\"", e.to_string()))?;
    let k = partition.len();
    let mut a = BlockLowerTriangular::zeros(partition.clone());
    for (key, rows) in &raw.blocks {
        let quoted = format!("\"{key}\"");
        let field = format!("blocks.{quoted}");
        let err = |message: String| field_err(field.clone(), &quoted, message);
        let (i, j) = parse_key(key).ok_or_else(|| err("key must be \"i,j\" with 1-based integer indices".into()))?;
        if i == 0 || j == 0 || i > k || j > k {
            return Err(err(format!("indices must lie in 1..={k}")));
        }
        if i < j {
            return Err(err("block lies above the block diagonal (need i >= j)".into()));
        }
        let (ni, nj) = (partition.size(i - 1), partition.size(j - 1));
        if rows.len() != ni {
            return Err(err(format!("expected {ni} rows, found {}", rows.len())));
        }
        let mut data = Vec::with_capacity(ni * nj);
        for (r, row) in rows.iter().enumerate() {
            if row.len() != nj {
                return Err(err(format!("row {} has {} entries, expected {nj}", r + 1, row.len())));
            }
            for (col, &[re, im]) in row.iter().enumerate() {
                if !re.is_finite() || !im.is_finite() {
                    return Err(err(format!("entry ({}, {}) is not finite", r + 1, col + 1)));
                }
                data.push(C64::new(re, im));
            }
        }
        a.insert(i - 1, j - 1, CMatrix::from_vec(ni, nj, data)).map_err(|e| err(e.to_string()))?;
    }
    Ok(a)
}

pub fn to_file(a: &BlockLowerTriangular) -> MatrixFile {
    let blocks = a
        .blocks()
        .map(|(&(i, j), m)| {
            let rows = (0..m.nrows()).map(|r| m.row(r).iter().map(|z| [z.re, z.im]).collect()).collect();
            (format!("{},{}", i + 1, j + 1), rows)
        })
        .collect();
    MatrixFile { partition: a.partition().sizes().to_vec(), blocks }
}

pub fn write_matrix(a: &BlockLowerTriangular) -> String {
    let mut s = serde_json::to_string_pretty(&to_file(a)).expect("matrix serializes");
    s.push('\n');
    s
}
