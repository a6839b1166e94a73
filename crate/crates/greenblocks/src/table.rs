//! Output tables. Indices are 1-based. Numbers use Rust's shortest
//! round-trip formatting, so identical inputs give identical bytes.

use greenblocks_core::greensolve::GreenSample;
use greenblocks_core::{BlockLowerTriangular, C64};
use serde::Serialize;

use crate::matrix_file::{to_file, MatrixFile};

pub const SAMPLE_HEADER: [&str; 9] = ["t", "i", "j", "row", "col", "re", "im", "route", "est_error"];
pub const SOLUTION_HEADER: [&str; 6] = ["t", "i", "row", "re", "im", "route"];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

/// Every block on or below the diagonal, absent ones written as zeros.
fn dense_lower(a: &BlockLowerTriangular) -> BlockLowerTriangular {
    let mut out = a.clone();
    for i in 0..a.num_blocks() {
        for j in 0..i {
            if a.block(i, j).is_none() {
                out.insert(i, j, a.block_or_zero(i, j)).expect("shape from partition");
            }
        }
    }
    out
}

/// Shortest round-trip digits, positional for moderate magnitudes and
/// scientific otherwise.
pub fn fmt_num(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-4..1e15).contains(&a) || !a.is_finite() {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn csv_string(rows: impl IntoIterator<Item = Vec<String>>, header: &[&str]) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
}

pub fn samples_csv(samples: &[GreenSample]) -> String {
    let mut rows = Vec::new();
    for s in samples {
        let a = dense_lower(&s.matrix);
        for (&(i, j), m) in a.blocks() {
            for r in 0..m.nrows() {
                for c in 0..m.ncols() {
                    let z = m[(r, c)];
                    rows.push(vec![
                        fmt_num(s.t),
                        (i + 1).to_string(),
                        (j + 1).to_string(),
                        (r + 1).to_string(),
                        (c + 1).to_string(),
                        fmt_num(z.re),
                        fmt_num(z.im),
                        s.route.name().to_string(),
                        fmt_num(s.est_error),
                    ]);
                }
            }
        }
    }
    csv_string(rows, &SAMPLE_HEADER)
}

#[derive(Serialize)]
struct SampleRecord<'a> {
    t: f64,
    kind: &'a str,
    route: &'a str,
    est_error: f64,
    matrix: MatrixFile,
}

pub fn samples_json(samples: &[GreenSample]) -> String {
    let records: Vec<SampleRecord> = samples
        .iter()
        .map(|s| SampleRecord {
            t: s.t,
            kind: s.kind.name(),
            route: s.route.name(),
            est_error: s.est_error,
            matrix: to_file(&dense_lower(&s.matrix)),
        })
        .collect();
    let mut out = serde_json::to_string_pretty(&serde_json::json!({ "samples": records })).expect("serializes");
    out.push('\n');
    out
}

/// Solution vectors `x(t)` split by block.
pub struct Solution<'a> {
    pub times: &'a [f64],
    pub values: &'a [Vec<C64>],
    pub sizes: &'a [usize],
    pub route: &'a str,
}

pub fn solution_csv(s: &Solution) -> String {
    let mut rows = Vec::new();
    for (&t, x) in s.times.iter().zip(s.values) {
        let mut offset = 0;
        for (i, &n) in s.sizes.iter().enumerate() {
            for r in 0..n {
                let z = x[offset + r];
                rows.push(vec![
                    fmt_num(t),
                    (i + 1).to_string(),
                    (r + 1).to_string(),
                    fmt_num(z.re),
                    fmt_num(z.im),
                    s.route.to_string(),
                ]);
            }
            offset += n;
        }
    }
    csv_string(rows, &SOLUTION_HEADER)
}

pub fn solution_json(s: &Solution, extra: serde_json::Value) -> String {
    let samples: Vec<serde_json::Value> = s
        .times
        .iter()
        .zip(s.values)
        .map(|(&t, x)| serde_json::json!({ "t": t, "x": x.iter().map(|z| [z.re, z.im]).collect::<Vec<_>>() }))
        .collect();
    let mut doc = serde_json::json!({ "route": s.route, "samples": samples });
    if let (Some(obj), serde_json::Value::Object(more)) = (doc.as_object_mut(), extra) {
        obj.extend(more);
    }
    let mut out = serde_json::to_string_pretty(&doc).expect("serializes");
    out.push('\n');
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use greenblocks_core::{KernelKind, Route};

    #[test]
    fn csv_has_one_row_per_lower_entry() {
        let a = crate::matrix_file::parse_matrix(r#"{"partition":[1,2],"blocks":{"1,1":[[[1,0]]]}}"#).unwrap();
        let s = GreenSample { t: 0.5, matrix: a, kind: KernelKind::Plus, route: Route::Oracle, est_error: 0.0 };
        let text = samples_csv(&[s]);
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "t,i,j,row,col,re,im,route,est_error");
        assert_eq!(lines.len(), 1 + 1 + 2 + 4);
        assert_eq!(lines[1], "0.5,1,1,1,1,1,0,oracle,0");
    }
}
