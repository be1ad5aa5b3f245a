//! Matrix interchange: a JSON document and MatrixMarket-style coordinate text.

use std::fmt::Write as _;

use num_complex::Complex;
use serde::{Deserialize, Serialize};

use super::sparse::SparseMatrix;
use crate::error::{Error, Result};
use crate::scalar::Real;

const COORD_HEADER: &str = "%%MatrixMarket matrix coordinate complex general";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MatrixDoc {
    pub dim: usize,
    /// `[row, col, re, im]` with 0-based coordinates.
    pub entries: Vec<(usize, usize, f64, f64)>,
}

impl MatrixDoc {
    pub fn from_matrix<T: Real>(m: &SparseMatrix<T>) -> Self {
        Self {
            dim: m.dim(),
            entries: m
                .entries()
                .map(|(r, c, v)| {
                    (
                        r,
                        c,
                        v.re.to_f64().unwrap_or(f64::NAN),
                        v.im.to_f64().unwrap_or(f64::NAN),
                    )
                })
                .collect(),
        }
    }

    pub fn to_matrix<T: Real>(&self) -> Result<SparseMatrix<T>> {
        if self.dim == 0 {
            return Err(Error::Parse("dimension must be positive".into()));
        }
        let mut prev: Option<(usize, usize)> = None;
        for &(r, c, _, _) in &self.entries {
            if prev.is_some_and(|p| p >= (r, c)) {
                return Err(Error::Parse(format!(
                    "entries must be sorted with unique coordinates near ({r}, {c})"
                )));
            }
            prev = Some((r, c));
        }
        SparseMatrix::from_triplets(
            self.dim,
            self.entries
                .iter()
                .map(|&(r, c, re, im)| (r, c, Complex::new(T::lit(re), T::lit(im)))),
        )
    }
}

pub fn to_json<T: Real>(m: &SparseMatrix<T>) -> String {
    serde_json::to_string(&MatrixDoc::from_matrix(m)).expect("matrix document serializes")
}

pub fn from_json<T: Real>(text: &str) -> Result<SparseMatrix<T>> {
    let doc: MatrixDoc = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
    doc.to_matrix()
}

pub fn to_coordinate<T: Real>(m: &SparseMatrix<T>) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "{COORD_HEADER}");
    let _ = writeln!(out, "{} {} {}", m.dim(), m.dim(), m.nnz());
    for (r, c, v) in m.entries() {
        let _ = writeln!(
            out,
            "{} {} {} {}",
            r + 1,
            c + 1,
            v.re.to_f64().unwrap_or(f64::NAN),
            v.im.to_f64().unwrap_or(f64::NAN)
        );
    }
    out
}

pub fn from_coordinate<T: Real>(text: &str) -> Result<SparseMatrix<T>> {
    let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("empty input".into()))?;
    if !header.eq_ignore_ascii_case(COORD_HEADER) {
        return Err(Error::Parse(format!("unexpected header {header:?}")));
    }
    let mut lines = lines.filter(|l| !l.starts_with('%'));
    let size = lines
        .next()
        .ok_or_else(|| Error::Parse("missing size line".into()))?;
    let size: Vec<usize> = parse_fields(size)?;
    let [rows, cols, nnz] = size[..] else {
        return Err(Error::Parse("size line needs three integers".into()));
    };
    if rows != cols || rows == 0 {
        return Err(Error::Parse(format!(
            "matrix must be square, got {rows}x{cols}"
        )));
    }
    let mut triplets = Vec::with_capacity(nnz);
    for line in lines {
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [r, c, re, im] = fields[..] else {
            return Err(Error::Parse(format!("bad entry line {line:?}")));
        };
        let r: usize = parse_one(r)?;
        let c: usize = parse_one(c)?;
        if r == 0 || c == 0 {
            return Err(Error::Parse("coordinates are 1-based".into()));
        }
        let re: f64 = parse_one(re)?;
        let im: f64 = parse_one(im)?;
        triplets.push((r - 1, c - 1, Complex::new(T::lit(re), T::lit(im))));
    }
    if triplets.len() != nnz {
        return Err(Error::Parse(format!(
            "size line declares {nnz} entries, found {}",
            triplets.len()
        )));
    }
    SparseMatrix::from_triplets(rows, triplets)
}

fn parse_one<F: std::str::FromStr>(s: &str) -> Result<F> {
    s.parse()
        .map_err(|_| Error::Parse(format!("cannot parse {s:?}")))
}

fn parse_fields<F: std::str::FromStr>(line: &str) -> Result<Vec<F>> {
    line.split_whitespace().map(parse_one).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::cplx;

    type M = SparseMatrix<f64>;

    fn sample() -> M {
        M::from_triplets(
            3,
            [
                (0, 1, cplx(0.1, -1.0 / 3.0)),
                (2, 2, cplx(std::f64::consts::PI, 1e-10)),
                (1, 0, cplx(-7.25, 0.0)),
            ],
        )
        .unwrap()
    }

    #[test]
    fn json_round_trip_is_bit_exact() {
        let m = sample();
        assert_eq!(from_json::<f64>(&to_json(&m)).unwrap(), m);
    }

    #[test]
    fn coordinate_round_trip() {
        let m = sample();
        let text = to_coordinate(&m);
        assert!(text.starts_with(COORD_HEADER));
        assert!(text.contains("\n2 1 -7.25 0\n"));
        assert_eq!(from_coordinate::<f64>(&text).unwrap(), m);
    }

    #[test]
    fn malformed_inputs_are_rejected() {
        assert!(from_json::<f64>("{\"dim\": 2}").is_err());
        assert!(from_json::<f64>("{\"dim\": 2, \"entries\": [[1,0,1,0],[0,0,1,0]]}").is_err());
        assert!(from_json::<f64>("{\"dim\": 2, \"entries\": [[2,0,1,0]]}").is_err());
        assert!(from_coordinate::<f64>("garbage").is_err());
        let bad_count = format!("{COORD_HEADER}\n2 2 2\n1 1 1 0\n");
        assert!(from_coordinate::<f64>(&bad_count).is_err());
    }
}
