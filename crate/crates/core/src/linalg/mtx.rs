//! Matrix Market coordinate format (`real general`).

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::linalg::sparse::CsrMatrix;
use crate::scalar::Real;

/// Serializes all stored entries, 1-based, full precision.
pub fn write_matrix_market<T: Real>(m: &CsrMatrix<T>, comment: Option<&str>) -> String {
    let mut out = String::from("%%MatrixMarket matrix coordinate real general\n");
    if let Some(c) = comment {
        for line in c.lines() {
            let _ = writeln!(out, "% {line}");
        }
    }
    let _ = writeln!(out, "{} {} {}", m.nrows(), m.ncols(), m.nnz());
    for (i, j, v) in m.triplets() {
        let _ = writeln!(out, "{} {} {:e}", i + 1, j + 1, v.as_f64());
    }
    out
}

pub fn read_matrix_market(text: &str) -> Result<CsrMatrix<f64>> {
    let mut lines = text.lines().enumerate();
    let (_, banner) = lines.next().ok_or(Error::Parse { line: 1, msg: "empty input".into() })?;
    let banner_lc = banner.to_ascii_lowercase();
    if !banner_lc.starts_with("%%matrixmarket matrix coordinate real") {
        return Err(Error::Parse { line: 1, msg: format!("unsupported banner `{banner}`") });
    }
    let symmetric = banner_lc.contains("symmetric");
    let mut header = None;
    let mut trips = Vec::new();
    for (k, line) in lines {
        let lineno = k + 1;
        let line = line.trim();
        if line.is_empty() || line.starts_with('%') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        let bad = |msg: &str| Error::Parse { line: lineno, msg: msg.to_string() };
        match header {
            None => {
                if fields.len() != 3 {
                    return Err(bad("size line needs `rows cols nnz`"));
                }
                let p = |s: &str| s.parse::<usize>().map_err(|_| bad("invalid size"));
                header = Some((p(fields[0])?, p(fields[1])?, p(fields[2])?));
            }
            Some((nr, nc, _)) => {
                if fields.len() != 3 {
                    return Err(bad("entry line needs `row col value`"));
                }
                let i: usize = fields[0].parse().map_err(|_| bad("invalid row"))?;
                let j: usize = fields[1].parse().map_err(|_| bad("invalid column"))?;
                let v: f64 = fields[2].parse().map_err(|_| bad("invalid value"))?;
                if i == 0 || j == 0 || i > nr || j > nc {
                    return Err(bad("index out of range"));
                }
                trips.push((i - 1, j - 1, v));
                if symmetric && i != j {
                    trips.push((j - 1, i - 1, v));
                }
            }
        }
    }
    let (nr, nc, nnz) = header.ok_or(Error::Parse { line: 1, msg: "missing size line".into() })?;
    let stored = if symmetric { trips.iter().filter(|t| t.0 >= t.1).count() } else { trips.len() };
    if stored != nnz {
        return Err(Error::Parse { line: 0, msg: format!("expected {nnz} entries, found {stored}") });
    }
    Ok(CsrMatrix::from_triplets(nr, nc, &trips))
}
