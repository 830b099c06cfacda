//! Plain-text mesh format.
//!
//! ```text
//! # comment lines start with '#'
//! dim nv ncell
//! x y [z]            (nv lines)
//! i j k [l]          (ncell lines, 0-based vertex indices)
//! ```

use std::fmt::Write as _;

use super::SimplicialComplex;
use crate::error::{Error, Result};

pub fn write_mesh(complex: &SimplicialComplex) -> String {
    let dim = complex.dim();
    let mut out = String::new();
    let _ = writeln!(out, "{} {} {}", dim, complex.num_vertices(), complex.num_cells());
    for i in 0..complex.num_vertices() {
        let row: Vec<String> = complex.vertex(i).iter().map(|x| format!("{x:?}")).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    for c in 0..complex.num_cells() {
        let row: Vec<String> = complex.cell(c).iter().map(usize::to_string).collect();
        let _ = writeln!(out, "{}", row.join(" "));
    }
    out
}

pub fn read_mesh(text: &str) -> Result<SimplicialComplex> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(k, l)| (k + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'));
    let err = |line: usize, msg: String| Error::Parse { line, msg };

    let (hl, header) = lines.next().ok_or_else(|| err(1, "missing header `dim nv ncell`".into()))?;
    let h: Vec<usize> = header
        .split_whitespace()
        .map(str::parse)
        .collect::<std::result::Result<_, _>>()
        .map_err(|_| err(hl, format!("malformed header `{header}`")))?;
    let [dim, nv, ncell] = h[..] else {
        return Err(err(hl, format!("header needs 3 fields, found {}", h.len())));
    };
    if !(2..=3).contains(&dim) {
        return Err(err(hl, format!("dimension must be 2 or 3, got {dim}")));
    }

    let mut last_line = hl;
    let mut coords = Vec::with_capacity(nv * dim);
    for v in 0..nv {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| err(last_line + 1, format!("expected {nv} vertices, file ends after {v}")))?;
        last_line = ln;
        let xs: Vec<f64> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| err(ln, format!("vertex {v}: expected {dim} floats, got `{l}`")))?;
        if xs.len() != dim {
            return Err(err(ln, format!("vertex {v}: expected {dim} floats, got {}", xs.len())));
        }
        coords.extend(xs);
    }

    let mut cells = Vec::with_capacity(ncell);
    let mut cell_lines = Vec::with_capacity(ncell);
    for c in 0..ncell {
        let (ln, l) = lines
            .next()
            .ok_or_else(|| err(last_line + 1, format!("expected {ncell} cells, file ends after {c}")))?;
        last_line = ln;
        let idx: Vec<usize> = l
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|_| err(ln, format!("cell {c}: expected {} indices, got `{l}`", dim + 1)))?;
        if idx.len() != dim + 1 {
            return Err(err(ln, format!("cell {c}: expected {} indices, got {}", dim + 1, idx.len())));
        }
        if let Some(&bad) = idx.iter().find(|&&i| i >= nv) {
            return Err(err(ln, format!("cell {c}: vertex index {bad} out of range (nv = {nv})")));
        }
        cells.push(idx);
        cell_lines.push(ln);
    }
    if let Some((ln, l)) = lines.next() {
        return Err(err(ln, format!("unexpected trailing content `{l}`")));
    }
    SimplicialComplex::build(dim, coords, cells).map_err(|(cell, e)| match cell {
        Some(c) => err(cell_lines[c], e.to_string()),
        None => e,
    })
}
