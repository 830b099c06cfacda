use std::collections::HashMap;

use super::SimplicialComplex;
use crate::error::Result;

/// Uniform refinement: 1:4 edge-midpoint subdivision in 2D, red (1:8)
/// subdivision in 3D with the interior octahedron cut along a fixed diagonal.
///
/// Existing vertices keep their indices; midpoints are appended in edge order.
pub fn refine(complex: &SimplicialComplex) -> Result<SimplicialComplex> {
    let dim = complex.dim();
    let nv = complex.num_vertices();
    let mut coords = complex.coords().to_vec();
    let mut mid: HashMap<(usize, usize), usize> = HashMap::new();
    for (e, verts) in complex.simplices(1).enumerate() {
        let (a, b) = (verts[0], verts[1]);
        for d in 0..dim {
            coords.push(0.5 * (complex.vertex(a)[d] + complex.vertex(b)[d]));
        }
        mid.insert((a, b), nv + e);
    }
    let m = |a: usize, b: usize| mid[&(a.min(b), a.max(b))];

    let mut cells = Vec::with_capacity(complex.num_cells() * if dim == 2 { 4 } else { 8 });
    for c in 0..complex.num_cells() {
        let v = complex.cell(c);
        if dim == 2 {
            let (m01, m02, m12) = (m(v[0], v[1]), m(v[0], v[2]), m(v[1], v[2]));
            cells.push(vec![v[0], m01, m02]);
            cells.push(vec![m01, v[1], m12]);
            cells.push(vec![m02, m12, v[2]]);
            cells.push(vec![m01, m12, m02]);
        } else {
            let (m01, m02, m03) = (m(v[0], v[1]), m(v[0], v[2]), m(v[0], v[3]));
            let (m12, m13, m23) = (m(v[1], v[2]), m(v[1], v[3]), m(v[2], v[3]));
            cells.push(vec![v[0], m01, m02, m03]);
            cells.push(vec![m01, v[1], m12, m13]);
            cells.push(vec![m02, m12, v[2], m23]);
            cells.push(vec![m03, m13, m23, v[3]]);
            // octahedron split along m02 - m13
            cells.push(vec![m01, m02, m03, m13]);
            cells.push(vec![m01, m02, m12, m13]);
            cells.push(vec![m02, m03, m13, m23]);
            cells.push(vec![m02, m12, m13, m23]);
        }
    }
    let refined = SimplicialComplex::new(dim, coords, cells)?;
    Ok(match complex.origin() {
        Some((domain, res)) => refined.with_origin(domain, 2 * res),
        None => refined,
    })
}
