//! Exact element mass matrices of lowest-order Whitney forms.
//!
//! On a cell with barycentric coordinates `l_0..l_n`, the Whitney form of the
//! local face `[s_0, .., s_p]` is `p! sum_i (-1)^i l_{s_i} dl_{s_0} ^ .. ^ dl_{s_p}`
//! (with `dl_{s_i}` omitted). Products of barycentric coordinates integrate
//! in closed form, `int l_a l_b = |T| (1 + [a = b]) / ((n+1)(n+2))`, and the
//! pointwise inner product of two wedges of gradients is the Gram determinant.

use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::mesh::{local_subsets, SimplicialComplex};
use crate::scalar::Real;

/// Geometry of one cell: volume and barycentric gradients.
pub(crate) struct CellGeometry<T> {
    pub volume: T,
    /// `grads[a][k]`: `d l_a / d x_k`
    pub grads: Vec<Vec<T>>,
}

pub(crate) fn cell_geometry<T: Real>(complex: &SimplicialComplex, c: usize) -> Result<CellGeometry<T>> {
    let n = complex.dim();
    let cell = complex.cell(c);
    let x0 = complex.vertex(cell[0]);
    let edges = DenseMatrix::<T>::from_fn(n, n, |i, j| T::of(complex.vertex(cell[j + 1])[i] - x0[i]));
    let det = edges.determinant();
    let factorial: usize = (1..=n).product();
    let volume = det.abs() / T::of(factorial as f64);
    let longest = cell
        .iter()
        .flat_map(|&a| cell.iter().map(move |&b| (a, b)))
        .map(|(a, b)| complex.distance(a, b))
        .fold(f64::MIN_POSITIVE, f64::max);
    let scale = T::of(longest).powi(n as i32);
    if !(volume > scale * T::epsilon() * T::of(16.0)) {
        return Err(Error::DegenerateCell { cell: c, volume: volume.as_f64() });
    }
    // rows of E^{-1} are the gradients of l_1..l_n
    let inv = edges.inverse().ok_or(Error::DegenerateCell { cell: c, volume: volume.as_f64() })?;
    let mut grads = Vec::with_capacity(n + 1);
    let mut g0 = vec![T::zero(); n];
    for a in 0..n {
        let row: Vec<T> = (0..n).map(|k| inv[(a, k)]).collect();
        for k in 0..n {
            g0[k] -= row[k];
        }
        grads.push(row);
    }
    grads.insert(0, g0);
    Ok(CellGeometry { volume, grads })
}

/// `det(<dl_{a_i}, dl_{b_j}>)` for index lists of equal length.
fn wedge_inner<T: Real>(gram: &DenseMatrix<T>, a: &[usize], b: &[usize]) -> T {
    match a.len() {
        0 => T::one(),
        1 => gram[(a[0], b[0])],
        k => DenseMatrix::from_fn(k, k, |i, j| gram[(a[i], b[j])]).determinant(),
    }
}

/// Local Whitney `p`-form mass matrix, rows in [`local_subsets`] order.
pub(crate) fn element_mass<T: Real>(geo: &CellGeometry<T>, p: usize) -> DenseMatrix<T> {
    let n = geo.grads.len() - 1;
    let gram = DenseMatrix::from_fn(n + 1, n + 1, |a, b| crate::scalar::dot(&geo.grads[a], &geo.grads[b]));
    let faces = local_subsets(n + 1, p + 1);
    let pf: f64 = (1..=p).product::<usize>() as f64;
    let denom = ((n + 1) * (n + 2)) as f64;
    let lambda_int = |a: usize, b: usize| geo.volume * T::of(if a == b { 2.0 } else { 1.0 } / denom);
    let sign = |i: usize| if i.is_multiple_of(2) { T::one() } else { -T::one() };
    let omit = |s: &[usize], i: usize| -> Vec<usize> {
        s.iter().enumerate().filter(|&(k, _)| k != i).map(|(_, &v)| v).collect()
    };
    let k = faces.len();
    let mut m = DenseMatrix::zeros(k, k);
    for (r, s) in faces.iter().enumerate() {
        for (c, t) in faces.iter().enumerate().skip(r) {
            let mut acc = T::zero();
            for i in 0..=p {
                let si = omit(s, i);
                for j in 0..=p {
                    let tj = omit(t, j);
                    acc += sign(i + j) * lambda_int(s[i], t[j]) * wedge_inner(&gram, &si, &tj);
                }
            }
            let v = acc * T::of(pf * pf);
            m[(r, c)] = v;
            m[(c, r)] = v;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mesh::{generate, CanonicalDomain};

    #[test]
    fn p1_mass_on_reference_triangle() {
        let t = SimplicialComplex::new(2, vec![0.0, 0.0, 2.0, 0.0, 0.0, 1.0], vec![vec![0, 1, 2]]).unwrap();
        let geo = cell_geometry::<f64>(&t, 0).unwrap();
        let m = element_mass(&geo, 0);
        let area = 1.0;
        for i in 0..3 {
            for j in 0..3 {
                let want = if i == j { area / 6.0 } else { area / 12.0 };
                assert!((m[(i, j)] - want).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn top_degree_mass_is_inverse_volume() {
        let cube = generate(CanonicalDomain::UnitCube, 1).unwrap();
        for c in 0..cube.num_cells() {
            let geo = cell_geometry::<f64>(&cube, c).unwrap();
            let m = element_mass(&geo, 3);
            assert!((m[(0, 0)] - 1.0 / geo.volume).abs() < 1e-12);
        }
        let sq = generate(CanonicalDomain::UnitSquare, 1).unwrap();
        let geo = cell_geometry::<f64>(&sq, 0).unwrap();
        assert!((element_mass(&geo, 2)[(0, 0)] - 2.0).abs() < 1e-13);
    }

    /// Independent check: evaluate the Whitney 1-forms pointwise and integrate
    /// with the degree-2 exact edge-midpoint rule.
    #[test]
    fn edge_mass_matches_quadrature() {
        let t = SimplicialComplex::new(2, vec![0.1, 0.0, 1.3, 0.2, 0.4, 0.9], vec![vec![0, 1, 2]]).unwrap();
        let geo = cell_geometry::<f64>(&t, 0).unwrap();
        let m = element_mass(&geo, 1);
        let edges = [(0usize, 1usize), (0, 2), (1, 2)];
        let whitney = |e: (usize, usize), l: [f64; 3]| -> [f64; 2] {
            let (a, b) = e;
            [
                l[a] * geo.grads[b][0] - l[b] * geo.grads[a][0],
                l[a] * geo.grads[b][1] - l[b] * geo.grads[a][1],
            ]
        };
        let points = [[0.5, 0.5, 0.0], [0.5, 0.0, 0.5], [0.0, 0.5, 0.5]];
        for (r, &er) in edges.iter().enumerate() {
            for (c, &ec) in edges.iter().enumerate() {
                let q: f64 = points
                    .iter()
                    .map(|&l| {
                        let (u, v) = (whitney(er, l), whitney(ec, l));
                        u[0] * v[0] + u[1] * v[1]
                    })
                    .sum::<f64>()
                    * geo.volume
                    / 3.0;
                assert!((q - m[(r, c)]).abs() < 1e-13, "({r},{c}): {q} vs {}", m[(r, c)]);
            }
        }
    }

    #[test]
    fn degenerate_cell_is_named() {
        let t = SimplicialComplex::new(2, vec![0.0, 0.0, 1.0, 0.0, 2.0, 0.0], vec![vec![0, 1, 2]]).unwrap();
        assert!(matches!(cell_geometry::<f64>(&t, 0), Err(Error::DegenerateCell { cell: 0, .. })));
    }
}
